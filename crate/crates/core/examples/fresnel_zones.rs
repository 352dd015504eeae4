//! Fresnel zone ellipses for a 2.4 GHz link with the endpoints 2 m apart.

use csi_vitals::channel_model::{fresnel_boundary_point, FresnelGeometry, Point2};

fn main() -> csi_vitals::Result<()> {
    let geom = FresnelGeometry::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), 0.125)?;
    for n in 1..=5 {
        let (a, b) = geom.semi_axes(n)?;
        let top = fresnel_boundary_point(&geom, n, std::f64::consts::FRAC_PI_2)?;
        println!(
            "zone {n}: semi-axes {a:.4} x {b:.4} m, excess path at apex {:.4} m (n*lambda/2 = {:.4})",
            geom.excess_path(top),
            n as f64 * geom.lambda / 2.0
        );
    }
    Ok(())
}
