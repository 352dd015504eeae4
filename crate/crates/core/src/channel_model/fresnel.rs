//! Fresnel zone boundaries around a transmitter/receiver pair.

use crate::error::{invalid, Error, Result};

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Transmitter, receiver and carrier wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelGeometry {
    pub tx: Point2,
    pub rx: Point2,
    pub lambda: f64,
}

impl FresnelGeometry {
    pub fn new(tx: Point2, rx: Point2, lambda: f64) -> Result<Self> {
        let geom = Self { tx, rx, lambda };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx == self.rx {
            return Err(Error::DegenerateGeometry);
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Path-length excess `|TxQ| + |QRx| - |TxRx|` of a point.
    pub fn excess_path(&self, q: Point2) -> f64 {
        self.tx.distance(q) + q.distance(self.rx) - self.tx.distance(self.rx)
    }

    /// Semi-axes `(a, b)` of the n-th zone ellipse.
    pub fn semi_axes(&self, n: u32) -> Result<(f64, f64)> {
        self.validate()?;
        if n == 0 {
            return Err(invalid("n", "zone index must be >= 1"));
        }
        let c = 0.5 * self.tx.distance(self.rx);
        let a = c + n as f64 * self.lambda / 4.0;
        // a^2 - c^2 factored to avoid cancellation when the zone is thin
        let b = ((a - c) * (a + c)).sqrt();
        Ok((a, b))
    }
}

/// Point on the boundary of the n-th Fresnel zone at parametric angle `azimuth`.
///
/// The zone boundary is the ellipse with foci at Tx and Rx whose points satisfy
/// `|TxQ| + |QRx| - |TxRx| = n * lambda / 2`. Azimuth 0 is the vertex beyond Rx,
/// azimuth pi/2 lies on the perpendicular bisector, to the left of Tx->Rx.
pub fn fresnel_boundary_point(geom: &FresnelGeometry, n: u32, azimuth: f64) -> Result<Point2> {
    let (a, b) = geom.semi_axes(n)?;
    let len = geom.tx.distance(geom.rx);
    let (ux, uy) = ((geom.rx.x - geom.tx.x) / len, (geom.rx.y - geom.tx.y) / len);
    let (cx, cy) = (0.5 * (geom.tx.x + geom.rx.x), 0.5 * (geom.tx.y + geom.rx.y));
    let (s, c) = azimuth.sin_cos();
    let (along, across) = (a * c, b * s);
    Ok(Point2::new(
        cx + along * ux - across * uy,
        cy + along * uy + across * ux,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn geom() -> FresnelGeometry {
        FresnelGeometry::new(Point2::new(0.0, 0.0), Point2::new(1.2, 0.0), 0.06).unwrap()
    }

    #[test]
    fn first_zone_on_bisector() {
        // b = sqrt(0.615^2 - 0.6^2)
        let q = fresnel_boundary_point(&geom(), 1, FRAC_PI_2).unwrap();
        let b = (0.615f64 * 0.615 - 0.36).sqrt();
        assert!((b - 0.135).abs() < 1e-12);
        assert!((q.x - 0.6).abs() < 1e-12);
        assert!((q.y - 0.135).abs() < 1e-12);
        assert!((geom().excess_path(q) - 0.03).abs() < 1e-9);
    }

    #[test]
    fn vertex_beyond_receiver() {
        let g = geom();
        for n in 1..=5 {
            let q = fresnel_boundary_point(&g, n, 0.0).unwrap();
            assert!(q.y.abs() < 1e-12);
            assert!((q.x - 1.2 - n as f64 * 0.06 / 4.0).abs() < 1e-12);
            assert!((g.excess_path(q) - n as f64 * 0.03).abs() < 1e-9);
        }
    }

    #[test]
    fn rotated_axis_residual() {
        let g =
            FresnelGeometry::new(Point2::new(-1.0, 2.0), Point2::new(3.0, -0.5), 0.0577).unwrap();
        for i in 0..360 {
            let az = i as f64 * std::f64::consts::PI / 180.0;
            let q = fresnel_boundary_point(&g, 3, az).unwrap();
            assert!((g.excess_path(q) - 1.5 * 0.0577).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_degenerate() {
        let p = Point2::new(1.0, 1.0);
        assert!(matches!(
            FresnelGeometry::new(p, p, 0.06),
            Err(Error::DegenerateGeometry)
        ));
        let g = FresnelGeometry {
            tx: p,
            rx: p,
            lambda: 0.06,
        };
        assert!(fresnel_boundary_point(&g, 1, 0.0).is_err());
        assert!(fresnel_boundary_point(&geom(), 0, 0.0).is_err());
    }
}
