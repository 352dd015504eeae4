//! Amplitude fluctuation versus K, its derivatives, and where they turn over.

use csi_vitals::channel_model::{k_stationary, model_sweep, rho_stationary};

fn main() -> csi_vitals::Result<()> {
    let rho = 0.7;
    let grid: Vec<f64> = [0.0, 1.0, 2.0, 5.0, 12.4, 17.8, 52.0, 201.1].to_vec();
    println!(
        "{:>7} {:>10} {:>11} {:>11} {:>8}",
        "K", "f", "df/dK", "df/drho", "AS"
    );
    for p in model_sweep(rho, 0.0, &grid)? {
        println!(
            "{:>7.1} {:>10.5} {:>11.3e} {:>11.3e} {:>8.4}",
            p.k_factor, p.f_value, p.df_dk, p.df_drho, p.as_max
        );
    }
    println!(
        "df/dK vanishes at K = {:.2} for rho = {rho}",
        k_stationary(rho)
    );
    for k in [0.0, 0.5] {
        println!(
            "df/drho vanishes at rho = {:.2} for K = {k}",
            rho_stationary(k)
        );
    }
    Ok(())
}
