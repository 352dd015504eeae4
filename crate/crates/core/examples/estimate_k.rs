//! Moment-based K estimates on synthetic Ricean channels.

use csi_vitals::channel_model::{estimate_ricean_k, ricean_trace};

fn main() -> csi_vitals::Result<()> {
    for k in [1.0, 10.0, 50.0] {
        let trace = ricean_trace(k, 100_000, 1000, 7)?;
        println!(
            "true K {k:>5.1}  estimated {:>7.3}",
            estimate_ricean_k(&trace, 0, 0)?
        );
    }
    Ok(())
}
