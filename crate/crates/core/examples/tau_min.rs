//! Shortest pulse width that keeps every corrected drive channel at or
//! below Ω_max, for a few T/τ ratios.

use satd_holonomy::pulse::{tau_min, Dressing};
use satd_holonomy::TWO_PI_MHZ;

fn main() -> satd_holonomy::Result<()> {
    let omega_max = 750.0 * TWO_PI_MHZ;
    for ratio in [6.0, 8.0, 10.0, 14.0] {
        let tau = tau_min(omega_max, &Dressing::satd(), ratio)?;
        println!(
            "T/τ = {ratio:>4}: τ_min = {:.4} ps, τ_min·Ω_max = {:.5} (1/{:.4})",
            tau * 1e12,
            tau * omega_max,
            1.0 / (tau * omega_max)
        );
    }
    Ok(())
}
