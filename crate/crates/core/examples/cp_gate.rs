//! Controlled-phase gate through a shared cavity mode.
//!
//! Runs the restricted five-state model with dissipation, then the
//! closed-system reconstruction, and the extended basis to show how much
//! |110⟩ leaves the restricted subspace.

use satd_holonomy::gates::{cp_phase_error, run_cp_gate, GateProtocol};
use satd_holonomy::model::TwoQubitBasis;
use satd_holonomy::pulse::DressingMode;

fn main() -> satd_holonomy::Result<()> {
    let base = GateProtocol::cp_gate();
    println!(
        "G_max = 2π·{:.1} MHz",
        base.raman.g_max() / satd_holonomy::TWO_PI_MHZ
    );
    for mode in [DressingMode::None, DressingMode::Satd, DressingMode::Msa] {
        let r = run_cp_gate(&base.clone().with_mode(mode), true)?;
        println!("CP {mode:>4}: F = {:.4}%", 100.0 * r.fidelity);
    }

    let closed = base.clone().closed();
    let r = run_cp_gate(&closed, false)?;
    let labels = ["|00⟩", "|01⟩", "|10⟩", "|11⟩"];
    for (k, label) in labels.iter().enumerate() {
        let z = r.gate.raw[(k, k)];
        println!(
            "{label} -> amplitude {:.4}, phase {:+.4} rad",
            z.norm(),
            z.arg()
        );
    }
    println!(
        "|10⟩ phase error {:.2e} rad",
        cp_phase_error(&closed, &r.gate)
    );

    let mut extended = closed;
    extended.basis = TwoQubitBasis::Extended;
    let r = run_cp_gate(&extended, false)?;
    println!("extended basis: |11⟩ leakage {:.3}", r.gate.leakage[3]);
    Ok(())
}
