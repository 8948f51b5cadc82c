//! NOT-gate fidelity as the atomic decay rate is scaled up. The first row
//! also switches off dephasing.

use satd_holonomy::gates::{sweep_decay, GateProtocol};

fn main() -> satd_holonomy::Result<()> {
    let rows = sweep_decay(
        &GateProtocol::not_gate(),
        &[0.0, 1.0, 2.0, 5.0, 10.0, 20.0],
        4,
    )?;
    for r in rows {
        println!(
            "{:>4}  Γ₁′/Γ₁ = {:>4}  F = {:.4}%",
            r.mode,
            r.multiplier,
            100.0 * r.fidelity
        );
    }
    Ok(())
}
