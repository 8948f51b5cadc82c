//! Random (φ, γ) holonomies against the analytic formula, at τ_min and 4τ_min.

use rand::{rngs::StdRng, Rng, SeedableRng};
use satd_holonomy::gates::{
    analytic_holonomy, gate_unitary_from_dynamics, phase_aligned_error, GateProtocol,
};
use std::f64::consts::PI;

fn main() -> satd_holonomy::Result<()> {
    let mut rng = StdRng::seed_from_u64(7);
    let tau = GateProtocol::not_gate().resolve_tau()?;
    let mut worst = [0.0f64; 2];
    for _ in 0..20 {
        let varphi = rng.gen_range(0.0..PI / 2.0);
        let gamma = rng.gen_range(-PI..PI);
        let oracle = analytic_holonomy(varphi, gamma);
        for (slot, scale) in [1.0, 4.0].into_iter().enumerate() {
            let p = GateProtocol::single_qubit(varphi, gamma)
                .closed()
                .with_tau(scale * tau);
            let u = gate_unitary_from_dynamics(&p)?;
            worst[slot] = worst[slot].max(phase_aligned_error(&u.matrix, &oracle));
        }
        println!("φ = {varphi:.3}, γ = {gamma:+.3}");
    }
    println!(
        "worst entrywise error: {:.2e} at τ_min, {:.2e} at 4τ_min",
        worst[0], worst[1]
    );
    Ok(())
}
