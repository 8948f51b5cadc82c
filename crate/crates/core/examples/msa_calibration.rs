//! Grid search for the constant MSA factor f₀ at the NOT gate's τ_min.
//!
//! Factors that push a drive channel above Ω_max are marked infeasible.

use satd_holonomy::gates::{calibrate_msa_dressing, GateProtocol};

fn main() -> satd_holonomy::Result<()> {
    let cal = calibrate_msa_dressing(&GateProtocol::not_gate())?;
    for (f, feasible, peak) in &cal.candidates {
        if *feasible {
            println!("f = {f:.2}: peak ρ_ee = {peak:.4}");
        } else {
            println!("f = {f:.2}: exceeds Ω_max");
        }
    }
    println!(
        "chosen f₀ = {} (peak ρ_ee = {:.4})",
        cal.f0, cal.peak_excited_population
    );
    Ok(())
}
