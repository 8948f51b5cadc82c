use satd_holonomy::gates::{run_single_qubit_gate, GateProtocol};
use satd_holonomy::pulse::DressingMode;

fn main() -> satd_holonomy::Result<()> {
    for mode in DressingMode::ALL {
        let r = run_single_qubit_gate(&GateProtocol::not_gate().with_mode(mode), true)?;
        println!(
            "NOT {mode:>4}: F = {:.4}%  peak ρ_ee = {:.3}  closed-system gate error {:.2e}",
            100.0 * r.fidelity,
            r.peak_excited_population,
            r.gate_error
        );
    }
    Ok(())
}
