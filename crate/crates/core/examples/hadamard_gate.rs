//! Hadamard-type holonomy (φ = π/8, γ = π). The target from |0⟩ is
//! (|0⟩ − |1⟩)/√2; the reconstructed 2×2 block is printed as well.

use satd_holonomy::gates::{run_single_qubit_gate, GateProtocol};
use satd_holonomy::pulse::DressingMode;

fn main() -> satd_holonomy::Result<()> {
    for mode in DressingMode::ALL {
        let r = run_single_qubit_gate(&GateProtocol::hadamard_gate().with_mode(mode), true)?;
        println!(
            "H {mode:>4}: F = {:.4}%, leakage {:.2e}",
            100.0 * r.fidelity,
            r.leakage
        );
        if mode == DressingMode::Satd {
            println!("reconstructed gate (closed system):{:.4}", r.gate.matrix);
        }
    }
    Ok(())
}
