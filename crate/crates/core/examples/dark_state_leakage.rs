//! Population that leaves the dressed dark state, with and without the correction.

use satd_holonomy::gates::{dark_subspace_leakage, GateProtocol};
use satd_holonomy::pulse::DressingMode;

fn main() -> satd_holonomy::Result<()> {
    let protocol = GateProtocol::not_gate().closed();
    for mode in [DressingMode::None, DressingMode::Satd] {
        let trace = dark_subspace_leakage(&protocol.clone().with_mode(mode))?;
        println!("{mode:>4}: max leakage {:.3e}", trace.max);
        for (t, leak) in trace.samples.iter().step_by(80) {
            println!("    t = {:7.2} ps  {leak:.3e}", t * 1e12);
        }
    }
    Ok(())
}
