//! Prints the uncorrected and SATD drives at a handful of instants and
//! writes both pulse tables to the system temp directory.

use satd_holonomy::gates::GateProtocol;
use satd_holonomy::pulse::{sample_pulses, DressingMode};

fn main() -> satd_holonomy::Result<()> {
    let protocol = GateProtocol::not_gate();
    let none = protocol.clone().with_mode(DressingMode::None).corrected()?;
    let satd = protocol.with_mode(DressingMode::Satd).corrected()?;
    let end = satd.duration();

    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "t/2T", "θ", "θ′", "Ω/Ωmax", "Ω′/Ωmax"
    );
    let omega_max = satd.schedule().amplitude.peak(end);
    for k in 0..=10 {
        let t = end * k as f64 / 10.0;
        let (a, b) = (none.point(t)?, satd.point(t)?);
        println!(
            "{:>8.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            k as f64 / 10.0,
            a.theta,
            b.theta_prime(),
            a.omega / omega_max,
            b.omega_prime() / omega_max
        );
    }

    let dir = std::env::temp_dir();
    for (name, c) in [("none", &none), ("satd", &satd)] {
        let table = sample_pulses(c, 501)?;
        let path = dir.join(format!("pulses_{name}.csv"));
        table.save(&path)?;
        println!(
            "{name}: channel peaks {:?} -> {}",
            table.column_peaks().map(|p| p / omega_max),
            path.display()
        );
    }
    Ok(())
}
