use satd_holonomy::gates::{sweep_operation_time, write_sweep_csv, GateProtocol};

fn main() -> satd_holonomy::Result<()> {
    let rows = sweep_operation_time(
        &GateProtocol::hadamard_gate(),
        &[1.0, 1.5, 2.0, 3.0, 4.0],
        4,
    )?;
    write_sweep_csv(&rows, std::io::stdout())
}
