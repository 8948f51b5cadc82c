//! Two-level spontaneous emission against e^{−Γt}.

use satd_holonomy::dynamics::{evolve_master, DensityMatrix, IntegratorConfig};
use satd_holonomy::model::{transition, CollapseTerm, LindbladModel, Operator};
use satd_holonomy::TWO_PI_MHZ;

fn main() -> satd_holonomy::Result<()> {
    let gamma = 2.6 * TWO_PI_MHZ;
    let decay = CollapseTerm {
        label: "decay".into(),
        operator: transition(2, 0, 1),
        rate: gamma,
    };
    let model = LindbladModel::new(2, |_| Ok(Operator::zeros(2, 2)), vec![decay])?;
    let cfg = IntegratorConfig::default().with_samples(11);
    let traj = evolve_master(
        &model,
        &DensityMatrix::basis(2, 1),
        (0.0, 3.0 / gamma),
        &cfg,
    )?;
    for (t, rho) in &traj.samples {
        let exact = (-gamma * t).exp();
        println!(
            "Γt = {:.2}  ρ_ee = {:.9}  exact {:.9}",
            gamma * t,
            rho.population(1),
            exact
        );
    }
    Ok(())
}
