//! Two-leg cyclic gate protocols, gate reconstruction and sweeps.
//!
//! A protocol runs leg 1 on `[0, T]` with phase `ϕ₁` and leg 2 on `[T, 2T]`
//! with phase `ϕ₂`. The dark state `|d₂⟩` never moves; `|ψ⟩` travels around
//! the dark loop and returns with the phase `e^{i(ϕ₁ − ϕ₂)}`, which is the
//! geometric phase `γ` reported by [`GateProtocol::gamma`].

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_columns, evolve_master_observed, evolve_unitary, DensityMatrix, IntegratorConfig,
    PureState,
};
use crate::model::{
    collapse_operators, dressed_dark_state, AdiabaticFrame, CollapseTerm, LindbladModel, Operator,
    OperatorDump, RamanCavityModel, RamanParams, Rates, StateVector, SystemKind, TripodModel,
    TwoQubitBasis, ATOM1, ATOM2, BOTH, CAVITY, GROUND, LEVEL_0, LEVEL_1, LEVEL_E, TRIPOD_DIM,
};
use crate::pulse::{
    correct_schedule, tau_min, wrap_angle, AdiabaticSchedule, CorrectedSchedule, Dressing,
    DressingMode, Leg, DEFAULT_MSA_F0, DEFAULT_T_OVER_TAU, MU_TOL,
};
use crate::{Error, Result, C64, TWO_PI_MHZ};

/// Reconstruction leakage above which a warning is attached.
pub const LEAKAGE_WARNING: f64 = 0.01;
/// Relative slack on the amplitude check, covering the `τ_min` bisection.
const AMPLITUDE_SLACK: f64 = 1.0e-9;

/// Logical two-qubit states `|00⟩, |01⟩, |10⟩, |11⟩` in the cavity basis.
pub const CP_LOGICAL: [usize; 4] = [GROUND, ATOM2, ATOM1, BOTH];
/// Logical single-qubit states.
pub const QUBIT_LOGICAL: [usize; 2] = [LEVEL_0, LEVEL_1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    SingleQubit,
    TwoQubitCp,
}

/// Everything needed to run one gate.
#[derive(Clone, Debug, PartialEq)]
pub struct GateProtocol {
    pub kind: GateKind,
    /// Axis angle `φ` of `|ψ⟩ = sin φ|0⟩ + cos φ|1⟩`; unused for CP.
    pub varphi: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub mode: DressingMode,
    /// Constant MSA factor used when `mode` is MSA.
    pub msa_f0: f64,
    /// Pulse width; `None` selects the SATD `τ_min` for the peak drive.
    pub tau: Option<f64>,
    pub t_over_tau: f64,
    /// Peak single-qubit drive `Ω_max` (rad/s).
    pub omega_max: f64,
    pub raman: RamanParams,
    pub basis: TwoQubitBasis,
    pub rates: Rates,
    pub integrator: IntegratorConfig,
}

impl GateProtocol {
    /// Single-qubit holonomy `U(φ, γ)` with the published parameters.
    pub fn single_qubit(varphi: f64, gamma: f64) -> Self {
        GateProtocol {
            kind: GateKind::SingleQubit,
            varphi,
            phi1: 0.0,
            phi2: -gamma,
            mode: DressingMode::Satd,
            msa_f0: DEFAULT_MSA_F0,
            tau: None,
            t_over_tau: DEFAULT_T_OVER_TAU,
            omega_max: 750.0 * TWO_PI_MHZ,
            raman: default_raman(),
            basis: TwoQubitBasis::Restricted,
            rates: Rates {
                kappa: 0.0,
                gamma1: 2.6 * TWO_PI_MHZ,
                gamma2: 2.6 * TWO_PI_MHZ,
            },
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn not_gate() -> Self {
        GateProtocol::single_qubit(FRAC_PI_4, PI)
    }

    pub fn hadamard_gate() -> Self {
        GateProtocol::single_qubit(FRAC_PI_8, PI)
    }

    /// CP gate with `ϕ₁ = 0`, `ϕ₂ = π`.
    pub fn cp_gate() -> Self {
        GateProtocol {
            kind: GateKind::TwoQubitCp,
            varphi: 0.0,
            phi1: 0.0,
            phi2: PI,
            rates: Rates {
                kappa: 3.5 * TWO_PI_MHZ,
                gamma1: 2.6 * TWO_PI_MHZ,
                gamma2: 0.0,
            },
            ..GateProtocol::single_qubit(0.0, PI)
        }
    }

    /// Sets `ϕ₁ = 0`, `ϕ₂ = −γ`.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.phi1 = 0.0;
        self.phi2 = -gamma;
        self
    }

    pub fn with_varphi(mut self, varphi: f64) -> Self {
        self.varphi = varphi;
        self
    }

    pub fn with_mode(mut self, mode: DressingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_rates(mut self, rates: Rates) -> Self {
        self.rates = rates;
        self
    }

    pub fn closed(self) -> Self {
        self.with_rates(Rates::default())
    }

    /// Geometric phase picked up by the travelling state, `ϕ₁ − ϕ₂`.
    pub fn gamma(&self) -> f64 {
        self.phi1 - self.phi2
    }

    /// Peak drive of the synthesized schedule: `Ω_max` or `G_max`.
    pub fn peak_drive(&self) -> f64 {
        match self.kind {
            GateKind::SingleQubit => self.omega_max,
            GateKind::TwoQubitCp => self.raman.g_max(),
        }
    }

    pub fn dressing(&self) -> Dressing {
        Dressing::for_mode(self.mode, self.msa_f0)
    }

    /// Pulse width in use. Auto mode always takes the SATD `τ_min`, so all
    /// three modes of a comparison share the same timing.
    pub fn resolve_tau(&self) -> Result<f64> {
        match self.tau {
            Some(tau) => Ok(tau),
            None => tau_min(self.peak_drive(), &Dressing::satd(), self.t_over_tau),
        }
    }

    pub fn schedule(&self) -> Result<AdiabaticSchedule> {
        Ok(
            AdiabaticSchedule::vitanov(self.peak_drive(), self.resolve_tau()?, self.t_over_tau)?
                .with_varphi(self.varphi)
                .with_leg_phases(self.phi1, self.phi2),
        )
    }

    pub fn corrected(&self) -> Result<CorrectedSchedule> {
        correct_schedule(&self.schedule()?, &self.dressing())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return Err(Error::config("omega_max must be positive"));
        }
        if self.kind == GateKind::TwoQubitCp {
            self.raman.validate()?;
        }
        self.rates.validate()?;
        self.integrator.validate()
    }

    fn dim(&self) -> usize {
        match self.kind {
            GateKind::SingleQubit => TRIPOD_DIM,
            GateKind::TwoQubitCp => self.basis.dim(),
        }
    }

    fn logical(&self) -> &'static [usize] {
        match self.kind {
            GateKind::SingleQubit => &QUBIT_LOGICAL,
            GateKind::TwoQubitCp => &CP_LOGICAL,
        }
    }

    fn intermediate(&self) -> usize {
        match self.kind {
            GateKind::SingleQubit => LEVEL_E,
            GateKind::TwoQubitCp => CAVITY,
        }
    }

    fn labels(&self) -> Vec<String> {
        let raw: &[&str] = match self.kind {
            GateKind::SingleQubit => &crate::model::TRIPOD_LABELS,
            GateKind::TwoQubitCp => self.basis.labels(),
        };
        raw.iter().map(|s| s.to_string()).collect()
    }

    /// The analytic gate on the logical subspace.
    pub fn analytic_gate(&self) -> Operator {
        match self.kind {
            GateKind::SingleQubit => analytic_holonomy(self.varphi, self.gamma()),
            GateKind::TwoQubitCp => cp_oracle(self.gamma()),
        }
    }

    /// Initial state and target of the state-fidelity run.
    pub fn initial_and_target(&self) -> (PureState, PureState) {
        let dim = self.dim();
        match self.kind {
            GateKind::SingleQubit => {
                let u = self.analytic_gate();
                let mut target = StateVector::zeros(dim);
                target[LEVEL_0] = u[(0, 0)];
                target[LEVEL_1] = u[(1, 0)];
                (
                    PureState::basis(dim, LEVEL_0),
                    PureState { amplitudes: target },
                )
            }
            GateKind::TwoQubitCp => {
                let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
                let mut initial = StateVector::zeros(dim);
                initial[GROUND] = s;
                initial[ATOM1] = s;
                let mut target = initial.clone();
                target[ATOM1] = s * C64::from_polar(1.0, self.gamma());
                (
                    PureState {
                        amplitudes: initial,
                    },
                    PureState { amplitudes: target },
                )
            }
        }
    }
}

fn default_raman() -> RamanParams {
    RamanParams {
        lambda_c: 750.0 * TWO_PI_MHZ,
        omega_r: 750.0 * TWO_PI_MHZ,
        delta: 4000.0 * TWO_PI_MHZ,
        coupling_divisor: 1.0,
    }
}

/// `U(φ, γ) = 1 + (e^{iγ} − 1)|ψ⟩⟨ψ|` on `{|0⟩, |1⟩}`, `|ψ⟩ = sin φ|0⟩ + cos φ|1⟩`.
pub fn analytic_holonomy(varphi: f64, gamma: f64) -> Operator {
    let (s, c) = varphi.sin_cos();
    let k = C64::from_polar(1.0, gamma) - 1.0;
    Operator::from_row_slice(
        2,
        2,
        &[
            C64::from(1.0) + k * s * s,
            k * s * c,
            k * s * c,
            C64::from(1.0) + k * c * c,
        ],
    )
}

/// `diag(1, 1, e^{iγ}, 1)` on `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn cp_oracle(gamma: f64) -> Operator {
    let mut u = Operator::identity(4, 4);
    u[(2, 2)] = C64::from_polar(1.0, gamma);
    u
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    rho.expectation(&target.amplitudes)
}

/// `|tr(V†U)| / d`.
pub fn gate_fidelity(u: &Operator, v: &Operator) -> f64 {
    (v.adjoint() * u).trace().norm() / u.nrows() as f64
}

/// Largest entrywise difference after removing the global phase that best
/// aligns `u` with `v`.
pub fn phase_aligned_error(u: &Operator, v: &Operator) -> f64 {
    let overlap = (v.adjoint() * u).trace();
    let align = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        C64::from(1.0)
    };
    (u * align - v).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Closed-system gate on the logical subspace.
#[derive(Clone, Debug)]
pub struct GateReconstruction {
    /// Projected columns, each renormalized.
    pub matrix: Operator,
    /// Projected columns before renormalization.
    pub raw: Operator,
    /// `1 − ‖P U|k⟩‖²` per logical input.
    pub leakage: Vec<f64>,
    pub warnings: Vec<String>,
}

impl GateReconstruction {
    /// `arg` of each diagonal entry.
    pub fn diagonal_phases(&self) -> Vec<f64> {
        (0..self.raw.nrows())
            .map(|k| self.raw[(k, k)].arg())
            .collect()
    }
}

/// Splits the sample budget so the concatenated trajectory keeps it exactly.
fn leg_samples(total: usize) -> [usize; 2] {
    let first = (total / 2 + 1).max(2);
    [first, (total + 1).saturating_sub(first).max(2)]
}

/// Hamiltonian of a protocol as a function of `(leg, t)`.
enum Driven {
    Tripod(TripodModel),
    Cavity(RamanCavityModel),
}

impl Driven {
    fn build(protocol: &GateProtocol) -> Result<(Self, CorrectedSchedule, Vec<String>)> {
        protocol.validate()?;
        let corrected = protocol.corrected()?;
        let limit = protocol.peak_drive();
        corrected.check_amplitude(limit * (1.0 + AMPLITUDE_SLACK))?;
        let mut warnings = Vec::new();
        if protocol.mode != DressingMode::None {
            let (start, end) = corrected.boundary_mu()?;
            if start.abs().max(end.abs()) > MU_TOL {
                warnings.push(format!(
                    "dressing angle does not vanish at the ends: μ(0) = {start:.3e}, μ(2T) = {end:.3e} rad"
                ));
            }
        }
        let driven = match protocol.kind {
            GateKind::SingleQubit => Driven::Tripod(TripodModel::new(corrected.clone())),
            GateKind::TwoQubitCp => {
                warnings.extend(protocol.raman.warnings());
                Driven::Cavity(RamanCavityModel::new(
                    protocol.raman,
                    corrected.clone(),
                    protocol.basis,
                )?)
            }
        };
        Ok((driven, corrected, warnings))
    }

    fn hamiltonian_on(&self, leg: Leg, t: f64) -> Result<Operator> {
        match self {
            Driven::Tripod(m) => m.hamiltonian_on(leg, t),
            Driven::Cavity(m) => m.hamiltonian_on(leg, t),
        }
    }
}

fn collapses_for(protocol: &GateProtocol, open_system: bool) -> Result<Vec<CollapseTerm>> {
    if !open_system {
        return Ok(Vec::new());
    }
    let kind = match protocol.kind {
        GateKind::SingleQubit => SystemKind::SingleQubit,
        GateKind::TwoQubitCp => SystemKind::TwoQubit {
            basis: protocol.basis,
            atomic_scale: protocol.raman.atomic_decay_scale(),
        },
    };
    collapse_operators(kind, &protocol.rates)
}

/// One retained point of a gate trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub fidelity: f64,
    pub trace_deviation: f64,
    pub populations: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GateResult {
    pub kind: GateKind,
    pub mode: DressingMode,
    pub tau: f64,
    pub leg_duration: f64,
    pub final_state: DensityMatrix,
    pub target: PureState,
    /// `⟨ψ_target|ρ(2T)|ψ_target⟩`.
    pub fidelity: f64,
    pub gate: GateReconstruction,
    pub analytic_gate: Operator,
    pub gate_fidelity: f64,
    pub gate_error: f64,
    /// Peak population of `|e⟩` (single qubit) or `|001⟩` (CP) over all steps.
    pub peak_excited_population: f64,
    /// Final population outside the logical subspace.
    pub leakage: f64,
    pub labels: Vec<String>,
    pub trajectory: Vec<TrajectorySample>,
    pub warnings: Vec<String>,
}

/// Serializable summary of a [`GateResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateSummary {
    pub kind: GateKind,
    pub mode: DressingMode,
    pub tau: f64,
    pub leg_duration: f64,
    pub fidelity: f64,
    pub gate_fidelity: f64,
    pub gate_error: f64,
    pub peak_excited_population: f64,
    pub leakage: f64,
    pub reconstruction_leakage: Vec<f64>,
    pub diagonal_phases: Vec<f64>,
    pub gate: OperatorDump,
    pub analytic_gate: OperatorDump,
    pub final_state: OperatorDump,
    pub warnings: Vec<String>,
}

impl GateResult {
    pub fn summary(&self) -> GateSummary {
        GateSummary {
            kind: self.kind,
            mode: self.mode,
            tau: self.tau,
            leg_duration: self.leg_duration,
            fidelity: self.fidelity,
            gate_fidelity: self.gate_fidelity,
            gate_error: self.gate_error,
            peak_excited_population: self.peak_excited_population,
            leakage: self.leakage,
            reconstruction_leakage: self.gate.leakage.clone(),
            diagonal_phases: self.gate.diagonal_phases(),
            gate: OperatorDump::from(&self.gate.matrix),
            analytic_gate: OperatorDump::from(&self.analytic_gate),
            final_state: OperatorDump::from(&self.final_state.entries),
            warnings: self.warnings.clone(),
        }
    }

    /// `t,fidelity,trace_dev,pop_<level>...`
    pub fn write_trajectory_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![
            "t".to_string(),
            "fidelity".to_string(),
            "trace_dev".to_string(),
        ];
        header.extend(self.labels.iter().map(|l| format!("pop_{l}")));
        w.write_record(&header)?;
        for s in &self.trajectory {
            let mut row = vec![
                format!("{:e}", s.t),
                format!("{:e}", s.fidelity),
                format!("{:e}", s.trace_deviation),
            ];
            row.extend(s.populations.iter().map(|p| format!("{p:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs a protocol of either kind.
pub fn run_gate(protocol: &GateProtocol, open_system: bool) -> Result<GateResult> {
    let (driven, corrected, mut warnings) = Driven::build(protocol)?;
    let dim = protocol.dim();
    let collapses = collapses_for(protocol, open_system)?;
    let (initial, target) = protocol.initial_and_target();
    let leg_duration = corrected.leg_duration();
    let watch = protocol.intermediate();

    let mut rho = initial.density();
    let mut peak = rho.population(watch);
    let mut samples: Vec<(f64, DensityMatrix)> = Vec::new();
    for (leg, n) in Leg::BOTH
        .into_iter()
        .zip(leg_samples(protocol.integrator.samples))
    {
        let h = |t: f64| driven.hamiltonian_on(leg, t);
        let model = LindbladModel::new(dim, h, collapses.clone())?;
        let cfg = protocol.integrator.with_samples(n);
        let traj = evolve_master_observed(&model, &rho, leg.window(leg_duration), &cfg, |_, r| {
            peak = peak.max(r.population(watch));
            Ok(())
        })?;
        let skip = usize::from(!samples.is_empty());
        samples.extend(traj.samples.into_iter().skip(skip));
        rho = samples.last().expect("non-empty trajectory").1.clone();
    }

    let trajectory = samples
        .iter()
        .map(|(t, r)| {
            Ok(TrajectorySample {
                t: *t,
                fidelity: state_fidelity(r, &target)?,
                trace_deviation: (r.trace().re - 1.0).abs(),
                populations: r.populations(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fidelity = state_fidelity(&rho, &target)?;
    let leakage = 1.0
        - protocol
            .logical()
            .iter()
            .map(|&k| rho.population(k))
            .sum::<f64>();
    let gate = reconstruct(protocol, &driven, leg_duration)?;
    warnings.extend(gate.warnings.iter().cloned());
    let analytic_gate = protocol.analytic_gate();
    Ok(GateResult {
        kind: protocol.kind,
        mode: protocol.mode,
        tau: corrected.tau(),
        leg_duration,
        final_state: rho,
        target,
        fidelity,
        gate_fidelity: gate_fidelity(&gate.matrix, &analytic_gate),
        gate_error: phase_aligned_error(&gate.matrix, &analytic_gate),
        gate,
        analytic_gate,
        peak_excited_population: peak,
        leakage,
        labels: protocol.labels(),
        trajectory,
        warnings,
    })
}

/// Single-qubit gate starting from `|0⟩`.
pub fn run_single_qubit_gate(protocol: &GateProtocol, open_system: bool) -> Result<GateResult> {
    if protocol.kind != GateKind::SingleQubit {
        return Err(Error::config(
            "run_single_qubit_gate needs a single-qubit protocol",
        ));
    }
    run_gate(protocol, open_system)
}

/// CP gate starting from `(|10⟩ + |00⟩)/√2`.
pub fn run_cp_gate(protocol: &GateProtocol, open_system: bool) -> Result<GateResult> {
    if protocol.kind != GateKind::TwoQubitCp {
        return Err(Error::config("run_cp_gate needs a two-qubit protocol"));
    }
    run_gate(protocol, open_system)
}

fn reconstruct(
    protocol: &GateProtocol,
    driven: &Driven,
    leg_duration: f64,
) -> Result<GateReconstruction> {
    let dim = protocol.dim();
    let logical = protocol.logical();
    let mut states = Operator::zeros(dim, logical.len());
    for (col, &k) in logical.iter().enumerate() {
        states[(k, col)] = C64::from(1.0);
    }
    let cfg = protocol.integrator.with_samples(2);
    for leg in Leg::BOTH {
        let h = |t: f64| driven.hamiltonian_on(leg, t);
        states = evolve_columns(&h, &states, leg.window(leg_duration), &cfg)?.into_final();
    }
    let raw = Operator::from_fn(logical.len(), logical.len(), |r, c| states[(logical[r], c)]);
    let mut matrix = raw.clone();
    let mut leakage = Vec::with_capacity(logical.len());
    let mut warnings = Vec::new();
    for (c, mut col) in matrix.column_iter_mut().enumerate() {
        let norm = col.norm();
        let leak = (1.0 - norm * norm).max(0.0);
        if leak > LEAKAGE_WARNING {
            warnings.push(format!(
                "logical input {c} leaks {leak:.3e} out of the computational subspace"
            ));
        }
        leakage.push(leak);
        if norm > 0.0 {
            col /= C64::from(norm);
        }
    }
    Ok(GateReconstruction {
        matrix,
        raw,
        leakage,
        warnings,
    })
}

/// Closed-system gate on the logical subspace, by evolving each logical input.
pub fn gate_unitary_from_dynamics(protocol: &GateProtocol) -> Result<GateReconstruction> {
    let (driven, corrected, _) = Driven::build(protocol)?;
    reconstruct(protocol, &driven, corrected.leg_duration())
}

/// Closed-system population outside the dressed dark state, starting from `|d₁(0)⟩`.
#[derive(Clone, Debug)]
pub struct DarkLeakage {
    pub samples: Vec<(f64, f64)>,
    pub max: f64,
}

pub fn dark_subspace_leakage(protocol: &GateProtocol) -> Result<DarkLeakage> {
    if protocol.kind != GateKind::SingleQubit {
        return Err(Error::config(
            "dark-state leakage is defined for the tripod only",
        ));
    }
    let (driven, corrected, _) = Driven::build(protocol)?;
    let start = AdiabaticFrame::at(corrected.schedule(), Leg::First, 0.0).dark1;
    let mut psi = PureState::new(start)?;
    let mut samples = Vec::new();
    for (leg, n) in Leg::BOTH
        .into_iter()
        .zip(leg_samples(protocol.integrator.samples))
    {
        let h = |t: f64| driven.hamiltonian_on(leg, t);
        let cfg = protocol.integrator.with_samples(n);
        let traj = evolve_unitary(h, &psi, leg.window(corrected.leg_duration()), &cfg)?;
        let skip = usize::from(!samples.is_empty());
        for (t, state) in traj.samples.iter().skip(skip) {
            let dark = dressed_dark_state(&corrected, leg, *t)?;
            samples.push((*t, 1.0 - state.overlap(&dark)));
        }
        psi = traj.into_final();
    }
    let max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(DarkLeakage { samples, max })
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mode: DressingMode,
    pub multiplier: f64,
    pub fidelity: f64,
    pub peak_e_population: f64,
    pub leakage: f64,
}

pub const SWEEP_HEADER: [&str; 5] = [
    "mode",
    "multiplier",
    "fidelity",
    "peak_e_population",
    "leakage",
];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.mode.as_str().to_string(),
            r.multiplier.to_string(),
            format!("{:e}", r.fidelity),
            format!("{:e}", r.peak_e_population),
            format!("{:e}", r.leakage),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the jobs on at most `workers` threads, keeping input order.
fn run_pool(jobs: Vec<(DressingMode, f64, GateProtocol)>, workers: usize) -> Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        jobs.into_par_iter()
            .map(|(mode, multiplier, protocol)| {
                let r = run_gate(&protocol, true)?;
                Ok(SweepRow {
                    mode,
                    multiplier,
                    fidelity: r.fidelity,
                    peak_e_population: r.peak_excited_population,
                    leakage: r.leakage,
                })
            })
            .collect()
    })
}

fn check_multipliers(multipliers: &[f64], allow_zero: bool) -> Result<()> {
    if multipliers.is_empty() {
        return Err(Error::config("multiplier list is empty"));
    }
    for &m in multipliers {
        let ok = m.is_finite() && if allow_zero { m >= 0.0 } else { m > 0.0 };
        if !ok {
            return Err(Error::config(format!("invalid multiplier {m}")));
        }
    }
    Ok(())
}

/// Open-system fidelity against protocol duration, with `τ` (and `T`) scaled
/// by each multiplier. Rows are grouped by mode: NONE, SATD, MSA.
pub fn sweep_operation_time(
    protocol: &GateProtocol,
    multipliers: &[f64],
    workers: usize,
) -> Result<Vec<SweepRow>> {
    check_multipliers(multipliers, false)?;
    let base = protocol.resolve_tau()?;
    let jobs = DressingMode::ALL
        .into_iter()
        .flat_map(|mode| {
            multipliers
                .iter()
                .map(move |&m| (mode, m, protocol.clone().with_mode(mode).with_tau(base * m)))
        })
        .collect();
    run_pool(jobs, workers)
}

/// Open-system fidelity against atomic decay `Γ₁′ = m·Γ₁` for SATD and MSA.
/// `Γ₂` keeps its base value except in the `m = 0` row, where it is zeroed too.
pub fn sweep_decay(
    protocol: &GateProtocol,
    multipliers: &[f64],
    workers: usize,
) -> Result<Vec<SweepRow>> {
    check_multipliers(multipliers, true)?;
    let base = protocol.rates;
    let jobs = [DressingMode::Satd, DressingMode::Msa]
        .into_iter()
        .flat_map(|mode| {
            multipliers.iter().map(move |&m| {
                let rates = Rates {
                    kappa: base.kappa,
                    gamma1: base.gamma1 * m,
                    gamma2: if m == 0.0 { 0.0 } else { base.gamma2 },
                };
                (mode, m, protocol.clone().with_mode(mode).with_rates(rates))
            })
        })
        .collect();
    run_pool(jobs, workers)
}

/// Outcome of the MSA factor search.
#[derive(Clone, Debug)]
pub struct MsaCalibration {
    pub f0: f64,
    pub peak_excited_population: f64,
    /// `(f, feasible, peak ρ_ee)`; infeasible entries carry `NaN`.
    pub candidates: Vec<(f64, bool, f64)>,
}

/// Grid `f ∈ {0.30, 0.35, …, 3.00}`.
pub fn msa_grid() -> Vec<f64> {
    (0..=54).map(|k| (30 + 5 * k) as f64 / 100.0).collect()
}

/// Picks the constant MSA factor that minimizes the closed-system peak
/// excited population among those that respect the amplitude limit at the
/// protocol's own `τ`.
pub fn calibrate_msa_dressing(protocol: &GateProtocol) -> Result<MsaCalibration> {
    let tau = protocol.resolve_tau()?;
    let candidates = msa_grid()
        .into_par_iter()
        .map(|f| {
            let mut p = protocol
                .clone()
                .closed()
                .with_mode(DressingMode::Msa)
                .with_tau(tau);
            p.msa_f0 = f;
            match run_gate(&p, false) {
                Ok(r) => Ok((f, true, r.peak_excited_population)),
                Err(Error::AmplitudeExceeded { .. }) => Ok((f, false, f64::NAN)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .iter()
        .filter(|c| c.1)
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .ok_or_else(|| Error::config("no MSA factor on the grid satisfies the amplitude limit"))?;
    Ok(MsaCalibration {
        f0: best.0,
        peak_excited_population: best.2,
        candidates,
    })
}

/// Phase error of `|10⟩ → e^{iγ}|10⟩` in a closed-system CP reconstruction.
pub fn cp_phase_error(protocol: &GateProtocol, gate: &GateReconstruction) -> f64 {
    let phases = gate.diagonal_phases();
    wrap_angle(phases[2] - phases[0] - protocol.gamma()).abs()
}
