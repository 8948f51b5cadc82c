//! Fixed-step RK4 for the Schrödinger and Lindblad equations.
//!
//! Both integrators take the Hamiltonian as a closure of time so that the
//! gate layer can pin each leg of a protocol to its own phase. Steps are
//! aligned with the retained samples, so a sample never falls between steps.

use nalgebra::SymmetricEigen;

use crate::model::{CollapseTerm, LindbladModel, Operator, StateVector};
use crate::{Error, Result, C64};

/// Phase advanced per step in auto mode, `max‖H‖·dt`.
pub const AUTO_PHASE_STEP: f64 = 0.01;
/// Trace (or norm) drift that aborts an integration.
pub const DIVERGENCE_DRIFT: f64 = 1.0e-4;
/// Points used to bound `‖H(t)‖` over a span.
const NORM_SCAN: usize = 256;

const I: C64 = C64::new(0.0, 1.0);

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub amplitudes: StateVector,
}

impl PureState {
    /// Normalizes `amplitudes`; rejects the zero vector.
    pub fn new(amplitudes: StateVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::config("state vector has zero or non-finite norm"));
        }
        Ok(PureState {
            amplitudes: amplitudes / C64::from(norm),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        PureState {
            amplitudes: crate::model::basis_state(dim, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn population(&self, k: usize) -> f64 {
        self.amplitudes[k].norm_sqr()
    }

    /// `|⟨other|self⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        other.dotc(&self.amplitudes).norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub entries: Operator,
}

impl DensityMatrix {
    pub fn new(entries: Operator) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(DensityMatrix { entries })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        PureState::basis(dim, k).density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            entries: Operator::identity(dim, dim) / C64::from(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn population(&self, k: usize) -> f64 {
        self.entries[(k, k)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.population(k)).collect()
    }

    /// `⟨ψ|ρ|ψ⟩` (real part; the imaginary part is roundoff for Hermitian ρ).
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        Ok(psi.dotc(&(&self.entries * psi)).re)
    }

    fn symmetrize(&mut self) {
        let adj = self.entries.adjoint();
        self.entries += adj;
        self.entries *= C64::from(0.5);
    }
}

/// Output of [`check_state`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    /// `|tr ρ − 1|`.
    pub trace_deviation: f64,
    /// `max |ρ − ρ†|`.
    pub hermiticity_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_physical(&self, tol: f64) -> bool {
        self.trace_deviation <= tol
            && self.hermiticity_deviation <= tol
            && self.min_eigenvalue >= -tol
    }
}

pub fn check_state(rho: &DensityMatrix) -> StateDiagnostics {
    let m = &rho.entries;
    let hermitian = (m + m.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(hermitian);
    StateDiagnostics {
        trace_deviation: (rho.trace() - C64::from(1.0)).norm(),
        hermiticity_deviation: crate::model::hermiticity_error(m),
        min_eigenvalue: eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
    }
}

/// Step size selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    /// `dt = 0.01 / (max_t ‖H(t)‖_F + Σ rates)`, then shortened to align
    /// with the samples. The Frobenius norm bounds the largest `Ω′`.
    Auto,
    /// Upper bound on the step in seconds; also shortened to align.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step: StepControl,
    /// Retained trajectory points per integration, endpoints included.
    pub samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: StepControl::Auto,
            samples: 400,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(mut self, dt: f64) -> Self {
        self.step = StepControl::Fixed(dt);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::config(
                "at least two trajectory samples are required",
            ));
        }
        if let StepControl::Fixed(dt) = self.step {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config(format!("step must be positive, got {dt:e}")));
            }
        }
        Ok(())
    }

    /// `(dt, steps)` for a span given a bound on `‖H‖ + Σ rates`.
    pub fn plan(&self, span: f64, rate_bound: f64) -> (f64, usize) {
        let intervals = self.samples - 1;
        let target = match self.step {
            StepControl::Auto if rate_bound > 0.0 => AUTO_PHASE_STEP / rate_bound,
            StepControl::Auto => span,
            StepControl::Fixed(dt) => dt,
        };
        let raw = (span / target).ceil().max(1.0) as usize;
        let steps = raw.div_ceil(intervals) * intervals;
        (span / steps as f64, steps)
    }
}

/// Uniformly spaced `(t, state)` samples.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub samples: Vec<(f64, S)>,
    /// RK4 step actually used.
    pub dt: f64,
}

impl<S> Trajectory<S> {
    pub fn final_state(&self) -> &S {
        &self
            .samples
            .last()
            .expect("trajectories hold at least one sample")
            .1
    }

    pub fn into_final(mut self) -> S {
        self.samples
            .pop()
            .expect("trajectories hold at least one sample")
            .1
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }
}

fn max_norm<H>(h: &H, t0: f64, t1: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<Operator>,
{
    let mut peak: f64 = 0.0;
    for k in 0..=NORM_SCAN {
        let t = t0 + (t1 - t0) * k as f64 / NORM_SCAN as f64;
        peak = peak.max(h(t)?.norm());
    }
    Ok(peak)
}

fn check_span(t0: f64, t1: f64) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::config(format!("invalid time span [{t0:e}, {t1:e}]")));
    }
    Ok(())
}

/// One classical RK4 step of `y' = f(t, y)`.
fn rk4_step<F>(f: &F, t: f64, dt: f64, y: &Operator) -> Result<Operator>
where
    F: Fn(f64, &Operator) -> Result<Operator>,
{
    let half = C64::from(0.5 * dt);
    let full = C64::from(dt);
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &(y + &k1 * half))?;
    let k3 = f(t + 0.5 * dt, &(y + &k2 * half))?;
    let k4 = f(t + dt, &(y + &k3 * full))?;
    Ok(y + (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(dt / 6.0))
}

/// Right-hand side of the master equation,
/// `−i[H, ρ] + Σ rate·(AρA† − ½{A†A, ρ})`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    hamiltonian: &Operator,
    collapses: &[CollapseTerm],
) -> Result<Operator> {
    let dim = rho.dim();
    if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: hamiltonian.nrows(),
        });
    }
    for term in collapses {
        if term.operator.nrows() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: term.operator.nrows(),
            });
        }
    }
    let sink = damping(collapses, dim);
    Ok(rhs_with_sink(&rho.entries, hamiltonian, &sink, collapses))
}

/// `Σ (rate/2)·A†A`.
fn damping(collapses: &[CollapseTerm], dim: usize) -> Operator {
    let mut sink = Operator::zeros(dim, dim);
    for term in collapses {
        sink += term.operator.adjoint() * &term.operator * C64::from(0.5 * term.rate);
    }
    sink
}

fn rhs_with_sink(
    rho: &Operator,
    h: &Operator,
    sink: &Operator,
    collapses: &[CollapseTerm],
) -> Operator {
    // H_eff = H − i·sink, so −i(H_eff ρ − ρ H_eff†) covers the anticommutators.
    let h_eff = h - sink * I;
    let left = &h_eff * rho;
    let mut out = (&left - left.adjoint()) * (-I);
    for term in collapses {
        let a = &term.operator;
        out += a * rho * a.adjoint() * C64::from(term.rate);
    }
    out
}

/// Integrates the master equation over `[t0, t1]`.
pub fn evolve_master<H>(
    model: &LindbladModel<H>,
    rho0: &DensityMatrix,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<DensityMatrix>>
where
    H: Fn(f64) -> Result<Operator>,
{
    evolve_master_observed(model, rho0, t_span, cfg, |_, _| Ok(()))
}

/// As [`evolve_master`], calling `observer` after every RK4 step.
pub fn evolve_master_observed<H, O>(
    model: &LindbladModel<H>,
    rho0: &DensityMatrix,
    (t0, t1): (f64, f64),
    cfg: &IntegratorConfig,
    mut observer: O,
) -> Result<Trajectory<DensityMatrix>>
where
    H: Fn(f64) -> Result<Operator>,
    O: FnMut(f64, &DensityMatrix) -> Result<()>,
{
    cfg.validate()?;
    check_span(t0, t1)?;
    let dim = model.dim();
    if rho0.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: rho0.dim(),
        });
    }
    let initial_trace = rho0.trace().re;
    if (initial_trace - 1.0).abs() > DIVERGENCE_DRIFT {
        return Err(Error::config(format!(
            "initial state has trace {initial_trace}"
        )));
    }

    let collapses = &model.collapses;
    let sink = damping(collapses, dim);
    let rate_sum: f64 = collapses.iter().map(|c| c.rate).sum();
    let (dt, steps) = cfg.plan(t1 - t0, max_norm(&model.hamiltonian, t0, t1)? + rate_sum);
    let stride = steps / (cfg.samples - 1);

    let rhs = |t: f64, y: &Operator| -> Result<Operator> {
        let h = (model.hamiltonian)(t)?;
        Ok(rhs_with_sink(y, &h, &sink, collapses))
    };

    let mut rho = rho0.clone();
    let mut samples = Vec::with_capacity(cfg.samples);
    samples.push((t0, rho.clone()));
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let t_next = if n + 1 == steps {
            t1
        } else {
            t0 + (n + 1) as f64 * dt
        };
        rho.entries = rk4_step(&rhs, t, dt, &rho.entries)?;
        rho.symmetrize();
        let drift = (rho.trace().re - initial_trace).abs();
        if !(drift <= DIVERGENCE_DRIFT) {
            return Err(Error::Diverged { t: t_next, drift });
        }
        observer(t_next, &rho)?;
        if (n + 1) % stride == 0 {
            samples.push((t_next, rho.clone()));
        }
    }
    Ok(Trajectory { samples, dt })
}

/// Integrates `iψ̇ = Hψ` over `[t0, t1]`.
pub fn evolve_unitary<H>(
    hamiltonian: H,
    psi0: &PureState,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<PureState>>
where
    H: Fn(f64) -> Result<Operator>,
{
    let columns = Operator::from_columns(std::slice::from_ref(&psi0.amplitudes));
    let traj = evolve_columns(&hamiltonian, &columns, t_span, cfg)?;
    Ok(Trajectory {
        samples: traj
            .samples
            .into_iter()
            .map(|(t, m)| {
                (
                    t,
                    PureState {
                        amplitudes: m.column(0).into_owned(),
                    },
                )
            })
            .collect(),
        dt: traj.dt,
    })
}

/// Propagator `U(t1, t0)` obtained by evolving every basis vector.
pub fn propagator<H>(
    hamiltonian: H,
    dim: usize,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Operator>
where
    H: Fn(f64) -> Result<Operator>,
{
    let cfg = cfg.with_samples(2);
    Ok(evolve_columns(&hamiltonian, &Operator::identity(dim, dim), t_span, &cfg)?.into_final())
}

/// Evolves each column of `states` as an independent pure state.
pub fn evolve_columns<H>(
    hamiltonian: &H,
    states: &Operator,
    (t0, t1): (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<Operator>>
where
    H: Fn(f64) -> Result<Operator>,
{
    cfg.validate()?;
    check_span(t0, t1)?;
    let dim = states.nrows();
    let h0 = hamiltonian(t0)?;
    if h0.nrows() != dim {
        return Err(Error::Dimension {
            expected: h0.nrows(),
            found: dim,
        });
    }
    let norms: Vec<f64> = states.column_iter().map(|c| c.norm()).collect();
    let (dt, steps) = cfg.plan(t1 - t0, max_norm(hamiltonian, t0, t1)?);
    let stride = steps / (cfg.samples - 1);
    let rhs = |t: f64, y: &Operator| -> Result<Operator> { Ok(hamiltonian(t)? * y * (-I)) };

    let mut y = states.clone();
    let mut samples = Vec::with_capacity(cfg.samples);
    samples.push((t0, y.clone()));
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let t_next = if n + 1 == steps {
            t1
        } else {
            t0 + (n + 1) as f64 * dt
        };
        y = rk4_step(&rhs, t, dt, &y)?;
        for (col, n0) in y.column_iter().zip(&norms) {
            let drift = (col.norm() - n0).abs();
            if !(drift <= DIVERGENCE_DRIFT) {
                return Err(Error::Diverged { t: t_next, drift });
            }
        }
        if (n + 1) % stride == 0 {
            samples.push((t_next, y.clone()));
        }
    }
    Ok(Trajectory { samples, dt })
}
