//! Hamiltonians and collapse operators.
//!
//! Basis orderings are fixed so exported matrices are reproducible:
//!
//! - tripod atom: `|0⟩, |1⟩, |2⟩, |e⟩`
//! - two atoms + cavity, labelled `|atom₁ atom₂ photons⟩`:
//!   `|000⟩, |001⟩, |100⟩, |010⟩, |110⟩`, extended with `|011⟩, |101⟩`
//!   for leakage diagnostics.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::pulse::{AdiabaticSchedule, CorrectedSchedule, Leg};
use crate::{Error, Result, C64};

pub type Operator = DMatrix<C64>;
pub type StateVector = DVector<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const TRIPOD_DIM: usize = 4;
pub const LEVEL_0: usize = 0;
pub const LEVEL_1: usize = 1;
pub const LEVEL_2: usize = 2;
pub const LEVEL_E: usize = 3;

/// `|000⟩`, the uncoupled ground state `|G⟩`.
pub const GROUND: usize = 0;
/// `|001⟩`, one cavity photon.
pub const CAVITY: usize = 1;
/// `|100⟩`, logical `|10⟩`.
pub const ATOM1: usize = 2;
/// `|010⟩`, logical `|01⟩`.
pub const ATOM2: usize = 3;
/// `|110⟩`, logical `|11⟩`.
pub const BOTH: usize = 4;
/// `|011⟩`, reachable from `|110⟩` only outside the restricted subspace.
pub const ATOM2_PHOTON: usize = 5;
/// `|101⟩`.
pub const ATOM1_PHOTON: usize = 6;

pub const TRIPOD_LABELS: [&str; 4] = ["0", "1", "2", "e"];
pub const CAVITY_LABELS: [&str; 7] = ["000", "001", "100", "010", "110", "011", "101"];

/// `|k⟩` in a `dim`-dimensional space.
pub fn basis_state(dim: usize, k: usize) -> StateVector {
    let mut v = StateVector::zeros(dim);
    v[k] = ONE;
    v
}

/// `|i⟩⟨j|` in a `dim`-dimensional space.
pub fn transition(dim: usize, i: usize, j: usize) -> Operator {
    let mut m = Operator::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

/// `max |A − A†|` over entries.
pub fn hermiticity_error(op: &Operator) -> f64 {
    (op - op.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Spin-1 operators on `(|+⟩, |d₁⟩, |−⟩)`.
pub fn spin1_z() -> Operator {
    Operator::from_diagonal(&DVector::from_vec(vec![ONE, ZERO, -ONE]))
}

/// `M_x = (|−⟩ − |+⟩)⟨d₁|/√2 + h.c.`
pub fn spin1_x() -> Operator {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut m = Operator::zeros(3, 3);
    m[(0, 1)] = -s;
    m[(2, 1)] = s;
    m[(1, 0)] = -s;
    m[(1, 2)] = s;
    m
}

/// `M_y = i(|−⟩ + |+⟩)⟨d₁|/√2 + h.c.`
pub fn spin1_y() -> Operator {
    let s = I * FRAC_1_SQRT_2;
    let mut m = Operator::zeros(3, 3);
    m[(0, 1)] = s;
    m[(2, 1)] = s;
    m[(1, 0)] = -s;
    m[(1, 2)] = -s;
    m
}

/// Tripod Hamiltonian `Σᵢ Ωᵢ|e⟩⟨i| + h.c.` for the drives `(Ω₀, Ω₁, Ω₂)`.
pub fn tripod_hamiltonian(drive: [C64; 3]) -> Operator {
    let mut h = Operator::zeros(TRIPOD_DIM, TRIPOD_DIM);
    for (i, omega) in drive.into_iter().enumerate() {
        h[(LEVEL_E, i)] = omega;
        h[(i, LEVEL_E)] = omega.conj();
    }
    h
}

/// Single tripod atom driven by a corrected schedule.
#[derive(Clone, Debug)]
pub struct TripodModel {
    pub corrected: CorrectedSchedule,
}

impl TripodModel {
    pub fn new(corrected: CorrectedSchedule) -> Self {
        TripodModel { corrected }
    }

    pub fn hamiltonian_on(&self, leg: Leg, t: f64) -> Result<Operator> {
        Ok(tripod_hamiltonian(self.corrected.drive_on(leg, t)?))
    }

    pub fn hamiltonian(&self, t: f64) -> Result<Operator> {
        Ok(tripod_hamiltonian(self.corrected.drive(t)?))
    }
}

pub fn single_qubit_hamiltonian(model: &TripodModel, t: f64) -> Result<Operator> {
    model.hamiltonian(t)
}

/// Instantaneous eigenvectors of the uncorrected tripod Hamiltonian.
#[derive(Clone, Debug)]
pub struct AdiabaticFrame {
    /// `(sin θ|ψ⟩ + cos θ e^{iϕ}|2⟩ − |e⟩)/√2`, energy `−Ω`.
    pub plus: StateVector,
    /// `cos θ|ψ⟩ − sin θ e^{iϕ}|2⟩`, dark.
    pub dark1: StateVector,
    /// `(sin θ|ψ⟩ + cos θ e^{iϕ}|2⟩ + |e⟩)/√2`, energy `+Ω`.
    pub minus: StateVector,
    /// `cos φ|0⟩ − sin φ|1⟩`, dark and decoupled for constant `φ`.
    pub dark2: StateVector,
}

impl AdiabaticFrame {
    pub fn new(theta: f64, varphi: f64, phase: f64) -> Self {
        let (sin_v, cos_v) = varphi.sin_cos();
        let (sin_t, cos_t) = theta.sin_cos();
        let psi =
            StateVector::from_vec(vec![C64::new(sin_v, 0.0), C64::new(cos_v, 0.0), ZERO, ZERO]);
        let aux = basis_state(TRIPOD_DIM, LEVEL_2) * C64::from_polar(1.0, phase);
        let excited = basis_state(TRIPOD_DIM, LEVEL_E);
        let bright = &psi * C64::from(sin_t) + &aux * C64::from(cos_t);
        let dark1 = &psi * C64::from(cos_t) - &aux * C64::from(sin_t);
        let s = C64::from(FRAC_1_SQRT_2);
        AdiabaticFrame {
            plus: (&bright - &excited) * s,
            dark1,
            minus: (&bright + &excited) * s,
            dark2: StateVector::from_vec(vec![
                C64::new(cos_v, 0.0),
                C64::new(-sin_v, 0.0),
                ZERO,
                ZERO,
            ]),
        }
    }

    pub fn at(schedule: &AdiabaticSchedule, leg: Leg, t: f64) -> Self {
        let theta = schedule.mixing_on(leg, t).0;
        AdiabaticFrame::new(theta, schedule.varphi, schedule.phase(leg))
    }

    /// Columns `|+⟩, |d₁⟩, |−⟩, |d₂⟩`.
    pub fn matrix(&self) -> Operator {
        Operator::from_columns(&[
            self.plus.clone(),
            self.dark1.clone(),
            self.minus.clone(),
            self.dark2.clone(),
        ])
    }
}

/// Three-level Hamiltonian in the adiabatic frame `(|+⟩, |d₁⟩, |−⟩)`.
///
/// With the tripod normalization used here the bright pair sits at `∓Ω`
/// (the `|+⟩` vector above has energy `−Ω`), so the operator is
/// `−Ω M_z + θ̇ M_y`.
pub fn adiabatic_frame_hamiltonian(schedule: &AdiabaticSchedule, t: f64) -> Result<Operator> {
    let leg = schedule.leg_at(t)?;
    let (_, theta_dot, _) = schedule.mixing_on(leg, t);
    let (omega, _) = schedule.amplitude_on(leg, t);
    Ok(spin1_z() * C64::from(-omega) + spin1_y() * C64::from(theta_dot))
}

/// `exp(iμ M_x)`; exact because `M_x³ = M_x`.
pub fn dressing_rotation(mu: f64) -> Operator {
    let m = spin1_x();
    let m2 = &m * &m;
    let (sin, cos) = mu.sin_cos();
    Operator::identity(3, 3) + m * (I * sin) + m2 * C64::from(cos - 1.0)
}

/// The dressed dark state `W(t)·exp(iμM_x)|d₁⟩` in the bare tripod basis.
///
/// It reduces to `cos μ|d₁⟩ + i sin μ|e⟩`, and coincides with `|d₁⟩`
/// wherever the dressing angle vanishes.
pub fn dressed_dark_state(corrected: &CorrectedSchedule, leg: Leg, t: f64) -> Result<StateVector> {
    let frame = AdiabaticFrame::at(corrected.schedule(), leg, t);
    let mu = corrected.point_on(leg, t)?.mu;
    let rotated = dressing_rotation(mu).column(1).into_owned();
    Ok(&frame.plus * rotated[0] + &frame.dark1 * rotated[1] + &frame.minus * rotated[2])
}

/// Which slice of the two-atom cavity space is simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoQubitBasis {
    /// `|000⟩, |001⟩, |100⟩, |010⟩, |110⟩`; `|110⟩` is held uncoupled.
    Restricted,
    /// Adds `|011⟩, |101⟩` so that `|110⟩` can leak.
    Extended,
}

impl TwoQubitBasis {
    pub fn dim(self) -> usize {
        match self {
            TwoQubitBasis::Restricted => 5,
            TwoQubitBasis::Extended => 7,
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        &CAVITY_LABELS[..self.dim()]
    }
}

/// Effective Raman coupling `λ_c Ω_R / (divisor · Δ)`.
pub fn effective_coupling(lambda_c: f64, omega_r: f64, delta: f64, coupling_divisor: f64) -> f64 {
    lambda_c * omega_r / (coupling_divisor * delta)
}

/// Physical parameters of the Raman-coupled cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamanParams {
    /// Cavity coupling `λ_c` in rad/s.
    pub lambda_c: f64,
    /// Peak Raman drive `Ω_R` in rad/s.
    pub omega_r: f64,
    /// Common detuning `Δ` in rad/s.
    pub delta: f64,
    /// 1 or 2, selecting between the two published forms of `G_j`.
    pub coupling_divisor: f64,
}

/// Ratio above which the dispersive elimination is flagged.
pub const DISPERSIVE_WARNING: f64 = 0.01;

impl RamanParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_c", self.lambda_c),
            ("omega_r", self.omega_r),
            ("delta", self.delta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v:e}")));
            }
        }
        if self.coupling_divisor != 1.0 && self.coupling_divisor != 2.0 {
            return Err(Error::config(format!(
                "coupling divisor must be 1 or 2, got {}",
                self.coupling_divisor
            )));
        }
        Ok(())
    }

    /// Peak effective coupling `G_max`.
    pub fn g_max(&self) -> f64 {
        effective_coupling(
            self.lambda_c,
            self.omega_r,
            self.delta,
            self.coupling_divisor,
        )
    }

    /// `G_max / Δ`.
    pub fn dispersive_ratio(&self) -> f64 {
        self.g_max() / self.delta
    }

    /// `(Ω_R / 2Δ)²`, the scale applied to atomic decay after elimination.
    pub fn atomic_decay_scale(&self) -> f64 {
        let r = self.omega_r / (2.0 * self.delta);
        r * r
    }

    pub fn warnings(&self) -> Vec<String> {
        let ratio = self.dispersive_ratio();
        if ratio > DISPERSIVE_WARNING {
            vec![format!(
                "G/Δ = {ratio:.4} exceeds {DISPERSIVE_WARNING}; the effective Raman model is marginal"
            )]
        } else {
            Vec::new()
        }
    }
}

/// Two atoms coupled through a cavity in Raman resonance.
///
/// The corrected schedule's `|ψ⟩` drive is `G′₁` (atom 1) and its `|2⟩`
/// drive, with the leg phase, is `G′₂` (atom 2).
#[derive(Clone, Debug)]
pub struct RamanCavityModel {
    pub params: RamanParams,
    pub corrected: CorrectedSchedule,
    pub basis: TwoQubitBasis,
}

impl RamanCavityModel {
    pub fn new(
        params: RamanParams,
        corrected: CorrectedSchedule,
        basis: TwoQubitBasis,
    ) -> Result<Self> {
        params.validate()?;
        Ok(RamanCavityModel {
            params,
            corrected,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `(G′₁, G′₂)` on a leg.
    pub fn couplings_on(&self, leg: Leg, t: f64) -> Result<(C64, C64)> {
        let p = self.corrected.point_on(leg, t)?;
        let phase = self.corrected.schedule().phase(leg);
        Ok((
            C64::new(p.psi_drive, 0.0),
            C64::from_polar(p.aux_drive, -phase),
        ))
    }

    /// Raman drive amplitudes `(Ω_R₁, Ω_R₂)` that realise `(|G′₁|, |G′₂|)`.
    pub fn raman_drives_on(&self, leg: Leg, t: f64) -> Result<(f64, f64)> {
        let (g1, g2) = self.couplings_on(leg, t)?;
        let scale = self.params.coupling_divisor * self.params.delta / self.params.lambda_c;
        Ok((g1.norm() * scale, g2.norm() * scale))
    }

    pub fn hamiltonian_on(&self, leg: Leg, t: f64) -> Result<Operator> {
        let (g1, g2) = self.couplings_on(leg, t)?;
        let mut h = Operator::zeros(self.dim(), self.dim());
        let mut couple = |a: usize, b: usize, g: C64| {
            h[(a, b)] = g;
            h[(b, a)] = g.conj();
        };
        couple(CAVITY, ATOM1, g1);
        couple(CAVITY, ATOM2, g2);
        if self.basis == TwoQubitBasis::Extended {
            couple(ATOM2_PHOTON, BOTH, g1);
            couple(ATOM1_PHOTON, BOTH, g2);
        }
        Ok(h)
    }

    pub fn hamiltonian(&self, t: f64) -> Result<Operator> {
        let leg = self.corrected.schedule().leg_at(t)?;
        self.hamiltonian_on(leg, t)
    }
}

pub fn two_qubit_hamiltonian(model: &RamanCavityModel, t: f64) -> Result<Operator> {
    model.hamiltonian(t)
}

/// Dissipation rates in rad/s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// Cavity decay `κ`.
    pub kappa: f64,
    /// Atomic decay `Γ₁`.
    pub gamma1: f64,
    /// Atomic dephasing `Γ₂`.
    pub gamma2: f64,
}

impl Rates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "rate {name} must be non-negative, got {v:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.kappa == 0.0 && self.gamma1 == 0.0 && self.gamma2 == 0.0
    }
}

/// A Lindblad channel `(rate/2)·L(A)`, i.e. `rate·(AρA† − ½{A†A, ρ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseTerm {
    pub label: String,
    pub operator: Operator,
    pub rate: f64,
}

/// Which system the collapse operators act on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SystemKind {
    SingleQubit,
    TwoQubit {
        basis: TwoQubitBasis,
        /// Multiplies `Γ₁` for the effective `|0⟩⟨1|` decay of each atom.
        atomic_scale: f64,
    },
}

/// Collapse operators with their rates. Zero-rate channels are dropped.
///
/// Single qubit: spontaneous emission `|i⟩⟨e|` at `Γ₁` and dephasing
/// `|e⟩⟨e| − |i⟩⟨i|` at `Γ₂` for `i = 0, 1, 2`; no cavity.
///
/// Two qubits: the cavity annihilation operator projected on the simulated
/// basis at `κ`, and `|0⟩⟨1|` on each atom at `Γ₁ · atomic_scale`.
pub fn collapse_operators(kind: SystemKind, rates: &Rates) -> Result<Vec<CollapseTerm>> {
    rates.validate()?;
    let mut terms = Vec::new();
    let mut push = |label: &str, operator: Operator, rate: f64| {
        if rate > 0.0 {
            terms.push(CollapseTerm {
                label: label.to_string(),
                operator,
                rate,
            });
        }
    };
    match kind {
        SystemKind::SingleQubit => {
            for i in [LEVEL_0, LEVEL_1, LEVEL_2] {
                push(
                    &format!("decay_e{i}"),
                    transition(TRIPOD_DIM, i, LEVEL_E),
                    rates.gamma1,
                );
            }
            for i in [LEVEL_0, LEVEL_1, LEVEL_2] {
                let b = transition(TRIPOD_DIM, LEVEL_E, LEVEL_E) - transition(TRIPOD_DIM, i, i);
                push(&format!("dephase_e{i}"), b, rates.gamma2);
            }
        }
        SystemKind::TwoQubit {
            basis,
            atomic_scale,
        } => {
            if !(atomic_scale >= 0.0 && atomic_scale.is_finite()) {
                return Err(Error::config(format!(
                    "atomic decay scale must be non-negative, got {atomic_scale}"
                )));
            }
            let dim = basis.dim();
            let mut cavity = transition(dim, GROUND, CAVITY);
            let mut atom1 = transition(dim, GROUND, ATOM1) + transition(dim, ATOM2, BOTH);
            let mut atom2 = transition(dim, GROUND, ATOM2) + transition(dim, ATOM1, BOTH);
            if basis == TwoQubitBasis::Extended {
                cavity +=
                    transition(dim, ATOM2, ATOM2_PHOTON) + transition(dim, ATOM1, ATOM1_PHOTON);
                atom1 += transition(dim, CAVITY, ATOM1_PHOTON);
                atom2 += transition(dim, CAVITY, ATOM2_PHOTON);
            }
            push("cavity", cavity, rates.kappa);
            push("atom1_decay", atom1, rates.gamma1 * atomic_scale);
            push("atom2_decay", atom2, rates.gamma1 * atomic_scale);
        }
    }
    Ok(terms)
}

/// A time-dependent Hamiltonian with its dissipative channels.
pub struct LindbladModel<H> {
    pub hamiltonian: H,
    pub collapses: Vec<CollapseTerm>,
    dim: usize,
}

impl<H> LindbladModel<H>
where
    H: Fn(f64) -> Result<Operator>,
{
    pub fn new(dim: usize, hamiltonian: H, collapses: Vec<CollapseTerm>) -> Result<Self> {
        for term in &collapses {
            if term.operator.nrows() != dim || term.operator.ncols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: term.operator.nrows(),
                });
            }
            if !(term.rate >= 0.0 && term.rate.is_finite()) {
                return Err(Error::config(format!(
                    "collapse rate for {} must be non-negative",
                    term.label
                )));
            }
        }
        Ok(LindbladModel {
            hamiltonian,
            collapses,
            dim,
        })
    }

    /// Closed-system model.
    pub fn unitary(dim: usize, hamiltonian: H) -> Self {
        LindbladModel {
            hamiltonian,
            collapses: Vec::new(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// JSON form of an operator: dimension plus row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&Operator> for OperatorDump {
    fn from(op: &Operator) -> Self {
        let dim = op.nrows();
        let mut entries = Vec::with_capacity(dim * op.ncols());
        for r in 0..dim {
            for c in 0..op.ncols() {
                let z = op[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        OperatorDump { dim, entries }
    }
}

impl OperatorDump {
    pub fn to_operator(&self) -> Result<Operator> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Dimension {
                expected: self.dim * self.dim,
                found: self.entries.len(),
            });
        }
        Ok(Operator::from_row_iterator(
            self.dim,
            self.dim,
            self.entries.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{correct_schedule, Dressing, DEFAULT_T_OVER_TAU};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const OMEGA_MAX: f64 = 2.0 * PI * 750.0e6;

    fn corrected(varphi: f64, dressing: Dressing) -> CorrectedSchedule {
        let schedule = AdiabaticSchedule::vitanov(OMEGA_MAX, 0.38 / OMEGA_MAX, DEFAULT_T_OVER_TAU)
            .unwrap()
            .with_varphi(varphi)
            .with_leg_phases(0.3, -1.1);
        correct_schedule(&schedule, &dressing).unwrap()
    }

    #[test]
    fn zero_drive_gives_zero_matrix() {
        let h = tripod_hamiltonian([ZERO; 3]);
        assert!(h.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn single_channel_drive() {
        // θ′ = π/2, φ = 0, ϕ = 0 leaves only the |1⟩ ↔ |e⟩ coupling.
        let omega = 3.0;
        let theta = PI / 2.0;
        let drive = [
            C64::new(omega * theta.sin() * 0.0f64.sin(), 0.0),
            C64::new(omega * theta.sin() * 0.0f64.cos(), 0.0),
            C64::new(omega * theta.cos(), 0.0),
        ];
        let h = tripod_hamiltonian(drive);
        assert_eq!(h[(LEVEL_E, LEVEL_1)], C64::new(omega, 0.0));
        assert_eq!(h[(LEVEL_1, LEVEL_E)], C64::new(omega, 0.0));
        assert!(h[(LEVEL_E, LEVEL_0)].norm() < 1e-15);
        assert!(h[(LEVEL_E, LEVEL_2)].norm() < 1e-15);
    }

    #[test]
    fn tripod_structure() {
        let model = TripodModel::new(corrected(0.4, Dressing::satd()));
        for k in 0..=50 {
            let t = model.corrected.duration() * k as f64 / 50.0;
            let h = model.hamiltonian(t).unwrap();
            for r in 0..TRIPOD_DIM {
                assert_eq!(h[(r, r)], ZERO);
                for c in 0..TRIPOD_DIM {
                    if r != LEVEL_E && c != LEVEL_E {
                        assert_eq!(h[(r, c)], ZERO);
                    }
                }
            }
            assert!(hermiticity_error(&h) == 0.0);
        }
    }

    #[test]
    fn spin1_algebra() {
        let (x, y, z) = (spin1_x(), spin1_y(), spin1_z());
        // [M_x, M_y] = i M_z up to the orientation fixed by the definitions.
        let comm = &x * &y - &y * &x;
        let expected = &z * I;
        let flipped = &z * (-I);
        let err = (&comm - &expected).norm().min((&comm - &flipped).norm());
        assert!(err < 1e-14);
        for m in [&x, &y, &z] {
            let cube = m * m * m;
            assert!((cube - m).norm() < 1e-14);
        }
        assert_eq!(y[(0, 1)], C64::new(0.0, FRAC_1_SQRT_2));
    }

    #[test]
    fn frame_hamiltonian_without_rate_is_diagonal() {
        let frozen = AdiabaticSchedule::custom(
            std::sync::Arc::new(|_| 0.2),
            crate::pulse::Amplitude::Constant(5.0),
            1.0,
            0.1,
        )
        .unwrap();
        let h = adiabatic_frame_hamiltonian(&frozen, 0.3).unwrap();
        let expected = Operator::from_diagonal(&DVector::from_vec(vec![
            C64::from(-5.0),
            ZERO,
            C64::from(5.0),
        ]));
        assert!((h - expected).norm() < 1e-12);
    }

    #[test]
    fn dressing_rotation_is_unitary_and_reduces_to_excited_mix() {
        for mu in [-1.2, -0.3, 0.0, 0.7] {
            let r = dressing_rotation(mu);
            assert!((r.adjoint() * &r - Operator::identity(3, 3)).norm() < 1e-14);
        }
        let c = corrected(0.9, Dressing::satd());
        let t = 0.37 * c.duration();
        let leg = Leg::at(t, c.leg_duration());
        let state = dressed_dark_state(&c, leg, t).unwrap();
        let frame = AdiabaticFrame::at(c.schedule(), leg, t);
        let mu = c.point_on(leg, t).unwrap().mu;
        let expected =
            &frame.dark1 * C64::from(mu.cos()) + basis_state(4, LEVEL_E) * (I * mu.sin());
        assert!((state - expected).norm() < 1e-14);
    }

    #[test]
    fn raman_coupling_formula() {
        let g1 = effective_coupling(2.0, 3.0, 4.0, 1.0);
        let g2 = effective_coupling(2.0, 3.0, 4.0, 2.0);
        assert_relative_eq!(g1, 1.5);
        assert_relative_eq!(g2, 0.75);
        let params = RamanParams {
            lambda_c: 1.0,
            omega_r: 1.0,
            delta: 1.0,
            coupling_divisor: 3.0,
        };
        assert!(params.validate().is_err());
    }

    #[test]
    fn raman_hamiltonian_structure() {
        let params = RamanParams {
            lambda_c: 2.0 * PI * 750e6,
            omega_r: 2.0 * PI * 750e6,
            delta: 2.0 * PI * 4e9,
            coupling_divisor: 1.0,
        };
        let g = params.g_max();
        let schedule = AdiabaticSchedule::vitanov(g, 0.38 / g, 10.0)
            .unwrap()
            .with_varphi(PI / 2.0)
            .with_leg_phases(0.0, PI);
        let c = correct_schedule(&schedule, &Dressing::satd()).unwrap();
        let model = RamanCavityModel::new(params, c, TwoQubitBasis::Restricted).unwrap();
        assert!(!params.warnings().is_empty());
        for k in 0..=40 {
            let t = schedule.duration() * k as f64 / 40.0;
            let h = model.hamiltonian(t).unwrap();
            assert_eq!(h.nrows(), 5);
            let both = h.column(BOTH).into_owned();
            assert!(both.iter().all(|z| *z == ZERO));
            assert!(h.column(GROUND).iter().all(|z| *z == ZERO));
            assert!(hermiticity_error(&h) == 0.0);
        }
        let ext = RamanCavityModel::new(params, model.corrected.clone(), TwoQubitBasis::Extended)
            .unwrap();
        let h = ext.hamiltonian(0.5 * schedule.duration()).unwrap();
        assert!(h.column(BOTH).iter().any(|z| z.norm() > 0.0));
    }

    #[test]
    fn single_qubit_collapse_set() {
        let rates = Rates {
            kappa: 1.0,
            gamma1: 2.0,
            gamma2: 3.0,
        };
        let terms = collapse_operators(SystemKind::SingleQubit, &rates).unwrap();
        assert_eq!(terms.len(), 6);
        assert!(terms.iter().all(|t| t.operator.nrows() == TRIPOD_DIM));
        assert_eq!(terms[0].operator[(LEVEL_0, LEVEL_E)], ONE);
        assert_eq!(terms[3].operator[(LEVEL_E, LEVEL_E)], ONE);
        assert_eq!(terms[3].operator[(LEVEL_0, LEVEL_0)], -ONE);

        let none = collapse_operators(SystemKind::SingleQubit, &Rates::default()).unwrap();
        assert!(none.is_empty());

        let bad = Rates {
            kappa: 0.0,
            gamma1: -1.0,
            gamma2: 0.0,
        };
        assert!(collapse_operators(SystemKind::SingleQubit, &bad).is_err());
    }

    #[test]
    fn two_qubit_collapse_set() {
        let rates = Rates {
            kappa: 1.0,
            gamma1: 2.0,
            gamma2: 3.0,
        };
        let kind = SystemKind::TwoQubit {
            basis: TwoQubitBasis::Restricted,
            atomic_scale: 0.25,
        };
        let terms = collapse_operators(kind, &rates).unwrap();
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[0].operator[(GROUND, CAVITY)], ONE);
        assert_relative_eq!(terms[1].rate, 0.5);
    }

    #[test]
    fn lindblad_model_checks_dimensions() {
        let term = CollapseTerm {
            label: "x".into(),
            operator: transition(3, 0, 1),
            rate: 1.0,
        };
        let h = |_t: f64| Ok(Operator::zeros(4, 4));
        assert!(matches!(
            LindbladModel::new(4, h, vec![term]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn operator_dump_round_trip() {
        let op = tripod_hamiltonian([C64::new(1.0, 0.5), C64::new(-2.0, 0.0), C64::new(0.0, 3.0)]);
        let dump = OperatorDump::from(&op);
        assert_eq!(dump.dim, 4);
        assert_eq!(dump.entries[LEVEL_E * 4], [1.0, 0.5]);
        let json = serde_json::to_string(&dump).unwrap();
        let back: OperatorDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_operator().unwrap(), op);
    }
}
