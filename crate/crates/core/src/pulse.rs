//! Adiabatic reference schedules and their superadiabatic corrections.
//!
//! A schedule describes the tripod drive through a mixing angle `θ(t)` and a
//! total amplitude `Ω(t)` over two legs of duration `T` each. The dressing
//! step reshapes both so that the state follows a dressed dark state exactly:
//!
//! ```text
//! μ   = −atan(θ̇ / (f Ω))          (f ≡ 1 for SATD)
//! g_x = μ̇,   g_z = (f − 1) Ω
//! Ω′ sin θ′ = (Ω + g_z) sin θ − g_x cos θ
//! Ω′ cos θ′ = (Ω + g_z) cos θ + g_x sin θ
//! ```
//!
//! The two products on the left are the drives actually applied: the first
//! one is split between `|0⟩` and `|1⟩` by the constant angle `φ`, the second
//! one couples `|2⟩` and carries the leg phase `e^{−iϕ}`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// A real-valued function of time supplied by the caller.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default ratio between the leg duration `T` and the pulse width `τ`.
pub const DEFAULT_T_OVER_TAU: f64 = 10.0;

/// Finite-difference step for user-supplied profiles, as a fraction of `T`.
pub const FD_STEP: f64 = 1.0e-6;

/// Step for second derivatives, relative to `T`; wider to tame roundoff.
pub const SECOND_FD_STEP: f64 = 1.0e-4;

/// Tolerance on `|μ|` at the protocol boundaries.
pub const MU_TOL: f64 = 0.01;

/// Number of time points used to locate the peak drive amplitude.
pub const PEAK_GRID: usize = 10_000;

/// Relative tolerance of the `τ_min` bisection.
pub const TAU_MIN_REL_TOL: f64 = 1.0e-6;

/// Constant MSA dressing factor shipped as the default.
///
/// This is the result of [`crate::gates::calibrate_msa_dressing`] on the
/// default NOT-gate protocol: every `f > 1` breaks the amplitude limit at
/// `τ_min`, and every `f < 1` raises the peak excited-state population.
pub const DEFAULT_MSA_F0: f64 = 1.0;

/// One of the two halves of the cyclic protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Leg {
    /// `t ∈ [0, T)`, mixing angle rising towards π/2.
    First,
    /// `t ∈ [T, 2T]`, mixing angle falling back.
    Second,
}

impl Leg {
    pub const BOTH: [Leg; 2] = [Leg::First, Leg::Second];

    /// The leg that owns time `t`; `t = T` belongs to the second leg.
    pub fn at(t: f64, leg_duration: f64) -> Leg {
        if t < leg_duration {
            Leg::First
        } else {
            Leg::Second
        }
    }

    pub fn index(self) -> usize {
        match self {
            Leg::First => 0,
            Leg::Second => 1,
        }
    }

    /// Closed time window `[start, end]` of this leg.
    pub fn window(self, leg_duration: f64) -> (f64, f64) {
        match self {
            Leg::First => (0.0, leg_duration),
            Leg::Second => (leg_duration, 2.0 * leg_duration),
        }
    }
}

/// `(π/2)·σ(x)` and its first two derivatives with respect to `t = x·τ`.
fn half_pi_logistic(x: f64, tau: f64) -> (f64, f64, f64) {
    let e = (-x.abs()).exp();
    let sigma = if x >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    };
    // σ(1 − σ) is even in x, which keeps it accurate in both tails.
    let slope = e / ((1.0 + e) * (1.0 + e));
    let curvature = slope * (1.0 - 2.0 * sigma);
    (
        FRAC_PI_2 * sigma,
        FRAC_PI_2 * slope / tau,
        FRAC_PI_2 * curvature / (tau * tau),
    )
}

/// Vitanov mixing angle and its first two time derivatives on a given leg.
///
/// Each leg's closed form is evaluated on its own closed window, so the
/// one-sided limits at `t = T` come out without special casing.
pub fn vitanov_on(leg: Leg, t: f64, leg_duration: f64, tau: f64) -> (f64, f64, f64) {
    match leg {
        Leg::First => half_pi_logistic((t - 0.5 * leg_duration) / tau, tau),
        Leg::Second => {
            let (v, r, a) = half_pi_logistic((t - 1.5 * leg_duration) / tau, tau);
            (FRAC_PI_2 - v, -r, -a)
        }
    }
}

fn check_timing(leg_duration: f64, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::config(format!(
            "pulse width must be positive, got {tau:e}"
        )));
    }
    if !(leg_duration > 0.0 && leg_duration.is_finite()) {
        return Err(Error::config(format!(
            "leg duration must be positive, got {leg_duration:e}"
        )));
    }
    Ok(())
}

fn check_window(t: f64, leg_duration: f64) -> Result<()> {
    let end = 2.0 * leg_duration;
    // Grids built as `end * k / n` can overshoot by an ulp.
    if !(t >= 0.0 && t <= end * (1.0 + 1e-12)) {
        return Err(Error::Domain { t, end });
    }
    Ok(())
}

/// Vitanov mixing angle `θ(t)` over the two-leg protocol.
pub fn vitanov_theta(t: f64, leg_duration: f64, tau: f64) -> Result<f64> {
    check_timing(leg_duration, tau)?;
    check_window(t, leg_duration)?;
    Ok(vitanov_on(Leg::at(t, leg_duration), t, leg_duration, tau).0)
}

/// Analytic `θ̇(t)` of the Vitanov schedule. At `t = T` the second leg's
/// one-sided derivative is returned.
pub fn theta_dot(t: f64, leg_duration: f64, tau: f64) -> Result<f64> {
    check_timing(leg_duration, tau)?;
    check_window(t, leg_duration)?;
    Ok(vitanov_on(Leg::at(t, leg_duration), t, leg_duration, tau).1)
}

/// Second derivative of `f` at `t`, keeping the stencil inside `[lo, hi]`.
fn second_derivative_within(f: &dyn Fn(f64) -> f64, t: f64, h: f64, lo: f64, hi: f64) -> f64 {
    let h2 = h * h;
    if t - h >= lo && t + h <= hi {
        (f(t + h) - 2.0 * f(t) + f(t - h)) / h2
    } else if t - h < lo {
        (2.0 * f(t) - 5.0 * f(t + h) + 4.0 * f(t + 2.0 * h) - f(t + 3.0 * h)) / h2
    } else {
        (2.0 * f(t) - 5.0 * f(t - h) + 4.0 * f(t - 2.0 * h) - f(t - 3.0 * h)) / h2
    }
}

/// Derivative of `f` at `t`, keeping the stencil inside `[lo, hi]`.
fn derivative_within(f: &dyn Fn(f64) -> f64, t: f64, h: f64, lo: f64, hi: f64) -> f64 {
    if t - h >= lo && t + h <= hi {
        (f(t + h) - f(t - h)) / (2.0 * h)
    } else if t - h < lo {
        (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h)
    } else {
        (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h)
    }
}

/// Shape of the mixing angle.
#[derive(Clone)]
pub enum MixingAngle {
    /// The logistic two-leg form with analytic derivatives.
    Vitanov,
    /// Any smooth user function on `[0, 2T]`; derivatives by finite differences.
    Custom(Profile),
}

/// Total drive amplitude `Ω(t)`.
#[derive(Clone)]
pub enum Amplitude {
    Constant(f64),
    Custom(Profile),
}

impl Amplitude {
    fn value(&self, t: f64) -> f64 {
        match self {
            Amplitude::Constant(v) => *v,
            Amplitude::Custom(p) => p(t),
        }
    }

    /// Largest value the amplitude takes; for custom profiles this is sampled.
    pub fn peak(&self, duration: f64) -> f64 {
        match self {
            Amplitude::Constant(v) => *v,
            Amplitude::Custom(p) => (0..=PEAK_GRID)
                .map(|k| p(duration * k as f64 / PEAK_GRID as f64))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// The uncorrected control parameterization of a two-leg protocol.
#[derive(Clone)]
pub struct AdiabaticSchedule {
    pub mixing: MixingAngle,
    pub amplitude: Amplitude,
    /// Constant angle splitting the `|ψ⟩` drive between `|0⟩` and `|1⟩`.
    pub varphi: f64,
    /// Phases `(ϕ₁, ϕ₂)` of the `|2⟩` drive on the first and second leg.
    pub leg_phases: (f64, f64),
    /// Leg duration `T` in seconds; the protocol lasts `2T`.
    pub leg_duration: f64,
    /// Pulse width `τ` in seconds.
    pub tau: f64,
}

impl fmt::Debug for AdiabaticSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mixing = match self.mixing {
            MixingAngle::Vitanov => "vitanov",
            MixingAngle::Custom(_) => "custom",
        };
        let amplitude = match self.amplitude {
            Amplitude::Constant(v) => format!("constant({v:e})"),
            Amplitude::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("AdiabaticSchedule")
            .field("mixing", &mixing)
            .field("amplitude", &amplitude)
            .field("varphi", &self.varphi)
            .field("leg_phases", &self.leg_phases)
            .field("leg_duration", &self.leg_duration)
            .field("tau", &self.tau)
            .finish()
    }
}

impl AdiabaticSchedule {
    /// Vitanov schedule with constant amplitude and `T = t_over_tau · τ`.
    pub fn vitanov(peak_amplitude: f64, tau: f64, t_over_tau: f64) -> Result<Self> {
        let schedule = AdiabaticSchedule {
            mixing: MixingAngle::Vitanov,
            amplitude: Amplitude::Constant(peak_amplitude),
            varphi: 0.0,
            leg_phases: (0.0, 0.0),
            leg_duration: t_over_tau * tau,
            tau,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn custom(
        mixing: Profile,
        amplitude: Amplitude,
        leg_duration: f64,
        tau: f64,
    ) -> Result<Self> {
        let schedule = AdiabaticSchedule {
            mixing: MixingAngle::Custom(mixing),
            amplitude,
            varphi: 0.0,
            leg_phases: (0.0, 0.0),
            leg_duration,
            tau,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn with_varphi(mut self, varphi: f64) -> Self {
        self.varphi = varphi;
        self
    }

    pub fn with_leg_phases(mut self, first: f64, second: f64) -> Self {
        self.leg_phases = (first, second);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_timing(self.leg_duration, self.tau)?;
        if self.leg_duration < 2.0 * self.tau * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "leg duration {:e} s is shorter than 2τ = {:e} s",
                self.leg_duration,
                2.0 * self.tau
            )));
        }
        if !self.varphi.is_finite()
            || !self.leg_phases.0.is_finite()
            || !self.leg_phases.1.is_finite()
        {
            return Err(Error::config("angles must be finite"));
        }
        let samples = 256;
        for leg in Leg::BOTH {
            let (lo, hi) = leg.window(self.leg_duration);
            for k in 1..samples {
                let t = lo + (hi - lo) * k as f64 / samples as f64;
                let omega = self.amplitude.value(t);
                if !(omega > 0.0 && omega.is_finite()) {
                    return Err(Error::config(format!(
                        "amplitude must stay positive inside the protocol, got {omega:e} at t = {t:e}"
                    )));
                }
                if !self.mixing_on(leg, t).0.is_finite() {
                    return Err(Error::config(format!(
                        "mixing angle is not finite at t = {t:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total protocol duration `2T`.
    pub fn duration(&self) -> f64 {
        2.0 * self.leg_duration
    }

    pub fn leg_at(&self, t: f64) -> Result<Leg> {
        check_window(t, self.leg_duration)?;
        Ok(Leg::at(t, self.leg_duration))
    }

    pub fn phase(&self, leg: Leg) -> f64 {
        match leg {
            Leg::First => self.leg_phases.0,
            Leg::Second => self.leg_phases.1,
        }
    }

    fn fd_step(&self) -> f64 {
        FD_STEP * self.leg_duration
    }

    /// `(θ, θ̇, θ̈)` on the given leg.
    pub fn mixing_on(&self, leg: Leg, t: f64) -> (f64, f64, f64) {
        match &self.mixing {
            MixingAngle::Vitanov => vitanov_on(leg, t, self.leg_duration, self.tau),
            MixingAngle::Custom(p) => {
                let (lo, hi) = leg.window(self.leg_duration);
                let h = self.fd_step();
                let angle = |s: f64| p(s);
                let h2 = SECOND_FD_STEP * self.leg_duration;
                (
                    p(t),
                    derivative_within(&angle, t, h, lo, hi),
                    second_derivative_within(&angle, t, h2, lo, hi),
                )
            }
        }
    }

    /// `(Ω, Ω̇)` on the given leg.
    pub fn amplitude_on(&self, leg: Leg, t: f64) -> (f64, f64) {
        match &self.amplitude {
            Amplitude::Constant(v) => (*v, 0.0),
            Amplitude::Custom(p) => {
                let (lo, hi) = leg.window(self.leg_duration);
                let value = |s: f64| p(s);
                (p(t), derivative_within(&value, t, self.fd_step(), lo, hi))
            }
        }
    }

    pub fn theta(&self, t: f64) -> Result<f64> {
        let leg = self.leg_at(t)?;
        Ok(self.mixing_on(leg, t).0)
    }

    pub fn theta_dot(&self, t: f64) -> Result<f64> {
        let leg = self.leg_at(t)?;
        Ok(self.mixing_on(leg, t).1)
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        let leg = self.leg_at(t)?;
        Ok(self.amplitude_on(leg, t).0)
    }
}

/// Which correction is applied to the adiabatic schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DressingMode {
    /// Uncorrected adiabatic pulses.
    None,
    /// Superadiabatic transitionless driving.
    Satd,
    /// Modified superadiabatic driving with a dressing function `f(t)`.
    Msa,
}

impl DressingMode {
    pub const ALL: [DressingMode; 3] = [DressingMode::None, DressingMode::Satd, DressingMode::Msa];

    pub fn as_str(self) -> &'static str {
        match self {
            DressingMode::None => "none",
            DressingMode::Satd => "satd",
            DressingMode::Msa => "msa",
        }
    }
}

impl fmt::Display for DressingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DressingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DressingMode::None),
            "satd" => Ok(DressingMode::Satd),
            "msa" => Ok(DressingMode::Msa),
            other => Err(Error::config(format!("unknown dressing mode `{other}`"))),
        }
    }
}

/// The dressing function `f(t)` used by MSA.
#[derive(Clone)]
pub enum DressingFunction {
    Constant(f64),
    Custom(Profile),
}

/// Correction mode plus the MSA dressing function.
#[derive(Clone)]
pub struct Dressing {
    pub mode: DressingMode,
    pub f: DressingFunction,
}

impl fmt::Debug for Dressing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let func = match self.f {
            DressingFunction::Constant(v) => format!("constant({v})"),
            DressingFunction::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("Dressing")
            .field("mode", &self.mode)
            .field("f", &func)
            .finish()
    }
}

impl Dressing {
    pub fn none() -> Self {
        Dressing {
            mode: DressingMode::None,
            f: DressingFunction::Constant(1.0),
        }
    }

    pub fn satd() -> Self {
        Dressing {
            mode: DressingMode::Satd,
            f: DressingFunction::Constant(1.0),
        }
    }

    pub fn msa(f0: f64) -> Self {
        Dressing {
            mode: DressingMode::Msa,
            f: DressingFunction::Constant(f0),
        }
    }

    pub fn msa_profile(profile: Profile) -> Self {
        Dressing {
            mode: DressingMode::Msa,
            f: DressingFunction::Custom(profile),
        }
    }

    /// The dressing for `mode`, using `msa_f0` when the mode is MSA.
    pub fn for_mode(mode: DressingMode, msa_f0: f64) -> Self {
        match mode {
            DressingMode::None => Dressing::none(),
            DressingMode::Satd => Dressing::satd(),
            DressingMode::Msa => Dressing::msa(msa_f0),
        }
    }

    /// `(f, ḟ)` at `t`; identically `(1, 0)` outside MSA mode.
    fn factor_on(&self, leg: Leg, t: f64, leg_duration: f64) -> (f64, f64) {
        if self.mode != DressingMode::Msa {
            return (1.0, 0.0);
        }
        match &self.f {
            DressingFunction::Constant(v) => (*v, 0.0),
            DressingFunction::Custom(p) => {
                let (lo, hi) = leg.window(leg_duration);
                let value = |s: f64| p(s);
                (
                    p(t),
                    derivative_within(&value, t, FD_STEP * leg_duration, lo, hi),
                )
            }
        }
    }

    /// Checks `f(t) > 0` over the protocol.
    pub fn validate(&self, leg_duration: f64) -> Result<()> {
        if self.mode != DressingMode::Msa {
            return Ok(());
        }
        let samples = 512;
        for k in 0..=samples {
            let t = 2.0 * leg_duration * k as f64 / samples as f64;
            let (f, _) = self.factor_on(Leg::at(t, leg_duration), t, leg_duration);
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::config(format!(
                    "MSA dressing function must be positive, got {f} at t = {t:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Every control quantity of a corrected schedule at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlPoint {
    pub t: f64,
    pub leg: Leg,
    pub theta: f64,
    pub theta_dot: f64,
    pub omega: f64,
    pub mu: f64,
    pub mu_dot: f64,
    pub g_x: f64,
    pub g_z: f64,
    /// `Ω′ sin θ′`, the drive on `|ψ⟩ = sin φ|0⟩ + cos φ|1⟩`.
    pub psi_drive: f64,
    /// `Ω′ cos θ′`, the drive on `|2⟩` before the leg phase.
    pub aux_drive: f64,
}

impl ControlPoint {
    pub fn theta_prime(&self) -> f64 {
        self.psi_drive.atan2(self.aux_drive)
    }

    pub fn omega_prime(&self) -> f64 {
        self.psi_drive.hypot(self.aux_drive)
    }

    /// Largest single-channel drive magnitude at this instant.
    pub fn peak_channel(&self) -> f64 {
        self.psi_drive.abs().max(self.aux_drive.abs())
    }
}

/// An adiabatic schedule together with the dressing that corrects it.
#[derive(Clone, Debug)]
pub struct CorrectedSchedule {
    schedule: AdiabaticSchedule,
    dressing: Dressing,
}

impl CorrectedSchedule {
    pub fn schedule(&self) -> &AdiabaticSchedule {
        &self.schedule
    }

    pub fn dressing(&self) -> &Dressing {
        &self.dressing
    }

    pub fn mode(&self) -> DressingMode {
        self.dressing.mode
    }

    pub fn varphi(&self) -> f64 {
        self.schedule.varphi
    }

    pub fn leg_phases(&self) -> (f64, f64) {
        self.schedule.leg_phases
    }

    pub fn leg_duration(&self) -> f64 {
        self.schedule.leg_duration
    }

    pub fn tau(&self) -> f64 {
        self.schedule.tau
    }

    pub fn duration(&self) -> f64 {
        self.schedule.duration()
    }

    /// Control quantities on a given leg. `t` may sit on either end of the leg.
    pub fn point_on(&self, leg: Leg, t: f64) -> Result<ControlPoint> {
        let s = &self.schedule;
        let (theta, theta_dot, theta_ddot) = s.mixing_on(leg, t);
        let (omega, omega_dot) = s.amplitude_on(leg, t);
        let (sin, cos) = theta.sin_cos();

        if self.dressing.mode == DressingMode::None {
            return Ok(ControlPoint {
                t,
                leg,
                theta,
                theta_dot,
                omega,
                mu: 0.0,
                mu_dot: 0.0,
                g_x: 0.0,
                g_z: 0.0,
                psi_drive: omega * sin,
                aux_drive: omega * cos,
            });
        }

        let (f, f_dot) = self.dressing.factor_on(leg, t, s.leg_duration);
        let scaled = f * omega;
        if scaled == 0.0 {
            return Err(Error::Singular { t });
        }
        let scaled_dot = f_dot * omega + f * omega_dot;
        let mu = -(theta_dot / scaled).atan();
        let mu_dot = -(theta_ddot * scaled - theta_dot * scaled_dot)
            / (scaled * scaled + theta_dot * theta_dot);
        let g_x = mu_dot;
        // −Ω − θ̇/tan μ with tan μ = −θ̇/(fΩ); exact zero in SATD.
        let g_z = match self.dressing.mode {
            DressingMode::Msa => (f - 1.0) * omega,
            _ => 0.0,
        };
        let base = omega + g_z;
        Ok(ControlPoint {
            t,
            leg,
            theta,
            theta_dot,
            omega,
            mu,
            mu_dot,
            g_x,
            g_z,
            psi_drive: base * sin - g_x * cos,
            aux_drive: base * cos + g_x * sin,
        })
    }

    pub fn point(&self, t: f64) -> Result<ControlPoint> {
        let leg = self.schedule.leg_at(t)?;
        self.point_on(leg, t)
    }

    pub fn theta_prime(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.theta_prime())
    }

    pub fn omega_prime(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.omega_prime())
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.mu)
    }

    pub fn g_x(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.g_x)
    }

    pub fn g_z(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.g_z)
    }

    /// Complex drive amplitudes `(Ω′₀, Ω′₁, Ω′₂)` on a given leg.
    pub fn drive_on(&self, leg: Leg, t: f64) -> Result<[C64; 3]> {
        let p = self.point_on(leg, t)?;
        let (sin_v, cos_v) = self.schedule.varphi.sin_cos();
        Ok([
            C64::new(p.psi_drive * sin_v, 0.0),
            C64::new(p.psi_drive * cos_v, 0.0),
            C64::from_polar(p.aux_drive, -self.schedule.phase(leg)),
        ])
    }

    pub fn drive(&self, t: f64) -> Result<[C64; 3]> {
        let leg = self.schedule.leg_at(t)?;
        self.drive_on(leg, t)
    }

    fn leg_grid(&self, total_points: usize) -> impl Iterator<Item = (Leg, f64)> + '_ {
        let per_leg = (total_points / 2).max(2);
        let duration = self.schedule.leg_duration;
        Leg::BOTH.into_iter().flat_map(move |leg| {
            let (lo, hi) = leg.window(duration);
            (0..per_leg).map(move |k| (leg, lo + (hi - lo) * k as f64 / (per_leg - 1) as f64))
        })
    }

    /// Largest single-channel drive magnitude over a uniform grid of
    /// `total_points` instants (both leg endpoints included).
    pub fn peak_channel_amplitude(&self, total_points: usize) -> Result<f64> {
        let mut peak = 0.0f64;
        for (leg, t) in self.leg_grid(total_points) {
            peak = peak.max(self.point_on(leg, t)?.peak_channel());
        }
        Ok(peak)
    }

    /// Largest `Ω′(t)` over the same grid.
    pub fn peak_omega_prime(&self, total_points: usize) -> Result<f64> {
        let mut peak = 0.0f64;
        for (leg, t) in self.leg_grid(total_points) {
            peak = peak.max(self.point_on(leg, t)?.omega_prime());
        }
        Ok(peak)
    }

    /// Fails when a single drive channel exceeds `limit` anywhere on the peak grid.
    pub fn check_amplitude(&self, limit: f64) -> Result<()> {
        let peak = self.peak_channel_amplitude(PEAK_GRID)?;
        if peak > limit {
            return Err(Error::AmplitudeExceeded { peak, limit });
        }
        Ok(())
    }

    /// `(μ(0), μ(2T))`.
    pub fn boundary_mu(&self) -> Result<(f64, f64)> {
        let end = self.duration();
        Ok((
            self.point_on(Leg::First, 0.0)?.mu,
            self.point_on(Leg::Second, end)?.mu,
        ))
    }

    /// Fails when the dressing angle does not vanish at the protocol ends.
    pub fn check_boundary(&self, tol: f64) -> Result<()> {
        let (start, end) = self.boundary_mu()?;
        if start.abs() > tol || end.abs() > tol {
            return Err(Error::config(format!(
                "dressing angle does not vanish at the boundaries: μ(0) = {start:.4e}, μ(2T) = {end:.4e}, tolerance {tol:e}"
            )));
        }
        Ok(())
    }
}

/// `μ(t)` for a dressed schedule.
pub fn compute_mu(schedule: &AdiabaticSchedule, dressing: &Dressing, t: f64) -> Result<f64> {
    if dressing.mode == DressingMode::None {
        return Err(Error::config(
            "the dressing angle is only defined for SATD and MSA",
        ));
    }
    let corrected = CorrectedSchedule {
        schedule: schedule.clone(),
        dressing: dressing.clone(),
    };
    Ok(corrected.point(t)?.mu)
}

/// Applies the dressing to a schedule.
///
/// The whole protocol is scanned once so that a vanishing amplitude is
/// reported here, with the offending time, rather than mid-integration.
pub fn correct_schedule(
    schedule: &AdiabaticSchedule,
    dressing: &Dressing,
) -> Result<CorrectedSchedule> {
    schedule.validate()?;
    dressing.validate(schedule.leg_duration)?;
    let corrected = CorrectedSchedule {
        schedule: schedule.clone(),
        dressing: dressing.clone(),
    };
    for (leg, t) in corrected.leg_grid(1024) {
        let p = corrected.point_on(leg, t)?;
        if !(p.psi_drive.is_finite() && p.aux_drive.is_finite()) {
            return Err(Error::Singular { t });
        }
    }
    Ok(corrected)
}

/// Shortest pulse width whose corrected Vitanov pulses keep every drive
/// channel at or below `omega_max`.
pub fn tau_min(omega_max: f64, dressing: &Dressing, t_over_tau: f64) -> Result<f64> {
    tau_min_with_tolerance(omega_max, dressing, t_over_tau, TAU_MIN_REL_TOL)
}

pub fn tau_min_with_tolerance(
    omega_max: f64,
    dressing: &Dressing,
    t_over_tau: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(Error::config(format!(
            "peak amplitude must be positive, got {omega_max:e}"
        )));
    }
    if t_over_tau < 2.0 {
        return Err(Error::config(format!(
            "T/τ must be at least 2, got {t_over_tau}"
        )));
    }
    if dressing.mode == DressingMode::None {
        return Ok(0.0);
    }
    let feasible = |tau: f64| -> Result<bool> {
        let schedule = AdiabaticSchedule::vitanov(omega_max, tau, t_over_tau)?;
        let corrected = correct_schedule(&schedule, dressing)?;
        Ok(corrected.peak_channel_amplitude(PEAK_GRID)? <= omega_max)
    };

    let mut hi = 1.0 / omega_max;
    let mut lo;
    if feasible(hi)? {
        lo = 0.5 * hi;
        let mut halvings = 0;
        while feasible(lo)? {
            hi = lo;
            lo *= 0.5;
            halvings += 1;
            if halvings > 200 {
                return Err(Error::config(
                    "amplitude constraint is satisfied for every pulse width",
                ));
            }
        }
    } else {
        lo = hi;
        hi *= 2.0;
        let mut doublings = 0;
        while !feasible(hi)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::config(
                    "no pulse width keeps the corrected drive below the peak amplitude",
                ));
            }
        }
    }
    while (hi - lo) > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One row of a pulse table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSample {
    pub t: f64,
    pub drive: [C64; 3],
}

/// Uniformly sampled drive amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseTable {
    pub rows: Vec<PulseSample>,
}

impl PulseTable {
    pub const HEADER: [&'static str; 7] = [
        "t",
        "re_omega0",
        "im_omega0",
        "re_omega1",
        "im_omega1",
        "re_omega2",
        "im_omega2",
    ];

    /// Peak magnitude of each of the three drive columns.
    pub fn column_peaks(&self) -> [f64; 3] {
        let mut peaks = [0.0f64; 3];
        for row in &self.rows {
            for (peak, z) in peaks.iter_mut().zip(row.drive) {
                *peak = peak.max(z.norm());
            }
        }
        peaks
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(Self::HEADER)?;
        for row in &self.rows {
            let mut record = Vec::with_capacity(7);
            record.push(format!("{:e}", row.t));
            for z in row.drive {
                record.push(format!("{:e}", z.re));
                record.push(format!("{:e}", z.im));
            }
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// `n` uniformly spaced samples of the three complex drives over `[0, 2T]`.
pub fn sample_pulses(corrected: &CorrectedSchedule, n: usize) -> Result<PulseTable> {
    if n < 2 {
        return Err(Error::config(format!(
            "need at least two pulse samples, got {n}"
        )));
    }
    let end = corrected.duration();
    let rows = (0..n)
        .map(|k| {
            let t = end * k as f64 / (n - 1) as f64;
            Ok(PulseSample {
                t,
                drive: corrected.drive(t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PulseTable { rows })
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}
