//! JSON run configuration.
//!
//! Frequencies are entered in MHz as ordinary frequencies; with `two_pi`
//! set (the default) they are multiplied by 2π on load. Times are in ns.
//! Every field has a default, so `{}` is the NOT gate with the published
//! parameter set. Unknown keys are rejected.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, StepControl};
use crate::gates::{GateKind, GateProtocol};
use crate::model::{RamanParams, Rates, TwoQubitBasis};
use crate::pulse::{DressingMode, DEFAULT_MSA_F0, DEFAULT_T_OVER_TAU};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Not,
    Hadamard,
    Cp,
    /// Single-qubit gate from `varphi` and `gamma`.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSettings {
    /// Fixed RK4 step in ns; auto when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_ns: Option<f64>,
    pub samples: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            dt_ns: None,
            samples: IntegratorConfig::default().samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub gate: GateName,
    pub mode: DressingMode,
    /// Axis angle in radians; overrides the named gate's value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub varphi: Option<f64>,
    /// Geometric phase in radians; overrides the named gate's value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub two_pi: bool,
    pub omega_max_mhz: f64,
    pub lambda_c_mhz: f64,
    pub omega_r_mhz: f64,
    pub delta_mhz: f64,
    pub kappa_mhz: f64,
    pub gamma1_mhz: f64,
    pub gamma2_mhz: f64,
    pub coupling_divisor: f64,
    pub basis: TwoQubitBasis,
    /// Pulse width in ns; the SATD `τ_min` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_ns: Option<f64>,
    pub t_over_tau: f64,
    pub msa_f0: f64,
    pub integrator: IntegratorSettings,
    /// Rows per exported pulse table.
    pub pulse_samples: usize,
    pub time_multipliers: Vec<f64>,
    pub decay_multipliers: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gate: GateName::Not,
            mode: DressingMode::Satd,
            varphi: None,
            gamma: None,
            two_pi: true,
            omega_max_mhz: 750.0,
            lambda_c_mhz: 750.0,
            omega_r_mhz: 750.0,
            delta_mhz: 4000.0,
            kappa_mhz: 3.5,
            gamma1_mhz: 2.6,
            gamma2_mhz: 2.6,
            coupling_divisor: 1.0,
            basis: TwoQubitBasis::Restricted,
            tau_ns: None,
            t_over_tau: DEFAULT_T_OVER_TAU,
            msa_f0: DEFAULT_MSA_F0,
            integrator: IntegratorSettings::default(),
            pulse_samples: 2001,
            time_multipliers: vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            decay_multipliers: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0],
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// MHz to rad/s.
    pub fn angular(&self, mhz: f64) -> f64 {
        if self.two_pi {
            mhz * crate::TWO_PI_MHZ
        } else {
            mhz * 1.0e6
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_max_mhz", self.omega_max_mhz),
            ("lambda_c_mhz", self.lambda_c_mhz),
            ("omega_r_mhz", self.omega_r_mhz),
            ("delta_mhz", self.delta_mhz),
            ("msa_f0", self.msa_f0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("kappa_mhz", self.kappa_mhz),
            ("gamma1_mhz", self.gamma1_mhz),
            ("gamma2_mhz", self.gamma2_mhz),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if let Some(tau) = self.tau_ns {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::config(format!("tau_ns must be positive, got {tau}")));
            }
        }
        if !(self.t_over_tau >= 2.0) {
            return Err(Error::config(format!(
                "t_over_tau must be at least 2, got {}",
                self.t_over_tau
            )));
        }
        if self.pulse_samples < 2 {
            return Err(Error::config("pulse_samples must be at least 2"));
        }
        if self.gate == GateName::Custom && (self.varphi.is_none() || self.gamma.is_none()) {
            return Err(Error::config("a custom gate needs both varphi and gamma"));
        }
        self.integrator_config().validate()?;
        self.raman().validate()
    }

    pub fn kind(&self) -> GateKind {
        match self.gate {
            GateName::Cp => GateKind::TwoQubitCp,
            _ => GateKind::SingleQubit,
        }
    }

    pub fn rates(&self) -> Rates {
        Rates {
            kappa: self.angular(self.kappa_mhz),
            gamma1: self.angular(self.gamma1_mhz),
            gamma2: self.angular(self.gamma2_mhz),
        }
    }

    pub fn raman(&self) -> RamanParams {
        RamanParams {
            lambda_c: self.angular(self.lambda_c_mhz),
            omega_r: self.angular(self.omega_r_mhz),
            delta: self.angular(self.delta_mhz),
            coupling_divisor: self.coupling_divisor,
        }
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            step: match self.integrator.dt_ns {
                Some(dt) => StepControl::Fixed(dt * 1.0e-9),
                None => StepControl::Auto,
            },
            samples: self.integrator.samples,
        }
    }

    /// The gate protocol described by this configuration.
    pub fn protocol(&self) -> Result<GateProtocol> {
        self.validate()?;
        let (varphi, gamma) = match self.gate {
            GateName::Not => (FRAC_PI_4, PI),
            GateName::Hadamard => (FRAC_PI_8, PI),
            GateName::Cp => (0.0, PI),
            GateName::Custom => (0.0, 0.0),
        };
        let base = match self.gate {
            GateName::Cp => GateProtocol::cp_gate(),
            _ => GateProtocol::single_qubit(varphi, gamma),
        };
        let mut p = base
            .with_varphi(self.varphi.unwrap_or(varphi))
            .with_gamma(self.gamma.unwrap_or(gamma))
            .with_mode(self.mode)
            .with_rates(self.rates());
        p.tau = self.tau_ns.map(|t| t * 1.0e-9);
        p.t_over_tau = self.t_over_tau;
        p.msa_f0 = self.msa_f0;
        p.omega_max = self.angular(self.omega_max_mhz);
        p.raman = self.raman();
        p.basis = self.basis;
        p.integrator = self.integrator_config();
        Ok(p)
    }
}
