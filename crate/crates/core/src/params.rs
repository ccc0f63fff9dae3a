use crate::error::{Error, Result};

/// Physical constants of the driven qubit.
///
/// `omega` is the transition frequency, `kappa` the coupling to the coherent
/// control and `gamma` the decoherence rate. Everything downstream of the
/// Bloch equations depends only on the ratio `gamma / omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega: f64,
    kappa: f64,
    gamma: f64,
    ratio: f64,
}

impl SystemParams {
    pub fn new(omega: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be > 0, got {kappa}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        Ok(Self {
            omega,
            kappa,
            gamma,
            ratio: gamma / omega,
        })
    }

    /// Scaled units: omega = 1, kappa = 1/2 (so 2 kappa = 1), gamma = ratio.
    pub fn scaled(gamma_ratio: f64) -> Result<Self> {
        Self::new(1.0, 0.5, gamma_ratio)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// gamma / omega.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}
