use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain (bad site index, wrong dimension, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e}, allowed {allowed:e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("susceptibility matrix is singular (condition number {condition:e}) at beta_z={beta_z}, beta_d={beta_d}")]
    SingularSusceptibility {
        condition: f64,
        beta_z: f64,
        beta_d: f64,
    },

    #[error("step size underflow (h={step:e}) at t={t}, beta_z={beta_z}, beta_d={beta_d}")]
    StepUnderflow {
        step: f64,
        t: f64,
        beta_z: f64,
        beta_d: f64,
    },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by user input rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Domain(_) | Error::Io(_) | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
