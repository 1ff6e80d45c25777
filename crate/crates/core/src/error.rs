use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} is outside the profile domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },

    #[error("two-sided derivative requested at declared breakpoint t = {t}; ask for the left or right limit")]
    AmbiguousAtBreakpoint { t: f64 },

    #[error("invalid frequency profile: {0}")]
    InvalidProfile(String),

    #[error("profile is not admissible: {0}")]
    NotAdmissible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow (h = {h:e}) at t = {t}; the system is stiff or singular there")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {max_steps} steps at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("degenerate mode: the Wronskian C(t0) vanishes for the given initial amplitude data")]
    DegenerateMode,

    #[error("caustic at t = {t} (|u| = {u:e}, nearest zero of u at t = {nearest})")]
    Caustic { t: f64, u: f64, nearest: f64 },

    #[error("wavefunction grids differ")]
    GridMismatch,

    #[error("wavefunction amplitude {amplitude:e} at the grid edge exceeds {limit:e}")]
    EdgeAmplitude { amplitude: f64, limit: f64 },
}

impl Error {
    /// True for failures of the numerics (caustics, stiffness) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::Caustic { .. }
                | Error::DegenerateMode
                | Error::EdgeAmplitude { .. }
        )
    }

    /// The time at which a numerical failure happened, when there is one.
    pub fn failure_time(&self) -> Option<f64> {
        match *self {
            Error::StepSizeUnderflow { t, .. } | Error::TooManySteps { t, .. } => Some(t),
            Error::Caustic { nearest, .. } => Some(nearest),
            Error::OutOfDomain { t, .. } | Error::AmbiguousAtBreakpoint { t } => Some(t),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
