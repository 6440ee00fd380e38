use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The amplitude series could not be certified within the configured caps.
    #[error(
        "amplitude truncation infeasible at g = {gain}: captured norm {achieved_norm:e} \
         after i_max = {i_max}, j_max = {j_max}"
    )]
    TruncationInfeasible {
        gain: f64,
        achieved_norm: f64,
        i_max: usize,
        j_max: usize,
    },

    #[error("amplitude table under-truncated: captured norm {captured_norm} (need > {required})")]
    UnderTruncated { captured_norm: f64, required: f64 },

    #[error("Fock cutoff n_max = {n_max} too small: leakage {leakage:e} exceeds {threshold:e}")]
    CutoffTooSmall {
        n_max: usize,
        leakage: f64,
        threshold: f64,
    },

    #[error("state cutoffs differ ({left} vs {right})")]
    CutoffMismatch { left: usize, right: usize },

    /// Detuning inside the near-resonance exclusion band.
    #[error("detuning {detuning_hz} Hz lies inside the resonance cutoff of {cutoff_hz} Hz")]
    ResonanceRegion { detuning_hz: f64, cutoff_hz: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is neither `Clone` nor `PartialEq`; keep the rendered message.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

pub(crate) fn ensure(cond: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason(),
        })
    }
}
