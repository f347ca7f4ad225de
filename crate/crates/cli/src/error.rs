//! Run errors and their exit codes.

use haarwalk::aperiodicity::AperiodicityError;
use haarwalk::counterexample::CounterexampleError;
use haarwalk::partition::PartitionError;
use haarwalk::walk::WalkError;
use haarwalk::{GroupError, MeasureError, WassersteinError};
use thiserror::Error;

/// Exit codes shared by every command.
pub mod exit {
    pub const OK: i32 = 0;
    /// A hypothesis fails: not aperiodic, a check did not hold.
    pub const HYPOTHESIS: i32 = 1;
    /// Strict aperiodicity could not be decided.
    pub const UNDECIDED: i32 = 2;
    /// Invalid flags, config or schema violation.
    pub const USAGE: i32 = 64;
    /// A resolution limit or cap was reached.
    pub const RESOLUTION: i32 = 65;
    /// Reading the config or writing outputs failed.
    pub const IO: i32 = 74;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Undecided(String),
    #[error("{0}")]
    Resolution(String),
    #[error("io: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => exit::USAGE,
            RunError::Hypothesis(_) => exit::HYPOTHESIS,
            RunError::Undecided(_) => exit::UNDECIDED,
            RunError::Resolution(_) => exit::RESOLUTION,
            RunError::Io(_) => exit::IO,
        }
    }

    /// Prefix the message with where in the config it arose.
    pub fn context(self, at: &str) -> Self {
        match self {
            RunError::Config(m) => RunError::Config(format!("{at}: {m}")),
            e => e,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<GroupError> for RunError {
    fn from(e: GroupError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<MeasureError> for RunError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::AtomCap { .. } => RunError::Resolution(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<WassersteinError> for RunError {
    fn from(e: WassersteinError) -> Self {
        match e {
            WassersteinError::Measure(m) => m.into(),
            WassersteinError::AtomCap { .. } => RunError::Resolution(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<WalkError> for RunError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Measure(m) => m.into(),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<AperiodicityError> for RunError {
    fn from(e: AperiodicityError) -> Self {
        match e {
            AperiodicityError::Measure(m) => m.into(),
            AperiodicityError::NotAperiodic(_) => RunError::Hypothesis(e.to_string()),
            AperiodicityError::Undecided(_) => RunError::Undecided(e.to_string()),
            AperiodicityError::CapExceeded(_) | AperiodicityError::GridTooFine(_) => RunError::Resolution(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<PartitionError> for RunError {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Measure(m) => m.into(),
            PartitionError::Wasserstein(w) => w.into(),
            PartitionError::Aperiodicity(a) => a.into(),
            PartitionError::TooFine { .. }
            | PartitionError::ScheduleTooShort { .. }
            | PartitionError::RoundsCap { .. } => RunError::Resolution(e.to_string()),
            PartitionError::NonAperiodic { .. }
            | PartitionError::DeltaStaysZero { .. }
            | PartitionError::Verification { .. }
            | PartitionError::WideMassViolated { .. }
            | PartitionError::DeltaTooLarge { .. } => RunError::Hypothesis(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<CounterexampleError> for RunError {
    fn from(e: CounterexampleError) -> Self {
        match e {
            CounterexampleError::Measure(m) => m.into(),
            CounterexampleError::Wasserstein(w) => w.into(),
            CounterexampleError::NotSingleAtom(..) => RunError::Hypothesis(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_follow_the_error_class() {
        assert_eq!(RunError::from(MeasureError::AtomCap { cap: 3 }).exit_code(), 65);
        assert_eq!(RunError::from(MeasureError::Empty).exit_code(), 64);
        assert_eq!(RunError::from(PartitionError::NonAperiodic { order: 2, index: 2 }).exit_code(), 1);
        assert_eq!(RunError::from(PartitionError::RoundsCap { delta: 1e-9, rounds: 10, cap: 1 }).exit_code(), 65);
        assert_eq!(RunError::from(AperiodicityError::Undecided("x".into())).exit_code(), 2);
        assert_eq!(RunError::from(std::io::Error::other("disk")).exit_code(), 74);
    }

    #[test]
    fn messages_name_their_module() {
        let e = RunError::from(PartitionError::NonAperiodic { order: 2, index: 2 });
        assert!(e.to_string().starts_with("certificate:"));
        assert!(RunError::from(MeasureError::AtomCap { cap: 3 }).to_string().starts_with("measures:"));
        assert!(RunError::Config("x".into()).context("family[0]").to_string().starts_with("config: family[0]"));
    }
}
