//! Error-to-exit-code mapping. The codes are part of the CLI contract and
//! documented in `--help`.

use std::fmt;
use std::path::Path;
use stlshield::field::{EpochSolveError, ScheduleError, SolveError};
use stlshield::io::IoError;
use stlshield::sim::SimError;
use stlshield::stl::ParseError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Spec(ParseError),
    /// An input file was missing.
    MissingInput(String),
    Io(String),
    Schedule(ScheduleError),
    Solve(SolveError),
    Sim(SimError),
    Train(stlshield::policy::QTrainError),
}

impl CliError {
    pub fn input_file(path: &Path, err: std::io::Error) -> Self {
        if err.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingInput(path.display().to_string())
        } else {
            CliError::Io(format!("{}: {err}", path.display()))
        }
    }

    pub fn output(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Train(_) => 1,
            CliError::Spec(_) => 2,
            CliError::MissingInput(_) => 3,
            CliError::Solve(e) => solve_code(e),
            CliError::Schedule(e) => schedule_code(e),
            CliError::Sim(e) => match e {
                SimError::Schedule(s) => schedule_code(s),
                SimError::Solve(EpochSolveError { source, .. }) => solve_code(source),
                SimError::BadTiming { .. } | SimError::StartInCollision(_) => 7,
                SimError::Filter(_) => 1,
            },
        }
    }
}

fn schedule_code(e: &ScheduleError) -> i32 {
    match e {
        ScheduleError::NoGoalCell { .. } | ScheduleError::EmptyGoalIntersection { .. } => 5,
        ScheduleError::HorizonTooShort { .. } | ScheduleError::World(_) => 2,
    }
}

fn solve_code(e: &SolveError) -> i32 {
    match e {
        SolveError::NonConverged { .. } => 4,
        SolveError::NoGoalCell => 5,
        _ => 1,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Spec(e) => write!(f, "{e}"),
            CliError::MissingInput(path) => write!(f, "{path}: file not found"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Schedule(e) => write!(f, "{e}"),
            CliError::Solve(e) => write!(f, "{e}"),
            CliError::Sim(e) => write!(f, "{e}"),
            CliError::Train(e) => write!(f, "{e}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Spec(e)
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        CliError::Schedule(e)
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solve(e)
    }
}

impl From<EpochSolveError> for CliError {
    fn from(e: EpochSolveError) -> Self {
        CliError::Solve(e.source)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

impl From<stlshield::policy::QTrainError> for CliError {
    fn from(e: stlshield::policy::QTrainError) -> Self {
        CliError::Train(e)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_not_found() {
            return CliError::MissingInput(e.to_string());
        }
        match e {
            IoError::Spec(p) => CliError::Spec(p),
            IoError::Schedule(s) => CliError::Schedule(s),
            other => CliError::Io(other.to_string()),
        }
    }
}
