use std::process::ExitCode;

/// Result of a command that ran to completion.
#[derive(Debug)]
pub enum Outcome {
    Pass,
    /// A check of the scenario failed.
    Fail(String),
    /// The scenario is flagged as a counterexample and the expected failure was observed.
    Counterexample(String),
}

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl Outcome {
    pub fn code(&self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail(_) => ExitCode::from(2),
            Outcome::Counterexample(_) => ExitCode::from(3),
        }
    }
}

impl Failure {
    pub fn code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(1),
            Failure::Solver(_) => ExitCode::from(2),
        }
    }
}

pub trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn solver(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn solver(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Solver(e.into()))
    }
}
