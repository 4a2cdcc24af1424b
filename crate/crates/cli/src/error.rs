use std::fmt;

/// Failures of a run. Each maps to exit code 2 and one diagnostic line
/// `error: <kind>: <message>`.
#[derive(Debug)]
pub enum CliError {
    Config(Vec<String>),
    UnknownExperiment(String),
    Solver(String),
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::UnknownExperiment(_) => "unknown-experiment",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
        }
    }

    /// Sorts validation failures into a single error, treating an unknown
    /// name on its own as its own kind.
    pub fn from_violations(errs: Vec<String>) -> Self {
        match errs.as_slice() {
            [one] if one.starts_with("unknown experiment") => CliError::UnknownExperiment(one.clone()),
            _ => CliError::Config(errs),
        }
    }

    pub fn solver(e: impl fmt::Display) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::Config(errs) => errs.join("; "),
            CliError::UnknownExperiment(m) | CliError::Solver(m) | CliError::Io(m) => m.clone(),
        };
        // Keep the diagnostic on one line.
        write!(f, "{}: {}", self.kind(), msg.replace('\n', " "))
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
