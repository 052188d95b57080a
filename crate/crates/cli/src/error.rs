use std::fmt;
use std::path::Path;

use lizkit::solver::SolverError;

/// Machine-readable failure: one JSON line on stderr.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("UsageError", message)
    }

    pub fn not_found(path: &Path) -> Self {
        Self::new("InputNotFound", format!("{} does not exist", path.display()))
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::new("IoError", format!("{}: {e}", path.display()))
    }

    /// Every error is an input or usage error except a failed computation.
    pub fn exit_code(&self) -> u8 {
        match self.kind {
            "NotConverged" => 2,
            _ => 1,
        }
    }

    pub fn report(&self) {
        let line = serde_json::json!({ "error": self.kind, "message": self.message });
        eprintln!("{line}");
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let kind = match &e {
            SolverError::SchemaMismatch(_) => "SchemaMismatch",
            SolverError::DuplicateLocations(..) => "DuplicateLocations",
            SolverError::InfeasibleInterpolation { .. } => "NotConverged",
            SolverError::InvalidProblem(_) | SolverError::DuplicateAtoms(..) => "InvalidInput",
            SolverError::Kernel(_) | SolverError::Fourier(_) | SolverError::Radon(_) => "InvalidInput",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<lizkit::verify::VerifyError> for CliError {
    fn from(e: lizkit::verify::VerifyError) -> Self {
        use lizkit::verify::VerifyError;
        let kind = match e {
            VerifyError::UnknownGroup(_) | VerifyError::InvalidScale(_) => "UsageError",
            _ => "InvalidInput",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<lizkit::radon::RadonError> for CliError {
    fn from(e: lizkit::radon::RadonError) -> Self {
        Self::new("InvalidInput", e.to_string())
    }
}

impl From<lizkit::kernels::KernelError> for CliError {
    fn from(e: lizkit::kernels::KernelError) -> Self {
        Self::new("InvalidInput", e.to_string())
    }
}
