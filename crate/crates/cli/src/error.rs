use rydswap_core::ErrorCategory;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Core(#[from] rydswap_core::Error),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    /// Machine-readable category printed with every failure.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Core(e) => match e.category() {
                ErrorCategory::PhysicsDomain => "physics-domain",
                ErrorCategory::Numerical => "numerical",
            },
            CliError::Io(_) => "io",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "schema" => 2,
            "physics-domain" => 3,
            "numerical" => 4,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
