use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence failure: {message}")]
    Convergence { message: String, trace: Vec<f64> },
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("step error: {0}")]
    Step(String),
    #[error("riccati blow-up: {0}")]
    Blowup(String),
    #[error("statistical error: {0}")]
    Statistical(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn convergence(message: impl Into<String>, trace: Vec<f64>) -> Self {
        LabError::Convergence {
            message: message.into(),
            trace,
        }
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Json(_) => 2,
            LabError::Convergence { .. } | LabError::Blowup(_) | LabError::Statistical(_) => 3,
            LabError::Domain(_) | LabError::Mesh(_) | LabError::Step(_) => 4,
            LabError::Resource(_) => 5,
            LabError::Io(_) => 1,
        }
    }
}
