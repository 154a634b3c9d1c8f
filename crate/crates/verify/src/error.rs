use maxlip_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid config: {0}")]
    Core(#[from] CoreError),

    #[error("i/o error: {0}")]
    Io(String),
}

impl VerifyError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerifyError::Config(_) | VerifyError::Core(_) => 2,
            VerifyError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for VerifyError {
    fn from(e: std::io::Error) -> Self {
        VerifyError::Io(e.to_string())
    }
}
