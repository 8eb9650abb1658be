//! Library half of the `wirent` command-line tool: configuration handling,
//! sweep commands and the self-check suite.

pub mod commands;
pub mod config;
pub mod selfcheck;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] wirent_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("selfcheck failed")]
    SelfcheckFailed,
}

impl CliError {
    /// 1 for a failed self-check, 2 for anything the user supplied wrongly.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::SelfcheckFailed => 1,
            CliError::Config(_) | CliError::Core(_) | CliError::Io(_) => 2,
        }
    }
}
