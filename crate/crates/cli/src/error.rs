use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] energy_simo::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Robust design with an empty feasible set; the record is already written.
    #[error("robust design is infeasible")]
    Infeasible,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible => 2,
            _ => 1,
        }
    }
}
