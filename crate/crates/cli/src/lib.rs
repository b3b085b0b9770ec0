//! Command-line driver for the `anharm` library.

pub mod config;
pub mod run;

pub use config::{parse_config, Cli, Command, RunConfig};
pub use run::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] anharm::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Library(e) => library_code(e),
        }
    }
}

fn library_code(e: &anharm::Error) -> u8 {
    use anharm::Error::*;
    match e {
        InvalidModel(_) => 3,
        NoConvergence { .. } | RootNotBracketed { .. } => 4,
        NoCrossing { .. } | InsufficientData { .. } => 5,
        InvalidArgument(_) => 2,
        ScanFailed { source, .. } => library_code(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(anharm::Error::InvalidModel("x".into())).exit_code(), 3);
        let nested = anharm::Error::ScanFailed {
            p: 0.1,
            source: Box::new(anharm::Error::NoConvergence { index: 3, sweeps: 50 }),
        };
        assert_eq!(CliError::from(nested).exit_code(), 4);
        let none = anharm::Error::NoCrossing { lo: 0, hi: 1, from: 0.0, to: 1.0 };
        assert_eq!(CliError::from(none).exit_code(), 5);
    }
}
