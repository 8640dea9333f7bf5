//! State-description language, program runner and report renderer behind the
//! `densig` binary.

pub mod demos;
pub mod dsl;
pub mod report;
pub mod run;

use thiserror::Error;

pub use dsl::{parse_state_spec, DslError, Span, StateProgram};
pub use report::render_report;
pub use run::{run, Report, RunError, RunOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("{0}")]
    Run(#[from] RunError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 1 for syntax, name and I/O problems, 2 for invalid states or
    /// dimensions, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Dsl(DslError::Parse { .. } | DslError::Name { .. }) | CliError::Io(_) => 1,
            CliError::Dsl(DslError::Dims { .. }) => 2,
            CliError::Run(e) => match e.source {
                densig_core::Error::Numerical(_) => 3,
                _ => 2,
            },
        }
    }
}

/// Parses, runs and renders a program.
pub fn analyze_source(text: &str, opts: &RunOptions) -> Result<String, CliError> {
    let program = parse_state_spec(text)?;
    let report = run(&program, opts)?;
    Ok(render_report(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        let opts = RunOptions::default();
        assert_eq!(analyze_source("bogus", &opts).unwrap_err().exit_code(), 1);
        assert_eq!(
            analyze_source("analyze R", &opts).unwrap_err().exit_code(),
            1
        );
        assert_eq!(
            analyze_source("dims 3 3\nrho R = bell\nanalyze R", &opts)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            analyze_source("rho R = bell\nteleport R with 1 1", &opts)
                .unwrap_err()
                .exit_code(),
            2
        );
        let tiny = RunOptions {
            rank_tol: -1.0,
            ..RunOptions::default()
        };
        assert_eq!(
            analyze_source("rho R = bell\nanalyze R", &tiny)
                .unwrap_err()
                .exit_code(),
            3
        );
    }
}
