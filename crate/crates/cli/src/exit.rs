//! Exit codes: 0 success, 1 non-convergence or a failed check, 2 bad
//! configuration or input, 3 solver failure.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const CONFIG: u8 = 2;
pub const SOLVER: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub err: anyhow::Error,
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        Self {
            code: CONFIG,
            err: anyhow::anyhow!("{msg}"),
        }
    }
}

impl From<henon_modes::Error> for CliError {
    fn from(e: henon_modes::Error) -> Self {
        use henon_modes::Error as E;
        let code = match e {
            E::Solver(_) | E::DegeneratePair(_) | E::Construction { .. } => SOLVER,
            _ => CONFIG,
        };
        Self { code, err: e.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: CONFIG,
            err: e.into(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::config(format!("output directory {} is not writable: {e}", path.display())))
}

pub fn finish(r: CliResult<u8>) -> ExitCode {
    match r {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e.err);
            ExitCode::from(e.code)
        }
    }
}
