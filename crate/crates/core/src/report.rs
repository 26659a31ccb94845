//! JSON records of finished solves.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::minimizer::SolveResult;
use crate::polar::{ModeClass, PolarGrid};

/// Everything about a solve except the fields themselves, which live in
/// separate dump files referenced by path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRecord {
    pub params: ProblemParams,
    pub mode: ModeClass,
    pub level: f64,
    pub residual: f64,
    pub nonradiality: f64,
    pub grad_norm: f64,
    /// `||v|| / ||u||`
    pub norm_ratio: f64,
    pub iters: usize,
    pub converged: bool,
    pub n_r: usize,
    pub n_theta: usize,
    pub rng_seed: u64,
    pub restarts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dump: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_dump: Option<String>,
}

impl SolveRecord {
    pub fn from_result(res: &SolveResult, restarts: usize) -> Self {
        let g = res.grid();
        Self {
            params: res.params,
            mode: res.mode,
            level: res.level,
            residual: res.residual,
            nonradiality: res.nonradiality,
            grad_norm: res.grad_norm,
            norm_ratio: res.norm_ratio(),
            iters: res.iters,
            converged: res.converged,
            n_r: g.n_r(),
            n_theta: g.n_theta(),
            rng_seed: res.rng_seed,
            restarts,
            u_dump: None,
            v_dump: None,
        }
    }

    pub fn grid(&self) -> Result<PolarGrid> {
        PolarGrid::new(self.n_r, self.n_theta)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialises")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse_solve_record(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        self.grid()?;
        self.mode.check_grid(&self.grid()?)?;
        let finite = [self.level, self.residual, self.nonradiality, self.grad_norm, self.norm_ratio];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("record holds a non-finite number".into()));
        }
        if !(self.level > 0.0) {
            return Err(Error::Config(format!("level must be positive, got {}", self.level)));
        }
        if self.residual < 0.0 || self.nonradiality < 0.0 || self.grad_norm < 0.0 || self.norm_ratio < 0.0 {
            return Err(Error::Config("residual, nonradiality and norms must be nonnegative".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parse and validate a record written by [`SolveRecord::save`].
pub fn parse_solve_record(text: &str) -> Result<SolveRecord> {
    let rec: SolveRecord = serde_json::from_str(text)?;
    rec.validate()?;
    Ok(rec)
}
