//! TOML run and sweep configuration.
//!
//! Files are read into all-optional "layer" structs so that command-line
//! flags can be laid over them before the result is resolved and checked.
//!
//! ```toml
//! [problem]
//! alpha = 6.0
//! p = 2.0
//! q = 2.0
//! modes = "1..3,inf"
//!
//! [grid]
//! nr = 96
//! ntheta = 192
//!
//! [solver]
//! tol = 1e-8
//! restarts = 3
//! seed = 0
//!
//! [output]
//! dir = "runs/a6"
//! ```

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::minimizer::SolveOptions;
use crate::polar::{parse_mode_list, ModeClass, PolarGrid};

/// Smallest `p + q` accepted in sweeps; the exponents in `eta` blow up as
/// `p + q` approaches 2.
pub const SWEEP_MIN_TOTAL_POWER: f64 = 2.5;
/// Cap on the number of solves a sweep may request.
pub const SWEEP_MAX_ROWS: usize = 100_000;

/// Modes given either as a list (`[1, 2, "inf"]`) or as text (`"1..3,inf"`).
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    List(Vec<ModeClass>),
    Text(String),
}

impl ModeSpec {
    pub fn resolve(&self) -> Result<Vec<ModeClass>> {
        match self {
            ModeSpec::List(v) => Ok(v.clone()),
            ModeSpec::Text(s) => parse_mode_list(s),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemLayer {
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub modes: Option<ModeSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridLayer {
    pub nr: Option<usize>,
    pub ntheta: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverLayer {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub step: Option<f64>,
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputLayer {
    pub dir: Option<PathBuf>,
}

/// A run configuration as read from a file, before flags are applied.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunLayer {
    #[serde(default)]
    pub problem: ProblemLayer,
    #[serde(default)]
    pub grid: GridLayer,
    #[serde(default)]
    pub solver: SolverLayer,
    #[serde(default)]
    pub output: OutputLayer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub modes: Vec<ModeClass>,
    pub grid: PolarGrid,
    pub options: SolveOptions,
    pub restarts: usize,
    pub out_dir: Option<PathBuf>,
}

pub const DEFAULT_NR: usize = 96;
pub const DEFAULT_NTHETA: usize = 192;

fn toml_error(e: toml::de::Error) -> Error {
    Error::Config(e.message().to_string())
}

pub fn parse_run_layer(text: &str) -> Result<RunLayer> {
    toml::from_str(text).map_err(toml_error)
}

fn resolve_grid(g: &GridLayer) -> Result<PolarGrid> {
    PolarGrid::new(g.nr.unwrap_or(DEFAULT_NR), g.ntheta.unwrap_or(DEFAULT_NTHETA))
}

fn resolve_solver(s: &SolverLayer) -> Result<(SolveOptions, usize)> {
    let d = SolveOptions::default();
    let options = SolveOptions {
        max_iters: s.max_iters.unwrap_or(d.max_iters),
        step: s.step.unwrap_or(d.step),
        grad_tol: s.tol.unwrap_or(d.grad_tol),
        seed_mode_amplitude: s.amplitude.unwrap_or(d.seed_mode_amplitude),
        rng_seed: s.seed.unwrap_or(d.rng_seed),
    };
    options.validate()?;
    let restarts = s.restarts.unwrap_or(1);
    if restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    Ok((options, restarts))
}

fn check_modes(modes: &[ModeClass], grid: &PolarGrid) -> Result<()> {
    modes.iter().try_for_each(|m| m.check_grid(grid))
}

impl RunLayer {
    /// Resolve into a checked configuration. `default_modes` applies when
    /// neither file nor flags name any.
    pub fn resolve(&self, default_modes: &[ModeClass]) -> Result<RunConfig> {
        let pr = &self.problem;
        let missing = |name: &str| Error::Config(format!("missing required parameter `{name}`"));
        let params = ProblemParams::new(
            pr.alpha.ok_or_else(|| missing("alpha"))?,
            pr.p.ok_or_else(|| missing("p"))?,
            pr.q.ok_or_else(|| missing("q"))?,
        )?;
        let modes = match &pr.modes {
            Some(m) => m.resolve()?,
            None => default_modes.to_vec(),
        };
        let grid = resolve_grid(&self.grid)?;
        check_modes(&modes, &grid)?;
        let (options, restarts) = resolve_solver(&self.solver)?;
        Ok(RunConfig {
            params,
            modes,
            grid,
            options,
            restarts,
            out_dir: self.output.dir.clone(),
        })
    }
}

/// Parse and fully resolve a run configuration file.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    parse_run_layer(text)?.resolve(&[])
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    /// `(p, q)` pairs.
    pub pairs: Vec<(f64, f64)>,
    pub modes: ModeSpec,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    sweep: SweepSection,
    #[serde(default)]
    grid: GridLayer,
    #[serde(default)]
    solver: SolverLayer,
    #[serde(default)]
    output: OutputLayer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub params: Vec<ProblemParams>,
    pub modes: Vec<ModeClass>,
    pub grid: PolarGrid,
    pub options: SolveOptions,
    pub restarts: usize,
    pub out_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn rows(&self) -> usize {
        self.params.len() * self.modes.len()
    }
}

/// Parse a sweep file:
///
/// ```toml
/// [sweep]
/// alphas = [4.0, 8.0, 16.0]
/// pairs = [[2.0, 2.0]]
/// modes = "1..6"
///
/// [grid]
/// nr = 96
/// ntheta = 240
/// ```
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let f: SweepFile = toml::from_str(text).map_err(toml_error)?;
    if f.sweep.alphas.is_empty() || f.sweep.pairs.is_empty() {
        return Err(Error::Config("sweep needs at least one alpha and one (p, q) pair".into()));
    }
    let mut params = Vec::new();
    for &a in &f.sweep.alphas {
        for &(p, q) in &f.sweep.pairs {
            let pp = ProblemParams::new(a, p, q)?;
            if pp.total_power() < SWEEP_MIN_TOTAL_POWER {
                return Err(Error::Config(format!(
                    "sweeps require p + q >= {SWEEP_MIN_TOTAL_POWER}, got p = {p}, q = {q}"
                )));
            }
            if params.contains(&pp) {
                return Err(Error::Config(format!("sweep lists alpha = {a}, p = {p}, q = {q} twice")));
            }
            params.push(pp);
        }
    }
    let modes = f.sweep.modes.resolve()?;
    if modes.is_empty() {
        return Err(Error::Config("sweep lists no modes".into()));
    }
    if let Some(m) = modes.iter().enumerate().find_map(|(i, m)| modes[..i].contains(m).then_some(m)) {
        return Err(Error::Config(format!("sweep lists mode {m} twice")));
    }
    let grid = resolve_grid(&f.grid)?;
    check_modes(&modes, &grid)?;
    let (options, restarts) = resolve_solver(&f.solver)?;
    let cfg = SweepConfig {
        params,
        modes,
        grid,
        options,
        restarts,
        out_dir: f.output.dir,
    };
    if cfg.rows() > SWEEP_MAX_ROWS {
        return Err(Error::Config(format!("sweep has {} rows, limit is {SWEEP_MAX_ROWS}", cfg.rows())));
    }
    Ok(cfg)
}
