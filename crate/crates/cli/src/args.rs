use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use henon_modes::config::{parse_run_layer, RunLayer};
use henon_modes::polar::parse_mode_list;
use henon_modes::ModeClass;

use crate::exit::CliResult;

#[derive(Parser, Debug)]
#[command(name = "henon-modes", version, about = "Least-energy n-mode solutions of the Hénon system on the unit disk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimise the quotient in each requested symmetry class
    Solve(RunArgs),
    /// Compare computed levels with n_alpha, the radiality threshold and both bounds
    VerifyBounds(VerifyArgs),
    /// Run every (alpha, p, q, mode) combination listed in a sweep file
    Sweep(SweepArgs),
    /// Solve and write the minimising fields as CSV dumps
    DumpField(DumpArgs),
    /// Report radial or nonradial minimisers against the theory's predictions
    CheckSymmetry(RunArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Symmetry class: a positive integer or `inf`; repeatable, ranges like `1..4` allowed
    #[arg(long = "mode", value_name = "MODE")]
    pub modes: Vec<String>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    /// Gradient-norm tolerance relative to the level
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML run configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Relative margin for strict inequalities and bounds
    #[arg(long, default_value_t = henon_modes::verify::DEFAULT_SLACK)]
    pub slack: f64,
    /// Read solve records from this directory instead of solving
    #[arg(long)]
    pub from: Option<PathBuf>,
    /// Computed S_{0,p,q,1} to use with --from
    #[arg(long)]
    pub s_base: Option<f64>,
    /// Do not rerun on a doubled grid after marginal failures
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// TOML sweep file
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct DumpArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Write the rescaled solution of the PDE instead of the normalised minimiser
    #[arg(long)]
    pub reconstruct: bool,
}

impl RunArgs {
    pub fn mode_flags(&self) -> CliResult<Option<Vec<ModeClass>>> {
        if self.modes.is_empty() {
            return Ok(None);
        }
        let mut out = Vec::new();
        for m in &self.modes {
            out.extend(parse_mode_list(m)?);
        }
        Ok(Some(out))
    }

    /// The config file (if any) with every given flag laid over it.
    pub fn layer(&self) -> CliResult<RunLayer> {
        let mut l = match &self.config {
            Some(path) => parse_run_layer(&crate::exit::read_input(path)?)?,
            None => RunLayer::default(),
        };
        let pr = &mut l.problem;
        pr.alpha = self.alpha.or(pr.alpha);
        pr.p = self.p.or(pr.p);
        pr.q = self.q.or(pr.q);
        if let Some(m) = self.mode_flags()? {
            pr.modes = Some(henon_modes::config::ModeSpec::List(m));
        }
        l.grid.nr = self.nr.or(l.grid.nr);
        l.grid.ntheta = self.ntheta.or(l.grid.ntheta);
        l.solver.tol = self.tol.or(l.solver.tol);
        l.solver.restarts = self.restarts.or(l.solver.restarts);
        l.solver.seed = self.seed.or(l.solver.seed);
        l.output.dir = self.out.clone().or(l.output.dir);
        Ok(l)
    }
}
