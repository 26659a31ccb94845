//! Least-energy pairs in a symmetry class.
//!
//! `S_{alpha,p,q,n}` is approximated by minimising the discrete quotient
//! over n-mode fields (or radial profiles for the radial class) with an
//! H¹-preconditioned quasi-Newton descent. Minimisers are then rescaled
//! into genuine solutions of the Hénon system and checked with an
//! independent residual.

mod flow;
mod residual;
mod space;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use residual::{check_monotone_radial, pde_residual, reconstruct_solution, reconstruction_scale, system_residual, unfolded_residual};

use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::polar::{angular_variation, DiskField, ModeClass, PolarGrid};
use flow::{descend, FlowSettings};
use space::{DiskSpace, RadialSpace};


#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Initial step of the line search, in units of the natural H¹ step.
    pub step: f64,
    /// Stopping threshold for the L² gradient norm, relative to the level.
    pub grad_tol: f64,
    /// Size of the angular seed that breaks radial symmetry.
    pub seed_mode_amplitude: f64,
    pub rng_seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            step: 1.0,
            grad_tol: 1e-8,
            seed_mode_amplitude: 0.5,
            rng_seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) || !(self.step > 0.0) || self.max_iters == 0 {
            return Err(Error::Config(
                "grad_tol and step must be positive and max_iters at least 1".into(),
            ));
        }
        if !self.seed_mode_amplitude.is_finite() {
            return Err(Error::Config("seed_mode_amplitude must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub params: ProblemParams,
    pub mode: ModeClass,
    /// Minimiser normalised to unit coupling integral.
    pub u: DiskField,
    pub v: DiskField,
    /// Quotient at the minimiser, the discrete `S_{alpha,p,q,n}`.
    pub level: f64,
    /// Residual of the rescaled solution in the Hénon system.
    pub residual: f64,
    pub nonradiality: f64,
    pub grad_norm: f64,
    pub iters: usize,
    pub converged: bool,
    /// Accepted levels, starting with the initial guess.
    pub level_log: Vec<f64>,
    pub rng_seed: u64,
}

impl SolveResult {
    pub fn grid(&self) -> &PolarGrid {
        self.u.grid()
    }

    /// `||v|| / ||u||`; equals `sqrt(q/p)` for proportional pairs.
    pub fn norm_ratio(&self) -> f64 {
        self.v.l2_norm() / self.u.l2_norm()
    }
}

fn bump_power(alpha: f64) -> i32 {
    ((alpha / 2.0).ceil() as i32).max(1)
}

fn initial_disk(grid: PolarGrid, params: &ProblemParams, n: usize, opts: &SolveOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let k = bump_power(params.alpha);
    let amp = opts.seed_mode_amplitude;
    let phases: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
    let weights: Vec<f64> = (0..3)
        .map(|l| if l == 0 { 1.0 } else { 0.5 * rng.gen::<f64>() / (l + 1) as f64 })
        .collect();
    let nf = n as f64;
    DiskField::from_fn(grid, |r, t| {
        let base = (1.0 - r * r) * r.powi(k);
        let wave: f64 = (0..3)
            .map(|l| weights[l] * (((l + 1) as f64) * nf * t + phases[l]).cos())
            .sum();
        base + amp * (1.0 - r * r) * wave
    })
    .into_values()
}

fn initial_radial(grid: PolarGrid, params: &ProblemParams, opts: &SolveOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let k = bump_power(params.alpha);
    let wobble = 0.2 * opts.seed_mode_amplitude * (rng.gen::<f64>() - 0.5);
    grid.radial_nodes()
        .iter()
        .map(|&r| (1.0 - r * r) * r.powi(k) * (1.0 + wobble * r))
        .collect()
}

fn settings(opts: &SolveOptions) -> FlowSettings {
    FlowSettings {
        max_iters: opts.max_iters,
        step: opts.step,
        grad_tol: opts.grad_tol,
    }
}

/// Minimise the quotient over the class `mode` on `grid`.
///
/// Non-convergence is reported through `converged = false`; a pair whose
/// coupling integral collapses is an error.
pub fn minimize_in_mode(params: &ProblemParams, mode: ModeClass, grid: PolarGrid, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    mode.check_grid(&grid)?;
    let n = match mode {
        ModeClass::Radial => return solve_radial(params, grid, opts),
        ModeClass::Mode(n) => n,
    };
    let space = DiskSpace::new(grid, params.alpha, n);
    let u0 = initial_disk(grid, params, n, opts);
    let u0 = crate::polar::project_mode(&DiskField::from_raw(grid, u0), mode)?.into_values();
    let ratio = (params.q / params.p).sqrt();
    let v0: Vec<f64> = u0.iter().map(|x| ratio * x).collect();
    let out = descend(&space, params, u0, v0, &settings(opts))?;
    let u = DiskField::from_raw(grid, out.u);
    let v = DiskField::from_raw(grid, out.v);
    let nonradiality = angular_variation(&u);
    finish(params, mode, u, v, nonradiality, out.level, out.grad_norm, out.iters, out.converged, out.levels, opts)
}

/// Radial minimiser, `S_{alpha,p,q,inf}`, computed on ring profiles.
pub fn solve_radial(params: &ProblemParams, grid: PolarGrid, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let space = RadialSpace::new(grid, params.alpha);
    let u0 = initial_radial(grid, params, opts);
    let ratio = (params.q / params.p).sqrt();
    let v0: Vec<f64> = u0.iter().map(|x| ratio * x).collect();
    let out = descend(&space, params, u0, v0, &settings(opts))?;
    let u = DiskField::from_radial(grid, &out.u);
    let v = DiskField::from_radial(grid, &out.v);
    finish(params, ModeClass::Radial, u, v, 0.0, out.level, out.grad_norm, out.iters, out.converged, out.levels, opts)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: &ProblemParams,
    mode: ModeClass,
    u: DiskField,
    v: DiskField,
    nonradiality: f64,
    level: f64,
    grad_norm: f64,
    iters: usize,
    converged: bool,
    level_log: Vec<f64>,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(Error::Solver(format!("invalid level {level}")));
    }
    let c = reconstruction_scale(level, params)?;
    let residual = pde_residual(&u.scaled(c), &v.scaled(c), params)?;
    Ok(SolveResult {
        params: *params,
        mode,
        u,
        v,
        level,
        residual,
        nonradiality,
        grad_norm,
        iters,
        converged,
        level_log,
        rng_seed: opts.rng_seed,
    })
}

/// Run `restarts` solves with seeds `rng_seed, rng_seed + 1, ...` and keep
/// the lowest level.
pub fn minimize_multistart(
    params: &ProblemParams,
    mode: ModeClass,
    grid: PolarGrid,
    opts: &SolveOptions,
    restarts: usize,
) -> Result<SolveResult> {
    if restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    let mut best: Option<SolveResult> = None;
    for k in 0..restarts {
        let o = SolveOptions {
            rng_seed: opts.rng_seed.wrapping_add(k as u64),
            ..*opts
        };
        let res = minimize_in_mode(params, mode, grid, &o)?;
        let better = match &best {
            None => true,
            Some(b) => (res.converged && !b.converged) || (res.converged == b.converged && res.level < b.level),
        };
        if better {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}
