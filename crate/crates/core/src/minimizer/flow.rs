//! Projected, normalised descent with backtracking.
//!
//! Directions come from limited-memory BFGS whose initial inverse Hessian
//! is the H¹ preconditioner, so the first step (and every step after a
//! reset) is the plain H¹ gradient step. After each step the pair is
//! replaced by its absolute values (the quotient does not see signs) and
//! rescaled so the coupling integral is one. Steps are accepted on the
//! Armijo condition. Once the predicted decrease is too small for the
//! quotient to resolve, the level only has to stay within
//! [`ROUNDOFF_SLACK`] and the step is judged by the directional derivative
//! at the trial point instead (the approximate Wolfe window), bracketing
//! in both directions. On the level alone a full step can flip the ratio
//! u/v back and forth about its optimum forever.
//!
//! Plain gradient steps are not enough on coarse grids: a concentrated
//! minimiser feels a weak periodic potential from the angular grid and
//! slides along it at a rate set by the stiffest modes.

use std::collections::VecDeque;

use super::space::DescentSpace;
use crate::error::{Error, Result};
use crate::functionals::ProblemParams;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 16.0;
/// Relative level increase tolerated in the rounding regime.
const ROUNDOFF_SLACK: f64 = 64.0 * f64::EPSILON;
/// Predicted relative decrease under which the level is treated as noise.
const NOISE_FLOOR: f64 = 1e6 * f64::EPSILON;
const MEMORY: usize = 8;
/// Slope window used in the rounding regime.
const WOLFE_DELTA: f64 = 0.1;
const WOLFE_SIGMA: f64 = 0.9;
const MAX_TRIALS: usize = 60;

pub(crate) struct FlowOutcome {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub level: f64,
    pub grad_norm: f64,
    pub iters: usize,
    pub converged: bool,
    pub levels: Vec<f64>,
}

pub(crate) struct FlowSettings {
    pub max_iters: usize,
    pub step: f64,
    pub grad_tol: f64,
}

fn normalize<S: DescentSpace>(space: &S, u: &mut [f64], v: &mut [f64], params: &ProblemParams) -> Result<()> {
    let p = space.potential(u, v, params);
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::DegeneratePair(p));
    }
    let c = p.powf(-1.0 / params.total_power());
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x *= c);
    Ok(())
}

/// Curvature pairs for the two-loop recursion, stored as `(s, y, 1/(s.y))`.
struct Memory {
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

impl Memory {
    fn new() -> Self {
        Self {
            pairs: VecDeque::with_capacity(MEMORY),
        }
    }

    fn push(&mut self, s: Vec<f64>, y: Vec<f64>) {
        let sy = dot(&s, &y);
        if !(sy > 1e-12 * norm(&s) * norm(&y)) {
            return;
        }
        if self.pairs.len() == MEMORY {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
    }

    fn clear(&mut self) {
        self.pairs.clear();
    }

    /// `H g` for the raw derivative `g = (g_u, g_v)`.
    fn apply<S: DescentSpace>(&self, space: &S, g: &[f64]) -> Vec<f64> {
        let n = space.len();
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(x, yk)| *x -= a * yk);
            alphas.push(a);
        }
        let (qu, qv) = q.split_at_mut(n);
        space.precondition(qu);
        space.precondition(qv);
        if let Some((s, y, _)) = self.pairs.back() {
            let mut hy = y.clone();
            let (hu, hv) = hy.split_at_mut(n);
            space.precondition(hu);
            space.precondition(hv);
            let yhy = dot(y, &hy);
            if yhy > 0.0 {
                let gamma = dot(s, y) / yhy;
                q.iter_mut().for_each(|x| *x *= gamma);
            }
        }
        for ((s, y, rho), a) in self.pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(x, sk)| *x += (a - b) * sk);
        }
        q
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

enum Trial {
    Accept,
    Shorter,
    Longer,
}

/// One backtracking (or, in the rounding regime, bracketing) search along
/// `-dir` from `(u, v)`.
struct LineSearch<'a, S> {
    space: &'a S,
    params: &'a ProblemParams,
    u: &'a [f64],
    v: &'a [f64],
    dir: &'a [f64],
    level: f64,
    /// `<g, dir>`, minus the directional derivative at `t = 0`.
    slope: f64,
}

impl<S: DescentSpace> LineSearch<'_, S> {
    /// Fill `trial` and its raw derivative `tg` at step `t`.
    fn evaluate(&self, t: f64, trial: &mut [f64], tg: &mut [f64]) -> Result<(Trial, f64)> {
        let n = self.u.len();
        let (tu, tv) = trial.split_at_mut(n);
        for k in 0..n {
            tu[k] = (self.u[k] - t * self.dir[k]).abs();
            tv[k] = (self.v[k] - t * self.dir[n + k]).abs();
        }
        if normalize(self.space, tu, tv, self.params).is_err() {
            return Ok((Trial::Shorter, f64::NAN));
        }
        let (tgu, tgv) = tg.split_at_mut(n);
        let Ok(b) = self.space.derivative(tu, tv, self.params, tgu, tgv) else {
            return Ok((Trial::Shorter, f64::NAN));
        };
        if !b.quotient.is_finite() {
            return Err(Error::Solver("non-finite level".into()));
        }
        if t * self.slope > NOISE_FLOOR * self.level {
            let verdict = if b.quotient <= self.level - ARMIJO * t * self.slope {
                Trial::Accept
            } else {
                Trial::Shorter
            };
            return Ok((verdict, b.quotient));
        }
        // the level cannot resolve the decrease: judge by the slope
        let d = -dot(tg, self.dir);
        let verdict = if b.quotient > self.level * (1.0 + ROUNDOFF_SLACK) || d > (1.0 - 2.0 * WOLFE_DELTA) * self.slope {
            Trial::Shorter
        } else if d < -WOLFE_SIGMA * self.slope {
            Trial::Longer
        } else {
            Trial::Accept
        };
        Ok((verdict, b.quotient))
    }

    /// Accepted step length and level, with `trial` and `tg` holding the
    /// new point.
    fn run(&self, t0: f64, trial: &mut [f64], tg: &mut [f64]) -> Result<Option<(f64, f64)>> {
        let (mut lo, mut hi) = (0.0, f64::INFINITY);
        let mut t = t0;
        for _ in 0..MAX_TRIALS {
            if t < MIN_STEP {
                break;
            }
            match self.evaluate(t, trial, tg)? {
                (Trial::Accept, q) => return Ok(Some((t, q))),
                (Trial::Shorter, _) => hi = t,
                (Trial::Longer, _) => lo = t,
            }
            t = if hi.is_finite() {
                if lo > 0.0 {
                    0.5 * (lo + hi)
                } else {
                    0.5 * hi
                }
            } else if 2.0 * t <= MAX_STEP {
                2.0 * t
            } else {
                break;
            };
        }
        // a step that was too short is still a valid step
        if lo > 0.0 {
            let (_, q) = self.evaluate(lo, trial, tg)?;
            return Ok(Some((lo, q)));
        }
        Ok(None)
    }
}

pub(crate) fn descend<S: DescentSpace>(
    space: &S,
    params: &ProblemParams,
    mut u: Vec<f64>,
    mut v: Vec<f64>,
    cfg: &FlowSettings,
) -> Result<FlowOutcome> {
    let n = space.len();
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x = x.abs());
    normalize(space, &mut u, &mut v, params).map_err(|_| Error::Solver("initial pair has zero coupling".into()))?;

    let mut g = vec![0.0; 2 * n];
    let mut trial = vec![0.0; 2 * n];
    let mut tg = vec![0.0; 2 * n];
    let mut memory = Memory::new();
    let mut step = cfg.step;
    let mut levels = Vec::new();
    let mut iters = 0;
    let mut converged = false;

    let (gu, gv) = g.split_at_mut(n);
    let mut level = space.derivative(&u, &v, params, gu, gv)?.quotient;
    levels.push(level);
    let mut grad_norm = (space.l2_sq_of_derivative(gu) + space.l2_sq_of_derivative(gv)).sqrt();

    loop {
        if !grad_norm.is_finite() {
            return Err(Error::Solver("non-finite gradient".into()));
        }
        if grad_norm <= cfg.grad_tol * level {
            converged = true;
            break;
        }
        if iters >= cfg.max_iters {
            break;
        }

        let mut accepted = None;
        // a quasi-Newton direction first, then the plain H¹ step
        for attempt in 0..2 {
            if attempt == 1 {
                if memory.pairs.is_empty() {
                    break;
                }
                memory.clear();
            }
            let dir = memory.apply(space, &g);
            let slope = dot(&g, &dir);
            if !(slope > 0.0) {
                continue;
            }
            let t0 = if memory.pairs.is_empty() { step } else { 1.0 };
            let search = LineSearch {
                space,
                params,
                u: &u,
                v: &v,
                dir: &dir,
                level,
                slope,
            };
            accepted = search.run(t0, &mut trial, &mut tg)?;
            if accepted.is_some() {
                break;
            }
        }
        let Some((t, new_level)) = accepted else {
            break;
        };
        let (tgu, tgv) = tg.split_at(n);
        let new_norm = (space.l2_sq_of_derivative(tgu) + space.l2_sq_of_derivative(tgv)).sqrt();
        let s: Vec<f64> = trial.iter().zip(u.iter().chain(&v)).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = tg.iter().zip(&g).map(|(a, b)| a - b).collect();
        memory.push(s, y);
        u.copy_from_slice(&trial[..n]);
        v.copy_from_slice(&trial[n..]);
        std::mem::swap(&mut g, &mut tg);
        level = new_level;
        grad_norm = new_norm;
        levels.push(level);
        iters += 1;
        if memory.pairs.is_empty() {
            step = (2.0 * t).min(MAX_STEP);
        }
    }

    Ok(FlowOutcome {
        u,
        v,
        level,
        grad_norm,
        iters,
        converged,
        levels,
    })
}
