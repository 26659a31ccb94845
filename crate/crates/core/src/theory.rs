//! Closed-form quantities: the symmetry-breaking count `n_alpha`, the
//! radiality threshold, the two bounds on the least levels, and the tiled
//! test function behind the n-mode upper bound.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::polar::{DiskField, PolarGrid};

/// Distance below which `eta` is treated as the integer it approximates.
const INTEGER_SNAP: f64 = 1e-12;

fn require_eta_domain(params: &ProblemParams) -> Result<()> {
    params.require_alpha_above_two()?;
    if !(params.total_power() > 2.0) {
        return Err(Error::Domain("requires p + q > 2".into()));
    }
    Ok(())
}

/// Natural log of
///
/// ```text
/// eta = ((a+2)/(2a))^(4/(p+q-2)) ((a-2)/a)^(2a/(p+q-2)) (1 + a/2)
/// ```
///
/// Both powered factors are below one for `a > 2`, so `eta <= 1 + a/2`
/// and only underflow (towards `p + q = 2`) can occur.
pub fn ln_eta(params: &ProblemParams) -> Result<f64> {
    require_eta_domain(params)?;
    let a = params.alpha;
    let e = params.total_power() - 2.0;
    Ok((4.0 / e) * ((a + 2.0) / (2.0 * a)).ln() + (2.0 * a / e) * ((a - 2.0) / a).ln() + (1.0 + a / 2.0).ln())
}

pub fn eta(params: &ProblemParams) -> Result<f64> {
    Ok(ln_eta(params)?.exp())
}

/// Greatest integer strictly below `eta`.
pub fn n_alpha_from_eta(eta: f64) -> u64 {
    if !(eta > 0.0) {
        return 0;
    }
    let k = eta.round();
    if (eta - k).abs() <= INTEGER_SNAP {
        return (k as u64).saturating_sub(1);
    }
    eta.floor() as u64
}

/// Number of modes for which nonradial least-energy n-mode solutions are
/// guaranteed.
pub fn n_alpha(params: &ProblemParams) -> Result<u64> {
    Ok(n_alpha_from_eta(eta(params)?))
}

/// `1 + ceil(alpha/2)`: n-mode solutions with `n` at or above it are radial.
pub fn radial_threshold(alpha: f64) -> u64 {
    1 + (alpha / 2.0).ceil() as u64
}

fn require_base(s_base: f64) -> Result<()> {
    if s_base > 0.0 && s_base.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("base level must be positive, got {s_base}")))
    }
}

/// `S_{0,p,q,1} ((alpha+2)/2)^(1 + 2/(p+q))`, a lower bound for the radial level.
pub fn radial_lower_bound(params: &ProblemParams, s_base: f64) -> Result<f64> {
    require_base(s_base)?;
    let s = params.total_power();
    Ok(s_base * ((params.alpha + 2.0) / 2.0).powf(1.0 + 2.0 / s))
}

/// `S_{0,p,q,1} n^(1-2/(p+q)) alpha^(4/(p+q)) (alpha/(alpha-2))^(2 alpha/(p+q))`,
/// an upper bound for the n-mode level.
pub fn mode_upper_bound(params: &ProblemParams, n: usize, s_base: f64) -> Result<f64> {
    params.require_alpha_above_two()?;
    require_base(s_base)?;
    if n == 0 {
        return Err(Error::Domain("mode must be positive".into()));
    }
    let a = params.alpha;
    let s = params.total_power();
    let ln = (1.0 - 2.0 / s) * (n as f64).ln() + (4.0 / s) * a.ln() + (2.0 * a / s) * (a / (a - 2.0)).ln();
    Ok(s_base * ln.exp())
}

/// Evaluated closed forms for one parameter triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub params: ProblemParams,
    /// `None` when `alpha <= 2` (not applicable).
    pub eta: Option<f64>,
    pub n_alpha: Option<u64>,
    pub radial_threshold: u64,
    pub s_base: f64,
    pub s_radial_lower: f64,
    /// Upper bound per mode; empty when `alpha <= 2`.
    pub s_mode_upper: BTreeMap<usize, f64>,
}

impl BoundsReport {
    /// Evaluate everything for modes `1..=max_mode` (at least `n_alpha`).
    pub fn new(params: &ProblemParams, s_base: f64, max_mode: usize) -> Result<Self> {
        let applicable = params.alpha > 2.0;
        let eta = if applicable { Some(eta(params)?) } else { None };
        let n_alpha = eta.map(n_alpha_from_eta);
        let top = max_mode.max(n_alpha.unwrap_or(0) as usize);
        let mut s_mode_upper = BTreeMap::new();
        if applicable {
            for n in 1..=top {
                s_mode_upper.insert(n, mode_upper_bound(params, n, s_base)?);
            }
        }
        Ok(Self {
            params: *params,
            eta,
            n_alpha,
            radial_threshold: radial_threshold(params.alpha),
            s_base,
            s_radial_lower: radial_lower_bound(params, s_base)?,
            s_mode_upper,
        })
    }
}

/// Radius of the default bump `exp(1 - 1/(1 - |y|^2))`.
pub const BUMP_RADIUS: f64 = 0.9;

/// Smooth bump supported in `r < 0.9`, equal to 1 at the centre.
pub fn default_bump(grid: PolarGrid) -> DiskField {
    DiskField::from_fn(grid, |r, _| bump_profile(r / BUMP_RADIUS))
}

pub(crate) fn bump_profile(y: f64) -> f64 {
    if y >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// Conservative support radius of `phi`: the first ring outside its last
/// nonzero ring.
fn support_radius(phi: &DiskField) -> Option<f64> {
    let g = phi.grid();
    let last = (0..g.n_r()).rev().find(|&i| phi.ring(i).iter().any(|&v| v != 0.0))?;
    Some(if last + 1 < g.n_r() { g.radius(last + 1) } else { 1.0 })
}

/// Smallest `alpha` for which `phi_alpha` fits in the sector `|theta| < pi/n`
/// (the whole disk for `n = 1`), given the support radius of `phi`.
pub fn minimal_tiling_alpha(support: f64, n: usize) -> f64 {
    if n == 1 {
        (1.0 + support) / 2.0
    } else {
        1.0 + support / (PI / n as f64).sin()
    }
}

/// `phi_tilde = sum_l phi_alpha(P_n^l x)` with
/// `phi_alpha(x1, x2) = phi(alpha (x1 - (1 - 1/alpha)), alpha x2)`.
///
/// `phi_alpha` is a copy of `phi` shrunk by `alpha` and pushed against the
/// boundary point `(1, 0)`; the `n` rotated copies have disjoint supports.
pub fn build_tiled_test_function(phi: &DiskField, alpha: f64, n: usize) -> Result<DiskField> {
    let g = *phi.grid();
    if n == 0 {
        return Err(Error::Domain("mode must be positive".into()));
    }
    g.check_mode_divides(n)?;
    let support = support_radius(phi).ok_or_else(|| Error::Construction {
        reason: "phi vanishes identically".into(),
        min_alpha: f64::NAN,
    })?;
    let min_alpha = minimal_tiling_alpha(support, n);
    if support >= 1.0 || !(alpha > min_alpha) {
        return Err(Error::Construction {
            reason: format!("support of phi_alpha (radius {support}/alpha) leaves the sector |theta| < pi/{n}"),
            min_alpha,
        });
    }
    let centre = 1.0 - 1.0 / alpha;
    let shrunk = |x1: f64, x2: f64| -> f64 {
        let y1 = alpha * (x1 - centre);
        let y2 = alpha * x2;
        let ry = y1.hypot(y2);
        if ry >= support {
            0.0
        } else {
            phi.eval(ry, y2.atan2(y1))
        }
    };
    let nt = g.n_theta();
    let period = nt / n;
    let mut values = vec![0.0; g.len()];
    for i in 0..g.interior_rings() {
        let r = g.radius(i);
        for j in 0..period {
            let mut acc = 0.0;
            for l in 0..n {
                let t = g.theta(j) + 2.0 * PI * l as f64 / n as f64;
                acc += shrunk(r * t.cos(), r * t.sin());
            }
            for l in 0..n {
                values[i * nt + j + l * period] = acc;
            }
        }
    }
    DiskField::new(g, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(a: f64, p: f64, q: f64) -> ProblemParams {
        ProblemParams::new(a, p, q).unwrap()
    }

    #[test]
    fn eta_closed_form_values() {
        // direct evaluation of the product, independent of the log form
        let direct = |a: f64, p: f64, q: f64| {
            let e = p + q - 2.0;
            ((a + 2.0) / (2.0 * a)).powf(4.0 / e) * ((a - 2.0) / a).powf(2.0 * a / e) * (1.0 + a / 2.0)
        };
        for &(a, p, q) in &[(4.0, 10.0, 10.0), (4.0, 9.0, 9.0), (4.0, 50.0, 50.0), (6.0, 8.0, 8.0), (6.0, 2.0, 2.0)] {
            let e = eta(&pp(a, p, q)).unwrap();
            assert!((e - direct(a, p, q)).abs() < 1e-12 * e);
        }
        assert!((eta(&pp(4.0, 9.0, 9.0)).unwrap() - 1.974).abs() < 5e-4);
        assert!((eta(&pp(4.0, 10.0, 10.0)).unwrap() - 2.068).abs() < 5e-4);
        assert!((eta(&pp(4.0, 50.0, 50.0)).unwrap() - 2.802).abs() < 5e-4);
    }

    #[test]
    fn eta_domain() {
        assert!(matches!(eta(&pp(2.0, 2.0, 2.0)), Err(Error::Domain(_))));
        assert!(matches!(eta(&pp(1.5, 2.0, 2.0)), Err(Error::Domain(_))));
        // close to p + q = 2 the value underflows to zero instead of overflowing
        let tiny = eta(&pp(10.0, 1.0 + 1e-9, 1.0 + 1e-9)).unwrap();
        assert_eq!(tiny, 0.0);
        assert_eq!(n_alpha_from_eta(tiny), 0);
    }

    #[test]
    fn n_alpha_is_strict() {
        assert_eq!(n_alpha(&pp(4.0, 9.0, 9.0)).unwrap(), 1);
        assert_eq!(n_alpha(&pp(4.0, 10.0, 10.0)).unwrap(), 2);
        assert_eq!(n_alpha(&pp(4.0, 50.0, 50.0)).unwrap(), 2);
        assert_eq!(n_alpha(&pp(6.0, 2.0, 2.0)).unwrap(), 0);
        assert_eq!(n_alpha(&pp(6.0, 8.0, 8.0)).unwrap(), 2);
        assert_eq!(n_alpha_from_eta(3.0), 2);
        assert_eq!(n_alpha_from_eta(3.0 - 1e-13), 2);
        assert_eq!(n_alpha_from_eta(3.0 + 1e-13), 2);
        assert_eq!(n_alpha_from_eta(3.0 + 1e-9), 3);
        assert_eq!(n_alpha_from_eta(1.0), 0);
        assert_eq!(n_alpha_from_eta(0.3), 0);
    }

    #[test]
    fn thresholds() {
        assert_eq!(radial_threshold(4.0), 3);
        assert_eq!(radial_threshold(3.0), 3);
        assert_eq!(radial_threshold(6.0), 4);
        assert_eq!(radial_threshold(0.0), 1);
        assert_eq!(radial_threshold(0.1), 2);
    }

    #[test]
    fn bound_examples() {
        let s = 3.7;
        assert_eq!(radial_lower_bound(&pp(0.0, 2.0, 3.0), s).unwrap(), s);
        assert!((radial_lower_bound(&pp(6.0, 2.0, 2.0), s).unwrap() - 8.0 * s).abs() < 1e-12);
        assert!((mode_upper_bound(&pp(6.0, 2.0, 2.0), 1, s).unwrap() - 20.25 * s).abs() < 1e-12);
        let p = pp(7.0, 3.0, 5.0);
        let b1 = mode_upper_bound(&p, 1, s).unwrap();
        let b5 = mode_upper_bound(&p, 5, s).unwrap();
        assert!((b5 / b1 - 5f64.powf(1.0 - 2.0 / 8.0)).abs() < 1e-12);
        assert!(mode_upper_bound(&pp(2.0, 2.0, 2.0), 1, s).is_err());
        assert!(radial_lower_bound(&p, 0.0).is_err());
    }

    #[test]
    fn report_gates_small_alpha() {
        let r = BoundsReport::new(&pp(1.5, 2.0, 2.0), 1.0, 3).unwrap();
        assert!(r.eta.is_none() && r.n_alpha.is_none() && r.s_mode_upper.is_empty());
        let r = BoundsReport::new(&pp(6.0, 8.0, 8.0), 1.0, 1).unwrap();
        assert_eq!(r.n_alpha, Some(2));
        assert_eq!(r.s_mode_upper.len(), 2);
    }

    #[test]
    fn tiling_single_copy_and_errors() {
        let g = PolarGrid::new(64, 128).unwrap();
        let phi = default_bump(g);
        let t1 = build_tiled_test_function(&phi, 8.0, 1).unwrap();
        let c = 1.0 - 1.0 / 8.0;
        // centre of the copy carries the bump maximum
        assert!((t1.eval(c, 0.0) - 1.0).abs() < 2e-2);
        assert_eq!(t1.eval(0.3, 0.0), 0.0);
        match build_tiled_test_function(&phi, 2.0, 4) {
            Err(Error::Construction { min_alpha, .. }) => assert!(min_alpha > 2.0),
            other => panic!("expected construction error, got {other:?}"),
        }
        assert!(build_tiled_test_function(&DiskField::zeros(g), 8.0, 2).is_err());
        assert!(build_tiled_test_function(&phi, 8.0, 5).is_err());
    }
}
