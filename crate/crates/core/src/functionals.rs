//! Discrete Dirichlet energy, weighted coupling integral and the Rayleigh
//! quotient
//!
//! ```text
//! R(u, v) = (int |grad u|^2 + |grad v|^2) / (int |x|^alpha |u|^p |v|^q)^(2/(p+q))
//! ```
//!
//! Quadrature is the midpoint rule in `r` (weight `r dr`) and the trapezoid
//! rule in `theta`. The gradient is the exact derivative of the discrete
//! quotient, represented in the discrete L² inner product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::{DiskField, PolarGrid};
use crate::stencil::{signed_pow, Stencil};

/// Exponents of the Hénon system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ProblemParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    p: f64,
    q: f64,
}

impl TryFrom<RawParams> for ProblemParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ProblemParams::new(r.alpha, r.p, r.q)
    }
}

impl ProblemParams {
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !(p.is_finite() && p > 1.0) || !(q.is_finite() && q > 1.0) {
            return Err(Error::Config(format!("p and q must be finite and > 1, got p={p}, q={q}")));
        }
        Ok(Self { alpha, p, q })
    }

    /// `p + q`.
    #[inline]
    pub fn total_power(&self) -> f64 {
        self.p + self.q
    }

    pub fn require_alpha_above_two(&self) -> Result<()> {
        if self.alpha > 2.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("requires alpha > 2, got {}", self.alpha)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientBreakdown {
    pub dirichlet_u: f64,
    pub dirichlet_v: f64,
    pub potential: f64,
    pub quotient: f64,
}

fn same_grid(u: &DiskField, v: &DiskField) -> Result<PolarGrid> {
    if u.grid() != v.grid() {
        return Err(Error::Config("fields live on different grids".into()));
    }
    Ok(*u.grid())
}

/// `int_D |grad u|^2`.
pub fn dirichlet_energy(u: &DiskField) -> f64 {
    Stencil::new(*u.grid(), 0.0).energy(u.values())
}

/// `int_D |x|^alpha |u|^p |v|^q`.
pub fn potential_integral(u: &DiskField, v: &DiskField, params: &ProblemParams) -> Result<f64> {
    let g = same_grid(u, v)?;
    Ok(Stencil::new(g, params.alpha).potential(u.values(), v.values(), params.p, params.q))
}

pub fn rayleigh_quotient(u: &DiskField, v: &DiskField, params: &ProblemParams) -> Result<QuotientBreakdown> {
    let g = same_grid(u, v)?;
    let st = Stencil::new(g, params.alpha);
    breakdown(&st, u.values(), v.values(), params)
}

pub(crate) fn breakdown(st: &Stencil, u: &[f64], v: &[f64], params: &ProblemParams) -> Result<QuotientBreakdown> {
    let dirichlet_u = st.energy(u);
    let dirichlet_v = st.energy(v);
    let potential = st.potential(u, v, params.p, params.q);
    if !(potential > 0.0) || !potential.is_finite() {
        return Err(Error::DegeneratePair(potential));
    }
    Ok(QuotientBreakdown {
        dirichlet_u,
        dirichlet_v,
        potential,
        quotient: (dirichlet_u + dirichlet_v) / potential.powf(2.0 / params.total_power()),
    })
}

/// Raw partial derivatives `dR/du_k`, `dR/dv_k` of the discrete quotient
/// (not yet divided by node areas). Returns the breakdown at `(u, v)`.
pub(crate) fn quotient_derivative(
    st: &Stencil,
    u: &[f64],
    v: &[f64],
    params: &ProblemParams,
    du: &mut [f64],
    dv: &mut [f64],
) -> Result<QuotientBreakdown> {
    let b = breakdown(st, u, v, params)?;
    let s = params.total_power();
    let denom = b.potential.powf(2.0 / s);
    let energy = b.dirichlet_u + b.dirichlet_v;
    // dR = 2 K u / P^(2/s) - (2/s) E P^(-2/s - 1) dP
    let c_pot = (2.0 / s) * energy / (b.potential * denom);
    st.apply(u, du);
    st.apply(v, dv);
    let nt = st.grid.n_theta();
    let (p, q) = (params.p, params.q);
    for (i, w) in st.weighted_area.iter().enumerate() {
        for k in i * nt..(i + 1) * nt {
            let (a, c) = (u[k], v[k]);
            let dpu = w * p * signed_pow(a, p - 1.0) * crate::stencil::pow_abs(c, q);
            let dpv = w * q * crate::stencil::pow_abs(a, p) * signed_pow(c, q - 1.0);
            du[k] = 2.0 * du[k] / denom - c_pot * dpu;
            dv[k] = 2.0 * dv[k] / denom - c_pot * dpv;
        }
    }
    Ok(b)
}

/// L² gradient of `R` at `(u, v)`: the fields `g_u, g_v` with
/// `dR[du, dv] = <g_u, du> + <g_v, dv>` in the discrete L² inner product.
pub fn quotient_gradient(u: &DiskField, v: &DiskField, params: &ProblemParams) -> Result<(DiskField, DiskField)> {
    let g = same_grid(u, v)?;
    let st = Stencil::new(g, params.alpha);
    let mut du = vec![0.0; g.len()];
    let mut dv = vec![0.0; g.len()];
    quotient_derivative(&st, u.values(), v.values(), params, &mut du, &mut dv)?;
    to_l2(&st, &mut du);
    to_l2(&st, &mut dv);
    Ok((DiskField::from_raw(g, du), DiskField::from_raw(g, dv)))
}

/// Divide raw derivatives by node areas in place.
pub(crate) fn to_l2(st: &Stencil, d: &mut [f64]) {
    let nt = st.grid.n_theta();
    for (i, w) in st.area.iter().enumerate() {
        d[i * nt..(i + 1) * nt].iter_mut().for_each(|x| *x /= w);
    }
    let m = st.area.len();
    d[m * nt..].fill(0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> PolarGrid {
        PolarGrid::new(48, 96).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ProblemParams::new(0.0, 2.0, 2.0).is_ok());
        assert!(ProblemParams::new(-1.0, 2.0, 2.0).is_err());
        assert!(ProblemParams::new(1.0, 1.0, 2.0).is_err());
        assert!(ProblemParams::new(1.0, 2.0, f64::NAN).is_err());
        let bad: std::result::Result<ProblemParams, _> = serde_json::from_str(r#"{"alpha":1,"p":0.5,"q":2}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn zero_field() {
        let z = DiskField::zeros(grid());
        let pp = ProblemParams::new(0.0, 2.0, 2.0).unwrap();
        assert_eq!(dirichlet_energy(&z), 0.0);
        assert_eq!(potential_integral(&z, &z, &pp).unwrap(), 0.0);
        assert!(matches!(rayleigh_quotient(&z, &z, &pp), Err(Error::DegeneratePair(_))));
        assert!(matches!(quotient_gradient(&z, &z, &pp), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn scaling_and_rotation_invariance() {
        let g = grid();
        let pp = ProblemParams::new(3.0, 2.5, 1.7).unwrap();
        let u = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (1.2 + (r * t.cos())).abs());
        let v = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (1.0 + 0.5 * r * r * (2.0 * t).sin()));
        let base = rayleigh_quotient(&u, &v, &pp).unwrap().quotient;
        for t in [7.3, 1e-3, 1e3] {
            let s = rayleigh_quotient(&u.scaled(t), &v.scaled(t), &pp).unwrap().quotient;
            assert!(((s - base) / base).abs() < 1e-12);
        }
        let rot = rayleigh_quotient(&u.rotated(1), &v.rotated(1), &pp).unwrap();
        let b = rayleigh_quotient(&u, &v, &pp).unwrap();
        assert!(((rot.quotient - b.quotient) / b.quotient).abs() < 1e-14);
        assert!(((rot.potential - b.potential) / b.potential).abs() < 1e-14);
    }

    #[test]
    fn potential_exchange_symmetry() {
        let g = grid();
        let u = DiskField::from_fn(g, |r, _| 1.0 - r * r);
        let v = DiskField::from_fn(g, |r, t| (1.0 - r) * (1.5 + t.sin()));
        let a = potential_integral(&u, &v, &ProblemParams::new(2.0, 3.0, 1.5).unwrap()).unwrap();
        let b = potential_integral(&v, &u, &ProblemParams::new(2.0, 1.5, 3.0).unwrap()).unwrap();
        assert!(((a - b) / a).abs() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_along_the_pair() {
        let g = grid();
        let pp = ProblemParams::new(1.0, 2.0, 3.0).unwrap();
        let u = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (2.0 + r * t.cos()));
        let v = DiskField::from_fn(g, |r, _| (1.0 - r * r) * (1.0 + r));
        let (gu, gv) = quotient_gradient(&u, &v, &pp).unwrap();
        let along = gu.inner(&u) + gv.inner(&v);
        let scale = gu.l2_norm() * u.l2_norm() + gv.l2_norm() * v.l2_norm();
        assert!(along.abs() < 1e-12 * scale);
    }

    #[test]
    fn energy_of_paraboloid() {
        let e = dirichlet_energy(&DiskField::from_fn(PolarGrid::new(96, 32).unwrap(), |r, _| 1.0 - r * r));
        assert!(((e - 2.0 * PI) / (2.0 * PI)).abs() < 1e-3);
    }
}
