use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::grid::PolarGrid;
use crate::error::{Error, Result};

/// Relative L² mass of foreign harmonics tolerated when a field is
/// declared n-mode.
pub const MODE_TOLERANCE: f64 = 1e-8;

/// Symmetry class of a field: invariant under rotation by `2pi/n`, or radial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeClass {
    Mode(usize),
    Radial,
}

impl ModeClass {
    pub fn mode(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("mode must be a positive integer".into()));
        }
        Ok(ModeClass::Mode(n))
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, ModeClass::Radial)
    }

    pub fn finite(&self) -> Option<usize> {
        match *self {
            ModeClass::Mode(n) => Some(n),
            ModeClass::Radial => None,
        }
    }

    pub fn check_grid(&self, grid: &PolarGrid) -> Result<()> {
        match *self {
            ModeClass::Mode(n) => grid.check_mode_divides(n),
            ModeClass::Radial => Ok(()),
        }
    }
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeClass::Mode(n) => write!(f, "{n}"),
            ModeClass::Radial => f.write_str("inf"),
        }
    }
}

impl FromStr for ModeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "radial" | "infinity" => Ok(ModeClass::Radial),
            _ => {
                let n: usize = t
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid mode '{t}': expected a positive integer or 'inf'")))?;
                ModeClass::mode(n)
            }
        }
    }
}

impl Serialize for ModeClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModeClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => ModeClass::mode(n as usize).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parse a mode list such as `"1..6,inf"` or `"1,2,4"`.
pub fn parse_mode_list(s: &str) -> Result<Vec<ModeClass>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let lo: ModeClass = a.parse()?;
            let hi: ModeClass = b.trim_start_matches('=').parse()?;
            match (lo, hi) {
                (ModeClass::Mode(lo), ModeClass::Mode(hi)) if lo <= hi => {
                    if hi - lo > 4096 {
                        return Err(Error::Config(format!("mode range '{part}' is too long")));
                    }
                    out.extend((lo..=hi).map(ModeClass::Mode));
                }
                _ => return Err(Error::Config(format!("invalid mode range '{part}'"))),
            }
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty mode list".into()));
    }
    Ok(out)
}

/// Scalar field sampled on a [`PolarGrid`], zero on the boundary ring.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskField {
    grid: PolarGrid,
    values: Vec<f64>,
}

impl DiskField {
    /// Wrap samples laid out row-major by radius.
    pub fn new(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} samples for a {}x{} grid, got {}",
                grid.len(),
                grid.n_r(),
                grid.n_theta(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at flat index {k}")));
        }
        let b = grid.index(grid.n_r() - 1, 0);
        if values[b..].iter().any(|&v| v != 0.0) {
            return Err(Error::Domain("boundary ring must be exactly zero".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: PolarGrid, mut values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        let b = grid.index(grid.n_r() - 1, 0);
        values[b..].iter_mut().for_each(|v| *v = 0.0);
        Self { grid, values }
    }

    pub fn zeros(grid: PolarGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Sample `f(r, theta)` on the interior rings; the boundary ring is set to zero.
    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for i in 0..grid.interior_rings() {
            let r = grid.radius(i);
            for j in 0..grid.n_theta() {
                values[grid.index(i, j)] = f(r, grid.theta(j));
            }
        }
        Self { grid, values }
    }

    /// Radial field from per-ring values (the boundary entry is ignored).
    pub fn from_radial(grid: PolarGrid, ring_values: &[f64]) -> Self {
        assert_eq!(ring_values.len(), grid.n_r());
        let mut values = vec![0.0; grid.len()];
        for i in 0..grid.interior_rings() {
            values[grid.index(i, 0)..grid.index(i + 1, 0)].fill(ring_values[i]);
        }
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn ring(&self, i: usize) -> &[f64] {
        let n = self.grid.n_theta();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Rotate by `steps` angular grid steps: `g(r, theta) = f(r, theta - steps dtheta)`.
    pub fn rotated(&self, steps: usize) -> Self {
        let n = self.grid.n_theta();
        let k = steps % n;
        let mut values = vec![0.0; self.values.len()];
        for (src, dst) in self.values.chunks_exact(n).zip(values.chunks_exact_mut(n)) {
            for j in 0..n {
                dst[(j + k) % n] = src[j];
            }
        }
        Self { grid: self.grid, values }
    }

    /// Discrete L² inner product with the midpoint/trapezoid weights.
    pub fn inner(&self, other: &DiskField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        (0..self.grid.interior_rings())
            .map(|i| {
                let s: f64 = self.ring(i).iter().zip(other.ring(i)).map(|(a, b)| a * b).sum();
                s * self.grid.cell_area(i)
            })
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &DiskField) -> DiskField {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn abs(&self) -> DiskField {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Evaluate the field at an arbitrary point by cubic interpolation in
    /// `r` (reflecting through the pole, one-sided at the rim) and periodic
    /// cubic interpolation in `theta`. Points with `r >= 1` evaluate to zero.
    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let g = &self.grid;
        let h = g.h();
        // signed ring coordinate: ring i sits at s = i, ring -1-i is ring i seen through the pole
        let s = r / h - 0.5;
        // one-sided stencil at the boundary
        let base = (s.floor() as isize - 1).min(g.n_r() as isize - 4);
        let w = cubic_weights(s - (base + 1) as f64);
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let idx = base + k as isize;
            let v = if idx < 0 {
                self.eval_ring((-1 - idx) as usize, theta + std::f64::consts::PI)
            } else {
                self.eval_ring(idx as usize, theta)
            };
            acc += wk * v;
        }
        acc
    }

    fn eval_ring(&self, i: usize, theta: f64) -> f64 {
        let n = self.grid.n_theta();
        let x = theta.rem_euclid(2.0 * std::f64::consts::PI) / self.grid.d_theta();
        let j0 = x.floor() as isize - 1;
        let t = x - (j0 + 1) as f64;
        let ring = self.ring(i);
        cubic_weights(t)
            .iter()
            .enumerate()
            .map(|(k, wk)| wk * ring[(j0 + k as isize).rem_euclid(n as isize) as usize])
            .sum()
    }
}

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at `t` in [0, 1).
#[inline]
pub(crate) fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Angular average of a field on every ring, boundary included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

fn ring_mean(ring: &[f64]) -> f64 {
    let first = ring[0];
    if ring.iter().all(|&v| v == first) {
        return first;
    }
    ring.iter().sum::<f64>() / ring.len() as f64
}

pub fn radial_profile(f: &DiskField) -> RadialProfile {
    let g = f.grid();
    RadialProfile {
        radii: g.radial_nodes(),
        values: (0..g.n_r()).map(|i| ring_mean(f.ring(i))).collect(),
    }
}

/// Orthogonal projection onto the discrete `H_n` (or onto radial fields).
///
/// For `Mode(n)` this averages the field over the `n` rotations by
/// `2pi/n`, which keeps exactly the angular harmonics divisible by `n`.
pub fn project_mode(f: &DiskField, c: ModeClass) -> Result<DiskField> {
    let g = *f.grid();
    c.check_grid(&g)?;
    let n_theta = g.n_theta();
    let mut values = vec![0.0; g.len()];
    match c {
        ModeClass::Radial => {
            for i in 0..g.n_r() {
                let m = ring_mean(f.ring(i));
                values[i * n_theta..(i + 1) * n_theta].fill(m);
            }
        }
        ModeClass::Mode(1) => values.copy_from_slice(f.values()),
        ModeClass::Mode(n) => {
            let period = n_theta / n;
            for i in 0..g.n_r() {
                let ring = f.ring(i);
                let out = &mut values[i * n_theta..(i + 1) * n_theta];
                for j in 0..period {
                    let mean = (0..n).map(|l| ring[j + l * period]).sum::<f64>() / n as f64;
                    for l in 0..n {
                        out[j + l * period] = mean;
                    }
                }
            }
        }
    }
    Ok(DiskField::from_raw(g, values))
}

/// Relative L² size of the part of `f` outside the class `c`.
pub fn mode_defect(f: &DiskField, c: ModeClass) -> Result<f64> {
    let p = project_mode(f, c)?;
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(f.sub(&p).l2_norm() / norm)
}

pub fn is_in_mode(f: &DiskField, c: ModeClass) -> Result<bool> {
    Ok(mode_defect(f, c)? < MODE_TOLERANCE)
}

/// `||f - radial_average(f)|| / ||f||`; zero iff `f` is radial on the grid.
pub fn angular_variation(f: &DiskField) -> f64 {
    let radial = project_mode(f, ModeClass::Radial).expect("radial projection is always defined");
    f.sub(&radial).l2_norm() / f.l2_norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> PolarGrid {
        PolarGrid::new(24, 48).unwrap()
    }

    fn max_diff(a: &DiskField, b: &DiskField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn radial_field_is_fixed_by_every_projection() {
        let f = DiskField::from_fn(grid(), |r, _| 1.0 - r * r);
        for c in [ModeClass::Mode(1), ModeClass::Mode(2), ModeClass::Mode(6), ModeClass::Radial] {
            assert!(max_diff(&project_mode(&f, c).unwrap(), &f) < 1e-15);
        }
    }

    #[test]
    fn odd_harmonic_vanishes_under_mode_two() {
        let f = DiskField::from_fn(grid(), |r, t| (1.0 - r * r) * (3.0 * t).cos());
        let p = project_mode(&f, ModeClass::Mode(2)).unwrap();
        assert!(p.max_abs() < 1e-14);
    }

    #[test]
    fn mixed_harmonics_keep_the_even_one() {
        let g = grid();
        let f = DiskField::from_fn(g, |r, t| (1.0 - r * r) * ((2.0 * t).cos() + (3.0 * t).cos()));
        let p = project_mode(&f, ModeClass::Mode(2)).unwrap();
        // discrete Fourier analysis of each ring of the output
        let n = g.n_theta() as f64;
        for i in 0..g.interior_rings() {
            let r = g.radius(i);
            for k in 0..g.n_theta() / 2 {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, v) in p.ring(i).iter().enumerate() {
                    let a = k as f64 * g.theta(j);
                    re += v * a.cos();
                    im += v * a.sin();
                }
                let amp = 2.0 * (re * re + im * im).sqrt() / n;
                let expected = if k == 2 { 1.0 - r * r } else { 0.0 };
                assert!((amp - expected).abs() < 1e-13, "ring {i} harmonic {k}: {amp}");
            }
        }
    }

    #[test]
    fn projection_rejects_non_divisor() {
        let f = DiskField::zeros(grid());
        assert!(matches!(project_mode(&f, ModeClass::Mode(5)), Err(Error::Config(_))));
    }

    #[test]
    fn angular_variation_examples() {
        let g = grid();
        let radial = DiskField::from_fn(g, |r, _| 1.0 - r * r);
        assert_eq!(angular_variation(&radial), 0.0);
        let dipole = DiskField::from_fn(g, |r, t| (1.0 - r * r) * t.cos());
        assert!(angular_variation(&dipole) > 0.5);
        assert_eq!(angular_variation(&DiskField::zeros(g)), 0.0);
    }

    #[test]
    fn radial_profile_examples() {
        let g = grid();
        let radial = DiskField::from_fn(g, |r, _| 1.0 - r * r);
        let prof = radial_profile(&radial);
        for i in 0..g.n_r() {
            assert_eq!(prof.values[i], radial.get(i, 0));
        }
        let dipole = DiskField::from_fn(g, |r, t| (1.0 - r * r) * t.cos());
        assert!(radial_profile(&dipole).values.iter().all(|v| v.abs() < 1e-15));
        let f = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (2.0 + (2.0 * t).cos()));
        let prof = radial_profile(&f);
        for (r, v) in prof.radii.iter().zip(&prof.values) {
            assert!((v - 2.0 * (1.0 - r * r)).abs() < 1e-14);
        }
    }

    #[test]
    fn new_validates_boundary_and_finiteness() {
        let g = grid();
        let mut vals = vec![0.0; g.len()];
        assert!(DiskField::new(g, vals.clone()).is_ok());
        vals[g.len() - 1] = 1e-300;
        assert!(DiskField::new(g, vals.clone()).is_err());
        vals[g.len() - 1] = 0.0;
        vals[0] = f64::NAN;
        assert!(DiskField::new(g, vals).is_err());
        assert!(DiskField::new(g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn eval_reproduces_smooth_fields() {
        let g = PolarGrid::new(64, 128).unwrap();
        let f = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (1.0 + r * t.cos()));
        for &(r, t) in &[(0.0, 0.0), (0.01, 2.0), (0.3, 1.1), (0.77, 4.0), (0.995, 0.3)] {
            let exact = (1.0 - r * r) * (1.0 + r * f64::cos(t));
            assert!((f.eval(r, t) - exact).abs() < 1e-5, "({r},{t})");
        }
        assert_eq!(f.eval(1.2, 0.0), 0.0);
        let _ = PI;
    }

    #[test]
    fn mode_list_parsing() {
        assert_eq!(
            parse_mode_list("1..3, inf").unwrap(),
            vec![ModeClass::Mode(1), ModeClass::Mode(2), ModeClass::Mode(3), ModeClass::Radial]
        );
        assert!(parse_mode_list("0").is_err());
        assert!(parse_mode_list("3..1").is_err());
        assert!(parse_mode_list("").is_err());
        assert!(parse_mode_list("1..inf").is_err());
    }

    #[test]
    fn mode_class_json() {
        let s = serde_json::to_string(&vec![ModeClass::Mode(3), ModeClass::Radial]).unwrap();
        assert_eq!(s, r#"["3","inf"]"#);
        let back: Vec<ModeClass> = serde_json::from_str(r#"[3,"inf","2"]"#).unwrap();
        assert_eq!(back, vec![ModeClass::Mode(3), ModeClass::Radial, ModeClass::Mode(2)]);
    }
}
