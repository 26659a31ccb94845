//! Verdicts on computed levels against the symmetry-breaking theory.
//!
//! A strict inequality `a < b` checked "with slack `s`" passes when
//! `a < b (1 + s)`; a bound `a >= b` passes when `a >= b (1 - s)`. The slack
//! absorbs discretisation error. A failure that would pass with twice the
//! slack is flagged as marginal, which is what grid refinement can fix.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::polar::ModeClass;
use crate::report::SolveRecord;
use crate::theory::BoundsReport;

pub const DEFAULT_SLACK: f64 = 0.02;
/// Nonradiality above which a minimiser counts as symmetry broken.
pub const NONRADIAL_MIN: f64 = 1e-2;
/// Nonradiality below which a minimiser counts as radial.
pub const RADIAL_MAX: f64 = 1e-4;
/// Relative level agreement required of radial n-mode minimisers.
pub const RADIAL_LEVEL_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(default)]
    pub marginal: bool,
}

impl Check {
    fn gated(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::NotApplicable,
            detail: reason.into(),
            marginal: false,
        }
    }

    fn missing(name: impl Into<String>, what: &str) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Fail,
            detail: format!("missing level for {what}"),
            marginal: false,
        }
    }

    fn outcome(name: impl Into<String>, pass: bool, marginal: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            detail,
            marginal: !pass && marginal,
        }
    }
}

/// The part of a solve the verdicts look at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeLevel {
    pub mode: ModeClass,
    pub level: f64,
    pub nonradiality: f64,
    pub converged: bool,
}

impl From<&SolveRecord> for ModeLevel {
    fn from(r: &SolveRecord) -> Self {
        Self {
            mode: r.mode,
            level: r.level,
            nonradiality: r.nonradiality,
            converged: r.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub bounds: BoundsReport,
    pub slack: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    /// True when something failed and every failure is marginal.
    pub fn only_marginal_failures(&self) -> bool {
        !self.passed() && self.failed().all(|c| c.marginal)
    }

    pub fn render(&self) -> String {
        let b = &self.bounds;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "alpha = {}, p = {}, q = {}, slack = {}",
            b.params.alpha, b.params.p, b.params.q, self.slack
        );
        match (b.eta, b.n_alpha) {
            (Some(e), Some(n)) => {
                let _ = writeln!(out, "eta = {e:.6}, n_alpha = {n}");
            }
            _ => {
                let _ = writeln!(out, "eta, n_alpha: not applicable (alpha <= 2)");
            }
        }
        let _ = writeln!(out, "radial threshold = {}, S_base = {:.10}", b.radial_threshold, b.s_base);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail if c.marginal => "FAIL (marginal)",
                Verdict::Fail => "FAIL",
                Verdict::NotApplicable => "N/A",
            };
            let _ = writeln!(out, "{:width$}  {tag:<15}  {}", c.name, c.detail);
        }
        out
    }
}

fn find(levels: &[ModeLevel], mode: ModeClass) -> Option<&ModeLevel> {
    levels.iter().find(|l| l.mode == mode)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (b - a) / b
}

/// Compare computed levels with the theory for `params`.
///
/// `s_base` is the computed `S_{0,p,q,1}` that both closed-form bounds are
/// scaled by. Levels for any modes may be supplied; checks whose inputs
/// are absent fail with a "missing" detail rather than being skipped.
pub fn verify_levels(params: &ProblemParams, s_base: f64, levels: &[ModeLevel], slack: f64) -> Result<VerifyReport> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::Config(format!("slack must lie in [0, 1), got {slack}")));
    }
    let max_mode = levels.iter().filter_map(|l| l.mode.finite()).max().unwrap_or(1);
    let bounds = BoundsReport::new(params, s_base, max_mode)?;
    let mut checks = Vec::new();
    let radial = find(levels, ModeClass::Radial);

    for l in levels {
        checks.push(Check::outcome(
            format!("converged[{}]", l.mode),
            l.converged,
            false,
            format!("level {:.10}", l.level),
        ));
    }

    // ordering S_1 < ... < S_{n_alpha}
    match bounds.n_alpha {
        None => checks.push(Check::gated("ordering", "alpha <= 2: n_alpha is undefined")),
        Some(na) if na < 2 => checks.push(Check::gated(
            "ordering",
            format!("n_alpha = {na}: no chain of guaranteed nonradial levels to order"),
        )),
        Some(na) => {
            for n in 1..na as usize {
                let name = format!("ordering[S_{n} < S_{}]", n + 1);
                match (find(levels, ModeClass::Mode(n)), find(levels, ModeClass::Mode(n + 1))) {
                    (Some(a), Some(b)) => checks.push(Check::outcome(
                        name,
                        a.level < b.level * (1.0 + slack),
                        a.level < b.level * (1.0 + 2.0 * slack),
                        format!("{:.10} vs {:.10} (gap {:+.3}%)", a.level, b.level, 100.0 * rel_gap(a.level, b.level)),
                    )),
                    (None, _) => checks.push(Check::missing(name, &format!("mode {n}"))),
                    (_, None) => checks.push(Check::missing(name, &format!("mode {}", n + 1))),
                }
            }
        }
    }

    // symmetry breaking S_n < S_inf for n <= n_alpha
    match bounds.n_alpha {
        None => checks.push(Check::gated("gap", "alpha <= 2: n_alpha is undefined")),
        Some(0) => checks.push(Check::gated("gap", "n_alpha = 0: symmetry breaking is not guaranteed")),
        Some(na) => {
            for n in 1..=na as usize {
                let name = format!("gap[S_{n} < S_inf]");
                match (find(levels, ModeClass::Mode(n)), radial) {
                    (Some(a), Some(r)) => {
                        let below = a.level < r.level * (1.0 + slack);
                        let nonradial = a.nonradiality > NONRADIAL_MIN;
                        checks.push(Check::outcome(
                            name,
                            below && nonradial,
                            nonradial && a.level < r.level * (1.0 + 2.0 * slack),
                            format!(
                                "{:.10} vs {:.10} (gap {:+.3}%), nonradiality {:.3e}",
                                a.level,
                                r.level,
                                100.0 * rel_gap(a.level, r.level),
                                a.nonradiality
                            ),
                        ))
                    }
                    (None, _) => checks.push(Check::missing(name, &format!("mode {n}"))),
                    (_, None) => checks.push(Check::missing(name, "the radial class")),
                }
            }
        }
    }

    // radiality at and above the threshold
    let threshold = bounds.radial_threshold as usize;
    let above: Vec<&ModeLevel> = levels
        .iter()
        .filter(|l| l.mode.finite().is_some_and(|n| n >= threshold))
        .collect();
    if above.is_empty() {
        checks.push(Check::gated(
            "radiality",
            format!("no mode at or above the threshold {threshold} was solved"),
        ));
    }
    for a in above {
        let name = format!("radiality[{}]", a.mode);
        match radial {
            Some(r) => {
                let dev = ((a.level - r.level) / r.level).abs();
                checks.push(Check::outcome(
                    name,
                    a.nonradiality < RADIAL_MAX && dev <= RADIAL_LEVEL_TOL,
                    a.nonradiality < 10.0 * RADIAL_MAX && dev <= 10.0 * RADIAL_LEVEL_TOL,
                    format!("nonradiality {:.3e}, |S_n - S_inf| / S_inf = {dev:.3e}", a.nonradiality),
                ))
            }
            None => checks.push(Check::missing(name, "the radial class")),
        }
    }

    // closed-form bounds
    if params.alpha <= 2.0 {
        checks.push(Check::gated("lower_bound", "alpha <= 2: bounds not applicable"));
        checks.push(Check::gated("upper_bound", "alpha <= 2: bounds not applicable"));
    } else {
        let lb = bounds.s_radial_lower;
        match radial {
            Some(r) => checks.push(Check::outcome(
                "lower_bound[S_inf]",
                r.level >= lb * (1.0 - slack),
                r.level >= lb * (1.0 - 2.0 * slack),
                format!("{:.10} >= {lb:.10}", r.level),
            )),
            None => checks.push(Check::missing("lower_bound[S_inf]", "the radial class")),
        }
        let finite: Vec<&ModeLevel> = levels.iter().filter(|l| l.mode.finite().is_some()).collect();
        if finite.is_empty() {
            checks.push(Check::gated("upper_bound", "no finite mode was solved"));
        }
        for a in finite {
            let n = a.mode.finite().expect("finite mode");
            let ub = bounds.s_mode_upper[&n];
            checks.push(Check::outcome(
                format!("upper_bound[S_{n}]"),
                a.level <= ub * (1.0 + slack),
                a.level <= ub * (1.0 + 2.0 * slack),
                format!("{:.10} <= {ub:.10}", a.level),
            ));
        }
    }

    Ok(VerifyReport {
        bounds,
        slack,
        checks,
    })
}
