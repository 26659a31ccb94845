use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use henon_modes::config::{parse_sweep_config, RunConfig};
use henon_modes::polar::write_field_dump;
use henon_modes::theory::{n_alpha, radial_threshold};
use henon_modes::verify::{verify_levels, Check, ModeLevel, Verdict, VerifyReport, NONRADIAL_MIN, RADIAL_MAX};
use henon_modes::{
    check_monotone_radial, minimize_multistart, parse_solve_record, radial_profile, reconstruct_solution,
    ModeClass, PolarGrid, ProblemParams, SolveOptions, SolveRecord, SolveResult,
};
use rayon::prelude::*;

use crate::args::{DumpArgs, RunArgs, SweepArgs, VerifyArgs};
use crate::exit::{ensure_dir, read_input, CliError, CliResult, FAILED, OK, SOLVER};

pub const THREADS_VAR: &str = "HENON_MODES_THREADS";

fn pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::config(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))
}

fn dedup(modes: &[ModeClass]) -> Vec<ModeClass> {
    let mut out: Vec<ModeClass> = Vec::new();
    for m in modes {
        if !out.contains(m) {
            out.push(*m);
        }
    }
    out
}

fn tag(mode: ModeClass) -> String {
    mode.to_string()
}

/// Solve every mode on the worker pool, keeping the input order.
fn solve_all(
    params: &ProblemParams,
    modes: &[ModeClass],
    grid: PolarGrid,
    opts: &SolveOptions,
    restarts: usize,
) -> CliResult<Vec<henon_modes::Result<SolveResult>>> {
    let pool = pool()?;
    Ok(pool.install(|| {
        modes
            .par_iter()
            .map(|&m| minimize_multistart(params, m, grid, opts, restarts))
            .collect()
    }))
}

/// Write `mode_<n>.json` plus the two field dumps into `dir`.
fn write_result(dir: &Path, res: &SolveResult, restarts: usize) -> CliResult<SolveRecord> {
    let t = tag(res.mode);
    let u_name = format!("mode_{t}_u.csv");
    let v_name = format!("mode_{t}_v.csv");
    let alpha = Some(res.params.alpha);
    write_field_dump(&dir.join(&u_name), &res.u, alpha)?;
    write_field_dump(&dir.join(&v_name), &res.v, alpha)?;
    let mut rec = SolveRecord::from_result(res, restarts);
    rec.u_dump = Some(u_name);
    rec.v_dump = Some(v_name);
    rec.save(&dir.join(format!("mode_{t}.json")))?;
    Ok(rec)
}

fn describe(res: &SolveResult) -> String {
    format!(
        "mode {:>3}: level {:.10}  nonradiality {:.3e}  residual {:.3e}  iters {}  converged {}",
        tag(res.mode),
        res.level,
        res.nonradiality,
        res.residual,
        res.iters,
        res.converged
    )
}

fn require_modes(cfg: &RunConfig) -> CliResult<()> {
    if cfg.modes.is_empty() {
        return Err(CliError::config("no modes requested; pass --mode N (or --mode inf)"));
    }
    Ok(())
}

pub fn solve(args: &RunArgs) -> CliResult<u8> {
    let cfg = args.layer()?.resolve(&[])?;
    require_modes(&cfg)?;
    let modes = dedup(&cfg.modes);
    if let Some(d) = &cfg.out_dir {
        ensure_dir(d)?;
    }
    let results = solve_all(&cfg.params, &modes, cfg.grid, &cfg.options, cfg.restarts)?;
    let mut code = OK;
    let mut first_error = None;
    for (m, r) in modes.iter().zip(results) {
        match r {
            Ok(res) => {
                println!("{}", describe(&res));
                if let Some(d) = &cfg.out_dir {
                    write_result(d, &res, cfg.restarts)?;
                }
                if !res.converged {
                    code = code.max(FAILED);
                }
            }
            Err(e) => {
                eprintln!("mode {m}: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(code),
    }
}

/// Modes verify needs: the guaranteed nonradial range, the radiality
/// threshold (if the grid admits it), anything requested, and the radial class.
fn verify_modes(cfg: &RunConfig) -> CliResult<Vec<ModeClass>> {
    let mut modes = Vec::new();
    let na = if cfg.params.alpha > 2.0 { n_alpha(&cfg.params)? as usize } else { 0 };
    for n in 1..=na.max(1) {
        modes.push(ModeClass::Mode(n));
    }
    let t = radial_threshold(cfg.params.alpha) as usize;
    if cfg.grid.n_theta().is_multiple_of(t) {
        modes.push(ModeClass::Mode(t));
    } else {
        println!(
            "note: radiality threshold {t} does not divide n_theta = {}; pass a compatible --ntheta to test it",
            cfg.grid.n_theta()
        );
    }
    modes.extend(cfg.modes.iter().copied());
    modes.push(ModeClass::Radial);
    let modes = dedup(&modes);
    for m in &modes {
        m.check_grid(&cfg.grid)?;
    }
    Ok(modes)
}

fn run_verify(cfg: &RunConfig, modes: &[ModeClass], grid: PolarGrid, slack: f64) -> CliResult<VerifyReport> {
    let base_params = ProblemParams::new(0.0, cfg.params.p, cfg.params.q)?;
    let pool = pool()?;
    let (base, results) = pool.install(|| {
        rayon::join(
            || minimize_multistart(&base_params, ModeClass::Mode(1), grid, &cfg.options, cfg.restarts),
            || {
                modes
                    .par_iter()
                    .map(|&m| minimize_multistart(&cfg.params, m, grid, &cfg.options, cfg.restarts))
                    .collect::<Vec<_>>()
            },
        )
    });
    let base = base?;
    let mut levels = Vec::new();
    for r in results {
        let res = r?;
        if let Some(d) = &cfg.out_dir {
            write_result(d, &res, cfg.restarts)?;
        }
        levels.push(ModeLevel {
            mode: res.mode,
            level: res.level,
            nonradiality: res.nonradiality,
            converged: res.converged,
        });
    }
    let mut report = verify_levels(&cfg.params, base.level, &levels, slack)?;
    report.checks.insert(
        0,
        Check {
            name: "converged[base S_0,p,q,1]".into(),
            verdict: if base.converged { Verdict::Pass } else { Verdict::Fail },
            detail: format!("level {:.10} on {} x {}", base.level, grid.n_r(), grid.n_theta()),
            marginal: false,
        },
    );
    Ok(report)
}

fn verify_from(args: &VerifyArgs, dir: &Path) -> CliResult<u8> {
    let cfg = args.run.layer()?.resolve(&[])?;
    let mut records = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::config(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        match parse_solve_record(&read_input(&p)?) {
            Ok(r) => records.push(r),
            Err(_) => continue,
        }
    }
    let same_pq = |r: &SolveRecord| r.params.p == cfg.params.p && r.params.q == cfg.params.q;
    let s_base = match args.s_base {
        Some(s) => s,
        None => records
            .iter()
            .find(|r| same_pq(r) && r.params.alpha == 0.0 && r.mode == ModeClass::Mode(1))
            .map(|r| r.level)
            .ok_or_else(|| CliError::config("missing input: no alpha = 0, mode 1 record for S_base and no --s-base"))?,
    };
    let levels: Vec<ModeLevel> = records
        .iter()
        .filter(|r| r.params == cfg.params)
        .map(ModeLevel::from)
        .collect();
    if levels.is_empty() {
        return Err(CliError::config(format!(
            "missing input: no records for alpha = {}, p = {}, q = {} in {}",
            cfg.params.alpha,
            cfg.params.p,
            cfg.params.q,
            dir.display()
        )));
    }
    let report = verify_levels(&cfg.params, s_base, &levels, args.slack)?;
    emit_report(&report, cfg.out_dir.as_deref())
}

fn emit_report(report: &VerifyReport, out: Option<&Path>) -> CliResult<u8> {
    print!("{}", report.render());
    if let Some(d) = out {
        ensure_dir(d)?;
        let json = serde_json::to_string_pretty(report).expect("report serialises");
        std::fs::write(d.join("verify.json"), json + "\n")?;
    }
    if report.passed() {
        println!("all checks passed");
        Ok(OK)
    } else {
        let names: Vec<&str> = report.failed().map(|c| c.name.as_str()).collect();
        println!("failed: {}", names.join(", "));
        Ok(FAILED)
    }
}

pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    if let Some(dir) = &args.from {
        return verify_from(args, dir);
    }
    let cfg = args.run.layer()?.resolve(&[])?;
    let modes = verify_modes(&cfg)?;
    if let Some(d) = &cfg.out_dir {
        ensure_dir(d)?;
    }
    let report = run_verify(&cfg, &modes, cfg.grid, args.slack)?;
    if report.only_marginal_failures() && !args.no_refine {
        print!("{}", report.render());
        let fine = cfg.grid.refined()?;
        println!(
            "marginal failures; rerunning once on {} x {} with slack {}",
            fine.n_r(),
            fine.n_theta(),
            args.slack / 2.0
        );
        let out = cfg.out_dir.as_ref().map(|d| d.join("refined"));
        if let Some(d) = &out {
            ensure_dir(d)?;
        }
        let fine_cfg = RunConfig {
            grid: fine,
            out_dir: out.clone(),
            ..cfg.clone()
        };
        let report = run_verify(&fine_cfg, &modes, fine, args.slack / 2.0)?;
        return emit_report(&report, out.as_deref());
    }
    emit_report(&report, cfg.out_dir.as_deref())
}

fn sweep_name(p: &ProblemParams, mode: ModeClass) -> String {
    format!("a{}_p{}_q{}_mode_{}.json", p.alpha, p.p, p.q, tag(mode))
}

pub fn sweep(args: &SweepArgs) -> CliResult<u8> {
    let mut cfg = parse_sweep_config(&read_input(&args.config)?)?;
    if args.nr.is_some() || args.ntheta.is_some() {
        cfg.grid = PolarGrid::new(args.nr.unwrap_or(cfg.grid.n_r()), args.ntheta.unwrap_or(cfg.grid.n_theta()))?;
        for m in &cfg.modes {
            m.check_grid(&cfg.grid)?;
        }
    }
    cfg.options.grad_tol = args.tol.unwrap_or(cfg.options.grad_tol);
    cfg.options.rng_seed = args.seed.unwrap_or(cfg.options.rng_seed);
    cfg.options.validate()?;
    cfg.restarts = args.restarts.unwrap_or(cfg.restarts);
    if cfg.restarts == 0 {
        return Err(CliError::config("restarts must be at least 1"));
    }
    let out = args.out.clone().or(cfg.out_dir.clone());
    if let Some(d) = &out {
        ensure_dir(d)?;
    }

    let rows: Vec<(ProblemParams, ModeClass)> = cfg
        .params
        .iter()
        .flat_map(|p| cfg.modes.iter().map(move |m| (*p, *m)))
        .collect();
    let pool = pool()?;
    let results: Vec<henon_modes::Result<SolveResult>> = pool.install(|| {
        rows.par_iter()
            .map(|(p, m)| minimize_multistart(p, *m, cfg.grid, &cfg.options, cfg.restarts))
            .collect()
    });

    let mut csv = String::from("alpha,p,q,n,level,nonradiality,converged\n");
    let mut failed = false;
    let mut observed: BTreeMap<(u64, u64, u64), usize> = BTreeMap::new();
    for ((p, m), r) in rows.iter().zip(&results) {
        let key = (p.alpha.to_bits(), p.p.to_bits(), p.q.to_bits());
        observed.entry(key).or_insert(0);
        match r {
            Ok(res) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{:e},{}",
                    p.alpha, p.p, p.q, tag(*m), res.level, res.nonradiality, res.converged
                );
                if let Some(d) = &out {
                    SolveRecord::from_result(res, cfg.restarts).save(&d.join(sweep_name(p, *m)))?;
                }
                if !res.converged {
                    failed = true;
                } else if m.finite().is_some() && res.nonradiality > NONRADIAL_MIN {
                    *observed.get_mut(&key).expect("key inserted") += 1;
                }
            }
            Err(e) => {
                eprintln!("row alpha = {}, p = {}, q = {}, mode {m}: {e}", p.alpha, p.p, p.q);
                let _ = writeln!(csv, "{},{},{},{},NaN,NaN,false", p.alpha, p.p, p.q, tag(*m));
                failed = true;
            }
        }
    }

    let mut summary = String::from("alpha,p,q,n_alpha,radial_threshold,observed_nonradial\n");
    for p in &cfg.params {
        let na = if p.alpha > 2.0 { n_alpha(p)?.to_string() } else { "na".into() };
        let key = (p.alpha.to_bits(), p.p.to_bits(), p.q.to_bits());
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{}",
            p.alpha,
            p.p,
            p.q,
            na,
            radial_threshold(p.alpha),
            observed[&key]
        );
    }
    match &out {
        Some(d) => {
            std::fs::write(d.join("sweep.csv"), &csv)?;
            std::fs::write(d.join("summary.csv"), &summary)?;
            println!("wrote {} rows to {}", rows.len(), d.join("sweep.csv").display());
        }
        None => print!("{csv}"),
    }
    print!("{summary}");
    for line in trend_lines(&cfg.params, &observed) {
        println!("{line}");
    }
    Ok(if failed { FAILED } else { OK })
}

/// For each (p, q), whether the observed nonradial count is nondecreasing
/// in alpha.
fn trend_lines(params: &[ProblemParams], observed: &BTreeMap<(u64, u64, u64), usize>) -> Vec<String> {
    let mut by_pair: BTreeMap<(u64, u64), Vec<(f64, usize)>> = BTreeMap::new();
    for p in params {
        let n = observed[&(p.alpha.to_bits(), p.p.to_bits(), p.q.to_bits())];
        by_pair.entry((p.p.to_bits(), p.q.to_bits())).or_default().push((p.alpha, n));
    }
    by_pair
        .into_iter()
        .map(|((p, q), mut v)| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            let monotone = v.windows(2).all(|w| w[0].1 <= w[1].1);
            format!(
                "p = {}, q = {}: observed nonradial count {} in alpha",
                f64::from_bits(p),
                f64::from_bits(q),
                if monotone { "nondecreasing" } else { "NOT nondecreasing" }
            )
        })
        .collect()
}

pub fn dump_field(args: &DumpArgs) -> CliResult<u8> {
    let cfg = args.run.layer()?.resolve(&[])?;
    require_modes(&cfg)?;
    let dir = cfg
        .out_dir
        .clone()
        .ok_or_else(|| CliError::config("dump-field needs --out DIR"))?;
    ensure_dir(&dir)?;
    let modes = dedup(&cfg.modes);
    let results = solve_all(&cfg.params, &modes, cfg.grid, &cfg.options, cfg.restarts)?;
    let mut code = OK;
    for r in results {
        let res = r?;
        let t = tag(res.mode);
        let (u, v) = if args.reconstruct {
            if !res.converged {
                eprintln!("mode {t}: not converged, refusing to rescale into a solution");
                code = FAILED;
                continue;
            }
            reconstruct_solution(&res, &res.params)?
        } else {
            (res.u.clone(), res.v.clone())
        };
        let alpha = Some(res.params.alpha);
        let (un, vn) = (dir.join(format!("u_mode_{t}.csv")), dir.join(format!("v_mode_{t}.csv")));
        write_field_dump(&un, &u, alpha)?;
        write_field_dump(&vn, &v, alpha)?;
        println!("{}\n  wrote {} and {}", describe(&res), un.display(), vn.display());
        if !res.converged {
            code = FAILED;
        }
    }
    Ok(code)
}

pub fn check_symmetry(args: &RunArgs) -> CliResult<u8> {
    let layer = args.layer()?;
    let alpha = layer.problem.alpha.unwrap_or(0.0);
    let nt = layer.grid.ntheta.unwrap_or(henon_modes::config::DEFAULT_NTHETA);
    let threshold = radial_threshold(alpha.max(0.0)) as usize;
    let mut defaults: Vec<ModeClass> = (1..=threshold).filter(|n| nt % n == 0).map(ModeClass::Mode).collect();
    defaults.push(ModeClass::Radial);
    let cfg = layer.resolve(&defaults)?;
    let modes = dedup(&cfg.modes);
    let na = if cfg.params.alpha > 2.0 { Some(n_alpha(&cfg.params)? as usize) } else { None };
    let results = solve_all(&cfg.params, &modes, cfg.grid, &cfg.options, cfg.restarts)?;

    println!(
        "alpha = {}, p = {}, q = {}: n_alpha = {}, radial threshold = {threshold}",
        cfg.params.alpha,
        cfg.params.p,
        cfg.params.q,
        na.map_or("n/a (alpha <= 2)".to_string(), |n| n.to_string())
    );
    println!("{:>5}  {:>16}  {:>12}  {:>10}  {:>10}  verdict", "mode", "level", "nonradiality", "observed", "expected");
    let mut code = OK;
    let mut solver_error = None;
    for (m, r) in modes.iter().zip(results) {
        let res = match r {
            Ok(res) => res,
            Err(e) => {
                eprintln!("mode {m}: {e}");
                solver_error.get_or_insert(e);
                continue;
            }
        };
        let observed = if res.nonradiality < RADIAL_MAX {
            "radial"
        } else if res.nonradiality > NONRADIAL_MIN {
            "nonradial"
        } else {
            "unclear"
        };
        let expected = match m.finite() {
            None => "radial",
            Some(n) if n >= threshold => "radial",
            Some(n) if na.is_some_and(|k| n <= k) => "nonradial",
            Some(_) => "open",
        };
        let mut verdict = if expected == "open" {
            "-".to_string()
        } else if expected == observed {
            "ok".to_string()
        } else {
            code = FAILED;
            "VIOLATION".to_string()
        };
        if !res.converged {
            code = FAILED;
            verdict.push_str(" (not converged)");
        }
        if m.is_radial() && res.converged {
            let (u, _) = reconstruct_solution(&res, &res.params)?;
            if check_monotone_radial(&radial_profile(&u)) {
                verdict.push_str(", profile decreasing");
            } else {
                code = FAILED;
                verdict.push_str(", profile NOT decreasing");
            }
        }
        println!(
            "{:>5}  {:>16.10}  {:>12.3e}  {observed:>10}  {expected:>10}  {verdict}",
            tag(*m),
            res.level,
            res.nonradiality
        );
    }
    match solver_error {
        Some(e) => Err(CliError {
            code: SOLVER,
            err: e.into(),
        }),
        None => Ok(code),
    }
}
