//! The acceptance criteria as plain functions. `tests/acceptance.rs` runs
//! them and prints one line each.

use std::f64::consts::PI;
use std::time::Instant;

use canoma::caching::{zipf_popularity, Averaging, CacheCase, Catalog};
use canoma::channel::{cdf_gain_sq, DoubleNakagamiParams};
use canoma::noma_full::{degenerate_success, success_case, success_on_branch, Branch, FullScenario, Semantics};
use canoma::noma_split::{split_objective, split_objective_on_branch, SplitAllocation, SplitScenario};
use canoma::optimizer::{
    average_conventional_success, average_noma_success, average_oma_success, branch_interval, check_concavity_scoped,
    optimize_case, optimize_split, split_alpha_range, ConcavityScope,
};
use canoma::specfun::bessel_k;
use canoma_cli::commands::{cmd_sweep, cmd_validate, SweepVariable};
use canoma_cli::Config;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub type Check = fn() -> Result<Outcome, String>;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
}

fn lin(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i == n - 1 {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn baseline() -> Config {
    Config::baseline()
}

pub fn special_functions() -> Result<Outcome, String> {
    let t0 = Instant::now();
    let mut worst_k = 0.0f64;
    for x in log_grid(0.01, 50.0, 20) {
        let base = (PI / (2.0 * x)).sqrt() * (-x).exp();
        for (nu, exact) in [(0.5, base), (1.5, base * (1.0 + 1.0 / x))] {
            let k = bessel_k(nu, x).map_err(|e| e.to_string())?;
            worst_k = worst_k.max(((k - exact) / exact).abs());
        }
    }
    let unit = DoubleNakagamiParams::symmetric(1.0, 1.0).map_err(|e| e.to_string())?;
    let mut worst_cdf = 0.0f64;
    for u in log_grid(1e-3, 30.0, 50) {
        let r = 2.0 * u.sqrt();
        let exact = 1.0 - r * bessel_k(1.0, r).map_err(|e| e.to_string())?;
        let got = cdf_gain_sq(u, &unit).map_err(|e| e.to_string())?;
        worst_cdf = worst_cdf.max((got - exact).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst_k <= 1e-10 && worst_cdf <= 1e-8 && secs < 1.0,
        detail: format!("max rel err K = {worst_k:.2e} (<= 1e-10), max abs err cdf = {worst_cdf:.2e} (<= 1e-8), {secs:.3} s (< 1 s)"),
    })
}

pub fn analytic_vs_mc() -> Result<Outcome, String> {
    let t0 = Instant::now();
    let r = cmd_validate(&baseline(), 1_000_000, 42, 1).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let failed: Vec<&str> = r.csv.lines().filter(|l| l.ends_with(",FAIL")).collect();
    let cells = r.csv.lines().count() - 1;
    Ok(Outcome {
        pass: !r.failed && failed.is_empty() && secs < 120.0,
        detail: format!(
            "{} of {cells} cells within max(0.005, 3 CI) at 1e6 samples, {secs:.1} s (< 120 s){}",
            cells - failed.len(),
            failed.first().map(|l| format!("; first failure {l}")).unwrap_or_default()
        ),
    })
}

pub fn concavity() -> Result<Outcome, String> {
    const TOL: f64 = 1e-6;
    let cfg = baseline();
    let sc = cfg.scenario;
    let mut lines = Vec::new();
    let mut pass = true;

    let a = |alpha: f64| success_case(CacheCase::A, alpha, &sc).map(|(p1, p2)| p1 * p2);
    let r = check_concavity_scoped(a, 0.0, 1.0, 101, TOL, ConcavityScope::Full).map_err(|e| e.to_string())?;
    pass &= r.concave;
    lines.push(format!("A on [0,1]: max second difference {:.3e} at alpha {}", r.worst, r.worst_at));

    for case in [CacheCase::B, CacheCase::C, CacheCase::D] {
        for branch in [Branch::Low, Branch::High] {
            let (lo, hi) = branch_interval(branch, &sc);
            let f = |alpha: f64| success_on_branch(case, branch, alpha, &sc).map(|(p1, p2)| p1 * p2);
            let r = check_concavity_scoped(f, lo, hi, 101, TOL, ConcavityScope::Interior).map_err(|e| e.to_string())?;
            pass &= r.concave;
            if !r.concave {
                lines.push(format!("{case} {} interior: {:.3e} at alpha {}", branch.name(), r.worst, r.worst_at));
            }
        }
    }

    let split = cfg.split;
    let mut split_bad = 0usize;
    let mut split_worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for branch in [Branch::Low, Branch::High] {
        let (alo, ahi) = split_alpha_range::<f64>(branch);
        for i in 0..21 {
            let beta = lin(0.0, 1.0, 21, i);
            let f = |alpha: f64| split_objective_on_branch(branch, &SplitAllocation { alpha, beta }, &split);
            let r = check_concavity_scoped(f, alo, ahi, 101, TOL, ConcavityScope::Support).map_err(|e| e.to_string())?;
            split_bad += usize::from(!r.concave);
            if r.worst > split_worst.0 {
                split_worst = (r.worst, r.worst_at, beta);
            }
            let alpha = lin(alo, ahi, 21, i);
            let g = |beta: f64| split_objective_on_branch(branch, &SplitAllocation { alpha, beta }, &split);
            let r = check_concavity_scoped(g, 0.0, 1.0, 101, TOL, ConcavityScope::Support).map_err(|e| e.to_string())?;
            split_bad += usize::from(!r.concave);
            if r.worst > split_worst.0 {
                split_worst = (r.worst, alpha, r.worst_at);
            }
        }
    }
    pass &= split_bad == 0;
    lines.push(format!(
        "split: {split_bad} of 84 lines non-concave, worst {:.3e} at (alpha, beta) = ({:.3}, {:.3})",
        split_worst.0, split_worst.1, split_worst.2
    ));
    Ok(Outcome {
        pass,
        detail: lines.join("; "),
    })
}

pub fn conventional_equivalence() -> Result<Outcome, String> {
    let cfg = baseline();
    let sc = cfg.scenario;
    let no_cache = Catalog::new(cfg.catalog.num_files, cfg.catalog.zeta, 0).map_err(|e| e.to_string())?;
    let e = |r: canoma::Error| r.to_string();

    // With empty caches only case D and common requests remain.
    let q = zipf_popularity(&no_cache).map_err(e)?;
    let same: f64 = q.iter().map(|p| p * p).sum();
    let d = optimize_case(CacheCase::D, &sc).map_err(e)?.value;
    let common = degenerate_success(CacheCase::CommonRequest, &sc).map_err(e)?;
    let direct_full = (1.0 - same) * d + same * common;

    let full = average_noma_success(&sc, &no_cache, Averaging::Full).map_err(e)?;
    let conv_full = average_conventional_success(&sc, &cfg.catalog, Averaging::Full).map_err(e)?;
    let cases = average_noma_success(&sc, &no_cache, Averaging::CasesOnly).map_err(e)?;
    let diffs = [(full - direct_full).abs(), (full - conv_full).abs(), (cases - d).abs()];
    let worst = diffs.iter().cloned().fold(0.0, f64::max);
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!(
            "kappa=0 average {full:.12} vs direct {direct_full:.12} vs conventional {conv_full:.12}; distinct-request average {cases:.12} vs optimized D {d:.12}; max diff {worst:.1e} (<= 1e-12)"
        ),
    })
}

fn nondecreasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - tol)
}

fn avg(cfg: &Config) -> Result<f64, String> {
    average_noma_success(&cfg.scenario, &cfg.catalog, cfg.averaging).map_err(|e| e.to_string())
}

pub fn trends() -> Result<Outcome, String> {
    const TOL: f64 = 1e-9;
    let cfg = baseline();
    let cat = cfg.catalog;
    let mut bad = Vec::new();

    let zeta: Vec<f64> = (0..=10)
        .map(|i| {
            let c = Catalog::new(cat.num_files, i as f64 / 10.0, cat.cache_size).map_err(|e| e.to_string())?;
            avg(&cfg.with_catalog(c))
        })
        .collect::<Result<_, _>>()?;
    if !nondecreasing(&zeta, TOL) {
        bad.push(format!("zeta {zeta:?}"));
    }
    let kappa: Vec<f64> = (0..=cat.num_files)
        .map(|k| {
            let c = Catalog::new(cat.num_files, cat.zeta, k).map_err(|e| e.to_string())?;
            avg(&cfg.with_catalog(c))
        })
        .collect::<Result<_, _>>()?;
    if !nondecreasing(&kappa, TOL) {
        bad.push(format!("kappa {kappa:?}"));
    }
    for snr in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let at = cfg.with_snr_db(snr);
        let omega: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&w| avg(&at.with_omega(w))).collect::<Result<_, _>>()?;
        if !nondecreasing(&omega, TOL) {
            bad.push(format!("omega at {snr} dB {omega:?}"));
        }
        let m: Vec<f64> = [1.0, 2.0, 3.0].iter().map(|&m| avg(&at.with_m(m))).collect::<Result<_, _>>()?;
        if !nondecreasing(&m, TOL) {
            bad.push(format!("m at {snr} dB {m:?}"));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "zeta {:.4}..{:.4}, kappa {:.4}..{:.4}, omega and m monotone at 0-20 dB",
                zeta[0],
                zeta[10],
                kappa[0],
                kappa[kappa.len() - 1]
            )
        } else {
            format!("violations: {}", bad.join("; "))
        },
    })
}

pub fn noma_vs_oma() -> Result<Outcome, String> {
    let cfg = baseline();
    let cat = cfg.catalog;
    let mut cells = Vec::new();
    let mut pass = true;
    for zeta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let c = Catalog::new(cat.num_files, zeta, cat.cache_size).map_err(|e| e.to_string())?;
        let noma = average_noma_success(&cfg.scenario, &c, cfg.averaging).map_err(|e| e.to_string())?;
        let oma = average_oma_success(&cfg.scenario, &c, cfg.averaging).map_err(|e| e.to_string())?;
        pass &= noma >= oma;
        cells.push(format!("zeta {zeta}: NOMA {noma:.6} OMA {oma:.6}"));
    }
    Ok(Outcome {
        pass,
        detail: cells.join("; "),
    })
}

fn grid_max_1d(case: CacheCase, sc: &FullScenario<f64>) -> Result<f64, canoma::Error> {
    let mut best = f64::NEG_INFINITY;
    for i in 0..1001 {
        let (p1, p2) = success_case(case, lin(0.0, 1.0, 1001, i), sc)?;
        best = best.max(p1 * p2);
    }
    Ok(best)
}

fn grid_max_2d(sc: &SplitScenario<f64>) -> Result<f64, canoma::Error> {
    let mut best = f64::NEG_INFINITY;
    for i in 0..201 {
        for j in 0..201 {
            let alloc = SplitAllocation {
                alpha: lin(0.0, 1.0, 201, i),
                beta: lin(0.0, 1.0, 201, j),
            };
            best = best.max(split_objective(&alloc, sc)?);
        }
    }
    Ok(best)
}

pub fn optimizer_soundness() -> Result<Outcome, String> {
    let cfg = baseline();
    let e = |r: canoma::Error| r.to_string();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut opt_secs = 0.0;
    for sem in [Semantics::PaperProduct, Semantics::JointEvent] {
        let c = cfg.with_semantics(sem);
        for case in CacheCase::FULL_FILE {
            let t0 = Instant::now();
            let r = optimize_case(case, &c.scenario).map_err(e)?;
            opt_secs += t0.elapsed().as_secs_f64();
            worst_gap = worst_gap.max(grid_max_1d(case, &c.scenario).map_err(e)? - r.value);
        }
        let t0 = Instant::now();
        let r = optimize_split(&c.split, 1e-6).map_err(e)?;
        opt_secs += t0.elapsed().as_secs_f64();
        worst_gap = worst_gap.max(grid_max_2d(&c.split).map_err(e)? - r.value);
    }
    Ok(Outcome {
        pass: worst_gap <= 1e-4 && opt_secs < 30.0,
        detail: format!(
            "largest (grid max - optimizer) = {worst_gap:.2e} (<= 1e-4) over cases A-D and split, both semantics; optimizer time {opt_secs:.2} s (< 30 s)"
        ),
    })
}

pub fn determinism() -> Result<Outcome, String> {
    let cfg = baseline();
    let e = |r: canoma_cli::CliError| r.to_string();
    let mut validate = Vec::new();
    let mut sweep = Vec::new();
    for workers in [1, 4, 8] {
        validate.push(cmd_validate(&cfg, 200_000, 7, workers).map_err(e)?.csv);
        sweep.push(cmd_sweep(&cfg, SweepVariable::Zeta, 0.0, 1.0, 11, workers).map_err(e)?.csv);
    }
    let same = |v: &[String]| v.iter().all(|s| s == &v[0]);
    Ok(Outcome {
        pass: same(&validate) && same(&sweep),
        detail: format!(
            "validate (200000 samples, {} bytes) identical: {}; zeta sweep identical: {}; workers 1, 4, 8",
            validate[0].len(),
            same(&validate),
            same(&sweep)
        ),
    })
}

/// Every criterion in order with a short name.
pub const CRITERIA: [(&str, Check); 8] = [
    ("special-function accuracy", special_functions),
    ("analytic vs Monte Carlo", analytic_vs_mc),
    ("concavity of the objectives", concavity),
    ("kappa = 0 equals conventional NOMA", conventional_equivalence),
    ("trends in zeta, kappa, omega, m", trends),
    ("NOMA >= OMA across zeta", noma_vs_oma),
    ("optimizer vs exhaustive grid", optimizer_soundness),
    ("determinism across worker counts", determinism),
];
