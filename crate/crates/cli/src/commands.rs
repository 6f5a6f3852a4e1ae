//! Subcommand implementations. Each returns its CSV body plus free-text
//! notes; nothing here touches stdout, files or the process exit code.

use canoma::caching::{CacheCase, Catalog};
use canoma::mc_oracle::{mc_case, mc_split, McConfig, McEstimate};
use canoma::noma_full::{success_case, success_on_branch, Branch, Semantics};
use canoma::noma_split::{split_joint_from_chains, split_objective_on_branch, SplitAllocation};
use canoma::optimizer::{
    average_conventional_success, average_noma_success, average_oma_success, branch_interval,
    check_concavity_scoped, optimize_case, optimize_split, split_alpha_range, ConcavityScope, OptResult,
};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;

/// Output of one subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub csv: String,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    /// Set when a validation cell failed.
    pub failed: bool,
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Output(format!("thread pool: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseSelector {
    One(CacheCase),
    All,
    Split,
}

fn branch_name(b: Option<Branch>) -> &'static str {
    b.map_or("none", Branch::name)
}

fn opt_row(label: &str, r: &OptResult<f64>) -> Vec<String> {
    vec![
        label.to_string(),
        branch_name(r.branch).to_string(),
        num(r.argmax.first()),
        r.argmax.second().map(num).unwrap_or_default(),
        num(r.value),
        r.evaluations.to_string(),
    ]
}

/// Optimal power split for the selected cases.
pub fn cmd_optimize(cfg: &Config, selector: CaseSelector) -> Result<Report, CliError> {
    let header = ["case", "branch", "alpha", "beta", "value", "evaluations"];
    let cases: Vec<CacheCase> = match selector {
        CaseSelector::One(c) => vec![c],
        CaseSelector::All => CacheCase::FULL_FILE.to_vec(),
        CaseSelector::Split => vec![],
    };
    let mut rows = Vec::new();
    for case in cases {
        rows.push(opt_row(case.name(), &optimize_case(case, &cfg.scenario)?));
    }
    if selector == CaseSelector::Split {
        rows.push(opt_row("split", &optimize_split(&cfg.split, 1e-6)?));
    }
    Ok(Report {
        csv: csv_string(&header, &rows)?,
        notes: vec![],
        failed: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Zeta,
    SnrDb,
    CacheSize,
    Omega,
    M,
    NumFiles,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Zeta => "zeta",
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::CacheSize => "cache_size",
            SweepVariable::Omega => "omega",
            SweepVariable::M => "m",
            SweepVariable::NumFiles => "num_files",
        }
    }

    fn integral(self) -> bool {
        matches!(self, SweepVariable::CacheSize | SweepVariable::NumFiles)
    }
}

/// `steps` evenly spaced values from `from` to `to`, both included.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::Usage("sweep range must be finite".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                (from * (steps - 1 - i) as f64 + to * i as f64) / (steps - 1) as f64
            }
        })
        .collect())
}

fn sweep_point(cfg: &Config, var: SweepVariable, v: f64) -> Result<Config, CliError> {
    let bad = |e: canoma::Error| CliError::Usage(format!("{} = {v}: {e}", var.name()));
    if var.integral() && (v < 0.0 || v.fract() != 0.0) {
        return Err(CliError::Usage(format!("{} takes whole numbers, got {v}", var.name())));
    }
    let cat = cfg.catalog;
    let out = match var {
        SweepVariable::Zeta => cfg.with_catalog(Catalog::new(cat.num_files, v, cat.cache_size).map_err(bad)?),
        SweepVariable::CacheSize => {
            cfg.with_catalog(Catalog::new(cat.num_files, cat.zeta, v as usize).map_err(bad)?)
        }
        SweepVariable::NumFiles => cfg.with_catalog(Catalog::new(v as usize, cat.zeta, cat.cache_size).map_err(bad)?),
        SweepVariable::SnrDb => cfg.with_snr_db(v),
        SweepVariable::Omega => cfg.with_omega(v),
        SweepVariable::M => cfg.with_m(v),
    };
    out.scenario.validate().map_err(bad)?;
    Ok(out)
}

/// Popularity-averaged success of cache-aided NOMA, cache-aided OMA and
/// conventional NOMA at each sweep value.
pub fn cmd_sweep(
    cfg: &Config,
    var: SweepVariable,
    from: f64,
    to: f64,
    steps: usize,
    workers: usize,
) -> Result<Report, CliError> {
    let values = sweep_values(from, to, steps)?;
    let points = values
        .iter()
        .map(|&v| sweep_point(cfg, var, v))
        .collect::<Result<Vec<_>, _>>()?;
    let eval = |c: &Config| -> Result<[f64; 3], canoma::Error> {
        Ok([
            average_noma_success(&c.scenario, &c.catalog, c.averaging)?,
            average_oma_success(&c.scenario, &c.catalog, c.averaging)?,
            average_conventional_success(&c.scenario, &c.catalog, c.averaging)?,
        ])
    };
    let results: Vec<Result<[f64; 3], canoma::Error>> = pool(workers)?.install(|| points.par_iter().map(eval).collect());
    let mut rows = Vec::with_capacity(values.len());
    for (v, r) in values.iter().zip(results) {
        let [noma, oma, conv] = r?;
        let x = if var.integral() { format!("{}", *v as usize) } else { num(*v) };
        rows.push(vec![x, num(noma), num(oma), num(conv)]);
    }
    let header = [var.name(), "avg_success_noma", "avg_success_oma", "avg_success_conventional"];
    Ok(Report {
        csv: csv_string(&header, &rows)?,
        notes: vec![],
        failed: false,
    })
}

/// Split-file objective over both branches on a `grid × grid` lattice each.
pub fn cmd_surface(cfg: &Config, grid: usize, workers: usize) -> Result<Report, CliError> {
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let at = |lo: f64, hi: f64, i: usize| if i == grid - 1 { hi } else { lo + (hi - lo) * i as f64 / (grid - 1) as f64 };
    let mut cells = Vec::with_capacity(2 * grid * grid);
    for branch in [Branch::Low, Branch::High] {
        let (alo, ahi) = split_alpha_range::<f64>(branch);
        for i in 0..grid {
            for j in 0..grid {
                cells.push((branch, at(alo, ahi, i), at(0.0, 1.0, j)));
            }
        }
    }
    let values: Vec<Result<f64, canoma::Error>> = pool(workers)?.install(|| {
        cells
            .par_iter()
            .map(|&(b, alpha, beta)| split_objective_on_branch(b, &SplitAllocation { alpha, beta }, &cfg.split))
            .collect()
    });
    let mut rows = Vec::with_capacity(cells.len());
    for (&(b, a, beta), v) in cells.iter().zip(values) {
        rows.push(vec![num(a), num(beta), b.name().to_string(), num(v?)]);
    }
    Ok(Report {
        csv: csv_string(&["alpha", "beta", "branch", "objective"], &rows)?,
        notes: vec![],
        failed: false,
    })
}

/// α values of the validation grid.
pub const VALIDATE_ALPHAS: [f64; 10] = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95];
/// `(α, β)` lattice values for the split validation.
pub const VALIDATE_SPLIT: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const MIN_VALIDATE_SAMPLES: u64 = 10_000;

/// Seed of validation cell `index`, spread so neighbouring cells do not share
/// ChaCha keys.
fn cell_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `|analytic - mc| <= max(0.005, 3 CI)`.
pub fn validation_passes(analytic: f64, mc: &McEstimate) -> bool {
    (analytic - mc.estimate).abs() <= 0.005f64.max(3.0 * mc.half_width)
}

/// Analytic values against Monte Carlo under the matching semantics.
pub fn cmd_validate(cfg: &Config, samples: u64, seed: u64, workers: usize) -> Result<Report, CliError> {
    if samples < MIN_VALIDATE_SAMPLES {
        return Err(CliError::Usage(format!("--samples must be at least {MIN_VALIDATE_SAMPLES}")));
    }
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let header = [
        "target", "case", "semantics", "branch", "alpha", "beta", "quantity", "analytic", "mc", "ci_half_width", "pass",
    ];
    let mut rows = Vec::new();
    let mut failures = 0usize;
    let mut cell = 0u64;
    let mut push = |rows: &mut Vec<Vec<String>>, key: [String; 6], vals: [(f64, McEstimate); 3]| {
        for (q, (analytic, mc)) in ["p1", "p2", "joint"].iter().zip(vals) {
            let ok = validation_passes(analytic, &mc);
            if !ok {
                failures += 1;
            }
            let mut row: Vec<String> = key.to_vec();
            row.extend([
                q.to_string(),
                num(analytic),
                num(mc.estimate),
                num(mc.half_width),
                if ok { "pass" } else { "FAIL" }.to_string(),
            ]);
            rows.push(row);
        }
    };
    for sem in [Semantics::PaperProduct, Semantics::JointEvent] {
        let c = cfg.with_semantics(sem);
        for case in CacheCase::FULL_FILE {
            for &alpha in &VALIDATE_ALPHAS {
                let mc_cfg = McConfig::new(samples, cell_seed(seed, cell), workers)?;
                cell += 1;
                let (p1, p2) = success_case(case, alpha, &c.scenario)?;
                let e = mc_case(case, alpha, &c.scenario, &mc_cfg)?;
                let branch = if case == CacheCase::A { "none" } else { Branch::of(alpha).name() };
                push(
                    &mut rows,
                    ["full".into(), case.name().into(), sem.name().into(), branch.into(), num(alpha), String::new()],
                    [(p1, e.p1), (p2, e.p2), (p1 * p2, e.joint)],
                );
            }
        }
        for &alpha in &VALIDATE_SPLIT {
            for &beta in &VALIDATE_SPLIT {
                let mc_cfg = McConfig::new(samples, cell_seed(seed, cell), workers)?;
                cell += 1;
                let branch = Branch::of(alpha);
                let alloc = SplitAllocation::new(alpha, beta)?;
                let (p1, p2) = split_joint_from_chains(branch, &alloc, &c.split)?;
                let e = mc_split(branch, &alloc, &c.split, &mc_cfg)?;
                push(
                    &mut rows,
                    ["split".into(), "a".into(), sem.name().into(), branch.name().into(), num(alpha), num(beta)],
                    [(p1, e.p1), (p2, e.p2), (p1 * p2, e.joint)],
                );
            }
        }
    }
    let total = rows.len();
    Ok(Report {
        csv: csv_string(&header, &rows)?,
        notes: vec![format!("{} of {total} cells passed", total - failures)],
        failed: failures > 0,
    })
}

/// Objective curves of the selected cases with a concavity verdict per branch.
pub fn cmd_concavity(cfg: &Config, selector: CaseSelector, grid: usize) -> Result<Report, CliError> {
    if grid < 11 {
        return Err(CliError::Usage("--grid must be at least 11".into()));
    }
    let cases: Vec<CacheCase> = match selector {
        CaseSelector::One(c) => vec![c],
        CaseSelector::All => CacheCase::FULL_FILE.to_vec(),
        CaseSelector::Split => return Err(CliError::Usage("concavity takes cases a, b, c, d or all".into())),
    };
    let sc = &cfg.scenario;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for case in cases {
        let spans: Vec<(Option<Branch>, f64, f64)> = if case == CacheCase::A {
            vec![(None, 0.0, 1.0)]
        } else {
            [Branch::Low, Branch::High]
                .into_iter()
                .map(|b| {
                    let (lo, hi) = branch_interval(b, sc);
                    (Some(b), lo, hi)
                })
                .collect()
        };
        for (branch, lo, hi) in spans {
            let f = |a: f64| -> Result<f64, canoma::Error> {
                let (p1, p2) = match branch {
                    Some(b) => success_on_branch(case, b, a, sc)?,
                    None => success_case(case, a, sc)?,
                };
                Ok(p1 * p2)
            };
            for i in 0..grid {
                let a = if i == grid - 1 { hi } else { lo + (hi - lo) * i as f64 / (grid - 1) as f64 };
                rows.push(vec![case.name().to_string(), branch_name(branch).to_string(), num(a), num(f(a)?)]);
            }
            for (scope, label) in [(ConcavityScope::Full, "full"), (ConcavityScope::Interior, "interior")] {
                let r = check_concavity_scoped(f, lo, hi, grid, 1e-6, scope)?;
                notes.push(format!(
                    "case={} branch={} range=[{lo}, {hi}] scope={label} concave={} worst_second_difference={:e} at alpha={}",
                    case.name(),
                    branch_name(branch),
                    r.concave,
                    r.worst,
                    r.worst_at
                ));
            }
        }
    }
    Ok(Report {
        csv: csv_string(&["case", "branch", "alpha", "objective"], &rows)?,
        notes,
        failed: false,
    })
}
