//! Power-allocation search: golden-section line search on concave
//! objectives, coordinate ascent over `(α, β)`, and a numerical concavity
//! check by second differences.

use crate::caching::{Averaging, CacheCase, Catalog};
use crate::error::{domain, Error, Result};
use crate::noma_full::{average_success, oma_success, success_on_branch, Branch, FullScenario};
use crate::noma_split::{split_objective_on_branch, SplitAllocation, SplitScenario};
use crate::scalar::Real;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Argmax<T> {
    Scalar(T),
    Pair(T, T),
}

impl<T: Copy> Argmax<T> {
    pub fn first(&self) -> T {
        match *self {
            Argmax::Scalar(x) | Argmax::Pair(x, _) => x,
        }
    }

    pub fn second(&self) -> Option<T> {
        match *self {
            Argmax::Scalar(_) => None,
            Argmax::Pair(_, y) => Some(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult<T> {
    pub argmax: Argmax<T>,
    pub value: T,
    pub evaluations: usize,
    /// `None` when the objective has a single decoding order (case A).
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptOptions<T> {
    /// Final bracket width for line searches, and the improvement below which
    /// coordinate ascent stops.
    pub tol: T,
    pub max_iter: usize,
    /// Uniform seeding grid per dimension.
    pub coarse_grid: usize,
}

impl<T: Real> Default for OptOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            max_iter: 200,
            coarse_grid: 21,
        }
    }
}

impl<T: Real> OptOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero() && self.tol.is_finite()) {
            return domain(format!("tolerance must be finite and > 0, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        if self.coarse_grid < 3 {
            return domain("coarse grid needs at least 3 points");
        }
        Ok(())
    }
}

struct Counted<F> {
    f: F,
    calls: usize,
}

impl<F> Counted<F> {
    fn eval<T: Real>(&mut self, x: T) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        self.calls += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("objective not finite at {x}: {v}")));
        }
        Ok(v)
    }
}

fn check_interval<T: Real>(lo: T, hi: T) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain(format!("search interval requires finite lo < hi, got [{lo}, {hi}]"));
    }
    Ok(())
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol`; both endpoints are also evaluated so monotone objectives resolve to
/// the right boundary. Returns `(argmax, value)`.
fn golden<T: Real, F: FnMut(T) -> Result<T>>(
    f: &mut Counted<F>,
    lo: T,
    hi: T,
    tol: T,
    max_iter: usize,
) -> Result<(T, T)> {
    let r = T::lit(INV_PHI);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f.eval(x1)?;
    let mut f2 = f.eval(x2)?;
    let mut iter = 0;
    while b - a > tol && iter < max_iter {
        iter += 1;
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f.eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f.eval(x1)?;
        }
    }
    let mut best = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    for x in [lo, hi] {
        let v = f.eval(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn maximize_1d<T, F>(f: F, lo: T, hi: T, tol: T) -> Result<OptResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    check_interval(lo, hi)?;
    let opts = OptOptions { tol, ..OptOptions::default() };
    opts.validate()?;
    let mut f = Counted { f, calls: 0 };
    let (x, v) = golden(&mut f, lo, hi, tol, opts.max_iter)?;
    Ok(OptResult {
        argmax: Argmax::Scalar(x),
        value: v,
        evaluations: f.calls,
        branch: None,
    })
}

/// Coarse grid first, then golden section inside the two cells around the
/// best grid point. Copes with objectives that vanish on part of the range.
fn seeded_line_search<T: Real, F: FnMut(T) -> Result<T>>(
    f: &mut Counted<F>,
    lo: T,
    hi: T,
    opts: &OptOptions<T>,
) -> Result<(T, T)> {
    let n = opts.coarse_grid;
    let step = (hi - lo) / T::lit((n - 1) as f64);
    let grid = |i: usize| if i == n - 1 { hi } else { lo + step * T::lit(i as f64) };
    let mut best = (lo, T::neg_infinity());
    let mut best_i = 0;
    for i in 0..n {
        let x = grid(i);
        let v = f.eval(x)?;
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = grid(best_i.saturating_sub(1));
    let b = grid((best_i + 1).min(n - 1));
    let refined = golden(f, a, b, opts.tol, opts.max_iter)?;
    Ok(if refined.1 > best.1 { refined } else { best })
}

/// Search interval of `branch` for cases B to D: the part of the branch half
/// where the first SIC condition can hold.
pub fn branch_interval<T: Real>(branch: Branch, sc: &FullScenario<T>) -> (T, T) {
    let half = T::lit(0.5);
    match branch {
        Branch::High => ((sc.gamma1 / (T::one() + sc.gamma1)).max(half), T::one()),
        Branch::Low => (T::zero(), (T::one() / (T::one() + sc.gamma2)).min(half)),
    }
}

/// Best joint success `p1·p2` for one of cases A to D.
pub fn optimize_case<T: Real>(case: CacheCase, sc: &FullScenario<T>) -> Result<OptResult<T>> {
    optimize_case_with(case, sc, &OptOptions::default())
}

pub fn optimize_case_with<T: Real>(
    case: CacheCase,
    sc: &FullScenario<T>,
    opts: &OptOptions<T>,
) -> Result<OptResult<T>> {
    opts.validate()?;
    sc.validate()?;
    if !case.is_noma_case() {
        return domain(format!("case {case} has no power allocation to optimize"));
    }
    let run = |branch: Branch, lo: T, hi: T| -> Result<OptResult<T>> {
        let objective = |a: T| success_on_branch(case, branch, a, sc).map(|(p1, p2)| p1 * p2);
        let mut f = Counted { f: objective, calls: 0 };
        let (x, v) = seeded_line_search(&mut f, lo, hi, opts)?;
        Ok(OptResult {
            argmax: Argmax::Scalar(x),
            value: v,
            evaluations: f.calls,
            branch: Some(branch),
        })
    };
    if case == CacheCase::A {
        let mut r = run(Branch::Low, T::zero(), T::one())?;
        r.branch = None;
        return Ok(r);
    }
    let (hl, hh) = branch_interval(Branch::High, sc);
    let (ll, lh) = branch_interval(Branch::Low, sc);
    let high = run(Branch::High, hl, hh)?;
    let low = run(Branch::Low, ll, lh)?;
    let evaluations = high.evaluations + low.evaluations;
    let best = if high.value > low.value { high } else { low };
    Ok(OptResult { evaluations, ..best })
}

/// Best `(α, β)` for the split-file objective over both branches.
pub fn optimize_split<T: Real>(sc: &SplitScenario<T>, tol: T) -> Result<OptResult<T>> {
    optimize_split_with(sc, &OptOptions { tol, ..OptOptions::default() })
}

pub fn optimize_split_with<T: Real>(sc: &SplitScenario<T>, opts: &OptOptions<T>) -> Result<OptResult<T>> {
    opts.validate()?;
    sc.validate()?;
    let high = optimize_split_branch(Branch::High, sc, opts)?;
    let low = optimize_split_branch(Branch::Low, sc, opts)?;
    let evaluations = high.evaluations + low.evaluations;
    let best = if high.value > low.value { high } else { low };
    Ok(OptResult { evaluations, ..best })
}

/// `α` range searched for the split objective on `branch`; both include 0.5.
pub fn split_alpha_range<T: Real>(branch: Branch) -> (T, T) {
    let half = T::lit(0.5);
    match branch {
        Branch::High => (half, T::one()),
        Branch::Low => (T::zero(), half),
    }
}

/// Coordinate ascent on one branch from the best point of a coarse grid.
pub fn optimize_split_branch<T: Real>(
    branch: Branch,
    sc: &SplitScenario<T>,
    opts: &OptOptions<T>,
) -> Result<OptResult<T>> {
    opts.validate()?;
    let (alo, ahi) = split_alpha_range::<T>(branch);
    let mut calls = 0usize;
    let mut eval = |a: T, b: T| -> Result<T> {
        calls += 1;
        let v = split_objective_on_branch(branch, &SplitAllocation { alpha: a, beta: b }, sc)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("split objective not finite at ({a}, {b})")));
        }
        Ok(v)
    };

    let n = opts.coarse_grid;
    let at = |lo: T, hi: T, i: usize| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * T::lit(i as f64 / (n - 1) as f64)
        }
    };
    let (mut a, mut b, mut best) = (alo, T::zero(), T::neg_infinity());
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (at(alo, ahi, i), at(T::zero(), T::one(), j));
            let v = eval(x, y)?;
            if v > best {
                (a, b, best) = (x, y, v);
            }
        }
    }

    for _ in 0..opts.max_iter {
        let start = best;
        {
            let mut line = Counted {
                f: |y: T| eval(a, y),
                calls: 0,
            };
            let (y, v) = seeded_line_search(&mut line, T::zero(), T::one(), opts)?;
            if v > best {
                (b, best) = (y, v);
            }
        }
        {
            let mut line = Counted {
                f: |x: T| eval(x, b),
                calls: 0,
            };
            let (x, v) = seeded_line_search(&mut line, alo, ahi, opts)?;
            if v > best {
                (a, best) = (x, v);
            }
        }
        if best - start < opts.tol {
            break;
        }
    }
    Ok(OptResult {
        argmax: Argmax::Pair(a, b),
        value: best,
        evaluations: calls,
        branch: Some(branch),
    })
}

/// Outcome of a second-difference concavity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityReport<T> {
    pub concave: bool,
    /// Largest centered second difference `f(x-h) - 2f(x) + f(x+h)`.
    pub worst: T,
    pub worst_at: T,
    /// Number of grid centers tested.
    pub checked: usize,
}

/// Which grid centers a concavity check looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcavityScope {
    /// Every interior grid point.
    Full,
    /// Centers whose stencil stays off both interval endpoints.
    Interior,
    /// Centers where `f` is positive at all three stencil points.
    Support,
}

/// Second-difference concavity test restricted to `scope`.
pub fn check_concavity_scoped<T, F>(
    mut f: F,
    lo: T,
    hi: T,
    grid_n: usize,
    tol: T,
    scope: ConcavityScope,
) -> Result<ConcavityReport<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    check_interval(lo, hi)?;
    if grid_n < 5 {
        return domain(format!("concavity grid needs at least 5 points, got {grid_n}"));
    }
    let xs: Vec<T> = (0..grid_n)
        .map(|i| {
            if i == grid_n - 1 {
                hi
            } else {
                lo + (hi - lo) * T::lit(i as f64 / (grid_n - 1) as f64)
            }
        })
        .collect();
    let mut ys = Vec::with_capacity(grid_n);
    for &x in &xs {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("function not finite at {x}: {v}")));
        }
        ys.push(v);
    }
    let mut worst = T::neg_infinity();
    let mut worst_at = xs[0];
    let mut checked = 0;
    for i in 1..grid_n - 1 {
        let skip = match scope {
            ConcavityScope::Full => false,
            ConcavityScope::Interior => i == 1 || i == grid_n - 2,
            ConcavityScope::Support => ys[i - 1] <= T::zero() || ys[i] <= T::zero() || ys[i + 1] <= T::zero(),
        };
        if skip {
            continue;
        }
        checked += 1;
        let d2 = ys[i - 1] - T::lit(2.0) * ys[i] + ys[i + 1];
        if d2 > worst {
            worst = d2;
            worst_at = xs[i];
        }
    }
    if checked == 0 {
        worst = T::zero();
    }
    Ok(ConcavityReport {
        concave: worst <= tol,
        worst,
        worst_at,
        checked,
    })
}

/// Centered second differences of `f` on a uniform `grid_n`-point grid;
/// concave iff every one is `<= tol`.
pub fn check_concavity<T, F>(f: F, lo: T, hi: T, grid_n: usize, tol: T) -> Result<ConcavityReport<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    check_concavity_scoped(f, lo, hi, grid_n, tol, ConcavityScope::Full)
}


/// Cache-aided NOMA averaged over requests with each case at its optimum.
pub fn average_noma_success<T: Real>(sc: &FullScenario<T>, catalog: &Catalog<T>, averaging: Averaging) -> Result<T> {
    average_success(sc, catalog, averaging, |case| optimize_case(case, sc).map(|r| r.value))
}

/// NOMA without caches: the same requests with every vehicle cache empty.
pub fn average_conventional_success<T: Real>(
    sc: &FullScenario<T>,
    catalog: &Catalog<T>,
    averaging: Averaging,
) -> Result<T> {
    let empty = Catalog {
        cache_size: 0,
        ..*catalog
    };
    average_noma_success(sc, &empty, averaging)
}

/// Cache-aided OMA: self-hits and common requests as for NOMA, orthogonal
/// transmission for every other request pair.
pub fn average_oma_success<T: Real>(sc: &FullScenario<T>, catalog: &Catalog<T>, averaging: Averaging) -> Result<T> {
    let (p1, p2) = oma_success(sc)?;
    average_success(sc, catalog, averaging, |_| Ok(p1 * p2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_peak() {
        let r = maximize_1d(|a: f64| Ok(-(a - 0.3) * (a - 0.3)), 0.0, 1.0, 1e-6).unwrap();
        assert!((r.argmax.first() - 0.3).abs() < 1e-6);
        assert!(r.value <= 0.0 && r.value > -1e-12);
    }

    #[test]
    fn constant_and_monotone() {
        let r = maximize_1d(|_a: f64| Ok(0.25), 0.0, 1.0, 1e-6).unwrap();
        assert_eq!(r.value, 0.25);
        let x = r.argmax.first();
        assert!((0.0..=1.0).contains(&x));
        let r = maximize_1d(|a: f64| Ok(a), 0.0, 1.0, 1e-6).unwrap();
        assert_eq!(r.argmax.first(), 1.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(maximize_1d(|a: f64| Ok(a), 1.0, 0.0, 1e-6).is_err());
        assert!(maximize_1d(|a: f64| Ok(a), 0.0, 1.0, 0.0).is_err());
        assert!(matches!(
            maximize_1d(|_a: f64| Ok(f64::NAN), 0.0, 1.0, 1e-6),
            Err(Error::Evaluation(_))
        ));
        assert!(check_concavity(|x: f64| Ok(x), 0.0, 1.0, 4, 1e-6).is_err());
    }

    #[test]
    fn concavity_examples() {
        let r = check_concavity(|x: f64| Ok(-x * x), -1.0, 1.0, 101, 1e-6).unwrap();
        assert!(r.concave);
        let r = check_concavity(|x: f64| Ok(x * x * x), -1.0, 1.0, 101, 1e-6).unwrap();
        assert!(!r.concave);
        assert!(r.worst_at > 0.0);
        let kinked = |x: f64| Ok(if x < 0.0 { 0.0 } else { 1.0 - x * x });
        let r = check_concavity_scoped(kinked, -1.0, 1.0, 101, 1e-6, ConcavityScope::Support).unwrap();
        assert!(r.concave);
        assert!(r.checked < 99);
        let r = check_concavity_scoped(|x: f64| Ok(x.abs().sqrt()), 0.0, 1.0, 101, 1e-6, ConcavityScope::Interior)
            .unwrap();
        assert!(r.concave && r.checked == 97);
        assert!(!check_concavity(|x: f64| Ok(x.abs().sqrt()), -0.01, 1.0, 102, 1e-6).unwrap().concave);
    }
}
