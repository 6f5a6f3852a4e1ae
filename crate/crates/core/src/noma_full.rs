//! Success probabilities for two vehicles served by one NOMA superposition
//! when whole files are cached (cases A to D), plus the conventional-NOMA and
//! OMA baselines and the popularity average.
//!
//! The BS sends `√(αP) F1 + √((1-α)P) F2`. V1 requests F1 over link 1, V2
//! requests F2 over link 2. A vehicle holding the other vehicle's file
//! cancels it before decoding; otherwise the file with the larger share is
//! decoded first (SIC) or treated as noise.

use crate::caching::{case_distribution, Averaging, CacheCase, Catalog};
use crate::channel::{DoubleNakagamiParams, Link, LinkGeometry};
use crate::error::{domain, Result};
use crate::scalar::Real;

/// How several SINR conditions on one channel gain are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Semantics {
    /// Product of the marginal probabilities of each condition.
    #[default]
    PaperProduct,
    /// Probability that the gain clears every condition at once.
    JointEvent,
}

impl Semantics {
    pub fn name(self) -> &'static str {
        match self {
            Semantics::PaperProduct => "paper_product",
            Semantics::JointEvent => "joint_event",
        }
    }
}

/// Power-split branch: `High` is `α > 0.5` (F1 gets the larger share).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    High,
    Low,
}

impl Branch {
    /// `α = 0.5` falls on the low branch.
    pub fn of<T: Real>(alpha: T) -> Branch {
        if alpha > T::lit(0.5) {
            Branch::High
        } else {
            Branch::Low
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::High => "high",
            Branch::Low => "low",
        }
    }
}

/// `SINR = S g² / (I g² + N) > γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition<T> {
    pub signal: T,
    pub interference: T,
    pub noise: T,
    pub threshold: T,
}

impl<T: Real> Condition<T> {
    pub fn new(signal: T, interference: T, noise: T, threshold: T) -> Self {
        Self {
            signal,
            interference,
            noise,
            threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.signal, self.interference, self.noise, self.threshold];
        if !vals.iter().all(|v| v.is_finite()) {
            return domain("condition coefficients must be finite");
        }
        if self.signal < T::zero() || self.interference < T::zero() {
            return domain("signal and interference coefficients must be >= 0");
        }
        if !(self.noise > T::zero() && self.threshold > T::zero()) {
            return domain("noise and threshold must be > 0");
        }
        Ok(())
    }

    /// The level of `g²` the condition requires, `None` if unreachable.
    pub fn gain_threshold(&self) -> Option<T> {
        gain_threshold(self.signal, self.interference, self.noise, self.threshold)
    }

    /// Direct SINR test on a realized `g²`.
    pub fn holds(&self, gain_sq: T) -> bool {
        self.signal * gain_sq > self.threshold * (self.interference * gain_sq + self.noise)
    }
}

/// Returns `γN/(S-γI)` when `S > γI`, else `None` (the event has probability 0).
pub fn gain_threshold<T: Real>(signal: T, interference: T, noise: T, threshold: T) -> Option<T> {
    let margin = signal - threshold * interference;
    if margin > T::zero() {
        Some(threshold * noise / margin)
    } else {
        None
    }
}

/// Ordered SINR conditions that must all hold on one link's gain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeChain<T> {
    conditions: Vec<Condition<T>>,
}

impl<T: Real> DecodeChain<T> {
    pub fn new(conditions: Vec<Condition<T>>) -> Result<Self> {
        if conditions.is_empty() {
            return domain("decode chain must contain at least one condition");
        }
        for c in &conditions {
            c.validate()?;
        }
        Ok(Self { conditions })
    }

    pub fn single(c: Condition<T>) -> Result<Self> {
        Self::new(vec![c])
    }

    pub fn conditions(&self) -> &[Condition<T>] {
        &self.conditions
    }

    /// Gain thresholds in chain order; `None` marks an infeasible condition.
    pub fn thresholds(&self) -> Vec<Option<T>> {
        self.conditions.iter().map(|c| c.gain_threshold()).collect()
    }
}

/// Probability of the chain on the given link.
pub fn chain_probability<T: Real>(
    chain: &DecodeChain<T>,
    chan: &DoubleNakagamiParams<T>,
    geom: &LinkGeometry<T>,
    semantics: Semantics,
) -> Result<T> {
    let link = Link::new(chan, geom)?;
    chain_probability_on(chain, &link, semantics)
}

pub fn chain_probability_on<T: Real>(chain: &DecodeChain<T>, link: &Link<T>, semantics: Semantics) -> Result<T> {
    let mut levels = Vec::with_capacity(chain.conditions.len());
    for c in &chain.conditions {
        match c.gain_threshold() {
            Some(x) => levels.push(x),
            None => return Ok(T::zero()),
        }
    }
    match semantics {
        Semantics::JointEvent => {
            let top = levels.iter().fold(T::zero(), |m, &x| m.max(x));
            link.survival(top)
        }
        Semantics::PaperProduct => {
            let mut p = T::one();
            for x in levels {
                p = p * link.survival(x)?;
            }
            Ok(p)
        }
    }
}

/// System parameters for one pair of vehicles; `α` is supplied per call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullScenario<T> {
    pub power: T,
    pub sigma1_sq: T,
    pub sigma2_sq: T,
    pub gamma1: T,
    pub gamma2: T,
    pub chan1: DoubleNakagamiParams<T>,
    pub chan2: DoubleNakagamiParams<T>,
    pub geom1: LinkGeometry<T>,
    pub geom2: LinkGeometry<T>,
    pub semantics: Semantics,
}

impl<T: Real> FullScenario<T> {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("power", self.power),
            ("sigma1_sq", self.sigma1_sq),
            ("sigma2_sq", self.sigma2_sq),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > T::zero()) {
                return domain(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        self.chan1.validate()?;
        self.chan2.validate()?;
        self.geom1.validate()?;
        self.geom2.validate()?;
        Ok(())
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn links(&self) -> Result<(Link<T>, Link<T>)> {
        self.validate()?;
        Ok((Link::new(&self.chan1, &self.geom1)?, Link::new(&self.chan2, &self.geom2)?))
    }
}

/// Decoding chains of both vehicles for one case and power split.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseChains<T> {
    pub v1: DecodeChain<T>,
    pub v2: DecodeChain<T>,
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    Ok(())
}

/// Chains for `case` at `alpha` on the branch selected by `alpha`.
pub fn case_chains<T: Real>(case: CacheCase, alpha: T, sc: &FullScenario<T>) -> Result<CaseChains<T>> {
    case_chains_on_branch(case, Branch::of(alpha), alpha, sc)
}

/// Chains for `case` with the decoding order of `branch`, whatever `alpha`.
/// Case A has no decoding order and ignores `branch`.
pub fn case_chains_on_branch<T: Real>(
    case: CacheCase,
    branch: Branch,
    alpha: T,
    sc: &FullScenario<T>,
) -> Result<CaseChains<T>> {
    check_alpha(alpha)?;
    sc.validate()?;
    let p = sc.power;
    let a = alpha * p;
    let b = (T::one() - alpha) * p;
    let z = T::zero();
    let (s1, s2, g1, g2) = (sc.sigma1_sq, sc.sigma2_sq, sc.gamma1, sc.gamma2);
    let c = Condition::new;
    // Interference-free decoding of each vehicle's own file.
    let own1 = c(a, z, s1, g1);
    let own2 = c(b, z, s2, g2);
    let (v1, v2) = match (case, branch) {
        (CacheCase::A, _) => (vec![own1], vec![own2]),
        (CacheCase::B, Branch::Low) => (vec![own1], vec![c(b, a, s2, g2)]),
        (CacheCase::B, Branch::High) => (vec![own1], vec![c(a, b, s2, g1), own2]),
        (CacheCase::C, Branch::High) => (vec![c(a, b, s1, g1)], vec![own2]),
        (CacheCase::C, Branch::Low) => (vec![c(b, a, s1, g2), own1], vec![own2]),
        (CacheCase::D, Branch::High) => (vec![c(a, b, s1, g1)], vec![c(a, b, s2, g1), own2]),
        (CacheCase::D, Branch::Low) => (vec![c(b, a, s1, g2), own1], vec![c(b, a, s2, g2)]),
        (other, _) => return domain(format!("case {other} has no NOMA decoding chains")),
    };
    Ok(CaseChains {
        v1: DecodeChain::new(v1)?,
        v2: DecodeChain::new(v2)?,
    })
}

/// `(p1, p2)` for `case` with an explicit decoding branch.
pub fn success_on_branch<T: Real>(
    case: CacheCase,
    branch: Branch,
    alpha: T,
    sc: &FullScenario<T>,
) -> Result<(T, T)> {
    let chains = case_chains_on_branch(case, branch, alpha, sc)?;
    let (l1, l2) = sc.links()?;
    Ok((
        chain_probability_on(&chains.v1, &l1, sc.semantics)?,
        chain_probability_on(&chains.v2, &l2, sc.semantics)?,
    ))
}

/// `(p1, p2)` for `case` at `alpha`; branch picked by `alpha` with the tie
/// `α = 0.5` on the low branch.
pub fn success_case<T: Real>(case: CacheCase, alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_on_branch(case, Branch::of(alpha), alpha, sc)
}

/// Both vehicles hold each other's file: no interference at either.
pub fn success_case_a<T: Real>(alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_case(CacheCase::A, alpha, sc)
}

/// Only V1 holds F2.
pub fn success_case_b<T: Real>(alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_case(CacheCase::B, alpha, sc)
}

/// Only V2 holds F1.
pub fn success_case_c<T: Real>(alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_case(CacheCase::C, alpha, sc)
}

/// Neither vehicle holds the other's file.
pub fn success_case_d<T: Real>(alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_case(CacheCase::D, alpha, sc)
}

/// NOMA without caches; every transmission is a case-D transmission.
pub fn conventional_noma_success<T: Real>(alpha: T, sc: &FullScenario<T>) -> Result<(T, T)> {
    success_case_d(alpha, sc)
}

/// `(1+γ)² - 1`: the threshold on a half-resource link for equal rate.
pub fn oma_threshold<T: Real>(gamma: T) -> T {
    let one_plus = T::one() + gamma;
    one_plus * one_plus - T::one()
}

/// Orthogonal baseline: each vehicle gets half the resource at power `P`.
pub fn oma_success<T: Real>(sc: &FullScenario<T>) -> Result<(T, T)> {
    let (l1, l2) = sc.links()?;
    let t1 = oma_threshold(sc.gamma1) * sc.sigma1_sq / sc.power;
    let t2 = oma_threshold(sc.gamma2) * sc.sigma2_sq / sc.power;
    Ok((l1.survival(t1)?, l2.survival(t2)?))
}

/// Joint success for the non-NOMA request outcomes.
///
/// A self-hit leaves the other vehicle alone on its link at full power; a
/// common request is one broadcast both vehicles decode independently.
pub fn degenerate_success<T: Real>(case: CacheCase, sc: &FullScenario<T>) -> Result<T> {
    let (l1, l2) = sc.links()?;
    let solo1 = |gamma: T| l1.survival(gamma * sc.sigma1_sq / sc.power);
    let solo2 = |gamma: T| l2.survival(gamma * sc.sigma2_sq / sc.power);
    match case {
        CacheCase::SelfHit1 => solo2(sc.gamma2),
        CacheCase::SelfHit2 => solo1(sc.gamma1),
        CacheCase::SelfHitBoth => Ok(T::one()),
        CacheCase::CommonRequest => Ok(solo1(sc.gamma1)? * solo2(sc.gamma1)?),
        other => domain(format!("case {other} is served by NOMA")),
    }
}

/// Popularity-weighted joint success.
///
/// `noma_value(case)` supplies the joint success used for cases A to D
/// (normally the optimized `p1·p2`); the other outcomes use
/// [`degenerate_success`]. Cases with zero weight are never evaluated.
pub fn average_success<T, F>(
    sc: &FullScenario<T>,
    catalog: &Catalog<T>,
    averaging: Averaging,
    mut noma_value: F,
) -> Result<T>
where
    T: Real,
    F: FnMut(CacheCase) -> Result<T>,
{
    let weights = case_distribution(catalog)?.weights(averaging)?;
    let mut total = T::zero();
    for (case, w) in weights.iter() {
        if w == T::zero() {
            continue;
        }
        let v = if case.is_noma_case() {
            noma_value(case)?
        } else {
            degenerate_success(case, sc)?
        };
        total = total + w * v;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    fn baseline() -> FullScenario<f64> {
        let chan = DoubleNakagamiParams::symmetric(1.0, 2.0).unwrap();
        FullScenario {
            power: 10.0,
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
            gamma1: 1.0,
            gamma2: 1.0,
            chan1: chan,
            chan2: chan,
            geom1: LinkGeometry::new(1.0, 2.0).unwrap(),
            geom2: LinkGeometry::new(0.5, 2.0).unwrap(),
            semantics: Semantics::PaperProduct,
        }
    }

    fn closed_survival(x: f64, theta: f64) -> f64 {
        let u = (x / theta).sqrt();
        2.0 * u * bessel_k(1.0, 2.0 * u).unwrap()
    }

    #[test]
    fn gain_threshold_examples() {
        assert_eq!(gain_threshold(5.0, 0.0, 1.0, 1.0), Some(0.2));
        assert_eq!(gain_threshold(5.0, 5.0, 1.0, 1.0), None);
        let t = gain_threshold(5.0f64, 2.0, 1.0, 1.0).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(gain_threshold(0.0, 0.0, 1.0, 1.0), None);
    }

    #[test]
    fn threshold_agrees_with_direct_sinr() {
        let c = Condition::new(5.0, 2.0, 1.0, 1.0);
        let x = c.gain_threshold().unwrap();
        assert!(c.holds(x * 1.000001));
        assert!(!c.holds(x * 0.999999));
    }

    #[test]
    fn chain_examples() {
        let unit = DoubleNakagamiParams::symmetric(1.0, 1.0).unwrap();
        let geom = LinkGeometry::unit();
        let c1 = Condition::new(5.0f64, 0.0, 1.0, 1.0);
        let c2 = Condition::new(2.0, 0.0, 1.0, 1.0);
        let chain = DecodeChain::new(vec![c1, c2]).unwrap();
        let joint = chain_probability(&chain, &unit, &geom, Semantics::JointEvent).unwrap();
        let prod = chain_probability(&chain, &unit, &geom, Semantics::PaperProduct).unwrap();
        assert!((joint - 0.4443425236322360).abs() < 1e-9);
        assert!((prod - 0.2876335256138369).abs() < 1e-9);

        let single = DecodeChain::single(c1).unwrap();
        let a = chain_probability(&single, &unit, &geom, Semantics::JointEvent).unwrap();
        let b = chain_probability(&single, &unit, &geom, Semantics::PaperProduct).unwrap();
        assert_eq!(a, b);
        assert!((a - 0.6473238781258292).abs() < 1e-9);

        let dead = DecodeChain::new(vec![c1, Condition::new(1.0, 1.0, 1.0, 1.0)]).unwrap();
        for s in [Semantics::JointEvent, Semantics::PaperProduct] {
            assert_eq!(chain_probability(&dead, &unit, &geom, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_chains() {
        assert!(DecodeChain::<f64>::new(vec![]).is_err());
        assert!(DecodeChain::single(Condition::new(-1.0, 0.0, 1.0, 1.0)).is_err());
        assert!(DecodeChain::single(Condition::new(1.0, 0.0, 0.0, 1.0)).is_err());
        assert!(DecodeChain::single(Condition::new(1.0, f64::NAN, 1.0, 1.0)).is_err());
    }

    #[test]
    fn case_a_at_table_one() {
        let sc = baseline();
        let (p1, p2) = success_case_a(0.5, &sc).unwrap();
        // θ = 4; link 1 at unit distance, link 2 gains ×4.
        assert!((p1 - 0.8524541736057921).abs() < 1e-9);
        assert!((p1 - closed_survival(0.2, 4.0)).abs() < 1e-9);
        assert!((p2 - closed_survival(0.2 / 4.0, 4.0)).abs() < 1e-9);
        assert_eq!(success_case_a(0.0, &sc).unwrap().0, 0.0);
        assert_eq!(success_case_a(1.0, &sc).unwrap().1, 0.0);
        assert!(success_case_a(1.1, &sc).is_err());
        assert!(success_case_a(-0.1, &sc).is_err());
    }

    #[test]
    fn case_b_regions() {
        let mut sc = baseline();
        // Low branch is infeasible above 1/(1+γ2) = 0.25.
        sc.gamma2 = 3.0;
        assert_eq!(success_case_b(0.3, &sc).unwrap().1, 0.0);
        sc.gamma2 = 1.0;
        sc.gamma1 = 3.0;
        // High branch needs α > γ1/(1+γ1) = 0.75.
        assert_eq!(success_case_b(0.7, &sc).unwrap().1, 0.0);
        assert!(success_case_b(0.8, &sc).unwrap().1 > 0.0);

        let sc = baseline();
        let chains = case_chains(CacheCase::B, 0.4, &sc).unwrap();
        let t = chains.v2.thresholds()[0].unwrap();
        assert!((t - 1.0 / (0.2 * sc.power)).abs() < 1e-15);
    }

    #[test]
    fn case_c_mirrors_case_b() {
        let chan = DoubleNakagamiParams::new(1.5, 0.8, 2.0, 1.0).unwrap();
        let sc = FullScenario {
            chan1: chan,
            chan2: chan,
            geom2: LinkGeometry::new(1.0, 2.0).unwrap(),
            ..baseline()
        };
        for &alpha in &[0.1, 0.3, 0.45, 0.55, 0.7, 0.9] {
            for sem in [Semantics::PaperProduct, Semantics::JointEvent] {
                let sc = sc.with_semantics(sem);
                let (b1, b2) = success_case_b(alpha, &sc).unwrap();
                let (c1, c2) = success_case_c(1.0 - alpha, &sc).unwrap();
                assert!((b1 - c2).abs() < 1e-12 && (b2 - c1).abs() < 1e-12, "α = {alpha}");
            }
        }
        let sc = baseline();
        assert_eq!(success_case_c(1.0, &sc).unwrap().1, 0.0);
    }

    #[test]
    fn case_d_tie_uses_low_branch() {
        let sc = baseline();
        let tie = success_case_d(0.5, &sc).unwrap();
        let low = success_on_branch(CacheCase::D, Branch::Low, 0.5, &sc).unwrap();
        assert_eq!(tie, low);
        assert_eq!(conventional_noma_success(0.5, &sc).unwrap(), low);
        // At γ1 = 1 the high branch is infeasible exactly at α = 0.5.
        let high = success_on_branch(CacheCase::D, Branch::High, 0.5, &sc).unwrap();
        assert_eq!(high.0, 0.0);
        assert!(success_case_d(0.5001, &sc).unwrap().0 > 0.0);
    }

    #[test]
    fn oma_baseline() {
        assert_eq!(oma_threshold(1.0), 3.0);
        let sc = baseline();
        let (p1, _) = oma_success(&sc).unwrap();
        assert!((p1 - 0.8060739270546286).abs() < 1e-9);
        let tiny = FullScenario {
            gamma1: 1e-12,
            gamma2: 1e-12,
            ..sc
        };
        let (q1, q2) = oma_success(&tiny).unwrap();
        assert!(q1 > 0.999_99 && q2 > 0.999_99);
    }

    #[test]
    fn probabilities_bounded_and_ordered() {
        let sc = baseline();
        for case in CacheCase::FULL_FILE {
            for i in 0..=20 {
                let alpha = i as f64 / 20.0;
                let (pp1, pp2) = success_case(case, alpha, &sc).unwrap();
                let (jj1, jj2) = success_case(case, alpha, &sc.with_semantics(Semantics::JointEvent)).unwrap();
                for v in [pp1, pp2, jj1, jj2] {
                    assert!((0.0..=1.0).contains(&v));
                }
                assert!(jj1 >= pp1 - 1e-15 && jj2 >= pp2 - 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_outcomes() {
        let sc = baseline();
        assert_eq!(degenerate_success(CacheCase::SelfHitBoth, &sc).unwrap(), 1.0);
        let s1 = degenerate_success(CacheCase::SelfHit2, &sc).unwrap();
        assert!((s1 - closed_survival(0.1, 4.0)).abs() < 1e-9);
        let s2 = degenerate_success(CacheCase::SelfHit1, &sc).unwrap();
        assert!((s2 - closed_survival(0.025, 4.0)).abs() < 1e-9);
        let both = degenerate_success(CacheCase::CommonRequest, &sc).unwrap();
        assert!((both - s1 * s2).abs() < 1e-12);
        assert!(degenerate_success(CacheCase::A, &sc).is_err());
    }

    #[test]
    fn average_with_everything_cached() {
        let sc = baseline();
        let cat = Catalog::new(5, 0.5, 5).unwrap();
        let v = average_success(&sc, &cat, Averaging::CasesOnly, |_| unreachable!()).unwrap();
        assert_eq!(v, 1.0);
    }
}
