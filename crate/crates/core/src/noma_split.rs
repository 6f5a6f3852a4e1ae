//! Split-file caching: each file is cut into two sub-files, `F_l = (F_l⁽¹⁾, F_l⁽²⁾)`,
//! with V1 holding F2⁽¹⁾ and V2 holding F1⁽¹⁾.
//!
//! The BS sends
//! `√(αβP) F1⁽¹⁾ + √(α(1-β)P) F1⁽²⁾ + √((1-α)βP) F2⁽¹⁾ + √((1-α)(1-β)P) F2⁽²⁾`.
//! On the high branch (`α > 0.5`) V1 decodes its two sub-files directly while
//! V2 first strips F1⁽²⁾; on the low branch the roles are swapped. Each
//! vehicle's conditions act on its own gain, so each vehicle is one chain.

use crate::error::{domain, Result};
use crate::noma_full::{chain_probability_on, Branch, CaseChains, Condition, DecodeChain, FullScenario, Semantics};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScenario<T> {
    pub base: FullScenario<T>,
    pub gamma11: T,
    pub gamma12: T,
    pub gamma21: T,
    pub gamma22: T,
}

impl<T: Real> SplitScenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for (name, g) in [
            ("gamma11", self.gamma11),
            ("gamma12", self.gamma12),
            ("gamma21", self.gamma21),
            ("gamma22", self.gamma22),
        ] {
            if !(g.is_finite() && g > T::zero()) {
                return domain(format!("{name} must be finite and > 0, got {g}"));
            }
        }
        Ok(())
    }
}

/// Power split between the files (`alpha`) and between sub-files (`beta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitAllocation<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> SplitAllocation<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let a = Self { alpha, beta };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !(unit(self.alpha) && unit(self.beta)) {
            return domain(format!(
                "alpha and beta must lie in [0, 1], got ({}, {})",
                self.alpha, self.beta
            ));
        }
        Ok(())
    }
}

/// The two chains with the decoding order of `branch`.
///
/// High branch: V1 has two conditions, V2 three. Low branch: V2 two, V1 three.
pub fn split_decode_chains<T: Real>(
    branch: Branch,
    alloc: &SplitAllocation<T>,
    sc: &SplitScenario<T>,
) -> Result<CaseChains<T>> {
    alloc.validate()?;
    sc.validate()?;
    let p = sc.base.power;
    let (a, b) = (alloc.alpha, alloc.beta);
    let (na, nb) = (T::one() - a, T::one() - b);
    let (s1, s2) = (sc.base.sigma1_sq, sc.base.sigma2_sq);
    let c = Condition::new;
    let z = T::zero();
    let (v1, v2) = match branch {
        Branch::High => (
            vec![c(a * b * p, nb * p, s1, sc.gamma11), c(a * nb * p, na * nb * p, s1, sc.gamma12)],
            vec![
                c(a * nb * p, na * p, s2, sc.gamma12),
                c(b * na * p, na * nb * p, s2, sc.gamma21),
                c(nb * na * p, z, s2, sc.gamma22),
            ],
        ),
        Branch::Low => (
            vec![
                c(na * nb * p, a * p, s1, sc.gamma22),
                c(a * b * p, a * nb * p, s1, sc.gamma11),
                c(a * nb * p, z, s1, sc.gamma12),
            ],
            vec![c(na * b * p, nb * p, s2, sc.gamma21), c(na * nb * p, a * nb * p, s2, sc.gamma22)],
        ),
    };
    Ok(CaseChains {
        v1: DecodeChain::new(v1)?,
        v2: DecodeChain::new(v2)?,
    })
}

/// Per-condition factors of one chain whose product is the chain probability.
///
/// Under the product semantics each factor is a marginal survival. Under the
/// joint semantics factor `k` is the probability of condition `k` given the
/// earlier ones, so the factors telescope to the joint probability.
fn chain_factors<T: Real>(
    chain: &DecodeChain<T>,
    link: &crate::channel::Link<T>,
    semantics: Semantics,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(chain.conditions().len());
    let mut level = T::zero();
    let mut prior = T::one();
    let mut dead = false;
    for cond in chain.conditions() {
        let x = match cond.gain_threshold() {
            Some(x) if !dead => x,
            _ => {
                if semantics == Semantics::JointEvent {
                    dead = true;
                }
                out.push(T::zero());
                continue;
            }
        };
        match semantics {
            Semantics::PaperProduct => out.push(link.survival(x)?),
            Semantics::JointEvent => {
                if x > level {
                    level = x;
                }
                let joint = link.survival(level)?;
                out.push(if prior > T::zero() { joint / prior } else { T::zero() });
                prior = joint;
            }
        }
    }
    Ok(out)
}

/// The five factors for `branch`, in the order
/// high: V1 (two), then V2 (three); low: V2 (two), then V1 (three).
pub fn split_factors<T: Real>(
    branch: Branch,
    alloc: &SplitAllocation<T>,
    sc: &SplitScenario<T>,
) -> Result<[T; 5]> {
    let chains = split_decode_chains(branch, alloc, sc)?;
    let (l1, l2) = sc.base.links()?;
    let sem = sc.base.semantics;
    let f1 = chain_factors(&chains.v1, &l1, sem)?;
    let f2 = chain_factors(&chains.v2, &l2, sem)?;
    let ordered: Vec<T> = match branch {
        Branch::High => f1.into_iter().chain(f2).collect(),
        Branch::Low => f2.into_iter().chain(f1).collect(),
    };
    let mut out = [T::zero(); 5];
    out.copy_from_slice(&ordered);
    Ok(out)
}

/// Five factors for `α > 0.5`: V1's two sub-file events, then V2's three.
pub fn split_chains_high<T: Real>(alloc: &SplitAllocation<T>, sc: &SplitScenario<T>) -> Result<[T; 5]> {
    if !(alloc.alpha > T::lit(0.5)) {
        return domain(format!("high branch requires alpha > 0.5, got {}", alloc.alpha));
    }
    split_factors(Branch::High, alloc, sc)
}

/// Five factors for `α ≤ 0.5`: V2's two sub-file events, then V1's three.
pub fn split_chains_low<T: Real>(alloc: &SplitAllocation<T>, sc: &SplitScenario<T>) -> Result<[T; 5]> {
    if alloc.alpha > T::lit(0.5) {
        return domain(format!("low branch requires alpha <= 0.5, got {}", alloc.alpha));
    }
    split_factors(Branch::Low, alloc, sc)
}

/// Product of the five factors of `branch`.
pub fn split_objective_on_branch<T: Real>(
    branch: Branch,
    alloc: &SplitAllocation<T>,
    sc: &SplitScenario<T>,
) -> Result<T> {
    Ok(split_factors(branch, alloc, sc)?
        .iter()
        .fold(T::one(), |p, &f| p * f))
}

/// Joint success of both vehicles on the branch selected by `alloc.alpha`.
pub fn split_objective<T: Real>(alloc: &SplitAllocation<T>, sc: &SplitScenario<T>) -> Result<T> {
    split_objective_on_branch(Branch::of(alloc.alpha), alloc, sc)
}

/// Joint success of V1 and V2 from the chains directly, bypassing the factors.
pub fn split_joint_from_chains<T: Real>(
    branch: Branch,
    alloc: &SplitAllocation<T>,
    sc: &SplitScenario<T>,
) -> Result<(T, T)> {
    let chains = split_decode_chains(branch, alloc, sc)?;
    let (l1, l2) = sc.base.links()?;
    let sem = sc.base.semantics;
    Ok((
        chain_probability_on(&chains.v1, &l1, sem)?,
        chain_probability_on(&chains.v2, &l2, sem)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{DoubleNakagamiParams, LinkGeometry};

    fn scenario(sem: Semantics) -> SplitScenario<f64> {
        let chan = DoubleNakagamiParams::symmetric(1.0, 2.0).unwrap();
        SplitScenario {
            base: FullScenario {
                power: 10.0,
                sigma1_sq: 1.0,
                sigma2_sq: 1.0,
                gamma1: 1.0,
                gamma2: 1.0,
                chan1: chan,
                chan2: chan,
                geom1: LinkGeometry::new(1.0, 2.0).unwrap(),
                geom2: LinkGeometry::new(0.5, 2.0).unwrap(),
                semantics: sem,
            },
            gamma11: 0.25,
            gamma12: 0.25,
            gamma21: 0.25,
            gamma22: 0.25,
        }
    }

    fn alloc(a: f64, b: f64) -> SplitAllocation<f64> {
        SplitAllocation::new(a, b).unwrap()
    }

    #[test]
    fn starved_sub_files() {
        let sc = scenario(Semantics::PaperProduct);
        assert_eq!(split_chains_high(&alloc(0.7, 1.0), &sc).unwrap()[4], 0.0);
        assert_eq!(split_chains_high(&alloc(0.7, 0.0), &sc).unwrap()[0], 0.0);
        assert_eq!(split_chains_low(&alloc(0.3, 1.0), &sc).unwrap()[4], 0.0);
        for (a, b) in [(0.0, 0.5), (1.0, 0.5), (0.3, 0.0), (0.3, 1.0), (0.7, 0.0), (0.7, 1.0)] {
            assert_eq!(split_objective(&alloc(a, b), &sc).unwrap(), 0.0, "({a}, {b})");
        }
    }

    #[test]
    fn wrong_branch_is_rejected() {
        let sc = scenario(Semantics::PaperProduct);
        assert!(split_chains_high(&alloc(0.5, 0.5), &sc).is_err());
        assert!(split_chains_low(&alloc(0.51, 0.5), &sc).is_err());
        assert!(SplitAllocation::new(0.5, 1.2).is_err());
    }

    #[test]
    fn first_high_condition_feasibility() {
        let sc = scenario(Semantics::PaperProduct);
        let chains = split_decode_chains(Branch::High, &alloc(0.6, 0.3), &sc).unwrap();
        let c = chains.v1.conditions()[0];
        // αβ > γ11(1-β) decides feasibility.
        assert_eq!(c.gain_threshold().is_some(), 0.6 * 0.3 > 0.25 * 0.7);
        let chains = split_decode_chains(Branch::High, &alloc(0.6, 0.2), &sc).unwrap();
        assert!(chains.v1.conditions()[0].gain_threshold().is_none());
    }

    #[test]
    fn low_branch_at_zero_alpha_has_no_interference() {
        let sc = scenario(Semantics::PaperProduct);
        let chains = split_decode_chains(Branch::Low, &alloc(0.0, 0.4), &sc).unwrap();
        let c = chains.v1.conditions()[0];
        assert_eq!(c.interference, 0.0);
        assert!((c.signal - 0.6 * sc.base.power).abs() < 1e-15);
    }

    #[test]
    fn factors_multiply_to_objective_and_chains() {
        for sem in [Semantics::PaperProduct, Semantics::JointEvent] {
            let sc = scenario(sem);
            for &(a, b) in &[(0.3, 0.5), (0.2, 0.7), (0.7, 0.5), (0.8, 0.6), (0.5, 0.5)] {
                let branch = Branch::of(a);
                let f = split_factors(branch, &alloc(a, b), &sc).unwrap();
                assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
                let obj = split_objective(&alloc(a, b), &sc).unwrap();
                let prod = f[0] * f[1] * f[2] * f[3] * f[4];
                assert!((obj - prod).abs() <= 1e-15);
                let min = f.iter().cloned().fold(1.0, f64::min);
                assert!(obj <= min);
                let (p1, p2) = split_joint_from_chains(branch, &alloc(a, b), &sc).unwrap();
                assert!((obj - p1 * p2).abs() < 1e-12, "{sem:?} ({a}, {b})");
            }
        }
    }

    #[test]
    fn joint_dominates_product() {
        let pp = scenario(Semantics::PaperProduct);
        let jj = scenario(Semantics::JointEvent);
        for i in 0..=10 {
            for j in 0..=10 {
                let al = alloc(i as f64 / 10.0, j as f64 / 10.0);
                assert!(split_objective(&al, &jj).unwrap() >= split_objective(&al, &pp).unwrap() - 1e-15);
            }
        }
    }
}
