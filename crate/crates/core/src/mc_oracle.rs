//! Monte Carlo estimates of the decoding probabilities, computed from raw
//! SINR tests on sampled gains.
//!
//! Samples are drawn in fixed-size chunks. Chunk `c` of stream `label` uses
//! ChaCha8 seeded with `seed` on stream `(label << 32) | c`, so estimates do
//! not depend on how chunks are spread over threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caching::CacheCase;
use crate::channel::{DoubleNakagamiParams, GainSampler, LinkGeometry};
use crate::error::{domain, Error, Result};
use crate::noma_full::{case_chains_on_branch, Branch, CaseChains, Condition, DecodeChain, FullScenario, Semantics};
use crate::noma_split::{split_decode_chains, SplitAllocation, SplitScenario};

const CHUNK: u64 = 1 << 16;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, workers: usize) -> Result<Self> {
        let c = Self { samples, seed, workers };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return domain("Monte Carlo needs at least one sample");
        }
        if self.workers == 0 {
            return domain("Monte Carlo needs at least one worker");
        }
        Ok(())
    }
}

/// How a chain's conditions are combined, matching [`Semantics`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    /// Fraction of samples meeting every condition.
    Joint,
    /// Product of per-condition fractions, each from its own samples.
    Product,
}

impl From<Semantics> for McMode {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::JointEvent => McMode::Joint,
            Semantics::PaperProduct => McMode::Product,
        }
    }
}

/// Point estimate and 99% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub half_width: f64,
}

impl McEstimate {
    fn from_count(hits: u64, n: u64) -> Self {
        let nf = n as f64;
        let p = hits as f64 / nf;
        Self {
            estimate: p,
            half_width: Z99 * (guarded_variance(p, nf) / nf).sqrt(),
        }
    }
}

/// `p(1-p)` with `p` kept half a count away from 0 and 1, so an all-miss or
/// all-hit run still reports a nonzero width.
fn guarded_variance(p: f64, n: f64) -> f64 {
    let g = 0.5 / n;
    let q = p.clamp(g, 1.0 - g);
    q * (1.0 - q)
}

/// Per-vehicle and joint estimates for one power allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPairEstimate {
    pub p1: McEstimate,
    pub p2: McEstimate,
    pub joint: McEstimate,
}

/// Counts, per indicator, how many of `cfg.samples` draws hit. Deterministic
/// in `(cfg.seed, cfg.samples, label)`.
fn count_hits<const K: usize, F>(cfg: &McConfig, label: u32, trial: F) -> Result<[u64; K]>
where
    F: Fn(&mut ChaCha8Rng) -> [bool; K] + Sync,
{
    cfg.validate()?;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream((u64::from(label) << 32) | c);
        let len = CHUNK.min(cfg.samples - c * CHUNK);
        let mut hits = [0u64; K];
        for _ in 0..len {
            for (h, ok) in hits.iter_mut().zip(trial(&mut rng)) {
                *h += u64::from(ok);
            }
        }
        hits
    };
    let per_chunk: Vec<[u64; K]> = if cfg.workers == 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Evaluation(format!("thread pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    let mut total = [0u64; K];
    for hits in per_chunk {
        for (t, h) in total.iter_mut().zip(hits) {
            *t += h;
        }
    }
    Ok(total)
}

fn chain_holds(chain: &DecodeChain<f64>, g: f64) -> bool {
    chain.conditions().iter().all(|c| c.holds(g))
}

/// Marginal estimates of independent conditions multiplied together, with a
/// delta-method half-width.
fn product_estimate(marginals: &[(f64, f64)], n: f64) -> McEstimate {
    let estimate: f64 = marginals.iter().map(|m| m.0).product();
    let mut var = 0.0;
    for (k, &(p, _)) in marginals.iter().enumerate() {
        let others: f64 = marginals
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, m)| m.0)
            .product();
        var += others * others * guarded_variance(p, n) / n;
    }
    McEstimate {
        estimate,
        half_width: Z99 * var.sqrt(),
    }
}

fn marginal(cfg: &McConfig, label: u32, sampler: &GainSampler, cond: &Condition<f64>) -> Result<(f64, f64)> {
    let [hits] = count_hits(cfg, label, |rng| [cond.holds(sampler.sample(rng))])?;
    Ok((hits as f64 / cfg.samples as f64, 0.0))
}

/// Estimate of one chain on one link.
pub fn mc_chain_probability(
    chain: &DecodeChain<f64>,
    chan: &DoubleNakagamiParams<f64>,
    geom: &LinkGeometry<f64>,
    mode: McMode,
    cfg: &McConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    let sampler = GainSampler::new(chan, geom)?;
    match mode {
        McMode::Joint => {
            let [hits] = count_hits(cfg, 0, |rng| [chain_holds(chain, sampler.sample(rng))])?;
            Ok(McEstimate::from_count(hits, cfg.samples))
        }
        McMode::Product => {
            let mut m = Vec::with_capacity(chain.conditions().len());
            for (k, c) in chain.conditions().iter().enumerate() {
                m.push(marginal(cfg, k as u32, &sampler, c)?);
            }
            Ok(product_estimate(&m, cfg.samples as f64))
        }
    }
}

/// Estimates for a pair of vehicle chains on independent links.
pub fn mc_chains(chains: &CaseChains<f64>, sc: &FullScenario<f64>, mode: McMode, cfg: &McConfig) -> Result<McPairEstimate> {
    cfg.validate()?;
    let s1 = GainSampler::new(&sc.chan1, &sc.geom1)?;
    let s2 = GainSampler::new(&sc.chan2, &sc.geom2)?;
    let n = cfg.samples;
    match mode {
        McMode::Joint => {
            let [h1, h2, both] = count_hits(cfg, 0, |rng| {
                let ok1 = chain_holds(&chains.v1, s1.sample(rng));
                let ok2 = chain_holds(&chains.v2, s2.sample(rng));
                [ok1, ok2, ok1 && ok2]
            })?;
            Ok(McPairEstimate {
                p1: McEstimate::from_count(h1, n),
                p2: McEstimate::from_count(h2, n),
                joint: McEstimate::from_count(both, n),
            })
        }
        McMode::Product => {
            let mut label = 0u32;
            let mut m1 = Vec::new();
            for c in chains.v1.conditions() {
                m1.push(marginal(cfg, label, &s1, c)?);
                label += 1;
            }
            let mut m2 = Vec::new();
            for c in chains.v2.conditions() {
                m2.push(marginal(cfg, label, &s2, c)?);
                label += 1;
            }
            let nf = n as f64;
            let all: Vec<(f64, f64)> = m1.iter().chain(m2.iter()).copied().collect();
            Ok(McPairEstimate {
                p1: product_estimate(&m1, nf),
                p2: product_estimate(&m2, nf),
                joint: product_estimate(&all, nf),
            })
        }
    }
}

/// Estimates for one of cases A to D at `alpha`, in the mode matching the
/// scenario semantics. The branch follows `alpha` (`0.5` is low).
pub fn mc_case(case: CacheCase, alpha: f64, sc: &FullScenario<f64>, cfg: &McConfig) -> Result<McPairEstimate> {
    mc_case_on_branch(case, Branch::of(alpha), alpha, sc, cfg)
}

pub fn mc_case_on_branch(
    case: CacheCase,
    branch: Branch,
    alpha: f64,
    sc: &FullScenario<f64>,
    cfg: &McConfig,
) -> Result<McPairEstimate> {
    let chains = case_chains_on_branch(case, branch, alpha, sc)?;
    mc_chains(&chains, sc, sc.semantics.into(), cfg)
}

/// Split-file estimates; `joint` estimates the split objective.
pub fn mc_split(
    branch: Branch,
    alloc: &SplitAllocation<f64>,
    sc: &SplitScenario<f64>,
    cfg: &McConfig,
) -> Result<McPairEstimate> {
    let chains = split_decode_chains(branch, alloc, sc)?;
    mc_chains(&chains, &sc.base, sc.base.semantics.into(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::survival_gain_sq;

    fn unit() -> DoubleNakagamiParams<f64> {
        DoubleNakagamiParams::symmetric(1.0, 1.0).unwrap()
    }

    #[test]
    fn infeasible_condition_gives_exact_zero() {
        let chain = DecodeChain::new(vec![
            Condition::new(5.0, 0.0, 1.0, 1.0),
            Condition::new(1.0, 1.0, 1.0, 1.0),
        ])
        .unwrap();
        let cfg = McConfig::new(10_000, 1, 1).unwrap();
        for mode in [McMode::Joint, McMode::Product] {
            let e = mc_chain_probability(&chain, &unit(), &LinkGeometry::unit(), mode, &cfg).unwrap();
            assert_eq!(e.estimate, 0.0);
            assert!(e.half_width >= 0.0);
        }
    }

    #[test]
    fn single_condition_matches_quadrature() {
        let chain = DecodeChain::single(Condition::new(5.0, 0.0, 1.0, 1.0)).unwrap();
        let cfg = McConfig::new(200_000, 7, 1).unwrap();
        let e = mc_chain_probability(&chain, &unit(), &LinkGeometry::unit(), McMode::Joint, &cfg).unwrap();
        let exact = survival_gain_sq(0.2, &unit()).unwrap();
        assert!((e.estimate - exact).abs() <= 3.0 * e.half_width, "{e:?} vs {exact}");
    }

    #[test]
    fn workers_do_not_change_results() {
        let chain = DecodeChain::new(vec![
            Condition::new(5.0, 0.0, 1.0, 1.0),
            Condition::new(2.0, 0.0, 1.0, 1.0),
        ])
        .unwrap();
        for mode in [McMode::Joint, McMode::Product] {
            let run = |w| {
                let cfg = McConfig::new(150_000, 42, w).unwrap();
                mc_chain_probability(&chain, &unit(), &LinkGeometry::unit(), mode, &cfg).unwrap()
            };
            let a = run(1);
            assert_eq!(a, run(3));
            assert_eq!(a, run(8));
        }
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(McConfig::new(0, 1, 1).is_err());
        assert!(McConfig::new(10, 1, 0).is_err());
        let bad = McConfig {
            samples: 0,
            seed: 0,
            workers: 1,
        };
        let chain = DecodeChain::single(Condition::new(5.0, 0.0, 1.0, 1.0)).unwrap();
        assert!(mc_chain_probability(&chain, &unit(), &LinkGeometry::unit(), McMode::Joint, &bad).is_err());
    }

    #[test]
    fn guard_keeps_width_positive() {
        let e = McEstimate::from_count(0, 1000);
        assert!(e.half_width > 0.0);
        let e = McEstimate::from_count(1000, 1000);
        assert!(e.half_width > 0.0);
    }
}
