//! Zipf popularity, top-κ cache placement and classification of request
//! pairs into decoding situations.
//!
//! File indices are 1-based; file 1 is the most popular.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{domain, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catalog<T> {
    pub num_files: usize,
    /// Zipf skewness ζ.
    pub zeta: T,
    /// Files cached per vehicle, κ.
    pub cache_size: usize,
}

impl<T: Real> Catalog<T> {
    pub fn new(num_files: usize, zeta: T, cache_size: usize) -> Result<Self> {
        let c = Self {
            num_files,
            zeta,
            cache_size,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_files == 0 {
            return domain("catalog needs at least one file");
        }
        if self.cache_size > self.num_files {
            return domain(format!(
                "cache size {} exceeds catalog size {}",
                self.cache_size, self.num_files
            ));
        }
        if !(self.zeta.is_finite() && self.zeta >= T::zero()) {
            return domain(format!("zeta must be finite and >= 0, got {}", self.zeta));
        }
        Ok(())
    }
}

/// Decoding situation for one request pair `(req1, req2)`.
///
/// `A`..`D` follow whether V1 holds V2's file and V2 holds V1's file; the
/// remaining tags cover requests served from a vehicle's own cache and both
/// vehicles asking for the same file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CacheCase {
    A,
    B,
    C,
    D,
    SelfHit1,
    SelfHit2,
    SelfHitBoth,
    CommonRequest,
}

impl CacheCase {
    pub const ALL: [CacheCase; 8] = [
        CacheCase::A,
        CacheCase::B,
        CacheCase::C,
        CacheCase::D,
        CacheCase::SelfHit1,
        CacheCase::SelfHit2,
        CacheCase::SelfHitBoth,
        CacheCase::CommonRequest,
    ];

    pub const FULL_FILE: [CacheCase; 4] = [CacheCase::A, CacheCase::B, CacheCase::C, CacheCase::D];

    fn index(self) -> usize {
        self as usize
    }

    pub fn is_noma_case(self) -> bool {
        matches!(self, CacheCase::A | CacheCase::B | CacheCase::C | CacheCase::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            CacheCase::A => "A",
            CacheCase::B => "B",
            CacheCase::C => "C",
            CacheCase::D => "D",
            CacheCase::SelfHit1 => "self_hit_1",
            CacheCase::SelfHit2 => "self_hit_2",
            CacheCase::SelfHitBoth => "self_hit_both",
            CacheCase::CommonRequest => "common_request",
        }
    }
}

impl fmt::Display for CacheCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Contents of one vehicle cache over a catalog of `num_files` files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cache {
    num_files: usize,
    files: BTreeSet<usize>,
}

impl Cache {
    pub fn new(num_files: usize, files: impl IntoIterator<Item = usize>) -> Result<Self> {
        let files: BTreeSet<usize> = files.into_iter().collect();
        if let Some(bad) = files.iter().find(|&&f| f == 0 || f > num_files) {
            return domain(format!("cached file {bad} outside 1..={num_files}"));
        }
        Ok(Self { num_files, files })
    }

    pub fn empty(num_files: usize) -> Self {
        Self {
            num_files,
            files: BTreeSet::new(),
        }
    }

    pub fn contains(&self, file: usize) -> bool {
        self.files.contains(&file)
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn files(&self) -> impl Iterator<Item = usize> + '_ {
        self.files.iter().copied()
    }
}

/// `q_t = t^-ζ / Σ_i i^-ζ` for `t = 1..=T`.
pub fn zipf_popularity<T: Real>(catalog: &Catalog<T>) -> Result<Vec<T>> {
    catalog.validate()?;
    let weights: Vec<T> = (1..=catalog.num_files)
        .map(|t| T::lit(t as f64).powf(-catalog.zeta))
        .collect();
    let norm = weights.iter().fold(T::zero(), |s, &w| s + w);
    Ok(weights.into_iter().map(|w| w / norm).collect())
}

/// Most-popular-first placement: files `1..=κ`.
pub fn populate_cache<T: Real>(catalog: &Catalog<T>) -> Result<Cache> {
    catalog.validate()?;
    Cache::new(catalog.num_files, 1..=catalog.cache_size)
}

/// Classifies the request pair of V1 (`req1`) and V2 (`req2`).
pub fn classify_case(req1: usize, req2: usize, cache1: &Cache, cache2: &Cache) -> Result<CacheCase> {
    let n = cache1.num_files().min(cache2.num_files());
    for r in [req1, req2] {
        if r == 0 || r > n {
            return domain(format!("request {r} outside 1..={n}"));
        }
    }
    if req1 == req2 {
        return Ok(CacheCase::CommonRequest);
    }
    let own1 = cache1.contains(req1);
    let own2 = cache2.contains(req2);
    Ok(match (own1, own2) {
        (true, true) => CacheCase::SelfHitBoth,
        (true, false) => CacheCase::SelfHit1,
        (false, true) => CacheCase::SelfHit2,
        (false, false) => match (cache1.contains(req2), cache2.contains(req1)) {
            (true, true) => CacheCase::A,
            (true, false) => CacheCase::B,
            (false, true) => CacheCase::C,
            (false, false) => CacheCase::D,
        },
    })
}

/// How request pairs are weighted when averaging success over cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Every request pair, including both vehicles asking for one file.
    #[default]
    Full,
    /// Conditioned on the two vehicles requesting distinct files.
    CasesOnly,
}

/// Probability of each [`CacheCase`] under i.i.d. Zipf requests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseDistribution<T> {
    probs: [T; 8],
}

impl<T: Real> CaseDistribution<T> {
    pub fn get(&self, case: CacheCase) -> T {
        self.probs[case.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (CacheCase, T)> + '_ {
        CacheCase::ALL.iter().map(move |&c| (c, self.probs[c.index()]))
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |s, &p| s + p)
    }

    /// Weights used for averaging; `CasesOnly` drops the common-request mass
    /// and renormalizes.
    pub fn weights(&self, averaging: Averaging) -> Result<CaseDistribution<T>> {
        match averaging {
            Averaging::Full => Ok(*self),
            Averaging::CasesOnly => {
                let mut probs = self.probs;
                probs[CacheCase::CommonRequest.index()] = T::zero();
                let mass = probs.iter().fold(T::zero(), |s, &p| s + p);
                if !(mass > T::zero()) {
                    return domain("no request pair with distinct files to condition on");
                }
                for p in probs.iter_mut() {
                    *p = *p / mass;
                }
                Ok(CaseDistribution { probs })
            }
        }
    }
}

/// Exact case probabilities by enumerating all `T²` request pairs against
/// the top-κ caches of both vehicles.
pub fn case_distribution<T: Real>(catalog: &Catalog<T>) -> Result<CaseDistribution<T>> {
    let cache = populate_cache(catalog)?;
    case_distribution_with(catalog, &cache, &cache)
}

/// As [`case_distribution`] with explicit cache contents.
pub fn case_distribution_with<T: Real>(
    catalog: &Catalog<T>,
    cache1: &Cache,
    cache2: &Cache,
) -> Result<CaseDistribution<T>> {
    let q = zipf_popularity(catalog)?;
    let mut probs = [T::zero(); 8];
    for (i, &qi) in q.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            let case = classify_case(i + 1, j + 1, cache1, cache2)?;
            probs[case.index()] = probs[case.index()] + qi * qj;
        }
    }
    Ok(CaseDistribution { probs })
}
