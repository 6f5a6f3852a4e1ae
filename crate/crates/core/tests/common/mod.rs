#![allow(dead_code)]

use canoma::channel::{DoubleNakagamiParams, LinkGeometry};
use canoma::noma_full::{FullScenario, Semantics};
use canoma::noma_split::SplitScenario;
use canoma::specfun::bessel_k;

/// Baseline: m = 1 and Ω = 2 on every hop, path-loss exponent 2, V1 at
/// distance 1, V2 at 0.5, unit noise, γ1 = γ2 = 1, SNR 10 dB.
pub fn baseline(semantics: Semantics) -> FullScenario<f64> {
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
        semantics,
    }
}

/// Both vehicles on identical links.
pub fn symmetric(semantics: Semantics) -> FullScenario<f64> {
    FullScenario {
        geom2: LinkGeometry::new(1.0, 2.0).unwrap(),
        ..baseline(semantics)
    }
}

pub fn split_baseline(semantics: Semantics) -> SplitScenario<f64> {
    SplitScenario {
        base: baseline(semantics),
        gamma11: 0.25,
        gamma12: 0.25,
        gamma21: 0.25,
        gamma22: 0.25,
    }
}

/// `P(θ X Y > x)` for unit-mean exponentials: `2√(x/θ) K1(2√(x/θ))`.
pub fn rayleigh_product_survival(x: f64, theta: f64) -> f64 {
    let u = (x / theta).sqrt();
    2.0 * u * bessel_k(1.0, 2.0 * u).unwrap()
}
