//! Modified Bessel function of the second kind, real order.
//!
//! The fractional part `mu` of the order (|mu| <= 1/2) is handled by Temme's
//! series for `x < 2` and by Steed's continued fraction (CF2, Thompson and
//! Barnett) for `x >= 2`. Both yield `K_mu` and `K_{mu+1}`; the integer part
//! of the order is reached by forward recurrence, which is stable for K.

use crate::error::{domain, Result};
use crate::scalar::Real;

const SERIES_LIMIT: f64 = 2.0;
const MAX_ITER: usize = 100_000;

// Chebyshev coefficients for Γ1(mu) and Γ2(mu) on |mu| <= 1/2.
#[allow(clippy::excessive_precision)]
const GAMMA1_CHEB: [f64; 7] = [
    -1.142022680371168e0,
    6.5165112670737e-3,
    3.087090173086e-4,
    -3.4706269649e-6,
    6.9437664e-9,
    3.67795e-11,
    -1.356e-13,
];
#[allow(clippy::excessive_precision)]
const GAMMA2_CHEB: [f64; 8] = [
    1.843740587300905e0,
    -7.68528408447867e-2,
    1.2719271366546e-3,
    -4.9717367042e-6,
    -3.31261198e-8,
    2.423096e-10,
    -1.702e-13,
    -1.49e-15,
];

/// `K_nu(x)` for `x > 0` and any finite order.
///
/// Negative orders map to `K_{|nu|}`. Returns 0 once `exp(-x)` underflows.
pub fn bessel_k<T: Real>(nu: T, x: T) -> Result<T> {
    bessel_k_pair(nu, x).map(|(k, _)| k)
}

/// `(K_nu(x), K_{nu+1}(x))` for `nu >= 0` after reflection.
pub fn bessel_k_pair<T: Real>(nu: T, x: T) -> Result<(T, T)> {
    if !nu.is_finite() {
        return domain(format!("bessel_k order must be finite, got {nu}"));
    }
    if !(x > T::zero()) {
        return domain(format!("bessel_k requires x > 0, got {x}"));
    }
    if x.is_infinite() {
        return Ok((T::zero(), T::zero()));
    }
    Ok(k_pair_unchecked(nu.abs(), x))
}

pub(crate) fn k_pair_unchecked<T: Real>(nu: T, x: T) -> (T, T) {
    let half = T::lit(0.5);
    let nl = (nu + half).floor();
    let mu = nu - nl;
    let steps = nl.to_usize().unwrap_or(0);
    let (mut k_mu, mut k_mu1) = if x < T::lit(SERIES_LIMIT) {
        temme_series(mu, x)
    } else {
        steed_cf2(mu, x)
    };
    let two_over_x = T::lit(2.0) / x;
    for i in 1..=steps {
        let next = (mu + T::lit(i as f64)) * two_over_x * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    (k_mu, k_mu1)
}

fn chebyshev<T: Real>(coeffs: &[f64], y: T) -> T {
    let y2 = y + y;
    let mut d = T::zero();
    let mut dd = T::zero();
    for c in coeffs.iter().skip(1).rev() {
        let sv = d;
        d = y2 * d - dd + T::lit(*c);
        dd = sv;
    }
    y * d - dd + T::lit(0.5 * coeffs[0])
}

/// Returns (Γ1, Γ2, 1/Γ(1+mu), 1/Γ(1-mu)).
fn temme_gammas<T: Real>(mu: T) -> (T, T, T, T) {
    let y = T::lit(8.0) * mu * mu - T::one();
    let g1 = chebyshev(&GAMMA1_CHEB, y);
    let g2 = chebyshev(&GAMMA2_CHEB, y);
    (g1, g2, g2 - mu * g1, g2 + mu * g1)
}

fn temme_series<T: Real>(mu: T, x: T) -> (T, T) {
    let eps = T::epsilon();
    let half = T::lit(0.5);
    let x2 = half * x;
    let pimu = T::PI() * mu;
    let fact = if pimu.abs() < eps { T::one() } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < eps { T::one() } else { e.sinh() / e };
    let (g1, g2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (g1 * e.cosh() + g2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = half * ee / gampl;
    let mut q = half / (ee * gammi);
    let mut c = T::one();
    let dsq = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = T::lit(i as f64);
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c = c * dsq / fi;
        p = p / (fi - mu);
        q = q / (fi + mu);
        let del = c * ff;
        sum = sum + del;
        sum1 = sum1 + c * (p - fi * ff);
        if del.abs() < sum.abs() * eps {
            break;
        }
    }
    (sum, sum1 * T::lit(2.0) / x)
}

fn steed_cf2<T: Real>(mu: T, x: T) -> (T, T) {
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut b = two * (T::one() + x);
    let mut d = T::one() / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = T::zero();
    let mut q2 = T::one();
    let a1 = T::lit(0.25) - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = T::one() + q * delh;
    for i in 2..MAX_ITER {
        let fi = T::lit(i as f64);
        a = a - two * (fi - T::one());
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        b = b + two;
        d = T::one() / (b + a * d);
        delh = (b * d - T::one()) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if (dels / s).abs() < eps {
            break;
        }
    }
    h = a1 * h;
    let k_mu = (T::PI() / (two * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + T::lit(0.5) - h) / x;
    (k_mu, k_mu1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_integer_closed_form() {
        let v = bessel_k(0.5, 1.0).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!(rel(v, want) < 1e-14);
        assert!(rel(want, 0.4610685044478945584) < 1e-15);
    }

    #[test]
    fn reflection_is_exact() {
        assert_eq!(bessel_k(-1.0, 2.0).unwrap(), bessel_k(1.0, 2.0).unwrap());
        assert_eq!(bessel_k(-2.3, 0.7).unwrap(), bessel_k(2.3, 0.7).unwrap());
    }

    #[test]
    fn matches_arbitrary_precision_values() {
        // mpmath.besselk
        let cases = [
            (0.0, 1.0, 0.4210244382407083333356),
            (0.0, 2.0, 0.1138938727495334356527),
            (1.0, 2.0, 0.1398658818165224272846),
            (0.3, 0.01, 6.890102638292769543174),
            (0.3, 1.7, 0.1690730522721343912728),
            (2.7, 0.5, 31.45872090433870401674),
            (2.7, 3.0, 0.09692215372799019991943),
            (10.2, 5.0, 12.94579441274364022060),
            (0.0, 700.0, 4.669776431685376880986e-306),
            (1.5, 1e-8, 1253314137315.500149208),
            (0.25, 1e-8, 215.5594459838469006401),
            (4.0, 25.0, 4.738527043866946949649e-12),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu, x).unwrap();
            assert!(rel(got, want) < 1e-10, "K_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn underflow_returns_zero() {
        assert_eq!(bessel_k(0.0, 800.0).unwrap(), 0.0);
        assert_eq!(bessel_k(1.0, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(0.0, 0.0).is_err());
        assert!(bessel_k(0.0, -1.0).is_err());
        assert!(bessel_k(f64::NAN, 1.0).is_err());
        assert!(bessel_k(0.0, f64::NAN).is_err());
    }

    #[test]
    fn single_precision_close_to_double() {
        let a = bessel_k(0.3f32, 1.7f32).unwrap() as f64;
        let b = bessel_k(0.3f64, 1.7f64).unwrap();
        assert!(rel(a, b) < 1e-5);
    }
}
