use crate::error::{domain, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 10.900511 with 11 terms (Pugh, 2004).
const LANCZOS_G: f64 = 10.900511;
#[allow(clippy::excessive_precision)]
const LANCZOS_D: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
/// ln(2 * sqrt(e / pi))
#[allow(clippy::excessive_precision)]
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122518527279025978;

/// Natural logarithm of the gamma function for positive finite `x`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x.is_finite() && x > T::zero()) {
        return domain(format!("ln_gamma requires finite x > 0, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma_pos(x + T::one()) - x.ln();
    }
    let mut s = T::lit(LANCZOS_D[0]);
    for (k, d) in LANCZOS_D.iter().enumerate().skip(1) {
        s = s + T::lit(*d) / (x + T::lit(k as f64 - 1.0));
    }
    let g = T::lit(LANCZOS_G);
    s.ln() + T::lit(LN_2_SQRT_E_OVER_PI) + (x - half) * ((x - half + g) / T::E()).ln()
}
