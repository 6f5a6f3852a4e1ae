//! Globally adaptive 15-point Gauss-Kronrod quadrature.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Tolerances and subdivision budget for [`adaptive_quad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

/// `1e-10` absolute and `1e-9` relative, loosened to `100 eps` for types
/// whose precision cannot reach that.
impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        let floor = T::lit(100.0) * T::epsilon();
        Self {
            abs_tol: T::lit(1e-10).max(floor),
            rel_tol: T::lit(1e-9).max(floor),
            max_subdivisions: 200,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero() && self.rel_tol > T::zero()) {
            return domain("quadrature tolerances must be strictly positive");
        }
        if self.max_subdivisions == 0 {
            return domain("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        scaled = scaled.max(fifty_eps * res_abs);
    }
    scaled
}

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Segment<T>> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    let mut res_g = f_center * T::lit(WG[3]);
    let mut res_k = f_center * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half_len.abs();
    let value = res_k * half_len;
    if !value.is_finite() {
        return Err(Error::Evaluation(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let error = rescale_error((res_k - res_g) * half_len, res_abs * abs_half, res_asc * abs_half);
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]`; `b` may be `+inf`, handled by `x = a + t/(1-t)`.
///
/// Bisects the segment with the largest error estimate until the total error
/// falls below `max(abs_tol, rel_tol * |I|)`. Endpoints are never evaluated,
/// so integrable endpoint singularities are allowed.
pub fn adaptive_quad<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    spec.validate()?;
    if !a.is_finite() || b.is_nan() || b == T::neg_infinity() {
        return domain(format!("invalid integration range [{a}, {b}]"));
    }
    if a == b {
        return Ok(T::zero());
    }
    if a > b {
        return domain(format!("integration range requires a < b, got [{a}, {b}]"));
    }
    if b.is_infinite() {
        let mapped = |t: T| {
            let one_minus = T::one() - t;
            f(a + t / one_minus) / (one_minus * one_minus)
        };
        integrate_finite(&mapped, T::zero(), T::one(), spec)
    } else {
        integrate_finite(&f, a, b, spec)
    }
}

fn integrate_finite<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    let first = kronrod15(f, a, b)?;
    let mut segments = vec![first];
    let mut total = first.value;
    let mut total_err = first.error;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, s)| {
                if s.error > best.1 {
                    (i, s.error)
                } else {
                    best
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // Segment cannot be split any further in this precision.
            return Err(Error::Accuracy {
                estimate: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let left = kronrod15(f, seg.a, mid)?;
        let right = kronrod15(f, mid, seg.b)?;
        segments.push(left);
        segments.push(right);
        // Re-sum to avoid drift from repeated add/subtract.
        total = segments.iter().fold(T::zero(), |s, g| s + g.value);
        total_err = segments.iter().fold(T::zero(), |s, g| s + g.error);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;
    use std::f64::consts::PI;

    fn q(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        adaptive_quad(f, a, b, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn analytic_integrals() {
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> = vec![
            (Box::new(|_| 1.0), 0.0, 1.0, 1.0),
            (Box::new(|x: f64| (-x).exp()), 0.0, f64::INFINITY, 1.0),
            (Box::new(|x: f64| x * x), -1.0, 2.0, 3.0),
            (Box::new(|x: f64| x.sin()), 0.0, PI, 2.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), 0.0, f64::INFINITY, PI / 2.0),
            (Box::new(|x: f64| (-x * x).exp()), 0.0, f64::INFINITY, PI.sqrt() / 2.0),
            (Box::new(|x: f64| x.ln()), 0.0, 1.0, -1.0),
            (Box::new(|x: f64| 1.0 / x.sqrt()), 0.0, 1.0, 2.0),
            (Box::new(|x: f64| x.cos() * (-x).exp()), 0.0, f64::INFINITY, 0.5),
            (Box::new(|x: f64| x.powi(3) * (-x).exp()), 2.0, f64::INFINITY, 38.0 * (-2.0f64).exp()),
        ];
        for (i, (f, a, b, want)) in cases.into_iter().enumerate() {
            let got = q(f, a, b);
            let tol = 1e-10f64.max(1e-9 * want.abs());
            assert!((got - want).abs() <= tol, "case {i}: {got} vs {want}");
        }
    }

    #[test]
    fn unit_double_exponential_density_normalizes() {
        let got = q(|u: f64| 2.0 * bessel_k(0.0, 2.0 * u.sqrt()).unwrap(), 0.0, f64::INFINITY);
        assert!((got - 1.0).abs() < 1e-9, "{got}");
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 2,
        };
        match adaptive_quad(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &spec) {
            Err(Error::Accuracy { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_inputs() {
        let spec = QuadratureSpec::default();
        assert!(adaptive_quad(|x: f64| x, 1.0, 0.0, &spec).is_err());
        assert_eq!(adaptive_quad(|x: f64| x, 1.0, 1.0, &spec).unwrap(), 0.0);
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            ..spec
        };
        assert!(adaptive_quad(|x: f64| x, 0.0, 1.0, &bad).is_err());
        let bad = QuadratureSpec {
            max_subdivisions: 0,
            ..spec
        };
        assert!(adaptive_quad(|x: f64| x, 0.0, 1.0, &bad).is_err());
        assert!(matches!(
            adaptive_quad(|_x: f64| f64::NAN, 0.0, 1.0, &spec),
            Err(Error::Evaluation(_))
        ));
    }
}
