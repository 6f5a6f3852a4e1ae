//! Double Nakagami-m link model.
//!
//! The squared gain `g² = X·Y` of a cascaded link is the product of two
//! independent Gamma variates, `X ~ Gamma(m1, Ω1/m1)` and `Y ~ Gamma(m2, Ω2/m2)`.
//! With `θ = Ω1Ω2/(m1m2)` the normalized gain `y = g²/θ` has density
//!
//! ```text
//! p(y) = 2 y^((m1+m2)/2 - 1) K_{m1-m2}(2√y) / (Γ(m1) Γ(m2))
//! ```
//!
//! Distribution values are obtained by quadrature of this density in the
//! variable `u = √y`, which removes the endpoint singularity at `y = 0`.
//! Path loss multiplies the gain by `distance^(-exponent)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::{adaptive_quad, bessel_k, ln_gamma, QuadratureSpec};

/// The cdf above which survival is computed from the upper tail directly.
const TAIL_SWITCH: f64 = 1e-4;

/// Shape and spread of both hops of a cascaded Nakagami-m link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleNakagamiParams<T> {
    pub m1: T,
    pub m2: T,
    pub omega1: T,
    pub omega2: T,
}

impl<T: Real> DoubleNakagamiParams<T> {
    pub fn new(m1: T, m2: T, omega1: T, omega2: T) -> Result<Self> {
        let p = Self {
            m1,
            m2,
            omega1,
            omega2,
        };
        p.validate()?;
        Ok(p)
    }

    /// All four hop parameters set to the same `m` and `Ω`.
    pub fn symmetric(m: T, omega: T) -> Result<Self> {
        Self::new(m, m, omega, omega)
    }

    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5);
        let all_finite = [self.m1, self.m2, self.omega1, self.omega2]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return domain("fading parameters must be finite");
        }
        if self.m1 < half || self.m2 < half {
            return domain(format!(
                "Nakagami shapes must be >= 0.5, got m1={}, m2={}",
                self.m1, self.m2
            ));
        }
        if !(self.omega1 > T::zero() && self.omega2 > T::zero()) {
            return domain(format!(
                "Nakagami spreads must be > 0, got omega1={}, omega2={}",
                self.omega1, self.omega2
            ));
        }
        Ok(())
    }

    /// `θ = Ω1Ω2 / (m1m2)`.
    pub fn theta(&self) -> T {
        self.omega1 * self.omega2 / (self.m1 * self.m2)
    }

    /// `E[g²] = Ω1Ω2`.
    pub fn mean_gain_sq(&self) -> T {
        self.omega1 * self.omega2
    }
}

/// Distance and path-loss exponent of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    pub distance: T,
    pub pathloss_exp: T,
}

impl<T: Real> LinkGeometry<T> {
    pub fn new(distance: T, pathloss_exp: T) -> Result<Self> {
        let g = Self {
            distance,
            pathloss_exp,
        };
        g.validate()?;
        Ok(g)
    }

    /// Unit distance, no path loss.
    pub fn unit() -> Self {
        Self {
            distance: T::one(),
            pathloss_exp: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > T::zero()) {
            return domain(format!("distance must be finite and > 0, got {}", self.distance));
        }
        if !(self.pathloss_exp.is_finite() && self.pathloss_exp >= T::zero()) {
            return domain(format!(
                "path-loss exponent must be finite and >= 0, got {}",
                self.pathloss_exp
            ));
        }
        Ok(())
    }
}

/// Power scale `distance^(-exponent)` applied to the squared gain.
pub fn effective_scale<T: Real>(_params: &DoubleNakagamiParams<T>, geom: &LinkGeometry<T>) -> T {
    geom.distance.powf(-geom.pathloss_exp)
}

/// Precomputed constants of the double-Gamma law of `g²`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleGamma<T> {
    params: DoubleNakagamiParams<T>,
    order: T,
    theta: T,
    /// ln 4 - ln Γ(m1) - ln Γ(m2)
    log_norm: T,
    /// 2(m1+m2)/2 - 1 = m1 + m2 - 1, the power of u in the u-density.
    u_power: T,
    quad: QuadratureSpec<T>,
}

impl<T: Real> DoubleGamma<T> {
    pub fn new(params: &DoubleNakagamiParams<T>) -> Result<Self> {
        Self::with_quadrature(params, QuadratureSpec::default())
    }

    pub fn with_quadrature(params: &DoubleNakagamiParams<T>, quad: QuadratureSpec<T>) -> Result<Self> {
        params.validate()?;
        quad.validate()?;
        let log_norm = T::lit(4.0).ln() - ln_gamma(params.m1)? - ln_gamma(params.m2)?;
        Ok(Self {
            params: *params,
            order: (params.m1 - params.m2).abs(),
            theta: params.theta(),
            log_norm,
            u_power: params.m1 + params.m2 - T::one(),
            quad,
        })
    }

    pub fn params(&self) -> &DoubleNakagamiParams<T> {
        &self.params
    }

    /// Density of `u = √(g²/θ)`: `4 u^(m1+m2-1) K_ν(2u) / (Γ(m1)Γ(m2))`.
    fn u_density(&self, u: T) -> T {
        if !(u > T::zero()) {
            return T::zero();
        }
        let two_u = u + u;
        let k = match bessel_k(self.order, two_u) {
            Ok(k) => k,
            Err(_) => return T::nan(),
        };
        if k == T::zero() {
            return T::zero();
        }
        (self.log_norm + self.u_power * u.ln()).exp() * k
    }

    /// Density of `g²` at `x > 0`.
    pub fn pdf(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return domain(format!("pdf_gain_sq requires x > 0, got {x}"));
        }
        if x.is_infinite() {
            return Ok(T::zero());
        }
        let y = x / self.theta;
        // p(y) dy = u_density(u) du with y = u², so p(y) = u_density(u) / (2u).
        let u = y.sqrt();
        let p = self.u_density(u) / (u + u);
        if !p.is_finite() {
            return Err(crate::Error::Evaluation(format!("density not finite at x={x}")));
        }
        Ok(p / self.theta)
    }

    fn lower_u(&self, u_hi: T) -> Result<T> {
        adaptive_quad(|u| self.u_density(u), T::zero(), u_hi, &self.quad)
    }

    fn upper_u(&self, u_lo: T) -> Result<T> {
        // Tail values are tiny; only a relative criterion is meaningful there.
        let spec = QuadratureSpec {
            abs_tol: T::min_positive_value(),
            ..self.quad
        };
        adaptive_quad(|u| self.u_density(u), u_lo, T::infinity(), &spec)
    }

    /// Returns `(cdf, survival)` with whichever side is small computed directly.
    fn split(&self, x: T) -> Result<(T, T)> {
        if x.is_nan() || x < T::zero() {
            return domain(format!("distribution of g² requires x >= 0, got {x}"));
        }
        if x == T::zero() {
            return Ok((T::zero(), T::one()));
        }
        if x.is_infinite() {
            return Ok((T::one(), T::zero()));
        }
        let y = x / self.theta;
        let u = y.sqrt();
        let bulk = T::lit(4.0) * (self.params.m1 * self.params.m2).max(T::one());
        if y <= bulk {
            let lower = self.lower_u(u)?;
            if lower <= T::one() - T::lit(TAIL_SWITCH) {
                let lower = clamp_unit(lower);
                return Ok((lower, T::one() - lower));
            }
        }
        let upper = clamp_unit(self.upper_u(u)?);
        Ok((T::one() - upper, upper))
    }

    /// `P(g² <= x)`.
    pub fn cdf(&self, x: T) -> Result<T> {
        self.split(x).map(|(c, _)| c)
    }

    /// `P(g² > x)`.
    pub fn survival(&self, x: T) -> Result<T> {
        self.split(x).map(|(_, s)| s)
    }
}

fn clamp_unit<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Density of the squared double Nakagami-m gain.
pub fn pdf_gain_sq<T: Real>(x: T, params: &DoubleNakagamiParams<T>) -> Result<T> {
    DoubleGamma::new(params)?.pdf(x)
}

/// CDF of the squared gain, by quadrature of the density.
pub fn cdf_gain_sq<T: Real>(x: T, params: &DoubleNakagamiParams<T>) -> Result<T> {
    DoubleGamma::new(params)?.cdf(x)
}

/// `P(g² > x)`; the upper tail is integrated directly once the cdf exceeds `1 - 1e-4`.
pub fn survival_gain_sq<T: Real>(x: T, params: &DoubleNakagamiParams<T>) -> Result<T> {
    DoubleGamma::new(params)?.survival(x)
}

/// A fading law together with the geometry of the link it describes.
///
/// Thresholds passed to [`Link::survival`] are on the received squared gain
/// `s·X·Y`, so they are divided by the path-loss scale `s` before lookup.
#[derive(Debug, Clone, Copy)]
pub struct Link<T> {
    law: DoubleGamma<T>,
    geometry: LinkGeometry<T>,
    scale: T,
}

impl<T: Real> Link<T> {
    pub fn new(params: &DoubleNakagamiParams<T>, geometry: &LinkGeometry<T>) -> Result<Self> {
        geometry.validate()?;
        Ok(Self {
            law: DoubleGamma::new(params)?,
            geometry: *geometry,
            scale: effective_scale(params, geometry),
        })
    }

    pub fn params(&self) -> &DoubleNakagamiParams<T> {
        self.law.params()
    }

    pub fn geometry(&self) -> &LinkGeometry<T> {
        &self.geometry
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn law(&self) -> &DoubleGamma<T> {
        &self.law
    }

    /// `P(s·g² > threshold)`.
    pub fn survival(&self, threshold: T) -> Result<T> {
        self.law.survival(threshold / self.scale)
    }
}

/// Draws `s·X·Y` for one link. Only the squared gain is produced.
#[derive(Debug, Clone, Copy)]
pub struct GainSampler {
    first: Gamma<f64>,
    second: Gamma<f64>,
    scale: f64,
}

impl GainSampler {
    pub fn new(params: &DoubleNakagamiParams<f64>, geometry: &LinkGeometry<f64>) -> Result<Self> {
        params.validate()?;
        geometry.validate()?;
        let gamma = |shape: f64, spread: f64| {
            Gamma::new(shape, spread / shape)
                .map_err(|e| crate::Error::Domain(format!("gamma sampler: {e}")))
        };
        Ok(Self {
            first: gamma(params.m1, params.omega1)?,
            second: gamma(params.m2, params.omega2)?,
            scale: effective_scale(params, geometry),
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.first.sample(rng) * self.second.sample(rng)
    }
}

/// One draw of the received squared gain. Prefer [`GainSampler`] in loops.
pub fn sample_gain_sq<R: Rng + ?Sized>(
    params: &DoubleNakagamiParams<f64>,
    geom: &LinkGeometry<f64>,
    rng: &mut R,
) -> Result<f64> {
    Ok(GainSampler::new(params, geom)?.sample(rng))
}
