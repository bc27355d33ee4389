//! Scalar standard-Gaussian numerics: density, CDF, truncated raw moments
//! over half-open intervals, fixed-node Gauss-Hermite expectation, and
//! reproducible stream-seeded sampling.
//!
//! Only N(0,1) is supported natively; other variances are handled by affine
//! rescaling at call sites.

mod erf;
mod hermite;
mod sampling;

pub use hermite::{gauss_expect, GaussHermite};
pub use sampling::{mc_mean_ci, sample_normal, McAccumulator, Seed, StreamRng, MC_BLOCK};

/// 1/sqrt(2*pi).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, absolute error <= 1e-14 over the whole line.
///
/// Built on the complementary error function so the tails keep full relative
/// accuracy: Phi(x) = erfc(-x/sqrt(2)) / 2.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erf::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// A half-open interval `[lo, hi)`; either endpoint may be infinite.
///
/// This is the cell shape used throughout: quantizer cells, policy pieces,
/// and truncation ranges all share the `[lo, hi)` convention.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> crate::Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(crate::Error::InvalidParameter(format!(
                "interval [{lo}, {hi}) requires lo <= hi and no NaN"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Whole real line.
    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Unnormalized raw moments of N(0,1) restricted to an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMoments {
    /// P(Y in [lo, hi)).
    pub mass: f64,
    /// E[Y 1{Y in [lo, hi)}].
    pub m1: f64,
    /// E[Y^2 1{Y in [lo, hi)}].
    pub m2: f64,
}

/// Closed-form truncated raw moments:
/// mass = Phi(hi) - Phi(lo), m1 = phi(lo) - phi(hi),
/// m2 = mass + lo*phi(lo) - hi*phi(hi), with x*phi(x) -> 0 as |x| -> inf.
pub fn truncated_moments(iv: Interval) -> TruncatedMoments {
    let p_lo = std_normal_pdf(iv.lo);
    let p_hi = std_normal_pdf(iv.hi);
    let mass = std_normal_cdf(iv.hi) - std_normal_cdf(iv.lo);
    let x_phi = |x: f64, p: f64| if x.is_finite() { x * p } else { 0.0 };
    TruncatedMoments {
        mass,
        m1: p_lo - p_hi,
        m2: mass + x_phi(iv.lo, p_lo) - x_phi(iv.hi, p_hi),
    }
}
