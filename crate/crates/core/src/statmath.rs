// SPDX-License-Identifier: Apache-2.0

//! Closed-form algebra on normally distributed quantities.
//!
//! Sums and differences of Gaussians are exact. Products, ratios and the
//! nonnegative truncation are moment-matched approximations; each one states
//! the regime in which it is accurate.

use core::sync::atomic::{AtomicU64, Ordering};

static VARIANCE_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of correlated subtractions whose variance came out negative and was
/// clamped to zero, since process start.
pub fn variance_clamp_count() -> u64 {
    VARIANCE_CLAMPS.load(Ordering::Relaxed)
}

/// Minimum |mean| / std-dev of a ratio denominator.
pub const HINKLEY_MIN_SNR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StatError {
    #[error("non-finite moment (mean {mean}, variance {variance})")]
    NonFinite { mean: f64, variance: f64 },
    #[error("negative variance {0}")]
    NegativeVariance(f64),
    #[error("correlation {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),
    #[error("ratio denominator too close to zero (|mean|/std = {snr:.3} < 4)")]
    DenominatorNearZero { snr: f64 },
    #[error("division by a zero-valued constant")]
    DivisionByZero,
}

/// Standard normal CDF, via the complementary error function.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * core::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * libm::exp(-0.5 * z * z)
}

/// A normal random variable described by its first two moments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gaussian {
    mean: f64,
    variance: f64,
}

impl Gaussian {
    pub const ZERO: Gaussian = Gaussian {
        mean: 0.0,
        variance: 0.0,
    };

    pub fn new(mean: f64, variance: f64) -> Result<Self, StatError> {
        if !mean.is_finite() || !variance.is_finite() {
            return Err(StatError::NonFinite { mean, variance });
        }
        if variance < 0.0 {
            return Err(StatError::NegativeVariance(variance));
        }
        Ok(Gaussian { mean, variance })
    }

    pub fn from_std(mean: f64, std_dev: f64) -> Result<Self, StatError> {
        Self::new(mean, std_dev * std_dev)
    }

    /// A deterministic value.
    pub const fn point(value: f64) -> Self {
        Gaussian {
            mean: value,
            variance: 0.0,
        }
    }

    /// Internal constructor for results of closed-form operations; roundoff
    /// below zero is flushed.
    pub(crate) fn raw(mean: f64, variance: f64) -> Self {
        Gaussian {
            mean,
            variance: if variance > 0.0 { variance } else { 0.0 },
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        libm::sqrt(self.variance)
    }

    pub fn is_degenerate(&self) -> bool {
        self.variance == 0.0
    }

    /// Same spread, mean replaced by `clamp(mean, lo, hi)`.
    pub fn clamp_mean(self, lo: f64, hi: f64) -> Self {
        Gaussian {
            mean: self.mean.clamp(lo, hi),
            ..self
        }
    }

    /// Sum of independent variables.
    pub fn add(self, other: Gaussian) -> Gaussian {
        Gaussian::raw(self.mean + other.mean, self.variance + other.variance)
    }

    /// `self - other` for variables with the given correlation coefficient.
    pub fn sub(self, other: Gaussian, correlation: f64) -> Result<Gaussian, StatError> {
        if !(-1.0..=1.0).contains(&correlation) {
            return Err(StatError::CorrelationOutOfRange(correlation));
        }
        let cov = correlation * libm::sqrt(self.variance * other.variance);
        let var = self.variance + other.variance - 2.0 * cov;
        // Exact cancellation (identical, fully correlated operands) is not a clamp.
        if var < -1e-12 * (self.variance + other.variance) {
            VARIANCE_CLAMPS.fetch_add(1, Ordering::Relaxed);
        }
        Ok(Gaussian::raw(self.mean - other.mean, var))
    }

    /// `self - other` for independent variables.
    pub fn sub_independent(self, other: Gaussian) -> Gaussian {
        Gaussian::raw(self.mean - other.mean, self.variance + other.variance)
    }

    pub fn scale(self, k: f64) -> Gaussian {
        Gaussian::raw(self.mean * k, self.variance * (k * k))
    }

    /// Moment-matched product of independent variables. Exact in the first two
    /// moments; the normal shape is only accurate when both operands have a
    /// small coefficient of variation.
    pub fn product(self, other: Gaussian) -> Gaussian {
        let (m1, v1, m2, v2) = (self.mean, self.variance, other.mean, other.variance);
        Gaussian::raw(m1 * m2, m1 * m1 * v2 + m2 * m2 * v1 + v1 * v2)
    }

    /// Normal approximation of `x / y` for independent `x`, `y` (second-order
    /// delta method). Requires `|mean(y)| / std(y) >= 4`.
    pub fn ratio_hinkley(x: Gaussian, y: Gaussian) -> Result<Gaussian, StatError> {
        if y.variance == 0.0 {
            if y.mean == 0.0 {
                return Err(StatError::DivisionByZero);
            }
        } else {
            let snr = libm::fabs(y.mean) / y.std_dev();
            if snr < HINKLEY_MIN_SNR {
                return Err(StatError::DenominatorNearZero { snr });
            }
        }
        let inv = 1.0 / y.mean;
        let inv2 = inv * inv;
        let mean = x.mean * inv * (1.0 + y.variance * inv2);
        let var = x.variance * inv2 + x.mean * x.mean * y.variance * (inv2 * inv2);
        Ok(Gaussian::raw(mean, var))
    }

    /// `P(X < threshold)`. A degenerate variable returns 1, 0.5 or 0.
    pub fn cdf_below(&self, threshold: f64) -> f64 {
        if self.variance == 0.0 {
            return if self.mean < threshold {
                1.0
            } else if self.mean == threshold {
                0.5
            } else {
                0.0
            };
        }
        std_normal_cdf((threshold - self.mean) / self.std_dev())
    }

    /// Moment-matched Gaussian of `max(X, 0)`.
    pub fn truncate_nonneg(self) -> Gaussian {
        if self.variance == 0.0 {
            return Gaussian::point(if self.mean > 0.0 { self.mean } else { 0.0 });
        }
        let sigma = self.std_dev();
        let alpha = self.mean / sigma;
        if alpha > 8.5 {
            // Negative tail below 1e-17.
            return self;
        }
        if alpha < -8.5 {
            return Gaussian::ZERO;
        }
        let cdf = std_normal_cdf(alpha);
        let pdf = std_normal_pdf(alpha);
        let mu = self.mean;
        let mean = mu * cdf + sigma * pdf;
        let second = (mu * mu + self.variance) * cdf + mu * sigma * pdf;
        Gaussian::raw(mean, second - mean * mean)
    }

    /// Single Gaussian matching the first two moments of a weighted mixture.
    /// Weights are normalized by their sum; an empty or zero-weight mixture is zero.
    pub fn mixture<I: IntoIterator<Item = (f64, Gaussian)>>(components: I) -> Gaussian {
        let (mut total, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (w, g) in components {
            if w == 0.0 {
                continue;
            }
            total += w;
            m1 += w * g.mean;
            m2 += w * (g.variance + g.mean * g.mean);
        }
        if total <= 0.0 {
            return Gaussian::ZERO;
        }
        let mean = m1 / total;
        Gaussian::raw(mean, m2 / total - mean * mean)
    }
}
