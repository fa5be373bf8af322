//! Data model: the two-parameter Rayleigh lifetime law, hybrid-censored
//! samples of a k-component series system, and the distribution of the m-th
//! minimal-repair time.
//!
//! Conventions. `sigma` divides the squared deviation in the exponent,
//! cdf = 1 - exp(-(x - mu)^2 / (2 sigma)), so it carries squared time units
//! and is NOT the classical Rayleigh scale (which would be its square root).
//! A system of `k` identical components in series fails at the minimum of
//! the component lifetimes, and under minimal repair the m-th repair time
//! has the k-record density implemented here.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::ln_gamma;

/// Location and scale of a two-parameter Rayleigh law.
///
/// `sigma` is variance-like: it divides the squared deviation in the
/// exponent. Support is x > mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    mu: f64,
    sigma: f64,
}

impl RayleighParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("location must be finite, got {mu}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "scale must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Rayleigh density ((x-mu)/sigma) exp(-(x-mu)^2 / (2 sigma)), zero at and
/// below the location.
pub fn rayleigh_pdf(x: f64, p: &RayleighParams) -> f64 {
    if x <= p.mu {
        return 0.0;
    }
    let z = x - p.mu;
    z / p.sigma * (-z * z / (2.0 * p.sigma)).exp()
}

/// Rayleigh distribution function 1 - exp(-(x-mu)^2 / (2 sigma)).
pub fn rayleigh_cdf(x: f64, p: &RayleighParams) -> f64 {
    if x <= p.mu {
        return 0.0;
    }
    let z = x - p.mu;
    -(-z * z / (2.0 * p.sigma)).exp_m1()
}

/// Rayleigh quantile mu + sqrt(-2 sigma ln(1-u)) for 0 < u < 1.
pub fn rayleigh_quantile(u: f64, p: &RayleighParams) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {u}"
        )));
    }
    Ok(p.mu + (-2.0 * p.sigma * (-u).ln_1p()).sqrt())
}

/// One Rayleigh lifetime draw by cdf inversion.
pub fn sample_lifetime<R: Rng + ?Sized>(p: &RayleighParams, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    p.mu + (-2.0 * p.sigma * (-u).ln_1p()).sqrt()
}

/// Hybrid censoring plan: n units on test, stop at the r-th failure or at
/// time T, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridScheme {
    n: usize,
    r: usize,
    t: f64,
}

impl HybridScheme {
    pub fn new(n: usize, r: usize, t: f64) -> Result<Self> {
        if !(1 <= r && r <= n) {
            return Err(Error::Domain(format!(
                "hybrid scheme requires 1 <= r <= n, got r = {r}, n = {n}"
            )));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "censoring time must be positive and finite, got {t}"
            )));
        }
        Ok(Self { n, r, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// The observed part of a hybrid-censored experiment: the first `d` order
/// statistics together with the realized termination time.
///
/// `d = 0` is representable (nothing failed before min(x_r, T)); inference
/// layers reject it because the posterior is improper without data.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSample {
    x: Vec<f64>,
    scheme: HybridScheme,
    d: usize,
    t0: f64,
    // Cached sufficient statistics: sum_sq = sum x_i^2 + (n-d) T0^2 and
    // sum_lin = sum x_i + (n-d) T0, so delta_star is O(1) per call.
    sum_sq: f64,
    sum_lin: f64,
}

/// Reduce a full vector of n lifetimes to the hybrid-censored sample.
pub fn extract_hybrid_sample(lifetimes: &[f64], scheme: HybridScheme) -> Result<HybridSample> {
    if lifetimes.len() != scheme.n {
        return Err(Error::Domain(format!(
            "expected {} lifetimes for the scheme, got {}",
            scheme.n,
            lifetimes.len()
        )));
    }
    if let Some(bad) = lifetimes.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("lifetime {bad} is not finite")));
    }
    let mut sorted = lifetimes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = sorted[..scheme.r].iter().filter(|&&v| v <= scheme.t).count();
    let t0 = if d == scheme.r {
        sorted[scheme.r - 1].min(scheme.t)
    } else {
        scheme.t
    };
    sorted.truncate(d);
    let census = (scheme.n - d) as f64;
    let sum_sq = sorted.iter().map(|v| v * v).sum::<f64>() + census * t0 * t0;
    let sum_lin = sorted.iter().sum::<f64>() + census * t0;
    Ok(HybridSample {
        x: sorted,
        scheme,
        d,
        t0,
        sum_sq,
        sum_lin,
    })
}

impl HybridSample {
    pub fn scheme(&self) -> HybridScheme {
        self.scheme
    }

    /// Number of observed failures.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Realized termination time.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// The observed order statistics x_1 <= ... <= x_d.
    pub fn observations(&self) -> &[f64] {
        &self.x
    }

    /// Smallest observed failure time, if any failure was observed.
    pub fn x1(&self) -> Option<f64> {
        self.x.first().copied()
    }

    /// Total time-squared on test: sum x_i^2 + (n-d) T0^2.
    pub fn delta(&self) -> f64 {
        self.sum_sq
    }

    /// Shifted total time-squared sum (x_i - mu)^2 + (n-d)(T0 - mu)^2,
    /// expanded to the quadratic sum_sq - 2 mu sum_lin + n mu^2 and clamped
    /// at zero against cancellation.
    pub fn delta_star(&self, mu: f64) -> f64 {
        let n = self.scheme.n as f64;
        (self.sum_sq - 2.0 * mu * self.sum_lin + n * mu * mu).max(0.0)
    }
}

/// Prediction target: the m-th minimal-repair time of a k-component series
/// system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPredictionTarget")]
pub struct PredictionTarget {
    m: u32,
    k: u32,
}

// Deserialization shim so serialized targets re-enter through validation.
#[derive(Deserialize)]
struct RawPredictionTarget {
    m: u32,
    k: u32,
}

impl TryFrom<RawPredictionTarget> for PredictionTarget {
    type Error = Error;

    fn try_from(raw: RawPredictionTarget) -> Result<Self> {
        Self::new(raw.m, raw.k)
    }
}

impl PredictionTarget {
    pub fn new(m: u32, k: u32) -> Result<Self> {
        if m < 1 || k < 1 {
            return Err(Error::Domain(format!(
                "prediction target requires m >= 1 and k >= 1, got m = {m}, k = {k}"
            )));
        }
        Ok(Self { m, k })
    }

    /// Repair index.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of series components.
    pub fn k(&self) -> u32 {
        self.k
    }
}

/// Density of the m-th minimal-repair time:
/// k^m (u-mu)^{2m-1} / (Gamma(m) sigma^m 2^{m-1}) exp(-k (u-mu)^2 / (2 sigma)).
pub fn krecord_pdf(u: f64, p: &RayleighParams, t: &PredictionTarget) -> f64 {
    if u <= p.mu {
        return 0.0;
    }
    let m = f64::from(t.m);
    let k = f64::from(t.k);
    let z = u - p.mu;
    let ln_pdf = m * k.ln() + (2.0 * m - 1.0) * z.ln()
        - ln_gamma(m)
        - m * p.sigma.ln()
        - (m - 1.0) * std::f64::consts::LN_2
        - k * z * z / (2.0 * p.sigma);
    ln_pdf.exp()
}

/// One draw of the m-th minimal-repair time, using the fact that
/// k (U - mu)^2 / (2 sigma) is Gamma(m, 1): U = mu + sqrt(2 sigma G / k)
/// with G a sum of m unit exponentials.
pub fn sample_krecord<R: Rng + ?Sized>(
    p: &RayleighParams,
    t: &PredictionTarget,
    rng: &mut R,
) -> f64 {
    let mut g = 0.0;
    for _ in 0..t.m {
        let u: f64 = rng.gen();
        g -= (-u).ln_1p();
    }
    p.mu + (2.0 * p.sigma * g / f64::from(t.k)).sqrt()
}
