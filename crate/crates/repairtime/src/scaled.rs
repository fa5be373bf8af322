//! Bayesian prediction under the scaled model (known location mu = 0) with
//! the noninformative prior pi(sigma) proportional to 1/sigma.
//!
//! Everything here is closed-form in the incomplete beta function and its
//! inverse: the posterior of sigma is inverted gamma, and the predictive
//! law of the m-th repair time U satisfies
//! P(U > z | x) = I(d, m, p_k(z; x)) with p_k(z; x) = delta / (delta + k z^2),
//! equivalently p_k(U; x) | x ~ Beta(d, m).

use crate::error::{Error, Result};
use crate::model::{HybridSample, PredictionTarget};
use crate::numerics::special::{ln_beta, ln_gamma};
use crate::numerics::{
    bracketed_root, inverse_incomplete_beta, regularized_incomplete_beta, RootSpec,
};
use crate::predictions::{validate_level, IntervalKind, PointPredictions, PredictionInterval};

/// Inverted-gamma posterior of sigma under the scaled model: shape `d`,
/// scale `half_delta` = delta(x)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPosterior {
    d: usize,
    half_delta: f64,
}

impl ScaledPosterior {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn half_delta(&self) -> f64 {
        self.half_delta
    }

    /// Posterior density of sigma.
    pub fn pdf(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return 0.0;
        }
        let d = self.d as f64;
        let ln_pdf = d * self.half_delta.ln()
            - ln_gamma(d)
            - (d + 1.0) * sigma.ln()
            - self.half_delta / sigma;
        ln_pdf.exp()
    }

    /// Posterior mean of sigma, finite only for d >= 2.
    pub fn mean(&self) -> Option<f64> {
        (self.d >= 2).then(|| self.half_delta / (self.d as f64 - 1.0))
    }
}

fn sufficient_stats(s: &HybridSample) -> Result<(f64, f64)> {
    if s.d() == 0 {
        return Err(Error::ImproperPosterior);
    }
    let delta = s.delta();
    if !(delta > 0.0) {
        return Err(Error::Domain(
            "degenerate sample: total time-squared on test is zero".into(),
        ));
    }
    Ok((s.d() as f64, delta))
}

/// Posterior of sigma given the censored sample; requires d >= 1.
pub fn scaled_posterior(s: &HybridSample) -> Result<ScaledPosterior> {
    let (_, delta) = sufficient_stats(s)?;
    Ok(ScaledPosterior {
        d: s.d(),
        half_delta: delta / 2.0,
    })
}

/// The predictive Beta transform p_k(y; x) = delta / (delta + k y^2).
///
/// Strictly decreasing in y with p_k(0) = 1; given the data, p_k(U; x)
/// follows Beta(d, m).
pub fn p_k(y: f64, s: &HybridSample, k: u32) -> f64 {
    let delta = s.delta();
    delta / (delta + f64::from(k) * y * y)
}

/// Predictive density of the m-th repair time: (2 / (B(d,m) u)) p^d (1-p)^m
/// with p = p_k(u; x). Zero for u <= 0.
pub fn scaled_predictive_pdf(u: f64, s: &HybridSample, t: &PredictionTarget) -> Result<f64> {
    let (d, _) = sufficient_stats(s)?;
    if u <= 0.0 {
        return Ok(0.0);
    }
    let m = f64::from(t.m());
    let p = p_k(u, s, t.k());
    let ln_pdf = std::f64::consts::LN_2 - ln_beta(d, m) - u.ln()
        + d * p.ln()
        + m * (-p).ln_1p();
    Ok(ln_pdf.exp())
}

/// Predictive survival P(U > z | x) = I(d, m, p_k(z; x)); 1 for z <= 0.
pub fn scaled_predictive_survival(
    z: f64,
    s: &HybridSample,
    t: &PredictionTarget,
) -> Result<f64> {
    let (d, _) = sufficient_stats(s)?;
    if z <= 0.0 {
        return Ok(1.0);
    }
    regularized_incomplete_beta(d, f64::from(t.m()), p_k(z, s, t.k()))
}

/// Endpoint with predictive survival q: the z solving I(d, m, p_k(z)) = q.
fn survival_quantile(q: f64, d: f64, m: f64, delta: f64, k: f64) -> Result<f64> {
    let p = inverse_incomplete_beta(d, m, q)?;
    Ok((delta * (1.0 - p) / (k * p)).sqrt())
}

/// Equi-tailed interval: survival 1 - alpha/2 at the lower endpoint and
/// alpha/2 at the upper.
pub fn scaled_equitailed_pi(
    s: &HybridSample,
    t: &PredictionTarget,
    alpha: f64,
) -> Result<PredictionInterval> {
    let (d, delta) = sufficient_stats(s)?;
    validate_level(alpha)?;
    let m = f64::from(t.m());
    let k = f64::from(t.k());
    Ok(PredictionInterval {
        lower: survival_quantile(1.0 - alpha / 2.0, d, m, delta, k)?,
        upper: survival_quantile(alpha / 2.0, d, m, delta, k)?,
        level: 1.0 - alpha,
        kind: IntervalKind::EquiTailed,
    })
}

/// Log predictive density up to an additive constant, the objective shared
/// by the mode formula and the HPD density-equality equation.
fn log_density_shape(w: f64, d: f64, m: f64, delta: f64, k: f64) -> f64 {
    (2.0 * m - 1.0) * w.ln() - (d + m) * (delta + k * w * w).ln()
}

fn predictive_mode(d: f64, m: f64, delta: f64, k: f64) -> f64 {
    ((2.0 * m - 1.0) * delta / (k * (2.0 * d + 1.0))).sqrt()
}

/// Highest-predictive-density interval (w1, w2): equal density at the
/// endpoints and content 1 - alpha.
///
/// Solved as two nested scalar problems: for each candidate w1 left of the
/// mode, the matching w2 with equal density is bracketed right of the mode
/// (the log-density is strictly decreasing there), and the outer root drives
/// the contained probability to 1 - alpha.
pub fn scaled_hpd_pi(
    s: &HybridSample,
    t: &PredictionTarget,
    alpha: f64,
) -> Result<PredictionInterval> {
    let (d, delta) = sufficient_stats(s)?;
    validate_level(alpha)?;
    let m = f64::from(t.m());
    let k = f64::from(t.k());
    let mode = predictive_mode(d, m, delta, k);
    let spec = RootSpec::default();

    let upper_for = |w1: f64| -> Result<f64> {
        let target = log_density_shape(w1, d, m, delta, k);
        let mut hi = 2.0 * mode;
        let mut doublings = 0;
        while log_density_shape(hi, d, m, delta, k) > target {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(Error::Bracket(
                    "matching-density endpoint ran away above the mode".into(),
                ));
            }
        }
        bracketed_root(
            |w| log_density_shape(w, d, m, delta, k) - target,
            mode,
            hi,
            &spec,
        )
    };
    let coverage = |w1: f64| -> Result<f64> {
        let w2 = upper_for(w1)?;
        let s1 = regularized_incomplete_beta(d, m, delta / (delta + k * w1 * w1))?;
        let s2 = regularized_incomplete_beta(d, m, delta / (delta + k * w2 * w2))?;
        Ok(s1 - s2)
    };

    // Coverage rises to 1 as w1 -> 0 and falls to 0 as w1 -> mode.
    let lo = mode * 1e-9;
    let hi = mode * (1.0 - 1e-9);
    let w1 = bracketed_root(
        |w| coverage(w).unwrap_or(f64::NAN) - (1.0 - alpha),
        lo,
        hi,
        &spec,
    )?;
    let w2 = upper_for(w1)?;

    let coverage_residual = (coverage(w1)? - (1.0 - alpha)).abs();
    let density_residual =
        (log_density_shape(w1, d, m, delta, k) - log_density_shape(w2, d, m, delta, k)).abs();
    if coverage_residual > 1e-9 || density_residual > 1e-9 {
        return Err(Error::NonConvergence {
            what: "highest-density interval".into(),
            residual: coverage_residual.max(density_residual),
        });
    }
    Ok(PredictionInterval {
        lower: w1,
        upper: w2,
        level: 1.0 - alpha,
        kind: IntervalKind::Hpd,
    })
}

/// The three point predictors in closed form: posterior mean, predictive
/// median, and predictive mode.
pub fn scaled_point_predictions(
    s: &HybridSample,
    t: &PredictionTarget,
) -> Result<PointPredictions> {
    let (d, delta) = sufficient_stats(s)?;
    let m = f64::from(t.m());
    let k = f64::from(t.k());
    // E(U | x) = B(d - 1/2, m + 1/2) / B(d, m) * sqrt(delta / k).
    let sel = (ln_beta(d - 0.5, m + 0.5) - ln_beta(d, m)).exp() * (delta / k).sqrt();
    let med = inverse_incomplete_beta(d, m, 0.5)?;
    let ael = (delta * (1.0 - med) / (k * med)).sqrt();
    let mode = predictive_mode(d, m, delta, k);
    Ok(PointPredictions { sel, ael, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{extract_hybrid_sample, HybridScheme};
    use crate::numerics::{adaptive_quadrature, QuadratureSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    use crate::testdata::toy_sample;

    fn target(m: u32, k: u32) -> PredictionTarget {
        PredictionTarget::new(m, k).unwrap()
    }

    #[test]
    fn posterior_parameters_and_mean() {
        let s = toy_sample();
        let post = scaled_posterior(&s).unwrap();
        assert_eq!(post.d(), 2);
        assert_eq!(post.half_delta(), 4.5);
        assert_eq!(post.mean(), Some(4.5));
    }

    #[test]
    fn posterior_pdf_normalizes() {
        let post = scaled_posterior(&toy_sample()).unwrap();
        let spec = QuadratureSpec {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-12,
            max_subdivisions: 200,
        };
        let mass = adaptive_quadrature(|s| post.pdf(s), 0.0, 1e5, &spec).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-6, "mass {}", mass.value);
    }

    #[test]
    fn improper_without_failures() {
        let scheme = HybridScheme::new(3, 2, 1.0).unwrap();
        let empty = extract_hybrid_sample(&[2.0, 3.0, 4.0], scheme).unwrap();
        assert!(matches!(
            scaled_posterior(&empty),
            Err(Error::ImproperPosterior)
        ));
        assert!(scaled_point_predictions(&empty, &target(1, 1)).is_err());
    }

    #[test]
    fn beta_transform_values() {
        let s = toy_sample();
        assert_eq!(p_k(0.0, &s, 1), 1.0);
        assert_eq!(p_k(3.0, &s, 1), 0.5);
        assert_eq!(p_k(3.0, &s, 4), 0.2);
        // Strictly decreasing in y.
        let mut prev = 1.0;
        for i in 1..50 {
            let v = p_k(i as f64 * 0.2, &s, 2);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn survival_known_values() {
        let s = toy_sample();
        let t = target(1, 1);
        assert!((scaled_predictive_survival(3.0, &s, &t).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(scaled_predictive_survival(0.0, &s, &t).unwrap(), 1.0);
        assert!((scaled_predictive_survival(1e-9, &s, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pdf_normalizes_and_matches_survival_derivative() {
        let s = toy_sample();
        let t = target(1, 1);
        let spec = QuadratureSpec::default();
        let mass =
            adaptive_quadrature(|u| scaled_predictive_pdf(u, &s, &t).unwrap(), 0.0, 1e3, &spec)
                .unwrap();
        assert!((mass.value - 1.0).abs() < 1e-8, "mass {}", mass.value);
        // pdf = -dS/du by central differences.
        for i in 1..20 {
            let u = i as f64 * 0.4;
            let h = 1e-5;
            let slope = (scaled_predictive_survival(u + h, &s, &t).unwrap()
                - scaled_predictive_survival(u - h, &s, &t).unwrap())
                / (2.0 * h);
            let pdf = scaled_predictive_pdf(u, &s, &t).unwrap();
            assert!((pdf + slope).abs() < 1e-6, "mismatch at u={u}");
        }
    }

    #[test]
    fn pdf_is_stationary_at_mode() {
        let s = toy_sample();
        for (m, k) in [(1u32, 1u32), (2, 1), (3, 2)] {
            let t = target(m, k);
            let mode = scaled_point_predictions(&s, &t).unwrap().mode;
            let h = 1e-6 * mode;
            let up = scaled_predictive_pdf(mode + h, &s, &t).unwrap();
            let down = scaled_predictive_pdf(mode - h, &s, &t).unwrap();
            let peak = scaled_predictive_pdf(mode, &s, &t).unwrap();
            assert!(up < peak && down < peak, "not a local max for m={m} k={k}");
            assert!(((up - down) / (2.0 * h)).abs() < 1e-4 * peak);
        }
    }

    #[test]
    fn equitailed_toy_interval() {
        let s = toy_sample();
        let t = target(1, 1);
        let pi = scaled_equitailed_pi(&s, &t, 0.05).unwrap();
        assert!((pi.lower - 0.338_606_414_223_061_76).abs() < 1e-9);
        assert!((pi.upper - 6.922_499_395_668_505).abs() < 1e-9);
        assert_eq!(pi.kind, IntervalKind::EquiTailed);
        assert_eq!(pi.level, 0.95);
        // Defining property: survival hits the two tail levels.
        let s_lo = scaled_predictive_survival(pi.lower, &s, &t).unwrap();
        let s_hi = scaled_predictive_survival(pi.upper, &s, &t).unwrap();
        assert!((s_lo - 0.975).abs() < 1e-10);
        assert!((s_hi - 0.025).abs() < 1e-10);
    }

    #[test]
    fn equitailed_matches_single_repair_closed_form() {
        // For m = 1 the endpoint is sqrt(delta ((q)^{-1/d} - 1) / k) at
        // survival level q.
        let s = toy_sample();
        let d = 2.0;
        let delta = 9.0;
        for &(k, alpha) in &[(1u32, 0.05), (2, 0.05), (3, 0.10)] {
            let pi = scaled_equitailed_pi(&s, &target(1, k), alpha).unwrap();
            let lo = (delta * ((1.0 - alpha / 2.0).powf(-1.0 / d) - 1.0) / f64::from(k)).sqrt();
            let hi = (delta * ((alpha / 2.0).powf(-1.0 / d) - 1.0) / f64::from(k)).sqrt();
            assert!((pi.lower - lo).abs() < 1e-10);
            assert!((pi.upper - hi).abs() < 1e-10);
        }
    }

    #[test]
    fn point_predictions_toy_values() {
        let s = toy_sample();
        let p = scaled_point_predictions(&s, &target(1, 1)).unwrap();
        assert!((p.sel - 2.356_194_490_192_345).abs() < 1e-12);
        assert!((p.ael - 1.930_782_758_716_748).abs() < 1e-11);
        assert!((p.mode - 1.341_640_786_499_873_8).abs() < 1e-12);
        let survival_at_median =
            scaled_predictive_survival(p.ael, &s, &target(1, 1)).unwrap();
        assert!((survival_at_median - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sel_is_the_predictive_mean() {
        let s = toy_sample();
        for (m, k) in [(1u32, 1u32), (2, 2), (3, 1)] {
            let t = target(m, k);
            let sel = scaled_point_predictions(&s, &t).unwrap().sel;
            let spec = QuadratureSpec::default();
            let mean = adaptive_quadrature(
                |u| u * scaled_predictive_pdf(u, &s, &t).unwrap(),
                0.0,
                2e3,
                &spec,
            )
            .unwrap();
            assert!(
                (mean.value - sel).abs() < 2e-6,
                "mean {} vs sel {sel} for m={m} k={k}",
                mean.value
            );
        }
    }

    #[test]
    fn hpd_toy_interval_and_defining_properties() {
        let s = toy_sample();
        let t = target(1, 1);
        let pi = scaled_hpd_pi(&s, &t, 0.05).unwrap();
        assert!((pi.lower - 0.061_346_863_818).abs() < 1e-8, "lower {}", pi.lower);
        assert!((pi.upper - 5.620_489_456_839).abs() < 1e-7, "upper {}", pi.upper);
        // Density equality at the endpoints, relative.
        let h1 = scaled_predictive_pdf(pi.lower, &s, &t).unwrap();
        let h2 = scaled_predictive_pdf(pi.upper, &s, &t).unwrap();
        assert!((h1 - h2).abs() < 1e-8 * h1);
        // Contained probability.
        let content = scaled_predictive_survival(pi.lower, &s, &t).unwrap()
            - scaled_predictive_survival(pi.upper, &s, &t).unwrap();
        assert!((content - 0.95).abs() < 1e-8);
    }

    #[test]
    fn hpd_is_narrower_than_equitailed() {
        let s = toy_sample();
        for m in 1..=3u32 {
            let t = target(m, 2);
            let hpd = scaled_hpd_pi(&s, &t, 0.05).unwrap();
            let eq = scaled_equitailed_pi(&s, &t, 0.05).unwrap();
            assert!(hpd.width() <= eq.width(), "m={m}");
            assert!(hpd.lower < hpd.upper);
        }
    }

    #[test]
    fn scale_equivariance() {
        let scheme = HybridScheme::new(3, 2, 2.0).unwrap();
        let base = extract_hybrid_sample(&[1.0, 2.0, 5.0], scheme).unwrap();
        let c = 3.0;
        let scaled_scheme = HybridScheme::new(3, 2, 2.0 * c).unwrap();
        let scaled = extract_hybrid_sample(&[c, 2.0 * c, 5.0 * c], scaled_scheme).unwrap();
        let t = target(2, 2);
        let p0 = scaled_point_predictions(&base, &t).unwrap();
        let p1 = scaled_point_predictions(&scaled, &t).unwrap();
        assert!((p1.sel - c * p0.sel).abs() < 1e-12 * p1.sel);
        assert!((p1.ael - c * p0.ael).abs() < 1e-12 * p1.ael);
        assert!((p1.mode - c * p0.mode).abs() < 1e-12 * p1.mode);
        let i0 = scaled_equitailed_pi(&base, &t, 0.05).unwrap();
        let i1 = scaled_equitailed_pi(&scaled, &t, 0.05).unwrap();
        assert!((i1.lower - c * i0.lower).abs() < 1e-12 * i1.lower);
        assert!((i1.upper - c * i0.upper).abs() < 1e-12 * i1.upper);
    }

    #[test]
    fn component_count_scaling_is_exact() {
        // k enters only as delta/k under a square root, so quadrupling k
        // halves everything exactly in floating point.
        let s = toy_sample();
        let p1 = scaled_point_predictions(&s, &target(2, 1)).unwrap();
        let p4 = scaled_point_predictions(&s, &target(2, 4)).unwrap();
        assert_eq!(p4.sel, p1.sel / 2.0);
        assert_eq!(p4.ael, p1.ael / 2.0);
        assert_eq!(p4.mode, p1.mode / 2.0);
        let i1 = scaled_equitailed_pi(&s, &target(2, 1), 0.05).unwrap();
        let i4 = scaled_equitailed_pi(&s, &target(2, 4), 0.05).unwrap();
        assert_eq!(i4.lower, i1.lower / 2.0);
        assert_eq!(i4.upper, i1.upper / 2.0);
    }

    #[test]
    fn beta_transform_of_draws_is_beta_distributed() {
        // Composition sampling: sigma from the posterior, then U given
        // sigma; p_k(U; x) must then be Beta(d, m).
        let s = toy_sample();
        let t = target(2, 2);
        let post = scaled_posterior(&s).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 20_000;
        let mut transformed: Vec<f64> = (0..n)
            .map(|_| {
                let mut g = 0.0;
                for _ in 0..post.d() {
                    let v: f64 = rng.gen();
                    g -= (-v).ln_1p();
                }
                let sigma = post.half_delta() / g;
                let mut gm = 0.0;
                for _ in 0..t.m() {
                    let v: f64 = rng.gen();
                    gm -= (-v).ln_1p();
                }
                let u = (2.0 * sigma * gm / f64::from(t.k())).sqrt();
                p_k(u, &s, t.k())
            })
            .collect();
        transformed.sort_by(f64::total_cmp);
        let d = s.d() as f64;
        let m = f64::from(t.m());
        let mut sup = 0.0_f64;
        for (i, &p) in transformed.iter().enumerate() {
            let cdf = regularized_incomplete_beta(d, m, p).unwrap();
            sup = sup
                .max(((i + 1) as f64 / n as f64 - cdf).abs())
                .max((cdf - i as f64 / n as f64).abs());
        }
        assert!(sup < 3.0 / (n as f64).sqrt(), "Kolmogorov distance {sup}");
    }
}
