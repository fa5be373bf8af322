//! Classical (non-Bayesian) counterparts: maximum-likelihood fitting of the
//! location-scale model under hybrid censoring, a Kolmogorov-Smirnov fit
//! statistic, and plug-in prediction intervals built on the chi-square
//! pivot of the repair-time distribution at the fitted parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rayleigh_cdf, HybridSample, PredictionTarget, RayleighParams};
use crate::numerics::special::regularized_lower_gamma;
use crate::numerics::{chi_square_upper_quantile, unimodal_maximize, RootSpec};
use crate::predictions::{validate_level, IntervalKind, PredictionInterval};

/// Maximum-likelihood fit of the hybrid-censored model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    /// Both estimates are finite and the scale equation holds.
    pub converged: bool,
    /// Set when the location estimate pinned itself against the upper
    /// constraint mu < x1 (within 1e-6 of the search range).
    pub boundary: bool,
    /// Value of the location score equation in its commonly printed form,
    /// evaluated at the fit. That form is not the derivative of the
    /// log-likelihood maximized here, so a large residual is informative,
    /// not a failure.
    pub printed_score_residual: f64,
    /// Log-likelihood at the fit (additive constants included).
    pub log_likelihood: f64,
}

/// The scale that maximizes the likelihood at a fixed location:
/// sigma(mu) = delta_star(mu) / (2 d). Solves the scale score equation
/// -d/sigma + delta_star(mu)/(2 sigma^2) = 0 exactly.
pub fn profile_sigma(mu: f64, s: &HybridSample) -> Result<f64> {
    if s.d() == 0 {
        return Err(Error::Domain(
            "profile scale requires at least one observed failure".into(),
        ));
    }
    if !mu.is_finite() {
        return Err(Error::Domain(format!("location must be finite, got {mu}")));
    }
    Ok(s.delta_star(mu) / (2.0 * s.d() as f64))
}

/// Hybrid-censored log-likelihood of the two-parameter model.
fn log_likelihood(mu: f64, sigma: f64, s: &HybridSample) -> f64 {
    let d = s.d() as f64;
    let ln_terms: f64 = s.observations().iter().map(|&x| (x - mu).ln()).sum();
    ln_terms - d * sigma.ln() - s.delta_star(mu) / (2.0 * sigma)
}

/// Location score equation in its printed textbook form, evaluated verbatim.
fn printed_score(mu: f64, sigma: f64, s: &HybridSample) -> f64 {
    let n = s.scheme().n() as f64;
    let d = s.d() as f64;
    let first: f64 = s.observations().iter().map(|&x| -x * x / (x - mu)).sum();
    let second: f64 = s.observations().iter().map(|&x| x - mu).sum::<f64>()
        + (n - d) * (s.t0() - mu);
    first + second / sigma
}

/// Two-parameter maximum-likelihood fit by profile-likelihood search.
///
/// The location profile ell(mu, sigma(mu)) tends to -inf both as mu -> x1
/// (the ln(x1 - mu) factor) and as mu -> -inf, so with d >= 2 an interior
/// maximum exists; it is bracketed at [x1 - 10 range, x1 - 1e-9 range] and
/// located by parabolic/golden-section search.
pub fn mle_fit(s: &HybridSample) -> Result<MleFit> {
    if s.d() < 2 {
        return Err(Error::Domain(format!(
            "two-parameter fit requires at least two observed failures, got {}",
            s.d()
        )));
    }
    let x1 = s.x1().expect("d >= 2 guarantees observations");
    let span = s.t0() - x1;
    let range = if span > 0.0 {
        span
    } else {
        x1.abs().max(1.0) * 0.5
    };
    let profile = |mu: f64| {
        let sigma = s.delta_star(mu) / (2.0 * s.d() as f64);
        // At the profiled scale the exponential term is the constant -d.
        s.observations().iter().map(|&x| (x - mu).ln()).sum::<f64>()
            - s.d() as f64 * sigma.ln()
            - s.d() as f64
    };
    let (mu_hat, _) = unimodal_maximize(
        profile,
        x1 - 10.0 * range,
        x1 - 1e-9 * range,
        &RootSpec::default(),
    )?;
    let sigma_hat = s.delta_star(mu_hat) / (2.0 * s.d() as f64);
    let converged = mu_hat.is_finite() && sigma_hat.is_finite() && sigma_hat > 0.0;
    Ok(MleFit {
        mu_hat,
        sigma_hat,
        converged,
        boundary: x1 - mu_hat <= 1e-6 * range,
        printed_score_residual: printed_score(mu_hat, sigma_hat, s),
        log_likelihood: log_likelihood(mu_hat, sigma_hat, s),
    })
}

/// Maximum-likelihood fit of the scale-only model (location fixed at zero),
/// defined whenever at least one failure is observed: sigma_hat = delta/(2d).
pub fn scaled_mle_fit(s: &HybridSample) -> Result<MleFit> {
    if s.d() == 0 {
        return Err(Error::Domain(
            "scale fit requires at least one observed failure".into(),
        ));
    }
    if s.observations().iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain(
            "the scale-only model has support on positive lifetimes".into(),
        ));
    }
    let d = s.d() as f64;
    let sigma_hat = s.delta() / (2.0 * d);
    let ln_terms: f64 = s.observations().iter().map(|&x| x.ln()).sum();
    Ok(MleFit {
        mu_hat: 0.0,
        sigma_hat,
        converged: sigma_hat.is_finite() && sigma_hat > 0.0,
        boundary: false,
        printed_score_residual: 0.0,
        log_likelihood: ln_terms - d * sigma_hat.ln() - d,
    })
}

/// Kolmogorov-Smirnov distance between the data's empirical cdf and the
/// model cdf: sup_i max(|i/n - F(x(i))|, |(i-1)/n - F(x(i))|).
pub fn ks_statistic(data: &[f64], p: &RayleighParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyInput(
            "goodness-of-fit statistic needs at least one observation".into(),
        ));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut sup = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = rayleigh_cdf(x, p);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        sup = sup.max(above.abs()).max(below.abs());
    }
    Ok(sup)
}

/// Plug-in prediction interval for the m-th repair time of a k-component
/// system: k (U - mu_hat)^2 / sigma_hat is treated as chi-square with 2m
/// degrees of freedom at the fitted parameters, so the interval is
/// mu_hat + sqrt(sigma_hat chi2_q(2m) / k) at the two tail quantiles.
pub fn wald_pi(fit: &MleFit, target: PredictionTarget, alpha: f64) -> Result<PredictionInterval> {
    validate_level(alpha)?;
    if !(fit.mu_hat.is_finite() && fit.sigma_hat.is_finite() && fit.sigma_hat > 0.0) {
        return Err(Error::Domain(format!(
            "plug-in interval needs a finite fit with positive scale, got mu = {}, sigma = {}",
            fit.mu_hat, fit.sigma_hat
        )));
    }
    let df = 2 * target.m();
    let kf = f64::from(target.k());
    let offset = |upper_tail: f64| -> Result<f64> {
        let q = chi_square_upper_quantile(df, upper_tail)?;
        Ok((fit.sigma_hat * q / kf).sqrt())
    };
    Ok(PredictionInterval {
        lower: fit.mu_hat + offset(1.0 - alpha / 2.0)?,
        upper: fit.mu_hat + offset(alpha / 2.0)?,
        level: 1.0 - alpha,
        kind: IntervalKind::Wald,
    })
}

/// Plug-in point predictors at the fitted parameters: the mean, median, and
/// mode of the repair-time law with (mu, sigma) replaced by the estimates.
pub fn wald_point_predictions(
    fit: &MleFit,
    target: PredictionTarget,
) -> Result<crate::predictions::PointPredictions> {
    if !(fit.mu_hat.is_finite() && fit.sigma_hat.is_finite() && fit.sigma_hat > 0.0) {
        return Err(Error::Domain(format!(
            "plug-in predictors need a finite fit with positive scale, got mu = {}, sigma = {}",
            fit.mu_hat, fit.sigma_hat
        )));
    }
    let mf = f64::from(target.m());
    let kf = f64::from(target.k());
    let ln_gamma_ratio =
        crate::numerics::special::ln_gamma(mf + 0.5) - crate::numerics::special::ln_gamma(mf);
    let sel = fit.mu_hat + ln_gamma_ratio.exp() * (2.0 * fit.sigma_hat / kf).sqrt();
    let median_chi = chi_square_upper_quantile(2 * target.m(), 0.5)?;
    let ael = fit.mu_hat + (fit.sigma_hat * median_chi / kf).sqrt();
    let mode = fit.mu_hat + ((2.0 * mf - 1.0) * fit.sigma_hat / kf).sqrt();
    Ok(crate::predictions::PointPredictions { sel, ael, mode })
}

/// Tail mass of the plug-in repair-time law above z, via the chi-square
/// pivot; used to verify interval endpoints.
pub fn plugin_survival(fit: &MleFit, target: PredictionTarget, z: f64) -> f64 {
    if z <= fit.mu_hat {
        return 1.0;
    }
    let dev = z - fit.mu_hat;
    let v = f64::from(target.k()) * dev * dev / (2.0 * fit.sigma_hat);
    1.0 - regularized_lower_gamma(f64::from(target.m()), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{extract_hybrid_sample, rayleigh_quantile, HybridScheme};
    use crate::testdata::{bearing_sample, toy_sample, BALL_BEARINGS};
    use rand::{Rng, SeedableRng};

    fn complete_bearings() -> HybridSample {
        // T = 2 exceeds the largest bearing value, so nothing is censored.
        bearing_sample(23, 2.0)
    }

    #[test]
    fn profile_scale_toy_values() {
        let s = toy_sample();
        assert_eq!(profile_sigma(0.0, &s).unwrap(), 2.25);
        assert_eq!(profile_sigma(1.0, &s).unwrap(), 0.5);
        // Complete-sample reduction: sigma(mu) = sum (x_i - mu)^2 / (2n).
        let scheme = HybridScheme::new(3, 3, 10.0).unwrap();
        let complete = extract_hybrid_sample(&[1.0, 2.0, 5.0], scheme).unwrap();
        let sigma = profile_sigma(0.5, &complete).unwrap();
        assert!((sigma - 22.75 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn profile_scale_solves_its_score_equation() {
        let s = toy_sample();
        for mu in [-3.0, -0.5, 0.0, 0.9] {
            let sigma = profile_sigma(mu, &s).unwrap();
            let residual = -(s.d() as f64) / sigma + s.delta_star(mu) / (2.0 * sigma * sigma);
            assert!(residual.abs() < 1e-12, "residual {residual} at mu={mu}");
        }
    }

    #[test]
    fn profile_scale_rejects_bad_location() {
        let s = toy_sample();
        assert!(profile_sigma(f64::NAN, &s).is_err());
        assert!(profile_sigma(f64::INFINITY, &s).is_err());
    }

    #[test]
    fn reported_scale_at_the_reported_location() {
        let s = complete_bearings();
        let sigma = profile_sigma(0.1788, &s).unwrap();
        assert!((sigma - 0.2149).abs() < 0.0005, "sigma {sigma}");
    }

    #[test]
    fn fit_maximizes_the_profile_likelihood() {
        let s = complete_bearings();
        let fit = mle_fit(&s).unwrap();
        assert!(fit.converged);
        assert!(!fit.boundary);
        let x1 = s.x1().unwrap();
        assert!(fit.mu_hat < x1);
        assert!((fit.sigma_hat - profile_sigma(fit.mu_hat, &s).unwrap()).abs() < 1e-14);
        assert!(fit.printed_score_residual.is_finite());
        let range = s.t0() - x1;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        for _ in 0..100 {
            let mu = x1 - rng.gen_range(1e-6..10.0) * range;
            let ll = log_likelihood(mu, profile_sigma(mu, &s).unwrap(), &s);
            assert!(
                fit.log_likelihood >= ll - 1e-9,
                "profile not maximal: {} < {ll} at mu={mu}",
                fit.log_likelihood
            );
        }
    }

    #[test]
    fn fit_is_shift_equivariant() {
        let s = complete_bearings();
        let fit = mle_fit(&s).unwrap();
        let c = 0.4;
        let shifted_data: Vec<f64> = BALL_BEARINGS.iter().map(|&x| x + c).collect();
        let scheme = HybridScheme::new(23, 23, 2.0 + c).unwrap();
        let shifted = mle_fit(&extract_hybrid_sample(&shifted_data, scheme).unwrap()).unwrap();
        // The searches terminate on an x-resolution criterion, so agreement
        // is to optimizer tolerance, not machine precision.
        assert!((shifted.mu_hat - (fit.mu_hat + c)).abs() < 1e-6);
        assert!((shifted.sigma_hat - fit.sigma_hat).abs() < 1e-8);
    }

    #[test]
    fn fit_requires_two_failures() {
        let scheme = HybridScheme::new(3, 2, 1.5).unwrap();
        let s = extract_hybrid_sample(&[1.0, 2.0, 5.0], scheme).unwrap();
        assert_eq!(s.d(), 1);
        assert!(mle_fit(&s).is_err());
    }

    #[test]
    fn scale_only_fit_toy() {
        let fit = scaled_mle_fit(&toy_sample()).unwrap();
        assert_eq!(fit.mu_hat, 0.0);
        assert_eq!(fit.sigma_hat, 2.25);
        assert!(fit.converged);
    }

    #[test]
    fn ks_at_exact_model_quantiles() {
        let p = RayleighParams::new(0.0, 1.0).unwrap();
        let n = 5;
        let data: Vec<f64> = (1..=n)
            .map(|i| rayleigh_quantile((i as f64 - 0.5) / n as f64, &p).unwrap())
            .collect();
        let d = ks_statistic(&data, &p).unwrap();
        assert!((d - 0.1).abs() < 1e-12, "D = {d}");
    }

    #[test]
    fn ks_single_datum_at_median() {
        let p = RayleighParams::new(0.0, 1.0).unwrap();
        let median = rayleigh_quantile(0.5, &p).unwrap();
        let d = ks_statistic(&[median], &p).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_reported_value_for_bearings() {
        let p = RayleighParams::new(0.1788, 0.2149).unwrap();
        let d = ks_statistic(&BALL_BEARINGS, &p).unwrap();
        assert!((d - 0.1982).abs() < 0.0005, "D = {d}");
    }

    #[test]
    fn ks_is_affine_invariant() {
        let p = RayleighParams::new(0.1788, 0.2149).unwrap();
        let d = ks_statistic(&BALL_BEARINGS, &p).unwrap();
        let (a, b) = (0.3, 2.5);
        let data: Vec<f64> = BALL_BEARINGS.iter().map(|&x| a + b * x).collect();
        let q = RayleighParams::new(a + b * 0.1788, b * b * 0.2149).unwrap();
        assert!((ks_statistic(&data, &q).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn ks_rejects_empty_data() {
        let p = RayleighParams::new(0.0, 1.0).unwrap();
        assert!(matches!(ks_statistic(&[], &p), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn plugin_interval_closed_form() {
        let fit = MleFit {
            mu_hat: 0.0,
            sigma_hat: 1.0,
            converged: true,
            boundary: false,
            printed_score_residual: 0.0,
            log_likelihood: 0.0,
        };
        let t = PredictionTarget::new(1, 1).unwrap();
        let pi = wald_pi(&fit, t, 0.05).unwrap();
        // sqrt of the df=2 chi-square tail quantiles.
        assert!((pi.lower - 0.05063561596857975_f64.sqrt()).abs() < 1e-10);
        assert!((pi.upper - 7.377758908227873_f64.sqrt()).abs() < 1e-10);
        assert_eq!(pi.kind, IntervalKind::Wald);
        assert!((pi.level - 0.95).abs() < 1e-15);
    }

    #[test]
    fn quadrupling_components_halves_offsets_exactly() {
        // Offsets scale by 1/sqrt(k); with mu_hat = 0 the endpoints are the
        // offsets themselves and the halving is exact in floating point.
        let fit = MleFit {
            mu_hat: 0.0,
            sigma_hat: 0.3,
            converged: true,
            boundary: false,
            printed_score_residual: 0.0,
            log_likelihood: 0.0,
        };
        let pi1 = wald_pi(&fit, PredictionTarget::new(2, 1).unwrap(), 0.05).unwrap();
        let pi4 = wald_pi(&fit, PredictionTarget::new(2, 4).unwrap(), 0.05).unwrap();
        assert_eq!(2.0 * pi4.lower, pi1.lower);
        assert_eq!(2.0 * pi4.upper, pi1.upper);
    }

    #[test]
    fn plugin_interval_tail_masses() {
        let fit = MleFit {
            mu_hat: 0.4,
            sigma_hat: 0.8,
            converged: true,
            boundary: false,
            printed_score_residual: 0.0,
            log_likelihood: 0.0,
        };
        for (m, k) in [(1u32, 1u32), (3, 2), (4, 3)] {
            let t = PredictionTarget::new(m, k).unwrap();
            let pi = wald_pi(&fit, t, 0.10).unwrap();
            assert!((plugin_survival(&fit, t, pi.lower) - 0.95).abs() < 1e-10);
            assert!((plugin_survival(&fit, t, pi.upper) - 0.05).abs() < 1e-10);
        }
    }

    #[test]
    fn plugin_point_predictors_single_repair() {
        let fit = MleFit {
            mu_hat: 0.0,
            sigma_hat: 1.0,
            converged: true,
            boundary: false,
            printed_score_residual: 0.0,
            log_likelihood: 0.0,
        };
        let t = PredictionTarget::new(1, 1).unwrap();
        let p = wald_point_predictions(&fit, t).unwrap();
        // Mean/median/mode of the one-parameter law at sigma = 1:
        // sqrt(pi/2), sqrt(2 ln 2), and 1.
        assert!((p.sel - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((p.ael - (2.0 * std::f64::consts::LN_2).sqrt()).abs() < 1e-10);
        assert!((p.mode - 1.0).abs() < 1e-12);
        // Median sits between the mode and the mean for this skewed law.
        assert!(p.mode < p.ael && p.ael < p.sel);
    }

    #[test]
    fn plugin_rejects_degenerate_fit() {
        let fit = MleFit {
            mu_hat: f64::NAN,
            sigma_hat: 1.0,
            converged: false,
            boundary: false,
            printed_score_residual: 0.0,
            log_likelihood: 0.0,
        };
        assert!(wald_pi(&fit, PredictionTarget::new(1, 1).unwrap(), 0.05).is_err());
    }
}
