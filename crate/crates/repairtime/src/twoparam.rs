//! Bayesian prediction under the full two-parameter model: unknown location
//! mu with a normal prior (mean xi, precision parameter tau) and unknown
//! scale sigma with the reciprocal prior.
//!
//! Nothing is closed-form here; every predictive quantity is a quadrature
//! over the location posterior on (-inf, x1). The posterior weight function
//!
//! w(t) = exp(-tau (t - xi)^2) prod_i (x_i - t) / delta_star(t)^d
//!
//! underflows f64 badly for realistic d (values around 1e-28 are typical),
//! so the context rescales it once: all internal integrands carry a factor
//! exp(-ln_scale) with ln_scale the grid maximum of ln w, and the cached
//! reciprocal integral `a1_scaled` absorbs the same factor. Products of the
//! form A1 * integral are then evaluated entirely in the rescaled system and
//! the scale cancels exactly.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::model::{HybridSample, PredictionTarget};
use crate::numerics::special::{ln_beta, ln_gamma};
use crate::numerics::{
    adaptive_quadrature, bracketed_root, truncation_point,
    unimodal_maximize, QuadratureOutcome, QuadratureSpec, RootSpec,
};
use crate::predictions::{validate_level, IntervalKind, PredictionInterval};

/// Prior hyperparameters for the location: mu ~ Normal(xi, 1/(2 tau)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    xi: f64,
    tau: f64,
}

impl Hyperparams {
    pub fn new(xi: f64, tau: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!(
                "prior location must be finite, got {xi}"
            )));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!(
                "prior precision must be positive and finite, got {tau}"
            )));
        }
        Ok(Self { xi, tau })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Number of grid points used to locate the scale of ln w before the
/// normalizing integral is attempted.
const SCALE_GRID: usize = 512;

/// Immutable evaluation context: sample, prior, target, quadrature policy,
/// and the cached rescaled normalizing constant.
///
/// Construction performs the one expensive step (scaling grid plus the A1
/// integral); everything downstream reuses it. `with_target` re-targets the
/// same posterior without redoing that work.
#[derive(Debug, Clone)]
pub struct PredictiveContext {
    sample: HybridSample,
    hyper: Hyperparams,
    target: PredictionTarget,
    quad: QuadratureSpec,
    x1: f64,
    lower_limit: f64,
    ln_scale: f64,
    a1_scaled: f64,
    df: f64,
    mf: f64,
    kf: f64,
    ln_beta_dm: f64,
    // Coefficients Gamma(d+j) / (Gamma(d) j!) for j = 0..m-1, used by the
    // survival integrand.
    survival_coeffs: Vec<f64>,
}

impl PredictiveContext {
    pub fn new(
        sample: HybridSample,
        hyper: Hyperparams,
        target: PredictionTarget,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        let Some(x1) = sample.x1() else {
            return Err(Error::ImproperPosterior);
        };
        let df = sample.d() as f64;
        // The Gaussian prior factor controls the left tail. Centering the
        // truncation on min(xi, x1) keeps the domain non-degenerate even
        // when the prior mean sits above the smallest observation.
        let center = hyper.xi.min(x1);
        let hard_limit = truncation_point(x1, hyper.tau, center);

        let obs = sample.observations();
        let ln_w_raw = |t: f64| -> f64 {
            let dev = t - hyper.xi;
            ln_product(obs, t, x1) - hyper.tau * dev * dev
                - df * sample.delta_star(t).ln()
        };
        let width = x1 - hard_limit;
        let step = width / SCALE_GRID as f64;
        let mut ln_grid = [f64::NEG_INFINITY; SCALE_GRID];
        for (i, v) in ln_grid.iter_mut().enumerate() {
            *v = ln_w_raw(hard_limit + (i as f64 + 0.5) * step);
        }
        let ln_scale = ln_grid.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if !ln_scale.is_finite() {
            return Err(Error::ImproperPosterior);
        }
        // A diffuse prior pushes the hard truncation far below the data while
        // the posterior mass stays near x1; integrating the dead stretch
        // starves the adaptive subdivision and can defeat its error estimate.
        // Every integrand used here is bounded by a multiple of w(t), so the
        // domain can be cut where ln w has dropped 60 units below its peak
        // (a relative tail contribution around 1e-26) with a two-cell margin.
        let first_live = ln_grid
            .iter()
            .position(|&v| v >= ln_scale - 60.0)
            .expect("the maximum itself is above the threshold");
        let lower_limit = if first_live > 2 {
            hard_limit + (first_live as f64 - 1.5) * step
        } else {
            hard_limit
        };

        let reciprocal = adaptive_quadrature(
            |t| (ln_w_raw(t) - ln_scale).exp(),
            lower_limit,
            x1,
            &quad,
        )?;
        if !reciprocal.converged {
            return Err(Error::QuadratureFailure {
                context: "posterior normalizing integral",
                estimate: reciprocal.value,
                error_bound: reciprocal.error_bound,
            });
        }
        if !(reciprocal.value > 0.0 && reciprocal.value.is_finite()) {
            return Err(Error::ImproperPosterior);
        }

        let mut ctx = Self {
            sample,
            hyper,
            target,
            quad,
            x1,
            lower_limit,
            ln_scale,
            a1_scaled: 1.0 / reciprocal.value,
            df,
            mf: 0.0,
            kf: 0.0,
            ln_beta_dm: 0.0,
            survival_coeffs: Vec::new(),
        };
        ctx.set_target(target);
        Ok(ctx)
    }

    /// Same posterior, different prediction target; skips the normalizing
    /// integral.
    pub fn with_target(&self, target: PredictionTarget) -> Self {
        let mut ctx = self.clone();
        ctx.set_target(target);
        ctx
    }

    fn set_target(&mut self, target: PredictionTarget) {
        self.target = target;
        self.mf = f64::from(target.m());
        self.kf = f64::from(target.k());
        self.ln_beta_dm = ln_beta(self.df, self.mf);
        let mut coeffs = Vec::with_capacity(target.m() as usize);
        coeffs.push(1.0);
        for j in 1..target.m() as usize {
            let prev = coeffs[j - 1];
            coeffs.push(prev * (self.df + j as f64 - 1.0) / j as f64);
        }
        self.survival_coeffs = coeffs;
    }

    pub fn sample(&self) -> &HybridSample {
        &self.sample
    }

    pub fn hyper(&self) -> Hyperparams {
        self.hyper
    }

    pub fn target(&self) -> PredictionTarget {
        self.target
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quad
    }

    /// ln of the posterior weight w(t); -inf at and above x1.
    fn ln_w(&self, t: f64) -> f64 {
        let dev = t - self.hyper.xi;
        ln_product(self.sample.observations(), t, self.x1) - self.hyper.tau * dev * dev
            - self.df * self.sample.delta_star(t).ln()
    }

    /// Rescaled posterior weight exp(ln w - ln_scale), an O(1) quantity.
    fn w_scaled(&self, t: f64) -> f64 {
        (self.ln_w(t) - self.ln_scale).exp()
    }

    fn check(&self, out: &QuadratureOutcome, context: &'static str) -> Result<()> {
        if out.converged {
            Ok(())
        } else {
            Err(Error::QuadratureFailure {
                context,
                estimate: out.value,
                error_bound: out.error_bound,
            })
        }
    }

    /// Data-scale length used to seed bracket expansions.
    fn span(&self) -> f64 {
        let s = self.sample.t0() - self.x1;
        if s > 0.0 {
            s
        } else {
            self.x1.abs().max(1.0) * 0.5
        }
    }

    /// Rescaled integrand of the predictive density at u: g(t,u,m)/(u-t)
    /// with the context scale factored out.
    fn density_integrand(&self, t: f64, u: f64) -> f64 {
        let dist = u - t;
        if dist <= 0.0 {
            return 0.0;
        }
        let dev = t - self.hyper.xi;
        let denom = self.kf * dist * dist + self.sample.delta_star(t);
        let ln_val = ln_product(self.sample.observations(), t, self.x1)
            - self.hyper.tau * dev * dev
            - self.ln_scale
            + self.mf * self.kf.ln()
            + (2.0 * self.mf - 1.0) * dist.ln()
            - (self.df + self.mf) * denom.ln();
        ln_val.exp()
    }

    /// Rescaled integrand of the predictive density's u-derivative,
    /// differentiating under the integral sign (the integrand's zero of
    /// order 2m-1 at t = u kills the moving-limit boundary term):
    /// base * dist^(2m-2) * [(2m-1) - 2k(d+m) dist^2 / denom].
    fn density_slope_integrand(&self, t: f64, u: f64) -> f64 {
        let dist = u - t;
        if dist < 0.0 {
            return 0.0;
        }
        let dev = t - self.hyper.xi;
        let denom = self.kf * dist * dist + self.sample.delta_star(t);
        let ln_base = ln_product(self.sample.observations(), t, self.x1)
            - self.hyper.tau * dev * dev
            - self.ln_scale
            + self.mf * self.kf.ln()
            - (self.df + self.mf) * denom.ln();
        let power = dist.powi(2 * self.target.m() as i32 - 2);
        ln_base.exp()
            * power
            * (2.0 * self.mf - 1.0 - 2.0 * self.kf * (self.df + self.mf) * dist * dist / denom)
    }

    /// Sign of the predictive density's slope at u (up to a positive
    /// normalizing factor): positive left of the mode, negative right of it.
    fn stationarity_residual(&self, u: f64) -> Result<f64> {
        let upper = u.min(self.x1);
        if upper <= self.lower_limit {
            return Ok(0.0);
        }
        let out = adaptive_quadrature(
            |t| self.density_slope_integrand(t, u),
            self.lower_limit,
            upper,
            &self.quad,
        )?;
        self.check(&out, "predictive density slope integral")?;
        Ok(out.value)
    }

    /// Rescaled integrand of the survival sum: sum_j c_j g(t,z,j) collapses
    /// to w-like base times a short polynomial in rho = k(z-t)^2 / denom.
    fn survival_integrand(&self, t: f64, z: f64) -> f64 {
        let dist = z - t;
        let kd = self.kf * dist * dist;
        let denom = kd + self.sample.delta_star(t);
        let rho = kd / denom;
        let dev = t - self.hyper.xi;
        let ln_base = ln_product(self.sample.observations(), t, self.x1)
            - self.hyper.tau * dev * dev
            - self.ln_scale
            - self.df * denom.ln();
        let mut poly = 0.0;
        for &c in self.survival_coeffs.iter().rev() {
            poly = poly * rho + c;
        }
        ln_base.exp() * poly
    }

    /// Predictive density h*(u) of the m-th repair time.
    pub fn predictive_pdf(&self, u: f64) -> Result<f64> {
        let upper = u.min(self.x1);
        if upper <= self.lower_limit {
            return Ok(0.0);
        }
        let out = adaptive_quadrature(
            |t| self.density_integrand(t, u),
            self.lower_limit,
            upper,
            &self.quad,
        )?;
        self.check(&out, "predictive density integral")?;
        Ok(2.0 * self.a1_scaled * (-self.ln_beta_dm).exp() * out.value)
    }

    /// Predictive survival P(U > z | x), continuous across z = x1 where its
    /// formula switches branch (below x1 the event {mu > z} contributes the
    /// whole posterior mass of mu in (z, x1)).
    pub fn predictive_survival(&self, z: f64) -> Result<f64> {
        if z <= self.lower_limit {
            return Ok(1.0);
        }
        let value = if z >= self.x1 {
            let records = adaptive_quadrature(
                |t| self.survival_integrand(t, z),
                self.lower_limit,
                self.x1,
                &self.quad,
            )?;
            self.check(&records, "predictive survival integral")?;
            self.a1_scaled * records.value
        } else {
            let records = adaptive_quadrature(
                |t| self.survival_integrand(t, z),
                self.lower_limit,
                z,
                &self.quad,
            )?;
            self.check(&records, "predictive survival integral")?;
            let location_above = adaptive_quadrature(
                |t| self.w_scaled(t),
                z,
                self.x1,
                &self.quad,
            )?;
            self.check(&location_above, "location posterior mass integral")?;
            self.a1_scaled * (records.value + location_above.value)
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// The z with predictive survival q, by bracket expansion plus Brent.
    fn invert_survival(&self, q: f64) -> Result<f64> {
        let span = self.span();
        let mut step = 5.0 * span;
        let mut lo = self.x1 - step;
        let mut hi = self.x1 + step;
        let mut expansions = 0;
        while self.predictive_survival(lo)? < q {
            step *= 2.0;
            lo -= step;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Bracket(format!(
                    "no lower bracket for survival level {q}"
                )));
            }
        }
        let mut step = 5.0 * span;
        while self.predictive_survival(hi)? > q {
            step *= 2.0;
            hi += step;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Bracket(format!(
                    "no upper bracket for survival level {q}"
                )));
            }
        }
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let root = bracketed_root(
            |z| match self.predictive_survival(z) {
                Ok(v) => v - q,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            &RootSpec::default(),
        );
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        root
    }

    /// Equi-tailed interval: survival 1 - alpha/2 at the lower endpoint,
    /// alpha/2 at the upper.
    pub fn equitailed_pi(&self, alpha: f64) -> Result<PredictionInterval> {
        validate_level(alpha)?;
        Ok(PredictionInterval {
            lower: self.invert_survival(1.0 - alpha / 2.0)?,
            upper: self.invert_survival(alpha / 2.0)?,
            level: 1.0 - alpha,
            kind: IntervalKind::EquiTailed,
        })
    }

    /// Posterior mean of the repair time (squared-error-loss predictor):
    /// A1 [ c(d,m,k) int sqrt(delta_star) w + int t w ] in rescaled form.
    pub fn point_sel(&self) -> Result<f64> {
        let coef = (ln_gamma(self.mf + 0.5) + ln_gamma(self.df - 0.5)
            - ln_gamma(self.mf)
            - ln_gamma(self.df))
        .exp()
            / self.kf.sqrt();
        let out = adaptive_quadrature(
            |t| (coef * self.sample.delta_star(t).sqrt() + t) * self.w_scaled(t),
            self.lower_limit,
            self.x1,
            &self.quad,
        )?;
        self.check(&out, "posterior mean integral")?;
        Ok(self.a1_scaled * out.value)
    }

    /// Predictive median (absolute-error-loss predictor).
    pub fn point_ael(&self) -> Result<f64> {
        self.invert_survival(0.5)
    }

    /// Predictive mode (zero-one-loss predictor).
    pub fn point_mode(&self) -> Result<f64> {
        Ok(self.point_mode_with_value()?.0)
    }

    /// Mode and the density value there; the bracket grows from the
    /// posterior mean until the density falls off on both flanks.
    fn point_mode_with_value(&self) -> Result<(f64, f64)> {
        let seed = self.point_sel()?;
        let mut step = 0.5 * self.span();
        let mut center = seed;
        let mut f_center = self.predictive_pdf(center)?;
        let mut lo = center - step;
        let mut f_lo = self.predictive_pdf(lo)?;
        let mut hi = center + step;
        let mut f_hi = self.predictive_pdf(hi)?;
        let mut expansions = 0;
        while f_lo > f_center || f_hi > f_center {
            if f_lo > f_center {
                hi = center;
                center = lo;
                f_center = f_lo;
                step *= 2.0;
                lo = center - step;
                f_lo = self.predictive_pdf(lo)?;
            } else {
                lo = center;
                center = hi;
                f_center = f_hi;
                step *= 2.0;
                hi = center + step;
                f_hi = self.predictive_pdf(hi)?;
            }
            expansions += 1;
            if expansions > 120 {
                return Err(Error::Bracket(
                    "predictive density has no interior maximum in reach".into(),
                ));
            }
        }
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let result = unimodal_maximize(
            |u| match self.predictive_pdf(u) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            &RootSpec::default(),
        );
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let (rough, rough_value) = result?;
        // The comparison search resolves the peak only to about sqrt(eps) of
        // the data scale; finishing on the stationarity equation pins it to
        // root-finding precision.
        match self.polish_mode(rough) {
            Some(mode) => Ok((mode, self.predictive_pdf(mode)?)),
            None => Ok((rough, rough_value)),
        }
    }

    /// Brent on the analytic density slope around the search result; None
    /// falls back to the unpolished maximum.
    fn polish_mode(&self, rough: f64) -> Option<f64> {
        let mut window = 1e-3 * self.span();
        for _ in 0..6 {
            let lo = rough - window;
            let hi = rough + window;
            let rising = self.stationarity_residual(lo).ok()?;
            let falling = self.stationarity_residual(hi).ok()?;
            if rising > 0.0 && falling < 0.0 {
                let spec = RootSpec {
                    value_tolerance: f64::MIN_POSITIVE,
                    rel_x_tolerance: 1e-12,
                    max_iterations: 200,
                };
                return bracketed_root(
                    |u| self.stationarity_residual(u).unwrap_or(f64::NAN),
                    lo,
                    hi,
                    &spec,
                )
                .ok();
            }
            window *= 4.0;
        }
        None
    }

    /// Highest-predictive-density interval, solved by bisection on the
    /// density level: for each level the two crossing points are bracketed
    /// on either side of the mode, and the outer root drives their contained
    /// probability to 1 - alpha.
    pub fn hpd_pi(&self, alpha: f64) -> Result<PredictionInterval> {
        validate_level(alpha)?;
        let (peak_x, peak_h) = self.point_mode_with_value()?;
        if !(peak_h > 0.0 && peak_h.is_finite()) {
            return Err(Error::Domain(
                "predictive density peak is not positive".into(),
            ));
        }
        let span = self.span();

        let crossings = |level: f64| -> Result<(f64, f64)> {
            let mut step = 0.5 * span;
            let mut lo = peak_x - step;
            let mut expansions = 0;
            while self.predictive_pdf(lo)? >= level {
                step *= 2.0;
                lo = peak_x - step;
                expansions += 1;
                if expansions > 100 {
                    return Err(Error::Bracket(
                        "no left crossing below the density level".into(),
                    ));
                }
            }
            let failure: RefCell<Option<Error>> = RefCell::new(None);
            let density_gap = |u: f64| match self.predictive_pdf(u) {
                Ok(v) => v - level,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let spec = RootSpec {
                value_tolerance: 1e-12,
                rel_x_tolerance: 1e-10,
                max_iterations: 200,
            };
            let w1 = bracketed_root(&density_gap, lo, peak_x, &spec);
            let mut step = 0.5 * span;
            let mut hi = peak_x + step;
            let mut expansions = 0;
            while self.predictive_pdf(hi)? >= level {
                step *= 2.0;
                hi = peak_x + step;
                expansions += 1;
                if expansions > 100 {
                    return Err(Error::Bracket(
                        "no right crossing below the density level".into(),
                    ));
                }
            }
            let w2 = bracketed_root(&density_gap, peak_x, hi, &spec);
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            Ok((w1?, w2?))
        };

        // Verify single-peakedness on a coarse grid across the widest level
        // set before trusting the level parametrization.
        let (support_lo, support_hi) = crossings(peak_h * 1e-6)?;
        self.assert_unimodal(support_lo, support_hi, peak_h)?;

        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let coverage_gap = |level: f64| -> f64 {
            let inner = || -> Result<f64> {
                let (w1, w2) = crossings(level)?;
                Ok(self.predictive_survival(w1)? - self.predictive_survival(w2)?
                    - (1.0 - alpha))
            };
            match inner() {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let outer_spec = RootSpec {
            value_tolerance: (5e-9_f64).max(5.0 * self.quad.relative_tolerance),
            rel_x_tolerance: 1e-9,
            max_iterations: 200,
        };
        let level = bracketed_root(
            coverage_gap,
            peak_h * 1e-6,
            peak_h * (1.0 - 1e-6),
            &outer_spec,
        );
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let level = level?;
        let (w1, w2) = crossings(level)?;

        let coverage_residual = (self.predictive_survival(w1)?
            - self.predictive_survival(w2)?
            - (1.0 - alpha))
            .abs();
        let density_residual =
            (self.predictive_pdf(w1)? - self.predictive_pdf(w2)?).abs() / peak_h;
        let coverage_tol = (1e-7_f64).max(20.0 * self.quad.relative_tolerance);
        let density_tol = (1e-8_f64).max(10.0 * self.quad.relative_tolerance);
        if coverage_residual > coverage_tol || density_residual > density_tol {
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

    /// Coarse multimodality detector: more than one separated local maximum
    /// above the noise floor means the level-set parametrization is invalid.
    fn assert_unimodal(&self, lo: f64, hi: f64, peak_h: f64) -> Result<()> {
        const POINTS: usize = 33;
        let mut values = [0.0_f64; POINTS];
        for (i, v) in values.iter_mut().enumerate() {
            let u = lo + (hi - lo) * i as f64 / (POINTS - 1) as f64;
            *v = self.predictive_pdf(u)?;
        }
        // Adjacent pdf evaluations are independent quadratures, so a bump has
        // to clear their combined noise before it counts as a second mode.
        let prominence = peak_h * (1e-6_f64).max(20.0 * self.quad.relative_tolerance);
        let mut maxima = 0;
        for i in 1..POINTS - 1 {
            if values[i] > values[i - 1] + prominence && values[i] > values[i + 1] + prominence {
                maxima += 1;
            }
        }
        if maxima > 1 {
            return Err(Error::Diagnostic(format!(
                "predictive density shows {maxima} separated local maxima; \
                 highest-density interval is not well-defined as a single interval"
            )));
        }
        Ok(())
    }
}

/// ln prod_i (x_i - t) for t < x1, as one log of the running product when it
/// stays representable, else the slower sum of logs.
fn ln_product(obs: &[f64], t: f64, x1: f64) -> f64 {
    if t >= x1 {
        return f64::NEG_INFINITY;
    }
    let mut product = 1.0_f64;
    for &x in obs {
        product *= x - t;
    }
    if product > 0.0 && product.is_finite() {
        product.ln()
    } else {
        obs.iter().map(|&x| (x - t).ln()).sum()
    }
}

/// The raw (unscaled) integration kernel
/// g(t, u, j) = k^j exp(-tau (t-xi)^2) (u-t)^{2j} prod_i (x_i - t)
///              / [k (u-t)^2 + delta_star(t)]^{d+j},
/// with 0^0 = 1 so that g(t, t, 0) is the posterior weight w(t).
///
/// Exposed for inspection and testing; the context's integrands evaluate
/// rescaled variants of this quantity.
pub fn g_kernel(t: f64, u: f64, j: u32, ctx: &PredictiveContext) -> Result<f64> {
    if t >= ctx.x1 {
        return Err(Error::Domain(format!(
            "kernel requires t below the smallest observation {}, got {t}",
            ctx.x1
        )));
    }
    if u < t {
        return Err(Error::Domain(format!(
            "kernel requires u >= t, got u = {u}, t = {t}"
        )));
    }
    let jf = f64::from(j);
    let dev = t - ctx.hyper.xi;
    let dist = u - t;
    let denom = ctx.kf * dist * dist + ctx.sample.delta_star(t);
    let mut ln_val = jf * ctx.kf.ln() - ctx.hyper.tau * dev * dev
        + ln_product(ctx.sample.observations(), t, ctx.x1)
        - (ctx.df + jf) * denom.ln();
    if j > 0 {
        // dist = 0 with j >= 1 gives ln 0 = -inf, i.e. g = 0, as it should.
        ln_val += 2.0 * jf * dist.ln();
    }
    Ok(ln_val.exp())
}

/// The normalizing constant A1(x): reciprocal of the posterior weight
/// integral over (-inf, x1).
///
/// This is the raw, unscaled value; it can be astronomically large for
/// well-populated samples, which is exactly why the context never forms it
/// internally. An unrepresentable magnitude is reported as an error.
pub fn normalizing_constant(
    sample: &HybridSample,
    hyper: Hyperparams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let target = PredictionTarget::new(1, 1).expect("static target is valid");
    let ctx = PredictiveContext::new(sample.clone(), hyper, target, *quad)?;
    let a1 = ctx.a1_scaled.ln() - ctx.ln_scale;
    let value = a1.exp();
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::Domain(format!(
            "normalizing constant exp({a1:.3}) is not representable as f64"
        )));
    }
    Ok(value)
}

/// One point of a prior-sensitivity sweep: tau = 0.5 * 10^{-l}.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SensitivityPoint {
    pub l: f64,
    pub tau: f64,
    pub sel: f64,
}

/// Squared-error-loss predictor as a function of the prior precision, over
/// the grid tau = 0.5 * 10^{-l} for the given exponents l.
pub fn sensitivity_curve(
    sample: &HybridSample,
    target: &PredictionTarget,
    xi: f64,
    l_values: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<SensitivityPoint>> {
    l_values
        .iter()
        .map(|&l| {
            let tau = 0.5 * 10f64.powf(-l);
            let hyper = Hyperparams::new(xi, tau)?;
            let ctx = PredictiveContext::new(sample.clone(), hyper, *target, *quad)?;
            Ok(SensitivityPoint {
                l,
                tau,
                sel: ctx.point_sel()?,
            })
        })
        .collect()
}
