//! Bracketed scalar root finding (Brent) and derivative-free maximization
//! of a unimodal function (golden section with parabolic acceleration).

use crate::error::{Error, Result};

/// Stopping rules for the scalar solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// Accept a point once |f| falls below this.
    pub value_tolerance: f64,
    /// Accept once the bracket shrinks below this fraction of |x|.
    pub rel_x_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            value_tolerance: 1e-12,
            rel_x_tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

impl RootSpec {
    fn validate(&self) -> Result<()> {
        if !(self.value_tolerance >= 0.0 && self.rel_x_tolerance > 0.0) {
            return Err(Error::Domain("root tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("root search needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Root of `f` inside [lo, hi] by Brent's method.
///
/// The endpoints must bracket a sign change; an endpoint that is already a
/// root (within the value tolerance) is returned directly.
pub fn bracketed_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &RootSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Bracket(format!(
            "root bracket must be a finite interval, got [{lo}, {hi}]"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.abs() <= spec.value_tolerance {
        return Ok(a);
    }
    if fb.abs() <= spec.value_tolerance {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Bracket(format!(
            "function is not finite at the bracket endpoints: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{a}, {b}]: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }

    // Brent: a is kept as the contrapoint, b as the best iterate.
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..spec.max_iterations {
        if fb.abs() <= spec.value_tolerance {
            return Ok(b);
        }
        if fa.signum() == fb.signum() {
            a = c;
            fa = fc;
            d = b - a;
            e = d;
        }
        if fa.abs() < fb.abs() {
            c = b;
            b = a;
            a = c;
            fc = fb;
            fb = fa;
            fa = fc;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.rel_x_tolerance * b.abs().max(1.0);
        let m = 0.5 * (a - b);
        if m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fc.abs() > fb.abs() {
            let s = fb / fc;
            let (mut p, mut q) = if a == c {
                // Secant step.
                (2.0 * m * s, 1.0 - s)
            } else {
                // Inverse quadratic interpolation.
                let q0 = fc / fa;
                let r = fb / fa;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - c) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q * 0.5).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        c = b;
        fc = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: "bracketed root search".into(),
        residual: fb.abs(),
    })
}

/// Maximum of a unimodal `f` on [lo, hi]: returns `(argmax, max)`.
///
/// Brent minimization of `-f`; if the maximum sits at an endpoint the
/// endpoint is returned, so callers should bracket the interior mode.
pub fn unimodal_maximize<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &RootSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "maximization interval must be finite and non-empty, got [{lo}, {hi}]"
        )));
    }
    // x-resolution below sqrt(eps) is noise for a smooth maximum.
    let rel = spec.rel_x_tolerance.max(1e-8);
    let golden = 0.5 * (3.0 - 5.0_f64.sqrt());

    let mut a = lo;
    let mut b = hi;
    let mut x = a + golden * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = -f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d = 0.0_f64;
    let mut e = 0.0_f64;

    for _ in 0..spec.max_iterations {
        let m = 0.5 * (a + b);
        let tol = rel * x.abs() + 1e-300;
        let tol2 = 2.0 * tol;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, -fx));
        }
        let mut take_golden = true;
        if e.abs() > tol {
            // Parabolic fit through x, v, w.
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol.copysign(m - x);
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x < m { b - x } else { a - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol { x + d } else { x + tol.copysign(d) };
        let fu = -f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, -fx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::regularized_incomplete_beta;

    #[test]
    fn linear_root() {
        let x = bracketed_root(|t| t - 1.0, -3.0, 5.0, &RootSpec::default()).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_two() {
        let x = bracketed_root(|t| t * t - 2.0, 0.0, 2.0, &RootSpec::default()).unwrap();
        assert!((x - 1.414_213_562_373_095_1).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_median_consistency() {
        // I(0.5; 2, 3) = 0.6875, so solving I(x; 2, 3) = 0.6875 recovers 0.5.
        let x = bracketed_root(
            |t| regularized_incomplete_beta(2.0, 3.0, t).unwrap() - 0.6875,
            1e-9,
            1.0 - 1e-9,
            &RootSpec::default(),
        )
        .unwrap();
        assert!((x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn endpoint_already_root() {
        let x = bracketed_root(|t| t, 0.0, 1.0, &RootSpec::default()).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn rejects_unbracketed() {
        let err = bracketed_root(|t| t * t + 1.0, -1.0, 1.0, &RootSpec::default());
        assert!(matches!(err, Err(Error::Bracket(_))));
    }

    #[test]
    fn parabola_peak() {
        let (x, fx) = unimodal_maximize(|t| -(t - 3.0) * (t - 3.0), 0.0, 10.0, &RootSpec::default())
            .unwrap();
        assert!((x - 3.0).abs() < 1e-6);
        assert!(fx.abs() < 1e-12);
    }

    #[test]
    fn skewed_peak() {
        // t exp(-t) peaks at t = 1 with value 1/e.
        let (x, fx) =
            unimodal_maximize(|t| t * (-t).exp(), 0.0, 8.0, &RootSpec::default()).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        assert!((fx - (-1.0_f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn beta_density_mode() {
        // 12 t^2 (1 - t) peaks at t = 2/3.
        let (x, _) = unimodal_maximize(|t| 12.0 * t * t * (1.0 - t), 0.0, 1.0, &RootSpec::default())
            .unwrap();
        assert!((x - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn maximum_at_boundary() {
        let (x, _) = unimodal_maximize(|t| t, 0.0, 1.0, &RootSpec::default()).unwrap();
        assert!(x > 1.0 - 1e-6);
    }
}
