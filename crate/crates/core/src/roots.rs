//! Bracketed scalar root finding: Newton steps guarded by bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once `|f(x)| <= ftol`.
    pub ftol: f64,
    /// Stop once the bracket is narrower than `xtol * (1 + |x|)`.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            ftol: 1e-15,
            xtol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Finds a root of `f` inside `[lo, hi]`, where `f` returns the value and
/// the derivative. `fa` and `fb` are the values at the ends and must not
/// share a strict sign.
///
/// A Newton step is taken when it stays inside the current bracket and at
/// least halves the previous step; otherwise the bracket is bisected.
pub fn safeguarded_newton<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut fa: f64,
    fb: f64,
    opts: RootOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if fa == 0.0 {
        return Ok(Root {
            x: lo,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: hi,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Precondition(format!(
            "no sign change on [{lo}, {hi}] (f = {fa}, {fb})"
        )));
    }

    let mut best = Root {
        x: lo,
        fx: fa,
        iterations: 0,
    };
    if fb.abs() < fa.abs() {
        best = Root {
            x: hi,
            fx: fb,
            iterations: 0,
        };
    }
    // regula falsi start point
    let mut x = lo - fa * (hi - lo) / (fb - fa);
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    let mut last_step = hi - lo;

    for it in 1..=opts.max_iter {
        let (fx, dfx) = f(x)?;
        if !fx.is_finite() {
            return Err(Error::Range(format!(
                "non-finite function value at x = {x}"
            )));
        }
        if fx.abs() < best.fx.abs() {
            best = Root {
                x,
                fx,
                iterations: it,
            };
        }
        best.iterations = it;
        if fx.abs() <= opts.ftol {
            return Ok(best);
        }
        if fx.signum() == fa.signum() {
            lo = x;
            fa = fx;
        } else {
            hi = x;
        }
        if hi - lo <= opts.xtol * (1.0 + x.abs()) {
            return Ok(best);
        }

        let newton = x - fx / dfx;
        let step = (newton - x).abs();
        let next = if dfx.is_finite()
            && dfx != 0.0
            && newton > lo
            && newton < hi
            && step <= 0.5 * last_step
        {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x {
            return Ok(best);
        }
        last_step = (next - x).abs();
        x = next;
    }
    Ok(best)
}

/// Value plus a central-difference derivative; the derivative is NaN when
/// either neighbour cannot be evaluated, which forces a bisection step.
pub fn with_central_derivative<F>(f: &mut F, x: f64, h: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fx = f(x)?;
    let d = match (f(x + h), f(x - h)) {
        (Ok(up), Ok(down)) => (up - down) / (2.0 * h),
        _ => f64::NAN,
    };
    Ok((fx, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = safeguarded_newton(
            |x| Ok((x * x - 2.0, 2.0 * x)),
            0.0,
            2.0,
            -2.0,
            2.0,
            RootOptions::default(),
        )
        .unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn survives_bad_derivative() {
        // cube root has an unbounded derivative at 0; Newton overshoots
        let f = |x: f64| Ok((x.cbrt() - 0.1, f64::NAN));
        let r = safeguarded_newton(f, -1.0, 1.0, -1.1, 0.9, RootOptions::default()).unwrap();
        assert!((r.x - 0.001).abs() < 1e-15);
    }

    #[test]
    fn endpoint_roots_are_returned() {
        let r = safeguarded_newton(|x| Ok((x, 1.0)), 0.0, 1.0, 0.0, 1.0, RootOptions::default())
            .unwrap();
        assert_eq!(r.x, 0.0);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let r = safeguarded_newton(
            |x| Ok((x + 1.0, 1.0)),
            0.0,
            1.0,
            1.0,
            2.0,
            RootOptions::default(),
        );
        assert!(r.is_err());
    }
}
