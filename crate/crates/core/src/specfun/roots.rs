use crate::error::Result;
use crate::{NumericError, Real};

use super::Tolerance;

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Returns as soon as `|g(x)| <= abs_tol` or the bracket is narrower than
/// `rel_tol·|x|` (plus a few ulps so a root at zero still terminates).
/// A bracket without a sign change is reported as
/// [`NumericError::NoSignChange`]; callers rely on that to detect regime
/// boundaries.
pub fn find_root<T: Real, F: FnMut(T) -> T>(mut g: F, lo: T, hi: T, tol: &Tolerance<T>) -> Result<T> {
    const OP: &str = "find_root";
    tol.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumericError::domain(OP, format!("bracket must be finite, got [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = g(a);
    let mut fb = g(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(NumericError::domain(OP, "function is NaN at a bracket end"));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(NumericError::NoSignChange {
            op: OP,
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }

    let two = T::c(2.0);
    let half = T::c(0.5);
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol.rel_tol * b.abs();
        let xm = half * (c - b);
        if fb.abs() <= tol.abs_tol || xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation (secant when a == c)
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::c(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if fb.is_nan() {
            return Err(NumericError::domain(OP, format!("function is NaN at {b}")));
        }
    }
    Err(NumericError::NoConvergence {
        op: OP,
        iterations: tol.max_iter,
        estimate: b.as_f64(),
        bound: (c - b).abs().as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::reg_upper_gamma;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let x = find_root(|x: f64| x - 2.0, 0.0, 5.0, &Tolerance::default()).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_median() {
        let x = find_root(
            |x: f64| reg_upper_gamma(1.0, x).unwrap() - 0.5,
            0.0,
            10.0,
            &Tolerance::default(),
        )
        .unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let err = find_root(|x: f64| x * x + 1.0, -1.0, 1.0, &Tolerance::default()).unwrap_err();
        assert!(matches!(err, NumericError::NoSignChange { .. }));
    }

    #[test]
    fn tight_tolerance_reaches_ulps() {
        let x = find_root(|x: f64| x.cos() - x, 0.0, 1.0, &Tolerance::default().tight()).unwrap();
        assert!((x.cos() - x).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn root_independent_of_bracket(lo in -10.0f64..1.2, hi in 1.3f64..50.0) {
            // unique root of x³ − 2 at 2^{1/3} ≈ 1.26
            let tol = Tolerance::default();
            let x = find_root(|x: f64| x * x * x - 2.0, lo, hi, &tol).unwrap();
            prop_assert!((x - 2f64.cbrt()).abs() <= 1e-8 * 2f64.cbrt());
        }
    }
}
