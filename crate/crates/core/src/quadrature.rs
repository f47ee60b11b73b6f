//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH).ok_or(Error::QuadratureFailure {
        a: a.as_f64(),
        b: b.as_f64(),
    })
}

#[inline]
fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T, F>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> Option<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    // Stop refining once the interval is at the resolution of the scalar type.
    let resolution = (b - a).abs() <= T::epsilon() * (a.abs() + b.abs());
    if delta.abs() <= T::lit(15.0) * tol || resolution {
        return Some(left + right + delta / T::lit(15.0));
    }
    if depth == 0 {
        return None;
    }
    let half = tol / two;
    Some(
        recurse(f, a, m, fa, flm, fm, left, half, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, half, depth - 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let v = adaptive_simpson(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x: f64| x, 1.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_integrand_fails() {
        let r = adaptive_simpson(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
