//! Uniform cell-centred grid on `[-L, L]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D<T> {
    half_width: T,
    n: usize,
    dy: T,
    centers: Vec<T>,
}

impl<T: Real> Grid1D<T> {
    /// `n` cells of width `2L/n`; `n` must be even and at least 16.
    pub fn new(half_width: T, n: usize) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidParams(format!(
                "grid half-width must be > 0, got {half_width}"
            )));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "cell count must be even and >= 16, got {n}"
            )));
        }
        let dy = T::lit(2.0) * half_width / T::from_count(n);
        let centers = (0..n)
            .map(|i| -half_width + (T::from_count(i) + T::lit(0.5)) * dy)
            .collect();
        Ok(Self {
            half_width,
            n,
            dy,
            centers,
        })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dy(&self) -> T {
        self.dy
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    /// Position of face `k` (`k = 0..=n`).
    pub fn face(&self, k: usize) -> T {
        -self.half_width + T::from_count(k) * self.dy
    }

    /// Midpoint rule `dy * sum f_i`.
    pub fn integrate(&self, values: &[T]) -> T {
        values.iter().copied().sum::<T>() * self.dy
    }

    /// Midpoint rule of `f(y_i, v_i)`.
    pub fn integrate_with<F: Fn(T, T) -> T>(&self, values: &[T], f: F) -> T {
        self.centers
            .iter()
            .zip(values)
            .map(|(&y, &v)| f(y, v))
            .sum::<T>()
            * self.dy
    }

    /// Cell samples of `f` at the centres.
    pub fn sample<F: Fn(T) -> T>(&self, f: F) -> Vec<T> {
        self.centers.iter().map(|&y| f(y)).collect()
    }

    /// Piecewise-linear interpolation of cell samples, zero outside the domain.
    pub fn interpolate(&self, values: &[T], y: T) -> T {
        interpolate_linear(&self.centers, values, y, T::zero())
    }
}

/// Linear interpolation on an increasing abscissa; `outside` beyond the end
/// points, constant extension between the outermost sample and the domain edge
/// is not attempted.
pub fn interpolate_linear<T: Real>(x: &[T], v: &[T], at: T, outside: T) -> T {
    let n = x.len();
    if n == 0 || at < x[0] || at > x[n - 1] || at.is_nan() {
        return outside;
    }
    if n == 1 {
        return v[0];
    }
    let hi = x.partition_point(|&s| s < at).clamp(1, n - 1);
    let lo = hi - 1;
    let w = (at - x[lo]) / (x[hi] - x[lo]);
    v[lo] + w * (v[hi] - v[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = Grid1D::<f64>::new(10.0, 400).unwrap();
        assert_eq!(g.n(), 400);
        assert!((g.dy() * 400.0 - 20.0).abs() < 1e-12);
        assert!((g.centers()[0] + 10.0 - 0.025).abs() < 1e-12);
        assert!((g.face(400) - 10.0).abs() < 1e-12);
        let s: f64 = g.centers().iter().sum();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid1D::new(10.0, 15).is_err());
        assert!(Grid1D::new(10.0, 17).is_err());
        assert!(Grid1D::new(-1.0, 32).is_err());
    }

    #[test]
    fn midpoint_gaussian_mass() {
        let g = Grid1D::<f64>::new(10.0, 400).unwrap();
        let gamma = g.sample(|y| (-y * y).exp());
        assert!((g.integrate(&gamma) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let m2 = g.integrate_with(&gamma, |y, v| y * y * v);
        assert!((m2 - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn interpolation() {
        let x = [0.0, 1.0, 2.0];
        let v = [0.0, 2.0, 0.0];
        assert_eq!(interpolate_linear(&x, &v, 0.5, -1.0), 1.0);
        assert_eq!(interpolate_linear(&x, &v, 2.0, -1.0), 0.0);
        assert_eq!(interpolate_linear(&x, &v, 2.5, -1.0), -1.0);
    }
}
