//! Convex pressure laws with `P'(0) = kappa > 0` and the derived functionals
//!
//! ```text
//! G(u) = ∫_0^u ∫_0^v (P'(s) - P'(0)) / s ds dv,     F(rho) = P'(0) rho ln rho + G(rho).
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::{xlogx, Real};

/// Absolute tolerance of the quadrature used for `G` when no closed form exists.
pub const G_QUADRATURE_TOL: f64 = 1e-10;

/// One `kappa_j rho^gamma_j` contribution of the mixed law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm<T> {
    pub coeff: T,
    pub gamma: T,
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// User-supplied pressure with its first two derivatives.
#[derive(Clone)]
pub struct CustomPressure<T> {
    pub kappa: T,
    pub p: ScalarFn<T>,
    pub dp: ScalarFn<T>,
    pub d2p: ScalarFn<T>,
}

impl<T: fmt::Debug> fmt::Debug for CustomPressure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPressure")
            .field("kappa", &self.kappa)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureKind {
    Isothermal,
    IsothermalPlusPowers,
    Exponential,
    Custom,
}

impl PressureKind {
    pub fn name(self) -> &'static str {
        match self {
            PressureKind::Isothermal => "isothermal",
            PressureKind::IsothermalPlusPowers => "isothermal-plus-powers",
            PressureKind::Exponential => "exponential",
            PressureKind::Custom => "custom",
        }
    }
}

/// A pressure law satisfying `P'(0) = kappa > 0` and `P'' >= 0`.
#[derive(Debug, Clone)]
pub enum PressureLaw<T> {
    /// `P = kappa rho`.
    Isothermal {
        kappa: T,
    },
    /// `P = kappa rho + sum_j kappa_j rho^gamma_j`.
    IsothermalPlusPowers {
        kappa: T,
        powers: Vec<PowerTerm<T>>,
    },
    /// `P = kappa (e^rho - 1)`.
    Exponential {
        kappa: T,
    },
    Custom(CustomPressure<T>),
}

impl<T: Real> PressureLaw<T> {
    pub fn isothermal(kappa: T) -> Result<Self> {
        let law = PressureLaw::Isothermal { kappa };
        law.validate()?;
        Ok(law)
    }

    pub fn with_powers(kappa: T, powers: &[(T, T)]) -> Result<Self> {
        let powers = powers
            .iter()
            .map(|&(coeff, gamma)| PowerTerm { coeff, gamma })
            .collect();
        let law = PressureLaw::IsothermalPlusPowers { kappa, powers };
        law.validate()?;
        Ok(law)
    }

    pub fn exponential(kappa: T) -> Result<Self> {
        let law = PressureLaw::Exponential { kappa };
        law.validate()?;
        Ok(law)
    }

    pub fn custom(custom: CustomPressure<T>) -> Result<Self> {
        let law = PressureLaw::Custom(custom);
        law.validate()?;
        Ok(law)
    }

    pub fn kind(&self) -> PressureKind {
        match self {
            PressureLaw::Isothermal { .. } => PressureKind::Isothermal,
            PressureLaw::IsothermalPlusPowers { .. } => PressureKind::IsothermalPlusPowers,
            PressureLaw::Exponential { .. } => PressureKind::Exponential,
            PressureLaw::Custom(_) => PressureKind::Custom,
        }
    }

    /// `P'(0)`.
    pub fn kappa(&self) -> T {
        match self {
            PressureLaw::Isothermal { kappa }
            | PressureLaw::IsothermalPlusPowers { kappa, .. }
            | PressureLaw::Exponential { kappa } => *kappa,
            PressureLaw::Custom(c) => c.kappa,
        }
    }

    pub fn is_isothermal(&self) -> bool {
        match self {
            PressureLaw::Isothermal { .. } => true,
            PressureLaw::IsothermalPlusPowers { powers, .. } => powers.is_empty(),
            _ => false,
        }
    }

    /// Checks `kappa > 0`, the power exponents, and for custom laws
    /// `P'(0) = kappa`, convexity and `P(s) >= kappa s` on a sample grid.
    pub fn validate(&self) -> Result<()> {
        let kappa = self.kappa();
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::InvalidParams(format!(
                "pressure kappa must be > 0, got {kappa}"
            )));
        }
        match self {
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                for (j, term) in powers.iter().enumerate() {
                    if !(term.coeff > T::zero()) {
                        return Err(Error::InvalidParams(format!(
                            "power term {j}: coefficient must be > 0, got {}",
                            term.coeff
                        )));
                    }
                    if !(term.gamma > T::one()) {
                        return Err(Error::InvalidParams(format!(
                            "power term {j}: exponent must be > 1, got {}",
                            term.gamma
                        )));
                    }
                }
            }
            PressureLaw::Custom(c) => {
                let slope = (c.dp)(T::zero());
                if (slope - kappa).abs() > T::lit(1e-9) * kappa.max(T::one()) {
                    return Err(Error::InvalidParams(format!(
                        "custom pressure: P'(0) = {slope} differs from kappa = {kappa}"
                    )));
                }
                for k in 0..=200 {
                    let s = T::lit(10.0) * T::from_count(k) / T::lit(200.0);
                    if (c.d2p)(s) < -T::lit(1e-12) {
                        return Err(Error::InvalidParams(format!(
                            "custom pressure is not convex at rho = {s}"
                        )));
                    }
                    if self.excess(s) < -T::lit(1e-12) {
                        return Err(Error::InvalidParams(format!(
                            "custom pressure: P(s) < kappa s at s = {s}"
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `P(rho)`.
    pub fn pressure(&self, rho: T) -> T {
        match self {
            PressureLaw::Isothermal { kappa } => *kappa * rho,
            PressureLaw::IsothermalPlusPowers { kappa, powers } => {
                let rho = rho.max(T::zero());
                powers
                    .iter()
                    .fold(*kappa * rho, |acc, t| acc + t.coeff * rho.powf(t.gamma))
            }
            PressureLaw::Exponential { kappa } => *kappa * rho.exp_m1(),
            PressureLaw::Custom(c) => (c.p)(rho),
        }
    }

    /// `P'(rho)`.
    pub fn dpressure(&self, rho: T) -> T {
        match self {
            PressureLaw::Isothermal { kappa } => *kappa,
            PressureLaw::IsothermalPlusPowers { kappa, powers } => {
                let rho = rho.max(T::zero());
                powers.iter().fold(*kappa, |acc, t| {
                    acc + t.coeff * t.gamma * rho.powf(t.gamma - T::one())
                })
            }
            PressureLaw::Exponential { kappa } => *kappa * rho.exp(),
            PressureLaw::Custom(c) => (c.dp)(rho),
        }
    }

    /// `P''(rho)`; may be infinite at `rho = 0` for exponents below 2.
    pub fn d2pressure(&self, rho: T) -> T {
        match self {
            PressureLaw::Isothermal { .. } => T::zero(),
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                let rho = rho.max(T::zero());
                powers.iter().fold(T::zero(), |acc, t| {
                    acc + t.coeff * t.gamma * (t.gamma - T::one()) * rho.powf(t.gamma - T::lit(2.0))
                })
            }
            PressureLaw::Exponential { kappa } => *kappa * rho.exp(),
            PressureLaw::Custom(c) => (c.d2p)(rho),
        }
    }

    /// `G''(s) = (P'(s) - P'(0)) / s`, extended by `P''(0)` at `s = 0`.
    pub fn g_second(&self, s: T) -> T {
        if s <= T::zero() {
            return self.d2pressure(T::zero());
        }
        match self {
            PressureLaw::Isothermal { .. } => T::zero(),
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                powers.iter().fold(T::zero(), |acc, t| {
                    acc + t.coeff * t.gamma * s.powf(t.gamma - T::lit(2.0))
                })
            }
            PressureLaw::Exponential { kappa } => *kappa * s.exp_m1() / s,
            PressureLaw::Custom(_) => {
                let v = (self.dpressure(s) - self.kappa()) / s;
                // relative cancellation in the numerator below this size
                if s < T::lit(1e-6) {
                    self.d2pressure(s)
                } else {
                    v
                }
            }
        }
    }

    /// `G(u)`: closed form for the isothermal and power laws, quadrature otherwise.
    pub fn g(&self, u: T) -> Result<T> {
        if !(u >= T::zero()) {
            return Err(Error::DomainError(format!("G requires u >= 0, got {u}")));
        }
        match self {
            PressureLaw::Isothermal { .. } => Ok(T::zero()),
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                Ok(powers.iter().fold(T::zero(), |acc, t| {
                    acc + t.coeff * u.powf(t.gamma) / (t.gamma - T::one())
                }))
            }
            _ => self.g_by_quadrature(u),
        }
    }

    /// `G(u) = ∫_0^u (u - s) G''(s) ds` by adaptive Simpson in `s = u w^8`,
    /// which tames the `s^(gamma-2)` endpoint behaviour of power-like laws.
    pub fn g_by_quadrature(&self, u: T) -> Result<T> {
        if u == T::zero() {
            return Ok(T::zero());
        }
        let eight = T::lit(8.0);
        self.substituted(u, |w, s| (u - s) * self.g_second(s) * eight * u * w.powi(7))
    }

    /// `G'(u) = ∫_0^u G''(s) ds`.
    pub fn g_prime(&self, u: T) -> Result<T> {
        match self {
            PressureLaw::Isothermal { .. } => Ok(T::zero()),
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                Ok(powers.iter().fold(T::zero(), |acc, t| {
                    acc + t.coeff * t.gamma * u.powf(t.gamma - T::one()) / (t.gamma - T::one())
                }))
            }
            _ if u == T::zero() => Ok(T::zero()),
            _ => {
                let eight = T::lit(8.0);
                self.substituted(u, |w, s| self.g_second(s) * eight * u * w.powi(7))
            }
        }
    }

    fn substituted(&self, u: T, integrand: impl Fn(T, T) -> T) -> Result<T> {
        let f = |w: T| {
            if w == T::zero() {
                return T::zero();
            }
            let w2 = w * w;
            let w4 = w2 * w2;
            integrand(w, u * w4 * w4)
        };
        adaptive_simpson(f, T::zero(), T::one(), T::lit(G_QUADRATURE_TOL))
    }

    /// `F(rho) = kappa rho ln rho + G(rho)`.
    pub fn f(&self, rho: T) -> Result<T> {
        Ok(self.kappa() * xlogx(rho) + self.g(rho)?)
    }

    /// `P(s) - s P'(0)`, non-negative by convexity.
    pub fn excess(&self, s: T) -> T {
        match self {
            PressureLaw::Isothermal { .. } => T::zero(),
            PressureLaw::IsothermalPlusPowers { powers, .. } => {
                let s = s.max(T::zero());
                powers
                    .iter()
                    .fold(T::zero(), |acc, t| acc + t.coeff * s.powf(t.gamma))
            }
            // e^s - 1 - s without cancellation for small s
            PressureLaw::Exponential { kappa } => {
                if s.abs() < T::lit(1e-3) {
                    let mut term = s * s / T::lit(2.0);
                    let mut sum = term;
                    for k in 3..12 {
                        term = term * s / T::from_count(k);
                        sum = sum + term;
                    }
                    *kappa * sum
                } else {
                    *kappa * (s.exp_m1() - s)
                }
            }
            PressureLaw::Custom(c) => (c.p)(s) - s * c.kappa,
        }
    }
}

/// Free-function form of [`PressureLaw::g`].
pub fn eval_g<T: Real>(law: &PressureLaw<T>, u: T) -> Result<T> {
    law.g(u)
}

/// Free-function form of [`PressureLaw::f`].
pub fn eval_f<T: Real>(law: &PressureLaw<T>, rho: T) -> Result<T> {
    law.f(rho)
}

/// Free-function form of [`PressureLaw::excess`].
pub fn excess_pressure<T: Real>(law: &PressureLaw<T>, sigma: T) -> T {
    law.excess(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn mixed() -> PressureLaw<f64> {
        PressureLaw::with_powers(1.0, &[(1.0, 2.0)]).unwrap()
    }

    /// `G(u)` for `P = e^rho - 1` from the series
    /// `sum_k u^{k+2} / ((k+1)! (k+1) (k+2))`.
    fn exp_g_series(u: f64) -> f64 {
        let mut fact = 1.0;
        let mut sum = 0.0;
        for k in 0..40 {
            fact *= (k + 1) as f64;
            sum += u.powi(k + 2) / (fact * (k + 1) as f64 * (k + 2) as f64);
        }
        sum
    }

    #[test]
    fn isothermal_has_zero_g() {
        let law = PressureLaw::isothermal(2.5).unwrap();
        for u in [0.0, 0.3, 1.0, 17.0] {
            assert_eq!(eval_g(&law, u).unwrap(), 0.0);
            assert_eq!(excess_pressure(&law, u), 0.0);
        }
        assert_eq!(eval_f(&law, 1.0).unwrap(), 0.0);
        assert_relative_eq!(eval_f(&law, E).unwrap(), 2.5 * E, max_relative = 1e-15);
    }

    #[test]
    fn power_law_closed_form_matches_quadrature() {
        for &(k1, gamma) in &[(1.0, 2.0), (0.5, 1.5), (2.0, 3.0), (0.3, 1.3)] {
            let law = PressureLaw::with_powers(1.0, &[(k1, gamma)]).unwrap();
            for u in [0.1, 0.7, 1.0, 2.0] {
                let closed = law.g(u).unwrap();
                assert_relative_eq!(
                    closed,
                    k1 * f64::powf(u, gamma) / (gamma - 1.0),
                    max_relative = 1e-14
                );
                let quad = law
                    .g_by_quadrature(u)
                    .unwrap_or_else(|e| panic!("gamma={gamma} u={u}: {e}"));
                assert!(
                    (closed - quad).abs() < 1e-9,
                    "gamma={gamma} u={u}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn mixed_f_value() {
        assert_relative_eq!(
            eval_f(&mixed(), 2.0).unwrap(),
            2.0 * 2f64.ln() + 4.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn exponential_g_matches_series() {
        let law = PressureLaw::exponential(1.0).unwrap();
        for u in [0.25, 1.0, 3.0] {
            let g = eval_g(&law, u).unwrap();
            assert!(
                (g - exp_g_series(u)).abs() < 1e-9,
                "u={u}: {g} vs {}",
                exp_g_series(u)
            );
        }
        // G(1) from the series
        assert!((eval_g(&law, 1.0).unwrap() - 0.599_620_3).abs() < 1e-6);
    }

    #[test]
    fn excess_pressure_examples() {
        let law = PressureLaw::with_powers(1.0, &[(2.0, 3.0)]).unwrap();
        assert_relative_eq!(excess_pressure(&law, 1.0), 2.0, max_relative = 1e-15);
        let exp = PressureLaw::exponential(1.0).unwrap();
        assert_relative_eq!(excess_pressure(&exp, 1.0), E - 2.0, max_relative = 1e-14);
        assert_relative_eq!(exp.kappa(), 1.0);
        assert!(excess_pressure(&exp, 1e-5) > 0.0);
    }

    #[test]
    fn validation() {
        assert!(PressureLaw::isothermal(0.0).is_err());
        assert!(PressureLaw::with_powers(1.0, &[(1.0, 1.0)]).is_err());
        assert!(PressureLaw::with_powers(1.0, &[(-1.0, 2.0)]).is_err());
        assert!(eval_g(&mixed(), -1.0).is_err());
        let bad = CustomPressure::<f64> {
            kappa: 1.0,
            p: Arc::new(|r| r - 0.1 * r * r),
            dp: Arc::new(|r| 1.0 - 0.2 * r),
            d2p: Arc::new(|_| -0.2),
        };
        assert!(PressureLaw::custom(bad).is_err());
    }

    #[test]
    fn custom_law_uses_quadrature() {
        let custom = CustomPressure::<f64> {
            kappa: 1.0,
            p: Arc::new(|r| r + r * r),
            dp: Arc::new(|r| 1.0 + 2.0 * r),
            d2p: Arc::new(|_| 2.0),
        };
        let law = PressureLaw::custom(custom).unwrap();
        assert_eq!(law.kind(), PressureKind::Custom);
        assert!((law.g(1.5).unwrap() - 1.5 * 1.5).abs() < 1e-9);
    }

    #[test]
    fn f_second_derivative_identity() {
        // F'' = P'(0)/s + G'' checked by central differences against the analytic P'/s.
        for law in [
            mixed(),
            PressureLaw::exponential(1.0).unwrap(),
            PressureLaw::isothermal(1.0).unwrap(),
        ] {
            for k in 0..=20 {
                let s = 1e-3 * f64::powf(1e4, k as f64 / 20.0);
                let h = 1e-4 * s;
                let fd = (law.f(s + h).unwrap() - 2.0 * law.f(s).unwrap() + law.f(s - h).unwrap())
                    / (h * h);
                let exact = law.dpressure(s) / s;
                let ident = law.kappa() / s + law.g_second(s);
                assert_relative_eq!(ident, exact, max_relative = 1e-12);
                assert!(
                    (fd - exact).abs() <= 1e-4 * exact.abs().max(1.0),
                    "s={s}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn g_starts_flat() {
        for law in [mixed(), PressureLaw::exponential(1.0).unwrap()] {
            assert_eq!(law.g(0.0).unwrap(), 0.0);
            assert!(law.g_prime(0.0).unwrap().abs() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn g_monotone_convex_and_excess_nonnegative(
            k1 in 0.01f64..3.0,
            gamma in 1.05f64..4.0,
            a in 0.0f64..4.0,
            b in 0.0f64..4.0,
        ) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let mid = 0.5 * (lo + hi);
            for law in [
                PressureLaw::with_powers(1.0, &[(k1, gamma)]).unwrap(),
                PressureLaw::exponential(k1).unwrap(),
            ] {
                let (glo, gmid, ghi) = (law.g(lo).unwrap(), law.g(mid).unwrap(), law.g(hi).unwrap());
                prop_assert!(ghi >= glo - 1e-12);
                prop_assert!(gmid <= 0.5 * (glo + ghi) + 1e-9);
                prop_assert!(law.excess(a) >= 0.0);
                prop_assert!(law.d2pressure(a.max(1e-6)) >= 0.0);
            }
        }
    }
}
