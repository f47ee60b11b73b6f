//! Isentropic contrast: `P = kappa rho^gamma` in compactified variables
//!
//! ```text
//! rho(t, x) = R(sigma, x/(1+t)) / (1+t),   u(t, x) = U(sigma, x/(1+t)) / (1+t) + x/(1+t),   sigma = t/(1+t)
//!
//! R_sigma + (RU)_y = 0
//! (RU)_sigma + (RU^2)_y + kappa (1-sigma)^(gamma-3) (R^gamma)_y = 0
//! ```
//!
//! (one space dimension). Same Rusanov / minmod / SSP-RK2 machinery as the
//! isothermal solver, without confinement.

use crate::diagnostics::wasserstein_between;
use crate::error::{Error, Result};
use crate::grid::{interpolate_linear, Grid1D};
use crate::pressure::PressureLaw;
use crate::rescaled_solver::{
    pad, run as run_isothermal, slopes, theta_for_mass, Cadence, FluidState1D, Model,
    Reconstruction, GHOSTS, NEGATIVE_TOL, VACUUM_RATIO,
};
use crate::scalar::Real;
use crate::scaling_ode::{integrate_tau, TauParams};

pub const DEFAULT_SIGMA_END: f64 = 0.99;
/// Peak amplitude regarded as small data.
pub const SMALL_AMPLITUDE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct IsentropicConfig<T> {
    pub gamma: T,
    pub kappa: T,
    pub grid: Grid1D<T>,
    pub sigma_end: T,
    pub cfl: T,
    pub reconstruction: Reconstruction,
}

impl<T: Real> IsentropicConfig<T> {
    pub fn new(gamma: T, kappa: T, grid: Grid1D<T>) -> Result<Self> {
        let c = Self {
            gamma,
            kappa,
            grid,
            sigma_end: T::lit(DEFAULT_SIGMA_END),
            cfl: T::lit(0.4),
            reconstruction: Reconstruction::Minmod,
        };
        c.validate()?;
        Ok(c)
    }

    /// Space dimension of the solver.
    pub fn dim(&self) -> usize {
        1
    }

    pub fn validate(&self) -> Result<()> {
        let d = T::from_count(self.dim());
        if !(self.gamma > T::one() && self.gamma <= T::one() + T::lit(2.0) / d) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in (1, 1 + 2/d], got {}",
                self.gamma
            )));
        }
        if !(self.kappa > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if !(self.sigma_end > T::zero() && self.sigma_end <= T::one()) {
            return Err(Error::InvalidParams(format!(
                "sigma_end must lie in (0, 1], got {}",
                self.sigma_end
            )));
        }
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidParams(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        Ok(())
    }

    /// `d gamma - d - 2`.
    pub fn exponent(&self) -> T {
        let d = T::from_count(self.dim());
        d * self.gamma - d - T::lit(2.0)
    }

    /// `(1 - sigma)^(d gamma - d - 2)`.
    pub fn coefficient(&self, sigma: T) -> T {
        (T::one() - sigma).powf(self.exponent())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsentropicState<T> {
    pub sigma: T,
    pub r: Vec<T>,
    pub ru: Vec<T>,
}

impl<T: Real> IsentropicState<T> {
    pub fn from_profiles(sigma: T, r: Vec<T>, u: &[T]) -> Result<Self> {
        if r.len() != u.len() {
            return Err(Error::InvalidParams(
                "R and U must have equal length".into(),
            ));
        }
        if r.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::InvalidParams("R must be >= 0".into()));
        }
        let ru = r.iter().zip(u).map(|(&r, &u)| r * u).collect();
        Ok(Self { sigma, r, ru })
    }

    pub fn velocity(&self) -> Vec<T> {
        let floor = floor_of(&self.r);
        self.r
            .iter()
            .zip(&self.ru)
            .map(|(&r, &m)| {
                if r > floor && r > T::zero() {
                    m / r
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    /// Symmetrising variable `R^((gamma - 1)/2)`.
    pub fn r_tilde(&self, gamma: T) -> Vec<T> {
        let e = (gamma - T::one()) / T::lit(2.0);
        self.r.iter().map(|r| r.max(T::zero()).powf(e)).collect()
    }
}

fn floor_of<T: Real>(r: &[T]) -> T {
    T::lit(VACUUM_RATIO) * r.iter().copied().fold(T::zero(), T::max)
}

fn wave_speed<T: Real>(cfg: &IsentropicConfig<T>, c: T, r: T, u: T) -> T {
    u.abs() + (cfg.gamma * cfg.kappa * c * r.max(T::zero()).powf(cfg.gamma - T::one())).sqrt()
}

/// CFL-limited step at `state`, using the coefficient at the end of the step.
pub fn isentropic_stable_dsigma<T: Real>(
    cfg: &IsentropicConfig<T>,
    state: &IsentropicState<T>,
) -> T {
    let dy = cfg.grid.dy();
    let u = state.velocity();
    let bound = |sigma: T| {
        let c = cfg.coefficient(sigma.min(cfg.sigma_end));
        let lambda = state
            .r
            .iter()
            .zip(&u)
            .fold(T::zero(), |m, (&r, &u)| m.max(wave_speed(cfg, c, r, u)));
        if lambda > T::zero() {
            cfg.cfl * dy / lambda
        } else {
            T::infinity()
        }
    };
    let first = bound(state.sigma);
    let guess = if first.is_finite() { first } else { T::zero() };
    first.min(bound(state.sigma + guess))
}

fn rhs<T: Real>(cfg: &IsentropicConfig<T>, r: &[T], m: &[T], sigma: T) -> (Vec<T>, Vec<T>) {
    let n = r.len();
    let dy = cfg.grid.dy();
    let half = T::lit(0.5);
    let c = cfg.coefficient(sigma);
    let floor = floor_of(r);
    let u: Vec<T> = r
        .iter()
        .zip(m)
        .map(|(&r, &m)| {
            if r > floor && r > T::zero() {
                m / r
            } else {
                T::zero()
            }
        })
        .collect();
    let rp = pad(r);
    let up = pad(&u);
    let sr = slopes(&rp, cfg.reconstruction);
    let su = slopes(&up, cfg.reconstruction);
    let flux = |rr: T, uu: T| -> (T, T) {
        let rr = rr.max(T::zero());
        (rr * uu, rr * uu * uu + cfg.kappa * c * rr.powf(cfg.gamma))
    };
    let mut fr = vec![T::zero(); n + 1];
    let mut fm = vec![T::zero(); n + 1];
    for k in 0..=n {
        let (a, b) = (k + GHOSTS - 1, k + GHOSTS);
        let rl = (rp[a] + half * sr[a]).max(T::zero());
        let rr = (rp[b] - half * sr[b]).max(T::zero());
        let ul = up[a] + half * su[a];
        let ur = up[b] - half * su[b];
        let (l0, l1) = flux(rl, ul);
        let (r0, r1) = flux(rr, ur);
        let s = wave_speed(cfg, c, rl, ul).max(wave_speed(cfg, c, rr, ur));
        fr[k] = half * (l0 + r0) - half * s * (rr - rl);
        fm[k] = half * (l1 + r1) - half * s * (rr * ur - rl * ul);
    }
    let dr = (0..n).map(|i| -(fr[i + 1] - fr[i]) / dy).collect();
    let dm = (0..n).map(|i| -(fm[i + 1] - fm[i]) / dy).collect();
    (dr, dm)
}

fn clean<T: Real>(r: &mut [T], m: &mut [T], sigma: T) -> Result<()> {
    for (i, v) in r.iter_mut().enumerate() {
        if !v.is_finite() || *v < -T::lit(NEGATIVE_TOL) {
            return Err(Error::NegativeDensity {
                cell: i,
                value: v.as_f64(),
                t: sigma.as_f64(),
            });
        }
        *v = v.max(T::zero());
    }
    let floor = floor_of(r);
    for (mv, &rv) in m.iter_mut().zip(r.iter()) {
        if rv <= floor {
            *mv = T::zero();
        }
    }
    Ok(())
}

/// One SSP-RK2 step of size `dsigma`.
pub fn isentropic_step<T: Real>(
    cfg: &IsentropicConfig<T>,
    state: &IsentropicState<T>,
    dsigma: T,
) -> Result<IsentropicState<T>> {
    let limit = isentropic_stable_dsigma(cfg, state);
    if !(dsigma > T::zero()) || dsigma > limit * (T::one() + T::lit(1e-9)) {
        return Err(Error::CflViolation {
            dt: dsigma.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let s1 = state.sigma + dsigma;
    if s1 > T::one() {
        return Err(Error::DomainError(format!("sigma would exceed 1 ({s1})")));
    }
    let half = T::lit(0.5);
    let (dr0, dm0) = rhs(cfg, &state.r, &state.ru, state.sigma);
    let mut r1: Vec<T> = state
        .r
        .iter()
        .zip(&dr0)
        .map(|(&r, &d)| r + dsigma * d)
        .collect();
    let mut m1: Vec<T> = state
        .ru
        .iter()
        .zip(&dm0)
        .map(|(&m, &d)| m + dsigma * d)
        .collect();
    clean(&mut r1, &mut m1, s1)?;
    let (dr1, dm1) = rhs(cfg, &r1, &m1, s1);
    let mut r2: Vec<T> = (0..r1.len())
        .map(|i| half * (state.r[i] + r1[i] + dsigma * dr1[i]))
        .collect();
    let mut m2: Vec<T> = (0..m1.len())
        .map(|i| half * (state.ru[i] + m1[i] + dsigma * dm1[i]))
        .collect();
    clean(&mut r2, &mut m2, s1)?;
    Ok(IsentropicState {
        sigma: s1,
        r: r2,
        ru: m2,
    })
}

/// Result of [`isentropic_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct IsentropicRun<T> {
    pub state: IsentropicState<T>,
    pub steps: usize,
    /// Largest `R^((gamma-1)/2)` seen along the run.
    pub max_r_tilde: T,
}

/// Runs from `initial` to `cfg.sigma_end`.
pub fn isentropic_run<T: Real>(
    cfg: &IsentropicConfig<T>,
    initial: IsentropicState<T>,
) -> Result<IsentropicRun<T>> {
    cfg.validate()?;
    let end = cfg.sigma_end;
    let mut state = initial;
    let max_tilde =
        |s: &IsentropicState<T>| s.r_tilde(cfg.gamma).into_iter().fold(T::zero(), T::max);
    let mut max_r_tilde = max_tilde(&state);
    let mut steps = 0;
    while state.sigma < end {
        let mut ds = isentropic_stable_dsigma(cfg, &state);
        let landing = state.sigma + ds >= end;
        if landing {
            ds = end - state.sigma;
        }
        state = isentropic_step(cfg, &state, ds)?;
        if landing {
            state.sigma = end;
        }
        steps += 1;
        max_r_tilde = max_r_tilde.max(max_tilde(&state));
    }
    Ok(IsentropicRun {
        state,
        steps,
        max_r_tilde,
    })
}

/// `(rho, u)` at `t = sigma / (1 - sigma)` on the abscissa `x`.
pub fn isentropic_to_physical<T: Real>(
    cfg: &IsentropicConfig<T>,
    state: &IsentropicState<T>,
    x: &[T],
) -> (Vec<T>, Vec<T>) {
    let s = T::one() + state.sigma / (T::one() - state.sigma);
    let y = cfg.grid.centers();
    let u = state.velocity();
    let rho = x
        .iter()
        .map(|&x| interpolate_linear(y, &state.r, x / s, T::zero()) / s)
        .collect();
    let vel = x
        .iter()
        .map(|&x| interpolate_linear(y, &u, x / s, T::zero()) / s + x / s)
        .collect();
    (rho, vel)
}

/// Inverse of [`isentropic_to_physical`] at time `t`.
pub fn isentropic_from_physical<T: Real>(
    cfg: &IsentropicConfig<T>,
    t: T,
    x: &[T],
    rho: &[T],
    u: &[T],
) -> Result<IsentropicState<T>> {
    let s = T::one() + t;
    let y = cfg.grid.centers();
    let r = y
        .iter()
        .map(|&y| (s * interpolate_linear(x, rho, s * y, T::zero())).max(T::zero()))
        .collect();
    let uu: Vec<T> = y
        .iter()
        .map(|&y| s * interpolate_linear(x, u, s * y, T::zero()) - s * y)
        .collect();
    IsentropicState::from_profiles(t / s, r, &uu)
}

/// Distances reported by [`profile_contrast`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastReport<T> {
    /// `||A - B||_{L1}` initially.
    pub dist_init: T,
    /// `||A - B||_{L1}` at `sigma_end` of the isentropic runs.
    pub dist_final_isentropic: T,
    /// Largest of the two isothermal distances to the mass-matched Gaussian at the end.
    pub dist_final_isothermal: T,
    /// Initial distances of A and B to the mass-matched Gaussian.
    pub isothermal_initial: [T; 2],
    /// Final distances of A and B to the mass-matched Gaussian.
    pub isothermal_final: [T; 2],
    /// `W_2` between the two isentropic end profiles.
    pub w2_final_isentropic: T,
    pub exponent: T,
    pub max_r_tilde: T,
}

fn l1<T: Real>(grid: &Grid1D<T>, a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum::<T>() * grid.dy()
}

/// Runs two equal-mass small profiles through the isentropic solver to
/// `cfg.sigma_end`, and through the isothermal rescaled solver (`P = kappa rho`)
/// to `t_isothermal`.
pub fn profile_contrast<T: Real>(
    cfg: &IsentropicConfig<T>,
    a: (&[T], &[T]),
    b: (&[T], &[T]),
    t_isothermal: T,
) -> Result<ContrastReport<T>> {
    cfg.validate()?;
    let grid = &cfg.grid;
    let (ma, mb) = (grid.integrate(a.0), grid.integrate(b.0));
    if !(ma > T::zero()) || (ma - mb).abs() > T::lit(1e-10) * ma {
        return Err(Error::InvalidParams(format!(
            "profiles need equal positive mass, got {ma} and {mb}"
        )));
    }
    let dist_init = l1(grid, a.0, b.0);

    let ra = isentropic_run(
        cfg,
        IsentropicState::from_profiles(T::zero(), a.0.to_vec(), a.1)?,
    )?;
    let rb = isentropic_run(
        cfg,
        IsentropicState::from_profiles(T::zero(), b.0.to_vec(), b.1)?,
    )?;
    let dist_final_isentropic = l1(grid, &ra.state.r, &rb.state.r);
    let w2_final_isentropic = wasserstein_between(grid, &ra.state.r, &rb.state.r, 2)?;

    let law = PressureLaw::isothermal(cfg.kappa)?;
    let traj = integrate_tau(TauParams::rescaling(cfg.kappa), t_isothermal, T::lit(1e-10))?;
    let theta = theta_for_mass(ma);
    let mut initial = [T::zero(); 2];
    let mut fin = [T::zero(); 2];
    for (k, prof) in [a, b].iter().enumerate() {
        let s = FluidState1D::from_profiles(
            T::zero(),
            grid.clone(),
            prof.0.to_vec(),
            prof.1,
            theta,
            Model::euler(law.clone()),
        )?;
        initial[k] = crate::diagnostics::l1_to_gamma(&s);
        let mut sink = Vec::new();
        let end = run_isothermal(s, &traj, t_isothermal, &Cadence::At(Vec::new()), &mut sink)?;
        fin[k] = crate::diagnostics::l1_to_gamma(&end);
    }
    Ok(ContrastReport {
        dist_init,
        dist_final_isentropic,
        dist_final_isothermal: fin[0].max(fin[1]),
        isothermal_initial: initial,
        isothermal_final: fin,
        w2_final_isentropic,
        exponent: cfg.exponent(),
        max_r_tilde: ra.max_r_tilde.max(rb.max_r_tilde),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(gamma: f64) -> IsentropicConfig<f64> {
        IsentropicConfig::new(gamma, 1.0, Grid1D::new(10.0, 200).unwrap()).unwrap()
    }

    #[test]
    fn critical_exponent_gives_unit_coefficient() {
        let c = cfg(3.0);
        assert_eq!(c.exponent(), 0.0);
        for s in [0.0, 0.5, 0.99, 1.0] {
            assert_eq!(c.coefficient(s), 1.0);
        }
        assert_eq!(cfg(1.5).exponent(), -1.5);
    }

    #[test]
    fn gamma_range() {
        let g = Grid1D::new(10.0, 64).unwrap();
        assert!(IsentropicConfig::new(1.0, 1.0, g.clone()).is_err());
        assert!(IsentropicConfig::new(3.5, 1.0, g.clone()).is_err());
        assert!(IsentropicConfig::new(1.5, 0.0, g).is_err());
    }

    #[test]
    fn constant_state_is_stationary() {
        let c = cfg(1.5);
        let n = c.grid.n();
        let s = IsentropicState::from_profiles(0.2, vec![0.03; n], &vec![0.0; n]).unwrap();
        let ds = isentropic_stable_dsigma(&c, &s);
        let t = isentropic_step(&c, &s, ds).unwrap();
        assert!(t.r.iter().all(|&r| (r - 0.03).abs() < 1e-17));
        assert!(t.ru.iter().all(|&m| m.abs() < 1e-17));
    }

    #[test]
    fn compactified_roundtrip() {
        let c = IsentropicConfig::new(1.5, 1.0, Grid1D::new(10.0, 400).unwrap()).unwrap();
        let t = 1.5;
        let x: Vec<f64> = (0..2001).map(|i| -25.0 + 0.025 * i as f64).collect();
        let rho: Vec<f64> = x
            .iter()
            .map(|&x| 0.02 * (-(x / 2.5f64).powi(2)).exp())
            .collect();
        let u: Vec<f64> = x.iter().map(|&x| 0.4 * x).collect();
        let s = isentropic_from_physical(&c, t, &x, &rho, &u).unwrap();
        assert!((s.sigma - 0.6).abs() < 1e-15);
        let (rho2, u2) = isentropic_to_physical(&c, &s, &x);
        for i in (400..1600).step_by(50) {
            assert!((rho2[i] - rho[i]).abs() < 5e-5, "{} vs {}", rho2[i], rho[i]);
            assert!((u2[i] - u[i]).abs() < 1e-3);
        }
    }

    #[test]
    fn identical_profiles_do_not_separate() {
        let c = IsentropicConfig {
            sigma_end: 0.5,
            ..cfg(1.5)
        };
        let r = c.grid.sample(|y| 0.05 * (-y * y).exp());
        let u = vec![0.0; r.len()];
        let rep = profile_contrast(&c, (&r, &u), (&r, &u), 5.0).unwrap();
        assert_eq!(rep.dist_init, 0.0);
        assert_eq!(rep.dist_final_isentropic, 0.0);
        assert_eq!(rep.isothermal_final[0], rep.isothermal_final[1]);
    }
}
