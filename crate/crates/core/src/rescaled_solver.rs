//! Finite-volume solver for the self-similar system on `[-L, L]` (one space dimension)
//!
//! ```text
//! R_t + (RU)_y / tau^2 = 0
//! (RU)_t + (RU^2)_y / tau^2 + 2 kappa y R + P'(theta R / tau) R_y
//!     = eps^2/(2 tau^2) (S_K)_y + nu/tau^2 (R U_y)_y + nu tau'/tau R_y
//! ```
//!
//! with `S_K = sqrt(R) (sqrt R)'' - ((sqrt R)')^2 = R''/2 - 2 ((sqrt R)')^2`, and
//! `tau` the rescaling function (`tau(0) = 1`, `tau'(0) = 0`, `kappa = P'(0)`).
//! Physical unknowns are recovered through
//!
//! ```text
//! rho(t, x) = theta R(t, x/tau) / tau,     u(t, x) = U(t, x/tau) / tau + tau'/tau x.
//! ```
//!
//! Hyperbolic part: Rusanov flux with optional minmod-limited reconstruction of
//! `(R, U)`; pressure enters through the flux `Pi(R) = (tau/theta) P(theta R/tau) + nu tau'/tau R`.
//! Time stepping: SSP-RK2. Boundaries: two zero-gradient ghost cells per side.

use std::io::{self, Write};

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::grid::{interpolate_linear, Grid1D};
use crate::pressure::PressureLaw;
use crate::scalar::Real;
use crate::scaling_ode::TauTrajectory;

/// Cells whose density falls below `VACUUM_RATIO * max R` are treated as vacuum.
pub const VACUUM_RATIO: f64 = 1e-12;
/// Densities in `(-NEGATIVE_TOL, 0)` are rounding noise and are set to zero.
pub const NEGATIVE_TOL: f64 = 1e-14;
pub const DEFAULT_CFL: f64 = 0.4;
/// `dt <= BOHM_DT_FACTOR * tau^2 dy^2 / eps`.
pub const BOHM_DT_FACTOR: f64 = 0.25;

pub(crate) const GHOSTS: usize = 2;

/// Physical coefficients. `kappa` is `law.kappa()`.
#[derive(Debug, Clone)]
pub struct Model<T> {
    pub law: PressureLaw<T>,
    pub eps: T,
    pub nu: T,
}

impl<T: Real> Model<T> {
    pub fn new(law: PressureLaw<T>, eps: T, nu: T) -> Result<Self> {
        if !(eps >= T::zero()) || !(nu >= T::zero()) {
            return Err(Error::InvalidParams(format!(
                "need eps, nu >= 0, got eps={eps}, nu={nu}"
            )));
        }
        law.validate()?;
        Ok(Self { law, eps, nu })
    }

    pub fn euler(law: PressureLaw<T>) -> Self {
        Self {
            law,
            eps: T::zero(),
            nu: T::zero(),
        }
    }

    pub fn kappa(&self) -> T {
        self.law.kappa()
    }

    /// Space dimension of the solver.
    pub fn dim(&self) -> usize {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reconstruction {
    /// Piecewise constant states (first order).
    FirstOrder,
    /// Minmod-limited linear reconstruction of `R` and `U`.
    #[default]
    Minmod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scheme<T> {
    pub cfl: T,
    pub reconstruction: Reconstruction,
}

impl<T: Real> Default for Scheme<T> {
    fn default() -> Self {
        Self {
            cfl: T::lit(DEFAULT_CFL),
            reconstruction: Reconstruction::default(),
        }
    }
}

/// Cell averages of `(R, RU)` at physical time `t`.
#[derive(Debug, Clone)]
pub struct FluidState1D<T> {
    pub t: T,
    pub grid: Grid1D<T>,
    pub r: Vec<T>,
    pub ru: Vec<T>,
    /// `||rho_0||_{L1} / ||Gamma||_{L1}`.
    pub theta: T,
    pub model: Model<T>,
    pub scheme: Scheme<T>,
    /// Mass that has left through the two boundaries since the start of the run.
    pub mass_outflow: T,
}

impl<T: Real> FluidState1D<T> {
    /// State from cell samples of `(R, U)`.
    pub fn from_profiles(
        t: T,
        grid: Grid1D<T>,
        r: Vec<T>,
        u: &[T],
        theta: T,
        model: Model<T>,
    ) -> Result<Self> {
        let n = grid.n();
        if r.len() != n || u.len() != n {
            return Err(Error::InvalidParams(format!(
                "profiles must have {n} cells, got {} and {}",
                r.len(),
                u.len()
            )));
        }
        if !(theta > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "theta must be > 0, got {theta}"
            )));
        }
        if let Some((i, v)) = r.iter().enumerate().find(|(_, v)| !(**v >= T::zero())) {
            return Err(Error::InvalidParams(format!(
                "R must be >= 0, got {v} in cell {i}"
            )));
        }
        let ru = r.iter().zip(u).map(|(&r, &u)| r * u).collect();
        let mut s = Self {
            t,
            grid,
            r,
            ru,
            theta,
            model,
            scheme: Scheme::default(),
            mass_outflow: T::zero(),
        };
        let floor = s.vacuum_floor();
        for (m, &r) in s.ru.iter_mut().zip(&s.r) {
            if r <= floor {
                *m = T::zero();
            }
        }
        Ok(s)
    }

    /// State from functions of `y`.
    pub fn from_fn<FR: Fn(T) -> T, FU: Fn(T) -> T>(
        t: T,
        grid: Grid1D<T>,
        r: FR,
        u: FU,
        theta: T,
        model: Model<T>,
    ) -> Result<Self> {
        let rv = grid.sample(r);
        let uv = grid.sample(u);
        Self::from_profiles(t, grid, rv, &uv, theta, model)
    }

    pub fn with_scheme(mut self, scheme: Scheme<T>) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn vacuum_floor(&self) -> T {
        vacuum_floor(&self.r)
    }

    /// `U = RU / R` above the vacuum floor, zero elsewhere.
    pub fn velocity(&self) -> Vec<T> {
        velocity(&self.r, &self.ru, self.vacuum_floor())
    }

    pub fn mass(&self) -> T {
        self.grid.integrate(&self.r)
    }

    pub fn write_frame_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "y,R,RU,U")?;
        let u = self.velocity();
        for i in 0..self.grid.n() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid.centers()[i].as_f64(),
                self.r[i].as_f64(),
                self.ru[i].as_f64(),
                u[i].as_f64()
            )?;
        }
        Ok(())
    }
}

fn vacuum_floor<T: Real>(r: &[T]) -> T {
    let max = r.iter().copied().fold(T::zero(), T::max);
    T::lit(VACUUM_RATIO) * max
}

fn velocity<T: Real>(r: &[T], ru: &[T], floor: T) -> Vec<T> {
    r.iter()
        .zip(ru)
        .map(|(&r, &m)| {
            if r > floor && r > T::zero() {
                m / r
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Density and velocity samples in physical variables on the abscissa `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalProfile<T> {
    pub x: Vec<T>,
    pub rho: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Real> PhysicalProfile<T> {
    pub fn from_fn<FR: Fn(T) -> T, FU: Fn(T) -> T>(x: Vec<T>, rho: FR, u: FU) -> Self {
        let r = x.iter().map(|&x| rho(x)).collect();
        let v = x.iter().map(|&x| u(x)).collect();
        Self { x, rho: r, u: v }
    }

    /// `||rho||_{L1}` by the trapezoidal rule.
    pub fn mass(&self) -> T {
        let half = T::lit(0.5);
        self.x
            .windows(2)
            .zip(self.rho.windows(2))
            .map(|(x, r)| (x[1] - x[0]) * half * (r[0] + r[1]))
            .sum()
    }
}

/// `theta` for initial data of mass `mass`: `mass / sqrt(pi)`.
pub fn theta_for_mass<T: Real>(mass: T) -> T {
    mass / T::PI().sqrt()
}

/// Pulls physical fields into the rescaled frame at time `t`:
/// `R(y) = tau rho(tau y) / theta`, `U(y) = tau u(tau y) - tau' tau y`,
/// by linear interpolation (`rho = 0` outside the sampled range).
pub fn to_rescaled<T: Real>(
    profile: &PhysicalProfile<T>,
    traj: &TauTrajectory<T>,
    t: T,
    theta: T,
    grid: &Grid1D<T>,
    model: Model<T>,
) -> Result<FluidState1D<T>> {
    let (tau, taudot) = traj.tau_at(t)?;
    let last = profile.u.last().copied().unwrap_or(T::zero());
    let first = profile.u.first().copied().unwrap_or(T::zero());
    let r = grid.sample(|y| {
        let rho = interpolate_linear(&profile.x, &profile.rho, tau * y, T::zero());
        (tau * rho / theta).max(T::zero())
    });
    let u = grid.sample(|y| {
        let x = tau * y;
        let ux = if x < profile.x[0] {
            first
        } else if x > profile.x[profile.x.len() - 1] {
            last
        } else {
            interpolate_linear(&profile.x, &profile.u, x, T::zero())
        };
        tau * ux - taudot * tau * y
    });
    FluidState1D::from_profiles(t, grid.clone(), r, &u, theta, model)
}

/// Inverse of [`to_rescaled`], sampled at `x_i = tau y_i`.
pub fn to_physical<T: Real>(
    state: &FluidState1D<T>,
    traj: &TauTrajectory<T>,
) -> Result<PhysicalProfile<T>> {
    let (tau, taudot) = traj.tau_at(state.t)?;
    let u = state.velocity();
    let y = state.grid.centers();
    Ok(PhysicalProfile {
        x: y.iter().map(|&y| tau * y).collect(),
        rho: state.r.iter().map(|&r| state.theta * r / tau).collect(),
        u: y.iter()
            .zip(&u)
            .map(|(&y, &u)| u / tau + taudot * y)
            .collect(),
    })
}

struct Frame<T> {
    tau: T,
    taudot: T,
}

/// Pressure flux `Pi(R)` and the squared sound speed `Pi'(R)`.
fn pressure_flux<T: Real>(state: &FluidState1D<T>, f: &Frame<T>, r: T) -> (T, T) {
    let law = &state.model.law;
    let visc = state.model.nu * f.taudot / f.tau;
    let sigma = state.theta * r / f.tau;
    let pi = f.tau / state.theta * law.pressure(sigma) + visc * r;
    let c2 = law.dpressure(sigma) + visc;
    (pi, c2.max(T::zero()))
}

pub(crate) fn minmod<T: Real>(a: T, b: T) -> T {
    if a * b <= T::zero() {
        T::zero()
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

pub(crate) fn pad<T: Real>(v: &[T]) -> Vec<T> {
    let n = v.len();
    let mut out = Vec::with_capacity(n + 2 * GHOSTS);
    out.extend(std::iter::repeat_n(v[0], GHOSTS));
    out.extend_from_slice(v);
    out.extend(std::iter::repeat_n(v[n - 1], GHOSTS));
    out
}

/// Limited slopes of padded data (zero on the outermost ghosts).
pub(crate) fn slopes<T: Real>(p: &[T], recon: Reconstruction) -> Vec<T> {
    let mut s = vec![T::zero(); p.len()];
    if recon == Reconstruction::Minmod {
        for i in 1..p.len() - 1 {
            s[i] = minmod(p[i] - p[i - 1], p[i + 1] - p[i]);
        }
    }
    s
}

/// Time derivatives of `(R, RU)` and the net mass flux leaving the domain.
fn rhs<T: Real>(state: &FluidState1D<T>, r: &[T], m: &[T], f: &Frame<T>) -> (Vec<T>, Vec<T>, T) {
    let n = r.len();
    let dy = state.grid.dy();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let inv_tau2 = (f.tau * f.tau).recip();
    let floor = vacuum_floor(r);
    let u = velocity(r, m, floor);

    let rp = pad(r);
    let up = pad(&u);
    let sr = slopes(&rp, state.scheme.reconstruction);
    let su = slopes(&up, state.scheme.reconstruction);

    let physical_flux = |rr: T, uu: T| -> (T, T, T) {
        let (pi, c2) = pressure_flux(state, f, rr);
        let mm = rr * uu;
        (
            mm * inv_tau2,
            mm * uu * inv_tau2 + pi,
            uu.abs() * inv_tau2 + c2.sqrt() / f.tau,
        )
    };

    // face k sits between padded cells k+1 and k+2, i.e. between cells k-1 and k
    let mut flux_r = vec![T::zero(); n + 1];
    let mut flux_m = vec![T::zero(); n + 1];
    for k in 0..=n {
        let (a, b) = (k + GHOSTS - 1, k + GHOSTS);
        let rl = (rp[a] + half * sr[a]).max(T::zero());
        let rr = (rp[b] - half * sr[b]).max(T::zero());
        let ul = up[a] + half * su[a];
        let ur = up[b] - half * su[b];
        let (fl0, fl1, sl) = physical_flux(rl, ul);
        let (fr0, fr1, sr_) = physical_flux(rr, ur);
        let speed = sl.max(sr_);
        flux_r[k] = half * (fl0 + fr0) - half * speed * (rr - rl);
        flux_m[k] = half * (fl1 + fr1) - half * speed * (rr * ur - rl * ul);
    }

    let eps2 = state.model.eps * state.model.eps;
    if eps2 > T::zero() {
        let sq: Vec<T> = rp.iter().map(|v| v.max(T::zero()).sqrt()).collect();
        let coef = eps2 * half * inv_tau2;
        for k in 0..=n {
            let (a, b) = (k + GHOSTS - 1, k + GHOSTS);
            let r2 = (rp[b + 1] - rp[b] - rp[a] + rp[a - 1]) / (two * dy * dy);
            let ds = (sq[b] - sq[a]) / dy;
            let s_k = half * r2 - two * ds * ds;
            flux_m[k] = flux_m[k] - coef * s_k;
        }
    }

    let nu = state.model.nu;
    if nu > T::zero() {
        let coef = nu * inv_tau2;
        for k in 0..=n {
            let (a, b) = (k + GHOSTS - 1, k + GHOSTS);
            let r_face = half * (rp[a] + rp[b]);
            flux_m[k] = flux_m[k] - coef * r_face * (up[b] - up[a]) / dy;
        }
    }

    let kappa = state.model.kappa();
    let y = state.grid.centers();
    let mut dr = vec![T::zero(); n];
    let mut dm = vec![T::zero(); n];
    for i in 0..n {
        dr[i] = -(flux_r[i + 1] - flux_r[i]) / dy;
        dm[i] = -(flux_m[i + 1] - flux_m[i]) / dy - two * kappa * y[i] * r[i];
    }
    (dr, dm, flux_r[n] - flux_r[0])
}

/// Applies the vacuum treatment in place.
fn clean<T: Real>(r: &mut [T], m: &mut [T], t: T) -> Result<()> {
    let tol = T::lit(NEGATIVE_TOL);
    for (i, v) in r.iter_mut().enumerate() {
        if !v.is_finite() || *v < -tol {
            return Err(Error::NegativeDensity {
                cell: i,
                value: v.as_f64(),
                t: t.as_f64(),
            });
        }
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    let floor = vacuum_floor(r);
    for (mv, &rv) in m.iter_mut().zip(r.iter()) {
        if rv <= floor {
            *mv = T::zero();
        }
    }
    Ok(())
}

/// Largest admissible step at the current state.
pub fn stable_dt<T: Real>(state: &FluidState1D<T>, traj: &TauTrajectory<T>) -> Result<T> {
    let (tau, taudot) = traj.tau_at(state.t)?;
    Ok(stable_dt_at(state, &Frame { tau, taudot }))
}

fn stable_dt_at<T: Real>(state: &FluidState1D<T>, f: &Frame<T>) -> T {
    let dy = state.grid.dy();
    let tau2 = f.tau * f.tau;
    let u = state.velocity();
    let mut lambda = T::zero();
    for (&r, &u) in state.r.iter().zip(&u) {
        let (_, c2) = pressure_flux(state, f, r);
        lambda = lambda.max(u.abs() / tau2 + c2.sqrt() / f.tau);
    }
    let mut dt = if lambda > T::zero() {
        state.scheme.cfl * dy / lambda
    } else {
        T::infinity()
    };
    let nu = state.model.nu;
    if nu > T::zero() {
        // R-weighted diffusion coefficient of the velocity equation
        let floor = state.vacuum_floor();
        let n = state.r.len();
        let mut weight = T::one();
        for i in 0..n {
            let r = state.r[i];
            if r > floor && r > T::zero() {
                let rl = state.r[i.saturating_sub(1)];
                let rr = state.r[(i + 1).min(n - 1)];
                weight = weight.max((rl + T::lit(2.0) * r + rr) / (T::lit(4.0) * r));
            }
        }
        dt = dt.min(dy * dy * tau2 / (T::lit(2.0) * nu * weight));
    }
    let eps = state.model.eps;
    if eps > T::zero() {
        dt = dt.min(T::lit(BOHM_DT_FACTOR) * dy * dy * tau2 / eps);
    }
    dt
}

/// One SSP-RK2 step of size `dt`.
pub fn step<T: Real>(
    state: &FluidState1D<T>,
    traj: &TauTrajectory<T>,
    dt: T,
) -> Result<FluidState1D<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "time step must be > 0, got {dt}"
        )));
    }
    let (tau0, taudot0) = traj.tau_at(state.t)?;
    let f0 = Frame {
        tau: tau0,
        taudot: taudot0,
    };
    let limit = stable_dt_at(state, &f0);
    if dt > limit * (T::one() + T::lit(1e-9)) {
        return Err(Error::CflViolation {
            dt: dt.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let t1 = state.t + dt;
    let (tau1, taudot1) = traj.tau_at(t1)?;
    let f1 = Frame {
        tau: tau1,
        taudot: taudot1,
    };
    let half = T::lit(0.5);

    let (dr0, dm0, out0) = rhs(state, &state.r, &state.ru, &f0);
    let mut r1: Vec<T> = state
        .r
        .iter()
        .zip(&dr0)
        .map(|(&r, &d)| r + dt * d)
        .collect();
    let mut m1: Vec<T> = state
        .ru
        .iter()
        .zip(&dm0)
        .map(|(&m, &d)| m + dt * d)
        .collect();
    clean(&mut r1, &mut m1, t1)?;

    let (dr1, dm1, out1) = rhs(state, &r1, &m1, &f1);
    let mut r2: Vec<T> = (0..r1.len())
        .map(|i| half * (state.r[i] + r1[i] + dt * dr1[i]))
        .collect();
    let mut m2: Vec<T> = (0..m1.len())
        .map(|i| half * (state.ru[i] + m1[i] + dt * dm1[i]))
        .collect();
    clean(&mut r2, &mut m2, t1)?;

    Ok(FluidState1D {
        t: t1,
        grid: state.grid.clone(),
        r: r2,
        ru: m2,
        theta: state.theta,
        model: state.model.clone(),
        scheme: state.scheme,
        mass_outflow: state.mass_outflow + half * dt * (out0 + out1),
    })
}

/// Observation times of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Cadence<T> {
    /// Every `interval` after the start.
    Every(T),
    /// `first, first*factor, first*factor^2, ...` (absolute times).
    Geometric { first: T, factor: T },
    /// Explicit increasing list of absolute times.
    At(Vec<T>),
}

impl<T: Real> Cadence<T> {
    fn next_after(&self, start: T, t: T) -> Option<T> {
        match self {
            Cadence::Every(dt) => {
                if !(*dt > T::zero()) {
                    return None;
                }
                let k = ((t - start) / *dt + T::lit(1e-9)).floor() + T::one();
                Some(start + k * *dt)
            }
            Cadence::Geometric { first, factor } => {
                if !(*first > T::zero()) || !(*factor > T::one()) {
                    return None;
                }
                let mut s = *first;
                while s <= t * (T::one() + T::lit(1e-12)) {
                    s = s * *factor;
                }
                Some(s)
            }
            Cadence::At(times) => times
                .iter()
                .copied()
                .find(|&s| s > t * (T::one() + T::lit(1e-12)) && s > t),
        }
    }
}

/// Receives the state and its diagnostics at every observation time.
pub trait Observer<T> {
    fn observe(&mut self, state: &FluidState1D<T>, record: &DiagnosticsRecord<T>) -> Result<()>;
}

impl<T: Real> Observer<T> for Vec<DiagnosticsRecord<T>> {
    fn observe(&mut self, _state: &FluidState1D<T>, record: &DiagnosticsRecord<T>) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

/// Observer that keeps records and full states.
#[derive(Debug, Clone, Default)]
pub struct History<T> {
    pub records: Vec<DiagnosticsRecord<T>>,
    pub states: Vec<FluidState1D<T>>,
}

impl<T: Real> Observer<T> for History<T> {
    fn observe(&mut self, state: &FluidState1D<T>, record: &DiagnosticsRecord<T>) -> Result<()> {
        self.records.push(record.clone());
        self.states.push(state.clone());
        Ok(())
    }
}

/// Advances to `t_end` with [`stable_dt`] steps, shortened to land exactly on
/// observation times and on `t_end`. The initial state and the final state are
/// always observed.
pub fn run<T: Real, O: Observer<T> + ?Sized>(
    initial: FluidState1D<T>,
    traj: &TauTrajectory<T>,
    t_end: T,
    cadence: &Cadence<T>,
    observer: &mut O,
) -> Result<FluidState1D<T>> {
    if t_end < initial.t {
        return Err(Error::InvalidParams(format!(
            "t_end = {t_end} precedes the initial time {}",
            initial.t
        )));
    }
    if t_end > traj.t_end() {
        return Err(Error::OutOfRange {
            t: t_end.as_f64(),
            t_max: traj.t_end().as_f64(),
        });
    }
    let start = initial.t;
    let mut state = initial;
    observer.observe(&state, &diagnostics::record(&state, traj)?)?;
    let mut next_obs = cadence.next_after(start, state.t);
    while state.t < t_end {
        let mut dt = stable_dt(&state, traj)?;
        let mut target = t_end;
        if let Some(obs) = next_obs {
            // observation times within rounding of t_end merge with the final one
            if obs < t_end - T::lit(1e-9) * t_end.abs().max(T::one()) {
                target = obs;
            }
        }
        let landing = state.t + dt >= target * (T::one() - T::epsilon());
        if landing {
            dt = target - state.t;
        }
        state = step(&state, traj, dt)?;
        if landing {
            state.t = target;
            if state.t < t_end {
                observer.observe(&state, &diagnostics::record(&state, traj)?)?;
                next_obs = cadence.next_after(start, state.t);
            }
        }
    }
    if t_end > start {
        observer.observe(&state, &diagnostics::record(&state, traj)?)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling_ode::{integrate_tau, TauParams};

    fn setup(n: usize) -> (FluidState1D<f64>, TauTrajectory<f64>) {
        let law = PressureLaw::isothermal(1.0).unwrap();
        let grid = Grid1D::new(10.0, n).unwrap();
        let s = FluidState1D::from_fn(
            0.0,
            grid,
            |y: f64| (-y * y).exp(),
            |_| 0.0,
            1.0,
            Model::euler(law),
        )
        .unwrap();
        let traj = integrate_tau(TauParams::rescaling(1.0), 200.0, 1e-10).unwrap();
        (s, traj)
    }

    #[test]
    fn vacuum_is_fixed() {
        let (s, traj) = setup(64);
        let mut v = s.clone();
        v.r.iter_mut().for_each(|r| *r = 0.0);
        v.ru.iter_mut().for_each(|m| *m = 0.0);
        let dt = stable_dt(&v, &traj).unwrap();
        let w = step(&v, &traj, dt).unwrap();
        assert!(w.r.iter().all(|&r| r == 0.0));
        assert!(w.ru.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn uniform_state_feels_only_confinement() {
        let (s, traj) = setup(64);
        let mut u = s.clone();
        u.r.iter_mut().for_each(|r| *r = 0.5);
        u.ru.iter_mut().for_each(|m| *m = 0.0);
        let dt = 1e-4;
        let w = step(&u, &traj, dt).unwrap();
        for (i, &y) in w.grid.centers().iter().enumerate() {
            let expected = -2.0 * y * 0.5 * dt;
            assert!(
                (w.ru[i] - expected).abs() < dt * dt * (1.0 + y * y),
                "cell {i}: {} vs {expected}",
                w.ru[i]
            );
        }
    }

    #[test]
    fn stable_dt_formula_and_scaling() {
        let (s, traj) = setup(64);
        let mut u = s.clone();
        u.r.iter_mut().for_each(|r| *r = 1.0);
        u.ru.iter_mut().for_each(|m| *m = 0.0);
        let dt = stable_dt(&u, &traj).unwrap();
        assert!((dt - 0.4 * u.grid.dy()).abs() < 1e-15);
        let (s2, _) = setup(128);
        let ratio = stable_dt(&s, &traj).unwrap() / stable_dt(&s2, &traj).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bohm_bound_is_parabolic() {
        let law = PressureLaw::isothermal(1.0).unwrap();
        let traj = integrate_tau(TauParams::rescaling(1.0), 1.0, 1e-10).unwrap();
        let dts: Vec<f64> = [256, 512]
            .iter()
            .map(|&n| {
                let g = Grid1D::new(10.0, n).unwrap();
                let m = Model::new(law.clone(), 1.0, 0.0).unwrap();
                let s = FluidState1D::from_fn(0.0, g, |y: f64| (-y * y).exp(), |_| 0.0, 1.0, m)
                    .unwrap();
                stable_dt(&s, &traj).unwrap()
            })
            .collect();
        assert!((dts[0] / dts[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_oversized_step() {
        let (s, traj) = setup(64);
        let dt = stable_dt(&s, &traj).unwrap();
        assert!(matches!(
            step(&s, &traj, 2.0 * dt),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn mass_balance_is_exact() {
        let (s, traj) = setup(128);
        let m0 = s.mass();
        let mut st = s;
        for _ in 0..50 {
            let dt = stable_dt(&st, &traj).unwrap();
            st = step(&st, &traj, dt).unwrap();
        }
        assert!((st.mass() + st.mass_outflow - m0).abs() < 1e-13 * m0);
    }

    #[test]
    fn rescaling_roundtrip() {
        let (_, traj) = setup(64);
        let grid = Grid1D::new(10.0, 400).unwrap();
        let law = PressureLaw::isothermal(1.0).unwrap();
        let t = 3.0;
        let (tau, taudot) = traj.tau_at(t).unwrap();
        let theta = 2.0;
        let x: Vec<f64> = (0..4001).map(|i| -60.0 + 0.03 * i as f64).collect();
        let prof = PhysicalProfile::from_fn(
            x,
            |x| theta * (-(x / tau).powi(2)).exp() / tau,
            |x| taudot / tau * x,
        );
        let s = to_rescaled(&prof, &traj, t, theta, &grid, Model::euler(law)).unwrap();
        for (i, &y) in grid.centers().iter().enumerate() {
            assert!((s.r[i] - (-y * y).exp()).abs() < 1e-4);
            assert!(s.ru[i].abs() < 1e-9);
        }
        let back = to_physical(&s, &traj).unwrap();
        for i in 0..back.x.len() {
            let x = back.x[i];
            assert!((back.rho[i] - theta * (-(x / tau).powi(2)).exp() / tau).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_length_run_observes_once() {
        let (s, traj) = setup(64);
        let mut recs: Vec<DiagnosticsRecord<f64>> = Vec::new();
        let out = run(s.clone(), &traj, 0.0, &Cadence::Every(0.1), &mut recs).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(out.r, s.r);
    }
}
