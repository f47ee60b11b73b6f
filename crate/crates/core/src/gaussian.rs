//! Exact Gaussian solutions of the isothermal Euler, Korteweg and quantum
//! Navier–Stokes systems
//!
//! ```text
//! rho = b(t) exp(-sum_j alpha_j(t) (x_j - xbar_j(t))^2),   u_j = beta_j(t) x_j + c_j(t)
//! ```
//!
//! Each direction reduces to a scaling ODE `tau_j` with `tau_j(0) = 1`,
//! `tau_j'(0) = beta0_j`, and
//!
//! ```text
//! tau_j'' = 2 kappa alpha0_j / tau_j + eps^2 alpha0_j^2 / tau_j^3 - 2 nu alpha0_j tau_j' / tau_j^2.
//! ```

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaling_ode::{integrate_tau, TauParams, TauTrajectory};

/// Initial data and model coefficients. The dimension is `alpha0.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams<T> {
    pub b0: T,
    pub alpha0: Vec<T>,
    pub beta0: Vec<T>,
    pub c0: Vec<T>,
    pub kappa: T,
    pub eps: T,
    pub nu: T,
}

impl<T: Real> GaussianParams<T> {
    /// One-dimensional data.
    pub fn one_d(b0: T, alpha0: T, beta0: T, c0: T, kappa: T, eps: T, nu: T) -> Self {
        Self {
            b0,
            alpha0: vec![alpha0],
            beta0: vec![beta0],
            c0: vec![c0],
            kappa,
            eps,
            nu,
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be >= 1".into()));
        }
        if self.beta0.len() != d || self.c0.len() != d {
            return Err(Error::InvalidParams(format!(
                "alpha0, beta0, c0 must have equal lengths, got {}, {}, {}",
                d,
                self.beta0.len(),
                self.c0.len()
            )));
        }
        if !(self.b0 > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "b0 must be > 0, got {}",
                self.b0
            )));
        }
        if let Some(a) = self.alpha0.iter().find(|a| !(**a > T::zero())) {
            return Err(Error::InvalidParams(format!(
                "alpha0 entries must be > 0, got {a}"
            )));
        }
        if !(self.kappa > T::zero()) || self.eps < T::zero() || self.nu < T::zero() {
            return Err(Error::InvalidParams(
                "need kappa > 0, eps >= 0, nu >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Scaling ODE governing direction `j`.
    pub fn direction_params(&self, j: usize) -> TauParams<T> {
        let a = self.alpha0[j];
        TauParams {
            alpha: T::one(),
            beta: self.beta0[j],
            kappa: self.kappa * a,
            eps: self.eps * a,
            nu: T::lit(2.0) * self.nu * a,
        }
    }

    /// `b0 prod_j sqrt(pi / alpha0_j)`.
    pub fn mass(&self) -> T {
        self.alpha0
            .iter()
            .fold(self.b0, |m, &a| m * (T::PI() / a).sqrt())
    }
}

/// Parameters of the Gaussian at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T> {
    pub t: T,
    pub b: T,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub xbar: Vec<T>,
    pub c: Vec<T>,
    pub tauj: Vec<T>,
    pub taujdot: Vec<T>,
}

impl<T: Real> GaussianState<T> {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn density_at(&self, x: &[T]) -> T {
        let q = (0..self.dim()).fold(T::zero(), |q, j| {
            let dx = x[j] - self.xbar[j];
            q + self.alpha[j] * dx * dx
        });
        self.b * (-q).exp()
    }

    pub fn velocity_at(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|j| self.beta[j] * x[j] + self.c[j])
            .collect()
    }

    pub fn mass(&self) -> T {
        self.alpha
            .iter()
            .fold(self.b, |m, &a| m * (T::PI() / a).sqrt())
    }

    /// Standard deviation `(2 alpha_j)^{-1/2}` of the density along axis `j`.
    pub fn sigma(&self, j: usize) -> T {
        (T::lit(2.0) * self.alpha[j]).sqrt().recip()
    }

    pub fn csv_header(d: usize) -> String {
        let mut cols = vec!["t".to_string(), "b".to_string()];
        for name in ["alpha", "beta", "xbar", "c"] {
            cols.extend((1..=d).map(|j| format!("{name}_{j}")));
        }
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut vals = vec![self.t, self.b];
        for v in [&self.alpha, &self.beta, &self.xbar, &self.c] {
            vals.extend(v.iter().copied());
        }
        vals.iter()
            .map(|v| format!("{:.16e}", v.as_f64()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-direction trajectories up to `t_max`, queried for states at any `t <= t_max`.
#[derive(Debug, Clone)]
pub struct GaussianFlow<T> {
    params: GaussianParams<T>,
    trajectories: Vec<TauTrajectory<T>>,
}

impl<T: Real> GaussianFlow<T> {
    pub fn new(params: GaussianParams<T>, t_max: T, rel_tol: T) -> Result<Self> {
        params.validate()?;
        let t_max = if t_max > T::zero() {
            t_max
        } else {
            T::lit(1e-12)
        };
        let trajectories = (0..params.dim())
            .map(|j| integrate_tau(params.direction_params(j), t_max, rel_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            trajectories,
        })
    }

    pub fn params(&self) -> &GaussianParams<T> {
        &self.params
    }

    pub fn trajectory(&self, j: usize) -> &TauTrajectory<T> {
        &self.trajectories[j]
    }

    pub fn t_max(&self) -> T {
        self.trajectories[0].t_end()
    }

    pub fn state(&self, t: T) -> Result<GaussianState<T>> {
        let p = &self.params;
        let d = p.dim();
        let mut st = GaussianState {
            t,
            b: p.b0,
            alpha: Vec::with_capacity(d),
            beta: Vec::with_capacity(d),
            xbar: Vec::with_capacity(d),
            c: Vec::with_capacity(d),
            tauj: Vec::with_capacity(d),
            taujdot: Vec::with_capacity(d),
        };
        for j in 0..d {
            let (tau, taudot) = self.trajectories[j].tau_at(t)?;
            st.b = st.b / tau;
            st.alpha.push(p.alpha0[j] / (tau * tau));
            st.beta.push(taudot / tau);
            st.xbar.push(p.c0[j] * t);
            st.c.push(p.c0[j] * (T::one() - taudot * t / tau));
            st.tauj.push(tau);
            st.taujdot.push(taudot);
        }
        Ok(st)
    }
}

/// Gaussian state at time `t`.
pub fn evolve_gaussian<T: Real>(
    params: &GaussianParams<T>,
    t: T,
    rel_tol: T,
) -> Result<GaussianState<T>> {
    if t < T::zero() {
        return Err(Error::DomainError(format!("time must be >= 0, got {t}")));
    }
    GaussianFlow::new(params.clone(), t, rel_tol)?.state(t)
}

/// Max-norm residuals of the continuity and momentum equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual<T> {
    pub mass: T,
    pub momentum: T,
}

/// Residuals of
///
/// ```text
/// rho_t + div(rho u) = 0
/// (rho u)_t + div(rho u⊗u) + kappa ∇rho = (eps^2/4) ∇Δrho - eps^2 div(∇√rho ⊗ ∇√rho) + nu div(rho Du)
/// ```
///
/// evaluated on the exact Gaussian with second-order central differences of
/// step `h` in space and time, over the box `xbar ± 6 sigma` sampled with
/// spacing `h`. For `t < h` the time derivative is a one-sided second-order
/// difference.
pub fn pde_residual<T: Real>(params: &GaussianParams<T>, t: T, h: T) -> Result<Residual<T>> {
    if !(h > T::zero()) || t < T::zero() {
        return Err(Error::DomainError(format!(
            "need h > 0 and t >= 0, got h={h}, t={t}"
        )));
    }
    let two = T::lit(2.0);
    let flow = GaussianFlow::new(params.clone(), t + two * h, T::lit(1e-12))?;
    let d = params.dim();
    let now = flow.state(t)?;
    let centered = t >= h;
    let times: [T; 3] = if centered {
        [t - h, t, t + h]
    } else {
        [t, t + h, t + two * h]
    };
    let states = [
        flow.state(times[0])?,
        flow.state(times[1])?,
        flow.state(times[2])?,
    ];
    let dt_of = |f: &dyn Fn(&GaussianState<T>) -> T| -> T {
        if centered {
            (f(&states[2]) - f(&states[0])) / (two * h)
        } else {
            (-T::lit(3.0) * f(&states[0]) + T::lit(4.0) * f(&states[1]) - f(&states[2])) / (two * h)
        }
    };

    let kappa = params.kappa;
    let eps2 = params.eps * params.eps;
    let nu = params.nu;
    let quarter = T::lit(0.25);

    let rho = |x: &[T]| now.density_at(x);
    let vel = |x: &[T], i: usize| now.beta[i] * x[i] + now.c[i];
    let sqrt_rho = |x: &[T]| now.density_at(x).sqrt();
    let lap_rho = |x: &[T]| (0..d).fold(T::zero(), |acc, k| acc + d2(&rho, x, k, h));

    let half_widths: Vec<usize> = (0..d)
        .map(|j| {
            (T::lit(6.0) * now.sigma(j) / h)
                .ceil()
                .to_usize()
                .unwrap_or(0)
                .max(1)
        })
        .collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![T::zero(); d];
    let mut res = Residual {
        mass: T::zero(),
        momentum: T::zero(),
    };
    loop {
        for j in 0..d {
            let k = T::from_count(idx[j]) - T::from_count(half_widths[j]);
            x[j] = now.xbar[j] + k * h;
        }

        let rho_t = dt_of(&|s: &GaussianState<T>| s.density_at(&x));
        let div_mass = (0..d).fold(T::zero(), |acc, j| {
            acc + d1(&|p: &[T]| rho(p) * vel(p, j), &x, j, h)
        });
        res.mass = res.mass.max((rho_t + div_mass).abs());

        for i in 0..d {
            let mom_t =
                dt_of(&|s: &GaussianState<T>| s.density_at(&x) * (s.beta[i] * x[i] + s.c[i]));
            let mut r = mom_t + kappa * d1(&rho, &x, i, h);
            for j in 0..d {
                r = r + d1(&|p: &[T]| rho(p) * vel(p, i) * vel(p, j), &x, j, h);
            }
            if eps2 > T::zero() {
                let grad_lap = d1(&lap_rho, &x, i, h);
                let mut div_tensor = T::zero();
                for j in 0..d {
                    let tensor = |p: &[T]| d1(&sqrt_rho, p, i, h) * d1(&sqrt_rho, p, j, h);
                    div_tensor = div_tensor + d1(&tensor, &x, j, h);
                }
                r = r - (eps2 * quarter * grad_lap - eps2 * div_tensor);
            }
            if nu > T::zero() {
                let mut div_visc = T::zero();
                for j in 0..d {
                    let strain = |p: &[T]| {
                        let dij = (d1(&|q: &[T]| vel(q, j), p, i, h)
                            + d1(&|q: &[T]| vel(q, i), p, j, h))
                            / two;
                        rho(p) * dij
                    };
                    div_visc = div_visc + d1(&strain, &x, j, h);
                }
                r = r - nu * div_visc;
            }
            res.momentum = res.momentum.max(r.abs());
        }

        // odometer over the tensor-product box
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(res);
            }
            idx[axis] += 1;
            if idx[axis] <= 2 * half_widths[axis] {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

fn shifted<T: Real>(x: &[T], j: usize, delta: T) -> Vec<T> {
    let mut y = x.to_vec();
    y[j] = y[j] + delta;
    y
}

fn d1<T: Real>(f: &dyn Fn(&[T]) -> T, x: &[T], j: usize, h: T) -> T {
    (f(&shifted(x, j, h)) - f(&shifted(x, j, -h))) / (T::lit(2.0) * h)
}

fn d2<T: Real>(f: &dyn Fn(&[T]) -> T, x: &[T], j: usize, h: T) -> T {
    (f(&shifted(x, j, h)) - T::lit(2.0) * f(x) + f(&shifted(x, j, -h))) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_d() -> GaussianParams<f64> {
        GaussianParams {
            b0: 1.0,
            alpha0: vec![1.0, 2.0],
            beta0: vec![0.3, -0.1],
            c0: vec![1.0, 0.0],
            kappa: 1.0,
            eps: 0.5,
            nu: 0.2,
        }
    }

    #[test]
    fn initial_state() {
        let p = two_d();
        let s = evolve_gaussian(&p, 0.0, 1e-10).unwrap();
        assert_eq!(s.b, p.b0);
        assert_eq!(s.alpha, p.alpha0);
        assert_eq!(s.beta, p.beta0);
        assert_eq!(s.xbar, vec![0.0, 0.0]);
        assert_eq!(s.c, p.c0);
    }

    #[test]
    fn state_invariants() {
        let p = two_d();
        let flow = GaussianFlow::new(p.clone(), 50.0, 1e-10).unwrap();
        for t in [0.5, 5.0, 50.0] {
            let s = flow.state(t).unwrap();
            assert_relative_eq!(
                s.b * s.tauj.iter().product::<f64>(),
                p.b0,
                max_relative = 1e-14
            );
            for j in 0..2 {
                assert_relative_eq!(
                    s.alpha[j] * s.tauj[j] * s.tauj[j],
                    p.alpha0[j],
                    max_relative = 1e-14
                );
                assert_eq!(s.xbar[j], p.c0[j] * t);
            }
            assert_relative_eq!(s.mass(), p.mass(), max_relative = 1e-12);
        }
    }

    #[test]
    fn density_and_velocity_basics() {
        let s = evolve_gaussian(&two_d(), 2.0, 1e-10).unwrap();
        assert_eq!(s.density_at(&s.xbar), s.b);
        assert!(s.density_at(&[1e3, -1e3]) == 0.0);
        assert_eq!(s.velocity_at(&[0.0, 0.0]), s.c);
    }

    #[test]
    fn reduces_to_scaling_ode() {
        let p = GaussianParams::one_d(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        let s = evolve_gaussian(&p, 3.0, 1e-10).unwrap();
        let traj = integrate_tau(TauParams::rescaling(1.0), 3.0, 1e-10).unwrap();
        assert_relative_eq!(s.tauj[0], traj.last().tau, max_relative = 1e-12);
        assert_eq!(s.xbar[0], 0.0);
        assert_eq!(s.c[0], 0.0);
    }

    #[test]
    fn residual_rejects_bad_step() {
        assert!(pde_residual(&two_d(), 1.0, 0.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = evolve_gaussian(&two_d(), 1.0, 1e-10).unwrap();
        assert_eq!(
            GaussianState::<f64>::csv_header(2),
            "t,b,alpha_1,alpha_2,beta_1,beta_2,xbar_1,xbar_2,c_1,c_2"
        );
        assert_eq!(s.csv_row().split(',').count(), 10);
    }
}
