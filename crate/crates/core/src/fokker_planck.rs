//! Reference solver for `R_s = R_yy + 2 (y R)_y`, whose steady states are
//! multiples of `Gamma(y) = exp(-y^2)`.
//!
//! Conservative discretisation with face fluxes `J = R_y + 2 y R`, zero-gradient
//! ghost cells as in the rescaled solver, SSP-RK2 in time.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct FPState<T> {
    pub s: T,
    pub grid: Grid1D<T>,
    pub r: Vec<T>,
    /// Net mass that has entered through the boundaries.
    pub boundary_inflow: T,
}

impl<T: Real> FPState<T> {
    pub fn new(s: T, grid: Grid1D<T>, r: Vec<T>) -> Result<Self> {
        if r.len() != grid.n() {
            return Err(Error::InvalidParams(format!(
                "expected {} cells, got {}",
                grid.n(),
                r.len()
            )));
        }
        if r.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::InvalidParams("density must be >= 0".into()));
        }
        Ok(Self {
            s,
            grid,
            r,
            boundary_inflow: T::zero(),
        })
    }

    pub fn from_fn<F: Fn(T) -> T>(s: T, grid: Grid1D<T>, f: F) -> Result<Self> {
        let r = grid.sample(f);
        Self::new(s, grid, r)
    }

    pub fn mass(&self) -> T {
        self.grid.integrate(&self.r)
    }

    /// `(mean, variance)` of `R / ∫R`.
    pub fn mean_variance(&self) -> (T, T) {
        let m = self.mass();
        let mean = self.grid.integrate_with(&self.r, |y, r| y * r) / m;
        let var = self
            .grid
            .integrate_with(&self.r, |y, r| (y - mean) * (y - mean) * r)
            / m;
        (mean, var)
    }
}

/// Largest stable step `dy^2 / (2 (1 + L dy))` of the explicit scheme.
pub fn fp_stable_ds<T: Real>(grid: &Grid1D<T>) -> T {
    let dy = grid.dy();
    dy * dy / (T::lit(2.0) * (T::one() + grid.half_width() * dy))
}

/// Discrete operator `L_h R` and the boundary flux balance `J(L) - J(-L)`.
pub fn fp_operator<T: Real>(grid: &Grid1D<T>, r: &[T]) -> (Vec<T>, T) {
    let n = r.len();
    let dy = grid.dy();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    // face k between cells k-1 and k, ghosts copy the edge cells
    let flux = |k: usize| -> T {
        let a = r[k.saturating_sub(1)];
        let b = r[k.min(n - 1)];
        (b - a) / dy + two * grid.face(k) * half * (a + b)
    };
    let fluxes: Vec<T> = (0..=n).map(flux).collect();
    let out = (0..n).map(|i| (fluxes[i + 1] - fluxes[i]) / dy).collect();
    (out, fluxes[n] - fluxes[0])
}

/// One SSP-RK2 step.
pub fn fp_step<T: Real>(state: &FPState<T>, ds: T) -> Result<FPState<T>> {
    let limit = fp_stable_ds(&state.grid);
    if !(ds > T::zero()) || ds > limit * (T::one() + T::lit(1e-9)) {
        return Err(Error::StabilityViolation {
            ds: ds.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let half = T::lit(0.5);
    let (l0, b0) = fp_operator(&state.grid, &state.r);
    let r1: Vec<T> = state.r.iter().zip(&l0).map(|(&r, &l)| r + ds * l).collect();
    let (l1, b1) = fp_operator(&state.grid, &r1);
    let r2: Vec<T> = (0..r1.len())
        .map(|i| half * (state.r[i] + r1[i] + ds * l1[i]))
        .collect();
    Ok(FPState {
        s: state.s + ds,
        grid: state.grid.clone(),
        r: r2,
        boundary_inflow: state.boundary_inflow + half * ds * (b0 + b1),
    })
}

/// One observation of a relaxation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPRecord<T> {
    pub s: T,
    pub mass: T,
    pub mean: T,
    pub variance: T,
    /// `||R - Gamma'||_{L1}` with `Gamma'` the mass-matched Gaussian.
    pub l1_to_gamma: T,
    /// `∫R ln(R / Gamma')`.
    pub relative_entropy: T,
}

impl<T: Real> FPRecord<T> {
    pub const CSV_HEADER: &'static str = "s,mass,mean,variance,l1_to_gamma,relative_entropy";

    pub fn of(state: &FPState<T>) -> Self {
        let g = &state.grid;
        let mass = state.mass();
        let gamma = g.sample(|y| (-y * y).exp());
        let scale = mass / g.integrate(&gamma);
        let mut l1 = T::zero();
        let mut relent = T::zero();
        for (&r, &gm) in state.r.iter().zip(&gamma) {
            let gm = gm * scale;
            l1 = l1 + (r - gm).abs();
            if r > T::zero() && gm > T::zero() {
                relent = relent + r * (r / gm).ln();
            }
        }
        let (mean, variance) = state.mean_variance();
        Self {
            s: state.s,
            mass,
            mean,
            variance,
            l1_to_gamma: l1 * g.dy(),
            relative_entropy: relent * g.dy(),
        }
    }

    pub fn csv_row(&self) -> String {
        [
            self.s,
            self.mass,
            self.mean,
            self.variance,
            self.l1_to_gamma,
            self.relative_entropy,
        ]
        .iter()
        .map(|v| format!("{:.16e}", v.as_f64()))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Evolves to `s_end` with the largest stable step, recording every `every`
/// (and at both ends).
pub fn fp_relax<T: Real>(
    initial: FPState<T>,
    s_end: T,
    every: T,
    sink: &mut Vec<FPRecord<T>>,
) -> Result<FPState<T>> {
    if !(s_end > initial.s) {
        return Err(Error::InvalidParams(format!(
            "s_end = {s_end} must exceed s = {}",
            initial.s
        )));
    }
    if !(every > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "observation interval must be > 0, got {every}"
        )));
    }
    let ds_max = fp_stable_ds(&initial.grid);
    let start = initial.s;
    let mut state = initial;
    sink.push(FPRecord::of(&state));
    let mut k = 1usize;
    loop {
        let next = (start + T::from_count(k) * every).min(s_end);
        while state.s < next {
            let ds = (next - state.s).min(ds_max);
            state = fp_step(&state, ds)?;
            if next - state.s < T::lit(1e-12) * next.abs().max(T::one()) {
                state.s = next;
            }
        }
        sink.push(FPRecord::of(&state));
        if next >= s_end {
            return Ok(state);
        }
        k += 1;
    }
}
