//! Scenario execution and output files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use disperse_core::diagnostics::{write_csv, DiagnosticsRecord};
use disperse_core::fokker_planck::{fp_operator, fp_relax, FPRecord, FPState};
use disperse_core::gaussian::{pde_residual, GaussianFlow, GaussianParams};
use disperse_core::grid::Grid1D;
use disperse_core::isentropic::{
    isentropic_run, profile_contrast, IsentropicConfig, IsentropicState,
};
use disperse_core::rescaled_solver::{
    run, theta_for_mass, to_rescaled, FluidState1D, History, Model, PhysicalProfile, Scheme,
};
use disperse_core::scaling_ode::{integrate_tau, tau_asymptote, TauParams, TauTrajectory};
use disperse_core::Error;

use crate::config::{Bump, InitialSpec, ProfileShape, Scenario, ScenarioConfig};
use crate::summary::{Bound, Summary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{scenario}: {source}")]
    Numerical { scenario: Scenario, source: Error },
    #[error("{scenario}: {message}")]
    Input { scenario: Scenario, message: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 2 for bad input, 3 for numerical failures and unwritable output.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Input { .. } => 2,
            RunError::Numerical {
                source: Error::InvalidParams(_) | Error::InvalidRegime(_),
                ..
            } => 2,
            _ => 3,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    out: &'a Path,
    summary: Summary,
}

impl Ctx<'_> {
    fn num<T>(&self, r: disperse_core::Result<T>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Numerical {
            scenario: self.cfg.scenario,
            source,
        })
    }

    fn tol(&self, v: Option<f64>, default: f64) -> f64 {
        v.unwrap_or(default)
    }

    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<(), RunError> {
        let path = self.out.join(name);
        let io_err = |source| RunError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        f(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
        self.summary.outputs.push(name.to_string());
        Ok(())
    }
}

fn frame_name(prefix: &str, t: f64) -> String {
    format!("{prefix}{t:.6}.csv")
}

/// Runs the scenario, writes every output into `out` and returns the summary.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<Summary, RunError> {
    std::fs::create_dir_all(out).map_err(|source| RunError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut ctx = Ctx {
        cfg,
        out,
        summary: Summary::new(cfg.scenario.name()),
    };
    match cfg.scenario {
        Scenario::TauStudy => tau_study(&mut ctx)?,
        Scenario::GaussianOracle => gaussian_oracle(&mut ctx)?,
        Scenario::RescaledRun => rescaled_run(&mut ctx)?,
        Scenario::FokkerPlanck => fokker_planck(&mut ctx)?,
        Scenario::IsentropicContrast => isentropic_contrast(&mut ctx)?,
    }
    ctx.summary.outputs.push("summary.txt".into());
    ctx.summary.outputs.push("summary.json".into());
    ctx.summary.save(out).map_err(|source| RunError::Io {
        path: out.join("summary.txt"),
        source,
    })?;
    Ok(ctx.summary)
}

fn ode_tol(ctx: &Ctx) -> f64 {
    ctx.tol(ctx.cfg.tolerances.ode_rel_tol, 1e-12)
}

fn tau_study(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let m = &cfg.model;
    let params = ctx.num(TauParams::new(
        cfg.tau_alpha,
        cfg.tau_beta,
        m.kappa,
        m.eps,
        m.nu,
    ))?;
    let traj = ctx.num(integrate_tau(params, cfg.horizon, ode_tol(ctx)))?;
    ctx.write("diagnostics.csv", |w| {
        writeln!(w, "t,tau,taudot,Q,first_integral")?;
        for i in 0..traj.len() {
            let inv = traj.first_integral(i).map_err(io::Error::other)?;
            let (t, tau, td, q) = (
                traj.times()[i],
                traj.tau()[i],
                traj.taudot()[i],
                traj.dissipation()[i],
            );
            writeln!(w, "{t:.16e},{tau:.16e},{td:.16e},{q:.16e},{inv:.16e}")?;
        }
        Ok(())
    })?;

    let drift = traj.first_integral_drift();
    let tol = ctx.tol(cfg.tolerances.first_integral_drift, 1e-8);
    ctx.summary
        .verdict("scaling_ode.first_integral", drift, Bound::Below, tol);
    let min_tau = traj.tau().iter().copied().fold(f64::INFINITY, f64::min);
    ctx.summary.verdict(
        "scaling_ode.positivity",
        min_tau,
        Bound::AtLeast,
        params.positivity_floor() * (1.0 - 1e-9),
    );
    let last = traj.last();
    ctx.summary.metric("tau_end", last.tau);
    ctx.summary.metric("taudot_end", last.taudot);
    let mut errors = Vec::new();
    for &t in &cfg.tau_checkpoints {
        let (tau, _) = ctx.num(traj.tau_at(t))?;
        let (asym, _) = ctx.num(tau_asymptote(m.kappa, t))?;
        ctx.summary
            .metric(&format!("asymptote_ratio@{t:e}"), tau / asym);
        errors.push((tau / asym - 1.0).abs());
    }
    if let Some(&e) = errors.last() {
        ctx.summary
            .verdict("scaling_ode.asymptote", e, Bound::Below, 0.25);
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
        ctx.summary.metric(
            "asymptote_error_decreasing",
            if decreasing { 1.0 } else { 0.0 },
        );
    }
    Ok(())
}

/// Density and velocity of the initial data as functions of `x`.
fn sample_initial(
    ctx: &Ctx,
    spec: &InitialSpec,
    x: &[f64],
) -> Result<PhysicalProfile<f64>, RunError> {
    match spec {
        InitialSpec::Gaussian(g) => {
            let p = gaussian_params(ctx, g);
            let state = ctx.num(disperse_core::gaussian::evolve_gaussian(&p, 0.0, 1e-12))?;
            Ok(PhysicalProfile::from_fn(
                x.to_vec(),
                |x| state.density_at(&[x]),
                |x| state.velocity_at(&[x])[0],
            ))
        }
        InitialSpec::Profile { shape, u0, u1 } => {
            let bumps: Vec<Bump> = match shape {
                ProfileShape::Gamma => vec![Bump {
                    amplitude: 1.0,
                    center: 0.0,
                    width: 1.0,
                }],
                ProfileShape::DoubleBump => {
                    let a = 0.5f64.sqrt();
                    let w = 0.5f64.sqrt();
                    vec![
                        Bump {
                            amplitude: a,
                            center: -1.0,
                            width: w,
                        },
                        Bump {
                            amplitude: a,
                            center: 1.0,
                            width: w,
                        },
                    ]
                }
                ProfileShape::Bumps(b) => b.clone(),
            };
            let rho = |x: f64| {
                bumps
                    .iter()
                    .map(|b| b.amplitude * (-((x - b.center) / b.width).powi(2)).exp())
                    .sum()
            };
            Ok(PhysicalProfile::from_fn(x.to_vec(), rho, |x| u0 + u1 * x))
        }
        InitialSpec::File(path) => read_profile(ctx, path),
    }
}

fn read_profile(ctx: &Ctx, path: &Path) -> Result<PhysicalProfile<f64>, RunError> {
    let bad = |message: String| RunError::Input {
        scenario: ctx.cfg.scenario,
        message,
    };
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| bad(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| bad(format!("{}: missing column `{name}`", path.display())))
    };
    let (ix, ir, iu) = (col("x")?, col("rho")?, col("u")?);
    let mut p = PhysicalProfile {
        x: Vec::new(),
        rho: Vec::new(),
        u: Vec::new(),
    };
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<f64, RunError> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| {
                    bad(format!(
                        "{}: row {}: not a number",
                        path.display(),
                        line + 2
                    ))
                })
        };
        p.x.push(field(ix)?);
        p.rho.push(field(ir)?);
        p.u.push(field(iu)?);
    }
    if p.x.len() < 2 || p.x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(bad(format!(
            "{}: x must be strictly increasing with at least two rows",
            path.display()
        )));
    }
    if p.rho.iter().any(|r| !(*r >= 0.0)) {
        return Err(bad(format!("{}: rho must be >= 0", path.display())));
    }
    Ok(p)
}

fn gaussian_params(ctx: &Ctx, g: &crate::config::GaussianSpec) -> GaussianParams<f64> {
    let m = &ctx.cfg.model;
    GaussianParams {
        b0: g.b0,
        alpha0: g.alpha0.clone(),
        beta0: g.beta0.clone(),
        c0: g.c0.clone(),
        kappa: m.kappa,
        eps: m.eps,
        nu: m.nu,
    }
}

fn grid(ctx: &Ctx) -> Result<Grid1D<f64>, RunError> {
    ctx.num(Grid1D::new(ctx.cfg.grid.half_width, ctx.cfg.grid.n))
}

fn model(ctx: &Ctx) -> Result<Model<f64>, RunError> {
    let m = &ctx.cfg.model;
    let law = ctx.num(m.law())?;
    ctx.num(Model::new(law, m.eps, m.nu))
}

fn scheme(ctx: &Ctx) -> Scheme<f64> {
    Scheme {
        cfl: ctx.cfg.grid.cfl,
        reconstruction: ctx.cfg.grid.reconstruction,
    }
}

fn rescaling(ctx: &Ctx, t_end: f64) -> Result<TauTrajectory<f64>, RunError> {
    ctx.num(integrate_tau(
        TauParams::rescaling(ctx.cfg.model.kappa),
        t_end,
        ode_tol(ctx),
    ))
}

fn write_history(ctx: &mut Ctx, hist: &History<f64>) -> Result<(), RunError> {
    let records = hist.records.clone();
    ctx.write("diagnostics.csv", |w| write_csv(&records, w))?;
    if ctx.cfg.write_frames {
        for s in &hist.states {
            ctx.write(&frame_name("frame_", s.t), |w| s.write_frame_csv(w))?;
        }
    }
    Ok(())
}

fn ck_verdict(ctx: &mut Ctx, records: &[DiagnosticsRecord<f64>]) {
    let worst = records
        .iter()
        .map(|r| r.ck_lhs - r.ck_rhs)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = ctx.tol(ctx.cfg.tolerances.ck_slack, 1e-12);
    ctx.summary
        .verdict("diagnostics.csiszar_kullback", worst, Bound::AtMost, slack);
}

fn gaussian_oracle(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let Some(InitialSpec::Gaussian(spec)) = &cfg.initial else {
        return Err(RunError::Input {
            scenario: cfg.scenario,
            message: "initial data must be a Gaussian".into(),
        });
    };
    let params = gaussian_params(ctx, spec);
    let t_end = cfg.horizon;
    let tol = &cfg.tolerances;

    let h = ctx.tol(tol.residual_step, 0.02);
    let coarse = ctx.num(pde_residual(&params, t_end, h))?;
    let fine = ctx.num(pde_residual(&params, t_end, h / 2.0))?;
    let (lo, hi) = (
        ctx.tol(tol.order_ratio_min, 3.5),
        ctx.tol(tol.order_ratio_max, 4.5),
    );
    for (name, c, f) in [
        ("mass", coarse.mass, fine.mass),
        ("momentum", coarse.momentum, fine.momentum),
    ] {
        ctx.summary.metric(&format!("residual_{name}_h"), c);
        ctx.summary.metric(&format!("residual_{name}_h/2"), f);
        let ratio = c / f;
        ctx.summary.verdict(
            &format!("gaussian_explicit.pde_residual_order.{name}"),
            ratio,
            Bound::AtLeast,
            lo,
        );
        ctx.summary.verdict(
            &format!("gaussian_explicit.pde_residual_order.{name}"),
            ratio,
            Bound::AtMost,
            hi,
        );
    }

    let flow = ctx.num(GaussianFlow::new(params.clone(), t_end, ode_tol(ctx)))?;
    let cadence = cfg.observe.cadence();
    let oracle_times: Vec<f64> = {
        let mut v = vec![0.0];
        let mut t = 0.0;
        while let Some(next) = next_time(&cadence, t, t_end) {
            v.push(next);
            t = next;
        }
        v
    };
    let d = params.dim();
    let mut rows = Vec::new();
    for &t in &oracle_times {
        rows.push(ctx.num(flow.state(t))?.csv_row());
    }
    ctx.write("oracle.csv", |w| {
        writeln!(
            w,
            "{}",
            disperse_core::gaussian::GaussianState::<f64>::csv_header(d)
        )?;
        rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    if d != 1 {
        ctx.summary.metric("dimension", d as f64);
        return Ok(());
    }

    let traj = rescaling(ctx, t_end)?;
    let theta = theta_for_mass(params.mass());
    let model = model(ctx)?;
    let exact_on = |ctx: &Ctx, grid: &Grid1D<f64>, t: f64| -> Result<FluidState1D<f64>, RunError> {
        let g = ctx.num(flow.state(t))?;
        let (tau, _) = ctx.num(traj.tau_at(t))?;
        let x: Vec<f64> = grid.centers().iter().map(|&y| tau * y).collect();
        let p = PhysicalProfile::from_fn(x, |x| g.density_at(&[x]), |x| g.velocity_at(&[x])[0]);
        ctx.num(to_rescaled(&p, &traj, t, theta, grid, model.clone()))
    };
    let mut errors = [0.0; 2];
    let mut fine_history = History::default();
    for (k, n) in [cfg.grid.n, 2 * cfg.grid.n].into_iter().enumerate() {
        let grid = ctx.num(Grid1D::new(cfg.grid.half_width, n))?;
        let init = exact_on(ctx, &grid, 0.0)?.with_scheme(scheme(ctx));
        let exact = exact_on(ctx, &grid, t_end)?;
        let mut hist = History::default();
        let fin = ctx.num(run(init, &traj, t_end, &cadence, &mut hist))?;
        let diff: Vec<f64> = fin
            .r
            .iter()
            .zip(&exact.r)
            .map(|(a, b)| (a - b).abs())
            .collect();
        errors[k] = grid.integrate(&diff) / exact.mass();
        ctx.summary.metric(&format!("l1_error_n{n}"), errors[k]);
        if k == 1 {
            fine_history = hist;
        }
    }
    let ratio = errors[0] / errors[1];
    ctx.summary.metric("observed_order", ratio.log2());
    ctx.summary.verdict(
        "rescaled_solver.refinement_ratio",
        ratio,
        Bound::AtLeast,
        ctx.tol(tol.refinement_ratio, 1.8),
    );
    ctx.summary.verdict(
        "rescaled_solver.oracle_error",
        errors[1],
        Bound::Below,
        ctx.tol(tol.oracle_error, 5e-3),
    );
    ck_verdict(ctx, &fine_history.records);
    write_history(ctx, &fine_history)
}

/// Next observation strictly after `t`, capped at `t_end`.
fn next_time(c: &disperse_core::rescaled_solver::Cadence<f64>, t: f64, t_end: f64) -> Option<f64> {
    use disperse_core::rescaled_solver::Cadence;
    if t >= t_end * (1.0 - 1e-12) {
        return None;
    }
    let next = match c {
        Cadence::Every(dt) => (((t / dt) + 1e-9).floor() + 1.0) * dt,
        Cadence::Geometric { first, factor } => {
            let mut s = *first;
            while s <= t * (1.0 + 1e-12) {
                s *= factor;
            }
            s
        }
        Cadence::At(times) => times.iter().copied().find(|&s| s > t).unwrap_or(t_end),
    };
    Some(if next > t_end * (1.0 - 1e-9) {
        t_end
    } else {
        next
    })
}

fn rescaled_run(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let t_end = cfg.horizon;
    let grid = grid(ctx)?;
    let traj = rescaling(ctx, t_end)?;
    let spec = cfg.initial.as_ref().expect("validated");
    let profile = sample_initial(ctx, spec, grid.centers())?;
    let mass = grid.integrate(&profile.rho);
    if !(mass > 0.0) {
        return Err(RunError::Input {
            scenario: cfg.scenario,
            message: "initial density has zero mass on the grid".into(),
        });
    }
    let init = ctx
        .num(to_rescaled(
            &profile,
            &traj,
            0.0,
            theta_for_mass(mass),
            &grid,
            model(ctx)?,
        ))?
        .with_scheme(scheme(ctx));
    let mut hist = History::default();
    ctx.num(run(init, &traj, t_end, &cfg.observe.cadence(), &mut hist))?;
    let recs = &hist.records;
    let (first, last) = (&recs[0], &recs[recs.len() - 1]);

    ck_verdict(ctx, recs);
    let drift = recs
        .iter()
        .map(|r| (r.mass + r.mass_outflow - first.mass).abs())
        .fold(0.0, f64::max)
        / first.mass;
    ctx.summary.verdict(
        "rescaled_solver.mass_balance",
        drift,
        Bound::AtMost,
        ctx.tol(cfg.tolerances.mass_drift, 1e-10),
    );
    let scale = recs
        .iter()
        .fold(0.0f64, |m, r| m.max(r.pseudo_energy.abs()));
    let rise = recs
        .windows(2)
        .map(|w| w[1].pseudo_energy - w[0].pseudo_energy)
        .fold(f64::NEG_INFINITY, f64::max);
    let rel = if scale > 0.0 {
        rise.max(0.0) / scale
    } else {
        0.0
    };
    ctx.summary.verdict(
        "diagnostics.pseudo_energy_monotone",
        rel,
        Bound::AtMost,
        ctx.tol(cfg.tolerances.energy_slack, 1e-3),
    );
    if cfg.mellet_vasseur {
        let finite =
            recs.iter().filter(|r| r.mellet_vasseur.is_finite()).count() as f64 / recs.len() as f64;
        ctx.summary.verdict(
            "diagnostics.mellet_vasseur_finite",
            finite,
            Bound::AtLeast,
            1.0,
        );
        ctx.summary
            .metric("mellet_vasseur_end", last.mellet_vasseur);
    }
    ctx.summary.metric("theta", hist.states[0].theta);
    ctx.summary.metric("l1_to_gamma_initial", first.l1_to_gamma);
    ctx.summary.metric("l1_to_gamma_final", last.l1_to_gamma);
    ctx.summary
        .metric("second_moment_ratio_final", last.second_moment / last.mass);
    ctx.summary
        .metric("relative_entropy_final", last.relative_entropy);
    ctx.summary.metric("w2_final", last.w2);
    ctx.summary.metric("mass_outflow", last.mass_outflow);
    write_history(ctx, &hist)
}

fn fokker_planck(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let grid = grid(ctx)?;
    let spec = cfg.initial.as_ref().expect("validated");
    let profile = sample_initial(ctx, spec, grid.centers())?;
    let mut state = ctx.num(FPState::new(0.0, grid.clone(), profile.rho))?;
    let every = match cfg.observe {
        crate::config::ObserveSpec::Every(e) => e,
        _ => unreachable!("validated"),
    };
    let mut records = vec![FPRecord::of(&state)];
    let mut frames = vec![state.clone()];
    let mut k = 1;
    while state.s < cfg.horizon {
        let next = (k as f64 * every).min(cfg.horizon);
        let mut tmp = Vec::new();
        state = ctx.num(fp_relax(state, next, next, &mut tmp))?;
        records.push(*tmp.last().expect("fp_relax records the end state"));
        frames.push(state.clone());
        k += 1;
    }
    ctx.write("diagnostics.csv", |w| {
        writeln!(w, "{}", FPRecord::<f64>::CSV_HEADER)?;
        records
            .iter()
            .try_for_each(|r| writeln!(w, "{}", r.csv_row()))
    })?;
    if cfg.write_frames {
        for f in &frames {
            ctx.write(&frame_name("frame_", f.s), |w| {
                writeln!(w, "y,R")?;
                f.grid
                    .centers()
                    .iter()
                    .zip(&f.r)
                    .try_for_each(|(y, r)| writeln!(w, "{y:.16e},{r:.16e}"))
            })?;
        }
    }

    let (first, last) = (&records[0], &records[records.len() - 1]);
    let balance = (state.mass() - first.mass - state.boundary_inflow).abs() / first.mass;
    ctx.summary.verdict(
        "fokker_planck.mass_balance",
        balance,
        Bound::AtMost,
        ctx.tol(cfg.tolerances.mass_drift, 1e-10),
    );
    let scale = records
        .iter()
        .fold(0.0f64, |m, r| m.max(r.relative_entropy.abs()));
    let rise = records
        .windows(2)
        .map(|w| w[1].relative_entropy - w[0].relative_entropy)
        .fold(f64::NEG_INFINITY, f64::max);
    let rel = if scale > 0.0 {
        rise.max(0.0) / scale
    } else {
        0.0
    };
    ctx.summary.verdict(
        "fokker_planck.relative_entropy_monotone",
        rel,
        Bound::AtMost,
        ctx.tol(cfg.tolerances.energy_slack, 1e-3),
    );
    let residual = |n: usize| -> Result<f64, RunError> {
        let g = ctx.num(Grid1D::new(cfg.grid.half_width, n))?;
        let gamma = g.sample(|y: f64| (-y * y).exp());
        Ok(fp_operator(&g, &gamma)
            .0
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs())))
    };
    let ratio = residual(cfg.grid.n)? / residual(2 * cfg.grid.n)?;
    let (lo, hi) = (
        ctx.tol(cfg.tolerances.order_ratio_min, 3.5),
        ctx.tol(cfg.tolerances.order_ratio_max, 4.5),
    );
    ctx.summary.verdict(
        "fokker_planck.stationarity_order",
        ratio,
        Bound::AtLeast,
        lo,
    );
    ctx.summary
        .verdict("fokker_planck.stationarity_order", ratio, Bound::AtMost, hi);
    ctx.summary.metric("l1_to_gamma_initial", first.l1_to_gamma);
    ctx.summary.metric("l1_to_gamma_final", last.l1_to_gamma);
    ctx.summary
        .metric("relative_entropy_final", last.relative_entropy);
    ctx.summary.metric("variance_final", last.variance);
    ctx.summary.metric("mean_final", last.mean);
    // half the log-slope of the relative entropy over the second half of the run
    let tail: Vec<&FPRecord<f64>> = records
        .iter()
        .filter(|r| r.s >= cfg.horizon / 2.0 && r.relative_entropy > 0.0)
        .collect();
    if tail.len() >= 2 {
        let (a, b) = (tail[0], tail[tail.len() - 1]);
        let rate = -(b.relative_entropy.ln() - a.relative_entropy.ln()) / (b.s - a.s) / 2.0;
        ctx.summary.metric("entropy_decay_rate_half", rate);
    }
    Ok(())
}

fn isentropic_contrast(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let grid = grid(ctx)?;
    let (sa, sb) = cfg.contrast.as_ref().expect("validated");
    let a = sample_initial(ctx, sa, grid.centers())?;
    let b = sample_initial(ctx, sb, grid.centers())?;
    let gamma = cfg.model.gamma.expect("validated");
    let mut icfg = ctx.num(IsentropicConfig::new(gamma, cfg.model.kappa, grid.clone()))?;
    icfg.sigma_end = cfg.horizon;
    icfg.cfl = cfg.grid.cfl;
    icfg.reconstruction = cfg.grid.reconstruction;
    let peak = a.rho.iter().chain(&b.rho).copied().fold(0.0f64, f64::max);
    ctx.summary.metric("peak_amplitude", peak);
    ctx.summary.metric(
        "small_data",
        if peak <= disperse_core::isentropic::SMALL_AMPLITUDE {
            1.0
        } else {
            0.0
        },
    );

    let rep = ctx.num(profile_contrast(
        &icfg,
        (&a.rho, &a.u),
        (&b.rho, &b.u),
        cfg.isothermal_t_end,
    ))?;
    ctx.write("diagnostics.csv", |w| {
        writeln!(
            w,
            "gamma,exponent,sigma_end,dist_init,dist_final_isentropic,w2_final_isentropic,max_r_tilde,\
isothermal_t_end,isothermal_initial_a,isothermal_final_a,isothermal_initial_b,isothermal_final_b"
        )?;
        let row = [
            gamma,
            rep.exponent,
            cfg.horizon,
            rep.dist_init,
            rep.dist_final_isentropic,
            rep.w2_final_isentropic,
            rep.max_r_tilde,
            cfg.isothermal_t_end,
            rep.isothermal_initial[0],
            rep.isothermal_final[0],
            rep.isothermal_initial[1],
            rep.isothermal_final[1],
        ];
        writeln!(w, "{}", row.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(","))
    })?;
    if cfg.write_frames {
        for (label, p) in [("a", &a), ("b", &b)] {
            let init = ctx.num(IsentropicState::from_profiles(0.0, p.rho.clone(), &p.u))?;
            let end = ctx.num(isentropic_run(&icfg, init))?.state;
            let u = end.velocity();
            ctx.write(&frame_name(&format!("frame_{label}_"), end.sigma), |w| {
                writeln!(w, "y,R,RU,U")?;
                for i in 0..grid.n() {
                    writeln!(
                        w,
                        "{:.16e},{:.16e},{:.16e},{:.16e}",
                        grid.centers()[i],
                        end.r[i],
                        end.ru[i],
                        u[i]
                    )?;
                }
                Ok(())
            })?;
        }
    }
    let kept = rep.dist_final_isentropic / rep.dist_init;
    ctx.summary.metric("exponent", rep.exponent);
    ctx.summary.verdict(
        "isentropic.contrast_keep_fraction",
        kept,
        Bound::AtLeast,
        ctx.tol(cfg.tolerances.keep_fraction, 0.5),
    );
    let halving = ctx.tol(cfg.tolerances.halving, 0.5);
    for (k, label) in ["a", "b"].iter().enumerate() {
        let shrink = rep.isothermal_final[k] / rep.isothermal_initial[k];
        ctx.summary.verdict(
            &format!("isentropic.isothermal_attraction.{label}"),
            shrink,
            Bound::AtMost,
            halving,
        );
    }
    Ok(())
}
