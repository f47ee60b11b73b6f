//! Scenario configuration: TOML grammar, defaults and validation.
//!
//! ```toml
//! [model]
//! kappa = 1.0
//! eps = 0.0
//! nu = 0.0
//! d = 1
//! gamma = 1.5                 # isentropic-contrast only
//! [model.pressure]
//! kind = "isothermal"         # or "powers", "exponential"
//! powers = [{ coeff = 0.5, gamma = 2.0 }]
//!
//! [grid]
//! L = 10.0
//! n = 400
//! cfl = 0.4
//! reconstruction = "minmod"   # or "first-order"
//!
//! [horizon]
//! t_end = 10.0                # or s_end, sigma_end; isothermal_t_end for the contrast
//!
//! [initial]
//! kind = "profile"            # or "gaussian", "file"
//! ...
//!
//! [observe]
//! every = 0.5                 # or geometric_first + geometric_factor, or at = [...]
//!
//! [tolerances]
//! ck_slack = 1e-12
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use disperse_core::pressure::PressureLaw;
use disperse_core::rescaled_solver::{Cadence, Reconstruction, DEFAULT_CFL};

pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_CELLS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    TauStudy,
    GaussianOracle,
    RescaledRun,
    FokkerPlanck,
    IsentropicContrast,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::TauStudy,
        Scenario::GaussianOracle,
        Scenario::RescaledRun,
        Scenario::FokkerPlanck,
        Scenario::IsentropicContrast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TauStudy => "tau-study",
            Scenario::GaussianOracle => "gaussian-oracle",
            Scenario::RescaledRun => "rescaled-run",
            Scenario::FokkerPlanck => "fokker-planck",
            Scenario::IsentropicContrast => "isentropic-contrast",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Scenario::ALL.iter().map(|k| k.name()).collect();
                ConfigError::Parse(format!(
                    "unknown scenario `{s}` (expected one of: {})",
                    known.join(", ")
                ))
            })
    }
}

/// One violated precondition.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<FieldError>),
}

impl ConfigError {
    /// Field paths of a validation error.
    pub fn paths(&self) -> Vec<&str> {
        match self {
            ConfigError::Validation(errs) => errs.iter().map(|e| e.path.as_str()).collect(),
            ConfigError::Parse(_) => Vec::new(),
        }
    }
}

// raw file layout

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    horizon: RawHorizon,
    initial: Option<RawInitial>,
    #[serde(default)]
    tau: RawTau,
    contrast: Option<RawContrast>,
    #[serde(default)]
    observe: RawObserve,
    #[serde(default)]
    diagnostics: RawDiagnostics,
    #[serde(default)]
    tolerances: Tolerances,
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kappa: Option<f64>,
    eps: Option<f64>,
    nu: Option<f64>,
    d: Option<usize>,
    gamma: Option<f64>,
    pressure: Option<RawPressure>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPressure {
    kind: String,
    #[serde(default)]
    powers: Vec<PowerSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub coeff: f64,
    pub gamma: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "L")]
    half_width: Option<f64>,
    n: Option<usize>,
    cfl: Option<f64>,
    reconstruction: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHorizon {
    t_end: Option<f64>,
    s_end: Option<f64>,
    sigma_end: Option<f64>,
    isothermal_t_end: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTau {
    alpha: Option<f64>,
    beta: Option<f64>,
    checkpoints: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContrast {
    a: RawInitial,
    b: RawInitial,
}

/// Scalars are accepted for one-dimensional Gaussian data.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: String,
    // gaussian
    b0: Option<f64>,
    alpha0: Option<OneOrMany>,
    beta0: Option<OneOrMany>,
    c0: Option<OneOrMany>,
    // profile
    name: Option<String>,
    #[serde(default)]
    bumps: Vec<Bump>,
    u0: Option<f64>,
    u1: Option<f64>,
    // file
    path: Option<PathBuf>,
}

/// `amplitude * exp(-((x - center)/width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObserve {
    every: Option<f64>,
    geometric_first: Option<f64>,
    geometric_factor: Option<f64>,
    at: Option<Vec<f64>>,
    frames: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagnostics {
    mellet_vasseur: Option<bool>,
}

/// Verdict thresholds; unset entries take the scenario defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub ode_rel_tol: Option<f64>,
    pub first_integral_drift: Option<f64>,
    pub residual_step: Option<f64>,
    pub order_ratio_min: Option<f64>,
    pub order_ratio_max: Option<f64>,
    pub refinement_ratio: Option<f64>,
    pub oracle_error: Option<f64>,
    pub ck_slack: Option<f64>,
    pub mass_drift: Option<f64>,
    pub energy_slack: Option<f64>,
    pub keep_fraction: Option<f64>,
    pub halving: Option<f64>,
}

impl Tolerances {
    fn check(&self, errs: &mut Vec<FieldError>) {
        let fields = [
            ("ode_rel_tol", self.ode_rel_tol),
            ("first_integral_drift", self.first_integral_drift),
            ("residual_step", self.residual_step),
            ("order_ratio_min", self.order_ratio_min),
            ("order_ratio_max", self.order_ratio_max),
            ("refinement_ratio", self.refinement_ratio),
            ("oracle_error", self.oracle_error),
            ("ck_slack", self.ck_slack),
            ("mass_drift", self.mass_drift),
            ("energy_slack", self.energy_slack),
            ("keep_fraction", self.keep_fraction),
            ("halving", self.halving),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    push(
                        errs,
                        &format!("tolerances.{name}"),
                        format!("must be finite and >= 0, got {v}"),
                    );
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.order_ratio_min, self.order_ratio_max) {
            if lo > hi {
                push(
                    errs,
                    "tolerances.order_ratio_min",
                    format!("exceeds order_ratio_max ({lo} > {hi})"),
                );
            }
        }
    }
}

// validated configuration

#[derive(Debug, Clone, PartialEq)]
pub enum PressureSpec {
    Isothermal,
    Powers(Vec<PowerSpec>),
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kappa: f64,
    pub eps: f64,
    pub nu: f64,
    pub d: usize,
    pub gamma: Option<f64>,
    pub pressure: PressureSpec,
}

impl ModelSpec {
    pub fn law(&self) -> disperse_core::Result<PressureLaw<f64>> {
        match &self.pressure {
            PressureSpec::Isothermal => PressureLaw::isothermal(self.kappa),
            PressureSpec::Powers(p) => {
                let terms: Vec<(f64, f64)> = p.iter().map(|t| (t.coeff, t.gamma)).collect();
                PressureLaw::with_powers(self.kappa, &terms)
            }
            PressureSpec::Exponential => PressureLaw::exponential(self.kappa),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
    pub cfl: f64,
    pub reconstruction: Reconstruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub b0: f64,
    pub alpha0: Vec<f64>,
    pub beta0: Vec<f64>,
    pub c0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// `exp(-x^2)`.
    Gamma,
    /// Two bumps at `±1`, `exp(-2 (x ∓ 1)^2) / sqrt 2` each.
    DoubleBump,
    Bumps(Vec<Bump>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Gaussian(GaussianSpec),
    /// Density shape with velocity `u0 + u1 x`.
    Profile {
        shape: ProfileShape,
        u0: f64,
        u1: f64,
    },
    /// CSV with header `x,rho,u`.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObserveSpec {
    Every(f64),
    Geometric { first: f64, factor: f64 },
    At(Vec<f64>),
}

impl ObserveSpec {
    pub fn cadence(&self) -> Cadence<f64> {
        match self {
            ObserveSpec::Every(dt) => Cadence::Every(*dt),
            ObserveSpec::Geometric { first, factor } => Cadence::Geometric {
                first: *first,
                factor: *factor,
            },
            ObserveSpec::At(t) => Cadence::At(t.clone()),
        }
    }
}

/// Fully validated configuration of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub model: ModelSpec,
    pub grid: GridSpec,
    /// `t_end`, `s_end` or `sigma_end` depending on the scenario.
    pub horizon: f64,
    pub isothermal_t_end: f64,
    pub tau_alpha: f64,
    pub tau_beta: f64,
    pub tau_checkpoints: Vec<f64>,
    pub initial: Option<InitialSpec>,
    pub contrast: Option<(InitialSpec, InitialSpec)>,
    pub observe: ObserveSpec,
    pub write_frames: bool,
    pub mellet_vasseur: bool,
    pub tolerances: Tolerances,
    /// Output directory named in the file, if any.
    pub output: Option<PathBuf>,
}

fn push(errs: &mut Vec<FieldError>, path: &str, message: String) {
    errs.push(FieldError {
        path: path.to_string(),
        message,
    });
}

fn positive(errs: &mut Vec<FieldError>, path: &str, v: f64) {
    if !(v > 0.0) || !v.is_finite() {
        push(errs, path, format!("must be finite and > 0, got {v}"));
    }
}

fn nonnegative(errs: &mut Vec<FieldError>, path: &str, v: f64) {
    if !(v >= 0.0) || !v.is_finite() {
        push(errs, path, format!("must be finite and >= 0, got {v}"));
    }
}

/// Reads and validates `path`; relative file references resolve against its directory.
pub fn parse_config(path: &Path, scenario: Scenario) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_str(&text, scenario, base)
}

/// Parses configuration text; `base` anchors relative file paths.
pub fn parse_str(
    text: &str,
    scenario: Scenario,
    base: &Path,
) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if let Some(s) = &raw.scenario {
        let declared: Scenario = s.parse()?;
        if declared != scenario {
            return Err(ConfigError::Validation(vec![FieldError {
                path: "scenario".into(),
                message: format!("file declares `{declared}` but `{scenario}` was requested"),
            }]));
        }
    }
    validate(raw, scenario, base)
}

fn validate(
    raw: RawConfig,
    scenario: Scenario,
    base: &Path,
) -> Result<ScenarioConfig, ConfigError> {
    let mut errs = Vec::new();

    let m = raw.model;
    let kappa = m.kappa.unwrap_or(1.0);
    positive(&mut errs, "model.kappa", kappa);
    let eps = m.eps.unwrap_or(0.0);
    nonnegative(&mut errs, "model.eps", eps);
    let nu = m.nu.unwrap_or(0.0);
    nonnegative(&mut errs, "model.nu", nu);
    let d = m.d.unwrap_or(1);
    if d == 0 || d > 3 {
        push(&mut errs, "model.d", format!("must be 1, 2 or 3, got {d}"));
    } else if d != 1 && scenario != Scenario::GaussianOracle && scenario != Scenario::TauStudy {
        push(
            &mut errs,
            "model.d",
            format!("the {scenario} scenario is one-dimensional, got d = {d}"),
        );
    }
    let pressure = match m.pressure {
        None => PressureSpec::Isothermal,
        Some(p) => match p.kind.as_str() {
            "isothermal" => PressureSpec::Isothermal,
            "exponential" => PressureSpec::Exponential,
            "powers" => {
                if p.powers.is_empty() {
                    push(
                        &mut errs,
                        "model.pressure.powers",
                        "at least one term is required".into(),
                    );
                }
                for (j, t) in p.powers.iter().enumerate() {
                    positive(
                        &mut errs,
                        &format!("model.pressure.powers[{j}].coeff"),
                        t.coeff,
                    );
                    if !(t.gamma > 1.0) || !t.gamma.is_finite() {
                        push(
                            &mut errs,
                            &format!("model.pressure.powers[{j}].gamma"),
                            format!("must be > 1, got {}", t.gamma),
                        );
                    }
                }
                PressureSpec::Powers(p.powers)
            }
            other => {
                push(
                    &mut errs,
                    "model.pressure.kind",
                    format!("unknown pressure law `{other}` (expected isothermal, powers or exponential)"),
                );
                PressureSpec::Isothermal
            }
        },
    };
    if scenario == Scenario::GaussianOracle && pressure != PressureSpec::Isothermal {
        push(
            &mut errs,
            "model.pressure.kind",
            "the Gaussian oracle is exact only for the isothermal law".into(),
        );
    }
    let gamma = m.gamma;
    if scenario == Scenario::IsentropicContrast {
        match gamma {
            None => push(
                &mut errs,
                "model.gamma",
                "required for the isentropic contrast".into(),
            ),
            Some(g) if !(g > 1.0 && g <= 3.0) => push(
                &mut errs,
                "model.gamma",
                format!("must lie in (1, 3] for d = 1, got {g}"),
            ),
            _ => {}
        }
    }

    let g = raw.grid;
    let half_width = g.half_width.unwrap_or(DEFAULT_HALF_WIDTH);
    positive(&mut errs, "grid.L", half_width);
    let n = g.n.unwrap_or(DEFAULT_CELLS);
    if n < 16 || n % 2 != 0 {
        push(
            &mut errs,
            "grid.n",
            format!("must be even and >= 16, got {n}"),
        );
    }
    let cfl = g.cfl.unwrap_or(DEFAULT_CFL);
    if !(cfl > 0.0 && cfl <= 1.0) {
        push(
            &mut errs,
            "grid.cfl",
            format!("must lie in (0, 1], got {cfl}"),
        );
    }
    let reconstruction = match g.reconstruction.as_deref() {
        None | Some("minmod") => Reconstruction::Minmod,
        Some("first-order") => Reconstruction::FirstOrder,
        Some(other) => {
            push(
                &mut errs,
                "grid.reconstruction",
                format!("expected `minmod` or `first-order`, got `{other}`"),
            );
            Reconstruction::Minmod
        }
    };

    let h = raw.horizon;
    let (key, default) = match scenario {
        Scenario::TauStudy => ("t_end", 1e4),
        Scenario::GaussianOracle => ("t_end", 1.0),
        Scenario::RescaledRun => ("t_end", 10.0),
        Scenario::FokkerPlanck => ("s_end", 2.0),
        Scenario::IsentropicContrast => ("sigma_end", 0.99),
    };
    let given = match key {
        "t_end" => h.t_end,
        "s_end" => h.s_end,
        _ => h.sigma_end,
    };
    let horizon = given.unwrap_or(default);
    positive(&mut errs, &format!("horizon.{key}"), horizon);
    if scenario == Scenario::IsentropicContrast && horizon > 1.0 {
        push(
            &mut errs,
            "horizon.sigma_end",
            format!("must be <= 1, got {horizon}"),
        );
    }
    for (name, v) in [
        ("t_end", h.t_end),
        ("s_end", h.s_end),
        ("sigma_end", h.sigma_end),
    ] {
        if v.is_some() && name != key {
            push(
                &mut errs,
                &format!("horizon.{name}"),
                format!("not used by {scenario} (expected horizon.{key})"),
            );
        }
    }
    let isothermal_t_end = h.isothermal_t_end.unwrap_or(1e3);
    positive(&mut errs, "horizon.isothermal_t_end", isothermal_t_end);

    let tau_alpha = raw.tau.alpha.unwrap_or(1.0);
    positive(&mut errs, "tau.alpha", tau_alpha);
    let tau_beta = raw.tau.beta.unwrap_or(0.0);
    if !tau_beta.is_finite() {
        push(
            &mut errs,
            "tau.beta",
            format!("must be finite, got {tau_beta}"),
        );
    }
    let tau_checkpoints = raw.tau.checkpoints.unwrap_or_else(|| {
        let mut c = Vec::new();
        let mut t = 1e3;
        while t <= horizon * (1.0 + 1e-12) {
            c.push(t);
            t *= 10.0;
        }
        c
    });
    if scenario == Scenario::TauStudy {
        for (j, &t) in tau_checkpoints.iter().enumerate() {
            if !(t > std::f64::consts::E && t <= horizon) {
                push(
                    &mut errs,
                    &format!("tau.checkpoints[{j}]"),
                    format!("must lie in (e, t_end], got {t}"),
                );
            }
        }
    }

    let initial = match (scenario, raw.initial) {
        (Scenario::TauStudy | Scenario::IsentropicContrast, Some(_)) => {
            push(&mut errs, "initial", format!("not used by {scenario}"));
            None
        }
        (Scenario::TauStudy | Scenario::IsentropicContrast, None) => None,
        (_, None) => {
            push(&mut errs, "initial", "required".into());
            None
        }
        (_, Some(i)) => initial_spec(i, "initial", d, base, &mut errs),
    };
    if scenario == Scenario::GaussianOracle
        && !matches!(initial, Some(InitialSpec::Gaussian(_)) | None)
    {
        push(
            &mut errs,
            "initial.kind",
            "the Gaussian oracle needs kind = \"gaussian\"".into(),
        );
    }
    if matches!(scenario, Scenario::RescaledRun | Scenario::FokkerPlanck) {
        if let Some(InitialSpec::Gaussian(gs)) = &initial {
            if gs.alpha0.len() != 1 {
                push(
                    &mut errs,
                    "initial.alpha0",
                    "one-dimensional data required".into(),
                );
            }
        }
    }
    let contrast = match (scenario, raw.contrast) {
        (Scenario::IsentropicContrast, Some(c)) => {
            let a = initial_spec(c.a, "contrast.a", 1, base, &mut errs);
            let b = initial_spec(c.b, "contrast.b", 1, base, &mut errs);
            a.zip(b)
        }
        (Scenario::IsentropicContrast, None) => {
            push(
                &mut errs,
                "contrast",
                "required (tables contrast.a and contrast.b)".into(),
            );
            None
        }
        (_, Some(_)) => {
            push(&mut errs, "contrast", format!("not used by {scenario}"));
            None
        }
        (_, None) => None,
    };

    let o = raw.observe;
    let observe = match (o.every, o.geometric_first, o.geometric_factor, o.at) {
        (None, None, None, None) => ObserveSpec::Every(horizon / 20.0),
        (Some(e), None, None, None) => {
            positive(&mut errs, "observe.every", e);
            ObserveSpec::Every(e)
        }
        (None, Some(first), Some(factor), None) => {
            positive(&mut errs, "observe.geometric_first", first);
            if !(factor > 1.0) || !factor.is_finite() {
                push(
                    &mut errs,
                    "observe.geometric_factor",
                    format!("must be > 1, got {factor}"),
                );
            }
            ObserveSpec::Geometric { first, factor }
        }
        (None, None, None, Some(at)) => {
            if at.windows(2).any(|w| !(w[1] > w[0])) || at.iter().any(|t| !(*t > 0.0)) {
                push(
                    &mut errs,
                    "observe.at",
                    "must be positive and strictly increasing".into(),
                );
            }
            ObserveSpec::At(at)
        }
        _ => {
            push(
                &mut errs,
                "observe",
                "give exactly one of `every`, `geometric_first` + `geometric_factor`, or `at`"
                    .into(),
            );
            ObserveSpec::Every(horizon / 20.0)
        }
    };
    if scenario == Scenario::FokkerPlanck && !matches!(observe, ObserveSpec::Every(_)) {
        push(
            &mut errs,
            "observe",
            "the Fokker-Planck scenario supports `every` only".into(),
        );
    }

    let mellet_vasseur = raw.diagnostics.mellet_vasseur.unwrap_or(false);
    if mellet_vasseur {
        if scenario != Scenario::RescaledRun {
            push(
                &mut errs,
                "diagnostics.mellet_vasseur",
                format!("not available for {scenario}"),
            );
        } else if !(nu > 0.0) {
            push(
                &mut errs,
                "model.nu",
                format!("the Mellet-Vasseur functional needs nu > 0, got {nu}"),
            );
        } else if eps > nu {
            push(
                &mut errs,
                "model.eps",
                format!("the Mellet-Vasseur functional needs 0 <= eps <= nu, got eps = {eps} > nu = {nu}"),
            );
        }
    }

    raw.tolerances.check(&mut errs);
    if let Some(t) = raw.tolerances.ode_rel_tol {
        if !(t > 0.0 && t < 1e-2) {
            push(
                &mut errs,
                "tolerances.ode_rel_tol",
                format!("must lie in (0, 1e-2), got {t}"),
            );
        }
    }

    if !errs.is_empty() {
        return Err(ConfigError::Validation(errs));
    }
    Ok(ScenarioConfig {
        scenario,
        model: ModelSpec {
            kappa,
            eps,
            nu,
            d,
            gamma,
            pressure,
        },
        grid: GridSpec {
            half_width,
            n,
            cfl,
            reconstruction,
        },
        horizon,
        isothermal_t_end,
        tau_alpha,
        tau_beta,
        tau_checkpoints,
        initial,
        contrast,
        observe,
        write_frames: o.frames.unwrap_or(true),
        mellet_vasseur,
        tolerances: raw.tolerances,
        output: raw.output.map(|p| base.join(p)),
    })
}

fn initial_spec(
    raw: RawInitial,
    at: &str,
    d: usize,
    base: &Path,
    errs: &mut Vec<FieldError>,
) -> Option<InitialSpec> {
    let field = |name: &str| format!("{at}.{name}");
    let unused = |errs: &mut Vec<FieldError>, names: &[(&str, bool)]| {
        for (name, set) in names {
            if *set {
                push(
                    errs,
                    &field(name),
                    format!("not used by kind = \"{}\"", raw.kind),
                );
            }
        }
    };
    match raw.kind.as_str() {
        "gaussian" => {
            unused(
                errs,
                &[
                    ("name", raw.name.is_some()),
                    ("bumps", !raw.bumps.is_empty()),
                    ("u0", raw.u0.is_some()),
                    ("u1", raw.u1.is_some()),
                    ("path", raw.path.is_some()),
                ],
            );
            let b0 = raw.b0.unwrap_or(1.0);
            positive(errs, &field("b0"), b0);
            let alpha0 = raw
                .alpha0
                .map(OneOrMany::into_vec)
                .unwrap_or_else(|| vec![1.0; d]);
            let beta0 = raw
                .beta0
                .map(OneOrMany::into_vec)
                .unwrap_or_else(|| vec![0.0; d]);
            let c0 = raw
                .c0
                .map(OneOrMany::into_vec)
                .unwrap_or_else(|| vec![0.0; d]);
            for (name, v) in [("alpha0", &alpha0), ("beta0", &beta0), ("c0", &c0)] {
                if v.len() != d {
                    push(
                        errs,
                        &field(name),
                        format!("expected {d} entries (model.d), got {}", v.len()),
                    );
                }
                if v.iter().any(|x| !x.is_finite()) {
                    push(errs, &field(name), "entries must be finite".into());
                }
            }
            for (j, a) in alpha0.iter().enumerate() {
                if !(*a > 0.0) {
                    push(
                        errs,
                        &format!("{at}.alpha0[{j}]"),
                        format!("must be > 0, got {a}"),
                    );
                }
            }
            Some(InitialSpec::Gaussian(GaussianSpec {
                b0,
                alpha0,
                beta0,
                c0,
            }))
        }
        "profile" => {
            unused(
                errs,
                &[
                    ("b0", raw.b0.is_some()),
                    ("alpha0", raw.alpha0.is_some()),
                    ("beta0", raw.beta0.is_some()),
                    ("c0", raw.c0.is_some()),
                    ("path", raw.path.is_some()),
                ],
            );
            let shape = match raw.name.as_deref() {
                Some("gamma") => ProfileShape::Gamma,
                Some("double-bump") => ProfileShape::DoubleBump,
                Some("bumps") => {
                    if raw.bumps.is_empty() {
                        push(
                            errs,
                            &field("bumps"),
                            "at least one bump is required".into(),
                        );
                    }
                    for (j, b) in raw.bumps.iter().enumerate() {
                        positive(errs, &format!("{at}.bumps[{j}].amplitude"), b.amplitude);
                        positive(errs, &format!("{at}.bumps[{j}].width"), b.width);
                        if !b.center.is_finite() {
                            push(
                                errs,
                                &format!("{at}.bumps[{j}].center"),
                                "must be finite".into(),
                            );
                        }
                    }
                    ProfileShape::Bumps(raw.bumps.clone())
                }
                Some(other) => {
                    push(
                        errs,
                        &field("name"),
                        format!("unknown profile `{other}` (expected gamma, double-bump or bumps)"),
                    );
                    return None;
                }
                None => {
                    push(
                        errs,
                        &field("name"),
                        "required for kind = \"profile\"".into(),
                    );
                    return None;
                }
            };
            if !matches!(shape, ProfileShape::Bumps(_)) && !raw.bumps.is_empty() {
                push(
                    errs,
                    &field("bumps"),
                    "only used with name = \"bumps\"".into(),
                );
            }
            let u0 = raw.u0.unwrap_or(0.0);
            let u1 = raw.u1.unwrap_or(0.0);
            for (name, v) in [("u0", u0), ("u1", u1)] {
                if !v.is_finite() {
                    push(errs, &field(name), "must be finite".into());
                }
            }
            Some(InitialSpec::Profile { shape, u0, u1 })
        }
        "file" => {
            unused(
                errs,
                &[
                    ("b0", raw.b0.is_some()),
                    ("alpha0", raw.alpha0.is_some()),
                    ("name", raw.name.is_some()),
                    ("bumps", !raw.bumps.is_empty()),
                ],
            );
            match raw.path {
                Some(p) => {
                    let full = base.join(p);
                    if !full.is_file() {
                        push(
                            errs,
                            &field("path"),
                            format!("{} does not exist", full.display()),
                        );
                    }
                    Some(InitialSpec::File(full))
                }
                None => {
                    push(errs, &field("path"), "required for kind = \"file\"".into());
                    None
                }
            }
        }
        other => {
            push(
                errs,
                &field("kind"),
                format!("unknown initial data kind `{other}` (expected gaussian, profile or file)"),
            );
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, s: Scenario) -> Result<ScenarioConfig, ConfigError> {
        parse_str(text, s, Path::new("."))
    }

    const MINIMAL: &str = "[initial]\nkind = \"profile\"\nname = \"gamma\"\n";

    #[test]
    fn defaults_are_filled() {
        let c = parse(MINIMAL, Scenario::RescaledRun).unwrap();
        assert_eq!(c.grid.half_width, 10.0);
        assert_eq!(c.grid.n, 400);
        assert_eq!(c.grid.cfl, 0.4);
        assert_eq!(c.grid.reconstruction, Reconstruction::Minmod);
        assert_eq!(c.model.kappa, 1.0);
        assert_eq!(c.model.pressure, PressureSpec::Isothermal);
        assert_eq!(c.horizon, 10.0);
        assert_eq!(c.observe, ObserveSpec::Every(0.5));
    }

    #[test]
    fn negative_kappa_names_the_field() {
        let e = parse(
            &format!("[model]\nkappa = -1.0\n{MINIMAL}"),
            Scenario::RescaledRun,
        )
        .unwrap_err();
        assert_eq!(e.paths(), vec!["model.kappa"]);
    }

    #[test]
    fn every_violation_is_listed() {
        let text =
            format!("[model]\nkappa = -1.0\nnu = -2.0\n[grid]\nn = 15\ncfl = 2.0\n{MINIMAL}");
        let e = parse(&text, Scenario::RescaledRun).unwrap_err();
        assert_eq!(
            e.paths(),
            vec!["model.kappa", "model.nu", "grid.n", "grid.cfl"]
        );
    }

    #[test]
    fn mellet_vasseur_regime() {
        let text = format!(
            "[model]\neps = 2.0\nnu = 1.0\n[diagnostics]\nmellet_vasseur = true\n{MINIMAL}"
        );
        let e = parse(&text, Scenario::RescaledRun).unwrap_err();
        assert_eq!(e.paths(), vec!["model.eps"]);
        assert!(e.to_string().contains("eps <= nu"));
        let ok = format!(
            "[model]\neps = 0.5\nnu = 1.0\n[diagnostics]\nmellet_vasseur = true\n{MINIMAL}"
        );
        assert!(parse(&ok, Scenario::RescaledRun).unwrap().mellet_vasseur);
    }

    #[test]
    fn unknown_scenario_is_a_parse_error() {
        assert!(matches!(
            "shock-tube".parse::<Scenario>(),
            Err(ConfigError::Parse(_))
        ));
        let e = parse(
            &format!("scenario = \"shock-tube\"\n{MINIMAL}"),
            Scenario::RescaledRun,
        )
        .unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)));
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
    }

    #[test]
    fn unknown_keys_and_bad_toml_are_parse_errors() {
        let e = parse("[model]\nkapa = 1.0\n", Scenario::TauStudy).unwrap_err();
        assert!(
            matches!(e, ConfigError::Parse(ref m) if m.contains("kapa")),
            "{e}"
        );
        let e = parse("[model\nkappa = 1.0\n", Scenario::TauStudy).unwrap_err();
        assert!(
            matches!(e, ConfigError::Parse(ref m) if m.contains("line")),
            "{e}"
        );
    }

    #[test]
    fn gaussian_dimension_must_match() {
        let text = "[model]\nd = 2\n[initial]\nkind = \"gaussian\"\nalpha0 = [1.0]\n";
        let e = parse(text, Scenario::GaussianOracle).unwrap_err();
        assert!(e.paths().contains(&"initial.alpha0"));
        let text = "[model]\nd = 2\n[initial]\nkind = \"gaussian\"\nalpha0 = [1.0, 2.0]\n";
        let c = parse(text, Scenario::GaussianOracle).unwrap();
        assert!(
            matches!(c.initial, Some(InitialSpec::Gaussian(ref g)) if g.beta0 == vec![0.0, 0.0])
        );
    }

    #[test]
    fn isentropic_needs_gamma_and_pair() {
        let e = parse("", Scenario::IsentropicContrast).unwrap_err();
        assert_eq!(e.paths(), vec!["model.gamma", "contrast"]);
        let text = "[model]\ngamma = 3.5\n[contrast.a]\nkind = \"profile\"\nname = \"gamma\"\n[contrast.b]\nkind = \"profile\"\nname = \"double-bump\"\n";
        assert_eq!(
            parse(text, Scenario::IsentropicContrast)
                .unwrap_err()
                .paths(),
            vec!["model.gamma"]
        );
    }

    #[test]
    fn observe_forms() {
        let c = parse(
            &format!("[observe]\ngeometric_first = 0.1\ngeometric_factor = 2.0\n{MINIMAL}"),
            Scenario::RescaledRun,
        )
        .unwrap();
        assert_eq!(
            c.observe,
            ObserveSpec::Geometric {
                first: 0.1,
                factor: 2.0
            }
        );
        let e = parse(
            &format!("[observe]\nevery = 1.0\nat = [1.0]\n{MINIMAL}"),
            Scenario::RescaledRun,
        )
        .unwrap_err();
        assert_eq!(e.paths(), vec!["observe"]);
    }
}
