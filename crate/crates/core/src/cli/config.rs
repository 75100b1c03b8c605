//! Scenario files: TOML by default, JSON when the path ends in `.json` or
//! the text opens with `{`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cavity::CavitySpec;
use crate::linalg::ModeMatrix;
use crate::mirror::{MirrorCoefficients, PowerReflectance};
use crate::single_mode::{BasisState, SingleModeState, ZetaModulus, STATE_NORM_TOLERANCE};

/// A complex number written as `re` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A number or the word `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extended {
    Number(f64),
    Word(String),
}

impl Extended {
    fn modulus(&self, path: &str) -> Result<ZetaModulus, CliError> {
        match self {
            Extended::Number(z) if z.is_finite() && *z >= 0.0 => Ok(ZetaModulus::Finite(*z)),
            Extended::Number(z) => Err(CliError::config(path, format!("must be finite and >= 0, got {z}"))),
            Extended::Word(w) if w == "inf" => Ok(ZetaModulus::Infinite),
            Extended::Word(w) => Err(CliError::config(path, format!("expected a number or \"inf\", got {w:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Single,
    Continuous,
}

/// What a `sweep` row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// both coincidence ratios and the distribution of the configured state
    #[default]
    State,
    /// ratio of `C_RR = C_LL = z e^{iy} C_RL`
    Zeta,
    /// `z → 0` limit
    R0,
    /// `z → ∞` limit
    RInf,
    /// ratio at `x = πN`
    Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    #[serde(rename = "R", alias = "r")]
    R,
    X,
    Y,
    Z,
    Omega,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::R => "R",
            Variable::X => "x",
            Variable::Y => "y",
            Variable::Z => "z",
            Variable::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectance: Option<PowerReflectance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<ComplexInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub length_over_c: f64,
    /// both mirrors in the `r = −√R`, `t = i√(1−R)` convention
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectance: Option<PowerReflectance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror1: Option<MirrorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror2: Option<MirrorConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Gaussian,
    Lorentzian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub shape: Shape,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaConfig {
    #[serde(default)]
    pub y: f64,
    pub z: Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// symmetric `c_ij` in `K_ij(ω, ω′) = c_ij φ_i(ω) φ_j(ω′) h(ω + ω′)`
    pub coefficients: [[ComplexInput; 2]; 2],
    /// one shared profile or one per mode; defaults to the envelopes
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<ProfileConfig>,
    /// optional pump factor `h`, centred on the sum frequency
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<ProfileConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnePhotonConfig {
    pub right: ComplexInput,
    pub left: ComplexInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    /// `n+`, `n0` or `n-`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_rr: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_rl: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_ll: Option<ComplexInput>,
    /// rescale `(C_RR, C_RL, C_LL)` instead of rejecting an unnormalized triple
    #[serde(default, skip_serializing_if = "is_false")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_photon: Option<OnePhotonConfig>,
    /// spectral profile of a discrete state in continuous mode
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopesConfig {
    pub right: ProfileConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<ProfileConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Extended>,
    /// resonance order `N` in `x = πN`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
}

impl Parameters {
    fn is_empty(&self) -> bool {
        *self == Parameters::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxisConfig {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// include `stop` as the last point
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub endpoint: bool,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub quantity: Quantity,
    pub cavity: CavityConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelopes: Option<EnvelopesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Parameters::is_empty")]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxisConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Toml,
    Json,
}

impl SourceFormat {
    pub fn detect(path: Option<&str>, text: &str) -> Self {
        let json_path = path.is_some_and(|p| p.to_ascii_lowercase().ends_with(".json"));
        if json_path || text.trim_start().starts_with('{') {
            SourceFormat::Json
        } else {
            SourceFormat::Toml
        }
    }
}

fn path_error<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> CliError {
    let path = err.path().to_string();
    CliError::Config(if path == "." {
        err.inner().to_string().trim().to_string()
    } else {
        format!("{path}: {}", err.inner().to_string().trim())
    })
}

pub fn parse_config(text: &str, format: SourceFormat) -> Result<ScenarioConfig, CliError> {
    match format {
        SourceFormat::Json => {
            let de = &mut serde_json::Deserializer::from_str(text);
            serde_path_to_error::deserialize(de).map_err(path_error)
        }
        SourceFormat::Toml => {
            let de = toml::Deserializer::new(text);
            serde_path_to_error::deserialize(de).map_err(path_error)
        }
    }
}

pub fn render_config(config: &ScenarioConfig, format: SourceFormat) -> Result<String, CliError> {
    match format {
        SourceFormat::Json => serde_json::to_string_pretty(config).map_err(|e| CliError::Config(e.to_string())),
        SourceFormat::Toml => toml::to_string(config).map_err(|e| CliError::Config(e.to_string())),
    }
}

/// The cavity as built from the config; symmetric cavities keep `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityModel {
    Symmetric { reflectance: PowerReflectance, length_over_c: f64 },
    General(CavitySpec),
}

impl CavityModel {
    pub fn spec(&self) -> Result<CavitySpec, CliError> {
        match *self {
            CavityModel::Symmetric { reflectance, length_over_c } => {
                CavitySpec::symmetric(reflectance, length_over_c).map_err(|e| CliError::config("cavity", e))
            }
            CavityModel::General(spec) => Ok(spec),
        }
    }

    pub fn length_over_c(&self) -> f64 {
        match self {
            CavityModel::Symmetric { length_over_c, .. } => *length_over_c,
            CavityModel::General(spec) => spec.length_over_c(),
        }
    }

    pub fn reflectance(&self) -> Option<PowerReflectance> {
        match self {
            CavityModel::Symmetric { reflectance, .. } => Some(*reflectance),
            CavityModel::General(_) => None,
        }
    }

    pub fn with_reflectance(&self, reflectance: PowerReflectance) -> Self {
        CavityModel::Symmetric { reflectance, length_over_c: self.length_over_c() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub shape: Shape,
    pub center: f64,
    pub width: f64,
}

impl Profile {
    fn from_config(c: &ProfileConfig, path: &str) -> Result<Self, CliError> {
        if !(c.width.is_finite() && c.width > 0.0) {
            return Err(CliError::config(format!("{path}.width"), format!("must be finite and > 0, got {}", c.width)));
        }
        if !c.center.is_finite() {
            return Err(CliError::config(format!("{path}.center"), "must be finite"));
        }
        Ok(Profile { shape: c.shape, center: c.center, width: c.width })
    }

    pub fn shifted_to(&self, center: f64) -> Self {
        Profile { center, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub coefficients: ModeMatrix,
    pub profiles: [Profile; 2],
    pub correlation: Option<Profile>,
}

/// The state after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// `(C_RR, C_RL, C_LL)`, possibly from a basis name
    Discrete(SingleModeState),
    /// `C_RR = C_LL = ζ C_RL`; `y` and `z` come from parameters or axes
    Zeta,
    Kernel(KernelSpec),
    OnePhoton { right: Complex64, left: Complex64, profile: Option<Profile> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub variable: Variable,
    pub values: Vec<f64>,
}

/// Fixed values for variables without an axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub x: Option<f64>,
    pub omega: Option<f64>,
    pub y: f64,
    pub z: ZetaModulus,
    pub n: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub mode: Mode,
    pub quantity: Quantity,
    pub cavity: CavityModel,
    pub state: Option<StateSpec>,
    /// continuous state profile for discrete states
    pub state_profile: Option<Profile>,
    pub envelopes: Option<[Profile; 2]>,
    pub grid: Option<Grid>,
    pub defaults: Defaults,
    pub axes: Vec<Axis>,
}

fn mirror_from_config(m: &MirrorConfig, path: &str) -> Result<MirrorCoefficients, CliError> {
    match (m.reflectance, m.r, m.t) {
        (Some(r), None, None) => Ok(MirrorCoefficients::from_power_reflectance(r)),
        (None, Some(r), Some(t)) => {
            MirrorCoefficients::validate(r.value(), t.value()).map_err(|e| CliError::config(path, e))
        }
        _ => Err(CliError::config(path, "give either `reflectance` or both `r` and `t`")),
    }
}

fn cavity_from_config(c: &CavityConfig) -> Result<CavityModel, CliError> {
    if !(c.length_over_c.is_finite() && c.length_over_c > 0.0) {
        return Err(CliError::config("cavity.length_over_c", format!("must be finite and > 0, got {}", c.length_over_c)));
    }
    match (&c.reflectance, &c.mirror1, &c.mirror2) {
        (Some(r), None, None) => Ok(CavityModel::Symmetric { reflectance: *r, length_over_c: c.length_over_c }),
        (None, Some(m1), Some(m2)) => {
            let spec = CavitySpec::new(
                mirror_from_config(m1, "cavity.mirror1")?,
                mirror_from_config(m2, "cavity.mirror2")?,
                c.length_over_c,
            )
            .map_err(|e| CliError::config("cavity", e))?;
            Ok(CavityModel::General(spec))
        }
        _ => Err(CliError::config("cavity", "give either `reflectance` or both `mirror1` and `mirror2`")),
    }
}

fn basis_from_name(name: &str) -> Option<BasisState> {
    match name {
        "n+" | "n_plus" | "plus" => Some(BasisState::Plus),
        "n0" | "n_zero" | "zero" => Some(BasisState::Zero),
        "n-" | "n−" | "n_minus" | "minus" => Some(BasisState::Minus),
        _ => None,
    }
}

fn state_from_config(s: &StateConfig) -> Result<StateSpec, CliError> {
    let triple = s.c_rr.is_some() || s.c_rl.is_some() || s.c_ll.is_some();
    let given = [s.basis.is_some(), triple, s.zeta.is_some(), s.kernel.is_some(), s.one_photon.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::config(
            "state",
            "give exactly one of `basis`, (`c_rr`, `c_rl`, `c_ll`), `zeta`, `kernel` or `one_photon`",
        ));
    }
    if let Some(name) = &s.basis {
        let basis = basis_from_name(name)
            .ok_or_else(|| CliError::config("state.basis", format!("unknown basis state {name:?}; use n+, n0 or n-")))?;
        return Ok(StateSpec::Discrete(basis.state()));
    }
    if triple {
        let c = |v: Option<ComplexInput>| v.map_or(Complex64::new(0.0, 0.0), ComplexInput::value);
        let (rr, rl, ll) = (c(s.c_rr), c(s.c_rl), c(s.c_ll));
        let state = if s.normalize {
            SingleModeState::normalized(rr, rl, ll)
        } else {
            SingleModeState::new(rr, rl, ll)
        };
        return state.map(StateSpec::Discrete).map_err(|e| {
            let hint = if s.normalize { String::new() } else { format!(" (tolerance {STATE_NORM_TOLERANCE:e}; set normalize = true to rescale)") };
            CliError::config("state", format!("{e}{hint}"))
        });
    }
    if s.zeta.is_some() {
        return Ok(StateSpec::Zeta);
    }
    if let Some(k) = &s.kernel {
        let entries = k.coefficients.map(|row| row.map(ComplexInput::value));
        let coefficients = ModeMatrix::new(entries).map_err(|e| CliError::config("state.kernel.coefficients", e))?;
        let asym = (coefficients.get(0, 1) - coefficients.get(1, 0)).norm();
        if asym > 1e-12 * coefficients.frobenius_norm() {
            return Err(CliError::config("state.kernel.coefficients", "must be symmetric"));
        }
        if coefficients.frobenius_norm() == 0.0 {
            return Err(CliError::config("state.kernel.coefficients", "must not all vanish"));
        }
        let profiles = match k.profiles.len() {
            0 => None,
            1 => {
                let p = Profile::from_config(&k.profiles[0], "state.kernel.profiles[0]")?;
                Some([p, p])
            }
            2 => Some([
                Profile::from_config(&k.profiles[0], "state.kernel.profiles[0]")?,
                Profile::from_config(&k.profiles[1], "state.kernel.profiles[1]")?,
            ]),
            n => return Err(CliError::config("state.kernel.profiles", format!("expected 1 or 2 profiles, got {n}"))),
        };
        let correlation = k
            .correlation
            .as_ref()
            .map(|c| Profile::from_config(c, "state.kernel.correlation"))
            .transpose()?;
        // a missing profile is filled from the envelopes once those are known
        let placeholder = Profile { shape: Shape::Gaussian, center: f64::NAN, width: f64::NAN };
        return Ok(StateSpec::Kernel(KernelSpec {
            coefficients,
            profiles: profiles.unwrap_or([placeholder; 2]),
            correlation,
        }));
    }
    let p = s.one_photon.as_ref().expect("one variant is present");
    let (right, left) = (p.right.value(), p.left.value());
    if right.norm_sqr() + left.norm_sqr() == 0.0 {
        return Err(CliError::config("state.one_photon", "`right` and `left` must not both vanish"));
    }
    let profile = p.profile.as_ref().map(|c| Profile::from_config(c, "state.one_photon.profile")).transpose()?;
    Ok(StateSpec::OnePhoton { right, left, profile })
}

/// Evenly spaced values; without `endpoint` the interval is half-open.
pub fn linspace(start: f64, stop: f64, count: usize, endpoint: bool) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let steps = if endpoint { count - 1 } else { count } as f64;
            (0..count)
                .map(|i| if endpoint && i == count - 1 { stop } else { start + (stop - start) * (i as f64 / steps) })
                .collect()
        }
    }
}

impl Scenario {
    /// Validates a parsed config. `grid_override` replaces the frequency
    /// grid's point count.
    pub fn from_config(config: &ScenarioConfig, grid_override: Option<usize>) -> Result<Self, CliError> {
        let cavity = cavity_from_config(&config.cavity)?;
        let mut state = config.state.as_ref().map(state_from_config).transpose()?;
        let state_profile = config
            .state
            .as_ref()
            .and_then(|s| s.profile.as_ref())
            .map(|p| Profile::from_config(p, "state.profile"))
            .transpose()?;

        let envelopes = config
            .envelopes
            .as_ref()
            .map(|e| -> Result<[Profile; 2], CliError> {
                let right = Profile::from_config(&e.right, "envelopes.right")?;
                let left = e.left.as_ref().map(|l| Profile::from_config(l, "envelopes.left")).transpose()?;
                Ok([right, left.unwrap_or(right)])
            })
            .transpose()?;

        let grid = config
            .omega
            .as_ref()
            .map(|g| -> Result<Grid, CliError> {
                let count = grid_override.unwrap_or(g.count);
                if !(g.start.is_finite() && g.stop.is_finite() && g.stop > g.start) {
                    return Err(CliError::config("omega", "need finite start < stop"));
                }
                if count < 2 {
                    return Err(CliError::config("omega.count", format!("need at least 2 points, got {count}")));
                }
                Ok(Grid { start: g.start, stop: g.stop, count })
            })
            .transpose()?;

        let p = &config.parameters;
        if p.x.is_some() && p.omega.is_some() {
            return Err(CliError::config("parameters", "give `x` or `omega`, not both"));
        }
        let zeta = config.state.as_ref().and_then(|s| s.zeta.as_ref());
        let z = match (&p.z, zeta) {
            (Some(_), Some(_)) => return Err(CliError::config("parameters.z", "already set by state.zeta")),
            (Some(z), None) => z.modulus("parameters.z")?,
            (None, Some(zc)) => zc.z.modulus("state.zeta.z")?,
            (None, None) => ZetaModulus::Finite(0.0),
        };
        let y = match (p.y, zeta) {
            (Some(_), Some(_)) => return Err(CliError::config("parameters.y", "already set by state.zeta")),
            (Some(y), None) => y,
            (None, Some(zc)) => zc.y,
            (None, None) => 0.0,
        };
        for (name, v) in [("parameters.x", p.x), ("parameters.omega", p.omega), ("parameters.y", Some(y))] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(CliError::config(name, "must be finite"));
            }
        }
        let defaults = Defaults { x: p.x, omega: p.omega, y, z, n: p.n.unwrap_or(1) };

        let mut axes = Vec::with_capacity(config.sweep.len());
        for (i, a) in config.sweep.iter().enumerate() {
            let path = format!("sweep[{i}]");
            if a.count < 1 {
                return Err(CliError::config(format!("{path}.count"), "must be >= 1"));
            }
            if !(a.start.is_finite() && a.stop.is_finite()) {
                return Err(CliError::config(&path, "start and stop must be finite"));
            }
            if axes.iter().any(|b: &Axis| b.variable == a.variable) {
                return Err(CliError::config(&path, format!("variable `{}` swept twice", a.variable.name())));
            }
            let values = linspace(a.start, a.stop, a.count, a.endpoint);
            match a.variable {
                Variable::R => {
                    if let Some(bad) = values.iter().find(|v| PowerReflectance::new(**v).is_err()) {
                        return Err(CliError::config(&path, format!("R = {bad} is outside [0, 1)")));
                    }
                }
                Variable::Z => {
                    if values.iter().any(|v| *v < 0.0) {
                        return Err(CliError::config(&path, "z must be >= 0"));
                    }
                }
                _ => {}
            }
            axes.push(Axis { variable: a.variable, values });
        }

        // kernels without their own profiles take the envelope shapes
        if let Some(StateSpec::Kernel(k)) = &mut state {
            if k.profiles[0].center.is_nan() {
                k.profiles = envelopes.ok_or_else(|| {
                    CliError::config("state.kernel.profiles", "required when no [envelopes] section is given")
                })?;
            }
        }

        let scenario = Scenario {
            mode: config.mode,
            quantity: config.quantity,
            cavity,
            state,
            state_profile,
            envelopes,
            grid,
            defaults,
            axes,
        };
        scenario.check_consistency()?;
        Ok(scenario)
    }

    pub fn axis(&self, variable: Variable) -> Option<&Axis> {
        self.axes.iter().find(|a| a.variable == variable)
    }

    fn swept(&self, variable: Variable) -> bool {
        self.axis(variable).is_some()
    }

    fn check_consistency(&self) -> Result<(), CliError> {
        if self.swept(Variable::R) && self.cavity.reflectance().is_none() {
            return Err(CliError::config("sweep", "an R axis needs a symmetric cavity (`cavity.reflectance`)"));
        }
        if self.swept(Variable::X) && self.swept(Variable::Omega) {
            return Err(CliError::config("sweep", "sweep `x` or `omega`, not both"));
        }
        if self.swept(Variable::X) && self.defaults.omega.is_some() {
            return Err(CliError::config("parameters.omega", "conflicts with the x axis"));
        }
        if self.swept(Variable::Omega) && self.defaults.x.is_some() {
            return Err(CliError::config("parameters.x", "conflicts with the omega axis"));
        }
        match self.mode {
            Mode::Single => {
                if matches!(self.state, Some(StateSpec::Kernel(_))) {
                    return Err(CliError::config("state.kernel", "kernels need mode = \"continuous\""));
                }
                let zeta_axes = self.swept(Variable::Y) || self.swept(Variable::Z);
                match self.quantity {
                    Quantity::State => {
                        if zeta_axes && !matches!(self.state, Some(StateSpec::Zeta) | None) {
                            return Err(CliError::config("sweep", "y and z axes need a zeta state"));
                        }
                    }
                    Quantity::Zeta => {}
                    Quantity::R0 | Quantity::RInf => {
                        if zeta_axes {
                            return Err(CliError::config("sweep", "the z limits do not depend on y or z"));
                        }
                    }
                    Quantity::Resonance => {
                        if self.swept(Variable::X) || self.swept(Variable::Omega) {
                            return Err(CliError::config("sweep", "resonance is evaluated at x = πN; use parameters.n"));
                        }
                    }
                }
                if self.quantity != Quantity::State || matches!(self.state, Some(StateSpec::Discrete(_) | StateSpec::Zeta)) {
                    if self.cavity.reflectance().is_none() {
                        return Err(CliError::config(
                            "cavity",
                            "single-mode two-photon formulas need a symmetric cavity (`cavity.reflectance`)",
                        ));
                    }
                }
            }
            Mode::Continuous => {
                if self.quantity != Quantity::State {
                    return Err(CliError::config("quantity", "continuous mode only reports the configured state"));
                }
                for v in [Variable::X, Variable::Y, Variable::Z] {
                    if self.swept(v) {
                        return Err(CliError::config(
                            "sweep",
                            format!("variable `{}` is not defined in continuous mode", v.name()),
                        ));
                    }
                }
                if self.grid.is_none() {
                    return Err(CliError::config("omega", "continuous mode needs a frequency grid"));
                }
                if self.envelopes.is_none() {
                    return Err(CliError::config("envelopes", "continuous mode needs detector envelopes"));
                }
                if matches!(self.state, Some(StateSpec::Zeta)) && self.swept(Variable::Z) {
                    return Err(CliError::config("sweep", "z is not defined in continuous mode"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
quantity = "r0"

[cavity]
length_over_c = 1.0
reflectance = 0.5

[[sweep]]
variable = "R"
start = 0.05
stop = 0.99
count = 4

[[sweep]]
variable = "x"
start = 0.0
stop = 6.283185307179586
count = 8
endpoint = false
"#;

    #[test]
    fn parses_sweep_and_builds_axes() {
        let config = parse_config(SWEEP, SourceFormat::Toml).unwrap();
        let s = Scenario::from_config(&config, None).unwrap();
        assert_eq!(s.quantity, Quantity::R0);
        assert_eq!(s.axes.len(), 2);
        assert_eq!(s.axes[0].values, vec![0.05, 0.05 + 0.94 / 3.0, 0.05 + 0.94 * 2.0 / 3.0, 0.99]);
        assert_eq!(s.axes[1].values.len(), 8);
        assert!((s.axes[1].values[7] - 7.0 * std::f64::consts::PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let texts = [
            SWEEP.to_string(),
            r#"
mode = "continuous"
[cavity]
length_over_c = 0.5
[cavity.mirror1]
reflectance = 0.3
[cavity.mirror2]
r = [0.0, 0.6]
t = 0.8
[state.kernel]
coefficients = [[1, [0, 0.5]], [[0, 0.5], 0.25]]
correlation = { shape = "lorentzian", center = 2.0, width = 0.1 }
[envelopes]
right = { shape = "gaussian", center = 1.0, width = 0.2 }
[omega]
start = 0.0
stop = 2.0
count = 64
"#
            .to_string(),
            r#"{"cavity": {"length_over_c": 1.0, "reflectance": 0.2}, "state": {"zeta": {"y": 3.0, "z": "inf"}}}"#.to_string(),
        ];
        for text in texts {
            let format = SourceFormat::detect(None, &text);
            let first = render_config(&parse_config(&text, format).unwrap(), format).unwrap();
            let parsed = parse_config(&first, format).unwrap();
            assert_eq!(parsed, parse_config(&text, format).unwrap());
            assert_eq!(render_config(&parsed, format).unwrap(), first);
            // the other format carries the same content
            let other = if format == SourceFormat::Json { SourceFormat::Toml } else { SourceFormat::Json };
            let crossed = render_config(&parsed, other).unwrap();
            assert_eq!(parse_config(&crossed, other).unwrap(), parsed);
        }
    }

    #[test]
    fn missing_field_is_named() {
        let err = parse_config("[cavity]\nreflectance = 0.5\n", SourceFormat::Toml).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cavity") && msg.contains("length_over_c"), "{msg}");
        let err = parse_config(r#"{"cavity": {"reflectance": 0.5}}"#, SourceFormat::Json).unwrap_err();
        assert!(err.to_string().contains("length_over_c"));
    }

    #[test]
    fn invalid_values_carry_paths() {
        let cases = [
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 1.5\n", "cavity.reflectance"),
            ("[cavity]\nlength_over_c = -1.0\nreflectance = 0.5\n", "cavity.length_over_c"),
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[state]\nbasis = \"n7\"\n", "state.basis"),
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[state]\nc_rr = 1.0\nc_rl = 1.0\n", "state"),
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[[sweep]]\nvariable = \"R\"\nstart = 0.0\nstop = 1.0\ncount = 3\n", "sweep[0]"),
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[[sweep]]\nvariable = \"q\"\nstart = 0.0\nstop = 1.0\ncount = 3\n", "sweep[0].variable"),
            ("[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\nbogus = 1\n", "cavity"),
        ];
        for (text, path) in cases {
            let err = parse_config(text, SourceFormat::Toml).and_then(|c| Scenario::from_config(&c, None)).unwrap_err();
            assert!(matches!(err, CliError::Config(_)));
            assert!(err.to_string().starts_with(path), "{path}: {err}");
        }
    }

    #[test]
    fn unnormalized_triple_needs_opt_in() {
        let base = "[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[state]\nc_rr = 1.0\nc_rl = 1.0\n";
        let with = format!("{base}normalize = true\n");
        let s = Scenario::from_config(&parse_config(&with, SourceFormat::Toml).unwrap(), None).unwrap();
        let Some(StateSpec::Discrete(st)) = s.state else { panic!() };
        assert!((st.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mode_consistency() {
        let continuous_x = "mode = \"continuous\"\n[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n\
            [state]\nbasis = \"n+\"\n[envelopes]\nright = { shape = \"gaussian\", center = 1.0, width = 0.1 }\n\
            [omega]\nstart = 0.0\nstop = 2.0\ncount = 16\n\
            [[sweep]]\nvariable = \"x\"\nstart = 0.0\nstop = 1.0\ncount = 2\n";
        let err = Scenario::from_config(&parse_config(continuous_x, SourceFormat::Toml).unwrap(), None).unwrap_err();
        assert!(err.to_string().contains("`x`"), "{err}");
        let general_r = "[cavity]\nlength_over_c = 1.0\n[cavity.mirror1]\nreflectance = 0.2\n[cavity.mirror2]\nreflectance = 0.4\n\
            [state]\nbasis = \"n+\"\n";
        let err = Scenario::from_config(&parse_config(general_r, SourceFormat::Toml).unwrap(), None).unwrap_err();
        assert!(err.to_string().contains("symmetric"), "{err}");
    }

    #[test]
    fn grid_override_and_linspace_edges() {
        assert_eq!(linspace(1.0, 2.0, 1, true), vec![1.0]);
        assert_eq!(linspace(0.0, 1.0, 4, false), vec![0.0, 0.25, 0.5, 0.75]);
        let text = "mode = \"continuous\"\n[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n[state]\nbasis = \"n0\"\n\
            [envelopes]\nright = { shape = \"gaussian\", center = 1.0, width = 0.1 }\n[omega]\nstart = 0.0\nstop = 2.0\ncount = 16\n";
        let s = Scenario::from_config(&parse_config(text, SourceFormat::Toml).unwrap(), Some(99)).unwrap();
        assert_eq!(s.grid.unwrap().count, 99);
    }
}
