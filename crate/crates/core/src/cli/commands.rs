//! Row evaluation for every subcommand.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::config::{CavityModel, KernelSpec, Mode, Profile, Quantity, Scenario, Shape, StateSpec, Variable};
use super::output::{Cell, Table};
use super::CliError;
use crate::cavity::CavitySpec;
use crate::gram::{gram_determinant, gram_matrix, gram_parameters, orthonormal_basis, BASIS_VECTORS};
use crate::linalg::ModeMatrix;
use crate::mirror::PowerReflectance;
use crate::photon_states::envelope::{gaussian_at, lorentzian_at};
use crate::photon_states::kernel::MAX_GRIDDED_POINTS;
use crate::photon_states::{
    normalize_kernel, one_photon_distribution, outcome_distribution, two_photon_amplitudes, CoincidenceRatios,
    FrequencyGrid, GriddedKernel, OnePhotonCoefficients, OnePhotonDistribution, OutcomeDistribution,
    PhotonStateError, Port, PropagationFactors, SeparableKernel, SpectralEnvelope, TwoPhotonAmplitudes,
    TwoPhotonKernel,
};
use crate::single_mode::{
    distribution_symmetric, limit_large_z, limit_small_z, ratio_zeta_form, resonance_ratio, single_mode_amplitudes,
    Parity, SingleModeState, ZetaModulus, ZetaParams,
};

/// Rows whose probabilities miss 1 by more than this are flagged.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Variable values at one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub reflectance: Option<PowerReflectance>,
    pub x: Option<f64>,
    pub omega: Option<f64>,
    pub y: f64,
    pub z: ZetaModulus,
}

impl Point {
    fn base(s: &Scenario) -> Self {
        Point {
            reflectance: s.cavity.reflectance(),
            x: s.defaults.x,
            omega: s.defaults.omega,
            y: s.defaults.y,
            z: s.defaults.z,
        }
    }

    fn set(&mut self, variable: Variable, v: f64) {
        match variable {
            Variable::R => self.reflectance = Some(PowerReflectance::new(v).expect("axis values are validated")),
            Variable::X => self.x = Some(v),
            Variable::Y => self.y = v,
            Variable::Z => self.z = ZetaModulus::Finite(v),
            Variable::Omega => self.omega = Some(v),
        }
    }
}

fn row_count(s: &Scenario) -> usize {
    s.axes.iter().map(|a| a.values.len()).product()
}

/// Lexicographic order: the first declared axis varies slowest.
fn point_at(s: &Scenario, index: usize) -> (Point, Vec<f64>) {
    let mut p = Point::base(s);
    let mut values = vec![0.0; s.axes.len()];
    let mut rest = index;
    for (k, axis) in s.axes.iter().enumerate().rev() {
        let n = axis.values.len();
        values[k] = axis.values[rest % n];
        rest /= n;
    }
    for (axis, &v) in s.axes.iter().zip(&values) {
        p.set(axis.variable, v);
    }
    (p, values)
}

/// Evaluates every row in parallel and keeps index order; the reported
/// error is the one from the lowest failing row.
fn evaluate_rows<F>(s: &Scenario, f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&Point) -> Result<Vec<Cell>, CliError> + Sync,
{
    let results: Vec<Result<Vec<Cell>, CliError>> = (0..row_count(s))
        .into_par_iter()
        .map(|i| {
            let (p, axis_values) = point_at(s, i);
            let mut row: Vec<Cell> = axis_values.into_iter().map(Cell::Num).collect();
            row.extend(f(&p).map_err(|e| e.at_row(i))?);
            Ok(row)
        })
        .collect();
    results.into_iter().collect()
}

fn cavity_at(s: &Scenario, p: &Point) -> CavityModel {
    match p.reflectance {
        Some(r) if s.cavity.reflectance().is_some() => s.cavity.with_reflectance(r),
        _ => s.cavity,
    }
}

fn reflectance_at(p: &Point) -> Result<PowerReflectance, CliError> {
    p.reflectance.ok_or_else(|| CliError::config("cavity", "a symmetric cavity (`cavity.reflectance`) is required"))
}

fn phase_at(s: &Scenario, p: &Point) -> Result<f64, CliError> {
    match (p.x, p.omega) {
        (Some(x), _) => Ok(x),
        (None, Some(w)) => Ok(w * s.cavity.length_over_c()),
        (None, None) => Err(CliError::config("parameters", "set `x` or `omega`, or sweep one of them")),
    }
}

fn state_of(s: &Scenario) -> Result<&StateSpec, CliError> {
    s.state.as_ref().ok_or_else(|| CliError::config("state", "missing state section"))
}

fn discrete_state(state: &StateSpec, p: &Point) -> Option<SingleModeState> {
    match state {
        StateSpec::Discrete(st) => Some(*st),
        StateSpec::Zeta => Some(SingleModeState::zeta(p.y, p.z)),
        _ => None,
    }
}

fn sample(profile: &Profile, grid: &FrequencyGrid) -> Vec<Complex64> {
    grid.points().iter().map(|&w| profile_at(profile, w)).collect()
}

fn profile_at(profile: &Profile, w: f64) -> Complex64 {
    match profile.shape {
        Shape::Gaussian => gaussian_at(w, profile.center, profile.width),
        Shape::Lorentzian => lorentzian_at(w, profile.center, profile.width),
    }
}

/// Continuous-mode inputs at one row; an `omega` value recentres every profile.
struct Continuum {
    spec: CavitySpec,
    grid: FrequencyGrid,
    envelopes: [SpectralEnvelope; 2],
    shift: Option<f64>,
}

impl Continuum {
    fn new(s: &Scenario, p: &Point) -> Result<Self, CliError> {
        let g = s.grid.as_ref().ok_or_else(|| CliError::config("omega", "frequency grid required"))?;
        let grid = FrequencyGrid::uniform(g.start, g.stop, g.count)?;
        let profiles = s.envelopes.ok_or_else(|| CliError::config("envelopes", "detector envelopes required"))?;
        let shift = p.omega;
        let envelope = |profile: &Profile| -> Result<SpectralEnvelope, CliError> {
            let profile = shift.map_or(*profile, |w| profile.shifted_to(w));
            Ok(SpectralEnvelope::normalized(grid.clone(), sample(&profile, &grid))?)
        };
        let envelopes = [envelope(&profiles[0])?, envelope(&profiles[1])?];
        Ok(Continuum { spec: cavity_at(s, p).spec()?, grid, envelopes, shift })
    }

    fn place(&self, profile: &Profile) -> Profile {
        self.shift.map_or(*profile, |w| profile.shifted_to(w))
    }

    fn kernel(&self, k: &KernelSpec) -> Result<TwoPhotonKernel, CliError> {
        let profiles = [sample(&self.place(&k.profiles[0]), &self.grid), sample(&self.place(&k.profiles[1]), &self.grid)];
        let kernel = match &k.correlation {
            None => TwoPhotonKernel::Separable(SeparableKernel::new(self.grid.clone(), k.coefficients, profiles)?),
            Some(h) => {
                let h = self.shift.map_or(*h, |w| h.shifted_to(2.0 * w));
                let pts = self.grid.points();
                let n = pts.len();
                if n > MAX_GRIDDED_POINTS {
                    return Err(PhotonStateError::GridTooLarge { points: n, max: MAX_GRIDDED_POINTS }.into());
                }
                let mut pump = Vec::with_capacity(n * n);
                for &wa in pts {
                    for &wb in pts {
                        pump.push(profile_at(&h, wa + wb));
                    }
                }
                let values = [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| {
                    let c = k.coefficients.get(i, j);
                    (0..n * n).map(|ab| c * profiles[i][ab / n] * profiles[j][ab % n] * pump[ab]).collect()
                });
                TwoPhotonKernel::Gridded(GriddedKernel::new(self.grid.clone(), values)?)
            }
        };
        Ok(normalize_kernel(&kernel)?)
    }
}

fn continuous_amplitudes(s: &Scenario, p: &Point, state: &StateSpec) -> Result<TwoPhotonAmplitudes, CliError> {
    let c = Continuum::new(s, p)?;
    let kernel = match state {
        StateSpec::Kernel(k) => c.kernel(k)?,
        other => {
            let st = discrete_state(other, p).ok_or_else(|| CliError::config("state", "not a two-photon state"))?;
            let profile = s.state_profile.unwrap_or(s.envelopes.expect("checked by Continuum::new")[0]);
            c.kernel(&KernelSpec { coefficients: st.barred_kernel(), profiles: [profile; 2], correlation: None })?
        }
    };
    Ok(two_photon_amplitudes(&c.spec, &c.envelopes, &kernel)?)
}

/// Ratios, distribution and flags of one two-photon evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonRow {
    pub ratios: CoincidenceRatios,
    pub distribution: OutcomeDistribution,
    pub flags: Vec<&'static str>,
}

impl TwoPhotonRow {
    fn from_amplitudes(amps: &TwoPhotonAmplitudes) -> Result<Self, CliError> {
        let ratios = CoincidenceRatios::from_amplitudes(amps)?;
        let mut flags = Vec::new();
        let distribution = match outcome_distribution(ratios.r1, ratios.r2) {
            Ok(d) => d,
            // no coincidences: both ratios vanish and carry no information
            Err(PhotonStateError::UndefinedDistribution) => {
                flags.push("distribution_from_amplitudes");
                OutcomeDistribution::from_amplitudes(
                    amps.get(Port::Right, Port::Right),
                    amps.get(Port::Right, Port::Left),
                    amps.get(Port::Left, Port::Left),
                )?
            }
            Err(e) => return Err(e.into()),
        };
        if (distribution.sum() - 1.0).abs() > SUM_TOLERANCE {
            flags.push("sum_off");
        }
        Ok(TwoPhotonRow { ratios, distribution, flags })
    }

    fn cells(self) -> Vec<Cell> {
        let d = self.distribution;
        vec![
            self.ratios.r1.into(),
            self.ratios.r2.into(),
            d.p_rr.into(),
            d.p_rl.into(),
            d.p_ll.into(),
            Cell::Flags(self.flags),
        ]
    }
}

pub const TWO_PHOTON_COLUMNS: [&str; 6] = ["ratio_1", "ratio_2", "p_rr", "p_rl", "p_ll", "flags"];
pub const ONE_PHOTON_COLUMNS: [&str; 4] = ["ratio", "p_r", "p_l", "flags"];
pub const SYMMETRIC_COLUMNS: [&str; 5] = ["ratio", "p_rr", "p_rl", "p_ll", "flags"];

pub fn two_photon_row(s: &Scenario, p: &Point) -> Result<TwoPhotonRow, CliError> {
    let state = state_of(s)?;
    if matches!(state, StateSpec::OnePhoton { .. }) {
        return Err(CliError::config("state", "one-photon state given; use the one-photon command"));
    }
    let amps = match s.mode {
        Mode::Single => {
            let st = discrete_state(state, p).expect("kernels are rejected in single mode");
            single_mode_amplitudes(&st, reflectance_at(p)?, phase_at(s, p)?)?
        }
        Mode::Continuous => continuous_amplitudes(s, p, state)?,
    };
    TwoPhotonRow::from_amplitudes(&amps)
}

pub fn one_photon_row(s: &Scenario, p: &Point) -> Result<(OnePhotonDistribution, Vec<&'static str>), CliError> {
    let StateSpec::OnePhoton { right, left, profile } = state_of(s)? else {
        return Err(CliError::config("state", "the one-photon command needs `state.one_photon`"));
    };
    let dist = match s.mode {
        Mode::Single => {
            let spec = cavity_at(s, p).spec()?;
            let mg = PropagationFactors::at_phase(&spec, phase_at(s, p)?)?.metric_rows();
            let amp = |a: usize| mg.get(a, 0) * right + mg.get(a, 1) * left;
            OnePhotonDistribution::from_amplitudes(amp(0), amp(1))?
        }
        Mode::Continuous => {
            let c = Continuum::new(s, p)?;
            let shape = c.place(&profile.unwrap_or(s.envelopes.expect("checked by Continuum::new")[0]));
            let phi = sample(&shape, &c.grid);
            let coeffs = OnePhotonCoefficients::normalized(
                c.grid.clone(),
                phi.iter().map(|v| v * right).collect(),
                phi.iter().map(|v| v * left).collect(),
            )?;
            one_photon_distribution(&c.spec, &c.envelopes, &coeffs)?
        }
    };
    let mut flags = Vec::new();
    if (dist.p_r + dist.p_l - 1.0).abs() > SUM_TOLERANCE {
        flags.push("sum_off");
    }
    Ok((dist, flags))
}

fn symmetric_row(s: &Scenario, p: &Point) -> Result<Vec<Cell>, CliError> {
    let reflectance = reflectance_at(p)?;
    let ratio = match s.quantity {
        Quantity::Zeta => {
            ratio_zeta_form(&ZetaParams { reflectance, x: phase_at(s, p)?, y: p.y, z: p.z })?
        }
        Quantity::R0 => limit_small_z(reflectance, phase_at(s, p)?),
        Quantity::RInf => limit_large_z(reflectance, phase_at(s, p)?),
        Quantity::Resonance => resonance_ratio(reflectance, p.z, p.y, Parity::of(s.defaults.n))?,
        Quantity::State => unreachable!("handled by two_photon_row"),
    };
    let d = distribution_symmetric(ratio);
    let mut flags = Vec::new();
    if (d.sum() - 1.0).abs() > SUM_TOLERANCE {
        flags.push("sum_off");
    }
    Ok(vec![ratio.into(), d.p_rr.into(), d.p_rl.into(), d.p_ll.into(), Cell::Flags(flags)])
}

fn one_photon_cells(s: &Scenario, p: &Point) -> Result<Vec<Cell>, CliError> {
    let (d, flags) = one_photon_row(s, p)?;
    Ok(vec![d.ratio.into(), d.p_r.into(), d.p_l.into(), Cell::Flags(flags)])
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn axis_columns(s: &Scenario) -> Vec<String> {
    s.axes.iter().map(|a| a.variable.name().to_string()).collect()
}

pub fn cmd_sweep(s: &Scenario) -> Result<Table, CliError> {
    if s.axes.is_empty() {
        return Err(CliError::config("sweep", "no axes defined"));
    }
    let one_photon = matches!(s.state, Some(StateSpec::OnePhoton { .. }));
    let outputs: &[&str] = match (s.quantity, one_photon) {
        (Quantity::State, true) => &ONE_PHOTON_COLUMNS,
        (Quantity::State, false) => &TWO_PHOTON_COLUMNS,
        _ => &SYMMETRIC_COLUMNS,
    };
    if s.quantity == Quantity::State {
        state_of(s)?;
    }
    let mut table = Table::new(axis_columns(s));
    table.columns.extend(columns(outputs));
    table.rows = evaluate_rows(s, |p| match (s.quantity, one_photon) {
        (Quantity::State, true) => one_photon_cells(s, p),
        (Quantity::State, false) => Ok(two_photon_row(s, p)?.cells()),
        _ => symmetric_row(s, p),
    })?;
    Ok(table)
}

pub fn cmd_two_photon(s: &Scenario) -> Result<Table, CliError> {
    let mut table = Table::new(columns(&TWO_PHOTON_COLUMNS));
    table.rows.push(two_photon_row(s, &Point::base(s))?.cells());
    table.report = true;
    Ok(table)
}

pub fn cmd_one_photon(s: &Scenario) -> Result<Table, CliError> {
    let mut table = Table::new(columns(&ONE_PHOTON_COLUMNS));
    table.rows.push(one_photon_cells(s, &Point::base(s))?);
    table.report = true;
    Ok(table)
}

fn matrix_cells(m: &ModeMatrix) -> impl Iterator<Item = Cell> + '_ {
    m.entries().iter().flatten().flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)])
}

/// Per-frequency `B`, `C`, `M`, `G` with `‖CC† − I‖_F` and `‖MGM† − I‖_F`.
pub fn cmd_matrices(s: &Scenario) -> Result<Table, CliError> {
    let spec = s.cavity.spec()?;
    let l = s.cavity.length_over_c();
    let omegas: Vec<f64> = match (&s.grid, s.defaults.omega, s.defaults.x) {
        (Some(g), _, _) => super::config::linspace(g.start, g.stop, g.count, true),
        (None, Some(w), _) => vec![w],
        (None, None, Some(x)) => vec![x / l],
        (None, None, None) => {
            return Err(CliError::config("omega", "give a frequency grid, `parameters.omega` or `parameters.x`"))
        }
    };
    let x_given = s.grid.is_none() && s.defaults.omega.is_none();
    let mut names = vec!["omega".to_string(), "x".to_string()];
    for m in ["b", "c", "m", "g"] {
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            names.push(format!("{m}{i}{j}_re"));
            names.push(format!("{m}{i}{j}_im"));
        }
    }
    names.extend(columns(&["unitarity_residual", "metric_residual", "flags"]));
    let mut table = Table::new(names);
    let rows: Vec<Result<Vec<Cell>, CliError>> = omegas
        .par_iter()
        .enumerate()
        .map(|(i, &omega)| {
            let x = if x_given { s.defaults.x.expect("x given") } else { spec.phase(omega).x };
            let at = |e| CliError::from(e).at_row(i);
            let b = spec.inside_matrix_at_phase(x).map_err(at)?;
            let c = spec.outside_matrix_at_phase(x).map_err(at)?;
            let m = spec.inside_to_outside_matrix_at_phase(x).map_err(at)?;
            let g = spec.commutator_metric_at_phase(x).map_err(at)?;
            let mut row = vec![Cell::Num(omega), Cell::Num(x)];
            for mat in [&b, &c, &m, &g] {
                row.extend(matrix_cells(mat));
            }
            row.push(Cell::Num((c * c.adjoint()).distance_from_identity()));
            row.push(Cell::Num((m * g * m.adjoint()).distance_from_identity()));
            let flags = if spec.denominator_at_phase(x).near_resonance { vec!["near_resonance"] } else { vec![] };
            row.push(Cell::Flags(flags));
            Ok(row)
        })
        .collect();
    table.rows = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(table)
}

/// Gram matrix report; accepts `R`, `x` and `omega` axes.
pub fn cmd_gram(s: &Scenario) -> Result<Table, CliError> {
    if s.cavity.reflectance().is_none() {
        return Err(CliError::config("cavity", "the Gram report needs a symmetric cavity (`cavity.reflectance`)"));
    }
    if let Some(a) = s.axes.iter().find(|a| matches!(a.variable, Variable::Y | Variable::Z)) {
        return Err(CliError::config("sweep", format!("variable `{}` is not defined for the Gram report", a.variable.name())));
    }
    let mut names = axis_columns(s);
    for v in ["R", "x"] {
        if !names.iter().any(|n| n == v) {
            names.push(v.to_string());
        }
    }
    names.extend(columns(&["delta", "rho"]));
    for i in 1..=3 {
        for j in 1..=3 {
            names.push(format!("g{i}{j}"));
        }
    }
    names.extend(columns(&["det", "det_closed_form", "norm_plus", "norm_zero", "norm_minus"]));
    let mut table = Table::new(names);
    table.rows = evaluate_rows(s, |p| {
        let reflectance = reflectance_at(p)?;
        let x = phase_at(s, p)?;
        let params = gram_parameters(reflectance, x);
        let g = gram_matrix(params);
        let basis = orthonormal_basis(params)?;
        let mut row = Vec::new();
        if !s.axes.iter().any(|a| a.variable == Variable::R) {
            row.push(Cell::Num(reflectance.value()));
        }
        if !s.axes.iter().any(|a| a.variable == Variable::X) {
            row.push(Cell::Num(x));
        }
        row.push(Cell::Num(params.delta));
        row.push(Cell::Num(params.rho));
        row.extend(g.entries().iter().flatten().map(|z| Cell::Num(z.re)));
        row.push(Cell::Num(g.determinant().re));
        row.push(Cell::Num(gram_determinant(params)));
        row.extend(basis.metric_norms.map(Cell::Num));
        Ok(row)
    })?;
    table.report = table.rows.len() == 1;
    let mut vectors = Map::new();
    for (name, v) in ["n+", "n0", "n-"].iter().zip(BASIS_VECTORS) {
        vectors.insert(name.to_string(), json!(v));
    }
    table.extras.insert("basis_vectors".to_string(), Value::Object(vectors));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{parse_config, SourceFormat};
    use crate::photon_states::Ratio;

    fn scenario(text: &str) -> Scenario {
        Scenario::from_config(&parse_config(text, SourceFormat::Toml).unwrap(), None).unwrap()
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(v) | Cell::Ratio(Ratio::Finite(v)) => *v,
            other => panic!("not a number: {other:?}"),
        }
    }

    const SYM: &str = "[cavity]\nlength_over_c = 1.0\nreflectance = 0.5\n";

    #[test]
    fn basis_state_reports() {
        let plus = cmd_two_photon(&scenario(&format!("{SYM}[parameters]\nx = 0.7\n[state]\nbasis = \"n+\"\n"))).unwrap();
        let row = &plus.rows[0];
        assert!((num(&row[0]) - 2.0).abs() < 1e-10);
        assert!((num(&row[3]) - 0.5).abs() < 1e-12 && (num(&row[2]) - 0.25).abs() < 1e-12);
        let zero = cmd_two_photon(&scenario(&format!("{SYM}[parameters]\nx = 0.7\n[state]\nbasis = \"n0\"\n"))).unwrap();
        let row = &zero.rows[0];
        assert!(num(&row[3]).abs() < 1e-24);
        assert_eq!(row[5], Cell::Flags(vec!["distribution_from_amplitudes"]));
    }

    #[test]
    fn free_space_matrices() {
        let s = scenario("[cavity]\nlength_over_c = 1.0\nreflectance = 0.0\n[omega]\nstart = 0.0\nstop = 3.0\ncount = 7\n");
        let t = cmd_matrices(&s).unwrap();
        assert_eq!(t.rows.len(), 7);
        let c_re = t.columns.iter().position(|c| c == "c11_re").unwrap();
        let unit = t.columns.iter().position(|c| c == "unitarity_residual").unwrap();
        for row in &t.rows {
            assert!((num(&row[c_re]) + 1.0).abs() < 1e-15);
            assert!(num(&row[c_re + 2]).abs() < 1e-15);
            assert!((num(&row[c_re + 6]) + 1.0).abs() < 1e-15);
            assert!(num(&row[unit]) < 1e-14 && num(&row[unit + 1]) < 1e-14);
        }
    }

    #[test]
    fn gram_report_values() {
        let t = cmd_gram(&scenario(&format!("{SYM}[parameters]\nx = 0.0\n"))).unwrap();
        assert!(t.report);
        let col = |name: &str| num(&t.rows[0][t.columns.iter().position(|c| c == name).unwrap()]);
        assert!((col("rho") + 0.942809041582063).abs() < 1e-12);
        assert!((col("det") - col("det_closed_form")).abs() < 1e-12 * col("det_closed_form").abs().max(1.0));
        assert_eq!(&t.columns[..4], ["R", "x", "delta", "rho"]);
    }

    #[test]
    fn one_photon_free_space() {
        let s = scenario(
            "[cavity]\nlength_over_c = 1.0\nreflectance = 0.0\n[parameters]\nx = 0.3\n[state.one_photon]\nright = 1.0\nleft = 1.0\n",
        );
        let t = cmd_one_photon(&s).unwrap();
        assert!((num(&t.rows[0][1]) - 0.5).abs() < 1e-15 && (num(&t.rows[0][2]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sweep_order_is_lexicographic() {
        let s = scenario(&format!(
            "quantity = \"r0\"\n{SYM}[[sweep]]\nvariable = \"R\"\nstart = 0.1\nstop = 0.3\ncount = 3\n\
             [[sweep]]\nvariable = \"x\"\nstart = 0.0\nstop = 1.0\ncount = 2\n"
        ));
        let t = cmd_sweep(&s).unwrap();
        let axes: Vec<(f64, f64)> = t.rows.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
        assert_eq!(axes, [(0.1, 0.0), (0.1, 1.0), (0.2, 0.0), (0.2, 1.0), (0.3, 0.0), (0.3, 1.0)]);
        assert_eq!(t.columns, ["R", "x", "ratio", "p_rr", "p_rl", "p_ll", "flags"]);
    }

    #[test]
    fn zero_z_row_uses_the_limit() {
        let s = scenario(&format!(
            "quantity = \"zeta\"\n{SYM}[parameters]\ny = 1.0\n[[sweep]]\nvariable = \"z\"\nstart = 0.0\nstop = 0.0\ncount = 1\n\
             [[sweep]]\nvariable = \"x\"\nstart = 0.4\nstop = 0.4\ncount = 1\n"
        ));
        let t = cmd_sweep(&s).unwrap();
        let r0 = limit_small_z(PowerReflectance::new(0.5).unwrap(), 0.4).finite().unwrap();
        assert!((num(&t.rows[0][2]) - r0).abs() < 1e-12 * r0);
    }

    #[test]
    fn continuous_point_like_state_matches_single_mode() {
        let text = format!(
            "mode = \"continuous\"\n{SYM}[state]\nbasis = \"n+\"\n\
             [envelopes]\nright = {{ shape = \"gaussian\", center = 0.9, width = 0.002 }}\n\
             [omega]\nstart = 0.88\nstop = 0.92\ncount = 257\n"
        );
        let t = cmd_two_photon(&scenario(&text)).unwrap();
        assert!((num(&t.rows[0][0]) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn numeric_errors_report_row() {
        let s = scenario(&format!(
            "{SYM}[state]\nc_rr = 0.0\nc_rl = 0.0\nc_ll = 1.0\n[[sweep]]\nvariable = \"R\"\nstart = 0.0\nstop = 0.5\ncount = 2\n\
             [parameters]\nx = 0.0\n"
        ));
        // R = 0: a pure LL state never reaches the right detector and gives 0/0
        let err = cmd_sweep(&s).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("row 0"), "{err}");
    }
}
