use std::fmt::{Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use fosc::classical::{
    exact_orbit, rk4_orbit, step_times, ClassicalOrbit, ClassicalSystem, ContinuousDeformation, FrequencyLaw,
};
use fosc::deformation::{DeformationKind, DeformationSpec};
use fosc::io::{format_f64, to_json_string, ComplexJson, StateFile};
use fosc::phasespace::{husimi, wigner, wigner_naive, FieldOnGrid, PhaseSpaceGrid};
use fosc::quadrature::{quadrature_report, scan_polar};
use fosc::state::{
    build_sector_state, build_state, build_two_mode_joint, build_two_mode_product, evolve, moment_residuals,
    BuildConfig, FCoherentState, RadialMeasure,
};
use fosc::statistics::{photon_stats, two_mode_distribution};
use fosc::thermo::{bose_einstein, deformed_bose_perturbative, q_planck_perturbative, thermal_mean_n, thermo_sweep};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cli::{Cli, Command, Format, GridArgs, MethodArg, RunArgs, StateSource, Temperatures, TwoModeKindArg};
use crate::parse;

pub const N_MAX_LIMIT: usize = 65536;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Usage(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Leading variant name of a `Debug` rendering, descending through wrapper variants.
fn variant_name(debug: &str) -> &str {
    let end = debug.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(debug.len());
    let rest = &debug[end..];
    match rest.strip_prefix('(') {
        Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => variant_name(inner),
        _ => &debug[..end],
    }
}

fn domain<E: Display + std::fmt::Debug>(e: E) -> CliError {
    let debug = format!("{e:?}");
    CliError::Domain(format!("{}: {e}", variant_name(&debug)))
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                domain(e)
            }
        }
    )*};
}

domain_from!(
    fosc::StateError,
    fosc::DeformationError,
    fosc::quadrature::QuadratureError,
    fosc::phasespace::PhaseSpaceError,
    fosc::thermo::ThermoError,
    fosc::classical::ClassicalError
);

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Malformed JSON is a usage error; well-formed JSON the library rejects is a domain error.
fn from_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            CliError::Domain(format!("{what}: {e}"))
        } else {
            CliError::Usage(format!("{what}: invalid JSON: {e}"))
        }
    })
}

fn to_json<S: serde::Serialize>(value: &S) -> Result<String, CliError> {
    to_json_string(value).map_err(|e| CliError::Usage(format!("cannot serialize output: {e}")))
}

fn config(run: &RunArgs) -> Result<BuildConfig<f64>, CliError> {
    if !(run.tol > 0.0 && run.tol <= 1e-2) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1e-2], got {}", run.tol)));
    }
    if run.n_max == 0 || run.n_max > N_MAX_LIMIT {
        return Err(CliError::Usage(format!(
            "--n-max (or FOSC_N_MAX) must lie in [1, {N_MAX_LIMIT}], got {}",
            run.n_max
        )));
    }
    if !(run.radius_margin >= 0.0 && run.radius_margin < 1.0) {
        return Err(CliError::Usage(format!("--radius-margin must lie in [0, 1), got {}", run.radius_margin)));
    }
    Ok(BuildConfig { tol: run.tol, n_max: run.n_max, radius_margin: run.radius_margin })
}

fn deformation(arg: &str) -> Result<DeformationSpec<f64>, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => arg.to_string(),
    };
    from_json("--deformation", &text)
}

fn amplitude(flag: &str, text: &str) -> Result<Complex64, CliError> {
    parse::complex(text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn build(
    spec: &DeformationSpec<f64>,
    alpha: Complex64,
    cfg: &BuildConfig<f64>,
) -> Result<FCoherentState<f64>, CliError> {
    Ok(if spec.kind() == DeformationKind::ZeroSector {
        build_sector_state(spec, alpha, cfg)?
    } else {
        build_state(spec, alpha, cfg)?
    })
}

fn load_state(src: &StateSource, cfg: &BuildConfig<f64>) -> Result<FCoherentState<f64>, CliError> {
    if let Some(path) = &src.state {
        let file: StateFile = from_json(&path.display().to_string(), &read(path)?)?;
        return Ok(file.into_state(cfg)?);
    }
    match (&src.deformation, &src.alpha) {
        (Some(d), Some(a)) => build(&deformation(d)?, amplitude("alpha", a)?, cfg),
        _ => Err(CliError::Usage("either --state or both --deformation and --alpha are required".into())),
    }
}

fn complex_json(c: Complex64) -> Value {
    json!({"re": c.re, "im": c.im})
}

fn state_summary(s: &FCoherentState<f64>) -> Value {
    let t = s.truncation();
    json!({
        "alpha": complex_json(s.alpha()),
        "spec": s.spec(),
        "time": s.time(),
        "truncation": {"n": t.n, "tail_bound": t.tail_bound, "converged": t.converged},
    })
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn f(v: f64) -> String {
    format_f64(v)
}

fn temperatures(t: &Temperatures) -> Result<Vec<f64>, CliError> {
    let parsed = match (&t.temps, &t.t_range) {
        (Some(list), _) => parse::real_list(list),
        (None, Some(range)) => parse::log_range(range),
        (None, None) => Err("one of --temps or --t-range is required".to_string()),
    };
    parsed.map_err(CliError::Usage)
}

fn grid(g: &GridArgs) -> Result<PhaseSpaceGrid<f64>, CliError> {
    PhaseSpaceGrid::new(g.xmin, g.xmax, g.nx, g.pmin, g.pmax, g.np).map_err(|e| CliError::Usage(e.to_string()))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_field(
    field: &FieldOnGrid<f64>,
    state: &FCoherentState<f64>,
    kind: &str,
    header: &str,
    scale: f64,
    out: &Path,
) -> Result<(), CliError> {
    let g = field.grid;
    let rows = field.values.iter_indexed().map(|(i, j, &v)| vec![f(g.x(i) * scale), f(g.p(j) * scale), f(v)]);
    write(out, &csv(header, rows))?;
    let norm = field.normalization();
    let (ax, ap) = field.argmax();
    let meta = json!({
        "kind": kind,
        "columns": header,
        "grid": {"x_min": g.x_min, "x_max": g.x_max, "nx": g.nx, "p_min": g.p_min, "p_max": g.p_max, "np": g.np},
        "coordinate_scale": scale,
        "normalization": norm,
        "normalization_residual": (norm - 1.0).abs(),
        "max_imag": field.max_imag,
        "min_value": field.min_value(),
        "max_value": field.max_value(),
        "argmax": {"x": ax, "p": ap},
        "state": state_summary(state),
    });
    write(&sidecar_path(out), &to_json(&meta)?)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ContinuousJson {
    Identity,
    Q { lambda: f64 },
    Harmonious,
    GammaFactorial,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    modes: usize,
    #[serde(default)]
    omega_exprs: Option<Vec<String>>,
    #[serde(default)]
    q_lambda: Option<f64>,
    #[serde(default)]
    deformation: Option<ContinuousJson>,
    initial: Vec<f64>,
    dt: f64,
    t_max: f64,
}

fn system(file: &SystemFile) -> Result<ClassicalSystem<f64>, CliError> {
    let law = match (&file.omega_exprs, file.q_lambda, &file.deformation) {
        (Some(exprs), None, None) => {
            if exprs.len() != file.modes {
                return Err(CliError::Usage(format!(
                    "system file: omega_exprs has {} entries but modes = {}",
                    exprs.len(),
                    file.modes
                )));
            }
            return Ok(ClassicalSystem::from_exprs(exprs)?);
        }
        (None, Some(lambda), None) => FrequencyLaw::QBracket { lambda },
        (None, None, Some(d)) => FrequencyLaw::Deformed(match *d {
            ContinuousJson::Identity => ContinuousDeformation::Identity,
            ContinuousJson::Q { lambda } => ContinuousDeformation::Q { lambda },
            ContinuousJson::Harmonious => ContinuousDeformation::Harmonious,
            ContinuousJson::GammaFactorial => ContinuousDeformation::GammaFactorial,
        }),
        _ => return Err(CliError::Usage("system file: give exactly one of omega_exprs, q_lambda, deformation".into())),
    };
    Ok(ClassicalSystem::uniform(file.modes, law)?)
}

fn orbit_csv(orbit: &ClassicalOrbit<f64>, modes: usize) -> String {
    let mut header = String::from("t");
    for i in 1..=modes {
        let _ = write!(header, ",x{i},y{i}");
    }
    let rows = orbit
        .times
        .iter()
        .zip(&orbit.states)
        .map(|(t, s)| std::iter::once(f(*t)).chain(s.iter().map(|v| f(*v))).collect::<Vec<_>>());
    csv(&header, rows)
}

fn measure_file(path: &Path) -> Result<RadialMeasure<f64>, CliError> {
    let text = read(path)?;
    let (mut rho, mut weight) = (Vec::new(), Vec::new());
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (k == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let bad = || CliError::Usage(format!("{}:{}: expected 'rho,weight'", path.display(), k + 1));
        let mut parts = line.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        rho.push(a.trim().parse::<f64>().map_err(|_| bad())?);
        weight.push(b.trim().parse::<f64>().map_err(|_| bad())?);
    }
    Ok(RadialMeasure::sampled(rho, weight)?)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config(&cli.run)?;
    match cli.command {
        Command::State { source, time, output } => {
            let mut s = load_state(&source, &cfg)?;
            if let Some(t) = time {
                s = evolve(&s, t)?;
            }
            emit(output.out.as_ref(), &to_json(&StateFile::from_state(&s))?)
        }
        Command::Evolve { source, time, output } => {
            let s = evolve(&load_state(&source, &cfg)?, time)?;
            emit(output.out.as_ref(), &to_json(&StateFile::from_state(&s))?)
        }
        Command::PhotonStats { source, format, output } => {
            let s = load_state(&source, &cfg)?;
            let st = photon_stats(&s);
            let text = match format {
                Format::Csv => csv("n,p", st.distribution.iter().enumerate().map(|(n, p)| vec![n.to_string(), f(*p)])),
                Format::Json => to_json(&json!({
                    "state": state_summary(&s),
                    "mean": st.mean,
                    "dispersion": st.dispersion,
                    "fano": st.fano,
                    "classification": st.classification,
                    "degenerate_vacuum": st.degenerate_vacuum,
                    "mean_error": st.mean_error,
                    "distribution": st.distribution,
                }))?,
            };
            emit(output.out.as_ref(), &text)
        }
        Command::Quadratures { source, radii, angles, output } => {
            if let (Some(radii), Some(angles)) = (radii, angles) {
                if source.state.is_some() || source.alpha.is_some() {
                    return Err(CliError::Usage(
                        "a polar scan takes --deformation only, not --state or --alpha".into(),
                    ));
                }
                let Some(d) = &source.deformation else {
                    return Err(CliError::Usage("a polar scan needs --deformation".into()));
                };
                if angles == 0 {
                    return Err(CliError::Usage("--angles must be positive".into()));
                }
                let radii = parse::linear_range(&radii).map_err(CliError::Usage)?;
                let phis: Vec<f64> = (0..angles).map(|k| std::f64::consts::TAU * k as f64 / angles as f64).collect();
                let points = scan_polar(&deformation(d)?, &radii, &phis, &cfg)?;
                let rows = points.iter().map(|p| {
                    let r = &p.report;
                    [p.alpha.re, p.alpha.im, r.sigma_x, r.sigma_p, r.sigma_xp, r.r, r.schrodinger_invariant]
                        .iter()
                        .map(|v| f(*v))
                        .collect()
                });
                return emit(output.out.as_ref(), &csv("re_alpha,im_alpha,sigma_x,sigma_p,sigma_xp,r,invariant", rows));
            }
            let s = load_state(&source, &cfg)?;
            let q = quadrature_report(&s)?;
            let report = json!({
                "state": state_summary(&s),
                "mean_x": q.mean_x,
                "mean_p": q.mean_p,
                "sigma_x": q.sigma_x,
                "sigma_p": q.sigma_p,
                "sigma_xp": q.sigma_xp,
                "r": q.r,
                "schrodinger_invariant": q.schrodinger_invariant,
                "squeezed_x": q.squeezed_x,
                "squeezed_p": q.squeezed_p,
                "mu_x": q.mu_x,
                "nu_x": q.nu_x,
                "mu_p": q.mu_p,
                "nu_p": q.nu_p,
                "hermiticity_residual": q.hermiticity_residual,
            });
            emit(output.out.as_ref(), &to_json(&report)?)
        }
        Command::Wigner { source, grid: g, check_reality, out } => {
            let s = load_state(&source, &cfg)?;
            let g = grid(&g)?;
            let field = if check_reality { wigner_naive(&s, &g)? } else { wigner(&s, &g) };
            write_field(&field, &s, "wigner", "x,p,value", 1.0, &out)
        }
        Command::Husimi { source, grid: g, out } => {
            let s = load_state(&source, &cfg)?;
            let field = husimi(&s, &grid(&g)?);
            write_field(&field, &s, "husimi", "re_z,im_z,value", std::f64::consts::FRAC_1_SQRT_2, &out)
        }
        Command::TwoMode { deformation: d1, deformation2, alpha1, alpha2, kind, format, output } => {
            let spec1 = deformation(&d1)?;
            let (a1, a2) = (amplitude("alpha1", &alpha1)?, amplitude("alpha2", &alpha2)?);
            let state = match kind {
                TwoModeKindArg::Joint => {
                    if deformation2.is_some() {
                        return Err(CliError::Usage("--deformation2 applies to product states only".into()));
                    }
                    build_two_mode_joint(&spec1, a1, a2, &cfg)?
                }
                TwoModeKindArg::Product => {
                    let spec2 = match &deformation2 {
                        Some(d) => deformation(d)?,
                        None => spec1.clone(),
                    };
                    build_two_mode_product(&spec1, &spec2, a1, a2, &cfg)?
                }
            };
            let st = two_mode_distribution(&state);
            let top = state.truncation().n;
            let text = match format {
                Format::Csv => {
                    let rows = st
                        .joint
                        .iter_indexed()
                        .filter(|(i, k, _)| kind == TwoModeKindArg::Product || i + k <= top)
                        .map(|(i, k, p)| vec![i.to_string(), k.to_string(), f(*p)]);
                    csv("n1,n2,p", rows)
                }
                Format::Json => {
                    let (s1, s2) = state.specs();
                    let t = state.truncation();
                    to_json(&json!({
                        "kind": match kind { TwoModeKindArg::Joint => "joint", TwoModeKindArg::Product => "product" },
                        "alpha1": ComplexJson::from(a1),
                        "alpha2": ComplexJson::from(a2),
                        "spec1": s1,
                        "spec2": s2,
                        "mean1": st.mean1,
                        "mean2": st.mean2,
                        "covariance": st.covariance,
                        "truncation": {"n": t.n, "tail_bound": t.tail_bound, "converged": t.converged},
                        "marginal1": st.marginal1,
                        "marginal2": st.marginal2,
                    }))?
                }
            };
            emit(output.out.as_ref(), &text)
        }
        Command::Thermo { deformation: d, omega, temps, output } => {
            let spec = deformation(&d)?;
            let ts = temperatures(&temps)?;
            let points = thermo_sweep(&spec, omega, &ts, cfg.tol)?;
            let mut rows = Vec::with_capacity(points.len());
            for p in &points {
                let pert = match spec.kind() {
                    DeformationKind::Identity => bose_einstein(omega / p.temperature),
                    DeformationKind::QDeform => {
                        q_planck_perturbative(spec.lambda().unwrap_or(0.0), omega, p.temperature)?
                    }
                    _ => f64::NAN,
                };
                rows.push(vec![f(p.temperature), f(p.z), f(p.ln_z), f(p.specific_heat), f(p.mean_n_exact), f(pert)]);
            }
            emit(output.out.as_ref(), &csv("T,Z,lnZ,C,mean_n_exact,mean_n_perturbative", rows))
        }
        Command::Planck { lambda, omega, temps, output } => {
            let spec = if lambda == 0.0 { DeformationSpec::identity() } else { DeformationSpec::q_deform(lambda)? };
            let mut rows = Vec::new();
            for t in temperatures(&temps)? {
                if !(t > 0.0) {
                    return Err(domain(fosc::thermo::ThermoError::NonpositiveTemperature(t)));
                }
                let x = omega / t;
                rows.push(vec![
                    f(t),
                    f(bose_einstein(x)),
                    f(q_planck_perturbative(lambda, omega, t)?),
                    f(deformed_bose_perturbative(lambda, x)?),
                    f(thermal_mean_n(&spec, omega, 1.0 / t, cfg.tol)?),
                ]);
            }
            let header = "T,bose,q_planck_perturbative,deformed_bose_perturbative,mean_n_exact";
            emit(output.out.as_ref(), &csv(header, rows))
        }
        Command::Classical { system: path, method, output } => {
            let file: SystemFile = from_json(&path.display().to_string(), &read(&path)?)?;
            let sys = system(&file)?;
            if file.initial.len() != 2 * file.modes {
                return Err(CliError::Usage(format!(
                    "system file: initial has {} coordinates but modes = {} needs {}",
                    file.initial.len(),
                    file.modes,
                    2 * file.modes
                )));
            }
            let orbit = match method {
                MethodArg::Rk4 => rk4_orbit(&sys, &file.initial, file.dt, file.t_max)?,
                MethodArg::Exact => exact_orbit(&sys, &file.initial, &step_times(file.dt, file.t_max)?)?,
            };
            emit(output.out.as_ref(), &orbit_csv(&orbit, file.modes))
        }
        Command::Moments { deformation: d, measure, flat, rho_max, points, moments, output } => {
            let spec = deformation(&d)?;
            let m = match (measure, flat) {
                (Some(path), _) => measure_file(&path)?,
                (None, Some(v)) => RadialMeasure::from_fn(0.0, rho_max, points, |_| v)?,
                (None, None) => return Err(CliError::Usage("one of --measure or --flat is required".into())),
            };
            let r = moment_residuals(&spec, &m, moments, &cfg)?;
            emit(output.out.as_ref(), &csv("n,residual", r.iter().enumerate().map(|(n, v)| vec![n.to_string(), f(*v)])))
        }
        Command::DeformInfo { deformation: d, k, omega, output } => {
            let spec = deformation(&d)?;
            let mut rows = Vec::with_capacity(k + 1);
            let mut factorial = 1.0;
            for n in 0..=k {
                let fv = spec.eval_f(n)?;
                if n > 0 {
                    factorial *= fv;
                }
                let w = if n == 0 { f64::NAN } else { spec.transition_frequency(n)? };
                rows.push(vec![
                    n.to_string(),
                    f(fv),
                    f(factorial),
                    f(spec.commutator_f(n)?),
                    f(spec.energy_level(omega, n)?),
                    f(w),
                ]);
            }
            emit(output.out.as_ref(), &csv("n,f,f_factorial,F,E,omega", rows))
        }
    }
}
