//! Command-line front end for `igk-core`.
//!
//! Every command produces a report that is rendered as JSON or CSV. Rendering
//! is deterministic: the same arguments give the same bytes.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use igk_core::geometry::{christoffel_alpha, curvature_tensor, duality_residual, fisher_metric};
use igk_core::oscillator::{gaussian_spectrum_probability, oscillator_expectation};
use igk_core::spin::{q_matrix, spin_probabilities, stern_gerlach_transition, SphereKahlerFunction, SpherePoint};
use igk_core::verify::{run_suite, Suite, TolProfile, VerifyOptions, VerifyReport};
use igk_core::{ExponentialFamilySpec, GaussianLaw, MeasuredSpace, PlaneKahlerFunction, PlanePoint};

pub mod schema;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when a verification suite fails.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit code for usage, parse and input errors.
pub const EXIT_USAGE: i32 = 2;
/// Environment variable selecting the default tolerance profile.
pub const TOL_PROFILE_ENV: &str = "IGK_TOL_PROFILE";

#[derive(Debug, Parser)]
#[command(
    name = "igk",
    version,
    about = "Information geometry and Kählerification of exponential families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect an exponential family.
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Fisher metric, alpha-connection and curvature at a point.
    Geometry {
        #[command(subcommand)]
        action: GeometryAction,
    },
    /// Spin spectra, probabilities and representation matrices.
    Spin {
        #[command(subcommand)]
        action: SpinAction,
    },
    /// Harmonic-oscillator quantization on the plane.
    Oscillator {
        #[command(subcommand)]
        action: OscillatorAction,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum OscillatorAction {
    /// Coherent-state expectation and outcome law of `f = c1 + cx x + cy y + cr (x^2 + y^2)/2`.
    Show {
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Plane point `x,y`; repeat for several points.
        #[arg(long, allow_hyphen_values = true, required = true)]
        point: Vec<String>,
        /// `c1,cx,cy,cr`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
}

#[derive(Debug, Args, Clone)]
pub struct FamilyRef {
    /// Builtin family name, e.g. `binomial:2`.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub family: Option<String>,
    /// Path to a JSON family spec file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Natural parameter `v1,v2,..`; repeat for several points.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum FamilyAction {
    /// Dimension, chart domains, densities and expectation parameters.
    Show(FamilyRef),
}

#[derive(Debug, Subcommand)]
pub enum GeometryAction {
    /// Metric, Christoffel symbols and curvature at each point.
    Show {
        #[command(flatten)]
        family: FamilyRef,
        /// Connection parameter.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpinAction {
    /// Outcome table for a spin measurement.
    ///
    /// With `--point`, the state is that sphere point and `--axis` is measured.
    /// With `--axis2`, a first device along `--axis` prepares eigenstate `--m1`
    /// (default: maximum spin) and a second device along `--axis2` measures.
    Table(SpinTableArgs),
    /// The representation matrix `Q(f)` for `f = u0 + u x + v y + w z`.
    Qmatrix {
        #[arg(long)]
        n: usize,
        /// `(u, v, w)`.
        #[arg(long, allow_hyphen_values = true)]
        axis: String,
        /// Constant term.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u0: f64,
    },
}

#[derive(Debug, Args, Clone)]
pub struct SpinTableArgs {
    #[arg(long)]
    pub n: usize,
    /// Measured axis, or the first device's axis in two-device mode.
    #[arg(long, allow_hyphen_values = true)]
    pub axis: String,
    /// State on the sphere `x,y,z`.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "axis2",
        required_unless_present = "axis2"
    )]
    pub point: Option<String>,
    /// Second device axis.
    #[arg(long, allow_hyphen_values = true)]
    pub axis2: Option<String>,
    /// Eigenvalue index prepared by the first device, `0..=n`.
    #[arg(long, requires = "axis2")]
    pub m1: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance profile; overrides the environment default.
    #[arg(long, value_parser = ["strict", "fd"])]
    pub profile: Option<String>,
    /// Adds this amount to one entry of every representation matrix.
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub perturb_q: f64,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<igk_core::Error> for CliError {
    fn from(e: igk_core::Error) -> Self {
        Self::usage(e.to_string())
    }
}

/// Rendered output and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

/// Executes a parsed command. `tol_profile` is the raw value of
/// [`TOL_PROFILE_ENV`], if set.
pub fn execute(cli: &Cli, tol_profile: Option<&str>) -> Result<Outcome, CliError> {
    let format = cli.output.format;
    match &cli.command {
        Command::Family {
            action: FamilyAction::Show(r),
        } => ok(format, family_show(r)?),
        Command::Geometry {
            action: GeometryAction::Show { family, alpha },
        } => ok(format, geometry_show(family, *alpha)?),
        Command::Spin {
            action: SpinAction::Table(args),
        } => ok(format, spin_table(args)?),
        Command::Spin {
            action: SpinAction::Qmatrix { n, axis, u0 },
        } => ok(format, spin_qmatrix(*n, axis, *u0)?),
        Command::Oscillator {
            action: OscillatorAction::Show { hbar, point, coeffs },
        } => ok(format, oscillator_show(*hbar, point, coeffs)?),
        Command::Verify(args) => {
            let profile = match args.profile.as_deref().or(tol_profile) {
                None => TolProfile::Strict,
                Some(s) => s
                    .parse()
                    .map_err(|e: igk_core::Error| CliError::usage(format!("{TOL_PROFILE_ENV}: {e}")))?,
            };
            let suite: Suite = args.suite.parse()?;
            let report = run_suite(
                suite,
                &VerifyOptions {
                    seed: args.seed,
                    profile,
                    q_perturbation: args.perturb_q,
                },
            );
            let code = if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
            let body = render(format, &Report::Verify(report))?;
            Ok(Outcome { body, code })
        }
    }
}

fn ok(format: Format, report: Report) -> Result<Outcome, CliError> {
    Ok(Outcome {
        body: render(format, &report)?,
        code: EXIT_OK,
    })
}

// ---------------------------------------------------------------------------
// Reports

/// Any command's structured result.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    Family(FamilyReport),
    Geometry(GeometryReport),
    SpinTable(SpinTableReport),
    QMatrix(QMatrixReport),
    Oscillator(OscillatorReport),
    Verify(VerifyReport),
}

#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub command: &'static str,
    pub family: String,
    pub dim: usize,
    pub sample_space: SampleSpace,
    pub natural_domain: String,
    pub expectation_domain: String,
    pub points: Vec<FamilyPoint>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSpace {
    Finite { labels: Vec<String>, values: Vec<f64> },
    RealLine { quadrature_order: usize },
}

#[derive(Debug, Serialize)]
pub struct FamilyPoint {
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
    pub psi: f64,
    pub density: Vec<DensityEntry>,
}

#[derive(Debug, Serialize)]
pub struct DensityEntry {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct GeometryReport {
    pub command: &'static str,
    pub family: String,
    pub alpha: f64,
    pub points: Vec<GeometryPoint>,
}

#[derive(Debug, Serialize)]
pub struct GeometryPoint {
    pub theta: Vec<f64>,
    /// Row-major `h_ij`.
    pub metric: Vec<Vec<f64>>,
    /// `Gamma_{ij,k}` indexed `[i][j][k]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    pub curvature_max_abs: f64,
    pub duality_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct SpinTableReport {
    pub command: &'static str,
    pub n: usize,
    pub mode: &'static str,
    pub axis: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis2: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<usize>,
    pub rows: Vec<SpinRow>,
}

#[derive(Debug, Serialize)]
pub struct SpinRow {
    pub k: usize,
    pub lambda: f64,
    pub probability: f64,
}

#[derive(Debug, Serialize)]
pub struct QMatrixReport {
    pub command: &'static str,
    pub n: usize,
    pub function: SphereKahlerFunction,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct OscillatorReport {
    pub command: &'static str,
    pub hbar: f64,
    pub function: PlaneKahlerFunction,
    pub points: Vec<OscillatorPoint>,
}

#[derive(Debug, Serialize)]
pub struct OscillatorPoint {
    pub point: PlanePoint,
    pub value: f64,
    pub expectation: f64,
    pub residual: f64,
    /// Absent for functions with a quadratic term.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<GaussianLaw>,
}

// ---------------------------------------------------------------------------
// Commands

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--{flag}: '{s}' is not a number")))
        })
        .collect()
}

fn parse_triple(flag: &str, text: &str) -> Result<[f64; 3], CliError> {
    let v = parse_list(flag, text)?;
    <[f64; 3]>::try_from(v.as_slice())
        .map_err(|_| CliError::usage(format!("--{flag} needs three comma-separated values")))
}

fn load_family(r: &FamilyRef) -> Result<ExponentialFamilySpec, CliError> {
    match (&r.family, &r.spec) {
        (Some(name), None) => Ok(ExponentialFamilySpec::builtin(name)?),
        (None, Some(path)) => {
            ExponentialFamilySpec::from_path(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
        _ => Err(CliError::usage("give exactly one of --family or --spec")),
    }
}

fn thetas(spec: &ExponentialFamilySpec, r: &FamilyRef) -> Result<Vec<Vec<f64>>, CliError> {
    if r.theta.is_empty() {
        return Ok(vec![spec.default_theta()]);
    }
    r.theta
        .iter()
        .map(|t| {
            let theta = parse_list("theta", t)?;
            if theta.len() != spec.dim() {
                return Err(CliError::usage(format!(
                    "--theta has {} values, family {} has dimension {}",
                    theta.len(),
                    spec.name(),
                    spec.dim()
                )));
            }
            Ok(theta)
        })
        .collect()
}

/// Sample points for real-line densities.
const REAL_LINE_SAMPLES: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn family_show(r: &FamilyRef) -> Result<Report, CliError> {
    let spec = load_family(r)?;
    let sample_space = match spec.space() {
        MeasuredSpace::Finite { labels, values } => SampleSpace::Finite {
            labels: labels.clone(),
            values: values.clone(),
        },
        MeasuredSpace::RealLine { quadrature_order } => SampleSpace::RealLine {
            quadrature_order: *quadrature_order,
        },
    };
    let mut points = Vec::new();
    for theta in thetas(&spec, r)? {
        let density = match spec.space() {
            MeasuredSpace::Finite { labels, values } => labels
                .iter()
                .zip(values)
                .map(|(l, &x)| {
                    Ok(DensityEntry {
                        x,
                        label: Some(l.clone()),
                        p: spec.density(&theta, x)?,
                    })
                })
                .collect::<Result<Vec<_>, igk_core::Error>>()?,
            MeasuredSpace::RealLine { .. } => REAL_LINE_SAMPLES
                .iter()
                .map(|&x| {
                    Ok(DensityEntry {
                        x,
                        label: None,
                        p: spec.density(&theta, x)?,
                    })
                })
                .collect::<Result<Vec<_>, igk_core::Error>>()?,
        };
        points.push(FamilyPoint {
            eta: spec.natural_to_expectation(&theta)?,
            psi: spec.log_partition(&theta)?,
            theta,
            density,
        });
    }
    Ok(Report::Family(FamilyReport {
        command: "family show",
        family: spec.name().to_string(),
        dim: spec.dim(),
        sample_space,
        natural_domain: spec.domain_description(),
        expectation_domain: spec.expectation_domain_description(),
        points,
    }))
}

fn geometry_show(r: &FamilyRef, alpha: f64) -> Result<Report, CliError> {
    let spec = load_family(r)?;
    let n = spec.dim();
    let mut points = Vec::new();
    for theta in thetas(&spec, r)? {
        let h = fisher_metric(&spec, &theta)?;
        let gamma = christoffel_alpha(&spec, &theta, alpha)?;
        points.push(GeometryPoint {
            metric: (0..n).map(|i| (0..n).map(|j| h.entries[(i, j)]).collect()).collect(),
            christoffel: (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| gamma.get(i, j, k)).collect()).collect())
                .collect(),
            curvature_max_abs: curvature_tensor(&spec, &theta, alpha)?.max_abs(),
            duality_residual: duality_residual(&spec, &theta, alpha)?,
            theta,
        });
    }
    Ok(Report::Geometry(GeometryReport {
        command: "geometry show",
        family: spec.name().to_string(),
        alpha,
        points,
    }))
}

fn axis_function(flag: &str, text: &str) -> Result<SphereKahlerFunction, CliError> {
    let [u, v, w] = parse_triple(flag, text)?;
    if u == 0.0 && v == 0.0 && w == 0.0 {
        return Err(CliError::usage(format!("--{flag} must be nonzero")));
    }
    Ok(SphereKahlerFunction::new(0.0, u, v, w))
}

fn spin_table(args: &SpinTableArgs) -> Result<Report, CliError> {
    let n = args.n;
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let f1 = axis_function("axis", &args.axis)?;
    let axis = [f1.u, f1.v, f1.w];
    if let Some(axis2) = &args.axis2 {
        let f2 = axis_function("axis2", axis2)?;
        let m1 = args.m1.unwrap_or(n);
        if m1 > n {
            return Err(CliError::usage(format!("--m1 must be in 0..={n}")));
        }
        let probabilities = stern_gerlach_transition(n, f1, m1, f2)?;
        let lambdas = igk_core::spin::spin_spectrum(n, f2)?;
        return Ok(Report::SpinTable(SpinTableReport {
            command: "spin table",
            n,
            mode: "two_device",
            axis,
            point: None,
            axis2: Some([f2.u, f2.v, f2.w]),
            m1: Some(m1),
            rows: rows(&lambdas, &probabilities),
        }));
    }
    let point = args
        .point
        .as_deref()
        .ok_or_else(|| CliError::usage("give --point or --axis2"))?;
    let [x, y, z] = parse_triple("point", point)?;
    let s = SpherePoint::normalized(x, y, z)?;
    let law = spin_probabilities(n, f1, s)?;
    Ok(Report::SpinTable(SpinTableReport {
        command: "spin table",
        n,
        mode: "state",
        axis,
        point: Some([s.x, s.y, s.z]),
        axis2: None,
        m1: None,
        rows: rows(&law.eigenvalues, &law.probabilities),
    }))
}

fn rows(lambdas: &[f64], probabilities: &[f64]) -> Vec<SpinRow> {
    lambdas
        .iter()
        .zip(probabilities)
        .enumerate()
        .map(|(k, (&lambda, &probability))| SpinRow { k, lambda, probability })
        .collect()
}

fn spin_qmatrix(n: usize, axis: &str, u0: f64) -> Result<Report, CliError> {
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let [u, v, w] = parse_triple("axis", axis)?;
    let function = SphereKahlerFunction::new(u0, u, v, w);
    let q = q_matrix(n, function)?.q;
    let m = n + 1;
    Ok(Report::QMatrix(QMatrixReport {
        command: "spin qmatrix",
        n,
        function,
        re: (0..m).map(|i| (0..m).map(|j| q[(i, j)].re).collect()).collect(),
        im: (0..m).map(|i| (0..m).map(|j| q[(i, j)].im).collect()).collect(),
    }))
}

fn oscillator_show(hbar: f64, points: &[String], coeffs: &str) -> Result<Report, CliError> {
    let c = parse_list("coeffs", coeffs)?;
    let [c1, cx, cy, cr] = <[f64; 4]>::try_from(c.as_slice())
        .map_err(|_| CliError::usage("--coeffs needs four comma-separated values"))?;
    let function = PlaneKahlerFunction::new(c1, cx, cy, cr);
    let points = points
        .iter()
        .map(|p| {
            let [x, y] = <[f64; 2]>::try_from(parse_list("point", p)?.as_slice())
                .map_err(|_| CliError::usage("--point needs two comma-separated values"))?;
            let z = PlanePoint::new(x, y);
            let expectation = oscillator_expectation(hbar, function, z)?;
            let value = function.eval(z);
            Ok(OscillatorPoint {
                point: z,
                value,
                expectation,
                residual: (value - expectation).abs(),
                law: gaussian_spectrum_probability(function, z).ok(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Report::Oscillator(OscillatorReport {
        command: "oscillator show",
        hbar,
        function,
        points,
    }))
}

// ---------------------------------------------------------------------------
// Rendering

/// 17 significant digits, locale independent.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(format: Format, report: &Report) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => render_csv(report).map_err(|e| CliError::usage(format!("CSV output failed: {e}"))),
    }
}

fn render_csv(report: &Report) -> csv::Result<String> {
    let mut prefix = String::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    match report {
        Report::Family(r) => {
            w.write_record(["point", "quantity", "index", "label", "value"])?;
            for (p, point) in r.points.iter().enumerate() {
                let p = p.to_string();
                for (i, v) in point.theta.iter().enumerate() {
                    w.write_record([p.as_str(), "theta", &i.to_string(), "", &num(*v)])?;
                }
                for (i, v) in point.eta.iter().enumerate() {
                    w.write_record([p.as_str(), "eta", &i.to_string(), "", &num(*v)])?;
                }
                w.write_record([p.as_str(), "psi", "0", "", &num(point.psi)])?;
                for (i, d) in point.density.iter().enumerate() {
                    let label = d.label.clone().unwrap_or_else(|| num(d.x));
                    w.write_record([p.as_str(), "density", &i.to_string(), &label, &num(d.p)])?;
                }
            }
        }
        Report::Geometry(r) => {
            w.write_record(["point", "quantity", "i", "j", "k", "value"])?;
            for (p, point) in r.points.iter().enumerate() {
                let p = p.to_string();
                for (i, row) in point.metric.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        w.write_record([p.as_str(), "metric", &i.to_string(), &j.to_string(), "", &num(*v)])?;
                    }
                }
                for (i, a) in point.christoffel.iter().enumerate() {
                    for (j, b) in a.iter().enumerate() {
                        for (k, v) in b.iter().enumerate() {
                            w.write_record([
                                p.as_str(),
                                "christoffel",
                                &i.to_string(),
                                &j.to_string(),
                                &k.to_string(),
                                &num(*v),
                            ])?;
                        }
                    }
                }
                w.write_record([
                    p.as_str(),
                    "curvature_max_abs",
                    "",
                    "",
                    "",
                    &num(point.curvature_max_abs),
                ])?;
                w.write_record([p.as_str(), "duality_residual", "", "", "", &num(point.duality_residual)])?;
            }
        }
        Report::SpinTable(r) => {
            w.write_record(["k", "lambda", "probability"])?;
            for row in &r.rows {
                w.write_record([row.k.to_string(), num(row.lambda), num(row.probability)])?;
            }
        }
        Report::QMatrix(r) => {
            w.write_record(["row", "col", "re", "im"])?;
            for (i, (re, im)) in r.re.iter().zip(&r.im).enumerate() {
                for (j, (a, b)) in re.iter().zip(im).enumerate() {
                    w.write_record([i.to_string(), j.to_string(), num(*a), num(*b)])?;
                }
            }
        }
        Report::Oscillator(r) => {
            w.write_record(["x", "y", "value", "expectation", "residual"])?;
            for p in &r.points {
                w.write_record([
                    num(p.point.x),
                    num(p.point.y),
                    num(p.value),
                    num(p.expectation),
                    num(p.residual),
                ])?;
            }
        }
        Report::Verify(r) => {
            prefix = format!(
                "# version={} prng={} seed={} suite={} profile={}\n",
                r.version,
                r.prng,
                r.seed,
                r.suite,
                match r.profile {
                    TolProfile::Strict => "strict",
                    TolProfile::Fd => "fd",
                }
            );
            w.write_record(["id", "samples", "residual", "tolerance", "status"])?;
            for c in &r.checks {
                w.write_record([
                    c.id.to_string(),
                    c.samples.to_string(),
                    num(c.residual),
                    num(c.tolerance),
                    if c.pass { "PASS".into() } else { "FAIL".into() },
                ])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(prefix + &String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
