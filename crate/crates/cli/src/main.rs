//! `almell`: validate presentations, decide almost-ellipticity, sample densities.
//!
//! Exit codes: 0 clean run, 1 I/O or schema error, 2 validation failure,
//! 3 equivalence violation, internal disagreement or failed gallery check.

mod input;
mod text;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use almell::decision::DecisionOptions;
use almell::ellipticity::{self, SemidirectElement};
use almell::gallery::{self, TiltFamily};
use almell::nalgebra::DVector;
use almell::solvable_group::SolvablePresentationJson;
use almell::{
    AlgebraAutomorphism, Envelope, Error, GroupPresentation, Kind, Parallelism, SemidirectGroup, SolvablePresentation,
    Tolerances,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use input::Input;

#[derive(Parser)]
#[command(name = "almell", version, about = "Decide almost-ellipticity of connected Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of Monte Carlo samples.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Standard deviation of the Gaussian on translation coordinates.
    #[arg(long, global = true, default_value_t = 1.0)]
    scale: f64,
    /// Tolerance of the spectral ellipticity test.
    #[arg(long = "tol-spectral", global = true, default_value_t = almell::ellipticity::SPECTRAL_TOL)]
    tol_spectral: f64,
    /// Largest power for power-norms (default: the input's `kmax`, else 10000).
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Worker threads for sampling (default: all cores). Reports do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check an algebra, compact part, solvable presentation or group presentation.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Weights of the torus action.
    Weights {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide whether a group presentation is openly almost-elliptic.
    Decide {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sample the density of elliptic elements, globally or near a center.
    Sample {
        #[arg(long)]
        input: PathBuf,
        /// Sample in a window of this radius around the center instead of globally.
        #[arg(long)]
        radius: Option<f64>,
        /// Translation part of the center, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        center_translation: Vec<f64>,
        /// Torus coordinates of the center, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        center_torus: Vec<f64>,
        /// Component index of the center.
        #[arg(long)]
        component: Option<usize>,
    },
    /// Solve delta(x) = x^-1 phi(x) = v in a solvable group.
    SolveDelta {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate all seven equivalent conditions and check that they agree.
    Battery {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the bundled examples and their checks.
    Gallery { name: Option<String> },
    /// sup_k ||t^k - 1|| over a tilting-line family of unitary elements.
    PowerNorms {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Schema { path: String, message: String },
    Core(Error),
    /// A report was produced but it records a failure.
    Failed { code: u8, message: String },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { path, message } => CliError::Schema { path, message },
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Schema { .. } => 1,
            CliError::Core(Error::UnknownGalleryEntry(_)) => 1,
            CliError::Core(Error::EquivalenceViolation(_) | Error::InternalDisagreement(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Failed { code, .. } => *code,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => m.clone(),
            CliError::Schema { path, message } => format!("schema error at `{path}`: {message}"),
            CliError::Core(e) => e.to_string(),
            CliError::Failed { message, .. } => message.clone(),
        }
    }
}

struct Outcome {
    command: &'static str,
    result: Value,
    text: String,
    /// Nonzero when the report itself records a failure.
    failure: Option<(u8, String)>,
}

impl Outcome {
    fn ok(command: &'static str, result: Value, text: String) -> Self {
        Outcome {
            command,
            result,
            text,
            failure: None,
        }
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn options(c: &Common) -> DecisionOptions {
    DecisionOptions {
        samples: c.samples,
        seed: c.seed,
        translation_scale: c.scale,
        parallelism: c.workers.map(Parallelism::with_workers).unwrap_or_default(),
        density_check: true,
    }
}

fn validate(path: &PathBuf) -> Result<Outcome, CliError> {
    let (result, accepted) = match input::classify(input::read_json(path)?)? {
        Input::Presentation(g) => {
            let v = g.validate()?;
            (to_value(&v), v.accepted)
        }
        Input::Compact(k) => {
            let v = k.validate()?;
            (to_value(&v), v.accepted)
        }
        Input::Solvable(p) => {
            let v = p.validate()?;
            (to_value(&v), v.accepted)
        }
        Input::Algebra { algebra, exact } => {
            let v = algebra.validate();
            let mut out = json!({ "validation": v });
            if v.accepted {
                let series = algebra.derived_series()?;
                let radical = algebra.radical()?;
                let killing = algebra.killing_form();
                let (pos, neg, zero) = killing.signature();
                out["derived_series_dims"] = json!(series.dims());
                out["solvable"] = json!(series.solvable);
                out["radical_dim"] = json!(radical.dim());
                out["killing_signature"] = json!({ "positive": pos, "negative": neg, "zero": zero });
                out["semisimple_quotient_compact"] = json!(algebra.semisimple_quotient_is_compact()?);
            }
            if let Some(x) = exact {
                let (dims, solvable) = x.derived_series_dims();
                out["exact"] = json!({
                    "valid": x.is_valid(),
                    "derived_series_dims": dims,
                    "solvable": solvable,
                    "radical_dim": x.radical().len(),
                });
            }
            (out, v.accepted)
        }
    };
    let text = format!("accepted: {accepted}\n{}", text::fields(&result));
    let mut o = Outcome::ok("validate", result, text);
    if !accepted {
        o.failure = Some((2, "input failed validation".into()));
    }
    Ok(o)
}

fn weights(path: &PathBuf) -> Result<Outcome, CliError> {
    let result = match input::classify(input::read_json(path)?)? {
        Input::Presentation(g) => to_value(&g.weight_report()?),
        Input::Compact(k) => to_value(&GroupPresentation::vector(k).weight_report()?),
        _ => {
            return Err(CliError::Schema {
                path: "<root>".into(),
                message: "weights needs a compact part or a group presentation".into(),
            })
        }
    };
    let text = text::weights(&result);
    Ok(Outcome::ok("weights", result, text))
}

fn decide(path: &PathBuf, c: &Common) -> Result<Outcome, CliError> {
    let g = input::presentation(input::read_json(path)?)?;
    let report = g.decide(&options(c))?;
    let result = to_value(&report);
    let text = text::decision(&result);
    Ok(Outcome::ok("decide", result, text))
}

struct Center<'a> {
    radius: Option<f64>,
    translation: &'a [f64],
    torus: &'a [f64],
    component: Option<usize>,
}

fn sample(path: &PathBuf, center: Center<'_>, c: &Common) -> Result<Outcome, CliError> {
    let g = input::presentation(input::read_json(path)?)?;
    let opts = options(c);
    let group = match &g.body {
        almell::decision::Body::Vector => SemidirectGroup::Vector(&g.compact),
        almell::decision::Body::Solvable(p) => SemidirectGroup::Solvable {
            presentation: p,
            action: &g.compact,
        },
        almell::decision::Body::General { .. } => {
            return Err(Error::Precondition("sampling needs a vector_by_compact or solvable_by_compact presentation".into()).into())
        }
    };
    let mut result = json!({});
    if let Some(radius) = center.radius {
        let translation = if center.translation.is_empty() {
            vec![0.0; group.translation_dim()]
        } else {
            center.translation.to_vec()
        };
        let torus = if center.torus.is_empty() {
            vec![0.0; group.torus_rank()]
        } else {
            center.torus.to_vec()
        };
        let e = SemidirectElement::new(translation, torus, center.component)?;
        let d = ellipticity::local_elliptic_density(group, &e, radius, opts.samples, opts.seed, opts.parallelism)?;
        result["local"] = to_value(&d);
    } else {
        let d = ellipticity::elliptic_density(group, opts.samples, opts.seed, opts.translation_scale, opts.parallelism)?;
        if g.kind() == Kind::VectorByCompact {
            let s = ellipticity::spectral_elliptic_density(
                &g.compact,
                opts.samples,
                opts.seed,
                opts.translation_scale,
                c.tol_spectral,
                opts.parallelism,
            )?;
            if s.undetermined == 0 && d.undetermined == 0 && s.hits != d.hits {
                return Err(Error::InternalDisagreement(format!(
                    "image test counts {} elliptic samples, spectral test counts {}",
                    d.hits, s.hits
                ))
                .into());
            }
            result["spectral"] = to_value(&s);
        }
        if g.compact.torus.rank() > 0 {
            let fr = g
                .compact
                .torus
                .fr_density_estimate(opts.samples, opts.seed, opts.parallelism)?;
            result["free_action"] = to_value(&fr);
        }
        result["elliptic"] = to_value(&d);
    }
    let text = text::fields(&result);
    Ok(Outcome::ok("sample", result, text))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaInput {
    presentation: SolvablePresentationJson,
    automorphism: Vec<Vec<f64>>,
    target: Vec<f64>,
}

fn solve_delta(path: &PathBuf) -> Result<Outcome, CliError> {
    let j: DeltaInput = input::parse(input::read_json(path)?)?;
    let p = SolvablePresentation::try_from(j.presentation)?;
    let phi = AlgebraAutomorphism::new(almell::linalg::matrix_from_rows(&j.automorphism, p.dim())?)?;
    let check = p.check_automorphism(&phi)?;
    if !check.accepted {
        return Err(Error::InvalidPresentation(format!(
            "automorphism rejected (bracket residual {:e})",
            check.jacobi_residual
        ))
        .into());
    }
    let v = p.element(DVector::from_vec(j.target))?;
    let s = p.delta_solve(&phi, &v)?;
    let result = to_value(&s);
    let text = format!(
        "x = {:?}\nresidual = {:e}\niterations = {}\n",
        s.x.coords().as_slice(),
        s.residual,
        s.iterations
    );
    Ok(Outcome::ok("solve-delta", result, text))
}

fn battery(path: &PathBuf, c: &Common) -> Result<Outcome, CliError> {
    let g = input::presentation(input::read_json(path)?)?;
    let b = g.equivalence_battery(&options(c))?;
    let result = to_value(&b);
    let text = text::battery(&result);
    Ok(Outcome::ok("battery", result, text))
}

fn run_gallery(name: Option<&str>, c: &Common) -> Result<Outcome, CliError> {
    let r = gallery::run(name, &options(c))?;
    let result = to_value(&r);
    let text = text::gallery(&result);
    let mut o = Outcome::ok("gallery", result, text);
    if !r.passed {
        let failed: Vec<&str> = r.entries.iter().filter(|e| !e.passed).map(|e| e.name).collect();
        o.failure = Some((3, format!("gallery checks failed: {}", failed.join(", "))));
    }
    Ok(o)
}

fn power_norms(path: &PathBuf, c: &Common) -> Result<Outcome, CliError> {
    let family: TiltFamily = input::parse(input::read_json(path)?)?;
    let kmax = c.kmax.or(family.kmax).unwrap_or(gallery::DEFAULT_KMAX);
    let rows = family.evaluate(kmax)?;
    let result = json!({ "n": family.n, "tilts": family.tilts, "kmax": kmax, "rows": rows });
    let text = rows
        .iter()
        .map(|r| format!("theta = {}: {:?}\n", r.theta, r.sup_norms))
        .collect();
    Ok(Outcome::ok("power-norms", result, text))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate { input } => validate(input),
        Command::Weights { input } => weights(input),
        Command::Decide { input } => decide(input, c),
        Command::Sample {
            input,
            radius,
            center_translation,
            center_torus,
            component,
        } => sample(
            input,
            Center {
                radius: *radius,
                translation: center_translation,
                torus: center_torus,
                component: *component,
            },
            c,
        ),
        Command::SolveDelta { input } => solve_delta(input),
        Command::Battery { input } => battery(input, c),
        Command::Gallery { name } => run_gallery(name.as_deref(), c),
        Command::PowerNorms { input } => power_norms(input, c),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Weights { .. } => "weights",
        Command::Decide { .. } => "decide",
        Command::Sample { .. } => "sample",
        Command::SolveDelta { .. } => "solve-delta",
        Command::Battery { .. } => "battery",
        Command::Gallery { .. } => "gallery",
        Command::PowerNorms { .. } => "power-norms",
    }
}

fn emit(c: &Common, body: &str) -> Result<(), CliError> {
    match &c.output {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let tolerances = Tolerances::with_spectral(c.tol_spectral);
    let (command, result, text, failure) = match dispatch(&cli) {
        Ok(o) => (o.command, o.result, o.text, o.failure),
        Err(e) => {
            let code = e.code();
            let message = e.message();
            let result = json!({ "error": { "exit_code": code, "message": message } });
            (command_name(&cli.command), result, format!("error: {message}\n"), Some((code, message)))
        }
    };
    let body = match c.format {
        Format::Json => Envelope::new(command, c.seed, c.samples, tolerances, result).to_json() + "\n",
        Format::Text => format!("{command} (seed {}, samples {})\n{text}", c.seed, c.samples),
    };
    if let Err(e) = emit(c, &body) {
        eprintln!("almell: {}", e.message());
        return ExitCode::from(1);
    }
    match failure {
        Some((code, message)) => {
            eprintln!("almell: {message}");
            ExitCode::from(code)
        }
        None => ExitCode::SUCCESS,
    }
}
