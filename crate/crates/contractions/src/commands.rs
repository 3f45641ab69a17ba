//! Command-line surface. [`run`] parses arguments, executes one command and
//! returns the emitted document with its exit code; `main` only does the
//! final write.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use contractions_core::charfn::{analytic_range_span, pure_split, sample_charfn, CharFnSample};
use contractions_core::contraction::{unitary_cnu_split, unitary_multiplicity, Contraction};
use contractions_core::dilation::schaffer_dilation;
use contractions_core::fixtures::{generate, FixtureSpec};
use contractions_core::linalg::eigenvalues;
use contractions_core::order::{decide, unitarily_equivalent, unitarily_equivalent_via_charfn, Relation};
use contractions_core::verdict::Status;
use contractions_core::{ComplexMatrix, Tolerance};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::config::{Config, Overrides};
use crate::document::{complex, emit, matrix, named_matrices, parse_typed, parse_value, real, Input};
use crate::error::{CliError, Result};
use crate::report::{relation_verdict, subspace, verdict};
use crate::suites::{run_suite, SUITES};

pub const FORMAT: &str = "contractions";
pub const VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_COMPUTATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "contractions", version, about = "Order relations, characteristic functions and dilations of finite contractions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative rank threshold.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_rank: Option<f64>,
    /// Absolute residual threshold for witnesses and identities.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_residual: Option<f64>,
    /// Interior sample radii, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "R,...")]
    pub grid_radii: Option<Vec<f64>>,
    /// Angles per interior radius.
    #[arg(long, global = true, value_name = "N")]
    pub grid_angles: Option<usize>,
    /// Boundary sample angles.
    #[arg(long, global = true, value_name = "N")]
    pub boundary_angles: Option<usize>,
    /// Radial offset used for boundary limits.
    #[arg(long, global = true, value_name = "EPS")]
    pub boundary_eps: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Multi-start count for the searches.
    #[arg(long, global = true, value_name = "N")]
    pub starts: Option<usize>,
    /// Iterations per search start.
    #[arg(long, global = true, value_name = "ITERS")]
    pub budget: Option<usize>,
    /// Dilation depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Longest word used for trace obstructions.
    #[arg(long, global = true, value_name = "N")]
    pub word_length: Option<usize>,
    /// Configuration file: a bare config object or any document with a
    /// `config` key. Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the document here instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            rank_tol: self.tol_rank,
            residual_tol: self.tol_residual,
            grid_radii: self.grid_radii.clone(),
            grid_angles: self.grid_angles,
            boundary_angles: self.boundary_angles,
            boundary_eps: self.boundary_eps,
            seed: self.seed,
            starts: self.starts,
            max_iters: self.budget,
            depth: self.depth,
            word_length: self.word_length,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a contraction and report defects, the unitary/c.n.u. split
    /// and the multiplicity of the unitary part.
    Analyze {
        /// Input document, `-` for stdin.
        input: PathBuf,
        #[arg(long, default_value = "A")]
        name: String,
    },
    /// Sample the characteristic function and split off its constant part.
    Charfn {
        input: PathBuf,
        #[arg(long, default_value = "A")]
        name: String,
    },
    /// Decide order relations between two contractions.
    Order {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = RelationArg::Below)]
        relation: RelationArg,
        #[arg(long, default_value = "A")]
        a_name: String,
        #[arg(long, default_value = "B")]
        b_name: String,
    },
    /// Decide unitary equivalence.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Compare characteristic functions (c.n.u. inputs only).
        #[arg(long)]
        charfn: bool,
        #[arg(long, default_value = "A")]
        a_name: String,
        #[arg(long, default_value = "B")]
        b_name: String,
    },
    /// Build the truncated minimal unitary dilation and check it.
    Dilate {
        input: PathBuf,
        #[arg(long, default_value = "A")]
        name: String,
    },
    /// Run a seeded theorem suite.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
    },
    /// Emit fixture matrices.
    Gen {
        #[arg(value_enum)]
        kind: FixtureKind,
        #[arg(long, short, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 2)]
        common: usize,
        #[arg(long, default_value_t = 2)]
        swapped: usize,
        #[arg(long, default_value_t = 1)]
        defect: usize,
        #[arg(long, default_value_t = 0.9)]
        sigma_max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Below,
    ReducingBelow,
    MutuallyBelow,
    MutuallyReducing,
    All,
}

impl RelationArg {
    fn relations(self) -> Vec<Relation> {
        match self {
            RelationArg::Below => vec![Relation::Below],
            RelationArg::ReducingBelow => vec![Relation::ReducingBelow],
            RelationArg::MutuallyBelow => vec![Relation::MutuallyBelow],
            RelationArg::MutuallyReducing => vec![Relation::MutuallyReducing],
            RelationArg::All => vec![
                Relation::Below,
                Relation::ReducingBelow,
                Relation::MutuallyBelow,
                Relation::MutuallyReducing,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FixtureKind {
    JordanSum,
    TruncatedShifts,
    ConjugatedPair,
    SimPair,
    ApproxPair,
    RandomContraction,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Charfn { .. } => "charfn",
            Command::Order { .. } => "order",
            Command::Equiv { .. } => "equiv",
            Command::Dilate { .. } => "dilate",
            Command::Verify { .. } => "verify",
            Command::Gen { .. } => "gen",
        }
    }
}

/// How a command ended, before it is turned into an exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: &'static str,
    pub exit_code: i32,
    pub reason: String,
}

impl Outcome {
    fn pass(reason: impl Into<String>) -> Self {
        Outcome {
            status: "pass",
            exit_code: EXIT_PASS,
            reason: reason.into(),
        }
    }

    fn failed(reason: impl Into<String>) -> Self {
        Outcome {
            status: "fail",
            exit_code: EXIT_FAILED,
            reason: reason.into(),
        }
    }

    /// `Holds` and `Refuted` are both decided answers.
    fn from_status(status: Status, what: &str) -> Self {
        match status {
            Status::Unknown => Outcome {
                status: "unknown",
                exit_code: EXIT_UNKNOWN,
                reason: format!("{what}: undecided within budget"),
            },
            s => Outcome::pass(format!("{what}: {}", s.as_str())),
        }
    }

    fn error(e: &CliError) -> Self {
        Outcome {
            status: "error",
            exit_code: match e {
                CliError::Core(_) => EXIT_COMPUTATION,
                _ => EXIT_INPUT,
            },
            reason: e.to_string(),
        }
    }

    fn to_value(&self) -> Value {
        json!({ "status": self.status, "exit_code": self.exit_code, "reason": self.reason })
    }
}

/// Emitted text plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub document: String,
    pub exit_code: i32,
    pub output: Option<PathBuf>,
}

/// Parse `args` (including the program name) and execute the command.
/// Usage errors come back as `Err` with clap's rendering.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> std::result::Result<Response, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(execute(&cli, stdin))
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Response {
    let command = cli.command.name();
    let mut sources = Sources::new(stdin);
    let (doc, outcome) = match load_config(&cli.global, &mut sources) {
        Ok(config) => match dispatch(&cli.command, &config, &mut sources) {
            Ok((extra, outcome)) => (success_document(command, &config, extra, &outcome), outcome),
            Err(e) => (error_document(command, Some(&config), &e), Outcome::error(&e)),
        },
        Err(e) => (error_document(command, None, &e), Outcome::error(&e)),
    };
    Response {
        document: emit(&doc),
        exit_code: outcome.exit_code,
        output: cli.global.output.clone(),
    }
}

fn header(command: &str) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("format".into(), Value::from(FORMAT));
    doc.insert("version".into(), Value::from(VERSION));
    doc.insert("command".into(), Value::from(command));
    doc
}

fn success_document(command: &str, config: &Config, body: Map<String, Value>, outcome: &Outcome) -> Value {
    let mut doc = header(command);
    doc.insert("config".into(), json!(config));
    doc.extend(body);
    doc.insert("outcome".into(), outcome.to_value());
    Value::Object(doc)
}

fn error_document(command: &str, config: Option<&Config>, e: &CliError) -> Value {
    let mut doc = header(command);
    if let Some(config) = config {
        doc.insert("config".into(), json!(config));
    }
    let mut error = Map::new();
    error.insert("kind".into(), Value::from(e.kind()));
    error.insert("message".into(), Value::from(e.to_string()));
    match e {
        CliError::Parse {
            source_name,
            offset,
            path,
            ..
        } => {
            error.insert("source".into(), Value::from(source_name.clone()));
            error.insert("offset".into(), Value::from(*offset));
            error.insert("path".into(), Value::from(path.clone()));
        }
        CliError::Io { path, .. } => {
            error.insert("source".into(), Value::from(path.display().to_string()));
        }
        CliError::MissingMatrix { source_name, name, .. } => {
            error.insert("source".into(), Value::from(source_name.clone()));
            error.insert("name".into(), Value::from(name.clone()));
        }
        _ => {}
    }
    doc.insert("error".into(), Value::Object(error));
    doc.insert("outcome".into(), Outcome::error(e).to_value());
    Value::Object(doc)
}

/// Reads inputs once each; `-` is stdin.
struct Sources<'a> {
    stdin: &'a mut dyn Read,
    stdin_text: Option<String>,
}

impl<'a> Sources<'a> {
    fn new(stdin: &'a mut dyn Read) -> Self {
        Sources { stdin, stdin_text: None }
    }

    fn read(&mut self, path: &Path) -> Result<(String, String)> {
        if path == Path::new("-") {
            if self.stdin_text.is_none() {
                let mut text = String::new();
                self.stdin.read_to_string(&mut text).map_err(|source| CliError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                self.stdin_text = Some(text);
            }
            let text = self.stdin_text.clone().unwrap_or_default();
            return Ok((text, "<stdin>".to_string()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok((text, path.display().to_string()))
    }

    fn input(&mut self, path: &Path) -> Result<Input> {
        let (text, name) = self.read(path)?;
        Input::parse(&text, &name)
    }
}

#[derive(Deserialize)]
struct Embedded {
    config: Config,
}

fn load_config(args: &GlobalArgs, sources: &mut Sources) -> Result<Config> {
    let mut config = match &args.config {
        Some(path) => {
            let (text, name) = sources.read(path)?;
            let value = parse_value(&text, &name)?;
            if value.get("config").is_some() {
                parse_typed::<Embedded>(&text, &name)?.config
            } else {
                parse_typed::<Config>(&text, &name)?
            }
        }
        None => Config::default(),
    };
    args.overrides().apply(&mut config);
    config.validate()?;
    Ok(config)
}

fn contraction(input: &Input, name: &str, tol: Tolerance) -> Result<(ComplexMatrix, Contraction)> {
    let m = input.matrix(name)?;
    let c = Contraction::validate(m.clone(), tol)?;
    Ok((m, c))
}

type Body = (Map<String, Value>, Outcome);

fn result_body(result: Value) -> Map<String, Value> {
    let mut body = Map::new();
    body.insert("result".into(), result);
    body
}

fn dispatch(command: &Command, config: &Config, sources: &mut Sources) -> Result<Body> {
    let tol = config.tolerance()?;
    match command {
        Command::Analyze { input, name } => {
            let input = sources.input(input)?;
            let (_, a) = contraction(&input, name, tol)?;
            analyze(&a).map(|v| (result_body(v), Outcome::pass("analysis complete")))
        }
        Command::Charfn { input, name } => {
            let input = sources.input(input)?;
            let (_, a) = contraction(&input, name, tol)?;
            let sample = sample_charfn(&a, &config.grid()?)?;
            charfn(&sample).map(|v| (result_body(v), Outcome::pass("sampled")))
        }
        Command::Order {
            a,
            b,
            relation,
            a_name,
            b_name,
        } => {
            let (ia, ib) = (sources.input(a)?, sources.input(b)?);
            let (_, a) = contraction(&ia, a_name, tol)?;
            let (_, b) = contraction(&ib, b_name, tol)?;
            let budget = config.budget();
            let mut verdicts = Vec::new();
            let mut outcome = Outcome::pass("");
            let mut reasons = Vec::new();
            for r in relation.relations() {
                let v = decide(&a, &b, r, &budget)?;
                let o = Outcome::from_status(v.status, r.as_str());
                reasons.push(o.reason.clone());
                if o.exit_code != EXIT_PASS {
                    outcome = o;
                }
                verdicts.push(relation_verdict(&v, config));
            }
            outcome.reason = reasons.join("; ");
            Ok((result_body(json!({ "verdicts": verdicts })), outcome))
        }
        Command::Equiv {
            a,
            b,
            charfn,
            a_name,
            b_name,
        } => {
            let (ia, ib) = (sources.input(a)?, sources.input(b)?);
            let (_, a) = contraction(&ia, a_name, tol)?;
            let (_, b) = contraction(&ib, b_name, tol)?;
            let budget = config.budget();
            let (method, v) = if *charfn {
                ("charfn", unitarily_equivalent_via_charfn(&a, &b, &config.grid()?, &budget)?)
            } else {
                ("intertwiner", unitarily_equivalent(&a, &b, &budget, config.word_length)?)
            };
            let outcome = Outcome::from_status(v.status, "unitary equivalence");
            let mut result = verdict(&v, config);
            if let Value::Object(map) = &mut result {
                map.insert("method".into(), Value::from(method));
            }
            Ok((result_body(result), outcome))
        }
        Command::Dilate { input, name } => {
            let input = sources.input(input)?;
            let (m, a) = contraction(&input, name, tol)?;
            dilate(&m, &a, config)
        }
        Command::Verify { suite } => {
            let report = run_suite(suite, config)?.ok_or_else(|| CliError::Config(format!("unknown suite {suite:?}")))?;
            let outcome = if report.passed() {
                Outcome::pass(format!("{} assertions passed", report.assertions.len()))
            } else {
                let first: Vec<&str> = report.failures().take(5).map(|a| a.name.as_str()).collect();
                Outcome::failed(format!(
                    "{} of {} assertions failed: {}",
                    report.failures().count(),
                    report.assertions.len(),
                    first.join(", ")
                ))
            };
            Ok((result_body(report.to_value()), outcome))
        }
        Command::Gen {
            kind,
            n,
            copies,
            common,
            swapped,
            defect,
            sigma_max,
        } => {
            let seed = config.budget.seed;
            let spec = match kind {
                FixtureKind::JordanSum => FixtureSpec::JordanSum { n: *n },
                FixtureKind::TruncatedShifts => FixtureSpec::TruncatedShifts { n: *n, copies: *copies },
                FixtureKind::ConjugatedPair => FixtureSpec::ConjugatedPair { n: *n, seed },
                FixtureKind::SimPair => FixtureSpec::SimPair {
                    common: *common,
                    swapped: *swapped,
                    seed,
                },
                FixtureKind::ApproxPair => FixtureSpec::ApproxPair {
                    n: *n,
                    defect: *defect,
                    seed,
                },
                FixtureKind::RandomContraction => FixtureSpec::RandomContraction {
                    n: *n,
                    sigma_max: *sigma_max,
                    seed,
                },
            };
            gen(&spec, tol)
        }
    }
}

fn analyze(a: &Contraction) -> Result<Value> {
    let split = unitary_cnu_split(a)?;
    let multiplicity = if split.unitary_space.is_zero() {
        0
    } else {
        unitary_multiplicity(&split.unitary_part, a.tolerance())?
    };
    let spectrum: Vec<Value> = eigenvalues(a.matrix())?.into_iter().map(complex).collect();
    Ok(json!({
        "dim": a.dim(),
        "sigma_max": real(a.sigma_max()),
        "defect_index": a.defect_index(),
        "codefect_index": a.codefect_index(),
        "defect_space": subspace(a.defect_space()),
        "codefect_space": subspace(a.codefect_space()),
        "eigenvalues": spectrum,
        "split": {
            "unitary_dim": split.unitary_space.dim(),
            "cnu_dim": split.cnu_space.dim(),
            "unitary_space": subspace(&split.unitary_space),
            "cnu_space": subspace(&split.cnu_space),
            "unitary_part": matrix(&split.unitary_part),
            "cnu_part": matrix(split.cnu_part.matrix()),
            "stabilized_at": split.stabilized_at,
            "reducing_residual": real(split.reducing_residual(a.matrix())),
        },
        "unitary_multiplicity": multiplicity,
        "completely_nonunitary": split.unitary_space.is_zero(),
    }))
}

fn samples(points: &[contractions_core::Complex64], blocks: &[ComplexMatrix]) -> Value {
    Value::Array(
        points
            .iter()
            .zip(blocks)
            .map(|(z, b)| json!({ "lambda": complex(*z), "value": matrix(b) }))
            .collect(),
    )
}

fn charfn(sample: &CharFnSample) -> Result<Value> {
    let split = pure_split(sample)?;
    let (range, range_complement) = analytic_range_span(sample)?;
    Ok(json!({
        "domain_dim": sample.domain_dim(),
        "codomain_dim": sample.codomain_dim(),
        "domain_space": subspace(&sample.domain_space),
        "codomain_space": subspace(&sample.codomain_space),
        "boundary_eps": real(sample.boundary_eps),
        "interior": samples(&sample.disk_points, &sample.disk_blocks),
        "boundary": samples(&sample.boundary_points, &sample.boundary_blocks),
        "pure_split": {
            "pure_domain": subspace(&split.pure_domain),
            "unitary_domain": subspace(&split.unitary_domain),
            "pure_codomain": subspace(&split.pure_codomain),
            "unitary_codomain": subspace(&split.unitary_codomain),
            "unitary_constant": matrix(&split.unitary_constant),
            "constancy_deviation": real(split.constancy_deviation),
            "purity_margin": real(split.purity_margin),
        },
        "analytic_range": subspace(&range),
        "analytic_range_complement": subspace(&range_complement),
    }))
}

fn dilate(m: &ComplexMatrix, a: &Contraction, config: &Config) -> Result<Body> {
    let d = schaffer_dilation(a, config.depth)?;
    let power_residual = d.power_residual(m, config.depth);
    let unitary_residual = d.unitary_residual();
    let orbit_dim = d.orbit_span_dim()?;
    let tol = config.tolerance.residual_tol;
    let ok = power_residual <= tol && unitary_residual <= tol && orbit_dim == d.space_dim;
    let result = json!({
        "depth": d.depth,
        "space_dim": d.space_dim,
        "defect_dim": d.defect_dim,
        "h_offset": d.h_offset(),
        "U": matrix(&d.u),
        "embedding": subspace(&d.embed),
        "power_residual": real(power_residual),
        "unitary_residual": real(unitary_residual),
        "orbit_span_dim": orbit_dim,
    });
    let outcome = if ok {
        Outcome::pass("dilation verified")
    } else {
        Outcome::failed(format!(
            "dilation check failed: power residual {power_residual:e}, unitary residual {unitary_residual:e}, orbit span {orbit_dim} of {}",
            d.space_dim
        ))
    };
    Ok((result_body(result), outcome))
}

fn gen(spec: &FixtureSpec, tol: Tolerance) -> Result<Body> {
    let fixture = generate(spec, tol)?;
    let caveats: Vec<Value> = fixture
        .caveats
        .iter()
        .map(|c| json!({ "claim": c.claim, "survives_truncation": c.survives_truncation }))
        .collect();
    let mut body = result_body(json!({ "kind": fixture.kind, "caveats": caveats }));
    body.insert(
        "matrices".into(),
        named_matrices(fixture.matrices.iter().map(|(n, m)| (n.as_str(), m))),
    );
    Ok((body, Outcome::pass(format!("generated {}", fixture.kind))))
}
