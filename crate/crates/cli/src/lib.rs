//! Command-line front end for `contractis`.
//!
//! Every input argument is either inline JSON (anything starting with `{` or
//! `[`) or a path to a JSON file. Output is JSON by default or CSV with
//! `--format csv`; numbers carry 12 significant digits. Nothing is written
//! unless the whole command succeeds.
//!
//! Exit codes: 0 on success, 1 when an input fails validation or an analysis
//! is inapplicable, 2 on usage errors (bad flags, unreadable files).

// `!(x > 0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use contractis::algebra::{knill_laflamme_check, noiseless_subsystems};
use contractis::channels::QuantumChannel;
use contractis::contractivity::{
    approx_ec_residual_bound, cb_dist_lower, cb_dist_upper, contractive_approximation,
    depolarizing_indistinguishability_n, fixed_point, kappa, kappa_search, Budget, FixedPointMethod,
    FixedPointOptions,
};
use contractis::discrimination::{helstrom, lemma1_bound};
use contractis::dynamics::{distinguishability_horizon, simulate_circuit, simulate_memory, Trajectory};
use contractis::linalg::ComplexMatrix;
use contractis::schema;
use contractis::states::{maximally_mixed, trace_norm_distance, von_neumann_entropy, DensityOperator, LogBase};
use contractis::{Error, C};

const HORIZON_HELP: &str = "\
Prints the distinguishability horizon N0: the least n with kappa^n <= epsilon/2, \
after which two evolved states are within epsilon in trace norm whatever they started as.

The value is the exact ceiling of log(epsilon/2)/log(kappa), checked against direct powers. \
For kappa = 0.9 and epsilon = 0.01 it is 51, since 0.9^51 = 0.00464 <= 0.005 < 0.9^50 = 0.00515. \
The figure 50 that is sometimes quoted for this case comes from rounding log(0.005)/log(0.9) = 50.29 \
down instead of up, and does not meet the threshold.";

#[derive(Debug, Parser)]
#[command(name = "contractis", version, about = "Analysis of strictly contractive quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for every randomized search.
    #[arg(long, global = true, env = "CONTRACTIS_SEED", default_value_t = 0)]
    seed: u64,

    /// Convergence tolerance for the fixed-point solver.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Random samples screened per search, split across restarts.
    #[arg(long, global = true, default_value_t = 2000)]
    samples: usize,

    /// Independent local-ascent restarts per search.
    #[arg(long, global = true, default_value_t = 16)]
    restarts: usize,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Auto,
    Channel,
    State,
    Experiment,
    Code,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FpMethod {
    Nullspace,
    Iteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ApproxMethod {
    /// Mix with a replacement channel to force strict contractivity.
    Contractive,
    /// Depolarizing channel indistinguishable from a near-identity channel.
    Depolarizing,
    /// Bound on the residual of an n-block error-corrected scheme.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Base {
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a channel, state, experiment or code basis is well formed.
    Validate {
        input: String,
        #[arg(long, value_enum, default_value_t = Kind::Auto)]
        kind: Kind,
    },
    /// Contractivity modulus of a channel.
    Kappa {
        channel: String,
        /// Skip closed forms and run the multistart search.
        #[arg(long)]
        search: bool,
        /// Include the maximizing pair of states.
        #[arg(long)]
        witness: bool,
    },
    /// Fixed state of a channel.
    FixedPoint {
        channel: String,
        #[arg(long, value_enum, default_value_t = FpMethod::Nullspace)]
        method: FpMethod,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
    },
    /// Optimal two-state discrimination, optionally after a channel.
    ///
    /// `distance` is the prior-weighted norm ‖π₁ρ₁ − π₂ρ₂‖₁ that fixes the
    /// success probability; `trace_distance` is the unweighted ‖ρ₁ − ρ₂‖₁.
    Discriminate {
        channel: Option<String>,
        #[arg(long)]
        rho1: String,
        #[arg(long)]
        rho2: String,
        /// Prior probability of rho1.
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
    },
    /// Decay of a memory register left to a channel.
    Memory {
        channel: String,
        #[arg(long)]
        initial: String,
        #[arg(long)]
        steps: usize,
    },
    /// Noisy circuit run from an experiment file.
    Circuit { experiment: String },
    /// Number of noisy steps after which any two states are epsilon-close.
    #[command(long_about = HORIZON_HELP)]
    Horizon {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Interaction algebra, commutant and noiseless subsystems of a channel.
    Algebra { channel: String },
    /// Knill-Laflamme conditions for a code against a channel's Kraus operators.
    KlCheck {
        channel: String,
        #[arg(long)]
        code: String,
    },
    /// Approximation constructions for channels.
    Approximate {
        channel: String,
        #[arg(long, value_enum, default_value_t = ApproxMethod::Contractive)]
        method: ApproxMethod,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Replacement state for the contractive method (default I/d).
        #[arg(long)]
        sigma: Option<String>,
        /// Number of blocks for the residual method.
        #[arg(long)]
        blocks: Option<u32>,
    },
    /// Lower and upper estimates of the cb-norm distance between two channels.
    Cbdist {
        a: String,
        b: String,
        /// Ancilla dimension for the lower bound (default: system dimension).
        #[arg(long)]
        ancilla: Option<usize>,
    },
    /// Von Neumann entropy of a state.
    Entropy {
        state: String,
        #[arg(long, value_enum, default_value_t = Base::E)]
        base: Base,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

/// Result of a command in both output shapes.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Report {
    fn flat(fields: Vec<(&'static str, Value)>) -> Self {
        let header = fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<Value> = fields.iter().map(|(_, v)| v.clone()).collect();
        let json = Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
        Report {
            json,
            header,
            rows: vec![row],
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let s = other.to_string();
            if s.contains(',') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s
            }
        }
    }
}

/// `x` rounded to 12 significant digits, written in shortest form.
fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float round trip");
    // avoid printing -0.0
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn complex(z: C<f64>) -> Value {
    json!([num(z.re), num(z.im)])
}

fn matrix(m: &ComplexMatrix<f64>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

fn matrix_rows(m: &ComplexMatrix<f64>) -> Vec<Vec<Value>> {
    let mut rows = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            rows.push(vec![json!(i), json!(j), num(m[(i, j)].re), num(m[(i, j)].im)]);
        }
    }
    rows
}

fn channel_json(ch: &QuantumChannel<f64>) -> Value {
    json!({
        "dim": ch.dim(),
        "kraus": ch.kraus().iter().map(matrix).collect::<Vec<_>>(),
        "weights": ch.weights().iter().map(|w| num(*w)).collect::<Vec<_>>(),
    })
}

fn read_input(arg: &str, what: &str) -> Outcome<Value> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline JSON".to_string())
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Failure::Usage(format!("cannot read {what} file `{arg}`: {e}")))?;
        (text, format!("file `{arg}`"))
    };
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{what}: malformed JSON in {origin}: {e}")))
}

fn with_context(what: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Invalid(format!("{what}: {e}"))
}

fn load_channel(arg: &str, what: &str) -> Outcome<QuantumChannel<f64>> {
    let v = read_input(arg, what)?;
    schema::parse_channel(&v, "").map_err(with_context(what))
}

/// Channel that must be completely positive and trace preserving.
fn load_cptp(arg: &str, what: &str) -> Outcome<QuantumChannel<f64>> {
    let ch = load_channel(arg, what)?;
    ch.ensure_cptp().map_err(with_context(what))?;
    Ok(ch)
}

fn load_state(arg: &str, what: &str) -> Outcome<DensityOperator<f64>> {
    let v = read_input(arg, what)?;
    schema::parse_state(&v, "").map_err(with_context(what))
}

fn budget(cli: &Cli) -> Outcome<Budget> {
    if cli.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    if cli.restarts == 0 {
        return Err(Failure::Usage("--restarts must be positive".into()));
    }
    Ok(Budget {
        samples: cli.samples,
        restarts: cli.restarts,
        seed: cli.seed,
    })
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|report| {
        let text = report.render(cli.format);
        match &cli.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write output file `{}`: {e}", path.display()))),
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}"))),
        }
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cli: &Cli) -> Outcome<Report> {
    match &cli.command {
        Command::Validate { input, kind } => validate(input, *kind),
        Command::Kappa {
            channel,
            search,
            witness,
        } => {
            let ch = load_cptp(channel, "channel")?;
            let b = budget(cli)?;
            let k = if *search { kappa_search(&ch, &b)? } else { kappa(&ch, &b)? };
            let mut report = Report::flat(vec![
                ("kappa", num(k.lower_bound)),
                ("exact", json!(k.exact)),
                ("method", json!(k.method.as_str())),
            ]);
            if *witness {
                insert(&mut report, "witness", json!([matrix(k.witness.0.matrix()), matrix(k.witness.1.matrix())]));
            }
            Ok(report)
        }
        Command::FixedPoint {
            channel,
            method,
            max_iter,
        } => {
            let ch = load_cptp(channel, "channel")?;
            if !(cli.tol > 0.0) {
                return Err(Failure::Usage("--tol must be positive".into()));
            }
            let m = match method {
                FpMethod::Nullspace => FixedPointMethod::Nullspace,
                FpMethod::Iteration => FixedPointMethod::Iteration,
            };
            let r = fixed_point(
                &ch,
                m,
                &FixedPointOptions {
                    tol: cli.tol,
                    max_iter: *max_iter,
                },
            )?;
            Ok(Report {
                json: json!({
                    "state": matrix(r.state.matrix()),
                    "residual": num(r.residual),
                    "iterations": r.iterations,
                    "method": r.method.as_str(),
                }),
                header: vec!["row", "col", "re", "im"],
                rows: matrix_rows(r.state.matrix()),
            })
        }
        Command::Discriminate {
            channel,
            rho1,
            rho2,
            prior,
        } => {
            let ch = channel.as_deref().map(|c| load_cptp(c, "channel")).transpose()?;
            let mut r1 = load_state(rho1, "rho1")?;
            let mut r2 = load_state(rho2, "rho2")?;
            if !(0.0..=1.0).contains(prior) {
                return Err(Failure::Usage(format!("--prior must lie in [0, 1], got {prior}")));
            }
            let (bound, certified) = match &ch {
                Some(ch) => {
                    r1 = ch.apply(&r1)?;
                    r2 = ch.apply(&r2)?;
                    // the ceiling is stated for equal priors
                    if *prior == 0.5 {
                        let l = lemma1_bound(ch, &budget(cli)?)?;
                        (num(l.bound), json!(l.certified))
                    } else {
                        (Value::Null, Value::Null)
                    }
                }
                None => (Value::Null, Value::Null),
            };
            let h = helstrom(&r1, &r2, *prior)?;
            Ok(Report::flat(vec![
                ("p_correct", num(h.p_correct)),
                ("distance", num(h.distance)),
                ("trace_distance", num(trace_norm_distance(&r1, &r2)?)),
                ("bound", bound),
                ("bound_certified", certified),
            ]))
        }
        Command::Memory {
            channel,
            initial,
            steps,
        } => {
            let ch = load_cptp(channel, "channel")?;
            let rho0 = load_state(initial, "initial")?;
            let t = simulate_memory(&ch, &rho0, *steps, &budget(cli)?)?;
            Ok(trajectory_report(&t))
        }
        Command::Circuit { experiment } => {
            let v = read_input(experiment, "experiment")?;
            let circuit = schema::parse_experiment::<f64>(&v).map_err(with_context("experiment"))?;
            let t = simulate_circuit(&circuit, &budget(cli)?)?;
            Ok(trajectory_report(&t))
        }
        Command::Horizon { kappa, epsilon } => {
            let n = distinguishability_horizon(*kappa, *epsilon).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Report::flat(vec![
                ("kappa", num(*kappa)),
                ("epsilon", num(*epsilon)),
                ("horizon", json!(n)),
            ]))
        }
        Command::Algebra { channel } => {
            let ch = load_cptp(channel, "channel")?;
            let report = noiseless_subsystems(&ch)?;
            let blocks: Vec<Value> = report.profile.blocks.iter().map(|(m, n)| json!([m, n])).collect();
            Ok(Report {
                json: json!({
                    "algebra_dim": report.algebra_dim,
                    "commutant_dim": report.commutant_dim,
                    "blocks": blocks,
                    "nontrivial_ns": report.nontrivial,
                }),
                header: vec!["m", "n"],
                rows: report.profile.blocks.iter().map(|(m, n)| vec![json!(m), json!(n)]).collect(),
            })
        }
        Command::KlCheck { channel, code } => {
            let ch = load_cptp(channel, "channel")?;
            let v = read_input(code, "code")?;
            let basis = schema::parse_code_basis::<f64>(&v, "").map_err(with_context("code"))?;
            let r = knill_laflamme_check(ch.kraus(), &basis)?;
            let mut report = Report::flat(vec![
                ("correctable", json!(r.correctable)),
                ("max_residual", num(r.max_residual)),
            ]);
            insert(&mut report, "lambda", matrix(&r.lambda));
            Ok(report)
        }
        Command::Approximate {
            channel,
            method,
            epsilon,
            sigma,
            blocks,
        } => {
            let ch = load_cptp(channel, "channel")?;
            let sigma = sigma.as_deref().map(|s| load_state(s, "sigma")).transpose()?;
            let need_eps = || epsilon.ok_or_else(|| Failure::Usage(format!("--epsilon is required for the {method:?} method").to_lowercase()));
            match method {
                ApproxMethod::Contractive => {
                    let sigma = match sigma {
                        Some(s) => s,
                        None => maximally_mixed(ch.dim())?,
                    };
                    let a = contractive_approximation(&ch, &sigma, need_eps()?)?;
                    let mut report = Report::flat(vec![
                        ("n", json!(a.n)),
                        ("kappa_ceiling", num(a.kappa_ceiling)),
                        ("cb_distance_bound", num(a.cb_distance_bound)),
                    ]);
                    insert(&mut report, "channel", channel_json(&a.channel));
                    Ok(report)
                }
                ApproxMethod::Depolarizing => {
                    let a = depolarizing_indistinguishability_n(&ch, need_eps()?, &budget(cli)?)?;
                    Ok(Report::flat(vec![
                        ("n", json!(a.n)),
                        ("p", num(1.0 / a.n as f64)),
                        ("identity_distance", num(a.identity_distance)),
                        ("identity_distance_certified", json!(false)),
                        ("lower_check", num(a.lower_check)),
                        ("passes", json!(a.passes)),
                    ]))
                }
                ApproxMethod::Residual => {
                    let n = blocks.ok_or_else(|| Failure::Usage("--blocks is required for the residual method".into()))?;
                    let r = approx_ec_residual_bound(&ch, n, &budget(cli)?)?;
                    Ok(Report::flat(vec![
                        ("blocks", json!(n)),
                        ("delta", num(r.delta)),
                        ("bound", num(r.bound)),
                        ("certified", json!(r.is_certified)),
                    ]))
                }
            }
        }
        Command::Cbdist { a, b, ancilla } => {
            let ca = load_cptp(a, "first channel")?;
            let cb = load_cptp(b, "second channel")?;
            if ca.dim() != cb.dim() {
                return Err(Failure::Invalid(format!(
                    "channels act on dimensions {} and {}",
                    ca.dim(),
                    cb.dim()
                )));
            }
            if *ancilla == Some(0) {
                return Err(Failure::Usage("--ancilla must be positive".into()));
            }
            let bud = budget(cli)?;
            let lower = cb_dist_lower(&ca, &cb, *ancilla, &bud)?;
            let upper = cb_dist_upper(&ca, &cb, &bud)?;
            Ok(Report::flat(vec![
                ("lower", num(lower)),
                ("upper", num(upper)),
                ("upper_certified", json!(false)),
                ("ancilla_dim", json!(ancilla.unwrap_or(ca.dim()))),
            ]))
        }
        Command::Entropy { state, base } => {
            let rho = load_state(state, "state")?;
            let (b, name) = match base {
                Base::E => (LogBase::Natural, "e"),
                Base::Two => (LogBase::Two, "2"),
            };
            Ok(Report::flat(vec![
                ("entropy", num(von_neumann_entropy(&rho, b))),
                ("purity", num(rho.purity())),
                ("base", json!(name)),
            ]))
        }
    }
}

fn insert(report: &mut Report, key: &str, value: Value) {
    if let Value::Object(map) = &mut report.json {
        map.insert(key.to_string(), value);
    }
}

fn trajectory_report(t: &Trajectory<f64>) -> Report {
    let records: Vec<Value> = t
        .records
        .iter()
        .map(|r| {
            json!({
                "step": r.step,
                "distance": num(r.distance),
                "bound": num(r.bound),
                "helstrom_ceiling": num(0.5 + 0.25 * r.bound),
            })
        })
        .collect();
    let mut json = Map::new();
    json.insert("kappa".into(), num(t.kappa.lower_bound));
    json.insert("bound_certified".into(), json!(t.bound_certified()));
    json.insert(
        "reference".into(),
        t.reference.as_ref().map_or(Value::Null, |r| matrix(r.matrix())),
    );
    json.insert("records".into(), Value::Array(records));
    Report {
        json: Value::Object(json),
        header: vec!["step", "distance", "bound"],
        rows: t
            .records
            .iter()
            .map(|r| vec![json!(r.step), num(r.distance), num(r.bound)])
            .collect(),
    }
}

fn detect(v: &Value) -> Kind {
    match v {
        Value::Object(m) if m.contains_key("channel") => Kind::Experiment,
        Value::Object(m) if m.contains_key("vectors") => Kind::Code,
        Value::Object(m) if m.contains_key("kraus") => Kind::Channel,
        Value::Object(m) if m.contains_key("matrix") || m.contains_key("pure") => Kind::State,
        Value::Object(m) => match m.get("type").and_then(Value::as_str) {
            Some("maximally_mixed" | "basis") => Kind::State,
            _ => Kind::Channel,
        },
        _ => Kind::State,
    }
}

fn validate(input: &str, kind: Kind) -> Outcome<Report> {
    let v = read_input(input, "input")?;
    let kind = if kind == Kind::Auto { detect(&v) } else { kind };
    match kind {
        Kind::Channel => {
            let ch = schema::parse_channel::<f64>(&v, "").map_err(with_context("channel"))?;
            ch.ensure_cptp().map_err(with_context("channel"))?;
            Ok(Report::flat(vec![
                ("valid", json!(true)),
                ("kind", json!("channel")),
                ("dim", json!(ch.dim())),
                ("kraus_count", json!(ch.kraus().len())),
                ("trace_preserving", json!(ch.is_trace_preserving())),
                ("unital", json!(ch.is_unital())),
                ("choi_min_eigenvalue", num(ch.choi_min_eigenvalue())),
            ]))
        }
        Kind::State | Kind::Auto => {
            let rho = schema::parse_state::<f64>(&v, "").map_err(with_context("state"))?;
            Ok(Report::flat(vec![
                ("valid", json!(true)),
                ("kind", json!("state")),
                ("dim", json!(rho.dim())),
                ("purity", num(rho.purity())),
            ]))
        }
        Kind::Experiment => {
            let c = schema::parse_experiment::<f64>(&v).map_err(with_context("experiment"))?;
            Ok(Report::flat(vec![
                ("valid", json!(true)),
                ("kind", json!("experiment")),
                ("dim", json!(c.dim())),
                ("gates", json!(c.gates().len())),
                ("initial_states", json!(c.initial().len())),
                ("steps", json!(c.steps())),
            ]))
        }
        Kind::Code => {
            let basis = schema::parse_code_basis::<f64>(&v, "").map_err(with_context("code"))?;
            let n = basis[0].len();
            if let Some(i) = basis.iter().position(|b| b.len() != n) {
                return Err(Failure::Invalid(format!(
                    "code: vectors[{i}] has length {}, expected {n}",
                    basis[i].len()
                )));
            }
            let mut deviation = 0.0f64;
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let g: C<f64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    deviation = deviation.max((g - C::new(target, 0.0)).norm());
                }
            }
            if deviation > 1e-10 {
                return Err(Error::NonOrthonormalBasis { deviation }.into());
            }
            Ok(Report::flat(vec![
                ("valid", json!(true)),
                ("kind", json!("code")),
                ("dim", json!(n)),
                ("code_dim", json!(basis.len())),
            ]))
        }
    }
}
