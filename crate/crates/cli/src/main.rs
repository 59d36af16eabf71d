//! `rankone`: runs one experiment and writes its record.
//!
//! Exit status: 0 when every check passes, 1 on a check failure (or a
//! numerical failure mid-run), 2 on a configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankone::experiments::{run, CenterSpec, Experiment, ExperimentConfig, RunRecord};
use rankone::Error;
use serde_json::{json, Map, Value};

/// Caps the number of worker threads used for ensembles.
const THREADS_ENV: &str = "RANKONE_THREADS";

#[derive(Parser)]
#[command(
    name = "rankone",
    version,
    about = "Random Schrödinger operator on the complete graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state energy and delocalization on both sides of λ = 1.
    GroundState(Common),
    /// Eigenvalue/pole coincidence and norm profiles in the localized regime.
    Localization(Common),
    /// Model window vs directly simulated Šeba process.
    SebaBand(Common),
    /// The single extended state near the lower reference energy for λ < √2.
    SingleExtended(Common),
    /// Tail classification over a (λ, center) grid.
    PhaseDiagram(Common),
    /// Direct Šeba simulation and its localization bounds.
    SebaDirect(Common),
    /// Hilbert transform of the Gaussian density and reference energies.
    HilbertTable(Common),
    /// The full invariant and property suite.
    Verify(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct Common {
    /// TOML file with configuration keys; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// System size; repeat for a sweep.
    #[arg(long = "M", value_name = "N")]
    m: Vec<usize>,
    #[arg(long, value_name = "X")]
    lambda: Option<f64>,
    /// A number, E_hat_minus1 or E_hat_zero.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, value_name = "W")]
    window: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
}

impl Command {
    fn split(&self) -> (Experiment, &Common) {
        match self {
            Command::GroundState(c) => (Experiment::GroundState, c),
            Command::Localization(c) => (Experiment::Localization, c),
            Command::SebaBand(c) => (Experiment::SebaBand, c),
            Command::SingleExtended(c) => (Experiment::SingleExtended, c),
            Command::PhaseDiagram(c) => (Experiment::PhaseDiagram, c),
            Command::SebaDirect(c) => (Experiment::SebaDirect, c),
            Command::HilbertTable(c) => (Experiment::HilbertTable, c),
            Command::Verify(c) => (Experiment::Verify, c),
        }
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = cli.command.split();
    match execute(experiment, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn execute(experiment: Experiment, common: &Common) -> Result<bool, Failure> {
    let config = resolve_config(experiment, common)?;
    if let Some(n) = worker_cap()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let record = run(experiment, &config)?;
    let text = match common.format {
        Format::Jsonl => to_jsonl(&record),
        Format::Csv => to_csv(&record).map_err(|e| Failure::Run(e.to_string()))?,
    };
    write_output(common.out.as_deref(), &text)?;
    report(&record);
    Ok(record.pass())
}

fn worker_cap() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Defaults for the experiment, overlaid by the file, overlaid by flags.
fn resolve_config(experiment: Experiment, common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut merged = match serde_json::to_value(ExperimentConfig::defaults_for(experiment)) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("the configuration serializes to an object"),
    };
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let file = serde_json::to_value(table).map_err(|e| Failure::Config(e.to_string()))?;
        overlay(&mut merged, file);
    }
    overlay(&mut merged, flag_overrides(common)?);
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::Config(e.to_string()))
}

fn overlay(base: &mut Map<String, Value>, layer: Value) {
    let Value::Object(layer) = layer else { return };
    for (key, mut value) in layer {
        // `M` is accepted for `m`, and a single size for a sweep of one.
        let key = if key == "M" { "m".to_string() } else { key };
        if key == "m" && value.is_number() {
            value = Value::Array(vec![value]);
        }
        // A scalar λ or center replaces any grid inherited from a lower layer.
        match key.as_str() {
            "lambda" => {
                base.insert("lambdas".into(), json!([]));
            }
            "center" => {
                base.insert("centers".into(), json!([]));
            }
            _ => {}
        }
        base.insert(key, value);
    }
}

fn flag_overrides(c: &Common) -> Result<Value, Failure> {
    let mut o = Map::new();
    if let Some(s) = c.seed {
        o.insert("seed".into(), json!(s));
    }
    if let Some(n) = c.samples {
        o.insert("samples".into(), json!(n));
    }
    if !c.m.is_empty() {
        o.insert("m".into(), json!(c.m));
    }
    if let Some(l) = c.lambda {
        o.insert("lambda".into(), json!(l));
    }
    if let Some(spec) = &c.center {
        let parsed: CenterSpec = spec.parse()?;
        o.insert(
            "center".into(),
            serde_json::to_value(parsed).expect("center serializes"),
        );
    }
    if let Some(w) = c.window {
        o.insert("window".into(), json!(w));
    }
    Ok(Value::Object(o))
}

fn tagged(kind: &str, v: &Value) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), json!(kind));
    match v {
        Value::Object(fields) => m.extend(fields.clone()),
        other => {
            m.insert("value".into(), other.clone());
        }
    }
    Value::Object(m)
}

/// One header line, then rows, summary rows and checks, each tagged by `type`.
fn to_jsonl(r: &RunRecord) -> String {
    let header = json!({
        "type": "record",
        "experiment": r.experiment,
        "config": r.config,
        "resolved": r.resolved,
        "provenance": r.provenance,
        "warnings": r.warnings,
        "wall_clock_seconds": r.wall_clock_seconds,
        "pass": r.pass(),
    });
    let mut out = String::new();
    let mut push = |v: Value| {
        out.push_str(&v.to_string());
        out.push('\n');
    };
    push(header);
    r.rows.iter().for_each(|v| push(tagged("row", v)));
    r.summary.iter().for_each(|v| push(tagged("summary", v)));
    for c in &r.checks {
        push(tagged(
            "check",
            &serde_json::to_value(c).expect("checks serialize"),
        ));
    }
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.into(), s.clone())),
        Value::Null => out.push((prefix.into(), String::new())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

/// The summary grid (or the rows, when an experiment has no summary) as one
/// CSV table; nested objects become dotted columns, arrays JSON cells.
fn to_csv(r: &RunRecord) -> Result<String, csv::Error> {
    let source = if r.summary.is_empty() {
        &r.rows
    } else {
        &r.summary
    };
    let flat: Vec<Vec<(String, String)>> = source
        .iter()
        .map(|v| {
            let mut cells = Vec::new();
            flatten("", v, &mut cells);
            cells
        })
        .collect();
    let mut columns: Vec<String> = Vec::new();
    for cells in &flat {
        for (k, _) in cells {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for cells in &flat {
        let row = columns.iter().map(|c| {
            cells
                .iter()
                .find(|(k, _)| k == c)
                .map_or("", |(_, v)| v.as_str())
        });
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells"))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let result = match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure::Run(format!("writing output: {e}")))
}

fn report(r: &RunRecord) {
    let mut err = io::stderr().lock();
    for w in &r.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    for c in &r.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            err,
            "{tag} {} value={} threshold={} ({})",
            c.name, c.value, c.threshold, c.detail
        );
    }
    let passed = r.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(
        err,
        "{}: {passed}/{} checks passed in {:.1} s",
        r.experiment,
        r.checks.len(),
        r.wall_clock_seconds
    );
}
