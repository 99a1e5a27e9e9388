use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use jsrkit_core::graph::{build_graph, condense, periods};
use jsrkit_core::matset::{load, random_set, Format};
use jsrkit_core::products::{brute_norm_table, frontier_at, DEFAULT_CAP};
use jsrkit_core::theory::{bounded_ratio_check, diagonal_sequence, fekete_check_log, growth_fit, trace_report};
use jsrkit_core::{best_bracket, oracle, Error, MatrixSet64};

mod report;
mod table;

use report::{num, opt};

#[derive(Parser, Debug)]
#[command(name = "jsrkit", version, about = "Joint spectral radius bounds for nonnegative matrix sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower/upper bound curves, envelopes and certificates
    Bounds(BoundsArgs),
    /// Dependency graph: components, distances, periods
    Graph(InputArgs),
    /// Brute-force generalized spectral radius and unpruned norms
    Oracle(RunArgs),
    /// Maximal traces and their roots along multiples of the global period
    Trace(RunArgs),
    /// Supermultiplicativity, bounded-ratio and growth diagnostics
    Check(CheckArgs),
    /// Print a seeded random matrix set
    Random(RandomArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the file extension when omitted
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: u64,
    #[arg(long, default_value_t = DEFAULT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Store witness words
    #[arg(long)]
    witness: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also emit the frontier (words and log-scales) at this length
    #[arg(long, value_name = "K")]
    dump_frontier: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Gap for the bounded-ratio check; defaults to each index's period
    #[arg(long)]
    gap: Option<usize>,
    /// Radius estimate for the growth fit; defaults to the bracket midpoint
    #[arg(long)]
    rho_hat: Option<f64>,
    /// First length of the growth fit; defaults to max(1, N/4)
    #[arg(long)]
    fit_from: Option<usize>,
}

#[derive(Args, Debug)]
struct RandomArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    count: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0.1)]
    lo: f64,
    #[arg(long, default_value_t = 2.0)]
    hi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    output_format: InputFormat,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_input_error() { 2 } else { 3 }, message: e.to_string() }
    }
}

struct Loaded {
    set: MatrixSet64,
    digest: String,
    path: String,
}

fn load_input(args: &InputArgs) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(&args.input).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", args.input.display()),
    })?;
    let format = match args.input_format {
        Some(InputFormat::Json) => Format::Json,
        Some(InputFormat::Csv) => Format::Csv,
        None if has_extension(&args.input, "csv") => Format::Csv,
        None => Format::Json,
    };
    let set = load(&bytes, format)?;
    Ok(Loaded {
        set,
        digest: hex::encode(Sha256::digest(&bytes)),
        path: args.input.display().to_string(),
    })
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn header(command: &str, loaded: &Loaded, flags: Value) -> Value {
    json!({
        "schema": 1,
        "tool": "jsrkit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "input": {
            "path": loaded.path,
            "sha256": loaded.digest,
            "name": loaded.set.name(),
            "dim": loaded.set.dim(),
            "count": loaded.set.len(),
        },
        "flags": flags,
    })
}

fn run_flags(run: &RunArgs) -> Value {
    json!({ "max_len": run.max_len, "cap": run.cap, "witness": run.witness })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn warn_inexact(report: &jsrkit_core::BoundsReport64) {
    if let Some(first) = report.curves.iter().find(|c| !c.exact) {
        eprintln!(
            "warning: capacity pruning from length {}; upper bounds use exact lengths only",
            first.k
        );
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(Value, String), Failure> {
    let loaded = load_input(&args.run.input)?;
    let n = args.run.max_len as usize;
    let cap = args.run.cap as usize;
    let report = best_bracket(&loaded.set, n, cap, args.run.witness)?;
    warn_inexact(&report);
    let mut flags = run_flags(&args.run);
    flags["dump_frontier"] = json!(args.dump_frontier);
    let mut out = merge(header("bounds", &loaded, flags), report::bounds_json(&report));
    if let Some(k) = args.dump_frontier {
        let f = frontier_at(&loaded.set, k.max(1), cap);
        out["frontier"] = json!({
            "length": f.length(),
            "exact": f.is_exact(),
            "items": f.items().iter().map(|p| json!({"word": p.word(), "log_scale": num(p.log_scale())})).collect::<Vec<_>>(),
        });
    }
    let text = table::bounds(&report);
    Ok((out, text))
}

fn cmd_graph(args: &InputArgs) -> Result<(Value, String), Failure> {
    let loaded = load_input(args)?;
    let g = build_graph(&loaded.set);
    let c = condense(&g);
    let p = periods(&g, &c)?;
    let body = report::graph_json(&g, &c, &p);
    let text = table::graph(&g, &c, &p);
    Ok((merge(header("graph", &loaded, json!({})), body), text))
}

fn cmd_oracle(args: &RunArgs) -> Result<(Value, String), Failure> {
    let loaded = load_input(&args.input)?;
    let n = args.max_len as usize;
    let est = oracle::generalized_lower(&loaded.set, n)?;
    let brute = brute_norm_table(&loaded.set, n)?;
    let mut radii = Vec::new();
    for m in loaded.set.matrices() {
        let r = match oracle::single_spectral_radius(m, oracle::DEFAULT_TOL, oracle::DEFAULT_MAX_ITER) {
            Ok(r) => {
                if r.disagreement {
                    eprintln!("warning: power iteration and diagonal estimate disagree");
                }
                json!({"value": num(r.value), "converged": true, "iterations": r.iterations, "diagonal_estimate": num(r.diagonal_estimate), "disagreement": r.disagreement})
            }
            Err(Error::NoConvergence { iterations, best }) => {
                eprintln!("warning: power iteration did not converge after {iterations} iterations");
                json!({"value": num(best), "converged": false, "iterations": iterations})
            }
            Err(e) => return Err(e.into()),
        };
        radii.push(r);
    }
    let body = json!({
        "generalized_lower": {
            "value": num(est.value),
            "horizon": est.horizon,
            "achieving_word": est.achieving_word,
            "per_length": est.per_length.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        },
        "brute": {
            "log_norm": (1..=n).map(|k| opt(brute.log_norm(k))).collect::<Vec<_>>(),
            "log_max_trace": (1..=n).map(|k| opt(brute.log_max_trace(k))).collect::<Vec<_>>(),
        },
        "generator_radii": radii,
    });
    let text = table::oracle(&est, &brute);
    Ok((merge(header("oracle", &loaded, run_flags(args)), body), text))
}

fn cmd_trace(args: &RunArgs) -> Result<(Value, String), Failure> {
    let loaded = load_input(&args.input)?;
    let n = args.max_len as usize;
    let g = build_graph(&loaded.set);
    let info = periods(&g, &condense(&g))?;
    if (n as u64) < info.global {
        return Err(Error::InvalidArgument(format!("--max-len {n} is shorter than the global period {}", info.global)).into());
    }
    let report = best_bracket(&loaded.set, n, args.cap as usize, false)?;
    warn_inexact(&report);
    let tr = trace_report(&report, info);
    let body = report::trace_json(&tr);
    let text = table::trace(&tr);
    Ok((merge(header("trace", &loaded, run_flags(args)), body), text))
}

fn cmd_check(args: &CheckArgs) -> Result<(Value, String), Failure> {
    let loaded = load_input(&args.run.input)?;
    let n = args.run.max_len as usize;
    let report = best_bracket(&loaded.set, n, args.run.cap as usize, false)?;
    warn_inexact(&report);
    let table = &report.table;
    let g = build_graph(&loaded.set);
    let info = periods(&g, &condense(&g))?;

    let mut diagnoses = Vec::new();
    for i in 0..loaded.set.dim() {
        let entry = match fekete_check_log(&diagonal_sequence(table, i)) {
            Ok(d) => json!({
                "index": i,
                "supermultiplicative": true,
                "sup_root": num(d.sup_root),
                "converged": d.converged,
                "support_period": d.support_period,
                "last_positive": d.last_positive.map(|(k, r)| json!({"k": k, "root": num(r)})),
                "horizon_limited": true,
            }),
            Err(Error::NotSupermultiplicative { m, n }) => json!({
                "index": i,
                "supermultiplicative": false,
                "violation": [m, n],
            }),
            Err(e) => return Err(e.into()),
        };
        diagnoses.push(entry);
    }

    let ratios: Vec<Value> = (0..loaded.set.dim())
        .map(|i| {
            let gap = args.gap.unwrap_or(info.vertex_periods[i] as usize).max(1);
            let r = bounded_ratio_check(table, i, gap, 1..=n);
            json!({
                "index": i,
                "gap": gap,
                "max_ratio": r.map(|r| num(r.max_ratio)),
                "argmax": r.map(|r| r.argmax),
            })
        })
        .collect();

    let rho_hat = args.rho_hat.unwrap_or(match report.best_upper {
        Some(u) => 0.5 * (report.best_lower + u),
        None => report.best_lower,
    });
    let from = args.fit_from.unwrap_or((n / 4).max(1));
    let fit = match growth_fit(table, rho_hat, from..=n) {
        Ok(r) => json!({"rho_hat": num(rho_hat), "k_from": from, "k_to": n, "exponent": num(r)}),
        Err(e) => json!({"rho_hat": num(rho_hat), "k_from": from, "k_to": n, "exponent": null, "error": e.to_string()}),
    };

    let mut flags = run_flags(&args.run);
    flags["gap"] = json!(args.gap);
    flags["rho_hat"] = json!(args.rho_hat);
    flags["fit_from"] = json!(args.fit_from);
    let body = json!({
        "fekete": diagnoses,
        "ratio_checks": ratios,
        "growth_fit": fit,
        "table_invariants": table.verify_invariants().err(),
    });
    let text = table::check(&body);
    Ok((merge(header("check", &loaded, flags), body), text))
}

fn cmd_random(args: &RandomArgs) -> Result<String, Failure> {
    let set: MatrixSet64 = random_set(args.dim, args.count, args.density, (args.lo, args.hi), args.seed)?;
    let set = match &args.name {
        Some(n) => set.with_name(n.clone()),
        None => set,
    };
    Ok(match args.output_format {
        InputFormat::Json => set.to_json(),
        InputFormat::Csv => set.to_csv().trim_end().to_string(),
    })
}

fn configure_threads() {
    let threads = std::env::var("JSRKIT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(n) = threads.filter(|&n| n > 0) {
        // an already-initialized pool is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn emit(result: Result<(Value, String), Failure>, format: OutputFormat) -> Result<(), Failure> {
    let (value, text) = result?;
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize")),
        OutputFormat::Table => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Bounds(a) => emit(cmd_bounds(a), a.run.input.format),
        Command::Graph(a) => emit(cmd_graph(a), a.format),
        Command::Oracle(a) => emit(cmd_oracle(a), a.input.format),
        Command::Trace(a) => emit(cmd_trace(a), a.input.format),
        Command::Check(a) => emit(cmd_check(a), a.run.input.format),
        Command::Random(a) => cmd_random(a).map(|s| println!("{s}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
