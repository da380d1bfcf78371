use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use triwave::{ConserveMode, Workspace};
use triwave_cli::output::{self, conserve_name};
use triwave_cli::run::run_spec;
use triwave_cli::scenario::{self, Equation, Overrides, Tier, REGISTRY};
use triwave_cli::{bench, CliError};

/// Structure-preserving spectral solvers for dispersive wave equations.
#[derive(Parser)]
#[command(name = "triwave", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a named scenario and write its time series.
    Solve(SolveArgs),
    /// List the built-in scenarios and benchmark cases.
    ListScenarios,
    /// Time a benchmark case and report the median wall time.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Equation family: bbm, kdv, nls, or hypnls.
    #[arg(long)]
    equation: String,
    /// Scenario name from `list-scenarios`.
    #[arg(long)]
    scenario: String,
    /// Override the number of grid nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Override the nominal step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the final time.
    #[arg(long)]
    t_final: Option<f64>,
    /// Time span tier: ci or full.
    #[arg(long, default_value = "ci")]
    t_span: String,
    /// Butcher tableau: a built-in name (ark436, ark548, rk4) or a file path.
    #[arg(long)]
    tableau: Option<String>,
    /// Conservation policy: none, mass-energy, or full.
    #[arg(long)]
    conserve: Option<String>,
    /// Override the Schrödinger nonlinearity coefficient.
    #[arg(long)]
    beta: Option<f64>,
    /// Override the relaxation time of the hyperbolized model.
    #[arg(long)]
    tau: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output format: csv (with a JSON sidecar) or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark case: bbm-s5 or nls-s5.
    #[arg(long)]
    case: String,
    /// Directory to write the JSON report into.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Solve(args) => solve(args),
        Cmd::ListScenarios => {
            list_scenarios();
            Ok(())
        }
        Cmd::Bench(args) => bench_case(args),
    }
}

fn parse_conserve(s: &str) -> Result<ConserveMode, CliError> {
    match s {
        "none" => Ok(ConserveMode::None),
        "mass-energy" => Ok(ConserveMode::MassEnergy),
        "full" => Ok(ConserveMode::MassMomentumEnergy),
        other => Err(CliError::InvalidConfig(format!(
            "unknown conservation policy `{other}` (expected none, mass-energy, or full)"
        ))),
    }
}

fn solve(args: SolveArgs) -> Result<(), CliError> {
    let equation = Equation::parse(&args.equation).ok_or_else(|| {
        CliError::InvalidConfig(format!(
            "unknown equation `{}` (expected bbm, kdv, nls, or hypnls)",
            args.equation
        ))
    })?;
    let scenario = scenario::find(&args.scenario)?;
    if scenario.equation != equation {
        return Err(CliError::EquationMismatch {
            scenario: scenario.name.to_string(),
            expected: scenario.equation.name(),
            requested: args.equation,
        });
    }
    let tier = match args.t_span.as_str() {
        "ci" => Tier::Ci,
        "full" => Tier::Full,
        other => {
            return Err(CliError::InvalidConfig(format!(
                "unknown span tier `{other}` (expected ci or full)"
            )))
        }
    };
    if args.format != "csv" && args.format != "json" {
        return Err(CliError::InvalidConfig(format!(
            "unknown format `{}` (expected csv or json)",
            args.format
        )));
    }
    let conserve = args.conserve.as_deref().map(parse_conserve).transpose()?;
    let overrides = Overrides {
        n: args.n,
        dt: args.dt,
        t_final: args.t_final,
        tableau: args.tableau,
        conserve,
        beta: args.beta,
        tau: args.tau,
    };
    let spec = scenario.resolve(tier, &overrides)?;

    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    let mut ws = Workspace::new();
    let result = run_spec(&spec, &mut ws, Some(&args.out))?;
    let sidecar = output::build_sidecar(&spec, &result);

    match args.format.as_str() {
        "csv" => {
            let csv_path = args.out.join(format!("{}.csv", spec.name));
            output::write_csv(&csv_path, &result.rows)?;
            let json_path = args.out.join(format!("{}.json", spec.name));
            output::write_sidecar(&json_path, &sidecar)?;
            println!("wrote {} ({} rows) and {}", csv_path.display(), result.rows.len(), json_path.display());
        }
        _ => {
            let json_path = args.out.join(format!("{}.json", spec.name));
            output::write_json(&json_path, &sidecar, &result.rows)?;
            println!("wrote {} ({} rows)", json_path.display(), result.rows.len());
        }
    }
    let s = &result.summary;
    println!(
        "{}: {} steps to t = {:.6}; max |drift| mass {:.3e}, momentum {:.3e}, energy {:.3e}; final error {:.3e}; wall {:.2} s",
        spec.name,
        s.steps,
        s.final_time,
        s.max_mass_drift,
        s.max_momentum_drift,
        s.max_energy_drift,
        s.final_error,
        s.wall_seconds,
    );
    Ok(())
}

fn list_scenarios() {
    println!(
        "{:<16} {:<7} {:>5} {:>8} {:<14} {:<14} {:<12} description",
        "name", "eq", "n", "dt", "ci span", "full span", "conserve"
    );
    for s in REGISTRY {
        println!(
            "{:<16} {:<7} {:>5} {:>8} {:<14} {:<14} {:<12} {}",
            s.name,
            s.equation.name(),
            s.n_modes,
            s.dt,
            format!("[{}, {}]", s.t_span_ci.0, s.t_span_ci.1),
            format!("[{}, {}]", s.t_span_full.0, s.t_span_full.1),
            conserve_name(s.conserve),
            s.blurb,
        );
    }
    println!();
    println!("bench cases: bbm-s5, nls-s5");
}

fn bench_case(args: BenchArgs) -> Result<(), CliError> {
    let mut ws = Workspace::new();
    let report = bench::perf_bench(&args.case, &mut ws)?;
    println!(
        "{}: median {:.3} s over {} runs ({} steps, n = {}, dt = {:.6})",
        report.case, report.median_seconds, report.runs, report.steps, report.n, report.dt
    );
    println!(
        "final l2 error {:.3e} at t = {:.3}",
        report.final_l2_error, report.final_time
    );
    if let Some(bound) = report.soft_time_bound_seconds {
        println!("soft wall-time bound {bound:.2} s");
    }
    if let Some(seconds) = report.comparison_seconds {
        println!("published comparison time {seconds:.2} s");
    }
    if let Some(error) = report.comparison_error {
        println!("published comparison error {error:.3e}");
    }
    if let Some(dir) = args.out {
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join(format!("{}.bench.json", report.case));
        let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
        body.push('\n');
        fs::write(&path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
