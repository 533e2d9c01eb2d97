use clap::{Parser, Subcommand};
use consortium::bargain::BargainConfig;
use consortium::scenario::{
    bargain_trace_csv, default_scenario, load_scenario, reference_csv, render_reference_diff,
    render_text, report_csv, reproduce_reference_tables, run_pipeline, run_sweep, sweep_csv,
    write_atomic, Scenario, ScenarioError,
};
use std::path::PathBuf;

/// Profit-optimal design and coalition formation for ISP/content-provider
/// consortiums.
#[derive(Parser)]
#[command(name = "consortium", version, about)]
struct Cli {
    /// Scenario file (TOML). Omitted: the base-case scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Force the net-neutrality regime (capacity increments = 0).
    #[arg(long, global = true)]
    net_neutrality: bool,

    /// Override the bargaining seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV files (default: $CONSORTIUM_OUT_DIR or ".").
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize every CP's design and report profits.
    Optimize,
    /// Full pipeline: designs, admission control, payoffs, settlements.
    Coalition,
    /// Pipeline plus bargaining equilibrium check and simulation.
    Bargain,
    /// Evaluate the pipeline over the scenario's sweep grid.
    Sweep,
    /// Recompute the reference design tables and diff them.
    Reproduce,
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("CONSORTIUM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn scenario_from(cli: &Cli) -> Result<Scenario, ScenarioError> {
    let mut scenario = match &cli.config {
        Some(path) => load_scenario(path)?,
        None => default_scenario(),
    };
    if cli.net_neutrality {
        scenario.net_neutrality = true;
        for cp in &mut scenario.cps {
            if let Some(beta) = cp.beta_pin {
                if beta != 0.0 {
                    scenario.warnings.push(format!(
                        "pinned beta {beta} ignored: net neutrality forces 0"
                    ));
                }
                cp.beta_pin = Some(0.0);
            }
        }
    }
    if let Some(seed) = cli.seed {
        let mut config = scenario.bargain.unwrap_or_default();
        config.seed = seed;
        scenario.bargain = Some(config);
    }
    Ok(scenario)
}

fn run(cli: &Cli) -> Result<(), ScenarioError> {
    let dir = out_dir(cli);
    match cli.command {
        Command::Optimize | Command::Coalition => {
            let mut scenario = scenario_from(cli)?;
            if matches!(cli.command, Command::Optimize) {
                scenario.bargain = None;
            }
            let report = run_pipeline(&scenario)?;
            print!("{}", render_text(&report));
            let path = dir.join(format!("{}_report.csv", report.scenario_id));
            write_atomic(&path, &report_csv(&[&report])).map_err(|source| ScenarioError::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("\nwrote {}", path.display());
        }
        Command::Bargain => {
            let mut scenario = scenario_from(cli)?;
            if scenario.bargain.is_none() {
                scenario.bargain = Some(BargainConfig {
                    seed: cli.seed.unwrap_or(BargainConfig::default().seed),
                    ..BargainConfig::default()
                });
            }
            let report = run_pipeline(&scenario)?;
            print!("{}", render_text(&report));
            let path = dir.join(format!("{}_report.csv", report.scenario_id));
            write_atomic(&path, &report_csv(&[&report])).map_err(|source| ScenarioError::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("\nwrote {}", path.display());
            if let Some(b) = &report.bargain {
                let trace = dir.join(format!("{}_bargain_trace.csv", report.scenario_id));
                write_atomic(&trace, &bargain_trace_csv(&b.simulation)).map_err(|source| {
                    ScenarioError::Io {
                        path: trace.display().to_string(),
                        source,
                    }
                })?;
                println!("wrote {}", trace.display());
            }
        }
        Command::Sweep => {
            let scenario = scenario_from(cli)?;
            let points = run_sweep(&scenario)?;
            for point in &points {
                match &point.report {
                    Ok(r) => {
                        let (name, _) = r.sweep_key.as_ref().expect("sweep point");
                        println!(
                            "{} = {:<12} full value {:>16.6} admission {}",
                            name,
                            point.value,
                            r.full_value,
                            if r.full_admission { "holds" } else { "fails" }
                        );
                    }
                    Err(e) => println!("value {:<12} failed: {e}", point.value),
                }
            }
            let path = dir.join(format!("{}_sweep.csv", scenario.id));
            write_atomic(&path, &sweep_csv(&points)).map_err(|source| ScenarioError::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
        Command::Reproduce => {
            let cells = reproduce_reference_tables()?;
            print!("{}", render_reference_diff(&cells));
            let path = dir.join("reference_diff.csv");
            write_atomic(&path, &reference_csv(&cells)).map_err(|source| ScenarioError::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
