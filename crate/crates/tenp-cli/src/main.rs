//! Command-line front end for the placement solver, simulator, exact
//! oracle, witness search, and sweep harness.
//!
//! Exit codes: 0 on success (an UNSATISFIABLE verdict is a result, not an
//! error), 1 on usage errors, 2 on load/validation errors, 3 when the
//! oracle's search budget is exhausted.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tenp::config::{
    Loaded, config_from_instance, config_to_toml, format_float, load_instance,
    placement_from_str, placement_to_string, summary_csv, sweep_csv,
};
use tenp::oracle::{
    DEFAULT_NODE_BUDGET, OracleError, exact_solve_with_budget, find_incompleteness_witness,
};
use tenp::sim::simulate;
use tenp::solver::distance_minimization;
use tenp::sweep::{lambda_grid, sweep_lambda, sweep_utility, utility_grid};

#[derive(Parser)]
#[command(name = "tenp", version, about = "Task- and energy-aware sensor node placement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the greedy placement and print the verdict plus assignments.
    Solve {
        /// Instance config file.
        config: PathBuf,
        /// Also write the placement artifact (one `sensor x y` line each).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate charging over an existing placement artifact.
    Simulate {
        config: PathBuf,
        /// Placement artifact produced by `solve --out`.
        #[arg(long)]
        placement: PathBuf,
        /// Simulation length in seconds; defaults to the config value.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Sweep the charging requirement or the uniform task utility; emits CSV.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Grid size; defaults to 18 for lambda and 16 for utility.
        #[arg(long)]
        points: Option<usize>,
        /// Lower end of the utility grid.
        #[arg(long, default_value_t = 0.10)]
        u_min: f64,
        /// Upper end of the utility grid.
        #[arg(long, default_value_t = 0.25)]
        u_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact exhaustive solve, guarded by a node budget.
    Oracle {
        config: PathBuf,
        /// Maximum feasibility-checked partial assignments.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Search for an instance where the greedy solver misses a feasible
    /// placement; emits the instance as a config fixture, or ABSENT.
    Witness {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        attempts: u64,
        /// Write the fixture here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-variant maxima over the applicable sweeps; emits CSV.
    Summary {
        config: PathBuf,
        #[arg(long, default_value_t = 18)]
        lambda_points: usize,
        #[arg(long, default_value_t = 16)]
        utility_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Lambda,
    Utility,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(error: E) -> Self {
        Failure::validation(error.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = if error.use_stderr() { 1 } else { 0 };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let loaded = load_instance(path)?;
    for notice in &loaded.notices {
        eprintln!("notice: {notice}");
    }
    Ok(loaded)
}

/// Writes to stdout, treating a closed pipe as a normal early exit.
fn out(text: impl AsRef<str>) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(error) = stdout.write_all(text.as_ref().as_bytes()) {
        if error.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {error}");
        std::process::exit(2);
    }
}

fn outln(text: impl AsRef<str>) {
    out(text.as_ref());
    out("\n");
}

fn emit(text: &str, target: Option<&Path>) -> Result<(), Failure> {
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            out(text);
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { config, out: artifact } => {
            let loaded = load(&config)?;
            let placement = distance_minimization(&loaded.instance);
            outln(format!("verdict {}", placement.verdict));
            out(placement_to_string(&placement));
            if let Some(path) = artifact {
                emit(&placement_to_string(&placement), Some(&path))?;
            }
            Ok(())
        }
        Command::Simulate { config, placement, time } => {
            let loaded = load(&config)?;
            let text = std::fs::read_to_string(&placement).map_err(|e| {
                Failure::validation(format!("cannot read {}: {e}", placement.display()))
            })?;
            let placement = placement_from_str(&text, &loaded.instance)?;
            let metrics = simulate(
                &placement,
                &loaded.instance,
                time.unwrap_or(loaded.simulation_time_s),
            )?;
            let mut report = String::new();
            let _ = writeln!(
                report,
                "avg_harvested_charge {}",
                format_float(metrics.avg_harvested_charge)
            );
            let _ = writeln!(report, "avg_task_utility {}", format_float(metrics.avg_task_utility));
            for ((_, sensor), charge) in loaded
                .instance
                .partition()
                .sensors_in_order()
                .zip(&metrics.per_sensor_charge)
            {
                let _ =
                    writeln!(report, "sensor_charge {sensor} {}", format_float(charge.value()));
            }
            for (task, utility) in metrics.per_task_utility.iter().enumerate() {
                let _ = writeln!(report, "task_utility {task} {}", format_float(*utility));
            }
            out(report);
            Ok(())
        }
        Command::Sweep { config, axis, points, u_min, u_max, out } => {
            let loaded = load(&config)?;
            let series = match axis {
                Axis::Lambda => {
                    let grid = lambda_grid(&loaded.instance, points.unwrap_or(18))?;
                    sweep_lambda(&loaded.instance, &grid, loaded.simulation_time_s)?
                }
                Axis::Utility => {
                    let grid = utility_grid(u_min, u_max, points.unwrap_or(16))?;
                    sweep_utility(&loaded.instance, &grid, loaded.simulation_time_s)?
                }
            };
            emit(&sweep_csv(&series), out.as_deref())
        }
        Command::Oracle { config, budget } => {
            let loaded = load(&config)?;
            let result = exact_solve_with_budget(&loaded.instance, budget).map_err(|e| {
                let code = if matches!(e, OracleError::BudgetExceeded { .. }) { 3 } else { 2 };
                Failure { code, message: e.to_string() }
            })?;
            outln(format!("verdict {}", result.placement.verdict));
            match result.objective {
                Some(objective) => outln(format!("objective {objective}")),
                None => outln("objective ABSENT"),
            }
            outln(format!("explored {}", result.explored));
            out(placement_to_string(&result.placement));
            Ok(())
        }
        Command::Witness { seed, attempts, out } => {
            match find_incompleteness_witness(seed, attempts) {
                Some(instance) => {
                    // Re-check the defining disagreement before emitting.
                    let greedy = distance_minimization(&instance);
                    let exact = exact_solve_with_budget(&instance, DEFAULT_NODE_BUDGET)
                        .map_err(|e| Failure { code: 3, message: e.to_string() })?;
                    eprintln!(
                        "witness: greedy={} oracle={}",
                        greedy.verdict, exact.placement.verdict
                    );
                    let config =
                        config_from_instance(&instance, instance.radio().frame_s);
                    emit(&config_to_toml(&config), out.as_deref())
                }
                None => {
                    outln("ABSENT");
                    Ok(())
                }
            }
        }
        Command::Summary { config, lambda_points, utility_points, out } => {
            let loaded = load(&config)?;
            let lambda_values = lambda_grid(&loaded.instance, lambda_points)?;
            let utility_values = utility_grid(0.10, 0.25, utility_points)?;
            let summary = tenp::sweep::variant_summary(
                &loaded.instance,
                &lambda_values,
                &utility_values,
                loaded.simulation_time_s,
            )?;
            emit(&summary_csv(&summary), out.as_deref())
        }
    }
}
