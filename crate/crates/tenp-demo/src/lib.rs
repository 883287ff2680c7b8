//! Wasm surface for the browser demo.
//!
//! Three operations back the page: the per-cell charge field for the
//! heatmap, a single solve with slider overrides, and a sweep for the
//! curve chart. Everything crosses the boundary as JSON strings so the
//! page needs no framework and the functions stay callable (and testable)
//! on native targets.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tenp::config::{Loaded, parse_instance};
use tenp::model::{ProblemInstance, ProblemVariant, Verdict};
use tenp::radio::{ChargeAmount, charge_bounds, total_received_charge};
use tenp::sim::simulate;
use tenp::solver::distance_minimization;
use tenp::sweep::{lambda_grid, sweep_lambda, sweep_utility, utility_grid};

/// The bundled 10x10 test-bed config, pre-filled into the page's editor.
#[wasm_bindgen]
pub fn default_config() -> String {
    include_str!("../../../configs/table2.cfg").to_string()
}

#[derive(Serialize)]
struct CellOut {
    x: u32,
    y: u32,
    charge: f64,
}

#[derive(Serialize)]
struct TaskOut {
    x: u32,
    y: u32,
    u: f64,
}

#[derive(Serialize)]
struct PointOut {
    x: u32,
    y: u32,
}

#[derive(Serialize)]
struct FieldOut {
    n: u32,
    lambda: f64,
    simulation_time_s: f64,
    charge_min: f64,
    charge_max: f64,
    variant: String,
    tasks: Vec<TaskOut>,
    ets: Vec<PointOut>,
    cells: Vec<CellOut>,
}

#[derive(Serialize)]
struct AssignmentOut {
    sensor: u32,
    task: usize,
    x: u32,
    y: u32,
}

#[derive(Serialize)]
struct MetricsOut {
    avg_charge: f64,
    avg_utility: f64,
}

#[derive(Serialize)]
struct SolveOut {
    verdict: String,
    placed: usize,
    sensor_count: usize,
    assignments: Vec<AssignmentOut>,
    metrics: Option<MetricsOut>,
}

#[derive(Serialize)]
struct SweepPointOut {
    param: f64,
    satisfiable: bool,
    placed: usize,
    avg_charge: Option<f64>,
    avg_utility: Option<f64>,
}

#[derive(Serialize)]
struct StallOut {
    start: usize,
    end: usize,
}

#[derive(Serialize)]
struct SweepOut {
    axis: String,
    points: Vec<SweepPointOut>,
    stalls: Vec<StallOut>,
}

fn load(config_toml: &str) -> Result<Loaded, String> {
    parse_instance(config_toml).map_err(|e| e.to_string())
}

fn parse_variant(variant: &str) -> Result<ProblemVariant, String> {
    match variant {
        "TENP" => Ok(ProblemVariant::Tenp),
        "TSP" => Ok(ProblemVariant::Tsp),
        "ESP" => Ok(ProblemVariant::Esp),
        other => Err(format!("unknown variant `{other}`; expected TENP, TSP, or ESP")),
    }
}

/// Applies the page's slider overrides on top of the parsed config.
fn adjusted(
    loaded: &Loaded,
    lambda: f64,
    uniform_u: f64,
    variant: &str,
) -> Result<ProblemInstance, String> {
    let mut instance = loaded
        .instance
        .with_lambda(ChargeAmount::new(lambda))
        .map_err(|e| e.to_string())?;
    if uniform_u > 0.0 {
        instance = instance.with_uniform_utility(uniform_u).map_err(|e| e.to_string())?;
    }
    Ok(instance.with_variant(parse_variant(variant)?))
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Environment layout and total received charge of every free cell.
#[wasm_bindgen]
pub fn charge_field(config_toml: &str) -> Result<String, String> {
    let loaded = load(config_toml)?;
    let instance = &loaded.instance;
    let env = instance.environment();
    let (min, max) =
        charge_bounds(env, instance.ets(), instance.radio()).map_err(|e| e.to_string())?;
    let cells = env
        .free_cells()
        .iter()
        .map(|&cell| {
            total_received_charge(cell, instance.ets(), env, instance.radio())
                .map(|charge| CellOut { x: cell.x, y: cell.y, charge: charge.value() })
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    to_json(&FieldOut {
        n: env.n(),
        lambda: instance.lambda().value(),
        simulation_time_s: loaded.simulation_time_s,
        charge_min: min.value(),
        charge_max: max.value(),
        variant: instance.variant().to_string(),
        tasks: instance
            .tasks()
            .iter()
            .map(|t| TaskOut { x: t.cell.x, y: t.cell.y, u: t.utility_requirement })
            .collect(),
        ets: instance.ets().iter().map(|e| PointOut { x: e.cell.x, y: e.cell.y }).collect(),
        cells,
    })
}

/// Greedy solve with slider overrides; metrics are present when the
/// placement is total.
#[wasm_bindgen]
pub fn solve_placement(
    config_toml: &str,
    lambda: f64,
    uniform_u: f64,
    variant: &str,
) -> Result<String, String> {
    let loaded = load(config_toml)?;
    let instance = adjusted(&loaded, lambda, uniform_u, variant)?;
    let placement = distance_minimization(&instance);
    let metrics = match placement.verdict {
        Verdict::Satisfiable => {
            let metrics = simulate(&placement, &instance, loaded.simulation_time_s)
                .map_err(|e| e.to_string())?;
            Some(MetricsOut {
                avg_charge: metrics.avg_harvested_charge,
                avg_utility: metrics.avg_task_utility,
            })
        }
        Verdict::Unsatisfiable => None,
    };
    let assignments = placement
        .assignments
        .iter()
        .map(|(&sensor, &cell)| AssignmentOut {
            sensor,
            task: instance.partition().task_of(sensor).expect("assigned sensors are known"),
            x: cell.x,
            y: cell.y,
        })
        .collect();
    to_json(&SolveOut {
        verdict: placement.verdict.to_string(),
        placed: placement.assignments.len(),
        sensor_count: instance.sensor_count(),
        assignments,
        metrics,
    })
}

/// Sweep for the curve chart. `axis` is `lambda` or `utility`; the slider
/// overrides fix the other parameter.
#[wasm_bindgen]
pub fn sweep_curve(
    config_toml: &str,
    axis: &str,
    points: usize,
    lambda: f64,
    uniform_u: f64,
    variant: &str,
) -> Result<String, String> {
    let loaded = load(config_toml)?;
    let instance = adjusted(&loaded, lambda, uniform_u, variant)?;
    let series = match axis {
        "lambda" => {
            let grid = lambda_grid(&instance, points).map_err(|e| e.to_string())?;
            sweep_lambda(&instance, &grid, loaded.simulation_time_s).map_err(|e| e.to_string())?
        }
        "utility" => {
            let grid = utility_grid(0.10, 0.25, points).map_err(|e| e.to_string())?;
            sweep_utility(&instance, &grid, loaded.simulation_time_s).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown axis `{other}`; expected lambda or utility")),
    };
    to_json(&SweepOut {
        axis: axis.to_string(),
        points: series
            .points
            .iter()
            .map(|p| SweepPointOut {
                param: p.param_value,
                satisfiable: p.verdict == Verdict::Satisfiable,
                placed: p.placed_count,
                avg_charge: p.metrics.as_ref().map(|m| m.avg_harvested_charge),
                avg_utility: p.metrics.as_ref().map(|m| m.avg_task_utility),
            })
            .collect(),
        stalls: series.stalls.iter().map(|s| StallOut { start: s.start, end: s.end }).collect(),
    })
}
