//! Instance configuration files, placement artifacts, and CSV emission.
//!
//! Configs are TOML with a strict schema: unknown keys are errors, and
//! every invariant violation is reported with the offending field path.
//! Floats in CSV output carry 17 significant digits so that re-parsed data
//! compares bit-for-bit equal to the in-memory values.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Cell, ModelError, Placement, ProblemInstance, ProblemVariant, SensorId, SensorTaskPartition,
    build_environment,
};
use crate::radio::{ChargeAmount, RadioParams};
use crate::sweep::{SweepSeries, VariantSummary};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("placement line {line}: {reason}")]
    PlacementLine { line: usize, reason: String },
}

/// Textual mirror of a problem instance plus the simulation length.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub grid: GridConfig,
    pub tasks: Vec<TaskConfig>,
    pub ets: Vec<EtConfig>,
    /// Sensor ids per task, in solver iteration order.
    pub partition: Vec<Vec<SensorId>>,
    /// Charging requirement, in charge units.
    pub lambda: f64,
    pub radio: RadioParams,
    pub variant: ProblemVariant,
    pub simulation_time_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell_size_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub x: u32,
    pub y: u32,
    pub u: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtConfig {
    pub x: u32,
    pub y: u32,
}

/// A validated instance together with run parameters and load notices.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub instance: ProblemInstance,
    pub simulation_time_s: f64,
    pub notices: Vec<String>,
}

/// Reads and validates an instance config file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Loaded, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

/// Validates an instance config from text.
pub fn parse_instance(text: &str) -> Result<Loaded, ConfigError> {
    let config: InstanceConfig = toml::from_str(text)?;
    realize(&config)
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), reason: reason.into() }
}

/// Turns a parsed config into a validated instance.
pub fn realize(config: &InstanceConfig) -> Result<Loaded, ConfigError> {
    let mut notices = Vec::new();

    if config.grid.n == 0 {
        return Err(invalid("grid.n", "grid side must be at least 1"));
    }
    let cell_size_m = match config.grid.cell_size_m {
        Some(value) => {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid("grid.cell_size_m", format!("must be positive, got {value}")));
            }
            value
        }
        None => {
            notices.push("grid.cell_size_m not set; defaulting to 1.0 m".to_string());
            1.0
        }
    };

    let n = config.grid.n;
    let bounds_check = |path: String, x: u32, y: u32| -> Result<Cell, ConfigError> {
        if x < 1 || x > n || y < 1 || y > n {
            return Err(invalid(path, format!("cell ({x},{y}) is outside the {n}x{n} grid")));
        }
        Ok(Cell::new(x, y))
    };

    let mut occupied: HashMap<Cell, String> = HashMap::new();
    let mut task_cells = Vec::with_capacity(config.tasks.len());
    for (index, task) in config.tasks.iter().enumerate() {
        let cell = bounds_check(format!("tasks[{index}]"), task.x, task.y)?;
        if let Some(previous) = occupied.insert(cell, format!("tasks[{index}]")) {
            return Err(invalid(
                format!("tasks[{index}]"),
                format!("cell ({},{}) is already reserved by {previous}", task.x, task.y),
            ));
        }
        if !(task.u.is_finite() && task.u > 0.0 && task.u <= 1.0) {
            return Err(invalid(
                format!("tasks[{index}].u"),
                format!("expected 0 < u <= 1, got {}", task.u),
            ));
        }
        task_cells.push(cell);
    }
    let mut et_cells = Vec::with_capacity(config.ets.len());
    for (index, et) in config.ets.iter().enumerate() {
        let cell = bounds_check(format!("ets[{index}]"), et.x, et.y)?;
        if let Some(previous) = occupied.insert(cell, format!("ets[{index}]")) {
            return Err(invalid(
                format!("ets[{index}]"),
                format!("cell ({},{}) is already reserved by {previous}", et.x, et.y),
            ));
        }
        et_cells.push(cell);
    }

    if config.partition.len() != config.tasks.len() {
        return Err(invalid(
            "partition",
            format!(
                "expected one sensor group per task ({}), got {}",
                config.tasks.len(),
                config.partition.len()
            ),
        ));
    }
    let mut sensor_positions: BTreeMap<SensorId, String> = BTreeMap::new();
    for (group_index, group) in config.partition.iter().enumerate() {
        for (slot, &sensor) in group.iter().enumerate() {
            let here = format!("partition[{group_index}][{slot}]");
            if let Some(previous) = sensor_positions.insert(sensor, here.clone()) {
                return Err(invalid(here, format!("sensor {sensor} already listed at {previous}")));
            }
        }
    }

    if !config.lambda.is_finite() {
        return Err(invalid("lambda", format!("must be finite, got {}", config.lambda)));
    }
    config
        .radio
        .validate()
        .map_err(|e| invalid("radio", e.to_string()))?;
    if !(config.simulation_time_s.is_finite() && config.simulation_time_s > 0.0) {
        return Err(invalid(
            "simulation_time_s",
            format!("must be positive, got {}", config.simulation_time_s),
        ));
    }

    let environment = build_environment(n, cell_size_m, task_cells, et_cells)?;
    let utilities = config.tasks.iter().map(|t| t.u).collect();
    let partition = SensorTaskPartition::new(config.partition.clone())?;
    let instance = ProblemInstance::new(
        environment,
        utilities,
        partition,
        ChargeAmount::new(config.lambda),
        config.radio.clone(),
        config.variant,
    )?;

    Ok(Loaded { instance, simulation_time_s: config.simulation_time_s, notices })
}

/// Mirrors a validated instance back into config form, e.g. to persist a
/// witness fixture.
pub fn config_from_instance(instance: &ProblemInstance, simulation_time_s: f64) -> InstanceConfig {
    let env = instance.environment();
    InstanceConfig {
        grid: GridConfig { n: env.n(), cell_size_m: Some(env.cell_size_m()) },
        tasks: instance
            .tasks()
            .iter()
            .map(|t| TaskConfig { x: t.cell.x, y: t.cell.y, u: t.utility_requirement })
            .collect(),
        ets: instance.ets().iter().map(|e| EtConfig { x: e.cell.x, y: e.cell.y }).collect(),
        partition: instance
            .partition()
            .groups()
            .iter()
            .map(|(_, group)| group.clone())
            .collect(),
        lambda: instance.lambda().value(),
        radio: instance.radio().clone(),
        variant: instance.variant(),
        simulation_time_s,
    }
}

/// Serializes a config as TOML.
pub fn config_to_toml(config: &InstanceConfig) -> String {
    toml::to_string_pretty(config).expect("instance configs always serialize")
}

/// Formats a float with 17 significant digits, enough to round-trip f64
/// bit-for-bit.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Placement artifact: one `sensor_id x y` line per assignment, ordered by
/// sensor id.
pub fn placement_to_string(placement: &Placement) -> String {
    let mut out = String::new();
    for (sensor, cell) in &placement.assignments {
        writeln!(out, "{sensor} {} {}", cell.x, cell.y).expect("string writes cannot fail");
    }
    out
}

/// Parses a placement artifact and re-derives the verdict against the
/// instance's sensor count.
pub fn placement_from_str(
    text: &str,
    instance: &ProblemInstance,
) -> Result<Placement, ConfigError> {
    let mut assignments = BTreeMap::new();
    let mut used_cells = HashMap::new();
    for (number, line) in text.lines().enumerate() {
        let line_no = number + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ConfigError::PlacementLine {
                line: line_no,
                reason: format!("expected `sensor_id x y`, got {} fields", fields.len()),
            });
        }
        let parse = |field: &str, what: &str| {
            field.parse::<u32>().map_err(|_| ConfigError::PlacementLine {
                line: line_no,
                reason: format!("cannot parse {what} from `{field}`"),
            })
        };
        let sensor: SensorId = parse(fields[0], "sensor id")?;
        let cell = Cell::new(parse(fields[1], "x")?, parse(fields[2], "y")?);

        if instance.partition().task_of(sensor).is_none() {
            return Err(ConfigError::PlacementLine {
                line: line_no,
                reason: format!("sensor {sensor} is not part of the instance"),
            });
        }
        if !instance.environment().free_cells().contains(&cell) {
            return Err(ConfigError::PlacementLine {
                line: line_no,
                reason: format!("cell {cell} is not a free cell"),
            });
        }
        if let Some(other) = used_cells.insert(cell, sensor) {
            return Err(ConfigError::PlacementLine {
                line: line_no,
                reason: format!("cell {cell} is already taken by sensor {other}"),
            });
        }
        if assignments.insert(sensor, cell).is_some() {
            return Err(ConfigError::PlacementLine {
                line: line_no,
                reason: format!("sensor {sensor} is assigned twice"),
            });
        }
    }
    Ok(Placement::new(assignments, instance.sensor_count()))
}

/// CSV schema v1: `param,verdict,placed,avg_charge,avg_utility,stall_id`.
/// Unsatisfiable rows carry empty metric fields.
pub fn sweep_csv(series: &SweepSeries) -> String {
    let mut out = String::from("param,verdict,placed,avg_charge,avg_utility,stall_id\n");
    for (index, point) in series.points.iter().enumerate() {
        let (charge, utility) = match &point.metrics {
            Some(m) => (format_float(m.avg_harvested_charge), format_float(m.avg_task_utility)),
            None => (String::new(), String::new()),
        };
        let stall = series
            .stalls
            .iter()
            .position(|range| range.contains(index))
            .map(|id| id.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(point.param_value),
            point.verdict,
            point.placed_count,
            charge,
            utility,
            stall
        )
        .expect("string writes cannot fail");
    }
    out
}

/// Summary CSV: one row per variant with the maxima over satisfiable sweep
/// points; absent maxima are empty fields.
pub fn summary_csv(summary: &VariantSummary) -> String {
    let mut out = String::from("variant,max_avg_task_utility,max_avg_harvested_charge\n");
    for row in &summary.rows {
        let utility = row.max_avg_task_utility.map(format_float).unwrap_or_default();
        let charge = row.max_avg_harvested_charge.map(format_float).unwrap_or_default();
        writeln!(out, "{},{},{}", row.variant, utility, charge)
            .expect("string writes cannot fail");
    }
    out
}
