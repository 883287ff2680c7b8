//! Grid environment, problem instance, and placement data model.
//!
//! All types are immutable after construction; constructors validate every
//! invariant so the solver, oracle, and simulator can rely on them without
//! re-checking.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::radio::{ChargeAmount, RadioParams};

/// Sensor identifiers are opaque labels, not indices; they need not be
/// contiguous or start at any particular value.
pub type SensorId = u32;

/// Tasks and energy transmitters are identified by their index into the
/// instance's task / ET lists.
pub type TaskId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("grid side must be at least 1")]
    EmptyGrid,
    #[error("cell size must be positive and finite, got {0}")]
    BadCellSize(f64),
    #[error("{role} cell ({x},{y}) is out of bounds for a {n}x{n} grid")]
    OutOfBounds { role: &'static str, x: u32, y: u32, n: u32 },
    #[error("duplicate {role} cell ({x},{y})")]
    DuplicateCell { role: &'static str, x: u32, y: u32 },
    #[error("cell ({x},{y}) is reserved for both a task and an ET")]
    TaskEtOverlap { x: u32, y: u32 },
    #[error("task {index} has utility requirement {value}, expected 0 < u <= 1")]
    BadUtilityRequirement { index: usize, value: f64 },
    #[error("expected {expected} utility requirements, got {got}")]
    UtilityCountMismatch { expected: usize, got: usize },
    #[error("partition has {got} groups but the environment has {expected} task cells")]
    PartitionGroupCount { expected: usize, got: usize },
    #[error("sensor id {0} appears in more than one partition group")]
    DuplicateSensor(SensorId),
    #[error("instance has {sensors} sensors but only {free} free cells")]
    NotEnoughFreeCells { sensors: usize, free: usize },
    #[error("charging requirement must be finite, got {0}")]
    BadLambda(f64),
    #[error(transparent)]
    Radio(#[from] crate::radio::RadioError),
}

/// A grid cell. Coordinates are 1-based; `(1,1)` is the bottom-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32) -> Self {
        Cell { x, y }
    }

    /// Row-major rank within an `n`x`n` grid: `y` is the slow axis, `x` the
    /// fast one. This rank is the tie-breaking backbone of the solver.
    pub fn row_major_index(self, n: u32) -> u64 {
        (self.y as u64 - 1) * n as u64 + self.x as u64
    }

    fn in_bounds(self, n: u32) -> bool {
        self.x >= 1 && self.x <= n && self.y >= 1 && self.y <= n
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Manhattan distance between two cells, in cells.
pub fn manhattan_distance(a: Cell, b: Cell) -> u64 {
    a.x.abs_diff(b.x) as u64 + a.y.abs_diff(b.y) as u64
}

/// The n-by-n deployment grid with its reserved and free cells.
///
/// `free_cells` is every cell that is neither a task cell nor an ET cell,
/// enumerated in row-major order (x varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridEnvironment {
    n: u32,
    cell_size_m: f64,
    task_cells: Vec<Cell>,
    et_cells: Vec<Cell>,
    free_cells: Vec<Cell>,
}

impl GridEnvironment {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Physical edge length of one cell in meters.
    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    pub fn task_cells(&self) -> &[Cell] {
        &self.task_cells
    }

    pub fn et_cells(&self) -> &[Cell] {
        &self.et_cells
    }

    pub fn free_cells(&self) -> &[Cell] {
        &self.free_cells
    }

    /// Physical distance corresponding to a cell-count distance.
    pub fn physical_distance_m(&self, cells: u64) -> f64 {
        cells as f64 * self.cell_size_m
    }
}

/// Builds a validated grid environment.
///
/// Task and ET cells must be in bounds, duplicate-free, and disjoint from
/// each other; free cells are computed in row-major order.
pub fn build_environment(
    n: u32,
    cell_size_m: f64,
    task_cells: Vec<Cell>,
    et_cells: Vec<Cell>,
) -> Result<GridEnvironment, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptyGrid);
    }
    if !(cell_size_m.is_finite() && cell_size_m > 0.0) {
        return Err(ModelError::BadCellSize(cell_size_m));
    }

    let mut reserved = HashSet::new();
    for (role, cells) in [("task", &task_cells), ("ET", &et_cells)] {
        let mut seen = HashSet::new();
        for &cell in cells {
            if !cell.in_bounds(n) {
                return Err(ModelError::OutOfBounds { role, x: cell.x, y: cell.y, n });
            }
            if !seen.insert(cell) {
                return Err(ModelError::DuplicateCell { role, x: cell.x, y: cell.y });
            }
        }
    }
    for &cell in &task_cells {
        reserved.insert(cell);
    }
    for &cell in &et_cells {
        if !reserved.insert(cell) {
            return Err(ModelError::TaskEtOverlap { x: cell.x, y: cell.y });
        }
    }

    let mut free_cells = Vec::with_capacity((n as usize * n as usize).saturating_sub(reserved.len()));
    for y in 1..=n {
        for x in 1..=n {
            let cell = Cell::new(x, y);
            if !reserved.contains(&cell) {
                free_cells.push(cell);
            }
        }
    }

    Ok(GridEnvironment { n, cell_size_m, task_cells, et_cells, free_cells })
}

/// A task with its grid cell and utility requirement `0 < u <= 1`.
///
/// Requirements above 1 are statically unsatisfiable (a sensor is always at
/// Manhattan distance >= 1 from its task) and rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: TaskId,
    pub cell: Cell,
    pub utility_requirement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTransmitter {
    pub id: usize,
    pub cell: Cell,
}

/// Ordered sensor-to-task association.
///
/// Group order and within-group sensor order are the solver's iteration
/// order, so the partition is part of the instance definition.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorTaskPartition {
    groups: Vec<(TaskId, Vec<SensorId>)>,
}

impl SensorTaskPartition {
    /// Groups listed per task index: `groups[j]` holds the sensors of task `j`.
    pub fn new(sensors_per_task: Vec<Vec<SensorId>>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for group in &sensors_per_task {
            for &sensor in group {
                if !seen.insert(sensor) {
                    return Err(ModelError::DuplicateSensor(sensor));
                }
            }
        }
        let groups = sensors_per_task.into_iter().enumerate().collect();
        Ok(SensorTaskPartition { groups })
    }

    pub fn groups(&self) -> &[(TaskId, Vec<SensorId>)] {
        &self.groups
    }

    pub fn sensor_count(&self) -> usize {
        self.groups.iter().map(|(_, g)| g.len()).sum()
    }

    /// Sensors in solver iteration order: tasks outer, group order inner.
    pub fn sensors_in_order(&self) -> impl Iterator<Item = (TaskId, SensorId)> + '_ {
        self.groups
            .iter()
            .flat_map(|(task, group)| group.iter().map(move |&s| (*task, s)))
    }

    /// Task a sensor is associated with, if any.
    pub fn task_of(&self, sensor: SensorId) -> Option<TaskId> {
        self.groups
            .iter()
            .find(|(_, group)| group.contains(&sensor))
            .map(|(task, _)| *task)
    }
}

/// Which constraints apply: TENP enforces both, TSP only the task utility
/// requirement, ESP only the charging requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemVariant {
    Tenp,
    Tsp,
    Esp,
}

impl ProblemVariant {
    pub fn utility_enabled(self) -> bool {
        !matches!(self, ProblemVariant::Esp)
    }

    pub fn charging_enabled(self) -> bool {
        !matches!(self, ProblemVariant::Tsp)
    }

    pub const ALL: [ProblemVariant; 3] =
        [ProblemVariant::Tenp, ProblemVariant::Tsp, ProblemVariant::Esp];
}

impl fmt::Display for ProblemVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ProblemVariant::Tenp => "TENP",
            ProblemVariant::Tsp => "TSP",
            ProblemVariant::Esp => "ESP",
        };
        f.write_str(name)
    }
}

/// A fully validated placement problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    environment: GridEnvironment,
    tasks: Vec<Task>,
    ets: Vec<EnergyTransmitter>,
    partition: SensorTaskPartition,
    lambda: ChargeAmount,
    radio: RadioParams,
    variant: ProblemVariant,
}

impl ProblemInstance {
    /// Assembles an instance from an environment, per-task utility
    /// requirements (one per task cell, in order), and a sensor partition.
    ///
    /// Task `j` occupies `task_cells[j]`; ET `k` occupies `et_cells[k]`.
    pub fn new(
        environment: GridEnvironment,
        utility_requirements: Vec<f64>,
        partition: SensorTaskPartition,
        lambda: ChargeAmount,
        radio: RadioParams,
        variant: ProblemVariant,
    ) -> Result<Self, ModelError> {
        if utility_requirements.len() != environment.task_cells().len() {
            return Err(ModelError::UtilityCountMismatch {
                expected: environment.task_cells().len(),
                got: utility_requirements.len(),
            });
        }
        for (index, &value) in utility_requirements.iter().enumerate() {
            if !(value.is_finite() && value > 0.0 && value <= 1.0) {
                return Err(ModelError::BadUtilityRequirement { index, value });
            }
        }
        if partition.groups().len() != environment.task_cells().len() {
            return Err(ModelError::PartitionGroupCount {
                expected: environment.task_cells().len(),
                got: partition.groups().len(),
            });
        }
        let sensors = partition.sensor_count();
        if sensors > environment.free_cells().len() {
            return Err(ModelError::NotEnoughFreeCells {
                sensors,
                free: environment.free_cells().len(),
            });
        }
        if !lambda.value().is_finite() {
            return Err(ModelError::BadLambda(lambda.value()));
        }
        radio.validate()?;

        let tasks = environment
            .task_cells()
            .iter()
            .zip(&utility_requirements)
            .enumerate()
            .map(|(id, (&cell, &u))| Task { id, cell, utility_requirement: u })
            .collect();
        let ets = environment
            .et_cells()
            .iter()
            .enumerate()
            .map(|(id, &cell)| EnergyTransmitter { id, cell })
            .collect();

        Ok(ProblemInstance { environment, tasks, ets, partition, lambda, radio, variant })
    }

    pub fn environment(&self) -> &GridEnvironment {
        &self.environment
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn ets(&self) -> &[EnergyTransmitter] {
        &self.ets
    }

    pub fn partition(&self) -> &SensorTaskPartition {
        &self.partition
    }

    pub fn lambda(&self) -> ChargeAmount {
        self.lambda
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    pub fn variant(&self) -> ProblemVariant {
        self.variant
    }

    pub fn sensor_count(&self) -> usize {
        self.partition.sensor_count()
    }

    /// Same instance with a different charging requirement.
    pub fn with_lambda(&self, lambda: ChargeAmount) -> Result<Self, ModelError> {
        if !lambda.value().is_finite() {
            return Err(ModelError::BadLambda(lambda.value()));
        }
        let mut clone = self.clone();
        clone.lambda = lambda;
        Ok(clone)
    }

    /// Same instance with every task's requirement replaced by `u`.
    pub fn with_uniform_utility(&self, u: f64) -> Result<Self, ModelError> {
        if !(u.is_finite() && u > 0.0 && u <= 1.0) {
            return Err(ModelError::BadUtilityRequirement { index: 0, value: u });
        }
        let mut clone = self.clone();
        for task in &mut clone.tasks {
            task.utility_requirement = u;
        }
        Ok(clone)
    }

    pub fn with_variant(&self, variant: ProblemVariant) -> Self {
        let mut clone = self.clone();
        clone.variant = variant;
        clone
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Satisfiable => f.write_str("SATISFIABLE"),
            Verdict::Unsatisfiable => f.write_str("UNSATISFIABLE"),
        }
    }
}

/// A partial or total assignment of sensors to free cells.
///
/// The verdict is `Satisfiable` exactly when every sensor of the instance is
/// assigned; a partial map with an `Unsatisfiable` verdict is a legal result.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub assignments: BTreeMap<SensorId, Cell>,
    pub verdict: Verdict,
}

impl Placement {
    pub fn new(assignments: BTreeMap<SensorId, Cell>, total_sensors: usize) -> Self {
        let verdict = if assignments.len() == total_sensors {
            Verdict::Satisfiable
        } else {
            Verdict::Unsatisfiable
        };
        Placement { assignments, verdict }
    }

    pub fn is_total(&self, instance: &ProblemInstance) -> bool {
        self.assignments.len() == instance.sensor_count()
    }
}
