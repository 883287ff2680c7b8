//! Greedy distance-minimizing placement.
//!
//! Sensors are processed in partition order (tasks outer, group order
//! inner). For each sensor the currently unoccupied free cells are ranked
//! by combined distance to the sensor's task and to every ET, ties broken
//! by row-major cell index, and the first feasible cell in that order is
//! taken. A sensor with no feasible cell stays unassigned and processing
//! continues, so unsatisfiable instances still yield partial placements.

use std::collections::BTreeMap;

use crate::constraints::check_both;
use crate::model::{
    Cell, EnergyTransmitter, GridEnvironment, Placement, ProblemInstance, Task,
    manhattan_distance,
};

/// A free cell together with its ranking keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedCell {
    pub cell: Cell,
    /// Manhattan distance to the task plus summed distances to every ET.
    pub combined_distance: u64,
    /// Row-major cell index; the deterministic secondary sort key.
    pub tie_rank: u64,
}

/// Distance to the task plus the summed distances to all ETs, in cells.
pub fn combined_distance(cell: Cell, task: &Task, ets: &[EnergyTransmitter]) -> u64 {
    let et_distance: u64 = ets.iter().map(|et| manhattan_distance(cell, et.cell)).sum();
    manhattan_distance(cell, task.cell) + et_distance
}

/// Ranks candidate cells ascending by combined distance, then by row-major
/// index. The result does not depend on the order of `free`.
pub fn rank_free_cells(
    free: &[Cell],
    task: &Task,
    ets: &[EnergyTransmitter],
    env: &GridEnvironment,
) -> Vec<RankedCell> {
    let mut ranked: Vec<RankedCell> = free
        .iter()
        .map(|&cell| RankedCell {
            cell,
            combined_distance: combined_distance(cell, task, ets),
            tie_rank: cell.row_major_index(env.n()),
        })
        .collect();
    ranked.sort_by_key(|rc| (rc.combined_distance, rc.tie_rank));
    ranked
}

/// Greedy placement over the whole instance.
///
/// Deterministic: identical instances yield identical placements. The
/// verdict is `Satisfiable` exactly when every sensor got a cell;
/// infeasibility is a verdict, never an error.
pub fn distance_minimization(instance: &ProblemInstance) -> Placement {
    let env = instance.environment();
    let ets = instance.ets();
    let mut available = env.free_cells().to_vec();
    let mut assignments = BTreeMap::new();

    for (task_id, sensor_id) in instance.partition().sensors_in_order() {
        let task = &instance.tasks()[task_id];
        let ranked = rank_free_cells(&available, task, ets, env);
        let chosen = ranked.iter().find(|rc| {
            check_both(
                rc.cell,
                task,
                ets,
                env,
                instance.radio(),
                instance.lambda(),
                instance.variant(),
            )
            .expect("free cells are disjoint from task and ET cells in a validated instance")
        });
        if let Some(rc) = chosen {
            let cell = rc.cell;
            assignments.insert(sensor_id, cell);
            available.retain(|&c| c != cell);
        }
    }

    Placement::new(assignments, instance.sensor_count())
}
