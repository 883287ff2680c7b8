//! The two feasibility predicates: task utility and charging requirement.
//!
//! Both comparisons are inclusive (`<=`), so boundary equality passes.

use thiserror::Error;

use crate::model::{
    Cell, EnergyTransmitter, GridEnvironment, ProblemVariant, Task, manhattan_distance,
};
use crate::radio::{ChargeAmount, RadioError, RadioParams, total_received_charge};

#[derive(Debug, Error, PartialEq)]
pub enum ConstraintError {
    /// Structurally impossible for cells drawn from the free set, since task
    /// cells are excluded from it; reported defensively for raw inputs.
    #[error("sensor cell {cell} coincides with its task cell")]
    ZeroTaskDistance { cell: Cell },
    #[error(transparent)]
    Radio(#[from] RadioError),
}

/// A sensor's utility for a task: the reciprocal of their Manhattan
/// distance, always in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UtilityValue(f64);

impl UtilityValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Utility of placing a sensor at `cell` for `task`: `1 / distance`.
pub fn sensor_utility(cell: Cell, task: &Task) -> Result<UtilityValue, ConstraintError> {
    let distance = manhattan_distance(cell, task.cell);
    if distance == 0 {
        return Err(ConstraintError::ZeroTaskDistance { cell });
    }
    Ok(UtilityValue(1.0 / distance as f64))
}

/// True iff the task's utility requirement is met at `cell`:
/// `u <= 1 / distance`, inclusive.
pub fn check_utility_constraint(cell: Cell, task: &Task) -> Result<bool, ConstraintError> {
    Ok(task.utility_requirement <= sensor_utility(cell, task)?.value())
}

/// True iff the charge received at `cell` from all ETs covers the charging
/// requirement: `lambda <= C(cell)`, inclusive.
pub fn check_charging_constraint(
    cell: Cell,
    ets: &[EnergyTransmitter],
    env: &GridEnvironment,
    params: &RadioParams,
    lambda: ChargeAmount,
) -> Result<bool, ConstraintError> {
    Ok(lambda <= total_received_charge(cell, ets, env, params)?)
}

/// Applies the constraints the variant enables: TENP requires both, TSP
/// only the utility constraint, ESP only the charging constraint.
#[allow(clippy::too_many_arguments)]
pub fn check_both(
    cell: Cell,
    task: &Task,
    ets: &[EnergyTransmitter],
    env: &GridEnvironment,
    params: &RadioParams,
    lambda: ChargeAmount,
    variant: ProblemVariant,
) -> Result<bool, ConstraintError> {
    if variant.utility_enabled() && !check_utility_constraint(cell, task)? {
        return Ok(false);
    }
    if variant.charging_enabled()
        && !check_charging_constraint(cell, ets, env, params, lambda)?
    {
        return Ok(false);
    }
    Ok(true)
}
