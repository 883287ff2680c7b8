//! Frame-structured charging simulation over a fixed placement.
//!
//! Time advances in unit steps. At the start of every frame each sensor
//! records the charge its cell receives over the charging window (the
//! window length is already part of the per-frame charge formula, so a
//! sub-second window is a fractional accumulation inside the frame-start
//! step rather than a half-step of the loop). The rest of the frame is
//! network operation, which is a structural no-op hook here.
//!
//! Placements are static, so the recorded per-sensor charge is identical
//! in every frame and both evaluation metrics are independent of how long
//! the simulation runs.

use thiserror::Error;

use crate::constraints::sensor_utility;
use crate::model::{Placement, ProblemInstance, SensorId};
use crate::radio::{ChargeAmount, total_received_charge};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("simulation requires a total placement: {assigned} of {sensors} sensors assigned")]
    PartialPlacement { assigned: usize, sensors: usize },
    #[error("sensor {0} of the instance is missing from the placement")]
    MissingSensor(SensorId),
    #[error("simulation time {time_s} s must be a positive multiple of the frame size {frame_s} s")]
    BadSimulationTime { time_s: f64, frame_s: f64 },
    #[error("placement puts sensor {sensor} on an invalid cell: {reason}")]
    BadPlacementCell { sensor: SensorId, reason: String },
}

/// The two evaluation metrics plus their per-sensor / per-task breakdowns.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    /// Mean over sensors of per-frame charge, divided by the frame length:
    /// charge units per sensor per frame-second.
    pub avg_harvested_charge: f64,
    /// Mean over tasks of the summed utilities of their sensors.
    pub avg_task_utility: f64,
    /// Per-frame charge of every sensor, in partition order.
    pub per_sensor_charge: Vec<ChargeAmount>,
    /// Summed sensor utility of every task, in task order.
    pub per_task_utility: Vec<f64>,
}

/// Loop accounting, for structural checks of the frame schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimTrace {
    /// Frame starts the loop detected.
    pub frames: u64,
    /// Steps in which the network-operation hook ran at all.
    pub hook_invocations: u64,
    /// Total network-operation time in unit steps; fractional when the
    /// charging window is shorter than one step.
    pub operation_steps: f64,
}

/// Sensing and data transmission would happen here; the schedule calls it
/// during every operation window so future work can plug real behavior in.
pub fn perform_network_operation() {}

/// Runs the frame loop and computes both metrics.
pub fn simulate(
    placement: &Placement,
    instance: &ProblemInstance,
    simulation_time_s: f64,
) -> Result<SimMetrics, SimError> {
    simulate_traced(placement, instance, simulation_time_s).map(|(metrics, _)| metrics)
}

/// As [`simulate`], additionally reporting the loop accounting.
pub fn simulate_traced(
    placement: &Placement,
    instance: &ProblemInstance,
    simulation_time_s: f64,
) -> Result<(SimMetrics, SimTrace), SimError> {
    let frame_s = instance.radio().frame_s;
    if !(simulation_time_s.is_finite() && simulation_time_s > 0.0)
        || (simulation_time_s / frame_s).fract().abs() > 1e-9
    {
        return Err(SimError::BadSimulationTime { time_s: simulation_time_s, frame_s });
    }
    if placement.assignments.len() != instance.sensor_count() {
        return Err(SimError::PartialPlacement {
            assigned: placement.assignments.len(),
            sensors: instance.sensor_count(),
        });
    }

    let sensors: Vec<SensorId> =
        instance.partition().sensors_in_order().map(|(_, s)| s).collect();
    for &sensor in &sensors {
        if !placement.assignments.contains_key(&sensor) {
            return Err(SimError::MissingSensor(sensor));
        }
    }

    let charging_window = instance.radio().charging_window_s();
    let mut per_sensor_charge: Vec<ChargeAmount> = vec![ChargeAmount::ZERO; sensors.len()];
    let mut trace = SimTrace { frames: 0, hook_invocations: 0, operation_steps: 0.0 };

    let mut step: u64 = 0;
    while (step as f64) < simulation_time_s {
        let now = step as f64;
        if (now / frame_s).fract() == 0.0 {
            trace.frames += 1;
            for (slot, &sensor) in sensors.iter().enumerate() {
                let cell = placement.assignments[&sensor];
                per_sensor_charge[slot] = total_received_charge(
                    cell,
                    instance.ets(),
                    instance.environment(),
                    instance.radio(),
                )
                .map_err(|e| SimError::BadPlacementCell { sensor, reason: e.to_string() })?;
            }
        }
        // Operation fills whatever part of this step the charging window
        // of the current frame does not cover.
        let frame_offset = now - (now / frame_s).floor() * frame_s;
        let operation_overlap = ((frame_offset + 1.0).min(frame_s)
            - frame_offset.max(charging_window))
        .clamp(0.0, 1.0);
        if operation_overlap > 0.0 {
            perform_network_operation();
            trace.hook_invocations += 1;
            trace.operation_steps += operation_overlap;
        }
        step += 1;
    }

    let mut per_task_utility = vec![0.0; instance.tasks().len()];
    for (task_id, sensor_id) in instance.partition().sensors_in_order() {
        let cell = placement.assignments[&sensor_id];
        let utility = sensor_utility(cell, &instance.tasks()[task_id])
            .map_err(|e| SimError::BadPlacementCell { sensor: sensor_id, reason: e.to_string() })?;
        per_task_utility[task_id] += utility.value();
    }

    let avg_harvested_charge = if sensors.is_empty() {
        0.0
    } else {
        per_sensor_charge.iter().map(|c| c.value()).sum::<f64>()
            / (sensors.len() as f64 * frame_s)
    };
    let avg_task_utility = if per_task_utility.is_empty() {
        0.0
    } else {
        per_task_utility.iter().sum::<f64>() / per_task_utility.len() as f64
    };

    Ok((
        SimMetrics { avg_harvested_charge, avg_task_utility, per_sensor_charge, per_task_utility },
        trace,
    ))
}
