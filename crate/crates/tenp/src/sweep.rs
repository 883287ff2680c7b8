//! Parameter sweeps: the charging requirement against fixed task utilities,
//! the uniform task utility against a fixed charging requirement, stall
//! detection, and the per-variant summary.
//!
//! Charging-requirement grids are derived from the achievable charge range
//! of the environment, so they stay meaningful in the model's own charge
//! units. Sweeps never stop at the first unsatisfiable point; the whole
//! grid is recorded so non-monotone feasibility would be visible in the
//! output instead of hidden.

use thiserror::Error;

use crate::model::{ProblemInstance, ProblemVariant, Verdict};
use crate::radio::{ChargeAmount, RadioError, charge_bounds};
use crate::sim::{SimError, SimMetrics, simulate};
use crate::solver::distance_minimization;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("a {axis} sweep does not apply to the {variant} variant")]
    VariantMismatch { variant: ProblemVariant, axis: SweptParameter },
    #[error("sweep grid must be non-empty and strictly ascending")]
    BadGrid,
    #[error("utility grid values must lie in (0, 1], got {0}")]
    BadUtilityValue(f64),
    #[error("a grid of at least one point is required")]
    EmptyGrid,
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    Lambda,
    Utility,
}

impl std::fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweptParameter::Lambda => f.write_str("lambda"),
            SweptParameter::Utility => f.write_str("utility"),
        }
    }
}

/// One sweep evaluation: metrics are present exactly when the greedy
/// verdict is SATISFIABLE.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param_value: f64,
    pub verdict: Verdict,
    pub metrics: Option<SimMetrics>,
    pub placed_count: usize,
}

/// Inclusive index range of points forming one stall region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StallRange {
    pub start: usize,
    pub end: usize,
}

impl StallRange {
    pub fn contains(&self, index: usize) -> bool {
        index >= self.start && index <= self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub variant: ProblemVariant,
    pub swept: SweptParameter,
    pub points: Vec<SweepPoint>,
    pub stalls: Vec<StallRange>,
}

/// Ascending charging-requirement grid spanning the achievable charge range
/// of the environment, `points` values inclusive of both ends. Duplicate
/// values collapsing onto each other (degenerate range) are removed.
pub fn lambda_grid(
    instance: &ProblemInstance,
    points: usize,
) -> Result<Vec<f64>, SweepError> {
    if points == 0 {
        return Err(SweepError::EmptyGrid);
    }
    let (min, max) = charge_bounds(instance.environment(), instance.ets(), instance.radio())?;
    Ok(linspace(min.value(), max.value(), points))
}

/// Evenly spaced values over `[lo, hi]` with exact endpoints; collapsing
/// duplicates (degenerate range) are removed.
fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(points);
    for k in 0..points {
        let value = if k == 0 {
            lo
        } else if k + 1 == points {
            hi
        } else {
            lo + (k as f64 / (points - 1) as f64) * (hi - lo)
        };
        grid.push(value);
    }
    grid.dedup();
    grid
}

/// Evenly spaced utility grid over `[lo, hi]`, `points` values inclusive.
pub fn utility_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, SweepError> {
    if points == 0 {
        return Err(SweepError::EmptyGrid);
    }
    for value in [lo, hi] {
        if !(value.is_finite() && value > 0.0 && value <= 1.0) {
            return Err(SweepError::BadUtilityValue(value));
        }
    }
    if hi < lo {
        return Err(SweepError::BadGrid);
    }
    Ok(linspace(lo, hi, points))
}

fn check_grid(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::BadGrid);
    }
    Ok(())
}

fn evaluate_point(
    instance: &ProblemInstance,
    param_value: f64,
    simulation_time_s: f64,
) -> Result<SweepPoint, SweepError> {
    let placement = distance_minimization(instance);
    let placed_count = placement.assignments.len();
    let metrics = match placement.verdict {
        Verdict::Satisfiable => Some(simulate(&placement, instance, simulation_time_s)?),
        Verdict::Unsatisfiable => None,
    };
    Ok(SweepPoint { param_value, verdict: placement.verdict, metrics, placed_count })
}

/// Sweeps the charging requirement over `grid`, keeping the instance's task
/// utility requirements fixed. Applies to TENP and ESP.
pub fn sweep_lambda(
    instance: &ProblemInstance,
    grid: &[f64],
    simulation_time_s: f64,
) -> Result<SweepSeries, SweepError> {
    if !instance.variant().charging_enabled() {
        return Err(SweepError::VariantMismatch {
            variant: instance.variant(),
            axis: SweptParameter::Lambda,
        });
    }
    check_grid(grid)?;
    let mut points = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let case = instance.with_lambda(ChargeAmount::new(lambda))?;
        points.push(evaluate_point(&case, lambda, simulation_time_s)?);
    }
    let stalls = detect_stalls(&points);
    Ok(SweepSeries { variant: instance.variant(), swept: SweptParameter::Lambda, points, stalls })
}

/// Sweeps a uniform task utility requirement over `grid`, keeping the
/// instance's charging requirement fixed. Applies to TENP and TSP.
pub fn sweep_utility(
    instance: &ProblemInstance,
    grid: &[f64],
    simulation_time_s: f64,
) -> Result<SweepSeries, SweepError> {
    if !instance.variant().utility_enabled() {
        return Err(SweepError::VariantMismatch {
            variant: instance.variant(),
            axis: SweptParameter::Utility,
        });
    }
    check_grid(grid)?;
    for &u in grid {
        if !(u > 0.0 && u <= 1.0) {
            return Err(SweepError::BadUtilityValue(u));
        }
    }
    let mut points = Vec::with_capacity(grid.len());
    for &u in grid {
        let case = instance.with_uniform_utility(u)?;
        points.push(evaluate_point(&case, u, simulation_time_s)?);
    }
    let stalls = detect_stalls(&points);
    Ok(SweepSeries { variant: instance.variant(), swept: SweptParameter::Utility, points, stalls })
}

/// Maximal runs (length >= 2) of consecutive SATISFIABLE points whose
/// (average charge, average utility) pairs are bit-for-bit identical.
pub fn detect_stalls(points: &[SweepPoint]) -> Vec<StallRange> {
    let key = |p: &SweepPoint| {
        p.metrics
            .as_ref()
            .map(|m| (m.avg_harvested_charge.to_bits(), m.avg_task_utility.to_bits()))
    };
    let mut stalls = Vec::new();
    let mut run_start = 0;
    for index in 1..=points.len() {
        let extends = index < points.len()
            && key(&points[index]).is_some()
            && key(&points[index]) == key(&points[run_start]);
        if extends {
            continue;
        }
        if key(&points[run_start]).is_some() && index - run_start >= 2 {
            stalls.push(StallRange { start: run_start, end: index - 1 });
        }
        run_start = index;
    }
    stalls
}

/// Per-variant maxima row of the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub variant: ProblemVariant,
    pub max_avg_task_utility: Option<f64>,
    pub max_avg_harvested_charge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub rows: Vec<SummaryRow>,
}

impl VariantSummary {
    pub fn row(&self, variant: ProblemVariant) -> &SummaryRow {
        self.rows
            .iter()
            .find(|r| r.variant == variant)
            .expect("summary always carries all three variants")
    }
}

/// Runs every sweep a variant admits (TENP: both axes; ESP: charging only;
/// TSP: utility only) and reports per-variant maxima over the satisfiable
/// points. A variant with no satisfiable point reports absent maxima.
pub fn variant_summary(
    instance: &ProblemInstance,
    lambda_values: &[f64],
    utility_values: &[f64],
    simulation_time_s: f64,
) -> Result<VariantSummary, SweepError> {
    let mut rows = Vec::with_capacity(3);
    for variant in [ProblemVariant::Tenp, ProblemVariant::Esp, ProblemVariant::Tsp] {
        let case = instance.with_variant(variant);
        let mut series = Vec::new();
        if variant.charging_enabled() {
            series.push(sweep_lambda(&case, lambda_values, simulation_time_s)?);
        }
        if variant.utility_enabled() {
            series.push(sweep_utility(&case, utility_values, simulation_time_s)?);
        }
        let sat_metrics = series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter_map(|p| p.metrics.as_ref());
        let mut max_utility: Option<f64> = None;
        let mut max_charge: Option<f64> = None;
        for metrics in sat_metrics {
            max_utility = Some(match max_utility {
                Some(current) => current.max(metrics.avg_task_utility),
                None => metrics.avg_task_utility,
            });
            max_charge = Some(match max_charge {
                Some(current) => current.max(metrics.avg_harvested_charge),
                None => metrics.avg_harvested_charge,
            });
        }
        rows.push(SummaryRow {
            variant,
            max_avg_task_utility: max_utility,
            max_avg_harvested_charge: max_charge,
        });
    }
    Ok(VariantSummary { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, SensorTaskPartition, build_environment};
    use crate::radio::testbed_radio_params;

    fn point(value: f64, metrics: Option<(f64, f64)>) -> SweepPoint {
        SweepPoint {
            param_value: value,
            verdict: if metrics.is_some() { Verdict::Satisfiable } else { Verdict::Unsatisfiable },
            metrics: metrics.map(|(charge, utility)| SimMetrics {
                avg_harvested_charge: charge,
                avg_task_utility: utility,
                per_sensor_charge: vec![],
                per_task_utility: vec![],
            }),
            placed_count: 0,
        }
    }

    fn small_instance(variant: ProblemVariant) -> ProblemInstance {
        let env =
            build_environment(4, 1.0, vec![Cell::new(1, 1)], vec![Cell::new(4, 4)]).unwrap();
        ProblemInstance::new(
            env,
            vec![0.2],
            SensorTaskPartition::new(vec![vec![1, 2]]).unwrap(),
            ChargeAmount::new(-1e9),
            testbed_radio_params(),
            variant,
        )
        .unwrap()
    }

    #[test]
    fn stall_detection_examples() {
        let a = Some((1.0, 2.0));
        let b = Some((3.0, 2.0));
        let c = Some((3.0, 4.0));
        let points: Vec<SweepPoint> =
            [a, a, a, b, c, c].iter().enumerate().map(|(i, m)| point(i as f64, *m)).collect();
        assert_eq!(
            detect_stalls(&points),
            vec![StallRange { start: 0, end: 2 }, StallRange { start: 4, end: 5 }]
        );

        let varying: Vec<SweepPoint> =
            [a, b, c].iter().enumerate().map(|(i, m)| point(i as f64, *m)).collect();
        assert!(detect_stalls(&varying).is_empty());

        let constant: Vec<SweepPoint> =
            [b, b, b, b].iter().enumerate().map(|(i, m)| point(i as f64, *m)).collect();
        assert_eq!(detect_stalls(&constant), vec![StallRange { start: 0, end: 3 }]);
    }

    #[test]
    fn stall_runs_break_at_unsat_points() {
        let a = Some((1.0, 2.0));
        let points: Vec<SweepPoint> =
            [a, a, None, a, a].iter().enumerate().map(|(i, m)| point(i as f64, *m)).collect();
        assert_eq!(
            detect_stalls(&points),
            vec![StallRange { start: 0, end: 1 }, StallRange { start: 3, end: 4 }]
        );
    }

    #[test]
    fn lambda_sweep_rejects_tsp() {
        let instance = small_instance(ProblemVariant::Tsp);
        assert!(matches!(
            sweep_lambda(&instance, &[0.0, 1.0], 10.0),
            Err(SweepError::VariantMismatch { .. })
        ));
    }

    #[test]
    fn utility_sweep_rejects_esp() {
        let instance = small_instance(ProblemVariant::Esp);
        assert!(matches!(
            sweep_utility(&instance, &[0.1, 0.2], 10.0),
            Err(SweepError::VariantMismatch { .. })
        ));
    }

    #[test]
    fn grids_must_ascend() {
        let instance = small_instance(ProblemVariant::Tenp);
        assert!(matches!(
            sweep_lambda(&instance, &[1.0, 1.0], 10.0),
            Err(SweepError::BadGrid)
        ));
        assert!(matches!(sweep_lambda(&instance, &[], 10.0), Err(SweepError::BadGrid)));
    }

    #[test]
    fn single_point_at_minimum_charge_is_satisfiable() {
        let instance = small_instance(ProblemVariant::Tenp);
        let (min, _) =
            charge_bounds(instance.environment(), instance.ets(), instance.radio()).unwrap();
        let series = sweep_lambda(&instance, &[min.value()], 10.0).unwrap();
        assert_eq!(series.points.len(), 1);
        assert_eq!(series.points[0].verdict, Verdict::Satisfiable);
        assert!(series.points[0].metrics.is_some());
    }

    #[test]
    fn grid_above_maximum_charge_is_all_unsat() {
        let instance = small_instance(ProblemVariant::Esp);
        let (_, max) =
            charge_bounds(instance.environment(), instance.ets(), instance.radio()).unwrap();
        let grid = [max.value() + 1.0, max.value() + 2.0];
        let series = sweep_lambda(&instance, &grid, 10.0).unwrap();
        assert!(series.points.iter().all(|p| p.verdict == Verdict::Unsatisfiable));
        assert!(series.points.iter().all(|p| p.metrics.is_none()));
    }

    #[test]
    fn utility_one_with_crowded_task_is_unsat() {
        // Five sensors cannot all sit at distance 1 from one task: a cell
        // has at most four neighbors.
        let env = build_environment(5, 1.0, vec![Cell::new(3, 3)], vec![]).unwrap();
        let instance = ProblemInstance::new(
            env,
            vec![0.1],
            SensorTaskPartition::new(vec![vec![1, 2, 3, 4, 5]]).unwrap(),
            ChargeAmount::new(-1e9),
            testbed_radio_params(),
            ProblemVariant::Tsp,
        )
        .unwrap();
        let series = sweep_utility(&instance, &[0.5, 1.0], 10.0).unwrap();
        assert_eq!(series.points[0].verdict, Verdict::Satisfiable);
        assert_eq!(series.points[1].verdict, Verdict::Unsatisfiable);
        assert_eq!(series.points[1].placed_count, 4);
    }

    #[test]
    fn lambda_grid_spans_charge_bounds() {
        let instance = small_instance(ProblemVariant::Tenp);
        let grid = lambda_grid(&instance, 18).unwrap();
        let (min, max) =
            charge_bounds(instance.environment(), instance.ets(), instance.radio()).unwrap();
        assert_eq!(grid.len(), 18);
        assert_eq!(grid[0], min.value());
        assert_eq!(grid[17], max.value());
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn summary_single_free_cell_identical_across_variants() {
        // 2x2 grid, two task cells and one ET cell leave one free cell.
        let env = build_environment(
            2,
            1.0,
            vec![Cell::new(1, 1), Cell::new(2, 2)],
            vec![Cell::new(2, 1)],
        )
        .unwrap();
        let instance = ProblemInstance::new(
            env,
            vec![0.5, 0.5],
            SensorTaskPartition::new(vec![vec![1], vec![]]).unwrap(),
            ChargeAmount::new(-1e9),
            testbed_radio_params(),
            ProblemVariant::Tenp,
        )
        .unwrap();
        let lambda_values = lambda_grid(&instance, 4).unwrap();
        let summary = variant_summary(&instance, &lambda_values, &[0.5], 10.0).unwrap();
        let first = &summary.rows[0];
        for row in &summary.rows[1..] {
            assert_eq!(row.max_avg_task_utility, first.max_avg_task_utility);
            assert_eq!(row.max_avg_harvested_charge, first.max_avg_harvested_charge);
        }
    }
}
