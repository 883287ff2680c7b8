//! Exhaustive exact solver for small instances.
//!
//! A depth-first search over sensors in partition order, pruning infeasible
//! cells and partial objectives above the incumbent. It certifies optimal
//! objective values, measures the greedy optimality gap, and searches for
//! instances where the greedy declares unsatisfiability although a feasible
//! placement exists.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraints::check_both;
use crate::model::{
    Cell, Placement, ProblemInstance, ProblemVariant, SensorId, SensorTaskPartition, Verdict,
    build_environment,
};
use crate::radio::{ChargeAmount, charge_bounds, testbed_radio_params};
use crate::solver::{combined_distance, distance_minimization};

/// Default cap on feasibility-checked partial assignments per solve.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("objective requires a total placement: {assigned} of {sensors} sensors assigned")]
    PartialPlacement { assigned: usize, sensors: usize },
    #[error("sensor {0} is assigned but not part of the instance")]
    UnknownSensor(SensorId),
    #[error("search budget exhausted after {explored} feasibility-checked partial assignments")]
    BudgetExceeded { explored: u64 },
}

/// Outcome of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalResult {
    pub placement: Placement,
    /// Global minimum of the objective over all feasible total placements;
    /// absent when the instance is unsatisfiable.
    pub objective: Option<u64>,
    /// Number of feasibility-checked partial assignments.
    pub explored: u64,
}

/// The objective of a total placement: for every sensor, its distance to
/// its own task plus its summed distances to every ET.
pub fn objective_value(
    placement: &Placement,
    instance: &ProblemInstance,
) -> Result<u64, OracleError> {
    if placement.assignments.len() != instance.sensor_count() {
        return Err(OracleError::PartialPlacement {
            assigned: placement.assignments.len(),
            sensors: instance.sensor_count(),
        });
    }
    let mut total = 0u64;
    for (task_id, sensor_id) in instance.partition().sensors_in_order() {
        let cell = placement
            .assignments
            .get(&sensor_id)
            .ok_or(OracleError::UnknownSensor(sensor_id))?;
        total += combined_distance(*cell, &instance.tasks()[task_id], instance.ets());
    }
    Ok(total)
}

/// Exact solve with the default node budget.
pub fn exact_solve(instance: &ProblemInstance) -> Result<OptimalResult, OracleError> {
    exact_solve_with_budget(instance, DEFAULT_NODE_BUDGET)
}

/// Depth-first exact solve.
///
/// Candidate cells are scanned in row-major order at every depth, so among
/// equal-objective optima the lexicographically smallest one (by sensor
/// order, then cell index) is returned. Exceeding `node_budget` is an error
/// distinct from unsatisfiability.
pub fn exact_solve_with_budget(
    instance: &ProblemInstance,
    node_budget: u64,
) -> Result<OptimalResult, OracleError> {
    let sensors: Vec<(usize, SensorId)> = instance.partition().sensors_in_order().collect();
    let free = instance.environment().free_cells();
    let mut search = Search {
        instance,
        sensors,
        occupied: vec![false; free.len()],
        stack: Vec::new(),
        best: None,
        explored: 0,
        node_budget,
    };
    search.descend(0, 0)?;

    let explored = search.explored;
    match search.best {
        Some((objective, assignments)) => Ok(OptimalResult {
            placement: Placement::new(assignments, instance.sensor_count()),
            objective: Some(objective),
            explored,
        }),
        None => Ok(OptimalResult {
            placement: Placement::new(BTreeMap::new(), instance.sensor_count()),
            objective: None,
            explored,
        }),
    }
}

struct Search<'a> {
    instance: &'a ProblemInstance,
    sensors: Vec<(usize, SensorId)>,
    occupied: Vec<bool>,
    stack: Vec<(SensorId, Cell)>,
    best: Option<(u64, BTreeMap<SensorId, Cell>)>,
    explored: u64,
    node_budget: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, partial_cost: u64) -> Result<(), OracleError> {
        if depth == self.sensors.len() {
            let better = match &self.best {
                Some((incumbent, _)) => partial_cost < *incumbent,
                None => true,
            };
            if better {
                self.best = Some((partial_cost, self.stack.iter().copied().collect()));
            }
            return Ok(());
        }

        let (task_id, sensor_id) = self.sensors[depth];
        let task = &self.instance.tasks()[task_id];
        let free = self.instance.environment().free_cells();
        for (index, &cell) in free.iter().enumerate() {
            if self.occupied[index] {
                continue;
            }
            let cost = partial_cost + combined_distance(cell, task, self.instance.ets());
            // Strictly-greater pruning keeps equal-cost prefixes alive, so
            // the lexicographically first optimum is always reachable.
            if let Some((incumbent, _)) = &self.best
                && cost > *incumbent
            {
                continue;
            }
            self.explored += 1;
            if self.explored > self.node_budget {
                return Err(OracleError::BudgetExceeded { explored: self.explored });
            }
            let feasible = check_both(
                cell,
                task,
                self.instance.ets(),
                self.instance.environment(),
                self.instance.radio(),
                self.instance.lambda(),
                self.instance.variant(),
            )
            .expect("free cells are disjoint from task and ET cells in a validated instance");
            if !feasible {
                continue;
            }
            self.occupied[index] = true;
            self.stack.push((sensor_id, cell));
            let result = self.descend(depth + 1, cost);
            self.stack.pop();
            self.occupied[index] = false;
            result?;
        }
        Ok(())
    }
}

/// Random small-instance generator for solver/oracle comparison suites.
///
/// Sampling is fully determined by the supplied RNG. Reserved cells are
/// drawn without replacement; sensor counts are clamped so every sampled
/// instance is valid.
#[derive(Debug, Clone)]
pub struct InstanceSampler {
    pub grid_side: std::ops::RangeInclusive<u32>,
    pub tasks: std::ops::RangeInclusive<usize>,
    pub ets: std::ops::RangeInclusive<usize>,
    pub sensors: std::ops::RangeInclusive<usize>,
    pub variants: Vec<ProblemVariant>,
}

impl InstanceSampler {
    pub fn sample(&self, rng: &mut impl Rng) -> ProblemInstance {
        let n = rng.random_range(self.grid_side.clone());
        let cells_total = (n * n) as usize;

        let mut all_cells: Vec<Cell> = (1..=n)
            .flat_map(|y| (1..=n).map(move |x| Cell::new(x, y)))
            .collect();
        all_cells.shuffle(rng);

        let num_tasks = rng
            .random_range(self.tasks.clone())
            .min(cells_total.saturating_sub(1))
            .max(1);
        let num_ets = rng
            .random_range(self.ets.clone())
            .min(cells_total.saturating_sub(num_tasks + 1));
        let task_cells: Vec<Cell> = all_cells[..num_tasks].to_vec();
        let et_cells: Vec<Cell> = all_cells[num_tasks..num_tasks + num_ets].to_vec();
        let free = cells_total - num_tasks - num_ets;

        let num_sensors = rng.random_range(self.sensors.clone()).min(free);
        let mut groups: Vec<Vec<SensorId>> = vec![Vec::new(); num_tasks];
        for sensor in 1..=num_sensors {
            let task = rng.random_range(0..num_tasks);
            groups[task].push(sensor as SensorId);
        }

        // Requirements biased toward exact reciprocals so the utility
        // constraint binds often; occasionally loose.
        let utilities: Vec<f64> = (0..num_tasks)
            .map(|_| {
                if rng.random_bool(0.7) {
                    1.0 / rng.random_range(1..=4) as f64
                } else {
                    rng.random_range(0.05..=1.0f64).min(1.0)
                }
            })
            .collect();

        let env = build_environment(n, 1.0, task_cells, et_cells)
            .expect("sampled cells are in bounds, distinct, and disjoint");

        let radio = testbed_radio_params();
        let ets: Vec<crate::model::EnergyTransmitter> = env
            .et_cells()
            .iter()
            .enumerate()
            .map(|(id, &cell)| crate::model::EnergyTransmitter { id, cell })
            .collect();
        let lambda = if env.free_cells().is_empty() || ets.is_empty() {
            // No charge anywhere; straddle zero so the constraint sometimes
            // holds and sometimes cannot.
            ChargeAmount::new(rng.random_range(-0.5..=0.5))
        } else {
            let (min, max) = charge_bounds(&env, &ets, &radio)
                .expect("free cells are non-empty");
            let span = max.value() - min.value();
            let t: f64 = rng.random_range(-0.25..=1.25);
            ChargeAmount::new(min.value() + t * span.max(1e-6))
        };

        let variant = *self
            .variants
            .as_slice()
            .choose(rng)
            .expect("sampler must list at least one variant");

        ProblemInstance::new(
            env,
            utilities,
            SensorTaskPartition::new(groups).expect("sensor ids are distinct by construction"),
            lambda,
            radio,
            variant,
        )
        .expect("sampled dimensions satisfy every instance invariant")
    }
}

/// Searches randomized small instances for one where the greedy solver
/// reports UNSATISFIABLE although the exact search finds a placement.
///
/// Reproducible: the same seed and attempt budget always yield the same
/// outcome. `None` after the budget is a valid outcome for a given seed.
pub fn find_incompleteness_witness(seed: u64, attempts: u64) -> Option<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = InstanceSampler {
        grid_side: 2..=5,
        tasks: 1..=2,
        ets: 0..=2,
        sensors: 1..=4,
        variants: vec![ProblemVariant::Tenp, ProblemVariant::Tsp],
    };
    for _ in 0..attempts {
        let instance = sampler.sample(&mut rng);
        if instance.sensor_count() == 0 {
            continue;
        }
        let greedy = distance_minimization(&instance);
        if greedy.verdict != Verdict::Unsatisfiable {
            continue;
        }
        let exact = exact_solve(&instance).expect("witness instances are far below the budget");
        if exact.placement.verdict == Verdict::Satisfiable {
            return Some(instance);
        }
    }
    None
}
