//! Property tests for the model, radio, and solver invariants.

use proptest::prelude::*;

use tenp::constraints::check_utility_constraint;
use tenp::model::{Cell, EnergyTransmitter, Task, build_environment, manhattan_distance};
use tenp::radio::{
    free_space_path_loss, log_distance_path_loss, received_charge_per_frame,
    testbed_radio_params, total_received_charge,
};
use tenp::solver::rank_free_cells;

fn cell_strategy(n: u32) -> impl Strategy<Value = Cell> {
    (1..=n, 1..=n).prop_map(|(x, y)| Cell::new(x, y))
}

proptest! {
    #[test]
    fn manhattan_is_a_metric(a in cell_strategy(20), b in cell_strategy(20), c in cell_strategy(20)) {
        prop_assert_eq!(manhattan_distance(a, b), manhattan_distance(b, a));
        prop_assert_eq!(manhattan_distance(a, b) == 0, a == b);
        prop_assert!(
            manhattan_distance(a, c) <= manhattan_distance(a, b) + manhattan_distance(b, c)
        );
    }

    #[test]
    fn environment_partitions_grid_and_orders_free_cells(
        n in 2u32..=8,
        picks in prop::collection::hash_set((0u32..64, prop::bool::ANY), 0..6),
    ) {
        let mut tasks = Vec::new();
        let mut ets = Vec::new();
        for (raw, is_task) in picks {
            let cell = Cell::new(raw % n + 1, (raw / n) % n + 1);
            if tasks.contains(&cell) || ets.contains(&cell) {
                continue;
            }
            if is_task { tasks.push(cell) } else { ets.push(cell) }
        }
        let env = build_environment(n, 1.0, tasks.clone(), ets.clone()).unwrap();
        prop_assert_eq!(
            tasks.len() + ets.len() + env.free_cells().len(),
            (n * n) as usize
        );
        let mut sorted = env.free_cells().to_vec();
        sorted.sort_by_key(|c| (c.y, c.x));
        prop_assert_eq!(sorted.as_slice(), env.free_cells());
    }

    #[test]
    fn path_loss_increases_with_distance(d in 0.1f64..500.0, factor in 1.01f64..10.0) {
        let params = testbed_radio_params();
        let near = log_distance_path_loss(d, &params).unwrap();
        let far = log_distance_path_loss(d * factor, &params).unwrap();
        prop_assert!(far > near);
        // And the charge ordering flips accordingly.
        let charge_near = received_charge_per_frame(d, &params).unwrap();
        let charge_far = received_charge_per_frame(d * factor, &params).unwrap();
        prop_assert!(charge_far < charge_near);
    }

    #[test]
    fn path_loss_at_reference_distance_is_free_space(d0 in 0.1f64..100.0, f in 0.1f64..10.0) {
        let mut params = testbed_radio_params();
        params.ref_distance_m = d0;
        params.freq_ghz = f;
        prop_assert_eq!(
            log_distance_path_loss(d0, &params).unwrap(),
            free_space_path_loss(d0, f).unwrap()
        );
    }

    #[test]
    fn utility_check_equals_integer_threshold(
        cell in cell_strategy(12),
        task_cell in cell_strategy(12),
        denominator in 1u64..=12,
    ) {
        prop_assume!(cell != task_cell);
        let u = 1.0 / denominator as f64;
        let task = Task { id: 0, cell: task_cell, utility_requirement: u };
        let expected = manhattan_distance(cell, task_cell) <= (1.0 / u).floor() as u64;
        prop_assert_eq!(check_utility_constraint(cell, &task).unwrap(), expected);
    }

    #[test]
    fn ranking_is_total_and_input_order_free(
        n in 3u32..=8,
        task_raw in 0u32..64,
        et_raw in 0u32..64,
        seed in 0u64..1000,
    ) {
        let task_cell = Cell::new(task_raw % n + 1, (task_raw / n) % n + 1);
        let mut et_cell = Cell::new(et_raw % n + 1, (et_raw / n) % n + 1);
        if et_cell == task_cell {
            et_cell = Cell::new(task_cell.x % n + 1, task_cell.y);
        }
        prop_assume!(et_cell != task_cell);
        let env = build_environment(n, 1.0, vec![task_cell], vec![et_cell]).unwrap();
        let task = Task { id: 0, cell: task_cell, utility_requirement: 0.5 };
        let ets = [EnergyTransmitter { id: 0, cell: et_cell }];

        let baseline = rank_free_cells(env.free_cells(), &task, &ets, &env);
        // Deterministic shuffle of the input ordering.
        let mut shuffled = env.free_cells().to_vec();
        let len = shuffled.len();
        let mut state = seed;
        for i in (1..len).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        prop_assert_eq!(&baseline, &rank_free_cells(&shuffled, &task, &ets, &env));
        // Strictly ordered by (distance, tie_rank): no equal keys remain.
        for pair in baseline.windows(2) {
            prop_assert!(
                (pair[0].combined_distance, pair[0].tie_rank)
                    < (pair[1].combined_distance, pair[1].tie_rank)
            );
        }
    }

    #[test]
    fn total_charge_additive_under_et_split(
        n in 4u32..=8,
        et_count in 1usize..=4,
        seed in 0u64..100,
    ) {
        let mut ets_cells = Vec::new();
        let mut state = seed;
        while ets_cells.len() < et_count {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = (state >> 33) as u32 % n + 1;
            let y = (state >> 13) as u32 % n + 1;
            let cell = Cell::new(x, y);
            if !ets_cells.contains(&cell) {
                ets_cells.push(cell);
            }
        }
        let env = build_environment(n, 1.0, vec![], ets_cells).unwrap();
        let ets: Vec<EnergyTransmitter> = env
            .et_cells()
            .iter()
            .enumerate()
            .map(|(id, &cell)| EnergyTransmitter { id, cell })
            .collect();
        let params = testbed_radio_params();
        for &cell in env.free_cells() {
            let full = total_received_charge(cell, &ets, &env, &params).unwrap().value();
            for split in 0..=ets.len() {
                let partial = total_received_charge(cell, &ets[..split], &env, &params)
                    .unwrap()
                    .value()
                    + total_received_charge(cell, &ets[split..], &env, &params).unwrap().value();
                prop_assert!((full - partial).abs() <= 1e-9 * full.abs().max(1.0));
            }
        }
    }
}
