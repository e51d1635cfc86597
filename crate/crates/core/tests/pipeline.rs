use ohhc_core::experiment::{run_experiment, run_sweep, RunConfig, SweepMatrix};
use ohhc_core::partition::{generate, split};
use ohhc_core::simulator::{run_parallel_sort, GatherPlan, SimOptions};
use ohhc_core::{Distribution, DistributionSpec, GroupMode, LinkKind, OhhcConfig, OhhcTopology};

fn topologies() -> Vec<OhhcTopology> {
    let mut out = Vec::new();
    for d in 1..=3 {
        for mode in GroupMode::ALL {
            out.push(OhhcTopology::build(OhhcConfig::new(d, mode).unwrap()).unwrap());
        }
    }
    out
}

#[test]
fn plan_is_a_spanning_tree_over_real_links() {
    for t in topologies() {
        let plan = GatherPlan::build(&t).unwrap();
        let sends: Vec<_> = plan.sends().collect();
        assert_eq!(sends.len(), t.nodes().len() - 1);
        for (src, rule) in sends {
            assert_eq!(t.link_between(src, rule.target), Some(rule.kind));
        }
        let optical = plan.sends().filter(|(_, r)| r.kind == LinkKind::Optical).count();
        assert_eq!(optical, t.config().group_count() - 1);
        // every node's wait is its subtree size
        let n = t.nodes().len();
        let mut size = vec![1usize; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&f| std::cmp::Reverse(plan.hops_to_master(f)));
        for f in order {
            if let Some(r) = plan.send_rule_flat(f) {
                size[r.target] += size[f];
            }
        }
        for f in 0..n {
            assert_eq!(plan.wait_units_flat(f), size[f]);
        }
        assert_eq!(size[0], n);
    }
}

#[test]
fn simulated_sort_matches_std_sort() {
    for t in topologies() {
        for dist in Distribution::ALL {
            let input = generate(&DistributionSpec::new(dist, 20_000, 5)).unwrap();
            let run = run_parallel_sort(&t, &input, SimOptions::default()).unwrap();
            let mut expected = input.clone();
            expected.sort();
            assert_eq!(run.output, expected);
            assert_eq!(run.report.gather_units_at_master, t.nodes().len());
            let largest = split(&input, t.nodes().len())
                .unwrap()
                .buckets
                .iter()
                .map(Vec::len)
                .max()
                .unwrap();
            assert_eq!(run.report.largest_bucket, largest);
        }
    }
}

#[test]
fn report_is_consistent_with_the_cost_model() {
    let config = RunConfig::new(2, GroupMode::Half, Distribution::Random, 50_000, 3);
    let r = run_experiment(&config, None).unwrap().report;
    let a = &r.analytics;
    assert_eq!(a.comm_steps_simulated, a.comm_steps_model);
    assert!(a.max_hops_simulated as u64 <= a.path_links_model);
    assert_eq!(a.params.p, 72);
    let speedup = a.baseline_cost_units as f64 / r.simulation.max_node_cost_units as f64;
    assert_eq!(a.measured_speedup, speedup);
    assert_eq!(a.measured_efficiency, speedup / 72.0);
}

#[test]
fn sweep_rows_follow_matrix_order() {
    let matrix = SweepMatrix {
        dimensions: vec![1, 2],
        modes: GroupMode::ALL.to_vec(),
        distributions: vec![Distribution::Local, Distribution::Sorted],
        sizes: vec![3000, 1000],
        ..SweepMatrix::with_sizes(vec![], 2)
    };
    let outcome = run_sweep(&matrix);
    assert!(outcome.all_ok());
    assert_eq!(outcome.rows.len(), 16);
    assert_eq!(outcome.baselines.len(), 4);
    assert_eq!(outcome.total_runs(), 20);
    let cells = matrix.cells();
    for (i, (row, cell)) in outcome.rows.iter().zip(&cells).enumerate() {
        assert_eq!(row.cell, i);
        assert_eq!(
            (row.dimension, row.mode, row.distribution, row.element_count),
            (cell.dimension, cell.group_mode, cell.distribution, cell.element_count)
        );
    }
    // cells sharing an input share the baseline cost
    for r in &outcome.rows {
        let b = outcome
            .baselines
            .iter()
            .find(|b| b.distribution == r.distribution && b.element_count == r.element_count)
            .unwrap();
        assert_eq!(r.baseline_cost_units, b.cost_units);
    }
}
