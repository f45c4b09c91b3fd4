use broker_core::oracle::{brute_force_oracle, OracleOutcome};
use broker_core::validate::validate_result;
use broker_core::workload::{generate_scenario, DistributionConfig};
use broker_core::{run_baseline, run_pipeline, PipelineOptions, Policy, PruneMetric, RejectReason};
use proptest::prelude::*;

fn policies() -> impl Strategy<Value = Policy> {
    prop_oneof![Just(Policy::MinCost), Just(Policy::RandomCandidate)]
}

fn metrics() -> impl Strategy<Value = PruneMetric> {
    prop_oneof![Just(PruneMetric::Raw), Just(PruneMetric::Normalized)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_option_combination_yields_a_valid_schedule(
        sites in 1usize..8,
        jobs in 0usize..80,
        seed in any::<u64>(),
        policy in policies(),
        prune_metric in metrics(),
        recompute in any::<bool>(),
    ) {
        let s = generate_scenario(sites, jobs, &DistributionConfig::default(), seed).unwrap();
        let options = PipelineOptions { policy, seed, prune_metric, recompute };
        let (result, m) = run_pipeline(&s, &options).unwrap();
        prop_assert_eq!(validate_result(&s, &result), vec![]);
        let rejected: usize = m.rejections.values().sum();
        prop_assert_eq!(m.admitted + rejected, m.total);
        prop_assert!((0.0..=1.0).contains(&m.admission_rate));
        prop_assert!(m.total_cost >= 0.0);

        let (again, _) = run_pipeline(&s, &options).unwrap();
        prop_assert_eq!(&again, &result);

        let (base, bm) = run_baseline(&s).unwrap();
        prop_assert_eq!(validate_result(&s, &base), vec![]);
        prop_assert!(base.jobs.iter().all(|j| !j.assignment.is_remote && j.transfer.is_none()));
        prop_assert_eq!(bm.rejected(RejectReason::PrunedTransfer), 0);
    }

    #[test]
    fn admitted_single_job_costs_what_the_oracle_says(seed in any::<u64>(), sites in 1usize..5) {
        // Every candidate is cheaper than home and fits the window, so an
        // admitted min-cost job sits at the cheapest feasible site.
        let s = generate_scenario(sites, 1, &DistributionConfig::default(), seed).unwrap();
        let options = PipelineOptions { policy: Policy::MinCost, seed, ..PipelineOptions::default() };
        let (_, m) = run_pipeline(&s, &options).unwrap();
        if m.admitted == 1 {
            match brute_force_oracle(&s).unwrap() {
                OracleOutcome::Feasible { cost, .. } => {
                    prop_assert!((m.total_cost - cost).abs() <= 1e-9 * cost.max(1.0), "{} vs {}", m.total_cost, cost);
                }
                OracleOutcome::Infeasible => prop_assert!(false, "admitted but oracle-infeasible"),
            }
        }
    }
}

#[test]
fn recompute_keeps_schedules_valid() {
    for seed in 0..40 {
        let s = generate_scenario(10, 150, &DistributionConfig::default(), seed).unwrap();
        let single = PipelineOptions {
            seed,
            ..PipelineOptions::default()
        };
        let twice = PipelineOptions {
            recompute: true,
            ..single
        };
        let (_, a) = run_pipeline(&s, &single).unwrap();
        let (r, b) = run_pipeline(&s, &twice).unwrap();
        assert!(validate_result(&s, &r).is_empty(), "seed {seed}");
        assert_eq!(a.total, b.total);
    }
}
