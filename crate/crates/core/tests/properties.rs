mod common;

use proptest::prelude::*;

use qcc::bounds::{horizon_bound, BoundSet};
use qcc::budget::Budget;
use qcc::cpsolver::{build_model, schedule_from_assignment, search, warm_start, SearchConfig};
use qcc::hybrid::{run_half, run_last};
use qcc::instance::{generate_instance, parse_instance, InitialMapping, Variant};
use qcc::router::{solve_anytime, solve_greedy, solve_sequential_baseline};
use qcc::schedule::{parse_schedule, simulate_states, validate, Location, Rule, TaskKind};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn generated_instances_hold_their_invariants(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 10);
        let n = inst.state_count();
        let mut seen = std::collections::HashSet::new();
        for g in inst.goals() {
            prop_assert!(g.0 != g.1 && g.0 < n && g.1 < n);
            prop_assert!(seen.insert((g.0.min(g.1), g.0.max(g.1))));
        }
        let free = inst.variant() == Variant::QccI;
        prop_assert_eq!(inst.initial_mapping() == InitialMapping::Free, free);
        let text = serde_json::to_string(&inst).unwrap();
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), goals in 1usize..10) {
        let chip = &common::chips()[(seed % 5) as usize];
        let n = chip.qubit_count();
        let goals = goals.min(n * (n - 1) / 2);
        let a = generate_instance(chip, goals, 1, Variant::Qcc, seed).unwrap();
        let b = generate_instance(chip, goals, 1, Variant::Qcc, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn baseline_fits_the_horizon_and_validates(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 8);
        let s = solve_sequential_baseline(&inst).unwrap();
        prop_assert!(s.makespan <= horizon_bound(&inst));
        let report = validate(&inst, &s);
        prop_assert!(report.valid, "{}", report);
        // the per-gate swap count the model is sized for suffices
        let bounds = BoundSet::for_instance(&inst);
        prop_assert_eq!(common::multiplier_for(&inst, &s), 1);
        prop_assert!(bounds.horizon >= bounds.max_ps_duration);
    }

    #[test]
    fn greedy_is_valid_and_seeded(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 8);
        let a = solve_greedy(&inst, seed).unwrap();
        prop_assert!(validate(&inst, &a).valid);
        prop_assert_eq!(a, solve_greedy(&inst, seed).unwrap());
    }

    #[test]
    fn schedules_survive_json(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 8);
        let s = common::random_schedule(&inst, &mut rng);
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(parse_schedule(&text).unwrap(), s);
    }

    #[test]
    fn simulator_agrees_with_goal_matching(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 8);
        let s = common::random_schedule(&inst, &mut rng);
        let trace = simulate_states(&inst, &s).unwrap();
        for (i, t) in s.tasks.iter().enumerate() {
            if let (TaskKind::Ps, Some(o), Location::Edge(u, v)) = (t.kind, t.goal_index, t.location) {
                let (a, b) = (trace.state_at(u, t.start), trace.state_at(v, t.start));
                prop_assert!(inst.goal_at(o).matches(a, b), "task {} sees ({}, {})", i, a, b);
                prop_assert_eq!(trace.event(u, i).map(|e| e.after), Some(a));
            }
        }
    }

    #[test]
    fn validation_is_pure(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 6);
        let s = common::mutate(&inst, &common::random_schedule(&inst, &mut rng), &mut rng);
        prop_assert_eq!(validate(&inst, &s), validate(&inst, &s));
    }
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn every_goal_task_is_needed(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 6);
        prop_assume!(inst.stages() == 1);
        let s = common::random_schedule(&inst, &mut rng);
        for i in (0..s.tasks.len()).filter(|&i| s.tasks[i].kind == TaskKind::Ps) {
            let mut cut = s.clone();
            cut.tasks.remove(i);
            prop_assert!(validate(&inst, &cut).has(Rule::R3));
        }
    }

    #[test]
    fn model_and_validator_agree(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 8);
        let s = common::random_schedule(&inst, &mut rng);
        prop_assert!(common::model_accepts(&inst, &s, common::multiplier_for(&inst, &s)));
        for _ in 0..4 {
            let bad = common::mutate(&inst, &s, &mut rng);
            let mult = common::multiplier_for(&inst, &bad);
            prop_assert_eq!(validate(&inst, &bad).valid, common::model_accepts(&inst, &bad, mult));
        }
    }

    #[test]
    fn warm_start_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 6);
        let s = common::random_schedule(&inst, &mut rng);
        let model = build_model(&inst, &BoundSet::with_swap_multiplier(&inst, common::multiplier_for(&inst, &s)));
        let assignment = warm_start(&model, &s).unwrap();
        let mut back = schedule_from_assignment(&model, &assignment);
        let mut tasks = s.tasks.clone();
        back.tasks.sort_by_key(|t| (t.start, t.kind, t.location, t.goal_index, t.state));
        tasks.sort_by_key(|t| (t.start, t.kind, t.location, t.goal_index, t.state));
        prop_assert_eq!(&back.tasks, &tasks);
        prop_assert_eq!(back.objective(), s.objective());
    }

    #[test]
    fn search_never_degrades_its_warm_start(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, 6);
        let s = common::random_schedule(&inst, &mut rng);
        let model = build_model(&inst, &BoundSet::with_swap_multiplier(&inst, common::multiplier_for(&inst, &s)));
        let out = search(&model, Some(&s), &SearchConfig::new(Budget::Nodes(2_000))).unwrap();
        let best = out.best().unwrap();
        prop_assert!(best.objective() <= s.objective());
        prop_assert!(validate(&inst, best).valid);
        let mut last = s.objective();
        for inc in &out.incumbents {
            prop_assert!(inc.schedule.objective() < last);
            prop_assert!(validate(&inst, &inc.schedule).valid);
            last = inc.schedule.objective();
        }
    }

    #[test]
    fn anytime_stream_improves(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 8);
        let run = solve_anytime(&inst, Budget::Nodes(5_000), seed).unwrap();
        prop_assert_eq!(&run.incumbents[0].schedule, &solve_sequential_baseline(&inst).unwrap());
        for w in run.incumbents.windows(2) {
            prop_assert!(w[1].schedule.objective() < w[0].schedule.objective());
            prop_assert!(w[1].found_at.nodes >= w[0].found_at.nodes);
            prop_assert!(w[1].found_at.elapsed >= w[0].found_at.elapsed);
        }
        for inc in &run.incumbents {
            prop_assert!(validate(&inst, &inc.schedule).valid);
        }
    }

    #[test]
    fn hybrids_never_lose_to_their_router_stage(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 6);
        for report in [run_half(&inst, Budget::Nodes(4_000), seed).unwrap(), run_last(&inst, Budget::Nodes(4_000), seed).unwrap()] {
            let handoff = report.handoff.as_ref().unwrap();
            let last = report.schedule.as_ref().unwrap();
            prop_assert!(last.objective() <= handoff.objective());
            prop_assert!(validate(&inst, last).valid);
            prop_assert!(report.delta.unwrap() >= 0.0);
            let stage_one = report.stages[0].trace.iter().map(|p| (p.makespan, p.swaps)).min();
            prop_assert_eq!(stage_one, Some(handoff.objective()));
        }
    }
}
