use gbach::ast::{Agent, Program};
use gbach::checker::{final_observables, random_run, replay};
use gbach::corpus::{random_chain_program, random_finite_agent, random_store, rng};
use gbach::parser::{parse_agent, parse_program, parse_store, print_program};
use gbach::refinement::{transform_to_guarded, Action};
use gbach::semantics::{is_normal_form, normal_form, Config};
use gbach::store::Store;
use gbach::trace::Trace;
use proptest::prelude::*;

fn empty() -> Program {
    Program::from_agent(Agent::Done)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn agents_print_and_parse_back(seed in any::<u64>()) {
        let a = random_finite_agent(&mut rng(seed), 7);
        let back = parse_agent(&a.to_string(), &empty()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn stores_print_and_parse_back(seed in any::<u64>()) {
        let s = random_store(&mut rng(seed));
        prop_assert_eq!(parse_store(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn store_diff_is_undone_by_applying_it(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (random_store(&mut rng(a)), random_store(&mut rng(b)));
        let (added, removed) = x.diff(&y);
        let mut z = x.clone();
        for t in &removed {
            prop_assert!(z.take(t));
        }
        for t in added {
            z.insert(t);
        }
        prop_assert_eq!(z, y);
    }

    #[test]
    fn normal_form_keeps_final_observables(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_finite_agent(&mut r, 5);
        let s = random_store(&mut r);
        let nf = normal_form(&a).unwrap();
        prop_assert!(is_normal_form(&nf));
        let of = |x: &Agent| final_observables(&empty(), &Config::new(x.clone(), s.clone()), 100_000).unwrap();
        prop_assert_eq!(of(&nf), of(&a));
    }

    #[test]
    fn programs_print_and_parse_back(seed in any::<u64>()) {
        let p = parse_program(&random_chain_program(&mut rng(seed))).unwrap();
        let printed = print_program(&p);
        let back = parse_program(&printed).unwrap();
        prop_assert_eq!(print_program(&back), printed);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn transformation_is_idempotent(seed in any::<u64>()) {
        let p = parse_program(&random_chain_program(&mut rng(seed))).unwrap();
        let f = p.formula("goal").unwrap().as_reach().unwrap().clone();
        let (once, _) = transform_to_guarded(&p, &f, false);
        let (twice, report) = transform_to_guarded(&once, &f, false);
        prop_assert_eq!(report.count(Action::Transformed), 0);
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn random_runs_replay_from_text(seed in any::<u64>(), run_seed in any::<u64>()) {
        let p = parse_program(&random_chain_program(&mut rng(seed))).unwrap();
        let run = random_run(&p, run_seed, 50);
        let text = run.trace.to_text();
        let back = Trace::from_text(&text).unwrap();
        // derivations are not written out, so compare the text
        prop_assert_eq!(back.to_text(), text);
        prop_assert!(replay(&back, &p).is_ok());
        let last: Store = back.final_store();
        prop_assert_eq!(last, run.trace.final_store());
    }
}
