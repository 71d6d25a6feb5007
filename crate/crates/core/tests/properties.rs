use std::collections::BTreeSet;

use archrefine::behavior::{denote, extract_strategy, refines, Behavior, Bounds};
use archrefine::calculus::{apply_step, digest, CheckConfig, Rule};
use archrefine::fixtures::{random_application, random_behavior, random_system};
use archrefine::model::System;
use archrefine::scriptio::{canonical_text, corpus, parse_architecture, parse_script, print_architecture, run_script};
use archrefine::semantics::{black_box, black_box_oracle};
use archrefine::streams::{chans, TupleSpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn system(seed: u64) -> System {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = 1 + (seed % 2) as usize;
    random_system(&mut rng, symbols)
}

fn behavior(seed: u64) -> Behavior {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_behavior(&mut rng, &chans(&["p", "q"]), &chans(&["r"]), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printing_is_canonical(seed in any::<u64>()) {
        let s = system(seed);
        let text = print_architecture(&s).unwrap();
        let back = parse_architecture(&text).unwrap();
        prop_assert_eq!(print_architecture(&back).unwrap(), text);
        prop_assert_eq!(canonical_text(&back), canonical_text(&s));
        prop_assert_eq!(digest(&back), digest(&s));
    }

    #[test]
    fn printed_systems_keep_their_semantics(seed in any::<u64>()) {
        let s = system(seed);
        let back = parse_architecture(&print_architecture(&s).unwrap()).unwrap();
        let b = s.bounds(2, 1);
        prop_assert_eq!(black_box_oracle(&s, b).unwrap().entries, black_box_oracle(&back, b).unwrap().entries);
    }

    #[test]
    fn digest_ignores_component_order(seed in any::<u64>()) {
        let s = system(seed);
        let mut r = s.clone();
        r.components.reverse();
        prop_assert_eq!(digest(&r), digest(&s));
    }

    #[test]
    fn denotations_are_prefix_consistent(seed in any::<u64>()) {
        let b = behavior(seed);
        let horizon = 3;
        for input in TupleSpace::uniform(b.inputs(), 2, horizon, 1).iter() {
            let outs = denote(&b, &input, horizon).unwrap();
            prop_assert!(!outs.is_empty());
            for k in 1..horizon {
                let cut: BTreeSet<_> = outs.iter().map(|o| o.prefix(k).unwrap()).collect();
                prop_assert_eq!(cut, denote(&b, &input.prefix(k).unwrap(), k).unwrap());
            }
        }
    }

    #[test]
    fn refinement_is_reflexive_and_strategies_refine(seed in any::<u64>()) {
        let b = behavior(seed);
        let bounds = Bounds::new(3, 1, 2);
        prop_assert!(refines(&b, &b, bounds).unwrap().passed());
        let s = extract_strategy(&b);
        prop_assert!(refines(&s, &b, bounds).unwrap().passed());
        let space = TupleSpace::uniform(b.inputs(), 2, 3, 1);
        for input in space.iter() {
            prop_assert_eq!(denote(&s, &input, 3).unwrap().len(), 1);
        }
    }

    #[test]
    fn composition_matches_oracle(seed in any::<u64>()) {
        let s = system(seed);
        let b = s.bounds(2, 1);
        let bb = black_box(&s).unwrap();
        for (i, expected) in black_box_oracle(&s, b).unwrap().entries {
            prop_assert_eq!(denote(&bb, &i, 2).unwrap(), expected);
        }
    }

    #[test]
    fn failed_steps_leave_the_system_alone(seed in any::<u64>(), r in 0..12usize) {
        let s = system(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let rule = Rule::ALL[r];
        if let Some(step) = random_application(&mut rng, &s, rule) {
            let before = digest(&s);
            match apply_step(&s, &step, &CheckConfig::new(2, 1, Default::default())) {
                Ok((next, report)) => {
                    prop_assert!(next.check_consistency().passed());
                    prop_assert_eq!(report.digest, digest(&next));
                    prop_assert!(report.premises.iter().all(|p| p.passed()));
                }
                Err(e) => {
                    prop_assert_eq!(e.digest, before);
                    prop_assert!(e.premises.iter().any(|p| !p.passed()));
                }
            }
        }
    }
}

#[test]
fn run_reports_are_deterministic() {
    let start = parse_architecture(corpus::COMPANY_FIG1).unwrap();
    let script = parse_script(corpus::COMPANY_SCRIPT).unwrap();
    let config = CheckConfig::default();
    let a = run_script(&start, &script, &config, &corpus::loader);
    let b = run_script(&start, &script, &config, &corpus::loader);
    assert_eq!(a.render(), b.render());
    assert_eq!(a.final_digest(), digest(&a.system));
}
