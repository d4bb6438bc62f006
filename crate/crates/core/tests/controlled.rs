use std::collections::BTreeSet;

use proptest::prelude::*;

use capgram::cfnet::{
    build_cf_net, build_extended_net, enumerate_controlled, CapacityMode, ControlledOptions, Controller, NetKind,
};
use capgram::derive::{enumerate_language, replay_steps, SearchBudget, Word};
use capgram::gen::{self, Shape};
use capgram::grammar::{CapacityFunction, Grammar};

const LEN: usize = 5;

fn grammar(seed: u64) -> (Grammar, CapacityFunction, Vec<(String, Vec<String>)>) {
    let mut r = gen::rng(seed);
    let g = gen::random_cf_grammar(&mut r, Shape::default());
    let k = gen::random_capacity(&mut r, &g, 2);
    let parts = gen::random_partition(&mut r, &g, 2);
    (g, k, parts)
}

fn budget() -> SearchBudget {
    SearchBudget {
        max_states: 200_000,
        ..SearchBudget::with_max_len(LEN)
    }
}

fn opts() -> ControlledOptions {
    ControlledOptions { max_control_tokens: 3 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cf_net_control_is_the_capacity_bound(seed in any::<u64>()) {
        let (g, k, _) = grammar(seed);
        let cn = build_cf_net(&g).unwrap();
        let plain = enumerate_language(&g, &k, &budget()).unwrap();
        let ctl = enumerate_controlled(&g, Controller::Cf(&cn), Some(&CapacityMode::weak(k.clone())), &budget(), opts()).unwrap();
        if plain.exhaustive() && ctl.exhaustive() {
            prop_assert_eq!(plain.word_list(), ctl.word_list());
        }
    }

    #[test]
    fn extended_nets_only_restrict(seed in any::<u64>(), kind in prop_oneof![Just(NetKind::H), Just(NetKind::C), Just(NetKind::S)]) {
        let (g, k, parts) = grammar(seed);
        let free = CapacityFunction::unbounded(&g);
        let plain = enumerate_language(&g, &free, &budget()).unwrap();
        let en = build_extended_net(&g, kind, &parts).unwrap();
        let weak = enumerate_controlled(&g, Controller::Extended(&en), Some(&CapacityMode::weak(k.clone())), &budget(), opts()).unwrap();
        let strong = enumerate_controlled(&g, Controller::Extended(&en), Some(&CapacityMode::strong(k.clone(), 1)), &budget(), opts()).unwrap();
        let set = |v: Vec<Word>| v.into_iter().collect::<BTreeSet<_>>();
        if plain.exhaustive() {
            prop_assert!(set(weak.word_list()).is_subset(&set(plain.word_list())));
        }
        if weak.exhaustive() {
            prop_assert!(set(strong.word_list()).is_subset(&set(weak.word_list())));
        }
        for (w, run) in weak.witnesses() {
            let end = replay_steps(&g, &k, &run.derivation_steps()).unwrap();
            prop_assert_eq!(end.symbols(), &w.0[..]);
            prop_assert_eq!(run.markings.last().unwrap(), en.final_marking());
        }
        prop_assert!(strong.max_control_tokens() <= 1);
    }
}
