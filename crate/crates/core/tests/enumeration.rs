use std::collections::BTreeSet;

use proptest::prelude::*;

use capgram::derive::{decide_membership, enumerate_language, Membership, SearchBudget, Word};
use capgram::gen::{self, Shape};
use capgram::grammar::{Bound, CapacityFunction, Grammar, Sym};
use capgram::search::Parallelism;

/// Every derivation of at most `depth` steps, no state sharing.
fn naive(g: &Grammar, k: &CapacityFunction, len: usize, depth: usize) -> BTreeSet<Vec<Sym>> {
    fn fits(g: &Grammar, k: &CapacityFunction, w: &[Sym]) -> bool {
        g.nonterminals().all(|a| match k.get(a) {
            Bound::Finite(n) => w.iter().filter(|&&s| s == a).count() <= n as usize,
            Bound::Unbounded => true,
        })
    }
    fn go(g: &Grammar, k: &CapacityFunction, w: Vec<Sym>, len: usize, depth: usize, out: &mut BTreeSet<Vec<Sym>>) {
        if w.iter().all(|s| s.is_terminal()) {
            out.insert(w);
            return;
        }
        if depth == 0 {
            return;
        }
        for r in g.rules() {
            for p in 0..w.len() {
                if w[p..].starts_with(&r.lhs) {
                    let mut next = w[..p].to_vec();
                    next.extend_from_slice(&r.rhs);
                    next.extend_from_slice(&w[p + r.lhs.len()..]);
                    if next.iter().filter(|s| s.is_terminal()).count() <= len && fits(g, k, &next) {
                        go(g, k, next, len, depth - 1, out);
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, k, vec![g.start()], len, depth, &mut out);
    out
}

fn small(seed: u64) -> (Grammar, CapacityFunction) {
    let mut rng = gen::rng(seed);
    let shape = Shape {
        nonterminals: 3,
        terminals: 2,
        rules: 4,
        max_lhs: 2,
        max_rhs: 3,
    };
    let g = gen::random_grammar(&mut rng, shape);
    let k = gen::random_capacity(&mut rng, &g, 2);
    (g, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_naive_oracle(seed in any::<u64>()) {
        let (g, k) = small(seed);
        let e = enumerate_language(&g, &k, &SearchBudget::with_max_len(4)).unwrap();
        prop_assert!(e.exhaustive());
        let depth = e
            .word_list()
            .iter()
            .map(|w| e.witness(w).unwrap().steps.len())
            .max()
            .unwrap_or(0);
        prop_assume!(depth <= 9);
        let oracle = naive(&g, &k, 4, depth);
        let engine: BTreeSet<Vec<Sym>> = e.word_list().into_iter().map(|w| w.0).collect();
        prop_assert_eq!(engine, oracle);
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>()) {
        let (g, k) = small(seed);
        let e = enumerate_language(&g, &k, &SearchBudget::with_max_len(5)).unwrap();
        for w in e.word_list() {
            let d = e.witness(&w).unwrap();
            let end = d.replay(&g, &k).unwrap();
            prop_assert_eq!(end.symbols(), &w.0[..]);
        }
    }

    #[test]
    fn membership_agrees_with_enumeration(seed in any::<u64>()) {
        let (g, k) = small(seed);
        let e = enumerate_language(&g, &k, &SearchBudget::with_max_len(4)).unwrap();
        let a = g.terminals().next().unwrap();
        let mut probes: Vec<Vec<Sym>> = e.word_list().into_iter().map(|w| w.0).collect();
        probes.extend((0..=4).map(|n| vec![a; n]));
        for w in probes {
            let m = decide_membership(&w, &g, &k, &SearchBudget::default()).unwrap();
            let listed = e.contains(&Word(w.clone()));
            match m {
                Membership::Member(d) => {
                    prop_assert!(listed);
                    let end = d.replay(&g, &k).unwrap();
                    prop_assert_eq!(end.symbols(), &w[..]);
                }
                Membership::NonMember => prop_assert!(!listed),
                Membership::Unknown => prop_assert!(false, "membership search did not close"),
            }
        }
    }

    #[test]
    fn tighter_capacity_gives_fewer_words(seed in any::<u64>()) {
        let (g, k) = small(seed);
        let wider = CapacityFunction::new(
            k.bounds().iter().map(|b| Bound::Finite(b.finite().unwrap() + 1)).collect(),
        )
        .unwrap();
        let b = SearchBudget::with_max_len(4);
        let narrow: BTreeSet<_> = enumerate_language(&g, &k, &b).unwrap().word_list().into_iter().collect();
        let wide: BTreeSet<_> = enumerate_language(&g, &wider, &b).unwrap().word_list().into_iter().collect();
        prop_assert!(narrow.is_subset(&wide));
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let wide = capgram::grammar::GrammarSpec::new("S", "a b", "S")
        .rule("r1", "S", "S S")
        .rule("r2", "S", "a S b")
        .rule("r3", "S", "a")
        .rule("r4", "S", "b")
        .infer_context_free()
        .build()
        .unwrap();
    let cases = [
        (capgram::fixtures::ex31(), 1, 12),
        (capgram::fixtures::ex32(), 1, 16),
        (wide, 4, 8),
    ];
    for (g, cap, len) in cases {
        let k = CapacityFunction::constant(&g, cap).unwrap();
        let run = |parallelism| {
            let b = SearchBudget {
                parallelism,
                ..SearchBudget::with_max_len(len)
            };
            let e = enumerate_language(&g, &k, &b).unwrap();
            let witnesses: Vec<_> = e.word_list().iter().map(|w| e.witness(w).unwrap().steps).collect();
            (e.word_list(), e.explored_states(), witnesses)
        };
        let (seq, par) = (run(Parallelism::Sequential), run(Parallelism::Parallel));
        assert_eq!(seq, par);
        if cap == 4 {
            // large enough for layers of several hundred states
            assert!(seq.1 > 2_000, "{} states", seq.1);
        }
    }
}

#[test]
fn unbounded_capacity_search_is_flagged_when_cut() {
    let g = capgram::grammar::GrammarSpec::new("S", "a", "S")
        .rule("r1", "S", "S S")
        .rule("r2", "S", "a")
        .rule("r3", "S", "")
        .infer_context_free()
        .build()
        .unwrap();
    let e = enumerate_language(&g, &CapacityFunction::unbounded(&g), &SearchBudget::with_max_len(3)).unwrap();
    assert!(!e.exhaustive());
    let e = enumerate_language(&g, &CapacityFunction::one(&g), &SearchBudget::with_max_len(3)).unwrap();
    assert!(e.exhaustive());
}
