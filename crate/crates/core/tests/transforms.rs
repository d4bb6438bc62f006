use std::collections::BTreeSet;

use proptest::prelude::*;

use capgram::derive::{enumerate_language, replay_steps, Fragment, SearchBudget};
use capgram::gen::{self, Shape};
use capgram::grammar::{CapacityFunction, Grammar};
use capgram::regulated::{enumerate_regulated, RegulatedOptions};
use capgram::text::{parse_grammar, print_grammar, GrammarFile};
use capgram::transforms::{
    cf_fin_to_cf_cb, closure_construct, gs_cb_to_blockwise, gs_cb_to_matrix_fin, lift_matrix_fin, lift_steps,
    normalize_capacity_to_one, CappedGrammar, ClosureOp, TransformOptions,
};

type Words = BTreeSet<Vec<String>>;

fn small() -> Shape {
    Shape {
        nonterminals: 3,
        terminals: 2,
        rules: 5,
        max_lhs: 2,
        max_rhs: 3,
    }
}

fn words(g: &Grammar, f: &Fragment) -> Words {
    f.words.iter().map(|w| w.0.iter().map(|&s| g.name(s).to_owned()).collect()).collect()
}

/// The fragment up to `len`, or `None` if the search did not close.
fn lang(g: &Grammar, k: &CapacityFunction, len: usize) -> Option<Words> {
    let e = enumerate_language(g, k, &SearchBudget::with_max_len(len)).unwrap();
    e.exhaustive().then(|| words(g, &e.fragment()))
}

fn capped(seed: u64, cf: bool, max_cap: u32) -> CappedGrammar {
    let mut r = gen::rng(seed);
    let grammar = if cf {
        gen::random_cf_grammar(&mut r, small())
    } else {
        gen::random_grammar(&mut r, small())
    };
    let capacity = gen::random_capacity(&mut r, &grammar, max_cap);
    CappedGrammar { grammar, capacity }
}

const LEN: usize = 5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normalization_keeps_the_language(seed in any::<u64>()) {
        let g = capped(seed, false, 2);
        let t = normalize_capacity_to_one(&g.grammar, &g.capacity, &TransformOptions::default()).unwrap();
        prop_assert!(t.output.capacity.is_one());
        let (Some(a), Some(b)) = (lang(&g.grammar, &g.capacity, LEN), lang(&t.output.grammar, &t.output.capacity, LEN)) else {
            return Ok(());
        };
        prop_assert_eq!(&a, &b);
        let e = enumerate_language(&t.output.grammar, &t.output.capacity, &SearchBudget::with_max_len(LEN)).unwrap();
        for w in e.word_list() {
            let d = e.witness(&w).unwrap();
            let steps = lift_steps(&t.provenance, &d.steps);
            let end = replay_steps(&g.grammar, &g.capacity, &steps).unwrap();
            prop_assert_eq!(g.grammar.render(end.symbols()), t.output.grammar.render(&w.0));
        }
    }

    #[test]
    fn blockwise_keeps_the_language(seed in any::<u64>()) {
        let g = capped(seed, false, 1);
        let one = CapacityFunction::one(&g.grammar);
        let t = gs_cb_to_blockwise(&g.grammar, &one, &TransformOptions::default()).unwrap();
        if let (Some(a), Some(b)) = (lang(&g.grammar, &one, LEN), lang(&t.output.grammar, &t.output.capacity, LEN)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn matrix_fin_keeps_the_language(seed in any::<u64>()) {
        let g = capped(seed, false, 1);
        let one = CapacityFunction::one(&g.grammar);
        let t = gs_cb_to_matrix_fin(&g.grammar, &one, &TransformOptions::default()).unwrap();
        let e = enumerate_regulated(&t.output.grammar, &SearchBudget::with_max_len(LEN), RegulatedOptions::default()).unwrap();
        let Some(a) = lang(&g.grammar, &one, LEN) else { return Ok(()) };
        let base = t.output.grammar.base();
        if e.exhaustive() {
            prop_assert_eq!(&a, &words(base, &e.fragment()));
        }
        for w in e.word_list() {
            let d = e.witness(&w).unwrap();
            let end = replay_steps(&g.grammar, &one, &lift_matrix_fin(&t.provenance, &d)).unwrap();
            prop_assert_eq!(g.grammar.render(end.symbols()), base.render(&w.0));
        }
    }

    #[test]
    fn transforms_are_deterministic(seed in any::<u64>()) {
        let g = capped(seed, false, 2);
        let o = TransformOptions::default();
        let print = |c: &CappedGrammar| print_grammar(&GrammarFile::plain(c.grammar.clone(), Some(c.capacity.clone())));
        let a = normalize_capacity_to_one(&g.grammar, &g.capacity, &o).unwrap();
        let b = normalize_capacity_to_one(&g.grammar, &g.capacity, &o).unwrap();
        prop_assert_eq!(print(&a.output), print(&b.output));
        let m1 = gs_cb_to_matrix_fin(&g.grammar, &g.capacity, &o).unwrap();
        let m2 = gs_cb_to_matrix_fin(&g.grammar, &g.capacity, &o).unwrap();
        let text = print_grammar(&GrammarFile::regulated(m1.output.grammar.clone()));
        prop_assert_eq!(&text, &print_grammar(&GrammarFile::regulated(m2.output.grammar)));
        let back = parse_grammar(&text).unwrap();
        prop_assert_eq!(print_grammar(&back), text);
    }

    #[test]
    fn grammar_text_round_trips(seed in any::<u64>()) {
        let g = capped(seed, false, 3);
        let f = GrammarFile::plain(g.grammar, Some(g.capacity));
        let text = print_grammar(&f);
        let back = parse_grammar(&text).unwrap();
        prop_assert_eq!(print_grammar(&back), text);
        prop_assert_eq!(back.capacity, f.capacity);
    }

    #[test]
    fn cf_capacity_is_monotone(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let g = gen::random_cf_grammar(&mut r, small());
        let mut prev: Option<Words> = None;
        let Some(free) = lang(&g, &CapacityFunction::unbounded(&g), LEN) else { return Ok(()) };
        for k in 1..=3 {
            let t = cf_fin_to_cf_cb(&g, k).unwrap();
            let Some(w) = lang(&t.output.grammar, &t.output.capacity, LEN) else { return Ok(()) };
            prop_assert!(w.is_subset(&free));
            if let Some(p) = &prev {
                prop_assert!(p.is_subset(&w));
            }
            prev = Some(w);
        }
    }

    #[test]
    fn closures_match_set_operations(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = capped(s1, true, 2);
        let b = capped(s2, true, 2);
        let o = TransformOptions::default();
        let (Some(la), Some(lb)) = (lang(&a.grammar, &a.capacity, LEN), lang(&b.grammar, &b.capacity, LEN)) else {
            return Ok(());
        };
        let run = |op| {
            let t = closure_construct(&a, op, &o).unwrap();
            lang(&t.output.grammar, &t.output.capacity, LEN)
        };
        if let Some(u) = run(ClosureOp::Union(&b)) {
            prop_assert_eq!(u, la.union(&lb).cloned().collect::<Words>());
        }
        let cat: Words = la
            .iter()
            .flat_map(|x| lb.iter().map(move |y| [x.clone(), y.clone()].concat()))
            .filter(|w| w.len() <= LEN)
            .collect();
        if let Some(c) = run(ClosureOp::Concat(&b)) {
            prop_assert_eq!(c, cat);
        }
        let mut star: Words = [vec![]].into();
        loop {
            let next: Words = star
                .iter()
                .flat_map(|x| la.iter().map(move |y| [x.clone(), y.clone()].concat()))
                .filter(|w| w.len() <= LEN)
                .collect();
            let before = star.len();
            star.extend(next);
            if star.len() == before {
                break;
            }
        }
        if let Some(s) = run(ClosureOp::Star) {
            prop_assert_eq!(s, star);
        }
    }
}

