//! Seeded random inputs for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Bound, CapacityFunction, Grammar, GrammarSpec};
use crate::petri::{Marking, PetriNet};
use crate::regulated::{ControlMode, Matrix, RegulatedGrammar, Restriction};

const NONTERMINALS: [&str; 6] = ["S", "A", "B", "C", "D", "E"];
const TERMINALS: [&str; 4] = ["a", "b", "c", "d"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Copy, Clone, Debug)]
pub struct Shape {
    pub nonterminals: usize,
    pub terminals: usize,
    pub rules: usize,
    pub max_lhs: usize,
    pub max_rhs: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            nonterminals: 3,
            terminals: 2,
            rules: 6,
            max_lhs: 2,
            max_rhs: 3,
        }
    }
}

/// A grammar with at most `shape` of everything. The first rule rewrites the
/// start symbol, and about two thirds of right-side symbols are terminals.
pub fn random_grammar<R: Rng>(rng: &mut R, shape: Shape) -> Grammar {
    let n = shape.nonterminals.clamp(1, NONTERMINALS.len());
    let t = shape.terminals.clamp(1, TERMINALS.len());
    let nts = &NONTERMINALS[..n];
    let ts = &TERMINALS[..t];
    let mut spec = GrammarSpec::new(&nts.join(" "), &ts.join(" "), "S");
    let rules = rng.gen_range(1..=shape.rules.max(1));
    for i in 0..rules {
        let lhs_len = rng.gen_range(1..=shape.max_lhs.max(1));
        let mut lhs: Vec<&str> = (0..lhs_len).map(|_| *nts.choose(rng).unwrap()).collect();
        if i == 0 {
            lhs[0] = "S";
        }
        let rhs_len = rng.gen_range(0..=shape.max_rhs);
        let rhs: Vec<&str> = (0..rhs_len)
            .map(|_| {
                if rng.gen_bool(2.0 / 3.0) {
                    *ts.choose(rng).unwrap()
                } else {
                    *nts.choose(rng).unwrap()
                }
            })
            .collect();
        spec = spec.rule(&format!("r{}", i + 1), &lhs.join(" "), &rhs.join(" "));
    }
    spec.infer_context_free().build().expect("generated grammar is well formed")
}

pub fn random_cf_grammar<R: Rng>(rng: &mut R, shape: Shape) -> Grammar {
    random_grammar(rng, Shape { max_lhs: 1, ..shape })
}

/// κ with every value in `1..=max`.
pub fn random_capacity<R: Rng>(rng: &mut R, g: &Grammar, max: u32) -> CapacityFunction {
    let bounds = (0..g.nonterminal_count())
        .map(|_| Bound::Finite(rng.gen_range(1..=max.max(1))))
        .collect();
    CapacityFunction::new(bounds).expect("capacities are positive")
}

fn maybe_terminal<R: Rng>(rng: &mut R, ts: &[&str]) -> Option<String> {
    rng.gen_bool(0.5).then(|| ts.choose(rng).unwrap().to_string())
}

/// A vector grammar under capacity 𝟏. With `S` and helpers `X₁ … Xₖ`:
/// matrix `m1` is `S → X₁ … Xₖ`, `m2` grows a random subset of helpers by
/// rules `X → x X y`, and `m3` stops every helper by `X → z` (`x, y, z`
/// random terminals or λ). Only `shape.nonterminals` and `shape.terminals`
/// are used; with one nonterminal `S` grows and stops itself.
pub fn random_vector_grammar<R: Rng>(rng: &mut R, shape: Shape, matrices: usize) -> RegulatedGrammar {
    let n = shape.nonterminals.clamp(1, NONTERMINALS.len());
    let ts = &TERMINALS[..shape.terminals.clamp(1, TERMINALS.len())];
    let nts = &NONTERMINALS[..n];
    let helpers: Vec<&str> = if n == 1 { vec!["S"] } else { nts[1..].to_vec() };
    let mut spec = GrammarSpec::new(&nts.join(" "), &ts.join(" "), "S").context_free(true);
    if n > 1 {
        spec = spec.rule("s", "S", &helpers.join(" "));
    }
    for x in &helpers {
        let (mut left, mut right) = (maybe_terminal(rng, ts), maybe_terminal(rng, ts));
        if left.is_none() && right.is_none() {
            left = Some(ts.choose(rng).unwrap().to_string());
        }
        let grow = [left, Some(x.to_string()), right.take()].into_iter().flatten().collect::<Vec<_>>();
        spec = spec
            .rule(&format!("g{x}"), x, &grow.join(" "))
            .rule(&format!("e{x}"), x, &maybe_terminal(rng, ts).unwrap_or_default());
    }
    let base = spec.build().expect("generated grammar is well formed");
    let label = |l: String| base.rule_by_label(&l).unwrap();
    let mut grow: Vec<usize> = helpers.iter().map(|x| label(format!("g{x}"))).collect();
    grow.shuffle(rng);
    grow.truncate(rng.gen_range(1..=grow.len()));
    let mut stop: Vec<usize> = helpers.iter().map(|x| label(format!("e{x}"))).collect();
    stop.shuffle(rng);
    let mut ms = Vec::new();
    if n > 1 {
        ms.push(vec![label("s".into())]);
    }
    if matrices > ms.len() + 1 {
        ms.push(grow);
    }
    ms.push(stop);
    let ms = ms
        .into_iter()
        .enumerate()
        .map(|(i, rules)| Matrix {
            label: format!("m{}", i + 1),
            rules,
        })
        .collect();
    let k = CapacityFunction::one(&base);
    RegulatedGrammar::new(base, ms, ControlMode::Vector, Restriction::Capacity(k)).expect("generated matrices are valid")
}

/// Splits the rule labels of `g` into `parts` nonempty parts `T1 …`.
pub fn random_partition<R: Rng>(rng: &mut R, g: &Grammar, parts: usize) -> Vec<(String, Vec<String>)> {
    let mut labels: Vec<String> = g.rules().iter().map(|r| r.label.clone()).collect();
    let parts = parts.clamp(1, labels.len().max(1));
    labels.shuffle(rng);
    let mut out: Vec<(String, Vec<String>)> = (1..=parts).map(|i| (format!("T{i}"), Vec::new())).collect();
    for (i, l) in labels.into_iter().enumerate() {
        let p = if i < parts { i } else { rng.gen_range(0..parts) };
        out[p].1.push(l);
    }
    for (_, ls) in &mut out {
        ls.sort_by_key(|l| g.rule_by_label(l));
    }
    out
}

/// A net with random arcs (weights up to `max_weight`) and a marking with up
/// to `max_tokens` per place.
pub fn random_net<R: Rng>(
    rng: &mut R,
    places: usize,
    transitions: usize,
    max_weight: u32,
    max_tokens: u32,
) -> (PetriNet, Marking) {
    let mut n = PetriNet::new(
        (0..places).map(|i| format!("p{i}")).collect(),
        (0..transitions).map(|i| format!("t{i}")).collect(),
    )
    .expect("names are distinct");
    for t in 0..transitions {
        for p in 0..places {
            if rng.gen_bool(0.3) {
                n.add_input(p, t, rng.gen_range(1..=max_weight.max(1))).unwrap();
            }
            if rng.gen_bool(0.3) {
                n.add_output(t, p, rng.gen_range(1..=max_weight.max(1))).unwrap();
            }
        }
    }
    let m = Marking((0..places).map(|_| rng.gen_range(0..=max_tokens)).collect());
    (n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_output() {
        let a = random_grammar(&mut rng(7), Shape::default());
        let b = random_grammar(&mut rng(7), Shape::default());
        assert_eq!(a, b);
    }

    #[test]
    fn partitions_cover_rules() {
        let mut r = rng(3);
        for _ in 0..20 {
            let g = random_cf_grammar(&mut r, Shape::default());
            let parts = random_partition(&mut r, &g, 2);
            let mut all: Vec<&String> = parts.iter().flat_map(|p| &p.1).collect();
            assert!(parts.iter().all(|p| !p.1.is_empty()));
            all.sort();
            all.dedup();
            assert_eq!(all.len(), g.rules().len());
        }
    }
}
