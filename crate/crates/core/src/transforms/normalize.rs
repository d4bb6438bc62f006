use super::{check_budget, CappedGrammar, Names, Provenance, RuleOrigin, TransformOptions, Transformed};
use crate::error::{GrammarError, TransformError};
use crate::grammar::{Bound, CapacityFunction, Grammar, GrammarSpec, RuleSpec};

/// Replaces every nonterminal `A` by copies `(A,1) … (A,κ(A))` and every
/// rule by all its copy-substitutions, giving an equivalent grammar under
/// capacity 𝟏.
pub fn normalize_capacity_to_one(
    g: &Grammar,
    k: &CapacityFunction,
    opts: &TransformOptions,
) -> Result<Transformed<CappedGrammar>, TransformError> {
    if !k.matches(g) {
        return Err(GrammarError::CapacityMismatch.into());
    }
    let mut copies: Vec<Vec<String>> = Vec::with_capacity(g.nonterminal_count());
    let mut names = Names::new();
    for t in g.terminals() {
        names.reserve(g.name(t));
    }
    let mut total = 0usize;
    for a in g.nonterminals() {
        let n = match k.get(a) {
            Bound::Finite(n) => n as usize,
            Bound::Unbounded => return Err(TransformError::UnboundedCapacity(g.name(a).to_owned())),
        };
        total += n;
        check_budget(total, opts)?;
        copies.push((1..=n).map(|i| names.fresh(&format!("({},{i})", g.name(a)))).collect());
    }

    let mut rule_count = 0usize;
    for r in g.rules() {
        let variants = r
            .lhs
            .iter()
            .chain(&r.rhs)
            .filter(|s| s.is_nonterminal())
            .try_fold(1usize, |acc, s| acc.checked_mul(copies[s.index()].len()))
            .unwrap_or(usize::MAX);
        rule_count = rule_count.saturating_add(variants);
        check_budget(rule_count, opts)?;
    }

    let mut spec = GrammarSpec {
        nonterminals: copies.iter().flatten().cloned().collect(),
        terminals: g.terminals().map(|t| g.name(t).to_owned()).collect(),
        start: copies[g.start().index()][0].clone(),
        rules: Vec::with_capacity(rule_count),
        context_free: g.is_context_free(),
    };
    let mut provenance = Provenance::default();
    let mut labels = Names::labels();
    for (ri, r) in g.rules().iter().enumerate() {
        let side: Vec<_> = r.lhs.iter().chain(&r.rhs).copied().collect();
        let slots: Vec<usize> = (0..side.len()).filter(|&i| side[i].is_nonterminal()).collect();
        let radix: Vec<usize> = slots.iter().map(|&i| copies[side[i].index()].len()).collect();
        let n: usize = radix.iter().product();
        let mut digits = vec![0usize; slots.len()];
        for j in 0..n {
            let mut syms: Vec<String> = side.iter().map(|&s| g.name(s).to_owned()).collect();
            for (d, &i) in digits.iter().zip(&slots) {
                syms[i] = copies[side[i].index()][*d].clone();
            }
            let rhs = syms.split_off(r.lhs.len());
            let label = if n == 1 {
                labels.fresh(&r.label)
            } else {
                labels.fresh(&format!("{}.{}", r.label, j + 1))
            };
            spec.rules.push(RuleSpec { label, lhs: syms, rhs });
            provenance.rules.push(RuleOrigin {
                source: Some(ri),
                offset: 0,
            });
            for p in (0..digits.len()).rev() {
                digits[p] += 1;
                if digits[p] < radix[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
    }
    let grammar = spec.build()?;
    let capacity = CapacityFunction::one(&grammar);
    Ok(Transformed {
        output: CappedGrammar { grammar, capacity },
        provenance,
    })
}

/// A context-free grammar read under the constant capacity `k`.
pub fn cf_fin_to_cf_cb(g: &Grammar, k: u32) -> Result<Transformed<CappedGrammar>, TransformError> {
    if k == 0 {
        return Err(TransformError::ZeroCapacity);
    }
    if !g.is_context_free() {
        return Err(TransformError::NotContextFree);
    }
    let capacity = CapacityFunction::constant(g, k)?;
    Ok(Transformed {
        output: CappedGrammar {
            grammar: g.clone(),
            capacity,
        },
        provenance: Provenance::identity(g.rules().len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{enumerate_language, SearchBudget};
    use crate::transforms::lift_steps;

    #[test]
    fn copies_every_nonterminal_occurrence() {
        let g = GrammarSpec::new("A", "a", "A")
            .rule("r", "A", "a A")
            .rule("e", "A", "")
            .infer_context_free()
            .build()
            .unwrap();
        let k = CapacityFunction::constant(&g, 2).unwrap();
        let t = normalize_capacity_to_one(&g, &k, &TransformOptions::default()).unwrap();
        let h = &t.output.grammar;
        assert_eq!(h.nonterminal_count(), 2);
        assert_eq!(h.rules().len(), 4 + 2);
        assert_eq!(h.rule(0).label, "r.1");
        assert_eq!(h.render(&h.rule(1).lhs), "(A,1)");
        assert_eq!(h.render(&h.rule(1).rhs), "a (A,2)");
        assert!(t.output.capacity.is_one());
    }

    #[test]
    fn capacity_one_is_a_renaming() {
        let g = crate::fixtures::ex31();
        let k = CapacityFunction::one(&g);
        let t = normalize_capacity_to_one(&g, &k, &TransformOptions::default()).unwrap();
        let h = &t.output.grammar;
        assert_eq!(h.rules().len(), g.rules().len());
        for (a, b) in g.rules().iter().zip(h.rules()) {
            assert_eq!(a.label, b.label);
        }
        assert_eq!(h.name(h.start()), "(S,1)");
    }

    #[test]
    fn witnesses_lift_back() {
        let g = GrammarSpec::new("S A", "a b", "S")
            .rule("r1", "S", "A A")
            .rule("r2", "A", "a A b")
            .rule("r3", "A", "")
            .infer_context_free()
            .build()
            .unwrap();
        let k = CapacityFunction::constant(&g, 2).unwrap();
        let t = normalize_capacity_to_one(&g, &k, &TransformOptions::default()).unwrap();
        let b = SearchBudget::with_max_len(6);
        let src = enumerate_language(&g, &k, &b).unwrap();
        let out = enumerate_language(&t.output.grammar, &t.output.capacity, &b).unwrap();
        assert_eq!(src.word_list(), out.word_list());
        for w in out.words() {
            let d = out.witness(w).unwrap();
            let steps = lift_steps(&t.provenance, &d.steps);
            let end = crate::derive::replay_steps(&g, &k, &steps).unwrap();
            assert_eq!(end.symbols(), &w.0[..]);
        }
    }

    #[test]
    fn rejects_unbounded_and_oversized() {
        let g = crate::fixtures::ex31();
        let k = CapacityFunction::unbounded(&g);
        assert!(matches!(
            normalize_capacity_to_one(&g, &k, &TransformOptions::default()),
            Err(TransformError::UnboundedCapacity(_))
        ));
        let k = CapacityFunction::constant(&g, 3).unwrap();
        let tight = TransformOptions { symbol_budget: 10 };
        assert!(matches!(
            normalize_capacity_to_one(&g, &k, &tight),
            Err(TransformError::SymbolBudget { budget: 10 })
        ));
    }

    #[test]
    fn cf_constant_capacity() {
        let g = crate::fixtures::ex32();
        assert!(matches!(cf_fin_to_cf_cb(&g, 0), Err(TransformError::ZeroCapacity)));
        let t = cf_fin_to_cf_cb(&g, 3).unwrap();
        assert_eq!(t.output.capacity.bounds(), &[Bound::Finite(3); 4]);
        assert_eq!(t.output.grammar, g);
        assert!(matches!(
            cf_fin_to_cf_cb(&crate::fixtures::ex31(), 2),
            Err(TransformError::NotContextFree)
        ));
    }
}
