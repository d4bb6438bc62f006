use super::{MatrixOrigin, Names, Provenance, RuleOrigin, Transformed};
use crate::error::TransformError;
use crate::grammar::{GrammarSpec, RuleSpec};
use crate::regulated::{ControlMode, Matrix, RegDerivation, RegStep, RegulatedGrammar, Restriction};

/// Turns a vector grammar under capacity 𝟏 into an unrestricted vector
/// grammar of index at most `2|V| + 1`.
///
/// Each rule `r` becomes the block `C→C', s₁ … sₘ, r, C'→C`: the `sᵢ` move a
/// presence flag `B[Aᵢ]` / `B'[Aᵢ]` so that no nonterminal can be introduced
/// while already present, and `C` keeps the blocks from interleaving. Rules
/// that put some nonterminal twice on their right side can never apply under
/// 𝟏, so matrices using them are dropped.
pub fn vector_cb_to_vector_fin(g: &RegulatedGrammar) -> Result<Transformed<RegulatedGrammar>, TransformError> {
    if g.mode() != ControlMode::Vector {
        return Err(TransformError::NotVectorMode);
    }
    match g.restriction() {
        Restriction::Capacity(k) if k.is_one() => {}
        _ => return Err(TransformError::NotCapacityOne),
    }
    let base = g.base();
    let vs: Vec<_> = base.nonterminals().collect();
    let mut syms = super::Names::of_grammar(base);
    let start = syms.fresh(&format!("{}'", base.name(base.start())));
    let present: Vec<String> = vs.iter().map(|&a| syms.fresh(&format!("B[{}]", base.name(a)))).collect();
    let absent: Vec<String> = vs.iter().map(|&a| syms.fresh(&format!("B'[{}]", base.name(a)))).collect();
    let c = syms.fresh("C");
    let c2 = syms.fresh(&format!("{c}'"));

    let mut spec = base.to_spec();
    spec.nonterminals.push(start.clone());
    spec.nonterminals.extend(present.iter().cloned());
    spec.nonterminals.extend(absent.iter().cloned());
    spec.nonterminals.extend([c.clone(), c2.clone()]);
    spec.start = start.clone();
    let mut labels = Names::labels_of(base);
    let mut add = |spec: &mut GrammarSpec, label: &str, lhs: &str, rhs: Vec<String>| {
        spec.rules.push(RuleSpec {
            label: labels.fresh(label),
            lhs: vec![lhs.to_owned()],
            rhs,
        });
        spec.rules.len() - 1
    };
    let open = add(&mut spec, "open", &c, vec![c2.clone()]);
    let close = add(&mut spec, "close", &c2, vec![c.clone()]);
    let gone: Vec<usize> = (0..vs.len())
        .map(|i| add(&mut spec, &format!("gone.{}", i + 1), &present[i], vec![absent[i].clone()]))
        .collect();
    let new: Vec<usize> = (0..vs.len())
        .map(|i| add(&mut spec, &format!("new.{}", i + 1), &absent[i], vec![present[i].clone()]))
        .collect();
    let mut init_rhs = vec![base.name(base.start()).to_owned()];
    for (i, &a) in vs.iter().enumerate() {
        init_rhs.push(if a == base.start() { present[i].clone() } else { absent[i].clone() });
    }
    init_rhs.push(c.clone());
    let init = add(&mut spec, "init", &start, init_rhs);
    let fin_c = add(&mut spec, "fin.C", &c, vec![]);
    let fin: Vec<usize> = (0..vs.len())
        .map(|i| add(&mut spec, &format!("fin.{}", i + 1), &absent[i], vec![]))
        .collect();
    let h = spec.build()?;

    let mu = |ri: usize| -> Option<Vec<usize>> {
        let r = base.rule(ri);
        let mut seq = vec![open];
        for (i, a) in vs.iter().enumerate() {
            let n = r.rhs.iter().filter(|x| *x == a).count();
            if n >= 2 {
                return None;
            }
            if r.lhs[0] == *a && n == 0 {
                seq.push(gone[i]);
            } else if r.lhs[0] != *a && n == 1 {
                seq.push(new[i]);
            }
        }
        seq.extend([ri, close]);
        Some(seq)
    };
    let mut provenance = Provenance {
        rules: (0..h.rules().len())
            .map(|i| RuleOrigin {
                source: (i < base.rules().len()).then_some(i),
                offset: 0,
            })
            .collect(),
        ..Provenance::default()
    };
    let mut matrices = Vec::new();
    let mut matrix_labels = Names::labels();
    'matrices: for (mi, m) in g.matrices().iter().enumerate() {
        let mut rules = Vec::new();
        let mut slots = Vec::new();
        for (j, &ri) in m.rules.iter().enumerate() {
            let Some(seq) = mu(ri) else { continue 'matrices };
            for &x in &seq {
                slots.push((x == ri).then_some(j));
            }
            rules.extend(seq);
        }
        matrices.push(Matrix {
            label: matrix_labels.fresh(&m.label),
            rules,
        });
        provenance.matrices.push(MatrixOrigin {
            source: Some(mi),
            slots,
        });
    }
    let end: Vec<usize> = std::iter::once(fin_c).chain(fin).collect();
    for (label, rules) in [("init", vec![init]), ("fin", end)] {
        provenance.matrices.push(MatrixOrigin {
            source: None,
            slots: vec![None; rules.len()],
        });
        matrices.push(Matrix {
            label: matrix_labels.fresh(label),
            rules,
        });
    }
    let out = RegulatedGrammar::new(h, matrices, ControlMode::Vector, Restriction::None)?;
    Ok(Transformed {
        output: out,
        provenance,
    })
}

/// Maps a derivation of the constructed grammar to an interleaving of the
/// input grammar's matrices.
pub fn lift_vector_fin(p: &Provenance, d: &RegDerivation) -> Vec<RegStep> {
    d.steps
        .iter()
        .filter_map(|s| {
            let m = &p.matrices[s.matrix as usize];
            let rule = p.rules[s.rule].source?;
            let slot = m.slots[s.slot as usize]?;
            Some(RegStep {
                rule,
                pos: s.pos,
                matrix: m.source? as u32,
                slot: slot as u32,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::SearchBudget;
    use crate::grammar::CapacityFunction;
    use crate::regulated::{check_index_bound, enumerate_regulated, is_valid_interleaving, RegulatedOptions};

    fn sample() -> RegulatedGrammar {
        // { aⁿ bⁿ cⁿ } needs two open copies at a time at most.
        let base = GrammarSpec::new("S A B", "a b c", "S")
            .rule("s", "S", "A B")
            .rule("a", "A", "a A b")
            .rule("b", "B", "c B")
            .rule("a0", "A", "")
            .rule("b0", "B", "")
            .context_free(true)
            .build()
            .unwrap();
        let k = CapacityFunction::one(&base);
        RegulatedGrammar::from_labels(
            base,
            &[("m0", &["s"]), ("m1", &["a", "b"]), ("m2", &["a0", "b0"])],
            ControlMode::Vector,
            Restriction::Capacity(k),
        )
        .unwrap()
    }

    #[test]
    fn same_words_and_index_bound() {
        let g = sample();
        let t = vector_cb_to_vector_fin(&g).unwrap();
        let b = SearchBudget::with_max_len(6);
        let opts = RegulatedOptions::default();
        let src = enumerate_regulated(&g, &b, opts).unwrap();
        let out = enumerate_regulated(&t.output, &b, opts).unwrap();
        assert_eq!(src.word_list(), out.word_list());
        let bound = 2 * g.base().nonterminal_count() + 1;
        let check = check_index_bound(&t.output, bound, &b, opts).unwrap();
        assert!(check.holds);
        for w in out.word_list() {
            let d = out.witness(&w).unwrap();
            let lifted = lift_vector_fin(&t.provenance, &d);
            assert!(is_valid_interleaving(&g, &lifted));
        }
    }

    #[test]
    fn preconditions() {
        let g = sample();
        assert!(matches!(
            vector_cb_to_vector_fin(&g.with_mode(ControlMode::Matrix)),
            Err(TransformError::NotVectorMode)
        ));
        assert!(matches!(
            vector_cb_to_vector_fin(&g.with_restriction(Restriction::None)),
            Err(TransformError::NotCapacityOne)
        ));
    }
}
