use std::collections::HashMap;

use super::{
    check_budget, names, normalize_capacity_to_one, CappedGrammar, MatrixOrigin, Names, Provenance, RuleOrigin,
    TransformOptions, Transformed,
};
use crate::derive::Step;
use crate::error::{GrammarError, TransformError};
use crate::grammar::{decompose_blocks, CapacityFunction, Grammar, GrammarSpec, RuleSpec, Sym};
use crate::regulated::{ControlMode, Matrix, RegDerivation, RegulatedGrammar, Restriction};

fn repetition_free(xs: &[Sym]) -> bool {
    let mut seen = std::collections::HashSet::new();
    xs.iter().filter(|s| s.is_nonterminal()).all(|s| seen.insert(*s))
}

/// All ordered pairs `(α₁, α₂)` of disjoint repetition-free strings over `free`.
fn contexts(free: &[Sym]) -> Vec<(Vec<Sym>, Vec<Sym>)> {
    fn arrangements(free: &[Sym], used: &mut Vec<bool>, cur: &mut Vec<Sym>, len: usize, out: &mut Vec<Vec<Sym>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..free.len() {
            if !used[i] {
                used[i] = true;
                cur.push(free[i]);
                arrangements(free, used, cur, len, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    for len in 0..=free.len() {
        let mut seqs = Vec::new();
        arrangements(free, &mut vec![false; free.len()], &mut Vec::new(), len, &mut seqs);
        for s in seqs {
            for split in 0..=len {
                out.push((s[..split].to_vec(), s[split..].to_vec()));
            }
        }
    }
    out
}

fn context_count(free: usize) -> usize {
    // Σ_j C(f,j)·j!·(j+1)
    let mut total = 0usize;
    let mut falling = 1usize;
    for j in 0..=free {
        if j > 0 {
            falling = falling.saturating_mul(free + 1 - j);
        }
        total = total.saturating_add(falling.saturating_mul(j + 1));
    }
    total
}

/// Under capacity 𝟏: adds every rule `α₁αα₂ → α₁βα₂` whose both sides are
/// repetition-free. Rules that could never apply under 𝟏 get no copies.
pub fn gs_cb_to_blockwise(
    g: &Grammar,
    k: &CapacityFunction,
    opts: &TransformOptions,
) -> Result<Transformed<CappedGrammar>, TransformError> {
    if !k.matches(g) {
        return Err(GrammarError::CapacityMismatch.into());
    }
    if !k.is_one() {
        return Err(TransformError::NotCapacityOne);
    }
    let free_of = |lhs: &[Sym], rhs: &[Sym]| -> Vec<Sym> {
        g.nonterminals()
            .filter(|a| !lhs.contains(a) && !rhs.contains(a))
            .collect()
    };
    let mut count = 0usize;
    for r in g.rules() {
        if repetition_free(&r.lhs) && repetition_free(&r.rhs) {
            count = count.saturating_add(context_count(free_of(&r.lhs, &r.rhs).len()));
            check_budget(count, opts)?;
        }
    }
    let mut spec = GrammarSpec {
        rules: Vec::with_capacity(count),
        ..g.to_spec()
    };
    let mut provenance = Provenance::default();
    let mut labels = Names::labels();
    for (ri, r) in g.rules().iter().enumerate() {
        if !repetition_free(&r.lhs) || !repetition_free(&r.rhs) {
            continue;
        }
        for (j, (a1, a2)) in contexts(&free_of(&r.lhs, &r.rhs)).into_iter().enumerate() {
            let wrap = |mid: &[Sym]| names(g, &[&a1[..], mid, &a2[..]].concat());
            let label = if j == 0 {
                labels.fresh(&r.label)
            } else {
                labels.fresh(&format!("{}.{j}", r.label))
            };
            spec.rules.push(RuleSpec {
                label,
                lhs: wrap(&r.lhs),
                rhs: wrap(&r.rhs),
            });
            provenance.rules.push(RuleOrigin {
                source: Some(ri),
                offset: a1.len(),
            });
        }
    }
    spec.context_free = spec.rules.iter().all(|r| r.lhs.len() == 1);
    let grammar = spec.build()?;
    let capacity = CapacityFunction::one(&grammar);
    Ok(Transformed {
        output: CappedGrammar { grammar, capacity },
        provenance,
    })
}

/// A matrix grammar of finite index simulating a capacity-bounded grammar.
#[derive(Clone, Debug)]
pub struct MatrixFin {
    pub grammar: RegulatedGrammar,
    /// `A₁ … Aₘ` in the order they appear in the trailing counter string.
    pub plain: Vec<Sym>,
    /// `Ā₁ … Āₘ`, same order.
    pub barred: Vec<Sym>,
}

struct BlockRule {
    from: usize,
    rule: usize,
    pos: usize,
    to: Vec<Sym>,
}

/// Simulates `(G, κ)` by a matrix grammar whose forms are `[β] γ`: `[β]`
/// encodes each maximal nonterminal block of `β` as one symbol, and `γ`
/// records for each `A` whether it occurs in `β` (`A`) or not (`Ā`).
///
/// Non-𝟏 capacities are normalized first. Only blocks reachable from `[S]`
/// are generated.
pub fn gs_cb_to_matrix_fin(
    g: &Grammar,
    k: &CapacityFunction,
    opts: &TransformOptions,
) -> Result<Transformed<MatrixFin>, TransformError> {
    if !k.matches(g) {
        return Err(GrammarError::CapacityMismatch.into());
    }
    let normalized;
    let (g1, earlier) = if k.is_one() {
        (g, Provenance::identity(g.rules().len()))
    } else {
        normalized = normalize_capacity_to_one(g, k, opts)?;
        (&normalized.output.grammar, normalized.provenance.clone())
    };
    let m = g1.nonterminal_count();

    let mut blocks: Vec<Vec<Sym>> = vec![vec![g1.start()]];
    let mut block_index: HashMap<Vec<Sym>, usize> = HashMap::from([(vec![g1.start()], 0)]);
    let mut block_rules: Vec<BlockRule> = Vec::new();
    let usable: Vec<usize> = (0..g1.rules().len())
        .filter(|&i| repetition_free(&g1.rule(i).lhs) && repetition_free(&g1.rule(i).rhs))
        .collect();
    let mut next = 0;
    while next < blocks.len() {
        let b = blocks[next].clone();
        for &ri in &usable {
            let r = g1.rule(ri);
            let Some(pos) = b.windows(r.lhs.len()).position(|w| w == &r.lhs[..]) else {
                continue;
            };
            let to: Vec<Sym> = [&b[..pos], &r.rhs[..], &b[pos + r.lhs.len()..]].concat();
            if !repetition_free(&to) {
                continue;
            }
            for nb in decompose_blocks(&to).blocks {
                if !block_index.contains_key(&nb) {
                    block_index.insert(nb.clone(), blocks.len());
                    blocks.push(nb);
                    check_budget(blocks.len() + 2 * m + 1, opts)?;
                }
            }
            block_rules.push(BlockRule {
                from: next,
                rule: ri,
                pos,
                to,
            });
            check_budget(block_rules.len(), opts)?;
        }
        next += 1;
    }

    let mut sym_names = Names::of_grammar(g1);
    let start_name = sym_names.fresh(&format!("{}'", g1.name(g1.start())));
    let block_names: Vec<String> = blocks
        .iter()
        .map(|b| sym_names.fresh(&format!("[{}]", names(g1, b).join("|"))))
        .collect();
    let plain_names: Vec<String> = g1.nonterminals().map(|a| g1.name(a).to_owned()).collect();
    let bar_names: Vec<String> = plain_names.iter().map(|a| sym_names.fresh(&format!("{a}^"))).collect();

    let mut spec = GrammarSpec {
        nonterminals: std::iter::once(start_name.clone())
            .chain(block_names.iter().cloned())
            .chain(plain_names.iter().cloned())
            .chain(bar_names.iter().cloned())
            .collect(),
        terminals: g1.terminals().map(|t| g1.name(t).to_owned()).collect(),
        start: start_name.clone(),
        rules: Vec::new(),
        context_free: true,
    };
    let encode = |w: &[Sym]| -> Vec<String> {
        let d = decompose_blocks(w);
        let mut out = names(g1, &d.gaps[0]);
        for (b, x) in d.blocks.iter().zip(&d.gaps[1..]) {
            out.push(block_names[block_index[b]].clone());
            out.extend(names(g1, x));
        }
        out
    };

    let mut labels = Names::labels();
    let mut provenance = Provenance::default();
    let mut matrices = Vec::new();
    let bookkeeping = RuleOrigin {
        source: None,
        offset: 0,
    };
    let bar_base = block_rules.len();
    let mut per_rule = vec![0usize; g1.rules().len()];
    for br in &block_rules {
        per_rule[br.rule] += 1;
        let label = labels.fresh(&format!("{}.{}", g1.rule(br.rule).label, per_rule[br.rule]));
        spec.rules.push(RuleSpec {
            label,
            lhs: vec![block_names[br.from].clone()],
            rhs: encode(&br.to),
        });
        let e = &earlier.rules[br.rule];
        provenance.rules.push(RuleOrigin {
            source: e.source,
            offset: br.pos + e.offset,
        });
    }
    for (i, (a, abar)) in plain_names.iter().zip(&bar_names).enumerate() {
        spec.rules.push(RuleSpec {
            label: labels.fresh(&format!("bar.{}", i + 1)),
            lhs: vec![a.clone()],
            rhs: vec![abar.clone()],
        });
        spec.rules.push(RuleSpec {
            label: labels.fresh(&format!("unbar.{}", i + 1)),
            lhs: vec![abar.clone()],
            rhs: vec![a.clone()],
        });
        provenance.rules.extend([bookkeeping.clone(), bookkeeping.clone()]);
    }
    let start_rule = spec.rules.len();
    let mut gamma0 = vec![block_names[0].clone()];
    for a in g1.nonterminals() {
        gamma0.push(if a == g1.start() {
            plain_names[a.index()].clone()
        } else {
            bar_names[a.index()].clone()
        });
    }
    let start_label = labels.fresh("init");
    spec.rules.push(RuleSpec {
        label: start_label.clone(),
        lhs: vec![start_name],
        rhs: gamma0,
    });
    provenance.rules.push(bookkeeping.clone());
    let end_base = spec.rules.len();
    for (i, abar) in bar_names.iter().enumerate() {
        spec.rules.push(RuleSpec {
            label: labels.fresh(&format!("end.{}", i + 1)),
            lhs: vec![abar.clone()],
            rhs: vec![],
        });
        provenance.rules.push(bookkeeping.clone());
    }

    let mut matrix_labels = Names::labels();
    for (i, br) in block_rules.iter().enumerate() {
        let from = &blocks[br.from];
        let mut rules = vec![i];
        for a in g1.nonterminals() {
            if from.contains(&a) && !br.to.contains(&a) {
                rules.push(bar_base + 2 * a.index());
            }
        }
        for a in g1.nonterminals() {
            if !from.contains(&a) && br.to.contains(&a) {
                rules.push(bar_base + 2 * a.index() + 1);
            }
        }
        let mut slots = vec![None; rules.len()];
        slots[0] = Some(0);
        provenance.matrices.push(MatrixOrigin {
            source: provenance.rules[i].source,
            slots,
        });
        matrices.push(Matrix {
            label: matrix_labels.fresh(&spec.rules[i].label),
            rules,
        });
    }
    matrices.push(Matrix {
        label: matrix_labels.fresh(&start_label),
        rules: vec![start_rule],
    });
    matrices.push(Matrix {
        label: matrix_labels.fresh("end"),
        rules: (end_base..end_base + m).collect(),
    });
    provenance.matrices.extend(
        [1, m].map(|n| MatrixOrigin {
            source: None,
            slots: vec![None; n],
        }),
    );

    let h = spec.build()?;
    for (i, b) in blocks.iter().enumerate() {
        provenance.blocks.push((Sym::nonterminal(1 + i), b.clone()));
    }
    let plain = (0..m).map(|i| Sym::nonterminal(1 + blocks.len() + i)).collect();
    let barred = (0..m).map(|i| Sym::nonterminal(1 + blocks.len() + m + i)).collect();
    let grammar = RegulatedGrammar::new(h, matrices, ControlMode::Matrix, Restriction::None)?;
    Ok(Transformed {
        output: MatrixFin { grammar, plain, barred },
        provenance,
    })
}

/// Maps a derivation of the block grammar to a derivation of the grammar it
/// was built from.
pub fn lift_matrix_fin(p: &Provenance, d: &RegDerivation) -> Vec<Step> {
    let width: HashMap<Sym, usize> = p.blocks.iter().map(|(s, b)| (*s, b.len())).collect();
    let mut out = Vec::new();
    for (s, form) in d.steps.iter().zip(&d.forms) {
        let o = &p.rules[s.rule];
        let Some(rule) = o.source else { continue };
        let before: usize = form.symbols()[..s.pos]
            .iter()
            .map(|x| {
                if x.is_terminal() {
                    1
                } else {
                    width.get(x).copied().unwrap_or(0)
                }
            })
            .sum();
        out.push(Step {
            rule,
            pos: before + o.offset,
        });
    }
    out
}

/// Whether `form` has the shape `[β] γ` with `γ` agreeing with `β`.
/// Terminal words (after the final matrix) are accepted as they are.
pub fn block_shape_ok(t: &Transformed<MatrixFin>, form: &[Sym]) -> bool {
    if form.iter().all(|s| s.is_terminal()) {
        return true;
    }
    let m = t.output.plain.len();
    if form.len() < m {
        return false;
    }
    let (prefix, gamma) = form.split_at(form.len() - m);
    let blocks: HashMap<Sym, &Vec<Sym>> = t.provenance.blocks.iter().map(|(s, b)| (*s, b)).collect();
    let mut counts = vec![0u32; m];
    let mut prev_block = false;
    for s in prefix {
        if s.is_terminal() {
            prev_block = false;
            continue;
        }
        let Some(b) = blocks.get(s) else { return false };
        if prev_block {
            return false;
        }
        prev_block = true;
        for a in b.iter() {
            counts[a.index()] += 1;
        }
    }
    gamma.iter().enumerate().all(|(i, &x)| {
        (x == t.output.plain[i] && counts[i] == 1) || (x == t.output.barred[i] && counts[i] == 0)
    })
}
