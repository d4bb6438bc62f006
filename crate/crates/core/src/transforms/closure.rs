use super::{normalize_capacity_to_one, CappedGrammar, Names, Provenance, RuleOrigin, TransformOptions, Transformed};
use crate::error::TransformError;
use crate::grammar::{CapacityFunction, Grammar, GrammarSpec, RuleSpec};

/// A closure operation on capacity-bounded languages.
#[derive(Clone, Copy, Debug)]
pub enum ClosureOp<'a> {
    Star,
    Union(&'a CappedGrammar),
    Concat(&'a CappedGrammar),
    /// Terminal images; terminals not listed map to themselves.
    Hom(&'a [(String, Vec<String>)]),
}

fn to_one(g: &CappedGrammar, opts: &TransformOptions) -> Result<Transformed<CappedGrammar>, TransformError> {
    if g.capacity.is_one() && g.capacity.matches(&g.grammar) {
        return Ok(Transformed {
            output: g.clone(),
            provenance: Provenance::identity(g.grammar.rules().len()),
        });
    }
    normalize_capacity_to_one(&g.grammar, &g.capacity, opts)
}

fn origins(p: &Provenance, shift: usize) -> impl Iterator<Item = RuleOrigin> + '_ {
    p.rules.iter().map(move |o| RuleOrigin {
        source: o.source.map(|s| s + shift),
        offset: o.offset,
    })
}

/// Builds a capacity-𝟏 grammar for the star, union, concatenation or
/// homomorphic image of the input language(s). Operands with other finite
/// capacities are normalized first.
///
/// Rule sources in the provenance index the first operand's rules, then the
/// second operand's.
pub fn closure_construct(
    g: &CappedGrammar,
    op: ClosureOp<'_>,
    opts: &TransformOptions,
) -> Result<Transformed<CappedGrammar>, TransformError> {
    let a = to_one(g, opts)?;
    let ga = &a.output.grammar;
    let bookkeeping = RuleOrigin {
        source: None,
        offset: 0,
    };
    let (spec, provenance) = match op {
        ClosureOp::Star => {
            if !ga.is_context_free() {
                return Err(TransformError::NotContextFree);
            }
            let mut spec = ga.to_spec();
            let mut syms = Names::of_grammar(ga);
            let mut labels = Names::labels_of(ga);
            let s = spec.start.clone();
            let s2 = syms.fresh(&format!("{s}'"));
            spec.nonterminals.push(s2.clone());
            spec.rules.push(RuleSpec {
                label: labels.fresh("star.more"),
                lhs: vec![s2.clone()],
                rhs: vec![s, s2.clone()],
            });
            spec.rules.push(RuleSpec {
                label: labels.fresh("star.stop"),
                lhs: vec![s2.clone()],
                rhs: vec![],
            });
            spec.start = s2;
            let mut p = Provenance {
                rules: origins(&a.provenance, 0).collect(),
                ..Provenance::default()
            };
            p.rules.extend([bookkeeping.clone(), bookkeeping]);
            (spec, p)
        }
        ClosureOp::Union(h) | ClosureOp::Concat(h) => {
            let b = to_one(h, opts)?;
            let gb = &b.output.grammar;
            let (sa, sb) = (tagged(ga, 1), tagged(gb, 2));
            let mut terminals = sa.terminals.clone();
            for t in &sb.terminals {
                if !terminals.contains(t) {
                    terminals.push(t.clone());
                }
            }
            let mut syms = Names::new();
            for n in sa.nonterminals.iter().chain(&sb.nonterminals).chain(&terminals) {
                syms.reserve(n);
            }
            let mut labels = Names::labels();
            for r in sa.rules.iter().chain(&sb.rules) {
                labels.reserve(&r.label);
            }
            let start = syms.fresh("S'");
            let mut rules = Vec::new();
            if let ClosureOp::Union(_) = op {
                for (i, s) in [&sa.start, &sb.start].into_iter().enumerate() {
                    rules.push(RuleSpec {
                        label: labels.fresh(&format!("union.{}", i + 1)),
                        lhs: vec![start.clone()],
                        rhs: vec![s.clone()],
                    });
                }
            } else {
                rules.push(RuleSpec {
                    label: labels.fresh("concat"),
                    lhs: vec![start.clone()],
                    rhs: vec![sa.start.clone(), sb.start.clone()],
                });
            }
            let new_rules = rules.len();
            rules.extend(sa.rules.iter().chain(&sb.rules).cloned());
            let spec = GrammarSpec {
                nonterminals: std::iter::once(start.clone())
                    .chain(sa.nonterminals.iter().cloned())
                    .chain(sb.nonterminals.iter().cloned())
                    .collect(),
                terminals,
                start,
                rules,
                context_free: ga.is_context_free() && gb.is_context_free(),
            };
            let mut p = Provenance {
                rules: vec![bookkeeping; new_rules],
                ..Provenance::default()
            };
            p.rules.extend(origins(&a.provenance, 0));
            p.rules.extend(origins(&b.provenance, g.grammar.rules().len()));
            (spec, p)
        }
        ClosureOp::Hom(map) => {
            for (t, _) in map {
                if ga.sym(t).is_none_or(|s| !s.is_terminal()) {
                    return Err(TransformError::UnknownTerminal(t.clone()));
                }
            }
            let image = |t: &str| -> Vec<String> {
                map.iter()
                    .find(|(x, _)| x == t)
                    .map_or_else(|| vec![t.to_owned()], |(_, img)| img.clone())
            };
            let mut spec = ga.to_spec();
            let mut terminals: Vec<String> = Vec::new();
            for t in &spec.terminals {
                for x in image(t) {
                    if !terminals.contains(&x) {
                        terminals.push(x);
                    }
                }
            }
            for r in &mut spec.rules {
                r.rhs = r
                    .rhs
                    .iter()
                    .flat_map(|x| {
                        if ga.sym(x).is_some_and(|s| s.is_terminal()) {
                            image(x)
                        } else {
                            vec![x.clone()]
                        }
                    })
                    .collect();
            }
            spec.terminals = terminals;
            let p = Provenance {
                rules: origins(&a.provenance, 0).collect(),
                ..Provenance::default()
            };
            (spec, p)
        }
    };
    let grammar = spec.build()?;
    let capacity = CapacityFunction::one(&grammar);
    Ok(Transformed {
        output: CappedGrammar { grammar, capacity },
        provenance,
    })
}

/// Spec of `g` with `@tag` appended to every nonterminal and rule label.
fn tagged(g: &Grammar, tag: usize) -> GrammarSpec {
    let mut spec = g.to_spec();
    let rename = |x: &mut String| {
        if g.sym(x).is_some_and(|s| s.is_nonterminal()) {
            x.push_str(&format!("@{tag}"));
        }
    };
    spec.nonterminals.iter_mut().for_each(rename);
    rename(&mut spec.start);
    for r in &mut spec.rules {
        r.lhs.iter_mut().chain(r.rhs.iter_mut()).for_each(rename);
        r.label.push_str(&format!("@{tag}"));
    }
    spec
}
