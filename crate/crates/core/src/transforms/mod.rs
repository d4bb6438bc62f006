//! Grammar constructions. Each one returns its output plus a provenance map
//! from output rules and matrices back to the rules of the input.

mod blocks;
mod closure;
mod normalize;
mod vector;

use std::collections::HashSet;
use std::fmt::Write as _;

pub use blocks::{block_shape_ok, MatrixFin, gs_cb_to_blockwise, gs_cb_to_matrix_fin, lift_matrix_fin};
pub use closure::{closure_construct, ClosureOp};
pub use normalize::{cf_fin_to_cf_cb, normalize_capacity_to_one};
pub use vector::{lift_vector_fin, vector_cb_to_vector_fin};

use crate::derive::Step;
use crate::grammar::{Grammar, Sym};

pub const DEFAULT_SYMBOL_BUDGET: usize = 10_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    /// Upper bound on generated nonterminals and on generated rules.
    pub symbol_budget: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            symbol_budget: DEFAULT_SYMBOL_BUDGET,
        }
    }
}

/// Where an output rule comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOrigin {
    /// Index of the simulated input rule; `None` for bookkeeping rules.
    pub source: Option<usize>,
    /// Shift from the output rule's position to the input rule's position.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixOrigin {
    /// Input matrix (or, for grammar-to-matrix constructions, input rule).
    pub source: Option<usize>,
    /// For each slot, the slot of the input matrix it simulates.
    pub slots: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    /// One entry per output rule.
    pub rules: Vec<RuleOrigin>,
    /// One entry per output matrix.
    pub matrices: Vec<MatrixOrigin>,
    /// Output nonterminals that encode a string of input nonterminals.
    pub blocks: Vec<(Sym, Vec<Sym>)>,
}

impl Provenance {
    fn identity(rules: usize) -> Provenance {
        Provenance {
            rules: (0..rules)
                .map(|i| RuleOrigin {
                    source: Some(i),
                    offset: 0,
                })
                .collect(),
            ..Provenance::default()
        }
    }

    /// Sidecar text: one `rule` or `matrix` line per output item.
    pub fn render(&self, output_rules: &[String], output_matrices: &[String], input_rules: &[String]) -> String {
        let mut out = String::new();
        let src = |s: Option<usize>| s.map_or("-".to_owned(), |i| input_rules[i].clone());
        for (label, o) in output_rules.iter().zip(&self.rules) {
            let _ = write!(out, "rule {label} <- {}", src(o.source));
            if o.offset > 0 {
                let _ = write!(out, " +{}", o.offset);
            }
            out.push('\n');
        }
        for (label, m) in output_matrices.iter().zip(&self.matrices) {
            let _ = writeln!(out, "matrix {label} <- {}", m.source.map_or("-".to_owned(), |i| i.to_string()));
        }
        out
    }
}

/// Maps a derivation of a plain-grammar construction back to the input.
///
/// Bookkeeping steps (no source) are skipped.
pub fn lift_steps(p: &Provenance, steps: &[Step]) -> Vec<Step> {
    steps
        .iter()
        .filter_map(|s| {
            let o = &p.rules[s.rule];
            o.source.map(|r| Step {
                rule: r,
                pos: s.pos + o.offset,
            })
        })
        .collect()
}

/// Hands out names not yet used by a grammar.
pub(crate) struct Names {
    used: HashSet<String>,
}

impl Names {
    pub fn new() -> Names {
        Names {
            used: HashSet::new(),
        }
    }

    pub fn of_grammar(g: &Grammar) -> Names {
        let mut n = Names::new();
        for s in g.nonterminals().chain(g.terminals()) {
            n.used.insert(g.name(s).to_owned());
        }
        n
    }

    /// For rule and matrix labels, which must not read as section names.
    pub fn labels() -> Names {
        let mut n = Names::new();
        for k in crate::text::SECTION_KEYS {
            n.reserve(k);
        }
        n
    }

    pub fn labels_of(g: &Grammar) -> Names {
        let mut n = Names::labels();
        for r in g.rules() {
            n.used.insert(r.label.clone());
        }
        n
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_owned());
    }

    /// `base`, or `base` with primes appended until it is fresh.
    pub fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_owned();
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        name
    }
}

fn names(g: &Grammar, xs: &[Sym]) -> Vec<String> {
    xs.iter().map(|&s| g.name(s).to_owned()).collect()
}

/// A grammar together with its capacity function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CappedGrammar {
    pub grammar: Grammar,
    pub capacity: crate::grammar::CapacityFunction,
}

#[derive(Clone, Debug)]
pub struct Transformed<T> {
    pub output: T,
    pub provenance: Provenance,
}

fn check_budget(count: usize, opts: &TransformOptions) -> Result<(), crate::error::TransformError> {
    if count > opts.symbol_budget {
        Err(crate::error::TransformError::SymbolBudget {
            budget: opts.symbol_budget,
        })
    } else {
        Ok(())
    }
}
