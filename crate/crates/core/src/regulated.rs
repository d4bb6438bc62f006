//! Matrix, vector and semi-matrix grammars.
//!
//! All three modes share one control representation: a sorted list of
//! `(matrix, next rule)` entries for matrix copies that have been started
//! but not finished. The modes differ only in when a new copy may start:
//!
//! * matrix: only when nothing is pending (derivations are concatenations);
//! * vector: any time, up to `max_open` pending copies (shuffles);
//! * semi-matrix: one stream per matrix by default, each stream cycling
//!   through its matrix (`semi_streams` allows more per matrix).

use std::collections::BTreeMap;
use std::fmt;

use crate::derive::{collect_terminal, AsForm, FormCut, SearchBudget, Word};
use crate::error::RegulatedError;
use crate::grammar::{apply_unchecked, capacity_ok, CapacityFunction, Grammar, SententialForm};
use crate::search::{explore, Explored, Space};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ControlMode {
    Matrix,
    Vector,
    SemiMatrix,
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlMode::Matrix => "matrix",
            ControlMode::Vector => "vector",
            ControlMode::SemiMatrix => "semi-matrix",
        })
    }
}

impl std::str::FromStr for ControlMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matrix" => Ok(ControlMode::Matrix),
            "vector" => Ok(ControlMode::Vector),
            "semi-matrix" | "semi_matrix" => Ok(ControlMode::SemiMatrix),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    None,
    Capacity(CapacityFunction),
    /// At most `k` nonterminals in every sentential form.
    Index(usize),
}

/// A nonempty sequence of context-free rules, by index into the base grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub label: String,
    pub rules: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegulatedGrammar {
    base: Grammar,
    matrices: Vec<Matrix>,
    mode: ControlMode,
    restriction: Restriction,
}

impl RegulatedGrammar {
    pub fn new(
        base: Grammar,
        matrices: Vec<Matrix>,
        mode: ControlMode,
        restriction: Restriction,
    ) -> Result<RegulatedGrammar, RegulatedError> {
        if !base.is_context_free() {
            return Err(RegulatedError::NotContextFree);
        }
        let mut seen = std::collections::HashSet::new();
        for m in &matrices {
            if m.rules.is_empty() {
                return Err(RegulatedError::EmptyMatrix(m.label.clone()));
            }
            if !seen.insert(m.label.as_str()) {
                return Err(RegulatedError::DuplicateMatrix(m.label.clone()));
            }
            if let Some(&r) = m.rules.iter().find(|&&r| r >= base.rules().len()) {
                return Err(RegulatedError::UnknownRule {
                    matrix: m.label.clone(),
                    rule: format!("#{r}"),
                });
            }
        }
        if let Restriction::Capacity(k) = &restriction {
            if !k.matches(&base) {
                return Err(crate::error::GrammarError::CapacityMismatch.into());
            }
        }
        Ok(RegulatedGrammar {
            base,
            matrices,
            mode,
            restriction,
        })
    }

    /// Builds matrices from rule labels.
    pub fn from_labels(
        base: Grammar,
        matrices: &[(&str, &[&str])],
        mode: ControlMode,
        restriction: Restriction,
    ) -> Result<RegulatedGrammar, RegulatedError> {
        let ms = matrices
            .iter()
            .map(|(label, rules)| {
                let rules = rules
                    .iter()
                    .map(|r| {
                        base.rule_by_label(r).ok_or_else(|| RegulatedError::UnknownRule {
                            matrix: label.to_string(),
                            rule: r.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Matrix {
                    label: label.to_string(),
                    rules,
                })
            })
            .collect::<Result<Vec<_>, RegulatedError>>()?;
        RegulatedGrammar::new(base, ms, mode, restriction)
    }

    /// One singleton matrix per rule, labelled like the rule.
    pub fn singletons(base: Grammar, mode: ControlMode, restriction: Restriction) -> Result<RegulatedGrammar, RegulatedError> {
        let ms = base
            .rules()
            .iter()
            .enumerate()
            .map(|(i, r)| Matrix {
                label: r.label.clone(),
                rules: vec![i],
            })
            .collect();
        RegulatedGrammar::new(base, ms, mode, restriction)
    }

    pub fn base(&self) -> &Grammar {
        &self.base
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn with_mode(&self, mode: ControlMode) -> RegulatedGrammar {
        RegulatedGrammar {
            mode,
            ..self.clone()
        }
    }

    pub fn with_restriction(&self, restriction: Restriction) -> RegulatedGrammar {
        RegulatedGrammar {
            restriction,
            ..self.clone()
        }
    }

    pub fn matrix_by_label(&self, label: &str) -> Option<usize> {
        self.matrices.iter().position(|m| m.label == label)
    }
}

/// Form restriction applied to every sentential form.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FormFilter<'a> {
    pub capacity: Option<&'a CapacityFunction>,
    pub index: Option<usize>,
}

impl FormFilter<'_> {
    fn admits(&self, w: &SententialForm) -> bool {
        self.capacity.is_none_or(|k| capacity_ok(w, k))
            && self.index.is_none_or(|k| w.nonterminal_count() <= k)
    }

    fn nonterminal_bound(&self) -> Option<usize> {
        let cap = self
            .capacity
            .filter(|k| k.is_all_finite())
            .map(CapacityFunction::finite_total);
        match (cap, self.index) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Started-but-unfinished matrix copies, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlState {
    pub pending: Vec<(u32, u32)>,
}

impl ControlState {
    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    fn with_advanced(&self, slot: Option<usize>, entry: Option<(u32, u32)>) -> ControlState {
        let mut pending = self.pending.clone();
        if let Some(i) = slot {
            pending.remove(i);
        }
        if let Some(e) = entry {
            let at = pending.partition_point(|x| *x < e);
            pending.insert(at, e);
        }
        ControlState { pending }
    }
}

/// Knobs that are part of the search rather than the grammar.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RegulatedOptions {
    /// Vector mode: cap on simultaneously open matrix copies.
    pub max_open: usize,
    /// Semi-matrix mode: streams per matrix.
    pub semi_streams: usize,
}

impl Default for RegulatedOptions {
    fn default() -> Self {
        RegulatedOptions {
            max_open: 8,
            semi_streams: 1,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegStep {
    pub rule: usize,
    pub pos: usize,
    pub matrix: u32,
    /// Position of `rule` inside the matrix.
    pub slot: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegState {
    pub form: SententialForm,
    pub control: ControlState,
}

impl AsForm for RegState {
    fn form(&self) -> &SententialForm {
        &self.form
    }
}

struct RegSpace<'a> {
    g: &'a RegulatedGrammar,
    filter: FormFilter<'a>,
    opts: RegulatedOptions,
    max_terminal_len: usize,
    cut: FormCut,
}

impl RegSpace<'_> {
    fn may_open(&self, control: &ControlState, m: u32) -> (bool, bool) {
        match self.g.mode {
            ControlMode::Matrix => (control.is_empty(), false),
            ControlMode::Vector => {
                let ok = control.pending.len() < self.opts.max_open;
                (ok, !ok)
            }
            ControlMode::SemiMatrix => {
                let streams = control.pending.iter().filter(|(x, _)| *x == m).count();
                (streams < self.opts.semi_streams, false)
            }
        }
    }

    /// Applies rule `slot` of matrix `m` everywhere it fits.
    fn apply(
        &self,
        s: &RegState,
        m: u32,
        slot: u32,
        from: Option<usize>,
        out: &mut Vec<(RegStep, RegState)>,
    ) -> bool {
        let matrix = &self.g.matrices[m as usize];
        let ri = matrix.rules[slot as usize];
        let r = self.g.base.rule(ri);
        let mut lossy = false;
        let next_slot = slot + 1;
        let entry = (next_slot < matrix.rules.len() as u32).then_some((m, next_slot));
        let mut control = None;
        for pos in s.form.occurrences(&r.lhs) {
            let next = apply_unchecked(&s.form, r, pos);
            if !self.filter.admits(&next) {
                continue;
            }
            if let Some(l) = self.cut.drop(&next, self.max_terminal_len) {
                lossy |= l;
                continue;
            }
            let c = control
                .get_or_insert_with(|| s.control.with_advanced(from, entry))
                .clone();
            out.push((
                RegStep {
                    rule: ri,
                    pos,
                    matrix: m,
                    slot,
                },
                RegState {
                    form: next,
                    control: c,
                },
            ));
        }
        lossy
    }
}

impl Space for RegSpace<'_> {
    type State = RegState;
    type Edge = RegStep;

    fn expand(&self, s: &RegState, out: &mut Vec<(RegStep, RegState)>) -> bool {
        let mut lossy = false;
        // continue a pending copy; equal entries are interchangeable
        let mut prev = None;
        for (i, &(m, slot)) in s.control.pending.iter().enumerate() {
            if prev == Some((m, slot)) {
                continue;
            }
            prev = Some((m, slot));
            lossy |= self.apply(s, m, slot, Some(i), out);
        }
        for m in 0..self.g.matrices.len() as u32 {
            let first = self.g.base.rule(self.g.matrices[m as usize].rules[0]);
            if s.form.occurrences(&first.lhs).next().is_none() {
                continue;
            }
            let (ok, capped) = self.may_open(&s.control, m);
            if ok {
                lossy |= self.apply(s, m, 0, None, out);
            } else if capped {
                let mut probe = Vec::new();
                self.apply(s, m, 0, None, &mut probe);
                lossy |= !probe.is_empty();
            }
        }
        lossy
    }
}

/// A regulated derivation: steps plus forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegDerivation {
    pub steps: Vec<RegStep>,
    pub forms: Vec<SententialForm>,
}

impl RegDerivation {
    pub fn index(&self) -> usize {
        self.forms
            .iter()
            .map(SententialForm::nonterminal_count)
            .max()
            .unwrap_or(0)
    }

    pub fn labels<'g>(&self, g: &'g RegulatedGrammar) -> Vec<&'g str> {
        self.steps
            .iter()
            .map(|s| g.base.rule(s.rule).label.as_str())
            .collect()
    }
}

pub struct RegulatedEnumeration {
    explored: Explored<RegState, RegStep>,
    accepted: BTreeMap<Word, usize>,
}

impl RegulatedEnumeration {
    pub fn word_list(&self) -> Vec<Word> {
        self.accepted.keys().cloned().collect()
    }

    pub fn exhaustive(&self) -> bool {
        self.explored.exhaustive
    }

    pub fn explored_states(&self) -> usize {
        self.explored.len()
    }

    pub fn states(&self) -> impl Iterator<Item = &RegState> + '_ {
        self.explored.states()
    }

    pub fn fragment(&self) -> crate::derive::Fragment {
        crate::derive::Fragment {
            words: self.word_list(),
            exhaustive: self.exhaustive(),
        }
    }

    pub fn witness(&self, w: &Word) -> Option<RegDerivation> {
        let &i = self.accepted.get(w)?;
        let (steps, nodes) = self.explored.path_to(i);
        Some(RegDerivation {
            steps,
            forms: nodes
                .into_iter()
                .map(|n| self.explored.state(n).form.clone())
                .collect(),
        })
    }
}

fn run(
    g: &RegulatedGrammar,
    filter: FormFilter<'_>,
    b: &SearchBudget,
    opts: RegulatedOptions,
) -> Result<RegulatedEnumeration, RegulatedError> {
    b.check()?;
    let space = RegSpace {
        g,
        filter,
        opts,
        max_terminal_len: b.max_terminal_len,
        cut: b.form_cut(&g.base, filter.nonterminal_bound()),
    };
    let root = RegState {
        form: SententialForm::start(&g.base),
        control: ControlState::default(),
    };
    let explored = explore(&space, root, b.limits(), |_| false);
    let accepted = collect_terminal(&explored, |s| s.form.is_terminal() && s.control.is_empty());
    Ok(RegulatedEnumeration { explored, accepted })
}

fn own_filter(g: &RegulatedGrammar) -> FormFilter<'_> {
    match &g.restriction {
        Restriction::None => FormFilter {
            capacity: None,
            index: None,
        },
        Restriction::Capacity(k) => FormFilter {
            capacity: Some(k),
            index: None,
        },
        Restriction::Index(k) => FormFilter {
            capacity: None,
            index: Some(*k),
        },
    }
}

/// One-step successors of `(w, cs)` under the grammar's control mode and
/// restriction.
pub fn regulated_successors(
    w: &SententialForm,
    cs: &ControlState,
    g: &RegulatedGrammar,
    opts: RegulatedOptions,
) -> Vec<(RegStep, SententialForm, ControlState)> {
    let space = RegSpace {
        g,
        filter: own_filter(g),
        opts,
        max_terminal_len: usize::MAX,
        cut: FormCut {
            limit: usize::MAX,
            lossless: true,
        },
    };
    let mut out = Vec::new();
    space.expand(
        &RegState {
            form: w.clone(),
            control: cs.clone(),
        },
        &mut out,
    );
    out.into_iter()
        .map(|(s, st)| (s, st.form, st.control))
        .collect()
}

/// Terminal words of bounded length reachable with no pending control.
pub fn enumerate_regulated(
    g: &RegulatedGrammar,
    b: &SearchBudget,
    opts: RegulatedOptions,
) -> Result<RegulatedEnumeration, RegulatedError> {
    run(g, own_filter(g), b, opts)
}

#[derive(Clone, Debug)]
pub struct IndexCheck {
    pub holds: bool,
    pub exhaustive: bool,
    /// A word whose every derivation found exceeds the bound, with one of them.
    pub counterexample: Option<(Word, RegDerivation)>,
}

/// Whether every enumerated word has a derivation of index ≤ `k`.
pub fn check_index_bound(
    g: &RegulatedGrammar,
    k: usize,
    b: &SearchBudget,
    opts: RegulatedOptions,
) -> Result<IndexCheck, RegulatedError> {
    let all = run(g, own_filter(g), b, opts)?;
    let mut bounded_filter = own_filter(g);
    bounded_filter.index = Some(bounded_filter.index.map_or(k, |j| j.min(k)));
    let bounded = run(g, bounded_filter, b, opts)?;
    let counterexample = all
        .accepted
        .keys()
        .find(|w| !bounded.accepted.contains_key(w))
        .map(|w| (w.clone(), all.witness(w).expect("accepted word has a witness")));
    Ok(IndexCheck {
        holds: counterexample.is_none(),
        exhaustive: all.exhaustive() && bounded.exhaustive(),
        counterexample,
    })
}

/// Checks that a step sequence is a valid interleaving of matrix copies:
/// every step continues an open copy of its matrix at the right slot, and
/// nothing is left open at the end.
pub fn is_valid_interleaving(g: &RegulatedGrammar, steps: &[RegStep]) -> bool {
    let mut open: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for s in steps {
        let m = &g.matrices[s.matrix as usize];
        if m.rules.get(s.slot as usize) != Some(&s.rule) {
            return false;
        }
        if s.slot > 0 {
            match open.get_mut(&(s.matrix, s.slot)) {
                Some(n) if *n > 0 => *n -= 1,
                _ => return false,
            }
        }
        if (s.slot as usize) + 1 < m.rules.len() {
            *open.entry((s.matrix, s.slot + 1)).or_default() += 1;
        }
    }
    open.values().all(|&n| n == 0)
}
