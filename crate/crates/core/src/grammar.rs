//! Phrase-structure grammars with nonterminal-string left sides, capacity
//! functions and sentential forms.
//!
//! Symbols are interned per grammar. A [`Sym`] carries its kind in the high
//! bit, so sentential forms can be inspected without the owning grammar.
//! Nonterminals and terminals are numbered in declaration order, which also
//! fixes the lexicographic order used when listing words.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::GrammarError;

const TERMINAL_BIT: u32 = 1 << 31;

/// An interned grammar symbol.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

impl Sym {
    pub const fn nonterminal(index: usize) -> Sym {
        Sym(index as u32)
    }

    pub const fn terminal(index: usize) -> Sym {
        Sym(index as u32 | TERMINAL_BIT)
    }

    #[inline]
    pub const fn is_terminal(self) -> bool {
        self.0 & TERMINAL_BIT != 0
    }

    #[inline]
    pub const fn is_nonterminal(self) -> bool {
        !self.is_terminal()
    }

    /// Position within the symbol's own alphabet.
    #[inline]
    pub const fn index(self) -> usize {
        (self.0 & !TERMINAL_BIT) as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Nonterminal,
    Terminal,
}

/// Upper bound on a count: a positive number or no bound at all.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(u32),
    Unbounded,
}

impl Bound {
    #[inline]
    pub fn admits(self, count: u32) -> bool {
        match self {
            Bound::Finite(k) => count <= k,
            Bound::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Bound::Finite(k) => Some(k),
            Bound::Unbounded => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(k) => write!(f, "{k}"),
            Bound::Unbounded => f.write_str("*"),
        }
    }
}

/// A rewriting rule `lhs -> rhs` with `lhs` a nonempty nonterminal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub label: String,
    pub lhs: Vec<Sym>,
    pub rhs: Vec<Sym>,
    delta: Vec<(Sym, i32)>,
}

impl Rule {
    fn new(label: String, lhs: Vec<Sym>, rhs: Vec<Sym>) -> Rule {
        let mut net: Vec<(Sym, i32)> = Vec::new();
        let mut bump = |s: Sym, by: i32| {
            if s.is_terminal() {
                return;
            }
            match net.iter_mut().find(|(x, _)| *x == s) {
                Some((_, d)) => *d += by,
                None => net.push((s, by)),
            }
        };
        lhs.iter().for_each(|&s| bump(s, -1));
        rhs.iter().for_each(|&s| bump(s, 1));
        net.retain(|&(_, d)| d != 0);
        net.sort();
        Rule { label, lhs, rhs, delta: net }
    }

    /// Net change of each nonterminal's count when the rule is applied.
    pub fn delta(&self) -> &[(Sym, i32)] {
        &self.delta
    }

    pub fn is_erasing(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn terminals_produced(&self) -> usize {
        self.rhs.iter().filter(|s| s.is_terminal()).count()
    }
}

/// Unchecked, name-level description of a grammar.
///
/// This is what parsers and transformations produce; [`validate_grammar`]
/// reports everything wrong with it and [`GrammarSpec::build`] interns it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarSpec {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub start: String,
    pub rules: Vec<RuleSpec>,
    pub context_free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub label: String,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_owned).collect()
}

impl GrammarSpec {
    /// Starts a spec from whitespace-separated alphabets.
    pub fn new(nonterminals: &str, terminals: &str, start: &str) -> GrammarSpec {
        GrammarSpec {
            nonterminals: words(nonterminals),
            terminals: words(terminals),
            start: start.to_owned(),
            rules: Vec::new(),
            context_free: false,
        }
    }

    pub fn context_free(mut self, flag: bool) -> GrammarSpec {
        self.context_free = flag;
        self
    }

    /// Adds a rule; both sides are whitespace-separated symbol lists and an
    /// empty right side is λ.
    pub fn rule(mut self, label: &str, lhs: &str, rhs: &str) -> GrammarSpec {
        self.rules.push(RuleSpec {
            label: label.to_owned(),
            lhs: words(lhs),
            rhs: words(rhs),
        });
        self
    }

    /// Sets the context-free flag iff every left side is a single symbol.
    pub fn infer_context_free(mut self) -> GrammarSpec {
        self.context_free = self.rules.iter().all(|r| r.lhs.len() == 1);
        self
    }

    pub fn build(&self) -> Result<Grammar, GrammarError> {
        let report = validate_grammar(self);
        if !report.is_empty() {
            return Err(GrammarError::Invalid(report));
        }
        let mut index = HashMap::new();
        let mut names = Vec::new();
        for (i, n) in self.nonterminals.iter().enumerate() {
            index.insert(n.clone(), Sym::nonterminal(i));
            names.push(n.clone());
        }
        let mut terminal_names = Vec::new();
        for (i, t) in self.terminals.iter().enumerate() {
            index.insert(t.clone(), Sym::terminal(i));
            terminal_names.push(t.clone());
        }
        let resolve = |xs: &[String]| xs.iter().map(|x| index[x]).collect::<Vec<_>>();
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .map(|r| Rule::new(r.label.clone(), resolve(&r.lhs), resolve(&r.rhs)))
            .collect();
        let rule_index = rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.label.clone(), i))
            .collect();
        Ok(Grammar {
            nonterminal_names: names,
            terminal_names,
            start: index[&self.start],
            index,
            rules,
            rule_index,
            context_free: self.context_free,
        })
    }
}

/// One reason a [`GrammarSpec`] is not a well-formed grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateSymbol(String),
    SharedSymbol(String),
    EmptySymbolName,
    StartNotNonterminal(String),
    DuplicateLabel(String),
    EmptyLhs(String),
    TerminalInLhs { label: String, symbol: String },
    LhsTooLong { label: String, len: usize },
    UndeclaredSymbol { label: String, symbol: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateSymbol(s) => write!(f, "symbol `{s}` declared twice"),
            Violation::SharedSymbol(s) => {
                write!(f, "`{s}` is both a nonterminal and a terminal")
            }
            Violation::EmptySymbolName => f.write_str("empty symbol name"),
            Violation::StartNotNonterminal(s) => {
                write!(f, "start symbol `{s}` is not a declared nonterminal")
            }
            Violation::DuplicateLabel(l) => write!(f, "rule label `{l}` used twice"),
            Violation::EmptyLhs(l) => write!(f, "rule {l}: empty lhs"),
            Violation::TerminalInLhs { label, symbol } => {
                write!(f, "rule {label}: terminal in lhs (`{symbol}`)")
            }
            Violation::LhsTooLong { label, len } => {
                write!(f, "rule {label}: lhs length > 1 ({len}) in a context-free grammar")
            }
            Violation::UndeclaredSymbol { label, symbol } => {
                write!(f, "rule {label}: undeclared symbol `{symbol}`")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collects every well-formedness violation of `spec`.
pub fn validate_grammar(spec: &GrammarSpec) -> ValidationReport {
    let mut out = Vec::new();
    let mut nts = HashSet::new();
    for n in &spec.nonterminals {
        if n.is_empty() {
            out.push(Violation::EmptySymbolName);
        } else if !nts.insert(n.as_str()) {
            out.push(Violation::DuplicateSymbol(n.clone()));
        }
    }
    let mut ts = HashSet::new();
    for t in &spec.terminals {
        if t.is_empty() {
            out.push(Violation::EmptySymbolName);
        } else if !ts.insert(t.as_str()) {
            out.push(Violation::DuplicateSymbol(t.clone()));
        }
        if nts.contains(t.as_str()) {
            out.push(Violation::SharedSymbol(t.clone()));
        }
    }
    if !nts.contains(spec.start.as_str()) {
        out.push(Violation::StartNotNonterminal(spec.start.clone()));
    }
    let mut labels = HashSet::new();
    for r in &spec.rules {
        if !labels.insert(r.label.as_str()) {
            out.push(Violation::DuplicateLabel(r.label.clone()));
        }
        if r.lhs.is_empty() {
            out.push(Violation::EmptyLhs(r.label.clone()));
        }
        if spec.context_free && r.lhs.len() > 1 {
            out.push(Violation::LhsTooLong {
                label: r.label.clone(),
                len: r.lhs.len(),
            });
        }
        for s in &r.lhs {
            if ts.contains(s.as_str()) {
                out.push(Violation::TerminalInLhs {
                    label: r.label.clone(),
                    symbol: s.clone(),
                });
            } else if !nts.contains(s.as_str()) {
                out.push(Violation::UndeclaredSymbol {
                    label: r.label.clone(),
                    symbol: s.clone(),
                });
            }
        }
        for s in &r.rhs {
            if !nts.contains(s.as_str()) && !ts.contains(s.as_str()) {
                out.push(Violation::UndeclaredSymbol {
                    label: r.label.clone(),
                    symbol: s.clone(),
                });
            }
        }
    }
    ValidationReport { violations: out }
}

/// A validated, interned grammar `(V, Σ, S, R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    nonterminal_names: Vec<String>,
    terminal_names: Vec<String>,
    index: HashMap<String, Sym>,
    start: Sym,
    rules: Vec<Rule>,
    rule_index: HashMap<String, usize>,
    context_free: bool,
}

impl Grammar {
    pub fn start(&self) -> Sym {
        self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn rule_by_label(&self, label: &str) -> Option<usize> {
        self.rule_index.get(label).copied()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminal_names.len()
    }

    pub fn terminal_count(&self) -> usize {
        self.terminal_names.len()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.nonterminal_names.len()).map(Sym::nonterminal)
    }

    pub fn terminals(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.terminal_names.len()).map(Sym::terminal)
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn name(&self, s: Sym) -> &str {
        if s.is_terminal() {
            &self.terminal_names[s.index()]
        } else {
            &self.nonterminal_names[s.index()]
        }
    }

    pub fn kind(&self, s: Sym) -> SymbolKind {
        if s.is_terminal() {
            SymbolKind::Terminal
        } else {
            SymbolKind::Nonterminal
        }
    }

    pub fn is_context_free(&self) -> bool {
        self.context_free
    }

    pub fn has_erasing_rules(&self) -> bool {
        self.rules.iter().any(Rule::is_erasing)
    }

    /// True when no rule shortens a sentential form.
    pub fn is_non_contracting(&self) -> bool {
        self.rules.iter().all(|r| r.rhs.len() >= r.lhs.len())
    }

    /// Resolves whitespace-separated names to symbols.
    pub fn parse_symbols(&self, text: &str) -> Result<Vec<Sym>, GrammarError> {
        text.split_whitespace()
            .map(|t| {
                self.sym(t)
                    .ok_or_else(|| GrammarError::UndeclaredSymbol(t.to_owned()))
            })
            .collect()
    }

    /// Resolves a terminal word. Single-character terminals may be written
    /// without separators (`aabb`); otherwise tokens are whitespace-separated.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>, GrammarError> {
        let text = text.trim();
        let tokens: Vec<String> = if text.contains(char::is_whitespace) || !self.single_char_terminals()
        {
            words(text)
        } else {
            text.chars().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| match self.sym(t) {
                Some(s) if s.is_terminal() => Ok(s),
                _ => Err(GrammarError::UndeclaredSymbol(t.clone())),
            })
            .collect()
    }

    fn single_char_terminals(&self) -> bool {
        self.terminal_names.iter().all(|t| t.chars().count() == 1)
    }

    /// Renders a string of symbols; names are concatenated when every
    /// terminal is one character and no nonterminal occurs, space-separated
    /// otherwise.
    pub fn render(&self, symbols: &[Sym]) -> String {
        let compact =
            self.single_char_terminals() && symbols.iter().all(|s| s.is_terminal());
        let sep = if compact { "" } else { " " };
        symbols
            .iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn to_spec(&self) -> GrammarSpec {
        let names = |xs: &[Sym]| xs.iter().map(|&s| self.name(s).to_owned()).collect();
        GrammarSpec {
            nonterminals: self.nonterminal_names.clone(),
            terminals: self.terminal_names.clone(),
            start: self.name(self.start).to_owned(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleSpec {
                    label: r.label.clone(),
                    lhs: names(&r.lhs),
                    rhs: names(&r.rhs),
                })
                .collect(),
            context_free: self.context_free,
        }
    }

    /// Copy of this grammar with a different context-free flag, revalidated.
    pub fn with_context_free(&self, flag: bool) -> Result<Grammar, GrammarError> {
        self.to_spec().context_free(flag).build()
    }
}

/// Per-nonterminal capacity κ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CapacityFunction {
    bounds: Vec<Bound>,
}

impl CapacityFunction {
    pub fn new(bounds: Vec<Bound>) -> Result<CapacityFunction, GrammarError> {
        if bounds.contains(&Bound::Finite(0)) {
            return Err(GrammarError::ZeroCapacity);
        }
        Ok(CapacityFunction { bounds })
    }

    /// The capacity 𝟏.
    pub fn one(g: &Grammar) -> CapacityFunction {
        CapacityFunction {
            bounds: vec![Bound::Finite(1); g.nonterminal_count()],
        }
    }

    pub fn constant(g: &Grammar, k: u32) -> Result<CapacityFunction, GrammarError> {
        CapacityFunction::new(vec![Bound::Finite(k); g.nonterminal_count()])
    }

    pub fn unbounded(g: &Grammar) -> CapacityFunction {
        CapacityFunction {
            bounds: vec![Bound::Unbounded; g.nonterminal_count()],
        }
    }

    /// Builds κ from named entries; nonterminals not mentioned are unbounded.
    pub fn from_named<'a>(
        g: &Grammar,
        entries: impl IntoIterator<Item = (&'a str, Bound)>,
    ) -> Result<CapacityFunction, GrammarError> {
        let mut bounds = vec![Bound::Unbounded; g.nonterminal_count()];
        for (name, b) in entries {
            match g.sym(name) {
                Some(s) if s.is_nonterminal() => bounds[s.index()] = b,
                _ => return Err(GrammarError::UndeclaredSymbol(name.to_owned())),
            }
        }
        CapacityFunction::new(bounds)
    }

    pub fn get(&self, a: Sym) -> Bound {
        self.bounds[a.index()]
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn is_all_finite(&self) -> bool {
        self.bounds.iter().all(|b| matches!(b, Bound::Finite(_)))
    }

    pub fn is_one(&self) -> bool {
        self.bounds.iter().all(|&b| b == Bound::Finite(1))
    }

    pub fn is_unbounded(&self) -> bool {
        self.bounds.iter().all(|&b| b == Bound::Unbounded)
    }

    /// Σ κ(A) over the finite entries.
    pub fn finite_total(&self) -> usize {
        self.bounds.iter().filter_map(|b| b.finite()).map(|k| k as usize).sum()
    }

    pub fn matches(&self, g: &Grammar) -> bool {
        self.bounds.len() == g.nonterminal_count()
    }
}

/// A string over `V ∪ Σ` with cached occurrence counts.
#[derive(Clone, Debug)]
pub struct SententialForm {
    symbols: Vec<Sym>,
    counts: Vec<u32>,
    terminals: usize,
}

impl PartialEq for SententialForm {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for SententialForm {}

impl std::hash::Hash for SententialForm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state)
    }
}

impl SententialForm {
    pub fn new(g: &Grammar, symbols: Vec<Sym>) -> SententialForm {
        SententialForm::with_alphabet(g.nonterminal_count(), symbols)
    }

    pub fn with_alphabet(nonterminals: usize, symbols: Vec<Sym>) -> SententialForm {
        let mut counts = vec![0u32; nonterminals];
        let mut terminals = 0;
        for s in &symbols {
            if s.is_terminal() {
                terminals += 1;
            } else {
                counts[s.index()] += 1;
            }
        }
        SententialForm {
            symbols,
            counts,
            terminals,
        }
    }

    /// The one-symbol form `S`.
    pub fn start(g: &Grammar) -> SententialForm {
        SententialForm::new(g, vec![g.start()])
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Sym> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `|w|_A`.
    pub fn count(&self, a: Sym) -> u32 {
        self.counts[a.index()]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `|w|_Σ`.
    pub fn terminal_count(&self) -> usize {
        self.terminals
    }

    /// `|w|_V`.
    pub fn nonterminal_count(&self) -> usize {
        self.symbols.len() - self.terminals
    }

    pub fn is_terminal(&self) -> bool {
        self.terminals == self.symbols.len()
    }

    /// Positions at which `pattern` occurs.
    pub fn occurrences<'a>(&'a self, pattern: &'a [Sym]) -> impl Iterator<Item = usize> + 'a {
        let n = pattern.len();
        let last = (self.symbols.len() + 1).saturating_sub(n.max(1));
        (0..last).filter(move |&i| n > 0 && self.symbols[i..i + n] == *pattern)
    }

    /// Whether applying `rule` keeps every count within `k`.
    #[inline]
    pub fn fits_after(&self, rule: &Rule, k: &CapacityFunction) -> bool {
        rule.delta().iter().all(|&(a, d)| {
            d < 0 || k.get(a).admits((self.counts[a.index()] as i64 + d as i64) as u32)
        })
    }

    /// Rewrites without checking that the lhs occurs at `pos`.
    fn splice(&self, rule: &Rule, pos: usize) -> SententialForm {
        let mut symbols = Vec::with_capacity(self.symbols.len() + rule.rhs.len() - rule.lhs.len());
        symbols.extend_from_slice(&self.symbols[..pos]);
        symbols.extend_from_slice(&rule.rhs);
        symbols.extend_from_slice(&self.symbols[pos + rule.lhs.len()..]);
        let mut counts = self.counts.clone();
        for &(a, d) in rule.delta() {
            counts[a.index()] = (counts[a.index()] as i64 + d as i64) as u32;
        }
        SententialForm {
            symbols,
            counts,
            terminals: self.terminals + rule.terminals_produced(),
        }
    }
}

/// `x₁ u x₂ ⇒ x₁ v x₂` for `rule = u → v` at `pos`. The input is untouched.
pub fn apply_rule_at(
    w: &SententialForm,
    g: &Grammar,
    rule: usize,
    pos: usize,
) -> Result<SententialForm, GrammarError> {
    let r = g.rule(rule);
    let end = pos + r.lhs.len();
    if end > w.len() || w.symbols[pos..end] != r.lhs[..] {
        return Err(GrammarError::LhsMismatch {
            label: r.label.clone(),
            pos,
        });
    }
    Ok(w.splice(r, pos))
}

/// Unchecked variant for search loops that already located the lhs.
pub(crate) fn apply_unchecked(w: &SententialForm, r: &Rule, pos: usize) -> SententialForm {
    debug_assert_eq!(&w.symbols[pos..pos + r.lhs.len()], &r.lhs[..]);
    w.splice(r, pos)
}

/// `|w|_A ≤ κ(A)` for all `A`.
pub fn capacity_ok(w: &SententialForm, k: &CapacityFunction) -> bool {
    w.counts
        .iter()
        .zip(k.bounds())
        .all(|(&c, &b)| b.admits(c))
}

/// `x₁ β₁ x₂ … xₙ βₙ xₙ₊₁`: terminal gaps around maximal nonterminal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// `n + 1` terminal strings; all but the first and last are nonempty.
    pub gaps: Vec<Vec<Sym>>,
    /// `n` nonempty nonterminal strings.
    pub blocks: Vec<Vec<Sym>>,
}

impl BlockDecomposition {
    pub fn concat(&self) -> Vec<Sym> {
        let mut out = self.gaps[0].clone();
        for (b, x) in self.blocks.iter().zip(&self.gaps[1..]) {
            out.extend_from_slice(b);
            out.extend_from_slice(x);
        }
        out
    }
}

pub fn decompose_blocks(w: &[Sym]) -> BlockDecomposition {
    let mut gaps = vec![Vec::new()];
    let mut blocks: Vec<Vec<Sym>> = Vec::new();
    let mut in_block = false;
    for &s in w {
        if s.is_nonterminal() {
            if !in_block {
                blocks.push(Vec::new());
                in_block = true;
            }
            blocks.last_mut().unwrap().push(s);
        } else {
            if in_block {
                gaps.push(Vec::new());
                in_block = false;
            }
            gaps.last_mut().unwrap().push(s);
        }
    }
    if in_block {
        gaps.push(Vec::new());
    }
    BlockDecomposition { gaps, blocks }
}

/// Whether `b` follows from `a` by one application of some rule.
pub fn derives_in_one_step(g: &Grammar, a: &SententialForm, b: &SententialForm) -> bool {
    g.rules().iter().any(|r| {
        a.len() + r.rhs.len() == b.len() + r.lhs.len()
            && a.occurrences(&r.lhs).any(|p| apply_unchecked(a, r, p) == *b)
    })
}

/// Maximal `|β|_V` over the forms of a derivation.
pub fn derivation_index(g: &Grammar, forms: &[SententialForm]) -> Result<usize, GrammarError> {
    for (i, pair) in forms.windows(2).enumerate() {
        if !derives_in_one_step(g, &pair[0], &pair[1]) {
            return Err(GrammarError::NotAdjacent { index: i + 1 });
        }
    }
    Ok(forms
        .iter()
        .map(SententialForm::nonterminal_count)
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn form(g: &Grammar, text: &str) -> SententialForm {
        SententialForm::new(g, g.parse_symbols(text).unwrap())
    }

    fn spaced(s: &str) -> String {
        s.chars().map(String::from).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn example_grammar_is_valid() {
        let spec = fixtures::ex31_spec();
        assert!(validate_grammar(&spec).is_empty());
        let g = spec.build().unwrap();
        assert_eq!(g.nonterminal_count(), 7);
        assert_eq!(g.rules().len(), 12);
    }

    #[test]
    fn terminal_in_lhs_is_reported() {
        let spec = GrammarSpec::new("S A", "a", "S").rule("r1", "a A", "a");
        let report = validate_grammar(&spec);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::TerminalInLhs { symbol, .. } if symbol == "a"
        )));
        assert!(report.to_string().contains("terminal in lhs"));
    }

    #[test]
    fn long_lhs_in_context_free_grammar_is_reported() {
        let spec = GrammarSpec::new("S A B", "x", "S")
            .rule("r1", "A B", "x")
            .context_free(true);
        let report = validate_grammar(&spec);
        assert_eq!(report.violations.len(), 1);
        assert!(report.to_string().contains("lhs length > 1"));
        // same rules without the flag are fine
        assert!(validate_grammar(&spec.context_free(false)).is_empty());
    }

    #[test]
    fn structural_violations() {
        let spec = GrammarSpec::new("S S a", "a", "T")
            .rule("r", "", "a")
            .rule("r", "S", "z");
        let v = validate_grammar(&spec).violations;
        assert!(v.contains(&Violation::DuplicateSymbol("S".into())));
        assert!(v.contains(&Violation::SharedSymbol("a".into())));
        assert!(v.contains(&Violation::StartNotNonterminal("T".into())));
        assert!(v.contains(&Violation::DuplicateLabel("r".into())));
        assert!(v.contains(&Violation::EmptyLhs("r".into())));
        assert!(v.contains(&Violation::UndeclaredSymbol {
            label: "r".into(),
            symbol: "z".into()
        }));
    }

    #[test]
    fn apply_rule_examples() {
        let g = fixtures::ex31();
        let r2 = g.rule_by_label("r2").unwrap();
        let r3 = g.rule_by_label("r3").unwrap();
        let w = form(&g, "A B C D");
        let next = apply_rule_at(&w, &g, r2, 0).unwrap();
        assert_eq!(next, form(&g, "a E F b C D"));
        assert_eq!(w, form(&g, "A B C D"));
        let next = apply_rule_at(&next, &g, r3, 4).unwrap();
        assert_eq!(next, form(&g, "a E F b c A D"));
        assert!(matches!(
            apply_rule_at(&w, &g, r3, 0),
            Err(GrammarError::LhsMismatch { .. })
        ));
        assert!(apply_rule_at(&w, &g, r3, 3).is_err());
    }

    #[test]
    fn apply_rule_matches_string_splice() {
        // independent oracle: splice on plain strings
        let g = fixtures::ex31();
        let w = "aEFbCD";
        let (lhs, rhs) = ("CD", "cAD");
        let pos = w.find(lhs).unwrap();
        let expect = format!("{}{}{}", &w[..pos], rhs, &w[pos + lhs.len()..]);
        let got = apply_rule_at(&form(&g, &spaced(w)), &g, g.rule_by_label("r3").unwrap(), pos)
            .unwrap();
        assert_eq!(got, form(&g, &spaced(&expect)));
    }

    #[test]
    fn identity_rewrite() {
        let g = GrammarSpec::new("S A", "a", "S")
            .rule("id", "A", "A")
            .build()
            .unwrap();
        let w = form(&g, "a A a");
        assert_eq!(apply_rule_at(&w, &g, 0, 1).unwrap(), w);
    }

    #[test]
    fn capacity_examples() {
        let g = GrammarSpec::new("S A B", "b", "S").build().unwrap();
        let one = CapacityFunction::one(&g);
        assert!(!capacity_ok(&form(&g, "A A B b"), &one));
        let k = CapacityFunction::from_named(
            &g,
            [("A", Bound::Finite(2)), ("B", Bound::Finite(1)), ("S", Bound::Finite(1))],
        )
        .unwrap();
        assert!(capacity_ok(&form(&g, "A A B b"), &k));
        let ex = fixtures::ex31();
        assert!(capacity_ok(&form(&ex, "A B C D"), &CapacityFunction::one(&ex)));
        assert!(CapacityFunction::constant(&g, 0).is_err());
    }

    #[test]
    fn block_examples() {
        let g = GrammarSpec::new("A B C D", "a b c", "A").build().unwrap();
        let d = decompose_blocks(&g.parse_symbols("a A B b c C").unwrap());
        let names = |xs: &Vec<Vec<Sym>>| -> Vec<String> {
            xs.iter().map(|x| g.render(x)).collect()
        };
        assert_eq!(names(&d.gaps), vec!["a", "bc", ""]);
        assert_eq!(names(&d.blocks), vec!["A B", "C"]);

        let d = decompose_blocks(&g.parse_symbols("a b c").unwrap());
        assert!(d.blocks.is_empty());
        assert_eq!(names(&d.gaps), vec!["abc"]);

        let d = decompose_blocks(&g.parse_symbols("A B C D").unwrap());
        assert_eq!(names(&d.gaps), vec!["", ""]);
        assert_eq!(names(&d.blocks), vec!["A B C D"]);
    }

    #[test]
    fn index_of_short_derivations() {
        let g = fixtures::ex31();
        assert_eq!(derivation_index(&g, &[form(&g, "a b c")]).unwrap(), 0);
        let d = [form(&g, "S"), form(&g, "A B C D"), form(&g, "A B C")];
        assert_eq!(
            derivation_index(&g, &d),
            Err(GrammarError::NotAdjacent { index: 2 })
        );
    }

    #[test]
    fn counts_are_tracked_through_rewrites() {
        let g = fixtures::ex31();
        let mut w = SententialForm::start(&g);
        for (label, pos) in [("r1", 0), ("r2", 0), ("r3", 4), ("r4", 1)] {
            w = apply_rule_at(&w, &g, g.rule_by_label(label).unwrap(), pos).unwrap();
            let fresh = SententialForm::new(&g, w.symbols().to_vec());
            assert_eq!(w.counts(), fresh.counts());
            assert_eq!(w.terminal_count(), fresh.terminal_count());
        }
    }
}
