//! Capacity-respecting derivation search over plain grammars.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::GrammarError;
use crate::grammar::{apply_unchecked, capacity_ok, CapacityFunction, Grammar, SententialForm, Sym};
use crate::search::{explore, Explored, Limits, Parallelism, Space};

/// A terminal word, ordered by length and then lexicographically by the
/// declared terminal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Sym>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_terminal_len: usize,
    /// Cut on total form length; `None` picks a default from the grammar.
    pub max_form_len: Option<usize>,
    pub max_states: usize,
    pub dedupe: bool,
    pub parallelism: Parallelism,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_terminal_len: 10,
            max_form_len: None,
            max_states: 2_000_000,
            dedupe: true,
            parallelism: Parallelism::default(),
        }
    }
}

impl SearchBudget {
    pub fn with_max_len(max_terminal_len: usize) -> SearchBudget {
        SearchBudget {
            max_terminal_len,
            ..SearchBudget::default()
        }
    }

    pub fn check(&self) -> Result<(), GrammarError> {
        match self.max_form_len {
            Some(f) if f < self.max_terminal_len => Err(GrammarError::Budget {
                form: f,
                terminal: self.max_terminal_len,
            }),
            _ => Ok(()),
        }
    }

    pub(crate) fn limits(&self) -> Limits {
        Limits {
            max_states: self.max_states,
            dedupe: self.dedupe,
            parallelism: self.parallelism,
        }
    }

    /// Form-length cut and whether cutting there can lose words.
    ///
    /// `nonterminal_bound` is a proven bound on `|β|_V` (from capacities or
    /// an index restriction); with it the default cut never fires.
    pub(crate) fn form_cut(&self, g: &Grammar, nonterminal_bound: Option<usize>) -> FormCut {
        let l = self.max_terminal_len;
        if let Some(limit) = self.max_form_len {
            let lossless = g.is_non_contracting()
                || nonterminal_bound.is_some_and(|b| limit >= l + b);
            return FormCut { limit, lossless };
        }
        match nonterminal_bound {
            Some(b) => FormCut {
                limit: l + b,
                lossless: true,
            },
            None if g.is_non_contracting() => FormCut {
                limit: l,
                lossless: true,
            },
            None => FormCut {
                limit: l + 2 * g.nonterminal_count() + 1,
                lossless: false,
            },
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub(crate) struct FormCut {
    pub limit: usize,
    /// A non-contracting grammar never shrinks forms, so forms longer than
    /// the word bound are dead anyway.
    pub lossless: bool,
}

impl FormCut {
    /// `Some(lossy)` when the form must be dropped.
    #[inline]
    pub fn drop(&self, w: &SententialForm, max_terminal_len: usize) -> Option<bool> {
        if w.terminal_count() > max_terminal_len {
            Some(false)
        } else if w.len() > self.limit {
            Some(!self.lossless)
        } else {
            None
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub rule: usize,
    pub pos: usize,
}

/// A derivation `S ⇒ … ⇒ w` with its forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
    pub forms: Vec<SententialForm>,
}

impl Derivation {
    pub fn labels<'g>(&self, g: &'g Grammar) -> Vec<&'g str> {
        self.steps.iter().map(|s| g.rule(s.rule).label.as_str()).collect()
    }

    /// Replays the steps from `S`, checking every form against `k`.
    pub fn replay(&self, g: &Grammar, k: &CapacityFunction) -> Result<SententialForm, ReplayError> {
        replay_steps(g, k, &self.steps)
    }

    pub fn index(&self) -> usize {
        self.forms
            .iter()
            .map(SententialForm::nonterminal_count)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    Mismatch { step: usize },
    Capacity { step: usize },
}

/// Replays `(rule, pos)` steps from the start symbol.
pub fn replay_steps(
    g: &Grammar,
    k: &CapacityFunction,
    steps: &[Step],
) -> Result<SententialForm, ReplayError> {
    let mut w = SententialForm::start(g);
    for (i, s) in steps.iter().enumerate() {
        w = crate::grammar::apply_rule_at(&w, g, s.rule, s.pos)
            .map_err(|_| ReplayError::Mismatch { step: i + 1 })?;
        if !capacity_ok(&w, k) {
            return Err(ReplayError::Capacity { step: i + 1 });
        }
    }
    Ok(w)
}

/// One-step successors that stay within `k`, in rule order then position.
pub fn successors(
    w: &SententialForm,
    g: &Grammar,
    k: &CapacityFunction,
) -> Vec<(usize, usize, SententialForm)> {
    let mut out = Vec::new();
    for (ri, r) in g.rules().iter().enumerate() {
        if !w.fits_after(r, k) {
            continue;
        }
        for pos in w.occurrences(&r.lhs) {
            out.push((ri, pos, apply_unchecked(w, r, pos)));
        }
    }
    out
}

struct GrammarSpace<'a> {
    g: &'a Grammar,
    k: &'a CapacityFunction,
    max_terminal_len: usize,
    cut: FormCut,
    /// Membership target: forms whose terminals are not a subsequence are dead.
    target: Option<&'a [Sym]>,
}

fn is_subsequence(needle: impl Iterator<Item = Sym>, hay: &[Sym]) -> bool {
    let mut it = hay.iter();
    needle.into_iter().all(|s| it.any(|&h| h == s))
}

impl Space for GrammarSpace<'_> {
    type State = SententialForm;
    type Edge = Step;

    fn expand(&self, w: &SententialForm, out: &mut Vec<(Step, SententialForm)>) -> bool {
        let mut lossy = false;
        for (ri, r) in self.g.rules().iter().enumerate() {
            if !w.fits_after(r, self.k) {
                continue;
            }
            for pos in w.occurrences(&r.lhs) {
                let next = apply_unchecked(w, r, pos);
                if let Some(l) = self.cut.drop(&next, self.max_terminal_len) {
                    lossy |= l;
                    continue;
                }
                if let Some(t) = self.target {
                    if r.terminals_produced() > 0
                        && !is_subsequence(next.symbols().iter().copied().filter(|s| s.is_terminal()), t)
                    {
                        continue;
                    }
                }
                out.push((Step { rule: ri, pos }, next));
            }
        }
        lossy
    }
}

/// Words of a bounded-length language fragment, with witnesses.
pub struct Enumeration {
    explored: Explored<SententialForm, Step>,
    accepted: BTreeMap<Word, usize>,
}

impl Enumeration {
    pub fn words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.accepted.keys()
    }

    pub fn word_list(&self) -> Vec<Word> {
        self.accepted.keys().cloned().collect()
    }

    pub fn exhaustive(&self) -> bool {
        self.explored.exhaustive
    }

    pub fn explored_states(&self) -> usize {
        self.explored.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.accepted.contains_key(w)
    }

    /// Every explored sentential form.
    pub fn forms(&self) -> impl Iterator<Item = &SententialForm> + '_ {
        self.explored.states()
    }

    /// A shortest derivation of `w` found by the search.
    pub fn witness(&self, w: &Word) -> Option<Derivation> {
        let &i = self.accepted.get(w)?;
        Some(derivation_to(&self.explored, i))
    }

    pub fn fragment(&self) -> Fragment {
        Fragment {
            words: self.word_list(),
            exhaustive: self.exhaustive(),
        }
    }
}

fn derivation_to(ex: &Explored<SententialForm, Step>, i: usize) -> Derivation {
    let (steps, nodes) = ex.path_to(i);
    Derivation {
        steps,
        forms: nodes.into_iter().map(|n| ex.state(n).clone()).collect(),
    }
}

/// A sorted word list plus whether the search that produced it closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub words: Vec<Word>,
    pub exhaustive: bool,
}

impl Fragment {
    pub fn render(&self, g: &Grammar) -> Vec<String> {
        self.words.iter().map(|w| render_word(g, w)).collect()
    }
}

/// λ renders as `(empty)`.
pub fn render_word(g: &Grammar, w: &Word) -> String {
    if w.is_empty() {
        "(empty)".to_owned()
    } else {
        g.render(&w.0)
    }
}

/// All words of length ≤ `max_terminal_len` derivable under `k`.
pub fn enumerate_language(
    g: &Grammar,
    k: &CapacityFunction,
    b: &SearchBudget,
) -> Result<Enumeration, GrammarError> {
    b.check()?;
    if !k.matches(g) {
        return Err(GrammarError::CapacityMismatch);
    }
    let bound = k.is_all_finite().then(|| k.finite_total());
    let space = GrammarSpace {
        g,
        k,
        max_terminal_len: b.max_terminal_len,
        cut: b.form_cut(g, bound),
        target: None,
    };
    let root = SententialForm::start(g);
    let explored = explore(&space, root, b.limits(), |_| false);
    let accepted = collect_terminal(&explored, |w| w.is_terminal());
    Ok(Enumeration { explored, accepted })
}

pub(crate) fn collect_terminal<S: Clone + Eq + std::hash::Hash + AsForm, E: Clone>(
    explored: &Explored<S, E>,
    word_of: impl Fn(&S) -> bool,
) -> BTreeMap<Word, usize> {
    let mut accepted = BTreeMap::new();
    for i in 0..explored.len() {
        let s = explored.state(i);
        if word_of(s) {
            accepted
                .entry(Word(s.form().symbols().to_vec()))
                .or_insert(i);
        }
    }
    accepted
}

/// Search states that carry a sentential form.
pub(crate) trait AsForm {
    fn form(&self) -> &SententialForm;
}

impl AsForm for SententialForm {
    fn form(&self) -> &SententialForm {
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(Derivation),
    NonMember,
    /// The budget ran out before the search closed.
    Unknown,
}

/// Decides `word ∈ L(g, k)`, with a witness when it is.
pub fn decide_membership(
    word: &[Sym],
    g: &Grammar,
    k: &CapacityFunction,
    b: &SearchBudget,
) -> Result<Membership, GrammarError> {
    if let Some(&s) = word
        .iter()
        .find(|s| !s.is_terminal() || s.index() >= g.terminal_count())
    {
        let name = if s.is_terminal() && s.index() >= g.terminal_count() {
            format!("#{}", s.index())
        } else {
            g.name(s).to_owned()
        };
        return Err(GrammarError::UndeclaredSymbol(name));
    }
    if !k.matches(g) {
        return Err(GrammarError::CapacityMismatch);
    }
    let budget = SearchBudget {
        max_terminal_len: word.len(),
        max_form_len: b.max_form_len.map(|f| f.max(word.len())),
        ..b.clone()
    };
    let bound = k.is_all_finite().then(|| k.finite_total());
    let space = GrammarSpace {
        g,
        k,
        max_terminal_len: word.len(),
        cut: budget.form_cut(g, bound),
        target: Some(word),
    };
    let explored = explore(&space, SententialForm::start(g), budget.limits(), |w| {
        w.symbols() == word
    });
    Ok(match explored.stopped_at {
        Some(i) => Membership::Member(derivation_to(&explored, i)),
        None if explored.exhaustive => Membership::NonMember,
        None => Membership::Unknown,
    })
}

/// Concatenation of literal and starred-literal terminal atoms, such as
/// `a*ccb*a*cb*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePattern {
    atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Atom {
    literal: String,
    starred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternError(pub String);

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad pattern: {}", self.0)
    }
}

impl std::error::Error for PatternError {}

impl SimplePattern {
    /// Parses either a compact pattern of one-character literals
    /// (`a*ccb*`) or whitespace-separated tokens (`x* yy z`).
    pub fn parse(text: &str) -> Result<SimplePattern, PatternError> {
        let mut atoms = Vec::new();
        if text.trim().contains(char::is_whitespace) {
            for tok in text.split_whitespace() {
                let (lit, starred) = match tok.strip_suffix('*') {
                    Some(l) => (l, true),
                    None => (tok, false),
                };
                if lit.is_empty() || lit.contains('*') {
                    return Err(PatternError(format!("bad atom `{tok}`")));
                }
                atoms.push(Atom {
                    literal: lit.to_owned(),
                    starred,
                });
            }
        } else {
            for c in text.trim().chars() {
                if c == '*' {
                    match atoms.last_mut() {
                        Some(a @ Atom { starred: false, .. }) => a.starred = true,
                        _ => return Err(PatternError("`*` without a literal".into())),
                    }
                } else {
                    atoms.push(Atom {
                        literal: c.to_string(),
                        starred: false,
                    });
                }
            }
        }
        Ok(SimplePattern { atoms })
    }

    pub fn matches<T: AsRef<str>>(&self, word: &[T]) -> bool {
        // reachable[j]: some prefix of the atoms consumed exactly word[..j]
        let n = word.len();
        let mut reachable = vec![false; n + 1];
        reachable[0] = true;
        for atom in &self.atoms {
            let mut next = vec![false; n + 1];
            for j in 0..=n {
                if !reachable[j] {
                    continue;
                }
                if atom.starred {
                    next[j] = true;
                    let mut k = j;
                    while k < n && word[k].as_ref() == atom.literal {
                        k += 1;
                        next[k] = true;
                    }
                } else if j < n && word[j].as_ref() == atom.literal {
                    next[j + 1] = true;
                }
            }
            reachable = next;
        }
        reachable[n]
    }
}

/// Keeps the words matching `p`, preserving order.
pub fn filter_pattern(g: &Grammar, words: &[Word], p: &SimplePattern) -> Vec<Word> {
    words
        .iter()
        .filter(|w| {
            let names: Vec<&str> = w.0.iter().map(|&s| g.name(s)).collect();
            p.matches(&names)
        })
        .cloned()
        .collect()
}
