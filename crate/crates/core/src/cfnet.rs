//! cf Petri nets, their h/c/s extensions, and derivations controlled by them.
//!
//! In every net built here place `i` is labelled by nonterminal `i` and
//! transition `j` by rule `j`; control places of extended nets come after
//! the grammar places.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::derive::{FormCut, SearchBudget, Step, Word};
use crate::error::NetBuildError;
use crate::grammar::{apply_unchecked, Bound, CapacityFunction, Grammar, SententialForm, Sym};
use crate::petri::{
    validate_paths, CapacityAssignment, Marking, Node, PathKind, PathOptions, PathSpec, PetriNet,
};
use crate::search::{explore, Explored, Space};

/// `N = (P, T, F, φ, β, γ, ι)` for a context-free grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfNet {
    net: PetriNet,
    initial: Marking,
}

impl CfNet {
    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    /// ι: one token on the start place.
    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    /// β⁻¹(A).
    pub fn place(&self, a: Sym) -> usize {
        a.index()
    }

    /// γ⁻¹(r) for rule index `r`.
    pub fn transition(&self, rule: usize) -> usize {
        rule
    }

    /// β(p).
    pub fn label(&self, p: usize) -> Sym {
        Sym::nonterminal(p)
    }

    /// Reads back each rule's lhs and the nonterminal multiset of its rhs
    /// from arcs and weights.
    pub fn rule_shapes(&self) -> Vec<(Sym, Vec<(Sym, u32)>)> {
        (0..self.net.transitions().len())
            .map(|t| {
                let lhs = self.net.inputs(t)[0].0;
                let rhs = self
                    .net
                    .outputs(t)
                    .iter()
                    .map(|&(p, w)| (self.label(p), w))
                    .collect();
                (self.label(lhs), rhs)
            })
            .collect()
    }
}

/// Builds the cf Petri net of `g`.
pub fn build_cf_net(g: &Grammar) -> Result<CfNet, NetBuildError> {
    if !g.is_context_free() {
        return Err(NetBuildError::NotContextFree);
    }
    let places = g.nonterminals().map(|a| format!("p_{}", g.name(a))).collect();
    let transitions = g.rules().iter().map(|r| format!("t_{}", r.label)).collect();
    let mut net = PetriNet::new(places, transitions)?;
    for (t, r) in g.rules().iter().enumerate() {
        net.add_input(r.lhs[0].index(), t, 1)?;
        for &s in r.rhs.iter().filter(|s| s.is_nonterminal()) {
            net.add_output(t, s.index(), 1)?;
        }
    }
    let mut initial = net.zero_marking();
    initial.0[g.start().index()] = 1;
    Ok(CfNet { net, initial })
}

/// Place capacities `cap(β⁻¹(A)) = κ(A)`.
pub fn attach_capacity(cn: &CfNet, k: &CapacityFunction) -> Result<CapacityAssignment, NetBuildError> {
    if k.len() != cn.net.places().len() {
        return Err(NetBuildError::CapacityMismatch);
    }
    let mut caps = Vec::with_capacity(k.len());
    for (p, b) in k.bounds().iter().enumerate() {
        if *b == Bound::Unbounded {
            let name = &cn.net.places()[p];
            return Err(NetBuildError::UnboundedCapacity(
                name.strip_prefix("p_").unwrap_or(name).to_owned(),
            ));
        }
        caps.push(*b);
    }
    Ok(CapacityAssignment(caps))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum NetKind {
    /// Control places threaded as disjoint chains.
    H,
    /// Disjoint cycles, one token each.
    C,
    /// Cycles sharing a single place `p0` that holds the only token.
    S,
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetKind::H => "h",
            NetKind::C => "c",
            NetKind::S => "s",
        })
    }
}

impl std::str::FromStr for NetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(NetKind::H),
            "c" => Ok(NetKind::C),
            "s" => Ok(NetKind::S),
            other => Err(format!("unknown net kind `{other}` (expected h, c or s)")),
        }
    }
}

/// A cf net with control places `Q`, initial marking μ0 and final marking τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedNet {
    kind: NetKind,
    base: CfNet,
    net: PetriNet,
    control: Vec<usize>,
    parts: Vec<(String, Vec<usize>)>,
    paths: Vec<PathSpec>,
    shared: Option<usize>,
    initial: Marking,
    final_marking: Marking,
}

impl ExtendedNet {
    pub fn kind(&self) -> NetKind {
        self.kind
    }

    pub fn base(&self) -> &CfNet {
        &self.base
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    /// Indices of the control places.
    pub fn control_places(&self) -> &[usize] {
        &self.control
    }

    /// Partition blocks as rule indices, in declared order.
    pub fn parts(&self) -> &[(String, Vec<usize>)] {
        &self.parts
    }

    pub fn paths(&self) -> &[PathSpec] {
        &self.paths
    }

    /// `p0` of an s-net.
    pub fn shared_place(&self) -> Option<usize> {
        self.shared
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    /// ζ(p): the nonterminal of a grammar place, `None` (λ) for control places.
    pub fn zeta(&self, p: usize) -> Option<Sym> {
        (p < self.base.net.places().len()).then(|| Sym::nonterminal(p))
    }
}

/// Resolves a labelled partition of the rules, checking that it is one.
pub fn resolve_partition(
    g: &Grammar,
    parts: &[(String, Vec<String>)],
) -> Result<Vec<(String, Vec<usize>)>, NetBuildError> {
    let mut owner: HashMap<usize, &str> = HashMap::new();
    let mut out = Vec::new();
    for (name, labels) in parts {
        if labels.is_empty() {
            return Err(NetBuildError::EmptyPart(name.clone()));
        }
        let mut rules = Vec::new();
        for l in labels {
            let r = g
                .rule_by_label(l)
                .ok_or_else(|| NetBuildError::UnknownRule(l.clone()))?;
            if owner.insert(r, name).is_some() {
                return Err(NetBuildError::Overlap(l.clone()));
            }
            rules.push(r);
        }
        out.push((name.clone(), rules));
    }
    if let Some(r) = (0..g.rules().len()).find(|r| !owner.contains_key(r)) {
        return Err(NetBuildError::Uncovered(g.rule(r).label.clone()));
    }
    Ok(out)
}

/// Threads control places through each part, in declared order.
pub fn build_extended_net(
    g: &Grammar,
    kind: NetKind,
    parts: &[(String, Vec<String>)],
) -> Result<ExtendedNet, NetBuildError> {
    let base = build_cf_net(g)?;
    let parts = resolve_partition(g, parts)?;
    let mut net = base.net.clone();
    let mut control = Vec::new();
    let mut paths = Vec::new();
    let mut carriers = Vec::new();
    let shared = if kind == NetKind::S {
        let p0 = net.add_place("p0")?;
        control.push(p0);
        Some(p0)
    } else {
        None
    };
    for (name, rules) in &parts {
        let k = rules.len();
        let mut fresh = |net: &mut PetriNet, j: usize| -> Result<usize, NetBuildError> {
            let p = net.add_place(&format!("q_{name}_{j}"))?;
            control.push(p);
            Ok(p)
        };
        let mut elements = Vec::new();
        match kind {
            NetKind::H => {
                // t1 q1 t2 … q(k-1) tk
                for (j, &t) in rules.iter().enumerate() {
                    elements.push(Node::Transition(t));
                    if j + 1 < k {
                        let q = fresh(&mut net, j + 1)?;
                        net.add_output(t, q, 1)?;
                        net.add_input(q, rules[j + 1], 1)?;
                        elements.push(Node::Place(q));
                    }
                }
                paths.push(PathSpec {
                    kind: PathKind::Chain,
                    elements,
                });
            }
            NetKind::C | NetKind::S => {
                // q1 t1 q2 t2 … qk tk q1, with q1 = p0 for s-nets
                let first = match shared {
                    Some(p0) => p0,
                    None => fresh(&mut net, 1)?,
                };
                carriers.push(first);
                let mut here = first;
                for (j, &t) in rules.iter().enumerate() {
                    elements.push(Node::Place(here));
                    elements.push(Node::Transition(t));
                    net.add_input(here, t, 1)?;
                    let next = if j + 1 < k { fresh(&mut net, j + 2)? } else { first };
                    net.add_output(t, next, 1)?;
                    here = next;
                }
                elements.push(Node::Place(first));
                paths.push(PathSpec {
                    kind: PathKind::Cycle,
                    elements,
                });
            }
        }
    }
    let mut initial = net.zero_marking();
    initial.0[..base.initial.0.len()].copy_from_slice(&base.initial.0);
    let mut final_marking = net.zero_marking();
    for &c in &carriers {
        initial.0[c] = 1;
        final_marking.0[c] = 1;
    }
    let blocks: Vec<Vec<usize>> = parts.iter().map(|(_, r)| r.clone()).collect();
    let violations = validate_paths(&net, &paths, shared, Some(&blocks), PathOptions::default());
    debug_assert!(violations.is_empty(), "{violations:?}");
    Ok(ExtendedNet {
        kind,
        base,
        net,
        control,
        parts,
        paths,
        shared,
        initial,
        final_marking,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CapacityKind {
    /// Only grammar places are bounded.
    Weak,
    /// Grammar places and control places are bounded.
    Strong,
}

/// Place capacities for a controlled derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityMode {
    pub kind: CapacityKind,
    /// Capacities of the grammar places.
    pub kappa: CapacityFunction,
    /// Capacity of every control place under strong capacity.
    pub control: u32,
}

impl CapacityMode {
    pub fn weak(kappa: CapacityFunction) -> CapacityMode {
        CapacityMode {
            kind: CapacityKind::Weak,
            kappa,
            control: 1,
        }
    }

    pub fn strong(kappa: CapacityFunction, control: u32) -> CapacityMode {
        CapacityMode {
            kind: CapacityKind::Strong,
            kappa,
            control,
        }
    }

    fn assignment(&self, cn: &CfNet, places: usize) -> Result<CapacityAssignment, NetBuildError> {
        let mut c = attach_capacity(cn, &self.kappa)?;
        let extra = match self.kind {
            CapacityKind::Weak => Bound::Unbounded,
            CapacityKind::Strong if self.control == 0 => {
                return Err(NetBuildError::CapacityMode("control capacity must be at least 1".into()))
            }
            CapacityKind::Strong => Bound::Finite(self.control),
        };
        c.0.resize(places, extra);
        Ok(c)
    }
}

/// The net controlling a derivation.
#[derive(Copy, Clone, Debug)]
pub enum Controller<'a> {
    /// Accepts at any terminal form.
    Cf(&'a CfNet),
    /// Accepts at a terminal form whose marking is τ.
    Extended(&'a ExtendedNet),
}

impl<'a> Controller<'a> {
    fn net(&self) -> &'a PetriNet {
        match self {
            Controller::Cf(c) => &c.net,
            Controller::Extended(e) => &e.net,
        }
    }

    fn base(&self) -> &'a CfNet {
        match self {
            Controller::Cf(c) => c,
            Controller::Extended(e) => &e.base,
        }
    }

    fn initial(&self) -> &'a Marking {
        match self {
            Controller::Cf(c) => &c.initial,
            Controller::Extended(e) => &e.initial,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ControlledOptions {
    /// Cap on tokens per control place when no capacity bounds it; hitting
    /// it makes the result non-exhaustive.
    pub max_control_tokens: u32,
}

impl Default for ControlledOptions {
    fn default() -> Self {
        ControlledOptions {
            max_control_tokens: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyncState {
    pub form: SententialForm,
    pub marking: Marking,
}

impl crate::derive::AsForm for SyncState {
    fn form(&self) -> &SententialForm {
        &self.form
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyncStep {
    pub transition: usize,
    pub pos: usize,
}

struct SyncSpace<'a> {
    g: &'a Grammar,
    net: &'a PetriNet,
    capacity: Option<CapacityAssignment>,
    grammar_places: usize,
    max_control_tokens: u32,
    max_terminal_len: usize,
    cut: FormCut,
}

impl Space for SyncSpace<'_> {
    type State = SyncState;
    type Edge = SyncStep;

    fn expand(&self, s: &SyncState, out: &mut Vec<(SyncStep, SyncState)>) -> bool {
        let mut lossy = false;
        for t in 0..self.net.transitions().len() {
            let Ok(m) = crate::petri::run_sequence(self.net, &s.marking, &[t], self.capacity.as_ref()) else {
                continue;
            };
            if m.0[self.grammar_places..]
                .iter()
                .enumerate()
                .any(|(i, &x)| x > self.max_control_tokens && self.capacity.as_ref().is_none_or(|c| c.get(self.grammar_places + i) == Bound::Unbounded))
            {
                lossy = true;
                continue;
            }
            let r = self.g.rule(t);
            for pos in s.form.occurrences(&r.lhs) {
                let next = apply_unchecked(&s.form, r, pos);
                if let Some(l) = self.cut.drop(&next, self.max_terminal_len) {
                    lossy |= l;
                    continue;
                }
                out.push((
                    SyncStep { transition: t, pos },
                    SyncState {
                        form: next,
                        marking: m.clone(),
                    },
                ));
            }
        }
        lossy
    }
}

/// A synchronized run: rule applications paired with transition firings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlledRun {
    pub steps: Vec<SyncStep>,
    pub forms: Vec<SententialForm>,
    pub markings: Vec<Marking>,
}

impl ControlledRun {
    /// The grammar derivation underneath the run.
    pub fn derivation_steps(&self) -> Vec<Step> {
        self.steps
            .iter()
            .map(|s| Step {
                rule: s.transition,
                pos: s.pos,
            })
            .collect()
    }

    /// First step (0 = initial) where some grammar place's token count
    /// differs from its nonterminal's count in the form.
    pub fn bisimulation_mismatch(&self, grammar_places: usize) -> Option<usize> {
        self.forms
            .iter()
            .zip(&self.markings)
            .position(|(w, m)| (0..grammar_places).any(|p| m.get(p) != w.count(Sym::nonterminal(p))))
    }
}

pub struct ControlledEnumeration {
    explored: Explored<SyncState, SyncStep>,
    accepted: BTreeMap<Word, usize>,
    grammar_places: usize,
}

impl ControlledEnumeration {
    pub fn word_list(&self) -> Vec<Word> {
        self.accepted.keys().cloned().collect()
    }

    pub fn exhaustive(&self) -> bool {
        self.explored.exhaustive
    }

    pub fn explored_states(&self) -> usize {
        self.explored.len()
    }

    pub fn states(&self) -> impl Iterator<Item = &SyncState> + '_ {
        self.explored.states()
    }

    pub fn fragment(&self) -> crate::derive::Fragment {
        crate::derive::Fragment {
            words: self.word_list(),
            exhaustive: self.exhaustive(),
        }
    }

    /// Largest token count on a control place over all explored markings.
    pub fn max_control_tokens(&self) -> u32 {
        self.explored
            .states()
            .flat_map(|s| s.marking.0[self.grammar_places..].iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn witness(&self, w: &Word) -> Option<ControlledRun> {
        let &i = self.accepted.get(w)?;
        Some(self.run_to(i))
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&Word, ControlledRun)> + '_ {
        self.accepted.iter().map(|(w, &i)| (w, self.run_to(i)))
    }

    fn run_to(&self, i: usize) -> ControlledRun {
        let (steps, nodes) = self.explored.path_to(i);
        let states: Vec<&SyncState> = nodes.iter().map(|&n| self.explored.state(n)).collect();
        ControlledRun {
            steps,
            forms: states.iter().map(|s| s.form.clone()).collect(),
            markings: states.iter().map(|s| s.marking.clone()).collect(),
        }
    }
}

/// Words derivable in lockstep with an occurrence sequence of the net.
pub fn enumerate_controlled(
    g: &Grammar,
    controller: Controller<'_>,
    cm: Option<&CapacityMode>,
    b: &SearchBudget,
    opts: ControlledOptions,
) -> Result<ControlledEnumeration, NetBuildError> {
    b.check()?;
    let net = controller.net();
    let base = controller.base();
    let grammar_places = base.net.places().len();
    if grammar_places != g.nonterminal_count() || net.transitions().len() != g.rules().len() {
        return Err(NetBuildError::CapacityMismatch);
    }
    let capacity = cm
        .map(|cm| cm.assignment(base, net.places().len()))
        .transpose()?;
    let bound = capacity
        .as_ref()
        .filter(|c| c.0[..grammar_places].iter().all(|b| b.finite().is_some()))
        .map(|c| c.0[..grammar_places].iter().map(|b| b.finite().unwrap() as usize).sum());
    let space = SyncSpace {
        g,
        net,
        capacity,
        grammar_places,
        max_control_tokens: opts.max_control_tokens,
        max_terminal_len: b.max_terminal_len,
        cut: b.form_cut(g, bound),
    };
    let root = SyncState {
        form: SententialForm::start(g),
        marking: controller.initial().clone(),
    };
    let explored = explore(&space, root, b.limits(), |_| false);
    let accepted = match controller {
        Controller::Cf(_) => crate::derive::collect_terminal(&explored, |s| s.form.is_terminal()),
        Controller::Extended(e) => crate::derive::collect_terminal(&explored, |s| {
            s.form.is_terminal() && s.marking == e.final_marking
        }),
    };
    Ok(ControlledEnumeration {
        explored,
        accepted,
        grammar_places,
    })
}
