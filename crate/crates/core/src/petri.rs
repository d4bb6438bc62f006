//! Place/transition nets with optional place capacities.

use std::collections::HashSet;
use std::fmt;

use crate::error::{PetriError, RunError, StepFailure};
use crate::grammar::Bound;
use crate::search::{explore, Limits, Parallelism, Space};

/// `N = (P, T, F, φ)` with φ stored sparsely per transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<String>,
    inputs: Vec<Vec<(usize, u32)>>,
    outputs: Vec<Vec<(usize, u32)>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Place(usize),
    Transition(usize),
}

impl PetriNet {
    pub fn new(places: Vec<String>, transitions: Vec<String>) -> Result<PetriNet, PetriError> {
        let mut seen = HashSet::new();
        for n in places.iter().chain(&transitions) {
            if !seen.insert(n.as_str()) {
                return Err(PetriError::DuplicateName(n.clone()));
            }
        }
        let t = transitions.len();
        Ok(PetriNet {
            places,
            transitions,
            inputs: vec![Vec::new(); t],
            outputs: vec![Vec::new(); t],
        })
    }

    pub fn empty() -> PetriNet {
        PetriNet::new(Vec::new(), Vec::new()).unwrap()
    }

    pub fn add_place(&mut self, name: &str) -> Result<usize, PetriError> {
        if self.place_index(name).is_some() || self.transition_index(name).is_some() {
            return Err(PetriError::DuplicateName(name.to_owned()));
        }
        self.places.push(name.to_owned());
        Ok(self.places.len() - 1)
    }

    fn check_place(&self, p: usize) -> Result<(), PetriError> {
        (p < self.places.len())
            .then_some(())
            .ok_or(PetriError::UnknownPlace(p))
    }

    fn check_transition(&self, t: usize) -> Result<(), PetriError> {
        (t < self.transitions.len())
            .then_some(())
            .ok_or(PetriError::UnknownTransition(t))
    }

    fn add(list: &mut Vec<(usize, u32)>, p: usize, w: u32) {
        match list.iter_mut().find(|(q, _)| *q == p) {
            Some((_, x)) => *x += w,
            None => {
                let at = list.partition_point(|(q, _)| *q < p);
                list.insert(at, (p, w));
            }
        }
    }

    /// Adds weight `w` to the arc `(p, t)`.
    pub fn add_input(&mut self, p: usize, t: usize, w: u32) -> Result<(), PetriError> {
        self.check_place(p)?;
        self.check_transition(t)?;
        if w == 0 {
            return Err(PetriError::ZeroWeight);
        }
        PetriNet::add(&mut self.inputs[t], p, w);
        Ok(())
    }

    /// Adds weight `w` to the arc `(t, p)`.
    pub fn add_output(&mut self, t: usize, p: usize, w: u32) -> Result<(), PetriError> {
        self.check_place(p)?;
        self.check_transition(t)?;
        if w == 0 {
            return Err(PetriError::ZeroWeight);
        }
        PetriNet::add(&mut self.outputs[t], p, w);
        Ok(())
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == name)
    }

    /// `(place, φ(place, t))` for the preset of `t`.
    pub fn inputs(&self, t: usize) -> &[(usize, u32)] {
        &self.inputs[t]
    }

    /// `(place, φ(t, place))` for the postset of `t`.
    pub fn outputs(&self, t: usize) -> &[(usize, u32)] {
        &self.outputs[t]
    }

    /// φ(x, y); 0 when there is no arc.
    pub fn weight(&self, from: Node, to: Node) -> u32 {
        let find = |list: &[(usize, u32)], p: usize| {
            list.iter().find(|(q, _)| *q == p).map_or(0, |&(_, w)| w)
        };
        match (from, to) {
            (Node::Place(p), Node::Transition(t)) if t < self.transitions.len() => {
                find(&self.inputs[t], p)
            }
            (Node::Transition(t), Node::Place(p)) if t < self.transitions.len() => {
                find(&self.outputs[t], p)
            }
            _ => 0,
        }
    }

    /// All arcs with their weights, places before transitions as sources.
    pub fn arcs(&self) -> Vec<(Node, Node, u32)> {
        let mut out = Vec::new();
        for t in 0..self.transitions.len() {
            for &(p, w) in &self.inputs[t] {
                out.push((Node::Place(p), Node::Transition(t), w));
            }
            for &(p, w) in &self.outputs[t] {
                out.push((Node::Transition(t), Node::Place(p), w));
            }
        }
        out.sort();
        out
    }

    pub fn node_name(&self, n: Node) -> &str {
        match n {
            Node::Place(p) => &self.places[p],
            Node::Transition(t) => &self.transitions[t],
        }
    }

    /// The net with every arc reversed.
    pub fn reversed(&self) -> PetriNet {
        PetriNet {
            places: self.places.clone(),
            transitions: self.transitions.clone(),
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
        }
    }

    pub fn zero_marking(&self) -> Marking {
        Marking(vec![0; self.places.len()])
    }
}

/// Token count per place.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn get(&self, p: usize) -> u32 {
        self.0[p]
    }

    pub fn max_tokens(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn render(&self, n: &PetriNet) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(p, k)| format!("{}={}", n.places()[p], k))
            .collect();
        if parts.is_empty() {
            "(zero)".to_owned()
        } else {
            parts.join(" ")
        }
    }
}

/// κ over places.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CapacityAssignment(pub Vec<Bound>);

impl CapacityAssignment {
    pub fn unbounded(n: &PetriNet) -> CapacityAssignment {
        CapacityAssignment(vec![Bound::Unbounded; n.places().len()])
    }

    pub fn uniform(n: &PetriNet, k: u32) -> CapacityAssignment {
        CapacityAssignment(vec![Bound::Finite(k); n.places().len()])
    }

    pub fn get(&self, p: usize) -> Bound {
        self.0[p]
    }

    pub fn admits(&self, m: &Marking) -> bool {
        m.0.iter().zip(&self.0).all(|(&x, b)| b.admits(x))
    }

    pub fn is_all_finite(&self) -> bool {
        self.0.iter().all(|b| matches!(b, Bound::Finite(_)))
    }
}

fn check_marking(n: &PetriNet, m: &Marking, c: Option<&CapacityAssignment>) -> Result<(), PetriError> {
    if m.0.len() != n.places().len() || c.is_some_and(|c| c.0.len() != n.places().len()) {
        return Err(PetriError::DomainMismatch);
    }
    Ok(())
}

/// First reason `t` cannot occur at `m`, if any.
fn blocked(n: &PetriNet, m: &Marking, t: usize, c: Option<&CapacityAssignment>) -> Option<StepFailure> {
    for &(p, w) in n.inputs(t) {
        if m.0[p] < w {
            return Some(StepFailure::InsufficientInput {
                place: n.places()[p].clone(),
            });
        }
    }
    if let Some(c) = c {
        for &(p, w) in n.outputs(t) {
            let after = m.0[p] - n.weight(Node::Place(p), Node::Transition(t)) + w;
            if !c.get(p).admits(after) {
                return Some(StepFailure::CapacityOverflow {
                    place: n.places()[p].clone(),
                });
            }
        }
    }
    None
}

fn fire_unchecked(n: &PetriNet, m: &Marking, t: usize) -> Marking {
    let mut next = m.clone();
    for &(p, w) in n.inputs(t) {
        next.0[p] -= w;
    }
    for &(p, w) in n.outputs(t) {
        next.0[p] += w;
    }
    next
}

/// `μ(p) ≥ φ(p,t)` for all `p`, and with capacities the successor is valid.
pub fn enabled(
    n: &PetriNet,
    m: &Marking,
    t: usize,
    c: Option<&CapacityAssignment>,
) -> Result<bool, PetriError> {
    n.check_transition(t)?;
    check_marking(n, m, c)?;
    Ok(blocked(n, m, t, c).is_none())
}

/// `μ'(p) = μ(p) − φ(p,t) + φ(t,p)`.
pub fn fire(n: &PetriNet, m: &Marking, t: usize) -> Result<Marking, PetriError> {
    if !enabled(n, m, t, None)? {
        return Err(PetriError::NotEnabled(n.transitions()[t].clone()));
    }
    Ok(fire_unchecked(n, m, t))
}

/// Fires `seq` from `m0`, reporting the first step that cannot occur.
pub fn run_sequence(
    n: &PetriNet,
    m0: &Marking,
    seq: &[usize],
    c: Option<&CapacityAssignment>,
) -> Result<Marking, RunError> {
    check_marking(n, m0, c).map_err(|_| RunError {
        step: 0,
        reason: StepFailure::UnknownTransition,
    })?;
    let mut m = m0.clone();
    for (i, &t) in seq.iter().enumerate() {
        if t >= n.transitions().len() {
            return Err(RunError {
                step: i + 1,
                reason: StepFailure::UnknownTransition,
            });
        }
        if let Some(reason) = blocked(n, &m, t, c) {
            return Err(RunError { step: i + 1, reason });
        }
        m = fire_unchecked(n, &m, t);
    }
    Ok(m)
}

struct MarkingSpace<'a> {
    n: &'a PetriNet,
    c: Option<&'a CapacityAssignment>,
}

impl Space for MarkingSpace<'_> {
    type State = Marking;
    type Edge = usize;

    fn expand(&self, m: &Marking, out: &mut Vec<(usize, Marking)>) -> bool {
        for t in 0..self.n.transitions().len() {
            if blocked(self.n, m, t, self.c).is_none() {
                out.push((t, fire_unchecked(self.n, m, t)));
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    /// Markings in BFS discovery order; the first is `m0`.
    pub markings: Vec<Marking>,
    pub exhaustive: bool,
}

/// Markings reachable from `m0`, explored up to `limit` markings.
pub fn reachability_set(
    n: &PetriNet,
    m0: &Marking,
    c: Option<&CapacityAssignment>,
    limit: usize,
) -> Result<Reachability, PetriError> {
    check_marking(n, m0, c)?;
    let ex = explore(
        &MarkingSpace { n, c },
        m0.clone(),
        Limits {
            max_states: limit,
            dedupe: true,
            parallelism: Parallelism::Sequential,
        },
        |_| false,
    );
    Ok(Reachability {
        markings: ex.states().cloned().collect(),
        exhaustive: ex.exhaustive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    /// A reachable marking with more than `k` tokens on some place.
    Exceeded(Marking),
    Unknown,
}

pub fn is_k_bounded(n: &PetriNet, m0: &Marking, k: u32, limit: usize) -> Result<Boundedness, PetriError> {
    check_marking(n, m0, None)?;
    let ex = explore(
        &MarkingSpace { n, c: None },
        m0.clone(),
        Limits {
            max_states: limit,
            dedupe: true,
            parallelism: Parallelism::Sequential,
        },
        |m| m.max_tokens() > k,
    );
    Ok(match ex.stopped_at {
        Some(i) => Boundedness::Exceeded(ex.state(i).clone()),
        None if ex.exhaustive => Boundedness::Bounded,
        None => Boundedness::Unknown,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PathKind {
    Chain,
    Cycle,
}

/// A chain `t p t … t` or a cycle `p t p … t p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSpec {
    pub kind: PathKind,
    pub elements: Vec<Node>,
}

impl PathSpec {
    pub fn places(&self) -> HashSet<usize> {
        self.elements
            .iter()
            .filter_map(|n| match n {
                Node::Place(p) => Some(*p),
                _ => None,
            })
            .collect()
    }

    pub fn transitions(&self) -> HashSet<usize> {
        self.elements
            .iter()
            .filter_map(|n| match n {
                Node::Transition(t) => Some(*t),
                _ => None,
            })
            .collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PathOptions {
    /// Reject chains whose first and last transition coincide.
    pub distinct_chain_ends: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            distinct_chain_ends: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathViolation {
    Empty { path: usize },
    BadShape { path: usize, reason: &'static str },
    MissingArc { path: usize, from: String, to: String },
    Repeated { path: usize, node: String },
    SharedPlace { a: usize, b: usize, place: String },
    SharedTransition { a: usize, b: usize, transition: String },
    Coverage { path: usize },
    SharedPlaceMissing { path: usize },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathViolation::Empty { path } => write!(f, "path {path} is empty"),
            PathViolation::BadShape { path, reason } => write!(f, "path {path}: {reason}"),
            PathViolation::MissingArc { path, from, to } => {
                write!(f, "path {path}: no arc {from} -> {to}")
            }
            PathViolation::Repeated { path, node } => write!(f, "path {path}: {node} repeats"),
            PathViolation::SharedPlace { a, b, place } => {
                write!(f, "paths {a} and {b} share place {place}")
            }
            PathViolation::SharedTransition { a, b, transition } => {
                write!(f, "paths {a} and {b} share transition {transition}")
            }
            PathViolation::Coverage { path } => {
                write!(f, "path {path} does not cover exactly its part")
            }
            PathViolation::SharedPlaceMissing { path } => {
                write!(f, "path {path} does not pass through the shared place")
            }
        }
    }
}

fn check_path(n: &PetriNet, i: usize, spec: &PathSpec, opts: PathOptions, out: &mut Vec<PathViolation>) {
    let els = &spec.elements;
    if els.is_empty() {
        out.push(PathViolation::Empty { path: i });
        return;
    }
    let alternates = els.windows(2).all(|w| {
        matches!(
            (w[0], w[1]),
            (Node::Place(_), Node::Transition(_)) | (Node::Transition(_), Node::Place(_))
        )
    });
    if !alternates {
        out.push(PathViolation::BadShape {
            path: i,
            reason: "places and transitions must alternate",
        });
    }
    let first = els[0];
    let last = *els.last().unwrap();
    match spec.kind {
        PathKind::Chain => {
            if !matches!(first, Node::Transition(_)) || !matches!(last, Node::Transition(_)) {
                out.push(PathViolation::BadShape {
                    path: i,
                    reason: "a chain starts and ends with transitions",
                });
            }
        }
        PathKind::Cycle => {
            if !matches!(first, Node::Place(_)) || first != last || els.len() < 3 {
                out.push(PathViolation::BadShape {
                    path: i,
                    reason: "a cycle starts and ends at the same place",
                });
            }
        }
    }
    for w in els.windows(2) {
        if n.weight(w[0], w[1]) == 0 {
            out.push(PathViolation::MissingArc {
                path: i,
                from: n.node_name(w[0]).to_owned(),
                to: n.node_name(w[1]).to_owned(),
            });
        }
    }
    let closed = spec.kind == PathKind::Cycle || !opts.distinct_chain_ends;
    let body = if closed && els.len() > 1 && first == last {
        &els[..els.len() - 1]
    } else {
        &els[..]
    };
    let mut seen = HashSet::new();
    for &x in body {
        if !seen.insert(x) {
            out.push(PathViolation::Repeated {
                path: i,
                node: n.node_name(x).to_owned(),
            });
        }
    }
}

/// Structure, disjointness and partition coverage of a set of paths.
///
/// With `shared = Some(p)` every path must pass through `p` and no other
/// place may be shared (the s-net layout).
pub fn validate_paths(
    n: &PetriNet,
    specs: &[PathSpec],
    shared: Option<usize>,
    partition: Option<&[Vec<usize>]>,
    opts: PathOptions,
) -> Vec<PathViolation> {
    let mut out = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        check_path(n, i, s, opts, &mut out);
        if let Some(p0) = shared {
            if !s.places().contains(&p0) {
                out.push(PathViolation::SharedPlaceMissing { path: i });
            }
        }
    }
    for a in 0..specs.len() {
        for b in a + 1..specs.len() {
            let (pa, pb) = (specs[a].places(), specs[b].places());
            let mut common: Vec<_> = pa.intersection(&pb).copied().filter(|&p| Some(p) != shared).collect();
            common.sort();
            for p in common {
                out.push(PathViolation::SharedPlace {
                    a,
                    b,
                    place: n.places()[p].clone(),
                });
            }
            let mut common: Vec<_> = specs[a].transitions().intersection(&specs[b].transitions()).copied().collect();
            common.sort();
            for t in common {
                out.push(PathViolation::SharedTransition {
                    a,
                    b,
                    transition: n.transitions()[t].clone(),
                });
            }
        }
    }
    if let Some(parts) = partition {
        for (i, s) in specs.iter().enumerate() {
            let want: HashSet<usize> = parts.get(i).map(|p| p.iter().copied().collect()).unwrap_or_default();
            if s.transitions() != want {
                out.push(PathViolation::Coverage { path: i });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(places: &[&str], transitions: &[&str]) -> PetriNet {
        PetriNet::new(
            places.iter().map(|s| s.to_string()).collect(),
            transitions.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn enabling_examples() {
        let mut n = net(&["p", "q"], &["t"]);
        n.add_input(0, 0, 1).unwrap();
        assert!(enabled(&n, &Marking(vec![1, 0]), 0, None).unwrap());
        assert!(!enabled(&n, &Marking(vec![0, 0]), 0, None).unwrap());
        assert_eq!(enabled(&n, &Marking(vec![1, 0]), 3, None), Err(PetriError::UnknownTransition(3)));

        let mut n = net(&["q"], &["t"]);
        n.add_output(0, 0, 1).unwrap();
        let cap = CapacityAssignment(vec![Bound::Finite(1)]);
        assert!(!enabled(&n, &Marking(vec![1]), 0, Some(&cap)).unwrap());
        assert!(enabled(&n, &Marking(vec![1]), 0, None).unwrap());

        let mut n = net(&["q"], &["t"]);
        n.add_input(0, 0, 1).unwrap();
        n.add_output(0, 0, 1).unwrap();
        assert!(enabled(&n, &Marking(vec![1]), 0, Some(&cap)).unwrap());
    }

    #[test]
    fn firing_examples() {
        let mut n = net(&["p", "q"], &["t", "loop", "two"]);
        n.add_input(0, 0, 1).unwrap();
        n.add_input(0, 1, 1).unwrap();
        n.add_output(1, 0, 1).unwrap();
        n.add_output(2, 1, 2).unwrap();
        assert_eq!(fire(&n, &Marking(vec![2, 0]), 0).unwrap(), Marking(vec![1, 0]));
        assert_eq!(fire(&n, &Marking(vec![2, 0]), 1).unwrap(), Marking(vec![2, 0]));
        assert_eq!(fire(&n, &Marking(vec![0, 0]), 2).unwrap(), Marking(vec![0, 2]));
        assert!(matches!(fire(&n, &Marking(vec![0, 0]), 0), Err(PetriError::NotEnabled(_))));
    }

    #[test]
    fn run_reports_the_failing_step() {
        let mut n = net(&["p", "q"], &["t"]);
        n.add_input(0, 0, 1).unwrap();
        n.add_output(0, 1, 1).unwrap();
        let m0 = Marking(vec![1, 0]);
        assert_eq!(run_sequence(&n, &m0, &[], None).unwrap(), m0);
        let err = run_sequence(&n, &m0, &[0, 0], None).unwrap_err();
        assert_eq!(err.step, 2);
        assert!(matches!(err.reason, StepFailure::InsufficientInput { ref place } if place == "p"));
        let cap = CapacityAssignment(vec![Bound::Finite(1), Bound::Finite(0)]);
        let err = run_sequence(&n, &m0, &[0], Some(&cap)).unwrap_err();
        assert!(matches!(err.reason, StepFailure::CapacityOverflow { .. }));
    }

    #[test]
    fn reachability_without_transitions() {
        let n = net(&["p"], &[]);
        let r = reachability_set(&n, &Marking(vec![3]), None, 10).unwrap();
        assert_eq!(r.markings, vec![Marking(vec![3])]);
        assert!(r.exhaustive);
        assert_eq!(is_k_bounded(&n, &Marking(vec![3]), 3, 10).unwrap(), Boundedness::Bounded);
    }

    #[test]
    fn unbounded_growth_hits_limit() {
        let mut n = net(&["p"], &["t"]);
        n.add_input(0, 0, 1).unwrap();
        n.add_output(0, 0, 2).unwrap();
        let r = reachability_set(&n, &Marking(vec![1]), None, 5).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.markings.len(), 5);
        let cap = CapacityAssignment(vec![Bound::Finite(3)]);
        let r = reachability_set(&n, &Marking(vec![1]), Some(&cap), 100).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.markings.len(), 3);
        assert_eq!(is_k_bounded(&n, &Marking(vec![1]), 3, 100).unwrap(), Boundedness::Exceeded(Marking(vec![4])));
        assert_eq!(is_k_bounded(&n, &Marking(vec![1]), 1000, 10).unwrap(), Boundedness::Unknown);
    }

    fn chain_net() -> PetriNet {
        // t0 -> q0 -> t1, t2 -> q1 -> t3
        let mut n = net(&["q0", "q1"], &["t0", "t1", "t2", "t3"]);
        n.add_output(0, 0, 1).unwrap();
        n.add_input(0, 1, 1).unwrap();
        n.add_output(2, 1, 1).unwrap();
        n.add_input(1, 3, 1).unwrap();
        n
    }

    #[test]
    fn chains_sharing_a_transition_are_rejected() {
        let n = chain_net();
        let c1 = PathSpec {
            kind: PathKind::Chain,
            elements: vec![Node::Transition(0), Node::Place(0), Node::Transition(1)],
        };
        let c2 = PathSpec {
            kind: PathKind::Chain,
            elements: vec![Node::Transition(2), Node::Place(1), Node::Transition(3)],
        };
        assert!(validate_paths(&n, &[c1.clone(), c2.clone()], None, None, PathOptions::default()).is_empty());
        let parts = vec![vec![0, 1], vec![2, 3]];
        assert!(validate_paths(&n, &[c1.clone(), c2], None, Some(&parts), PathOptions::default()).is_empty());
        let v = validate_paths(&n, &[c1.clone(), c1], None, None, PathOptions::default());
        assert!(v.iter().any(|x| matches!(x, PathViolation::SharedTransition { .. })));
    }

    #[test]
    fn cycle_without_arc_is_rejected() {
        let n = chain_net();
        let c = PathSpec {
            kind: PathKind::Cycle,
            elements: vec![Node::Place(0), Node::Transition(1), Node::Place(0)],
        };
        let v = validate_paths(&n, &[c], None, None, PathOptions::default());
        assert!(v.iter().any(|x| matches!(x, PathViolation::MissingArc { .. })));
    }

    #[test]
    fn shared_place_layout() {
        // p0 -> a -> p0 and p0 -> b -> q -> c -> p0
        let mut n = net(&["p0", "q"], &["a", "b", "c"]);
        n.add_input(0, 0, 1).unwrap();
        n.add_output(0, 0, 1).unwrap();
        n.add_input(0, 1, 1).unwrap();
        n.add_output(1, 1, 1).unwrap();
        n.add_input(1, 2, 1).unwrap();
        n.add_output(2, 0, 1).unwrap();
        let specs = vec![
            PathSpec {
                kind: PathKind::Cycle,
                elements: vec![Node::Place(0), Node::Transition(0), Node::Place(0)],
            },
            PathSpec {
                kind: PathKind::Cycle,
                elements: vec![
                    Node::Place(0),
                    Node::Transition(1),
                    Node::Place(1),
                    Node::Transition(2),
                    Node::Place(0),
                ],
            },
        ];
        assert!(validate_paths(&n, &specs, Some(0), None, PathOptions::default()).is_empty());
        let v = validate_paths(&n, &specs, None, None, PathOptions::default());
        assert!(v.iter().any(|x| matches!(x, PathViolation::SharedPlace { .. })));
    }

    #[test]
    fn chain_endpoint_option() {
        // t0 -> q0 -> t0 closes on itself
        let mut n = net(&["q0"], &["t0"]);
        n.add_output(0, 0, 1).unwrap();
        n.add_input(0, 0, 1).unwrap();
        let c = PathSpec {
            kind: PathKind::Chain,
            elements: vec![Node::Transition(0), Node::Place(0), Node::Transition(0)],
        };
        assert!(!validate_paths(&n, std::slice::from_ref(&c), None, None, PathOptions::default()).is_empty());
        let lax = PathOptions {
            distinct_chain_ends: false,
        };
        assert!(validate_paths(&n, &[c], None, None, lax).is_empty());
    }
}
