//! Graphviz export for nets.

use std::fmt::Write as _;

use crate::grammar::Bound;
use crate::petri::{CapacityAssignment, Marking, PetriNet};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with places as circles and transitions as boxes.
///
/// Nodes and arcs are emitted sorted by name, so the output only depends on
/// the net. Places carry `m=` (nonzero tokens) and `cap=` (finite capacity)
/// annotations; arcs of weight above 1 carry their weight as a label.
pub fn export_dot(n: &PetriNet, marking: Option<&Marking>, capacity: Option<&CapacityAssignment>) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    let mut places: Vec<usize> = (0..n.places().len()).collect();
    places.sort_by(|&a, &b| n.places()[a].cmp(&n.places()[b]));
    for p in places {
        let name = &n.places()[p];
        let mut label = name.clone();
        if let Some(k) = marking.map(|m| m.get(p)).filter(|&k| k > 0) {
            let _ = write!(label, "\\nm={k}");
        }
        if let Some(Bound::Finite(c)) = capacity.map(|c| c.get(p)) {
            let _ = write!(label, "\\ncap={c}");
        }
        let _ = writeln!(out, "  {} [shape=circle, label=\"{}\"];", quote(name), label.replace('"', "\\\""));
    }
    let mut transitions: Vec<&String> = n.transitions().iter().collect();
    transitions.sort();
    for t in transitions {
        let _ = writeln!(out, "  {} [shape=box];", quote(t));
    }
    let mut arcs: Vec<(&str, &str, u32)> = n
        .arcs()
        .into_iter()
        .map(|(a, b, w)| (n.node_name(a), n.node_name(b), w))
        .collect();
    arcs.sort();
    for (a, b, w) in arcs {
        let _ = write!(out, "  {} -> {}", quote(a), quote(b));
        if w != 1 {
            let _ = write!(out, " [label=\"{w}\"]");
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfnet::{attach_capacity, build_cf_net};
    use crate::fixtures;
    use crate::grammar::CapacityFunction;

    #[test]
    fn empty_net() {
        let d = export_dot(&PetriNet::empty(), None, None);
        assert_eq!(d, "digraph net {\n  rankdir=LR;\n}\n");
    }

    #[test]
    fn cf_net_nodes_and_annotations() {
        let g = fixtures::ex_sec2();
        let cn = build_cf_net(&g).unwrap();
        let k = attach_capacity(&cn, &CapacityFunction::one(&g)).unwrap();
        let d = export_dot(cn.net(), Some(cn.initial()), Some(&k));
        assert_eq!(d.matches("shape=").count(), 10);
        // 7 input arcs, S→AB gives 2 outputs, four self-recursive rules give 1 each
        assert_eq!(d.matches(" -> ").count(), 7 + 2 + 4);
        assert!(d.contains("\"p_S\" [shape=circle, label=\"p_S\\nm=1\\ncap=1\"]"));
        assert!(d.contains("cap=1"));
        assert_eq!(d, export_dot(cn.net(), Some(cn.initial()), Some(&k)));
    }

    #[test]
    fn weights_are_labelled() {
        let mut n = PetriNet::new(vec!["p".into()], vec!["t".into()]).unwrap();
        n.add_output(0, 0, 3).unwrap();
        assert!(export_dot(&n, None, None).contains("\"t\" -> \"p\" [label=\"3\"];"));
    }
}
