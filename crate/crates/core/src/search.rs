//! Breadth-first exploration shared by every engine in the crate.
//!
//! A layer of states is expanded (in parallel when the `parallel` feature is
//! on and the layer is large enough), then the children are merged into the
//! visited set sequentially in parent order. The merge order is the same as
//! a plain sequential BFS, so the explored graph does not depend on the
//! scheduler.

use std::hash::Hash;

use indexmap::IndexSet;

/// How a layer's states are expanded.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Uses rayon when compiled with the `parallel` feature, otherwise the
    /// same as `Sequential`.
    #[default]
    Parallel,
}

/// A state space explored from a single root.
pub trait Space: Sync {
    type State: Clone + Eq + Hash + Send + Sync;
    type Edge: Clone + Send + Sync;

    /// Pushes the successors of `s` onto `out`. Returns `true` when some
    /// successor was dropped by a cut that may lose results.
    fn expand(&self, s: &Self::State, out: &mut Vec<(Self::Edge, Self::State)>) -> bool;
}

#[derive(Copy, Clone, Debug)]
pub struct Limits {
    pub max_states: usize,
    pub dedupe: bool,
    pub parallelism: Parallelism,
}

enum Store<S> {
    Dedup(IndexSet<S>),
    Plain(Vec<S>),
}

impl<S: Eq + Hash> Store<S> {
    fn len(&self) -> usize {
        match self {
            Store::Dedup(s) => s.len(),
            Store::Plain(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> &S {
        match self {
            Store::Dedup(s) => &s[i],
            Store::Plain(v) => &v[i],
        }
    }

    /// Returns the index of a newly stored state, `None` if already seen.
    fn insert(&mut self, s: S) -> Option<usize> {
        match self {
            Store::Dedup(set) => {
                let (i, fresh) = set.insert_full(s);
                fresh.then_some(i)
            }
            Store::Plain(v) => {
                v.push(s);
                Some(v.len() - 1)
            }
        }
    }
}

/// The explored portion of a state space, with BFS parent links.
pub struct Explored<S, E> {
    store: Store<S>,
    parents: Vec<Option<(usize, E)>>,
    /// No state was cut by `max_states` or by a lossy cut in `expand`.
    pub exhaustive: bool,
    /// Set when the stop predicate fired; holds the matching state's index.
    pub stopped_at: Option<usize>,
}

impl<S: Clone + Eq + Hash, E: Clone> Explored<S, E> {
    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.len() == 0
    }

    pub fn state(&self, i: usize) -> &S {
        self.store.get(i)
    }

    pub fn states(&self) -> impl Iterator<Item = &S> + '_ {
        (0..self.len()).map(move |i| self.state(i))
    }

    /// Edges and state indices from the root to `i` (root first).
    pub fn path_to(&self, mut i: usize) -> (Vec<E>, Vec<usize>) {
        let mut edges = Vec::new();
        let mut nodes = vec![i];
        while let Some((p, e)) = &self.parents[i] {
            edges.push(e.clone());
            nodes.push(*p);
            i = *p;
        }
        edges.reverse();
        nodes.reverse();
        (edges, nodes)
    }
}

const PARALLEL_THRESHOLD: usize = 256;

fn expand_layer<Sp: Space>(
    space: &Sp,
    layer: &[Sp::State],
    parallelism: Parallelism,
) -> Vec<(Vec<(Sp::Edge, Sp::State)>, bool)> {
    let one = |s: &Sp::State| {
        let mut out = Vec::new();
        let lossy = space.expand(s, &mut out);
        (out, lossy)
    };
    #[cfg(feature = "parallel")]
    if parallelism == Parallelism::Parallel && layer.len() >= PARALLEL_THRESHOLD {
        use rayon::prelude::*;
        return layer.par_iter().map(one).collect();
    }
    let _ = (parallelism, PARALLEL_THRESHOLD);
    layer.iter().map(one).collect()
}

/// Explores from `root` until closure, `max_states`, or `stop` matches.
pub fn explore<Sp: Space>(
    space: &Sp,
    root: Sp::State,
    limits: Limits,
    stop: impl Fn(&Sp::State) -> bool,
) -> Explored<Sp::State, Sp::Edge> {
    let mut store = if limits.dedupe {
        Store::Dedup(IndexSet::new())
    } else {
        Store::Plain(Vec::new())
    };
    let stop_root = stop(&root);
    store.insert(root);
    let mut explored = Explored {
        store,
        parents: vec![None],
        exhaustive: true,
        stopped_at: None,
    };
    if stop_root {
        explored.stopped_at = Some(0);
        return explored;
    }
    let mut lo = 0;
    'outer: while lo < explored.len() {
        let hi = explored.len();
        let layer: Vec<Sp::State> = (lo..hi).map(|i| explored.state(i).clone()).collect();
        let children = expand_layer(space, &layer, limits.parallelism);
        for (offset, (kids, lossy)) in children.into_iter().enumerate() {
            if lossy {
                explored.exhaustive = false;
            }
            for (edge, child) in kids {
                if explored.len() >= limits.max_states {
                    explored.exhaustive = false;
                    break 'outer;
                }
                let hit = stop(&child);
                if let Some(i) = explored.store.insert(child) {
                    explored.parents.push(Some((lo + offset, edge)));
                    if hit {
                        explored.stopped_at = Some(i);
                        break 'outer;
                    }
                }
            }
        }
        lo = hi;
    }
    explored
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integers below a bound, successors n+1 and 2n.
    struct Doubling(u32);

    impl Space for Doubling {
        type State = u32;
        type Edge = char;
        fn expand(&self, s: &u32, out: &mut Vec<(char, u32)>) -> bool {
            for (e, n) in [('+', s + 1), ('*', s * 2)] {
                if n < self.0 {
                    out.push((e, n));
                }
            }
            false
        }
    }

    fn limits(p: Parallelism) -> Limits {
        Limits {
            max_states: usize::MAX,
            dedupe: true,
            parallelism: p,
        }
    }

    #[test]
    fn closes_and_reconstructs_paths() {
        let ex = explore(&Doubling(20), 1, limits(Parallelism::Sequential), |_| false);
        assert!(ex.exhaustive);
        assert_eq!(ex.len(), 19);
        let i = ex.states().position(|&s| s == 12).unwrap();
        let (edges, nodes) = ex.path_to(i);
        assert_eq!(edges.len() + 1, nodes.len());
        assert_eq!(*ex.state(nodes[0]), 1);
        // BFS gives a shortest path: 1 → 2 → 3 → 6 → 12
        assert_eq!(edges.len(), 4);
    }

    #[test]
    fn state_cap_marks_non_exhaustive() {
        let ex = explore(
            &Doubling(1000),
            1,
            Limits {
                max_states: 10,
                ..limits(Parallelism::Sequential)
            },
            |_| false,
        );
        assert!(!ex.exhaustive);
        assert_eq!(ex.len(), 10);
    }

    #[test]
    fn stop_predicate() {
        let ex = explore(&Doubling(1000), 1, limits(Parallelism::Sequential), |&s| s == 64);
        let i = ex.stopped_at.unwrap();
        assert_eq!(*ex.state(i), 64);
    }

    #[test]
    fn parallel_matches_sequential_order() {
        let a = explore(&Doubling(5000), 1, limits(Parallelism::Sequential), |_| false);
        let b = explore(&Doubling(5000), 1, limits(Parallelism::Parallel), |_| false);
        assert!(a.states().eq(b.states()));
        for i in 0..a.len() {
            assert_eq!(a.path_to(i).0, b.path_to(i).0);
        }
    }
}
