//! Directed hypergraphs, reachability, and final classes.
//!
//! A hyperarc is a pair `(tail, head)` with a nonempty tail set and a single
//! head node outside the tail. A node `j` is reachable from a set `J` if
//! `j ∈ J` or some hyperarc whose tail consists of reachable nodes has head
//! `j`; [`Hypergraph::reach`] computes the closure by forward chaining. A set
//! is *invariant* when it equals its own closure.
//!
//! The same queries run against a [`HeadOracle`] — a membership test for
//! hyperarcs answered on demand — without materializing the exponentially
//! many hyperarcs. Oracle-backed reachability issues at most `n²` queries.
//!
//! [`Digraph`] covers the special case where every tail is a singleton, and
//! adds strongly connected components and [`Digraph::final_classes`].

use crate::nodeset::{nonempty_subsets, NodeSet, MAX_NODES};
use serde_json::json;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

/// Errors from hypergraph or digraph construction.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum GraphError {
    /// A node index is outside `0..n`.
    #[error("node {node} is out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    /// A hyperarc has an empty tail.
    #[error("hyperarc into node {head} has an empty tail")]
    EmptyTail { head: usize },
    /// A hyperarc's head lies inside its tail.
    #[error("hyperarc into node {head} contains its head in the tail")]
    HeadInTail { head: usize },
}

/// A directed hyperarc: a nonempty tail set and a single head outside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Hyperarc {
    pub tail: NodeSet,
    pub head: usize,
}

/// A directed hypergraph on nodes `0..n` whose hyperarcs have singleton
/// heads.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    n: usize,
    arcs: Vec<Hyperarc>,
}

impl Hypergraph {
    /// Builds a hypergraph, checking every hyperarc.
    pub fn new(n: usize, arcs: Vec<Hyperarc>) -> Result<Self, GraphError> {
        assert!(n <= MAX_NODES, "at most {MAX_NODES} nodes supported");
        for a in &arcs {
            if a.head >= n {
                return Err(GraphError::NodeOutOfRange {
                    node: a.head + 1,
                    n,
                });
            }
            if let Some(j) = a.tail.iter().find(|&j| j >= n) {
                return Err(GraphError::NodeOutOfRange { node: j + 1, n });
            }
            if a.tail.is_empty() {
                return Err(GraphError::EmptyTail { head: a.head + 1 });
            }
            if a.tail.contains(a.head) {
                return Err(GraphError::HeadInTail { head: a.head + 1 });
            }
        }
        Ok(Hypergraph { n, arcs })
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The hyperarcs, in construction order.
    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    /// The hyperarcs sorted by head, then tail size, then tail bitmask.
    pub fn arcs_sorted(&self) -> Vec<Hyperarc> {
        let mut arcs = self.arcs.clone();
        arcs.sort_by_key(|a| (a.head, a.tail.len(), a.tail.bits()));
        arcs
    }

    /// The set of nodes reachable from `from`: the smallest invariant
    /// superset of `from`.
    ///
    /// # Panics
    ///
    /// If `from` is empty (reachability from the empty set is undefined
    /// here) or contains a node `≥ n`.
    pub fn reach(&self, from: NodeSet) -> NodeSet {
        assert!(!from.is_empty(), "reach needs a nonempty starting set");
        assert!(
            from.is_subset(NodeSet::full(self.n)),
            "starting set must consist of nodes"
        );
        let mut r = from;
        let mut changed = true;
        while changed {
            changed = false;
            for a in &self.arcs {
                if !r.contains(a.head) && a.tail.is_subset(r) {
                    r = r.insert(a.head);
                    changed = true;
                }
            }
        }
        r
    }

    /// Whether `set` equals its own reachability closure.
    ///
    /// # Panics
    ///
    /// As for [`Hypergraph::reach`].
    pub fn is_invariant(&self, set: NodeSet) -> bool {
        self.reach(set) == set
    }

    /// Keeps, for each head, only the hyperarcs with inclusion-minimal
    /// tails. Reachability is unchanged: a tail fires only if some minimal
    /// tail below it fires first.
    pub fn minimal_tails(&self) -> Hypergraph {
        let sorted = self.arcs_sorted();
        let mut kept: Vec<Hyperarc> = Vec::new();
        for a in &sorted {
            let dominated = kept
                .iter()
                .any(|b| b.head == a.head && b.tail.is_subset(a.tail));
            if !dominated {
                kept.push(*a);
            }
        }
        Hypergraph {
            n: self.n,
            arcs: kept,
        }
    }

    /// Renders GraphViz DOT text. Hyperarcs with at least two tail nodes go
    /// through an auxiliary point node. With `minimal`, only
    /// inclusion-minimal tails per head are drawn.
    pub fn to_dot(&self, minimal: bool) -> String {
        let graph = if minimal {
            self.minimal_tails()
        } else {
            self.clone()
        };
        let mut out = String::from("digraph {\n");
        for i in 0..self.n {
            let _ = writeln!(out, "  {} [shape=circle];", i + 1);
        }
        let mut aux = 0usize;
        for a in graph.arcs_sorted() {
            if a.tail.len() == 1 {
                let t = a.tail.min_element().unwrap();
                let _ = writeln!(out, "  {} -> {};", t + 1, a.head + 1);
            } else {
                let name = format!("a{aux}");
                aux += 1;
                let _ = writeln!(out, "  {name} [shape=point, width=0.05];");
                for t in a.tail.iter() {
                    let _ = writeln!(out, "  {} -> {name} [dir=none];", t + 1);
                }
                let _ = writeln!(out, "  {name} -> {};", a.head + 1);
            }
        }
        out.push_str("}\n");
        out
    }

    /// JSON form `{"n": …, "hyperarcs": [{"tail": [...], "head": …}]}` with
    /// 1-based nodes, hyperarcs in sorted order.
    pub fn to_json_value(&self) -> serde_json::Value {
        let arcs: Vec<serde_json::Value> = self
            .arcs_sorted()
            .iter()
            .map(|a| {
                json!({
                    "tail": a.tail.one_based(),
                    "head": a.head + 1,
                })
            })
            .collect();
        json!({ "n": self.n, "hyperarcs": arcs })
    }

    /// Views a digraph as a hypergraph with singleton tails. Self-loops are
    /// dropped (a hyperarc's head may not lie in its tail; loops never
    /// affect reachability).
    pub fn from_digraph(g: &Digraph) -> Hypergraph {
        let mut arcs = Vec::new();
        for (i, j) in g.edges() {
            if i != j {
                arcs.push(Hyperarc {
                    tail: NodeSet::singleton(i),
                    head: j,
                });
            }
        }
        Hypergraph { n: g.n(), arcs }
    }

    /// The digraph with the same arcs, if every tail is a singleton.
    pub fn to_digraph(&self) -> Option<Digraph> {
        let mut g = Digraph::new(self.n);
        for a in &self.arcs {
            if a.tail.len() != 1 {
                return None;
            }
            g.add_edge(a.tail.min_element().unwrap(), a.head);
        }
        Some(g)
    }
}

/// An oracle answering "is `(tail, {head})` a hyperarc?" on demand.
///
/// The closure is consulted only for well-formed queries (nonempty tail not
/// containing the head); every consultation is counted, so reachability
/// call budgets can be checked. The underlying test must be monotone in the
/// tail: enlarging the tail can only turn a "no" into a "yes".
pub struct HeadOracle<'a> {
    n: usize,
    calls: AtomicUsize,
    test: Box<dyn Fn(NodeSet, usize) -> bool + Send + Sync + 'a>,
}

impl<'a> HeadOracle<'a> {
    /// Wraps a hyperarc membership test over nodes `0..n`.
    pub fn new(
        n: usize,
        test: impl Fn(NodeSet, usize) -> bool + Send + Sync + 'a,
    ) -> Self {
        assert!(n <= MAX_NODES, "at most {MAX_NODES} nodes supported");
        HeadOracle {
            n,
            calls: AtomicUsize::new(0),
            test: Box::new(test),
        }
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether `(tail, {head})` is a hyperarc. Degenerate queries (empty
    /// tail, or head inside the tail) answer `false` without consulting the
    /// underlying test.
    pub fn is_hyperarc(&self, tail: NodeSet, head: usize) -> bool {
        assert!(head < self.n, "head out of range");
        if tail.is_empty() || tail.contains(head) {
            return false;
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        (self.test)(tail, head)
    }

    /// Number of times the underlying test has been consulted.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    /// Resets the consultation counter.
    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// Oracle-backed reachability closure: sweeps the non-members against
    /// the grown set until a full sweep adds nothing. Monotonicity of the
    /// test makes querying the whole current set sound, and bounds the
    /// number of consultations by `n²`.
    ///
    /// # Panics
    ///
    /// If `from` is empty or contains a node `≥ n`.
    pub fn reach(&self, from: NodeSet) -> NodeSet {
        assert!(!from.is_empty(), "reach needs a nonempty starting set");
        assert!(
            from.is_subset(NodeSet::full(self.n)),
            "starting set must consist of nodes"
        );
        let before = self.calls();
        let mut r = from;
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..self.n {
                if !r.contains(i) && self.is_hyperarc(r, i) {
                    r = r.insert(i);
                    changed = true;
                }
            }
        }
        let used = self.calls() - before;
        assert!(
            used <= self.n * self.n,
            "oracle reachability exceeded the n² call budget: {used}"
        );
        r
    }

    /// Whether `set` equals its own closure.
    pub fn is_invariant(&self, set: NodeSet) -> bool {
        self.reach(set) == set
    }

    /// Enumerates every hyperarc by exhaustive querying. Exponential in the
    /// node count; guarded to `n ≤ 20`.
    pub fn materialize(&self) -> Hypergraph {
        assert!(
            self.n <= 20,
            "materializing all hyperarcs is exponential; n ≤ 20 required"
        );
        let mut arcs = Vec::new();
        for head in 0..self.n {
            for tail in nonempty_subsets(self.n) {
                if !tail.contains(head) && self.is_hyperarc(tail, head) {
                    arcs.push(Hyperarc { tail, head });
                }
            }
        }
        Hypergraph { n: self.n, arcs }
    }
}

/// A directed graph on nodes `0..n`, adjacency stored as bitmasks.
/// Self-loops are allowed; parallel edges collapse.
#[derive(Clone, Debug, PartialEq)]
pub struct Digraph {
    n: usize,
    adj: Vec<NodeSet>,
}

impl Digraph {
    /// The graph on `n` nodes with no edges.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_NODES, "at most {MAX_NODES} nodes supported");
        Digraph {
            n,
            adj: vec![NodeSet::empty(); n],
        }
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds the edge `i → j`.
    ///
    /// # Panics
    ///
    /// If `i` or `j` is out of range.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "edge endpoint out of range");
        self.adj[i] = self.adj[i].insert(j);
    }

    /// Whether the edge `i → j` is present.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adj[i].contains(j)
    }

    /// Successors of `i`.
    pub fn successors(&self, i: usize) -> NodeSet {
        self.adj[i]
    }

    /// All edges in ascending `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.adj[i].iter().map(move |j| (i, j)))
    }

    /// The strongly connected components without outgoing edges, sorted by
    /// smallest member.
    pub fn final_classes(&self) -> Vec<NodeSet> {
        let sccs = self.sccs();
        let mut component_of = vec![usize::MAX; self.n];
        for (c, scc) in sccs.iter().enumerate() {
            for i in scc.iter() {
                component_of[i] = c;
            }
        }
        let mut finals: Vec<NodeSet> = sccs
            .iter()
            .filter(|scc| {
                scc.iter().all(|i| {
                    self.adj[i]
                        .iter()
                        .all(|j| component_of[j] == component_of[i])
                })
            })
            .copied()
            .collect();
        finals.sort_by_key(|c| c.min_element());
        finals
    }

    /// Strongly connected components (Tarjan).
    fn sccs(&self) -> Vec<NodeSet> {
        struct State<'g> {
            g: &'g Digraph,
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            next_index: usize,
            stack: Vec<usize>,
            on_stack: NodeSet,
            out: Vec<NodeSet>,
        }

        fn visit(s: &mut State, v: usize) {
            s.index[v] = Some(s.next_index);
            s.low[v] = s.next_index;
            s.next_index += 1;
            s.stack.push(v);
            s.on_stack = s.on_stack.insert(v);
            for w in s.g.adj[v].iter() {
                match s.index[w] {
                    None => {
                        visit(s, w);
                        s.low[v] = s.low[v].min(s.low[w]);
                    }
                    Some(wi) => {
                        if s.on_stack.contains(w) {
                            s.low[v] = s.low[v].min(wi);
                        }
                    }
                }
            }
            if s.low[v] == s.index[v].unwrap() {
                let mut scc = NodeSet::empty();
                loop {
                    let w = s.stack.pop().unwrap();
                    s.on_stack = s.on_stack.remove(w);
                    scc = scc.insert(w);
                    if w == v {
                        break;
                    }
                }
                s.out.push(scc);
            }
        }

        let mut s = State {
            g: self,
            index: vec![None; self.n],
            low: vec![0; self.n],
            next_index: 0,
            stack: Vec::new(),
            on_stack: NodeSet::empty(),
            out: Vec::new(),
        };
        for v in 0..self.n {
            if s.index[v].is_none() {
                visit(&mut s, v);
            }
        }
        s.out
    }

    /// Renders GraphViz DOT text, edges in ascending `(source, target)`
    /// order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for i in 0..self.n {
            let _ = writeln!(out, "  {} [shape=circle];", i + 1);
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  {} -> {};", i + 1, j + 1);
        }
        out.push_str("}\n");
        out
    }
}
