//! Finite oriented graphs with a fixed-point-free antipode.
//!
//! Edge ids come in pairs: `2k` is the `k`-th positive edge and `2k + 1` its
//! antipode, so `antipode(e) = e ^ 1`. Loops are allowed (a loop and its
//! antipode are still distinct edges).

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} is not in the graph")]
    DanglingEdge(EdgeId),
    #[error("vertex {0} is not in the graph")]
    DanglingVertex(VertexId),
    #[error("path is empty")]
    EmptyPath,
    #[error("path is not composable at position {0}")]
    NotComposable(usize),
    #[error("path backtracks at position {0}")]
    NotReduced(usize),
    #[error("no treeing edge can be reached")]
    NoTreeingEdge,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    ends: Vec<(VertexId, VertexId)>,
    out: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        self.labels.push(label.into());
        self.out.push(Vec::new());
        self.labels.len() - 1
    }

    /// Add a positive edge `s -> r` (and its antipode); returns the positive id.
    pub fn add_edge(&mut self, s: VertexId, r: VertexId) -> Result<EdgeId, GraphError> {
        for v in [s, r] {
            if v >= self.labels.len() {
                return Err(GraphError::DanglingVertex(v));
            }
        }
        let e = 2 * self.ends.len();
        self.ends.push((s, r));
        self.out[s].push(e);
        self.out[r].push(e + 1);
        Ok(e)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges, counting both orientations.
    pub fn edge_count(&self) -> usize {
        2 * self.ends.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        e < self.edge_count()
    }

    pub fn antipode(e: EdgeId) -> EdgeId {
        e ^ 1
    }

    pub fn is_positive(e: EdgeId) -> bool {
        e.is_multiple_of(2)
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        let (s, r) = self.ends[e / 2];
        if Self::is_positive(e) {
            s
        } else {
            r
        }
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.source(Self::antipode(e))
    }

    /// Edges with source `v`, in id order.
    pub fn star(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    fn check_edge(&self, e: EdgeId) -> Result<(), GraphError> {
        if self.contains_edge(e) {
            Ok(())
        } else {
            Err(GraphError::DanglingEdge(e))
        }
    }

    /// Non-backtracking continuations of `e`.
    fn successors(&self, e: EdgeId) -> impl Iterator<Item = EdgeId> + '_ {
        let back = Self::antipode(e);
        self.out[self.range(e)].iter().copied().filter(move |&f| f != back)
    }

    pub fn is_connected(&self) -> bool {
        if self.labels.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.labels.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.out[v] {
                let w = self.range(e);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Connected with no cycles (loops count as cycles).
    pub fn is_tree(&self) -> bool {
        !self.labels.is_empty() && self.is_connected() && self.ends.len() + 1 == self.labels.len()
    }

    /// Directed edges reachable from `e` by non-backtracking moves, with the
    /// BFS parent of each, never entering `forbidden`.
    fn reach(&self, e: EdgeId, forbidden: Option<EdgeId>) -> (Vec<EdgeId>, Vec<Option<EdgeId>>) {
        let mut parent = vec![None; self.edge_count()];
        let mut seen = vec![false; self.edge_count()];
        let mut order = vec![e];
        seen[e] = true;
        let mut i = 0;
        while i < order.len() {
            let f = order[i];
            i += 1;
            for g in self.successors(f) {
                if !seen[g] && Some(g) != forbidden {
                    seen[g] = true;
                    parent[g] = Some(f);
                    order.push(g);
                }
            }
        }
        (order, parent)
    }

    /// Half-graph of `e`: the subgraph spanned by the edges that end some
    /// reduced path starting with `e` and not using `antipode(e)`, closed under
    /// antipodes. Vertex and edge ids are those of `self`.
    pub fn half_graph(&self, e: EdgeId) -> Result<HalfGraph, GraphError> {
        self.check_edge(e)?;
        let (reached, _) = self.reach(e, Some(Self::antipode(e)));
        let mut edges = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for f in reached {
            edges.insert(f);
            edges.insert(Self::antipode(f));
            vertices.insert(self.source(f));
            vertices.insert(self.range(f));
        }
        Ok(HalfGraph { vertices, edges })
    }

    /// Whether `e` is a treeing edge, decided by searching for a reduced path
    /// from `s(e)` back to `s(e)` that starts with `e`.
    ///
    /// The search runs over directed-edge states and visits each once. This
    /// loses nothing: if a shortest such return `e_1 .. e_L` had `e_i = e_j`
    /// with `i < j`, then `e_1 .. e_i e_{j+1} .. e_L` would be a shorter one
    /// (it is still reduced because `e_{j+1} != antipode(e_j) = antipode(e_i)`).
    /// So some return uses each directed edge at most once, and it is found
    /// by plain reachability, in `O(|E|)` per edge.
    pub fn is_treeing_edge(&self, e: EdgeId) -> Result<bool, GraphError> {
        self.check_edge(e)?;
        let target = self.source(e);
        let (reached, _) = self.reach(e, None);
        Ok(!reached.iter().any(|&f| self.range(f) == target))
    }

    /// Treeing flags for every edge.
    pub fn treeing_edges(&self) -> Vec<bool> {
        (0..self.edge_count()).map(|e| self.is_treeing_edge(e).unwrap_or(false)).collect()
    }

    /// The half-tree of `e` when `e` is treeing.
    pub fn half_tree(&self, e: EdgeId) -> Result<Option<HalfGraph>, GraphError> {
        if self.is_treeing_edge(e)? {
            Ok(Some(self.half_graph(e)?))
        } else {
            Ok(None)
        }
    }

    pub fn check_path(&self, p: &Path) -> Result<(), GraphError> {
        if p.edges.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        for &e in &p.edges {
            self.check_edge(e)?;
        }
        for (k, w) in p.edges.windows(2).enumerate() {
            if self.range(w[0]) != self.source(w[1]) {
                return Err(GraphError::NotComposable(k));
            }
        }
        Ok(())
    }

    /// Shortest reduced extension of `p` whose last edge is treeing. Among the
    /// shortest, the one whose last edge has the smallest id wins.
    pub fn extend_to_treeing(&self, p: &Path) -> Result<Path, GraphError> {
        self.check_path(p)?;
        if let Some(k) = p.first_backtrack() {
            return Err(GraphError::NotReduced(k));
        }
        let treeing = self.treeing_edges();
        let last = *p.edges.last().expect("nonempty");
        if treeing[last] {
            return Ok(p.clone());
        }
        let (order, parent) = self.reach(last, None);
        // BFS order is by distance, so take the first layer holding a treeing edge
        let mut depth = vec![0usize; self.edge_count()];
        for &f in &order[1..] {
            depth[f] = depth[parent[f].expect("reached")] + 1;
        }
        let best = order[1..]
            .iter()
            .filter(|&&f| treeing[f])
            .min_by_key(|&&f| (depth[f], f))
            .copied()
            .ok_or(GraphError::NoTreeingEdge)?;
        let mut tail = vec![best];
        let mut cur = best;
        while let Some(prev) = parent[cur] {
            if prev == last {
                break;
            }
            tail.push(prev);
            cur = prev;
        }
        tail.reverse();
        let mut edges = p.edges.clone();
        edges.extend(tail);
        Ok(Path { edges })
    }

    /// DOT rendering: one line per positive edge; edges whose positive
    /// orientation is treeing are bold, and when only the antipode is
    /// treeing the arrow is reversed as well.
    pub fn to_dot(&self, name: &str) -> String {
        let treeing = self.treeing_edges();
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        for (v, label) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"{label}\"];");
        }
        for (k, &(a, b)) in self.ends.iter().enumerate() {
            let e = 2 * k;
            let attr = match (treeing[e], treeing[e + 1]) {
                (true, _) => " [style=bold]",
                (false, true) => " [style=bold, dir=back]",
                _ => "",
            };
            let _ = writeln!(s, "  v{a} -> v{b}{attr};");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfGraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl HalfGraph {
    pub fn is_tree(&self) -> bool {
        // connected by construction, so a tree iff |E+| = |V| - 1
        self.edges.len() / 2 + 1 == self.vertices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn new(edges: Vec<EdgeId>) -> Self {
        Path { edges }
    }

    pub fn first_backtrack(&self) -> Option<usize> {
        self.edges.windows(2).position(|w| w[1] == Graph::antipode(w[0]))
    }

    pub fn is_reduced(&self) -> bool {
        self.first_backtrack().is_none()
    }

    pub fn last(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }
}

/// Whether `p` has no backtracking; errors when `p` is not a path of `g`.
pub fn is_reduced(g: &Graph, p: &Path) -> Result<bool, GraphError> {
    g.check_path(p)?;
    Ok(p.is_reduced())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(format!("c{i}"));
        }
        for i in 0..n {
            g.add_edge(i, (i + 1) % n).unwrap();
        }
        g
    }

    /// Triangle 0-1-2 with a pendant path 2 -> 3 -> 4.
    fn lollipop() -> Graph {
        let mut g = cycle(3);
        g.add_vertex("p3");
        g.add_vertex("p4");
        g.add_edge(2, 3).unwrap();
        g.add_edge(3, 4).unwrap();
        g
    }

    /// Brute force: is there a reduced return to `s(e)` starting with `e`,
    /// of length at most `bound`? Iterative deepening over all reduced paths.
    pub(crate) fn brute_return(g: &Graph, e: EdgeId, bound: usize) -> Option<Vec<EdgeId>> {
        fn dfs(g: &Graph, path: &mut Vec<EdgeId>, target: VertexId, depth: usize) -> bool {
            let last = *path.last().unwrap();
            if g.range(last) == target {
                return true;
            }
            if depth == 0 {
                return false;
            }
            for &f in g.star(g.range(last)) {
                if f == Graph::antipode(last) {
                    continue;
                }
                path.push(f);
                if dfs(g, path, target, depth - 1) {
                    return true;
                }
                path.pop();
            }
            false
        }
        for d in 0..bound {
            let mut path = vec![e];
            if dfs(g, &mut path, g.source(e), d) {
                return Some(path);
            }
        }
        None
    }

    #[test]
    fn reduced_examples() {
        let g = cycle(4);
        assert!(!is_reduced(&g, &Path::new(vec![0, 1])).unwrap());
        assert!(is_reduced(&g, &Path::new(vec![2])).unwrap());
        assert!(is_reduced(&g, &Path::new(vec![0, 2, 4, 6])).unwrap());
        assert!(is_reduced(&g, &Path::new(vec![0, 4])).is_err());
    }

    #[test]
    fn treeing_examples() {
        let mut tree = Graph::new();
        for i in 0..5 {
            tree.add_vertex(format!("t{i}"));
        }
        for (a, b) in [(0, 1), (1, 2), (1, 3), (3, 4)] {
            tree.add_edge(a, b).unwrap();
        }
        assert!((0..tree.edge_count()).all(|e| tree.is_treeing_edge(e).unwrap()));
        let c5 = cycle(5);
        assert!((0..c5.edge_count()).all(|e| !c5.is_treeing_edge(e).unwrap()));
        let l = lollipop();
        // edge 6 is 2 -> 3, pointing away from the triangle; 7 points into it
        assert!(l.is_treeing_edge(6).unwrap());
        assert!(!l.is_treeing_edge(7).unwrap());
        for e in 0..l.edge_count() {
            assert_eq!(l.is_treeing_edge(e).unwrap(), brute_return(&l, e, 2 * l.edge_count()).is_none());
        }
        assert!(l.is_treeing_edge(99).is_err());
        // a loop is never treeing
        let mut lp = Graph::new();
        lp.add_vertex("a");
        lp.add_edge(0, 0).unwrap();
        assert!(!lp.is_treeing_edge(0).unwrap());
    }

    #[test]
    fn half_graph_examples() {
        let l = lollipop();
        let h = l.half_graph(6).unwrap();
        assert_eq!(h.vertices, BTreeSet::from([2, 3, 4]));
        assert_eq!(h.edges, BTreeSet::from([6, 7, 8, 9]));
        assert!(h.is_tree());
        let c = cycle(5);
        let h = c.half_graph(0).unwrap();
        assert_eq!(h.vertices.len(), 5);
        assert_eq!(h.edges.len(), 10);
        let mut single = Graph::new();
        single.add_vertex("a");
        single.add_vertex("b");
        single.add_edge(0, 1).unwrap();
        let h = single.half_graph(0).unwrap();
        assert_eq!(h.edges, BTreeSet::from([0, 1]));
        assert_eq!(h.vertices, BTreeSet::from([0, 1]));
    }

    #[test]
    fn extend_examples() {
        let l = lollipop();
        let p = Path::new(vec![6]);
        assert_eq!(l.extend_to_treeing(&p).unwrap(), p);
        // start on the triangle edge 0 -> 1: go 1 -> 2 and leave by the pendant edge
        let ext = l.extend_to_treeing(&Path::new(vec![0])).unwrap();
        assert_eq!(ext.edges, vec![0, 2, 6]);
        // brute force over all reduced extensions of length <= 4
        let mut best: Option<Vec<EdgeId>> = None;
        let mut stack = vec![vec![0usize]];
        while let Some(p) = stack.pop() {
            let last = *p.last().unwrap();
            if l.is_treeing_edge(last).unwrap() {
                if best.as_ref().is_none_or(|b| p.len() < b.len()) {
                    best = Some(p.clone());
                }
                continue;
            }
            if p.len() < 5 {
                for &f in l.star(l.range(last)) {
                    if f != Graph::antipode(last) {
                        let mut q = p.clone();
                        q.push(f);
                        stack.push(q);
                    }
                }
            }
        }
        assert_eq!(best.unwrap().len(), ext.edges.len());
        assert_eq!(cycle(4).extend_to_treeing(&Path::new(vec![0])), Err(GraphError::NoTreeingEdge));
        assert_eq!(l.extend_to_treeing(&Path::new(vec![0, 1])), Err(GraphError::NotReduced(0)));
    }

    #[test]
    fn dot_marks_treeing_edges() {
        let dot = lollipop().to_dot("G");
        assert!(dot.contains("v2 -> v3 [style=bold];"));
        assert!(dot.contains("v0 -> v1;"));
        assert!(dot.starts_with("digraph G {"));
    }

    pub(crate) fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..=12).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..=15).prop_map(move |es| {
                let mut g = Graph::new();
                for i in 0..n {
                    g.add_vertex(format!("x{i}"));
                }
                for (a, b) in es {
                    g.add_edge(a, b).unwrap();
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn half_graph_union_law(g in arb_graph()) {
            for e in 0..g.edge_count() {
                let h = g.half_graph(e).unwrap();
                let hb = g.half_graph(Graph::antipode(e)).unwrap();
                // vertices of the component of e
                let mut comp = BTreeSet::from([g.source(e)]);
                let mut queue = vec![g.source(e)];
                while let Some(v) = queue.pop() {
                    for &f in g.star(v) {
                        if comp.insert(g.range(f)) { queue.push(g.range(f)); }
                    }
                }
                let union: BTreeSet<_> = h.vertices.union(&hb.vertices).copied().collect();
                prop_assert_eq!(union, comp);
                prop_assert_eq!(g.is_treeing_edge(e).unwrap(), h.is_tree());
            }
        }

        #[test]
        fn treeing_matches_brute_force(g in arb_graph()) {
            for e in 0..g.edge_count() {
                let fast = g.is_treeing_edge(e).unwrap();
                let ret = brute_return(&g, e, 2 * g.edge_count());
                prop_assert_eq!(fast, ret.is_none());
                if let Some(c) = ret {
                    // c and the free reduction of cc are distinct reduced
                    // paths from e with the same range
                    let mut cc: Vec<EdgeId> = Vec::new();
                    for &f in c.iter().chain(c.iter()) {
                        if cc.last() == Some(&Graph::antipode(f)) { cc.pop(); } else { cc.push(f); }
                    }
                    prop_assert_eq!(cc[0], e);
                    prop_assert!(cc != c);
                    prop_assert_eq!(g.range(*cc.last().unwrap()), g.range(*c.last().unwrap()));
                } else {
                    // all reduced paths from e stay in a finite tree: ranges are distinct
                    let mut ranges = BTreeSet::new();
                    let mut stack = vec![vec![e]];
                    while let Some(p) = stack.pop() {
                        let last = *p.last().unwrap();
                        prop_assert!(ranges.insert(g.range(last)));
                        for &f in g.star(g.range(last)) {
                            if f != Graph::antipode(last) {
                                let mut q = p.clone();
                                q.push(f);
                                stack.push(q);
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn extension_is_reduced_and_treeing(g in arb_graph(), start in 0usize..30) {
            if g.edge_count() == 0 { return Ok(()); }
            let e = start % g.edge_count();
            match g.extend_to_treeing(&Path::new(vec![e])) {
                Ok(p) => {
                    prop_assert!(p.is_reduced());
                    prop_assert_eq!(p.edges[0], e);
                    g.check_path(&p).unwrap();
                    prop_assert!(g.is_treeing_edge(p.last().unwrap()).unwrap());
                }
                Err(GraphError::NoTreeingEdge) => {}
                Err(other) => prop_assert!(false, "{other}"),
            }
        }
    }
}
