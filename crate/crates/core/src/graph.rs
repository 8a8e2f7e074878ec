//! Directed open graphs given by partial incidence maps.
//!
//! Edge `e` *enters* node `x` when it is an inport of `x`, and *exits* `x`
//! when it is an export of `x`. An edge attached to nothing on one side is a
//! port of the graph on that side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Valence {
    pub inputs: usize,
    pub outputs: usize,
}

impl Valence {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Valence { inputs, outputs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    edges: usize,
    nodes: usize,
    enters: Vec<Option<usize>>,
    exits: Vec<Option<usize>>,
}

#[derive(Deserialize)]
struct RawGraph {
    edges: usize,
    nodes: usize,
    enters: Vec<Option<usize>>,
    exits: Vec<Option<usize>>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        if r.enters.len() != r.edges || r.exits.len() != r.edges {
            return Err(Error::InvalidGraph("incidence length differs from edge count".into()));
        }
        Graph::new(r.nodes, r.enters, r.exits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    pub valence: Valence,
    pub inports: Vec<usize>,
    pub exports: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathTag {
    Open,
    DeadEnds,
    SemiOpenFromNode,
    SemiOpenFromEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathKind {
    pub tag: PathTag,
    pub length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Disconnected,
    XDominatesY,
    YDominatesX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dominance {
    pub relation: Relation,
    /// Longest monotone dead-ends path between the two nodes (0 if none).
    pub max_path_length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
    pub graph: Graph,
}

impl Graph {
    pub fn new(nodes: usize, enters: Vec<Option<usize>>, exits: Vec<Option<usize>>) -> Result<Self> {
        if enters.len() != exits.len() {
            return Err(Error::SizeMismatch { left: enters.len(), right: exits.len() });
        }
        for &x in enters.iter().chain(exits.iter()).flatten() {
            if x >= nodes {
                return Err(Error::NodeOutOfRange { node: x, count: nodes });
            }
        }
        Ok(Graph { edges: enters.len(), nodes, enters, exits })
    }

    pub fn empty() -> Self {
        Graph { edges: 0, nodes: 0, enters: vec![], exits: vec![] }
    }

    /// One node; the first `n` edges enter it, the last `m` exit it.
    pub fn corolla(v: Valence) -> Self {
        let mut enters = vec![Some(0); v.inputs];
        enters.extend(std::iter::repeat(None).take(v.outputs));
        let mut exits = vec![None; v.inputs];
        exits.extend(std::iter::repeat(Some(0)).take(v.outputs));
        Graph { edges: v.inputs + v.outputs, nodes: 1, enters, exits }
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn enters(&self, e: usize) -> Option<usize> {
        self.enters[e]
    }

    pub fn exits(&self, e: usize) -> Option<usize> {
        self.exits[e]
    }

    fn check_node(&self, x: usize) -> Result<()> {
        if x >= self.nodes {
            return Err(Error::NodeOutOfRange { node: x, count: self.nodes });
        }
        Ok(())
    }

    /// Edges entering `x`, by index.
    pub fn inputs_of(&self, x: usize) -> Vec<usize> {
        (0..self.edges).filter(|&e| self.enters[e] == Some(x)).collect()
    }

    /// Edges exiting `x`, by index.
    pub fn outputs_of(&self, x: usize) -> Vec<usize> {
        (0..self.edges).filter(|&e| self.exits[e] == Some(x)).collect()
    }

    pub fn is_inner(&self, e: usize) -> bool {
        self.enters[e].is_some() && self.exits[e].is_some()
    }

    pub fn inner_edges(&self) -> Vec<usize> {
        (0..self.edges).filter(|&e| self.is_inner(e)).collect()
    }

    pub fn residue(&self) -> Residue {
        let inports: Vec<usize> = (0..self.edges).filter(|&e| self.exits[e].is_none()).collect();
        let exports: Vec<usize> = (0..self.edges).filter(|&e| self.enters[e].is_none()).collect();
        Residue { valence: Valence::new(inports.len(), exports.len()), inports, exports }
    }

    pub fn node_valence(&self, x: usize) -> Result<Valence> {
        self.check_node(x)?;
        let i = self.enters.iter().filter(|&&n| n == Some(x)).count();
        let o = self.exits.iter().filter(|&&n| n == Some(x)).count();
        Ok(Valence::new(i, o))
    }

    /// Successor lists of the node digraph, one entry per inner edge.
    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.nodes];
        for e in 0..self.edges {
            if let (Some(u), Some(v)) = (self.exits[e], self.enters[e]) {
                succ[u].push(v);
            }
        }
        succ
    }

    /// A topological order of the nodes, or `None` if the node digraph has a
    /// cycle (self-loops included).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let succ = self.successors();
        let mut indeg = vec![0; self.nodes];
        for s in &succ {
            for &v in s {
                indeg[v] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..self.nodes).rev().filter(|&x| indeg[x] == 0).collect();
        let mut out = Vec::with_capacity(self.nodes);
        while let Some(x) = ready.pop() {
            out.push(x);
            for &v in succ[x].iter() {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(v);
                }
            }
        }
        (out.len() == self.nodes).then_some(out)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Connected components. An edge attached to no node is a component on
    /// its own.
    pub fn connected_components(&self) -> Vec<Component> {
        let mut uf = UnionFind::new(self.nodes + self.edges);
        for e in 0..self.edges {
            for x in [self.enters[e], self.exits[e]].into_iter().flatten() {
                uf.union(self.nodes + e, x);
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for item in 0..self.nodes + self.edges {
            let r = uf.find(item);
            let k = match roots.iter().position(|&q| q == r) {
                Some(k) => k,
                None => {
                    roots.push(r);
                    groups.push((vec![], vec![]));
                    roots.len() - 1
                }
            };
            if item < self.nodes {
                groups[k].0.push(item);
            } else {
                groups[k].1.push(item - self.nodes);
            }
        }
        groups
            .into_iter()
            .map(|(nodes, edges)| {
                let graph = self.subgraph(&nodes, &edges);
                Component { nodes, edges, graph }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// The subgraph on the given nodes and edges, renumbered in the given
    /// order. Incidences to nodes outside `nodes` are dropped.
    pub fn subgraph(&self, nodes: &[usize], edges: &[usize]) -> Graph {
        let idx = |x: usize| nodes.iter().position(|&y| y == x);
        let enters = edges.iter().map(|&e| self.enters[e].and_then(idx)).collect();
        let exits = edges.iter().map(|&e| self.exits[e].and_then(idx)).collect();
        Graph { edges: edges.len(), nodes: nodes.len(), enters, exits }
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = |x: &Option<usize>| x.map(|v| v + self.nodes);
        let mut enters = self.enters.clone();
        enters.extend(other.enters.iter().map(shift));
        let mut exits = self.exits.clone();
        exits.extend(other.exits.iter().map(shift));
        Graph { edges: self.edges + other.edges, nodes: self.nodes + other.nodes, enters, exits }
    }

    /// Common inner edges: edges exiting `u` and entering `v`.
    pub fn cie(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SameNode);
        }
        Ok((0..self.edges).filter(|&e| self.exits[e] == Some(u) && self.enters[e] == Some(v)).collect())
    }

    /// Longest monotone dead-ends path from `u` to `v`, if any.
    pub fn longest_path(&self, u: usize, v: usize) -> Result<Option<usize>> {
        let order = self.topological_order().ok_or(Error::Cyclic)?;
        let succ = self.successors();
        let mut best: Vec<Option<usize>> = vec![None; self.nodes];
        best[u] = Some(0);
        for &x in &order {
            if let Some(d) = best[x] {
                for &y in &succ[x] {
                    best[y] = Some(best[y].map_or(d + 1, |b| b.max(d + 1)));
                }
            }
        }
        Ok(if u == v { None } else { best[v] })
    }

    pub fn dominance(&self, x: usize, y: usize) -> Result<Dominance> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x == y {
            return Err(Error::SameNode);
        }
        if let Some(l) = self.longest_path(x, y)? {
            return Ok(Dominance { relation: Relation::XDominatesY, max_path_length: l });
        }
        if let Some(l) = self.longest_path(y, x)? {
            return Ok(Dominance { relation: Relation::YDominatesX, max_path_length: l });
        }
        Ok(Dominance { relation: Relation::Disconnected, max_path_length: 0 })
    }

    /// Number of monotone open paths from each edge to `root`.
    fn paths_to(&self, root: usize) -> Option<Vec<usize>> {
        let order = self.topological_order()?;
        let mut through_node = vec![0usize; self.nodes];
        let mut from_edge = vec![0usize; self.edges];
        from_edge[root] = 1;
        for &x in order.iter().rev() {
            let total: usize = self.outputs_of(x).iter().map(|&e| edge_paths(self, e, root, &through_node)).sum();
            through_node[x] = total;
        }
        for e in 0..self.edges {
            from_edge[e] = edge_paths(self, e, root, &through_node);
        }
        Some(from_edge)
    }

    pub fn is_tree(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        let exports = self.residue().exports;
        if exports.len() != 1 {
            return false;
        }
        match self.paths_to(exports[0]) {
            Some(counts) => counts.iter().all(|&c| c == 1),
            None => false,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  rankdir=TB;\n");
        for x in 0..self.nodes {
            s.push_str(&format!("  n{x} [shape=circle,label=\"{}\"];\n", x + 1));
        }
        push_edges_dot(&mut s, self, |e| format!("{}", e + 1));
        s.push_str("}\n");
        s
    }
}

fn edge_paths(g: &Graph, e: usize, root: usize, through_node: &[usize]) -> usize {
    if e == root {
        1
    } else {
        match g.enters(e) {
            Some(x) => through_node[x],
            None => 0,
        }
    }
}

pub(crate) fn push_edges_dot(s: &mut String, g: &Graph, label: impl Fn(usize) -> String) {
    for e in 0..g.edge_count() {
        let from = match g.exits(e) {
            Some(x) => format!("n{x}"),
            None => {
                s.push_str(&format!("  in{e} [shape=point];\n"));
                format!("in{e}")
            }
        };
        let to = match g.enters(e) {
            Some(x) => format!("n{x}"),
            None => {
                s.push_str(&format!("  out{e} [shape=point];\n"));
                format!("out{e}")
            }
        };
        s.push_str(&format!("  {from} -> {to} [label=\"{}\"];\n", label(e)));
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.size.push(1);
        self.parent.len() - 1
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn classes(&mut self) -> usize {
        (0..self.len()).filter(|&x| self.find(x) == x).count()
    }
}
