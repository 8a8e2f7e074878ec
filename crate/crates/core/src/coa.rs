//! Completely ordered acyclic C-graphs.
//!
//! A coa graph is a [`Graph`] with edge labels, a covering order (the inputs
//! and outputs of every node listed in order), a port order on the graph's
//! own inports and exports, and a node order. `node_order[i]` is the node at
//! position `i + 1`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{push_edges_dot, Graph, Valence};
use crate::perm::{twist, Permutation, TotalOrder};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CValence {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl CValence {
    pub fn new<S: Into<String>>(inputs: Vec<S>, outputs: Vec<S>) -> Self {
        CValence {
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }

    /// `n` inputs and `m` outputs, all coloured `c`.
    pub fn mono(c: &str, n: usize, m: usize) -> Self {
        CValence { inputs: vec![c.to_string(); n], outputs: vec![c.to_string(); m] }
    }

    pub fn shape(&self) -> Valence {
        Valence::new(self.inputs.len(), self.outputs.len())
    }

    pub fn relabel(&self, f: &impl Fn(&str) -> String) -> CValence {
        CValence {
            inputs: self.inputs.iter().map(|c| f(c)).collect(),
            outputs: self.outputs.iter().map(|c| f(c)).collect(),
        }
    }

    pub fn colours(&self) -> impl Iterator<Item = &String> {
        self.inputs.iter().chain(self.outputs.iter())
    }
}

impl fmt::Display for CValence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([{}],[{}])", self.inputs.join(","), self.outputs.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arity {
    pub node_valences: Vec<CValence>,
    pub residue: CValence,
}

impl Arity {
    pub fn new(node_valences: Vec<CValence>, residue: CValence) -> Self {
        Arity { node_valences, residue }
    }

    /// `Σ inputs − |residue inputs|` when it equals `Σ outputs − |residue
    /// outputs|`; for a graph of this arity it is the number of inner edges
    /// minus the number of free edges.
    pub fn balance(&self) -> Option<isize> {
        let ins: usize = self.node_valences.iter().map(|v| v.inputs.len()).sum();
        let outs: usize = self.node_valences.iter().map(|v| v.outputs.len()).sum();
        let a = ins as isize - self.residue.inputs.len() as isize;
        let b = outs as isize - self.residue.outputs.len() as isize;
        (a == b).then_some(a)
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.node_valences.iter().map(|v| v.to_string()).collect();
        write!(f, "({};{})", nodes.join(","), self.residue)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCoa")]
pub struct CoaGraph {
    graph: Graph,
    labels: Vec<String>,
    node_in: Vec<Vec<usize>>,
    node_out: Vec<Vec<usize>>,
    port_in: Vec<usize>,
    port_out: Vec<usize>,
    node_order: Vec<usize>,
}

#[derive(Deserialize)]
struct RawCoa {
    graph: Graph,
    labels: Vec<String>,
    node_in: Vec<Vec<usize>>,
    node_out: Vec<Vec<usize>>,
    port_in: Vec<usize>,
    port_out: Vec<usize>,
    node_order: Vec<usize>,
}

impl TryFrom<RawCoa> for CoaGraph {
    type Error = Error;
    fn try_from(r: RawCoa) -> Result<Self> {
        CoaGraph::new(r.graph, r.labels, r.node_in, r.node_out, r.port_in, r.port_out, r.node_order)
    }
}

/// An isomorphism of coa graphs: `nodes[x]` and `edges[e]` are the images in
/// the target graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoaIso {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

fn same_elements(xs: &[usize], ys: &[usize]) -> bool {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn is_bijection(xs: &[usize], n: usize) -> bool {
    same_elements(xs, &(0..n).collect::<Vec<_>>())
}

impl CoaGraph {
    pub fn new(
        graph: Graph,
        labels: Vec<String>,
        node_in: Vec<Vec<usize>>,
        node_out: Vec<Vec<usize>>,
        port_in: Vec<usize>,
        port_out: Vec<usize>,
        node_order: Vec<usize>,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGraph(m.to_string()));
        if !graph.is_acyclic() {
            return Err(Error::Cyclic);
        }
        if labels.len() != graph.edge_count() {
            return bad("one label per edge required");
        }
        let n = graph.node_count();
        if node_in.len() != n || node_out.len() != n {
            return bad("one covering order per node required");
        }
        for x in 0..n {
            if !same_elements(&node_in[x], &graph.inputs_of(x)) {
                return bad("input order does not list the inputs of its node");
            }
            if !same_elements(&node_out[x], &graph.outputs_of(x)) {
                return bad("output order does not list the outputs of its node");
            }
        }
        let res = graph.residue();
        if !same_elements(&port_in, &res.inports) || !same_elements(&port_out, &res.exports) {
            return bad("port order does not list the ports of the graph");
        }
        if !is_bijection(&node_order, n) {
            return bad("node order is not a bijection onto the nodes");
        }
        Ok(CoaGraph { graph, labels, node_in, node_out, port_in, port_out, node_order })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn node_in(&self, x: usize) -> &[usize] {
        &self.node_in[x]
    }

    pub fn node_out(&self, x: usize) -> &[usize] {
        &self.node_out[x]
    }

    pub fn port_in(&self) -> &[usize] {
        &self.port_in
    }

    pub fn port_out(&self) -> &[usize] {
        &self.port_out
    }

    pub fn node_order(&self) -> &[usize] {
        &self.node_order
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// The node at (one-indexed) position `i` of the node order.
    pub fn node_at(&self, i: usize) -> usize {
        self.node_order[i - 1]
    }

    /// One-indexed position of node `x` in the node order.
    pub fn position_of(&self, x: usize) -> usize {
        self.node_order.iter().position(|&y| y == x).expect("node in order") + 1
    }

    pub fn untwisted_corolla(v: &CValence) -> CoaGraph {
        let (n, m) = (v.inputs.len(), v.outputs.len());
        let graph = Graph::corolla(Valence::new(n, m));
        let labels = v.colours().cloned().collect();
        CoaGraph {
            graph,
            labels,
            node_in: vec![(0..n).collect()],
            node_out: vec![(n..n + m).collect()],
            port_in: (0..n).collect(),
            port_out: (n..n + m).collect(),
            node_order: vec![0],
        }
    }

    /// A graph with no nodes, only free edges: the `k`-th export is the
    /// `perm(k)`-th inport.
    pub fn wiring(colours: &[String], perm: &Permutation) -> Result<CoaGraph> {
        if perm.len() != colours.len() {
            return Err(Error::SizeMismatch { left: perm.len(), right: colours.len() });
        }
        let n = colours.len();
        let graph = Graph::new(0, vec![None; n], vec![None; n])?;
        let port_out = (1..=n).map(|k| perm.apply(k) - 1).collect();
        CoaGraph::new(graph, colours.to_vec(), vec![], vec![], (0..n).collect(), port_out, vec![])
    }

    pub fn c_valence_of_node(&self, x: usize) -> Result<CValence> {
        if x >= self.node_count() {
            return Err(Error::NodeOutOfRange { node: x, count: self.node_count() });
        }
        Ok(CValence {
            inputs: self.node_in[x].iter().map(|&e| self.labels[e].clone()).collect(),
            outputs: self.node_out[x].iter().map(|&e| self.labels[e].clone()).collect(),
        })
    }

    pub fn residue_valence(&self) -> CValence {
        CValence {
            inputs: self.port_in.iter().map(|&e| self.labels[e].clone()).collect(),
            outputs: self.port_out.iter().map(|&e| self.labels[e].clone()).collect(),
        }
    }

    pub fn arity(&self) -> Arity {
        Arity {
            node_valences: self.node_order.iter().map(|&x| self.c_valence_of_node(x).unwrap()).collect(),
            residue: self.residue_valence(),
        }
    }

    /// Twist between the order `cie(u,v)` inherits as outputs of `u` and the
    /// order it inherits as inputs of `v`.
    pub fn node_twist(&self, u: usize, v: usize) -> Result<Permutation> {
        let cie = self.graph.cie(u, v)?;
        if cie.is_empty() {
            return Err(Error::EmptyCie);
        }
        let gu: Vec<usize> = self.node_out[u].iter().copied().filter(|e| cie.contains(e)).collect();
        let gv: Vec<usize> = self.node_in[v].iter().copied().filter(|e| cie.contains(e)).collect();
        twist(&TotalOrder::new(gu)?, &TotalOrder::new(gv)?)
    }

    /// (input-twist, output-twist) of the graph in `v`.
    pub fn io_twist(&self, v: usize) -> Result<(Permutation, Permutation)> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange { node: v, count: self.node_count() });
        }
        let shared_in = |xs: &[usize]| -> Vec<usize> {
            xs.iter().copied().filter(|&e| self.graph.exits(e).is_none() && self.graph.enters(e) == Some(v)).collect()
        };
        let shared_out = |xs: &[usize]| -> Vec<usize> {
            xs.iter().copied().filter(|&e| self.graph.enters(e).is_none() && self.graph.exits(e) == Some(v)).collect()
        };
        let iota = TotalOrder::new(shared_in(&self.port_in))?;
        let iota_p = TotalOrder::new(shared_in(&self.node_in[v]))?;
        let omega = TotalOrder::new(shared_out(&self.port_out))?;
        let omega_p = TotalOrder::new(shared_out(&self.node_out[v]))?;
        Ok((twist(&iota_p, &iota)?, twist(&omega_p, &omega)?))
    }

    pub fn is_untwisted(&self) -> bool {
        let n = self.node_count();
        for v in 0..n {
            let (a, b) = self.io_twist(v).expect("valid node");
            if !a.is_identity() || !b.is_identity() {
                return false;
            }
            for u in 0..n {
                if u != v {
                    if let Ok(t) = self.node_twist(u, v) {
                        if !t.is_identity() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `γ*G`: the node order becomes `σ∘γ`.
    pub fn permute_node_order(&self, gamma: &Permutation) -> Result<CoaGraph> {
        if gamma.len() != self.node_count() {
            return Err(Error::SizeMismatch { left: gamma.len(), right: self.node_count() });
        }
        let mut g = self.clone();
        g.node_order = gamma.permute(&self.node_order)?;
        Ok(g)
    }

    /// The same graph with new covering and port orders.
    pub fn with_orders(
        &self,
        node_in: Vec<Vec<usize>>,
        node_out: Vec<Vec<usize>>,
        port_in: Vec<usize>,
        port_out: Vec<usize>,
    ) -> Result<CoaGraph> {
        CoaGraph::new(self.graph.clone(), self.labels.clone(), node_in, node_out, port_in, port_out, self.node_order.clone())
    }

    /// `σ*`: the `t`-th inport becomes the `σ(t)`-th one.
    pub fn permute_inports(&self, sigma: &Permutation) -> Result<CoaGraph> {
        let mut g = self.clone();
        g.port_in = sigma.permute(&self.port_in)?;
        Ok(g)
    }

    /// `σ_*`: the `i`-th export moves to position `σ(i)`.
    pub fn permute_exports(&self, sigma: &Permutation) -> Result<CoaGraph> {
        let mut g = self.clone();
        g.port_out = sigma.inverse().permute(&self.port_out)?;
        Ok(g)
    }

    /// Two nodes `(a;b)` then `(b;c)`, the outputs of the first feeding the
    /// inputs of the second in order.
    pub fn vertical_frame(a: &[String], b: &[String], c: &[String]) -> CoaGraph {
        let (na, nb, nc) = (a.len(), b.len(), c.len());
        let mut enters = vec![Some(0); na];
        enters.extend(std::iter::repeat(Some(1)).take(nb));
        enters.extend(std::iter::repeat(None).take(nc));
        let mut exits = vec![None; na];
        exits.extend(std::iter::repeat(Some(0)).take(nb));
        exits.extend(std::iter::repeat(Some(1)).take(nc));
        let graph = Graph::new(2, enters, exits).expect("frame");
        let labels = a.iter().chain(b).chain(c).cloned().collect();
        let ins: Vec<usize> = (0..na).collect();
        let mid: Vec<usize> = (na..na + nb).collect();
        let outs: Vec<usize> = (na + nb..na + nb + nc).collect();
        CoaGraph::new(graph, labels, vec![ins.clone(), mid.clone()], vec![mid, outs.clone()], ins, outs, vec![0, 1])
            .expect("frame")
    }

    /// Two nodes side by side with valences `v` and `w`; residue `v ⊠ w`.
    pub fn horizontal_frame(v: &CValence, w: &CValence) -> CoaGraph {
        let mut enters = Vec::new();
        let mut exits = Vec::new();
        let mut labels = Vec::new();
        let mut node_in = vec![vec![], vec![]];
        let mut node_out = vec![vec![], vec![]];
        let mut port_in = Vec::new();
        let mut port_out = Vec::new();
        for (x, val) in [v, w].into_iter().enumerate() {
            for c in &val.inputs {
                node_in[x].push(enters.len());
                port_in.push(enters.len());
                enters.push(Some(x));
                exits.push(None);
                labels.push(c.clone());
            }
        }
        for (x, val) in [v, w].into_iter().enumerate() {
            for c in &val.outputs {
                node_out[x].push(enters.len());
                port_out.push(enters.len());
                enters.push(None);
                exits.push(Some(x));
                labels.push(c.clone());
            }
        }
        let graph = Graph::new(2, enters, exits).expect("frame");
        CoaGraph::new(graph, labels, node_in, node_out, port_in, port_out, vec![0, 1]).expect("frame")
    }

    /// Node and edge renumbering onto the canonical representative.
    fn canonical_maps(&self) -> (Vec<usize>, Vec<usize>) {
        let mut node_map = vec![0; self.node_count()];
        for (i, &x) in self.node_order.iter().enumerate() {
            node_map[x] = i;
        }
        let mut edge_map = vec![usize::MAX; self.edge_count()];
        let mut next = 0;
        let mut visit = |e: usize, edge_map: &mut Vec<usize>| {
            if edge_map[e] == usize::MAX {
                edge_map[e] = next;
                next += 1;
            }
        };
        for &e in &self.port_in {
            visit(e, &mut edge_map);
        }
        for &e in &self.port_out {
            visit(e, &mut edge_map);
        }
        for &x in &self.node_order {
            for &e in &self.node_out[x] {
                visit(e, &mut edge_map);
            }
        }
        (node_map, edge_map)
    }

    fn renumber(&self, node_map: &[usize], edge_map: &[usize]) -> CoaGraph {
        let (n, a) = (self.node_count(), self.edge_count());
        let mut enters = vec![None; a];
        let mut exits = vec![None; a];
        let mut labels = vec![String::new(); a];
        for e in 0..a {
            enters[edge_map[e]] = self.graph.enters(e).map(|x| node_map[x]);
            exits[edge_map[e]] = self.graph.exits(e).map(|x| node_map[x]);
            labels[edge_map[e]] = self.labels[e].clone();
        }
        let mut node_in = vec![vec![]; n];
        let mut node_out = vec![vec![]; n];
        for x in 0..n {
            node_in[node_map[x]] = self.node_in[x].iter().map(|&e| edge_map[e]).collect();
            node_out[node_map[x]] = self.node_out[x].iter().map(|&e| edge_map[e]).collect();
        }
        CoaGraph {
            graph: Graph::new(n, enters, exits).expect("renumbering keeps node references in range"),
            labels,
            node_in,
            node_out,
            port_in: self.port_in.iter().map(|&e| edge_map[e]).collect(),
            port_out: self.port_out.iter().map(|&e| edge_map[e]).collect(),
            node_order: self.node_order.iter().map(|&x| node_map[x]).collect(),
        }
    }

    /// The representative of the isomorphism class: nodes numbered by the
    /// node order, edges by the traversal of ports then node outputs.
    pub fn canonical(&self) -> CoaGraph {
        let (nm, em) = self.canonical_maps();
        self.renumber(&nm, &em)
    }

    pub fn canonical_encode(&self) -> Vec<u8> {
        serde_json::to_vec(&self.canonical()).expect("coa graphs serialize")
    }

    pub fn coa_iso(&self, other: &CoaGraph) -> Option<CoaIso> {
        if self.canonical() != other.canonical() {
            return None;
        }
        let (nm1, em1) = self.canonical_maps();
        let (nm2, em2) = other.canonical_maps();
        let inv = |m: &[usize]| {
            let mut r = vec![0; m.len()];
            for (i, &j) in m.iter().enumerate() {
                r[j] = i;
            }
            r
        };
        let (ni2, ei2) = (inv(&nm2), inv(&em2));
        Some(CoaIso {
            nodes: nm1.iter().map(|&c| ni2[c]).collect(),
            edges: em1.iter().map(|&c| ei2[c]).collect(),
        })
    }

    /// Checks that `iso` carries every piece of structure of `self` onto
    /// `other`.
    pub fn is_iso_onto(&self, other: &CoaGraph, iso: &CoaIso, respect_node_order: bool) -> bool {
        let (n, a) = (self.node_count(), self.edge_count());
        if other.node_count() != n || other.edge_count() != a {
            return false;
        }
        if !is_bijection(&iso.nodes, n) || !is_bijection(&iso.edges, a) {
            return false;
        }
        let f = |x: Option<usize>| x.map(|x| iso.nodes[x]);
        let ok_edges = (0..a).all(|e| {
            let t = iso.edges[e];
            other.graph.enters(t) == f(self.graph.enters(e))
                && other.graph.exits(t) == f(self.graph.exits(e))
                && other.labels[t] == self.labels[e]
        });
        let map = |xs: &[usize]| xs.iter().map(|&e| iso.edges[e]).collect::<Vec<_>>();
        let ok_cover = (0..n).all(|x| {
            other.node_in[iso.nodes[x]] == map(&self.node_in[x]) && other.node_out[iso.nodes[x]] == map(&self.node_out[x])
        });
        let ok_ports = other.port_in == map(&self.port_in) && other.port_out == map(&self.port_out);
        let ok_order =
            !respect_node_order || other.node_order == self.node_order.iter().map(|&x| iso.nodes[x]).collect::<Vec<_>>();
        ok_edges && ok_cover && ok_ports && ok_order
    }

    /// Automorphisms of the underlying ordered graph (node order forgotten),
    /// by search over node bijections.
    pub fn ordered_automorphisms(&self) -> Vec<CoaIso> {
        let n = self.node_count();
        let mut out = Vec::new();
        for p in Permutation::all(n) {
            let nodes: Vec<usize> = (0..n).map(|x| p.apply(x + 1) - 1).collect();
            if let Some(edges) = self.induced_edge_map(&nodes) {
                let iso = CoaIso { nodes, edges };
                if self.is_iso_onto(self, &iso, false) {
                    out.push(iso);
                }
            }
        }
        out
    }

    /// The edge map forced by a node map through covering and port orders.
    fn induced_edge_map(&self, nodes: &[usize]) -> Option<Vec<usize>> {
        let mut edges = vec![usize::MAX; self.edge_count()];
        for (k, &e) in self.port_in.iter().enumerate() {
            edges[e] = self.port_in[k];
        }
        for x in 0..self.node_count() {
            let (src, dst) = (&self.node_out[x], &self.node_out[nodes[x]]);
            if src.len() != dst.len() {
                return None;
            }
            for (j, &e) in src.iter().enumerate() {
                edges[e] = dst[j];
            }
        }
        Some(edges)
    }

    /// Key of the isomorphism class of the underlying ordered graph: the
    /// least canonical encoding over all node orders.
    pub fn ordered_class_key(&self) -> Vec<u8> {
        Permutation::all(self.node_count())
            .iter()
            .map(|g| self.permute_node_order(g).expect("sizes match").canonical_encode())
            .min()
            .unwrap_or_else(|| self.canonical_encode())
    }

    pub fn relabel(&self, f: &impl Fn(&str) -> String) -> CoaGraph {
        let mut g = self.clone();
        g.labels = self.labels.iter().map(|c| f(c)).collect();
        g
    }

    /// Nodes in topological order, ties broken by the node order.
    pub fn topological_nodes(&self) -> Vec<usize> {
        let g = &self.graph;
        let mut indeg: Vec<usize> = (0..g.node_count())
            .map(|x| self.node_in[x].iter().filter(|&&e| g.exits(e).is_some()).count())
            .collect();
        let mut out = Vec::with_capacity(g.node_count());
        let mut done = vec![false; g.node_count()];
        while out.len() < g.node_count() {
            let x = *self.node_order.iter().find(|&&x| !done[x] && indeg[x] == 0).expect("acyclic");
            done[x] = true;
            out.push(x);
            for &e in &self.node_out[x] {
                if let Some(y) = g.enters(e) {
                    indeg[y] -= 1;
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        self.to_dot_with(|_| ("circle".to_string(), String::new()))
    }

    /// DOT text; `style(x)` returns the shape and an extra label for node `x`.
    pub fn to_dot_with(&self, style: impl Fn(usize) -> (String, String)) -> String {
        let mut s = String::from("digraph G {\n  rankdir=TB;\n  ordering=out;\n");
        for x in 0..self.node_count() {
            let (shape, extra) = style(x);
            s.push_str(&format!("  n{x} [shape={shape},label=\"{}{extra}\"];\n", self.position_of(x)));
        }
        push_edges_dot(&mut s, &self.graph, |e| self.labels[e].clone());
        let rank = |s: &mut String, name: &str, es: &[usize]| {
            if !es.is_empty() {
                let ids: Vec<String> = es.iter().map(|e| format!("{name}{e}")).collect();
                s.push_str(&format!("  {{ rank=same; {} }}\n", ids.join("; ")));
                for w in ids.windows(2) {
                    s.push_str(&format!("  {} -> {} [style=invis];\n", w[0], w[1]));
                }
            }
        };
        let free_in: Vec<usize> = self.port_in.clone();
        let free_out: Vec<usize> = self.port_out.clone();
        rank(&mut s, "in", &free_in);
        rank(&mut s, "out", &free_out);
        s.push_str("}\n");
        s
    }
}

/// All coa graphs of arity `a`, one per isomorphism class, in a fixed order.
///
/// Node `i` of every result sits at position `i + 1`; each graph is the
/// canonical representative of its class.
pub fn enumerate_coa(a: &Arity) -> Vec<CoaGraph> {
    if a.balance().is_none() {
        return vec![];
    }
    // Tails: graph inports, then node output slots. Heads: graph exports,
    // then node input slots.
    let mut tails: Vec<(Option<usize>, String)> = a.residue.inputs.iter().map(|c| (None, c.clone())).collect();
    let mut heads: Vec<(Option<usize>, String)> = a.residue.outputs.iter().map(|c| (None, c.clone())).collect();
    for (x, v) in a.node_valences.iter().enumerate() {
        tails.extend(v.outputs.iter().map(|c| (Some(x), c.clone())));
        heads.extend(v.inputs.iter().map(|c| (Some(x), c.clone())));
    }
    if tails.len() != heads.len() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut used = vec![false; tails.len()];
    let mut choice = vec![0; heads.len()];
    assign(a, &tails, &heads, 0, &mut used, &mut choice, &mut |choice| {
        if let Some(g) = build_from_assignment(a, &tails, &heads, choice) {
            let g = g.canonical();
            if seen.insert(g.canonical_encode()) {
                out.push(g);
            }
        }
    });
    out
}

fn assign(
    a: &Arity,
    tails: &[(Option<usize>, String)],
    heads: &[(Option<usize>, String)],
    h: usize,
    used: &mut [bool],
    choice: &mut [usize],
    emit: &mut impl FnMut(&[usize]),
) {
    if h == heads.len() {
        emit(choice);
        return;
    }
    for t in 0..tails.len() {
        if used[t] || tails[t].1 != heads[h].1 {
            continue;
        }
        if tails[t].0.is_some() && tails[t].0 == heads[h].0 {
            continue;
        }
        used[t] = true;
        choice[h] = t;
        assign(a, tails, heads, h + 1, used, choice, emit);
        used[t] = false;
    }
}

fn build_from_assignment(
    a: &Arity,
    tails: &[(Option<usize>, String)],
    heads: &[(Option<usize>, String)],
    choice: &[usize],
) -> Option<CoaGraph> {
    let n = a.node_valences.len();
    let enters: Vec<Option<usize>> = heads.iter().map(|h| h.0).collect();
    let exits: Vec<Option<usize>> = choice.iter().map(|&t| tails[t].0).collect();
    let graph = Graph::new(n, enters, exits).ok()?;
    if !graph.is_acyclic() {
        return None;
    }
    let labels = heads.iter().map(|h| h.1.clone()).collect();
    let mut tail_edge = vec![0; tails.len()];
    for (e, &t) in choice.iter().enumerate() {
        tail_edge[t] = e;
    }
    let mut node_in = vec![vec![]; n];
    let mut node_out = vec![vec![]; n];
    let mut port_out = vec![];
    for (e, h) in heads.iter().enumerate() {
        match h.0 {
            Some(x) => node_in[x].push(e),
            None => port_out.push(e),
        }
    }
    let mut port_in = vec![];
    for (t, tail) in tails.iter().enumerate() {
        match tail.0 {
            Some(x) => node_out[x].push(tail_edge[t]),
            None => port_in.push(tail_edge[t]),
        }
    }
    CoaGraph::new(graph, labels, node_in, node_out, port_in, port_out, (0..n).collect()).ok()
}

/// A random coa graph with the given residue, `nodes` nodes and `inner`
/// inner edges. `None` when no such graph exists (no nodes and unmatched
/// colours, or inner edges requested with fewer than two nodes).
pub fn random_coa_with_residue<R: Rng + ?Sized>(
    rng: &mut R,
    colours: &[String],
    residue: &CValence,
    nodes: usize,
    inner: usize,
) -> Option<CoaGraph> {
    if inner > 0 && nodes < 2 {
        return None;
    }
    let mut enters: Vec<Option<usize>> = Vec::new();
    let mut exits: Vec<Option<usize>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut port_in = Vec::new();
    for c in &residue.inputs {
        port_in.push(enters.len());
        enters.push(None);
        exits.push(None);
        labels.push(c.clone());
    }
    // Each residue output either closes a free edge or leaves a node.
    let mut open: Vec<usize> = port_in.clone();
    let mut port_out = Vec::new();
    for c in &residue.outputs {
        let candidates: Vec<usize> = open.iter().copied().filter(|&e| &labels[e] == c).collect();
        let free = nodes == 0 || (!candidates.is_empty() && rng.gen_bool(0.25));
        if free {
            let &e = candidates.choose(rng)?;
            open.retain(|&f| f != e);
            port_out.push(e);
        } else {
            port_out.push(enters.len());
            enters.push(None);
            exits.push(Some(rng.gen_range(0..nodes)));
            labels.push(c.clone());
        }
    }
    if nodes == 0 {
        if !open.is_empty() {
            return None;
        }
    } else {
        for &e in &open {
            enters[e] = Some(rng.gen_range(0..nodes));
        }
    }
    for _ in 0..inner {
        let u = rng.gen_range(0..nodes - 1);
        let v = rng.gen_range(u + 1..nodes);
        enters.push(Some(v));
        exits.push(Some(u));
        labels.push(colours.choose(rng)?.clone());
    }
    let graph = Graph::new(nodes, enters, exits).ok()?;
    let mut node_in: Vec<Vec<usize>> = (0..nodes).map(|x| graph.inputs_of(x)).collect();
    let mut node_out: Vec<Vec<usize>> = (0..nodes).map(|x| graph.outputs_of(x)).collect();
    for xs in node_in.iter_mut().chain(node_out.iter_mut()) {
        xs.shuffle(rng);
    }
    let mut node_order: Vec<usize> = (0..nodes).collect();
    node_order.shuffle(rng);
    CoaGraph::new(graph, labels, node_in, node_out, port_in, port_out, node_order).ok()
}

/// A random coa graph with at most `max_nodes` nodes and at most `max_ports`
/// ports on each side.
pub fn random_coa<R: Rng + ?Sized>(rng: &mut R, colours: &[String], max_nodes: usize, max_ports: usize) -> CoaGraph {
    loop {
        let pick = |rng: &mut R, k: usize| -> Vec<String> { (0..k).map(|_| colours.choose(rng).unwrap().clone()).collect() };
        let n = rng.gen_range(0..=max_ports);
        let m = rng.gen_range(0..=max_ports);
        let residue = CValence { inputs: pick(rng, n), outputs: pick(rng, m) };
        let nodes = rng.gen_range(0..=max_nodes);
        let inner = if nodes < 2 { 0 } else { rng.gen_range(0..=nodes + 1) };
        if let Some(g) = random_coa_with_residue(rng, colours, &residue, nodes, inner) {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn star(n: usize, m: usize) -> CValence {
        CValence::mono("*", n, m)
    }

    /// Two (1,1) nodes joined by one edge, node 0 first.
    fn chain2() -> CoaGraph {
        let g = Graph::new(2, vec![Some(0), Some(1), None], vec![None, Some(0), Some(1)]).unwrap();
        CoaGraph::new(g, vec![s("*"); 3], vec![vec![0], vec![1]], vec![vec![1], vec![2]], vec![0], vec![2], vec![0, 1])
            .unwrap()
    }

    /// The c.o. graph drawn in the paper's section on completely ordered
    /// graphs; node `k` here is the node drawn with number `k + 1`. The
    /// drawing declares six inports but attaches only five.
    fn figure_graph() -> CoaGraph {
        // edges: 0..=4 graph inports 1,2,3,4,6; 5,6 node2->node1; 7 node3->node1;
        // 8 node2 -> export 1; 9,10 node1 -> exports 3,2; 11 node3 -> export 4
        let enters = vec![Some(1), Some(1), Some(2), Some(1), Some(2), Some(0), Some(0), Some(0), None, None, None, None];
        let exits = vec![None, None, None, None, None, Some(1), Some(1), Some(2), Some(1), Some(0), Some(0), Some(2)];
        let labels = ["a", "b", "c", "c", "d", "c", "d", "a", "c", "d", "d", "b"].map(s).to_vec();
        let g = Graph::new(3, enters, exits).unwrap();
        CoaGraph::new(
            g,
            labels,
            vec![vec![5, 7, 6], vec![0, 1, 3], vec![2, 4]],
            vec![vec![9, 10], vec![8, 5, 6], vec![7, 11]],
            vec![0, 1, 2, 3, 4],
            vec![8, 10, 9, 11],
            vec![0, 1, 2],
        )
        .unwrap()
    }

    #[test]
    fn c_valence_examples() {
        let c = CoaGraph::untwisted_corolla(&star(2, 1));
        assert_eq!(c.c_valence_of_node(0).unwrap(), star(2, 1));
        let v = CValence::new(vec!["a", "b"], vec!["c"]);
        assert_eq!(CoaGraph::untwisted_corolla(&v).c_valence_of_node(0).unwrap(), v);
        let f = figure_graph();
        assert_eq!(f.c_valence_of_node(1).unwrap(), CValence::new(vec!["a", "b", "c"], vec!["c", "c", "d"]));
        assert_eq!(f.c_valence_of_node(0).unwrap(), CValence::new(vec!["c", "a", "d"], vec!["d", "d"]));
    }

    #[test]
    fn arity_examples() {
        let v = star(2, 3);
        assert_eq!(CoaGraph::untwisted_corolla(&v).arity(), Arity::new(vec![v.clone()], v));
        let empty = CoaGraph::new(Graph::empty(), vec![], vec![], vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(empty.arity(), Arity::new(vec![], star(0, 0)));
        assert_eq!(chain2().arity(), Arity::new(vec![star(1, 1), star(1, 1)], star(1, 1)));
    }

    #[test]
    fn twists() {
        let par = |crossed: bool| {
            let g = Graph::new(2, vec![Some(1), Some(1)], vec![Some(0), Some(0)]).unwrap();
            let vin = if crossed { vec![1, 0] } else { vec![0, 1] };
            CoaGraph::new(g, vec![s("*"); 2], vec![vec![], vin], vec![vec![0, 1], vec![]], vec![], vec![], vec![0, 1])
                .unwrap()
        };
        assert!(chain2().node_twist(0, 1).unwrap().is_identity());
        assert!(par(false).node_twist(0, 1).unwrap().is_identity());
        assert_eq!(par(true).node_twist(0, 1).unwrap(), Permutation::transposition(2, 1, 2));
        assert_eq!(par(true).node_twist(1, 0), Err(Error::EmptyCie));
        assert!(par(false).is_untwisted());
        assert!(!par(true).is_untwisted());

        let c = CoaGraph::untwisted_corolla(&star(2, 2));
        let (i, o) = c.io_twist(0).unwrap();
        assert!(i.is_identity() && o.is_identity());
        let mut t = c.clone();
        t.port_in = vec![1, 0];
        let (i, o) = t.io_twist(0).unwrap();
        assert_eq!(i, Permutation::transposition(2, 1, 2));
        assert!(o.is_identity());
        assert!(!t.is_untwisted());
        assert_ne!(t.canonical_encode(), c.canonical_encode());
    }

    #[test]
    fn node_order_action() {
        let g = chain2();
        assert_eq!(g.permute_node_order(&Permutation::identity(2)).unwrap().canonical_encode(), g.canonical_encode());
        let sw = Permutation::transposition(2, 1, 2);
        let h = g.permute_node_order(&sw).unwrap();
        assert_eq!(h.node_order(), &[1, 0]);
        assert_ne!(h.canonical_encode(), g.canonical_encode());
        let iso = CoaGraph::new(Graph::corolla(Valence::new(0, 0)).disjoint_union(&Graph::corolla(Valence::new(0, 0))),
            vec![], vec![vec![], vec![]], vec![vec![], vec![]], vec![], vec![], vec![0, 1]).unwrap();
        assert_eq!(iso.permute_node_order(&sw).unwrap().canonical_encode(), iso.canonical_encode());
    }

    #[test]
    fn relabelling_invariance() {
        let g = figure_graph();
        // shuffle raw indices: reverse nodes and edges
        let n = g.node_count();
        let a = g.edge_count();
        let nm: Vec<usize> = (0..n).map(|x| n - 1 - x).collect();
        let em: Vec<usize> = (0..a).map(|e| (e * 5) % a).collect();
        let h = g.renumber(&nm, &em);
        assert_ne!(h, g);
        assert_eq!(h.canonical_encode(), g.canonical_encode());
        let iso = g.coa_iso(&h).unwrap();
        assert!(g.is_iso_onto(&h, &iso, true));
        assert_eq!(iso.nodes, nm);
    }

    #[test]
    fn iso_examples() {
        let g = chain2();
        let id = g.coa_iso(&g).unwrap();
        assert_eq!(id.nodes, vec![0, 1]);
        assert_eq!(id.edges, vec![0, 1, 2]);
        let h = g.permute_node_order(&Permutation::transposition(2, 1, 2)).unwrap();
        assert!(g.coa_iso(&h).is_none());
    }

    #[test]
    fn enumeration_counts() {
        for n in 0..=3 {
            for m in 0..=3 {
                let v = star(n, m);
                let gs = enumerate_coa(&Arity::new(vec![v.clone()], v));
                let fact = |k: usize| (1..=k).product::<usize>();
                assert_eq!(gs.len(), fact(n) * fact(m), "({n},{m})");
            }
        }
        assert_eq!(enumerate_coa(&Arity::new(vec![star(1, 1), star(1, 1)], star(1, 1))).len(), 2);
        assert_eq!(enumerate_coa(&Arity::new(vec![star(0, 0), star(0, 0)], star(0, 0))).len(), 1);
        assert!(enumerate_coa(&Arity::new(vec![star(1, 0)], star(0, 0))).is_empty());
        let ab = CValence::new(vec!["a"], vec!["b"]);
        assert!(enumerate_coa(&Arity::new(vec![ab], CValence::new(vec!["a"], vec!["a"]))).is_empty());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(chain2().ordered_automorphisms().len(), 1);
        let two = enumerate_coa(&Arity::new(vec![star(0, 0), star(0, 0)], star(0, 0)));
        assert_eq!(two[0].ordered_automorphisms().len(), 2);
        assert_eq!(figure_graph().ordered_automorphisms().len(), 1);
    }

    #[test]
    fn random_graphs_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cs = vec![s("a"), s("b")];
        for _ in 0..200 {
            let g = random_coa(&mut rng, &cs, 4, 3);
            assert!(g.node_count() <= 4);
            let r = g.residue_valence();
            let h = random_coa_with_residue(&mut rng, &cs, &r, 3, 2).unwrap();
            assert_eq!(h.residue_valence(), r);
        }
    }

    #[test]
    fn json_shape() {
        let g = chain2();
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        for k in ["graph", "labels", "node_in", "node_out", "port_in", "port_out", "node_order"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        let back: CoaGraph = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, g);
        let mut bad = v;
        bad["node_order"] = serde_json::json!([0, 0]);
        assert!(serde_json::from_value::<CoaGraph>(bad).is_err());
    }
}
