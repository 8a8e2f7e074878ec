//! Graph insertion, multiple insertion and the two-node decomposition.

use serde::{Deserialize, Serialize};

use crate::coa::CoaGraph;
use crate::error::{Error, Result};
use crate::graph::{Graph, Relation, UnionFind};
use crate::perm::{check_map, insert_order, unshuffle, TotalOrder};

/// A map `[n] -> [m]` whose fibre over `i` has as many points as the `i`-th
/// inserted graph has nodes. Values are one-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InsertionPermutation {
    pub map: Vec<usize>,
}

impl InsertionPermutation {
    pub fn new(map: Vec<usize>, sizes: &[usize]) -> Result<Self> {
        check_map(&map, sizes.len())?;
        for (i, &k) in sizes.iter().enumerate() {
            let got = map.iter().filter(|&&v| v == i + 1).count();
            if got != k {
                return Err(Error::BadInsertion(format!("fibre over {} has {got} points, graph has {k} nodes", i + 1)));
            }
        }
        Ok(InsertionPermutation { map })
    }

    /// The monotone map with the given fibre sizes.
    pub fn monotone(sizes: &[usize]) -> Self {
        let map = sizes.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat(i + 1).take(k)).collect();
        InsertionPermutation { map }
    }
}

/// `G ∘_v H`: replace node `v` of `g` by `h`.
pub fn insert(g: &CoaGraph, v: usize, h: &CoaGraph) -> Result<CoaGraph> {
    let cv = g.c_valence_of_node(v)?;
    let rh = h.residue_valence();
    if cv != rh {
        return Err(Error::ValenceMismatch { expected: cv.to_string(), found: rh.to_string() });
    }
    let (ag, ah) = (g.edge_count(), h.edge_count());
    let mut uf = UnionFind::new(ag + ah);
    for (k, &e) in g.node_in(v).iter().enumerate() {
        uf.union(e, ag + h.port_in()[k]);
    }
    for (k, &e) in g.node_out(v).iter().enumerate() {
        uf.union(e, ag + h.port_out()[k]);
    }

    // Fresh edge ids, by first appearance.
    let mut class_id = vec![usize::MAX; ag + ah];
    let mut edge_of = vec![0; ag + ah];
    let mut count = 0;
    for e in 0..ag + ah {
        let r = uf.find(e);
        if class_id[r] == usize::MAX {
            class_id[r] = count;
            count += 1;
        }
        edge_of[e] = class_id[r];
    }

    let gn = g.node_count();
    let node_g = |x: usize| -> Option<usize> {
        match x.cmp(&v) {
            std::cmp::Ordering::Less => Some(x),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(x - 1),
        }
    };
    let node_h = |x: usize| gn - 1 + x;

    let mut enters = vec![None; count];
    let mut exits = vec![None; count];
    let mut labels = vec![String::new(); count];
    for e in 0..ag {
        let c = edge_of[e];
        labels[c] = g.label(e).to_string();
        if let Some(x) = g.graph().enters(e).and_then(node_g) {
            enters[c] = Some(x);
        }
        if let Some(x) = g.graph().exits(e).and_then(node_g) {
            exits[c] = Some(x);
        }
    }
    for e in 0..ah {
        let c = edge_of[ag + e];
        labels[c] = h.label(e).to_string();
        if let Some(x) = h.graph().enters(e) {
            enters[c] = Some(node_h(x));
        }
        if let Some(x) = h.graph().exits(e) {
            exits[c] = Some(node_h(x));
        }
    }

    let total = gn - 1 + h.node_count();
    let mut node_in = Vec::with_capacity(total);
    let mut node_out = Vec::with_capacity(total);
    for x in (0..gn).filter(|&x| x != v) {
        node_in.push(g.node_in(x).iter().map(|&e| edge_of[e]).collect());
        node_out.push(g.node_out(x).iter().map(|&e| edge_of[e]).collect());
    }
    for x in 0..h.node_count() {
        node_in.push(h.node_in(x).iter().map(|&e| edge_of[ag + e]).collect());
        node_out.push(h.node_out(x).iter().map(|&e| edge_of[ag + e]).collect());
    }
    let port_in = g.port_in().iter().map(|&e| edge_of[e]).collect();
    let port_out = g.port_out().iter().map(|&e| edge_of[e]).collect();

    let k = g.position_of(v);
    let mut node_order: Vec<usize> = g.node_order()[..k - 1].iter().map(|&x| node_g(x).unwrap()).collect();
    node_order.extend(h.node_order().iter().map(|&x| node_h(x)));
    node_order.extend(g.node_order()[k..].iter().map(|&x| node_g(x).unwrap()));

    let graph = Graph::new(total, enters, exits)?;
    CoaGraph::new(graph, labels, node_in, node_out, port_in, port_out, node_order)
}

/// `G ∘_α (K_1, …, K_m)`: insert `K_i` at the `i`-th node of `g` in node
/// order, then reorder the nodes by the unshuffle of `α`.
pub fn multi_insert(g: &CoaGraph, alpha: &InsertionPermutation, ks: &[CoaGraph]) -> Result<CoaGraph> {
    if ks.len() != g.node_count() {
        return Err(Error::SizeMismatch { left: ks.len(), right: g.node_count() });
    }
    let sizes: Vec<usize> = ks.iter().map(|k| k.node_count()).collect();
    InsertionPermutation::new(alpha.map.clone(), &sizes)?;
    let mut cur = g.clone();
    let mut offset = 0;
    for k in ks {
        let v = cur.node_at(offset + 1);
        cur = insert(&cur, v, k)?;
        offset += k.node_count();
    }
    cur.permute_node_order(&unshuffle(&alpha.map))
}

/// `H`, `K` and `α` with `G ≅ H ∘_{[x],α} K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub h: CoaGraph,
    pub k: CoaGraph,
    pub alpha: InsertionPermutation,
    /// The node `[x]` of `h` obtained by merging `x` and `y`.
    pub merged: usize,
}

impl Decomposition {
    /// The list of graphs to insert over `h`: `k` at `[x]` and untwisted
    /// corollas elsewhere.
    pub fn inserts(&self) -> Vec<CoaGraph> {
        self.h
            .node_order()
            .iter()
            .map(|&u| {
                if u == self.merged {
                    self.k.clone()
                } else {
                    CoaGraph::untwisted_corolla(&self.h.c_valence_of_node(u).unwrap())
                }
            })
            .collect()
    }

    pub fn reassemble(&self) -> Result<CoaGraph> {
        multi_insert(&self.h, &self.alpha, &self.inserts())
    }
}

/// Whether `decompose(g, x, y)` will succeed.
pub fn is_eligible(g: &CoaGraph, x: usize, y: usize) -> bool {
    check_pair(g, x, y).is_ok()
}

fn check_pair(g: &CoaGraph, x: usize, y: usize) -> Result<()> {
    let d = g.graph().dominance(x, y)?;
    if d.relation == Relation::YDominatesX {
        return Err(Error::Decompose("y dominates x"));
    }
    if d.max_path_length > 1 {
        return Err(Error::Decompose("a dead-ends path of length greater than 1 joins x and y"));
    }
    if g.position_of(x) > g.position_of(y) {
        return Err(Error::Decompose("x comes after y in the node order"));
    }
    Ok(())
}

/// Collapses `x`, `y` and their common inner edges into one node.
pub fn decompose(g: &CoaGraph, x: usize, y: usize) -> Result<Decomposition> {
    check_pair(g, x, y)?;
    let gr = g.graph();
    let cie = gr.cie(x, y)?;
    let not_cie = |e: &usize| !cie.contains(e);

    // Covering order of [x].
    let (mut merged_in, mut merged_out) = if cie.is_empty() {
        (
            [g.node_in(x), g.node_in(y)].concat(),
            [g.node_out(x), g.node_out(y)].concat(),
        )
    } else {
        let i = *g.node_in(y).iter().find(|e| cie.contains(e)).unwrap();
        let j = *g.node_out(x).iter().find(|e| cie.contains(e)).unwrap();
        let ins = insert_order(&TotalOrder::new(g.node_in(x).to_vec())?, &TotalOrder::new(g.node_in(y).to_vec())?, &i)?;
        let outs =
            insert_order(&TotalOrder::new(g.node_out(y).to_vec())?, &TotalOrder::new(g.node_out(x).to_vec())?, &j)?;
        (ins.elements().to_vec(), outs.elements().to_vec())
    };
    merged_in.retain(not_cie);
    merged_out.retain(not_cie);

    // H: nodes of G except y, x standing for [x]; edges of G except cie.
    let h_nodes: Vec<usize> = (0..gr.node_count()).filter(|&u| u != y).collect();
    let pi = |u: usize| h_nodes.iter().position(|&w| w == if u == y { x } else { u }).unwrap();
    let h_edges: Vec<usize> = (0..gr.edge_count()).filter(not_cie).collect();
    let he = |e: usize| h_edges.iter().position(|&f| f == e).unwrap();
    let hg = Graph::new(
        h_nodes.len(),
        h_edges.iter().map(|&e| gr.enters(e).map(pi)).collect(),
        h_edges.iter().map(|&e| gr.exits(e).map(pi)).collect(),
    )?;
    let mut h_in = Vec::new();
    let mut h_out = Vec::new();
    for &u in &h_nodes {
        let (ins, outs) = if u == x {
            (merged_in.clone(), merged_out.clone())
        } else {
            (g.node_in(u).to_vec(), g.node_out(u).to_vec())
        };
        h_in.push(ins.iter().map(|&e| he(e)).collect());
        h_out.push(outs.iter().map(|&e| he(e)).collect());
    }
    let merged = pi(x);
    let mut h_order: Vec<usize> = g.node_order().iter().filter(|&&u| u != x && u != y).map(|&u| pi(u)).collect();
    h_order.push(merged);
    let h = CoaGraph::new(
        hg,
        h_edges.iter().map(|&e| g.label(e).to_string()).collect(),
        h_in,
        h_out,
        g.port_in().iter().map(|&e| he(e)).collect(),
        g.port_out().iter().map(|&e| he(e)).collect(),
        h_order,
    )?;

    // K: the two nodes x (0) and y (1) with every edge touching them.
    let k_edges: Vec<usize> = (0..gr.edge_count())
        .filter(|&e| [gr.enters(e), gr.exits(e)].iter().any(|&n| n == Some(x) || n == Some(y)))
        .collect();
    let ke = |e: usize| k_edges.iter().position(|&f| f == e).unwrap();
    let kn = |n: Option<usize>| match n {
        Some(u) if u == x => Some(0),
        Some(u) if u == y => Some(1),
        _ => None,
    };
    let kg = Graph::new(
        2,
        k_edges.iter().map(|&e| kn(gr.enters(e))).collect(),
        k_edges.iter().map(|&e| kn(gr.exits(e))).collect(),
    )?;
    let map = |xs: &[usize]| xs.iter().map(|&e| ke(e)).collect::<Vec<_>>();
    let k = CoaGraph::new(
        kg,
        k_edges.iter().map(|&e| g.label(e).to_string()).collect(),
        vec![map(g.node_in(x)), map(g.node_in(y))],
        vec![map(g.node_out(x)), map(g.node_out(y))],
        map(&merged_in),
        map(&merged_out),
        vec![0, 1],
    )?;

    // α(j) = position in H of the image of the j-th node of G.
    let alpha_map = g.node_order().iter().map(|&u| h.position_of(pi(u))).collect();
    let sizes: Vec<usize> = h.node_order().iter().map(|&u| if u == merged { 2 } else { 1 }).collect();
    let alpha = InsertionPermutation::new(alpha_map, &sizes)?;
    Ok(Decomposition { h, k, alpha, merged })
}
