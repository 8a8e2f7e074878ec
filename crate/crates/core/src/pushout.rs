//! Push-outs of PROPs along `w_!` of a full, colour-injective operad
//! inclusion `U ⊆ V`, computed as colimits over marked coa graphs truncated
//! by node count.
//!
//! A node marked `A` carries an operation of `V`, `O` one of `U` and `B` an
//! element of `P`. The colimit is a union-find over decorated marked graphs,
//! glued along twists, mark flips and contractions (see `neighbours`).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coa::{enumerate_coa, Arity, CValence, CoaGraph};
use crate::error::{Error, Result};
use crate::graph::UnionFind;
use crate::insertion::{decompose, insert, is_eligible, multi_insert, InsertionPermutation};
use crate::operad::{signatures_over, Colour, Op, SetOperad, Signature};
use crate::perm::{unshuffle, Permutation};
use crate::prop::{evaluate, free_prop_on_operad, valences_upto, Elem, FreeOnOperad, SetProp, WElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    O,
    A,
    B,
}

impl Mark {
    /// `O` lies below `A` and `B`, which are incomparable.
    pub fn le(self, other: Mark) -> bool {
        self == Mark::O || self == other
    }

    fn dot_shape(self) -> &'static str {
        match self {
            Mark::A => "invtriangle",
            Mark::B => "triangle,orientation=270",
            Mark::O => "diamond",
        }
    }
}

/// A coa graph with a mark on every node, indexed by node id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedCoaGraph {
    pub graph: CoaGraph,
    pub marks: Vec<Mark>,
}

impl MarkedCoaGraph {
    pub fn new(graph: CoaGraph, marks: Vec<Mark>) -> Result<Self> {
        if marks.len() != graph.node_count() {
            return Err(Error::SizeMismatch { left: marks.len(), right: graph.node_count() });
        }
        Ok(MarkedCoaGraph { graph, marks })
    }

    pub fn uniform(graph: CoaGraph, mark: Mark) -> Self {
        let marks = vec![mark; graph.node_count()];
        MarkedCoaGraph { graph, marks }
    }

    pub fn corolla(v: &CValence, mark: Mark) -> Self {
        MarkedCoaGraph::uniform(CoaGraph::untwisted_corolla(v), mark)
    }

    pub fn marks_by_position(&self) -> Vec<Mark> {
        self.graph.node_order().iter().map(|&x| self.marks[x]).collect()
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot_with(|x| (self.marks[x].dot_shape().to_string(), format!(" {:?}", self.marks[x])))
    }
}

/// `G ∘_v K` with the inherited marking: nodes of `G` other than `v` keep
/// their marks, the nodes of `K` (appended after them) keep theirs.
pub fn marked_insert(g: &MarkedCoaGraph, v: usize, k: &MarkedCoaGraph) -> Result<MarkedCoaGraph> {
    let target = *g.marks.get(v).ok_or(Error::NodeOutOfRange { node: v, count: g.marks.len() })?;
    if let Some(m) = k.marks.iter().find(|m| !m.le(target)) {
        return Err(Error::Marking(format!("a node marked {m:?} cannot be inserted into a node marked {target:?}")));
    }
    let graph = insert(&g.graph, v, &k.graph)?;
    let marks = g
        .marks
        .iter()
        .enumerate()
        .filter(|&(x, _)| x != v)
        .map(|(_, &m)| m)
        .chain(k.marks.iter().copied())
        .collect();
    MarkedCoaGraph::new(graph, marks)
}

/// A morphism `({K_i}, α)` into a marked graph: its source is the target
/// with `K_i` inserted at the node in position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedMorphism {
    pub inserts: Vec<MarkedCoaGraph>,
    pub alpha: InsertionPermutation,
}

impl MarkedMorphism {
    pub fn source(&self, target: &MarkedCoaGraph) -> Result<MarkedCoaGraph> {
        if self.inserts.len() != target.graph.node_count() {
            return Err(Error::SizeMismatch { left: self.inserts.len(), right: target.graph.node_count() });
        }
        let mut cur = target.clone();
        let mut offset = 0;
        for k in &self.inserts {
            let v = cur.graph.node_at(offset + 1);
            cur = marked_insert(&cur, v, k)?;
            offset += k.graph.node_count();
        }
        let graph = cur.graph.permute_node_order(&unshuffle(&self.alpha.map))?;
        let plain: Vec<CoaGraph> = self.inserts.iter().map(|k| k.graph.clone()).collect();
        if multi_insert(&target.graph, &self.alpha, &plain)? != graph {
            return Err(Error::BadInsertion("marked and plain insertion disagree".into()));
        }
        MarkedCoaGraph::new(graph, cur.marks)
    }

    /// Only marks change: every insert is an untwisted corolla and `α` is the
    /// identity.
    pub fn is_graph_preserving(&self, target: &MarkedCoaGraph) -> bool {
        let corollas = self.inserts.iter().all(|k| {
            let g = &k.graph;
            g.node_count() == 1 && g.edge_count() == g.node_in(0).len() + g.node_out(0).len() && g.is_untwisted()
        });
        let identity = self.alpha.map.iter().enumerate().all(|(i, &j)| j == i + 1);
        corollas
            && identity
            && self.source(target).is_ok_and(|s| s.graph.canonical_encode() == target.graph.canonical_encode())
    }
}

/// The image of an operation of `U` in `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpImage {
    /// `P = w_!U` and `f` the identity.
    Identity,
    /// Unary operations go to identities.
    Collapse,
    /// Listed images, keyed by the operation's bytes read as text.
    Table(BTreeMap<String, Elem>),
}

/// A push-out problem: `U ⊆ V` on colours `S ⊆ D`, and `f: w_!U → P` on
/// colours `C ⊇ S`, with `D ∩ C = S`.
pub struct PushoutProblem {
    v: Arc<dyn SetOperad>,
    u: Arc<dyn SetOperad>,
    d: Vec<String>,
    s: Vec<String>,
    p: Arc<dyn SetProp>,
    f: OpImage,
    max_ports: usize,
    wv: FreeOnOperad,
    wu: FreeOnOperad,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub injective_on_colours: bool,
    pub full: bool,
    pub fullness_witness: Option<String>,
    pub morphism: bool,
    pub morphism_witness: Option<String>,
}

impl Hypotheses {
    pub fn hold(&self) -> bool {
        self.injective_on_colours && self.full && self.morphism
    }
}

#[derive(Clone, Debug)]
struct NodeType {
    mark: Mark,
    valence: CValence,
    elems: Arc<Vec<Elem>>,
}

fn names(cs: &[Colour]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

fn valence_of(s: &Signature) -> CValence {
    CValence { inputs: names(&s.inputs), outputs: vec![s.output.to_string()] }
}

fn signature_of(v: &CValence) -> Signature {
    Signature::new(v.inputs.iter().map(|c| Colour::name(c)).collect(), Colour::name(&v.outputs[0]))
}

impl PushoutProblem {
    pub fn new(
        v: Arc<dyn SetOperad>,
        d: &[&str],
        u: Arc<dyn SetOperad>,
        s: &[&str],
        p: Arc<dyn SetProp>,
        f: OpImage,
        max_ports: usize,
    ) -> Result<Self> {
        let c = p.colours().to_vec();
        for x in s {
            if !d.contains(x) {
                return Err(Error::Malformed(format!("colour {x} of U is not a colour of V")));
            }
            if !c.iter().any(|y| y == x) {
                return Err(Error::Malformed(format!("colour {x} of U is not a colour of P")));
            }
        }
        if let Some(x) = d.iter().find(|x| !s.contains(x) && c.iter().any(|y| y == *x)) {
            return Err(Error::Malformed(format!("colour {x} of V outside U clashes with a colour of P")));
        }
        let wv = free_prop_on_operad(v.clone(), d)?;
        let wu = free_prop_on_operad(u.clone(), s)?;
        Ok(PushoutProblem {
            v,
            u,
            d: d.iter().map(|x| x.to_string()).collect(),
            s: s.iter().map(|x| x.to_string()).collect(),
            p,
            f,
            max_ports,
            wv,
            wu,
        })
    }

    pub fn prop(&self) -> &Arc<dyn SetProp> {
        &self.p
    }

    /// `D ∪ C`.
    pub fn colours(&self) -> Vec<String> {
        let mut all: Vec<String> = self.d.clone();
        all.extend(self.p.colours().iter().filter(|c| !self.d.contains(c)).cloned());
        all
    }

    fn in_c(&self, v: &CValence) -> bool {
        v.colours().all(|c| self.p.colours().contains(c))
    }

    fn admits(&self, m: Mark, v: &CValence) -> bool {
        match m {
            Mark::A => v.outputs.len() == 1 && v.colours().all(|c| self.d.contains(c)),
            Mark::O => v.outputs.len() == 1 && v.colours().all(|c| self.s.contains(c)),
            Mark::B => self.in_c(v),
        }
    }

    /// `f` on a single operation of `U`.
    pub fn image_of_op(&self, o: &Op) -> Result<Elem> {
        let sig = self.u.signature(o)?;
        match &self.f {
            OpImage::Identity => {
                let v = valence_of(&sig);
                Ok(WElem { f: vec![1; v.inputs.len()], dom: v.inputs, cod: v.outputs, ops: vec![o.clone()] }.encode())
            }
            OpImage::Collapse => {
                if sig.inputs.len() != 1 || sig.inputs[0] != sig.output {
                    return Err(Error::BadOperation(format!("cannot collapse {} of type {sig}", self.u.describe(o))));
                }
                self.p.unit(&[sig.output.to_string()])
            }
            OpImage::Table(t) => t
                .get(&String::from_utf8_lossy(o).into_owned())
                .cloned()
                .ok_or_else(|| Error::BadOperation(format!("no image for {}", self.u.describe(o)))),
        }
    }

    /// `f(g, {o_i}) = ω_g*(f(o_1) ⊠ … ⊠ f(o_m))`.
    pub fn image(&self, x: &Elem) -> Result<Elem> {
        let w = WElem::decode(x)?;
        let mut acc = self.p.unit(&[])?;
        for o in &w.ops {
            acc = self.p.hcomp(&acc, &self.image_of_op(o)?)?;
        }
        self.p.in_act(&unshuffle(&w.f), &acc)
    }

    pub fn hypotheses(&self) -> Result<Hypotheses> {
        let distinct: BTreeSet<&String> = self.s.iter().collect();
        let injective_on_colours = distinct.len() == self.s.len()
            && self.s.iter().all(|c| self.u.has_colour(&Colour::name(c)) && self.v.has_colour(&Colour::name(c)));

        let s_colours: Vec<Colour> = self.s.iter().map(|c| Colour::name(c)).collect();
        let mut fullness_witness = None;
        for sig in signatures_over(&s_colours, self.max_ports) {
            let mut a = self.u.hom(&sig)?.to_vec();
            let mut b = self.v.hom(&sig)?.to_vec();
            a.sort();
            b.sort();
            if a != b {
                fullness_witness = Some(format!("{sig}: U has {} operations, V has {}", a.len(), b.len()));
                break;
            }
        }
        let morphism_witness = self.morphism_witness()?;
        Ok(Hypotheses {
            injective_on_colours,
            full: fullness_witness.is_none(),
            fullness_witness,
            morphism: morphism_witness.is_none(),
            morphism_witness,
        })
    }

    /// A law `f` breaks on sampled elements of `w_!U`, if any.
    fn morphism_witness(&self) -> Result<Option<String>> {
        const SAMPLE: usize = 6;
        let s: Vec<&str> = self.s.iter().map(|c| c.as_str()).collect();
        let valences = valences_upto(&s, 2, 2);
        let mut homs: Vec<(CValence, Vec<Elem>)> = Vec::new();
        for v in &valences {
            let xs: Vec<Elem> = self.wu.hom(v)?.iter().take(SAMPLE).cloned().collect();
            if !xs.is_empty() {
                homs.push((v.clone(), xs));
            }
        }
        let show = |x: &Elem| self.wu.describe(x);
        for v in &valences {
            for a in [&v.inputs, &v.outputs] {
                if self.image(&self.wu.unit(a)?)? != self.p.unit(a)? {
                    return Ok(Some(format!("unit at {a:?}")));
                }
            }
        }
        for (v, xs) in &homs {
            for x in xs {
                let fx = self.image(x)?;
                if self.p.valence(&fx)? != *v {
                    return Ok(Some(format!("{} lands outside {v}", show(x))));
                }
                for sigma in Permutation::all(v.inputs.len()) {
                    if self.image(&self.wu.in_act(&sigma, x)?)? != self.p.in_act(&sigma, &fx)? {
                        return Ok(Some(format!("input action by {sigma:?} on {}", show(x))));
                    }
                }
                for sigma in Permutation::all(v.outputs.len()) {
                    if self.image(&self.wu.out_act(&sigma, x)?)? != self.p.out_act(&sigma, &fx)? {
                        return Ok(Some(format!("output action by {sigma:?} on {}", show(x))));
                    }
                }
            }
        }
        for (v, xs) in &homs {
            for (w, ys) in &homs {
                for (x, y) in xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))) {
                    let lhs = self.image(&self.wu.hcomp(x, y)?)?;
                    if lhs != self.p.hcomp(&self.image(x)?, &self.image(y)?)? {
                        return Ok(Some(format!("{} ⊠ {}", show(x), show(y))));
                    }
                    if w.inputs == v.outputs {
                        let lhs = self.image(&self.wu.vcomp(y, x)?)?;
                        if lhs != self.p.vcomp(&self.image(y)?, &self.image(x)?)? {
                            return Ok(Some(format!("{} ∘ {}", show(y), show(x))));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn node_types(&self) -> Result<Vec<NodeType>> {
        let mut out = Vec::new();
        let dc: Vec<Colour> = self.d.iter().map(|c| Colour::name(c)).collect();
        let sc: Vec<Colour> = self.s.iter().map(|c| Colour::name(c)).collect();
        for (mark, o, cols) in [(Mark::A, &self.v, &dc), (Mark::O, &self.u, &sc)] {
            for sig in signatures_over(cols, self.max_ports) {
                let elems = o.hom(&sig).map_err(|e| Error::NotFinite(format!("{sig} ({e})")))?;
                if !elems.is_empty() {
                    out.push(NodeType { mark, valence: valence_of(&sig), elems });
                }
            }
        }
        let c: Vec<&str> = self.p.colours().iter().map(|c| c.as_str()).collect();
        for v in valences_upto(&c, self.max_ports, self.max_ports) {
            let elems = self.p.hom(&v).map_err(|e| Error::NotFinite(format!("{v} ({e})")))?;
            if !elems.is_empty() {
                out.push(NodeType { mark: Mark::B, valence: v, elems });
            }
        }
        Ok(out)
    }

    /// The value of `k`, marked and decorated by position, in `D_m`.
    fn eval_in(&self, m: Mark, k: &CoaGraph, marks: &[Mark], decos: &[Elem]) -> Result<Elem> {
        let corolla = |p: usize, o: &Op| -> Result<Elem> {
            let v = k.c_valence_of_node(k.node_at(p))?;
            Ok(WElem { f: vec![1; v.inputs.len()], dom: v.inputs, cod: v.outputs, ops: vec![o.clone()] }.encode())
        };
        match m {
            Mark::A | Mark::O => {
                let w = if m == Mark::A { &self.wv } else { &self.wu };
                let elems = decos.iter().enumerate().map(|(i, o)| corolla(i + 1, o)).collect::<Result<Vec<_>>>()?;
                let r = WElem::decode(&evaluate(w, k, &elems)?)?;
                match <[Op; 1]>::try_from(r.ops) {
                    Ok([o]) => Ok(o),
                    Err(_) => Err(Error::Marking(format!("a graph with {} outputs cannot fill an {m:?} node", r.cod.len()))),
                }
            }
            Mark::B => {
                let elems = marks
                    .iter()
                    .zip(decos)
                    .map(|(mk, d)| match mk {
                        Mark::O => self.image_of_op(d),
                        Mark::B => Ok(d.clone()),
                        Mark::A => Err(Error::Marking("an A node cannot be evaluated in P".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                evaluate(self.p.as_ref(), k, &elems)
            }
        }
    }

    fn act_in(&self, m: Mark, sigma: &Permutation, d: &Elem) -> Result<Elem> {
        match m {
            Mark::A => self.v.act(sigma, d),
            Mark::O => self.u.act(sigma, d),
            Mark::B => self.p.in_act(sigma, d),
        }
    }

    /// Objects glued to `o` by one generating morphism: adjacent twists at a
    /// node, flips out of `O`, contractions of an eligible pair and the
    /// contraction of the whole graph to a corolla.
    fn neighbours(&self, o: &MarkedObject) -> Result<Vec<MarkedObject>> {
        let g = &o.graph;
        let n = g.node_count();
        let mut out = Vec::new();
        for p in 1..=n {
            let x = g.node_at(p);
            let m = o.marks[p - 1];
            let (ins, outs) = (g.node_in(x), g.node_out(x));
            for t in 1..ins.len() {
                let tau = Permutation::transposition(ins.len(), t, t + 1);
                let mut node_in: Vec<Vec<usize>> = (0..n).map(|y| g.node_in(y).to_vec()).collect();
                node_in[x] = tau.permute(ins)?;
                let node_out = (0..n).map(|y| g.node_out(y).to_vec()).collect();
                let mut next = o.clone();
                next.graph = g.with_orders(node_in, node_out, g.port_in().to_vec(), g.port_out().to_vec())?;
                next.decorations[p - 1] = self.act_in(m, &tau, &o.decorations[p - 1])?;
                out.push(next);
            }
            if m == Mark::B {
                for t in 1..outs.len() {
                    let tau = Permutation::transposition(outs.len(), t, t + 1);
                    let node_in = (0..n).map(|y| g.node_in(y).to_vec()).collect();
                    let mut node_out: Vec<Vec<usize>> = (0..n).map(|y| g.node_out(y).to_vec()).collect();
                    node_out[x] = tau.inverse().permute(outs)?;
                    let mut next = o.clone();
                    next.graph = g.with_orders(node_in, node_out, g.port_in().to_vec(), g.port_out().to_vec())?;
                    next.decorations[p - 1] = self.p.out_act(&tau, &o.decorations[p - 1])?;
                    out.push(next);
                }
            }
            if m == Mark::O {
                out.push(o.flipped(p, Mark::A, o.decorations[p - 1].clone()));
                out.push(o.flipped(p, Mark::B, self.image_of_op(&o.decorations[p - 1])?));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    out.extend(self.contract(o, x, y, &[Mark::O, Mark::A, Mark::B])?);
                }
            }
        }
        out.extend(self.contract_all(o, &[Mark::O, Mark::A, Mark::B])?);
        Ok(out)
    }

    /// `G → H^G_{xy}` for each allowed mark of the merged node; empty when
    /// the pair is not eligible.
    fn contract(&self, o: &MarkedObject, x: usize, y: usize, targets: &[Mark]) -> Result<Vec<MarkedObject>> {
        let mut o = o.clone();
        let (px, py) = (o.graph.position_of(x), o.graph.position_of(y));
        if px > py {
            let gamma = Permutation::transposition(o.graph.node_count(), px, py);
            o = MarkedObject {
                graph: o.graph.permute_node_order(&gamma)?,
                marks: gamma.permute(&o.marks)?,
                decorations: gamma.permute(&o.decorations)?,
            };
        }
        let g = &o.graph;
        if !is_eligible(g, x, y) {
            return Ok(vec![]);
        }
        let dec = decompose(g, x, y)?;
        if dec.reassemble()?.canonical_encode() != g.canonical_encode() {
            return Err(Error::BadInsertion("a decomposition does not reassemble to its graph".into()));
        }
        let (px, py) = (g.position_of(x), g.position_of(y));
        let kmarks = [o.marks[px - 1], o.marks[py - 1]];
        let kdecos = [o.decorations[px - 1].clone(), o.decorations[py - 1].clone()];
        let merged_valence = dec.h.c_valence_of_node(dec.merged)?;
        let merged_pos = dec.h.position_of(dec.merged);
        let mut out = Vec::new();
        for &m in targets {
            if !(kmarks[0].le(m) && kmarks[1].le(m) && self.admits(m, &merged_valence)) {
                continue;
            }
            let merged = self.eval_in(m, &dec.k, &kmarks, &kdecos)?;
            let h = dec.h.node_count();
            let mut marks = vec![m; h];
            let mut decorations = vec![merged.clone(); h];
            for p in 1..=g.node_count() {
                let q = dec.alpha.map[p - 1];
                if q != merged_pos {
                    marks[q - 1] = o.marks[p - 1];
                    decorations[q - 1] = o.decorations[p - 1].clone();
                }
            }
            out.push(MarkedObject { graph: dec.h.clone(), marks, decorations });
        }
        Ok(out)
    }

    /// `G → C_{M,v}`, the whole graph inserted into a corolla.
    fn contract_all(&self, o: &MarkedObject, targets: &[Mark]) -> Result<Vec<MarkedObject>> {
        let v = o.graph.residue_valence();
        let corolla = CoaGraph::untwisted_corolla(&v);
        if o.graph.canonical_encode() == corolla.canonical_encode() {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        for &m in targets {
            if o.marks.iter().all(|k| k.le(m)) && self.admits(m, &v) {
                let d = self.eval_in(m, &o.graph, &o.marks, &o.decorations)?;
                out.push(MarkedObject { graph: corolla.clone(), marks: vec![m], decorations: vec![d] });
            }
        }
        Ok(out)
    }

    /// Why `o` is not an object of the constrained category, if it is not.
    fn constraint_violation(&self, o: &MarkedObject) -> Option<String> {
        for p in 1..=o.graph.node_count() {
            let v = o.graph.c_valence_of_node(o.graph.node_at(p)).ok()?;
            let m = o.marks[p - 1];
            if m != Mark::B && v.outputs.len() != 1 {
                return Some(format!("node {p} is marked {m:?} and has {} outputs", v.outputs.len()));
            }
            if !self.admits(m, &v) {
                return Some(format!("node {p} is marked {m:?} but has valence {v}"));
            }
        }
        None
    }
}

/// A decorated marked graph: `marks[i]` and `decorations[i]` belong to the
/// node at position `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedObject {
    pub graph: CoaGraph,
    pub marks: Vec<Mark>,
    pub decorations: Vec<Elem>,
}

impl MarkedObject {
    pub fn corolla(v: &CValence, mark: Mark, decoration: Elem) -> Self {
        MarkedObject { graph: CoaGraph::untwisted_corolla(v), marks: vec![mark], decorations: vec![decoration] }
    }

    pub fn marked(&self) -> MarkedCoaGraph {
        let mut marks = vec![Mark::O; self.graph.node_count()];
        for (i, &x) in self.graph.node_order().iter().enumerate() {
            marks[x] = self.marks[i];
        }
        MarkedCoaGraph { graph: self.graph.clone(), marks }
    }

    pub fn nodes(&self) -> usize {
        self.marks.len()
    }

    fn flipped(&self, p: usize, to: Mark, d: Elem) -> MarkedObject {
        let mut next = self.clone();
        next.marks[p - 1] = to;
        next.decorations[p - 1] = d;
        next
    }

    /// The least encoding over node orders, with its object.
    pub fn normal(&self) -> Result<(Vec<u8>, MarkedObject)> {
        let mut best: Option<(Vec<u8>, MarkedObject)> = None;
        for gamma in Permutation::all(self.nodes()) {
            let o = MarkedObject {
                graph: self.graph.permute_node_order(&gamma)?.canonical(),
                marks: gamma.permute(&self.marks)?,
                decorations: gamma.permute(&self.decorations)?,
            };
            let key = serde_json::to_vec(&o).expect("objects serialize");
            if best.as_ref().map_or(true, |(k, _)| key < *k) {
                best = Some((key, o));
            }
        }
        Ok(best.expect("at least one order"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedOrder {
    Forward,
    Reverse,
}

/// The colimit at one valence over objects with at most `level` nodes.
#[derive(Clone, Debug)]
pub struct TruncatedColimit {
    pub valence: CValence,
    pub level: usize,
    pub objects: Vec<MarkedObject>,
    pub class_of: Vec<usize>,
    pub classes: usize,
    /// Per class, an object with the fewest nodes.
    pub representatives: Vec<usize>,
    /// Classes among objects with fewer than `level` nodes, glued only
    /// along morphisms between them.
    pub classes_below: usize,
    /// Same class count one level down, and every class has a member with
    /// fewer than `level` nodes.
    pub stabilized: bool,
    pub morphisms: usize,
    index: HashMap<Vec<u8>, usize>,
}

impl TruncatedColimit {
    pub fn class_of_object(&self, o: &MarkedObject) -> Result<Option<usize>> {
        let (key, _) = o.normal()?;
        Ok(self.index.get(&key).map(|&i| self.class_of[i]))
    }

    /// The partition of objects, each object given by its normal encoding.
    pub fn partition(&self) -> BTreeSet<BTreeSet<Vec<u8>>> {
        let mut blocks: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
        for (key, &i) in &self.index {
            blocks.entry(self.class_of[i]).or_default().insert(key.clone());
        }
        blocks.into_values().collect()
    }
}

struct Closure<'a> {
    prob: &'a PushoutProblem,
    objects: Vec<MarkedObject>,
    index: HashMap<Vec<u8>, usize>,
    edges: Vec<(usize, usize)>,
    queue: VecDeque<usize>,
}

impl Closure<'_> {
    fn add(&mut self, o: &MarkedObject) -> Result<usize> {
        let (key, o) = o.normal()?;
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let i = self.objects.len();
        self.objects.push(o);
        self.index.insert(key, i);
        self.queue.push_back(i);
        Ok(i)
    }

    fn run(&mut self) -> Result<()> {
        while let Some(i) = self.queue.pop_front() {
            let o = self.objects[i].clone();
            for next in self.prob.neighbours(&o)? {
                let j = self.add(&next)?;
                self.edges.push((i, j));
            }
        }
        Ok(())
    }
}

/// Decorated objects with exactly `k` nodes and residue `v`.
fn seeds(types: &[NodeType], v: &CValence, k: usize) -> Vec<MarkedObject> {
    let mut out = Vec::new();
    if k > 0 && types.is_empty() {
        return out;
    }
    let mut pick = vec![0; k];
    loop {
        let arity = Arity::new(pick.iter().map(|&i| types[i].valence.clone()).collect(), v.clone());
        for g in enumerate_coa(&arity) {
            let marks: Vec<Mark> = pick.iter().map(|&i| types[i].mark).collect();
            let mut idx = vec![0; k];
            'decos: loop {
                let decorations = pick.iter().zip(&idx).map(|(&t, &j)| types[t].elems[j].clone()).collect();
                out.push(MarkedObject { graph: g.clone(), marks: marks.clone(), decorations });
                let mut t = k;
                loop {
                    if t == 0 {
                        break 'decos;
                    }
                    t -= 1;
                    idx[t] += 1;
                    if idx[t] < types[pick[t]].elems.len() {
                        break;
                    }
                    idx[t] = 0;
                }
            }
        }
        let mut t = k;
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            if pick[t] + 1 < types.len() {
                pick[t] += 1;
                for s in t + 1..k {
                    pick[s] = pick[t];
                }
                break;
            }
        }
    }
}

pub fn pushout_component(prob: &PushoutProblem, v: &CValence, level: usize) -> Result<TruncatedColimit> {
    pushout_component_ordered(prob, v, level, SeedOrder::Forward)
}

pub fn pushout_component_ordered(
    prob: &PushoutProblem,
    v: &CValence,
    level: usize,
    order: SeedOrder,
) -> Result<TruncatedColimit> {
    let colours = prob.colours();
    if let Some(c) = v.colours().find(|c| !colours.contains(c)) {
        return Err(Error::UnknownColour(c.clone()));
    }
    let types = prob.node_types()?;
    let mut all = Vec::new();
    if prob.in_c(v) {
        let elems = prob.p.hom(v).map_err(|e| Error::NotFinite(format!("{v} ({e})")))?;
        all.extend(elems.iter().map(|x| MarkedObject::corolla(v, Mark::B, x.clone())));
    }
    for k in 0..=level {
        all.extend(seeds(&types, v, k));
    }
    if order == SeedOrder::Reverse {
        all.reverse();
    }
    let mut cl = Closure { prob, objects: Vec::new(), index: HashMap::new(), edges: Vec::new(), queue: VecDeque::new() };
    for o in &all {
        cl.add(o)?;
        cl.run()?;
    }

    let n = cl.objects.len();
    let mut uf = UnionFind::new(n);
    let mut below = UnionFind::new(n);
    for &(i, j) in &cl.edges {
        uf.union(i, j);
        if cl.objects[i].nodes() < level && cl.objects[j].nodes() < level {
            below.union(i, j);
        }
    }
    // classes numbered by their least member in normal-encoding order
    let mut keyed: Vec<(&Vec<u8>, usize)> = cl.index.iter().map(|(k, &i)| (k, i)).collect();
    keyed.sort();
    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut class_of = vec![0; n];
    for &(_, i) in &keyed {
        let root = uf.find(i);
        let next = number.len();
        class_of[i] = *number.entry(root).or_insert(next);
    }
    let classes = number.len();
    let mut representatives: Vec<Option<usize>> = vec![None; classes];
    for &(_, i) in &keyed {
        let r = &mut representatives[class_of[i]];
        if r.map_or(true, |j| cl.objects[i].nodes() < cl.objects[j].nodes()) {
            *r = Some(i);
        }
    }
    let representatives: Vec<usize> = representatives.into_iter().map(|r| r.expect("non-empty class")).collect();
    let small: Vec<usize> = (0..n).filter(|&i| cl.objects[i].nodes() < level).collect();
    let classes_below = small.iter().map(|&i| below.find(i)).collect::<BTreeSet<_>>().len();
    let stabilized =
        level > 0 && classes_below == classes && representatives.iter().all(|&i| cl.objects[i].nodes() < level);
    Ok(TruncatedColimit {
        valence: v.clone(),
        level,
        objects: cl.objects,
        class_of,
        classes,
        representatives,
        classes_below,
        stabilized,
        morphisms: cl.edges.len(),
        index: cl.index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValenceVerdict {
    pub valence: CValence,
    pub level: usize,
    pub p_count: usize,
    pub classes: usize,
    pub objects: usize,
    pub injective: bool,
    pub surjective: bool,
    pub stabilized: bool,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullyFaithfulReport {
    pub hypotheses: Hypotheses,
    pub verdicts: Vec<ValenceVerdict>,
}

impl FullyFaithfulReport {
    /// Hypotheses hold, every level is injective, stabilized levels are
    /// bijective and the last level of each valence is bijective.
    pub fn passed(&self) -> bool {
        let mut last: BTreeMap<String, &ValenceVerdict> = BTreeMap::new();
        for v in &self.verdicts {
            last.insert(v.valence.to_string(), v);
        }
        self.hypotheses.hold()
            && self.verdicts.iter().all(|v| v.injective && (!v.stabilized || v.bijective))
            && last.values().all(|v| v.bijective)
    }
}

/// The map `P(v) → R_N(v)` sending `x` to the class of its `B`-corolla.
pub fn verdict(prob: &PushoutProblem, colimit: &TruncatedColimit) -> Result<ValenceVerdict> {
    let v = &colimit.valence;
    let elems = prob.p.hom(v)?;
    let mut hit = BTreeSet::new();
    for x in elems.iter() {
        let c = colimit
            .class_of_object(&MarkedObject::corolla(v, Mark::B, x.clone()))?
            .ok_or_else(|| Error::InvalidGraph("a B-corolla is missing from the colimit".into()))?;
        hit.insert(c);
    }
    let injective = hit.len() == elems.len();
    let surjective = hit.len() == colimit.classes;
    Ok(ValenceVerdict {
        valence: v.clone(),
        level: colimit.level,
        p_count: elems.len(),
        classes: colimit.classes,
        objects: colimit.objects.len(),
        injective,
        surjective,
        stabilized: colimit.stabilized,
        bijective: injective && surjective,
    })
}

pub fn verify_fully_faithful(
    prob: &PushoutProblem,
    valences: &[CValence],
    levels: std::ops::RangeInclusive<usize>,
) -> Result<FullyFaithfulReport> {
    let hypotheses = prob.hypotheses()?;
    let mut verdicts = Vec::new();
    for v in valences {
        if !prob.in_c(v) {
            return Err(Error::Malformed(format!("{v} is not a valence over the colours of P")));
        }
        for n in levels.clone() {
            verdicts.push(verdict(prob, &pushout_component(prob, v, n)?)?);
        }
    }
    Ok(FullyFaithfulReport { hypotheses, verdicts })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Flip { position: usize, to: Mark },
    /// An `O → A` flip traversed backwards.
    InverseFlip { position: usize },
    Contract { first: usize, second: usize },
    Final,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub result: MarkedObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Reached(Vec<Step>),
    Blocked { reason: String, at: MarkedObject, steps: Vec<Step> },
}

/// Drives `o` to a `B`-marked corolla: `O` nodes flip to `A`, inner edges
/// with colours outside `C` are contracted, the `A` nodes flip back to `O`
/// and on to `B`, and the all-`B` graph maps to its corolla.
pub fn normalize_to_corolla(prob: &PushoutProblem, o: &MarkedObject) -> Result<Normalization> {
    let mut steps: Vec<Step> = Vec::new();
    let blocked = |reason: String, at: &MarkedObject, steps: Vec<Step>| Normalization::Blocked { reason, at: at.clone(), steps };
    if let Some(reason) = prob.constraint_violation(o) {
        return Ok(blocked(reason, o, steps));
    }
    let mut cur = o.clone();
    let push = |steps: &mut Vec<Step>, kind: StepKind, cur: &MarkedObject| steps.push(Step { kind, result: cur.clone() });

    for p in 1..=cur.nodes() {
        if cur.marks[p - 1] == Mark::O {
            cur = cur.flipped(p, Mark::A, cur.decorations[p - 1].clone());
            push(&mut steps, StepKind::Flip { position: p, to: Mark::A }, &cur);
        }
    }
    loop {
        let g = &cur.graph;
        let c = prob.p.colours();
        let Some(e) = g.graph().inner_edges().into_iter().find(|&e| !c.contains(&g.label(e).to_string())) else {
            break;
        };
        let (x, y) = (g.graph().exits(e).expect("inner"), g.graph().enters(e).expect("inner"));
        let (px, py) = (g.position_of(x), g.position_of(y));
        if cur.marks[px - 1] != Mark::A || cur.marks[py - 1] != Mark::A {
            return Ok(blocked(format!("edge {e} of colour {} joins nodes {px} and {py}", g.label(e)), &cur, steps));
        }
        let Some(next) = prob.contract(&cur, x, y, &[Mark::A])?.pop() else {
            return Ok(blocked(format!("nodes {px} and {py} cannot be contracted"), &cur, steps));
        };
        cur = next;
        push(&mut steps, StepKind::Contract { first: px, second: py }, &cur);
    }
    for p in 1..=cur.nodes() {
        if cur.marks[p - 1] != Mark::A {
            continue;
        }
        let v = cur.graph.c_valence_of_node(cur.graph.node_at(p))?;
        let op = &cur.decorations[p - 1];
        if !prob.admits(Mark::O, &v) || !prob.u.hom(&signature_of(&v))?.contains(op) {
            return Ok(blocked(format!("the operation at node {p} does not come from U"), &cur, steps));
        }
        cur = cur.flipped(p, Mark::O, op.clone());
        push(&mut steps, StepKind::InverseFlip { position: p }, &cur);
    }
    for p in 1..=cur.nodes() {
        if cur.marks[p - 1] == Mark::O {
            let d = prob.image_of_op(&cur.decorations[p - 1])?;
            cur = cur.flipped(p, Mark::B, d);
            push(&mut steps, StepKind::Flip { position: p, to: Mark::B }, &cur);
        }
    }
    let v = cur.graph.residue_valence();
    let d = prob.eval_in(Mark::B, &cur.graph, &cur.marks, &cur.decorations)?;
    cur = MarkedObject::corolla(&v, Mark::B, d);
    push(&mut steps, StepKind::Final, &cur);
    Ok(Normalization::Reached(steps))
}

/// DOT text for a marked graph, using the marks' node shapes.
pub fn marked_dot(o: &MarkedObject) -> String {
    o.marked().to_dot()
}

/// Ready-made problems over the split idempotent `φ: c → d`, `ψ: d → c`,
/// `φψ = 1_d`, viewed as a unary operad `V` with `U` its part on `c`.
pub mod instances {
    use super::*;
    use crate::operad::{full_suboperad, Arrow, CategoryOperad, ColourSet, FiniteCategory};
    use crate::prop::{free_prop_on_bicollection, Bicollection, Generator};

    fn split() -> (Arc<dyn SetOperad>, Arc<dyn SetOperad>) {
        let v: Arc<dyn SetOperad> = Arc::new(CategoryOperad::new(Arc::new(FiniteCategory::split_idempotent())));
        let u = full_suboperad(v.clone(), ColourSet::Finite(vec![Colour::name("c")])).expect("c is a colour of V");
        (v, Arc::new(u))
    }

    /// `U = V`, `P = w_!V` and `f` the identity.
    pub fn identity(max_ports: usize) -> Result<PushoutProblem> {
        let (v, _) = split();
        let p = Arc::new(free_prop_on_operad(v.clone(), &["c", "d"])?);
        PushoutProblem::new(v.clone(), &["c", "d"], v, &["c", "d"], p, OpImage::Identity, max_ports)
    }

    /// `P = w_!U` and `f` the identity.
    pub fn split_free(max_ports: usize) -> Result<PushoutProblem> {
        let (v, u) = split();
        let p = Arc::new(free_prop_on_operad(u.clone(), &["c"])?);
        PushoutProblem::new(v, &["c", "d"], u, &["c"], p, OpImage::Identity, max_ports)
    }

    /// `P` free on one generator `eps: (c,c) → ()`, with `U`'s operations
    /// sent to identities (`θ` is idempotent, so this is a morphism).
    pub fn desk(level: usize, max_ports: usize) -> Result<PushoutProblem> {
        let (v, u) = split();
        let eps = Generator { name: "eps".into(), valence: CValence::new(vec!["c", "c"], vec![]) };
        let p = Arc::new(free_prop_on_bicollection(Bicollection::new(vec!["c".into()], vec![eps])?, level));
        PushoutProblem::new(v, &["c", "d"], u, &["c"], p, OpImage::Collapse, max_ports)
    }

    /// `U` keeps only `1_c`, so `U ⊆ V` is not full.
    pub fn non_full(max_ports: usize) -> Result<PushoutProblem> {
        let (v, _) = split();
        let one = FiniteCategory::new(
            vec!["c".into()],
            vec![Arrow { name: "1c".into(), source: "c".into(), target: "c".into() }],
            vec![("1c".into(), "1c".into(), "1c".into())],
        )?;
        let u: Arc<dyn SetOperad> = Arc::new(CategoryOperad::new(Arc::new(one)));
        let p = Arc::new(free_prop_on_operad(u.clone(), &["c"])?);
        PushoutProblem::new(v, &["c", "d"], u, &["c"], p, OpImage::Identity, max_ports)
    }
}

#[cfg(test)]
mod tests {
    use super::instances::*;
    use super::*;
    use crate::graph::Graph;

    fn cv(ins: &[&str], outs: &[&str]) -> CValence {
        CValence::new(ins.to_vec(), outs.to_vec())
    }

    fn two_chain() -> CoaGraph {
        CoaGraph::vertical_frame(&["c".into()], &["c".into()], &["c".into()])
    }

    #[test]
    fn mark_order() {
        use Mark::*;
        assert!(O.le(A) && O.le(B) && O.le(O) && A.le(A));
        assert!(!A.le(B) && !B.le(A) && !A.le(O) && !B.le(O));
    }

    #[test]
    fn marked_insertion_respects_the_order() {
        let v = cv(&["c"], &["c"]);
        let g = MarkedCoaGraph::new(two_chain(), vec![Mark::B, Mark::A]).unwrap();
        let b = g.graph.node_at(1);
        let same = marked_insert(&g, b, &MarkedCoaGraph::corolla(&v, Mark::B)).unwrap();
        assert_eq!(same.graph.canonical_encode(), g.graph.canonical_encode());
        assert_eq!(same.marks_by_position(), g.marks_by_position());

        let a = g.graph.node_at(2);
        let os = marked_insert(&g, a, &MarkedCoaGraph::uniform(two_chain(), Mark::O)).unwrap();
        assert_eq!(os.graph.node_count(), 3);
        assert_eq!(os.marks_by_position(), vec![Mark::B, Mark::O, Mark::O]);

        let bad = marked_insert(&g, b, &MarkedCoaGraph::corolla(&v, Mark::A));
        assert!(matches!(bad, Err(Error::Marking(_))));
        let mismatch = marked_insert(&g, b, &MarkedCoaGraph::corolla(&cv(&["c"], &[]), Mark::B));
        assert!(mismatch.is_err());
    }

    #[test]
    fn flips_are_graph_preserving() {
        let target = MarkedCoaGraph::new(two_chain(), vec![Mark::A, Mark::B]).unwrap();
        let v = cv(&["c"], &["c"]);
        let flip = MarkedMorphism {
            inserts: vec![MarkedCoaGraph::corolla(&v, Mark::O), MarkedCoaGraph::corolla(&v, Mark::B)],
            alpha: InsertionPermutation::monotone(&[1, 1]),
        };
        assert!(flip.is_graph_preserving(&target));
        assert_eq!(flip.source(&target).unwrap().marks_by_position(), vec![Mark::O, Mark::B]);

        let grow = MarkedMorphism {
            inserts: vec![MarkedCoaGraph::uniform(two_chain(), Mark::A), MarkedCoaGraph::corolla(&v, Mark::B)],
            alpha: InsertionPermutation::monotone(&[2, 1]),
        };
        assert!(grow.source(&target).is_ok());
        assert!(!grow.is_graph_preserving(&target));
    }

    #[test]
    fn identity_problem_is_bijective_at_one_node() {
        let prob = identity(2).unwrap();
        let valences = [cv(&["c"], &["c"]), cv(&["c"], &["d"]), cv(&["d", "c"], &["c", "d"]), cv(&["c", "c"], &["c"])];
        let report = verify_fully_faithful(&prob, &valences, 1..=1).unwrap();
        assert!(report.hypotheses.hold());
        for v in &report.verdicts {
            assert!(v.bijective, "{v:?}");
        }
        assert!(report.passed());
    }

    #[test]
    fn free_on_u_matches_free_on_v() {
        let prob = split_free(2).unwrap();
        let (v, _) = {
            let p = identity(2).unwrap();
            (p.v.clone(), ())
        };
        let wv = free_prop_on_operad(v, &["c", "d"]).unwrap();
        for val in [cv(&["c"], &["c"]), cv(&["c", "c"], &["c"]), cv(&["c"], &["c", "c"]), cv(&["c", "c"], &["c", "c"])] {
            let r = pushout_component(&prob, &val, 3).unwrap();
            assert_eq!(r.classes, wv.hom(&val).unwrap().len(), "{val}");
            let verdict = verdict(&prob, &r).unwrap();
            assert!(verdict.bijective, "{verdict:?}");
        }
        assert_eq!(pushout_component(&prob, &cv(&["c"], &["c"]), 3).unwrap().classes, 2);
    }

    #[test]
    fn desk_instance_is_fully_faithful() {
        let prob = desk(4, 2).unwrap();
        let valences = [cv(&["c"], &["c"]), cv(&["c", "c"], &[]), cv(&[], &[])];
        let report = verify_fully_faithful(&prob, &valences, 1..=4).unwrap();
        assert!(report.hypotheses.hold(), "{:?}", report.hypotheses);
        for v in &valences {
            let last = report.verdicts.iter().filter(|x| x.valence == *v).last().unwrap();
            assert!(last.stabilized && last.bijective, "{last:?}");
        }
        assert!(report.passed());
    }

    #[test]
    fn non_full_inclusion_is_flagged() {
        let h = non_full(2).unwrap().hypotheses().unwrap();
        assert!(!h.full);
        assert!(h.fullness_witness.unwrap().contains("(c;c)"));
        assert!(h.injective_on_colours && h.morphism);
    }

    #[test]
    fn sampled_morphism_check() {
        use crate::operad::{CategoryOperad, FiniteCategory};
        let v: Arc<dyn SetOperad> = Arc::new(CategoryOperad::new(Arc::new(FiniteCategory::cyclic_monoid(3).unwrap())));
        let p = Arc::new(free_prop_on_operad(v.clone(), &["*"]).unwrap());
        let image = |name: &str| WElem { dom: vec!["*".into()], cod: vec!["*".into()], f: vec![1], ops: vec![name.as_bytes().to_vec()] }.encode();
        let table = |pairs: &[(&str, &str)]| OpImage::Table(pairs.iter().map(|(a, b)| (a.to_string(), image(b))).collect());
        let good = table(&[("id", "id"), ("r1", "r1"), ("r2", "r2")]);
        let prob = PushoutProblem::new(v.clone(), &["*"], v.clone(), &["*"], p.clone(), good, 2).unwrap();
        assert!(prob.hypotheses().unwrap().hold());
        // r1 ∘ r1 = r2 but the images compose to r2 ∘ r2 = r1
        let bad = table(&[("id", "id"), ("r1", "r2"), ("r2", "r2")]);
        let prob = PushoutProblem::new(v.clone(), &["*"], v, &["*"], p, bad, 2).unwrap();
        let h = prob.hypotheses().unwrap();
        assert!(!h.morphism && h.morphism_witness.is_some(), "{h:?}");
    }

    #[test]
    fn obstruction_graph_is_not_reducible() {
        // node 1 (A) feeds node 2 (B) along x and node 4 (A) along d; node 2
        // feeds node 4 along y
        let gr = Graph::new(3, vec![Some(0), Some(1), Some(2), Some(2), None], vec![None, Some(0), Some(0), Some(1), Some(2)])
            .unwrap();
        let labels = ["c", "c", "d", "c", "c"].map(String::from).to_vec();
        let g = CoaGraph::new(gr, labels, vec![vec![0], vec![1], vec![3, 2]], vec![vec![1, 2], vec![3], vec![4]], vec![0], vec![4], vec![0, 1, 2])
            .unwrap();
        assert!(!is_eligible(&g, 0, 2));
        let prob = desk(2, 2).unwrap();
        let o = MarkedObject {
            graph: g,
            marks: vec![Mark::A, Mark::B, Mark::A],
            decorations: vec![b"phi".to_vec(), vec![], b"psi".to_vec()],
        };
        match normalize_to_corolla(&prob, &o).unwrap() {
            Normalization::Blocked { reason, .. } => assert!(reason.contains("2 outputs"), "{reason}"),
            other => panic!("{other:?}"),
        }
        assert!(marked_dot(&o).contains("invtriangle"));
        assert!(marked_dot(&o).contains("orientation=270"));
    }

    #[test]
    fn seed_order_does_not_change_the_partition() {
        let prob = desk(3, 2).unwrap();
        for v in [cv(&["c", "c"], &[]), cv(&["c"], &["c"])] {
            let a = pushout_component_ordered(&prob, &v, 3, SeedOrder::Forward).unwrap();
            let b = pushout_component_ordered(&prob, &v, 3, SeedOrder::Reverse).unwrap();
            assert_eq!(a.partition(), b.partition());
        }
    }

    #[test]
    fn normalization_agrees_with_the_colimit() {
        let prob = desk(3, 2).unwrap();
        let v = cv(&["c", "c"], &[]);
        let r = pushout_component(&prob, &v, 3).unwrap();
        let mut contractions = 0;
        for o in &r.objects {
            let Normalization::Reached(steps) = normalize_to_corolla(&prob, o).unwrap() else {
                panic!("blocked on {o:?}");
            };
            let last = &steps.last().unwrap().result;
            assert_eq!(r.class_of_object(o).unwrap(), r.class_of_object(last).unwrap());
            let mut prev = o.clone();
            for s in &steps {
                match s.kind {
                    StepKind::Flip { .. } | StepKind::InverseFlip { .. } => {
                        // the flip as a morphism from the O-marked side
                        let (from, to) = if matches!(s.kind, StepKind::InverseFlip { .. }) { (&s.result, &prev) } else { (&prev, &s.result) };
                        let target = to.marked();
                        let inserts = (1..=from.nodes())
                            .map(|p| {
                                let val = from.graph.c_valence_of_node(from.graph.node_at(p)).unwrap();
                                MarkedCoaGraph::corolla(&val, from.marks[p - 1])
                            })
                            .collect();
                        let m = MarkedMorphism { inserts, alpha: InsertionPermutation::monotone(&vec![1; from.nodes()]) };
                        assert!(m.is_graph_preserving(&target));
                        assert_eq!(m.source(&target).unwrap().marks_by_position(), from.marks);
                    }
                    StepKind::Contract { .. } => contractions += 1,
                    StepKind::Final => {}
                }
                prev = s.result.clone();
            }
        }
        assert!(contractions > 0);
    }
}
