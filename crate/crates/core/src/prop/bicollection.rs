//! Free PROPs on bicollections and symmetric bicollections, graded by the
//! number of nodes, and the truncated free operad on a one-output
//! bicollection.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{concat, Elem, SetProp, ValenceCache};
use crate::coa::{enumerate_coa, Arity, CValence, CoaGraph};
use crate::error::{Error, Result};
use crate::insertion::insert;
use crate::operad::{Colour, Op, SetOperad, Signature};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub valence: CValence,
}

/// Finitely supported: every element is listed with its valence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBicollection")]
pub struct Bicollection {
    colours: Vec<String>,
    generators: Vec<Generator>,
}

#[derive(Deserialize)]
struct RawBicollection {
    colours: Vec<String>,
    generators: Vec<Generator>,
}

impl TryFrom<RawBicollection> for Bicollection {
    type Error = Error;
    fn try_from(r: RawBicollection) -> Result<Self> {
        Bicollection::new(r.colours, r.generators)
    }
}

impl Bicollection {
    pub fn new(colours: Vec<String>, generators: Vec<Generator>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(&g.name) {
                return Err(Error::Malformed(format!("generator {} listed twice", g.name)));
            }
            if let Some(c) = g.valence.colours().find(|c| !colours.contains(c)) {
                return Err(Error::UnknownColour(c.clone()));
            }
        }
        Ok(Bicollection { colours, generators })
    }

    pub fn empty(colours: &[&str]) -> Self {
        Bicollection { colours: colours.iter().map(|c| c.to_string()).collect(), generators: vec![] }
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn at(&self, v: &CValence) -> Vec<&Generator> {
        self.generators.iter().filter(|g| g.valence == *v).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    In,
    Out,
}

/// One row of an action table: `perm` acting on `element` from `side` gives
/// `result`. Inputs are acted on from the right (`σ*`), outputs from the
/// left (`σ_*`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymAction {
    pub element: String,
    pub side: Side,
    pub perm: Vec<usize>,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawSym", into = "RawSym")]
pub struct SymBicollection {
    base: Bicollection,
    table: Vec<SymAction>,
    /// Closed action: (element, side, perm images) → element.
    closed: HashMap<(String, Side, Vec<usize>), String>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawSym {
    #[serde(flatten)]
    base: Bicollection,
    actions: Vec<SymAction>,
}

impl TryFrom<RawSym> for SymBicollection {
    type Error = Error;
    fn try_from(r: RawSym) -> Result<Self> {
        SymBicollection::new(r.base, r.actions)
    }
}

impl From<SymBicollection> for RawSym {
    fn from(s: SymBicollection) -> Self {
        RawSym { base: s.base, actions: s.table }
    }
}

impl SymBicollection {
    /// The table only needs to generate the action; it is closed under
    /// composition here, and rejected when the closure is inconsistent,
    /// misses a permutation, lands at the wrong valence, or the two actions
    /// fail to commute.
    pub fn new(base: Bicollection, table: Vec<SymAction>) -> Result<Self> {
        let bad = |m: String| Error::Malformed(m);
        let mut rows: HashMap<(String, Side), Vec<(Permutation, String)>> = HashMap::new();
        for a in &table {
            let g = base.generator(&a.element).ok_or_else(|| bad(format!("unknown element {}", a.element)))?;
            let r = base.generator(&a.result).ok_or_else(|| bad(format!("unknown element {}", a.result)))?;
            let p = Permutation::new(a.perm.clone())?;
            let expected = match a.side {
                Side::In => CValence { inputs: p.permute(&g.valence.inputs)?, outputs: g.valence.outputs.clone() },
                Side::Out => CValence { inputs: g.valence.inputs.clone(), outputs: super::outputs_after(&p, &g.valence.outputs)? },
            };
            if expected != r.valence {
                return Err(bad(format!("{} acted on by {:?} lands at {}, not {}", a.element, a.perm, expected, r.valence)));
            }
            rows.entry((a.element.clone(), a.side)).or_default().push((p, a.result.clone()));
        }
        let mut closed = HashMap::new();
        for g in &base.generators {
            for side in [Side::In, Side::Out] {
                let n = match side {
                    Side::In => g.valence.inputs.len(),
                    Side::Out => g.valence.outputs.len(),
                };
                let mut known: HashMap<Vec<usize>, String> = HashMap::new();
                known.insert(Permutation::identity(n).images().to_vec(), g.name.clone());
                let mut frontier = vec![(Permutation::identity(n), g.name.clone())];
                while let Some((pi, y)) = frontier.pop() {
                    for (s, z) in rows.get(&(y.clone(), side)).into_iter().flatten() {
                        let next = match side {
                            Side::In => pi.compose(s)?,
                            Side::Out => s.compose(&pi)?,
                        };
                        match known.get(next.images()) {
                            Some(w) if w != z => {
                                return Err(bad(format!("action on {} by {:?} gives both {w} and {z}", g.name, next.images())))
                            }
                            Some(_) => {}
                            None => {
                                known.insert(next.images().to_vec(), z.clone());
                                frontier.push((next, z.clone()));
                            }
                        }
                    }
                }
                if known.len() != Permutation::all(n).len() {
                    return Err(bad(format!("action table does not generate all of the action on {}", g.name)));
                }
                for (p, r) in known {
                    closed.insert((g.name.clone(), side, p), r);
                }
            }
        }
        let s = SymBicollection { base, table, closed };
        for g in &s.base.generators {
            for a in Permutation::all(g.valence.inputs.len()) {
                for b in Permutation::all(g.valence.outputs.len()) {
                    let x = s.one_side(&s.one_side(&g.name, Side::Out, &b)?, Side::In, &a)?;
                    let y = s.one_side(&s.one_side(&g.name, Side::In, &a)?, Side::Out, &b)?;
                    if x != y {
                        return Err(bad(format!("the actions on {} do not commute", g.name)));
                    }
                }
            }
        }
        Ok(s)
    }

    /// The free symmetric bicollection: `(g, σ, τ)` for every generator `g`
    /// and `σ`, `τ` on its inputs and outputs.
    pub fn free_on(a: &Bicollection) -> SymBicollection {
        fn name(g: &str, s: &Permutation, t: &Permutation) -> String {
            format!("({g},{:?},{:?})", s.images(), t.images())
        }
        let mut gens = Vec::new();
        let mut table = Vec::new();
        for g in &a.generators {
            let (n, m) = (g.valence.inputs.len(), g.valence.outputs.len());
            for s in Permutation::all(n) {
                for t in Permutation::all(m) {
                    let valence = CValence {
                        inputs: s.permute(&g.valence.inputs).expect("sizes"),
                        outputs: super::outputs_after(&t, &g.valence.outputs).expect("sizes"),
                    };
                    gens.push(Generator { name: name(&g.name, &s, &t), valence });
                    for s2 in Permutation::all(n) {
                        let result = name(&g.name, &s.compose(&s2).expect("sizes"), &t);
                        table.push(SymAction { element: name(&g.name, &s, &t), side: Side::In, perm: s2.images().to_vec(), result });
                    }
                    for t2 in Permutation::all(m) {
                        let result = name(&g.name, &s, &t2.compose(&t).expect("sizes"));
                        table.push(SymAction { element: name(&g.name, &s, &t), side: Side::Out, perm: t2.images().to_vec(), result });
                    }
                }
            }
        }
        let base = Bicollection::new(a.colours.clone(), gens).expect("names are distinct");
        SymBicollection::new(base, table).expect("free action is valid")
    }

    pub fn base(&self) -> &Bicollection {
        &self.base
    }

    fn one_side(&self, x: &str, side: Side, p: &Permutation) -> Result<String> {
        self.closed
            .get(&(x.to_string(), side, p.images().to_vec()))
            .cloned()
            .ok_or_else(|| Error::Malformed(format!("no action on {x} by {:?}", p.images())))
    }

    /// `σ* τ_* x`.
    pub fn act(&self, x: &str, sigma: &Permutation, tau: &Permutation) -> Result<String> {
        self.one_side(&self.one_side(x, Side::Out, tau)?, Side::In, sigma)
    }
}

/// A coa graph with its nodes decorated: `decorations[i]` sits on the node
/// at position `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decorated {
    pub graph: CoaGraph,
    pub decorations: Vec<String>,
}

impl Decorated {
    pub fn decode(x: &Elem) -> Result<Decorated> {
        serde_json::from_slice(x).map_err(|e| Error::BadOperation(e.to_string()))
    }

    pub fn encode(&self) -> Elem {
        serde_json::to_vec(self).expect("decorated graphs serialize")
    }

    pub fn nodes(&self) -> usize {
        self.decorations.len()
    }

    /// The least encoding over all node orders.
    fn min_over_orders(&self) -> Result<(Vec<u8>, Decorated)> {
        let mut best: Option<(Vec<u8>, Decorated)> = None;
        for gamma in Permutation::all(self.nodes()) {
            let graph = self.graph.permute_node_order(&gamma)?.canonical();
            let d = Decorated { decorations: gamma.permute(&self.decorations)?, graph };
            let key = d.encode();
            if best.as_ref().map_or(true, |(k, _)| key < *k) {
                best = Some((key, d));
            }
        }
        Ok(best.expect("at least one order"))
    }
}

/// Cumulative levels: `levels[k]` holds the elements with at most `k` nodes.
#[derive(Clone, Debug)]
pub struct GradedHomSet {
    pub valence: CValence,
    pub levels: Vec<Arc<Vec<Elem>>>,
    /// The top level equals the next one, and composites of top-level
    /// elements inside this hom-set stay at the top level. Both conditions
    /// are necessary for the hom-set to be finite with nothing beyond the
    /// top level; they are not sufficient (empty intermediate levels fool
    /// them).
    pub saturated: bool,
}

impl GradedHomSet {
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }
}

struct Engine {
    base: Bicollection,
    sym: Option<SymBicollection>,
    level: usize,
    cache: ValenceCache,
}

impl Engine {
    fn normalize(&self, d: Decorated) -> Result<Decorated> {
        let Some(sym) = &self.sym else {
            return Ok(d.min_over_orders()?.1);
        };
        // every choice of a twist at every node, then every node order
        let n = d.nodes();
        let twists: Vec<Vec<(Permutation, Permutation)>> = (1..=n)
            .map(|p| {
                let x = d.graph.node_at(p);
                let (a, b) = (d.graph.node_in(x).len(), d.graph.node_out(x).len());
                Permutation::all(a).into_iter().flat_map(|s| Permutation::all(b).into_iter().map(move |t| (s.clone(), t))).collect()
            })
            .collect();
        let mut idx = vec![0; n];
        let mut best: Option<(Vec<u8>, Decorated)> = None;
        loop {
            let mut node_in: Vec<Vec<usize>> = (0..n).map(|x| d.graph.node_in(x).to_vec()).collect();
            let mut node_out: Vec<Vec<usize>> = (0..n).map(|x| d.graph.node_out(x).to_vec()).collect();
            let mut decorations = Vec::with_capacity(n);
            for p in 1..=n {
                let x = d.graph.node_at(p);
                let (s, t) = &twists[p - 1][idx[p - 1]];
                node_in[x] = s.permute(&node_in[x])?;
                node_out[x] = t.inverse().permute(&node_out[x])?;
                decorations.push(sym.act(&d.decorations[p - 1], s, t)?);
            }
            let graph = d.graph.with_orders(node_in, node_out, d.graph.port_in().to_vec(), d.graph.port_out().to_vec())?;
            let cand = Decorated { graph, decorations }.min_over_orders()?;
            if best.as_ref().map_or(true, |(k, _)| cand.0 < *k) {
                best = Some(cand);
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(best.expect("at least one twist").1);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < twists[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn exact_level(&self, v: &CValence, j: usize) -> Result<Vec<Elem>> {
        let gens = &self.base.generators;
        let mut out = BTreeSet::new();
        if v.colours().any(|c| !self.base.colours.contains(c)) || (j > 0 && gens.is_empty()) {
            return Ok(vec![]);
        }
        // multisets of generators as nondecreasing index lists
        let mut pick = vec![0; j];
        loop {
            let arity = Arity::new(pick.iter().map(|&i| gens[i].valence.clone()).collect(), v.clone());
            for g in enumerate_coa(&arity) {
                let d = Decorated { graph: g, decorations: pick.iter().map(|&i| gens[i].name.clone()).collect() };
                out.insert(self.normalize(d)?.encode());
            }
            let mut k = j;
            loop {
                if k == 0 {
                    return Ok(out.into_iter().collect());
                }
                k -= 1;
                if pick[k] + 1 < gens.len() {
                    pick[k] += 1;
                    for t in k + 1..j {
                        pick[t] = pick[k];
                    }
                    break;
                }
            }
        }
    }

    /// Elements with at most `k` nodes.
    fn level(&self, v: &CValence, k: usize) -> Result<Arc<Vec<Elem>>> {
        self.cache.get_or_compute(v, k, || {
            let mut all = if k == 0 { vec![] } else { self.level(v, k - 1)?.to_vec() };
            all.extend(self.exact_level(v, k)?);
            all.sort();
            Ok(all)
        })
    }

    fn graded(&self, v: &CValence, k: usize) -> Result<GradedHomSet> {
        let levels: Vec<Arc<Vec<Elem>>> = (0..=k).map(|j| self.level(v, j)).collect::<Result<_>>()?;
        let mut saturated = self.level(v, k + 1)?.len() == levels[k].len();
        if saturated && v.inputs == v.outputs {
            let top = &levels[k];
            'outer: for x in top.iter() {
                for y in top.iter() {
                    if Decorated::decode(&self.vcomp(x, y)?)?.nodes() > k {
                        saturated = false;
                        break 'outer;
                    }
                }
            }
        }
        Ok(GradedHomSet { valence: v.clone(), levels, saturated })
    }

    fn graft(&self, frame: CoaGraph, first: Decorated, second: Decorated) -> Result<Elem> {
        let g = insert(&frame, frame.node_at(2), &second.graph)?;
        let g = insert(&g, g.node_at(1), &first.graph)?;
        let d = Decorated { graph: g, decorations: concat(&first.decorations, &second.decorations) };
        Ok(self.normalize(d)?.encode())
    }
}

impl SetProp for Engine {
    fn colours(&self) -> &[String] {
        &self.base.colours
    }

    fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>> {
        self.level(v, self.level)
    }

    fn valence(&self, x: &Elem) -> Result<CValence> {
        Ok(Decorated::decode(x)?.graph.residue_valence())
    }

    fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem> {
        let (y, x) = (Decorated::decode(g)?, Decorated::decode(f)?);
        let (vx, vy) = (x.graph.residue_valence(), y.graph.residue_valence());
        if vx.outputs != vy.inputs {
            return Err(Error::ValenceMismatch { expected: format!("{:?}", vx.outputs), found: format!("{:?}", vy.inputs) });
        }
        self.graft(CoaGraph::vertical_frame(&vx.inputs, &vx.outputs, &vy.outputs), x, y)
    }

    fn hcomp(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let (x, y) = (Decorated::decode(a)?, Decorated::decode(b)?);
        self.graft(CoaGraph::horizontal_frame(&x.graph.residue_valence(), &y.graph.residue_valence()), x, y)
    }

    fn in_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = Decorated::decode(a)?;
        let graph = x.graph.permute_inports(sigma)?;
        Ok(self.normalize(Decorated { graph, decorations: x.decorations })?.encode())
    }

    fn out_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = Decorated::decode(a)?;
        let graph = x.graph.permute_exports(sigma)?;
        Ok(self.normalize(Decorated { graph, decorations: x.decorations })?.encode())
    }

    fn unit(&self, a: &[String]) -> Result<Elem> {
        let graph = CoaGraph::wiring(a, &Permutation::identity(a.len()))?.canonical();
        Ok(Decorated { graph, decorations: vec![] }.encode())
    }

    fn describe(&self, x: &Elem) -> String {
        match Decorated::decode(x) {
            Ok(d) => format!("{} nodes [{}] {}", d.nodes(), d.decorations.join(","), d.graph.residue_valence()),
            Err(_) => "?".into(),
        }
    }
}

macro_rules! delegate_prop {
    ($t:ty) => {
        impl $t {
            /// Hom-set levels `0..=k` at `v`.
            pub fn graded(&self, v: &CValence, k: usize) -> Result<GradedHomSet> {
                self.0.graded(v, k)
            }

            /// Elements with at most `k` nodes.
            pub fn at_level(&self, v: &CValence, k: usize) -> Result<Arc<Vec<Elem>>> {
                self.0.level(v, k)
            }

            /// The node bound used by `hom`.
            pub fn bound(&self) -> usize {
                self.0.level
            }
        }

        impl SetProp for $t {
            fn colours(&self) -> &[String] {
                self.0.colours()
            }
            fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>> {
                self.0.hom(v)
            }
            fn valence(&self, x: &Elem) -> Result<CValence> {
                self.0.valence(x)
            }
            fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem> {
                self.0.vcomp(g, f)
            }
            fn hcomp(&self, x: &Elem, y: &Elem) -> Result<Elem> {
                self.0.hcomp(x, y)
            }
            fn in_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem> {
                self.0.in_act(sigma, x)
            }
            fn out_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem> {
                self.0.out_act(sigma, x)
            }
            fn unit(&self, a: &[String]) -> Result<Elem> {
                self.0.unit(a)
            }
            fn describe(&self, x: &Elem) -> String {
                self.0.describe(x)
            }
        }
    };
}

/// Decorated ordered acyclic graphs up to isomorphism; `hom` returns the
/// elements with at most `level` nodes.
pub struct FreeOnBicollection(Engine);

/// As [`FreeOnBicollection`], further identified along the action on node
/// decorations.
pub struct FreeOnSymBicollection(Engine);

delegate_prop!(FreeOnBicollection);
delegate_prop!(FreeOnSymBicollection);

pub fn free_prop_on_bicollection(a: Bicollection, level: usize) -> FreeOnBicollection {
    FreeOnBicollection(Engine { base: a, sym: None, level, cache: ValenceCache::default() })
}

pub fn free_prop_on_sym_bicollection(a: SymBicollection, level: usize) -> FreeOnSymBicollection {
    FreeOnSymBicollection(Engine { base: a.base.clone(), sym: Some(a), level, cache: ValenceCache::default() })
}

/// The free operad on a bicollection whose generators all have one output,
/// as trees with at most `max_nodes` nodes. Composites are computed exactly
/// and may exceed the bound.
pub struct TruncatedFreeOperad {
    prop: FreeOnBicollection,
}

impl TruncatedFreeOperad {
    pub fn new(a: Bicollection, max_nodes: usize) -> Result<Self> {
        if let Some(g) = a.generators.iter().find(|g| g.valence.outputs.len() != 1) {
            return Err(Error::Malformed(format!("generator {} does not have exactly one output", g.name)));
        }
        Ok(TruncatedFreeOperad { prop: free_prop_on_bicollection(a, max_nodes) })
    }

    pub fn nodes(o: &Op) -> Result<usize> {
        Ok(Decorated::decode(o)?.nodes())
    }

    fn valence(s: &Signature) -> Option<CValence> {
        let names: Option<Vec<String>> = s.inputs.iter().map(|c| c.as_name().map(str::to_string)).collect();
        Some(CValence { inputs: names?, outputs: vec![s.output.as_name()?.to_string()] })
    }
}

impl SetOperad for TruncatedFreeOperad {
    fn has_colour(&self, c: &Colour) -> bool {
        c.as_name().map_or(false, |n| self.prop.colours().iter().any(|x| x == n))
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        Some(self.prop.colours().iter().map(|c| Colour::name(c)).collect())
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        match Self::valence(s) {
            Some(v) => self.prop.hom(&v),
            None => Ok(Arc::new(vec![])),
        }
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        let v = self.prop.valence(o)?;
        Ok(Signature::new(v.inputs.iter().map(|c| Colour::name(c)).collect(), Colour::name(&v.outputs[0])))
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        let v = self.prop.valence(o)?;
        if i == 0 || i > v.inputs.len() {
            return Err(Error::OutOfRange { value: i, bound: v.inputs.len() });
        }
        let before = self.prop.unit(&v.inputs[..i - 1])?;
        let after = self.prop.unit(&v.inputs[i..])?;
        let lower = self.prop.hcomp(&self.prop.hcomp(&before, p)?, &after)?;
        self.prop.vcomp(o, &lower)
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        self.prop.in_act(gamma, o)
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        let n = c.as_name().ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        self.prop.unit(&[n.to_string()])
    }

    fn describe(&self, o: &Op) -> String {
        self.prop.describe(o)
    }
}
