//! Coloured PROPs in Set: the axioms, and free constructions.
//!
//! Conventions: `σ*` sends `P(a;b)` to `P(aσ;b)` with `(aσ)_t = a_σ(t)`;
//! `σ_*` sends `P(a;b)` to `P(a;bσ⁻¹)`, moving output `i` to position `σ(i)`.

mod bicollection;
mod free_operad;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::coa::{CValence, CoaGraph};
use crate::error::{Error, Result};
use crate::operad::Violation;
use crate::perm::Permutation;

pub use bicollection::{
    free_prop_on_bicollection, free_prop_on_sym_bicollection, Bicollection, Decorated, FreeOnBicollection,
    FreeOnSymBicollection, Generator, GradedHomSet, Side, SymAction, SymBicollection, TruncatedFreeOperad,
};
pub use free_operad::{free_prop_on_operad, free_symmetric_monoidal, FreeOnOperad, FreeSymmetricMonoidal, SmElem, WElem};

pub type Elem = Vec<u8>;

pub trait SetProp: Send + Sync {
    fn colours(&self) -> &[String];

    fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>>;

    fn valence(&self, x: &Elem) -> Result<CValence>;

    /// `g ∘ f`, with `f` applied first.
    fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem>;

    fn hcomp(&self, x: &Elem, y: &Elem) -> Result<Elem>;

    fn in_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem>;

    fn out_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem>;

    fn unit(&self, a: &[String]) -> Result<Elem>;

    fn describe(&self, x: &Elem) -> String {
        String::from_utf8_lossy(x).into_owned()
    }
}

/// Memo table keyed by valence.
#[derive(Default)]
pub struct ValenceCache {
    table: RwLock<HashMap<(CValence, usize), Arc<Vec<Elem>>>>,
}

impl ValenceCache {
    pub fn get_or_compute(&self, v: &CValence, level: usize, f: impl FnOnce() -> Result<Vec<Elem>>) -> Result<Arc<Vec<Elem>>> {
        let key = (v.clone(), level);
        if let Some(x) = self.table.read().expect("cache lock").get(&key) {
            return Ok(x.clone());
        }
        let x = Arc::new(f()?);
        self.table.write().expect("cache lock").entry(key).or_insert(x.clone());
        Ok(x)
    }
}

/// `xs·σ⁻¹`, the order of outputs after `σ_*`.
pub fn outputs_after(sigma: &Permutation, xs: &[String]) -> Result<Vec<String>> {
    sigma.inverse().permute(xs)
}

pub fn concat(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().chain(b).cloned().collect()
}

/// One element per valence.
pub struct TerminalProp {
    colours: Vec<String>,
}

impl TerminalProp {
    pub fn new(colours: &[&str]) -> Self {
        TerminalProp { colours: colours.iter().map(|c| c.to_string()).collect() }
    }

    fn elem(v: &CValence) -> Elem {
        serde_json::to_vec(v).expect("valences serialize")
    }
}

impl SetProp for TerminalProp {
    fn colours(&self) -> &[String] {
        &self.colours
    }

    fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>> {
        let ok = v.colours().all(|c| self.colours.contains(c));
        Ok(Arc::new(if ok { vec![Self::elem(v)] } else { vec![] }))
    }

    fn valence(&self, x: &Elem) -> Result<CValence> {
        serde_json::from_slice(x).map_err(|e| Error::BadOperation(e.to_string()))
    }

    fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem> {
        let (vg, vf) = (self.valence(g)?, self.valence(f)?);
        if vg.inputs != vf.outputs {
            return Err(Error::ValenceMismatch { expected: format!("{:?}", vf.outputs), found: format!("{:?}", vg.inputs) });
        }
        Ok(Self::elem(&CValence { inputs: vf.inputs, outputs: vg.outputs }))
    }

    fn hcomp(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        let (a, b) = (self.valence(x)?, self.valence(y)?);
        Ok(Self::elem(&CValence { inputs: concat(&a.inputs, &b.inputs), outputs: concat(&a.outputs, &b.outputs) }))
    }

    fn in_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem> {
        let v = self.valence(x)?;
        Ok(Self::elem(&CValence { inputs: sigma.permute(&v.inputs)?, outputs: v.outputs }))
    }

    fn out_act(&self, sigma: &Permutation, x: &Elem) -> Result<Elem> {
        let v = self.valence(x)?;
        Ok(Self::elem(&CValence { outputs: outputs_after(sigma, &v.outputs)?, inputs: v.inputs }))
    }

    fn unit(&self, a: &[String]) -> Result<Elem> {
        Ok(Self::elem(&CValence { inputs: a.to_vec(), outputs: a.to_vec() }))
    }
}

#[derive(Clone, Debug)]
pub struct PropConfig {
    /// Hom-sets whose elements form the sample pool.
    pub valences: Vec<CValence>,
    /// Actions are checked exhaustively on elements with at most this many
    /// inputs and outputs.
    pub max_perm: usize,
    /// Largest number of checks per law.
    pub cap: usize,
}

impl PropConfig {
    pub fn new(valences: Vec<CValence>) -> Self {
        PropConfig { valences, max_perm: 3, cap: 20_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Per law, how many checks ran.
    pub per_law: Vec<(String, usize)>,
}

impl PropReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Checker<'a> {
    p: &'a dyn SetProp,
    report: PropReport,
    cap: usize,
    counts: HashMap<&'static str, usize>,
}

impl<'a> Checker<'a> {
    fn full(&self, law: &'static str) -> bool {
        self.counts.get(law).copied().unwrap_or(0) >= self.cap
    }

    fn eq(&mut self, law: &'static str, lhs: Result<Elem>, rhs: Result<Elem>, witness: impl FnOnce() -> String) {
        *self.counts.entry(law).or_default() += 1;
        self.report.checks += 1;
        let bad = match (&lhs, &rhs) {
            (Ok(a), Ok(b)) if a == b => return,
            (Ok(a), Ok(b)) => format!("{} != {}", self.p.describe(a), self.p.describe(b)),
            (Err(e), _) | (_, Err(e)) => e.to_string(),
        };
        if self.report.violations.len() < 50 {
            self.report.violations.push(Violation { law: law.to_string(), witness: format!("{}: {bad}", witness()) });
        }
    }
}

/// Checks every law of a PROP on the elements of the configured hom-sets,
/// and the Eckmann–Hilton consequence at `([];[])`.
pub fn check_prop_axioms(p: &dyn SetProp, cfg: &PropConfig) -> Result<PropReport> {
    let mut pool: Vec<(Elem, CValence)> = Vec::new();
    for v in &cfg.valences {
        for x in p.hom(v)?.iter() {
            pool.push((x.clone(), v.clone()));
        }
    }
    let mut by_dom: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
    for (k, (_, v)) in pool.iter().enumerate() {
        by_dom.entry(v.inputs.clone()).or_default().push(k);
    }
    let none = vec![];
    let from = |a: &[String]| by_dom.get(a).unwrap_or(&none).clone();
    let mut ch = Checker { p, report: PropReport::default(), cap: cfg.cap, counts: HashMap::new() };
    let d = |x: &Elem| p.describe(x);

    // elements lie in the hom-set of their valence
    for (x, v) in &pool {
        let ok = p.valence(x).map(|w| &w == v).unwrap_or(false);
        ch.eq("valence", Ok(vec![u8::from(ok)]), Ok(vec![1]), || d(x));
    }

    // 1. vertical associativity and units
    for (f, vf) in &pool {
        ch.eq("vertical left unit", p.unit(&vf.outputs).and_then(|u| p.vcomp(&u, f)), Ok(f.clone()), || d(f));
        ch.eq("vertical right unit", p.unit(&vf.inputs).and_then(|u| p.vcomp(f, &u)), Ok(f.clone()), || d(f));
        for gk in from(&vf.outputs) {
            let (g, vg) = &pool[gk];
            ch.eq(
                "vertical composite valence",
                p.vcomp(g, f).and_then(|x| p.valence(&x)).map(|v| serde_json::to_vec(&v).unwrap()),
                Ok(serde_json::to_vec(&CValence { inputs: vf.inputs.clone(), outputs: vg.outputs.clone() }).unwrap()),
                || format!("{} o {}", d(g), d(f)),
            );
            for hk in from(&vg.outputs) {
                if ch.full("vertical associativity") {
                    break;
                }
                let h = &pool[hk].0;
                ch.eq(
                    "vertical associativity",
                    p.vcomp(g, f).and_then(|gf| p.vcomp(h, &gf)),
                    p.vcomp(h, g).and_then(|hg| p.vcomp(&hg, f)),
                    || format!("{} o {} o {}", d(h), d(g), d(f)),
                );
            }
        }
    }

    // 2. horizontal associativity and unit
    let empty = p.unit(&[])?;
    for (x, _) in &pool {
        ch.eq("horizontal unit", p.hcomp(x, &empty), Ok(x.clone()), || d(x));
        ch.eq("horizontal unit", p.hcomp(&empty, x), Ok(x.clone()), || d(x));
    }
    'h: for (x, _) in &pool {
        for (y, _) in &pool {
            for (z, _) in &pool {
                if ch.full("horizontal associativity") {
                    break 'h;
                }
                ch.eq(
                    "horizontal associativity",
                    p.hcomp(x, y).and_then(|xy| p.hcomp(&xy, z)),
                    p.hcomp(y, z).and_then(|yz| p.hcomp(x, &yz)),
                    || format!("{} * {} * {}", d(x), d(y), d(z)),
                );
            }
        }
    }

    // 3. interchange
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (k, (_, v)) in pool.iter().enumerate() {
        for g in from(&v.outputs) {
            pairs.push((g, k));
        }
    }
    'i: for &(f, f2) in &pairs {
        for &(g, g2) in &pairs {
            if ch.full("interchange") {
                break 'i;
            }
            let (f, f2, g, g2) = (&pool[f].0, &pool[f2].0, &pool[g].0, &pool[g2].0);
            ch.eq(
                "interchange",
                (|| p.vcomp(&p.hcomp(f, g)?, &p.hcomp(f2, g2)?))(),
                (|| p.hcomp(&p.vcomp(f, f2)?, &p.vcomp(g, g2)?))(),
                || format!("({} * {}) o ({} * {})", d(f), d(g), d(f2), d(g2)),
            );
        }
    }
    let mut strings: Vec<Vec<String>> = cfg.valences.iter().flat_map(|v| [v.inputs.clone(), v.outputs.clone()]).collect();
    strings.sort();
    strings.dedup();
    for a in &strings {
        for b in &strings {
            ch.eq(
                "unit tensor",
                (|| p.hcomp(&p.unit(a)?, &p.unit(b)?))(),
                p.unit(&concat(a, b)),
                || format!("{a:?} * {b:?}"),
            );
        }
    }

    // 4. the actions
    let small = |v: &CValence| v.inputs.len() <= cfg.max_perm && v.outputs.len() <= cfg.max_perm;
    for (x, v) in pool.iter().filter(|(_, v)| small(v)) {
        let (n, m) = (v.inputs.len(), v.outputs.len());
        ch.eq("identity actions", p.in_act(&Permutation::identity(n), x), Ok(x.clone()), || d(x));
        ch.eq("identity actions", p.out_act(&Permutation::identity(m), x), Ok(x.clone()), || d(x));
        for s in Permutation::all(n) {
            for t in Permutation::all(n) {
                ch.eq(
                    "input action",
                    p.in_act(&s, x).and_then(|y| p.in_act(&t, &y)),
                    s.compose(&t).and_then(|st| p.in_act(&st, x)),
                    || format!("{} by {s:?} then {t:?}", d(x)),
                );
            }
            for t in Permutation::all(m) {
                ch.eq(
                    "actions commute",
                    p.out_act(&t, x).and_then(|y| p.in_act(&s, &y)),
                    p.in_act(&s, x).and_then(|y| p.out_act(&t, &y)),
                    || format!("{} by {s:?}, {t:?}", d(x)),
                );
            }
        }
        for s in Permutation::all(m) {
            for t in Permutation::all(m) {
                ch.eq(
                    "output action",
                    p.out_act(&s, x).and_then(|y| p.out_act(&t, &y)),
                    t.compose(&s).and_then(|ts| p.out_act(&ts, x)),
                    || format!("{} by {s:?} then {t:?}", d(x)),
                );
            }
        }
    }

    // 5. actions and vertical composition
    for &(g, f) in &pairs {
        let ((gx, vg), (fx, vf)) = (&pool[g], &pool[f]);
        if !small(vf) || !small(vg) || ch.full("actions and vertical composition") {
            continue;
        }
        for s in Permutation::all(vf.inputs.len()) {
            ch.eq(
                "actions and vertical composition",
                p.vcomp(gx, fx).and_then(|c| p.in_act(&s, &c)),
                p.in_act(&s, fx).and_then(|y| p.vcomp(gx, &y)),
                || format!("{s:?}* ({} o {})", d(gx), d(fx)),
            );
        }
        for s in Permutation::all(vg.outputs.len()) {
            ch.eq(
                "actions and vertical composition",
                p.vcomp(gx, fx).and_then(|c| p.out_act(&s, &c)),
                p.out_act(&s, gx).and_then(|y| p.vcomp(&y, fx)),
                || format!("{s:?}_* ({} o {})", d(gx), d(fx)),
            );
        }
    }
    for (f, vf) in pool.iter().filter(|(_, v)| small(v)) {
        for s in Permutation::all(vf.outputs.len()) {
            let b = outputs_after(&s, &vf.outputs)?;
            for gk in from(&b) {
                if ch.full("sliding a permutation") {
                    break;
                }
                let g = &pool[gk].0;
                ch.eq(
                    "sliding a permutation",
                    p.in_act(&s, g).and_then(|y| p.vcomp(&y, f)),
                    p.out_act(&s, f).and_then(|y| p.vcomp(g, &y)),
                    || format!("{s:?}* {} o {}", d(g), d(f)),
                );
            }
        }
    }

    // 6. actions and horizontal composition, and the symmetry
    'c: for (x, vx) in pool.iter().filter(|(_, v)| v.inputs.len() <= 2 && v.outputs.len() <= 2) {
        for (y, vy) in pool.iter().filter(|(_, v)| v.inputs.len() <= 2 && v.outputs.len() <= 2) {
            if ch.full("actions and horizontal composition") {
                break 'c;
            }
            for a in Permutation::all(vx.inputs.len()) {
                for b in Permutation::all(vx.outputs.len()) {
                    for c in Permutation::all(vy.inputs.len()) {
                        for e in Permutation::all(vy.outputs.len()) {
                            ch.eq(
                                "actions and horizontal composition",
                                (|| p.hcomp(&p.in_act(&a, &p.out_act(&b, x)?)?, &p.in_act(&c, &p.out_act(&e, y)?)?))(),
                                (|| p.in_act(&a.direct_sum(&c), &p.out_act(&b.direct_sum(&e), &p.hcomp(x, y)?)?))(),
                                || format!("{} * {} by {a:?},{b:?},{c:?},{e:?}", d(x), d(y)),
                            );
                        }
                    }
                }
            }
        }
    }
    'sym: for (x, vx) in &pool {
        for (y, vy) in &pool {
            if ch.full("symmetry") {
                break 'sym;
            }
            let sigma = Permutation::block_swap(vx.inputs.len(), vy.inputs.len());
            let pi = Permutation::block_swap(vx.outputs.len(), vy.outputs.len()).inverse();
            ch.eq(
                "symmetry",
                p.hcomp(y, x),
                (|| p.in_act(&sigma, &p.out_act(&pi, &p.hcomp(x, y)?)?))(),
                || format!("{} * {}", d(x), d(y)),
            );
        }
    }

    // Eckmann–Hilton at ([];[])
    let scalars: Vec<&Elem> = pool.iter().filter(|(_, v)| v.inputs.is_empty() && v.outputs.is_empty()).map(|(x, _)| x).collect();
    for x in &scalars {
        for y in &scalars {
            ch.eq("scalars: vertical equals horizontal", p.vcomp(x, y), p.hcomp(x, y), || format!("{} , {}", d(x), d(y)));
            ch.eq("scalars commute", p.hcomp(x, y), p.hcomp(y, x), || format!("{} , {}", d(x), d(y)));
        }
    }

    let mut per_law: Vec<(String, usize)> = ch.counts.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    per_law.sort();
    ch.report.per_law = per_law;
    Ok(ch.report)
}

/// The value of a graph whose node at position `i + 1` is decorated by
/// `decorations[i]`: nodes are composed in topological order, wires being
/// moved into place with the input action on identities.
pub fn evaluate(p: &dyn SetProp, g: &CoaGraph, decorations: &[Elem]) -> Result<Elem> {
    if decorations.len() != g.node_count() {
        return Err(Error::SizeMismatch { left: decorations.len(), right: g.node_count() });
    }
    let colours = |es: &[usize]| -> Vec<String> { es.iter().map(|&e| g.label(e).to_string()).collect() };
    // identity wiring from `from` to `to`, as a permutation element
    let shuffle = |from: &[usize], to: &[usize]| -> Result<Elem> {
        let images = from
            .iter()
            .map(|e| to.iter().position(|f| f == e).map(|q| q + 1).ok_or_else(|| Error::InvalidGraph("wire lost".into())))
            .collect::<Result<Vec<_>>>()?;
        p.in_act(&Permutation::new(images)?, &p.unit(&colours(to))?)
    };
    let mut wires: Vec<usize> = g.port_in().to_vec();
    let mut acc = p.unit(&colours(&wires))?;
    for x in g.topological_nodes() {
        let ins = g.node_in(x);
        let rest: Vec<usize> = wires.iter().copied().filter(|e| !ins.contains(e)).collect();
        let front = concat_edges(ins, &rest);
        acc = p.vcomp(&shuffle(&wires, &front)?, &acc)?;
        let layer = p.hcomp(&decorations[g.position_of(x) - 1], &p.unit(&colours(&rest))?)?;
        acc = p.vcomp(&layer, &acc)?;
        wires = concat_edges(g.node_out(x), &rest);
    }
    if wires.len() != g.port_out().len() {
        return Err(Error::InvalidGraph("dangling wires do not match the exports".into()));
    }
    p.vcomp(&shuffle(&wires, g.port_out())?, &acc)
}

fn concat_edges(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// All valences over `colours` with at most `max_in` inputs and `max_out`
/// outputs.
pub fn valences_upto(colours: &[&str], max_in: usize, max_out: usize) -> Vec<CValence> {
    crate::operad::valence_colours(colours, max_in, max_out)
        .into_iter()
        .map(|c| c.as_valence().expect("valence colours").clone())
        .collect()
}
