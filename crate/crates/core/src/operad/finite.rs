//! Finite categories and operads given by explicit tables.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Colour, Op, SetOperad, Signature};
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CategorySpec", into = "CategorySpec")]
pub struct FiniteCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    table: HashMap<(usize, usize), usize>,
    ids: Vec<usize>,
}

/// JSON form: `compose` lists `[g, f, g∘f]` for every composable pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub compose: Vec<(String, String, String)>,
}

impl TryFrom<CategorySpec> for FiniteCategory {
    type Error = Error;
    fn try_from(s: CategorySpec) -> Result<Self> {
        FiniteCategory::new(s.objects, s.arrows, s.compose)
    }
}

impl From<FiniteCategory> for CategorySpec {
    fn from(c: FiniteCategory) -> Self {
        let mut compose: Vec<(String, String, String)> = c
            .table
            .iter()
            .map(|(&(g, f), &h)| (c.arrows[g].name.clone(), c.arrows[f].name.clone(), c.arrows[h].name.clone()))
            .collect();
        compose.sort();
        CategorySpec { objects: c.objects, arrows: c.arrows, compose }
    }
}

impl FiniteCategory {
    pub fn new(objects: Vec<String>, arrows: Vec<Arrow>, compose: Vec<(String, String, String)>) -> Result<Self> {
        let bad = |m: String| Err(Error::Malformed(m));
        let idx = |n: &str| arrows.iter().position(|a| a.name == n);
        for a in &arrows {
            if !objects.contains(&a.source) || !objects.contains(&a.target) {
                return bad(format!("arrow {} has an unknown end", a.name));
            }
        }
        let mut table = HashMap::new();
        for (g, f, h) in &compose {
            let (Some(gi), Some(fi), Some(hi)) = (idx(g), idx(f), idx(h)) else {
                return bad(format!("unknown arrow in {g} o {f} = {h}"));
            };
            let (ga, fa, ha) = (&arrows[gi], &arrows[fi], &arrows[hi]);
            if fa.target != ga.source || ha.source != fa.source || ha.target != ga.target {
                return bad(format!("{g} o {f} = {h} is ill-typed"));
            }
            table.insert((gi, fi), hi);
        }
        for (gi, g) in arrows.iter().enumerate() {
            for (fi, f) in arrows.iter().enumerate() {
                if f.target == g.source && !table.contains_key(&(gi, fi)) {
                    return bad(format!("missing composite {} o {}", g.name, f.name));
                }
            }
        }
        let mut ids = Vec::new();
        for o in &objects {
            let id = (0..arrows.len()).find(|&e| {
                arrows[e].source == *o
                    && arrows[e].target == *o
                    && (0..arrows.len()).all(|f| {
                        (arrows[f].target != *o || table[&(e, f)] == f) && (arrows[f].source != *o || table[&(f, e)] == f)
                    })
            });
            match id {
                Some(e) => ids.push(e),
                None => return bad(format!("object {o} has no identity")),
            }
        }
        let c = FiniteCategory { objects, arrows, table, ids };
        for h in 0..c.arrows.len() {
            for g in 0..c.arrows.len() {
                for f in 0..c.arrows.len() {
                    if let (Some(hg), Some(gf)) = (c.compose(h, g), c.compose(g, f)) {
                        if c.compose(hg, f) != c.compose(h, gf) {
                            return bad("composition is not associative".into());
                        }
                    }
                }
            }
        }
        Ok(c)
    }

    /// The poset on `elements` generated by the pairs `a ≤ b`.
    pub fn poset(elements: &[&str], leq: &[(&str, &str)]) -> Result<Self> {
        let n = elements.len();
        let pos = |x: &str| elements.iter().position(|&e| e == x).ok_or_else(|| Error::Malformed(x.to_string()));
        let mut r = vec![vec![false; n]; n];
        for i in 0..n {
            r[i][i] = true;
        }
        for (a, b) in leq {
            r[pos(a)?][pos(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        let name = |i: usize, j: usize| format!("{}<={}", elements[i], elements[j]);
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if r[i][j] {
                    arrows.push(Arrow { name: name(i, j), source: elements[i].into(), target: elements[j].into() });
                }
            }
        }
        let mut compose = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if r[i][j] && r[j][k] {
                        compose.push((name(j, k), name(i, j), name(i, k)));
                    }
                }
            }
        }
        FiniteCategory::new(elements.iter().map(|e| e.to_string()).collect(), arrows, compose)
    }

    /// One object `*` whose endomorphisms form the cyclic group of order `k`.
    pub fn cyclic_monoid(k: usize) -> Result<Self> {
        let name = |i: usize| if i == 0 { "id".to_string() } else { format!("r{i}") };
        let arrows = (0..k).map(|i| Arrow { name: name(i), source: "*".into(), target: "*".into() }).collect();
        let mut compose = Vec::new();
        for i in 0..k {
            for j in 0..k {
                compose.push((name(i), name(j), name((i + j) % k)));
            }
        }
        FiniteCategory::new(vec!["*".into()], arrows, compose)
    }

    /// Objects `c`, `d`; `φ: c → d`, `ψ: d → c` with `φψ = 1_d` and `θ = ψφ`.
    pub fn split_idempotent() -> FiniteCategory {
        let arr = |n: &str, s: &str, t: &str| Arrow { name: n.into(), source: s.into(), target: t.into() };
        let t = |g: &str, f: &str, h: &str| (g.to_string(), f.to_string(), h.to_string());
        FiniteCategory::new(
            vec!["c".into(), "d".into()],
            vec![arr("1c", "c", "c"), arr("1d", "d", "d"), arr("phi", "c", "d"), arr("psi", "d", "c"), arr("theta", "c", "c")],
            vec![
                t("1c", "1c", "1c"),
                t("1d", "1d", "1d"),
                t("phi", "1c", "phi"),
                t("1d", "phi", "phi"),
                t("psi", "1d", "psi"),
                t("1c", "psi", "psi"),
                t("theta", "1c", "theta"),
                t("1c", "theta", "theta"),
                t("phi", "psi", "1d"),
                t("psi", "phi", "theta"),
                t("theta", "theta", "theta"),
                t("phi", "theta", "phi"),
                t("theta", "psi", "psi"),
            ],
        )
        .expect("a valid category")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn name(&self, a: usize) -> &str {
        &self.arrows[a].name
    }

    pub fn source(&self, a: usize) -> &str {
        &self.arrows[a].source
    }

    pub fn target(&self, a: usize) -> &str {
        &self.arrows[a].target
    }

    /// `g ∘ f`, when composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.table.get(&(g, f)).copied()
    }

    pub fn identity(&self, object: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == object).map(|i| self.ids[i])
    }

    /// Arrows from `a` to `b`.
    pub fn hom(&self, a: &str, b: &str) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&e| self.arrows[e].source == a && self.arrows[e].target == b).collect()
    }
}

/// `j_!C`: the operad whose only operations are the unary ones, given by the
/// arrows of `C`.
pub struct CategoryOperad {
    cat: Arc<FiniteCategory>,
}

impl CategoryOperad {
    pub fn new(cat: Arc<FiniteCategory>) -> Self {
        CategoryOperad { cat }
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.cat
    }

    fn arrow_of(&self, o: &Op) -> Result<usize> {
        let n = std::str::from_utf8(o).map_err(|e| Error::BadOperation(e.to_string()))?;
        self.cat.arrow(n).ok_or_else(|| Error::BadOperation(n.to_string()))
    }

    pub fn op_of(&self, a: usize) -> Op {
        self.cat.name(a).as_bytes().to_vec()
    }
}

impl SetOperad for CategoryOperad {
    fn has_colour(&self, c: &Colour) -> bool {
        c.as_name().is_some_and(|n| self.cat.objects.iter().any(|o| o == n))
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        Some(self.cat.objects.iter().map(|o| Colour::name(o)).collect())
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        if s.arity() != 1 {
            return Ok(Arc::new(vec![]));
        }
        match (s.inputs[0].as_name(), s.output.as_name()) {
            (Some(a), Some(b)) => Ok(Arc::new(self.cat.hom(a, b).into_iter().map(|e| self.op_of(e)).collect())),
            _ => Ok(Arc::new(vec![])),
        }
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        let a = self.arrow_of(o)?;
        Ok(Signature::new(vec![Colour::name(self.cat.source(a))], Colour::name(self.cat.target(a))))
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        if i != 1 {
            return Err(Error::OutOfRange { value: i, bound: 1 });
        }
        let (g, f) = (self.arrow_of(o)?, self.arrow_of(p)?);
        let h = self
            .cat
            .compose(g, f)
            .ok_or_else(|| Error::BadOperation(format!("{} o {} is not composable", self.cat.name(g), self.cat.name(f))))?;
        Ok(self.op_of(h))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        self.arrow_of(o)?;
        if gamma.len() != 1 {
            return Err(Error::SizeMismatch { left: gamma.len(), right: 1 });
        }
        Ok(o.clone())
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        let id = c.as_name().and_then(|n| self.cat.identity(n)).ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        Ok(self.op_of(id))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableOp {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
}

/// JSON description of a finite operad. `compose` entries are
/// `[o, i, p, o∘_i p]`; `act` entries `[o, γ, act(γ,o)]` with `γ` as a list
/// of images; identity actions may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub colours: Vec<String>,
    pub operations: Vec<TableOp>,
    pub units: HashMap<String, String>,
    pub compose: Vec<(String, usize, String, String)>,
    #[serde(default)]
    pub act: Vec<(String, Vec<usize>, String)>,
}

pub struct TableOperad {
    spec: TableSpec,
    ops: HashMap<String, Signature>,
    compose: HashMap<(String, usize, String), String>,
    act: HashMap<(String, Vec<usize>), String>,
}

impl TableOperad {
    pub fn new(spec: TableSpec) -> Result<Self> {
        let mut ops = HashMap::new();
        for t in &spec.operations {
            for c in t.inputs.iter().chain(std::iter::once(&t.output)) {
                if !spec.colours.contains(c) {
                    return Err(Error::UnknownColour(c.clone()));
                }
            }
            let s = Signature::new(t.inputs.iter().map(|c| Colour::name(c)).collect(), Colour::name(&t.output));
            if ops.insert(t.name.clone(), s).is_some() {
                return Err(Error::Malformed(format!("operation {} listed twice", t.name)));
            }
        }
        let known = |n: &str| -> Result<()> {
            if ops.contains_key(n) {
                Ok(())
            } else {
                Err(Error::Malformed(format!("unknown operation {n}")))
            }
        };
        for c in &spec.colours {
            known(spec.units.get(c).ok_or_else(|| Error::Malformed(format!("colour {c} has no unit")))?)?;
        }
        let mut compose = HashMap::new();
        for (o, i, p, r) in &spec.compose {
            known(o)?;
            known(p)?;
            known(r)?;
            compose.insert((o.clone(), *i, p.clone()), r.clone());
        }
        let mut act = HashMap::new();
        for (o, g, r) in &spec.act {
            known(o)?;
            known(r)?;
            Permutation::new(g.clone())?;
            act.insert((o.clone(), g.clone()), r.clone());
        }
        Ok(TableOperad { spec, ops, compose, act })
    }

    pub fn spec(&self) -> &TableSpec {
        &self.spec
    }

    fn name<'a>(&self, o: &'a Op) -> Result<&'a str> {
        let n = std::str::from_utf8(o).map_err(|e| Error::BadOperation(e.to_string()))?;
        if self.ops.contains_key(n) {
            Ok(n)
        } else {
            Err(Error::BadOperation(n.to_string()))
        }
    }
}

impl SetOperad for TableOperad {
    fn has_colour(&self, c: &Colour) -> bool {
        c.as_name().is_some_and(|n| self.spec.colours.iter().any(|x| x == n))
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        Some(self.spec.colours.iter().map(|c| Colour::name(c)).collect())
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        let mut v: Vec<Op> =
            self.spec.operations.iter().filter(|t| &self.ops[&t.name] == s).map(|t| t.name.as_bytes().to_vec()).collect();
        v.sort();
        Ok(Arc::new(v))
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        Ok(self.ops[self.name(o)?].clone())
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        let (a, b) = (self.name(o)?, self.name(p)?);
        self.ops[a].splice(i, &self.ops[b])?;
        self.compose
            .get(&(a.to_string(), i, b.to_string()))
            .map(|r| r.as_bytes().to_vec())
            .ok_or_else(|| Error::BadOperation(format!("no table entry for {a} o_{i} {b}")))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        let a = self.name(o)?;
        if gamma.len() != self.ops[a].arity() {
            return Err(Error::SizeMismatch { left: gamma.len(), right: self.ops[a].arity() });
        }
        if gamma.is_identity() {
            return Ok(o.clone());
        }
        self.act
            .get(&(a.to_string(), gamma.images().to_vec()))
            .map(|r| r.as_bytes().to_vec())
            .ok_or_else(|| Error::BadOperation(format!("no action entry for {a} by {gamma:?}")))
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        let n = c.as_name().ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        self.spec.units.get(n).map(|u| u.as_bytes().to_vec()).ok_or_else(|| Error::UnknownColour(c.to_string()))
    }
}
