//! Morphisms, operadic families over a finite category, and the Grothendieck
//! construction gluing a family into one operad.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{signatures_over, AxiomConfig, AxiomReport, Colour, HomCache, Op, SetOperad, Signature, Violation};
use crate::error::{Error, Result};
use crate::operad::finite::FiniteCategory;
use crate::perm::Permutation;

pub trait OperadMorphism: Send + Sync {
    fn map_colour(&self, c: &Colour) -> Result<Colour>;

    fn map_op(&self, o: &Op) -> Result<Op>;

    fn map_signature(&self, s: &Signature) -> Result<Signature> {
        Ok(Signature::new(
            s.inputs.iter().map(|c| self.map_colour(c)).collect::<Result<_>>()?,
            self.map_colour(&s.output)?,
        ))
    }
}

/// The identity, or the inclusion of a full suboperad.
pub struct IdentityTransport;

impl OperadMorphism for IdentityTransport {
    fn map_colour(&self, c: &Colour) -> Result<Colour> {
        Ok(c.clone())
    }

    fn map_op(&self, o: &Op) -> Result<Op> {
        Ok(o.clone())
    }
}

/// Checks that `m: src → tgt` preserves signatures, units, the action and
/// partial composition on the operations of the configured hom-sets.
pub fn check_morphism(
    src: &dyn SetOperad,
    tgt: &dyn SetOperad,
    m: &dyn OperadMorphism,
    cfg: &AxiomConfig,
) -> Result<AxiomReport> {
    let mut r = AxiomReport::default();
    let fail = |r: &mut AxiomReport, law: &str, ok: Result<bool>, w: String| {
        r.checks += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => r.violations.push(Violation { law: law.into(), witness: w }),
            Err(e) => r.violations.push(Violation { law: law.into(), witness: format!("{w}: {e}") }),
        }
    };
    let mut pool = Vec::new();
    for s in &cfg.signatures {
        for o in src.hom(s)?.iter() {
            pool.push((o.clone(), s.clone()));
        }
    }
    let mut seen_colours = Vec::new();
    for (o, s) in &pool {
        let ok = (|| Ok(tgt.hom(&m.map_signature(s)?)?.contains(&m.map_op(o)?)))();
        fail(&mut r, "morphism preserves signatures", ok, src.describe(o));
        for c in s.inputs.iter().chain(std::iter::once(&s.output)) {
            if !seen_colours.contains(c) {
                seen_colours.push(c.clone());
                let ok = (|| Ok(m.map_op(&src.unit(c)?)? == tgt.unit(&m.map_colour(c)?)?))();
                fail(&mut r, "morphism preserves units", ok, c.to_string());
            }
        }
        if s.arity() <= 3 {
            for g in Permutation::all(s.arity()) {
                let ok = (|| Ok(m.map_op(&src.act(&g, o)?)? == tgt.act(&g, &m.map_op(o)?)?))();
                fail(&mut r, "morphism preserves the action", ok, format!("{} by {g:?}", src.describe(o)));
            }
        }
    }
    for (a, sa) in &pool {
        for i in 1..=sa.arity() {
            for (b, sb) in &pool {
                if sb.output != sa.inputs[i - 1] || sa.arity() + sb.arity() - 1 > cfg.max_arity {
                    continue;
                }
                let ok = (|| Ok(m.map_op(&src.compose_at(a, i, b)?)? == tgt.compose_at(&m.map_op(a)?, i, &m.map_op(b)?)?))();
                fail(&mut r, "morphism preserves composition", ok, format!("{} o_{i} {}", src.describe(a), src.describe(b)));
            }
        }
    }
    Ok(r)
}

/// A functor from a finite category into operads.
pub struct OperadicFamily {
    index: Arc<FiniteCategory>,
    fibres: Vec<Arc<dyn SetOperad>>,
    transports: Vec<Arc<dyn OperadMorphism>>,
}

impl OperadicFamily {
    /// `fibres` follows the object order, `transports` the arrow order.
    pub fn new(
        index: Arc<FiniteCategory>,
        fibres: Vec<Arc<dyn SetOperad>>,
        transports: Vec<Arc<dyn OperadMorphism>>,
    ) -> Result<Self> {
        if fibres.len() != index.objects().len() {
            return Err(Error::SizeMismatch { left: fibres.len(), right: index.objects().len() });
        }
        if transports.len() != index.arrows().len() {
            return Err(Error::SizeMismatch { left: transports.len(), right: index.arrows().len() });
        }
        Ok(OperadicFamily { index, fibres, transports })
    }

    /// Every object sent to `o`, every arrow to the identity.
    pub fn constant(index: Arc<FiniteCategory>, o: Arc<dyn SetOperad>) -> Self {
        let fibres = vec![o; index.objects().len()];
        let transports: Vec<Arc<dyn OperadMorphism>> =
            (0..index.arrows().len()).map(|_| Arc::new(IdentityTransport) as Arc<dyn OperadMorphism>).collect();
        OperadicFamily { index, fibres, transports }
    }

    pub fn index(&self) -> &FiniteCategory {
        &self.index
    }

    pub fn fibre(&self, object: &str) -> Result<&Arc<dyn SetOperad>> {
        let k = self.object_index(object)?;
        Ok(&self.fibres[k])
    }

    pub fn transport(&self, arrow: usize) -> &Arc<dyn OperadMorphism> {
        &self.transports[arrow]
    }

    fn object_index(&self, object: &str) -> Result<usize> {
        self.index.objects().iter().position(|o| o == object).ok_or_else(|| Error::UnknownColour(object.to_string()))
    }

    /// Functoriality on colours and on the operations of arity at most
    /// `max_arity` over each fibre's listed colours, plus each transport
    /// being a morphism of operads.
    pub fn check(&self, max_arity: usize) -> Result<AxiomReport> {
        let mut r = AxiomReport::default();
        let cat = &self.index;
        let n = cat.arrows().len();
        let fibre_of = |a: &str| self.fibre(a).cloned();
        for f in 0..n {
            let src = fibre_of(cat.source(f))?;
            let tgt = fibre_of(cat.target(f))?;
            let Some(cols) = src.colours() else { continue };
            let sigs = signatures_over(&cols, max_arity);
            r.merge(check_morphism(&*src, &*tgt, &*self.transports[f], &AxiomConfig { signatures: sigs.clone(), max_arity })?);
            let id = cat.identity(cat.source(f)).expect("objects have identities");
            for g in 0..n {
                let Some(gf) = cat.compose(g, f) else { continue };
                let (tf, tg, tgf) = (&self.transports[f], &self.transports[g], &self.transports[gf]);
                for c in &cols {
                    r.checks += 1;
                    if tgf.map_colour(c)? != tg.map_colour(&tf.map_colour(c)?)? {
                        r.violations.push(Violation {
                            law: "functoriality on colours".into(),
                            witness: format!("{} o {} at {c}", cat.name(g), cat.name(f)),
                        });
                    }
                }
                for s in &sigs {
                    for o in src.hom(s)?.iter() {
                        r.checks += 1;
                        if tgf.map_op(o)? != tg.map_op(&tf.map_op(o)?)? {
                            r.violations.push(Violation {
                                law: "functoriality on operations".into(),
                                witness: format!("{} o {} at {}", cat.name(g), cat.name(f), src.describe(o)),
                            });
                        }
                    }
                }
            }
            if f == id {
                for c in &cols {
                    r.checks += 1;
                    if self.transports[f].map_colour(c)? != *c {
                        r.violations.push(Violation { law: "identity transport".into(), witness: c.to_string() });
                    }
                }
            }
        }
        Ok(r)
    }
}

/// An operation of the Grothendieck construction: its signature over pairs
/// `(object, colour)`, one index arrow per input, and a fibre operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct GOp {
    signature: Signature,
    arrows: Vec<usize>,
    op: Op,
}

pub struct Grothendieck {
    family: OperadicFamily,
    cache: HomCache,
}

pub fn grothendieck(family: OperadicFamily) -> Grothendieck {
    Grothendieck { family, cache: HomCache::new() }
}

fn split(c: &Colour) -> Option<(&str, &Colour)> {
    match c {
        Colour::Pair(a, x) => a.as_name().map(|a| (a, &**x)),
        _ => None,
    }
}

impl Grothendieck {
    pub fn family(&self) -> &OperadicFamily {
        &self.family
    }

    fn decode(&self, o: &Op) -> Result<GOp> {
        serde_json::from_slice(o).map_err(|e| Error::BadOperation(e.to_string()))
    }

    fn encode(g: &GOp) -> Op {
        serde_json::to_vec(g).expect("operations serialize")
    }

    /// Builds the operation `({f_i}, o)`; arrows are given by name.
    pub fn operation(&self, s: &Signature, arrows: &[&str], o: &Op) -> Result<Op> {
        let cat = self.family.index();
        let arrows = arrows
            .iter()
            .map(|a| cat.arrow(a).ok_or_else(|| Error::BadOperation(format!("unknown arrow {a}"))))
            .collect::<Result<Vec<_>>>()?;
        let g = GOp { signature: s.clone(), arrows, op: o.clone() };
        let enc = Self::encode(&g);
        if !self.hom(s)?.contains(&enc) {
            return Err(Error::BadOperation(self.describe(&enc)));
        }
        Ok(enc)
    }

    /// Arrow names and fibre operation of `o`.
    pub fn parts(&self, o: &Op) -> Result<(Vec<String>, Op)> {
        let g = self.decode(o)?;
        let cat = self.family.index();
        Ok((g.arrows.iter().map(|&a| cat.name(a).to_string()).collect(), g.op))
    }

    fn compute_hom(&self, s: &Signature) -> Result<Vec<Op>> {
        let cat = self.family.index();
        let Some((c, x)) = split(&s.output) else { return Ok(vec![]) };
        let mut ins = Vec::with_capacity(s.arity());
        for col in &s.inputs {
            match split(col) {
                Some(p) => ins.push(p),
                None => return Ok(vec![]),
            }
        }
        if !self.has_colour(&s.output) || !s.inputs.iter().all(|col| self.has_colour(col)) {
            return Ok(vec![]);
        }
        let choices: Vec<Vec<usize>> = ins.iter().map(|(ci, _)| cat.hom(ci, c)).collect();
        let fibre = self.family.fibre(c)?;
        let mut out = Vec::new();
        let mut idx = vec![0usize; ins.len()];
        if choices.iter().any(|v| v.is_empty()) {
            return Ok(out);
        }
        loop {
            let arrows: Vec<usize> = idx.iter().zip(&choices).map(|(&k, v)| v[k]).collect();
            let inputs = arrows
                .iter()
                .zip(&ins)
                .map(|(&f, (_, xi))| self.family.transport(f).map_colour(xi))
                .collect::<Result<Vec<_>>>()?;
            for o in fibre.hom(&Signature::new(inputs, x.clone()))?.iter() {
                out.push(Self::encode(&GOp { signature: s.clone(), arrows: arrows.clone(), op: o.clone() }));
            }
            // odometer over arrow choices
            let mut k = idx.len();
            loop {
                if k == 0 {
                    out.sort();
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

impl SetOperad for Grothendieck {
    fn has_colour(&self, c: &Colour) -> bool {
        split(c).is_some_and(|(a, x)| self.family.fibre(a).is_ok_and(|f| f.has_colour(x)))
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        let mut out = Vec::new();
        for a in self.family.index().objects() {
            for x in self.family.fibre(a).ok()?.colours()? {
                out.push(Colour::pair(Colour::name(a), x));
            }
        }
        Some(out)
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        self.cache.get_or_compute(s, || self.compute_hom(s))
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        Ok(self.decode(o)?.signature)
    }

    /// `h_k = f_k` for `k < l`, `f_l g_{k-l+1}` for `l ≤ k ≤ l+m-1`,
    /// `f_{k-m+1}` for `k ≥ l+m`; the fibre part is `o ∘_l F(f_l)(p)`.
    fn compose_at(&self, o: &Op, l: usize, p: &Op) -> Result<Op> {
        let (a, b) = (self.decode(o)?, self.decode(p)?);
        let signature = a.signature.splice(l, &b.signature)?;
        let cat = self.family.index();
        let fl = a.arrows[l - 1];
        let mut arrows = a.arrows[..l - 1].to_vec();
        for &g in &b.arrows {
            arrows.push(cat.compose(fl, g).ok_or_else(|| Error::BadOperation("arrows do not compose".into()))?);
        }
        arrows.extend_from_slice(&a.arrows[l..]);
        let (c, _) = split(&a.signature.output).ok_or_else(|| Error::BadOperation("colour is not a pair".into()))?;
        let fibre = self.family.fibre(c)?;
        let moved = self.family.transport(fl).map_op(&b.op)?;
        let op = fibre.compose_at(&a.op, l, &moved)?;
        Ok(Self::encode(&GOp { signature, arrows, op }))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        let g = self.decode(o)?;
        let (c, _) = split(&g.signature.output).ok_or_else(|| Error::BadOperation("colour is not a pair".into()))?;
        let fibre = self.family.fibre(c)?;
        Ok(Self::encode(&GOp {
            signature: g.signature.act(gamma)?,
            arrows: gamma.permute(&g.arrows)?,
            op: fibre.act(gamma, &g.op)?,
        }))
    }

    fn unit(&self, col: &Colour) -> Result<Op> {
        let (c, x) = split(col).ok_or_else(|| Error::UnknownColour(col.to_string()))?;
        let fibre = self.family.fibre(c)?;
        let id = self.family.index().identity(c).ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        Ok(Self::encode(&GOp { signature: Signature::new(vec![col.clone()], col.clone()), arrows: vec![id], op: fibre.unit(x)? }))
    }

    fn describe(&self, o: &Op) -> String {
        match self.decode(o) {
            Ok(g) => {
                let cat = self.family.index();
                let names: Vec<&str> = g.arrows.iter().map(|&a| cat.name(a)).collect();
                let c = split(&g.signature.output).map(|(c, _)| c).unwrap_or("?");
                let inner = self.family.fibre(c).map(|f| f.describe(&g.op)).unwrap_or_else(|_| "?".into());
                format!("({{{}}}, {inner})", names.join(","))
            }
            Err(_) => "?".into(),
        }
    }
}

/// `O ⊗ P` for a poset `P`: colours `(x, a)`, and the operations of `O` at
/// signatures whose input elements all lie below the output element.
pub struct BvPoset {
    inner: Arc<dyn SetOperad>,
    poset: Arc<FiniteCategory>,
    cache: HomCache,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct BvOp {
    signature: Signature,
    op: Op,
}

pub fn bv_tensor_poset(inner: Arc<dyn SetOperad>, poset: Arc<FiniteCategory>) -> Result<BvPoset> {
    for a in poset.objects() {
        for b in poset.objects() {
            if poset.hom(a, b).len() > 1 {
                return Err(Error::Malformed(format!("{a}, {b} have several arrows; not a poset")));
            }
        }
    }
    Ok(BvPoset { inner, poset, cache: HomCache::new() })
}

fn split_bv(c: &Colour) -> Option<(&Colour, &str)> {
    match c {
        Colour::Pair(x, a) => a.as_name().map(|a| (&**x, a)),
        _ => None,
    }
}

impl BvPoset {
    fn decode(&self, o: &Op) -> Result<BvOp> {
        serde_json::from_slice(o).map_err(|e| Error::BadOperation(e.to_string()))
    }

    fn encode(b: &BvOp) -> Op {
        serde_json::to_vec(b).expect("operations serialize")
    }

    fn leq(&self, a: &str, b: &str) -> bool {
        !self.poset.hom(a, b).is_empty()
    }

    /// Colour `(x, a)` seen as the colour `(a, x)` of the Grothendieck
    /// construction over the constant family.
    pub fn swap_colour(c: &Colour) -> Option<Colour> {
        split_bv(c).map(|(x, a)| Colour::pair(Colour::name(a), x.clone()))
    }

    pub fn swap_signature(s: &Signature) -> Option<Signature> {
        Some(Signature::new(s.inputs.iter().map(Self::swap_colour).collect::<Option<_>>()?, Self::swap_colour(&s.output)?))
    }

    /// The same operation in `grothendieck(OperadicFamily::constant(P, O))`.
    pub fn to_grothendieck(&self, g: &Grothendieck, o: &Op) -> Result<Op> {
        let b = self.decode(o)?;
        let s = Self::swap_signature(&b.signature).ok_or_else(|| Error::BadOperation("colour is not a pair".into()))?;
        let (_, a) = split_bv(&b.signature.output).expect("checked above");
        let mut names = Vec::new();
        for c in &b.signature.inputs {
            let (_, ai) = split_bv(c).expect("checked above");
            names.push(self.poset.name(self.poset.hom(ai, a)[0]).to_string());
        }
        let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        g.operation(&s, &names, &b.op)
    }
}

impl SetOperad for BvPoset {
    fn has_colour(&self, c: &Colour) -> bool {
        split_bv(c).is_some_and(|(x, a)| self.poset.objects().iter().any(|o| o == a) && self.inner.has_colour(x))
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        let xs = self.inner.colours()?;
        let mut out = Vec::new();
        for x in &xs {
            for a in self.poset.objects() {
                out.push(Colour::pair(x.clone(), Colour::name(a)));
            }
        }
        Some(out)
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        self.cache.get_or_compute(s, || {
            if !self.has_colour(&s.output) || !s.inputs.iter().all(|c| self.has_colour(c)) {
                return Ok(vec![]);
            }
            let (x, a) = split_bv(&s.output).expect("checked above");
            let mut xs = Vec::new();
            for c in &s.inputs {
                let (xi, ai) = split_bv(c).expect("checked above");
                if !self.leq(ai, a) {
                    return Ok(vec![]);
                }
                xs.push(xi.clone());
            }
            let ops = self.inner.hom(&Signature::new(xs, x.clone()))?;
            let mut out: Vec<Op> =
                ops.iter().map(|o| Self::encode(&BvOp { signature: s.clone(), op: o.clone() })).collect();
            out.sort();
            Ok(out)
        })
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        Ok(self.decode(o)?.signature)
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        let (a, b) = (self.decode(o)?, self.decode(p)?);
        Ok(Self::encode(&BvOp { signature: a.signature.splice(i, &b.signature)?, op: self.inner.compose_at(&a.op, i, &b.op)? }))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        let a = self.decode(o)?;
        Ok(Self::encode(&BvOp { signature: a.signature.act(gamma)?, op: self.inner.act(gamma, &a.op)? }))
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        let (x, _) = split_bv(c).ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        Ok(Self::encode(&BvOp { signature: Signature::new(vec![c.clone()], c.clone()), op: self.inner.unit(x)? }))
    }

    fn describe(&self, o: &Op) -> String {
        self.decode(o).map(|b| format!("{}{}", self.inner.describe(&b.op), b.signature)).unwrap_or_else(|_| "?".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::finite::{Arrow, CategoryOperad};
    use crate::operad::{check_operad_axioms, Com};

    fn cat_of(objects: &[&str], arrows: &[(&str, &str, &str)], extra: &[(&str, &str, &str)]) -> FiniteCategory {
        let mut arr: Vec<Arrow> = objects.iter().map(|o| Arrow { name: format!("1{o}"), source: o.to_string(), target: o.to_string() }).collect();
        arr.extend(arrows.iter().map(|(n, s, t)| Arrow { name: n.to_string(), source: s.to_string(), target: t.to_string() }));
        let mut table = Vec::new();
        for a in &arr {
            table.push((format!("1{}", a.target), a.name.clone(), a.name.clone()));
            if a.source != a.target || !a.name.starts_with('1') {
                table.push((a.name.clone(), format!("1{}", a.source), a.name.clone()));
            }
        }
        for (g, f, h) in extra {
            table.push((g.to_string(), f.to_string(), h.to_string()));
        }
        table.sort();
        table.dedup();
        FiniteCategory::new(objects.iter().map(|o| o.to_string()).collect(), arr, table).unwrap()
    }

    /// The category of the composition picture: `f_i: b_i → a`, `g_j: c_j → b_1`.
    fn picture_category() -> FiniteCategory {
        cat_of(
            &["a", "b1", "b2", "b3", "c1", "c2"],
            &[
                ("f1", "b1", "a"),
                ("f2", "b2", "a"),
                ("f3", "b3", "a"),
                ("g1", "c1", "b1"),
                ("g2", "c2", "b1"),
                ("f1g1", "c1", "a"),
                ("f1g2", "c2", "a"),
            ],
            &[("f1", "g1", "f1g1"), ("f1", "g2", "f1g2")],
        )
    }

    fn pc(obj: &str) -> Colour {
        Colour::pair(Colour::name(obj), Colour::name("*"))
    }

    #[test]
    fn composition_picture() {
        let cat = Arc::new(picture_category());
        let com: Arc<dyn SetOperad> = Arc::new(Com::on(&["*"]));
        let g = grothendieck(OperadicFamily::constant(cat, com.clone()));
        let star = Colour::name("*");
        let o_sig = Signature::new(vec![pc("b1"), pc("b2"), pc("b3")], pc("a"));
        let p_sig = Signature::new(vec![pc("c1"), pc("c2")], pc("b1"));
        let o3 = com.hom(&Signature::new(vec![star.clone(); 3], star.clone())).unwrap()[0].clone();
        let p2 = com.hom(&Signature::new(vec![star.clone(); 2], star.clone())).unwrap()[0].clone();
        let o = g.operation(&o_sig, &["f1", "f2", "f3"], &o3).unwrap();
        let p = g.operation(&p_sig, &["g1", "g2"], &p2).unwrap();
        let r = g.compose_at(&o, 1, &p).unwrap();
        let (arrows, inner) = g.parts(&r).unwrap();
        assert_eq!(arrows, vec!["f1g1", "f1g2", "f2", "f3"]);
        assert_eq!(inner, com.compose_at(&o3, 1, &p2).unwrap());
        assert_eq!(g.signature(&r).unwrap(), Signature::new(vec![pc("c1"), pc("c2"), pc("b2"), pc("b3")], pc("a")));
    }

    #[test]
    fn two_element_poset() {
        let p = Arc::new(FiniteCategory::poset(&["0", "1"], &[("0", "1")]).unwrap());
        let g = grothendieck(OperadicFamily::constant(p, Arc::new(Com::on(&["c"]))));
        let at = |o: &str| Colour::pair(Colour::name(o), Colour::name("c"));
        assert_eq!(g.hom(&Signature::new(vec![at("0"), at("0")], at("1"))).unwrap().len(), 1);
        assert!(g.hom(&Signature::new(vec![at("1")], at("0"))).unwrap().is_empty());
        let sigs = signatures_over(&g.colours().unwrap(), 2);
        let r = check_operad_axioms(&g, &AxiomConfig { signatures: sigs, max_arity: 3 }).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn terminal_index_is_the_fibre() {
        let t = Arc::new(FiniteCategory::poset(&["t"], &[]).unwrap());
        let com: Arc<dyn SetOperad> = Arc::new(Com::on(&["a", "b"]));
        let g = grothendieck(OperadicFamily::constant(t, com.clone()));
        for s in signatures_over(&com.colours().unwrap(), 3) {
            let lifted = Signature::new(
                s.inputs.iter().map(|c| Colour::pair(Colour::name("t"), c.clone())).collect(),
                Colour::pair(Colour::name("t"), s.output.clone()),
            );
            assert_eq!(g.hom(&lifted).unwrap().len(), com.hom(&s).unwrap().len());
        }
    }

    #[test]
    fn bv_poset_matches_constant_family() {
        let p = Arc::new(FiniteCategory::poset(&["O", "A", "B"], &[("O", "A"), ("O", "B")]).unwrap());
        let com: Arc<dyn SetOperad> = Arc::new(Com::on(&["x", "y"]));
        let bv = bv_tensor_poset(com.clone(), p.clone()).unwrap();
        let g = grothendieck(OperadicFamily::constant(p, com));
        let at = |x: &str, a: &str| Colour::pair(Colour::name(x), Colour::name(a));
        assert!(bv.hom(&Signature::new(vec![at("x", "A")], at("x", "B"))).unwrap().is_empty());
        for s in signatures_over(&bv.colours().unwrap(), 2) {
            let mine = bv.hom(&s).unwrap();
            let theirs = g.hom(&BvPoset::swap_signature(&s).unwrap()).unwrap();
            assert_eq!(mine.len(), theirs.len(), "{s}");
            for o in mine.iter() {
                assert!(theirs.contains(&bv.to_grothendieck(&g, o).unwrap()));
            }
        }
    }

    #[test]
    fn family_checks_functoriality() {
        let cat = Arc::new(FiniteCategory::split_idempotent());
        let fam = OperadicFamily::constant(cat, Arc::new(CategoryOperad::new(Arc::new(FiniteCategory::cyclic_monoid(2).unwrap()))));
        assert!(fam.check(1).unwrap().passed());
    }
}
