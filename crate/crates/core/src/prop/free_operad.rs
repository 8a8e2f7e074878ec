//! `w_!O`, the free PROP on an operad, and the free symmetric monoidal
//! category on a finite category.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{concat, outputs_after, Elem, SetProp, ValenceCache};
use crate::coa::CValence;
use crate::error::{Error, Result};
use crate::operad::{Colour, FiniteCategory, Op, SetOperad, Signature};
use crate::perm::{unshuffle, Permutation};

/// `(f, {o_i})`: `f: [n] → [m]` one-indexed, `o_i` takes the inputs in
/// `f⁻¹(i)` in increasing order to output `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WElem {
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    pub f: Vec<usize>,
    pub ops: Vec<Op>,
}

impl WElem {
    pub fn decode(x: &Elem) -> Result<WElem> {
        serde_json::from_slice(x).map_err(|e| Error::BadOperation(e.to_string()))
    }

    pub fn encode(&self) -> Elem {
        serde_json::to_vec(self).expect("elements serialize")
    }

    /// Positions (one-indexed, increasing) of the inputs sent to `i`.
    pub fn fibre(&self, i: usize) -> Vec<usize> {
        (1..=self.f.len()).filter(|&j| self.f[j - 1] == i).collect()
    }
}

pub struct FreeOnOperad {
    o: Arc<dyn SetOperad>,
    colours: Vec<String>,
    cache: ValenceCache,
}

pub fn free_prop_on_operad(o: Arc<dyn SetOperad>, colours: &[&str]) -> Result<FreeOnOperad> {
    for c in colours {
        if !o.has_colour(&Colour::name(c)) {
            return Err(Error::UnknownColour(c.to_string()));
        }
    }
    Ok(FreeOnOperad { o, colours: colours.iter().map(|c| c.to_string()).collect(), cache: ValenceCache::default() })
}

fn signature(inputs: &[String], output: &str) -> Signature {
    Signature::new(inputs.iter().map(|c| Colour::name(c)).collect(), Colour::name(output))
}

impl FreeOnOperad {
    pub fn operad(&self) -> &Arc<dyn SetOperad> {
        &self.o
    }

    fn compute(&self, v: &CValence) -> Result<Vec<Elem>> {
        let (n, m) = (v.inputs.len(), v.outputs.len());
        if v.colours().any(|c| !self.colours.contains(c)) || (m == 0 && n > 0) {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        let mut f = vec![1; n];
        loop {
            let mut factors = Vec::with_capacity(m);
            for i in 1..=m {
                let ins: Vec<String> = (0..n).filter(|&j| f[j] == i).map(|j| v.inputs[j].clone()).collect();
                factors.push(self.o.hom(&signature(&ins, &v.outputs[i - 1]))?);
            }
            if factors.iter().all(|h| !h.is_empty()) {
                let mut idx = vec![0; m];
                'prod: loop {
                    let ops = idx.iter().zip(&factors).map(|(&k, h)| h[k].clone()).collect();
                    out.push(WElem { dom: v.inputs.clone(), cod: v.outputs.clone(), f: f.clone(), ops }.encode());
                    let mut k = m;
                    loop {
                        if k == 0 {
                            break 'prod;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < factors[k].len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
            // next map [n] → [m]
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                f[k] += 1;
                if f[k] <= m {
                    break;
                }
                f[k] = 1;
            }
        }
    }
}

impl SetProp for FreeOnOperad {
    fn colours(&self) -> &[String] {
        &self.colours
    }

    fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>> {
        self.cache.get_or_compute(v, 0, || self.compute(v))
    }

    fn valence(&self, x: &Elem) -> Result<CValence> {
        let w = WElem::decode(x)?;
        Ok(CValence { inputs: w.dom, outputs: w.cod })
    }

    /// `(gf, {ω_k*(p_k ∘ (o_i)_{i ∈ g⁻¹(k)})})` with `ω_k` the unshuffle of
    /// `f` restricted to `(gf)⁻¹(k)`.
    fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem> {
        let (y, x) = (WElem::decode(g)?, WElem::decode(f)?);
        if y.dom != x.cod {
            return Err(Error::ValenceMismatch { expected: format!("{:?}", x.cod), found: format!("{:?}", y.dom) });
        }
        let gf: Vec<usize> = x.f.iter().map(|&i| y.f[i - 1]).collect();
        let mut ops = Vec::with_capacity(y.cod.len());
        for k in 1..=y.cod.len() {
            let mut q = y.ops[k - 1].clone();
            let preimage = y.fibre(k);
            for (t, &i) in preimage.iter().enumerate().rev() {
                q = self.o.compose_at(&q, t + 1, &x.ops[i - 1])?;
            }
            let restricted: Vec<usize> = (0..x.f.len()).filter(|&j| gf[j] == k).map(|j| x.f[j]).collect();
            ops.push(self.o.act(&unshuffle(&restricted), &q)?);
        }
        Ok(WElem { dom: x.dom, cod: y.cod, f: gf, ops }.encode())
    }

    fn hcomp(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let (x, y) = (WElem::decode(a)?, WElem::decode(b)?);
        let m = x.cod.len();
        let f = x.f.iter().copied().chain(y.f.iter().map(|&i| i + m)).collect();
        let ops = x.ops.iter().chain(&y.ops).cloned().collect();
        Ok(WElem { dom: concat(&x.dom, &y.dom), cod: concat(&x.cod, &y.cod), f, ops }.encode())
    }

    fn in_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = WElem::decode(a)?;
        let dom = sigma.permute(&x.dom)?;
        let f: Vec<usize> = (1..=x.f.len()).map(|t| x.f[sigma.apply(t) - 1]).collect();
        let mut ops = Vec::with_capacity(x.cod.len());
        for i in 1..=x.cod.len() {
            let old = x.fibre(i);
            let images: Vec<usize> = (1..=f.len())
                .filter(|&t| f[t - 1] == i)
                .map(|t| old.iter().position(|&j| j == sigma.apply(t)).expect("same fibre") + 1)
                .collect();
            ops.push(self.o.act(&Permutation::new(images)?, &x.ops[i - 1])?);
        }
        Ok(WElem { dom, cod: x.cod, f, ops }.encode())
    }

    fn out_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = WElem::decode(a)?;
        if sigma.len() != x.cod.len() {
            return Err(Error::SizeMismatch { left: sigma.len(), right: x.cod.len() });
        }
        let inv = sigma.inverse();
        Ok(WElem {
            cod: outputs_after(sigma, &x.cod)?,
            f: x.f.iter().map(|&i| sigma.apply(i)).collect(),
            ops: inv.permute(&x.ops)?,
            dom: x.dom,
        }
        .encode())
    }

    fn unit(&self, a: &[String]) -> Result<Elem> {
        let ops = a.iter().map(|c| self.o.unit(&Colour::name(c))).collect::<Result<_>>()?;
        Ok(WElem { dom: a.to_vec(), cod: a.to_vec(), f: (1..=a.len()).collect(), ops }.encode())
    }

    fn describe(&self, x: &Elem) -> String {
        match WElem::decode(x) {
            Ok(w) => {
                let ops: Vec<String> = w.ops.iter().map(|o| self.o.describe(o)).collect();
                format!("({:?}, [{}])", w.f, ops.join(", "))
            }
            Err(_) => "?".into(),
        }
    }
}

/// `(f, {φ_i})` with `f` a bijection and `φ_i: dom_{f⁻¹(i)} → cod_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmElem {
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    pub f: Vec<usize>,
    pub arrows: Vec<String>,
}

impl SmElem {
    pub fn decode(x: &Elem) -> Result<SmElem> {
        serde_json::from_slice(x).map_err(|e| Error::BadOperation(e.to_string()))
    }

    pub fn encode(&self) -> Elem {
        serde_json::to_vec(self).expect("elements serialize")
    }

    /// The same morphism as an element of `w_!(j_!C)`.
    pub fn to_welem(&self) -> WElem {
        WElem {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            f: self.f.clone(),
            ops: self.arrows.iter().map(|a| a.as_bytes().to_vec()).collect(),
        }
    }
}

pub struct FreeSymmetricMonoidal {
    cat: Arc<FiniteCategory>,
    colours: Vec<String>,
    cache: ValenceCache,
}

pub fn free_symmetric_monoidal(cat: Arc<FiniteCategory>) -> FreeSymmetricMonoidal {
    let colours = cat.objects().to_vec();
    FreeSymmetricMonoidal { cat, colours, cache: ValenceCache::default() }
}

impl FreeSymmetricMonoidal {
    fn arrow(&self, name: &str) -> Result<usize> {
        self.cat.arrow(name).ok_or_else(|| Error::BadOperation(name.to_string()))
    }

    fn compute(&self, v: &CValence) -> Result<Vec<Elem>> {
        let n = v.inputs.len();
        if n != v.outputs.len() || v.colours().any(|c| !self.colours.contains(c)) {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        for p in Permutation::all(n) {
            // f = p⁻¹ as a map, so that f⁻¹(i) = p(i)
            let f = p.inverse().images().to_vec();
            let choices: Vec<Vec<usize>> = (0..n).map(|i| self.cat.hom(&v.inputs[p.apply(i + 1) - 1], &v.outputs[i])).collect();
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            let mut idx = vec![0; n];
            'prod: loop {
                let arrows = idx.iter().zip(&choices).map(|(&k, c)| self.cat.name(c[k]).to_string()).collect();
                out.push(SmElem { dom: v.inputs.clone(), cod: v.outputs.clone(), f: f.clone(), arrows }.encode());
                let mut k = n;
                loop {
                    if k == 0 {
                        break 'prod;
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
        Ok(out)
    }
}

impl SetProp for FreeSymmetricMonoidal {
    fn colours(&self) -> &[String] {
        &self.colours
    }

    fn hom(&self, v: &CValence) -> Result<Arc<Vec<Elem>>> {
        self.cache.get_or_compute(v, 0, || self.compute(v))
    }

    fn valence(&self, x: &Elem) -> Result<CValence> {
        let s = SmElem::decode(x)?;
        Ok(CValence { inputs: s.dom, outputs: s.cod })
    }

    fn vcomp(&self, g: &Elem, f: &Elem) -> Result<Elem> {
        let (y, x) = (SmElem::decode(g)?, SmElem::decode(f)?);
        if y.dom != x.cod {
            return Err(Error::ValenceMismatch { expected: format!("{:?}", x.cod), found: format!("{:?}", y.dom) });
        }
        let gf: Vec<usize> = x.f.iter().map(|&i| y.f[i - 1]).collect();
        let mut arrows = Vec::with_capacity(y.cod.len());
        for k in 1..=y.cod.len() {
            let i = y.f.iter().position(|&t| t == k).expect("bijection") + 1;
            let h = self
                .cat
                .compose(self.arrow(&y.arrows[k - 1])?, self.arrow(&x.arrows[i - 1])?)
                .ok_or_else(|| Error::BadOperation("arrows do not compose".into()))?;
            arrows.push(self.cat.name(h).to_string());
        }
        Ok(SmElem { dom: x.dom, cod: y.cod, f: gf, arrows }.encode())
    }

    fn hcomp(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let (x, y) = (SmElem::decode(a)?, SmElem::decode(b)?);
        let m = x.cod.len();
        Ok(SmElem {
            dom: concat(&x.dom, &y.dom),
            cod: concat(&x.cod, &y.cod),
            f: x.f.iter().copied().chain(y.f.iter().map(|&i| i + m)).collect(),
            arrows: concat(&x.arrows, &y.arrows),
        }
        .encode())
    }

    fn in_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = SmElem::decode(a)?;
        Ok(SmElem {
            dom: sigma.permute(&x.dom)?,
            f: (1..=x.f.len()).map(|t| x.f[sigma.apply(t) - 1]).collect(),
            cod: x.cod,
            arrows: x.arrows,
        }
        .encode())
    }

    fn out_act(&self, sigma: &Permutation, a: &Elem) -> Result<Elem> {
        let x = SmElem::decode(a)?;
        Ok(SmElem {
            cod: outputs_after(sigma, &x.cod)?,
            f: x.f.iter().map(|&i| sigma.apply(i)).collect(),
            arrows: outputs_after(sigma, &x.arrows)?,
            dom: x.dom,
        }
        .encode())
    }

    fn unit(&self, a: &[String]) -> Result<Elem> {
        let arrows = a
            .iter()
            .map(|c| self.cat.identity(c).map(|i| self.cat.name(i).to_string()).ok_or_else(|| Error::UnknownColour(c.clone())))
            .collect::<Result<_>>()?;
        Ok(SmElem { dom: a.to_vec(), cod: a.to_vec(), f: (1..=a.len()).collect(), arrows }.encode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{Assoc, CategoryOperad, Com};
    use crate::prop::{check_prop_axioms, valences_upto, PropConfig};

    #[test]
    fn com_counts_are_functions() {
        let w = free_prop_on_operad(Arc::new(Com::on(&["*"])), &["*"]).unwrap();
        for n in 0..=4 {
            for m in 0..=4 {
                let v = CValence::mono("*", n, m);
                assert_eq!(w.hom(&v).unwrap().len(), m.pow(n as u32), "{n},{m}");
            }
        }
    }

    #[test]
    fn com_composition_is_function_composition() {
        let w = free_prop_on_operad(Arc::new(Com::on(&["*"])), &["*"]).unwrap();
        for x in w.hom(&CValence::mono("*", 3, 2)).unwrap().iter() {
            for y in w.hom(&CValence::mono("*", 2, 2)).unwrap().iter() {
                let (fx, fy) = (WElem::decode(x).unwrap().f, WElem::decode(y).unwrap().f);
                let c = WElem::decode(&w.vcomp(y, x).unwrap()).unwrap();
                assert_eq!(c.f, fx.iter().map(|&i| fy[i - 1]).collect::<Vec<_>>());
            }
        }
    }

    /// Terms over variables `1..=n`, one word per output.
    fn terms(x: &WElem) -> Vec<Vec<usize>> {
        (1..=x.cod.len())
            .map(|i| {
                let fib = x.fibre(i);
                Assoc::word(&x.ops[i - 1]).unwrap().iter().map(|&s| fib[s - 1]).collect()
            })
            .collect()
    }

    #[test]
    fn assoc_composition_matches_substitution() {
        let w = free_prop_on_operad(Arc::new(Assoc::new("*")), &["*"]).unwrap();
        let xs = w.hom(&CValence::mono("*", 3, 2)).unwrap();
        let ys = w.hom(&CValence::mono("*", 2, 2)).unwrap();
        // fibre sizes (3,0) and (0,3) give 3! each, the six maps with sizes (2,1) or (1,2) give 2! each
        assert_eq!(xs.len(), 2 * 6 + 6 * 2);
        for x in xs.iter() {
            for y in ys.iter() {
                let (tx, ty) = (terms(&WElem::decode(x).unwrap()), terms(&WElem::decode(y).unwrap()));
                let expected: Vec<Vec<usize>> =
                    ty.iter().map(|t| t.iter().flat_map(|&v| tx[v - 1].iter().copied()).collect()).collect();
                assert_eq!(terms(&WElem::decode(&w.vcomp(y, x).unwrap()).unwrap()), expected);
            }
        }
    }

    #[test]
    fn assoc_actions_match_substitution() {
        let w = free_prop_on_operad(Arc::new(Assoc::new("*")), &["*"]).unwrap();
        for x in w.hom(&CValence::mono("*", 3, 2)).unwrap().iter() {
            let tx = terms(&WElem::decode(x).unwrap());
            for s in Permutation::all(3) {
                // variable t of the result is variable σ(t) of x
                let inv = s.inverse();
                let expected: Vec<Vec<usize>> = tx.iter().map(|t| t.iter().map(|&v| inv.apply(v)).collect()).collect();
                assert_eq!(terms(&WElem::decode(&w.in_act(&s, x).unwrap()).unwrap()), expected);
            }
            let sw = Permutation::transposition(2, 1, 2);
            let moved = terms(&WElem::decode(&w.out_act(&sw, x).unwrap()).unwrap());
            assert_eq!(moved, vec![tx[1].clone(), tx[0].clone()]);
        }
    }

    #[test]
    fn free_props_pass_axioms() {
        let w = free_prop_on_operad(Arc::new(Com::on(&["*"])), &["*"]).unwrap();
        let r = check_prop_axioms(&w, &PropConfig::new(valences_upto(&["*"], 2, 2))).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
        let a = free_prop_on_operad(Arc::new(Assoc::new("*")), &["*"]).unwrap();
        let mut cfg = PropConfig::new(valences_upto(&["*"], 2, 2));
        cfg.cap = 3000;
        let r = check_prop_axioms(&a, &cfg).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn one_output_recovers_the_operad() {
        let o: Arc<dyn SetOperad> = Arc::new(Assoc::new("*"));
        let w = free_prop_on_operad(o.clone(), &["*"]).unwrap();
        for n in 0..=4 {
            let s = Signature::new(vec![Colour::name("*"); n], Colour::name("*"));
            assert_eq!(w.hom(&CValence::mono("*", n, 1)).unwrap().len(), o.hom(&s).unwrap().len());
        }
    }

    #[test]
    fn symmetric_monoidal_counts() {
        let one = Arc::new(FiniteCategory::cyclic_monoid(1).unwrap());
        let three = Arc::new(FiniteCategory::cyclic_monoid(3).unwrap());
        let (s1, s3) = (free_symmetric_monoidal(one), free_symmetric_monoidal(three.clone()));
        let fact = |n: usize| (1..=n).product::<usize>();
        for n in 0..=4 {
            let v = CValence::mono("*", n, n);
            assert_eq!(s1.hom(&v).unwrap().len(), fact(n));
            assert_eq!(s3.hom(&v).unwrap().len(), fact(n) * 3usize.pow(n as u32));
        }
        assert!(s1.hom(&CValence::mono("*", 1, 2)).unwrap().is_empty());
        let w = free_prop_on_operad(Arc::new(CategoryOperad::new(three)), &["*"]).unwrap();
        for n in 0..=3 {
            let v = CValence::mono("*", n, n);
            let mut ours: Vec<Elem> = s3.hom(&v).unwrap().iter().map(|x| SmElem::decode(x).unwrap().to_welem().encode()).collect();
            let mut theirs = w.hom(&v).unwrap().to_vec();
            ours.sort();
            theirs.sort();
            assert_eq!(ours, theirs);
        }
        let r = check_prop_axioms(&s3, &PropConfig::new(valences_upto(&["*"], 2, 2))).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }
}
