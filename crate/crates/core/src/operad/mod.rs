//! Coloured symmetric operads in Set with finite hom-sets.
//!
//! Operations are opaque byte strings; each operad interprets its own. The
//! action is a right action: `act(γ, o)` has inputs `(s_γ(1), …, s_γ(n))`
//! when `o` has inputs `(s_1, …, s_n)`.

mod axioms;
mod finite;
mod groth;
pub mod prop_operad;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::coa::CValence;
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub use axioms::{check_operad_axioms, equivariance_perm, AxiomChecker, AxiomConfig, AxiomReport, Violation};
pub use finite::{Arrow, CategoryOperad, CategorySpec, FiniteCategory, TableOp, TableOperad, TableSpec};
pub use groth::{bv_tensor_poset, check_morphism, grothendieck, BvPoset, Grothendieck, IdentityTransport, OperadMorphism, OperadicFamily};
pub use prop_operad::{
    af_prop_operad, arity_of_signature, cat_suboperad, cf_prop_operad, oper_suboperad, prop_operad, random_prop_triple,
    relabel_operad, signature_of_arity, valence_colours, PropOperad, RandomTriple, Relabel,
};

pub type Op = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Colour {
    Name(String),
    Valence(CValence),
    Pair(Box<Colour>, Box<Colour>),
}

impl Colour {
    pub fn name(s: &str) -> Colour {
        Colour::Name(s.to_string())
    }

    pub fn pair(a: Colour, b: Colour) -> Colour {
        Colour::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Colour::Name(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_valence(&self) -> Option<&CValence> {
        match self {
            Colour::Valence(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colour::Name(s) => write!(f, "{s}"),
            Colour::Valence(v) => write!(f, "{v}"),
            Colour::Pair(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub inputs: Vec<Colour>,
    pub output: Colour,
}

impl Signature {
    pub fn new(inputs: Vec<Colour>, output: Colour) -> Self {
        Signature { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Signature of `o ∘_i p`.
    pub fn splice(&self, i: usize, p: &Signature) -> Result<Signature> {
        if i == 0 || i > self.arity() {
            return Err(Error::OutOfRange { value: i, bound: self.arity() });
        }
        if self.inputs[i - 1] != p.output {
            return Err(Error::BadOperation(format!(
                "input {i} of {self} is {}, the inserted operation has output {}",
                self.inputs[i - 1],
                p.output
            )));
        }
        let mut inputs = self.inputs[..i - 1].to_vec();
        inputs.extend(p.inputs.iter().cloned());
        inputs.extend(self.inputs[i..].iter().cloned());
        Ok(Signature { inputs, output: self.output.clone() })
    }

    /// Signature of `act(γ, o)`.
    pub fn act(&self, gamma: &Permutation) -> Result<Signature> {
        Ok(Signature { inputs: gamma.permute(&self.inputs)?, output: self.output.clone() })
    }

    /// Permutations fixing the input tuple.
    pub fn automorphisms(&self) -> Vec<Permutation> {
        Permutation::all(self.arity())
            .into_iter()
            .filter(|g| g.permute(&self.inputs).map(|xs| xs == self.inputs).unwrap_or(false))
            .collect()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|c| c.to_string()).collect();
        write!(f, "({};{})", ins.join(","), self.output)
    }
}

pub trait SetOperad: Send + Sync {
    fn has_colour(&self, c: &Colour) -> bool;

    /// All colours, when the colour set is finite and listable.
    fn colours(&self) -> Option<Vec<Colour>> {
        None
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>>;

    fn signature(&self, o: &Op) -> Result<Signature>;

    /// `o ∘_i p`, with `i` one-indexed.
    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op>;

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op>;

    fn unit(&self, c: &Colour) -> Result<Op>;

    fn describe(&self, o: &Op) -> String {
        String::from_utf8_lossy(o).into_owned()
    }
}

/// Memo table for hom-sets, safe under concurrent use.
#[derive(Default)]
pub struct HomCache {
    table: RwLock<HashMap<Signature, Arc<Vec<Op>>>>,
}

impl HomCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, s: &Signature, f: impl FnOnce() -> Result<Vec<Op>>) -> Result<Arc<Vec<Op>>> {
        if let Some(v) = self.table.read().expect("cache lock").get(s) {
            return Ok(v.clone());
        }
        let v = Arc::new(f()?);
        self.table.write().expect("cache lock").entry(s.clone()).or_insert(v.clone());
        Ok(v)
    }
}

impl fmt::Debug for HomCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomCache({} entries)", self.table.read().map(|t| t.len()).unwrap_or(0))
    }
}

/// Which colours an operad has.
#[derive(Clone)]
pub enum ColourSet {
    All,
    Finite(Vec<Colour>),
    Predicate(Arc<dyn Fn(&Colour) -> bool + Send + Sync>),
}

impl ColourSet {
    pub fn contains(&self, c: &Colour) -> bool {
        match self {
            ColourSet::All => true,
            ColourSet::Finite(cs) => cs.contains(c),
            ColourSet::Predicate(p) => p(c),
        }
    }

    pub fn list(&self) -> Option<Vec<Colour>> {
        match self {
            ColourSet::Finite(cs) => Some(cs.clone()),
            _ => None,
        }
    }
}

/// The terminal operad: exactly one operation per signature over its colours.
pub struct Com {
    colours: ColourSet,
}

impl Com {
    pub fn new(colours: ColourSet) -> Self {
        Com { colours }
    }

    pub fn on(colours: &[&str]) -> Self {
        Com { colours: ColourSet::Finite(colours.iter().map(|c| Colour::name(c)).collect()) }
    }

    fn op(s: &Signature) -> Op {
        serde_json::to_vec(s).expect("signatures serialize")
    }
}

impl SetOperad for Com {
    fn has_colour(&self, c: &Colour) -> bool {
        self.colours.contains(c)
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        self.colours.list()
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        let ok = s.inputs.iter().chain(std::iter::once(&s.output)).all(|c| self.has_colour(c));
        Ok(Arc::new(if ok { vec![Com::op(s)] } else { vec![] }))
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        serde_json::from_slice(o).map_err(|e| Error::BadOperation(e.to_string()))
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        Ok(Com::op(&self.signature(o)?.splice(i, &self.signature(p)?)?))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        Ok(Com::op(&self.signature(o)?.act(gamma)?))
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        if !self.has_colour(c) {
            return Err(Error::UnknownColour(c.to_string()));
        }
        Ok(Com::op(&Signature::new(vec![c.clone()], c.clone())))
    }

    fn describe(&self, o: &Op) -> String {
        self.signature(o).map(|s| format!("com{s}")).unwrap_or_else(|_| "?".into())
    }
}

/// Single-coloured operad of linear orders: an operation of arity `n` is a
/// word in which each input appears once.
pub struct Assoc {
    colour: Colour,
}

impl Assoc {
    pub fn new(colour: &str) -> Self {
        Assoc { colour: Colour::name(colour) }
    }

    pub fn word(o: &Op) -> Result<Vec<usize>> {
        let w: Vec<usize> = serde_json::from_slice(o).map_err(|e| Error::BadOperation(e.to_string()))?;
        Permutation::new(w.clone()).map_err(|_| Error::BadOperation(format!("{w:?} is not a word")))?;
        Ok(w)
    }

    pub fn op(word: &[usize]) -> Op {
        serde_json::to_vec(word).expect("words serialize")
    }
}

impl SetOperad for Assoc {
    fn has_colour(&self, c: &Colour) -> bool {
        *c == self.colour
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        Some(vec![self.colour.clone()])
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        if s.output != self.colour || s.inputs.iter().any(|c| *c != self.colour) {
            return Ok(Arc::new(vec![]));
        }
        Ok(Arc::new(Permutation::all(s.arity()).iter().map(|p| Assoc::op(p.images())).collect()))
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        Ok(Signature::new(vec![self.colour.clone(); Assoc::word(o)?.len()], self.colour.clone()))
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        let (w, v) = (Assoc::word(o)?, Assoc::word(p)?);
        if i == 0 || i > w.len() {
            return Err(Error::OutOfRange { value: i, bound: w.len() });
        }
        let k = v.len();
        let mut out = Vec::with_capacity(w.len() + k - 1);
        for &s in &w {
            match s.cmp(&i) {
                std::cmp::Ordering::Less => out.push(s),
                std::cmp::Ordering::Equal => out.extend(v.iter().map(|&t| t + i - 1)),
                std::cmp::Ordering::Greater => out.push(s + k - 1),
            }
        }
        Ok(Assoc::op(&out))
    }

    /// Input `t` of the result is input `γ(t)` of `o`.
    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        let w = Assoc::word(o)?;
        if gamma.len() != w.len() {
            return Err(Error::SizeMismatch { left: gamma.len(), right: w.len() });
        }
        let inv = gamma.inverse();
        Ok(Assoc::op(&w.iter().map(|&s| inv.apply(s)).collect::<Vec<_>>()))
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        if *c != self.colour {
            return Err(Error::UnknownColour(c.to_string()));
        }
        Ok(Assoc::op(&[1]))
    }
}

/// The full suboperad on the colours accepted by `keep`.
pub struct FullSuboperad {
    inner: Arc<dyn SetOperad>,
    keep: ColourSet,
}

pub fn full_suboperad(inner: Arc<dyn SetOperad>, keep: ColourSet) -> Result<FullSuboperad> {
    if let (ColourSet::Finite(cs), Some(all)) = (&keep, inner.colours()) {
        if cs.iter().any(|c| !all.contains(c)) {
            return Err(Error::NotASubset);
        }
    } else if let ColourSet::Finite(cs) = &keep {
        if cs.iter().any(|c| !inner.has_colour(c)) {
            return Err(Error::NotASubset);
        }
    }
    Ok(FullSuboperad { inner, keep })
}

impl FullSuboperad {
    fn check(&self, s: &Signature) -> Result<()> {
        match s.inputs.iter().chain(std::iter::once(&s.output)).find(|c| !self.has_colour(c)) {
            Some(c) => Err(Error::UnknownColour(c.to_string())),
            None => Ok(()),
        }
    }
}

impl SetOperad for FullSuboperad {
    fn has_colour(&self, c: &Colour) -> bool {
        self.keep.contains(c) && self.inner.has_colour(c)
    }

    fn colours(&self) -> Option<Vec<Colour>> {
        match &self.keep {
            ColourSet::Finite(cs) => Some(cs.clone()),
            _ => self.inner.colours().map(|cs| cs.into_iter().filter(|c| self.keep.contains(c)).collect()),
        }
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        if self.check(s).is_err() {
            return Ok(Arc::new(vec![]));
        }
        self.inner.hom(s)
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        let s = self.inner.signature(o)?;
        self.check(&s)?;
        Ok(s)
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        self.signature(o)?;
        self.signature(p)?;
        self.inner.compose_at(o, i, p)
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        self.signature(o)?;
        self.inner.act(gamma, o)
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        if !self.has_colour(c) {
            return Err(Error::UnknownColour(c.to_string()));
        }
        self.inner.unit(c)
    }

    fn describe(&self, o: &Op) -> String {
        self.inner.describe(o)
    }
}

/// The first fixed point of a non-identity automorphism of the signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaWitness {
    pub signature: Signature,
    pub operation: String,
    pub permutation: Permutation,
    #[serde(skip)]
    pub op: Op,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFreeReport {
    pub free: bool,
    pub signatures_checked: usize,
    pub witness: Option<SigmaWitness>,
}

/// Non-identity elements of `Aut(s)` fixing `o`.
pub fn fixing_permutations(o: &dyn SetOperad, s: &Signature, op: &Op) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for g in s.automorphisms() {
        if !g.is_identity() && &o.act(&g, op)? == op {
            out.push(g);
        }
    }
    Ok(out)
}

pub fn is_sigma_free(o: &dyn SetOperad, signatures: &[Signature]) -> Result<SigmaFreeReport> {
    for (k, s) in signatures.iter().enumerate() {
        let auts: Vec<Permutation> = s.automorphisms().into_iter().filter(|g| !g.is_identity()).collect();
        if auts.is_empty() {
            continue;
        }
        for op in o.hom(s)?.iter() {
            for g in &auts {
                if &o.act(g, op)? == op {
                    return Ok(SigmaFreeReport {
                        free: false,
                        signatures_checked: k + 1,
                        witness: Some(SigmaWitness {
                            signature: s.clone(),
                            operation: o.describe(op),
                            permutation: g.clone(),
                            op: op.clone(),
                        }),
                    });
                }
            }
        }
    }
    Ok(SigmaFreeReport { free: true, signatures_checked: signatures.len(), witness: None })
}

/// All signatures of arity at most `max_arity` over the given colours.
pub fn signatures_over(colours: &[Colour], max_arity: usize) -> Vec<Signature> {
    let k = colours.len();
    let mut out = Vec::new();
    for n in 0..=max_arity {
        for mut idx in 0..k.pow(n as u32) {
            let mut inputs = Vec::with_capacity(n);
            for _ in 0..n {
                inputs.push(colours[idx % k].clone());
                idx /= k;
            }
            inputs.reverse();
            for c in colours {
                out.push(Signature::new(inputs.clone(), c.clone()));
            }
        }
    }
    out
}
