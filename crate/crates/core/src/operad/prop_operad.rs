//! The operad whose algebras are `C`-coloured PROPs: colours are
//! `C`-valences, operations are classes of coa graphs, composition is
//! insertion.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::groth::OperadMorphism;
use super::{full_suboperad, ColourSet, Colour, FullSuboperad, HomCache, Op, SetOperad, Signature};
use crate::coa::{enumerate_coa, random_coa, random_coa_with_residue, Arity, CValence, CoaGraph};
use crate::error::{Error, Result};
use crate::insertion::insert;
use crate::perm::Permutation;

pub struct PropOperad {
    colours: Vec<String>,
    cache: HomCache,
}

pub fn prop_operad(colours: &[&str]) -> PropOperad {
    PropOperad { colours: colours.iter().map(|c| c.to_string()).collect(), cache: HomCache::new() }
}

pub fn decode(o: &Op) -> Result<CoaGraph> {
    serde_json::from_slice(o).map_err(|e| Error::BadOperation(e.to_string()))
}

pub fn encode(g: &CoaGraph) -> Op {
    g.canonical_encode()
}

fn valence_colour(v: CValence) -> Colour {
    Colour::Valence(v)
}

pub fn signature_of_arity(a: &Arity) -> Signature {
    Signature::new(a.node_valences.iter().cloned().map(valence_colour).collect(), valence_colour(a.residue.clone()))
}

pub fn arity_of_signature(s: &Signature) -> Option<Arity> {
    let nodes = s.inputs.iter().map(|c| c.as_valence().cloned()).collect::<Option<Vec<_>>>()?;
    Some(Arity::new(nodes, s.output.as_valence()?.clone()))
}

/// Every valence over `colours` with at most `max_in` inputs and `max_out`
/// outputs.
pub fn valence_colours(colours: &[&str], max_in: usize, max_out: usize) -> Vec<Colour> {
    fn words(colours: &[&str], max: usize) -> Vec<Vec<String>> {
        let mut out = vec![vec![]];
        let mut last = vec![vec![]];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &last {
                for c in colours {
                    let mut w2: Vec<String> = w.clone();
                    w2.push(c.to_string());
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            last = next;
        }
        out
    }
    let mut out = Vec::new();
    for i in words(colours, max_in) {
        for o in words(colours, max_out) {
            out.push(Colour::Valence(CValence { inputs: i.clone(), outputs: o }));
        }
    }
    out
}

impl PropOperad {
    pub fn colour_names(&self) -> &[String] {
        &self.colours
    }

    pub fn graph(&self, o: &Op) -> Result<CoaGraph> {
        decode(o)
    }

    /// The operation of a coa graph whose colours lie in `C`.
    pub fn op(&self, g: &CoaGraph) -> Result<Op> {
        if let Some(c) = g.labels().iter().find(|c| !self.colours.contains(c)) {
            return Err(Error::UnknownColour(c.clone()));
        }
        Ok(encode(g))
    }
}

impl SetOperad for PropOperad {
    fn has_colour(&self, c: &Colour) -> bool {
        c.as_valence().is_some_and(|v| v.colours().all(|x| self.colours.contains(x)))
    }

    fn hom(&self, s: &Signature) -> Result<Arc<Vec<Op>>> {
        self.cache.get_or_compute(s, || {
            if !s.inputs.iter().chain(std::iter::once(&s.output)).all(|c| self.has_colour(c)) {
                return Ok(vec![]);
            }
            let a = arity_of_signature(s).expect("valence colours");
            let mut ops: Vec<Op> = enumerate_coa(&a).iter().map(encode).collect();
            ops.sort();
            Ok(ops)
        })
    }

    fn signature(&self, o: &Op) -> Result<Signature> {
        Ok(signature_of_arity(&decode(o)?.arity()))
    }

    fn compose_at(&self, o: &Op, i: usize, p: &Op) -> Result<Op> {
        let (g, h) = (decode(o)?, decode(p)?);
        if i == 0 || i > g.node_count() {
            return Err(Error::OutOfRange { value: i, bound: g.node_count() });
        }
        Ok(encode(&insert(&g, g.node_at(i), &h)?))
    }

    fn act(&self, gamma: &Permutation, o: &Op) -> Result<Op> {
        Ok(encode(&decode(o)?.permute_node_order(gamma)?))
    }

    fn unit(&self, c: &Colour) -> Result<Op> {
        match c.as_valence() {
            Some(v) if self.has_colour(c) => Ok(encode(&CoaGraph::untwisted_corolla(v))),
            _ => Err(Error::UnknownColour(c.to_string())),
        }
    }

    fn describe(&self, o: &Op) -> String {
        match decode(o) {
            Ok(g) => {
                let mut h = DefaultHasher::new();
                o.hash(&mut h);
                format!("{}#{:08x}", g.arity(), h.finish() as u32)
            }
            Err(_) => "?".into(),
        }
    }
}

fn sub(colours: &[&str], keep: impl Fn(&CValence) -> bool + Send + Sync + 'static) -> FullSuboperad {
    let p: Arc<dyn SetOperad> = Arc::new(prop_operad(colours));
    let pred = ColourSet::Predicate(Arc::new(move |c: &Colour| c.as_valence().is_some_and(&keep)));
    full_suboperad(p, pred).expect("predicates are always subsets")
}

/// Valences with at least one input.
pub fn cf_prop_operad(colours: &[&str]) -> FullSuboperad {
    sub(colours, |v| !v.inputs.is_empty())
}

/// Valences with at least one output.
pub fn af_prop_operad(colours: &[&str]) -> FullSuboperad {
    sub(colours, |v| !v.outputs.is_empty())
}

/// Valences with exactly one output.
pub fn oper_suboperad(colours: &[&str]) -> FullSuboperad {
    sub(colours, |v| v.outputs.len() == 1)
}

/// Valences with exactly one input and one output.
pub fn cat_suboperad(colours: &[&str]) -> FullSuboperad {
    sub(colours, |v| v.inputs.len() == 1 && v.outputs.len() == 1)
}

/// Change of colours along `f: C → D`, from `prop_operad(C)` to
/// `prop_operad(D)`.
pub struct Relabel {
    map: HashMap<String, String>,
}

pub fn relabel_operad(pairs: &[(&str, &str)]) -> Relabel {
    Relabel { map: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect() }
}

impl Relabel {
    pub fn is_injective(&self) -> bool {
        let mut im: Vec<&String> = self.map.values().collect();
        im.sort();
        im.windows(2).all(|w| w[0] != w[1])
    }

    fn f(&self, c: &str) -> Result<String> {
        self.map.get(c).cloned().ok_or_else(|| Error::UnknownColour(c.to_string()))
    }
}

impl OperadMorphism for Relabel {
    fn map_colour(&self, c: &Colour) -> Result<Colour> {
        let v = c.as_valence().ok_or_else(|| Error::UnknownColour(c.to_string()))?;
        let inputs = v.inputs.iter().map(|x| self.f(x)).collect::<Result<_>>()?;
        let outputs = v.outputs.iter().map(|x| self.f(x)).collect::<Result<_>>()?;
        Ok(Colour::Valence(CValence { inputs, outputs }))
    }

    fn map_op(&self, o: &Op) -> Result<Op> {
        let g = decode(o)?;
        if let Some(c) = g.labels().iter().find(|c| !self.map.contains_key(*c)) {
            return Err(Error::UnknownColour(c.clone()));
        }
        Ok(encode(&g.relabel(&|c| self.map[c].clone())))
    }
}

/// Random composable data in `prop_operad(C)`: `h` fits node `i` of `g`, `k`
/// fits node `j` of `h`, and when `g` has a second node, `l` fits node `i2`.
#[derive(Clone, Debug)]
pub struct RandomTriple {
    pub g: Op,
    pub i: usize,
    pub h: Op,
    pub j: usize,
    pub k: Op,
    pub parallel: Option<(usize, Op)>,
}

fn filling<R: Rng + ?Sized>(rng: &mut R, colours: &[String], residue: &CValence, max_nodes: usize, at_least_one: bool) -> CoaGraph {
    loop {
        let nodes = rng.gen_range(usize::from(at_least_one)..=max_nodes.max(1));
        let inner = if nodes < 2 { 0 } else { rng.gen_range(0..=nodes) };
        if let Some(g) = random_coa_with_residue(rng, colours, residue, nodes, inner) {
            return g;
        }
    }
}

pub fn random_prop_triple<R: Rng + ?Sized>(rng: &mut R, colours: &[&str], max_nodes: usize, max_ports: usize) -> RandomTriple {
    let cs: Vec<String> = colours.iter().map(|c| c.to_string()).collect();
    let g = loop {
        let g = random_coa(rng, &cs, max_nodes.max(1), max_ports);
        if g.node_count() > 0 {
            break g;
        }
    };
    let i = rng.gen_range(1..=g.node_count());
    let h = filling(rng, &cs, &g.c_valence_of_node(g.node_at(i)).expect("node"), max_nodes, true);
    let j = rng.gen_range(1..=h.node_count());
    let k = filling(rng, &cs, &h.c_valence_of_node(h.node_at(j)).expect("node"), max_nodes, false);
    let parallel = if g.node_count() > 1 {
        let others: Vec<usize> = (1..=g.node_count()).filter(|&p| p != i).collect();
        let &i2 = others.choose(rng).expect("a second node");
        let l = filling(rng, &cs, &g.c_valence_of_node(g.node_at(i2)).expect("node"), max_nodes, false);
        Some((i2, encode(&l)))
    } else {
        None
    };
    RandomTriple { g: encode(&g), i, h: encode(&h), j, k: encode(&k), parallel }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operad::{check_operad_axioms, fixing_permutations, is_sigma_free, signatures_over, AxiomConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(n: usize, m: usize) -> Colour {
        Colour::Valence(CValence::mono("*", n, m))
    }

    #[test]
    fn small_hom_sets() {
        let p = prop_operad(&["*"]);
        assert_eq!(p.hom(&Signature::new(vec![mono(2, 1)], mono(2, 1))).unwrap().len(), 2);
        let u = p.unit(&mono(2, 1)).unwrap();
        assert_eq!(p.compose_at(&u, 1, &u).unwrap(), u);
        assert!(!p.has_colour(&Colour::Valence(CValence::mono("z", 1, 0))));
    }

    #[test]
    fn two_isolated_nodes_are_fixed() {
        let p = prop_operad(&["*"]);
        let s = Signature::new(vec![mono(0, 0), mono(0, 0)], mono(0, 0));
        let hom = p.hom(&s).unwrap();
        assert_eq!(hom.len(), 1);
        let sw = Permutation::transposition(2, 1, 2);
        assert_eq!(p.act(&sw, &hom[0]).unwrap(), hom[0]);
        let r = is_sigma_free(&p, &[s]).unwrap();
        assert!(!r.free);
    }

    #[test]
    fn crossed_pairs_fixed_by_double_swap() {
        let p = prop_operad(&["a", "b"]);
        let src = CValence::new(Vec::<&str>::new(), vec!["a", "b"]);
        let snk = CValence::new(vec!["a", "b"], Vec::<&str>::new());
        // node 0, 1 sources; 2, 3 sinks
        let graph = Graph::new(4, vec![Some(3), Some(2), Some(2), Some(3)], vec![Some(0), Some(0), Some(1), Some(1)]).unwrap();
        let labels = ["a", "b", "a", "b"].iter().map(|s| s.to_string()).collect();
        let g = CoaGraph::new(graph, labels, vec![vec![], vec![], vec![2, 1], vec![0, 3]], vec![vec![0, 1], vec![2, 3], vec![], vec![]], vec![], vec![], vec![0, 1, 2, 3]).unwrap();
        let s = Signature::new(
            vec![Colour::Valence(src.clone()), Colour::Valence(src), Colour::Valence(snk.clone()), Colour::Valence(snk)],
            Colour::Valence(CValence::new(Vec::<&str>::new(), Vec::<&str>::new())),
        );
        let o = p.op(&g).unwrap();
        assert!(p.hom(&s).unwrap().contains(&o));
        let fixers = fixing_permutations(&p, &s, &o).unwrap();
        assert!(fixers.contains(&Permutation::new(vec![2, 1, 4, 3]).unwrap()));
        assert!(!is_sigma_free(&p, &[s]).unwrap().free);
    }

    #[test]
    fn suboperads_filter_colours() {
        let cf = cf_prop_operad(&["a"]);
        assert!(!cf.has_colour(&Colour::Valence(CValence::new(vec![], vec!["a"]))));
        let af = af_prop_operad(&["a"]);
        assert!(!af.has_colour(&Colour::Valence(CValence::new(vec!["a"], vec![]))));
        let cat = cat_suboperad(&["a", "b"]);
        let ab = Colour::Valence(CValence::new(vec!["a"], vec!["b"]));
        assert!(cat.has_colour(&ab));
        assert!(!oper_suboperad(&["a"]).has_colour(&mono(0, 2)));
    }

    #[test]
    fn constant_free_is_sigma_free() {
        let cf = cf_prop_operad(&["*"]);
        let cols: Vec<Colour> = valence_colours(&["*"], 2, 2).into_iter().filter(|c| cf.has_colour(c)).collect();
        let sigs = signatures_over(&cols, 2);
        let r = is_sigma_free(&cf, &sigs).unwrap();
        assert!(r.free, "{:?}", r.witness);
    }

    #[test]
    fn axioms_on_small_valences() {
        let p = prop_operad(&["*"]);
        let sigs = signatures_over(&valence_colours(&["*"], 1, 1), 2);
        let r = check_operad_axioms(&p, &AxiomConfig { signatures: sigs, max_arity: 3 }).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn random_triples_associate() {
        let p = prop_operad(&["a", "b"]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let t = random_prop_triple(&mut rng, &["a", "b"], 3, 2);
            let gh = p.compose_at(&t.g, t.i, &t.h).unwrap();
            let h_arity = p.signature(&t.h).unwrap().arity();
            let lhs = p.compose_at(&gh, t.i - 1 + t.j, &t.k).unwrap();
            let rhs = p.compose_at(&t.g, t.i, &p.compose_at(&t.h, t.j, &t.k).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            if let Some((i2, l)) = &t.parallel {
                let (a, b, ia, ib, pa) = if t.i < *i2 { (&t.h, l, t.i, *i2, h_arity) } else { (l, &t.h, *i2, t.i, p.signature(l).unwrap().arity()) };
                let one = p.compose_at(&p.compose_at(&t.g, ib, b).unwrap(), ia, a).unwrap();
                let two = p.compose_at(&p.compose_at(&t.g, ia, a).unwrap(), ib - 1 + pa, b).unwrap();
                assert_eq!(one, two);
            }
        }
    }

    #[test]
    fn relabelling_is_a_morphism() {
        use crate::operad::groth::check_morphism;
        let src = prop_operad(&["a", "b"]);
        let tgt = prop_operad(&["*"]);
        let f = relabel_operad(&[("a", "*"), ("b", "*")]);
        assert!(!f.is_injective());
        let sigs = signatures_over(&valence_colours(&["a", "b"], 1, 1), 2);
        let r = check_morphism(&src, &tgt, &f, &AxiomConfig { signatures: sigs, max_arity: 2 }).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }
}
