// One line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coprop::coa::{enumerate_coa, random_coa, random_coa_with_residue, Arity, CValence, CoaGraph};
use coprop::graph::Graph;
use coprop::insertion::{decompose, insert, is_eligible};
use coprop::operad::{
    af_prop_operad, bv_tensor_poset, cf_prop_operad, check_operad_axioms, grothendieck, is_sigma_free, prop_operad,
    random_prop_triple, signatures_over, valence_colours, Arrow, AxiomConfig, BvPoset, Colour, Com, FiniteCategory,
    OperadicFamily, SetOperad, Signature,
};
use coprop::perm::{unshuffle, OrderedPartition, Permutation};
use coprop::prop::{free_prop_on_operad, free_symmetric_monoidal, SetProp, WElem};
use coprop::pushout::{instances, verify_fully_faithful};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn star(n: usize, m: usize) -> CValence {
    CValence::mono("*", n, m)
}

fn fact(n: usize) -> usize {
    (1..=n).product()
}

/// Every map `[n] -> [m]` as a list of values.
fn maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f: Vec<usize>| (1..=m).map(move |v| [f.clone(), vec![v]].concat())).collect();
    }
    out
}

fn unshuffle_criterion() -> Outcome {
    let got = unshuffle(&[2, 1, 1, 3, 2, 1]);
    ensure(got.images() == [4, 1, 2, 6, 5, 3], || format!("unshuffle gave {got:?}"))?;
    let mut checked = 0;
    for n in 0..=4 {
        for m in 0..=4 {
            for f in maps(n, m) {
                let p = OrderedPartition::of_map(&f, m).map_err(|e| e.to_string())?.monotone_map();
                let omega = unshuffle(&f);
                for j in 1..=n {
                    ensure(p[omega.apply(j) - 1] == f[j - 1], || format!("p_f(w_f({j})) != f({j}) for {f:?}"))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} maps"))
}

fn prop_axioms_criterion() -> Outcome {
    let mut checks = 0;
    for colours in [vec!["*"], vec!["a", "b"]] {
        let p = prop_operad(&colours);
        let sigs = signatures_over(&valence_colours(&colours, 1, 1), 3);
        let r = check_operad_axioms(&p, &AxiomConfig { signatures: sigs, max_arity: 3 }).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{:?}", r.violations.first()))?;
        checks += r.checks;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let e = |e: coprop::Error| e.to_string();
    for t in 0..500 {
        let colours: &[&str] = if t % 2 == 0 { &["*"] } else { &["a", "b"] };
        let p = prop_operad(colours);
        let t = random_prop_triple(&mut rng, colours, 4, 2);
        let gh = p.compose_at(&t.g, t.i, &t.h).map_err(e)?;
        let lhs = p.compose_at(&gh, t.i - 1 + t.j, &t.k).map_err(e)?;
        let rhs = p.compose_at(&t.g, t.i, &p.compose_at(&t.h, t.j, &t.k).map_err(e)?).map_err(e)?;
        ensure(lhs == rhs, || "sequential associativity fails on a random triple".into())?;
        if let Some((i2, l)) = &t.parallel {
            let (a, b, ia, ib) = if t.i < *i2 { (&t.h, l, t.i, *i2) } else { (l, &t.h, *i2, t.i) };
            let pa = p.signature(a).map_err(e)?.arity();
            let one = p.compose_at(&p.compose_at(&t.g, ib, b).map_err(e)?, ia, a).map_err(e)?;
            let two = p.compose_at(&p.compose_at(&t.g, ia, a).map_err(e)?, ib - 1 + pa, b).map_err(e)?;
            ensure(one == two, || "parallel associativity fails on a random triple".into())?;
        }
    }
    Ok(format!("{checks} exhaustive checks, 500 random triples"))
}

fn corolla_counts_criterion() -> Outcome {
    let p = prop_operad(&["*"]);
    for n in 0..=3 {
        for m in 0..=3 {
            let v = star(n, m);
            let gs = enumerate_coa(&Arity::new(vec![v.clone()], v.clone()));
            let c = Colour::Valence(v);
            let hom = p.hom(&Signature::new(vec![c.clone()], c)).map_err(|e| e.to_string())?;
            ensure(gs.len() == fact(n) * fact(m) && hom.len() == gs.len(), || {
                format!("({n},{m}): {} graphs, {} operations", gs.len(), hom.len())
            })?;
        }
    }
    Ok("n,m <= 3".into())
}

/// A random graph with the given residue and between `min` and `max` nodes.
fn filling(rng: &mut ChaCha8Rng, cs: &[String], residue: &CValence, min: usize, max: usize) -> CoaGraph {
    loop {
        let nodes = rng.gen_range(min..=max);
        let inner = if nodes < 2 { 0 } else { rng.gen_range(0..=nodes) };
        if let Some(g) = random_coa_with_residue(rng, cs, residue, nodes, inner) {
            return g;
        }
    }
}

fn insertion_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cs = vec!["a".to_string(), "b".to_string()];
    let same = |x: &CoaGraph, y: &CoaGraph| x.canonical_encode() == y.canonical_encode();
    let e = |e: coprop::Error| e.to_string();
    let mut built: Vec<CoaGraph> = Vec::new();
    let (mut horizontal, mut vertical) = (0, 0);
    for _ in 0..1000 {
        let g = loop {
            let g = random_coa(&mut rng, &cs, 3, 2);
            if g.node_count() > 0 {
                break g;
            }
        };
        let p = rng.gen_range(1..=g.node_count());
        let v = g.node_at(p);
        let h = filling(&mut rng, &cs, &g.c_valence_of_node(v).map_err(e)?, 1, 2);

        // units
        let cor = CoaGraph::untwisted_corolla(&g.c_valence_of_node(v).map_err(e)?);
        ensure(same(&insert(&g, v, &cor).map_err(e)?, &g), || "right unit".into())?;
        let res = CoaGraph::untwisted_corolla(&g.residue_valence());
        ensure(same(&insert(&res, 0, &g).map_err(e)?, &g), || "left unit".into())?;

        // vertical: a node of h receives k
        let gh = insert(&g, v, &h).map_err(e)?;
        let j = rng.gen_range(1..=h.node_count());
        let k = filling(&mut rng, &cs, &h.c_valence_of_node(h.node_at(j)).map_err(e)?, 0, 2);
        let lhs = insert(&gh, gh.node_at(p - 1 + j), &k).map_err(e)?;
        let hk = insert(&h, h.node_at(j), &k).map_err(e)?;
        let rhs = insert(&g, v, &hk).map_err(e)?;
        ensure(same(&lhs, &rhs), || "vertical associativity".into())?;
        vertical += 1;
        built.extend([gh, lhs, rhs, hk]);

        // horizontal: two distinct nodes of g
        if g.node_count() > 1 {
            let q = loop {
                let q = rng.gen_range(1..=g.node_count());
                if q != p {
                    break q;
                }
            };
            let w = g.node_at(q);
            let l = filling(&mut rng, &cs, &g.c_valence_of_node(w).map_err(e)?, 0, 2);
            let gh = insert(&g, v, &h).map_err(e)?;
            let q2 = if q < p { q } else { q + h.node_count() - 1 };
            let one = insert(&gh, gh.node_at(q2), &l).map_err(e)?;
            let gl = insert(&g, w, &l).map_err(e)?;
            let p2 = if p < q { p } else { p + l.node_count() - 1 };
            let two = insert(&gl, gl.node_at(p2), &h).map_err(e)?;
            ensure(same(&one, &two), || "horizontal commutation".into())?;
            horizontal += 1;
            built.extend([one, two, gl]);
        }
    }
    let max_nodes = built.iter().map(|g| g.node_count()).max().unwrap_or(0);
    ensure(built.iter().all(|g| g.graph().is_acyclic()), || "a constructed graph has a cycle".into())?;
    ensure(max_nodes <= 6, || format!("an instance has {max_nodes} nodes"))?;
    Ok(format!("{vertical} vertical, {horizontal} horizontal, {} graphs acyclic", built.len()))
}

/// Every list of `k` node valences drawn from `vals`, with every residue the
/// balance allows.
fn arities(k: usize, vals: &[(usize, usize)]) -> Vec<Arity> {
    let mut lists: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for _ in 0..k {
        lists = lists.into_iter().flat_map(|l| vals.iter().map(move |&v| [l.clone(), vec![v]].concat())).collect();
    }
    let mut out = Vec::new();
    for l in lists {
        let (tin, tout) = l.iter().fold((0, 0), |(a, b), &(n, m)| (a + n, b + m));
        let nodes: Vec<CValence> = l.iter().map(|&(n, m)| star(n, m)).collect();
        // r_in + inner = tin, r_out + inner = tout
        for inner in 0..=tin.min(tout) {
            out.push(Arity::new(nodes.clone(), star(tin - inner, tout - inner)));
        }
    }
    out
}

fn decomposition_criterion() -> Outcome {
    let (mut graphs, mut pairs) = (0, 0);
    // node valences up to (2,2) for two nodes, n+m <= 2 for three
    let wide: Vec<(usize, usize)> = (0..=2).flat_map(|n| (0..=2).map(move |m| (n, m))).collect();
    let narrow: Vec<(usize, usize)> = wide.iter().copied().filter(|&(n, m)| n + m <= 2).collect();
    for k in 0..=3 {
        for a in arities(k, if k < 3 { &wide } else { &narrow }) {
            for g in enumerate_coa(&a) {
                graphs += 1;
                for x in 0..g.node_count() {
                    for y in 0..g.node_count() {
                        if x == y || !is_eligible(&g, x, y) {
                            continue;
                        }
                        let d = decompose(&g, x, y).map_err(|e| e.to_string())?;
                        let back = d.reassemble().map_err(|e| e.to_string())?;
                        ensure(back.canonical_encode() == g.canonical_encode(), || {
                            format!("round trip fails at ({x},{y}) of a graph of arity {}", g.arity())
                        })?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{graphs} graphs, {pairs} eligible pairs"))
}

/// Whether every node lies in a component with a dangling edge.
fn every_node_reaches_a_port(g: &Graph) -> bool {
    let n = g.node_count();
    let mut reached = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    for e in 0..g.edge_count() {
        if !g.is_inner(e) {
            if let Some(x) = g.enters(e).or(g.exits(e)) {
                stack.push(x);
            }
        }
    }
    while let Some(x) = stack.pop() {
        if reached[x] {
            continue;
        }
        reached[x] = true;
        for e in g.inputs_of(x).into_iter().chain(g.outputs_of(x)) {
            for y in [g.enters(e), g.exits(e)].into_iter().flatten() {
                if !reached[y] {
                    stack.push(y);
                }
            }
        }
    }
    reached.into_iter().all(|r| r)
}

fn automorphism_criterion() -> Outcome {
    // up to three nodes of valence at most (2,1) or (1,2), four of valence at most (1,1)
    let wide: Vec<(usize, usize)> = vec![(0, 1), (1, 0), (1, 1), (2, 1), (1, 2)];
    let narrow: Vec<(usize, usize)> = vec![(0, 1), (1, 0), (1, 1)];
    let mut checked = 0;
    for k in 1..=4 {
        for a in arities(k, if k < 4 { &wide } else { &narrow }) {
            for g in enumerate_coa(&a) {
                if !every_node_reaches_a_port(g.graph()) {
                    continue;
                }
                let auts = g.ordered_automorphisms().len();
                ensure(auts == 1, || format!("{auts} automorphisms of a graph of arity {}", g.arity()))?;
                checked += 1;
            }
        }
    }
    let two = enumerate_coa(&Arity::new(vec![star(0, 0), star(0, 0)], star(0, 0)));
    ensure(two.len() == 1 && two[0].ordered_automorphisms().len() == 2, || "two isolated nodes".into())?;
    Ok(format!("{checked} graphs with trivial group, isolated pair has 2"))
}

fn sigma_free_criterion() -> Outcome {
    let mut sigs_checked = 0;
    for (name, o) in [("cf", cf_prop_operad(&["*"])), ("af", af_prop_operad(&["*"]))] {
        let cols: Vec<Colour> = valence_colours(&["*"], 2, 2).into_iter().filter(|c| o.has_colour(c)).collect();
        let r = is_sigma_free(&o, &signatures_over(&cols, 3)).map_err(|e| e.to_string())?;
        ensure(r.free, || format!("{name} has a fixed point: {:?}", r.witness))?;
        sigs_checked += r.signatures_checked;
    }
    let p = prop_operad(&["*"]);
    let mut sigs = signatures_over(&valence_colours(&["*"], 1, 1), 2);
    let ports = |s: &Signature| -> usize {
        s.inputs.iter().chain([&s.output]).map(|c| c.as_valence().map(|v| v.inputs.len() + v.outputs.len()).unwrap_or(0)).sum()
    };
    sigs.sort_by_key(|s| (s.arity(), ports(s)));
    let r = is_sigma_free(&p, &sigs).map_err(|e| e.to_string())?;
    let w = r.witness.ok_or("prop_operad reported free")?;
    let zero = Colour::Valence(star(0, 0));
    ensure(w.signature == Signature::new(vec![zero.clone(), zero.clone()], zero), || format!("witness at {}", w.signature))?;
    let g = coprop::operad::prop_operad::decode(&w.op).map_err(|e| e.to_string())?;
    ensure(g.node_count() == 2 && g.edge_count() == 0, || "witness is not two isolated nodes".into())?;
    ensure(w.permutation == Permutation::transposition(2, 1, 2), || format!("witness permutation {:?}", w.permutation))?;
    Ok(format!("{sigs_checked} signatures free; prop fixed by (1 2) at {}", w.signature))
}

fn com_criterion() -> Outcome {
    let e = |e: coprop::Error| e.to_string();
    let w = free_prop_on_operad(Arc::new(Com::on(&["*"])), &["*"]).map_err(e)?;
    for n in 0..=4 {
        for m in 0..=4 {
            let k = w.hom(&star(n, m)).map_err(e)?.len();
            ensure(k == m.pow(n as u32), || format!("({n};{m}) has {k}"))?;
        }
    }
    let mut pairs = 0;
    for a in 0..=2 {
        for b in 0..=2 {
            for c in 0..=2 {
                for x in w.hom(&star(a, b)).map_err(e)?.iter() {
                    for y in w.hom(&star(b, c)).map_err(e)?.iter() {
                        let fx = WElem::decode(x).map_err(e)?.f;
                        let fy = WElem::decode(y).map_err(e)?.f;
                        let got = WElem::decode(&w.vcomp(y, x).map_err(e)?).map_err(e)?.f;
                        let want: Vec<usize> = fx.iter().map(|&i| fy[i - 1]).collect();
                        ensure(got == want, || format!("{fy:?} after {fx:?} gave {got:?}"))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} composable pairs"))
}

fn symmetric_monoidal_criterion() -> Outcome {
    let e = |e: coprop::Error| e.to_string();
    for k in 1..=3 {
        let s = free_symmetric_monoidal(Arc::new(FiniteCategory::cyclic_monoid(k).map_err(e)?));
        for n in 0..=3 {
            let got = s.hom(&star(n, n)).map_err(e)?.len();
            ensure(got == fact(n) * k.pow(n as u32), || format!("k={k} n={n}: {got}"))?;
        }
    }
    Ok("n, k <= 3".into())
}

/// Whether some wheel `W_n` (n nodes on a directed cycle of n inner edges)
/// maps into `g`: a closed walk of length `n` along inner edges.
fn has_wheel(g: &Graph, n: usize) -> bool {
    fn walk(g: &Graph, inner: &[usize], start: usize, at: usize, left: usize) -> bool {
        inner.iter().any(|&e| {
            g.exits(e) == Some(at) && {
                let next = g.enters(e).unwrap();
                if left == 1 {
                    next == start
                } else {
                    walk(g, inner, start, next, left - 1)
                }
            }
        })
    }
    let inner = g.inner_edges();
    (0..g.node_count()).any(|x| walk(g, &inner, x, x, n))
}

fn acyclicity_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cyclic = 0;
    for _ in 0..2000 {
        let nodes = rng.gen_range(1..=5);
        let edges = rng.gen_range(0..=8);
        let end = |r: &mut ChaCha8Rng| if r.gen_bool(0.8) { Some(r.gen_range(0..nodes)) } else { None };
        let enters: Vec<Option<usize>> = (0..edges).map(|_| end(&mut rng)).collect();
        let exits: Vec<Option<usize>> = (0..edges).map(|_| end(&mut rng)).collect();
        let g = Graph::new(nodes, enters, exits).map_err(|e| e.to_string())?;
        let oracle = (1..=nodes).all(|n| !has_wheel(&g, n));
        ensure(g.is_acyclic() == oracle, || format!("disagreement on {g:?}"))?;
        cyclic += usize::from(!oracle);
    }
    Ok(format!("2000 graphs, {cyclic} with a cycle"))
}

fn pushout_criterion() -> Outcome {
    let e = |e: coprop::Error| e.to_string();
    let prob = instances::desk(4, 2).map_err(e)?;
    let valences = [
        CValence::new(vec!["c"], vec!["c"]),
        CValence::new(vec!["c", "c"], Vec::<&str>::new()),
        CValence::new(Vec::<&str>::new(), Vec::<&str>::new()),
    ];
    let report = verify_fully_faithful(&prob, &valences, 1..=4).map_err(e)?;
    ensure(report.hypotheses.hold(), || format!("{:?}", report.hypotheses))?;
    let mut summary = Vec::new();
    for v in &valences {
        let last = report.verdicts.iter().filter(|x| x.valence == *v).last().ok_or("no verdict")?;
        ensure(last.stabilized && last.bijective, || format!("{last:?}"))?;
        let first_stable = report.verdicts.iter().find(|x| x.valence == *v && x.stabilized).map(|x| x.level);
        summary.push(format!("{v}: {} classes, stable at N={}", last.classes, first_stable.unwrap_or(0)));
    }
    ensure(report.passed(), || "desk report did not pass".into())?;
    let id = instances::identity(2).map_err(e)?;
    let idv = [CValence::new(vec!["c"], vec!["c"]), CValence::new(vec!["d", "c"], vec!["c", "d"])];
    let r = verify_fully_faithful(&id, &idv, 1..=1).map_err(e)?;
    ensure(r.passed() && r.verdicts.iter().all(|v| v.bijective), || "identity problem at N=1".into())?;
    Ok(summary.join("; "))
}

fn arrow(name: &str, s: &str, t: &str) -> Arrow {
    Arrow { name: name.into(), source: s.into(), target: t.into() }
}

fn picture_category() -> Result<FiniteCategory, String> {
    let objects = ["a", "b1", "b2", "b3", "c1", "c2"];
    let mut arrows: Vec<Arrow> = objects.iter().map(|o| arrow(&format!("1{o}"), o, o)).collect();
    for (n, s, t) in [
        ("f1", "b1", "a"),
        ("f2", "b2", "a"),
        ("f3", "b3", "a"),
        ("g1", "c1", "b1"),
        ("g2", "c2", "b1"),
        ("f1g1", "c1", "a"),
        ("f1g2", "c2", "a"),
    ] {
        arrows.push(arrow(n, s, t));
    }
    let mut table = Vec::new();
    for a in &arrows {
        table.push((format!("1{}", a.target), a.name.clone(), a.name.clone()));
        if a.source != a.target {
            table.push((a.name.clone(), format!("1{}", a.source), a.name.clone()));
        }
    }
    table.push(("f1".into(), "g1".into(), "f1g1".into()));
    table.push(("f1".into(), "g2".into(), "f1g2".into()));
    FiniteCategory::new(objects.iter().map(|o| o.to_string()).collect(), arrows, table).map_err(|e| e.to_string())
}

fn grothendieck_criterion() -> Outcome {
    let e = |e: coprop::Error| e.to_string();
    let com: Arc<dyn SetOperad> = Arc::new(Com::on(&["*"]));
    let g = grothendieck(OperadicFamily::constant(Arc::new(picture_category()?), com.clone()));
    let pc = |o: &str| Colour::pair(Colour::name(o), Colour::name("*"));
    let star = Colour::name("*");
    let o3 = com.hom(&Signature::new(vec![star.clone(); 3], star.clone())).map_err(e)?[0].clone();
    let p2 = com.hom(&Signature::new(vec![star.clone(); 2], star.clone())).map_err(e)?[0].clone();
    let o = g.operation(&Signature::new(vec![pc("b1"), pc("b2"), pc("b3")], pc("a")), &["f1", "f2", "f3"], &o3).map_err(e)?;
    let p = g.operation(&Signature::new(vec![pc("c1"), pc("c2")], pc("b1")), &["g1", "g2"], &p2).map_err(e)?;
    let r = g.compose_at(&o, 1, &p).map_err(e)?;
    let (arrows, inner) = g.parts(&r).map_err(e)?;
    ensure(arrows == ["f1g1", "f1g2", "f2", "f3"], || format!("arrows {arrows:?}"))?;
    ensure(inner == com.compose_at(&o3, 1, &p2).map_err(e)?, || "inner operation".into())?;
    let sig = g.signature(&r).map_err(e)?;
    ensure(sig == Signature::new(vec![pc("c1"), pc("c2"), pc("b2"), pc("b3")], pc("a")), || format!("signature {sig}"))?;

    let poset = Arc::new(FiniteCategory::poset(&["O", "A", "B"], &[("O", "A"), ("O", "B")]).map_err(e)?);
    let inner: Arc<dyn SetOperad> = Arc::new(Com::on(&["x", "y"]));
    let bv = bv_tensor_poset(inner.clone(), poset.clone()).map_err(e)?;
    let gr = grothendieck(OperadicFamily::constant(poset, inner));
    let all = signatures_over(&bv.colours().ok_or("bv colours")?, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sample: Vec<&Signature> = all.choose_multiple(&mut rng, 100).collect();
    let mut nonempty = 0;
    for s in &sample {
        let mine = bv.hom(s).map_err(e)?;
        let theirs = gr.hom(&BvPoset::swap_signature(s).ok_or("swap")?).map_err(e)?;
        ensure(mine.len() == theirs.len(), || format!("{s}: {} vs {}", mine.len(), theirs.len()))?;
        for x in mine.iter() {
            ensure(theirs.contains(&bv.to_grothendieck(&gr, x).map_err(e)?), || format!("{s}: image missing"))?;
        }
        nonempty += usize::from(!mine.is_empty());
    }
    Ok(format!("figure reproduced; {} signatures sampled, {nonempty} non-empty", sample.len()))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome, Duration)> = vec![
        ("unshuffle and triangle identity", unshuffle_criterion, Duration::from_secs(1)),
        ("operad axioms of graph insertion", prop_axioms_criterion, Duration::from_secs(60)),
        ("corolla counts n!m!", corolla_counts_criterion, Duration::from_secs(10)),
        ("insertion laws", insertion_criterion, Duration::from_secs(60)),
        ("decomposition round trip", decomposition_criterion, Duration::from_secs(60)),
        ("trivial automorphisms", automorphism_criterion, Duration::from_secs(60)),
        ("free actions", sigma_free_criterion, Duration::from_secs(60)),
        ("free PROP on Com", com_criterion, Duration::from_secs(60)),
        ("free symmetric monoidal counts", symmetric_monoidal_criterion, Duration::from_secs(60)),
        ("acyclicity against wheels", acyclicity_criterion, Duration::from_secs(60)),
        ("push-out fully faithful", pushout_criterion, Duration::from_secs(300)),
        ("Grothendieck composition", grothendieck_criterion, Duration::from_secs(60)),
    ];
    // `cargo test --test acceptance -- 5 11` runs only those criteria
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.into_iter().enumerate() {
        if !only.is_empty() && !only.contains(&(k + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if took > budget {
                Err(format!("{msg}; took {took:.1?}, budget {budget:?}"))
            } else {
                Ok(msg)
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({took:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({took:.2?})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
