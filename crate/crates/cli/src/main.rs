use std::fs;
use std::path::{Path, PathBuf};
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde_json::{json, Value};

use coprop::coa::{enumerate_coa, CValence, CoaGraph};
use coprop::operad::{
    bv_tensor_poset, check_operad_axioms, fixing_permutations, grothendieck, prop_operad, random_prop_triple,
    signatures_over, AxiomConfig, BvPoset, FiniteCategory, OperadicFamily, SetOperad, Signature,
};
use coprop::prop::{check_prop_axioms, free_prop_on_operad, valences_upto, PropConfig};
use coprop::pushout::{marked_dot, pushout_component, verify_fully_faithful, MarkedCoaGraph, MarkedObject};
use coprop::Error;
use coprop_cli::arity::{parse_arity, parse_valence};
use coprop_cli::inputs::{self, colour_names, read_json};

#[derive(Parser)]
#[command(name = "coprop", version, about = "Completely ordered acyclic graphs, coloured PROPs and their push-outs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the coa graphs of an arity, one per isomorphism class.
    Enumerate {
        #[arg(long, default_value = "1")]
        colours: String,
        /// e.g. "((1,1),(1,1);(1,1))" or "(([a],[b]);([a],[b]))"
        #[arg(long)]
        arity: String,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Insert the second graph into node `--at` of the first.
    Compose {
        #[arg(long, default_value = "1")]
        colours: String,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        at: usize,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Check the operad axioms on all signatures up to a size.
    VerifyOperad {
        /// com, assoc, prop, cf, af, oper, cat, split, category:PATH, table:PATH
        #[arg(long)]
        operad: String,
        #[arg(long, default_value = "1")]
        colours: String,
        /// Largest arity (node count for graph operads) of the signatures.
        #[arg(long, default_value_t = 2)]
        max_nodes: usize,
        /// Port bound on the valences used as colours by graph operads.
        #[arg(long, default_value_t = 1)]
        max_ports: usize,
        /// Largest arity of a composite that is checked.
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Random associativity triples (graph operads only).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the PROP axioms on hom-sets up to a valence size.
    VerifyProp {
        /// w:OPERAD, smc:split, smc:PATH, bicollection:PATH, sym:PATH
        #[arg(long)]
        prop: String,
        #[arg(long, default_value = "1")]
        colours: String,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 2)]
        max_ports: usize,
        #[arg(long, default_value_t = 2000)]
        cap: usize,
    },
    /// Look for an operation fixed by a non-identity automorphism.
    SigmaFree {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value = "1")]
        colours: String,
        #[arg(long, default_value_t = 2)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1)]
        max_ports: usize,
    },
    /// Compare the BV tensor with a poset against the Grothendieck
    /// construction of the constant family.
    Grothendieck {
        #[arg(long, default_value = "com")]
        operad: String,
        #[arg(long, default_value = "x,y")]
        colours: String,
        /// Generating relations, e.g. "O<A,O<B".
        #[arg(long)]
        poset: String,
        #[arg(long, default_value_t = 2)]
        max_arity: usize,
    },
    /// Size of a hom-set of the free PROP on an operad, at `(n;m)`.
    CountFree {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value = "1")]
        colours: String,
        /// Port colour; defaults to the first colour.
        #[arg(long)]
        colour: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Push-out colimits and the fully-faithfulness verdict.
    Pushout {
        /// identity, split, desk or non-full
        #[arg(long, conflicts_with = "problem")]
        instance: Option<String>,
        /// A JSON problem file.
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Valences to test, e.g. "([c],[c])"; repeatable.
        #[arg(long)]
        valence: Vec<String>,
        /// Largest node count.
        #[arg(long, default_value_t = 4)]
        level: usize,
        #[arg(long, default_value_t = 2)]
        max_ports: usize,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Render a graph (plain or marked) as DOT.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        emit_dot: PathBuf,
    },
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Outcome::Pass(v)) => emit(&v, 0),
        Ok(Outcome::Fail(v)) => emit(&v, 1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

// a closed pipe (`coprop ... | head`) is not an error worth a panic
fn emit(v: &Value, code: u8) -> ExitCode {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json")) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        _ => ExitCode::from(code),
    }
}

type Res<T> = std::result::Result<T, Error>;

fn malformed(e: impl std::fmt::Display) -> Error {
    Error::Malformed(e.to_string())
}

fn write_dot(dir: &Path, name: &str, dot: &str) -> Res<PathBuf> {
    fs::create_dir_all(dir).map_err(malformed)?;
    let path = dir.join(format!("{name}.dot"));
    fs::write(&path, dot).map_err(malformed)?;
    Ok(path)
}

fn single(colours: &[String]) -> Option<&str> {
    match colours {
        [c] => Some(c.as_str()),
        _ => None,
    }
}

fn run(cmd: Cmd) -> Res<Outcome> {
    match cmd {
        Cmd::Enumerate { colours, arity, emit_dot } => {
            let names = colour_names(&colours)?;
            let a = parse_arity(&arity, single(&names)).map_err(malformed)?;
            if let Some(c) = a.node_valences.iter().chain([&a.residue]).flat_map(|v| v.colours()).find(|c| !names.contains(c)) {
                return Err(Error::UnknownColour(c.clone()));
            }
            let graphs = enumerate_coa(&a);
            if let Some(dir) = emit_dot {
                for (i, g) in graphs.iter().enumerate() {
                    write_dot(&dir, &format!("graph-{i}"), &g.to_dot())?;
                }
            }
            eprintln!("{} graphs of arity {a}", graphs.len());
            Ok(Outcome::Pass(serde_json::to_value(&graphs).map_err(malformed)?))
        }
        Cmd::Compose { colours, first, second, at, emit_dot } => {
            let names = colour_names(&colours)?;
            let names: Vec<&str> = names.iter().map(|c| c.as_str()).collect();
            let p = prop_operad(&names);
            let (g, h): (CoaGraph, CoaGraph) = (read_json(&first)?, read_json(&second)?);
            let gh = p.graph(&p.compose_at(&p.op(&g)?, at, &p.op(&h)?)?)?;
            if let Some(dir) = emit_dot {
                write_dot(&dir, "composite", &gh.to_dot())?;
            }
            eprintln!("composite has {} nodes and arity {}", gh.node_count(), gh.arity());
            Ok(Outcome::Pass(serde_json::to_value(&gh).map_err(malformed)?))
        }
        Cmd::VerifyOperad { operad, colours, max_nodes, max_ports, max_arity, samples, seed } => {
            let names = colour_names(&colours)?;
            let choice = inputs::operad(&operad, &names)?;
            let sigs = signatures_over(&inputs::signature_colours(&choice, &names, max_ports), max_nodes);
            let report = check_operad_axioms(choice.operad.as_ref(), &AxiomConfig { signatures: sigs.clone(), max_arity })?;
            let mut violations: Vec<Value> =
                report.violations.iter().map(|v| json!({"law": v.law, "witness": v.witness})).collect();
            if samples > 0 {
                if !choice.graph_colours {
                    return Err(Error::Malformed("--samples needs a graph operad".into()));
                }
                let refs: Vec<&str> = names.iter().map(|c| c.as_str()).collect();
                let o = &choice.operad;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..samples {
                    let t = random_prop_triple(&mut rng, &refs, 3, max_ports.max(1));
                    if !o.has_colour(&o.signature(&t.g)?.output) {
                        continue;
                    }
                    let lhs = o.compose_at(&o.compose_at(&t.g, t.i, &t.h)?, t.i - 1 + t.j, &t.k)?;
                    let rhs = o.compose_at(&t.g, t.i, &o.compose_at(&t.h, t.j, &t.k)?)?;
                    if lhs != rhs {
                        violations.push(json!({"law": "sequential associativity", "witness": o.describe(&t.g)}));
                        break;
                    }
                }
            }
            eprintln!("{} checks over {} signatures, {} violations", report.checks, sigs.len(), violations.len());
            let out = json!({"signatures": sigs.len(), "checks": report.checks, "random_triples": samples, "violations": violations});
            Ok(if violations.is_empty() { Outcome::Pass(out) } else { Outcome::Fail(out) })
        }
        Cmd::VerifyProp { prop, colours, level, max_ports, cap } => {
            let names = colour_names(&colours)?;
            let p = inputs::prop(&prop, &names, level)?;
            let cols: Vec<&str> = p.colours().iter().map(|c| c.as_str()).collect();
            let valences = valences_upto(&cols, max_ports, max_ports);
            let report = check_prop_axioms(p.as_ref(), &PropConfig { valences: valences.clone(), max_perm: 3, cap })?;
            eprintln!("{} checks over {} valences, {} violations", report.checks, valences.len(), report.violations.len());
            let out = json!({
                "valences": valences.len(),
                "checks": report.checks,
                "per_law": report.per_law,
                "violations": report.violations.iter().map(|v| json!({"law": v.law, "witness": v.witness})).collect::<Vec<_>>(),
            });
            Ok(if report.passed() { Outcome::Pass(out) } else { Outcome::Fail(out) })
        }
        Cmd::SigmaFree { operad, colours, max_nodes, max_ports } => {
            let names = colour_names(&colours)?;
            let choice = inputs::operad(&operad, &names)?;
            let mut sigs = signatures_over(&inputs::signature_colours(&choice, &names, max_ports), max_nodes);
            // smallest witnesses first: fewer inputs, then fewer edges
            let ports = |s: &Signature| -> usize {
                s.inputs.iter().chain([&s.output]).filter_map(|c| c.as_valence()).map(|v| v.inputs.len() + v.outputs.len()).sum()
            };
            sigs.sort_by_key(|s| (s.arity(), ports(s)));
            let report = coprop::operad::is_sigma_free(choice.operad.as_ref(), &sigs)?;
            let Some(w) = &report.witness else {
                eprintln!("no fixed points on {} signatures", sigs.len());
                return Ok(Outcome::Pass(serde_json::to_value(&report).map_err(malformed)?));
            };
            let confirmed = fixing_permutations(choice.operad.as_ref(), &w.signature, &w.op)?.contains(&w.permutation);
            let graph = if choice.graph_colours { Some(coprop::operad::prop_operad::decode(&w.op)?) } else { None };
            eprintln!("{} is fixed by {:?} at {}", w.operation, w.permutation, w.signature);
            Ok(Outcome::Fail(json!({
                "free": false,
                "signatures_checked": report.signatures_checked,
                "witness": {
                    "signature": w.signature.to_string(),
                    "operation": w.operation,
                    "permutation": w.permutation,
                    "graph": graph,
                    "reconfirmed": confirmed,
                },
            })))
        }
        Cmd::Grothendieck { operad, colours, poset, max_arity } => {
            let names = colour_names(&colours)?;
            let choice = inputs::operad(&operad, &names)?;
            let cat = Arc::new(parse_poset(&poset)?);
            let family = OperadicFamily::constant(cat.clone(), choice.operad.clone());
            let family_report = family.check(max_arity)?;
            let g = grothendieck(family);
            let bv = bv_tensor_poset(choice.operad.clone(), cat)?;
            let sigs = signatures_over(&bv.colours().ok_or_else(|| Error::NotFinite("BV colours".into()))?, max_arity);
            let mut mismatches = Vec::new();
            for s in &sigs {
                let ours = bv.hom(s)?;
                let theirs = g.hom(&BvPoset::swap_signature(s).ok_or_else(|| malformed("not a BV signature"))?)?;
                let mut agree = ours.len() == theirs.len();
                for o in ours.iter() {
                    agree &= theirs.contains(&bv.to_grothendieck(&g, o)?);
                }
                if !agree {
                    mismatches.push(s.to_string());
                }
            }
            eprintln!("{} signatures compared, {} mismatches", sigs.len(), mismatches.len());
            let out = json!({
                "signatures": sigs.len(),
                "family_checks": family_report.checks,
                "family_violations": family_report.violations.iter().map(|v| json!({"law": v.law, "witness": v.witness})).collect::<Vec<_>>(),
                "mismatches": mismatches,
            });
            Ok(if mismatches.is_empty() && family_report.passed() { Outcome::Pass(out) } else { Outcome::Fail(out) })
        }
        Cmd::CountFree { operad, colours, colour, n, m } => {
            let names = colour_names(&colours)?;
            let choice = inputs::operad(&operad, &names)?;
            let cols: Vec<String> = match choice.operad.colours() {
                Some(cs) => cs.iter().filter_map(|c| c.as_name().map(String::from)).collect(),
                None => names.clone(),
            };
            let c = colour.or_else(|| cols.first().cloned()).ok_or_else(|| malformed("no colour"))?;
            let refs: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
            let w = free_prop_on_operad(choice.operad, &refs)?;
            let count = coprop::prop::SetProp::hom(&w, &CValence::mono(&c, n, m))?.len();
            eprintln!("|w_!{operad}({n};{m})| = {count}");
            Ok(Outcome::Pass(json!({"count": count})))
        }
        Cmd::Pushout { instance, problem, valence, level, max_ports, emit_dot } => {
            let (prob, mut valences) = match (instance, problem) {
                (Some(name), None) => (inputs::instance(&name, level, max_ports)?, vec![]),
                (None, Some(path)) => {
                    let file: inputs::ProblemFile = read_json(&path)?;
                    let vs = file.valences.clone();
                    (file.build()?, vs)
                }
                _ => return Err(malformed("give exactly one of --instance and --problem")),
            };
            let c = prob.prop().colours().to_vec();
            for s in &valence {
                valences.push(parse_valence(s, single(&c)).map_err(malformed)?);
            }
            if valences.is_empty() {
                return Err(malformed("no valences to test; pass --valence"));
            }
            let report = verify_fully_faithful(&prob, &valences, 1..=level)?;
            if let Some(dir) = emit_dot {
                for (i, v) in valences.iter().enumerate() {
                    let r = pushout_component(&prob, v, level)?;
                    for (k, &o) in r.representatives.iter().enumerate() {
                        write_dot(&dir, &format!("valence-{i}-class-{k}"), &marked_dot(&r.objects[o]))?;
                    }
                }
            }
            for v in &report.verdicts {
                eprintln!(
                    "{} N={}: |P|={} classes={} injective={} surjective={} stabilized={}",
                    v.valence, v.level, v.p_count, v.classes, v.injective, v.surjective, v.stabilized
                );
            }
            let passed = report.passed();
            let mut out = serde_json::to_value(&report).map_err(malformed)?;
            out["passed"] = json!(passed);
            Ok(if passed { Outcome::Pass(out) } else { Outcome::Fail(out) })
        }
        Cmd::ExportDot { graph, emit_dot } => {
            let text = fs::read_to_string(&graph).map_err(malformed)?;
            let dot = if let Ok(g) = serde_json::from_str::<CoaGraph>(&text) {
                g.to_dot()
            } else if let Ok(o) = serde_json::from_str::<MarkedObject>(&text) {
                marked_dot(&o)
            } else {
                serde_json::from_str::<MarkedCoaGraph>(&text).map_err(malformed)?.to_dot()
            };
            let stem = graph.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
            let path = write_dot(&emit_dot, stem, &dot)?;
            eprintln!("wrote {}", path.display());
            Ok(Outcome::Pass(json!({"written": path})))
        }
    }
}

/// `"O<A,O<B"`: elements in order of appearance, with the listed relations.
fn parse_poset(s: &str) -> Res<FiniteCategory> {
    let mut elements: Vec<String> = Vec::new();
    let mut leq: Vec<(String, String)> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let names: Vec<&str> = part.split('<').map(str::trim).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(malformed(format!("bad relation {part:?}")));
        }
        for n in &names {
            if !elements.iter().any(|e| e == n) {
                elements.push(n.to_string());
            }
        }
        for w in names.windows(2) {
            leq.push((w[0].to_string(), w[1].to_string()));
        }
    }
    let els: Vec<&str> = elements.iter().map(|e| e.as_str()).collect();
    let rel: Vec<(&str, &str)> = leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    FiniteCategory::poset(&els, &rel)
}
