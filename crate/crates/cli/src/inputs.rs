//! Resolving `--operad`, `--prop` and push-out problem files.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use coprop::coa::CValence;
use coprop::operad::{
    af_prop_operad, cat_suboperad, cf_prop_operad, full_suboperad, oper_suboperad, prop_operad, valence_colours, Assoc,
    CategoryOperad, Colour, ColourSet, Com, FiniteCategory, SetOperad, TableOperad, TableSpec,
};
use coprop::prop::{
    free_prop_on_bicollection, free_prop_on_operad, free_prop_on_sym_bicollection, free_symmetric_monoidal, Bicollection,
    Decorated, Elem, SetProp, SymBicollection, WElem,
};
use coprop::pushout::{instances, OpImage, PushoutProblem};
use coprop::{Error, Result};

/// `--colours 2` names two colours `c1, c2` (one colour is `*`);
/// `--colours a,b` names them directly.
pub fn colour_names(spec: &str) -> Result<Vec<String>> {
    let spec = spec.trim();
    if let Ok(k) = spec.parse::<usize>() {
        return Ok(match k {
            0 => vec![],
            1 => vec!["*".into()],
            _ => (1..=k).map(|i| format!("c{i}")).collect(),
        });
    }
    let names: Vec<String> = spec.split(',').map(|s| s.trim().to_string()).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(Error::Malformed(format!("bad colour list {spec:?}")));
    }
    Ok(names)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn split_arg(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    }
}

fn needs_path<'a>(kind: &str, path: Option<&'a str>) -> Result<&'a Path> {
    path.map(Path::new).ok_or_else(|| Error::Malformed(format!("{kind} needs a file: {kind}:PATH")))
}

/// An operad and, when it is one of the graph operads, the fact that its
/// colours are valences.
pub struct OperadChoice {
    pub operad: Arc<dyn SetOperad>,
    pub graph_colours: bool,
}

/// `com`, `assoc`, `prop`, `cf`, `af`, `oper`, `cat`, `split`,
/// `category:PATH` or `table:PATH`.
pub fn operad(spec: &str, colours: &[String]) -> Result<OperadChoice> {
    let names: Vec<&str> = colours.iter().map(|c| c.as_str()).collect();
    let (kind, path) = split_arg(spec);
    let (operad, graph_colours): (Arc<dyn SetOperad>, bool) = match kind {
        "com" => (Arc::new(Com::on(&names)), false),
        "assoc" => match names.as_slice() {
            [c] => (Arc::new(Assoc::new(c)), false),
            _ => return Err(Error::Malformed("assoc takes exactly one colour".into())),
        },
        "prop" => (Arc::new(prop_operad(&names)), true),
        "cf" => (Arc::new(cf_prop_operad(&names)), true),
        "af" => (Arc::new(af_prop_operad(&names)), true),
        "oper" => (Arc::new(oper_suboperad(&names)), true),
        "cat" => (Arc::new(cat_suboperad(&names)), true),
        "split" => (Arc::new(CategoryOperad::new(Arc::new(FiniteCategory::split_idempotent()))), false),
        "category" => {
            let cat: FiniteCategory = read_json(needs_path(kind, path)?)?;
            (Arc::new(CategoryOperad::new(Arc::new(cat))), false)
        }
        "table" => {
            let spec: TableSpec = read_json(needs_path(kind, path)?)?;
            (Arc::new(TableOperad::new(spec)?), false)
        }
        _ => return Err(Error::Malformed(format!("unknown operad {spec:?}"))),
    };
    Ok(OperadChoice { operad, graph_colours })
}

/// Colours to build signatures from: the valences up to `max_ports` for a
/// graph operad, the listed (or the operad's own) colours otherwise.
pub fn signature_colours(choice: &OperadChoice, colours: &[String], max_ports: usize) -> Vec<Colour> {
    if choice.graph_colours {
        let names: Vec<&str> = colours.iter().map(|c| c.as_str()).collect();
        return valence_colours(&names, max_ports, max_ports).into_iter().filter(|c| choice.operad.has_colour(c)).collect();
    }
    choice.operad.colours().unwrap_or_else(|| colours.iter().map(|c| Colour::name(c)).collect())
}

/// `w:OPERAD` (the free PROP on an operad spec as above), `smc:split`,
/// `smc:PATH`, `bicollection:PATH` or `sym:PATH`.
pub fn prop(spec: &str, colours: &[String], level: usize) -> Result<Arc<dyn SetProp>> {
    let (kind, rest) = split_arg(spec);
    Ok(match kind {
        "w" => {
            let choice = operad(rest.unwrap_or("com"), colours)?;
            let cols: Vec<String> = match choice.operad.colours() {
                Some(cs) => cs.iter().filter_map(|c| c.as_name().map(String::from)).collect(),
                None => colours.to_vec(),
            };
            let cols: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
            Arc::new(free_prop_on_operad(choice.operad, &cols)?)
        }
        "smc" => {
            let cat = match rest {
                Some("split") | None => FiniteCategory::split_idempotent(),
                Some(p) => read_json(Path::new(p))?,
            };
            Arc::new(free_symmetric_monoidal(Arc::new(cat)))
        }
        "bicollection" => {
            let b: Bicollection = read_json(needs_path(kind, rest)?)?;
            Arc::new(free_prop_on_bicollection(b, level))
        }
        "sym" => {
            let b: SymBicollection = read_json(needs_path(kind, rest)?)?;
            Arc::new(free_prop_on_sym_bicollection(b, level))
        }
        _ => return Err(Error::Malformed(format!("unknown PROP {spec:?}"))),
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum OperadSource {
    Split,
    Category(FiniteCategory),
    Table(TableSpec),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum PropSource {
    /// `w_!U`.
    FreeOnU,
    Bicollection { generators: Bicollection, level: usize },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum MapSource {
    Identity,
    Collapse,
    /// Operation name to a JSON element of `P`.
    Table(std::collections::BTreeMap<String, serde_json::Value>),
}

/// The JSON form of a push-out problem. `u` defaults to the full suboperad
/// of `v` on `s`.
#[derive(Deserialize)]
pub struct ProblemFile {
    v: OperadSource,
    v_colours: Vec<String>,
    s: Vec<String>,
    #[serde(default)]
    u: Option<OperadSource>,
    p: PropSource,
    f: MapSource,
    #[serde(default = "default_ports")]
    max_ports: usize,
    #[serde(default)]
    pub valences: Vec<CValence>,
}

fn default_ports() -> usize {
    2
}

fn build_operad(src: OperadSource) -> Result<Arc<dyn SetOperad>> {
    Ok(match src {
        OperadSource::Split => Arc::new(CategoryOperad::new(Arc::new(FiniteCategory::split_idempotent()))),
        OperadSource::Category(c) => Arc::new(CategoryOperad::new(Arc::new(c))),
        OperadSource::Table(t) => Arc::new(TableOperad::new(t)?),
    })
}

impl ProblemFile {
    pub fn build(self) -> Result<PushoutProblem> {
        let v = build_operad(self.v)?;
        let u = match self.u {
            Some(src) => build_operad(src)?,
            None => Arc::new(full_suboperad(v.clone(), ColourSet::Finite(self.s.iter().map(|c| Colour::name(c)).collect()))?),
        };
        let s: Vec<&str> = self.s.iter().map(|c| c.as_str()).collect();
        let d: Vec<&str> = self.v_colours.iter().map(|c| c.as_str()).collect();
        let (p, free): (Arc<dyn SetProp>, bool) = match self.p {
            PropSource::FreeOnU => (Arc::new(free_prop_on_operad(u.clone(), &s)?), true),
            PropSource::Bicollection { generators, level } => (Arc::new(free_prop_on_bicollection(generators, level)), false),
        };
        let f = match self.f {
            MapSource::Identity => OpImage::Identity,
            MapSource::Collapse => OpImage::Collapse,
            MapSource::Table(t) => {
                let mut out = std::collections::BTreeMap::new();
                for (name, value) in t {
                    out.insert(name.clone(), element(p.as_ref(), free, value).map_err(|e| Error::Malformed(format!("image of {name}: {e}")))?);
                }
                OpImage::Table(out)
            }
        };
        PushoutProblem::new(v, &d, u, &s, p, f, self.max_ports)
    }
}

/// A JSON element in `P`'s own encoding, normalized by composing with a unit.
fn element(p: &dyn SetProp, free_on_u: bool, value: serde_json::Value) -> Result<Elem> {
    let bad = |e: serde_json::Error| Error::Malformed(e.to_string());
    let raw = if free_on_u {
        serde_json::from_value::<WElem>(value).map_err(bad)?.encode()
    } else {
        serde_json::from_value::<Decorated>(value).map_err(bad)?.encode()
    };
    let v = p.valence(&raw)?;
    p.vcomp(&p.unit(&v.outputs)?, &raw)
}

/// `identity`, `split`, `desk` or `non-full`.
pub fn instance(name: &str, level: usize, max_ports: usize) -> Result<PushoutProblem> {
    match name {
        "identity" => instances::identity(max_ports),
        "split" => instances::split_free(max_ports),
        "desk" => instances::desk(level.max(4), max_ports),
        "non-full" => instances::non_full(max_ports),
        _ => Err(Error::Malformed(format!("unknown instance {name:?}"))),
    }
}
