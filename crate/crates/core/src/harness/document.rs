//! The JSON document format and its loader.
//!
//! Every object lives in a named section and is referred to by string id.
//! Numbers are JSON numbers or exact rationals written as `"p/q"`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{FinitePoset, IndexSet, TailSpec};
use crate::linalg::{Matrix, Vector};
use crate::measure::{AtomMap, AtomicMeasureSpace, L0Function};
use crate::module::{Element, FiberModule, ModuleMorphism};
use crate::norm::{Fiber, NormSpec, PExponent};
use crate::system::{System, SystemMorphism, Variance};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Exact(String),
}

impl Num {
    pub fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Exact(s) => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("`{s}` is neither a number nor p/q"))
                };
                match s.split_once('/') {
                    None => parse(s),
                    Some((p, q)) => {
                        let q = parse(q)?;
                        if q == 0.0 {
                            return Err(format!("`{s}` has a zero denominator"));
                        }
                        Ok(parse(p)? / q)
                    }
                }
            }
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Float(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PDoc {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl From<PDoc> for PExponent {
    fn from(p: PDoc) -> Self {
        match p {
            PDoc::One => PExponent::One,
            PDoc::Two => PExponent::Two,
            PDoc::Inf => PExponent::Inf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub id: String,
    pub atoms: Vec<String>,
    pub weights: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormKind {
    Zero,
    Euclidean {
        dim: usize,
    },
    Weighted {
        p: PDoc,
        weights: Vec<Num>,
    },
    Framed {
        p: PDoc,
        frame: Vec<Vec<Num>>,
    },
    /// The dual of another norm, by id.
    Dual {
        of: String,
    },
    /// Operator norm between two other norms, by id.
    Operator {
        source: String,
        target: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormDoc {
    pub id: String,
    #[serde(flatten)]
    pub kind: NormKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub id: String,
    pub space: String,
    /// One norm id per atom.
    pub fibers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub id: String,
    pub module: String,
    pub coords: Vec<Vec<Num>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    /// Per atom, the matrix as a list of rows.
    pub matrices: Vec<Vec<Vec<Num>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailDoc {
    Identity,
    Harmonic,
    Scalar { space: String, values: Vec<Num> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IndexKind {
    Poset {
        labels: Vec<String>,
        /// Pairs `[a, b]` meaning `a ≤ b`; the closure is taken.
        #[serde(default)]
        relations: Vec<(String, String)>,
    },
    Chain {
        last: usize,
        tail: TailDoc,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDoc {
    pub id: String,
    #[serde(flatten)]
    pub kind: IndexKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceDoc {
    Direct,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRef {
    pub lower: String,
    pub upper: String,
    pub morphism: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub id: String,
    pub variance: VarianceDoc,
    pub index: String,
    /// Module id per index, in the order of the index labels.
    pub modules: Vec<String>,
    #[serde(default)]
    pub maps: Vec<MapRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemMorphismDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomMapDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    pub table: BTreeMap<String, String>,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftArgs {
    pub source: String,
    pub target: String,
    /// A morphism between the two limits.
    pub morphism: String,
    pub expect_liftable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckKind {
    ValidateSystem {
        system: String,
    },
    DirectLimit {
        system: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_dims: Option<Vec<usize>>,
    },
    InverseLimit {
        system: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_dims: Option<Vec<usize>>,
    },
    UniversalDirect {
        system: String,
        target: String,
        maps: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    UniversalInverse {
        system: String,
        source: String,
        maps: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    FunctorSquare {
        #[serde(default)]
        system_morphisms: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_image: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lift: Option<LiftArgs>,
    },
    PullbackCommute {
        map: String,
        system: String,
    },
    PullbackMediate {
        map: String,
        module: String,
        alternative: String,
        matrices: Vec<Vec<Vec<Num>>>,
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        expect_iso: bool,
    },
    SectionsIso {
        space: String,
        module: String,
    },
    DualIso {
        system: String,
    },
    HomIso {
        system: String,
        module: String,
    },
    GreatestElement {
        index: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    SurjectivityPreserved {
        system_morphism: String,
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        expect_preserved: bool,
    },
    InjectivityPreserved {
        system_morphism: String,
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        expect_preserved: bool,
    },
    IlPullbackCompare {
        map: String,
        system: String,
    },
    FgPresentation {
        module: String,
        generators: Vec<String>,
    },
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::ValidateSystem { .. } => "validate-system",
            CheckKind::DirectLimit { .. } => "direct-limit",
            CheckKind::InverseLimit { .. } => "inverse-limit",
            CheckKind::UniversalDirect { .. } => "universal-direct",
            CheckKind::UniversalInverse { .. } => "universal-inverse",
            CheckKind::FunctorSquare { .. } => "functor-square",
            CheckKind::PullbackCommute { .. } => "pullback-commute",
            CheckKind::PullbackMediate { .. } => "pullback-mediate",
            CheckKind::SectionsIso { .. } => "sections-iso",
            CheckKind::DualIso { .. } => "dual-iso",
            CheckKind::HomIso { .. } => "hom-iso",
            CheckKind::GreatestElement { .. } => "greatest-element",
            CheckKind::SurjectivityPreserved { .. } => "surjectivity-preserved",
            CheckKind::InjectivityPreserved { .. } => "injectivity-preserved",
            CheckKind::IlPullbackCompare { .. } => "il-pullback-compare",
            CheckKind::FgPresentation { .. } => "fg-presentation",
        }
    }
}

pub const CHECK_KINDS: &[&str] = &[
    "validate-system",
    "direct-limit",
    "inverse-limit",
    "universal-direct",
    "universal-inverse",
    "functor-square",
    "pullback-commute",
    "pullback-mediate",
    "sections-iso",
    "dual-iso",
    "hom-iso",
    "greatest-element",
    "surjectivity-preserved",
    "injectivity-preserved",
    "il-pullback-compare",
    "fg-presentation",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spaces: Vec<SpaceDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<NormDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modules: Vec<ModuleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<ElementDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<MorphismDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub index_sets: Vec<IndexDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<SystemDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub system_morphisms: Vec<SystemMorphismDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atom_maps: Vec<AtomMapDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckSpec>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| Error::Document {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document {
                path: "format_version".into(),
                message: format!(
                    "unsupported format version {} (expected {FORMAT_VERSION})",
                    doc.format_version
                ),
            });
        }
        Ok(doc)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Document {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// A document with every object constructed and every invariant checked.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub document: Document,
    pub spaces: BTreeMap<String, Arc<AtomicMeasureSpace>>,
    pub norms: BTreeMap<String, Fiber>,
    pub modules: BTreeMap<String, Arc<FiberModule>>,
    pub elements: BTreeMap<String, Element>,
    pub morphisms: BTreeMap<String, ModuleMorphism>,
    pub index_sets: BTreeMap<String, IndexSet>,
    pub systems: BTreeMap<String, System>,
    pub system_morphisms: BTreeMap<String, SystemMorphism>,
    pub atom_maps: BTreeMap<String, AtomMap>,
}

fn at(path: String) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Document { .. } => e,
        other => Error::Document {
            path: path.clone(),
            message: other.to_string(),
        },
    }
}

fn doc_err(path: String, message: impl Into<String>) -> Error {
    Error::Document {
        path,
        message: message.into(),
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, id: &str, path: &str) -> Result<&'a T> {
    map.get(id)
        .ok_or_else(|| doc_err(path.to_string(), format!("unknown {what} `{id}`")))
}

fn nums(xs: &[Num], path: &str) -> Result<Vec<f64>> {
    xs.iter()
        .enumerate()
        .map(|(k, x)| x.value().map_err(|m| doc_err(format!("{path}[{k}]"), m)))
        .collect()
}

/// Rows of numbers into a `rows × cols` matrix; an empty row list is a `0 × cols` matrix.
pub(crate) fn matrix(rows: &[Vec<Num>], cols: usize, path: &str) -> Result<Matrix> {
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (r, row) in rows.iter().enumerate() {
        let p = format!("{path}[{r}]");
        if row.len() != cols {
            return Err(doc_err(
                p,
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
        data.extend(nums(row, &p)?);
    }
    Ok(Matrix::from_row_slice(rows.len(), cols, &data))
}

impl Loaded {
    pub fn from_document(document: Document) -> Result<Self> {
        let mut l = Loaded {
            document: document.clone(),
            spaces: BTreeMap::new(),
            norms: BTreeMap::new(),
            modules: BTreeMap::new(),
            elements: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            index_sets: BTreeMap::new(),
            systems: BTreeMap::new(),
            system_morphisms: BTreeMap::new(),
            atom_maps: BTreeMap::new(),
        };
        fn insert<T>(map: &mut BTreeMap<String, T>, id: &str, v: T, path: String) -> Result<()> {
            if map.insert(id.to_string(), v).is_some() {
                return Err(doc_err(path, format!("duplicate id `{id}`")));
            }
            Ok(())
        }
        for (k, s) in document.spaces.iter().enumerate() {
            let p = format!("spaces[{k}]");
            let w = nums(&s.weights, &format!("{p}.weights"))?;
            let space = AtomicMeasureSpace::new(s.atoms.clone(), w).map_err(at(p.clone()))?;
            insert(&mut l.spaces, &s.id, space, p)?;
        }
        for (k, n) in document.norms.iter().enumerate() {
            let p = format!("norms[{k}]");
            let fiber = l.norm(&n.kind, &p)?;
            insert(&mut l.norms, &n.id, fiber, p)?;
        }
        for (k, m) in document.modules.iter().enumerate() {
            let p = format!("modules[{k}]");
            let space = lookup(&l.spaces, "space", &m.space, &format!("{p}.space"))?.clone();
            let fibers = m
                .fibers
                .iter()
                .enumerate()
                .map(|(a, id)| lookup(&l.norms, "norm", id, &format!("{p}.fibers[{a}]")).cloned())
                .collect::<Result<Vec<_>>>()?;
            let module = FiberModule::new(space, fibers).map_err(at(p.clone()))?;
            insert(&mut l.modules, &m.id, module, p)?;
        }
        for (k, e) in document.elements.iter().enumerate() {
            let p = format!("elements[{k}]");
            let module = lookup(&l.modules, "module", &e.module, &format!("{p}.module"))?.clone();
            let coords = e
                .coords
                .iter()
                .enumerate()
                .map(|(a, c)| Ok(Vector::from_vec(nums(c, &format!("{p}.coords[{a}]"))?)))
                .collect::<Result<Vec<_>>>()?;
            let v = Element::new(module, coords).map_err(at(p.clone()))?;
            insert(&mut l.elements, &e.id, v, p)?;
        }
        for (k, m) in document.morphisms.iter().enumerate() {
            let p = format!("morphisms[{k}]");
            let src = lookup(&l.modules, "module", &m.source, &format!("{p}.source"))?.clone();
            let tgt = lookup(&l.modules, "module", &m.target, &format!("{p}.target"))?.clone();
            let maps = l.matrices(&m.matrices, &src, &format!("{p}.matrices"))?;
            let phi = ModuleMorphism::new(src, tgt, maps).map_err(at(p.clone()))?;
            insert(&mut l.morphisms, &m.id, phi, p)?;
        }
        for (k, ix) in document.index_sets.iter().enumerate() {
            let p = format!("index_sets[{k}]");
            let index = match &ix.kind {
                IndexKind::Poset { labels, relations } => {
                    IndexSet::Poset(FinitePoset::new(labels.clone(), relations).map_err(at(p.clone()))?)
                }
                IndexKind::Chain { last, tail } => IndexSet::chain(*last, l.tail(tail, &p)?),
            };
            insert(&mut l.index_sets, &ix.id, index, p)?;
        }
        for (k, s) in document.systems.iter().enumerate() {
            let p = format!("systems[{k}]");
            let index = lookup(&l.index_sets, "index set", &s.index, &format!("{p}.index"))?.clone();
            let modules = s
                .modules
                .iter()
                .enumerate()
                .map(|(i, id)| lookup(&l.modules, "module", id, &format!("{p}.modules[{i}]")).cloned())
                .collect::<Result<Vec<_>>>()?;
            let mut maps = Vec::with_capacity(s.maps.len());
            for (i, m) in s.maps.iter().enumerate() {
                let mp = format!("{p}.maps[{i}]");
                let pos = |label: &str| {
                    index
                        .position(label)
                        .ok_or_else(|| doc_err(mp.clone(), format!("unknown index `{label}`")))
                };
                let phi = lookup(&l.morphisms, "morphism", &m.morphism, &format!("{mp}.morphism"))?;
                maps.push(((pos(&m.lower)?, pos(&m.upper)?), phi.clone()));
            }
            let variance = match s.variance {
                VarianceDoc::Direct => Variance::Direct,
                VarianceDoc::Inverse => Variance::Inverse,
            };
            let sys = System::new(variance, index, modules, maps).map_err(at(p.clone()))?;
            insert(&mut l.systems, &s.id, sys, p)?;
        }
        for (k, t) in document.system_morphisms.iter().enumerate() {
            let p = format!("system_morphisms[{k}]");
            let src = lookup(&l.systems, "system", &t.source, &format!("{p}.source"))?;
            let tgt = lookup(&l.systems, "system", &t.target, &format!("{p}.target"))?;
            let comps = t
                .components
                .iter()
                .enumerate()
                .map(|(i, id)| lookup(&l.morphisms, "morphism", id, &format!("{p}.components[{i}]")).cloned())
                .collect::<Result<Vec<_>>>()?;
            let theta = SystemMorphism::new(src, tgt, comps).map_err(at(p.clone()))?;
            insert(&mut l.system_morphisms, &t.id, theta, p)?;
        }
        for (k, f) in document.atom_maps.iter().enumerate() {
            let p = format!("atom_maps[{k}]");
            let src = lookup(&l.spaces, "space", &f.source, &format!("{p}.source"))?.clone();
            let tgt = lookup(&l.spaces, "space", &f.target, &format!("{p}.target"))?.clone();
            let pairs: Vec<(&str, &str)> = f.table.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let map = AtomMap::from_pairs(src, tgt, &pairs).map_err(at(p.clone()))?;
            insert(&mut l.atom_maps, &f.id, map, p)?;
        }
        let mut ids = BTreeMap::new();
        for (k, c) in document.checks.iter().enumerate() {
            if ids.insert(c.id.clone(), k).is_some() {
                return Err(doc_err(
                    format!("checks[{k}]"),
                    format!("duplicate id `{}`", c.id),
                ));
            }
        }
        Ok(l)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_document(Document::read(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(Document::parse(text)?)
    }

    fn norm(&self, kind: &NormKind, p: &str) -> Result<Fiber> {
        let spec = match kind {
            NormKind::Zero => return Ok(Fiber::zero()),
            NormKind::Euclidean { dim } => NormSpec::euclidean(*dim),
            NormKind::Weighted { p: e, weights } => {
                NormSpec::weighted((*e).into(), nums(weights, &format!("{p}.weights"))?)
                    .map_err(at(p.to_string()))?
            }
            NormKind::Framed { p: e, frame } => {
                let cols = frame.first().map_or(0, Vec::len);
                let f = matrix(frame, cols, &format!("{p}.frame"))?;
                NormSpec::framed((*e).into(), f).map_err(at(p.to_string()))?
            }
            NormKind::Dual { of } => {
                let inner = lookup(&self.norms, "norm", of, &format!("{p}.of"))?;
                return Ok(inner.dual());
            }
            NormKind::Operator { source, target } => {
                let s = lookup(&self.norms, "norm", source, &format!("{p}.source"))?;
                let t = lookup(&self.norms, "norm", target, &format!("{p}.target"))?;
                NormSpec::operator(s.clone(), t.clone())
            }
        };
        Fiber::from_norm(spec).map_err(at(p.to_string()))
    }

    fn tail(&self, tail: &TailDoc, p: &str) -> Result<TailSpec> {
        Ok(match tail {
            TailDoc::Identity => TailSpec::Identity,
            TailDoc::Harmonic => TailSpec::Harmonic,
            TailDoc::Scalar { space, values } => {
                let sp = lookup(&self.spaces, "space", space, &format!("{p}.tail.space"))?;
                let v = nums(values, &format!("{p}.tail.values"))?;
                let f = L0Function::new(sp.clone(), v).map_err(at(format!("{p}.tail")))?;
                let t = TailSpec::Scalar(f);
                t.validate(sp).map_err(at(format!("{p}.tail")))?;
                t
            }
        })
    }

    /// Per-atom matrices whose column counts follow `source`'s fiber dimensions.
    pub(crate) fn matrices(
        &self,
        raw: &[Vec<Vec<Num>>],
        source: &FiberModule,
        p: &str,
    ) -> Result<Vec<Matrix>> {
        if raw.len() != source.space().len() {
            return Err(doc_err(
                p.to_string(),
                format!("{} matrices for {} atoms", raw.len(), source.space().len()),
            ));
        }
        raw.iter()
            .enumerate()
            .map(|(a, rows)| matrix(rows, source.fiber(a).dim(), &format!("{p}[{a}]")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "format_version": 1,
  "spaces": [{ "id": "X", "atoms": ["x"], "weights": [1] }],
  "norms": [{ "id": "plane", "kind": "euclidean", "dim": 2 }],
  "modules": [{ "id": "M", "space": "X", "fibers": ["plane"] }]
}"#;

    #[test]
    fn minimal_document_loads() {
        let l = Loaded::parse(MINIMAL).unwrap();
        assert_eq!(l.modules["M"].dims(), vec![2]);
        assert!(l.systems.is_empty());
    }

    #[test]
    fn negative_weight_names_the_atom() {
        let text = MINIMAL.replace(r#""weights": [1]"#, r#""weights": [-1]"#);
        let err = Loaded::parse(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spaces[0]") && msg.contains("`x`"), "{msg}");
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(Num::Exact("1/4".into()).value().unwrap(), 0.25);
        assert_eq!(Num::Exact("3".into()).value().unwrap(), 3.0);
        assert!(Num::Exact("1/0".into()).value().is_err());
        assert!(Num::Exact("x".into()).value().is_err());
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let text = MINIMAL.replace(r#""dim": 2"#, r#""dim": "two""#);
        let err = Document::parse(&text).unwrap_err().to_string();
        assert!(err.contains("norms"), "{err}");
    }
}
