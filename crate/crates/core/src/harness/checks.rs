//! Dispatch from a [`CheckSpec`] to the library operations.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use super::document::{CheckKind, CheckSpec, Loaded};
use super::report::{CheckReport, Verdict};
use crate::direct::{
    check_surjectivity_preservation, direct_limit, dl_functor, dl_universal_factorization, greatest_element,
    lift_limit_morphism, present_as_fg_limit, DirectSystem, Target,
};
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::inverse::{
    check_injectivity_preservation, check_inverse_surjectivity, dual_limit_iso, hom_inverse_system,
    il_functor, il_universal_factorization, inverse_limit, InverseSystem, LimitDuality, Source,
};
use crate::module::{compose, Element, FiberModule, ModuleMorphism};
use crate::pullback::{
    dl_pullback_iso, il_pullback_compare, mediate, pullback_module, sections_iso, IL_PULLBACK_NOTE,
};
use crate::random;
use crate::system::{LimitPresentation, MorphismViolation, System, SystemMorphism, Variance, Violation};
use crate::tol::{tolerance, with_tolerance};

/// Global settings a check falls back to when it does not override them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: crate::tol::DEFAULT_TOLERANCE,
            seed: 0,
        }
    }
}

/// Random elements drawn per module when a check samples norm identities.
const SAMPLES: usize = 32;

struct Outcome {
    pass: bool,
    summary: String,
    witnesses: BTreeMap<String, Value>,
    provenance: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            witnesses: BTreeMap::new(),
            provenance: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.witnesses.insert(key.to_string(), value);
        self
    }

    fn tagged(mut self, limit: &LimitPresentation) -> Self {
        self.provenance.push(limit.provenance.tag().to_string());
        self
    }
}

pub fn run_check(loaded: &Loaded, spec: &CheckSpec, config: &RunConfig) -> CheckReport {
    let tol = spec.tolerance.unwrap_or(config.tolerance);
    let seed = spec.seed.unwrap_or(config.seed);
    let start = Instant::now();
    let outcome = with_tolerance(tol, || dispatch(loaded, &spec.kind, seed));
    let duration = start.elapsed();
    let (verdict, summary, mut witnesses, provenance) = match outcome {
        Ok(o) => (
            if o.pass { Verdict::Pass } else { Verdict::Fail },
            o.summary,
            o.witnesses,
            o.provenance,
        ),
        Err(e) => {
            let mut w = BTreeMap::new();
            w.insert("error".to_string(), json!(e.to_string()));
            (Verdict::Error, e.to_string(), w, Vec::new())
        }
    };
    if verdict == Verdict::Fail && witnesses.is_empty() {
        witnesses.insert("reason".into(), json!(summary));
    }
    CheckReport {
        id: spec.id.clone(),
        kind: spec.kind.name().to_string(),
        verdict,
        summary,
        provenance,
        witnesses,
        tolerance: tol,
        seed,
        duration,
    }
}

fn get<'a, T>(map: &'a BTreeMap<String, T>, what: &str, id: &str) -> Result<&'a T> {
    map.get(id)
        .ok_or_else(|| Error::InvalidSystem(format!("unknown {what} `{id}`")))
}

fn direct(l: &Loaded, id: &str) -> Result<DirectSystem> {
    DirectSystem::from_system(get(&l.systems, "system", id)?.clone())
}

fn inverse(l: &Loaded, id: &str) -> Result<InverseSystem> {
    InverseSystem::from_system(get(&l.systems, "system", id)?.clone())
}

fn morphisms(l: &Loaded, ids: &[String]) -> Result<Vec<ModuleMorphism>> {
    ids.iter()
        .map(|id| get(&l.morphisms, "morphism", id).cloned())
        .collect()
}

fn violation_json(v: &Violation) -> Value {
    match v {
        Violation::Identity { i, deviation } => {
            json!({ "law": "identity", "indices": [i], "deviation": deviation })
        }
        Violation::Cocycle { i, j, k, deviation } => {
            json!({ "law": "cocycle", "indices": [i, j, k], "deviation": deviation })
        }
        Violation::Admissibility { i, j, atom, norm } => {
            json!({ "law": "admissibility", "indices": [i, j], "atom": atom, "operator_norm": norm })
        }
        Violation::Undecided { i, j, message } => {
            json!({ "law": "admissibility", "indices": [i, j], "undecided": message })
        }
    }
}

fn morphism_violation_json(v: &MorphismViolation) -> Value {
    match v {
        MorphismViolation::Square { i, j, deviation } => {
            json!({ "law": "square", "indices": [i, j], "deviation": deviation })
        }
        MorphismViolation::Admissibility { i, atom, norm } => {
            json!({ "law": "admissibility", "indices": [i], "atom": atom, "operator_norm": norm })
        }
        other => json!({ "law": "tail", "detail": other.to_string() }),
    }
}

fn dims_json(m: &FiberModule) -> Value {
    json!(m.dims())
}

/// Worst deviation of the target law `φ_j ∘ φ_ij = φ_i` (or its inverse mirror).
fn cone_deviation(s: &System, limit: &LimitPresentation) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, j) in s.index().relation() {
        let d = match s.variance() {
            Variance::Direct => compose(&limit.maps[j], s.map(i, j))?.max_deviation(&limit.maps[i]),
            Variance::Inverse => compose(s.map(i, j), &limit.maps[j])?.max_deviation(&limit.maps[i]),
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

fn limit_outcome(s: &System, limit: &LimitPresentation, expect: &Option<Vec<usize>>) -> Result<Outcome> {
    let eps = tolerance();
    let cone = cone_deviation(s, limit)?;
    let dims = limit.module.dims();
    let dims_ok = expect.as_ref().is_none_or(|e| *e == dims);
    let pass = cone <= eps && dims_ok;
    let mut summary = format!("limit dims {dims:?} from stage {}", s.label(limit.top));
    if !dims_ok {
        summary.push_str(&format!(", expected {:?}", expect.as_ref().unwrap()));
    }
    if cone > eps {
        summary.push_str(&format!(", cone law deviation {cone:e}"));
    }
    Ok(Outcome::new(pass, summary)
        .with("dims", json!(dims))
        .with("cone_deviation", json!(cone))
        .with("top", json!(s.label(limit.top)))
        .tagged(limit))
}

fn sampled_norm_deviation(phi: &ModuleMorphism, seed: u64) -> Result<f64> {
    let mut rng = random::rng(seed);
    let mut worst = 0.0f64;
    let mut probe = phi.source().standard_basis();
    probe.extend((0..SAMPLES).map(|_| random::element(&mut rng, phi.source())));
    for v in probe {
        let a = v.pointwise_norm()?;
        let b = phi.apply(&v)?.pointwise_norm()?;
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

fn duality_outcome(d: LimitDuality) -> Outcome {
    let pass = d.is_certified();
    Outcome::new(
        pass,
        format!(
            "inverse limit dims {:?}, Hom out of the direct limit dims {:?}: {}",
            d.limit.module.dims(),
            d.hom_of_limit.module().dims(),
            d.certificate.describe()
        ),
    )
    .with("certificate", json!(d.certificate.describe()))
    .with("limit_dims", dims_json(&d.limit.module))
    .with("hom_dims", dims_json(d.hom_of_limit.module()))
    .tagged(&d.limit)
}

fn dispatch(l: &Loaded, kind: &CheckKind, seed: u64) -> Result<Outcome> {
    let eps = tolerance();
    match kind {
        CheckKind::ValidateSystem { system } => {
            if let Some(s) = l.systems.get(system) {
                let r = s.validate();
                let summary = match r.violations.first() {
                    None => "valid".to_string(),
                    Some(v) => format!("{} violation(s); first: {v}", r.violations.len()),
                };
                let mut o = Outcome::new(r.is_valid(), summary);
                if !r.is_valid() {
                    o = o.with(
                        "violations",
                        Value::Array(r.violations.iter().map(violation_json).collect()),
                    );
                }
                Ok(o)
            } else {
                let t = get(&l.system_morphisms, "system or system morphism", system)?;
                let r = t.validate();
                let summary = match r.violations.first() {
                    None => "valid".to_string(),
                    Some(v) => format!("{} violation(s); first: {v}", r.violations.len()),
                };
                let mut o = Outcome::new(r.is_valid(), summary);
                if !r.is_valid() {
                    o = o.with(
                        "violations",
                        Value::Array(r.violations.iter().map(morphism_violation_json).collect()),
                    );
                }
                Ok(o)
            }
        }
        CheckKind::DirectLimit { system, expect_dims } => {
            let d = direct(l, system)?;
            let lim = direct_limit(&d)?;
            limit_outcome(&d, &lim, expect_dims)
        }
        CheckKind::InverseLimit { system, expect_dims } => {
            let s = inverse(l, system)?;
            let lim = inverse_limit(&s)?;
            limit_outcome(&s, &lim, expect_dims)
        }
        CheckKind::UniversalDirect {
            system,
            target,
            maps,
            expect,
        } => {
            let d = direct(l, system)?;
            let t = Target {
                module: get(&l.modules, "module", target)?.clone(),
                maps: morphisms(l, maps)?,
            };
            let f = dl_universal_factorization(&d, &t)?;
            factorization_outcome(l, f.morphism, f.deviation, f.unique, expect)
        }
        CheckKind::UniversalInverse {
            system,
            source,
            maps,
            expect,
        } => {
            let s = inverse(l, system)?;
            let src = Source {
                module: get(&l.modules, "module", source)?.clone(),
                maps: morphisms(l, maps)?,
            };
            let f = il_universal_factorization(&s, &src)?;
            factorization_outcome(l, f.morphism, f.deviation, f.unique, expect)
        }
        CheckKind::FunctorSquare {
            system_morphisms,
            expect_image,
            lift,
        } => functor_square(l, system_morphisms, expect_image, lift.as_ref()),
        CheckKind::PullbackCommute { map, system } => {
            let f = get(&l.atom_maps, "atom map", map)?;
            let d = direct(l, system)?;
            let r = dl_pullback_iso(f, &d)?;
            let norm_dev = sampled_norm_deviation(&r.comparison, seed)?;
            let pass = r.certificate.is_certified() && norm_dev <= eps;
            Ok(Outcome::new(
                pass,
                format!(
                    "limit of pullbacks dims {:?} vs pullback of limit dims {:?}: {}; norm deviation {norm_dev:e}",
                    r.limit_of_pullbacks.dims(),
                    r.pullback_of_limit.module.dims(),
                    r.certificate.describe()
                ),
            )
            .with("certificate", json!(r.certificate.describe()))
            .with("norm_deviation", json!(norm_dev))
            .with("left_dims", json!(r.limit_of_pullbacks.dims()))
            .with("right_dims", dims_json(&r.pullback_of_limit.module))
            .tagged(&r.limit_of_pullbacks))
        }
        CheckKind::PullbackMediate {
            map,
            module,
            alternative,
            matrices,
            expect_iso,
        } => {
            let f = get(&l.atom_maps, "atom map", map)?;
            let m = get(&l.modules, "module", module)?;
            let alt = get(&l.modules, "module", alternative)?;
            let pres = pullback_module(f, m)?;
            let mats = l.matrices(matrices, &pres.module, "matrices")?;
            let med = mediate(&pres, alt, mats)?;
            let iso = med.certificate.is_certified();
            Ok(Outcome::new(
                iso == *expect_iso,
                format!("mediating morphism: {}", med.certificate.describe()),
            )
            .with("certificate", json!(med.certificate.describe()))
            .with("isomorphism", json!(iso)))
        }
        CheckKind::SectionsIso { space, module } => {
            let z = get(&l.spaces, "space", space)?;
            let m = get(&l.modules, "module", module)?;
            let s = sections_iso(z, m)?;
            let mut rng = random::rng(seed);
            let mut probe = m.standard_basis();
            probe.extend((0..SAMPLES).map(|_| random::element(&mut rng, m)));
            let mut exact = true;
            for v in &probe {
                let lhs = s.constant_section(v)?.pointwise_norm()?;
                let rhs = v.pointwise_norm()?.compose(&s.projection)?;
                exact &= lhs.values() == rhs.values();
            }
            let pass = s.certificate.is_certified() && exact;
            Ok(Outcome::new(
                pass,
                format!(
                    "sections dims {:?}: {}; |T(v)| = |v|∘π {}",
                    s.sections.dims(),
                    s.certificate.describe(),
                    if exact { "exactly" } else { "violated" }
                ),
            )
            .with("certificate", json!(s.certificate.describe()))
            .with("norm_identity_exact", json!(exact))
            .with("sections_dims", dims_json(&s.sections))
            .with("pullback_dims", dims_json(&s.pullback.module)))
        }
        CheckKind::DualIso { system } => Ok(duality_outcome(dual_limit_iso(&direct(l, system)?)?)),
        CheckKind::HomIso { system, module } => {
            let n = get(&l.modules, "module", module)?;
            Ok(duality_outcome(hom_inverse_system(&direct(l, system)?, n)?))
        }
        CheckKind::GreatestElement { index, expect } => {
            let ix = get(&l.index_sets, "index set", index)?;
            let IndexSet::Poset(p) = ix else {
                return Err(Error::InvalidIndex(format!(
                    "`{index}` is a chain; greatest-element needs a finite poset"
                )));
            };
            let top = greatest_element(p);
            let label = p.labels()[top].clone();
            let dominated = (0..p.len()).all(|i| p.leq(i, top));
            let expected = expect.as_ref().is_none_or(|e| *e == label);
            Ok(
                Outcome::new(dominated && expected, format!("greatest element `{label}`"))
                    .with("top", json!(label)),
            )
        }
        CheckKind::SurjectivityPreserved {
            system_morphism,
            expect_preserved,
        } => {
            let t = get(&l.system_morphisms, "system morphism", system_morphism)?;
            let r = match t.source().variance() {
                Variance::Direct => check_surjectivity_preservation(t)?,
                Variance::Inverse => check_inverse_surjectivity(t)?,
            };
            Ok(preservation_outcome("surjectivity", &r, *expect_preserved))
        }
        CheckKind::InjectivityPreserved {
            system_morphism,
            expect_preserved,
        } => {
            let t = get(&l.system_morphisms, "system morphism", system_morphism)?;
            if t.source().variance() != Variance::Inverse {
                return Err(Error::InvalidSystem(
                    "injectivity-preserved expects a morphism of inverse systems".into(),
                ));
            }
            let r = check_injectivity_preservation(t)?;
            Ok(preservation_outcome("injectivity", &r, *expect_preserved))
        }
        CheckKind::IlPullbackCompare { map, system } => {
            let f = get(&l.atom_maps, "atom map", map)?;
            let s = inverse(l, system)?;
            let r = il_pullback_compare(f, &s)?;
            let iso = r.certificate.is_certified();
            Ok(Outcome::new(
                iso,
                if iso {
                    "comparison is an isometric isomorphism; no counterexample found".to_string()
                } else {
                    format!("comparison is not an isomorphism: {}", r.certificate.describe())
                },
            )
            .with("certificate", json!(r.certificate.describe()))
            .with("note", json!(IL_PULLBACK_NOTE))
            .with("left_dims", json!(r.limit_of_pullbacks.dims()))
            .with("right_dims", dims_json(&r.pullback_of_limit.module))
            .tagged(&r.limit_of_pullbacks))
        }
        CheckKind::FgPresentation { module, generators } => {
            let m = get(&l.modules, "module", module)?;
            let gens: Vec<Element> = generators
                .iter()
                .map(|id| get(&l.elements, "element", id).cloned())
                .collect::<Result<_>>()?;
            let p = present_as_fg_limit(m, &gens)?;
            let stage_dims: Vec<Vec<usize>> = p.system.modules().iter().map(|m| m.dims()).collect();
            Ok(Outcome::new(
                p.certified,
                format!(
                    "{} stages, limit certified {}",
                    stage_dims.len(),
                    if p.certified {
                        "isomorphic"
                    } else {
                        "NOT isomorphic"
                    }
                ),
            )
            .with("stage_dims", json!(stage_dims))
            .with("certified", json!(p.certified))
            .tagged(&p.limit))
        }
    }
}

fn factorization_outcome(
    l: &Loaded,
    phi: ModuleMorphism,
    deviation: f64,
    unique: bool,
    expect: &Option<String>,
) -> Result<Outcome> {
    let eps = tolerance();
    let mut o = Outcome::new(true, String::new())
        .with("deviation", json!(deviation))
        .with("unique", json!(unique));
    let mut pass = deviation <= eps && unique;
    let mut summary = format!(
        "factorization deviation {deviation:e}, {}",
        if unique { "unique" } else { "not unique" }
    );
    if let Some(id) = expect {
        let e = get(&l.morphisms, "morphism", id)?;
        let d = phi.max_deviation(e);
        pass &= d <= eps;
        summary.push_str(&format!(", distance to `{id}` {d:e}"));
        o = o.with("expect_deviation", json!(d));
    }
    o.pass = pass;
    o.summary = summary;
    Ok(o)
}

fn preservation_outcome(
    property: &str,
    r: &crate::direct::PreservationReport,
    expect_preserved: bool,
) -> Outcome {
    let preserved = r.preserved();
    Outcome::new(
        preserved == expect_preserved,
        format!(
            "{property}: every component {}, limit morphism {} => {}",
            if r.hypothesis { "yes" } else { "no" },
            if r.conclusion { "yes" } else { "no" },
            if preserved { "preserved" } else { "NOT preserved" }
        ),
    )
    .with("hypothesis", json!(r.hypothesis))
    .with("conclusion", json!(r.conclusion))
    .with("preserved", json!(preserved))
    .with("hypothesis_failures", json!(r.hypothesis_failures))
    .with("conclusion_failures", json!(r.conclusion_failures))
}

fn functor_square(
    l: &Loaded,
    ids: &[String],
    expect_image: &Option<String>,
    lift: Option<&super::document::LiftArgs>,
) -> Result<Outcome> {
    let eps = tolerance();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut o = Outcome::new(true, String::new());
    let mut images: Vec<ModuleMorphism> = Vec::new();
    let mut worst_square = 0.0f64;
    let thetas: Vec<&SystemMorphism> = ids
        .iter()
        .map(|id| get(&l.system_morphisms, "system morphism", id))
        .collect::<Result<_>>()?;
    for t in &thetas {
        let (s, u) = (t.source(), t.target());
        let image = match s.variance() {
            Variance::Direct => {
                let image = dl_functor(t)?;
                let ls = direct_limit(&DirectSystem::from_system(s.clone())?)?;
                let lt = direct_limit(&DirectSystem::from_system(u.clone())?)?;
                for i in 0..s.len() {
                    let lhs = compose(&image, &ls.maps[i])?;
                    let rhs = compose(&lt.maps[i], t.component(i))?;
                    worst_square = worst_square.max(lhs.max_deviation(&rhs));
                }
                image
            }
            Variance::Inverse => {
                let image = il_functor(t)?;
                let ls = inverse_limit(&InverseSystem::from_system(s.clone())?)?;
                let lt = inverse_limit(&InverseSystem::from_system(u.clone())?)?;
                for i in 0..s.len() {
                    let lhs = compose(&lt.maps[i], &image)?;
                    let rhs = compose(t.component(i), &ls.maps[i])?;
                    worst_square = worst_square.max(lhs.max_deviation(&rhs));
                }
                image
            }
        };
        images.push(image);
    }
    if !thetas.is_empty() {
        pass &= worst_square <= eps;
        parts.push(format!("squares commute within {worst_square:e}"));
        o = o.with("square_deviation", json!(worst_square));
    }
    if thetas.len() >= 2 {
        let component_gap = thetas[1..]
            .iter()
            .flat_map(|t| {
                t.components()
                    .iter()
                    .zip(thetas[0].components())
                    .map(|(a, b)| a.max_deviation(b))
            })
            .fold(0.0f64, f64::max);
        let image_gap = images[1..]
            .iter()
            .map(|m| m.max_deviation(&images[0]))
            .fold(0.0f64, f64::max);
        parts.push(if component_gap > eps {
            "components differ".to_string()
        } else {
            "components equal".to_string()
        });
        parts.push(if image_gap <= eps {
            "images equal".to_string()
        } else {
            format!("images differ by {image_gap:e}")
        });
        o = o
            .with("component_gap", json!(component_gap))
            .with("image_gap", json!(image_gap));
    }
    if let Some(id) = expect_image {
        let e = get(&l.morphisms, "morphism", id)?;
        let d = images.iter().map(|m| m.max_deviation(e)).fold(0.0f64, f64::max);
        pass &= d <= eps;
        parts.push(format!("distance to `{id}` {d:e}"));
        o = o.with("expect_deviation", json!(d));
    }
    if let Some(args) = lift {
        let s = direct(l, &args.source)?;
        let t = direct(l, &args.target)?;
        let phi = get(&l.morphisms, "morphism", &args.morphism)?;
        let r = lift_limit_morphism(&s, &t, phi)?;
        let liftable = r.liftable_stagewise();
        pass &= liftable == args.expect_liftable;
        parts.push(match r.obstructions.first() {
            None => format!("`{}` lifts stage by stage", args.morphism),
            Some((i, a, res)) => format!(
                "`{}` has no preimage: stage {i} unsolvable at atom {a} (residual {res:e})",
                args.morphism
            ),
        });
        o = o.with("liftable", json!(liftable)).with(
            "obstructions",
            Value::Array(
                r.obstructions
                    .iter()
                    .map(|(i, a, res)| json!({ "stage": i, "atom": a, "residual": res }))
                    .collect(),
            ),
        );
    }
    o.pass = pass;
    o.summary = parts.join("; ");
    Ok(o)
}

/// Runs `checks` in document order and returns one report per check.
pub fn run_checks<'a>(
    loaded: &Loaded,
    checks: impl IntoIterator<Item = &'a CheckSpec>,
    config: &RunConfig,
) -> Vec<CheckReport> {
    checks.into_iter().map(|c| run_check(loaded, c, config)).collect()
}
