//! Inverse systems and their limits, and the dualities with direct limits.
//!
//! The inverse limit consists of threads `(v_i)` with `v_i = P_ij v_j` whose
//! pointwise norm `ess sup_i |v_i|` is finite. Over a finite directed poset
//! it is the module at the greatest element. Over a chain a thread is fixed
//! by its last explicit component, and it stays bounded along the tail only
//! where the tail factors multiply to 1.

use std::ops::Deref;
use std::sync::Arc;

use crate::direct::{direct_limit, DirectSystem, Factorization, PreservationReport};
use crate::error::{Error, Result};
use crate::hom::{adjoint, dual_module, hom_module, precompose, HomModule};
use crate::index::{IndexSet, TailSpec};
use crate::linalg::{self, Matrix};
use crate::measure::{ess_extremum_extended, AtomicMeasureSpace, Extremum, Family, L0Function, TailRule};
use crate::module::{
    certify_isometric_iso, check_same_module, compose, Element, FiberModule, IsoCertificate, ModuleMorphism,
};
use crate::system::{
    mask_morphism, LimitPresentation, Provenance, System, SystemMorphism, ValidationReport, Variance,
};
use crate::tol::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSystem(System);

impl InverseSystem {
    /// Connecting maps `P_ij : M_j → M_i` keyed by `(i, j)`.
    pub fn new(
        index: IndexSet,
        modules: Vec<Arc<FiberModule>>,
        maps: Vec<((usize, usize), ModuleMorphism)>,
    ) -> Result<Self> {
        System::new(Variance::Inverse, index, modules, maps).map(Self)
    }

    pub fn from_system(system: System) -> Result<Self> {
        if system.variance() != Variance::Inverse {
            return Err(Error::InvalidSystem("expected an inverse system".into()));
        }
        Ok(Self(system))
    }

    pub fn system(&self) -> &System {
        &self.0
    }
}

impl Deref for InverseSystem {
    type Target = System;
    fn deref(&self) -> &System {
        &self.0
    }
}

pub fn validate_inverse_system(s: &InverseSystem) -> ValidationReport {
    s.validate()
}

/// One component per explicit index.
#[derive(Debug, Clone, PartialEq)]
pub struct Thread {
    pub components: Vec<Element>,
}

/// A pointwise norm that may be `+∞` at some atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreadNorm {
    pub space: Arc<AtomicMeasureSpace>,
    /// `None` marks an infinite value.
    pub values: Vec<Option<f64>>,
}

impl ThreadNorm {
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn finite_mask(&self) -> Vec<bool> {
        self.values.iter().map(Option::is_some).collect()
    }

    pub fn infinite_atoms(&self) -> Vec<String> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(a, _)| self.space.atom_id(a).to_string())
            .collect()
    }

    pub fn into_function(self) -> Result<L0Function> {
        if !self.is_finite() {
            return Err(Error::InfiniteNorm(self.infinite_atoms()));
        }
        L0Function::new(self.space, self.values.into_iter().flatten().collect())
    }
}

fn growth_rule(tail: &TailSpec, last: usize) -> TailRule {
    match tail {
        TailSpec::Identity => TailRule::Constant,
        TailSpec::Scalar(f) => {
            TailRule::Geometric(f.map(|x| if x <= tolerance() { f64::INFINITY } else { 1.0 / x }))
        }
        TailSpec::Harmonic => TailRule::HarmonicGrowth { last_index: last },
    }
}

fn check_thread_shape(s: &InverseSystem, t: &Thread) -> Result<Vec<Element>> {
    if t.components.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: t.components.len(),
            context: "thread components".into(),
        });
    }
    t.components
        .iter()
        .enumerate()
        .map(|(i, v)| {
            check_same_module(s.module(i), v.module(), "thread component")?;
            v.rehome(s.module(i).clone())
        })
        .collect()
}

/// `|v| = ess sup_i |v_i|`, with backward growth along a chain tail.
pub fn il_norm(s: &InverseSystem, t: &Thread) -> Result<ThreadNorm> {
    let comps = check_thread_shape(s, t)?;
    let mut head = comps
        .iter()
        .map(Element::pointwise_norm)
        .collect::<Result<Vec<_>>>()?;
    let family = match s.index() {
        IndexSet::Poset(_) => Family::Finite(head),
        IndexSet::Chain { last, tail } => {
            let eps = tolerance();
            let snapped = head[*last].map(|x| if x <= eps { 0.0 } else { x });
            head[*last] = snapped;
            Family::Tail {
                head,
                rule: growth_rule(tail, *last),
            }
        }
    };
    let (space, values) = ess_extremum_extended(&family, Extremum::Sup)?;
    Ok(ThreadNorm { space, values })
}

pub fn inverse_limit(s: &InverseSystem) -> Result<LimitPresentation> {
    let top = s.top();
    let keep = s.keep_mask();
    let top_module = s.module(top);
    let (module, provenance) = match s.index() {
        IndexSet::Poset(_) => (top_module.clone(), Provenance::GreatestElement),
        IndexSet::Chain { .. } => (top_module.masked(&keep), Provenance::ChainTail),
    };
    let inclusion = mask_morphism(&module, top_module)?;
    let maps = (0..s.len())
        .map(|i| compose(s.map(i, top), &inclusion))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitPresentation {
        module,
        maps,
        provenance,
        keep,
        top,
    })
}

/// The limit element whose projections are the given components.
pub fn thread_from_components(s: &InverseSystem, components: Vec<Element>) -> Result<Element> {
    let thread = Thread { components };
    let comps = check_thread_shape(s, &thread)?;
    let eps = tolerance();
    let mut worst: Option<(usize, usize, f64)> = None;
    for (i, j) in s.index().relation() {
        let dev = s.map(i, j).apply(&comps[j])?.max_deviation(&comps[i]);
        if dev > eps && worst.is_none_or(|w| dev > w.2) {
            worst = Some((i, j, dev));
        }
    }
    if let Some((i, j, deviation)) = worst {
        return Err(Error::IncompatibleThread {
            i: s.label(i),
            j: s.label(j),
            deviation,
        });
    }
    let norm = il_norm(s, &thread)?;
    if !norm.is_finite() {
        return Err(Error::InfiniteNorm(norm.infinite_atoms()));
    }
    let limit = inverse_limit(s)?;
    let quotient = mask_morphism(s.module(limit.top), &limit.module)?;
    quotient.apply(&comps[limit.top])
}

/// The components `P_i(v)` of a limit element.
pub fn thread_of(limit: &LimitPresentation, v: &Element) -> Result<Thread> {
    Ok(Thread {
        components: limit
            .maps
            .iter()
            .map(|p| p.apply(v))
            .collect::<Result<Vec<_>>>()?,
    })
}

/// A module with one morphism into every explicit stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub module: Arc<FiberModule>,
    pub maps: Vec<ModuleMorphism>,
}

/// The unique `Φ : W → lim M` with `P_i ∘ Φ = Q_i`.
pub fn il_universal_factorization(s: &InverseSystem, source: &Source) -> Result<Factorization> {
    let limit = inverse_limit(s)?;
    universal_from_limit(s, &limit, source)
}

pub(crate) fn universal_from_limit(
    s: &InverseSystem,
    limit: &LimitPresentation,
    source: &Source,
) -> Result<Factorization> {
    let eps = tolerance();
    if source.maps.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: source.maps.len(),
            context: "source maps per explicit stage".into(),
        });
    }
    for (i, q) in source.maps.iter().enumerate() {
        check_same_module(&source.module, q.source(), "source map domain")?;
        check_same_module(s.module(i), q.target(), "source map target")?;
    }
    for (i, j) in s.index().relation() {
        let dev = compose(s.map(i, j), &source.maps[j])?.max_deviation(&source.maps[i]);
        if dev > eps {
            return Err(Error::TargetLaw {
                i: s.label(i),
                j: s.label(j),
                deviation: dev,
            });
        }
    }
    let top = limit.top;
    let q_top = source.maps[top].rehome(source.module.clone(), s.module(top).clone())?;
    for (a, keep) in limit.keep.iter().enumerate() {
        let size = linalg::max_abs(q_top.at(a));
        if !keep && size > eps {
            return Err(Error::TargetLaw {
                i: s.label(top),
                j: "tail".into(),
                deviation: size,
            });
        }
    }
    let quotient = mask_morphism(s.module(top), &limit.module)?;
    let phi = compose(&quotient, &q_top)?;
    let mut deviation = 0.0f64;
    let mut worst_stage = 0;
    for i in 0..s.len() {
        let dev = compose(&limit.maps[i], &phi)?.max_deviation(&source.maps[i]);
        if dev > deviation {
            deviation = dev;
            worst_stage = i;
        }
    }
    if deviation > eps {
        return Err(Error::NoFactorization {
            stage: s.label(worst_stage),
            deviation,
        });
    }
    let unique = limit.jointly_spanning(Variance::Inverse).iter().all(|&b| b);
    Ok(Factorization {
        morphism: phi,
        deviation,
        unique,
    })
}

fn inverse_pair(theta: &SystemMorphism) -> Result<(InverseSystem, InverseSystem)> {
    Ok((
        InverseSystem::from_system(theta.source().clone())?,
        InverseSystem::from_system(theta.target().clone())?,
    ))
}

/// The morphism between limits induced by a morphism of inverse systems.
pub fn il_functor(theta: &SystemMorphism) -> Result<ModuleMorphism> {
    let (s, t) = inverse_pair(theta)?;
    let ls = inverse_limit(&s)?;
    let lt = inverse_limit(&t)?;
    let maps = (0..s.len())
        .map(|i| compose(theta.component(i), &ls.maps[i]))
        .collect::<Result<Vec<_>>>()?;
    let source = Source {
        module: ls.module.clone(),
        maps,
    };
    Ok(universal_from_limit(&t, &lt, &source)?.morphism)
}

fn preservation(
    theta: &SystemMorphism,
    hypothesis_failures: Vec<(String, String)>,
    failing: impl Fn(&ModuleMorphism) -> Vec<usize>,
) -> Result<PreservationReport> {
    let limit_morphism = il_functor(theta)?;
    let space = theta.source().space();
    let conclusion_failures: Vec<String> = failing(&limit_morphism)
        .into_iter()
        .map(|a| space.atom_id(a).to_string())
        .collect();
    Ok(PreservationReport {
        hypothesis: hypothesis_failures.is_empty(),
        conclusion: conclusion_failures.is_empty(),
        hypothesis_failures,
        conclusion_failures,
        limit_morphism,
    })
}

/// Injective components give an injective map between inverse limits.
pub fn check_injectivity_preservation(theta: &SystemMorphism) -> Result<PreservationReport> {
    preservation(theta, theta.non_injective(), ModuleMorphism::non_injective_atoms)
}

/// Surjective components need not give a surjective map between inverse limits.
pub fn check_inverse_surjectivity(theta: &SystemMorphism) -> Result<PreservationReport> {
    preservation(
        theta,
        theta.non_surjective(),
        ModuleMorphism::non_surjective_atoms,
    )
}

/// `Hom(lim M, N) → lim Hom(M_i, N)`, `T ↦ (T ∘ φ_i)`, with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitDuality {
    pub system: InverseSystem,
    pub limit: LimitPresentation,
    pub hom_of_limit: HomModule,
    pub comparison: ModuleMorphism,
    pub inverse: Option<ModuleMorphism>,
    pub certificate: IsoCertificate,
}

impl LimitDuality {
    pub fn is_certified(&self) -> bool {
        self.certificate.is_certified()
    }
}

fn duality(
    d: &DirectSystem,
    system: InverseSystem,
    hom_of_limit: HomModule,
    precompose_canonical: impl Fn(&ModuleMorphism) -> Result<ModuleMorphism>,
) -> Result<LimitDuality> {
    let dl = direct_limit(d)?;
    let limit = inverse_limit(&system)?;
    let maps = dl
        .maps
        .iter()
        .map(&precompose_canonical)
        .collect::<Result<Vec<_>>>()?;
    let source = Source {
        module: hom_of_limit.module().clone(),
        maps,
    };
    let comparison = universal_from_limit(&system, &limit, &source)?.morphism;
    let mut inverse_maps = Vec::with_capacity(comparison.maps().len());
    let mut singular = None;
    for (a, m) in comparison.maps().iter().enumerate() {
        if m.nrows() != m.ncols() {
            singular = Some(format!(
                "comparison at atom {} is {}x{}",
                d.space().atom_id(a),
                m.nrows(),
                m.ncols()
            ));
            break;
        }
        if m.nrows() == 0 {
            inverse_maps.push(Matrix::zeros(0, 0));
            continue;
        }
        match m.clone().try_inverse() {
            Some(inv) if linalg::rank(m) == m.nrows() => inverse_maps.push(inv),
            _ => {
                singular = Some(format!("comparison is singular at atom {}", d.space().atom_id(a)));
                break;
            }
        }
    }
    let (inverse, certificate) = match singular {
        Some(why) => (None, IsoCertificate::Failed(why)),
        None => {
            let inv = ModuleMorphism::new(limit.module.clone(), hom_of_limit.module().clone(), inverse_maps)?;
            let cert = certify_isometric_iso(&comparison, &inv)?;
            (Some(inv), cert)
        }
    };
    Ok(LimitDuality {
        system,
        limit,
        hom_of_limit,
        comparison,
        inverse,
        certificate,
    })
}

/// The inverse system `Hom(M_i, N)` with `P_ij(T) = T ∘ φ_ij`, compared with `Hom(lim M, N)`.
pub fn hom_inverse_system(d: &DirectSystem, n: &Arc<FiberModule>) -> Result<LimitDuality> {
    let modules = d
        .modules()
        .iter()
        .map(|m| Ok(hom_module(m, n)?.module().clone()))
        .collect::<Result<Vec<_>>>()?;
    let maps = d
        .index()
        .relation()
        .into_iter()
        .filter(|(i, j)| i != j)
        .map(|(i, j)| Ok(((i, j), precompose(d.map(i, j), n)?)))
        .collect::<Result<Vec<_>>>()?;
    let system = InverseSystem::new(d.index().clone(), modules, maps)?;
    let dl = direct_limit(d)?;
    let hom_of_limit = hom_module(&dl.module, n)?;
    duality(d, system, hom_of_limit, |phi| precompose(phi, n))
}

/// `lim M_i* ≅ (lim M_i)*` with adjoint connecting maps.
pub fn dual_limit_iso(d: &DirectSystem) -> Result<LimitDuality> {
    let modules = d
        .modules()
        .iter()
        .map(|m| dual_module(m).module().clone())
        .collect::<Vec<_>>();
    let maps = d
        .index()
        .relation()
        .into_iter()
        .filter(|(i, j)| i != j)
        .map(|(i, j)| Ok(((i, j), adjoint(d.map(i, j))?)))
        .collect::<Result<Vec<_>>>()?;
    let system = InverseSystem::new(d.index().clone(), modules, maps)?;
    let dl = direct_limit(d)?;
    let hom_of_limit = dual_module(&dl.module);
    duality(d, system, hom_of_limit, adjoint)
}
