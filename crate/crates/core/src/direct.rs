//! Direct systems and their limits.
//!
//! Over a finite directed poset the direct limit is the module at the
//! greatest element. Over a chain the limit is the last explicit module with
//! the fibers zeroed wherever the tail factors multiply down to zero: the
//! seminorm of a class is the infimum of norms along its forward orbit, and
//! the quotient by null classes is finite-dimensional, hence already complete.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::{FinitePoset, IndexSet, TailSpec};
use crate::linalg::{self, Matrix, Vector};
use crate::measure::{ess_extremum, Extremum, Family, L0Function, TailRule};
use crate::module::{
    certify_isometric_iso, check_same_module, compose, Element, FiberModule, ModuleMorphism,
};
use crate::norm::Fiber;
use crate::system::{
    mask_morphism, LimitPresentation, Provenance, System, SystemMorphism, ValidationReport, Variance,
};
use crate::tol::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSystem(System);

impl DirectSystem {
    /// Connecting maps `φ_ij : M_i → M_j` keyed by `(i, j)`.
    pub fn new(
        index: IndexSet,
        modules: Vec<Arc<FiberModule>>,
        maps: Vec<((usize, usize), ModuleMorphism)>,
    ) -> Result<Self> {
        System::new(Variance::Direct, index, modules, maps).map(Self)
    }

    pub fn from_system(system: System) -> Result<Self> {
        if system.variance() != Variance::Direct {
            return Err(Error::InvalidSystem("expected a direct system".into()));
        }
        Ok(Self(system))
    }

    pub fn system(&self) -> &System {
        &self.0
    }
}

impl Deref for DirectSystem {
    type Target = System;
    fn deref(&self) -> &System {
        &self.0
    }
}

pub fn validate_direct_system(s: &DirectSystem) -> ValidationReport {
    s.validate()
}

pub fn greatest_element(poset: &FinitePoset) -> usize {
    poset.greatest_element()
}

/// The class of `element` living at explicit `stage`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColimitClass {
    pub stage: usize,
    pub element: Element,
}

impl ColimitClass {
    pub fn new(s: &DirectSystem, stage: usize, element: Element) -> Result<Self> {
        if stage >= s.len() {
            return Err(Error::InvalidIndex(format!("no explicit stage {stage}")));
        }
        check_same_module(s.module(stage), element.module(), "class representative")?;
        let element = element.rehome(s.module(stage).clone())?;
        Ok(Self { stage, element })
    }
}

fn tail_rule(tail: &TailSpec, last: usize) -> TailRule {
    match tail {
        TailSpec::Identity => TailRule::Constant,
        TailSpec::Scalar(f) => TailRule::Geometric(f.clone()),
        TailSpec::Harmonic => TailRule::HarmonicDecay { last_index: last },
    }
}

/// `|v| = ess inf` of `|φ_ij v|` over the forward orbit of the class.
pub fn dl_seminorm(s: &DirectSystem, c: &ColimitClass) -> Result<L0Function> {
    let i = c.stage;
    let mut head = Vec::new();
    for j in 0..s.len() {
        if s.index().leq(i, j) {
            head.push(s.map(i, j).apply(&c.element)?.pointwise_norm()?);
        }
    }
    let family = match s.index() {
        IndexSet::Poset(_) => Family::Finite(head),
        IndexSet::Chain { last, tail } => Family::Tail {
            head,
            rule: tail_rule(tail, *last),
        },
    };
    ess_extremum(&family, Extremum::Inf)
}

pub fn direct_limit(s: &DirectSystem) -> Result<LimitPresentation> {
    let top = s.top();
    let keep = s.keep_mask();
    let top_module = s.module(top);
    let (module, provenance) = match s.index() {
        IndexSet::Poset(_) => (top_module.clone(), Provenance::GreatestElement),
        IndexSet::Chain { .. } => (top_module.masked(&keep), Provenance::ChainTail),
    };
    let quotient = mask_morphism(top_module, &module)?;
    let maps = (0..s.len())
        .map(|i| compose(&quotient, s.map(i, top)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitPresentation {
        module,
        maps,
        provenance,
        keep,
        top,
    })
}

/// The image `φ_i(v)` of a class in the limit.
pub fn class_in_limit(limit: &LimitPresentation, c: &ColimitClass) -> Result<Element> {
    limit.maps[c.stage].apply(&c.element)
}

/// A module with one morphism from every explicit stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub module: Arc<FiberModule>,
    pub maps: Vec<ModuleMorphism>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub morphism: ModuleMorphism,
    /// Largest deviation over the factorization squares.
    pub deviation: f64,
    /// The structure maps of the limit leave no room for a second factorization.
    pub unique: bool,
}

/// The unique `Φ : lim M → N` with `Φ ∘ φ_i = ψ_i`.
pub fn dl_universal_factorization(s: &DirectSystem, target: &Target) -> Result<Factorization> {
    let limit = direct_limit(s)?;
    universal_from_limit(s, &limit, target)
}

pub(crate) fn universal_from_limit(
    s: &DirectSystem,
    limit: &LimitPresentation,
    target: &Target,
) -> Result<Factorization> {
    let eps = tolerance();
    if target.maps.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: target.maps.len(),
            context: "target maps per explicit stage".into(),
        });
    }
    for (i, psi) in target.maps.iter().enumerate() {
        check_same_module(s.module(i), psi.source(), "target map source")?;
        check_same_module(&target.module, psi.target(), "target map codomain")?;
    }
    for (i, j) in s.index().relation() {
        let dev = compose(&target.maps[j], s.map(i, j))?.max_deviation(&target.maps[i]);
        if dev > eps {
            return Err(Error::TargetLaw {
                i: s.label(i),
                j: s.label(j),
                deviation: dev,
            });
        }
    }
    let top = limit.top;
    let psi_top = target.maps[top].rehome(s.module(top).clone(), target.module.clone())?;
    for (a, keep) in limit.keep.iter().enumerate() {
        let size = linalg::max_abs(psi_top.at(a));
        if !keep && size > eps {
            return Err(Error::TargetLaw {
                i: s.label(top),
                j: "tail".into(),
                deviation: size,
            });
        }
    }
    let section = mask_morphism(&limit.module, s.module(top))?;
    let phi = compose(&psi_top, &section)?;
    let mut deviation = 0.0f64;
    let mut worst_stage = 0;
    for i in 0..s.len() {
        let dev = compose(&phi, &limit.maps[i])?.max_deviation(&target.maps[i]);
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
    let unique = limit.jointly_spanning(Variance::Direct).iter().all(|&b| b);
    Ok(Factorization {
        morphism: phi,
        deviation,
        unique,
    })
}

fn direct_pair(theta: &SystemMorphism) -> Result<(DirectSystem, DirectSystem)> {
    Ok((
        DirectSystem::from_system(theta.source().clone())?,
        DirectSystem::from_system(theta.target().clone())?,
    ))
}

/// The morphism between limits induced by a morphism of direct systems.
pub fn dl_functor(theta: &SystemMorphism) -> Result<ModuleMorphism> {
    let (s, t) = direct_pair(theta)?;
    let ls = direct_limit(&s)?;
    let lt = direct_limit(&t)?;
    let maps = (0..s.len())
        .map(|i| compose(&lt.maps[i], theta.component(i)))
        .collect::<Result<Vec<_>>>()?;
    let target = Target {
        module: lt.module.clone(),
        maps,
    };
    Ok(universal_from_limit(&s, &ls, &target)?.morphism)
}

/// Outcome of trying to write a morphism between limits as the image of a
/// morphism of systems, one stage at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    /// `(stage, atom, residual)` where `ψ_i θ_i = Φ φ_i` has no solution `θ_i`.
    pub obstructions: Vec<(String, String, f64)>,
    /// Least-squares candidates when every stage is solvable.
    pub candidate: Option<Vec<ModuleMorphism>>,
}

impl LiftReport {
    pub fn liftable_stagewise(&self) -> bool {
        self.obstructions.is_empty()
    }
}

/// Looks for `θ_i : M_i → N_i` with `ψ_i ∘ θ_i = Φ ∘ φ_i` at every explicit stage.
pub fn lift_limit_morphism(s: &DirectSystem, t: &DirectSystem, phi: &ModuleMorphism) -> Result<LiftReport> {
    if !s.index().same_shape(t.index()) {
        return Err(Error::InvalidSystem("systems are indexed differently".into()));
    }
    let ls = direct_limit(s)?;
    let lt = direct_limit(t)?;
    check_same_module(&ls.module, phi.source(), "lifted morphism source")?;
    check_same_module(&lt.module, phi.target(), "lifted morphism target")?;
    let phi = phi.rehome(ls.module.clone(), lt.module.clone())?;
    let eps = tolerance();
    let mut obstructions = Vec::new();
    let mut candidate = Vec::new();
    for i in 0..s.len() {
        let rhs = compose(&phi, &ls.maps[i])?;
        let mut mats = Vec::new();
        for a in 0..s.space().len() {
            let (x, res) = linalg::least_squares_matrix(lt.maps[i].at(a), rhs.at(a));
            if res > eps * (1.0 + linalg::max_abs(rhs.at(a))) {
                obstructions.push((s.label(i), s.space().atom_id(a).to_string(), res));
            }
            mats.push(x);
        }
        candidate.push(ModuleMorphism::new(
            s.module(i).clone(),
            t.module(i).clone(),
            mats,
        )?);
    }
    Ok(LiftReport {
        candidate: obstructions.is_empty().then_some(candidate),
        obstructions,
    })
}

/// A module written as the direct limit of its finitely generated submodules.
#[derive(Debug, Clone, PartialEq)]
pub struct FgPresentation {
    pub system: DirectSystem,
    pub limit: LimitPresentation,
    /// `lim → M`, the inclusion of the last stage.
    pub iso: ModuleMorphism,
    /// `iso` and its inverse are both contractions.
    pub certified: bool,
}

/// Orthonormal basis extended by the component of `g` orthogonal to it, if any.
fn extend_basis(basis: &Matrix, g: &Vector) -> Matrix {
    let mut r = g.clone();
    for _ in 0..2 {
        for c in 0..basis.ncols() {
            let col = basis.column(c);
            r -= col * col.dot(&r);
        }
    }
    let nr = r.norm();
    if nr <= linalg::rank_threshold(g.norm()) * 10.0 {
        return basis.clone();
    }
    let mut out = Matrix::zeros(basis.nrows(), basis.ncols() + 1);
    out.view_mut((0, 0), basis.shape()).copy_from(basis);
    out.set_column(basis.ncols(), &(r / nr));
    out
}

/// Stage `k` is generated by the first `k` generators; connecting maps are
/// inclusions. Wherever a stage fills the whole fiber it uses the standard
/// basis, so the last stage is `M` itself when the generators suffice.
pub fn present_as_fg_limit(m: &Arc<FiberModule>, gens: &[Element]) -> Result<FgPresentation> {
    for g in gens {
        check_same_module(m, g.module(), "generator")?;
    }
    let atoms = m.space().len();
    let mut bases: Vec<Vec<Matrix>> = vec![(0..atoms).map(|a| Matrix::zeros(m.fiber(a).dim(), 0)).collect()];
    for g in gens {
        let prev = bases.last().expect("stage 0 exists");
        let next = (0..atoms).map(|a| extend_basis(&prev[a], g.at(a))).collect();
        bases.push(next);
    }
    let last = bases.last().expect("stage 0 exists");
    for (a, basis) in last.iter().enumerate() {
        let (rank, dim) = (basis.ncols(), m.fiber(a).dim());
        if rank < dim {
            return Err(Error::DeficientGenerators {
                atom: m.space().atom_id(a).to_string(),
                rank,
                dim,
            });
        }
    }
    for stage in bases.iter_mut() {
        for (a, b) in stage.iter_mut().enumerate() {
            if b.ncols() == m.fiber(a).dim() {
                *b = Matrix::identity(b.nrows(), b.ncols());
            }
        }
    }
    let mut modules = Vec::with_capacity(bases.len());
    for stage in &bases {
        let fibers = stage
            .iter()
            .enumerate()
            .map(|(a, b)| {
                if b.ncols() == m.fiber(a).dim() {
                    Ok(m.fiber(a).clone())
                } else if b.ncols() == 0 {
                    Ok(Fiber::zero())
                } else {
                    m.fiber(a).restrict(b)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        modules.push(FiberModule::new(m.space().clone(), fibers)?);
    }
    let mut maps = Vec::new();
    for k in 1..bases.len() {
        let step = ModuleMorphism::new(
            modules[k - 1].clone(),
            modules[k].clone(),
            (0..atoms)
                .map(|a| bases[k][a].transpose() * &bases[k - 1][a])
                .collect(),
        )?;
        maps.push(((k - 1, k), step));
    }
    let last_stage = bases.len() - 1;
    let system = DirectSystem::new(IndexSet::chain(last_stage, TailSpec::Identity), modules, maps)?;
    let limit = direct_limit(&system)?;
    let iso = ModuleMorphism::new(limit.module.clone(), m.clone(), bases[last_stage].clone())?;
    let inverse = ModuleMorphism::new(
        m.clone(),
        limit.module.clone(),
        bases[last_stage].iter().map(Matrix::transpose).collect(),
    )?;
    let certified = certify_isometric_iso(&iso, &inverse)?.is_certified();
    Ok(FgPresentation {
        system,
        limit,
        iso,
        certified,
    })
}

/// Whether surjectivity of every component passes to the induced map on limits.
#[derive(Debug, Clone, PartialEq)]
pub struct PreservationReport {
    /// Every component has the property (including tail components on chains).
    pub hypothesis: bool,
    /// The induced morphism between limits has the property.
    pub conclusion: bool,
    /// Stages/atoms where the hypothesis fails, then atoms where the conclusion fails.
    pub hypothesis_failures: Vec<(String, String)>,
    pub conclusion_failures: Vec<String>,
    pub limit_morphism: ModuleMorphism,
}

impl PreservationReport {
    /// The implication "hypothesis ⇒ conclusion" holds on this instance.
    pub fn preserved(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

pub fn check_surjectivity_preservation(theta: &SystemMorphism) -> Result<PreservationReport> {
    let limit_morphism = dl_functor(theta)?;
    let hypothesis_failures = theta.non_surjective();
    let space = theta.source().space();
    let conclusion_failures: Vec<String> = limit_morphism
        .non_surjective_atoms()
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
