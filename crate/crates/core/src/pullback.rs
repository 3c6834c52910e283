//! Pullback of modules and morphisms along atom maps.
//!
//! `f*M` is defined by reindexing fibers: the fiber at `x` is a copy of the
//! fiber of `M` at `f(x)`, and `(f*v)(x) = v(f(x))`. Both characterizing
//! properties, `|f*v| = |v| ∘ f` and generation by pulled-back elements, then
//! hold exactly since no arithmetic is involved.

use std::sync::Arc;

use crate::direct::{direct_limit, universal_from_limit as dl_factor, DirectSystem, Target};
use crate::error::{Error, Result};
use crate::index::{IndexSet, TailSpec};
use crate::inverse::{inverse_limit, universal_from_limit as il_factor, InverseSystem, Source};
use crate::linalg::{self, Matrix};
use crate::measure::{pushforward_check, same_space, AtomMap, AtomicMeasureSpace};
use crate::module::{
    certify_isometric_iso, check_same_module, Element, FiberModule, IsoCertificate, ModuleMorphism,
};
use crate::system::{LimitPresentation, System};

#[derive(Debug, Clone, PartialEq)]
pub struct PullbackPresentation {
    pub map: AtomMap,
    pub base: Arc<FiberModule>,
    pub module: Arc<FiberModule>,
}

fn check_map(f: &AtomMap) -> Result<()> {
    let check = pushforward_check(f);
    if !check.abs_continuous {
        let bad = check
            .weights
            .iter()
            .zip(f.target().weights())
            .position(|(&p, &w)| p > 0.0 && w <= 0.0)
            .unwrap_or(0);
        return Err(Error::NotAbsolutelyContinuous(
            f.target().atom_id(bad).to_string(),
        ));
    }
    Ok(())
}

pub fn pullback_module(f: &AtomMap, m: &Arc<FiberModule>) -> Result<PullbackPresentation> {
    if !same_space(f.target(), m.space()) {
        return Err(Error::SpaceMismatch);
    }
    check_map(f)?;
    let fibers = f.table().iter().map(|&y| m.fiber(y).clone()).collect();
    Ok(PullbackPresentation {
        map: f.clone(),
        base: m.clone(),
        module: FiberModule::new(f.source().clone(), fibers)?,
    })
}

impl PullbackPresentation {
    /// `f*v`.
    pub fn pull(&self, v: &Element) -> Result<Element> {
        check_same_module(&self.base, v.module(), "pulled-back element")?;
        let coords = self.map.table().iter().map(|&y| v.at(y).clone()).collect();
        Element::new(self.module.clone(), coords)
    }

    /// Pullbacks of the standard basis of the base module span every fiber.
    pub fn generates(&self) -> Result<bool> {
        let pulled = self
            .base
            .standard_basis()
            .iter()
            .map(|e| self.pull(e))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.module.space().len()).all(|x| {
            let dim = self.module.fiber(x).dim();
            let cols = Matrix::from_fn(dim, pulled.len(), |r, c| pulled[c].at(x)[r]);
            linalg::rank(&cols) == dim
        }))
    }
}

/// `f*φ`: the matrix at `x` is the matrix of `φ` at `f(x)`.
pub fn pullback_morphism(f: &AtomMap, phi: &ModuleMorphism) -> Result<ModuleMorphism> {
    let src = pullback_module(f, phi.source())?;
    let tgt = pullback_module(f, phi.target())?;
    let maps = f.table().iter().map(|&y| phi.at(y).clone()).collect();
    ModuleMorphism::new(src.module, tgt.module, maps)
}

fn pullback_tail(f: &AtomMap, tail: &TailSpec) -> Result<TailSpec> {
    Ok(match tail {
        TailSpec::Scalar(g) => TailSpec::Scalar(g.compose(f)?),
        other => other.clone(),
    })
}

/// The system of pullbacks `f*M_i` with connecting maps `f*φ_ij`.
pub fn pullback_system(f: &AtomMap, s: &System) -> Result<System> {
    let modules = s
        .modules()
        .iter()
        .map(|m| Ok(pullback_module(f, m)?.module))
        .collect::<Result<Vec<_>>>()?;
    let maps = s
        .maps()
        .filter(|((i, j), _)| i != j)
        .map(|(&k, m)| Ok((k, pullback_morphism(f, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let index = match s.index() {
        IndexSet::Poset(p) => IndexSet::Poset(p.clone()),
        IndexSet::Chain { last, tail } => IndexSet::chain(*last, pullback_tail(f, tail)?),
    };
    System::new(s.variance(), index, modules, maps)
}

/// The unique `Φ : f*M → N` with `Φ ∘ f* = T` for an alternative couple `(N, T)`,
/// where `T` is given by matrices `T_x : M_{f(x)} → N_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mediation {
    pub morphism: ModuleMorphism,
    pub certificate: IsoCertificate,
}

pub fn mediate(
    pres: &PullbackPresentation,
    alternative: &Arc<FiberModule>,
    t: Vec<Matrix>,
) -> Result<Mediation> {
    let morphism = ModuleMorphism::new(pres.module.clone(), alternative.clone(), t)?;
    let mut inverse = Vec::with_capacity(morphism.maps().len());
    for (x, m) in morphism.maps().iter().enumerate() {
        if m.nrows() != m.ncols() || (m.nrows() > 0 && linalg::rank(m) < m.nrows()) {
            return Ok(Mediation {
                certificate: IsoCertificate::Failed(format!(
                    "alternative map is not invertible at atom {}",
                    pres.module.space().atom_id(x)
                )),
                morphism,
            });
        }
        inverse.push(if m.nrows() == 0 {
            Matrix::zeros(0, 0)
        } else {
            m.clone().try_inverse().expect("full rank square matrix")
        });
    }
    let back = ModuleMorphism::new(alternative.clone(), pres.module.clone(), inverse)?;
    let certificate = certify_isometric_iso(&morphism, &back)?;
    Ok(Mediation {
        morphism,
        certificate,
    })
}

/// `L⁰(Z, M)` over `Z × Y` compared with `π*M` for the projection `π(z, y) = y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionsIso {
    pub product: Arc<AtomicMeasureSpace>,
    pub projection: AtomMap,
    pub sections: Arc<FiberModule>,
    pub pullback: PullbackPresentation,
    pub certificate: IsoCertificate,
}

impl SectionsIso {
    /// `T(v)`: the section constant in `z` with value `v`.
    pub fn constant_section(&self, v: &Element) -> Result<Element> {
        check_same_module(&self.pullback.base, v.module(), "section value")?;
        let ny = v.module().space().len();
        let coords = (0..self.product.len()).map(|k| v.at(k % ny).clone()).collect();
        Element::new(self.sections.clone(), coords)
    }
}

pub fn sections_iso(z: &Arc<AtomicMeasureSpace>, m: &Arc<FiberModule>) -> Result<SectionsIso> {
    let y = m.space();
    let mut ids = Vec::with_capacity(z.len() * y.len());
    let mut weights = Vec::with_capacity(z.len() * y.len());
    let mut table = Vec::with_capacity(z.len() * y.len());
    let mut fibers = Vec::with_capacity(z.len() * y.len());
    for zi in 0..z.len() {
        for yi in 0..y.len() {
            ids.push(format!("({},{})", z.atom_id(zi), y.atom_id(yi)));
            weights.push(z.weights()[zi] * y.weights()[yi]);
            table.push(yi);
            fibers.push(m.fiber(yi).clone());
        }
    }
    let product = AtomicMeasureSpace::new(ids, weights)?;
    let sections = FiberModule::new(product.clone(), fibers)?;
    let projection = AtomMap::from_table(product.clone(), y.clone(), table)?;
    let pullback = pullback_module(&projection, m)?;
    let forward = ModuleMorphism::identity(&sections).rehome(sections.clone(), pullback.module.clone())?;
    let backward =
        ModuleMorphism::identity(&pullback.module).rehome(pullback.module.clone(), sections.clone())?;
    let certificate = certify_isometric_iso(&forward, &backward)?;
    Ok(SectionsIso {
        product,
        projection,
        sections,
        pullback,
        certificate,
    })
}

/// Two independently built limits and the canonical comparison between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackComparison {
    /// Limit of the pulled-back system.
    pub limit_of_pullbacks: LimitPresentation,
    /// Pullback of the limit.
    pub pullback_of_limit: PullbackPresentation,
    pub comparison: ModuleMorphism,
    pub certificate: IsoCertificate,
}

fn invert_and_certify(m: &ModuleMorphism) -> Result<IsoCertificate> {
    let mut inverse = Vec::with_capacity(m.maps().len());
    for (x, a) in m.maps().iter().enumerate() {
        if a.nrows() != a.ncols() || (a.nrows() > 0 && linalg::rank(a) < a.nrows()) {
            return Ok(IsoCertificate::Failed(format!(
                "comparison is not invertible at atom {} ({}x{})",
                m.space().atom_id(x),
                a.nrows(),
                a.ncols()
            )));
        }
        inverse.push(if a.nrows() == 0 {
            Matrix::zeros(0, 0)
        } else {
            a.clone().try_inverse().expect("full rank square matrix")
        });
    }
    let back = ModuleMorphism::new(m.target().clone(), m.source().clone(), inverse)?;
    certify_isometric_iso(m, &back)
}

/// `lim f*M_i → f* lim M_i`, induced by the pulled-back canonical morphisms `f*φ_i`.
pub fn dl_pullback_iso(f: &AtomMap, d: &DirectSystem) -> Result<PullbackComparison> {
    let pulled = DirectSystem::from_system(pullback_system(f, d)?)?;
    let left = direct_limit(&pulled)?;
    let lim = direct_limit(d)?;
    let right = pullback_module(f, &lim.module)?;
    let maps = lim
        .maps
        .iter()
        .map(|phi| pullback_morphism(f, phi))
        .collect::<Result<Vec<_>>>()?;
    let target = Target {
        module: right.module.clone(),
        maps,
    };
    let comparison = dl_factor(&pulled, &left, &target)?.morphism;
    let certificate = invert_and_certify(&comparison)?;
    Ok(PullbackComparison {
        limit_of_pullbacks: left,
        pullback_of_limit: right,
        comparison,
        certificate,
    })
}

/// Why a negative answer is out of reach here.
pub const IL_PULLBACK_NOTE: &str = "the known obstruction to commuting pullbacks with inverse \
limits needs a non-atomic base and infinite-dimensional fibers, which this representation cannot \
express; a certified isomorphism here means no counterexample was found on this instance";

/// `f* lim M_i → lim f*M_i`, induced by the pulled-back projections `f*P_i`.
pub fn il_pullback_compare(f: &AtomMap, s: &InverseSystem) -> Result<PullbackComparison> {
    let pulled = InverseSystem::from_system(pullback_system(f, s)?)?;
    let left = inverse_limit(&pulled)?;
    let lim = inverse_limit(s)?;
    let right = pullback_module(f, &lim.module)?;
    let maps = lim
        .maps
        .iter()
        .map(|p| pullback_morphism(f, p))
        .collect::<Result<Vec<_>>>()?;
    let source = Source {
        module: right.module.clone(),
        maps,
    };
    let comparison = il_factor(&pulled, &left, &source)?.morphism;
    let certificate = invert_and_certify(&comparison)?;
    Ok(PullbackComparison {
        limit_of_pullbacks: left,
        pullback_of_limit: right,
        comparison,
        certificate,
    })
}
