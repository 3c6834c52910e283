//! Hom modules, duals, the evaluation pairing and adjoints.
//!
//! The fiber of `Hom(M, N)` at an atom is the space of `dim N_i × dim M_i`
//! matrices, stored row-major as a vector and normed by the operator norm.
//! The dual `M* = Hom(M, L⁰)` therefore has covectors as fibers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::measure::{same_space, L0Function};
use crate::module::{check_same_module, Element, FiberModule, ModuleMorphism};
use crate::norm::{Fiber, NormSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct HomModule {
    source: Arc<FiberModule>,
    target: Arc<FiberModule>,
    module: Arc<FiberModule>,
}

/// Elements of a dual module are covector fields.
pub type DualElement = Element;

fn hom_fiber(source: &Fiber, target: &Fiber) -> Fiber {
    if source.dim() == 0 || target.dim() == 0 {
        return Fiber::zero();
    }
    Fiber::new(
        source.dim() * target.dim(),
        NormSpec::operator(source.clone(), target.clone()),
    )
    .expect("operator norm of valid fibers is valid")
}

pub fn hom_module(m: &Arc<FiberModule>, n: &Arc<FiberModule>) -> Result<HomModule> {
    if !same_space(m.space(), n.space()) {
        return Err(Error::SpaceMismatch);
    }
    let fibers = m
        .fibers()
        .iter()
        .zip(n.fibers())
        .map(|(a, b)| hom_fiber(a, b))
        .collect();
    Ok(HomModule {
        source: m.clone(),
        target: n.clone(),
        module: FiberModule::new(m.space().clone(), fibers)?,
    })
}

pub fn dual_module(m: &Arc<FiberModule>) -> HomModule {
    hom_module(m, &FiberModule::scalar(m.space().clone())).expect("same space")
}

impl HomModule {
    pub fn source(&self) -> &Arc<FiberModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiberModule> {
        &self.target
    }

    /// The Hom module as a plain fiber module.
    pub fn module(&self) -> &Arc<FiberModule> {
        &self.module
    }

    /// The element of `Hom(M, N)` representing `t`.
    pub fn element_of(&self, t: &ModuleMorphism) -> Result<Element> {
        check_same_module(&self.source, t.source(), "Hom element source")?;
        check_same_module(&self.target, t.target(), "Hom element target")?;
        let coords = t
            .maps()
            .iter()
            .map(|m| {
                if m.nrows() == 0 || m.ncols() == 0 {
                    Vector::zeros(0)
                } else {
                    linalg::vectorize(m)
                }
            })
            .collect();
        Element::new(self.module.clone(), coords)
    }

    /// The morphism represented by an element of `Hom(M, N)`.
    pub fn morphism_of(&self, e: &Element) -> Result<ModuleMorphism> {
        check_same_module(&self.module, e.module(), "Hom element")?;
        let maps = e
            .coords()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let (r, s) = (self.target.fiber(k).dim(), self.source.fiber(k).dim());
                if r == 0 || s == 0 {
                    Matrix::zeros(r, s)
                } else {
                    linalg::unvectorize(c, r, s)
                }
            })
            .collect();
        ModuleMorphism::new(self.source.clone(), self.target.clone(), maps)
    }

    /// A covector field in the dual of `source`.
    pub fn covector(&self, coords: Vec<Vec<f64>>) -> Result<DualElement> {
        self.module.element(coords)
    }
}

/// `⟨ω, v⟩` evaluated atom by atom.
pub fn pairing(omega: &DualElement, v: &Element) -> Result<L0Function> {
    if !same_space(omega.module().space(), v.module().space()) {
        return Err(Error::SpaceMismatch);
    }
    let mut values = Vec::with_capacity(v.coords().len());
    for (k, (w, x)) in omega.coords().iter().zip(v.coords()).enumerate() {
        if x.is_empty() {
            values.push(0.0);
            continue;
        }
        if w.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: w.len(),
                context: format!("covector at atom {}", v.module().space().atom_id(k)),
            });
        }
        values.push(w.dot(x));
    }
    L0Function::new(v.module().space().clone(), values)
}

/// `ω ↦ ω ∘ φ` from `N*` to `M*`; per atom the transpose.
pub fn adjoint(phi: &ModuleMorphism) -> Result<ModuleMorphism> {
    let src = dual_module(phi.target());
    let tgt = dual_module(phi.source());
    ModuleMorphism::new(src.module().clone(), tgt.module().clone(), phi.transpose_maps())
}

/// `T ↦ T ∘ φ` from `Hom(M, N)` to `Hom(M', N)` for `φ: M' → M`.
pub fn precompose(phi: &ModuleMorphism, n: &Arc<FiberModule>) -> Result<ModuleMorphism> {
    let from = hom_module(phi.target(), n)?;
    let to = hom_module(phi.source(), n)?;
    let maps = phi
        .maps()
        .iter()
        .enumerate()
        .map(|(k, p)| linalg::right_composition(n.fiber(k).dim(), p))
        .collect();
    ModuleMorphism::new(from.module().clone(), to.module().clone(), maps)
}

/// `T ↦ ψ ∘ T` from `Hom(M, N)` to `Hom(M, N')` for `ψ: N → N'`.
pub fn postcompose(m: &Arc<FiberModule>, psi: &ModuleMorphism) -> Result<ModuleMorphism> {
    let from = hom_module(m, psi.source())?;
    let to = hom_module(m, psi.target())?;
    let maps = psi
        .maps()
        .iter()
        .enumerate()
        .map(|(k, p)| linalg::left_composition(m.fiber(k).dim(), p))
        .collect();
    ModuleMorphism::new(from.module().clone(), to.module().clone(), maps)
}
