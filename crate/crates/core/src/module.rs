//! Normed L⁰-modules represented as bundles of finite-dimensional normed fibers.
//!
//! A [`FiberModule`] attaches one [`Fiber`] to each atom of its base space. An
//! [`Element`] picks one vector per fiber, and a [`ModuleMorphism`] is one
//! matrix per atom. Multiplication by a function `f ∈ L⁰` scales the vector at
//! each atom by `f` at that atom, so L⁰-linearity of morphisms is automatic.
//! Fibers are finite-dimensional, hence every module is complete and every
//! submodule generated by finitely many elements is closed.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::measure::{same_space, weighted_truncated_sum, AtomicMeasureSpace, L0Function};
use crate::norm::{operator_norm, Fiber, OperatorNormValue};
use crate::tol::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberModule {
    space: Arc<AtomicMeasureSpace>,
    fibers: Vec<Fiber>,
}

impl FiberModule {
    pub fn new(space: Arc<AtomicMeasureSpace>, fibers: Vec<Fiber>) -> Result<Arc<Self>> {
        if fibers.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: fibers.len(),
                context: "fibers per atom".into(),
            });
        }
        for f in &fibers {
            f.validate()?;
        }
        Ok(Arc::new(Self { space, fibers }))
    }

    /// The same fiber at every atom.
    pub fn uniform(space: Arc<AtomicMeasureSpace>, fiber: Fiber) -> Arc<Self> {
        let fibers = vec![fiber; space.len()];
        Arc::new(Self { space, fibers })
    }

    /// `L⁰(m)` itself: absolute value on one-dimensional fibers.
    pub fn scalar(space: Arc<AtomicMeasureSpace>) -> Arc<Self> {
        Self::uniform(space, Fiber::scalar())
    }

    pub fn zero(space: Arc<AtomicMeasureSpace>) -> Arc<Self> {
        Self::uniform(space, Fiber::zero())
    }

    pub fn space(&self) -> &Arc<AtomicMeasureSpace> {
        &self.space
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn fiber(&self, atom: usize) -> &Fiber {
        &self.fibers[atom]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.fibers.iter().map(Fiber::dim).collect()
    }

    pub fn max_dim(&self) -> usize {
        self.fibers.iter().map(Fiber::dim).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.fibers.iter().all(|f| f.dim() == 0)
    }

    /// Same base space and fiberwise equal norms within tolerance.
    pub fn same_as(&self, other: &FiberModule) -> bool {
        std::ptr::eq(self, other)
            || (same_space(&self.space, &other.space)
                && self.fibers.iter().zip(&other.fibers).all(|(a, b)| a.approx_eq(b)))
    }

    /// Replaces the fiber by the zero space wherever `keep` is false.
    pub fn masked(&self, keep: &[bool]) -> Arc<Self> {
        let fibers = self
            .fibers
            .iter()
            .zip(keep)
            .map(|(f, &k)| if k { f.clone() } else { Fiber::zero() })
            .collect();
        Arc::new(Self {
            space: self.space.clone(),
            fibers,
        })
    }

    pub fn element(self: &Arc<Self>, coords: Vec<Vec<f64>>) -> Result<Element> {
        Element::new(self.clone(), coords.into_iter().map(Vector::from_vec).collect())
    }

    pub fn zero_element(self: &Arc<Self>) -> Element {
        Element {
            module: self.clone(),
            coords: self.fibers.iter().map(|f| Vector::zeros(f.dim())).collect(),
        }
    }

    /// `e_k` at every atom whose fiber has dimension above `k`; these generate the module.
    pub fn standard_basis(self: &Arc<Self>) -> Vec<Element> {
        (0..self.max_dim())
            .map(|k| Element {
                module: self.clone(),
                coords: self
                    .fibers
                    .iter()
                    .map(|f| {
                        let mut v = Vector::zeros(f.dim());
                        if k < f.dim() {
                            v[k] = 1.0;
                        }
                        v
                    })
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Display for FiberModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "module[")?;
        for (k, fib) in self.fibers.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", self.space.atom_id(k), fib.norm().describe())?;
        }
        write!(f, "]")
    }
}

pub(crate) fn check_same_module(a: &FiberModule, b: &FiberModule, context: &str) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::ModuleMismatch(context.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    module: Arc<FiberModule>,
    coords: Vec<Vector>,
}

impl Element {
    pub fn new(module: Arc<FiberModule>, coords: Vec<Vector>) -> Result<Self> {
        if coords.len() != module.fibers.len() {
            return Err(Error::DimensionMismatch {
                expected: module.fibers.len(),
                found: coords.len(),
                context: "element coordinates per atom".into(),
            });
        }
        for (k, (c, f)) in coords.iter().zip(&module.fibers).enumerate() {
            if c.len() != f.dim() {
                return Err(Error::DimensionMismatch {
                    expected: f.dim(),
                    found: c.len(),
                    context: format!("coordinates at atom {}", module.space.atom_id(k)),
                });
            }
        }
        Ok(Self { module, coords })
    }

    pub fn module(&self) -> &Arc<FiberModule> {
        &self.module
    }

    pub fn coords(&self) -> &[Vector] {
        &self.coords
    }

    pub fn at(&self, atom: usize) -> &Vector {
        &self.coords[atom]
    }

    /// Same coordinates, reinterpreted in a module with the same fiber dimensions.
    pub fn rehome(&self, module: Arc<FiberModule>) -> Result<Self> {
        Self::new(module, self.coords.clone())
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        check_same_module(&self.module, &other.module, "element addition")?;
        Ok(Element {
            module: self.module.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        check_same_module(&self.module, &other.module, "element subtraction")?;
        Ok(Element {
            module: self.module.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `f · v`.
    pub fn scale(&self, f: &L0Function) -> Result<Element> {
        if !same_space(f.space(), &self.module.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Element {
            module: self.module.clone(),
            coords: self
                .coords
                .iter()
                .enumerate()
                .map(|(k, c)| c * f.value(k))
                .collect(),
        })
    }

    pub fn pointwise_norm(&self) -> Result<L0Function> {
        let values = self
            .coords
            .iter()
            .zip(&self.module.fibers)
            .map(|(c, f)| f.eval(c))
            .collect::<Result<Vec<_>>>()?;
        L0Function::new(self.module.space.clone(), values)
    }

    /// Largest coordinate deviation over all atoms.
    pub fn max_deviation(&self, other: &Element) -> f64 {
        if self.coords.len() != other.coords.len() {
            return f64::INFINITY;
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                if a.len() != b.len() {
                    f64::INFINITY
                } else {
                    (a - b).amax()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Element) -> bool {
        self.max_deviation(other) <= tolerance()
    }
}

pub fn pointwise_norm(v: &Element) -> Result<L0Function> {
    v.pointwise_norm()
}

/// `∫ |v − w| ∧ 1 dm'`.
pub fn module_distance(v: &Element, w: &Element) -> Result<f64> {
    let d = v.sub(w)?.pointwise_norm()?;
    Ok(weighted_truncated_sum(
        &v.module.space,
        d.values().iter().copied(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMorphism {
    source: Arc<FiberModule>,
    target: Arc<FiberModule>,
    maps: Vec<Matrix>,
}

impl ModuleMorphism {
    pub fn new(source: Arc<FiberModule>, target: Arc<FiberModule>, maps: Vec<Matrix>) -> Result<Self> {
        if !same_space(&source.space, &target.space) {
            return Err(Error::SpaceMismatch);
        }
        if maps.len() != source.fibers.len() {
            return Err(Error::DimensionMismatch {
                expected: source.fibers.len(),
                found: maps.len(),
                context: "morphism matrices per atom".into(),
            });
        }
        for (k, m) in maps.iter().enumerate() {
            let want = (target.fibers[k].dim(), source.fibers[k].dim());
            if m.shape() != want {
                return Err(Error::DimensionMismatch {
                    expected: want.0 * want.1,
                    found: m.nrows() * m.ncols(),
                    context: format!(
                        "matrix at atom {} is {}x{}, expected {}x{}",
                        source.space.atom_id(k),
                        m.nrows(),
                        m.ncols(),
                        want.0,
                        want.1
                    ),
                });
            }
        }
        Ok(Self { source, target, maps })
    }

    /// Builds the per-atom matrices from a closure `(atom, rows, cols) -> matrix`.
    pub fn from_fn(
        source: Arc<FiberModule>,
        target: Arc<FiberModule>,
        f: impl Fn(usize, usize, usize) -> Matrix,
    ) -> Result<Self> {
        let maps = (0..source.fibers.len())
            .map(|k| f(k, target.fibers[k].dim(), source.fibers[k].dim()))
            .collect();
        Self::new(source, target, maps)
    }

    pub fn identity(module: &Arc<FiberModule>) -> Self {
        Self {
            source: module.clone(),
            target: module.clone(),
            maps: module
                .fibers
                .iter()
                .map(|f| Matrix::identity(f.dim(), f.dim()))
                .collect(),
        }
    }

    pub fn zero(source: &Arc<FiberModule>, target: &Arc<FiberModule>) -> Result<Self> {
        Self::from_fn(source.clone(), target.clone(), |_, r, c| Matrix::zeros(r, c))
    }

    /// `v ↦ f · v`.
    pub fn scalar(module: &Arc<FiberModule>, f: &L0Function) -> Result<Self> {
        if !same_space(f.space(), &module.space) {
            return Err(Error::SpaceMismatch);
        }
        Self::from_fn(module.clone(), module.clone(), |k, r, c| {
            Matrix::identity(r, c) * f.value(k)
        })
    }

    pub fn source(&self) -> &Arc<FiberModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiberModule> {
        &self.target
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn at(&self, atom: usize) -> &Matrix {
        &self.maps[atom]
    }

    pub fn space(&self) -> &Arc<AtomicMeasureSpace> {
        &self.source.space
    }

    /// Same matrices between modules with the same fiber dimensions.
    pub fn rehome(&self, source: Arc<FiberModule>, target: Arc<FiberModule>) -> Result<Self> {
        Self::new(source, target, self.maps.clone())
    }

    pub fn apply(&self, v: &Element) -> Result<Element> {
        check_same_module(&self.source, &v.module, "morphism source vs element")?;
        Ok(Element {
            module: self.target.clone(),
            coords: self.maps.iter().zip(&v.coords).map(|(m, c)| m * c).collect(),
        })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ModuleMorphism) -> Result<ModuleMorphism> {
        compose(next, self)
    }

    pub fn add(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        check_same_module(&self.source, &other.source, "sum of morphisms (sources)")?;
        check_same_module(&self.target, &other.target, "sum of morphisms (targets)")?;
        Ok(ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            maps: self.maps.iter().zip(&other.maps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `f · T`, i.e. `v ↦ f · T(v)`.
    pub fn scale(&self, f: &L0Function) -> Result<ModuleMorphism> {
        if !same_space(f.space(), &self.source.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(k, m)| m * f.value(k))
                .collect(),
        })
    }

    /// Per-atom exact operator norms with their maximizers.
    pub fn operator_norms(&self) -> Result<Vec<OperatorNormValue>> {
        self.maps
            .iter()
            .enumerate()
            .map(|(k, m)| operator_norm(m, &self.source.fibers[k], &self.target.fibers[k]))
            .collect()
    }

    /// `|T| = ess sup { |T v| : |v| ≤ 1 }`, computed exactly per atom.
    pub fn operator_pointwise_norm(&self) -> Result<L0Function> {
        let values = self.operator_norms()?.into_iter().map(|r| r.value).collect();
        L0Function::new(self.source.space.clone(), values)
    }

    /// Admissibility: `|T| ≤ 1 + ε` at every atom.
    pub fn is_morphism(&self) -> Result<bool> {
        let eps = tolerance();
        Ok(self
            .operator_pointwise_norm()?
            .values()
            .iter()
            .all(|&v| v <= 1.0 + eps))
    }

    /// Largest entrywise deviation from `other`; infinite on shape mismatch.
    pub fn max_deviation(&self, other: &ModuleMorphism) -> f64 {
        if self.maps.len() != other.maps.len() {
            return f64::INFINITY;
        }
        self.maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ModuleMorphism) -> bool {
        self.max_deviation(other) <= tolerance()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.maps.iter().map(linalg::rank).collect()
    }

    /// Atoms where the matrix is not injective.
    pub fn non_injective_atoms(&self) -> Vec<usize> {
        self.maps
            .iter()
            .enumerate()
            .filter(|(_, m)| linalg::rank(m) < m.ncols())
            .map(|(k, _)| k)
            .collect()
    }

    /// Atoms where the matrix is not surjective onto the target fiber.
    pub fn non_surjective_atoms(&self) -> Vec<usize> {
        self.maps
            .iter()
            .enumerate()
            .filter(|(_, m)| linalg::rank(m) < m.nrows())
            .map(|(k, _)| k)
            .collect()
    }

    pub fn transpose_maps(&self) -> Vec<Matrix> {
        self.maps.iter().map(Matrix::transpose).collect()
    }
}

/// `ψ ∘ φ`.
pub fn compose(psi: &ModuleMorphism, phi: &ModuleMorphism) -> Result<ModuleMorphism> {
    check_same_module(
        &psi.source,
        &phi.target,
        "composition ψ∘φ needs ψ.source = φ.target",
    )?;
    Ok(ModuleMorphism {
        source: phi.source.clone(),
        target: psi.target.clone(),
        maps: psi.maps.iter().zip(&phi.maps).map(|(a, b)| a * b).collect(),
    })
}

pub fn apply(phi: &ModuleMorphism, v: &Element) -> Result<Element> {
    phi.apply(v)
}

pub fn identity(module: &Arc<FiberModule>) -> ModuleMorphism {
    ModuleMorphism::identity(module)
}

pub fn operator_pointwise_norm(t: &ModuleMorphism) -> Result<L0Function> {
    t.operator_pointwise_norm()
}

pub fn is_morphism(t: &ModuleMorphism) -> Result<bool> {
    t.is_morphism()
}

/// How an isometric isomorphism was confirmed.
#[derive(Debug, Clone, PartialEq)]
pub enum IsoCertificate {
    /// Identical fibers and identity matrices.
    Structural,
    /// Mutually inverse and both contractions, so both preserve pointwise norms.
    OperatorNorms,
    /// Mutually inverse, operator norms unavailable; norm preservation checked on samples.
    Sampled {
        samples: usize,
        worst: f64,
    },
    Failed(String),
}

impl IsoCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, IsoCertificate::Failed(_))
    }

    pub fn describe(&self) -> String {
        match self {
            IsoCertificate::Structural => "structural identity".into(),
            IsoCertificate::OperatorNorms => "mutually inverse contractions".into(),
            IsoCertificate::Sampled { samples, worst } => {
                format!("norm preserved on {samples} samples (worst deviation {worst:e})")
            }
            IsoCertificate::Failed(why) => format!("failed: {why}"),
        }
    }
}

const ISO_SAMPLES: usize = 256;
const ISO_SEED: u64 = 0x150_1503;

/// Certifies that `forward` and `backward` are mutually inverse isometries.
pub fn certify_isometric_iso(forward: &ModuleMorphism, backward: &ModuleMorphism) -> Result<IsoCertificate> {
    let eps = tolerance();
    let dev = compose(backward, forward)?.max_deviation(&ModuleMorphism::identity(forward.source()));
    if dev > eps {
        return Ok(IsoCertificate::Failed(format!(
            "backward ∘ forward deviates from the identity by {dev:e}"
        )));
    }
    let dev = compose(forward, backward)?.max_deviation(&ModuleMorphism::identity(forward.target()));
    if dev > eps {
        return Ok(IsoCertificate::Failed(format!(
            "forward ∘ backward deviates from the identity by {dev:e}"
        )));
    }
    let structural = |m: &ModuleMorphism| {
        m.source().same_as(m.target())
            && m.maps()
                .iter()
                .all(|x| linalg::max_abs_diff(x, &Matrix::identity(x.nrows(), x.ncols())) <= eps)
    };
    if structural(forward) && structural(backward) {
        return Ok(IsoCertificate::Structural);
    }
    match (
        forward.operator_pointwise_norm(),
        backward.operator_pointwise_norm(),
    ) {
        (Ok(a), Ok(b)) => {
            let space = forward.space();
            for (name, n) in [("forward", a), ("backward", b)] {
                if let Some(k) = n.values().iter().position(|&v| v > 1.0 + eps) {
                    return Ok(IsoCertificate::Failed(format!(
                        "{name} map has operator norm {} at atom {}",
                        n.value(k),
                        space.atom_id(k)
                    )));
                }
            }
            Ok(IsoCertificate::OperatorNorms)
        }
        _ => sampled_isometry(forward),
    }
}

fn sampled_isometry(forward: &ModuleMorphism) -> Result<IsoCertificate> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ISO_SEED);
    let eps = tolerance();
    let mut worst = 0.0f64;
    for (a, m) in forward.maps().iter().enumerate() {
        let (src, tgt) = (forward.source().fiber(a), forward.target().fiber(a));
        for _ in 0..ISO_SAMPLES {
            let x = Vector::from_fn(src.dim(), |_, _| linalg::standard_normal(&mut rng));
            let nx = src.eval(&x)?;
            let ny = tgt.eval(&(m * &x))?;
            let dev = (nx - ny).abs() / nx.max(1.0);
            worst = worst.max(dev);
        }
    }
    if worst > eps {
        return Ok(IsoCertificate::Failed(format!(
            "sampled norm deviation {worst:e}"
        )));
    }
    Ok(IsoCertificate::Sampled {
        samples: ISO_SAMPLES * forward.maps().len(),
        worst,
    })
}

/// A submodule together with its inclusion into the ambient module.
#[derive(Debug, Clone, PartialEq)]
pub struct Submodule {
    pub module: Arc<FiberModule>,
    pub inclusion: ModuleMorphism,
}

impl Submodule {
    /// Per-atom subspace spanned by the columns of `spans[k]`, with the restricted norm.
    pub fn from_spans(ambient: &Arc<FiberModule>, spans: &[Matrix]) -> Result<Self> {
        let mut fibers = Vec::with_capacity(spans.len());
        let mut bases = Vec::with_capacity(spans.len());
        for (k, span) in spans.iter().enumerate() {
            let basis = linalg::column_basis(span);
            fibers.push(ambient.fibers[k].restrict(&basis)?);
            bases.push(basis);
        }
        let module = Arc::new(FiberModule {
            space: ambient.space.clone(),
            fibers,
        });
        let inclusion = ModuleMorphism {
            source: module.clone(),
            target: ambient.clone(),
            maps: bases,
        };
        Ok(Self { module, inclusion })
    }

    /// The unique element of the submodule included as `v`, if `v` lies in it.
    pub fn preimage(&self, v: &Element) -> Result<Element> {
        check_same_module(&self.inclusion.target, &v.module, "submodule preimage")?;
        let mut coords = Vec::with_capacity(v.coords.len());
        for (k, (b, c)) in self.inclusion.maps.iter().zip(&v.coords).enumerate() {
            // Orthonormal basis: the preimage is Bᵀ v when v is in the span.
            let x = b.transpose() * c;
            if (b * &x - c).amax() > tolerance() * (1.0 + c.amax()) {
                return Err(Error::ModuleMismatch(format!(
                    "element leaves the submodule at atom {}",
                    v.module.space.atom_id(k)
                )));
            }
            coords.push(x);
        }
        Element::new(self.module.clone(), coords)
    }
}

/// Smallest submodule containing `gens`; per atom the span of their coordinates.
pub fn submodule_generated(module: &Arc<FiberModule>, gens: &[Element]) -> Result<Submodule> {
    for g in gens {
        check_same_module(module, &g.module, "generator outside the module")?;
    }
    let spans: Vec<Matrix> = module
        .fibers
        .iter()
        .enumerate()
        .map(|(k, f)| Matrix::from_fn(f.dim(), gens.len(), |r, c| gens[c].coords[k][r]))
        .collect();
    Submodule::from_spans(module, &spans)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelImage {
    pub kernel: Submodule,
    pub image: Submodule,
}

/// Per-atom null space and column space, each with the restricted norm.
pub fn kernel_image(phi: &ModuleMorphism) -> Result<KernelImage> {
    let null: Vec<Matrix> = phi.maps.iter().map(linalg::null_basis).collect();
    let kernel = Submodule::from_spans(&phi.source, &null)?;
    let image = Submodule::from_spans(&phi.target, &phi.maps)?;
    Ok(KernelImage { kernel, image })
}
