//! Fiber norms and the numeric kernel behind pointwise norms.
//!
//! Every fiber carries a [`NormSpec`] drawn from a small family that is closed
//! under restriction to subspaces, duality and Hom formation: weighted and
//! framed `p`-norms for `p ∈ {1, 2, ∞}`, explicit duals, and operator norms.
//!
//! Exact evaluation rests on three facts about finite-dimensional balls:
//!
//! * a polytope ball (`p ∈ {1, ∞}`) is the convex hull of finitely many
//!   generators, and a convex function attains its maximum over it at one of
//!   them;
//! * a Euclidean ball is the image of the round ball under a square invertible
//!   factor `R`, which turns operator norms into spectral norms;
//! * a polytope norm is a maximum of finitely many absolute linear
//!   functionals, which turns Euclidean-to-polytope operator norms into a
//!   finite maximum of closed-form quadratic problems.
//!
//! Anything outside these cases falls back to a certified bracket that is
//! only accepted when it is tight.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, standard_normal, Matrix, Vector};
use crate::tol::tolerance;

/// Largest source dimension for which unit-ball generators are enumerated.
pub const VERTEX_DIM_CAP: usize = 12;
/// Upper bound on candidate vertices visited by one enumeration.
pub const ENUMERATION_CAP: u128 = 1 << 22;

const BRACKET_SAMPLES: usize = 4096;
const BRACKET_SEED: u64 = 0x5eed_0f0b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PExponent {
    One,
    Two,
    Inf,
}

impl PExponent {
    fn apply(self, y: impl Iterator<Item = f64>) -> f64 {
        match self {
            PExponent::One => y.map(f64::abs).sum(),
            PExponent::Two => y.map(|v| v * v).sum::<f64>().sqrt(),
            PExponent::Inf => y.map(f64::abs).fold(0.0, f64::max),
        }
    }

    fn is_polyhedral(self) -> bool {
        !matches!(self, PExponent::Two)
    }

    /// Constants `(lo, hi)` with `lo‖y‖₂ ≤ ‖y‖_p ≤ hi‖y‖₂` on `ℝ^m`.
    fn euclidean_constants(self, m: usize) -> (f64, f64) {
        let r = (m.max(1) as f64).sqrt();
        match self {
            PExponent::One => (1.0, r),
            PExponent::Two => (1.0, 1.0),
            PExponent::Inf => (1.0 / r, 1.0),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PExponent::One => "1",
            PExponent::Two => "2",
            PExponent::Inf => "inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `x ↦ ‖(w_i x_i)_i‖_p`.
    WeightedP { p: PExponent, weights: Vec<f64> },
    /// `x ↦ ‖A x‖_p` for an injective frame `A`.
    FramedP { p: PExponent, frame: Matrix },
    /// `ξ ↦ sup { ⟨ξ, x⟩ : inner(x) ≤ 1 }`.
    DualOf(Box<NormSpec>),
    /// Operator norm on row-major vectorized `target.dim × source.dim` matrices.
    OperatorNorm { source: Box<Fiber>, target: Box<Fiber> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    dim: usize,
    norm: NormSpec,
}

/// How an operator norm was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorNormMethod {
    Trivial,
    VertexEnumeration,
    Spectral,
    FacetQuadratic,
    Bracket,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorNormValue {
    pub value: f64,
    /// A source vector of norm at most one at which the value is attained.
    pub maximizer: Vector,
    pub method: OperatorNormMethod,
}

impl NormSpec {
    pub fn weighted(p: PExponent, weights: Vec<f64>) -> Result<Self> {
        let spec = NormSpec::WeightedP { p, weights };
        spec.validate()?;
        Ok(spec)
    }

    pub fn framed(p: PExponent, frame: Matrix) -> Result<Self> {
        let spec = NormSpec::FramedP { p, frame };
        spec.validate()?;
        Ok(spec)
    }

    /// Dual norm, flattening a double dual back to the original norm.
    pub fn dual(inner: NormSpec) -> Self {
        match inner {
            NormSpec::DualOf(x) => *x,
            other => NormSpec::DualOf(Box::new(other)),
        }
    }

    pub fn operator(source: Fiber, target: Fiber) -> Self {
        NormSpec::OperatorNorm {
            source: Box::new(source),
            target: Box::new(target),
        }
    }

    pub fn euclidean(n: usize) -> Self {
        NormSpec::WeightedP {
            p: PExponent::Two,
            weights: vec![1.0; n],
        }
    }

    /// The norm of the zero space.
    pub fn zero() -> Self {
        NormSpec::euclidean(0)
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::WeightedP { weights, .. } => weights.len(),
            NormSpec::FramedP { frame, .. } => frame.ncols(),
            NormSpec::DualOf(inner) => inner.dim(),
            NormSpec::OperatorNorm { source, target } => source.dim * target.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::WeightedP { weights, .. } => {
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(Error::InvalidNorm(format!("weight {w} is not positive")));
                }
            }
            NormSpec::FramedP { frame, .. } => {
                if frame.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidNorm("frame has non-finite entries".into()));
                }
                if linalg::rank(frame) < frame.ncols() {
                    return Err(Error::InvalidNorm(format!(
                        "frame of shape {}x{} lacks full column rank",
                        frame.nrows(),
                        frame.ncols()
                    )));
                }
            }
            NormSpec::DualOf(inner) => {
                if matches!(**inner, NormSpec::DualOf(_)) {
                    return Err(Error::InvalidNorm(
                        "double duals must be flattened to the original norm".into(),
                    ));
                }
                inner.validate()?;
            }
            NormSpec::OperatorNorm { source, target } => {
                source.validate()?;
                target.validate()?;
            }
        }
        Ok(())
    }

    fn check_len(&self, n: usize, context: &str) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
                context: context.into(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_len(x.len(), "norm argument")?;
        if x.is_empty() {
            return Ok(0.0);
        }
        match self {
            NormSpec::WeightedP { p, weights } => {
                Ok(p.apply(weights.iter().zip(x.iter()).map(|(w, v)| w * v)))
            }
            NormSpec::FramedP { p, frame } => Ok(p.apply((frame * x).iter().copied())),
            NormSpec::DualOf(inner) => {
                if inner.is_polytope() {
                    let gens = inner.polytope_generators()?;
                    Ok(gens.iter().map(|g| g.dot(x).abs()).fold(0.0, f64::max))
                } else if let Some(r) = inner.euclidean_factor() {
                    let y = linalg::solve_square(&r.transpose(), x)
                        .ok_or_else(|| Error::InvalidNorm("singular Euclidean factor".into()))?;
                    Ok(y.norm())
                } else {
                    Err(Error::UnsupportedDual(inner.describe()))
                }
            }
            NormSpec::OperatorNorm { source, target } => {
                let t = linalg::unvectorize(x, target.dim, source.dim);
                Ok(operator_norm(&t, source, target)?.value)
            }
        }
    }

    /// Whether the unit ball is a polytope.
    pub fn is_polytope(&self) -> bool {
        if self.dim() <= 1 {
            return true;
        }
        match self {
            NormSpec::WeightedP { p, .. } | NormSpec::FramedP { p, .. } => p.is_polyhedral(),
            NormSpec::DualOf(inner) => inner.is_polytope(),
            NormSpec::OperatorNorm { source, target } => {
                source.norm.is_polytope() && target.norm.is_polytope()
            }
        }
    }

    /// Square invertible `R` with `self(x) = ‖R x‖₂`, when the ball is an ellipsoid.
    pub fn euclidean_factor(&self) -> Option<Matrix> {
        let n = self.dim();
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        if n == 1 {
            let c = self.eval(&Vector::from_element(1, 1.0)).ok()?;
            return Some(Matrix::from_element(1, 1, c));
        }
        match self {
            NormSpec::WeightedP {
                p: PExponent::Two,
                weights,
            } => Some(Matrix::from_diagonal(&Vector::from_column_slice(weights))),
            NormSpec::FramedP {
                p: PExponent::Two,
                frame,
            } => Some(frame.clone().qr().r()),
            NormSpec::DualOf(inner) => {
                let r = inner.euclidean_factor()?;
                Some(r.try_inverse()?.transpose())
            }
            NormSpec::OperatorNorm { source, target } => {
                if source.dim == 1 {
                    let c = source.norm.eval(&Vector::from_element(1, 1.0)).ok()?;
                    Some(target.norm.euclidean_factor()? / c)
                } else if target.dim == 1 {
                    let c = target.norm.eval(&Vector::from_element(1, 1.0)).ok()?;
                    let r = source.norm.euclidean_factor()?;
                    Some(r.try_inverse()?.transpose() * c)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Functionals `u_l` with `self(y) = max_l |⟨u_l, y⟩|`, for polytope norms.
    pub fn polytope_functionals(&self) -> Result<Option<Vec<Vector>>> {
        let n = self.dim();
        if n == 0 {
            return Ok(Some(Vec::new()));
        }
        if n == 1 {
            let c = self.eval(&Vector::from_element(1, 1.0))?;
            return Ok(Some(vec![Vector::from_element(1, c)]));
        }
        let out = match self {
            NormSpec::WeightedP {
                p: PExponent::Inf,
                weights,
            } => Some((0..n).map(|k| linalg::unit(n, k) * weights[k]).collect()),
            NormSpec::WeightedP {
                p: PExponent::One,
                weights,
            } => {
                check_enumeration(1u128 << (n - 1))?;
                Some(
                    sign_patterns(n)
                        .map(|s| Vector::from_fn(n, |k, _| s[k] * weights[k]))
                        .collect(),
                )
            }
            NormSpec::FramedP {
                p: PExponent::Inf,
                frame,
            } => Some((0..frame.nrows()).map(|r| frame.row(r).transpose()).collect()),
            NormSpec::FramedP {
                p: PExponent::One,
                frame,
            } => {
                let m = frame.nrows();
                check_enumeration(1u128 << (m.max(1) - 1))?;
                let ft = frame.transpose();
                Some(sign_patterns(m).map(|s| &ft * Vector::from_vec(s)).collect())
            }
            NormSpec::DualOf(inner) if inner.is_polytope() => Some(inner.polytope_generators()?),
            NormSpec::OperatorNorm { source, target } if self.is_polytope() => {
                let gens = source.norm.polytope_generators()?;
                let funcs = target
                    .norm
                    .polytope_functionals()?
                    .expect("polytope target has functionals");
                let (s, t) = (source.dim, target.dim);
                let mut out = Vec::with_capacity(gens.len() * funcs.len());
                for u in &funcs {
                    for v in &gens {
                        out.push(Vector::from_fn(t * s, |k, _| u[k / s] * v[k % s]));
                    }
                }
                Some(out)
            }
            _ => None,
        };
        Ok(out)
    }

    /// Points whose symmetric convex hull is the unit ball, for polytope norms.
    ///
    /// Fails with [`Error::DimensionCap`] above [`VERTEX_DIM_CAP`] and with
    /// [`Error::UnsupportedDual`] when the ball is not a polytope.
    pub fn polytope_generators(&self) -> Result<Vec<Vector>> {
        let n = self.dim();
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            let c = self.eval(&Vector::from_element(1, 1.0))?;
            return Ok(vec![Vector::from_element(1, 1.0 / c)]);
        }
        if !self.is_polytope() {
            return Err(Error::UnsupportedDual(self.describe()));
        }
        if n > VERTEX_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: n,
                cap: VERTEX_DIM_CAP,
            });
        }
        match self {
            NormSpec::WeightedP {
                p: PExponent::One,
                weights,
            } => Ok((0..n).map(|k| linalg::unit(n, k) / weights[k]).collect()),
            NormSpec::WeightedP {
                p: PExponent::Inf,
                weights,
            } => {
                check_enumeration(1u128 << (n - 1))?;
                Ok(sign_patterns(n)
                    .map(|s| Vector::from_fn(n, |k, _| s[k] / weights[k]))
                    .collect())
            }
            NormSpec::FramedP {
                p: PExponent::Inf,
                frame,
            } => framed_inf_vertices(frame),
            NormSpec::FramedP {
                p: PExponent::One,
                frame,
            } => framed_one_vertices(frame),
            NormSpec::DualOf(inner) => Ok(inner
                .polytope_functionals()?
                .expect("polytope inner norm has functionals")),
            NormSpec::OperatorNorm { .. } => {
                let funcs = self
                    .polytope_functionals()?
                    .expect("polytope operator norm has functionals");
                let frame = Matrix::from_fn(funcs.len(), n, |r, c| funcs[r][c]);
                framed_inf_vertices(&frame)
            }
            NormSpec::WeightedP { .. } | NormSpec::FramedP { .. } => {
                unreachable!("Euclidean balls of dimension >= 2 are not polytopes")
            }
        }
    }

    /// An equivalent `FramedP` description, when one exists in the family.
    pub fn to_framed(&self) -> Result<NormSpec> {
        let n = self.dim();
        if n == 0 {
            return Ok(NormSpec::zero());
        }
        match self {
            NormSpec::WeightedP { p, weights } => Ok(NormSpec::FramedP {
                p: *p,
                frame: Matrix::from_diagonal(&Vector::from_column_slice(weights)),
            }),
            NormSpec::FramedP { .. } => Ok(self.clone()),
            _ => {
                if let Some(r) = self.euclidean_factor() {
                    Ok(NormSpec::FramedP {
                        p: PExponent::Two,
                        frame: r,
                    })
                } else if self.is_polytope() {
                    let funcs = self
                        .polytope_functionals()?
                        .ok_or_else(|| Error::UnsupportedRestriction(self.describe()))?;
                    Ok(NormSpec::FramedP {
                        p: PExponent::Inf,
                        frame: Matrix::from_fn(funcs.len(), n, |r, c| funcs[r][c]),
                    })
                } else {
                    Err(Error::UnsupportedRestriction(self.describe()))
                }
            }
        }
    }

    /// The norm `x ↦ self(B x)` for an injective `B`.
    pub fn restrict(&self, basis: &Matrix) -> Result<NormSpec> {
        self.check_len(basis.nrows(), "restriction basis rows")?;
        if basis.ncols() == 0 {
            return Ok(NormSpec::zero());
        }
        match self.to_framed()? {
            NormSpec::FramedP { p, frame } => Ok(NormSpec::FramedP {
                p,
                frame: frame * basis,
            }),
            _ => unreachable!("to_framed returns a framed norm"),
        }
    }

    /// Constants `(lo, hi)` with `lo‖x‖₂ ≤ self(x) ≤ hi‖x‖₂`.
    fn euclidean_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        match self {
            NormSpec::WeightedP { p, weights } => {
                let (lo, hi) = p.euclidean_constants(n);
                let wmin = weights.iter().copied().fold(f64::INFINITY, f64::min);
                let wmax = weights.iter().copied().fold(0.0, f64::max);
                (lo * wmin, hi * wmax)
            }
            NormSpec::FramedP { p, frame } => {
                let (lo, hi) = p.euclidean_constants(frame.nrows());
                let sv = frame.clone().singular_values();
                (lo * sv.min(), hi * sv.max())
            }
            NormSpec::DualOf(inner) => {
                let (lo, hi) = inner.euclidean_bounds();
                (1.0 / hi, 1.0 / lo)
            }
            NormSpec::OperatorNorm { source, target } => {
                let (ls, hs) = source.norm.euclidean_bounds();
                let (lt, ht) = target.norm.euclidean_bounds();
                let r = (source.dim.min(target.dim).max(1) as f64).sqrt();
                (lt / hs / r, ht / ls)
            }
        }
    }

    /// Structural comparison with entrywise tolerance.
    pub fn approx_eq(&self, other: &NormSpec) -> bool {
        let eps = tolerance();
        match (self, other) {
            (NormSpec::WeightedP { p, weights }, NormSpec::WeightedP { p: q, weights: v }) => {
                p == q && weights.len() == v.len() && weights.iter().zip(v).all(|(a, b)| (a - b).abs() <= eps)
            }
            (NormSpec::FramedP { p, frame }, NormSpec::FramedP { p: q, frame: g }) => {
                p == q && linalg::max_abs_diff(frame, g) <= eps
            }
            (NormSpec::DualOf(a), NormSpec::DualOf(b)) => a.approx_eq(b),
            (
                NormSpec::OperatorNorm { source, target },
                NormSpec::OperatorNorm {
                    source: s2,
                    target: t2,
                },
            ) => source.approx_eq(s2) && target.approx_eq(t2),
            _ => self.dim() == 0 && other.dim() == 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NormSpec::WeightedP { p, weights } => format!("weighted-{p}(dim {})", weights.len()),
            NormSpec::FramedP { p, frame } => {
                format!("framed-{p}({}x{})", frame.nrows(), frame.ncols())
            }
            NormSpec::DualOf(inner) => format!("dual({})", inner.describe()),
            NormSpec::OperatorNorm { source, target } => format!(
                "operator({} -> {})",
                source.norm.describe(),
                target.norm.describe()
            ),
        }
    }
}

impl Fiber {
    pub fn new(dim: usize, norm: NormSpec) -> Result<Self> {
        if norm.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: norm.dim(),
                context: "fiber norm dimension".into(),
            });
        }
        norm.validate()?;
        Ok(Self { dim, norm })
    }

    pub fn from_norm(norm: NormSpec) -> Result<Self> {
        Self::new(norm.dim(), norm)
    }

    pub fn zero() -> Self {
        Self {
            dim: 0,
            norm: NormSpec::zero(),
        }
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            dim: n,
            norm: NormSpec::euclidean(n),
        }
    }

    /// One-dimensional absolute-value fiber.
    pub fn scalar() -> Self {
        Self::euclidean(1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.norm.eval(x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.norm.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.norm.dim(),
                context: "fiber norm dimension".into(),
            });
        }
        self.norm.validate()
    }

    /// Subspace spanned by the columns of the injective `basis`, with the restricted norm.
    pub fn restrict(&self, basis: &Matrix) -> Result<Self> {
        Ok(Self {
            dim: basis.ncols(),
            norm: self.norm.restrict(basis)?,
        })
    }

    pub fn dual(&self) -> Self {
        if self.dim == 0 {
            return Self::zero();
        }
        Self {
            dim: self.dim,
            norm: NormSpec::dual(self.norm.clone()),
        }
    }

    pub fn approx_eq(&self, other: &Fiber) -> bool {
        self.dim == other.dim && self.norm.approx_eq(&other.norm)
    }
}

/// Norm evaluation on a bare spec.
pub fn norm_eval(spec: &NormSpec, x: &Vector) -> Result<f64> {
    spec.eval(x)
}

/// Exact maximum of `target(T x)` over the unit ball of `source`.
pub fn operator_norm(t: &Matrix, source: &Fiber, target: &Fiber) -> Result<OperatorNormValue> {
    if t.shape() != (target.dim, source.dim) {
        return Err(Error::DimensionMismatch {
            expected: target.dim * source.dim,
            found: t.nrows() * t.ncols(),
            context: format!(
                "operator of shape {}x{} between fibers of dims {} -> {}",
                t.nrows(),
                t.ncols(),
                source.dim,
                target.dim
            ),
        });
    }
    if source.dim == 0 || target.dim == 0 {
        return Ok(OperatorNormValue {
            value: 0.0,
            maximizer: Vector::zeros(source.dim),
            method: OperatorNormMethod::Trivial,
        });
    }

    if source.norm.is_polytope() {
        let gens = source.norm.polytope_generators()?;
        let mut best = OperatorNormValue {
            value: 0.0,
            maximizer: gens[0].clone(),
            method: OperatorNormMethod::VertexEnumeration,
        };
        for g in gens {
            let v = target.norm.eval(&(t * &g))?;
            if v > best.value {
                best.value = v;
                best.maximizer = g;
            }
        }
        return Ok(best);
    }

    if let Some(rs) = source.norm.euclidean_factor() {
        let rs_inv = rs
            .try_inverse()
            .ok_or_else(|| Error::InvalidNorm("singular Euclidean factor".into()))?;
        if let Some(rt) = target.norm.euclidean_factor() {
            let (sigma, v) = linalg::spectral_norm(&(rt * t * &rs_inv));
            return Ok(OperatorNormValue {
                value: sigma,
                maximizer: rs_inv * v,
                method: OperatorNormMethod::Spectral,
            });
        }
        if target.norm.is_polytope() {
            // sup_{‖u‖₂≤1} |⟨u_l, T R⁻¹ u⟩| = ‖R⁻ᵀ Tᵀ u_l‖₂ per facet functional.
            let funcs = target
                .norm
                .polytope_functionals()?
                .expect("polytope target has functionals");
            let pull = rs_inv.transpose() * t.transpose();
            let mut best = OperatorNormValue {
                value: 0.0,
                maximizer: Vector::zeros(source.dim),
                method: OperatorNormMethod::FacetQuadratic,
            };
            for u in &funcs {
                let w = &pull * u;
                let n = w.norm();
                if n > best.value {
                    best.value = n;
                    best.maximizer = &rs_inv * (w / n);
                }
            }
            return Ok(best);
        }
    }

    bracket(t, source, target)
}

/// Sampled lower bound against a norm-equivalence upper bound.
fn bracket(t: &Matrix, source: &Fiber, target: &Fiber) -> Result<OperatorNormValue> {
    let mut rng = ChaCha8Rng::seed_from_u64(BRACKET_SEED);
    let n = source.dim;
    let mut lower = 0.0;
    let mut arg = Vector::zeros(n);
    let mut consider = |x: Vector| -> Result<()> {
        let s = source.norm.eval(&x)?;
        if s > 0.0 {
            let x = x / s;
            let v = target.norm.eval(&(t * &x))?;
            if v > lower {
                lower = v;
                arg = x;
            }
        }
        Ok(())
    };
    for k in 0..n {
        consider(linalg::unit(n, k))?;
    }
    for _ in 0..BRACKET_SAMPLES {
        consider(Vector::from_fn(n, |_, _| standard_normal(&mut rng)))?;
    }
    let (ls, _) = source.norm.euclidean_bounds();
    let (_, ht) = target.norm.euclidean_bounds();
    let upper = ht * t.clone().singular_values().max() / ls;
    if upper - lower > tolerance() * lower.max(1.0) {
        return Err(Error::BracketTooWide { lower, upper });
    }
    Ok(OperatorNormValue {
        value: lower,
        maximizer: arg,
        method: OperatorNormMethod::Bracket,
    })
}

fn check_enumeration(candidates: u128) -> Result<()> {
    if candidates > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge { candidates });
    }
    Ok(())
}

/// Sign vectors in `{±1}^n` with a positive first entry.
fn sign_patterns(n: usize) -> impl Iterator<Item = Vec<f64>> {
    let count = if n == 0 { 1u64 } else { 1u64 << (n - 1) };
    (0..count).map(move |mask| {
        (0..n)
            .map(|k| {
                if k > 0 && mask & (1 << (k - 1)) != 0 {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect()
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for q in pos + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

fn push_unique(out: &mut Vec<Vector>, x: Vector) {
    let close = |a: &Vector, b: &Vector| {
        a.iter()
            .zip(b.iter())
            .all(|(p, q)| (p - q).abs() <= 1e-9 * (1.0 + p.abs()))
    };
    let neg = -&x;
    if !out.iter().any(|y| close(y, &x) || close(y, &neg)) {
        out.push(x);
    }
}

/// Vertices of `{x : ‖A x‖_∞ ≤ 1}` (one per antipodal pair).
fn framed_inf_vertices(a: &Matrix) -> Result<Vec<Vector>> {
    let (m, n) = a.shape();
    if n > VERTEX_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: VERTEX_DIM_CAP,
        });
    }
    check_enumeration(binomial(m, n).saturating_mul(1u128 << (n - 1)))?;
    let slack = 1e-9;
    let mut out = Vec::new();
    for_each_subset(m, n, |rows| {
        let sub = Matrix::from_fn(n, n, |r, c| a[(rows[r], c)]);
        let sv = sub.clone().singular_values();
        if sv.min() <= 1e-10 * sv.max().max(1.0) {
            return Ok(());
        }
        let lu = sub.lu();
        for s in sign_patterns(n) {
            if let Some(x) = lu.solve(&Vector::from_vec(s)) {
                let bound = (a * &x).amax();
                if bound <= 1.0 + slack {
                    push_unique(&mut out, x);
                }
            }
        }
        Ok(())
    })?;
    Ok(out)
}

/// Vertices of `{x : ‖A x‖₁ ≤ 1}` (one per antipodal pair).
///
/// At a vertex the rows of `A` vanishing there have rank `n − 1`, so every
/// vertex spans the one-dimensional kernel of some `n − 1` rows.
fn framed_one_vertices(a: &Matrix) -> Result<Vec<Vector>> {
    let (m, n) = a.shape();
    if n > VERTEX_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: VERTEX_DIM_CAP,
        });
    }
    check_enumeration(binomial(m, n - 1))?;
    let mut out = Vec::new();
    for_each_subset(m, n - 1, |rows| {
        let sub = Matrix::from_fn(n - 1, n, |r, c| a[(rows[r], c)]);
        let k = linalg::null_basis(&sub);
        if k.ncols() == 1 {
            let d = k.column(0).into_owned();
            let scale: f64 = (a * &d).iter().map(|v| v.abs()).sum();
            if scale > 0.0 {
                push_unique(&mut out, d / scale);
            }
        }
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    fn weighted(p: PExponent, w: &[f64]) -> NormSpec {
        NormSpec::weighted(p, w.to_vec()).unwrap()
    }

    #[test]
    fn norm_eval_examples() {
        let w1 = weighted(PExponent::One, &[1.0, 2.0]);
        assert_eq!(w1.eval(&v(&[1.0, 1.0])).unwrap(), 3.0);
        assert_eq!(w1.eval(&v(&[0.0, 0.0])).unwrap(), 0.0);
        let dual = NormSpec::dual(w1);
        assert!((dual.eval(&v(&[2.0, 2.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dual_of_euclidean_is_euclidean() {
        let d = NormSpec::dual(NormSpec::euclidean(2));
        assert!((d.eval(&v(&[3.0, 4.0])).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn double_dual_flattens() {
        let w = weighted(PExponent::Inf, &[1.0, 3.0]);
        assert_eq!(NormSpec::dual(NormSpec::dual(w.clone())), w);
        let nested = NormSpec::DualOf(Box::new(NormSpec::DualOf(Box::new(w))));
        assert!(nested.validate().is_err());
    }

    #[test]
    fn invalid_norms() {
        assert!(NormSpec::weighted(PExponent::Two, vec![1.0, 0.0]).is_err());
        let rank_deficient = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        assert!(NormSpec::framed(PExponent::One, rank_deficient).is_err());
        assert!(Fiber::new(3, NormSpec::euclidean(2)).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let e2 = Fiber::euclidean(2);
        let id = Matrix::identity(2, 2);
        assert!((operator_norm(&id, &e2, &e2).unwrap().value - 1.0).abs() < 1e-12);

        let diag = Matrix::from_diagonal(&v(&[1.0, 0.5]));
        let r = operator_norm(&diag, &e2, &e2).unwrap();
        assert_eq!(r.method, OperatorNormMethod::Spectral);
        assert!((r.value - 1.0).abs() < 1e-12);

        let inf2 = Fiber::from_norm(weighted(PExponent::Inf, &[1.0, 1.0])).unwrap();
        let sum = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let r = operator_norm(&sum, &inf2, &Fiber::scalar()).unwrap();
        assert_eq!(r.method, OperatorNormMethod::VertexEnumeration);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn facet_route_matches_vertex_route_in_transpose() {
        // Euclidean -> l∞ equals the largest row norm.
        let t = Matrix::from_row_slice(2, 2, &[3.0, 4.0, 1.0, 0.0]);
        let inf2 = Fiber::from_norm(weighted(PExponent::Inf, &[1.0, 1.0])).unwrap();
        let r = operator_norm(&t, &Fiber::euclidean(2), &inf2).unwrap();
        assert_eq!(r.method, OperatorNormMethod::FacetQuadratic);
        assert!((r.value - 5.0).abs() < 1e-12);
        assert!((inf2.eval(&(&t * &r.maximizer)).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn framed_vertices_match_weighted_closed_form() {
        let w = [1.0, 2.0, 0.5];
        for p in [PExponent::One, PExponent::Inf] {
            let spec = weighted(p, &w);
            let framed = spec.to_framed().unwrap();
            let mut a = spec.polytope_generators().unwrap();
            let mut b = framed.polytope_generators().unwrap();
            assert_eq!(a.len(), b.len(), "{p}");
            let key = |x: &Vector| {
                let s = if x.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(1.0) < 0.0 {
                    -1.0
                } else {
                    1.0
                };
                x.iter().map(|c| (c * s * 1e6).round() as i64).collect::<Vec<_>>()
            };
            a.sort_by_key(key);
            b.sort_by_key(key);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-9 || (x + y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn restriction_composes_frames() {
        let spec = weighted(PExponent::One, &[1.0, 2.0]);
        let basis = Matrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let r = spec.restrict(&basis).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.eval(&v(&[3.0])).unwrap(), 3.0);
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let big = Fiber::from_norm(weighted(PExponent::One, &[1.0; 13])).unwrap();
        let t = Matrix::identity(13, 13);
        assert!(matches!(
            operator_norm(&t, &big, &big),
            Err(Error::DimensionCap { dim: 13, cap: 12 })
        ));
    }

    #[test]
    fn spectral_operator_norm_as_fiber_norm() {
        let hom = NormSpec::operator(Fiber::euclidean(2), Fiber::euclidean(2));
        let x = v(&[1.0, 0.0, 0.0, 0.5]);
        assert!((hom.eval(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!(!hom.is_polytope());
        assert!(hom.euclidean_factor().is_none());
    }

    #[test]
    fn wide_bracket_is_reported() {
        // spectral-norm source is neither a polytope nor an ellipsoid
        let spec = Fiber::from_norm(NormSpec::operator(Fiber::euclidean(2), Fiber::euclidean(2))).unwrap();
        let t = Matrix::from_row_slice(1, 4, &[1.0, 0.3, -0.2, 0.7]);
        assert!(matches!(
            operator_norm(&t, &spec, &Fiber::scalar()),
            Err(Error::BracketTooWide { .. })
        ));
    }
}
