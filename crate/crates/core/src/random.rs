//! Seeded generators for spaces, modules and admissible systems.
//!
//! Systems are cut out of an ambient coordinate space per atom. Every index
//! kills a set of ambient coordinates, killed sets grow along the order, and a
//! connecting map drops the newly killed coordinates, scaled by
//! `s^{h(j) - h(i)}` for a height function `h`. Compatibility is then exact by
//! construction and contraction follows from `s ≤ 1`. Euclidean atoms also
//! rotate each stage by an independent orthogonal matrix.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::direct::DirectSystem;
use crate::error::Result;
use crate::index::{FinitePoset, IndexSet, TailSpec};
use crate::inverse::InverseSystem;
use crate::linalg::{standard_normal, Matrix, Vector};
use crate::measure::{AtomMap, AtomicMeasureSpace, L0Function};
use crate::module::{Element, FiberModule, ModuleMorphism};
use crate::norm::{Fiber, NormSpec, PExponent};
use crate::system::{SystemMorphism, Variance};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atoms `w0, w1, …` with weights in `(0.05, 1]`.
pub fn space<R: Rng>(rng: &mut R, max_atoms: usize) -> Arc<AtomicMeasureSpace> {
    let n = rng.gen_range(1..=max_atoms.max(1));
    let ids = (0..n).map(|k| format!("w{k}")).collect();
    let weights = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
    AtomicMeasureSpace::new(ids, weights).expect("positive weights")
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| standard_normal(rng))
}

pub fn orthogonal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    gaussian_matrix(rng, n, n).qr().q()
}

fn exponent<R: Rng>(rng: &mut R) -> PExponent {
    *[PExponent::One, PExponent::Two, PExponent::Inf]
        .choose(rng)
        .unwrap()
}

fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.25..=2.0)).collect()
}

/// A fiber of the given dimension with a randomly chosen kind of norm.
pub fn fiber<R: Rng>(rng: &mut R, dim: usize) -> Fiber {
    if dim == 0 {
        return Fiber::zero();
    }
    let norm = match rng.gen_range(0..4) {
        0 => NormSpec::euclidean(dim),
        1 => NormSpec::weighted(exponent(rng), weights(rng, dim)).unwrap(),
        2 => {
            let rows = dim + rng.gen_range(0..=1);
            let mut frame = gaussian_matrix(rng, rows, dim);
            for k in 0..dim {
                frame[(k, k)] += 3.0;
            }
            NormSpec::framed(exponent(rng), frame).unwrap()
        }
        _ => NormSpec::dual(NormSpec::weighted(exponent(rng), weights(rng, dim)).unwrap()),
    };
    Fiber::new(dim, norm).unwrap()
}

pub fn module<R: Rng>(rng: &mut R, space: &Arc<AtomicMeasureSpace>, max_dim: usize) -> Arc<FiberModule> {
    let fibers = (0..space.len())
        .map(|_| {
            let d = rng.gen_range(0..=max_dim);
            fiber(rng, d)
        })
        .collect();
    FiberModule::new(space.clone(), fibers).unwrap()
}

/// Standard normal coordinates in every fiber.
pub fn element<R: Rng>(rng: &mut R, module: &Arc<FiberModule>) -> Element {
    let coords = module
        .dims()
        .into_iter()
        .map(|d| Vector::from_fn(d, |_, _| standard_normal(rng)))
        .collect();
    Element::new(module.clone(), coords).unwrap()
}

/// A matrix scaled so that its operator norm between the given fibers is at most `target`.
pub fn contraction<R: Rng>(rng: &mut R, source: &Fiber, target: &Fiber, bound: f64) -> Matrix {
    let t = gaussian_matrix(rng, target.dim(), source.dim());
    let n = crate::norm::operator_norm(&t, source, target)
        .map(|v| v.value)
        .unwrap_or(f64::INFINITY);
    if n > 0.0 && n.is_finite() {
        t * (bound / n)
    } else {
        Matrix::zeros(target.dim(), source.dim())
    }
}

pub fn morphism<R: Rng>(rng: &mut R, source: &Arc<FiberModule>, target: &Arc<FiberModule>) -> ModuleMorphism {
    let maps = (0..source.space().len())
        .map(|a| {
            let bound = rng.gen_range(0.1..=1.0);
            contraction(rng, source.fiber(a), target.fiber(a), bound)
        })
        .collect();
    ModuleMorphism::new(source.clone(), target.clone(), maps).unwrap()
}

/// A directed poset on `n ≤ max_len` elements with a greatest element, stored in shuffled order.
pub fn poset<R: Rng>(rng: &mut R, max_len: usize) -> FinitePoset {
    let n = rng.gen_range(1..=max_len.max(1));
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    // element k (in topological order k) sits at position slots[k]; n-1 is the top
    let labels: Vec<String> = {
        let mut l = vec![String::new(); n];
        for (k, &p) in slots.iter().enumerate() {
            l[p] = format!("i{k}");
        }
        l
    };
    let mut pairs = Vec::new();
    for a in 0..n.saturating_sub(1) {
        for b in a + 1..n - 1 {
            if rng.gen_bool(0.35) {
                pairs.push((format!("i{a}"), format!("i{b}")));
            }
        }
        pairs.push((format!("i{a}"), format!("i{}", n - 1)));
    }
    FinitePoset::new(labels, &pairs).unwrap()
}

pub fn tail<R: Rng>(rng: &mut R, space: &Arc<AtomicMeasureSpace>) -> TailSpec {
    match rng.gen_range(0..3) {
        0 => TailSpec::Identity,
        1 => TailSpec::Harmonic,
        _ => {
            let values = (0..space.len())
                .map(|_| match rng.gen_range(0..4) {
                    0 => 1.0,
                    1 => 0.0,
                    2 => 0.5,
                    _ => rng.gen_range(0.2..0.95),
                })
                .collect();
            TailSpec::Scalar(L0Function::new(space.clone(), values).unwrap())
        }
    }
}

/// Knobs for [`Blueprint::generate`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_atoms: usize,
    pub max_dim: usize,
    pub max_poset: usize,
    /// Probability of a chain with a tail instead of a finite poset.
    pub chain_prob: f64,
    /// Restrict to norms of `p = 2` type.
    pub hilbertian: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_atoms: 3,
            max_dim: 4,
            max_poset: 6,
            chain_prob: 0.0,
            hilbertian: false,
        }
    }
}

#[derive(Debug, Clone)]
enum AtomKind {
    Rotated,
    Weighted(PExponent, Vec<f64>),
}

#[derive(Debug, Clone)]
struct AtomPlan {
    ambient: usize,
    kind: AtomKind,
    scale: f64,
    /// `killed[i][c]`: ambient coordinate `c` is dead at index `i`.
    killed: Vec<Vec<bool>>,
    rotations: Vec<Matrix>,
}

/// The combinatorial data of a randomly generated system.
#[derive(Debug, Clone)]
pub struct Blueprint {
    space: Arc<AtomicMeasureSpace>,
    index: IndexSet,
    height: Vec<usize>,
    atoms: Vec<AtomPlan>,
}

fn heights(index: &IndexSet) -> Vec<usize> {
    let n = index.len();
    let mut h = vec![0; n];
    for _ in 0..n {
        for j in 0..n {
            for i in 0..n {
                if i != j && index.leq(i, j) {
                    h[j] = h[j].max(h[i] + 1);
                }
            }
        }
    }
    h
}

fn up_set<R: Rng>(rng: &mut R, index: &IndexSet, p: f64) -> Vec<bool> {
    let n = index.len();
    let seeds: Vec<usize> = (0..n).filter(|_| rng.gen_bool(p)).collect();
    (0..n).map(|j| seeds.iter().any(|&i| index.leq(i, j))).collect()
}

fn kept(killed: &[bool]) -> Vec<usize> {
    (0..killed.len()).filter(|&c| !killed[c]).collect()
}

/// The map from the coordinates alive under `from` onto those alive under `to`.
fn drop_matrix(from: &[bool], to: &[bool]) -> Matrix {
    let src = kept(from);
    let tgt = kept(to);
    Matrix::from_fn(
        tgt.len(),
        src.len(),
        |r, c| {
            if tgt[r] == src[c] {
                1.0
            } else {
                0.0
            }
        },
    )
}

impl Blueprint {
    pub fn generate<R: Rng>(rng: &mut R, shape: Shape) -> Self {
        let space = space(rng, shape.max_atoms);
        let index = if rng.gen_bool(shape.chain_prob) {
            let last = rng.gen_range(0..shape.max_poset.max(1));
            IndexSet::chain(last, tail(rng, &space))
        } else {
            IndexSet::Poset(poset(rng, shape.max_poset))
        };
        let height = heights(&index);
        let atoms = (0..space.len())
            .map(|_| {
                let ambient = rng.gen_range(1..=shape.max_dim.max(1));
                let kind = if rng.gen_bool(0.5) {
                    AtomKind::Rotated
                } else {
                    let p = if shape.hilbertian {
                        PExponent::Two
                    } else {
                        exponent(rng)
                    };
                    AtomKind::Weighted(p, weights(rng, ambient))
                };
                let scale = if rng.gen_bool(0.5) {
                    1.0
                } else {
                    rng.gen_range(0.5..1.0)
                };
                let ups: Vec<Vec<bool>> = (0..ambient).map(|_| up_set(rng, &index, 0.2)).collect();
                let killed = (0..index.len())
                    .map(|i| (0..ambient).map(|c| ups[c][i]).collect())
                    .collect();
                AtomPlan {
                    ambient,
                    kind,
                    scale,
                    killed,
                    rotations: Vec::new(),
                }
            })
            .collect();
        let mut bp = Blueprint {
            space,
            index,
            height,
            atoms,
        };
        bp.rotate(rng);
        bp
    }

    fn rotate<R: Rng>(&mut self, rng: &mut R) {
        for a in &mut self.atoms {
            a.rotations = a
                .killed
                .iter()
                .map(|k| match a.kind {
                    AtomKind::Rotated => orthogonal(rng, kept(k).len()),
                    AtomKind::Weighted(..) => Matrix::identity(kept(k).len(), kept(k).len()),
                })
                .collect();
        }
    }

    pub fn space(&self) -> &Arc<AtomicMeasureSpace> {
        &self.space
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    fn fiber(&self, atom: usize, i: usize) -> Fiber {
        let a = &self.atoms[atom];
        let alive = kept(&a.killed[i]);
        if alive.is_empty() {
            return Fiber::zero();
        }
        match &a.kind {
            AtomKind::Rotated => Fiber::euclidean(alive.len()),
            AtomKind::Weighted(p, w) => {
                Fiber::from_norm(NormSpec::weighted(*p, alive.iter().map(|&c| w[c]).collect()).unwrap())
                    .unwrap()
            }
        }
    }

    pub fn modules(&self) -> Vec<Arc<FiberModule>> {
        (0..self.index.len())
            .map(|i| {
                let fibers = (0..self.space.len()).map(|a| self.fiber(a, i)).collect();
                FiberModule::new(self.space.clone(), fibers).unwrap()
            })
            .collect()
    }

    /// Matrix of the forward map `i → j` at `atom`.
    fn forward(&self, atom: usize, i: usize, j: usize) -> Matrix {
        let a = &self.atoms[atom];
        let s = a.scale.powi((self.height[j] - self.height[i]) as i32);
        &a.rotations[j] * drop_matrix(&a.killed[i], &a.killed[j]) * a.rotations[i].transpose() * s
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.index
            .relation()
            .into_iter()
            .filter(|(i, j)| i != j)
            .collect()
    }

    pub fn direct(&self) -> DirectSystem {
        let modules = self.modules();
        let maps = self
            .pairs()
            .into_iter()
            .map(|(i, j)| {
                let m = (0..self.space.len()).map(|a| self.forward(a, i, j)).collect();
                (
                    (i, j),
                    ModuleMorphism::new(modules[i].clone(), modules[j].clone(), m).unwrap(),
                )
            })
            .collect();
        DirectSystem::new(self.index.clone(), modules, maps).unwrap()
    }

    /// The system of transposed maps.
    pub fn inverse(&self) -> InverseSystem {
        let modules = self.modules();
        let maps = self
            .pairs()
            .into_iter()
            .map(|(i, j)| {
                let m = (0..self.space.len())
                    .map(|a| self.forward(a, i, j).transpose())
                    .collect();
                (
                    (i, j),
                    ModuleMorphism::new(modules[j].clone(), modules[i].clone(), m).unwrap(),
                )
            })
            .collect();
        InverseSystem::new(self.index.clone(), modules, maps).unwrap()
    }

    /// A quotient blueprint killing additional coordinates, with fresh rotations.
    pub fn quotient<R: Rng>(&self, rng: &mut R) -> Blueprint {
        let mut q = self.clone();
        for a in &mut q.atoms {
            for c in 0..a.ambient {
                let extra = up_set(rng, &self.index, 0.25);
                for (i, row) in a.killed.iter_mut().enumerate() {
                    row[c] |= extra[i];
                }
            }
        }
        q.rotate(rng);
        q
    }

    /// Matrices of the coordinate-dropping map into a quotient blueprint, per index.
    fn onto(&self, q: &Blueprint) -> Vec<Vec<Matrix>> {
        (0..self.index.len())
            .map(|i| {
                (0..self.space.len())
                    .map(|a| {
                        let (s, t) = (&self.atoms[a], &q.atoms[a]);
                        &t.rotations[i] * drop_matrix(&s.killed[i], &t.killed[i]) * s.rotations[i].transpose()
                    })
                    .collect()
            })
            .collect()
    }
}

fn onto_morphism(bp: &Blueprint, q: &Blueprint) -> Result<SystemMorphism> {
    let (s, t) = (bp.direct(), q.direct());
    let comps = bp
        .onto(q)
        .into_iter()
        .enumerate()
        .map(|(i, m)| ModuleMorphism::new(s.module(i).clone(), t.module(i).clone(), m))
        .collect::<Result<Vec<_>>>()?;
    SystemMorphism::new(&s, &t, comps)
}

fn into_morphism(bp: &Blueprint, q: &Blueprint) -> Result<SystemMorphism> {
    let (s, t) = (q.inverse(), bp.inverse());
    let comps = bp
        .onto(q)
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let m = m.into_iter().map(|x| x.transpose()).collect();
            ModuleMorphism::new(s.module(i).clone(), t.module(i).clone(), m)
        })
        .collect::<Result<Vec<_>>>()?;
    SystemMorphism::new(&s, &t, comps)
}

/// A direct system morphism whose components are all surjective.
pub fn surjective_pair<R: Rng>(rng: &mut R, shape: Shape) -> Result<SystemMorphism> {
    let bp = Blueprint::generate(rng, shape);
    let q = bp.quotient(rng);
    onto_morphism(&bp, &q)
}

/// An inverse system morphism whose components are all injective.
pub fn injective_pair<R: Rng>(rng: &mut R, shape: Shape) -> Result<SystemMorphism> {
    let bp = Blueprint::generate(rng, shape);
    let q = bp.quotient(rng);
    into_morphism(&bp, &q)
}

/// Two composable system morphisms `A -> B -> C` of the given variance.
pub fn composable_pair<R: Rng>(
    rng: &mut R,
    shape: Shape,
    variance: Variance,
) -> Result<(SystemMorphism, SystemMorphism)> {
    let a = Blueprint::generate(rng, shape);
    let b = a.quotient(rng);
    let c = b.quotient(rng);
    match variance {
        Variance::Direct => Ok((onto_morphism(&a, &b)?, onto_morphism(&b, &c)?)),
        Variance::Inverse => Ok((into_morphism(&b, &c)?, into_morphism(&a, &b)?)),
    }
}

/// A map from a fresh space onto `target`'s atoms.
pub fn atom_map<R: Rng>(rng: &mut R, target: &Arc<AtomicMeasureSpace>, max_atoms: usize) -> AtomMap {
    let source = space(rng, max_atoms);
    let table = (0..source.len())
        .map(|_| rng.gen_range(0..target.len()))
        .collect();
    AtomMap::from_table(source, target.clone(), table).unwrap()
}
