//! Systems of modules indexed by a directed set, their validation, and
//! morphisms between systems. Direct and inverse systems share this
//! representation and differ only in the direction of the connecting maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::{tail_gain, IndexSet, TailGain};
use crate::linalg::{self, Matrix};
use crate::measure::{same_space, AtomicMeasureSpace};
use crate::module::{check_same_module, compose, FiberModule, ModuleMorphism};
use crate::tol::tolerance;

/// Direction of the connecting maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    /// `φ_ij : M_i → M_j` for `i ≤ j`.
    Direct,
    /// `P_ij : M_j → M_i` for `i ≤ j`.
    Inverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct System {
    variance: Variance,
    index: IndexSet,
    modules: Vec<Arc<FiberModule>>,
    maps: BTreeMap<(usize, usize), ModuleMorphism>,
}

impl System {
    /// Builds a system from the given connecting maps, keyed by `(i, j)` with `i ≤ j`.
    ///
    /// Missing `(i, i)` maps default to identities; other missing pairs are
    /// filled by composing given maps through intermediate indices.
    pub fn new(
        variance: Variance,
        index: IndexSet,
        modules: Vec<Arc<FiberModule>>,
        given: Vec<((usize, usize), ModuleMorphism)>,
    ) -> Result<Self> {
        if modules.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: modules.len(),
                context: "modules per explicit index".into(),
            });
        }
        let space = modules[0].space().clone();
        if modules.iter().any(|m| !same_space(m.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        if let Some(tail) = index.tail() {
            tail.validate(&space)?;
        }
        let mut maps = BTreeMap::new();
        for ((i, j), m) in given {
            if i >= index.len() || j >= index.len() || !index.leq(i, j) {
                return Err(Error::InvalidSystem(format!(
                    "map given for unrelated pair ({}, {})",
                    label_or(&index, i),
                    label_or(&index, j)
                )));
            }
            let (src, tgt) = match variance {
                Variance::Direct => (&modules[i], &modules[j]),
                Variance::Inverse => (&modules[j], &modules[i]),
            };
            let ctx = format!("map ({}, {})", index.label(i), index.label(j));
            check_same_module(src, m.source(), &format!("{ctx}: source"))?;
            check_same_module(tgt, m.target(), &format!("{ctx}: target"))?;
            let m = m.rehome(src.clone(), tgt.clone())?;
            if maps.insert((i, j), m).is_some() {
                return Err(Error::InvalidSystem(format!("{ctx} given twice")));
            }
        }
        for (i, module) in modules.iter().enumerate() {
            maps.entry((i, i))
                .or_insert_with(|| ModuleMorphism::identity(module));
        }
        let mut sys = Self {
            variance,
            index,
            modules,
            maps,
        };
        sys.fill_by_composition()?;
        Ok(sys)
    }

    fn fill_by_composition(&mut self) -> Result<()> {
        let rel = self.index.relation();
        loop {
            let mut progress = false;
            for &(i, k) in &rel {
                if self.maps.contains_key(&(i, k)) {
                    continue;
                }
                let via = (0..self.index.len()).find(|&j| {
                    j != i
                        && j != k
                        && self.index.leq(i, j)
                        && self.index.leq(j, k)
                        && self.maps.contains_key(&(i, j))
                        && self.maps.contains_key(&(j, k))
                });
                if let Some(j) = via {
                    let m = self.composite(i, j, k)?;
                    self.maps.insert((i, k), m);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        if let Some(&(i, j)) = rel.iter().find(|p| !self.maps.contains_key(p)) {
            return Err(Error::InvalidSystem(format!(
                "no map given or composable for ({}, {})",
                self.index.label(i),
                self.index.label(j)
            )));
        }
        Ok(())
    }

    /// The map `(i, k)` obtained through `j`: `φ_jk ∘ φ_ij` or `P_ij ∘ P_jk`.
    pub fn composite(&self, i: usize, j: usize, k: usize) -> Result<ModuleMorphism> {
        let a = &self.maps[&(i, j)];
        let b = &self.maps[&(j, k)];
        match self.variance {
            Variance::Direct => compose(b, a),
            Variance::Inverse => compose(a, b),
        }
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn space(&self) -> &Arc<AtomicMeasureSpace> {
        self.modules[0].space()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> &[Arc<FiberModule>] {
        &self.modules
    }

    pub fn module(&self, i: usize) -> &Arc<FiberModule> {
        &self.modules[i]
    }

    /// The connecting map for `i ≤ j`.
    pub fn map(&self, i: usize, j: usize) -> &ModuleMorphism {
        &self.maps[&(i, j)]
    }

    pub fn maps(&self) -> impl Iterator<Item = (&(usize, usize), &ModuleMorphism)> {
        self.maps.iter()
    }

    pub fn top(&self) -> usize {
        self.index.top()
    }

    pub fn label(&self, i: usize) -> String {
        self.index.label(i)
    }

    /// Atoms whose fibers survive the tail (all atoms for posets).
    pub fn keep_mask(&self) -> Vec<bool> {
        match self.index.tail() {
            Some(t) => t.keep_mask(self.space().len()),
            None => vec![true; self.space().len()],
        }
    }

    /// Identity law, cocycle law and admissibility of every connecting map.
    pub fn validate(&self) -> ValidationReport {
        let eps = tolerance();
        let mut violations = Vec::new();
        let label = |i: usize| self.index.label(i);
        for i in 0..self.len() {
            let dev = self.maps[&(i, i)].max_deviation(&ModuleMorphism::identity(&self.modules[i]));
            if dev > eps {
                violations.push(Violation::Identity {
                    i: label(i),
                    deviation: dev,
                });
            }
        }
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if !self.index.leq(i, j) {
                    continue;
                }
                for k in 0..n {
                    if !self.index.leq(j, k) {
                        continue;
                    }
                    let dev = match self.composite(i, j, k) {
                        Ok(c) => c.max_deviation(&self.maps[&(i, k)]),
                        Err(_) => f64::INFINITY,
                    };
                    if dev > eps {
                        violations.push(Violation::Cocycle {
                            i: label(i),
                            j: label(j),
                            k: label(k),
                            deviation: dev,
                        });
                    }
                }
            }
        }
        for (&(i, j), m) in &self.maps {
            match m.operator_pointwise_norm() {
                Ok(norms) => {
                    for (a, &v) in norms.values().iter().enumerate() {
                        if v > 1.0 + eps {
                            violations.push(Violation::Admissibility {
                                i: label(i),
                                j: label(j),
                                atom: self.space().atom_id(a).to_string(),
                                norm: v,
                            });
                        }
                    }
                }
                Err(e) => violations.push(Violation::Undecided {
                    i: label(i),
                    j: label(j),
                    message: e.to_string(),
                }),
            }
        }
        ValidationReport { violations }
    }
}

fn label_or(index: &IndexSet, i: usize) -> String {
    if i < index.len() {
        index.label(i)
    } else {
        format!("#{i}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Identity {
        i: String,
        deviation: f64,
    },
    Cocycle {
        i: String,
        j: String,
        k: String,
        deviation: f64,
    },
    Admissibility {
        i: String,
        j: String,
        atom: String,
        norm: f64,
    },
    Undecided {
        i: String,
        j: String,
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Identity { i, deviation } => {
                write!(f, "identity law at {i}: deviation {deviation:e}")
            }
            Violation::Cocycle { i, j, k, deviation } => {
                write!(f, "cocycle law at ({i}, {j}, {k}): deviation {deviation:e}")
            }
            Violation::Admissibility { i, j, atom, norm } => {
                write!(f, "map ({i}, {j}) has operator norm {norm} at atom {atom}")
            }
            Violation::Undecided { i, j, message } => {
                write!(f, "admissibility of ({i}, {j}) undecided: {message}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// `Ok` when valid, otherwise the first violation as an error.
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidSystem(v.to_string())),
        }
    }
}

/// A family `θ_i : M_i → N_i` between two systems over the same explicit index.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMorphism {
    source: System,
    target: System,
    components: Vec<ModuleMorphism>,
}

impl SystemMorphism {
    pub fn new(source: &System, target: &System, components: Vec<ModuleMorphism>) -> Result<Self> {
        if source.variance != target.variance {
            return Err(Error::InvalidSystem(
                "system morphism between a direct and an inverse system".into(),
            ));
        }
        if !source.index.same_shape(&target.index) {
            return Err(Error::InvalidSystem(
                "system morphism between differently indexed systems".into(),
            ));
        }
        if !same_space(source.space(), target.space()) {
            return Err(Error::SpaceMismatch);
        }
        if components.len() != source.len() {
            return Err(Error::DimensionMismatch {
                expected: source.len(),
                found: components.len(),
                context: "system morphism components".into(),
            });
        }
        let mut comps = Vec::with_capacity(components.len());
        for (i, c) in components.into_iter().enumerate() {
            let ctx = format!("component {}", source.label(i));
            check_same_module(&source.modules[i], c.source(), &format!("{ctx}: source"))?;
            check_same_module(&target.modules[i], c.target(), &format!("{ctx}: target"))?;
            comps.push(c.rehome(source.modules[i].clone(), target.modules[i].clone())?);
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            components: comps,
        })
    }

    pub fn identity(system: &System) -> Self {
        Self {
            source: system.clone(),
            target: system.clone(),
            components: system.modules.iter().map(ModuleMorphism::identity).collect(),
        }
    }

    /// `second ∘ first`.
    pub fn compose(second: &SystemMorphism, first: &SystemMorphism) -> Result<Self> {
        let components = second
            .components
            .iter()
            .zip(&first.components)
            .map(|(b, a)| compose(b, a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&first.source, &second.target, components)
    }

    pub fn source(&self) -> &System {
        &self.source
    }

    pub fn target(&self) -> &System {
        &self.target
    }

    pub fn components(&self) -> &[ModuleMorphism] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ModuleMorphism {
        &self.components[i]
    }

    /// Squares `ψ_ij θ_i = θ_j φ_ij` (direct) or `Q_ij θ_j = θ_i P_ij` (inverse).
    pub fn square_deviation(&self, i: usize, j: usize) -> Result<f64> {
        let s = self.source.map(i, j);
        let t = self.target.map(i, j);
        let (lhs, rhs) = match self.source.variance {
            Variance::Direct => (compose(t, &self.components[i])?, compose(&self.components[j], s)?),
            Variance::Inverse => (compose(t, &self.components[j])?, compose(&self.components[i], s)?),
        };
        Ok(lhs.max_deviation(&rhs))
    }

    /// Per-atom behavior of the components past the last explicit stage, for chains.
    ///
    /// The tail squares force `θ_{N+m} = r_m θ_N` with `r_m` a product of
    /// tail-factor ratios.
    pub fn tail_gains(&self) -> Option<Vec<TailGain>> {
        let (IndexSet::Chain { last, tail: s }, IndexSet::Chain { tail: t, .. }) =
            (&self.source.index, &self.target.index)
        else {
            return None;
        };
        let (num, den) = match self.source.variance {
            Variance::Direct => (t, s),
            Variance::Inverse => (s, t),
        };
        Some(
            (0..self.source.space().len())
                .map(|a| tail_gain(num.kind(a), den.kind(a), *last))
                .collect(),
        )
    }

    pub fn validate(&self) -> MorphismReport {
        let eps = tolerance();
        let mut violations = Vec::new();
        let label = |i: usize| self.source.label(i);
        for (i, j) in self.source.index.relation() {
            let dev = self.square_deviation(i, j).unwrap_or(f64::INFINITY);
            if dev > eps {
                violations.push(MorphismViolation::Square {
                    i: label(i),
                    j: label(j),
                    deviation: dev,
                });
            }
        }
        let mut norms_at_last = None;
        for (i, c) in self.components.iter().enumerate() {
            match c.operator_pointwise_norm() {
                Ok(n) => {
                    for (a, &v) in n.values().iter().enumerate() {
                        if v > 1.0 + eps {
                            violations.push(MorphismViolation::Admissibility {
                                i: label(i),
                                atom: self.source.space().atom_id(a).to_string(),
                                norm: v,
                            });
                        }
                    }
                    if i == self.source.top() {
                        norms_at_last = Some(n);
                    }
                }
                Err(e) => violations.push(MorphismViolation::Undecided {
                    i: label(i),
                    message: e.to_string(),
                }),
            }
        }
        if let (Some(gains), Some(norms)) = (self.tail_gains(), norms_at_last) {
            let last = &self.components[self.source.top()];
            for (a, g) in gains.iter().enumerate() {
                let atom = self.source.space().atom_id(a).to_string();
                let size = linalg::max_abs(last.at(a));
                let must_vanish = g.sup.is_none() || (g.den_zero && !self.numerator_vanishes(a));
                if must_vanish {
                    if size > eps {
                        violations.push(MorphismViolation::Tail {
                            atom,
                            detail: "tail squares force the last component to vanish".into(),
                        });
                    }
                } else if let Some(sup) = g.sup {
                    let worst = norms.value(a) * sup;
                    if worst > 1.0 + eps {
                        violations.push(MorphismViolation::Tail {
                            atom,
                            detail: format!("tail components reach operator norm {worst}"),
                        });
                    }
                }
            }
        }
        MorphismReport { violations }
    }

    fn numerator_vanishes(&self, atom: usize) -> bool {
        use crate::index::TailKind;
        let num = match self.source.variance {
            Variance::Direct => self.target.index.tail(),
            Variance::Inverse => self.source.index.tail(),
        };
        matches!(num.map(|t| t.kind(atom)), Some(TailKind::Const(c)) if c == 0.0)
    }

    /// Explicit stages and tail atoms where a component fails to be surjective.
    pub fn non_surjective(&self) -> Vec<(String, String)> {
        self.rank_failures(
            |m| m.non_surjective_atoms(),
            |c, a| c.target().fiber(a).dim() == 0,
        )
    }

    /// Explicit stages and tail atoms where a component fails to be injective.
    pub fn non_injective(&self) -> Vec<(String, String)> {
        self.rank_failures(|m| m.non_injective_atoms(), |c, a| c.source().fiber(a).dim() == 0)
    }

    fn rank_failures(
        &self,
        failing: impl Fn(&ModuleMorphism) -> Vec<usize>,
        trivially_ok: impl Fn(&ModuleMorphism, usize) -> bool,
    ) -> Vec<(String, String)> {
        let space = self.source.space();
        let mut out = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            for a in failing(c) {
                out.push((self.source.label(i), space.atom_id(a).to_string()));
            }
        }
        if let Some(gains) = self.tail_gains() {
            let last = &self.components[self.source.top()];
            let bad_last = failing(last);
            for (a, g) in gains.iter().enumerate() {
                let zero_tail = !g.positive || g.den_zero;
                if !bad_last.contains(&a) && zero_tail && !trivially_ok(last, a) {
                    out.push(("tail".into(), space.atom_id(a).to_string()));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MorphismViolation {
    Square { i: String, j: String, deviation: f64 },
    Admissibility { i: String, atom: String, norm: f64 },
    Tail { atom: String, detail: String },
    Undecided { i: String, message: String },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Square { i, j, deviation } => {
                write!(f, "square ({i}, {j}) deviates by {deviation:e}")
            }
            MorphismViolation::Admissibility { i, atom, norm } => {
                write!(f, "component {i} has operator norm {norm} at atom {atom}")
            }
            MorphismViolation::Tail { atom, detail } => write!(f, "tail at atom {atom}: {detail}"),
            MorphismViolation::Undecided { i, message } => {
                write!(f, "admissibility of component {i} undecided: {message}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MorphismReport {
    pub violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::NotAMorphism(v.to_string())),
        }
    }
}

/// Where a limit presentation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    GreatestElement,
    ChainTail,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::GreatestElement => "greatest-element",
            Provenance::ChainTail => "chain-tail",
        }
    }
}

/// A limit module with its structure maps: canonical morphisms `M_i → L`
/// for direct limits, projections `L → M_i` for inverse limits.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPresentation {
    pub module: Arc<FiberModule>,
    pub maps: Vec<ModuleMorphism>,
    pub provenance: Provenance,
    /// Atoms where the top-stage fiber survives.
    pub keep: Vec<bool>,
    /// The explicit stage the limit is read off from.
    pub top: usize,
}

impl LimitPresentation {
    pub fn dims(&self) -> Vec<usize> {
        self.module.dims()
    }

    /// Per atom, whether the structure maps jointly reach (direct) or
    /// separate (inverse) the whole limit fiber.
    pub fn jointly_spanning(&self, variance: Variance) -> Vec<bool> {
        let dims = self.module.dims();
        (0..dims.len())
            .map(|a| {
                let blocks: Vec<&Matrix> = self.maps.iter().map(|m| m.at(a)).collect();
                let stacked = match variance {
                    Variance::Direct => hstack(&blocks, dims[a]),
                    Variance::Inverse => vstack(&blocks, dims[a]),
                };
                linalg::rank(&stacked) == dims[a]
            })
            .collect()
    }
}

/// `[B_1 | B_2 | …]` for blocks with `rows` rows.
pub(crate) fn hstack(blocks: &[&Matrix], rows: usize) -> Matrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    out
}

/// Blocks with `cols` columns stacked vertically.
pub(crate) fn vstack(blocks: &[&Matrix], cols: usize) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(*b);
        r += b.nrows();
    }
    out
}

/// Identity on atoms in `keep`, the empty map elsewhere: the quotient `M → L`
/// when `to` is the masked copy of `from`, or the inclusion `L → M` otherwise.
pub(crate) fn mask_morphism(from: &Arc<FiberModule>, to: &Arc<FiberModule>) -> Result<ModuleMorphism> {
    ModuleMorphism::from_fn(from.clone(), to.clone(), |_, r, c| Matrix::identity(r, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{FinitePoset, TailSpec};
    use crate::measure::L0Function;
    use crate::norm::Fiber;

    fn plane() -> Arc<FiberModule> {
        FiberModule::uniform(AtomicMeasureSpace::dirac("x"), Fiber::euclidean(2))
    }

    fn mm(m: &Arc<FiberModule>, rows: &[f64]) -> ModuleMorphism {
        ModuleMorphism::new(m.clone(), m.clone(), vec![Matrix::from_row_slice(2, 2, rows)]).unwrap()
    }

    #[test]
    fn identity_system_is_valid() {
        let m = plane();
        let s = System::new(
            Variance::Direct,
            IndexSet::Poset(FinitePoset::chain(3).unwrap()),
            vec![m.clone(), m.clone(), m],
            vec![],
        );
        // Without given maps, (0, 1) cannot be composed.
        assert!(s.is_err());
        let m = plane();
        let s = System::new(
            Variance::Direct,
            IndexSet::Poset(FinitePoset::chain(1).unwrap()),
            vec![m],
            vec![],
        )
        .unwrap();
        assert!(s.validate().is_valid());
    }

    #[test]
    fn missing_maps_are_composed() {
        let m = plane();
        let half = mm(&m, &[0.5, 0.0, 0.0, 0.5]);
        let s = System::new(
            Variance::Direct,
            IndexSet::chain(2, TailSpec::Identity),
            vec![m.clone(), m.clone(), m],
            vec![((0, 1), half.clone()), ((1, 2), half)],
        )
        .unwrap();
        assert!((s.map(0, 2).at(0)[(0, 0)] - 0.25).abs() < 1e-15);
        assert!(s.validate().is_valid());
    }

    #[test]
    fn admissibility_violation() {
        let m = plane();
        let two = mm(&m, &[2.0, 0.0, 0.0, 2.0]);
        let s = System::new(
            Variance::Direct,
            IndexSet::chain(1, TailSpec::Identity),
            vec![m.clone(), m],
            vec![((0, 1), two)],
        )
        .unwrap();
        let r = s.validate();
        assert!(matches!(
            r.violations.as_slice(),
            [Violation::Admissibility { i, j, norm, .. }] if i == "0" && j == "1" && (norm - 2.0).abs() < 1e-9
        ));
    }

    #[test]
    fn cocycle_violation() {
        let m = plane();
        let pairs = vec![("a".to_string(), "b".to_string()), ("b".into(), "c".into())];
        let idx = IndexSet::Poset(FinitePoset::new(vec!["a", "b", "c"], &pairs).unwrap());
        let id = ModuleMorphism::identity(&m);
        let flip = mm(&m, &[1.0, 0.0, 0.0, -1.0]);
        for variance in [Variance::Direct, Variance::Inverse] {
            let s = System::new(
                variance,
                idx.clone(),
                vec![m.clone(), m.clone(), m.clone()],
                vec![((0, 1), id.clone()), ((1, 2), id.clone()), ((0, 2), flip.clone())],
            )
            .unwrap();
            let r = s.validate();
            assert!(r.violations.iter().any(|v| matches!(
                v,
                Violation::Cocycle { i, j, k, deviation } if i == "a" && j == "b" && k == "c" && (deviation - 2.0).abs() < 1e-12
            )));
        }
    }

    #[test]
    fn tail_morphism_admissibility() {
        let m = plane();
        let id = ModuleMorphism::identity(&m);
        let harmonic = System::new(
            Variance::Direct,
            IndexSet::chain(0, TailSpec::Harmonic),
            vec![m.clone()],
            vec![],
        )
        .unwrap();
        let flat = System::new(
            Variance::Direct,
            IndexSet::chain(0, TailSpec::Identity),
            vec![m.clone()],
            vec![],
        )
        .unwrap();
        // Harmonic into flat on the direct side needs growing components.
        let theta = SystemMorphism::new(&harmonic, &flat, vec![id.clone()]).unwrap();
        assert!(!theta.validate().is_valid());
        // Flat into harmonic shrinks and is fine.
        let theta = SystemMorphism::new(&flat, &harmonic, vec![id]).unwrap();
        assert!(theta.validate().is_valid());
        let f = L0Function::constant(m.space().clone(), 0.0);
        let zero_tail = System::new(
            Variance::Direct,
            IndexSet::chain(0, TailSpec::Scalar(f)),
            vec![m.clone()],
            vec![],
        )
        .unwrap();
        let theta = SystemMorphism::new(&flat, &zero_tail, vec![ModuleMorphism::identity(&m)]).unwrap();
        assert!(theta.validate().is_valid());
        assert_eq!(
            theta.non_surjective(),
            vec![("tail".to_string(), "x".to_string())]
        );
    }
}
