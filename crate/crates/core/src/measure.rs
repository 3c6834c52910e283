//! Finite atomic measure spaces and the functions living on them.
//!
//! A base space is an ordered list of atoms with strictly positive masses.
//! Every measurable function is a vector of per-atom values, so "almost
//! everywhere" statements become finite per-atom conjunctions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tol::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasureSpace {
    atom_ids: Vec<String>,
    weights: Vec<f64>,
}

impl AtomicMeasureSpace {
    pub fn new<S: Into<String>>(atom_ids: Vec<S>, weights: Vec<f64>) -> Result<Arc<Self>> {
        let atom_ids: Vec<String> = atom_ids.into_iter().map(Into::into).collect();
        if atom_ids.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one atom".into()));
        }
        if atom_ids.len() != weights.len() {
            return Err(Error::InvalidSpace(format!(
                "{} atom ids but {} weights",
                atom_ids.len(),
                weights.len()
            )));
        }
        for (id, &w) in atom_ids.iter().zip(&weights) {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "atom `{id}` has non-positive weight {w}"
                )));
            }
        }
        let mut seen = HashMap::new();
        for (k, id) in atom_ids.iter().enumerate() {
            if let Some(prev) = seen.insert(id.as_str(), k) {
                return Err(Error::InvalidSpace(format!(
                    "atom id `{id}` repeated at positions {prev} and {k}"
                )));
            }
        }
        Ok(Arc::new(Self { atom_ids, weights }))
    }

    /// Single atom of unit mass.
    pub fn dirac(id: &str) -> Arc<Self> {
        Self::new(vec![id], vec![1.0]).expect("a single positive atom is valid")
    }

    pub fn len(&self) -> usize {
        self.atom_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_ids.is_empty()
    }

    pub fn atom_ids(&self) -> &[String] {
        &self.atom_ids
    }

    pub fn atom_id(&self, atom: usize) -> &str {
        &self.atom_ids[atom]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.atom_ids.iter().position(|a| a == id)
    }
}

/// Same space, by identity or by value.
pub(crate) fn same_space(a: &Arc<AtomicMeasureSpace>, b: &Arc<AtomicMeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A measurable function, stored as one real value per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Function {
    space: Arc<AtomicMeasureSpace>,
    values: Vec<f64>,
}

impl L0Function {
    pub fn new(space: Arc<AtomicMeasureSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: values.len(),
                context: "function values per atom".into(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: Arc<AtomicMeasureSpace>, c: f64) -> Self {
        let values = vec![c; space.len()];
        Self { space, values }
    }

    pub fn zero(space: Arc<AtomicMeasureSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    /// Indicator of the atoms where `pred` holds.
    pub fn indicator(space: Arc<AtomicMeasureSpace>, pred: impl Fn(usize) -> bool) -> Self {
        let values = (0..space.len())
            .map(|k| if pred(k) { 1.0 } else { 0.0 })
            .collect();
        Self { space, values }
    }

    pub fn space(&self) -> &Arc<AtomicMeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> f64 {
        self.values[atom]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Composition `self ∘ f` along an atom map into this function's space.
    pub fn compose(&self, f: &AtomMap) -> Result<Self> {
        if !same_space(&self.space, f.target()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: f.source().clone(),
            values: f.table().iter().map(|&y| self.values[y]).collect(),
        })
    }

    /// Per-atom `|self - other| <= ε`.
    pub fn ae_eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tolerance())
    }

    /// Per-atom `self <= other + ε`.
    pub fn ae_le(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| *a <= b + tolerance())
    }
}

impl fmt::Display for L0Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", self.space.atom_id(k), v)?;
        }
        write!(f, ")")
    }
}

/// The reference probability `m / m(X)`.
pub fn normalized_reference(space: &Arc<AtomicMeasureSpace>) -> L0Function {
    let total = space.total_mass();
    L0Function {
        space: space.clone(),
        values: space.weights().iter().map(|w| w / total).collect(),
    }
}

/// `Σ m'_i · min(|f_i − g_i|, 1)`.
pub fn l0_distance(f: &L0Function, g: &L0Function) -> Result<f64> {
    if !same_space(&f.space, &g.space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(weighted_truncated_sum(
        &f.space,
        f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()),
    ))
}

pub(crate) fn weighted_truncated_sum(space: &AtomicMeasureSpace, gaps: impl Iterator<Item = f64>) -> f64 {
    let total = space.total_mass();
    space
        .weights()
        .iter()
        .zip(gaps)
        .map(|(w, d)| (w / total) * d.min(1.0))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Sup,
    Inf,
}

/// How a chain-indexed family continues past its explicit terms.
///
/// The tail starts from the last explicit term `a` and produces `a · c_k`
/// for `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    /// `c_k = 1`.
    Constant,
    /// `c_k = r^k` per atom; `r` must be nonnegative and may be `+∞`
    /// (in which case only a zero start stays finite).
    Geometric(L0Function),
    /// `c_k = (n + 1) / (n + k + 1)` where `n` is the index of the last explicit term.
    HarmonicDecay { last_index: usize },
    /// `c_k = (n + k + 1) / (n + 1)`.
    HarmonicGrowth { last_index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Finite(Vec<L0Function>),
    Tail { head: Vec<L0Function>, rule: TailRule },
}

/// Per-atom extremum over a family. Returns `None` at atoms where the family
/// is unbounded in the requested direction.
pub(crate) fn ess_extremum_extended(
    family: &Family,
    mode: Extremum,
) -> Result<(Arc<AtomicMeasureSpace>, Vec<Option<f64>>)> {
    let head = match family {
        Family::Finite(h) | Family::Tail { head: h, .. } => h,
    };
    let first = head.first().ok_or(Error::EmptyFamily)?;
    let space = first.space.clone();
    for f in head {
        if !same_space(&f.space, &space) {
            return Err(Error::SpaceMismatch);
        }
    }
    let pick = |a: f64, b: f64| match mode {
        Extremum::Sup => a.max(b),
        Extremum::Inf => a.min(b),
    };
    let mut out: Vec<Option<f64>> = (0..space.len())
        .map(|k| Some(head.iter().map(|f| f.values[k]).fold(head[0].values[k], pick)))
        .collect();

    if let Family::Tail { rule, .. } = family {
        let last = head.last().expect("nonempty head");
        if let TailRule::Geometric(r) = rule {
            if !same_space(&r.space, &space) {
                return Err(Error::SpaceMismatch);
            }
            if let Some(k) = r.values.iter().position(|v| v.is_nan() || *v < 0.0) {
                return Err(Error::UnrecognizedTail(format!(
                    "geometric ratio {} at atom {} is not a nonnegative number",
                    r.values[k],
                    space.atom_id(k)
                )));
            }
        }
        let eps = tolerance();
        for (k, slot) in out.iter_mut().enumerate() {
            let a = last.values[k];
            if a == 0.0 {
                // 0 · c_k stays 0, including the r = +∞ and r = 0 cases.
                *slot = slot.map(|s| pick(s, 0.0));
                continue;
            }
            // Classify the multiplier sequence c_k: constant, decaying to 0, or growing without bound.
            #[derive(PartialEq)]
            enum Shape {
                Flat,
                Decay,
                Grow,
            }
            let shape = match rule {
                TailRule::Constant => Shape::Flat,
                TailRule::Geometric(r) => {
                    let r = r.values[k];
                    if (r - 1.0).abs() <= eps {
                        Shape::Flat
                    } else if r < 1.0 {
                        Shape::Decay
                    } else {
                        Shape::Grow
                    }
                }
                TailRule::HarmonicDecay { .. } => Shape::Decay,
                TailRule::HarmonicGrowth { .. } => Shape::Grow,
            };
            *slot = match (shape, mode, a > 0.0) {
                (Shape::Flat, _, _) => slot.map(|s| pick(s, a)),
                // decaying tails approach 0 from the side of a
                (Shape::Decay, _, _) => slot.map(|s| pick(s, 0.0)),
                (Shape::Grow, Extremum::Sup, true) | (Shape::Grow, Extremum::Inf, false) => None,
                (Shape::Grow, _, _) => *slot,
            };
        }
    }
    Ok((space, out))
}

/// Per-atom supremum or infimum of a finite family or a chain family with a
/// closed-form tail.
pub fn ess_extremum(family: &Family, mode: Extremum) -> Result<L0Function> {
    let (space, vals) = ess_extremum_extended(family, mode)?;
    let mut values = Vec::with_capacity(vals.len());
    for (k, v) in vals.into_iter().enumerate() {
        match v {
            Some(v) => values.push(v),
            None => {
                return Err(Error::Divergent {
                    atom: space.atom_id(k).to_string(),
                })
            }
        }
    }
    Ok(L0Function { space, values })
}

/// A map between the atoms of two spaces, stored as a table of target positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomMap {
    source: Arc<AtomicMeasureSpace>,
    target: Arc<AtomicMeasureSpace>,
    table: Vec<usize>,
}

impl AtomMap {
    /// Builds the map from `(source id, target id)` pairs; every source atom must appear once.
    pub fn from_pairs(
        source: Arc<AtomicMeasureSpace>,
        target: Arc<AtomicMeasureSpace>,
        pairs: &[(&str, &str)],
    ) -> Result<Self> {
        let mut table = vec![None; source.len()];
        for (x, y) in pairs {
            let xi = source
                .position(x)
                .ok_or_else(|| Error::UnknownAtom(x.to_string()))?;
            let yi = target
                .position(y)
                .ok_or_else(|| Error::UnknownAtom(y.to_string()))?;
            table[xi] = Some(yi);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(k, t)| t.ok_or_else(|| Error::UnknownAtom(format!("no image for {}", source.atom_id(k)))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source,
            target,
            table,
        })
    }

    pub fn from_table(
        source: Arc<AtomicMeasureSpace>,
        target: Arc<AtomicMeasureSpace>,
        table: Vec<usize>,
    ) -> Result<Self> {
        if table.len() != source.len() {
            return Err(Error::DimensionMismatch {
                expected: source.len(),
                found: table.len(),
                context: "atom map table".into(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= target.len()) {
            return Err(Error::UnknownAtom(format!("target position {bad}")));
        }
        Ok(Self {
            source,
            target,
            table,
        })
    }

    pub fn identity(space: Arc<AtomicMeasureSpace>) -> Self {
        let table = (0..space.len()).collect();
        Self {
            source: space.clone(),
            target: space,
            table,
        }
    }

    pub fn source(&self) -> &Arc<AtomicMeasureSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AtomicMeasureSpace> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn image(&self, atom: usize) -> usize {
        self.table[atom]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardCheck {
    pub weights: Vec<f64>,
    pub abs_continuous: bool,
}

/// Pushforward weights `f_* m_X` on `Y` and whether they are dominated by `m_Y`.
pub fn pushforward_check(f: &AtomMap) -> PushforwardCheck {
    let mut weights = vec![0.0; f.target.len()];
    for (x, &y) in f.table.iter().enumerate() {
        weights[y] += f.source.weights()[x];
    }
    let abs_continuous = weights
        .iter()
        .zip(f.target.weights())
        .all(|(&p, &w)| p == 0.0 || w > 0.0);
    PushforwardCheck {
        weights,
        abs_continuous,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(w: &[f64]) -> Arc<AtomicMeasureSpace> {
        let ids: Vec<String> = (0..w.len()).map(|k| format!("a{k}")).collect();
        AtomicMeasureSpace::new(ids, w.to_vec()).unwrap()
    }

    fn fun(s: &Arc<AtomicMeasureSpace>, v: &[f64]) -> L0Function {
        L0Function::new(s.clone(), v.to_vec()).unwrap()
    }

    #[test]
    fn reference_probability_examples() {
        assert_eq!(normalized_reference(&space(&[2.0])).values(), &[1.0]);
        assert_eq!(normalized_reference(&space(&[1.0, 1.0])).values(), &[0.5, 0.5]);
        assert_eq!(normalized_reference(&space(&[1.0, 3.0])).values(), &[0.25, 0.75]);
    }

    #[test]
    fn distance_examples() {
        let s = space(&[1.0, 1.0]);
        let zero = fun(&s, &[0.0, 0.0]);
        assert_eq!(l0_distance(&zero, &zero).unwrap(), 0.0);
        assert_eq!(l0_distance(&zero, &fun(&s, &[3.0, 1.0])).unwrap(), 1.0);
        assert_eq!(l0_distance(&zero, &fun(&s, &[0.5, 0.0])).unwrap(), 0.25);
    }

    #[test]
    fn distance_rejects_mixed_spaces() {
        let a = fun(&space(&[1.0]), &[0.0]);
        let b = fun(&space(&[2.0]), &[0.0]);
        assert_eq!(l0_distance(&a, &b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn invalid_spaces() {
        assert!(AtomicMeasureSpace::new(Vec::<String>::new(), vec![]).is_err());
        let err = AtomicMeasureSpace::new(vec!["a", "b"], vec![1.0, -1.0]).unwrap_err();
        assert!(err.to_string().contains("`b`"));
        assert!(AtomicMeasureSpace::new(vec!["a", "a"], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn extremum_examples() {
        let s = space(&[1.0, 1.0]);
        let sup = ess_extremum(
            &Family::Finite(vec![fun(&s, &[1.0, 2.0]), fun(&s, &[3.0, 0.0])]),
            Extremum::Sup,
        )
        .unwrap();
        assert_eq!(sup.values(), &[3.0, 2.0]);

        let f = fun(&s, &[0.7, -2.0]);
        let inf = ess_extremum(&Family::Finite(vec![f.clone()]), Extremum::Inf).unwrap();
        assert_eq!(inf, f);

        // (1, 0.5^(k+1)) for k >= 0
        let tail = Family::Tail {
            head: vec![fun(&s, &[1.0, 0.5])],
            rule: TailRule::Geometric(fun(&s, &[1.0, 0.5])),
        };
        assert_eq!(ess_extremum(&tail, Extremum::Inf).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(ess_extremum(&tail, Extremum::Sup).unwrap().values(), &[1.0, 0.5]);
    }

    #[test]
    fn extremum_errors() {
        assert_eq!(
            ess_extremum(&Family::Finite(vec![]), Extremum::Sup),
            Err(Error::EmptyFamily)
        );
        let s = space(&[1.0]);
        let growing = Family::Tail {
            head: vec![fun(&s, &[1.0])],
            rule: TailRule::HarmonicGrowth { last_index: 0 },
        };
        assert!(matches!(
            ess_extremum(&growing, Extremum::Sup),
            Err(Error::Divergent { .. })
        ));
        let negative = Family::Tail {
            head: vec![fun(&s, &[1.0])],
            rule: TailRule::Geometric(fun(&s, &[-0.5])),
        };
        assert!(matches!(
            ess_extremum(&negative, Extremum::Inf),
            Err(Error::UnrecognizedTail(_))
        ));
    }

    #[test]
    fn pushforward_examples() {
        let x = AtomicMeasureSpace::new(vec!["a", "b"], vec![1.0, 1.0]).unwrap();
        let y = AtomicMeasureSpace::new(vec!["c"], vec![5.0]).unwrap();
        let f = AtomMap::from_pairs(x.clone(), y, &[("a", "c"), ("b", "c")]).unwrap();
        let p = pushforward_check(&f);
        assert_eq!(p.weights, vec![2.0]);
        assert!(p.abs_continuous);

        let id = pushforward_check(&AtomMap::identity(x.clone()));
        assert_eq!(id.weights, x.weights());

        let single = AtomicMeasureSpace::new(vec!["a"], vec![1.0]).unwrap();
        let two = AtomicMeasureSpace::new(vec!["c", "d"], vec![1.0, 1.0]).unwrap();
        let g = AtomMap::from_pairs(single, two, &[("a", "c")]).unwrap();
        assert_eq!(pushforward_check(&g).weights, vec![1.0, 0.0]);

        let bad = AtomMap::from_pairs(x, AtomicMeasureSpace::dirac("c"), &[("a", "z")]);
        assert_eq!(bad, Err(Error::UnknownAtom("z".into())));
    }
}
