//! Index sets for systems: finite directed posets and ℕ-chains whose
//! connecting maps past the last explicit stage follow a closed-form tail.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{same_space, AtomicMeasureSpace, L0Function};
use crate::tol::tolerance;

/// A finite partial order, stored as its full relation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    /// Builds the reflexive-transitive closure of `pairs` (each `(a, b)` meaning
    /// `a ≤ b`) and checks antisymmetry and directedness.
    pub fn new<S: Into<String>>(labels: Vec<S>, pairs: &[(String, String)]) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidIndex("empty index set".into()));
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::InvalidIndex(format!("duplicate index `{l}`")));
            }
        }
        let pos = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::InvalidIndex(format!("unknown index `{l}`")))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            leq[pos(a)?][pos(b)?] = true;
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidIndex(format!(
                        "`{}` and `{}` are mutually related",
                        labels[i], labels[j]
                    )));
                }
                if !(0..n).any(|k| leq[i][k] && leq[j][k]) {
                    return Err(Error::InvalidIndex(format!(
                        "`{}` and `{}` have no upper bound",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(Self { labels, leq })
    }

    /// `0 ≤ 1 ≤ … ≤ n-1` with labels `"0"`, …, `"n-1"`.
    pub fn chain(n: usize) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(|k| k.to_string()).collect();
        let pairs: Vec<(String, String)> = (1..n).map(|k| ((k - 1).to_string(), k.to_string())).collect();
        Self::new(labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// All related pairs `(i, j)` with `i ≤ j`, including `i = j`.
    pub fn relation(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Some upper bound of `i` and `j`.
    pub fn upper_bound(&self, i: usize, j: usize) -> usize {
        (0..self.len())
            .find(|&k| self.leq[i][k] && self.leq[j][k])
            .expect("directedness is checked at construction")
    }

    /// The maximum, found by folding pairwise upper bounds over all elements.
    pub fn greatest_element(&self) -> usize {
        (1..self.len()).fold(0, |acc, k| self.upper_bound(acc, k))
    }
}

/// How a chain continues past its last explicit stage `N`: for every `k ≥ N`
/// the stage-`k` module equals the stage-`N` module and the step between
/// `k` and `k + 1` multiplies by a per-atom factor.
#[derive(Debug, Clone, PartialEq)]
pub enum TailSpec {
    /// Factor 1.
    Identity,
    /// Factor `f` with `0 ≤ f ≤ 1`.
    Scalar(L0Function),
    /// Factor `(k + 1) / (k + 2)`.
    Harmonic,
}

impl TailSpec {
    pub fn validate(&self, space: &Arc<AtomicMeasureSpace>) -> Result<()> {
        if let TailSpec::Scalar(f) = self {
            if !same_space(f.space(), space) {
                return Err(Error::SpaceMismatch);
            }
            let eps = tolerance();
            for (k, &v) in f.values().iter().enumerate() {
                if !(v >= -eps && v <= 1.0 + eps) {
                    return Err(Error::UnrecognizedTail(format!(
                        "scalar tail value {v} at atom {} lies outside [0, 1]",
                        space.atom_id(k)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Factor of the step `k → k + 1` at `atom`.
    pub fn step(&self, k: usize, atom: usize) -> f64 {
        match self {
            TailSpec::Identity => 1.0,
            TailSpec::Scalar(f) => f.value(atom),
            TailSpec::Harmonic => (k as f64 + 1.0) / (k as f64 + 2.0),
        }
    }

    /// Per-atom factor kind, with values within tolerance of 1 or 0 snapped.
    pub fn kind(&self, atom: usize) -> TailKind {
        let eps = tolerance();
        match self {
            TailSpec::Identity => TailKind::One,
            TailSpec::Scalar(f) => {
                let v = f.value(atom);
                if (v - 1.0).abs() <= eps {
                    TailKind::One
                } else if v.abs() <= eps {
                    TailKind::Const(0.0)
                } else {
                    TailKind::Const(v)
                }
            }
            TailSpec::Harmonic => TailKind::Harmonic,
        }
    }

    /// Atoms where the product of tail factors stays at 1; everywhere else it tends to 0.
    pub fn keep_mask(&self, atoms: usize) -> Vec<bool> {
        (0..atoms).map(|a| self.kind(a) == TailKind::One).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            TailSpec::Identity => "identity",
            TailSpec::Scalar(_) => "scalar",
            TailSpec::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailKind {
    One,
    /// A constant factor in `[0, 1)`.
    Const(f64),
    Harmonic,
}

/// Closed-form behavior of `r_m = Π_{k=N}^{N+m-1} num_k / den_k` over `m ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailGain {
    /// `sup_m r_m`, or `None` when unbounded.
    pub sup: Option<f64>,
    /// Every `r_m` is strictly positive.
    pub positive: bool,
    /// The denominator vanishes, so the stage-`N` map must be annihilated by the numerator.
    pub den_zero: bool,
}

#[allow(clippy::redundant_guards)]
pub fn tail_gain(num: TailKind, den: TailKind, last: usize) -> TailGain {
    use TailKind::*;
    let bounded = |sup: f64, positive: bool| TailGain {
        sup: Some(sup),
        positive,
        den_zero: false,
    };
    let unbounded = TailGain {
        sup: None,
        positive: true,
        den_zero: false,
    };
    match (num, den) {
        (_, Const(b)) if b == 0.0 => TailGain {
            sup: Some(1.0),
            positive: false,
            den_zero: true,
        },
        (One, One) | (Harmonic, Harmonic) | (Harmonic, One) => bounded(1.0, true),
        (Const(a), One) => bounded(1.0, a > 0.0),
        (One, Const(_)) | (One, Harmonic) | (Harmonic, Const(_)) => unbounded,
        (Const(a), Const(b)) => {
            if a <= b * (1.0 + tolerance()) {
                bounded(1.0, a > 0.0)
            } else {
                unbounded
            }
        }
        (Const(a), Harmonic) => {
            if a == 0.0 {
                return bounded(1.0, false);
            }
            // r_m = a^m (N + m + 1) / (N + 1) rises while a (N + m + 2) > N + m + 1, then decays.
            let n = last as f64;
            let mut r = 1.0f64;
            let mut best = 1.0f64;
            let mut m = 0.0;
            while a * (n + m + 2.0) > n + m + 1.0 {
                r *= a * (n + m + 2.0) / (n + m + 1.0);
                best = best.max(r);
                m += 1.0;
            }
            bounded(best, true)
        }
    }
}

/// The index set of a system.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    Poset(FinitePoset),
    /// Explicit stages `0..=last`, then the tail.
    Chain {
        last: usize,
        tail: TailSpec,
    },
}

impl IndexSet {
    pub fn chain(last: usize, tail: TailSpec) -> Self {
        IndexSet::Chain { last, tail }
    }

    /// Number of explicit indices.
    pub fn len(&self) -> usize {
        match self {
            IndexSet::Poset(p) => p.len(),
            IndexSet::Chain { last, .. } => last + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        match self {
            IndexSet::Poset(p) => p.leq(i, j),
            IndexSet::Chain { .. } => i <= j,
        }
    }

    /// All related explicit pairs `(i, j)`, `i ≤ j`.
    pub fn relation(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The explicit index that every other explicit index lies below.
    pub fn top(&self) -> usize {
        match self {
            IndexSet::Poset(p) => p.greatest_element(),
            IndexSet::Chain { last, .. } => *last,
        }
    }

    pub fn tail(&self) -> Option<&TailSpec> {
        match self {
            IndexSet::Poset(_) => None,
            IndexSet::Chain { tail, .. } => Some(tail),
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            IndexSet::Poset(p) => p.labels()[i].clone(),
            IndexSet::Chain { .. } => i.to_string(),
        }
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        match self {
            IndexSet::Poset(p) => p.labels().iter().position(|l| l == label),
            IndexSet::Chain { last, .. } => label.parse::<usize>().ok().filter(|k| k <= last),
        }
    }

    /// Same explicit indices and order; tails may differ.
    pub fn same_shape(&self, other: &IndexSet) -> bool {
        match (self, other) {
            (IndexSet::Poset(a), IndexSet::Poset(b)) => a == b,
            (IndexSet::Chain { last: a, .. }, IndexSet::Chain { last: b, .. }) => a == b,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(ps: &[(&str, &str)]) -> Vec<(String, String)> {
        ps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn greatest_element_examples() {
        assert_eq!(FinitePoset::chain(3).unwrap().greatest_element(), 2);
        assert_eq!(FinitePoset::chain(1).unwrap().greatest_element(), 0);
        let diamond = FinitePoset::new(vec!["a", "b", "c"], &pairs(&[("a", "c"), ("b", "c")])).unwrap();
        assert_eq!(diamond.labels()[diamond.greatest_element()], "c");
    }

    #[test]
    fn relations_are_closed() {
        let p = FinitePoset::new(vec!["x", "y", "z"], &pairs(&[("x", "y"), ("y", "z")])).unwrap();
        assert!(p.leq(0, 2));
        assert!(p.leq(1, 1));
        assert!(!p.leq(2, 0));
    }

    #[test]
    fn invalid_posets() {
        assert!(FinitePoset::new(Vec::<String>::new(), &[]).is_err());
        assert!(FinitePoset::new(vec!["a", "b"], &[]).is_err());
        assert!(FinitePoset::new(vec!["a", "b"], &pairs(&[("a", "b"), ("b", "a")])).is_err());
        assert!(FinitePoset::new(vec!["a", "a"], &[]).is_err());
        assert!(FinitePoset::new(vec!["a"], &pairs(&[("a", "q")])).is_err());
    }

    #[test]
    fn tail_masks() {
        let s = AtomicMeasureSpace::new(vec!["p", "q"], vec![1.0, 1.0]).unwrap();
        let f = L0Function::new(s.clone(), vec![1.0, 0.5]).unwrap();
        assert_eq!(TailSpec::Scalar(f).keep_mask(2), vec![true, false]);
        assert_eq!(TailSpec::Harmonic.keep_mask(2), vec![false, false]);
        assert_eq!(TailSpec::Identity.keep_mask(2), vec![true, true]);
        let bad = L0Function::new(s.clone(), vec![1.5, -0.5]).unwrap();
        assert!(TailSpec::Scalar(bad).validate(&s).is_err());
    }

    #[test]
    fn tail_gain_cases() {
        use TailKind::*;
        assert_eq!(tail_gain(Harmonic, One, 3).sup, Some(1.0));
        assert_eq!(tail_gain(One, Harmonic, 3).sup, None);
        assert_eq!(tail_gain(Const(0.5), Const(0.25), 0).sup, None);
        assert_eq!(tail_gain(Const(0.25), Const(0.5), 0).sup, Some(1.0));
        let g = tail_gain(One, Const(0.0), 0);
        assert!(g.den_zero && !g.positive);
        // a = 0.9, N = 0: r_m = 0.9^m (m + 1), maximal at m = 8 and m = 9.
        let g = tail_gain(Const(0.9), Harmonic, 0);
        let expect = 0.9f64.powi(9) * 10.0;
        assert!((g.sup.unwrap() - expect).abs() < 1e-12);
    }
}
