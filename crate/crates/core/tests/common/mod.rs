//! Oracles that recompute quantities without going through the library's algorithms.
#![allow(dead_code)]

use std::path::PathBuf;

use l0mod::linalg::{Matrix, Vector};
use l0mod::norm::Fiber;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Numerical rank from singular values.
pub fn rank(m: &Matrix) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count()
}

/// Gram matrix of an inner-product norm, recovered by polarization from norm evaluations.
pub fn gram(fiber: &Fiber) -> Matrix {
    let n = fiber.dim();
    let e = |k: usize| Vector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
    let sq = |v: &Vector| fiber.eval(v).unwrap().powi(2);
    Matrix::from_fn(n, n, |a, b| (sq(&(e(a) + e(b))) - sq(&(e(a) - e(b)))) / 4.0)
}

/// Minimum of `sqrt(wᵀ G w)` over `{w : A w = b}`, or `None` when the set is empty.
pub fn min_norm_on_affine(g: &Matrix, a: &Matrix, b: &Vector) -> Option<f64> {
    let n = a.ncols();
    if n == 0 {
        return (b.amax() <= 1e-10).then_some(0.0);
    }
    let w0 = if a.nrows() == 0 {
        Vector::zeros(n)
    } else {
        a.clone().svd(true, true).solve(b, 1e-12).unwrap()
    };
    if a.nrows() > 0 && (a * &w0 - b).amax() > 1e-9 * (1.0 + b.amax()) {
        return None;
    }
    // null space from the full SVD of A
    let null: Vec<Vector> = if a.nrows() == 0 {
        (0..n)
            .map(|k| Vector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }))
            .collect()
    } else {
        let padded = if a.nrows() < n {
            let mut p = Matrix::zeros(n, n);
            p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
            p
        } else {
            a.clone()
        };
        let svd = padded.svd(false, true);
        let vt = svd.v_t.unwrap();
        let top = svd.singular_values.max().max(1.0);
        (0..n)
            .filter(|&k| k >= svd.singular_values.len() || svd.singular_values[k] <= 1e-10 * top)
            .map(|k| vt.row(k).transpose())
            .collect()
    };
    let w = if null.is_empty() {
        w0
    } else {
        let nb = Matrix::from_columns(&null);
        let h = nb.transpose() * g * &nb;
        let rhs = -(nb.transpose() * g * &w0);
        let z = h.svd(true, true).solve(&rhs, 1e-14).unwrap();
        w0 + nb * z
    };
    Some((w.transpose() * g * &w)[(0, 0)].max(0.0).sqrt())
}

/// Largest `|T x| / |x|` over random directions, then hill-climbing from the best few.
pub struct SampledNorm {
    pub sampled: f64,
    pub refined: f64,
}

pub fn sample_operator_norm<R: Rng>(
    t: &Matrix,
    source: &Fiber,
    target: &Fiber,
    samples: usize,
    rng: &mut R,
) -> SampledNorm {
    let n = source.dim();
    let ratio = |x: &Vector| {
        let d = source.eval(x).unwrap();
        if d <= 0.0 {
            0.0
        } else {
            target.eval(&(t * x)).unwrap() / d
        }
    };
    let gauss = |rng: &mut R| -> Vector {
        Vector::from_fn(n, |_, _| {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
    };
    let mut pool: Vec<(f64, Vector)> = (0..samples)
        .map(|_| {
            let x = gauss(rng);
            (ratio(&x), x)
        })
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    let sampled = pool.first().map_or(0.0, |p| p.0);
    let mut refined = sampled;
    for (mut best, mut x) in pool.into_iter().take(8) {
        let mut step = 0.1;
        while step > 1e-10 {
            let mut improved = false;
            for _ in 0..40 {
                let scale = x.norm();
                let y = &x + gauss(rng) * (step * scale);
                let r = ratio(&y);
                if r > best {
                    best = r;
                    x = y;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        refined = refined.max(best);
    }
    SampledNorm { sampled, refined }
}
