//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::tol::tolerance;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

const POWER_ITERATION_CAP: usize = 200_000;

/// Singular value threshold below which a direction counts as zero.
pub(crate) fn rank_threshold(sigma_max: f64) -> f64 {
    tolerance() * sigma_max.max(1.0)
}

/// Full SVD data `(singular values, U, V)` with `V` square even for wide matrices.
fn full_svd(a: &Matrix) -> (Vec<f64>, Matrix, Matrix) {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = Matrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = Matrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = Matrix::from_fn(n, order.len(), |r, c| v_t[(order[c], r)]);
    let u = u.rows(0, m).into_owned();
    (sv, u, v)
}

pub fn rank(a: &Matrix) -> usize {
    if a.is_empty() {
        return 0;
    }
    let (sv, _, _) = full_svd(a);
    let thr = rank_threshold(sv.first().copied().unwrap_or(0.0));
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn column_basis(a: &Matrix) -> Matrix {
    let m = a.nrows();
    if a.is_empty() {
        return Matrix::zeros(m, 0);
    }
    let (sv, u, _) = full_svd(a);
    let thr = rank_threshold(sv.first().copied().unwrap_or(0.0));
    let r = sv.iter().filter(|&&s| s > thr).count().min(u.ncols());
    u.columns(0, r).into_owned()
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_basis(a: &Matrix) -> Matrix {
    let n = a.ncols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    let (sv, _, v) = full_svd(a);
    let thr = rank_threshold(sv.first().copied().unwrap_or(0.0));
    let r = sv.iter().filter(|&&s| s > thr).count();
    v.columns(r, n - r).into_owned()
}

/// Least-squares solution of `a x = b` together with the residual norm.
pub fn least_squares(a: &Matrix, b: &Vector) -> (Vector, f64) {
    let n = a.ncols();
    if n == 0 {
        return (Vector::zeros(0), b.norm());
    }
    let (sv, u, v) = full_svd(a);
    let thr = rank_threshold(sv.first().copied().unwrap_or(0.0));
    let mut x = Vector::zeros(n);
    for (k, &s) in sv.iter().enumerate() {
        if s > thr && k < u.ncols() {
            let coef = u.column(k).dot(b) / s;
            x += v.column(k) * coef;
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Column-by-column least squares for `a X = b`, with the largest column residual.
pub fn least_squares_matrix(a: &Matrix, b: &Matrix) -> (Matrix, f64) {
    let mut x = Matrix::zeros(a.ncols(), b.ncols());
    let mut worst = 0.0f64;
    for c in 0..b.ncols() {
        let (col, res) = least_squares(a, &b.column(c).into_owned());
        x.set_column(c, &col);
        worst = worst.max(res);
    }
    (x, worst)
}

/// Solves `a x = b` for square `a`, returning `None` when `a` is numerically singular.
pub fn solve_square(a: &Matrix, b: &Vector) -> Option<Vector> {
    let n = a.nrows();
    if n == 0 {
        return Some(Vector::zeros(0));
    }
    let sv = a.clone().singular_values();
    let max = sv.max();
    if sv.min() <= 1e-10 * max.max(1.0) {
        return None;
    }
    a.clone().lu().solve(b)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Largest singular value of `m` by power iteration on `mᵀm`, with the
/// maximizing right singular vector.
pub fn spectral_norm(m: &Matrix) -> (f64, Vector) {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return (0.0, Vector::zeros(n));
    }
    let gram = m.transpose() * m;
    // Start from the heaviest column of the Gram matrix.
    let start = (0..n)
        .max_by(|&i, &j| gram.column(i).norm().total_cmp(&gram.column(j).norm()))
        .unwrap_or(0);
    let mut x = gram.column(start).into_owned();
    if x.norm() == 0.0 {
        return (0.0, unit(n, 0));
    }
    x /= x.norm();
    let mut lambda = x.dot(&(&gram * &x));
    let eps = tolerance();
    for _ in 0..POWER_ITERATION_CAP {
        let y = &gram * &x;
        let ny = y.norm();
        if ny == 0.0 {
            break;
        }
        let next = y / ny;
        let next_lambda = next.dot(&(&gram * &next));
        let settled = (next_lambda - lambda).abs() <= eps * 1e-3 * next_lambda.max(1.0)
            && (&next - &x).norm() <= eps.sqrt();
        x = next;
        lambda = next_lambda;
        if settled {
            break;
        }
    }
    (lambda.max(0.0).sqrt(), x)
}

/// Standard normal sample by Box–Muller.
pub fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn unit(n: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[k] = 1.0;
    v
}

/// Matrix of `T ↦ T·φ` acting on row-major vectorized `t × j` matrices.
pub fn right_composition(t: usize, phi: &Matrix) -> Matrix {
    let (j, i) = phi.shape();
    let mut out = Matrix::zeros(t * i, t * j);
    for r in 0..t {
        for a in 0..i {
            for b in 0..j {
                out[(r * i + a, r * j + b)] = phi[(b, a)];
            }
        }
    }
    out
}

/// Matrix of `T ↦ ψ·T` acting on row-major vectorized `t × s` matrices.
pub fn left_composition(s: usize, psi: &Matrix) -> Matrix {
    let (u, t) = psi.shape();
    let mut out = Matrix::zeros(u * s, t * s);
    for a in 0..u {
        for b in 0..t {
            for c in 0..s {
                out[(a * s + c, b * s + c)] = psi[(a, b)];
            }
        }
    }
    out
}

pub fn vectorize(m: &Matrix) -> Vector {
    let (r, c) = m.shape();
    Vector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvectorize(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}
