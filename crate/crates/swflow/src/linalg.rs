//! Dense real linear-algebra helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn eigh(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Eigenvalues only, sorted ascending.
pub fn eigvalsh(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sided Jacobi SVD. Returns the singular values in descending order
/// together with `m v` and `v`, columns permuted to match.
fn jacobi_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(c, c);
    let negligible = (f64::EPSILON * m.norm()).powi(2);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if alpha.min(beta) <= negligible || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut a, p, q, cs, sn, r);
                rotate(&mut v, p, q, cs, sn, c);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|j| a.column(j).norm()).collect();
    let mut idx: Vec<usize> = (0..c).collect();
    idx.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sv = idx.iter().map(|&j| norms[j]).collect();
    let av = DMatrix::from_fn(r, c, |i, j| a[(i, idx[j])]);
    let vv = DMatrix::from_fn(c, c, |i, j| v[(i, idx[j])]);
    (sv, av, vv)
}

fn rotate(m: &mut DMatrix<f64>, p: usize, q: usize, cs: f64, sn: f64, rows: usize) {
    for i in 0..rows {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = cs * x - sn * y;
        m[(i, q)] = sn * x + cs * y;
    }
}

/// Singular values in descending order, one per column.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    jacobi_svd(m).0
}

/// Numerical rank with threshold `rel_tol * sigma_max`.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = singular_values(m);
    let smax = sv[0];
    sv.iter().filter(|&&s| s > rel_tol * smax && s > 0.0).count()
}

/// Orthonormal basis of the kernel, singular values at or below `rel_tol * sigma_max`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    let rk = rank(m, rel_tol);
    smallest_right_singular(m, c - rk)
}

/// The `k` right singular vectors with the smallest singular values (counting
/// implicit zeros when the matrix is wide).
pub fn smallest_right_singular(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if k == 0 {
        return DMatrix::zeros(c, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c).columns(0, k).into_owned();
    }
    let (_, _, v) = jacobi_svd(m);
    v.columns(c - k, k).into_owned()
}

/// Orthonormal basis of the `k`-dimensional kernel of a wide matrix of full row
/// rank, from a column-pivoted QR factorization; falls back to the SVD when the
/// pivoted triangular factor is ill-conditioned.
pub fn wide_null_space(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if k == 0 {
        return DMatrix::zeros(c, 0);
    }
    if r == 0 || c != r + k {
        return smallest_right_singular(m, k);
    }
    let qr = m.clone().col_piv_qr();
    let rr = qr.r();
    let diag_max = (0..r).map(|i| rr[(i, i)].abs()).fold(0.0, f64::max);
    let diag_min = (0..r).map(|i| rr[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(diag_min > 1e-10 * diag_max) {
        return smallest_right_singular(m, k);
    }
    let r1 = rr.columns(0, r).into_owned();
    let r2 = rr.columns(r, k).into_owned();
    let Some(x) = r1.solve_upper_triangular(&r2) else {
        return smallest_right_singular(m, k);
    };
    let mut basis = vcat(&(-x), &DMatrix::identity(k, k));
    qr.p().inv_permute_rows(&mut basis);
    orth(&basis, 0.0)
}

/// Smallest singular value of a matrix with at least as many columns as rows,
/// i.e. the surjectivity margin.
pub fn min_singular(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let gram = m * m.transpose();
    eigvalsh(&gram)[0].max(0.0).sqrt()
}

/// Orthonormal basis of the column space, dropping directions below `rel_tol * sigma_max`.
pub fn orth(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 || r == 0 {
        return DMatrix::zeros(r, 0);
    }
    let (sv, av, _) = jacobi_svd(m);
    let keep = sv.iter().filter(|&&s| s > rel_tol * sv[0] && s > 0.0).count().min(r);
    normalized_columns(&av, &sv, keep)
}

/// The `k` left singular vectors with the largest singular values.
pub fn leading_left_singular(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let r = m.nrows();
    if k == 0 || m.ncols() == 0 {
        return DMatrix::zeros(r, 0);
    }
    let (sv, av, _) = jacobi_svd(m);
    let k = k.min(m.ncols()).min(r);
    let nonzero = sv.iter().take(k).filter(|&&s| s > 0.0).count();
    complete_columns(&normalized_columns(&av, &sv, nonzero), k)
}

/// Orthogonal polar factor `u v^T` of a square matrix.
pub fn polar(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return m.clone();
    }
    let (sv, av, v) = jacobi_svd(m);
    let nonzero = sv.iter().filter(|&&s| s > f64::EPSILON * sv[0] * n as f64).count();
    let u = complete_columns(&normalized_columns(&av, &sv, nonzero), n);
    u * v.transpose()
}

fn normalized_columns(av: &DMatrix<f64>, sv: &[f64], k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(av.nrows(), k, |i, j| av[(i, j)] / sv[j])
}

/// Extends orthonormal columns to `k` orthonormal columns.
fn complete_columns(u: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (r, have) = u.shape();
    if have >= k {
        return u.clone();
    }
    let q = hcat(u, &DMatrix::identity(r, r)).qr().q();
    let extra = q.columns(have, k - have).into_owned();
    hcat(u, &extra)
}

/// Determinant with the convention `det` of a 0x0 matrix equal to 1.
pub fn det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        1.0
    } else {
        m.determinant()
    }
}

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry of `m - m^T`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    (m - m.transpose()).amax()
}

/// Horizontal concatenation `[a | b]`.
pub fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Vertical concatenation `[a; b]`.
pub fn vcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Block-diagonal sum.
pub fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}
