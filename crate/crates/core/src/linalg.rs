//! Small dense linear-algebra helpers shared by the rest of the crate.
//!
//! Every rank decision goes through [`rank_split`]: singular values are
//! compared against `RANK_CUTOFF * sigma_max`, and a singular value within a
//! factor of ten of that cutoff is reported as ambiguous instead of being
//! silently assigned to either side.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative cutoff on singular values for rank and kernel decisions.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Matrices whose largest singular value is below this are treated as zero.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Singular value decomposition with a full right factor, singular values
/// in decreasing order. `u` has one column per column of the input; columns
/// belonging to zero singular values are zero.
struct FullSvd {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v_t: DMatrix<f64>,
}

/// One-sided Jacobi (Hestenes) SVD.
///
/// nalgebra's bidiagonal SVD can return singular vectors that reconstruct
/// the input only to about 1e-4 when singular values repeat, which is the
/// normal case for torus actions; Jacobi rotations stay accurate there.
fn full_svd(m: &DMatrix<f64>) -> FullSvd {
    let cols = m.ncols();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = DMatrix::zeros(m.nrows(), cols);
    let mut v_t = DMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > 0.0 {
            u.set_column(dst, &(a.column(src) / s));
        }
        v_t.set_row(dst, &v.column(src).transpose());
        sigma.push(s);
    }
    FullSvd { u, sigma, v_t }
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

/// Singular values in decreasing order (`min(rows, cols)` of them).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows().min(m.ncols());
    if m.nrows() < m.ncols() {
        let mut s = full_svd(&m.transpose()).sigma;
        s.truncate(k);
        s
    } else {
        let mut s = full_svd(m).sigma;
        s.truncate(k);
        s
    }
}

/// Numerical rank split of a matrix: `(rank, sigma_max)`.
pub fn rank_split(m: &DMatrix<f64>) -> Result<usize> {
    if m.is_empty() {
        return Ok(0);
    }
    rank_from_singular_values(&singular_values(m))
}

pub(crate) fn rank_from_singular_values(sigma: &[f64]) -> Result<usize> {
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    if sigma_max <= ZERO_FLOOR {
        return Ok(0);
    }
    let cutoff = RANK_CUTOFF * sigma_max;
    let mut rank = 0;
    for &s in sigma {
        if s > cutoff / 10.0 && s < cutoff * 10.0 {
            return Err(Error::NumericalRankAmbiguity {
                singular_value: s,
                cutoff,
            });
        }
        if s >= cutoff * 10.0 {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn kernel(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let cols = m.ncols();
    if m.nrows() == 0 || cols == 0 {
        return Ok(DMatrix::identity(cols, cols));
    }
    let svd = full_svd(m);
    let rank = rank_from_singular_values(&svd.sigma)?;
    let mut basis = DMatrix::zeros(cols, cols - rank);
    for (dst, row) in (rank..cols).enumerate() {
        basis.set_column(dst, &svd.v_t.row(row).transpose());
    }
    Ok(basis)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let svd = full_svd(m);
    let rank = rank_from_singular_values(&svd.sigma)?;
    Ok(svd.u.columns(0, rank).into_owned())
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) columns of `basis` inside `R^ambient`.
pub fn orthogonal_complement(basis: &DMatrix<f64>, ambient: usize) -> Result<DMatrix<f64>> {
    if basis.ncols() == 0 {
        return Ok(DMatrix::identity(ambient, ambient));
    }
    kernel(&basis.transpose())
}

/// Least-squares solution via the pseudo-inverse with relative cutoff
/// [`RANK_CUTOFF`]; returns the solution and the residual norm.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let cols = a.ncols();
    if cols == 0 || a.nrows() == 0 {
        return (DVector::zeros(cols), b.norm());
    }
    let svd = full_svd(a);
    let eps = (RANK_CUTOFF * svd.sigma[0]).max(f64::MIN_POSITIVE);
    let mut x = DVector::zeros(cols);
    for (i, &s) in svd.sigma.iter().enumerate() {
        if s > eps {
            x += svd.v_t.row(i).transpose() * (svd.u.column(i).dot(b) / s);
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Smallest singular value (0 for an empty matrix with columns, +inf for no columns).
pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn sigma_max(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

pub fn sigma_max_c(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Maximum absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Matrix exponential that tolerates the empty matrix.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::zeros(0, 0);
    }
    m.exp()
}

/// Builds a matrix from row-major nested vectors, checking shape.
pub fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    for row in rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Symmetric positive-definite square root and its inverse.
pub fn spd_sqrt(g: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let lo = eig.eigenvalues.min();
    if lo <= 0.0 {
        return Err(Error::precondition("averaged Gram matrix is not positive definite"));
    }
    let d = eig.eigenvalues.map(f64::sqrt);
    let q = &eig.eigenvectors;
    let root = q * DMatrix::from_diagonal(&d) * q.transpose();
    let inv = q * DMatrix::from_diagonal(&d.map(|v| 1.0 / v)) * q.transpose();
    Ok((root, inv))
}

/// Gram-Schmidt-free orthonormalization: orthonormal basis of the span of the columns.
pub fn orthonormalize(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    column_space(m)
}

/// Vectorizes a matrix column-major.
pub fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}
