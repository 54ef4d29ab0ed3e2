//! Dense complex matrix helpers shared by every module.
//!
//! Everything here is a thin layer over `ndarray` and LAPACK (through
//! `ndarray-linalg`); nothing is specific to spin chains.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{DeterminantInto, Eig, EigVals, EigValsh, Eigh, Inverse, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `exp(i * phase)`.
#[inline]
pub fn phase(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

pub fn identity(dim: usize) -> CMatrix {
    Array2::from_diag_elem(dim, c(1.0))
}

pub fn zeros(dim: usize) -> CMatrix {
    Array2::zeros((dim, dim))
}

pub fn diag(entries: &[C64]) -> CMatrix {
    Array2::from_diag(&Array1::from(entries.to_vec()))
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut iter = factors.iter();
    let first = iter.next().cloned().unwrap_or_else(|| identity(1));
    iter.fold(first, |acc, f| kron(&acc, f))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

/// `||a - b||_F / max(1, ||a||_F, ||b||_F)`.
pub fn rel_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = frobenius(a).max(frobenius(b)).max(1.0);
    frobenius(&(a - b)) / scale
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    Ok(m.inv()?)
}

/// Eigenvalues and unit-norm right eigenvectors (columns) of a general matrix.
pub fn eig(m: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), zeros(0)));
    }
    let (vals, vecs) = m.eig().map_err(|e| Error::Convergence(e.to_string()))?;
    Ok((vals.to_vec(), vecs))
}

pub fn eigvals(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let vals = m.eigvals().map_err(|e| Error::Convergence(e.to_string()))?;
    Ok(vals.to_vec())
}

/// Eigen-decomposition of the Hermitian part `(m + m*)/2`, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let h = hermitian_part(m);
    let (vals, vecs) = h
        .eigh(UPLO::Upper)
        .map_err(|e| Error::Convergence(e.to_string()))?;
    // LAPACK sees the row-major buffer as the transpose, i.e. the conjugate
    Ok((vals.to_vec(), vecs.mapv(|z| z.conj())))
}

pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    let h = hermitian_part(m);
    let vals = h
        .eigvalsh(UPLO::Upper)
        .map_err(|e| Error::Convergence(e.to_string()))?;
    Ok(vals.to_vec())
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &dagger(m)) * c(0.5)
}

/// `(ln |det m|, det m / |det m|)` via LU.
pub fn log_det(m: &CMatrix) -> Result<(f64, C64)> {
    let (sign, ln) = m.clone().sln_det_into()?;
    Ok((ln, sign))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMatrix) -> Result<f64> {
    use ndarray_linalg::SVD;
    let (_, s, _) = m.svd(false, false)?;
    let max = s.iter().cloned().fold(0.0_f64, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Orthonormalise the given columns (modified Gram–Schmidt, twice).
pub fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    let cols = q.ncols();
    for _pass in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let qk = q.column(k).to_owned();
                let proj: C64 = qk
                    .iter()
                    .zip(q.column(j).iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let mut cj = q.column_mut(j);
                cj.zip_mut_with(&qk, |x, &y| *x -= proj * y);
            }
            let norm = q.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                q.column_mut(j).mapv_inplace(|z| z / norm);
            }
        }
    }
    q
}

/// Orthonormal basis of the column span and the ratio of smallest to largest
/// singular value (zero when the columns are dependent).
pub fn orthonormal_span(m: &CMatrix) -> Result<(CMatrix, f64)> {
    use ndarray_linalg::{JobSvd, SVDDC};
    if m.ncols() == 0 {
        return Ok((m.clone(), 1.0));
    }
    let (u, s, _) = m.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| Error::Linalg("SVD returned no left vectors".into()))?;
    let max = s.iter().cloned().fold(0.0_f64, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = m.ncols().min(m.nrows());
    Ok((
        u.slice(ndarray::s![.., ..k]).to_owned(),
        if max == 0.0 { 0.0 } else { min / max },
    ))
}

/// Select the given columns of `m`, in order.
pub fn columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    m.select(Axis(1), idx)
}

/// Principal submatrix on the index set `idx`.
pub fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    m.select(Axis(0), idx).select(Axis(1), idx)
}

/// Matrix power by repeated squaring (`n >= 0`).
pub fn matrix_power(m: &CMatrix, mut n: usize) -> CMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = result.dot(&base);
        }
        n >>= 1;
        if n > 0 {
            base = base.dot(&base);
        }
    }
    result
}

/// Sort complex numbers by real part, then imaginary part.
pub fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eigh_vectors_are_eigenvectors() {
        let a = array![[c(2.0), I], [-I, c(3.0)]];
        let (vals, vecs) = eigh(&a).unwrap();
        for (j, &l) in vals.iter().enumerate() {
            let v = vecs.column(j).to_owned();
            let r = a.dot(&v) - v.mapv(|z| z * l);
            assert!(r.iter().map(|z| z.norm()).sum::<f64>() < 1e-14);
        }
    }

    #[test]
    fn eig_vectors_are_eigenvectors() {
        let a = array![[c(1.0), C64::new(2.0, 1.0)], [c(0.5), I]];
        let (vals, vecs) = eig(&a).unwrap();
        for (j, &l) in vals.iter().enumerate() {
            let v = vecs.column(j).to_owned();
            let r = a.dot(&v) - v.mapv(|z| z * l);
            assert!(r.iter().map(|z| z.norm()).sum::<f64>() < 1e-14);
        }
    }

    #[test]
    fn kron_matches_block_definition() {
        let a = array![[c(1.0), c(2.0)], [c(3.0), c(4.0)]];
        let b = array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 1]], c(1.0));
        assert_eq!(k[[1, 0]], c(1.0));
        assert_eq!(k[[2, 1]], c(3.0));
        assert_eq!(k[[3, 2]], c(4.0));
        assert_eq!(k[[0, 3]], c(2.0));
        assert_eq!(k[[0, 0]], c(0.0));
    }

    #[test]
    fn matrix_power_small_cases() {
        let a = array![[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        let a5 = matrix_power(&a, 5);
        assert_eq!(a5[[0, 1]], c(5.0));
        assert_eq!(matrix_power(&a, 0), identity(2));
    }

    #[test]
    fn log_det_of_diagonal() {
        let d = diag(&[c(2.0), c(-3.0), I]);
        let (ln, sign) = log_det(&d).unwrap();
        assert!((ln - 6.0_f64.ln()).abs() < 1e-12);
        // 2 * (-3) * i = -6i
        assert!((sign - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_produces_unitary() {
        let m = array![[c(1.0), c(1.0)], [c(0.0), c(1e-3)]];
        let q = orthonormalize_columns(&m);
        let g = dagger(&q).dot(&q);
        assert!(rel_residual(&g, &identity(2)) < 1e-12);
    }
}
