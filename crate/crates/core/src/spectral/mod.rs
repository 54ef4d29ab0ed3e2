//! Spectra, minimal polynomials and reality boundaries of chain Hamiltonians.

mod conjectures;
mod factors;
mod minpoly;
mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals, is_finite, sort_complex, submatrix, CMatrix, C64};
use crate::qalgebra::{total_weights_twice, ChainOperator};

pub use conjectures::{
    conjecture_support, conjectured_bound, BoundaryCase, ConjectureReport, Counterexample,
    POSITIVE_COUPLING_CASES,
};
pub use factors::{mp03_roots, mp04b_roots, mp05b_roots, mu_s, quadratic_roots};
pub use minpoly::{
    dk_complete, dk_table, extract_dk, minimal_polynomial, minimal_polynomial_of_matrix,
    MinimalPolynomialReport,
};
pub use scan::{
    chebyshev_boundary, chebyshev_u, read_scan_csv, reality_boundary, RealityScan, ScanOptions,
    ScanRow,
};

pub const DEFAULT_REALITY_TOL: f64 = 1e-9;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    pub max_abs_imag: f64,
    pub spectral_radius: f64,
    pub tol: f64,
    pub is_real: bool,
    pub clusters: Vec<Cluster>,
}

/// Index sets of the connected components of the sparsity graph of `m`.
///
/// Eigenvalues of `m` are the union of those of the principal submatrices.
pub fn block_components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ((i, j), z) in m.indexed_iter() {
        if i != j && (z.re != 0.0 || z.im != 0.0) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// All eigenvalues, solving each decoupled block separately.
pub fn blockwise_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if !is_finite(m) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut out = Vec::with_capacity(m.nrows());
    for idx in block_components(m) {
        if idx.len() == 1 {
            out.push(m[[idx[0], idx[0]]]);
        } else {
            out.extend(eigvals(&submatrix(m, &idx))?);
        }
    }
    Ok(out)
}

/// Eigenvalues of the lowest non-negative total-weight sector when `op`
/// commutes with the total weight; every isotypic component meets that
/// sector, so the distinct eigenvalues are all present. Falls back to the
/// full spectrum otherwise.
pub fn distinct_spectrum_probe(op: &ChainOperator) -> Result<Vec<C64>> {
    let weights = total_weights_twice(op.spin, op.sites);
    let m = &op.matrix;
    let conserves = m
        .indexed_iter()
        .all(|((i, j), z)| weights[i] == weights[j] || (z.re == 0.0 && z.im == 0.0));
    if !conserves {
        return blockwise_eigenvalues(m);
    }
    let lowest = weights.iter().map(|w| w.unsigned_abs()).min().unwrap_or(0) as i32;
    let idx: Vec<usize> = (0..weights.len())
        .filter(|&i| weights[i] == lowest)
        .collect();
    blockwise_eigenvalues(&submatrix(m, &idx))
}

/// Single-linkage clustering with absolute threshold `tol`.
pub fn cluster_values(values: &[C64], tol: f64) -> Vec<Cluster> {
    let mut sorted = values.to_vec();
    sort_complex(&mut sorted);
    let n = sorted.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if sorted[j].re - sorted[i].re > tol {
                break;
            }
            if (sorted[j] - sorted[i]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for (i, z) in sorted.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(*z);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|zs| Cluster {
            center: zs.iter().sum::<C64>() / zs.len() as f64,
            multiplicity: zs.len(),
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    clusters
}

pub(crate) fn spectral_radius(values: &[C64]) -> f64 {
    values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Relative imaginary size `max |Im| / max(1, rho)`.
pub fn relative_imag(values: &[C64]) -> f64 {
    let max_imag = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    max_imag / spectral_radius(values).max(1.0)
}

/// Spectrum with reality verdict at relative tolerance `tol`.
pub fn spectrum(op: &ChainOperator, tol: f64) -> Result<SpectrumReport> {
    spectrum_of_matrix(&op.matrix, tol)
}

pub fn spectrum_of_matrix(m: &CMatrix, tol: f64) -> Result<SpectrumReport> {
    let mut eigenvalues = blockwise_eigenvalues(m)?;
    sort_complex(&mut eigenvalues);
    let max_abs_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let rho = spectral_radius(&eigenvalues);
    let scale = rho.max(1.0);
    let clusters = cluster_values(&eigenvalues, DEFAULT_CLUSTER_TOL * scale);
    Ok(SpectrumReport {
        max_abs_imag,
        spectral_radius: rho,
        tol,
        is_real: max_abs_imag <= tol * scale,
        clusters,
        eigenvalues,
    })
}
