use serde::{Deserialize, Serialize};

use crate::chain::{hamiltonian, ChainSpec, CouplingSchedule};
use crate::error::{Error, Result};
use crate::linalg::{c, eigvals, frobenius, identity, submatrix, CMatrix, C64};
use crate::qalgebra::{q_bracket, q_number, ChainOperator, Spin};

use super::{block_components, cluster_values, spectral_radius};

const RESIDUAL_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimalPolynomialReport {
    pub distinct_roots: Vec<C64>,
    /// Algebraic multiplicity of each root.
    pub multiplicities: Vec<usize>,
    /// Largest over decoupled blocks of `||prod (B - l_k)||_F / prod ||B - l_k||_F`.
    pub residual: f64,
    /// Absolute clustering threshold actually used.
    pub cluster_tol: f64,
}

impl MinimalPolynomialReport {
    pub fn degree(&self) -> usize {
        self.distinct_roots.len()
    }
}

fn block_residual(block: &CMatrix, roots: &[C64]) -> f64 {
    let n = block.nrows();
    let mut prod = identity(n);
    let mut norms = 1.0;
    for &r in roots {
        let mut shifted = block.clone();
        for i in 0..n {
            shifted[[i, i]] -= r;
        }
        norms *= frobenius(&shifted);
        prod = prod.dot(&shifted);
    }
    if norms == 0.0 {
        0.0
    } else {
        frobenius(&prod) / norms
    }
}

fn attempt(blocks: &[(CMatrix, Vec<C64>)], tol: f64) -> (Vec<super::Cluster>, f64) {
    let mut residual: f64 = 0.0;
    let mut centers = Vec::new();
    for (block, values) in blocks {
        let clusters = cluster_values(values, tol);
        let roots: Vec<C64> = clusters.iter().map(|cl| cl.center).collect();
        residual = residual.max(block_residual(block, &roots));
        for cl in clusters {
            centers.extend(std::iter::repeat_n(cl.center, cl.multiplicity));
        }
    }
    (cluster_values(&centers, tol), residual)
}

/// Distinct eigenvalues whose linear factors annihilate `op`.
///
/// `cluster_tol` is relative to `max(1, spectral radius)`.
pub fn minimal_polynomial(op: &ChainOperator, cluster_tol: f64) -> Result<MinimalPolynomialReport> {
    minimal_polynomial_of_matrix(&op.matrix, cluster_tol)
}

pub fn minimal_polynomial_of_matrix(
    m: &CMatrix,
    cluster_tol: f64,
) -> Result<MinimalPolynomialReport> {
    let mut blocks = Vec::new();
    for idx in block_components(m) {
        let b = submatrix(m, &idx);
        let vals = if idx.len() == 1 {
            vec![b[[0, 0]]]
        } else {
            eigvals(&b)?
        };
        blocks.push((b, vals));
    }
    let all: Vec<C64> = blocks.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let scale = spectral_radius(&all).max(1.0);
    let mut tol = cluster_tol * scale;
    let (mut clusters, mut residual) = attempt(&blocks, tol);
    if residual > RESIDUAL_THRESHOLD {
        tol *= 10.0;
        (clusters, residual) = attempt(&blocks, tol);
    }
    if residual > RESIDUAL_THRESHOLD {
        return Err(Error::NotDiagonalizable { residual });
    }
    Ok(MinimalPolynomialReport {
        distinct_roots: clusters.iter().map(|cl| cl.center).collect(),
        multiplicities: clusters.iter().map(|cl| cl.multiplicity).collect(),
        residual,
        cluster_tol: tol,
    })
}

/// Tabulated `d_k^{S,s}` for `S in {1, 3/2}`, `s >= 1`, in the tabulated order.
pub fn dk_table(spin: Spin, s: u32, gamma: f64) -> Option<Vec<f64>> {
    let br = |t: f64| q_bracket(t, gamma);
    let qn = |t: f64| q_number(t, gamma);
    let sq = |x: f64| x * x;
    let table = match (spin.twice(), s) {
        (2, 1) => vec![1.0 / sq(br(2.0)), sq(br(3.0) / (br(1.0) * br(2.0)))],
        (2, 2) => vec![1.0 / sq(br(2.0)), sq(1.0 / (br(2.0) * qn(3.0))), 1.0],
        (3, 1) => vec![
            sq(qn(3.0) / (br(2.0) * qn(5.0))),
            1.0 / sq(br(2.0)),
            sq((qn(2.0) * qn(6.0) - 1.0) / (qn(4.0) * qn(5.0))),
        ],
        (3, 2) => vec![
            1.0 / sq(br(3.0)),
            1.0 / sq(br(2.0)),
            sq(br(5.0) / (br(2.0) * br(3.0))),
            sq((qn(5.0) - 2.0) / (br(2.0) * br(3.0))),
        ],
        (3, 3) => vec![
            1.0 / sq(br(3.0)),
            sq(br(1.0) / (br(3.0) * qn(5.0))),
            sq(1.0 / (br(2.0) * br(3.0) * qn(5.0))),
            1.0,
        ],
        _ => return None,
    };
    Some(table)
}

/// Every `d_k^{S,s}` of the three-site chain: `mu_S` for `s = 0`, otherwise the
/// tabulated list, plus `d = 1` for `S = 1, s = 1`. That last factor comes
/// from the three-site singlet, which lies in the `s = 1` channel of both
/// bonds and so has eigenvalue `a_1 + a_2`; the table omits it.
pub fn dk_complete(spin: Spin, s: u32, gamma: f64) -> Option<Vec<f64>> {
    if s == 0 {
        return Some(vec![super::mu_s(spin, gamma)]);
    }
    let mut ds = dk_table(spin, s, gamma)?;
    if spin == Spin::ONE && s == 1 {
        ds.push(1.0);
    }
    Some(ds)
}

const DK_SAMPLES: [(f64, f64); 2] = [(1.0, 0.43), (0.71, 1.93)];

fn dk_from_roots(roots: &[C64], a1: f64, a2: f64) -> Result<Vec<f64>> {
    let sum = a1 + a2;
    let scale = sum.abs().max(1.0);
    let tol = 1e-6 * scale;
    let mut rest: Vec<C64> = roots.to_vec();
    let mut ds = Vec::new();
    let zero = rest.iter().position(|z| z.norm() < tol);
    let full = rest.iter().position(|z| (z - c(sum)).norm() < tol);
    match (zero, full) {
        (Some(i), Some(j)) => {
            ds.push(1.0);
            let (hi, lo) = (i.max(j), i.min(j));
            rest.remove(hi);
            rest.remove(lo);
        }
        (Some(i), None) => {
            rest.remove(i);
        }
        _ => {}
    }
    while let Some(l) = rest.pop() {
        let partner = c(sum) - l;
        let d = if (l - partner).norm() < tol {
            1.0 - (l * l).re / (a1 * a2)
        } else {
            let j = rest
                .iter()
                .position(|z| (z - partner).norm() < tol)
                .ok_or_else(|| Error::Fit(format!("root {l} has no partner summing to {sum}")))?;
            let lp = rest.remove(j);
            1.0 - (l * lp).re / (a1 * a2)
        };
        ds.push(d);
    }
    ds.sort_by(f64::total_cmp);
    Ok(ds)
}

/// Numerically extract the quadratic-factor coefficients `d_k^{S,s}` of the
/// `N = 3` chain from its minimal-polynomial roots, sorted ascending.
///
/// Two coupling samples are used and must agree.
pub fn extract_dk(spin: Spin, s: u32, gamma: f64) -> Result<Vec<f64>> {
    let mut result: Option<Vec<f64>> = None;
    for &(a1, a2) in &DK_SAMPLES {
        let spec = ChainSpec::new(
            spin,
            3,
            gamma,
            CouplingSchedule::SingleS { s, a: vec![a1, a2] },
        )?;
        let h = hamiltonian(&spec)?;
        let mp = minimal_polynomial(&h, super::DEFAULT_CLUSTER_TOL)?;
        let ds = dk_from_roots(&mp.distinct_roots, a1, a2)?;
        if let Some(prev) = &result {
            let agree =
                prev.len() == ds.len() && prev.iter().zip(&ds).all(|(x, y)| (x - y).abs() < 1e-7);
            if !agree {
                return Err(Error::Fit(format!(
                    "coupling samples disagree: {prev:?} vs {ds:?}"
                )));
            }
        } else {
            result = Some(ds);
        }
    }
    Ok(result.unwrap_or_default())
}


#[cfg(test)]
mod singlet_tests {
    use super::*;

    #[test]
    fn spin_one_singlet_has_eigenvalue_sum() {
        let (a1, a2, g) = (0.8, -1.3, 0.2);
        let spec = ChainSpec::new(
            Spin::ONE,
            3,
            g,
            CouplingSchedule::SingleS {
                s: 1,
                a: vec![a1, a2],
            },
        )
        .unwrap();
        let roots = minimal_polynomial(&hamiltonian(&spec).unwrap(), 1e-7)
            .unwrap()
            .distinct_roots;
        assert!(roots.iter().any(|r| (r - c(a1 + a2)).norm() < 1e-9));
        assert!(dk_table(Spin::ONE, 1, g)
            .unwrap()
            .iter()
            .all(|&d| (d - 1.0).abs() > 0.1));
    }
}
