//! Metric operators: dynamical ones from eigenvectors and universal ones
//! from products of R-matrices.

mod biorthogonal;
mod universal;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{dagger, eigh, frobenius, CMatrix, C64};

pub use biorthogonal::{
    biorthogonal_system, biorthogonal_system_of_matrix, eta0, metric_general,
    metric_polynomial_form, polynomial_form_matrix, BiorthogonalSystem, ILL_CONDITIONED,
};
pub use universal::{
    alpha0, bond_intertwining_residual, conjugation_residual, det_formula_check, eta_product,
    gamma_hat, hermitian_metric, isotypic_identity_check, multiparam_metric, pd_range_scan,
    universal_eta, DetCheck, PdScan, ProductOrder, UniversalMetricPair,
};

pub const HERMITICITY_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricCandidate {
    pub eta: CMatrix,
    /// `||eta - eta*||_F / ||eta||_F`.
    pub hermiticity_residual: f64,
    pub min_eig_hermitian_part: f64,
    pub is_positive_definite: bool,
}

impl MetricCandidate {
    pub fn assess(eta: CMatrix) -> Result<Self> {
        let norm = frobenius(&eta);
        let hermiticity_residual = if norm == 0.0 {
            0.0
        } else {
            frobenius(&(&eta - &dagger(&eta))) / norm
        };
        let (vals, _) = eigh(&eta)?;
        let min_eig = vals.first().copied().unwrap_or(0.0);
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let is_positive_definite = hermiticity_residual < HERMITICITY_TOL
            && min_eig > POSITIVITY_TOL * scale
            && scale > 0.0;
        Ok(Self {
            eta,
            hermiticity_residual,
            min_eig_hermitian_part: min_eig,
            is_positive_definite,
        })
    }

    /// See [`symmetrization_residual`].
    pub fn symmetrizes(&self, h: &CMatrix) -> f64 {
        symmetrization_residual(&self.eta, h)
    }

    pub fn diagnostics(&self, gamma: f64, alpha: Option<f64>) -> MetricDiagnostics {
        MetricDiagnostics {
            hermiticity_residual: self.hermiticity_residual,
            min_eig: self.min_eig_hermitian_part,
            is_pd: self.is_positive_definite,
            gamma,
            alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDiagnostics {
    pub hermiticity_residual: f64,
    pub min_eig: f64,
    pub is_pd: bool,
    pub gamma: f64,
    pub alpha: Option<f64>,
}

/// `||eta H - H* eta||_F / (||eta||_F ||H||_F)`.
pub fn symmetrization_residual(eta: &CMatrix, h: &CMatrix) -> f64 {
    let scale = frobenius(eta) * frobenius(h);
    let r = frobenius(&(eta.dot(h) - dagger(h).dot(eta)));
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

/// `eta^{1/2}` and `eta^{-1/2}` of a positive definite `eta`, eigenvalues clamped at zero.
pub fn sqrt_and_inverse_sqrt(eta: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (vals, vecs) = eigh(eta)?;
    let vh = dagger(&vecs);
    let scaled = |f: &dyn Fn(f64) -> f64| {
        let mut m = vecs.clone();
        for (j, &v) in vals.iter().enumerate() {
            let w = f(v.max(0.0));
            m.column_mut(j).mapv_inplace(|z| z * w);
        }
        m.dot(&vh)
    };
    Ok((
        scaled(&|v: f64| v.sqrt()),
        scaled(&|v: f64| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 }),
    ))
}

/// Relative anti-Hermitian part of `eta^{1/2} H eta^{-1/2}`.
pub fn similarity_transport(eta: &CMatrix, h: &CMatrix) -> Result<f64> {
    let (root, inv_root) = sqrt_and_inverse_sqrt(eta)?;
    let h0 = root.dot(h).dot(&inv_root);
    let norm = frobenius(&h0);
    let r = frobenius(&(&h0 - &dagger(&h0)));
    Ok(if norm == 0.0 { r } else { r / norm })
}

/// Row-major `[re, im]` pairs.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    let data: Vec<[f64; 2]> = m.iter().map(|z: &C64| [z.re, z.im]).collect();
    serde_json::json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn matrix_from_json(value: &serde_json::Value) -> Result<CMatrix> {
    let bad = || crate::error::Error::Parse("expected {rows, cols, data: [[re, im], ...]}".into());
    let rows = value["rows"].as_u64().ok_or_else(bad)? as usize;
    let cols = value["cols"].as_u64().ok_or_else(bad)? as usize;
    let pairs: Vec<[f64; 2]> = serde_json::from_value(value["data"].clone()).map_err(|_| bad())?;
    if pairs.len() != rows * cols {
        return Err(bad());
    }
    let v: Vec<C64> = pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
    CMatrix::from_shape_vec((rows, cols), v).map_err(|_| bad())
}
