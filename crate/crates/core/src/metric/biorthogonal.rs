use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, columns, condition_number, dagger, eig, eigvalsh, frobenius, identity, inverse,
    orthonormal_span, zeros, CMatrix, C64,
};
use crate::qalgebra::ChainOperator;
use crate::spectral::{DEFAULT_CLUSTER_TOL, DEFAULT_REALITY_TOL};

use super::MetricCandidate;

/// Largest accepted condition number of the eigenbasis.
pub const ILL_CONDITIONED: f64 = 1e8;

/// Eigenvectors `omega` (unit columns, grouped by eigenvalue), their duals
/// and the Gram matrix `G_{kn} = <omega_k, omega_n>`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiorthogonalSystem {
    pub omegas: CMatrix,
    pub duals: CMatrix,
    pub gram: CMatrix,
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub condition: f64,
}

impl BiorthogonalSystem {
    pub fn dim(&self) -> usize {
        self.omegas.nrows()
    }

    /// Columns belonging to the `j`-th distinct eigenvalue.
    pub fn block(&self, j: usize) -> Range<usize> {
        let start: usize = self.multiplicities[..j].iter().sum();
        start..start + self.multiplicities[j]
    }

    fn block_columns(&self, m: &CMatrix, j: usize) -> CMatrix {
        let idx: Vec<usize> = self.block(j).collect();
        columns(m, &idx)
    }

    /// `P_j = omega_j omega~_j^dagger` for a single column.
    pub fn vector_projector(&self, col: usize) -> CMatrix {
        let w = self
            .omegas
            .column(col)
            .insert_axis(ndarray::Axis(1))
            .to_owned();
        let t = self
            .duals
            .column(col)
            .insert_axis(ndarray::Axis(1))
            .to_owned();
        w.dot(&dagger(&t))
    }

    /// Spectral projector onto the eigenspace of the `j`-th eigenvalue.
    pub fn eigenprojector(&self, j: usize) -> CMatrix {
        let w = self.block_columns(&self.omegas, j);
        let t = self.block_columns(&self.duals, j);
        w.dot(&dagger(&t))
    }

    /// `O(A)` with `A = sum O_{kn} omega_k omega_n^dagger`.
    pub fn symbol(&self, a: &CMatrix) -> CMatrix {
        dagger(&self.duals).dot(a).dot(&self.duals)
    }

    /// `O~(A)` with `A = sum O~_{kn} omega~_k omega~_n^dagger`.
    pub fn dual_symbol(&self, a: &CMatrix) -> CMatrix {
        dagger(&self.omegas).dot(a).dot(&self.omegas)
    }

    /// Largest deviation among the biorthogonality relations and the resolution of unity.
    pub fn residual(&self) -> Result<f64> {
        let n = self.dim();
        let id = identity(n);
        let cross = frobenius(&(dagger(&self.omegas).dot(&self.duals) - &id));
        let dual_gram = frobenius(&(dagger(&self.duals).dot(&self.duals) - inverse(&self.gram)?));
        let mut total = zeros(n);
        for j in 0..self.eigenvalues.len() {
            total = total + self.eigenprojector(j);
        }
        let unity = frobenius(&(total - &id));
        Ok(cross.max(dual_gram).max(unity))
    }
}

/// Eigen-decomposition with real spectrum and complete eigenbasis.
///
/// Inside a degenerate eigenspace the basis is orthonormalised.
pub fn biorthogonal_system_of_matrix(h: &CMatrix, tol: f64) -> Result<BiorthogonalSystem> {
    let n = h.nrows();
    let (vals, vecs) = eig(h)?;
    let rho = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let max_abs_imag = vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_abs_imag > tol * rho {
        return Err(Error::NotQuasiHermitian { max_abs_imag });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].re.total_cmp(&vals[b].re));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if vals[i].re - vals[*g.last().unwrap()].re <= DEFAULT_CLUSTER_TOL * rho => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    let mut omegas = zeros(n);
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut multiplicities = Vec::with_capacity(groups.len());
    let mut col = 0;
    for g in &groups {
        let (basis, ratio) = orthonormal_span(&columns(&vecs, g))?;
        if ratio < 1.0 / ILL_CONDITIONED {
            return Err(Error::IllConditioned {
                condition: 1.0 / ratio,
            });
        }
        for k in 0..g.len() {
            omegas.column_mut(col).assign(&basis.column(k));
            col += 1;
        }
        eigenvalues.push(g.iter().map(|&i| vals[i].re).sum::<f64>() / g.len() as f64);
        multiplicities.push(g.len());
    }
    let condition = condition_number(&omegas)?;
    if !(condition <= ILL_CONDITIONED) {
        return Err(Error::IllConditioned { condition });
    }
    let gram = dagger(&omegas).dot(&omegas);
    let duals = omegas.dot(&inverse(&gram)?);
    Ok(BiorthogonalSystem {
        omegas,
        duals,
        gram,
        eigenvalues,
        multiplicities,
        condition,
    })
}

pub fn biorthogonal_system(h: &ChainOperator, tol: f64) -> Result<BiorthogonalSystem> {
    biorthogonal_system_of_matrix(&h.matrix, tol)
}

fn check_block(phi: &CMatrix, size: usize, index: usize) -> Result<()> {
    if phi.dim() != (size, size) {
        return Err(Error::BadBlock { index });
    }
    let norm = frobenius(phi);
    if norm == 0.0 || frobenius(&(phi - &dagger(phi))) > 1e-10 * norm {
        return Err(Error::BadBlock { index });
    }
    let min = eigvalsh(phi)?.first().copied().unwrap_or(0.0);
    if !(min > 0.0) {
        return Err(Error::BadBlock { index });
    }
    Ok(())
}

/// `eta = sum_j sum_{kn} (Phi_j)_{kn} omega~_{j,k} omega~_{j,n}^dagger` and its inverse
/// `sum_j sum_{kn} (Phi_j^{-1})_{kn} omega_{j,k} omega_{j,n}^dagger`.
pub fn metric_general(
    sys: &BiorthogonalSystem,
    phi_blocks: &[CMatrix],
) -> Result<(MetricCandidate, CMatrix)> {
    if phi_blocks.len() != sys.eigenvalues.len() {
        return Err(Error::Domain(format!(
            "{} blocks given for {} distinct eigenvalues",
            phi_blocks.len(),
            sys.eigenvalues.len()
        )));
    }
    let n = sys.dim();
    let mut eta = zeros(n);
    let mut inv = zeros(n);
    for (j, phi) in phi_blocks.iter().enumerate() {
        check_block(phi, sys.multiplicities[j], j)?;
        let t = sys.block_columns(&sys.duals, j);
        let w = sys.block_columns(&sys.omegas, j);
        eta = eta + t.dot(phi).dot(&dagger(&t));
        inv = inv + w.dot(&inverse(phi)?).dot(&dagger(&w));
    }
    Ok((MetricCandidate::assess(eta)?, inv))
}

/// `eta_0 = Omega* Omega` with `Omega omega_j = e_j`, i.e. all `Phi_j = 1`.
pub fn eta0(h: &ChainOperator) -> Result<MetricCandidate> {
    let sys = biorthogonal_system(h, DEFAULT_REALITY_TOL)?;
    let blocks: Vec<CMatrix> = sys.multiplicities.iter().map(|&m| identity(m)).collect();
    Ok(metric_general(&sys, &blocks)?.0)
}

/// `sum_j Theta_j prod_{n != j}(H* - l_n) prod_{m != j}(H - l_m)` for a simple spectrum.
///
/// Eigenvalues are taken in ascending order.
pub fn polynomial_form_matrix(h: &CMatrix, thetas: &[f64]) -> Result<CMatrix> {
    let n = h.nrows();
    let mut vals = crate::linalg::eigvals(h)?;
    crate::linalg::sort_complex(&mut vals);
    let rho = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if vals
        .windows(2)
        .any(|w| (w[1] - w[0]).norm() <= DEFAULT_CLUSTER_TOL * rho)
    {
        return Err(Error::DegenerateSpectrum(
            "polynomial form needs distinct eigenvalues".into(),
        ));
    }
    if thetas.len() != n {
        return Err(Error::Domain(format!(
            "{} weights given for dimension {n}",
            thetas.len()
        )));
    }
    if thetas.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let mut eta = zeros(n);
    for (j, &theta) in thetas.iter().enumerate() {
        let mut a = identity(n);
        for (m, &l) in vals.iter().enumerate() {
            if m != j {
                let mut shifted = h.clone();
                for i in 0..n {
                    shifted[[i, i]] -= c(l.re);
                }
                a = shifted.dot(&a);
            }
        }
        eta = eta + dagger(&a).dot(&a) * C64::new(theta, 0.0);
    }
    Ok(eta)
}

pub fn metric_polynomial_form(h: &ChainOperator, thetas: &[f64]) -> Result<MetricCandidate> {
    MetricCandidate::assess(polynomial_form_matrix(&h.matrix, thetas)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rel_residual, I};
    use crate::metric::symmetrization_residual;
    use ndarray::array;

    fn pauli() -> [CMatrix; 3] {
        [
            array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
            array![[c(0.0), -I], [I, c(0.0)]],
            array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]],
        ]
    }

    /// `exp(a sigma)` for a Pauli matrix.
    fn pauli_exp(a: f64, s: &CMatrix) -> CMatrix {
        identity(2) * c(a.cosh()) + s * c(a.sinh())
    }

    fn two_level(theta: f64, z: f64) -> CMatrix {
        let [s1, _, s3] = pauli();
        let rot = identity(2) * c(theta.cos()) + s3 * (I * theta.sin());
        rot * c(z.sinh()) + s1 * c(theta.sin() * z.cosh())
    }

    #[test]
    fn hermitian_input_is_orthonormal() {
        let h = array![[c(2.0), I], [-I, c(-1.0)]];
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        assert!(rel_residual(&sys.gram, &identity(2)) < 1e-12);
        assert!(rel_residual(&sys.duals, &sys.omegas) < 1e-12);
        assert!(sys.residual().unwrap() < 1e-12);
    }

    #[test]
    fn two_level_projectors_and_metrics() {
        let (theta, z) = (0.5, 0.3);
        let [s1, s2, _] = pauli();
        let h = two_level(theta, z);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        let lm = theta.cos() * z.sinh() - theta.sin();
        let lp = theta.cos() * z.sinh() + theta.sin();
        assert!((sys.eigenvalues[0] - lm).abs() < 1e-12 && (sys.eigenvalues[1] - lp).abs() < 1e-12);
        let conj = |m: CMatrix| {
            pauli_exp(-z / 2.0, &s2)
                .dot(&m)
                .dot(&pauli_exp(z / 2.0, &s2))
        };
        let p_plus = conj((identity(2) + &s1) * c(0.5));
        let p_minus = conj((identity(2) - &s1) * c(0.5));
        assert!(rel_residual(&sys.eigenprojector(1), &p_plus) < 1e-12);
        assert!(rel_residual(&sys.eigenprojector(0), &p_minus) < 1e-12);

        // eta_0 of unit-norm eigenvectors is cosh z exp(z sigma_2)
        let e0 = eta0(&ChainOperator::new(crate::Spin::HALF, 1, 0.0, h.clone()).unwrap()).unwrap();
        assert!(rel_residual(&e0.eta, &(pauli_exp(z, &s2) * c(z.cosh()))) < 1e-12);

        let phi: f64 = 0.7;
        let blocks = [
            array![[c((-phi).exp() / z.cosh())]],
            array![[c(phi.exp() / z.cosh())]],
        ];
        let (m, inv) = metric_general(&sys, &blocks).unwrap();
        let expected = pauli_exp(z / 2.0, &s2)
            .dot(&pauli_exp(phi, &s1))
            .dot(&pauli_exp(z / 2.0, &s2));
        assert!(rel_residual(&m.eta, &expected) < 1e-12);
        assert!(rel_residual(&m.eta.dot(&inv), &identity(2)) < 1e-12);
        assert!(m.is_positive_definite);
        assert!(symmetrization_residual(&m.eta, &h) < 1e-12);
    }

    #[test]
    fn defective_and_complex_inputs_rejected() {
        let jordan = array![[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        assert!(matches!(
            biorthogonal_system_of_matrix(&jordan, 1e-9),
            Err(Error::IllConditioned { .. } | Error::NotQuasiHermitian { .. })
        ));
        let rot = array![[I, c(0.0)], [c(0.0), -I]];
        assert!(matches!(
            biorthogonal_system_of_matrix(&rot, 1e-9),
            Err(Error::NotQuasiHermitian { .. })
        ));
    }

    #[test]
    fn bad_blocks_rejected() {
        let h = two_level(0.5, 0.3);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        let neg = [array![[c(1.0)]], array![[c(-1.0)]]];
        assert!(matches!(
            metric_general(&sys, &neg),
            Err(Error::BadBlock { index: 1 })
        ));
        let cplx = [array![[I]], array![[c(1.0)]]];
        assert!(matches!(
            metric_general(&sys, &cplx),
            Err(Error::BadBlock { index: 0 })
        ));
    }

    #[test]
    fn polynomial_form_matches_general() {
        let h = two_level(0.4, -0.6);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        let thetas = [0.8, 1.7];
        let poly = polynomial_form_matrix(&h, &thetas).unwrap();
        let gap = (sys.eigenvalues[1] - sys.eigenvalues[0]).powi(2);
        let blocks = [array![[c(thetas[0] * gap)]], array![[c(thetas[1] * gap)]]];
        let (m, _) = metric_general(&sys, &blocks).unwrap();
        assert!(rel_residual(&poly, &m.eta) < 1e-12);
        assert!(matches!(
            polynomial_form_matrix(&identity(2), &[1.0, 1.0]),
            Err(Error::DegenerateSpectrum(_))
        ));
        let scalar = polynomial_form_matrix(&array![[c(3.0)]], &[2.5]).unwrap();
        assert_eq!(scalar, array![[c(2.5)]]);
    }
}
