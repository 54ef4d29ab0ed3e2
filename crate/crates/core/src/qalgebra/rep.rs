use crate::error::Result;
use crate::linalg::{c, phase, zeros, CMatrix, C64};

use super::{q_number, DeformationParams, Spin};

/// The spin-`S` module of `U_q(sl_2)` in the weight basis.
///
/// Row/column `i` carries weight `k = S - i`. `E` raises the weight and sits
/// on the superdiagonal; `F` lowers it and sits on the subdiagonal.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub params: DeformationParams,
    pub e: CMatrix,
    pub f: CMatrix,
    pub k: CMatrix,
    pub k_inv: CMatrix,
    twice_weights: Vec<i32>,
}

impl SpinRep {
    pub fn new(spin: Spin, gamma: f64) -> Result<Self> {
        let params = DeformationParams::new(spin, gamma);
        params.check_range()?;
        let d = spin.dim();
        let s = spin.value();
        let twice_weights: Vec<i32> = (0..d).map(|i| spin.twice() as i32 - 2 * i as i32).collect();
        let mut e = zeros(d);
        let mut f = zeros(d);
        let mut k = zeros(d);
        let mut k_inv = zeros(d);
        for i in 0..d {
            let w = twice_weights[i] as f64 / 2.0;
            k[[i, i]] = phase(gamma * w);
            k_inv[[i, i]] = phase(-gamma * w);
            if i > 0 {
                e[[i - 1, i]] = c((q_number(s - w, gamma) * q_number(s + w + 1.0, gamma)).sqrt());
            }
            if i + 1 < d {
                f[[i + 1, i]] = c((q_number(s + w, gamma) * q_number(s - w + 1.0, gamma)).sqrt());
            }
        }
        Ok(Self {
            params,
            e,
            f,
            k,
            k_inv,
            twice_weights,
        })
    }

    pub fn spin(&self) -> Spin {
        self.params.spin
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn dim(&self) -> usize {
        self.twice_weights.len()
    }

    /// `2k` for each basis vector, descending from `2S`.
    pub fn twice_weights(&self) -> &[i32] {
        &self.twice_weights
    }

    /// Diagonal of `K`, i.e. `q^k` per basis vector.
    pub fn k_diag(&self) -> Vec<C64> {
        self.k.diag().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, rel_residual};

    fn check_relations(spin: Spin, gamma: f64) {
        let r = SpinRep::new(spin, gamma).unwrap();
        // K E K^-1 = q E
        let q = phase(gamma);
        let lhs = r.k.dot(&r.e).dot(&r.k_inv);
        assert!(rel_residual(&lhs, &(r.e.clone() * q)) < 1e-13);
        let lhs = r.k.dot(&r.f).dot(&r.k_inv);
        assert!(rel_residual(&lhs, &(r.f.clone() * q.inv())) < 1e-13);
        // [E, F] = (K^2 - K^-2)/(q - q^-1), i.e. [2k] on the diagonal
        let ef = commutator(&r.e, &r.f);
        for i in 0..r.dim() {
            let k = r.twice_weights()[i] as f64 / 2.0;
            assert!(
                (ef[[i, i]] - c(q_number(2.0 * k, gamma))).norm() < 1e-12,
                "spin {spin} gamma {gamma}"
            );
        }
    }

    #[test]
    fn quantum_group_relations_hold() {
        for twice in 1..=4 {
            for &g in &[0.0, 0.13, 0.4, -0.3] {
                check_relations(Spin::from_twice(twice), g);
            }
        }
    }

    #[test]
    fn spin_half_matrices() {
        let r = SpinRep::new(Spin::HALF, 0.3).unwrap();
        assert_eq!(r.e[[0, 1]], c(1.0));
        assert_eq!(r.f[[1, 0]], c(1.0));
        assert!((r.k[[0, 0]] - phase(0.15)).norm() < 1e-15);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(SpinRep::new(Spin::THREE_HALVES, 1.1).is_err());
    }
}
