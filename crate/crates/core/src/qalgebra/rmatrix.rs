use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{diag, identity, kron, phase, zeros, CMatrix, C64};

use super::casimir::{coproduct_action, Generator};
use super::{guard_denominator, q_factorial, total_weights_twice, ChainOperator, SpinRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RSign {
    Plus,
    Minus,
}

/// Which tensor factor of `R` is split by the coproduct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FusedFactor {
    /// `(Delta (x) id) R`, acting on sites `(12)3`.
    Left,
    /// `(id (x) Delta) R`, acting on sites `1(23)`.
    Right,
}

/// `q^{H(x)H} [sum_n q^{(n^2-n)/2} / [n]! ((q - q^-1) A (x) B)^n] q^{H(x)H}` with `q = e^{i g}`.
fn universal_series(a: &CMatrix, b: &CMatrix, wl: &[i32], wr: &[i32], g: f64) -> Result<CMatrix> {
    let q = phase(g);
    let dl = a.nrows();
    let dr = b.nrows();
    let mut dvals = Vec::with_capacity(dl * dr);
    for &x in wl {
        for &y in wr {
            dvals.push(phase(g * (x * y) as f64 / 4.0));
        }
    }
    let d = diag(&dvals);
    let mut sum = zeros(dl * dr);
    let mut an = identity(dl);
    let mut bn = identity(dr);
    let nmax = dl.min(dr);
    for n in 0..nmax {
        let term = kron(&an, &bn);
        if term.iter().all(|z| z.norm() == 0.0) {
            break;
        }
        let fact = guard_denominator(q_factorial(n, g), g, || {
            format!("[{n}]! in the R-matrix series")
        })?;
        let coeff: C64 =
            phase(g * ((n * n) as f64 - n as f64) / 2.0) * (q - q.inv()).powu(n as u32) / fact;
        sum = sum + term * coeff;
        an = an.dot(a);
        bn = bn.dot(b);
    }
    Ok(d.dot(&sum).dot(&d))
}

/// `R^+_{12}`, or `R^-_{12} = P (R^+)^{-1} P`, on `V_S (x) V_S`.
///
/// `R^-` is built from the same series at `q -> q^-1` with the roles of `E` and `F` swapped.
pub fn r_matrix(rep: &SpinRep, sign: RSign) -> Result<ChainOperator> {
    let w = rep.twice_weights();
    let g = rep.gamma();
    let m = match sign {
        RSign::Plus => universal_series(&rep.f, &rep.e, w, w, g)?,
        RSign::Minus => universal_series(&rep.e, &rep.f, w, w, -g)?,
    };
    ChainOperator::new(rep.spin(), 2, g, m)
}

/// `R^\pm` with one factor replaced by its coproduct image, on three sites.
pub fn r_matrix_fused(rep: &SpinRep, sign: RSign, factor: FusedFactor) -> Result<ChainOperator> {
    let g = rep.gamma();
    let single = rep.twice_weights().to_vec();
    let pair = total_weights_twice(rep.spin(), 2);
    let (lower, upper, gg) = match sign {
        RSign::Plus => (Generator::F, Generator::E, g),
        RSign::Minus => (Generator::E, Generator::F, -g),
    };
    let single_of = |gen: Generator| match gen {
        Generator::E => rep.e.clone(),
        Generator::F => rep.f.clone(),
        Generator::K => rep.k.clone(),
    };
    let m = match factor {
        FusedFactor::Left => {
            let a = coproduct_action(rep, 2, lower)?.matrix;
            universal_series(&a, &single_of(upper), &pair, &single, gg)?
        }
        FusedFactor::Right => {
            let b = coproduct_action(rep, 2, upper)?.matrix;
            universal_series(&single_of(lower), &b, &single, &pair, gg)?
        }
    };
    ChainOperator::new(rep.spin(), 3, g, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, dagger, inverse, log_det, rel_residual};
    use crate::qalgebra::{embed_pair, permutation_operator, Spin};
    use ndarray::array;

    #[test]
    fn spin_half_r_matrix_explicit() {
        let g = 0.4;
        let rep = SpinRep::new(Spin::HALF, g).unwrap();
        let r = r_matrix(&rep, RSign::Plus).unwrap().matrix;
        let q = phase(g);
        let h = q.sqrt();
        let z = c(0.0);
        // rows/cols ordered ++, +-, -+, --
        let expected = array![
            [h, z, z, z],
            [z, h.inv(), z, z],
            [z, (q - q.inv()) * h.inv(), h.inv(), z],
            [z, z, z, h]
        ];
        assert!(rel_residual(&r, &expected) < 1e-14);
    }

    #[test]
    fn minus_is_conjugated_inverse() {
        for twice in 1..=3 {
            let rep = SpinRep::new(Spin::from_twice(twice), 0.29).unwrap();
            let d = rep.dim();
            let p = permutation_operator(d, 2, 1, 2).unwrap();
            let rp = r_matrix(&rep, RSign::Plus).unwrap().matrix;
            let rm = r_matrix(&rep, RSign::Minus).unwrap().matrix;
            let oracle = p.dot(&inverse(&rp).unwrap()).dot(&p);
            assert!(rel_residual(&rm, &oracle) < 1e-12);
            assert!(rel_residual(&dagger(&rp), &rm) < 1e-12);
            let (ln, _) = log_det(&rp).unwrap();
            assert!(ln.abs() < 1e-12);
        }
    }

    #[test]
    fn intertwines_coproduct() {
        let rep = SpinRep::new(Spin::ONE, 0.31).unwrap();
        let r = r_matrix(&rep, RSign::Plus).unwrap().matrix;
        let p = permutation_operator(3, 2, 1, 2).unwrap();
        for gen in [Generator::E, Generator::F, Generator::K] {
            let x = coproduct_action(&rep, 2, gen).unwrap().matrix;
            let x_op = p.dot(&x).dot(&p);
            assert!(rel_residual(&r.dot(&x), &x_op.dot(&r)) < 1e-12, "{gen:?}");
        }
    }

    #[test]
    fn yang_baxter() {
        for twice in 1..=2 {
            let rep = SpinRep::new(Spin::from_twice(twice), 0.23).unwrap();
            let d = rep.dim();
            let r = r_matrix(&rep, RSign::Plus).unwrap().matrix;
            let r12 = embed_pair(&r, d, 3, 1, 2).unwrap();
            let r13 = embed_pair(&r, d, 3, 1, 3).unwrap();
            let r23 = embed_pair(&r, d, 3, 2, 3).unwrap();
            let lhs = r12.dot(&r13).dot(&r23);
            let rhs = r23.dot(&r13).dot(&r12);
            assert!(rel_residual(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn fusion_rules() {
        let rep = SpinRep::new(Spin::HALF, 0.37).unwrap();
        let d = rep.dim();
        for sign in [RSign::Plus, RSign::Minus] {
            let r = r_matrix(&rep, sign).unwrap().matrix;
            let r12 = embed_pair(&r, d, 3, 1, 2).unwrap();
            let r13 = embed_pair(&r, d, 3, 1, 3).unwrap();
            let r23 = embed_pair(&r, d, 3, 2, 3).unwrap();
            let left = r_matrix_fused(&rep, sign, FusedFactor::Left)
                .unwrap()
                .matrix;
            let right = r_matrix_fused(&rep, sign, FusedFactor::Right)
                .unwrap()
                .matrix;
            assert!(rel_residual(&left, &r13.dot(&r23)) < 1e-12, "{sign:?} left");
            assert!(
                rel_residual(&right, &r13.dot(&r12)) < 1e-12,
                "{sign:?} right"
            );
        }
    }

    #[test]
    fn classical_limit_is_identity() {
        let rep = SpinRep::new(Spin::ONE, 0.0).unwrap();
        let r = r_matrix(&rep, RSign::Plus).unwrap().matrix;
        assert!(rel_residual(&r, &identity(9)) < 1e-15);
    }
}
