//! Closed-form minimal-polynomial roots for the `s = 0` chains.

use crate::linalg::{c, C64};
use crate::qalgebra::{q_number, Spin};

/// Temperley–Lieb constant `mu_S = 1 / [2S+1]^2`.
pub fn mu_s(spin: Spin, gamma: f64) -> f64 {
    let n = q_number(spin.twice() as f64 + 1.0, gamma);
    1.0 / (n * n)
}

/// Roots of `x^2 + b x + c`.
pub fn quadratic_roots(b: f64, cc: f64) -> [C64; 2] {
    let disc = c(b * b - 4.0 * cc).sqrt();
    [(-c(b) + disc) / 2.0, (-c(b) - disc) / 2.0]
}

/// `lambda (lambda^2 - (a1 + a2) lambda + a1 a2 (1 - mu))`.
pub fn mp03_roots(a1: f64, a2: f64, mu: f64) -> Vec<C64> {
    let [r1, r2] = quadratic_roots(-(a1 + a2), a1 * a2 * (1.0 - mu));
    vec![c(0.0), r1, r2]
}

/// Roots of the `N = 4`, `a_3 = a_1` polynomial.
pub fn mp04b_roots(a1: f64, a2: f64, mu: f64) -> Vec<C64> {
    let [r1, r2] = quadratic_roots(-(a1 + a2), a1 * a2 * (1.0 - 2.0 * mu));
    let [r3, r4] = quadratic_roots(-(2.0 * a1 + a2), 2.0 * a1 * a2 * (1.0 - mu));
    vec![c(0.0), c(a1), r1, r2, r3, r4]
}

/// Roots of the `N = 5` alternating `(a, -a, a, -a)` polynomial.
pub fn mp05b_roots(a: f64, mu: f64) -> Vec<C64> {
    let a2 = a * a;
    let mut roots = vec![c(0.0)];
    for (b, cc) in [
        (a2 * (3.0 * mu - 2.0), a2 * a2 * (mu * mu - 3.0 * mu + 1.0)),
        (
            a2 * (6.0 * mu - 5.0),
            a2 * a2 * (5.0 * mu * mu - 10.0 * mu + 4.0),
        ),
    ] {
        for x in quadratic_roots(b, cc) {
            let r = x.sqrt();
            roots.push(r);
            roots.push(-r);
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_values() {
        assert!((mu_s(Spin::HALF, 0.5) - 1.0 / (4.0 * 0.5f64.cos().powi(2))).abs() < 1e-14);
        assert!((mu_s(Spin::ONE, 0.0) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_roots_satisfy_equation() {
        for &(b, cc) in &[(1.0, -2.0), (0.0, 1.0), (-3.0, 2.0)] {
            for r in quadratic_roots(b, cc) {
                assert!((r * r + r * b + cc).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn biquadratic_roots_satisfy_factors() {
        let (a, mu) = (1.3, 0.2);
        let roots = mp05b_roots(a, mu);
        assert_eq!(roots.len(), 9);
        for r in &roots[1..] {
            let l2 = r * r;
            let f1 =
                l2 * l2 + l2 * (a * a * (3.0 * mu - 2.0)) + a.powi(4) * (mu * mu - 3.0 * mu + 1.0);
            let f2 = l2 * l2
                + l2 * (a * a * (6.0 * mu - 5.0))
                + a.powi(4) * (5.0 * mu * mu - 10.0 * mu + 4.0);
            assert!(f1.norm().min(f2.norm()) < 1e-12);
        }
    }
}
