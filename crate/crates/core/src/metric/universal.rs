use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, dagger, frobenius, identity, inverse, log_det, matrix_power, phase, zeros, CMatrix, C64,
};
use crate::qalgebra::{
    apply_pair_left, multiplicities, r_matrix, ChainOperator, IsotypicData, RSign, Spin, SpinRep,
};

use super::MetricCandidate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductOrder {
    /// `R<-_N ... R<-_2` with `R<-_n = R_{n-1,n} ... R_{1,n}`.
    Leftward,
    /// `R->_1 ... R->_{N-1}` with `R->_n = R_{n,n+1} ... R_{n,N}`.
    Rightward,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalMetricPair {
    pub eta_plus: ChainOperator,
    pub eta_minus: ChainOperator,
}

impl UniversalMetricPair {
    pub fn spin(&self) -> Spin {
        self.eta_plus.spin
    }

    pub fn sites(&self) -> usize {
        self.eta_plus.sites
    }

    pub fn gamma(&self) -> f64 {
        self.eta_plus.gamma
    }
}

/// Product of embedded `R^\pm_{ij}` in the given order.
pub fn eta_product(
    rep: &SpinRep,
    sites: usize,
    sign: RSign,
    order: ProductOrder,
) -> Result<ChainOperator> {
    if sites < 2 {
        return Err(Error::Domain("a metric chain needs N >= 2".into()));
    }
    let r = r_matrix(rep, sign)?.matrix;
    let d = rep.dim();
    let dim = crate::chain::check_dim(rep.spin(), sites, usize::MAX)?;
    // factors listed left to right
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    match order {
        ProductOrder::Leftward => {
            for n in (2..=sites).rev() {
                for m in (1..n).rev() {
                    pairs.push((m, n));
                }
            }
        }
        ProductOrder::Rightward => {
            for n in 1..sites {
                for m in n + 1..=sites {
                    pairs.push((n, m));
                }
            }
        }
    }
    let mut acc = identity(dim);
    for &(i, j) in pairs.iter().rev() {
        apply_pair_left(&mut acc, &r, d, sites, i, j)?;
    }
    ChainOperator::new(rep.spin(), sites, rep.gamma(), acc)
}

pub fn universal_eta(rep: &SpinRep, sites: usize) -> Result<UniversalMetricPair> {
    Ok(UniversalMetricPair {
        eta_plus: eta_product(rep, sites, RSign::Plus, ProductOrder::Leftward)?,
        eta_minus: eta_product(rep, sites, RSign::Minus, ProductOrder::Leftward)?,
    })
}

fn combination(pair: &UniversalMetricPair, alpha: f64) -> CMatrix {
    &pair.eta_plus.matrix * phase(alpha) + &pair.eta_minus.matrix * phase(-alpha)
}

/// `e^{i alpha} eta^+ + e^{-i alpha} eta^-`.
pub fn hermitian_metric(pair: &UniversalMetricPair, alpha: f64) -> Result<MetricCandidate> {
    MetricCandidate::assess(combination(pair, alpha))
}

/// `sum_n beta_n (e^{i a_n} eta^+ ((eta^-)^{-1} eta^+)^{n-1} + e^{-i a_n} eta^- ((eta^+)^{-1} eta^-)^{n-1})`.
pub fn multiparam_metric(
    pair: &UniversalMetricPair,
    alphas: &[f64],
    betas: &[f64],
) -> Result<MetricCandidate> {
    if alphas.len() != betas.len() || alphas.is_empty() {
        return Err(Error::Domain(
            "alphas and betas must be non-empty and of equal length".into(),
        ));
    }
    let (p, m) = (&pair.eta_plus.matrix, &pair.eta_minus.matrix);
    let up = inverse(m)?.dot(p);
    let down = inverse(p)?.dot(m);
    let mut eta = zeros(p.nrows());
    for (n, (&a, &b)) in alphas.iter().zip(betas).enumerate() {
        let term =
            p.dot(&matrix_power(&up, n)) * phase(a) + m.dot(&matrix_power(&down, n)) * phase(-a);
        eta = eta + term * c(b);
    }
    MetricCandidate::assess(eta)
}

fn total_spin_twice(spin: Spin, sites: usize) -> u32 {
    spin.twice() * sites as u32
}

/// `s_0` as `2 s_0`: 0 or 1 by parity of `2NS`.
fn lowest_twice(spin: Spin, sites: usize) -> u32 {
    total_spin_twice(spin, sites) % 2
}

/// `(gamma/2)(NS(2S+1-NS) - s_0(s_0+1))`.
pub fn alpha0(spin: Spin, sites: usize, gamma: f64) -> f64 {
    let ns = total_spin_twice(spin, sites) as f64 / 2.0;
    let s0 = lowest_twice(spin, sites) as f64 / 2.0;
    gamma / 2.0 * (ns * (spin.twice() as f64 + 1.0 - ns) - s0 * (s0 + 1.0))
}

/// `pi / ((NS - s_0)(NS + s_0 + 1))`.
pub fn gamma_hat(spin: Spin, sites: usize) -> f64 {
    let ns = total_spin_twice(spin, sites) as f64 / 2.0;
    let s0 = lowest_twice(spin, sites) as f64 / 2.0;
    PI / ((ns - s0) * (ns + s0 + 1.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetCheck {
    pub log_abs_lhs: f64,
    pub phase_lhs: C64,
    pub log_abs_rhs: f64,
    pub phase_rhs: C64,
    pub rel_err: f64,
    /// `ln |det eta^+|` and `ln |det eta^-|`.
    pub log_abs_det_plus: f64,
    pub log_abs_det_minus: f64,
}

/// Compare `det(e^{i alpha} eta^+ + e^{-i alpha} eta^-)` with the product over
/// isotypic components `prod_s (2 cos(alpha + gamma x_s))^{(2s+1) nu_s}`,
/// `x_s = s(s+1) - NS(S+1)`, in the log domain.
pub fn det_formula_check(pair: &UniversalMetricPair, alpha: f64) -> Result<DetCheck> {
    let (spin, sites, gamma) = (pair.spin(), pair.sites(), pair.gamma());
    let (log_abs_lhs, phase_lhs) = log_det(&combination(pair, alpha))?;
    let two = spin.twice() as f64;
    let casimir_big = sites as f64 * two * (two + 2.0) / 4.0;
    let mut log_abs_rhs = 0.0;
    let mut sign = 1.0;
    for (&ts, &nu) in &multiplicities(spin, sites) {
        let t = ts as f64;
        let x = t * (t + 2.0) / 4.0 - casimir_big;
        let factor = 2.0 * (alpha + gamma * x).cos();
        let power = (ts as usize + 1) * nu;
        log_abs_rhs += power as f64 * factor.abs().ln();
        if factor < 0.0 && power % 2 == 1 {
            sign = -sign;
        }
    }
    let phase_rhs = c(sign);
    let ratio = (log_abs_lhs - log_abs_rhs).exp() * phase_lhs / phase_rhs;
    let rel_err = if log_abs_rhs == f64::NEG_INFINITY && log_abs_lhs == f64::NEG_INFINITY {
        0.0
    } else {
        (ratio - c(1.0)).norm()
    };
    Ok(DetCheck {
        log_abs_lhs,
        phase_lhs,
        log_abs_rhs,
        phase_rhs,
        rel_err,
        log_abs_det_plus: log_det(&pair.eta_plus.matrix)?.0,
        log_abs_det_minus: log_det(&pair.eta_minus.matrix)?.0,
    })
}

/// `||(eta^-)^{-1} eta^+ - sum_s q^{2 s(s+1) - 2NS(S+1)} P_s||_F / dim`.
pub fn isotypic_identity_check(pair: &UniversalMetricPair, iso: &IsotypicData) -> Result<f64> {
    if iso.spin != pair.spin()
        || iso.sites != pair.sites()
        || (iso.gamma - pair.gamma()).abs() > 0.0
    {
        return Err(Error::Domain(
            "isotypic data built for a different chain".into(),
        ));
    }
    let lhs = inverse(&pair.eta_minus.matrix)?.dot(&pair.eta_plus.matrix);
    let two = pair.spin().twice() as f64;
    let casimir_big = pair.sites() as f64 * two * (two + 2.0) / 4.0;
    let mut rhs = zeros(lhs.nrows());
    for comp in &iso.components {
        let t = comp.twice_s as f64;
        let x = t * (t + 2.0) / 4.0 - casimir_big;
        rhs = rhs + &comp.projector * phase(2.0 * pair.gamma() * x);
    }
    Ok(frobenius(&(lhs - rhs)) / pair.eta_plus.dim() as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdScan {
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    /// Largest `gamma` found with `eta(alpha_0(gamma))` positive definite.
    pub boundary: f64,
    pub bracket: (f64, f64),
    /// The analytic guarantee `pi / ((NS - s_0)(NS + s_0 + 1))`.
    pub gamma_hat: f64,
    /// True when positivity held up to the end of the deformation range.
    pub reached_range_end: bool,
    pub resolution: f64,
}

fn pd_at(spin: Spin, sites: usize, gamma: f64) -> Result<bool> {
    let rep = SpinRep::new(spin, gamma)?;
    let pair = universal_eta(&rep, sites)?;
    Ok(hermitian_metric(&pair, alpha0(spin, sites, gamma))?.is_positive_definite)
}

/// Bisect the positivity range of `eta(alpha_0(gamma))`.
pub fn pd_range_scan(spin: Spin, sites: usize, resolution: f64) -> Result<PdScan> {
    if !(resolution > 0.0) {
        return Err(Error::Domain("resolution must be positive".into()));
    }
    let limit = 0.999 * PI / spin.twice() as f64;
    let grid_points = 64;
    let grid: Vec<f64> = (1..=grid_points)
        .map(|i| limit * i as f64 / grid_points as f64)
        .collect();
    let pd: Vec<bool> = grid
        .par_iter()
        .map(|&g| pd_at(spin, sites, g))
        .collect::<Result<_>>()?;
    let first_bad = pd.iter().position(|&p| !p);
    let mut scan = PdScan {
        spin,
        sites,
        boundary: limit,
        bracket: (limit, limit),
        gamma_hat: gamma_hat(spin, sites),
        reached_range_end: first_bad.is_none(),
        resolution,
    };
    let Some(k) = first_bad else { return Ok(scan) };
    let (mut lo, mut hi) = (if k == 0 { 0.0 } else { grid[k - 1] }, grid[k]);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if pd_at(spin, sites, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    scan.boundary = lo;
    scan.bracket = (lo, hi);
    Ok(scan)
}

/// `eta^\pm` intertwine `P_{n,n+1}` with `P_{n+1,n}`; largest relative residual
/// over all bonds and channels.
pub fn bond_intertwining_residual(pair: &UniversalMetricPair, rep: &SpinRep) -> Result<f64> {
    let (d, sites) = (rep.dim(), pair.sites());
    let mut worst: f64 = 0.0;
    for s in 0..=rep.spin().twice() {
        let p = crate::qalgebra::projector(rep, s)?.matrix;
        for n in 1..sites {
            let fwd = crate::qalgebra::embed_pair(&p, d, sites, n, n + 1)?;
            let bwd = crate::qalgebra::embed_pair(&p, d, sites, n + 1, n)?;
            for eta in [&pair.eta_plus.matrix, &pair.eta_minus.matrix] {
                let r = frobenius(&(eta.dot(&fwd) - bwd.dot(eta))) / frobenius(eta).max(1.0);
                worst = worst.max(r);
            }
        }
    }
    Ok(worst)
}

/// `(eta^+)* = eta^-` residual.
pub fn conjugation_residual(pair: &UniversalMetricPair) -> f64 {
    crate::linalg::rel_residual(&dagger(&pair.eta_plus.matrix), &pair.eta_minus.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_residual;
    use crate::qalgebra::isotypic_projectors;

    #[test]
    fn two_sites_is_r_matrix() {
        let rep = SpinRep::new(Spin::ONE, 0.3).unwrap();
        let pair = universal_eta(&rep, 2).unwrap();
        assert!(
            rel_residual(
                &pair.eta_plus.matrix,
                &r_matrix(&rep, RSign::Plus).unwrap().matrix
            ) < 1e-15
        );
        assert!(
            rel_residual(
                &pair.eta_minus.matrix,
                &r_matrix(&rep, RSign::Minus).unwrap().matrix
            ) < 1e-15
        );
    }

    #[test]
    fn trivial_at_zero_gamma() {
        let rep = SpinRep::new(Spin::HALF, 0.0).unwrap();
        let pair = universal_eta(&rep, 3).unwrap();
        assert!(rel_residual(&pair.eta_plus.matrix, &identity(8)) < 1e-15);
        let m = hermitian_metric(&pair, 0.0).unwrap();
        assert!(rel_residual(&m.eta, &(identity(8) * c(2.0))) < 1e-15 && m.is_positive_definite);
        let multi = multiparam_metric(&pair, &[0.3, 1.1], &[1.0, 0.5]).unwrap();
        let expected = 2.0 * 0.3f64.cos() + 2.0 * 0.5 * 1.1f64.cos();
        assert!(rel_residual(&multi.eta, &(identity(8) * c(expected))) < 1e-14);
    }

    #[test]
    fn orderings_agree_and_relations_hold() {
        for (spin, sites, g) in [
            (Spin::HALF, 3, 0.3),
            (Spin::HALF, 4, 0.2),
            (Spin::ONE, 3, 0.25),
        ] {
            let rep = SpinRep::new(spin, g).unwrap();
            let pair = universal_eta(&rep, sites).unwrap();
            for sign in [RSign::Plus, RSign::Minus] {
                let right = eta_product(&rep, sites, sign, ProductOrder::Rightward).unwrap();
                let left = match sign {
                    RSign::Plus => &pair.eta_plus,
                    RSign::Minus => &pair.eta_minus,
                };
                assert!(rel_residual(&left.matrix, &right.matrix) < 1e-11);
            }
            assert!(conjugation_residual(&pair) < 1e-12);
            assert!(bond_intertwining_residual(&pair, &rep).unwrap() < 1e-10);
        }
    }

    #[test]
    fn closed_forms() {
        assert!((alpha0(Spin::HALF, 2, 0.4) - 0.2).abs() < 1e-15);
        assert!(alpha0(Spin::HALF, 3, 0.4).abs() < 1e-15);
        assert_eq!(alpha0(Spin::ONE, 3, 0.0), 0.0);
        assert!((gamma_hat(Spin::HALF, 2) - PI / 2.0).abs() < 1e-15);
        assert!((gamma_hat(Spin::HALF, 3) - PI / 3.0).abs() < 1e-15);
        assert!((gamma_hat(Spin::ONE, 3) - PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_formula() {
        let rep = SpinRep::new(Spin::HALF, 0.4).unwrap();
        let pair = universal_eta(&rep, 2).unwrap();
        let chk = det_formula_check(&pair, 0.0).unwrap();
        let direct = (2.0 * (0.4f64 * -1.5).cos()) * (2.0 * (0.4f64 * 0.5).cos()).powi(3);
        assert!(
            (chk.log_abs_rhs - direct.abs().ln()).abs() < 1e-14,
            "{chk:?} {}",
            direct.abs().ln()
        );
        assert!(chk.rel_err < 1e-9, "{chk:?}");
        assert!(chk.log_abs_det_plus.abs() < 1e-9 && chk.log_abs_det_minus.abs() < 1e-9);
        let zero = det_formula_check(
            &universal_eta(&SpinRep::new(Spin::ONE, 0.0).unwrap(), 2).unwrap(),
            0.0,
        )
        .unwrap();
        assert!((zero.log_abs_rhs - 9.0 * 2f64.ln()).abs() < 1e-12 && zero.rel_err < 1e-12);
    }

    #[test]
    fn isotypic_ratio() {
        for (spin, g) in [(Spin::HALF, 0.4), (Spin::ONE, 0.25)] {
            let rep = SpinRep::new(spin, g).unwrap();
            let pair = universal_eta(&rep, 2).unwrap();
            let iso = isotypic_projectors(&rep, 2).unwrap();
            assert!(isotypic_identity_check(&pair, &iso).unwrap() < 1e-10);
        }
    }

    #[test]
    fn positivity_window() {
        let g = 0.5;
        let rep = SpinRep::new(Spin::HALF, g).unwrap();
        let pair = universal_eta(&rep, 2).unwrap();
        assert!(
            hermitian_metric(&pair, alpha0(Spin::HALF, 2, g))
                .unwrap()
                .is_positive_definite
        );
        let scan = pd_range_scan(Spin::HALF, 2, 1e-4).unwrap();
        assert!(scan.boundary >= PI / 2.0 - 1e-3, "{scan:?}");
    }
}
