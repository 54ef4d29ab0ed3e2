mod common;

use proptest::prelude::*;
use uqchain::linalg::{c, dagger, frobenius, identity, inverse, rel_residual, CMatrix};
use uqchain::metric::{
    alpha0, biorthogonal_system_of_matrix, gamma_hat, hermitian_metric, matrix_from_json,
    matrix_to_json, metric_general, similarity_transport, symmetrization_residual, universal_eta,
    MetricCandidate,
};
use uqchain::{Spin, SpinRep};

/// Random positive definite `Phi_j` blocks.
fn random_blocks(r: &mut rand_chacha::ChaCha8Rng, mults: &[usize]) -> Vec<CMatrix> {
    mults
        .iter()
        .map(|&m| {
            let a = common::random_complex(r, m);
            dagger(&a).dot(&a) + identity(m) * c(0.5)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn biorthogonality_and_symbols(seed in 0u64..10_000, n in 2usize..=8) {
        let mut r = common::rng(seed);
        let (h, d, _) = common::quasi_hermitian(&mut r, n);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        prop_assert!(sys.residual().unwrap() < 1e-9);
        for (x, y) in sys.eigenvalues.iter().zip(&d) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        let a = common::random_complex(&mut r, n);
        let b = common::random_complex(&mut r, n);
        let g = &sys.gram;
        let oa = sys.symbol(&a);
        let ob = sys.symbol(&b);
        prop_assert!(rel_residual(&sys.symbol(&a.dot(&b)), &oa.dot(g).dot(&ob)) < 1e-9);
        prop_assert!(rel_residual(&sys.dual_symbol(&a), &g.dot(&oa).dot(g)) < 1e-9);
    }

    #[test]
    fn metric_family_and_composition(seed in 0u64..10_000, n in 2usize..=6) {
        let mut r = common::rng(seed);
        let (h, _, _) = common::quasi_hermitian(&mut r, n);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        let mut metrics = Vec::new();
        for _ in 0..3 {
            let blocks = random_blocks(&mut r, &sys.multiplicities);
            let (m, inv) = metric_general(&sys, &blocks).unwrap();
            prop_assert!(m.is_positive_definite);
            prop_assert!(symmetrization_residual(&m.eta, &h) < 1e-9);
            prop_assert!(rel_residual(&m.eta.dot(&inv), &identity(n)) < 1e-8);
            prop_assert!(similarity_transport(&m.eta, &h).unwrap() < 1e-9);
            metrics.push(m.eta);
        }
        let composed = metrics[0].dot(&inverse(&metrics[1]).unwrap()).dot(&metrics[2]);
        prop_assert!(symmetrization_residual(&composed, &h) < 1e-9);
    }

    #[test]
    fn eigenprojector_criterion(seed in 0u64..10_000, n in 2usize..=6) {
        let mut r = common::rng(seed);
        let (h, _, _) = common::quasi_hermitian(&mut r, n);
        let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
        let projectors: Vec<CMatrix> = (0..sys.eigenvalues.len()).map(|j| sys.eigenprojector(j)).collect();
        let criterion = |eta: &CMatrix| {
            projectors
                .iter()
                .map(|p| frobenius(&(eta.dot(p) - dagger(p).dot(eta))) / (frobenius(eta) * frobenius(p)))
                .fold(0.0, f64::max)
        };
        // a metric satisfies it
        let blocks = random_blocks(&mut r, &sys.multiplicities);
        let (m, _) = metric_general(&sys, &blocks).unwrap();
        prop_assert!(criterion(&m.eta) < 1e-9);
        // a positive matrix that fails it does not symmetrize H
        let a = common::random_complex(&mut r, n);
        let other = dagger(&a).dot(&a) + identity(n);
        prop_assert!(criterion(&other) > 1e-6);
        prop_assert!(symmetrization_residual(&other, &h) > 1e-6);
    }
}

#[test]
fn universal_metric_is_coupling_independent() {
    for (twice, sites) in [(1u32, 3usize), (2, 3)] {
        let spin = Spin::from_twice(twice);
        let g = 0.6 * gamma_hat(spin, sites);
        let rep = SpinRep::new(spin, g).unwrap();
        let pair = universal_eta(&rep, sites).unwrap();
        let eta = hermitian_metric(&pair, alpha0(spin, sites, g)).unwrap();
        assert!(eta.is_positive_definite);
        let mut r = common::rng(9);
        for _ in 0..50 {
            let h = common::general_h(spin, sites, g, common::random_table(&mut r, spin, sites));
            assert!(symmetrization_residual(&eta.eta, &h.matrix) < 1e-9);
            assert!(similarity_transport(&eta.eta, &h.matrix).unwrap() < 1e-9);
        }
    }
}

#[test]
fn metric_json_round_trip() {
    let mut r = common::rng(3);
    let (h, _, _) = common::quasi_hermitian(&mut r, 4);
    let sys = biorthogonal_system_of_matrix(&h, 1e-9).unwrap();
    let blocks = random_blocks(&mut r, &sys.multiplicities);
    let (m, _) = metric_general(&sys, &blocks).unwrap();
    let back = matrix_from_json(&matrix_to_json(&m.eta)).unwrap();
    assert_eq!(back, m.eta);
    let again = MetricCandidate::assess(back).unwrap();
    assert_eq!(again.is_positive_definite, m.is_positive_definite);
}
