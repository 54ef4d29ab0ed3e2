#![allow(dead_code)]

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uqchain::chain::{hamiltonian, ChainSpec, CouplingSchedule};
use uqchain::linalg::{c, diag, inverse, CMatrix, C64};
use uqchain::qalgebra::ChainOperator;
use uqchain::Spin;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_table(rng: &mut ChaCha8Rng, spin: Spin, sites: usize) -> Vec<Vec<f64>> {
    (0..sites - 1)
        .map(|_| (0..spin.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

pub fn general_h(spin: Spin, sites: usize, gamma: f64, b: Vec<Vec<f64>>) -> ChainOperator {
    let spec = ChainSpec::new(spin, sites, gamma, CouplingSchedule::General { b }).unwrap();
    hamiltonian(&spec).unwrap()
}

pub fn single_h(spin: Spin, s: u32, gamma: f64, a: Vec<f64>) -> uqchain::Result<ChainOperator> {
    let sites = a.len() + 1;
    hamiltonian(&ChainSpec::new(
        spin,
        sites,
        gamma,
        CouplingSchedule::SingleS { s, a },
    )?)
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_shape_fn((n, n), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// `V D V^-1` with a well-separated real spectrum and a well-conditioned `V`.
pub fn quasi_hermitian(rng: &mut ChaCha8Rng, n: usize) -> (CMatrix, Vec<f64>, CMatrix) {
    let mut v = random_complex(rng, n);
    for i in 0..n {
        v[[i, i]] += c(2.5);
    }
    let mut d: Vec<f64> = (0..n)
        .map(|k| k as f64 + rng.gen_range(-0.3..0.3))
        .collect();
    d.sort_by(f64::total_cmp);
    let dm = diag(&d.iter().map(|&x| c(x)).collect::<Vec<_>>());
    let h = v.dot(&dm).dot(&inverse(&v).unwrap());
    (h, d, v)
}

pub fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
