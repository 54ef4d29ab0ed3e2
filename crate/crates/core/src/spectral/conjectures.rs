use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{hamiltonian, ChainSpec, CouplingSchedule};
use crate::error::{Error, Result};
use crate::qalgebra::Spin;

use super::{
    chebyshev_boundary, distinct_spectrum_probe, reality_boundary, relative_imag, ScanOptions,
    DEFAULT_REALITY_TOL,
};

const BOUNDARY_AGREEMENT: f64 = 2e-3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub s: u32,
    pub gamma: f64,
    pub couplings: Vec<f64>,
    pub max_abs_imag: f64,
    pub expected_real: bool,
}

/// A boundary comparison for one family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryCase {
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub s: u32,
    pub predicted: f64,
    pub observed: Option<f64>,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub which: u8,
    pub seed: u64,
    pub trials: usize,
    pub samples_checked: usize,
    pub cases: Vec<BoundaryCase>,
    pub counterexamples: Vec<Counterexample>,
    /// Draws skipped because a projector was singular at the sampled `gamma`.
    pub singular_skips: usize,
    pub supported: bool,
}

/// `pi / (2 (s + S + 1 - delta_{s,2S}))`.
pub fn conjectured_bound(spin: Spin, s: u32) -> f64 {
    let delta = if s == spin.twice() { 1.0 } else { 0.0 };
    PI / (2.0 * (s as f64 + spin.value() + 1.0 - delta))
}

fn gamma_limit(spin: Spin) -> f64 {
    PI / spin.twice() as f64
}

struct Sampler {
    rng: ChaCha8Rng,
    report: ConjectureReport,
}

impl Sampler {
    fn new(which: u8, trials: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            report: ConjectureReport {
                which,
                seed,
                trials,
                samples_checked: 0,
                cases: Vec::new(),
                counterexamples: Vec::new(),
                singular_skips: 0,
                supported: true,
            },
        }
    }

    /// Returns `None` when the family is singular at `gamma`.
    fn check(
        &mut self,
        spin: Spin,
        s: u32,
        gamma: f64,
        a: Vec<f64>,
        expected_real: bool,
    ) -> Result<Option<bool>> {
        let sites = a.len() + 1;
        let spec = ChainSpec::new(
            spin,
            sites,
            gamma,
            CouplingSchedule::SingleS { s, a: a.clone() },
        )?;
        let h = match hamiltonian(&spec) {
            Ok(h) => h,
            Err(Error::SingularGamma { .. }) => {
                self.report.singular_skips += 1;
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let imag = relative_imag(&distinct_spectrum_probe(&h)?);
        let real = imag <= DEFAULT_REALITY_TOL;
        self.report.samples_checked += 1;
        if real != expected_real {
            self.report.supported = false;
            self.report.counterexamples.push(Counterexample {
                spin,
                sites,
                s,
                gamma,
                couplings: a,
                max_abs_imag: imag,
                expected_real,
            });
        }
        Ok(Some(real))
    }

    fn scan_case(&mut self, spin: Spin, s: u32, a: Vec<f64>, predicted: f64) -> Result<()> {
        let sites = a.len() + 1;
        let family = |g: f64| {
            hamiltonian(&ChainSpec::new(
                spin,
                sites,
                g,
                CouplingSchedule::SingleS { s, a: a.clone() },
            )?)
        };
        let opts = ScanOptions {
            grid_points: 200,
            resolution: 1e-6,
            ..Default::default()
        };
        let scan = reality_boundary(family, 0.999 * gamma_limit(spin), &opts)?;
        let agrees = scan
            .boundary
            .is_some_and(|b| (b - predicted).abs() < BOUNDARY_AGREEMENT);
        self.report.supported &= agrees;
        self.report.cases.push(BoundaryCase {
            spin,
            sites,
            s,
            predicted,
            observed: scan.boundary,
            agrees,
        });
        Ok(())
    }
}

fn conjecture_one(trials: usize, seed: u64) -> Result<ConjectureReport> {
    let mut sm = Sampler::new(1, trials, seed);
    let families: Vec<(Spin, u32)> = (1..=3)
        .flat_map(|t| (0..=t).map(move |s| (Spin::from_twice(t), s)))
        .collect();
    for &(spin, s) in &families {
        sm.scan_case(spin, s, vec![1.0, -1.0], conjectured_bound(spin, s))?;
    }
    let mut done = 0;
    while done < trials {
        let (spin, s) = families[sm.rng.gen_range(0..families.len())];
        let a1: f64 = sm.rng.gen_range(0.05..2.0);
        let a2: f64 = -sm.rng.gen_range(0.05..2.0);
        let (a1, a2) = if sm.rng.gen_bool(0.5) {
            (a1, a2)
        } else {
            (a2, a1)
        };
        let gamma = sm.rng.gen_range(0.0..1.0) * conjectured_bound(spin, s);
        if sm.check(spin, s, gamma, vec![a1, a2], true)?.is_some() {
            done += 1;
        }
    }
    Ok(sm.report)
}

fn conjecture_two(trials: usize, seed: u64) -> Result<ConjectureReport> {
    let mut sm = Sampler::new(2, trials, seed);
    let families: Vec<(Spin, usize)> = [Spin::HALF, Spin::ONE]
        .into_iter()
        .flat_map(|sp| (3..=6).map(move |n| (sp, n)))
        .collect();
    for &(spin, sites) in &families {
        let alt = (0..sites - 1)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        sm.scan_case(spin, 0, alt, chebyshev_boundary(spin, sites)?)?;
    }
    let mut done = 0;
    while done < trials {
        let (spin, sites) = families[sm.rng.gen_range(0..families.len())];
        let a: f64 = sm.rng.gen_range(0.1..2.0);
        let alt = (0..sites - 1)
            .map(|n| if n % 2 == 0 { a } else { -a })
            .collect();
        let gamma = sm.rng.gen_range(0.0..1.0) * chebyshev_boundary(spin, sites)?;
        if sm.check(spin, 0, gamma, alt, true)?.is_some() {
            done += 1;
        }
    }
    Ok(sm.report)
}

/// Cases `(S, N)` sampled for positive couplings.
pub const POSITIVE_COUPLING_CASES: [(Spin, usize); 2] = [(Spin::HALF, 4), (Spin::ONE, 3)];

fn conjecture_three(trials: usize, seed: u64) -> Result<ConjectureReport> {
    let mut sm = Sampler::new(3, trials, seed);
    for &(spin, sites) in &POSITIVE_COUPLING_CASES {
        let mut done = 0;
        while done < trials {
            let a: Vec<f64> = (0..sites - 1)
                .map(|_| 2.0 - sm.rng.gen_range(0.0..2.0))
                .collect();
            let gamma = sm.rng.gen_range(0.0..0.95) * gamma_limit(spin);
            if sm.check(spin, 0, gamma, a, true)?.is_some() {
                done += 1;
            }
        }
    }
    Ok(sm.report)
}

/// Numerical support for the reality conjectures. Counterexamples are
/// recorded in the report; only setup failures are errors.
pub fn conjecture_support(which: u8, trials: usize, seed: u64) -> Result<ConjectureReport> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    match which {
        1 => conjecture_one(trials, seed),
        2 => conjecture_two(trials, seed),
        3 => conjecture_three(trials, seed),
        _ => Err(Error::Domain(format!("no conjecture numbered {which}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!((conjectured_bound(Spin::ONE, 1) - PI / 6.0).abs() < 1e-15);
        assert!((conjectured_bound(Spin::ONE, 2) - PI / 6.0).abs() < 1e-15);
        assert!((conjectured_bound(Spin::THREE_HALVES, 1) - PI / 7.0).abs() < 1e-15);
        assert!((conjectured_bound(Spin::HALF, 0) - PI / 3.0).abs() < 1e-15);
        assert!((conjectured_bound(Spin::HALF, 1) - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn positive_couplings_seeded() {
        let a = conjecture_support(3, 5, 7).unwrap();
        let b = conjecture_support(3, 5, 7).unwrap();
        assert_eq!(a.samples_checked, 10);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(conjecture_support(4, 1, 0).is_err());
        assert!(conjecture_support(1, 0, 0).is_err());
    }
}
