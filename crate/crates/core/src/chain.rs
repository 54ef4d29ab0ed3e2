//! Open-chain Hamiltonians built from two-site projector couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, kron_all, zeros, CMatrix, I};
use crate::qalgebra::{
    embed_pair_into, projector, site_permutation, ChainOperator, DeformationParams, Spin, SpinRep,
    SINGULAR_EPS,
};

pub const DEFAULT_DIM_CAP: usize = 4096;

/// Bond couplings: one channel with per-bond strengths, or a full bond x channel table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CouplingSchedule {
    SingleS { s: u32, a: Vec<f64> },
    General { b: Vec<Vec<f64>> },
}

impl CouplingSchedule {
    pub fn homogeneous(s: u32, a: f64, sites: usize) -> Self {
        CouplingSchedule::SingleS {
            s,
            a: vec![a; sites.saturating_sub(1)],
        }
    }

    /// `a_1, a_2, a_1, a_2, ...` along the chain.
    pub fn alternating(s: u32, a1: f64, a2: f64, sites: usize) -> Self {
        let a = (0..sites.saturating_sub(1))
            .map(|n| if n % 2 == 0 { a1 } else { a2 })
            .collect();
        CouplingSchedule::SingleS { s, a }
    }

    pub fn bonds(&self) -> usize {
        match self {
            CouplingSchedule::SingleS { a, .. } => a.len(),
            CouplingSchedule::General { b } => b.len(),
        }
    }

    /// The equivalent bond x channel table.
    pub fn table(&self, spin: Spin) -> Vec<Vec<f64>> {
        match self {
            CouplingSchedule::SingleS { s, a } => a
                .iter()
                .map(|&an| {
                    (0..=spin.twice())
                        .map(|t| if t == *s { an } else { 0.0 })
                        .collect()
                })
                .collect(),
            CouplingSchedule::General { b } => b.clone(),
        }
    }

    pub fn validate(&self, spin: Spin, sites: usize) -> Result<()> {
        if self.bonds() + 1 != sites {
            return Err(Error::Domain(format!(
                "{} bond couplings given for N = {sites}",
                self.bonds()
            )));
        }
        match self {
            CouplingSchedule::SingleS { s, a } => {
                if *s > spin.twice() {
                    return Err(Error::Domain(format!(
                        "channel s = {s} exceeds 2S = {}",
                        spin.twice()
                    )));
                }
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Domain("coupling entries must be finite".into()));
                }
            }
            CouplingSchedule::General { b } => {
                for row in b {
                    if row.len() != spin.dim() {
                        return Err(Error::Domain(format!(
                            "each bond needs {} channel couplings, got {}",
                            spin.dim(),
                            row.len()
                        )));
                    }
                    if row.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Domain("coupling entries must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A chain: site spin, deformation, length and couplings.
///
/// JSON form: `{"S": "1/2", "N": 4, "gamma": 0.3, "coupling": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub gamma: f64,
    pub coupling: CouplingSchedule,
}

impl ChainSpec {
    pub fn new(spin: Spin, sites: usize, gamma: f64, coupling: CouplingSchedule) -> Result<Self> {
        let spec = Self {
            spin,
            sites,
            gamma,
            coupling,
        };
        spec.validate(DEFAULT_DIM_CAP)?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ChainSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate(DEFAULT_DIM_CAP)?;
        Ok(spec)
    }

    pub fn params(&self) -> DeformationParams {
        DeformationParams::new(self.spin, self.gamma)
    }

    pub fn dim(&self) -> usize {
        self.spin.dim().saturating_pow(self.sites as u32)
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Domain(format!(
                "N = {} but a chain needs N >= 2",
                self.sites
            )));
        }
        check_dim(self.spin, self.sites, cap)?;
        self.params().check_range()?;
        self.coupling.validate(self.spin, self.sites)
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }
}

pub fn check_dim(spin: Spin, sites: usize, cap: usize) -> Result<usize> {
    let dim = spin.dim().checked_pow(sites as u32).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim)
}

/// `1^{(n-1)} (x) op (x) 1^{(N-n-1)}` for a two-site operator and `1 <= n <= N-1`.
pub fn embed_bond(op: &ChainOperator, n: usize, sites: usize) -> Result<ChainOperator> {
    if op.sites != 2 {
        return Err(Error::Index(format!(
            "bond operator must act on 2 sites, not {}",
            op.sites
        )));
    }
    if n == 0 || n >= sites {
        return Err(Error::Index(format!(
            "bond {n} out of range for N = {sites}"
        )));
    }
    let d = op.spin.dim();
    let mut out = zeros(check_dim(op.spin, sites, DEFAULT_DIM_CAP)?);
    embed_pair_into(&mut out, &op.matrix, d, sites, n, n + 1, c(1.0))?;
    ChainOperator::new(op.spin, sites, op.gamma, out)
}

/// `sum_n a_n P^{S,s}_{n,n+1}`.
pub fn hamiltonian_single_s(spec: &ChainSpec) -> Result<ChainOperator> {
    match &spec.coupling {
        CouplingSchedule::SingleS { .. } => hamiltonian(spec),
        CouplingSchedule::General { .. } => {
            Err(Error::Domain("expected a single-channel schedule".into()))
        }
    }
}

/// `sum_{n,s} b_{n,s} P^{S,s}_{n,n+1}`.
pub fn hamiltonian_general(spec: &ChainSpec) -> Result<ChainOperator> {
    match &spec.coupling {
        CouplingSchedule::General { .. } => hamiltonian(spec),
        CouplingSchedule::SingleS { .. } => {
            Err(Error::Domain("expected a general schedule".into()))
        }
    }
}

/// Hamiltonian for either kind of schedule. Channels whose couplings all
/// vanish are never built, so their projector may be singular at `gamma`.
pub fn hamiltonian(spec: &ChainSpec) -> Result<ChainOperator> {
    spec.validate(DEFAULT_DIM_CAP)?;
    let rep = SpinRep::new(spec.spin, spec.gamma)?;
    let d = rep.dim();
    let table = spec.coupling.table(spec.spin);
    let projectors: Vec<Option<CMatrix>> = (0..=spec.spin.twice())
        .map(|s| {
            if table.iter().all(|row| row[s as usize] == 0.0) {
                Ok(None)
            } else {
                projector(&rep, s).map(|p| Some(p.matrix))
            }
        })
        .collect::<Result<_>>()?;
    let mut h = zeros(spec.dim());
    for (n, row) in table.iter().enumerate() {
        let mut local = zeros(d * d);
        for (s, p) in projectors.iter().enumerate() {
            if let Some(p) = p {
                local = local + p * c(row[s]);
            }
        }
        embed_pair_into(&mut h, &local, d, spec.sites, n + 1, n + 2, c(1.0))?;
    }
    ChainOperator::new(spec.spin, spec.sites, spec.gamma, h)
}

/// Spin-1/2 XXZ chain, i.e. `s = 0` with `a_n = -cos(gamma)`.
pub fn xxz_half_hamiltonian(sites: usize, gamma: f64) -> Result<ChainOperator> {
    let spec = ChainSpec::new(
        Spin::HALF,
        sites,
        gamma,
        CouplingSchedule::homogeneous(0, -gamma.cos(), sites),
    )?;
    hamiltonian(&spec)
}

/// The same chain written with Pauli matrices:
/// `sum_n (s+_n s-_{n+1} + s-_n s+_{n+1})/2 + cos(gamma)/4 (z_n z_{n+1} - 1) + i sin(gamma)/4 (z_n - z_{n+1})`.
pub fn xxz_half_pauli(sites: usize, gamma: f64) -> Result<ChainOperator> {
    if sites < 2 {
        return Err(Error::Domain("N must be at least 2".into()));
    }
    check_dim(Spin::HALF, sites, DEFAULT_DIM_CAP)?;
    let zero = c(0.0);
    let one = c(1.0);
    let sp = ndarray::array![[zero, one], [zero, zero]];
    let sm = ndarray::array![[zero, zero], [one, zero]];
    let sz = ndarray::array![[one, zero], [zero, -one]];
    let id2 = identity(2);
    let at = |ops: &[(usize, &CMatrix)]| {
        let factors: Vec<CMatrix> = (1..=sites)
            .map(|m| {
                ops.iter()
                    .find(|(k, _)| *k == m)
                    .map_or_else(|| id2.clone(), |(_, o)| (*o).clone())
            })
            .collect();
        kron_all(&factors)
    };
    let dim = 1usize << sites;
    let mut h = zeros(dim);
    for n in 1..sites {
        let hop = at(&[(n, &sp), (n + 1, &sm)]) + at(&[(n, &sm), (n + 1, &sp)]);
        let zz = at(&[(n, &sz), (n + 1, &sz)]) - identity(dim);
        let zdiff = at(&[(n, &sz)]) - at(&[(n + 1, &sz)]);
        h = h + hop * c(0.5) + zz * c(gamma.cos() / 4.0) + zdiff * (I * (gamma.sin() / 4.0));
    }
    ChainOperator::new(Spin::HALF, sites, gamma, h)
}

/// Integrable spin-`S` XXZ couplings `b_{n,s} = sin(gamma) sum_{k=1}^{s} cot(gamma k)`.
pub fn xxz_spin_s_coupling(spin: Spin, gamma: f64, sites: usize) -> Result<CouplingSchedule> {
    for k in 1..=spin.twice() {
        if (gamma * k as f64).sin().abs() <= SINGULAR_EPS {
            return Err(Error::SingularGamma {
                gamma,
                what: format!("cot(gamma * {k}) in the XXZ spin-S couplings"),
            });
        }
    }
    let mut row = Vec::with_capacity(spin.dim());
    let mut acc = 0.0;
    row.push(0.0);
    for k in 1..=spin.twice() {
        acc += 1.0 / (gamma * k as f64).tan();
        row.push(gamma.sin() * acc);
    }
    Ok(CouplingSchedule::General {
        b: vec![row; sites.saturating_sub(1)],
    })
}

/// The `gamma -> 0` limit of [`xxz_spin_s_coupling`]: harmonic numbers `H_s`.
pub fn xxz_spin_s_limit_coupling(spin: Spin, sites: usize) -> CouplingSchedule {
    let row: Vec<f64> = (0..=spin.twice())
        .map(|s| (1..=s).map(|k| 1.0 / k as f64).sum())
        .collect();
    CouplingSchedule::General {
        b: vec![row; sites.saturating_sub(1)],
    }
}

/// `P_{1,N} P_{2,N-1} ...`, the site-reversal operator.
pub fn reversal_symmetrizer(spin: Spin, sites: usize) -> Result<ChainOperator> {
    if sites < 2 {
        return Err(Error::Domain("N must be at least 2".into()));
    }
    check_dim(spin, sites, DEFAULT_DIM_CAP)?;
    let perm: Vec<usize> = (0..sites).rev().collect();
    let m = site_permutation(spin.dim(), &perm)?;
    ChainOperator::new(spin, sites, 0.0, m)
}
