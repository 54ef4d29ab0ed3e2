use std::collections::BTreeMap;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, identity, kron, phase, submatrix, zeros, CMatrix, C64};

use super::operator::{chain_dim, weight_sectors};
use super::{
    guard_denominator, q_number, total_weights_twice, ChainOperator, Spin, SpinRep, SINGULAR_EPS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    E,
    F,
    K,
}

/// Iterated coproduct `Delta^{(N)}(X)` on `N` sites.
///
/// `Delta(E) = E (x) K^-1 + K (x) E`, same for `F`, and `Delta(K) = K (x) K`.
pub fn coproduct_action(
    rep: &SpinRep,
    sites: usize,
    generator: Generator,
) -> Result<ChainOperator> {
    let d = rep.dim();
    let dim = chain_dim(rep.spin(), sites)?;
    let kd = rep.k_diag();
    let mut out = zeros(dim);
    let mut stride = vec![1usize; sites];
    for n in (0..sites.saturating_sub(1)).rev() {
        stride[n] = stride[n + 1] * d;
    }
    for col in 0..dim {
        let digits = super::basis_digits(col, d, sites);
        match generator {
            Generator::K => {
                out[[col, col]] = digits.iter().map(|&x| kd[x]).product();
            }
            Generator::E | Generator::F => {
                for n in 0..sites {
                    let x = digits[n];
                    let (target, amp) = match generator {
                        Generator::E if x > 0 => (col - stride[n], rep.e[[x - 1, x]]),
                        Generator::F if x + 1 < d => (col + stride[n], rep.f[[x + 1, x]]),
                        _ => continue,
                    };
                    let left: C64 = digits[..n].iter().map(|&y| kd[y]).product();
                    let right: C64 = digits[n + 1..].iter().map(|&y| kd[y].conj()).product();
                    out[[target, col]] += left * amp * right;
                }
            }
        }
    }
    ChainOperator::new(rep.spin(), sites, rep.gamma(), out)
}

/// Casimir of `U_q(sl_2)` acting on `N` sites through the coproduct.
///
/// Uses `(EF + FE)/2 + cos(gamma) [k]^2`, which is finite at `gamma = 0`.
pub fn total_casimir(rep: &SpinRep, sites: usize) -> Result<ChainOperator> {
    let gamma = rep.gamma();
    let e = coproduct_action(rep, sites, Generator::E)?.matrix;
    let f = coproduct_action(rep, sites, Generator::F)?.matrix;
    let mut cas = (e.dot(&f) + f.dot(&e)) * c(0.5);
    for (i, &w) in total_weights_twice(rep.spin(), sites).iter().enumerate() {
        let qk = q_number(w as f64 / 2.0, gamma);
        cas[[i, i]] += c(gamma.cos() * qk * qk);
    }
    ChainOperator::new(rep.spin(), sites, gamma, cas)
}

/// Two-site Casimir `C_2`.
pub fn tensor_casimir(rep: &SpinRep) -> Result<ChainOperator> {
    total_casimir(rep, 2)
}

/// Two-site Casimir written out term by term; needs `sin(gamma) != 0`.
///
/// The cross terms are `(KE) (x) (FK^-1) + (FK) (x) (K^-1 E)`. Writing the
/// second one as `(FK^-1) (x) (KE)` is only correct for `S = 1/2`.
pub fn tensor_casimir_closed_form(rep: &SpinRep) -> Result<ChainOperator> {
    let gamma = rep.gamma();
    let s2 = guard_denominator(gamma.sin().powi(2), gamma, || {
        "sin^2(gamma) in the two-site Casimir".into()
    })?;
    let ke = rep.k.dot(&rep.e);
    let fk_inv = rep.f.dot(&rep.k_inv);
    let fk = rep.f.dot(&rep.k);
    let k_inv_e = rep.k_inv.dot(&rep.e);
    let d = rep.dim();
    let one = identity(d);
    let k2 = rep.k.dot(&rep.k);
    let km2 = rep.k_inv.dot(&rep.k_inv);
    let two_s1 = rep.spin().twice() as f64 + 1.0;
    let constant = (kron(&one, &one) + kron(&k2, &km2)) * c(gamma.cos())
        - (kron(&one, &km2) + kron(&k2, &one)) * c((gamma * two_s1).cos());
    let m = kron(&ke, &fk_inv) + kron(&fk, &k_inv_e) + constant * c(1.0 / (2.0 * s2));
    ChainOperator::new(rep.spin(), 2, gamma, m)
}

/// Lagrange interpolation projector onto the Casimir eigenvalue `[s][s+1]`,
/// applied sector by sector.
fn lagrange_projector(
    cas: &CMatrix,
    sectors: &[(i32, Vec<usize>)],
    twice_s: u32,
    nodes: &[u32],
    gamma: f64,
) -> Result<CMatrix> {
    let s = twice_s as f64 / 2.0;
    let mut factors = Vec::new();
    for &tl in nodes.iter().filter(|&&tl| tl != twice_s) {
        let l = tl as f64 / 2.0;
        let den = guard_denominator(
            q_number(s - l, gamma) * q_number(s + l + 1.0, gamma),
            gamma,
            || format!("[s-l][s+l+1] for s = {s}, l = {l}"),
        )?;
        factors.push((tl, q_number(l, gamma) * q_number(l + 1.0, gamma), den));
    }
    let dim = cas.nrows();
    let mut out = zeros(dim);
    for (w, idx) in sectors {
        // weight |w|/2 > s cannot carry spin s
        if w.unsigned_abs() > twice_s {
            continue;
        }
        let block = submatrix(cas, idx);
        let n = idx.len();
        let mut p = identity(n);
        // only spins l >= |w|/2 occur in this sector
        for &(_, node, den) in factors.iter().filter(|f| f.0 >= w.unsigned_abs()) {
            let mut shifted = block.clone();
            for i in 0..n {
                shifted[[i, i]] -= c(node);
            }
            p = p.dot(&shifted) * c(1.0 / den);
        }
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                out[[ia, ib]] = p[[a, b]];
            }
        }
    }
    Ok(out)
}

/// Projector `P^{S,s}` onto spin `s` (integer, `0 <= s <= 2S`) in `V_S (x) V_S`.
pub fn projector(rep: &SpinRep, s: u32) -> Result<ChainOperator> {
    let two_s = rep.spin().twice();
    if s > two_s {
        return Err(Error::Index(format!(
            "channel s = {s} exceeds 2S = {two_s}"
        )));
    }
    let cas = tensor_casimir(rep)?;
    let sectors = weight_sectors(&total_weights_twice(rep.spin(), 2));
    let nodes: Vec<u32> = (0..=two_s).map(|l| 2 * l).collect();
    let m = lagrange_projector(&cas.matrix, &sectors, 2 * s, &nodes, rep.gamma())?;
    ChainOperator::new(rep.spin(), 2, rep.gamma(), m)
}

/// Multiplicities `nu_s` in `V_S^{(x)N}`, keyed by `2s`.
pub fn multiplicities(spin: Spin, sites: usize) -> BTreeMap<u32, usize> {
    let two_big = spin.twice();
    let mut current: BTreeMap<u32, usize> = BTreeMap::new();
    if sites == 0 {
        current.insert(0, 1);
        return current;
    }
    current.insert(two_big, 1);
    for _ in 1..sites {
        let mut next = BTreeMap::new();
        for (&ts, &nu) in &current {
            let lo = ts.abs_diff(two_big);
            let mut t = lo;
            while t <= ts + two_big {
                *next.entry(t).or_insert(0) += nu;
                t += 2;
            }
        }
        current = next;
    }
    current
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotypicComponent {
    /// `2s`.
    pub twice_s: u32,
    pub multiplicity: usize,
    pub projector: CMatrix,
}

impl IsotypicComponent {
    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotypicData {
    pub spin: Spin,
    pub sites: usize,
    pub gamma: f64,
    pub components: Vec<IsotypicComponent>,
}

impl IsotypicData {
    /// Largest of the completeness, idempotency and cross-product residuals.
    ///
    /// The projectors are oblique with norms far above one, so products are
    /// measured against `||P_a|| ||P_b||` and the sum against `sum_s ||P_s||`.
    pub fn max_residual(&self) -> f64 {
        let dim = self.components.first().map_or(0, |c| c.projector.nrows());
        let norms: Vec<f64> = self
            .components
            .iter()
            .map(|c| frobenius(&c.projector).max(1.0))
            .collect();
        let mut total = zeros(dim);
        let mut worst: f64 = 0.0;
        for (a, ca) in self.components.iter().enumerate() {
            total += &ca.projector;
            let pa = &ca.projector;
            worst = worst.max(frobenius(&(pa.dot(pa) - pa)) / (norms[a] * norms[a]));
            for (b, cb) in self.components.iter().enumerate().skip(a + 1) {
                worst = worst.max(frobenius(&pa.dot(&cb.projector)) / (norms[a] * norms[b]));
            }
        }
        let scale: f64 = norms.iter().sum();
        worst.max(frobenius(&(total - identity(dim))) / scale)
    }

    pub fn component(&self, twice_s: u32) -> Option<&IsotypicComponent> {
        self.components.iter().find(|c| c.twice_s == twice_s)
    }
}

/// Projectors `P_s` onto the isotypic components of `V_S^{(x)N}`.
pub fn isotypic_projectors(rep: &SpinRep, sites: usize) -> Result<IsotypicData> {
    let mult = multiplicities(rep.spin(), sites);
    let cas = total_casimir(rep, sites)?;
    let sectors = weight_sectors(&total_weights_twice(rep.spin(), sites));
    let nodes: Vec<u32> = mult.keys().copied().collect();
    let mut components = Vec::with_capacity(nodes.len());
    for (&ts, &nu) in &mult {
        let p = lagrange_projector(&cas.matrix, &sectors, ts, &nodes, rep.gamma())?;
        components.push(IsotypicComponent {
            twice_s: ts,
            multiplicity: nu,
            projector: p,
        });
    }
    Ok(IsotypicData {
        spin: rep.spin(),
        sites,
        gamma: rep.gamma(),
        components,
    })
}

/// The q-singlet `sum_k (-1)^{S-k} q^{-k} omega_k (x) omega_{-k} / sqrt(2S+1)`.
pub fn singlet_vector(rep: &SpinRep) -> Array1<C64> {
    let d = rep.dim();
    let mut v = Array1::zeros(d * d);
    let norm = (d as f64).sqrt();
    for i in 0..d {
        let k = rep.twice_weights()[i] as f64 / 2.0;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        // omega_k (x) omega_{-k}: site-2 index is d - 1 - i
        v[i * d + (d - 1 - i)] = phase(-rep.gamma() * k) * (sign / norm);
    }
    v
}

/// Closed form of `P^{S,0}` from the singlet: `v v^T / (v^T v)`.
pub fn singlet_projector(rep: &SpinRep) -> Result<CMatrix> {
    let v = singlet_vector(rep);
    let norm: C64 = v.iter().map(|z| z * z).sum();
    if norm.norm() <= SINGULAR_EPS {
        return Err(Error::SingularGamma {
            gamma: rep.gamma(),
            what: "[2S+1] in the singlet projector".into(),
        });
    }
    let d2 = v.len();
    let mut p = zeros(d2);
    for a in 0..d2 {
        for b in 0..d2 {
            p[[a, b]] = v[a] * v[b] / norm;
        }
    }
    Ok(p)
}
