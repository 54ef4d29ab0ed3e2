use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, zeros, CMatrix, C64};

use super::Spin;

/// A dense operator on `(C^{2S+1})^{(x)N}` tagged with the data it was built from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainOperator {
    pub spin: Spin,
    pub sites: usize,
    pub gamma: f64,
    pub matrix: CMatrix,
}

impl ChainOperator {
    pub fn new(spin: Spin, sites: usize, gamma: f64, matrix: CMatrix) -> Result<Self> {
        let dim = chain_dim(spin, sites)?;
        if matrix.dim() != (dim, dim) {
            return Err(Error::Index(format!(
                "matrix shape {:?} does not match dimension {dim} for S = {spin}, N = {sites}",
                matrix.dim()
            )));
        }
        Ok(Self {
            spin,
            sites,
            gamma,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub(crate) fn chain_dim(spin: Spin, sites: usize) -> Result<usize> {
    if sites == 0 {
        return Err(Error::Domain("chain needs at least one site".into()));
    }
    (spin.dim() as u64)
        .checked_pow(sites as u32)
        .filter(|&d| d <= usize::MAX as u64 / 2)
        .map(|d| d as usize)
        .ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: usize::MAX,
        })
}

/// Site digits of a basis index, site 1 first.
pub fn basis_digits(index: usize, d: usize, sites: usize) -> Vec<usize> {
    let mut digits = vec![0; sites];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = rest % d;
        rest /= d;
    }
    digits
}

fn index_of(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Twice the total weight `sum_n k_n` of every tensor basis vector.
pub fn total_weights_twice(spin: Spin, sites: usize) -> Vec<i32> {
    let d = spin.dim();
    let dim = d.pow(sites as u32);
    let two_s = spin.twice() as i32;
    (0..dim)
        .map(|idx| {
            basis_digits(idx, d, sites)
                .iter()
                .map(|&x| two_s - 2 * x as i32)
                .sum()
        })
        .collect()
}

/// Group basis indices by (twice) total weight, highest weight first.
pub fn weight_sectors(twice_weights: &[i32]) -> Vec<(i32, Vec<usize>)> {
    let mut map: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
    for (idx, &w) in twice_weights.iter().enumerate() {
        map.entry(w).or_default().push(idx);
    }
    map.into_iter().rev().collect()
}

/// Embed a two-site operator acting on sites `i` and `j` (1-based, any order).
///
/// The first tensor factor of `op` acts on site `i`, the second on site `j`.
pub fn embed_pair(op: &CMatrix, d: usize, sites: usize, i: usize, j: usize) -> Result<CMatrix> {
    let mut out = zeros(d.pow(sites as u32));
    embed_pair_into(&mut out, op, d, sites, i, j, c(1.0))?;
    Ok(out)
}

/// `target += coeff * op_{ij}` without allocating the embedded operator.
pub fn embed_pair_into(
    target: &mut CMatrix,
    op: &CMatrix,
    d: usize,
    sites: usize,
    i: usize,
    j: usize,
    coeff: C64,
) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > sites || j > sites {
        return Err(Error::Index(format!(
            "invalid site pair ({i}, {j}) for N = {sites}"
        )));
    }
    if op.dim() != (d * d, d * d) {
        return Err(Error::Index(format!(
            "two-site operator must be {0}x{0}",
            d * d
        )));
    }
    let dim = d.pow(sites as u32);
    if target.dim() != (dim, dim) {
        return Err(Error::Index(format!("target must be {dim}x{dim}")));
    }
    let zero = c(0.0);
    for col in 0..dim {
        let mut digits = basis_digits(col, d, sites);
        let b = digits[i - 1] * d + digits[j - 1];
        for a in 0..d * d {
            let v: C64 = op[[a, b]];
            if v == zero {
                continue;
            }
            digits[i - 1] = a / d;
            digits[j - 1] = a % d;
            target[[index_of(&digits, d), col]] += coeff * v;
        }
    }
    Ok(())
}

/// `target <- op_{ij} target`, applying the two-site operator without embedding it.
pub fn apply_pair_left(
    target: &mut CMatrix,
    op: &CMatrix,
    d: usize,
    sites: usize,
    i: usize,
    j: usize,
) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > sites || j > sites {
        return Err(Error::Index(format!(
            "invalid site pair ({i}, {j}) for N = {sites}"
        )));
    }
    let dd = d * d;
    if op.dim() != (dd, dd) {
        return Err(Error::Index(format!("two-site operator must be {dd}x{dd}")));
    }
    let dim = d.pow(sites as u32);
    if target.nrows() != dim {
        return Err(Error::Index(format!("target must have {dim} rows")));
    }
    let (si, sj) = (d.pow((sites - i) as u32), d.pow((sites - j) as u32));
    let offsets: Vec<usize> = (0..dd).map(|p| (p / d) * si + (p % d) * sj).collect();
    let mut buf = vec![c(0.0); dd];
    for base in 0..dim {
        if (base / si) % d != 0 || (base / sj) % d != 0 {
            continue;
        }
        for mut col in target.columns_mut() {
            for (p, &off) in offsets.iter().enumerate() {
                buf[p] = col[base + off];
            }
            for (a, &off) in offsets.iter().enumerate() {
                col[base + off] = (0..dd).map(|b| op[[a, b]] * buf[b]).sum();
            }
        }
    }
    Ok(())
}

/// Permutation matrix sending the factor at site `n` to site `perm[n]` (0-based).
pub fn site_permutation(d: usize, perm: &[usize]) -> Result<CMatrix> {
    let sites = perm.len();
    let mut seen = vec![false; sites];
    for &p in perm {
        if p >= sites || seen[p] {
            return Err(Error::Index(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let dim = d.pow(sites as u32);
    let mut out = zeros(dim);
    let mut target = vec![0; sites];
    for col in 0..dim {
        let digits = basis_digits(col, d, sites);
        for (n, &p) in perm.iter().enumerate() {
            target[p] = digits[n];
        }
        out[[index_of(&target, d), col]] = c(1.0);
    }
    Ok(out)
}

/// The transposition `P_{ij}` of sites `1 <= i < j <= N`.
pub fn permutation_operator(d: usize, sites: usize, i: usize, j: usize) -> Result<CMatrix> {
    if i == 0 || i >= j || j > sites {
        return Err(Error::Index(format!(
            "site pair ({i}, {j}) out of range for N = {sites}"
        )));
    }
    let mut perm: Vec<usize> = (0..sites).collect();
    perm.swap(i - 1, j - 1);
    site_permutation(d, &perm)
}
