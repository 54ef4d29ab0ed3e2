//! Named numerical checks of the algebraic identities behind the chains.
//!
//! Every identity reduces to a relative Frobenius residual compared with a
//! tolerance that depends only on the dimension of the space it acts on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{hamiltonian, ChainSpec, CouplingSchedule};
use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator, dagger, frobenius, identity, inverse, rel_residual, zeros, CMatrix, C64,
};
use crate::metric::{
    bond_intertwining_residual, conjugation_residual, det_formula_check, eta_product,
    hermitian_metric, isotypic_identity_check, symmetrization_residual, universal_eta,
    ProductOrder,
};
use crate::qalgebra::{
    coproduct_action, embed_pair, isotypic_projectors, permutation_operator, projector, q_number,
    r_matrix, r_matrix_fused, singlet_vector, site_permutation, total_casimir, total_weights_twice,
    FusedFactor, Generator, RSign, Spin, SpinRep,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityParams {
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub gamma: f64,
    pub seed: u64,
    /// Size of a seeded random perturbation added to `R^+`; zero in normal runs.
    #[serde(default)]
    pub perturbation: f64,
}

impl IdentityParams {
    pub fn new(spin: Spin, sites: usize, gamma: f64) -> Self {
        Self {
            spin,
            sites,
            gamma,
            seed: 0,
            perturbation: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_name: String,
    pub statement: String,
    /// NaN (`null` in JSON) when the check could not be evaluated.
    #[serde(with = "crate::serde_nan")]
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub params: IdentityParams,
    /// Set when the check could not be evaluated, e.g. a singular projector.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scorecard {
    pub all_pass: bool,
    pub total: usize,
    pub failed: usize,
    pub reports: Vec<IdentityReport>,
}

impl Scorecard {
    pub fn from_reports(reports: Vec<IdentityReport>) -> Self {
        let failed = reports.iter().filter(|r| !r.pass).count();
        Self {
            all_pass: failed == 0,
            total: reports.len(),
            failed,
            reports,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scorecard serializes")
    }
}

/// Tolerance for a check acting on a space of dimension `dim`.
pub fn tolerance_for(dim: usize) -> f64 {
    if dim <= 256 {
        1e-10
    } else {
        1e-8
    }
}

/// Residual and the dimension it was measured in.
type Check = fn(&IdentityParams) -> Result<(f64, usize)>;

struct Identity {
    name: &'static str,
    statement: &'static str,
    check: Check,
}

const REGISTRY: &[Identity] = &[
    Identity {
        name: "uq_relations",
        statement: "K E K^-1 = q E, K F K^-1 = q^-1 F, [E, F] = [2k] on one site and on coproduct images",
        check: uq_relations,
    },
    Identity {
        name: "hopf_star_defect",
        statement: "Delta^(N)(X)* = Rev Delta^(N)(X*) Rev with E* = F, K* = K^-1",
        check: hopf_star_defect,
    },
    Identity {
        name: "casimir_value",
        statement: "(EF + FE)/2 - cos(g)/(4 sin^2 g) (K - K^-1)^2 = [S][S+1] on V_S",
        check: casimir_value,
    },
    Identity {
        name: "casimir_conjugation",
        statement: "C_N* = Rev C_N Rev = C_N at q -> q^-1",
        check: casimir_conjugation,
    },
    Identity {
        name: "projector_conjugation",
        statement: "(P^s)* = P_21 P^s P_21 = P^s at q -> q^-1",
        check: projector_conjugation,
    },
    Identity {
        name: "temperley_lieb",
        statement: "P0_(n-1,n) P0_(n,n+1) P0_(n-1,n) = P0_(n-1,n) / [2S+1]^2 and its mirror",
        check: temperley_lieb,
    },
    Identity {
        name: "yang_baxter",
        statement: "R12 R13 R23 = R23 R13 R12",
        check: yang_baxter,
    },
    Identity {
        name: "r_conjugation",
        statement: "(R^+)* = R^- = P (R^+)^-1 P",
        check: r_conjugation,
    },
    Identity {
        name: "r_intertwines",
        statement: "R Delta(X) = P Delta(X) P R for X in {E, F, K}",
        check: r_intertwines,
    },
    Identity {
        name: "r_fusion",
        statement: "(Delta x id) R = R13 R23 and (id x Delta) R = R13 R12",
        check: r_fusion,
    },
    Identity {
        name: "rp_intertwines",
        statement: "R^\u{b1} P^s_12 = P^s_21 R^\u{b1} for every channel s",
        check: rp_intertwines,
    },
    Identity {
        name: "h_symmetry",
        statement: "[H, Delta^(N)(X)] = 0 for a random general coupling table",
        check: h_symmetry,
    },
    Identity {
        name: "eta_orderings",
        statement: "leftward and rightward products of R_ij give the same eta^\u{b1}",
        check: eta_orderings,
    },
    Identity {
        name: "eta_conjugate",
        statement: "(eta^+)* = eta^-",
        check: eta_conjugate,
    },
    Identity {
        name: "eta_symmetrizes",
        statement: "eta^\u{b1} P_(n,n+1) = P_(n+1,n) eta^\u{b1}, and eta(alpha) H = H* eta(alpha)",
        check: eta_symmetrizes,
    },
    Identity {
        name: "det_formula",
        statement: "det(e^ia eta^+ + e^-ia eta^-) = prod_s (2 cos(a + g x_s))^((2s+1) nu_s), det eta^\u{b1} = 1",
        check: det_formula,
    },
    Identity {
        name: "isotypic",
        statement: "(eta^-)^-1 eta^+ = sum_s q^(2 s(s+1) - 2NS(S+1)) P_s",
        check: isotypic,
    },
    Identity {
        name: "singlet_vector",
        statement: "Delta(E), Delta(F) annihilate the q-singlet and Delta(K) fixes it",
        check: singlet_annihilation,
    },
];

pub fn identity_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|i| i.name).collect()
}

fn validate(params: &IdentityParams) -> Result<SpinRep> {
    if params.sites < 2 {
        return Err(Error::Domain(format!(
            "N = {} but identities need N >= 2",
            params.sites
        )));
    }
    crate::chain::check_dim(
        params.spin,
        params.sites.max(3),
        crate::chain::DEFAULT_DIM_CAP,
    )?;
    SpinRep::new(params.spin, params.gamma)
}

/// Evaluate one registered identity. Only unknown names and invalid
/// parameters are errors; evaluation failures land in the report.
pub fn run_identity(name: &str, params: &IdentityParams) -> Result<IdentityReport> {
    let entry = REGISTRY
        .iter()
        .find(|i| i.name == name)
        .ok_or_else(|| Error::UnknownIdentity(name.to_string()))?;
    validate(params)?;
    Ok(evaluate(entry, params))
}

fn evaluate(entry: &Identity, params: &IdentityParams) -> IdentityReport {
    let (residual, tolerance, error) = match (entry.check)(params) {
        Ok((r, dim)) => (r, tolerance_for(dim), None),
        Err(e) => (f64::NAN, tolerance_for(0), Some(e.to_string())),
    };
    IdentityReport {
        identity_name: entry.name.to_string(),
        statement: entry.statement.to_string(),
        residual,
        tolerance,
        pass: error.is_none() && residual < tolerance,
        params: params.clone(),
        error,
    }
}

/// Fractions of `pi/(2S)` sampled by [`default_lattice`].
pub const GAMMA_FRACTIONS: [f64; 5] = [0.0, 0.13, 0.29, 0.47, 0.71];

/// `S in {1/2, 1, 3/2}`, `N in {2, 3, 4}`, five deformations each.
pub fn default_lattice(seed: u64) -> Vec<IdentityParams> {
    let mut out = Vec::new();
    for twice in 1..=3 {
        let spin = Spin::from_twice(twice);
        for sites in 2..=4 {
            for f in GAMMA_FRACTIONS {
                let gamma = f * std::f64::consts::PI / twice as f64;
                out.push(IdentityParams {
                    seed,
                    ..IdentityParams::new(spin, sites, gamma)
                });
            }
        }
    }
    out
}

/// Every identity at every lattice point, in registry then lattice order.
pub fn run_on(lattice: &[IdentityParams]) -> Scorecard {
    run_entries(REGISTRY.iter().collect(), lattice)
}

/// The named identities at every lattice point, in the order given.
pub fn run_named(names: &[&str], lattice: &[IdentityParams]) -> Result<Scorecard> {
    let entries = names
        .iter()
        .map(|n| {
            REGISTRY
                .iter()
                .find(|i| i.name == *n)
                .ok_or_else(|| Error::UnknownIdentity(n.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(run_entries(entries, lattice))
}

fn run_entries(entries: Vec<&Identity>, lattice: &[IdentityParams]) -> Scorecard {
    let jobs: Vec<(&Identity, &IdentityParams)> = entries
        .into_iter()
        .flat_map(|i| lattice.iter().map(move |p| (i, p)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|(entry, params)| match validate(params) {
            Ok(_) => evaluate(entry, params),
            Err(e) => IdentityReport {
                identity_name: entry.name.to_string(),
                statement: entry.statement.to_string(),
                residual: f64::NAN,
                tolerance: tolerance_for(0),
                pass: false,
                params: (*params).clone(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    Scorecard::from_reports(reports)
}

pub fn run_all(seed: u64) -> Scorecard {
    run_on(&default_lattice(seed))
}

fn rng(params: &IdentityParams, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt))
}

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    CMatrix::from_shape_fn((dim, dim), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// `R^+` and `R^-`, with the optional perturbation added to `R^+` only.
fn r_pair(rep: &SpinRep, params: &IdentityParams) -> Result<(CMatrix, CMatrix)> {
    let mut plus = r_matrix(rep, RSign::Plus)?.matrix;
    let minus = r_matrix(rep, RSign::Minus)?.matrix;
    if params.perturbation != 0.0 {
        let noise = random_matrix(&mut rng(params, 17), plus.nrows());
        plus = plus + noise * c(params.perturbation);
    }
    Ok((plus, minus))
}

fn coproducts(rep: &SpinRep, sites: usize) -> Result<[CMatrix; 3]> {
    Ok([
        coproduct_action(rep, sites, Generator::E)?.matrix,
        coproduct_action(rep, sites, Generator::F)?.matrix,
        coproduct_action(rep, sites, Generator::K)?.matrix,
    ])
}

/// Site reversal on `N` sites.
fn reversal(d: usize, sites: usize) -> Result<CMatrix> {
    let perm: Vec<usize> = (0..sites).rev().collect();
    site_permutation(d, &perm)
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn uq_relations(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let q = crate::linalg::phase(p.gamma);
    let check = |e: &CMatrix, f: &CMatrix, k: &CMatrix, twice: &[i32]| -> Result<f64> {
        let k_inv = inverse(k)?;
        let n = k.nrows();
        let mut bracket = zeros(n);
        for (i, &w) in twice.iter().enumerate() {
            bracket[[i, i]] = c(q_number(w as f64, p.gamma));
        }
        Ok(worst([
            rel_residual(&k.dot(e).dot(&k_inv), &(e * q)),
            rel_residual(&k.dot(f).dot(&k_inv), &(f * q.inv())),
            rel_residual(&commutator(e, f), &bracket),
            rel_residual(&k.dot(&k_inv), &identity(n)),
        ]))
    };
    let single = check(&rep.e, &rep.f, &rep.k, rep.twice_weights())?;
    let [e, f, k] = coproducts(&rep, p.sites)?;
    let chain = check(&e, &f, &k, &total_weights_twice(p.spin, p.sites))?;
    Ok((single.max(chain), e.nrows()))
}

fn hopf_star_defect(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let rev = reversal(rep.dim(), p.sites)?;
    let [e, f, k] = coproducts(&rep, p.sites)?;
    let k_inv = inverse(&k)?;
    let flip = |m: &CMatrix| rev.dot(m).dot(&rev);
    let r = worst([
        rel_residual(&dagger(&e), &flip(&f)),
        rel_residual(&dagger(&f), &flip(&e)),
        rel_residual(&dagger(&k), &flip(&k_inv)),
    ]);
    Ok((r, e.nrows()))
}

fn casimir_value(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let g = p.gamma;
    let s = p.spin.value();
    let d = rep.dim();
    let sym = (rep.e.dot(&rep.f) + rep.f.dot(&rep.e)) * c(0.5);
    let cas = if g.sin().abs() > 1e-3 {
        let diff = &rep.k - &rep.k_inv;
        sym - diff.dot(&diff) * c(g.cos() / (4.0 * g.sin().powi(2)))
    } else {
        total_casimir(&rep, 1)?.matrix
    };
    let value = q_number(s, g) * q_number(s + 1.0, g);
    Ok((rel_residual(&cas, &(identity(d) * c(value))), d))
}

fn casimir_conjugation(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let mirrored = SpinRep::new(p.spin, -p.gamma)?;
    let rev = reversal(rep.dim(), p.sites)?;
    let cas = total_casimir(&rep, p.sites)?.matrix;
    let conj = dagger(&cas);
    let r = worst([
        rel_residual(&conj, &rev.dot(&cas).dot(&rev)),
        rel_residual(&conj, &total_casimir(&mirrored, p.sites)?.matrix),
    ]);
    Ok((r, cas.nrows()))
}

fn projector_conjugation(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let mirrored = SpinRep::new(p.spin, -p.gamma)?;
    let d = rep.dim();
    let swap = permutation_operator(d, 2, 1, 2)?;
    let mut r: f64 = 0.0;
    for s in 0..=p.spin.twice() {
        let pm = projector(&rep, s)?.matrix;
        let conj = dagger(&pm);
        r = r
            .max(rel_residual(&conj, &swap.dot(&pm).dot(&swap)))
            .max(rel_residual(&conj, &projector(&mirrored, s)?.matrix));
    }
    Ok((r, d * d))
}

fn temperley_lieb(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let sites = p.sites.max(3);
    let p0 = projector(&rep, 0)?.matrix;
    let mu = q_number(p.spin.twice() as f64 + 1.0, p.gamma).powi(-2);
    let bonds: Vec<CMatrix> = (1..sites)
        .map(|n| embed_pair(&p0, d, sites, n, n + 1))
        .collect::<Result<_>>()?;
    let mut r: f64 = 0.0;
    for w in bonds.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        r = r
            .max(rel_residual(&a.dot(b).dot(a), &(a * c(mu))))
            .max(rel_residual(&b.dot(a).dot(b), &(b * c(mu))));
    }
    for b in &bonds {
        r = r.max(rel_residual(&b.dot(b), b));
    }
    Ok((r, bonds[0].nrows()))
}

fn yang_baxter(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let (plus, minus) = r_pair(&rep, p)?;
    let mut r: f64 = 0.0;
    for m in [&plus, &minus] {
        let r12 = embed_pair(m, d, 3, 1, 2)?;
        let r13 = embed_pair(m, d, 3, 1, 3)?;
        let r23 = embed_pair(m, d, 3, 2, 3)?;
        r = r.max(rel_residual(
            &r12.dot(&r13).dot(&r23),
            &r23.dot(&r13).dot(&r12),
        ));
    }
    Ok((r, d.pow(3)))
}

fn r_conjugation(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let (plus, minus) = r_pair(&rep, p)?;
    let swap = permutation_operator(d, 2, 1, 2)?;
    let r = worst([
        rel_residual(&dagger(&plus), &minus),
        rel_residual(&swap.dot(&inverse(&plus)?).dot(&swap), &minus),
    ]);
    Ok((r, d * d))
}

fn r_intertwines(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let (plus, minus) = r_pair(&rep, p)?;
    let swap = permutation_operator(d, 2, 1, 2)?;
    let mut r: f64 = 0.0;
    for x in coproducts(&rep, 2)? {
        let opposite = swap.dot(&x).dot(&swap);
        for m in [&plus, &minus] {
            r = r.max(rel_residual(&m.dot(&x), &opposite.dot(m)));
        }
    }
    Ok((r, d * d))
}

fn r_fusion(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let (plus, minus) = r_pair(&rep, p)?;
    let mut r: f64 = 0.0;
    for (sign, m) in [(RSign::Plus, &plus), (RSign::Minus, &minus)] {
        let r12 = embed_pair(m, d, 3, 1, 2)?;
        let r13 = embed_pair(m, d, 3, 1, 3)?;
        let r23 = embed_pair(m, d, 3, 2, 3)?;
        let left = r_matrix_fused(&rep, sign, FusedFactor::Left)?.matrix;
        let right = r_matrix_fused(&rep, sign, FusedFactor::Right)?.matrix;
        r = r
            .max(rel_residual(&left, &r13.dot(&r23)))
            .max(rel_residual(&right, &r13.dot(&r12)));
    }
    Ok((r, d.pow(3)))
}

fn rp_intertwines(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let d = rep.dim();
    let (plus, minus) = r_pair(&rep, p)?;
    let swap = permutation_operator(d, 2, 1, 2)?;
    let mut r: f64 = 0.0;
    for s in 0..=p.spin.twice() {
        let pm = projector(&rep, s)?.matrix;
        let flipped = swap.dot(&pm).dot(&swap);
        for m in [&plus, &minus] {
            let scale = frobenius(m).max(1.0) * frobenius(&pm).max(1.0);
            r = r.max(frobenius(&(m.dot(&pm) - flipped.dot(m))) / scale);
        }
    }
    Ok((r, d * d))
}

fn random_general(p: &IdentityParams, salt: u64) -> Result<CMatrix> {
    let mut g = rng(p, salt);
    let b = (0..p.sites - 1)
        .map(|_| (0..p.spin.dim()).map(|_| g.gen_range(-1.0..1.0)).collect())
        .collect();
    let spec = ChainSpec::new(p.spin, p.sites, p.gamma, CouplingSchedule::General { b })?;
    Ok(hamiltonian(&spec)?.matrix)
}

fn h_symmetry(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let h = random_general(p, 31)?;
    let r = worst(
        coproducts(&rep, p.sites)?
            .iter()
            .map(|x| frobenius(&commutator(&h, x)) / (frobenius(&h) * frobenius(x)).max(1.0)),
    );
    Ok((r, h.nrows()))
}

fn eta_orderings(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let mut r: f64 = 0.0;
    let mut dim = 0;
    for sign in [RSign::Plus, RSign::Minus] {
        let left = eta_product(&rep, p.sites, sign, ProductOrder::Leftward)?.matrix;
        let right = eta_product(&rep, p.sites, sign, ProductOrder::Rightward)?.matrix;
        dim = left.nrows();
        r = r.max(rel_residual(&left, &right));
    }
    Ok((r, dim))
}

fn eta_conjugate(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let pair = universal_eta(&rep, p.sites)?;
    Ok((conjugation_residual(&pair), pair.eta_plus.dim()))
}

fn eta_symmetrizes(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let pair = universal_eta(&rep, p.sites)?;
    let alpha = rng(p, 47).gen_range(-3.0..3.0);
    let eta = hermitian_metric(&pair, alpha)?.eta;
    let h = random_general(p, 53)?;
    let r = bond_intertwining_residual(&pair, &rep)?.max(symmetrization_residual(&eta, &h));
    Ok((r, h.nrows()))
}

fn det_formula(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let pair = universal_eta(&rep, p.sites)?;
    let alpha = rng(p, 61).gen_range(-3.0..3.0);
    let check = det_formula_check(&pair, alpha)?;
    let r = worst([
        check.rel_err,
        check.log_abs_det_plus.abs(),
        check.log_abs_det_minus.abs(),
    ]);
    Ok((r, pair.eta_plus.dim()))
}

fn isotypic(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let pair = universal_eta(&rep, p.sites)?;
    let iso = isotypic_projectors(&rep, p.sites)?;
    let r = isotypic_identity_check(&pair, &iso)?.max(iso.max_residual());
    Ok((r, pair.eta_plus.dim()))
}

fn singlet_annihilation(p: &IdentityParams) -> Result<(f64, usize)> {
    let rep = SpinRep::new(p.spin, p.gamma)?;
    let v = singlet_vector(&rep);
    let [e, f, k] = coproducts(&rep, 2)?;
    let norm = |m: &CMatrix| frobenius(m).max(1.0);
    let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let size = |x: ndarray::Array1<C64>| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let r = worst([
        size(e.dot(&v)) / (norm(&e) * vn),
        size(f.dot(&v)) / (norm(&f) * vn),
        size(k.dot(&v) - &v) / vn,
    ]);
    Ok((r, e.nrows()))
}
