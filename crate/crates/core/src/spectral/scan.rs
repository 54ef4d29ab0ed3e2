use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalgebra::{ChainOperator, Spin};

use super::{distinct_spectrum_probe, relative_imag, DEFAULT_REALITY_TOL};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub resolution: f64,
    /// Reality threshold on `max |Im| / max(1, rho)`.
    pub tol: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_points: 400,
            resolution: 1e-4,
            tol: DEFAULT_REALITY_TOL,
            jobs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub gamma: f64,
    #[serde(with = "crate::serde_nan")]
    pub max_abs_imag: f64,
    pub is_real: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealityScan {
    pub gamma_grid: Vec<f64>,
    /// Relative imaginary size per grid point; NaN (`null` in JSON) where the family was singular.
    #[serde(with = "crate::serde_nan::vec")]
    pub max_imag_curve: Vec<f64>,
    pub is_real: Vec<bool>,
    pub skipped: Vec<f64>,
    /// Every grid interval across which reality changes.
    pub transitions: Vec<(f64, f64)>,
    pub boundary: Option<f64>,
    pub boundary_bracket: Option<(f64, f64)>,
    pub tol: f64,
    pub resolution: f64,
}

impl RealityScan {
    pub fn rows(&self) -> Vec<ScanRow> {
        self.gamma_grid
            .iter()
            .zip(&self.max_imag_curve)
            .zip(&self.is_real)
            .map(|((&gamma, &max_abs_imag), &is_real)| ScanRow {
                gamma,
                max_abs_imag,
                is_real,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,max_abs_imag,is_real\n");
        for row in self.rows() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{}\n",
                row.gamma, row.max_abs_imag, row.is_real
            ));
        }
        out
    }
}

pub fn read_scan_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "gamma,max_abs_imag,is_real" => {}
        _ => return Err(Error::Parse("missing scan CSV header".into())),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad scan row `{l}`")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            };
            let is_real = f[2]
                .trim()
                .parse::<bool>()
                .map_err(|e| Error::Parse(e.to_string()))?;
            Ok(ScanRow {
                gamma: num(f[0])?,
                max_abs_imag: num(f[1])?,
                is_real,
            })
        })
        .collect()
}

fn probe<F>(family: &F, gamma: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<ChainOperator>,
{
    match family(gamma) {
        Ok(op) => Ok(Some(relative_imag(&distinct_spectrum_probe(&op)?))),
        Err(Error::SingularGamma { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Domain(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Scan `(0, gamma_max]` for the first loss of reality, then bisect it.
pub fn reality_boundary<F>(family: F, gamma_max: f64, opts: &ScanOptions) -> Result<RealityScan>
where
    F: Fn(f64) -> Result<ChainOperator> + Sync,
{
    if !(gamma_max > 0.0) || !gamma_max.is_finite() {
        return Err(Error::Domain(format!(
            "scan range (0, {gamma_max}] is empty"
        )));
    }
    if opts.grid_points == 0 || !(opts.resolution > 0.0) {
        return Err(Error::Domain(
            "grid_points and resolution must be positive".into(),
        ));
    }
    let n = opts.grid_points;
    let grid: Vec<f64> = (1..=n).map(|i| gamma_max * i as f64 / n as f64).collect();
    let values: Vec<Option<f64>> = with_pool(opts.jobs, || {
        grid.par_iter()
            .map(|&g| probe(&family, g))
            .collect::<Result<Vec<_>>>()
    })??;
    let real = |v: f64| v <= opts.tol;
    let mut scan = RealityScan {
        max_imag_curve: values.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        is_real: values.iter().map(|v| v.is_some_and(real)).collect(),
        skipped: grid
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_none())
            .map(|(&g, _)| g)
            .collect(),
        gamma_grid: grid.clone(),
        transitions: Vec::new(),
        boundary: None,
        boundary_bracket: None,
        tol: opts.tol,
        resolution: opts.resolution,
    };
    let mut prev: (f64, bool) = (0.0, true);
    for (g, v) in grid.iter().zip(&values) {
        let Some(v) = v else { continue };
        let r = real(*v);
        if r != prev.1 {
            scan.transitions.push((prev.0, *g));
        }
        prev = (*g, r);
    }
    let Some(&(mut lo, mut hi)) = scan.transitions.first() else {
        return Ok(scan);
    };
    while hi - lo > opts.resolution {
        let mut mid = 0.5 * (lo + hi);
        let mut value = probe(&family, mid)?;
        let mut nudge = 0;
        while value.is_none() && nudge < 8 {
            mid += opts.resolution * 0.05;
            value = probe(&family, mid)?;
            nudge += 1;
        }
        match value {
            Some(v) if real(v) => lo = mid,
            Some(_) => hi = mid,
            None => {
                return Err(Error::SingularGamma {
                    gamma: mid,
                    what: "bisection point".into(),
                })
            }
        }
    }
    scan.boundary = Some(0.5 * (lo + hi));
    scan.boundary_bracket = Some((lo, hi));
    Ok(scan)
}

/// Chebyshev polynomial of the second kind `U_n(t)` by recurrence.
pub fn chebyshev_u(n: u32, t: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * t);
    if n == 0 {
        return u0;
    }
    for _ in 1..n {
        (u0, u1) = (u1, 2.0 * t * u1 - u0);
    }
    u1
}

/// Smallest positive `gamma` with `U_{2S}(cos gamma) = 2 cos(pi/N)`.
pub fn chebyshev_boundary(spin: Spin, sites: usize) -> Result<f64> {
    if sites < 3 {
        return Err(Error::Domain("the Chebyshev boundary needs N >= 3".into()));
    }
    let target = 2.0 * (std::f64::consts::PI / sites as f64).cos();
    let n = spin.twice();
    let f = |g: f64| chebyshev_u(n, g.cos()) - target;
    // U_{2S}(cos g) = sin((2S+1)g)/sin g falls from 2S+1 to 0 on (0, pi/(2S+1))
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI / (n as f64 + 1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{hamiltonian, ChainSpec, CouplingSchedule};
    use std::f64::consts::PI;

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_u(2, 0.5), 0.0);
        assert!((chebyshev_u(3, 0.3) - (8.0 * 0.027 - 4.0 * 0.3)).abs() < 1e-15);
        for n in 3..8 {
            assert!((chebyshev_boundary(Spin::HALF, n).unwrap() - PI / n as f64).abs() < 1e-14);
        }
        let g = chebyshev_boundary(Spin::ONE, 4).unwrap();
        assert!((g - ((1.0 + 2f64.sqrt()).sqrt() / 2.0).acos()).abs() < 1e-14);
        assert!((g / PI - 0.217).abs() < 1e-3);
        let g = chebyshev_boundary(Spin::THREE_HALVES, 5).unwrap();
        assert!((g / PI - 0.172).abs() < 1e-3);
        // N = 3 reproduces pi/(2(S+1))
        for twice in 1..=3 {
            let g = chebyshev_boundary(Spin::from_twice(twice), 3).unwrap();
            assert!((g - PI / (twice as f64 + 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn three_site_boundary_and_csv() {
        let family = |g: f64| {
            let spec = ChainSpec::new(
                Spin::HALF,
                3,
                g,
                CouplingSchedule::SingleS {
                    s: 0,
                    a: vec![1.0, -1.0],
                },
            )?;
            hamiltonian(&spec)
        };
        let opts = ScanOptions {
            grid_points: 60,
            resolution: 1e-6,
            ..Default::default()
        };
        let scan = reality_boundary(family, 1.5, &opts).unwrap();
        let b = scan.boundary.unwrap();
        assert!((b - PI / 3.0).abs() < 1e-5, "{b}");
        let (lo, hi) = scan.boundary_bracket.unwrap();
        assert!(lo <= b && b <= hi && hi - lo <= 1e-6);
        let rows = read_scan_csv(&scan.to_csv()).unwrap();
        assert_eq!(rows, scan.rows());
        let back: RealityScan =
            serde_json::from_str(&serde_json::to_string(&scan).unwrap()).unwrap();
        assert_eq!(back.boundary, scan.boundary);
    }

    #[test]
    fn positive_couplings_have_no_transition() {
        let family = |g: f64| {
            let spec = ChainSpec::new(
                Spin::HALF,
                3,
                g,
                CouplingSchedule::SingleS {
                    s: 0,
                    a: vec![1.0, 0.5],
                },
            )?;
            hamiltonian(&spec)
        };
        let opts = ScanOptions {
            grid_points: 40,
            ..Default::default()
        };
        let scan = reality_boundary(family, 1.5, &opts).unwrap();
        assert!(scan.boundary.is_none());
        assert!(scan.is_real.iter().all(|&r| r));
        assert!(reality_boundary(|_| unreachable!(), 0.0, &opts).is_err());
    }

    #[test]
    fn singular_points_survive_json() {
        // [2] = 0 at gamma = pi/2 for S = 1/2
        let family = |g: f64| {
            let spec = ChainSpec::new(
                Spin::HALF,
                3,
                g,
                CouplingSchedule::SingleS {
                    s: 0,
                    a: vec![1.0, 1.0],
                },
            )?;
            hamiltonian(&spec)
        };
        let opts = ScanOptions {
            grid_points: 4,
            ..Default::default()
        };
        let scan = reality_boundary(family, 2.0 * PI / 3.0, &opts).unwrap();
        assert_eq!(scan.skipped.len(), 1);
        let text = serde_json::to_string(&scan).unwrap();
        assert!(text.contains("null"));
        let back: RealityScan = serde_json::from_str(&text).unwrap();
        assert!(
            back.max_imag_curve[2].is_nan() && back.max_imag_curve[0] == scan.max_imag_curve[0]
        );
    }
}
