use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use uqchain::chain::hamiltonian;
use uqchain::metric::{
    alpha0, eta0, hermitian_metric, matrix_to_json, pd_range_scan, universal_eta,
    MetricDiagnostics, HERMITICITY_TOL,
};
use uqchain::relations::{default_lattice, identity_names, run_named, IdentityParams};
use uqchain::spectral::{reality_boundary, spectrum, ScanOptions, DEFAULT_REALITY_TOL};
use uqchain::{Error, Spin, SpinRep};

use crate::args::{
    Format, MetricArgs, MetricKind, ScanPdArgs, ScanRealityArgs, SpectrumArgs, VerifyArgs,
};
use crate::input::chain_spec;
use crate::output::{csv, emit, json};
use crate::Status;

pub fn spectrum_cmd(args: &SpectrumArgs) -> Result<Status> {
    let spec = chain_spec(&args.chain, None)?;
    let h = hamiltonian(&spec)?;
    let report = spectrum(&h, args.tol.unwrap_or(DEFAULT_REALITY_TOL))?;
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => csv(
            &["re", "im"],
            report
                .eigenvalues
                .iter()
                .map(|z| vec![format!("{:.17e}", z.re), format!("{:.17e}", z.im)]),
        ),
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(if report.is_real {
        Status::Pass
    } else {
        Status::Negative
    })
}

pub fn scan_reality_cmd(args: &ScanRealityArgs) -> Result<Status> {
    // gamma is scanned, so any in-range value will do for validation
    let spec = chain_spec(&args.chain, Some(0.0))?;
    let gamma_max = args
        .gamma_max
        .unwrap_or(0.999 * std::f64::consts::PI / spec.spin.twice() as f64);
    let opts = ScanOptions {
        grid_points: args.grid,
        resolution: args.resolution,
        tol: args.tol.unwrap_or(DEFAULT_REALITY_TOL),
        jobs: args.output.jobs,
    };
    let scan = reality_boundary(|g| hamiltonian(&spec.with_gamma(g)), gamma_max, &opts)?;
    match scan.boundary {
        Some(b) => {
            let (lo, hi) = scan.boundary_bracket.unwrap_or((b, b));
            eprintln!("reality boundary: {b:.10} in [{lo:.10}, {hi:.10}]")
        }
        None => eprintln!("no loss of reality on (0, {gamma_max}]"),
    }
    let text = match args.output.format {
        Format::Json => json(&scan)?,
        Format::Csv => scan.to_csv(),
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(Status::Pass)
}

pub fn scan_pd_cmd(args: &ScanPdArgs) -> Result<Status> {
    let scan = pd_range_scan(args.spin, args.sites, args.resolution)?;
    eprintln!(
        "positive up to {:.10}; analytic guarantee {:.10}",
        scan.boundary, scan.gamma_hat
    );
    let text = match args.output.format {
        Format::Json => json(&scan)?,
        Format::Csv => csv(
            &[
                "S",
                "N",
                "boundary",
                "bracket_lo",
                "bracket_hi",
                "gamma_hat",
                "reached_range_end",
            ],
            [vec![
                scan.spin.to_string(),
                scan.sites.to_string(),
                format!("{:.17e}", scan.boundary),
                format!("{:.17e}", scan.bracket.0),
                format!("{:.17e}", scan.bracket.1),
                format!("{:.17e}", scan.gamma_hat),
                scan.reached_range_end.to_string(),
            ]],
        ),
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(Status::Pass)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: String,
    #[serde(rename = "S")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub gamma: f64,
    pub diagnostics: Option<MetricDiagnostics>,
    /// `||eta H - H* eta|| / (||eta|| ||H||)` for the given chain.
    pub symmetrization_residual: Option<f64>,
    pub is_metric: bool,
    pub error: Option<String>,
    pub eta: Option<serde_json::Value>,
}

pub fn metric_cmd(args: &MetricArgs) -> Result<Status> {
    let spec = chain_spec(&args.chain, None)?;
    let h = hamiltonian(&spec)?;
    let built = match args.kind {
        MetricKind::Universal => {
            let rep = SpinRep::new(spec.spin, spec.gamma)?;
            let pair = universal_eta(&rep, spec.sites)?;
            let alpha = args
                .alpha
                .unwrap_or_else(|| alpha0(spec.spin, spec.sites, spec.gamma));
            hermitian_metric(&pair, alpha).map(|m| (m, Some(alpha)))
        }
        MetricKind::Dynamical => eta0(&h).map(|m| (m, None)),
    };
    let mut report = MetricReport {
        kind: format!("{:?}", args.kind).to_lowercase(),
        spin: spec.spin,
        sites: spec.sites,
        gamma: spec.gamma,
        diagnostics: None,
        symmetrization_residual: None,
        is_metric: false,
        error: None,
        eta: None,
    };
    match built {
        Ok((m, alpha)) => {
            let sym = m.symmetrizes(&h.matrix);
            report.is_metric = m.is_positive_definite && sym < HERMITICITY_TOL;
            report.diagnostics = Some(m.diagnostics(spec.gamma, alpha));
            report.symmetrization_residual = Some(sym);
            if !args.no_matrix {
                report.eta = Some(matrix_to_json(&m.eta));
            }
        }
        // the chain has no metric of this kind: a negative answer, not a failure
        Err(
            e @ (Error::NotQuasiHermitian { .. }
            | Error::IllConditioned { .. }
            | Error::NotDiagonalizable { .. }),
        ) => report.error = Some(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let d = report.diagnostics.as_ref();
            let num = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.17e}"));
            csv(
                &[
                    "kind",
                    "S",
                    "N",
                    "gamma",
                    "alpha",
                    "hermiticity_residual",
                    "min_eig",
                    "is_pd",
                    "symmetrization_residual",
                    "is_metric",
                ],
                [vec![
                    report.kind.clone(),
                    report.spin.to_string(),
                    report.sites.to_string(),
                    format!("{:.17e}", report.gamma),
                    num(d.and_then(|d| d.alpha)),
                    num(d.map(|d| d.hermiticity_residual)),
                    num(d.map(|d| d.min_eig)),
                    d.is_some_and(|d| d.is_pd).to_string(),
                    num(report.symmetrization_residual),
                    report.is_metric.to_string(),
                ]],
            )
        }
    };
    if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    emit(&text, args.output.out.as_deref())?;
    Ok(if report.is_metric {
        Status::Pass
    } else {
        Status::Negative
    })
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<Status> {
    let names = identity_names();
    if args.list {
        emit(&(names.join("\n") + "\n"), args.output.out.as_deref())?;
        return Ok(Status::Pass);
    }
    let selected: Vec<&str> = match &args.only {
        Some(n) => vec![n.as_str()],
        None => names,
    };
    let mut lattice: Vec<IdentityParams> = default_lattice(args.seed)
        .into_iter()
        .filter(|p| args.spin.is_none_or(|s| s == p.spin))
        .filter(|p| args.sites.is_none_or(|n| n == p.sites))
        .collect();
    if let Some(g) = args.gamma {
        lattice.dedup_by(|a, b| a.spin == b.spin && a.sites == b.sites);
        for p in &mut lattice {
            p.gamma = g;
        }
    }
    if lattice.is_empty() {
        let (Some(spin), Some(sites)) = (args.spin, args.sites) else {
            bail!("no lattice point matches the given filters");
        };
        lattice.push(IdentityParams {
            seed: args.seed,
            ..IdentityParams::new(spin, sites, args.gamma.unwrap_or(0.3 / spin.twice() as f64))
        });
    }
    let card = run_named(&selected, &lattice)?;
    eprintln!(
        "{} of {} checks passed",
        card.total - card.failed,
        card.total
    );
    let text = match args.output.format {
        Format::Json => json(&card)?,
        Format::Csv => csv(
            &[
                "identity",
                "S",
                "N",
                "gamma",
                "residual",
                "tolerance",
                "pass",
            ],
            card.reports.iter().map(|r| {
                vec![
                    r.identity_name.clone(),
                    r.params.spin.to_string(),
                    r.params.sites.to_string(),
                    format!("{:.17e}", r.params.gamma),
                    format!("{:.17e}", r.residual),
                    format!("{:e}", r.tolerance),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(if card.all_pass {
        Status::Pass
    } else {
        Status::Negative
    })
}
