use std::f64::consts::PI;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uqchain::chain::{hamiltonian, ChainSpec, CouplingSchedule};
use uqchain::metric::{det_formula_check, gamma_hat, pd_range_scan, universal_eta};
use uqchain::spectral::{
    chebyshev_boundary, conjectured_bound, dk_complete, extract_dk, reality_boundary, ScanOptions,
};
use uqchain::{Spin, SpinRep};

use crate::args::{Format, ReproduceArgs};
use crate::output::{csv, emit, json};
use crate::Status;

pub const GROUPS: [&str; 6] = [
    "three-site",
    "bounds",
    "alternating",
    "dk",
    "determinant",
    "pd-threshold",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Row {
    pub group: String,
    pub case: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Ctx<'a> {
    args: &'a ReproduceArgs,
    rows: Vec<Row>,
}

impl Ctx<'_> {
    fn push(&mut self, group: &str, case: String, expected: f64, observed: f64, tolerance: f64) {
        self.push_with(
            group,
            case,
            expected,
            observed,
            tolerance,
            (observed - expected).abs() < tolerance,
        );
    }

    fn push_with(
        &mut self,
        group: &str,
        case: String,
        expected: f64,
        observed: f64,
        tolerance: f64,
        pass: bool,
    ) {
        self.rows.push(Row {
            group: group.into(),
            case,
            expected,
            observed,
            tolerance,
            pass,
        });
    }
}

fn scan(spin: Spin, s: u32, a: Vec<f64>, resolution: f64) -> Result<f64> {
    let opts = ScanOptions {
        grid_points: 200,
        resolution,
        ..Default::default()
    };
    let sites = a.len() + 1;
    let family = |g: f64| {
        hamiltonian(&ChainSpec::new(
            spin,
            sites,
            g,
            CouplingSchedule::SingleS { s, a: a.clone() },
        )?)
    };
    let result = reality_boundary(family, 0.999 * PI / spin.twice() as f64, &opts)?;
    Ok(result.boundary.unwrap_or(f64::NAN))
}

fn alternating(sites: usize) -> Vec<f64> {
    (0..sites - 1)
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

fn three_site(ctx: &mut Ctx) -> Result<()> {
    for twice in 1..=3 {
        let spin = Spin::from_twice(twice);
        let b = scan(spin, 0, vec![1.0, -1.0], ctx.args.resolution)?;
        let expected = PI / (2.0 * (spin.value() + 1.0));
        ctx.push(
            "three-site",
            format!("S={spin} s=0 a=(1,-1)"),
            expected,
            b,
            1e-3,
        );
    }
    Ok(())
}

fn bounds(ctx: &mut Ctx) -> Result<()> {
    for (twice, s) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)] {
        let spin = Spin::from_twice(twice);
        let b = scan(spin, s, vec![1.0, -1.0], ctx.args.resolution)?;
        ctx.push(
            "bounds",
            format!("S={spin} s={s} a=(1,-1)"),
            conjectured_bound(spin, s),
            b,
            1e-3,
        );
    }
    Ok(())
}

fn alternating_group(ctx: &mut Ctx) -> Result<()> {
    for (twice, sites, quoted) in [
        (1, 4, PI / 4.0),
        (2, 4, 0.217 * PI),
        (1, 5, PI / 5.0),
        (3, 5, 0.172 * PI),
    ] {
        let spin = Spin::from_twice(twice);
        let b = scan(spin, 0, alternating(sites), ctx.args.resolution)?;
        ctx.push(
            "alternating",
            format!("S={spin} N={sites} scan"),
            quoted,
            b,
            1e-3,
        );
        let cheb = chebyshev_boundary(spin, sites)?;
        ctx.push(
            "alternating",
            format!("S={spin} N={sites} chebyshev"),
            b,
            cheb,
            2e-3,
        );
    }
    Ok(())
}

fn near_pole(spin: Spin, g: f64) -> bool {
    (1..=2 * spin.twice() + 1).any(|n| {
        let x = g * n as f64 / PI;
        (x - x.round()).abs() < 1e-2
    })
}

fn dk(ctx: &mut Ctx) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.args.seed);
    let spins: Vec<Spin> = match ctx.args.spin {
        Some(s) if s == Spin::ONE || s == Spin::THREE_HALVES => vec![s],
        Some(s) => bail!("the d_k tables cover S = 1 and S = 3/2, not {s}"),
        None => vec![Spin::ONE, Spin::THREE_HALVES],
    };
    for spin in spins {
        let channels: Vec<u32> = match ctx.args.channel {
            Some(s) if s <= spin.twice() => vec![s],
            Some(s) => bail!("channel s = {s} exceeds 2S for S = {spin}"),
            None => (0..=spin.twice()).collect(),
        };
        for s in channels {
            let mut done = 0;
            while done < 5 {
                let g = rng.gen_range(0.05..0.95) * PI / spin.twice() as f64;
                if near_pole(spin, g) {
                    continue;
                }
                done += 1;
                let mut expected = dk_complete(spin, s, g).unwrap_or_default();
                expected.sort_by(f64::total_cmp);
                let found = extract_dk(spin, s, g)?;
                if found.len() != expected.len() {
                    ctx.push_with(
                        "dk",
                        format!("S={spin} s={s} gamma={g:.6} count"),
                        expected.len() as f64,
                        found.len() as f64,
                        0.5,
                        false,
                    );
                    continue;
                }
                for (k, (e, f)) in expected.iter().zip(&found).enumerate() {
                    ctx.push(
                        "dk",
                        format!("S={spin} s={s} gamma={g:.6} k={}", k + 1),
                        *e,
                        *f,
                        1e-8,
                    );
                }
            }
        }
    }
    Ok(())
}

const METRIC_CASES: [(u32, usize); 5] = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)];

fn determinant(ctx: &mut Ctx) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.args.seed);
    for (twice, sites) in METRIC_CASES {
        let spin = Spin::from_twice(twice);
        for frac in [0.15, 0.55, 0.95] {
            let g = frac * gamma_hat(spin, sites);
            let alpha = rng.gen_range(-PI..PI);
            let pair = universal_eta(&SpinRep::new(spin, g)?, sites)?;
            let check = det_formula_check(&pair, alpha)?;
            ctx.push(
                "determinant",
                format!("S={spin} N={sites} gamma={g:.6} alpha={alpha:.6} relative error"),
                0.0,
                check.rel_err,
                1e-8,
            );
        }
    }
    Ok(())
}

fn pd_threshold(ctx: &mut Ctx) -> Result<()> {
    for (twice, sites) in METRIC_CASES {
        let spin = Spin::from_twice(twice);
        let scan = pd_range_scan(spin, sites, ctx.args.resolution.max(1e-7))?;
        // positivity must hold at least up to the analytic guarantee
        let pass = scan.boundary >= scan.gamma_hat - 1e-3;
        ctx.push_with(
            "pd-threshold",
            format!("S={spin} N={sites}"),
            scan.gamma_hat,
            scan.boundary,
            1e-3,
            pass,
        );
    }
    Ok(())
}

pub fn reproduce_cmd(args: &ReproduceArgs) -> Result<Status> {
    let groups: Vec<&str> = match &args.only {
        Some(g) if GROUPS.contains(&g.as_str()) => vec![g.as_str()],
        Some(g) => bail!(
            "unknown group `{g}` (expected one of {})",
            GROUPS.join(", ")
        ),
        None => GROUPS.to_vec(),
    };
    let mut ctx = Ctx {
        args,
        rows: Vec::new(),
    };
    for g in groups {
        match g {
            "three-site" => three_site(&mut ctx)?,
            "bounds" => bounds(&mut ctx)?,
            "alternating" => alternating_group(&mut ctx)?,
            "dk" => dk(&mut ctx)?,
            "determinant" => determinant(&mut ctx)?,
            _ => pd_threshold(&mut ctx)?,
        }
    }
    let failed = ctx.rows.iter().filter(|r| !r.pass).count();
    for r in &ctx.rows {
        eprintln!(
            "{} {:<13} {:<48} expected {:>12.8} observed {:>12.8}",
            if r.pass { "PASS" } else { "FAIL" },
            r.group,
            r.case,
            r.expected,
            r.observed
        );
    }
    eprintln!(
        "{} of {} checks passed",
        ctx.rows.len() - failed,
        ctx.rows.len()
    );
    let text = match args.output.format {
        Format::Json => json(&ctx.rows)?,
        Format::Csv => csv(
            &["group", "case", "expected", "observed", "tolerance", "pass"],
            ctx.rows.iter().map(|r| {
                vec![
                    r.group.clone(),
                    r.case.clone(),
                    format!("{:.17e}", r.expected),
                    format!("{:.17e}", r.observed),
                    format!("{:e}", r.tolerance),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(if failed == 0 {
        Status::Pass
    } else {
        Status::Negative
    })
}
