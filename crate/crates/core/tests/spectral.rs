mod common;

use proptest::prelude::*;
use std::f64::consts::PI;
use uqchain::linalg::C64;
use uqchain::spectral::{
    dk_complete, mp03_roots, mp04b_roots, mp05b_roots, mu_s, spectrum, DEFAULT_REALITY_TOL,
};
use uqchain::{Error, Spin};

fn near_pole(spin: Spin, g: f64) -> bool {
    (1..=2 * spin.twice() + 1).any(|n| {
        let x = g * n as f64 / PI;
        (x - x.round()).abs() < 1e-2
    })
}

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.1f64, 0.1..2.0f64]
}

fn close_to_any(z: C64, roots: &[C64], tol: f64) -> bool {
    roots.iter().any(|r| (z - r).norm() < tol)
}

/// Every eigenvalue is a root and every root is an eigenvalue.
fn same_set(eigs: &[C64], roots: &[C64], tol: f64) -> Result<(), TestCaseError> {
    for z in eigs {
        prop_assert!(
            close_to_any(*z, roots, tol),
            "eigenvalue {z} not among {roots:?}"
        );
    }
    for r in roots {
        prop_assert!(
            close_to_any(*r, eigs, tol),
            "root {r} missing from spectrum"
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn three_site_quadratic_factors(
        twice in 2u32..=3,
        s_pick in 0u32..4,
        a1 in coupling(),
        a2 in coupling(),
        frac in 0.02..0.98f64,
    ) {
        let spin = Spin::from_twice(twice);
        let s = s_pick % (twice + 1);
        let g = frac * PI / twice as f64;
        prop_assume!(!near_pole(spin, g));
        let h = match common::single_h(spin, s, g, vec![a1, a2]) {
            Ok(h) => h,
            Err(Error::SingularGamma { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let ds = dk_complete(spin, s, g).unwrap();
        for d in &ds {
            // stay away from exceptional points, where eigenvalues lose half their digits
            prop_assume!(((a1 - a2).powi(2) + 4.0 * a1 * a2 * d).abs() > 1e-3);
        }
        let rep = spectrum(&h, DEFAULT_REALITY_TOL).unwrap();
        let scale = (a1.abs() + a2.abs()).max(1.0);
        for z in &rep.eigenvalues {
            if z.norm() < 1e-8 * scale {
                continue;
            }
            let hit = ds.iter().any(|d| {
                (z * z - z * (a1 + a2) + a1 * a2 * (1.0 - d)).norm() < 1e-8 * scale * scale
            });
            prop_assert!(hit, "S = {spin}, s = {s}: eigenvalue {z} fits no factor of {ds:?}");
        }
    }

    #[test]
    fn reality_criterion_three_sites(
        twice in 1u32..=3,
        a1 in coupling(),
        a2 in coupling(),
        frac in 0.02..0.98f64,
    ) {
        let spin = Spin::from_twice(twice);
        let g = frac * PI / twice as f64;
        prop_assume!(!near_pole(spin, g));
        let mu = mu_s(spin, g);
        let disc = (a1 - a2).powi(2) + 4.0 * a1 * a2 * mu;
        prop_assume!(disc.abs() > 1e-4);
        let h = common::single_h(spin, 0, g, vec![a1, a2]).unwrap();
        let rep = spectrum(&h, DEFAULT_REALITY_TOL).unwrap();
        prop_assert_eq!(rep.is_real, disc >= 0.0);
        let scale = (a1.abs() + a2.abs()).max(1.0);
        same_set(&rep.eigenvalues, &mp03_roots(a1, a2, mu), 1e-8 * scale)?;
        if a1 * a2 > 0.0 {
            prop_assert!(rep.is_real);
        }
    }

    #[test]
    fn four_site_factorization(
        twice in 1u32..=3,
        a1 in coupling(),
        a2 in coupling(),
        frac in 0.02..0.98f64,
    ) {
        let spin = Spin::from_twice(twice);
        let g = frac * PI / twice as f64;
        prop_assume!(!near_pole(spin, g));
        let mu = mu_s(spin, g);
        let discs = [
            (a1 - a2).powi(2) + 8.0 * a1 * a2 * mu,
            a2 * a2 + 4.0 * a1 * a1 + 8.0 * a1 * a2 * mu,
        ];
        prop_assume!(discs.iter().all(|d| d.abs() > 1e-3));
        let h = common::single_h(spin, 0, g, vec![a1, a2, a1]).unwrap();
        let rep = spectrum(&h, DEFAULT_REALITY_TOL).unwrap();
        let scale = (a1.abs() + a2.abs()).max(1.0);
        same_set(&rep.eigenvalues, &mp04b_roots(a1, a2, mu), 1e-8 * scale)?;
    }

    #[test]
    fn five_site_alternating_factorization(
        twice in 1u32..=2,
        a in coupling(),
        frac in 0.02..0.98f64,
    ) {
        let spin = Spin::from_twice(twice);
        let g = frac * PI / twice as f64;
        prop_assume!(!near_pole(spin, g));
        let mu = mu_s(spin, g);
        let roots = mp05b_roots(a, mu);
        // coinciding roots mean an exceptional point
        for (i, r) in roots.iter().enumerate() {
            for q in &roots[i + 1..] {
                prop_assume!((r - q).norm() > 1e-3 || (r.norm() < 1e-12 && q.norm() < 1e-12));
            }
        }
        let h = common::single_h(spin, 0, g, vec![a, -a, a, -a]).unwrap();
        let rep = spectrum(&h, DEFAULT_REALITY_TOL).unwrap();
        same_set(&rep.eigenvalues, &roots, 1e-8 * a.abs().max(1.0))?;
    }
}
