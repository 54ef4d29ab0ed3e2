use uqchain::relations::{
    default_lattice, identity_names, run_identity, run_on, IdentityParams, Scorecard,
};
use uqchain::Spin;

#[test]
fn examples() {
    let yb = run_identity("yang_baxter", &IdentityParams::new(Spin::ONE, 3, 0.3)).unwrap();
    assert!(yb.pass && yb.residual < 1e-10);
    let tl = run_identity("temperley_lieb", &IdentityParams::new(Spin::HALF, 3, 0.5)).unwrap();
    assert!(tl.pass);
    let uq = run_identity("uq_relations", &IdentityParams::new(Spin::HALF, 2, 0.0)).unwrap();
    assert!(uq.pass && uq.residual <= f64::EPSILON);
}

#[test]
fn reports_are_reproducible() {
    let p = IdentityParams {
        seed: 11,
        ..IdentityParams::new(Spin::THREE_HALVES, 3, 0.21)
    };
    for name in identity_names() {
        let a = run_identity(name, &p).unwrap();
        let b = run_identity(name, &p).unwrap();
        assert_eq!(a.residual.to_bits(), b.residual.to_bits(), "{name}");
    }
}

#[test]
fn residual_scales_linearly_with_perturbation() {
    let at = |eps: f64| {
        let p = IdentityParams {
            seed: 2,
            perturbation: eps,
            ..IdentityParams::new(Spin::ONE, 3, 0.3)
        };
        ["yang_baxter", "r_conjugation", "r_intertwines"]
            .map(|n| run_identity(n, &p).unwrap().residual)
    };
    let small = at(1e-6);
    let large = at(1e-4);
    for (s, l) in small.iter().zip(&large) {
        let ratio = l / s;
        assert!((ratio / 100.0 - 1.0).abs() < 0.05, "ratio {ratio}");
    }
}

#[test]
fn scorecard_lists_every_identity_in_order() {
    let lattice: Vec<IdentityParams> = default_lattice(4)
        .into_iter()
        .filter(|p| p.sites == 2 && p.spin == Spin::ONE)
        .collect();
    assert_eq!(lattice.len(), 5);
    let card = run_on(&lattice);
    assert!(card.all_pass, "{}", card.to_json());
    let names = identity_names();
    for (i, r) in card.reports.iter().enumerate() {
        assert_eq!(r.identity_name, names[i / lattice.len()]);
        assert_eq!(r.params, lattice[i % lattice.len()]);
    }
    let back: Scorecard = serde_json::from_str(&card.to_json()).unwrap();
    assert_eq!(back.reports.len(), card.reports.len());
}
