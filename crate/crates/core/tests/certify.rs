use std::f64::consts::{PI, SQRT_2};

use bubblering::certify::{
    b_star, certify_shape, explicit_bound, norbury_scaling_probe, proof_chain, universal_we_min, Branch,
    BOUND_FORM_CONSTANT,
};
use bubblering::geometry::random::random_thick_shape;
use bubblering::geometry::{geometry_report, normalize_shape, CrossSection};
use bubblering::Verdict;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn chain_holds_on_thick_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let shape = random_thick_shape(&mut rng);
        let margins = proof_chain(&shape).unwrap();
        assert!(margins.worst() >= 0.0, "{margins:?} for {:?}", shape.kind());
        let cert = certify_shape(&shape).unwrap();
        assert!(cert.is_thick);
        assert!(cert.measured.unwrap().we_min >= cert.we_min);
    }
}

#[test]
fn probe_rows_agree_with_geometry() {
    for r0 in [1.0, 2.5] {
        let rows = norbury_scaling_probe(r0, &[1e-1, 1e-2, 1e-3]).unwrap();
        for row in rows {
            let shape = CrossSection::disk(r0, r0 * (1.0 - row.eps_ratio)).unwrap();
            let rep = geometry_report(&shape).unwrap();
            assert!((rep.delta - row.delta).abs() <= 1e-8 * row.delta.abs().max(1.0));
            assert!((rep.mu - row.mu).abs() <= 1e-10 * row.mu);
            assert_eq!(row.we_min, universal_we_min(row.mu, row.delta));
        }
    }
    assert!(norbury_scaling_probe(1.0, &[1.5]).is_err());
}

#[test]
fn certificate_is_scale_free() {
    let shape = CrossSection::disk(1.6, 1.0).unwrap();
    let a = certify_shape(&shape).unwrap();
    let b = certify_shape(&shape.scaled(7.0).unwrap()).unwrap();
    assert!((a.we_min - b.we_min).abs() < 1e-10 * a.we_min);
    assert!((a.measured.unwrap().we_min - b.measured.unwrap().we_min).abs() < 1e-8);
}

#[test]
fn explicit_bound_requires_normalized_report() {
    let rep = geometry_report(&CrossSection::disk(3.0, 1.0).unwrap()).unwrap();
    assert!(explicit_bound(&rep).is_err());
    let normalized = normalize_shape(&CrossSection::disk(3.0, 1.0).unwrap()).unwrap().shape;
    let cert = explicit_bound(&geometry_report(&normalized).unwrap()).unwrap();
    assert_eq!(cert.branch, Branch::LargeRadius);
    assert!((cert.b_star - PI / (36.0 * cert.mu * cert.mu)).abs() < 1e-15);
}

#[test]
fn thick_disk_below_bound_is_ruled_out() {
    let cert = certify_shape(&CrossSection::disk(1.5, SQRT_2).unwrap()).unwrap();
    assert!(cert.is_thick);
    assert_eq!(cert.verdict(0.5 * cert.we_min), Verdict::RuledOut);
    assert_eq!(cert.verdict(2.0 * cert.we_min), Verdict::NotRuledOut);
    let thin = certify_shape(&CrossSection::disk(5.0, 1.0).unwrap()).unwrap();
    assert!(!thin.is_thick);
    assert_eq!(thin.verdict(1e-9), Verdict::NotRuledOut);
}

proptest! {
    #[test]
    fn bound_dominates_rational_form(mu in 0.05f64..50.0, delta in 0.0f64..1e3) {
        let form = BOUND_FORM_CONSTANT / (mu + mu.powi(3)) * (1.0 / (mu * mu) + delta);
        prop_assert!(universal_we_min(mu, delta) >= form * (1.0 - 1e-12));
    }

    #[test]
    fn bound_is_monotone(mu in 0.05f64..50.0, dmu in 0.0f64..5.0, delta in 0.0f64..100.0, dd in 0.0f64..100.0) {
        prop_assert!(universal_we_min(mu, delta + dd) >= universal_we_min(mu, delta));
        prop_assert!(universal_we_min(mu + dmu, delta) <= universal_we_min(mu, delta));
    }

    #[test]
    fn verdict_is_monotone_in_weber(r0 in 1.42f64..1.63, we in 0.0f64..2.0, dw in 0.0f64..2.0) {
        let cert = certify_shape(&CrossSection::disk(r0, SQRT_2).unwrap()).unwrap();
        if cert.verdict(we + dw) == Verdict::RuledOut {
            prop_assert_eq!(cert.verdict(we), Verdict::RuledOut);
        }
    }

    #[test]
    fn b_star_stays_in_unit_interval(mu in 0.01f64..100.0) {
        let (_, b) = b_star(mu);
        prop_assert!(b > 0.0 && b <= 0.5);
    }
}
