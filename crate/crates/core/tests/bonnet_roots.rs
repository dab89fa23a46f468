//! Root certificates over random admissible curvature inputs, and the
//! grid verification on concrete surfaces.

mod common;

use common::{custom_q, ellipsoid, sphere, sphere_with_mode};
use relgeo4::bonnet::{
    self, verify_bonnet, BonnetError, CandidateStatus, CurvatureField, Proposition,
};
use relgeo4::frame::NormalizationMode;
use relgeo4::rng::Sampler;

#[test]
fn root_certificates_for_ten_thousand_random_triples() {
    let mut sampler = Sampler::new(0xb0_0b1e5);
    let mut certified = 0usize;
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let h = sampler.range_away_from_zero(-2.0, 2.0, 0.01);
        let h2 = sampler.range_away_from_zero(-2.0, 2.0, 0.01);
        let k = sampler.range_away_from_zero(-2.0, 2.0, 0.01);

        match bonnet::mu1(h2, k) {
            Ok(c) => {
                assert!(
                    c.root_residual <= 1e-9,
                    "mu1({h2},{k}): {}",
                    c.root_residual
                );
                certified += 1;
            }
            Err(BonnetError::PreconditionViolated { .. }) => {
                assert!(k * k < h2 * h2 * h2, "mu1 gate misfired at ({h2},{k})");
                violations += 1;
            }
            Err(other) => panic!("unexpected error {other}"),
        }
        match bonnet::mu2(h, k) {
            Ok(c) => {
                assert!(c.root_residual <= 1e-9, "mu2({h},{k}): {}", c.root_residual);
                certified += 1;
            }
            Err(BonnetError::PreconditionViolated { .. }) => {
                assert!(k * (k - 2.0 * h.powi(3)) < 0.0);
                violations += 1;
            }
            Err(other) => panic!("unexpected error {other}"),
        }
        match bonnet::mu3(h, k) {
            Ok(c) => {
                assert!(c.root_residual <= 1e-9, "mu3({h},{k}): {}", c.root_residual);
                certified += 1;
            }
            Err(BonnetError::PreconditionViolated { .. }) => {
                assert!(k * (k - h.powi(3)) < 0.0);
                violations += 1;
            }
            Err(other) => panic!("unexpected error {other}"),
        }
        for (result, gate) in [
            (bonnet::mu_pair_constant_k(h, h2), 3.0 * h * h - 4.0 * h2),
            (bonnet::mu_pair_constant_h2(h, h2), 9.0 * h * h - 8.0 * h2),
            (bonnet::mu_pair_constant_h(h, h2), h * h - h2),
        ] {
            match result {
                Ok(pair) => {
                    for c in pair {
                        assert!(
                            c.root_residual <= 1e-9,
                            "pair root at ({h},{h2}): {}",
                            c.root_residual
                        );
                        certified += 1;
                    }
                }
                Err(BonnetError::PreconditionViolated { .. }) => {
                    assert!(gate < 0.0, "pair gate misfired at ({h},{h2})");
                    violations += 1;
                }
                Err(other) => panic!("unexpected error {other}"),
            }
        }
        match bonnet::minimal_parallel_mus(h, h2, k) {
            Ok(mus) => {
                for mu in mus {
                    assert!((mu * mu * k - 2.0 * mu * h2 + h).abs() <= 1e-9);
                    certified += 1;
                }
            }
            Err(BonnetError::NoRealRoot { .. }) => {
                assert!(h2 * h2 - k * h < 0.0);
                violations += 1;
            }
            Err(other) => panic!("unexpected error {other}"),
        }
        let mu = bonnet::h2_vanishing_mu(h2, k).unwrap();
        assert!((-mu * k + h2).abs() <= 1e-9);
        certified += 1;
    }
    println!("certified {certified} roots, {violations} gate violations");
    assert!(
        certified > 20_000,
        "sampling produced too few admissible cases"
    );
    assert!(violations > 1_000, "sampling produced too few violations");
}

fn verified_propositions(outcome: &bonnet::BonnetOutcome) -> Vec<Proposition> {
    outcome
        .candidates
        .iter()
        .filter(|c| matches!(c.status, CandidateStatus::Verified { verdict: true, .. }))
        .map(|c| c.proposition)
        .collect()
}

#[test]
fn sphere_r2_fires_the_constant_mean_curvature_result() {
    let outcome = verify_bonnet(&sphere(2.0), [3, 3, 3], 1e-6).unwrap();
    let p61 = outcome
        .candidates
        .iter()
        .find(|c| c.proposition == Proposition::P6_1)
        .expect("candidate list contains the K/H2 result");
    let candidate = p61.candidate.expect("applicable on the sphere");
    assert!((candidate.mu + 1.0).abs() <= 1e-9);
    assert!(candidate.root_residual <= 1e-9);
    match &p61.status {
        CandidateStatus::Verified {
            constancy,
            predicted_vs_measured,
            verdict,
        } => {
            assert!(*verdict);
            assert!(constancy.relative_spread <= 1e-7);
            assert!((constancy.mean - 1.0 / 3.0).abs() <= 1e-9);
            assert!(*predicted_vs_measured <= 1e-9);
        }
        other => panic!("expected a verified candidate, got {other:?}"),
    }
}

#[test]
fn mu3_companion_is_reported_with_the_focal_verdict_on_spheres() {
    // every sphere satisfies K = H^3, so the companion distance 1/H exists;
    // it equals the relative radius and must surface as offset-singular
    let outcome = verify_bonnet(&sphere(2.0), [3, 3, 3], 1e-6).unwrap();
    let p63b: Vec<_> = outcome
        .candidates
        .iter()
        .filter(|c| c.proposition == Proposition::P6_3b && c.candidate.is_some())
        .collect();
    assert_eq!(p63b.len(), 2, "main root and companion");
    let companion = p63b
        .iter()
        .find(|c| (c.candidate.unwrap().mu - 2.0).abs() < 1e-9)
        .expect("companion at 1/H = 2");
    assert!(matches!(
        companion.status,
        CandidateStatus::OffsetSingular { .. }
    ));
    assert!((companion.candidate.unwrap().predicted.value + 1.0 / 3.0).abs() <= 1e-9);
}

#[test]
fn constant_q_sphere_verifies_every_surviving_candidate() {
    let spec = sphere_with_mode(1.0, custom_q("0.5"));
    let outcome = verify_bonnet(&spec, [3, 3, 3], 1e-6).unwrap();
    let verified = verified_propositions(&outcome);
    assert!(verified.contains(&Proposition::P6_1));
    assert!(verified.contains(&Proposition::P6_3b));
    assert!(verified.contains(&Proposition::P6_5b));
    for report in &outcome.candidates {
        match (&report.candidate, &report.status) {
            (
                Some(_),
                CandidateStatus::Verified {
                    verdict, constancy, ..
                },
            ) => {
                assert!(*verdict, "{:?} failed verification", report.proposition);
                assert!(constancy.relative_spread <= 1e-7);
            }
            // candidates landing on the focal radius are reported, not
            // dropped; the umbilic sphere has all radii at r/q = 2
            (Some(c), CandidateStatus::OffsetSingular { .. }) => {
                assert!((c.mu - 2.0).abs() <= 1e-7, "{:?}", report.proposition);
            }
            (None, CandidateStatus::NotApplicable { .. }) => {}
            other => panic!("unexpected candidate state {other:?}"),
        }
    }
}

#[test]
fn equiaffine_ellipsoid_behaves_as_an_affine_sphere() {
    // the equiaffine normalization of an ellipsoid is umbilic with
    // constant curvature functions, so the existence machinery fires
    let spec = common::ellipsoid_with_mode(NormalizationMode::Equiaffine);
    let outcome = verify_bonnet(&spec, [3, 3, 3], 1e-6).unwrap();
    for c in &outcome.base_constancy {
        assert!(c.verdict, "{} not constant on the affine sphere", c.field);
    }
    let verified = verified_propositions(&outcome);
    assert!(verified.contains(&Proposition::P6_1));
}

#[test]
fn euclidean_ellipsoid_has_nothing_applicable() {
    match verify_bonnet(&ellipsoid(), [3, 3, 3], 1e-6) {
        Err(BonnetError::NothingApplicable) => {}
        other => panic!("expected NothingApplicable, got {other:?}"),
    }
    // the survey still reports every result as not applicable
    let orientation = ellipsoid().resolve_orientation().unwrap();
    let spec = ellipsoid();
    let curvs: Vec<_> = spec
        .grid_points([3, 3, 3])
        .into_iter()
        .map(|p| spec.frame_at(orientation, p).unwrap().1)
        .collect();
    let outcome = bonnet::survey_curvatures(&curvs, 1e-6);
    assert!(outcome.candidates.iter().all(|c| c.candidate.is_none()));
    // every result is represented in the breakdown
    for proposition in bonnet::ALL_PROPOSITIONS {
        assert!(
            outcome
                .candidates
                .iter()
                .any(|c| c.proposition == proposition),
            "{proposition:?} missing from the survey"
        );
    }
}

#[test]
fn too_coarse_grid_is_rejected() {
    match verify_bonnet(&sphere(1.0), [2, 3, 3], 1e-6) {
        Err(BonnetError::PreconditionViolated { .. }) => {}
        other => panic!("expected PreconditionViolated, got {other:?}"),
    }
}

#[test]
fn minimal_candidate_lands_on_the_focal_radius() {
    // scaled sphere with q = 2 has kappa = 2, K = 8, H2 = 4, H = 2;
    // minimal distances solve 8 mu^2 - 8 mu + 2 = 0 -> double root 1/2,
    // which is exactly the focal radius, so the candidate must be reported
    // as singular rather than verified
    let spec = sphere_with_mode(1.0, custom_q("2"));
    let outcome = verify_bonnet(&spec, [3, 3, 3], 1e-6).unwrap();
    let minimal: Vec<_> = outcome
        .candidates
        .iter()
        .filter(|c| c.proposition == Proposition::Minimal_5b)
        .collect();
    assert_eq!(minimal.len(), 1);
    assert!(matches!(
        minimal[0].status,
        CandidateStatus::OffsetSingular { .. }
    ));
    // the H2-vanishing distance coincides on an umbilic
    let h2zero = outcome
        .candidates
        .iter()
        .find(|c| c.proposition == Proposition::H2Zero_Prop5_1)
        .unwrap();
    assert!(matches!(
        h2zero.status,
        CandidateStatus::OffsetSingular { .. }
    ));
}

#[test]
fn equiaffine_ellipsoid_candidate_predictions_match() {
    let spec = common::ellipsoid_with_mode(NormalizationMode::Equiaffine);
    let outcome = verify_bonnet(&spec, [3, 3, 3], 1e-6).unwrap();
    for report in &outcome.candidates {
        if report.proposition == Proposition::P6_5b {
            if let (
                Some(c),
                CandidateStatus::Verified {
                    constancy, verdict, ..
                },
            ) = (&report.candidate, &report.status)
            {
                assert!(*verdict);
                assert_eq!(c.predicted.field, CurvatureField::H2);
                assert!((constancy.mean - c.predicted.value).abs() <= 1e-7);
            }
        }
    }
}
