use std::f64::consts::PI;
use std::sync::Arc;

use folia::scenarios::{build, build_flat_torus, NAMES};
use folia::verify::*;
use folia::manifold::VectorField;
use folia::Jet2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn constant_field_has_zero_divergence_integral() {
    let s = build_flat_torus(3, 1).unwrap();
    let x: VectorField = Arc::new(|_q: &[Jet2]| vec![Jet2::constant(1.0), Jet2::constant(-2.0), Jet2::constant(0.5)]);
    let rep = verify_divergence_theorem(&s, &x, &s.grid(None).unwrap(), 0.0).unwrap();
    assert_eq!(rep.residual, 0.0);
    assert_eq!(rep.verdict, Verdict::Pass);
}

#[test]
fn trig_field_on_flat_torus_at_32_nodes() {
    let s = build_flat_torus(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = TrigField::random(&s.structure, Support::Ambient, 3, 4, &mut rng).vector_field(&s.structure);
    let grid = s.grid(Some(&[32, 32, 32])).unwrap();
    let rep = verify_divergence_theorem(&s, &x, &grid, 1e-9).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    assert!(rep.get("integral_abs_div").unwrap() > 0.1);
}

#[test]
fn sigma1_normal_divergence_on_warped_torus() {
    let s = build("warped_torus_4").unwrap();
    let rep = verify_sigma1_normal(&s, &Settings::new(&s, None).unwrap()).unwrap();
    assert!(rep.residual.abs() <= 1e-7);
    assert!(rep.get("integral_abs_div").unwrap() > 1e-3);
}

#[test]
fn admissible_harmonic_scenarios_pass_every_formula() {
    for name in NAMES {
        let s = build(name).unwrap();
        if !(s.flags.admissible && s.flags.harmonic_perp) {
            continue;
        }
        let set = Settings::new(&s, None).unwrap();
        let mut reports = vec![verify_reeb(&s, &set).unwrap()];
        for r in 0..s.leaf_dim() {
            reports.push(verify_main(&s, r, &set).unwrap());
            for leaf in &s.leaves {
                reports.push(verify_leaf(&s, r, &leaf.name, &set).unwrap());
            }
        }
        for rep in reports {
            assert_eq!(rep.verdict, Verdict::Pass, "{name} {} {}", rep.formula, rep.residual);
        }
    }
}

#[test]
fn round_s3_main_formula_is_inadmissible() {
    let s = build("round_s3").unwrap();
    let rep = verify_main(&s, 0, &Settings::new(&s, None).unwrap()).unwrap();
    assert_eq!(rep.verdict, Verdict::Inadmissible);
    assert!((rep.residual + 4.0 * PI * PI).abs() <= 1e-6);
    assert!((rep.admissibility_max - 1.0).abs() <= 1e-9);
}

#[test]
fn heisenberg_separates_projected_and_riemannian_curvature() {
    let s = build("heisenberg").unwrap();
    let rep = verify_main(&s, 0, &Settings::new(&s, None).unwrap()).unwrap();
    assert!(rep.residual.abs() <= 1e-9);
    assert!((rep.get("riemannian_residual").unwrap() + 0.25).abs() <= 1e-9);
    assert_eq!(rep.verdict, Verdict::Inadmissible);
}

#[test]
fn order_out_of_range_is_an_error() {
    let s = build("warped_torus_3").unwrap();
    let set = Settings::new(&s, None).unwrap();
    assert!(verify_main(&s, 1, &set).is_err());
    assert!(verify_leaf(&s, 0, "no such leaf", &set).is_err());
}

#[test]
fn leaf_on_homogeneous_backend_is_unsupported() {
    let s = build("round_s3").unwrap();
    let set = Settings::new(&s, None).unwrap();
    assert!(matches!(verify_leaf(&s, 0, "any", &set), Err(folia::GeometryError::UnsupportedLeaf(_))));
}

#[test]
fn sigma2_image_diagnostics() {
    let flat = build("flat_torus").unwrap();
    let rep = sigma2_image_diagnostic(&flat, 0.0, &Settings::new(&flat, None).unwrap()).unwrap();
    assert_eq!(rep.verdict, Verdict::Diagnostic);
    assert_eq!(rep.get("min_sigma_2"), Some(0.0));
    assert_eq!(rep.get("max_sigma_2"), Some(0.0));
    let h = build("heisenberg").unwrap();
    let rep = sigma2_image_diagnostic(&h, 0.0, &Settings::new(&h, None).unwrap()).unwrap();
    assert_eq!(rep.get("max_sigma_2"), Some(0.0));
    let w = build("warped_torus_4").unwrap();
    let rep = sigma2_image_diagnostic(&w, 0.1, &Settings::new(&w, None).unwrap()).unwrap();
    assert!(rep.get("min_sigma_1").unwrap() < 0.0 && rep.get("max_sigma_1").unwrap() > 0.0);
    assert!(rep.get("min_sigma_2").unwrap() <= 0.0);
}

#[test]
fn flat_torus_closed_form_c() {
    let s = build("flat_torus").unwrap();
    let rep = verify_closed_form_c(&s, 0.0, &Settings::new(&s, None).unwrap()).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass);
    assert_eq!(rep.get("sigma_0(F)"), Some(1.0));
    assert_eq!(rep.get("sigma_2(F)"), Some(0.0));
}

#[test]
fn closed_form_c_rejects_wrong_curvature() {
    let s = build("warped_torus_4").unwrap();
    let rep = verify_closed_form_c(&s, 0.0, &Settings::new(&s, None).unwrap()).unwrap();
    assert_eq!(rep.verdict, Verdict::PreconditionViolated);
}

#[test]
fn convergence_gate_records_refinement() {
    let s = build("warped_torus_3").unwrap();
    let set = Settings::new(&s, None).unwrap();
    let rep = with_convergence_gate(&set, |st| verify_main(&s, 0, st)).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass);
    assert!(rep.get("refinement_change").unwrap() < 0.1 * rep.tolerance);
}

#[test]
fn pointwise_suite_on_tilted_torus() {
    let s = build("tilted_torus").unwrap();
    let reps = verify_pointwise(&s, &Settings::new(&s, Some(&[2, 2, 2, 16])).unwrap()).unwrap();
    assert_eq!(reps.len(), 5);
    for r in &reps {
        assert_eq!(r.verdict, Verdict::Pass, "{} {}", r.formula, r.residual);
    }
    let div = &reps[0];
    assert!(div.get("distribution_field_n_x_n").unwrap() > 1e-3);
    assert!(div.get("distribution_field_full_residual").unwrap() <= 1e-9);
}

#[test]
fn umbilical_and_recurrence_suites() {
    assert_eq!(verify_umbilical_suite(200, 1).unwrap().verdict, Verdict::Pass);
    assert_eq!(verify_closed_form_suite(10, 2.5).unwrap().verdict, Verdict::Pass);
}

#[test]
fn reports_serialize_with_snake_case_verdicts() {
    let s = build("round_s3").unwrap();
    let rep = verify_reeb(&s, &Settings::new(&s, None).unwrap()).unwrap();
    let text = serde_json::to_string(&rep).unwrap();
    assert!(text.contains("\"verdict\":\"inadmissible\""));
    let back: VerificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
}
