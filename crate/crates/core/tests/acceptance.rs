use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use folia::quadrature::integrate;
use folia::scenarios::{build, build_flat_torus, Scenario};
use folia::verify::*;
use folia::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn criterion(id: u32, name: &str, limit: Option<f64>, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let res = f();
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = match res {
        Ok(o) => (o.ok, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = limit.map_or(true, |l| secs < l);
    let budget = limit.map(|l| format!(" (limit {l} s)")).unwrap_or_default();
    let pass = ok && in_time;
    println!(
        "[{}] {id}. {name}: {detail}; {secs:.2} s{budget}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn algebraic() -> Result<Outcome> {
    let r = algebraic_suite(1000, 1)?;
    Ok(outcome(
        r.max() <= 1e-11,
        format!(
            "trace {:.1e}, T_n {:.1e}, explicit {:.1e}, sigma2/tau {:.1e} (tol 1e-11)",
            r.trace, r.top_newton, r.explicit, r.sigma2_tau
        ),
    ))
}

#[derive(Default)]
struct Pointwise {
    codazzi: f64,
    div_t: f64,
    div_x: f64,
    div_x_full: f64,
    einnc: f64,
    prop: f64,
}

fn pointwise_at_random_points(s: &Scenario, count: usize, seed: u64) -> Result<Pointwise> {
    let fol = &s.structure;
    let n = s.leaf_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaf_field = TrigField::random(fol, Support::Leaf, 2, 2, &mut rng).vector_field(fol);
    let d_field = TrigField::random(fol, Support::Distribution, 2, 2, &mut rng).vector_field(fol);
    let mut w = Pointwise::default();
    for _ in 0..count {
        let p = s.random_point(&mut rng);
        let f = s.point(&p)?;
        let seeds = &f.local.base.seeds;
        w.div_x = w.div_x.max(f.divergence_split(&leaf_field(seeds)).leafwise_residual());
        w.div_x_full = w.div_x_full.max(f.divergence_split(&d_field(seeds)).full_residual());
        w.einnc = w.einnc.max(f.einnc_residual());
        for i in 0..n {
            for j in 0..n {
                let mut x = vec![0.0; n];
                let mut y = vec![0.0; n];
                x[i] = 1.0;
                y[j] = 1.0;
                w.codazzi = w.codazzi.max(f.codazzi_residual(&x, &y));
            }
        }
        for r in 0..n {
            w.prop = w.prop.max(f.proposition_residual(r).abs());
            let direct = f.div_f_newton_direct(r);
            for (a, b) in direct.iter().zip(&f.div_f_newton_formula(r)) {
                w.div_t = w.div_t.max((a - b).abs());
            }
        }
    }
    Ok(w)
}

fn differential() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, name) in ["warped_torus_3", "warped_torus_4"].iter().enumerate() {
        let s = build(name)?;
        let w = pointwise_at_random_points(&s, 200, 0xacce + k as u64)?;
        ok &= w.codazzi <= 1e-8
            && w.div_t <= 1e-8
            && w.div_x <= 1e-9
            && w.div_x_full <= 1e-9
            && w.einnc <= 1e-8
            && w.prop <= 1e-8;
        parts.push(format!(
            "{name}: codazzi {:.1e}, div_f_newton {:.1e}, div_x {:.1e} (D-field {:.1e}), nabla_z {:.1e}, proposition {:.1e}",
            w.codazzi, w.div_t, w.div_x, w.div_x_full, w.einnc, w.prop
        ));
    }
    Ok(outcome(ok, parts.join("; ")))
}

const INTEGRAL_SCENARIOS: [&str; 4] = [
    "warped_torus_3",
    "warped_torus_3_riemannian",
    "warped_torus_4",
    "tilted_torus",
];

/// Every integral formula in range on the integral scenarios.
fn integral_reports(gate: bool) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for name in INTEGRAL_SCENARIOS {
        let s = build(name)?;
        let settings = Settings::new(&s, None)?;
        let run = |check: &dyn Fn(&Settings) -> Result<VerificationReport>| {
            if gate {
                with_convergence_gate(&settings, check)
            } else {
                check(&settings)
            }
        };
        out.push(run(&|st| verify_reeb(&s, st))?);
        for r in 0..2.min(s.leaf_dim()) {
            out.push(run(&|st| verify_main(&s, r, st))?);
            for leaf in &s.leaves {
                out.push(run(&|st| verify_leaf(&s, r, &leaf.name, st))?);
            }
        }
    }
    Ok(out)
}

fn label(r: &VerificationReport) -> String {
    format!("{}/{}", r.scenario.as_deref().unwrap_or("-"), r.formula)
}

fn integral() -> Result<Outcome> {
    let reports = integral_reports(false)?;
    let worst = reports.iter().fold(0.0f64, |m, r| m.max(r.residual.abs()));
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.residual.abs() > 1e-6 || r.verdict != Verdict::Pass)
        .map(label)
        .collect();
    let largest_grid = ["warped_torus_4", "tilted_torus"]
        .iter()
        .map(|n| build(n).map(|s| format!("{n} {:?}", s.default_grid)))
        .collect::<Result<Vec<_>>>()?;
    Ok(outcome(
        bad.is_empty(),
        format!(
            "{} reports, max |residual| {worst:.1e} (tol 1e-6), grids {}{}",
            reports.len(),
            largest_grid.join(", "),
            if bad.is_empty() { String::new() } else { format!(", not passing: {}", bad.join(" ")) }
        ),
    ))
}

fn heisenberg() -> Result<Outcome> {
    let s = build("heisenberg")?;
    let f = s.point(&s.random_point(&mut ChaCha8Rng::seed_from_u64(4)))?;
    let normal = &f.local.frame0.normal;
    let ric_p = f.ricci_p(normal);
    let ric = f.riemann().ricci(&f.d_coeffs(normal));
    let settings = Settings::new(&s, None)?;
    let rep = verify_main(&s, 0, &settings)?;
    let vol = integrate(s.manifold(), &settings.grid, |_| Ok(1.0))?;
    let riem = rep.get("riemannian_residual").unwrap_or(f64::NAN);
    let ok = ric_p.abs() <= 1e-9
        && (ric - 0.25).abs() <= 1e-9
        && rep.residual.abs() <= 1e-9
        && (riem + 0.25 * vol).abs() <= 1e-9;
    Ok(outcome(
        ok,
        format!(
            "Ric^P_NN {ric_p:.1e}, Ric_NN {ric:.6}, r=0 residual {:.1e}, with R {riem:.6} = {:.4}·Vol, verdict {:?}",
            rep.residual,
            riem / vol,
            rep.verdict
        ),
    ))
}

fn round_s3() -> Result<Outcome> {
    let s = build("round_s3")?;
    let rep = verify_main(&s, 0, &Settings::new(&s, None)?)?;
    let target = -4.0 * PI * PI;
    let ok = (rep.admissibility_max - 1.0).abs() <= 1e-9
        && (rep.residual - target).abs() <= 1e-6
        && rep.verdict == Verdict::Inadmissible;
    Ok(outcome(
        ok,
        format!(
            "admissibility {:.12}, main:0 residual {:.9} (−4π² = {target:.9}), verdict {:?}",
            rep.admissibility_max, rep.residual, rep.verdict
        ),
    ))
}

fn closed_forms() -> Result<Outcome> {
    let rep = verify_closed_form_suite(10, 1.0)?;
    let binomial_failures = (2..=12i64)
        .flat_map(|n| (1..n).map(move |r| (n, r)))
        .filter(|&(n, r)| !umbilical_binomial_identity(n, r))
        .count();
    let mut displayed_gap: f64 = 0.0;
    for n in 1..=10 {
        let s = recurrence_einstein(n, 2.0, 1.0);
        for (r, v) in s.iter().enumerate() {
            if let Some(d) = closed_form_einstein_displayed(n, r, 2.0, 1.0) {
                displayed_gap = displayed_gap.max((v - d).abs());
            }
        }
    }
    let get = |k: &str| rep.get(k).unwrap_or(f64::NAN);
    Ok(outcome(
        rep.verdict == Verdict::Pass && binomial_failures == 0,
        format!(
            "constant-curvature gap {:.1e}, Einstein gap {:.1e} (tol 1e-12), a_r failures {}, binomial identity failures {binomial_failures}; \
             Einstein closed form with the displayed exponent n/2 deviates by {displayed_gap:.2e}",
            get("constant_curvature_gap"),
            get("einstein_gap"),
            get("a_r_failures"),
        ),
    ))
}

fn umbilical() -> Result<Outcome> {
    let rep = verify_umbilical_suite(1000, 7)?;
    let newton = (2..=8).map(|n| umbilical_newton_residual(n, 50, n as u64)).fold(0.0, f64::max);
    Ok(outcome(
        rep.verdict == Verdict::Pass && newton <= 1e-11,
        format!(
            "max reduction residual {:.1e}, umbilical Newton transforms {newton:.1e} (tol 1e-11)",
            rep.residual
        ),
    ))
}

fn calibration() -> Result<Outcome> {
    let flat = build_flat_torus(3, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut self_test: f64 = 0.0;
    for _ in 0..4 {
        let x = TrigField::random(&flat.structure, Support::Ambient, 3, 4, &mut rng).vector_field(&flat.structure);
        let rep = verify_divergence_theorem(&flat, &x, &flat.grid(Some(&[32, 32, 32]))?, 1e-9)?;
        self_test = self_test.max(rep.residual.abs());
    }
    for name in INTEGRAL_SCENARIOS {
        let s = build(name)?;
        self_test = self_test.max(self_test_residual(&s, &s.grid(None)?)?);
    }
    let reports = integral_reports(true)?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for r in &reports {
        let ratio = r.get("refinement_change").unwrap_or(f64::NAN) / r.tolerance;
        worst = worst.max(ratio);
        if !(ratio < 0.1) || r.verdict != Verdict::Pass {
            bad.push(label(r));
        }
    }
    Ok(outcome(
        self_test <= 1e-9 && bad.is_empty(),
        format!(
            "self-test max {self_test:.1e} (tol 1e-9), grid doubling max change {worst:.1e} of tolerance over {} reports (limit 0.1){}",
            reports.len(),
            if bad.is_empty() { String::new() } else { format!(", not converged: {}", bad.join(" ")) }
        ),
    ))
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "algebraic suite", Some(5.0), algebraic),
        criterion(2, "differential identities at 200 random points", Some(30.0), differential),
        criterion(3, "integral formulas", Some(60.0), integral),
        criterion(4, "projected curvature on Heisenberg", None, heisenberg),
        criterion(5, "inadmissibility on round S3", None, round_s3),
        criterion(6, "closed-form corollaries", Some(1.0), closed_forms),
        criterion(7, "umbilical reduction", None, umbilical),
        criterion(8, "self-calibration", None, calibration),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
