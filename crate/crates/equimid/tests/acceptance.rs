//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them all).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equimid::characterization::{CandidateG, CharacterizeConfig};
use equimid::dsl::{Differentiability, ScalarField};
use equimid::geometry::{lipschitz_check, EpigraphFocal, SearchBox, SpacePoint};
use equimid::hyperboloid::{cubic_residual, golden_g, golden_g_1d, CubicBranchDomain};
use equimid::parametric::{envelope_check, EquidistantParam, NewtonConfig};
use equimid::sample::{grid, linspace, AxisRange};
use equimid::solver::{convexity_check, monotonicity_check, solve_g_at, EquidistantFunction};

fn criterion(name: &str, pass: bool, detail: String) {
    println!(
        "criterion {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {name} failed: {detail}");
}

fn hyperboloid_field(n: usize) -> ScalarField<f64> {
    ScalarField::parse("sqrt(norm2() + 1)", n).unwrap()
}

fn hyperboloid_focal(n: usize, half_width: f64) -> EpigraphFocal<f64> {
    EpigraphFocal::new(
        hyperboloid_field(n),
        SearchBox::cube(-half_width, half_width, n),
    )
}

fn golden_candidate_field(n: usize) -> ScalarField<f64> {
    ScalarField::custom(n, Differentiability::FiniteDiff, |s: &[f64]| golden_g(s))
}

/// Golden-oracle agreement: bisection within 1e-7 and the parametric
/// route within 1e-8 of the closed form, 201 points over [-8, 8], under
/// ten seconds.
#[test]
fn criterion_1_golden_oracle_agreement() {
    let start = Instant::now();
    let focal = hyperboloid_focal(1, 10.0);
    let param = EquidistantParam::new(hyperboloid_field(1)).unwrap();
    let mut max_bisect = 0.0f64;
    let mut max_param = 0.0f64;
    for s in linspace(-8.0, 8.0, 201) {
        let golden = golden_g_1d(s);
        let bisect = solve_g_at(&[s], &focal, 1e-10).unwrap();
        let parametric = param.eval_g(&[s]).unwrap();
        max_bisect = max_bisect.max((golden - bisect).abs());
        max_param = max_param.max((golden - parametric).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_bisect <= 1e-7 && max_param <= 1e-8 && elapsed < 10.0;
    criterion(
        "1 (golden-oracle agreement)",
        pass,
        format!(
            "max|golden-bisect| = {max_bisect:.3e} (<= 1e-7), \
             max|golden-parametric| = {max_param:.3e} (<= 1e-8), \
             runtime = {elapsed:.2}s (< 10s)"
        ),
    );
}

/// Equidistance of parametric points against the brute-force oracle, 500
/// random parameters in dimensions one and two.
#[test]
fn criterion_2_parametric_points_are_equidistant() {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(42 + n as u64);
        let focal = hyperboloid_focal(n, 8.0);
        let param = EquidistantParam::new(hyperboloid_field(n)).unwrap();
        for _ in 0..500 {
            let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (x, y) = param.param_point(&t).unwrap();
            let d = focal
                .distance_to_epigraph(&SpacePoint::new(x, y))
                .unwrap()
                .distance;
            worst = worst.max((d - y).abs());
        }
    }
    criterion(
        "2 (parametric equidistance)",
        worst <= 1e-6,
        format!("max |d((x,y), epi f) - y| = {worst:.3e} over 2x500 random points (<= 1e-6)"),
    );
}

/// The closed-form inverse satisfies its cubic, including at the branch
/// breakpoints.
#[test]
fn criterion_3_cubic_residual() {
    let dom = CubicBranchDomain::<f64>::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples: Vec<f64> = (0..1000).map(|_| rng.gen_range(-10.0..10.0)).collect();
    samples.push(dom.upper);
    samples.push(dom.lower);
    let mut worst_ratio = 0.0f64;
    for &s in &samples {
        let t = equimid::hyperboloid::x_inverse_1d(s);
        let resid = cubic_residual(s, t).abs();
        let bound = 1e-8 * (1.0 + s.abs().powi(3));
        worst_ratio = worst_ratio.max(resid / bound);
    }
    criterion(
        "3 (cubic residual)",
        worst_ratio <= 1.0,
        format!(
            "max residual / (1e-8 * (1 + |s|^3)) = {worst_ratio:.3e} over {} samples (<= 1)",
            samples.len()
        ),
    );
}

/// Bisection against the pointwise-minimum field agrees with the minimum
/// of the individual equidistant functions.
#[test]
fn criterion_4_min_composition() {
    let f1: ScalarField<f64> = ScalarField::parse("sqrt(t1^2+1)", 1).unwrap();
    let f2 = ScalarField::parse("sqrt((t1-3)^2+1)", 1).unwrap();
    let bx = SearchBox::cube(-8.0, 11.0, 1);
    let focal1 = EpigraphFocal::new(f1.clone(), bx.clone());
    let focal2 = EpigraphFocal::new(f2.clone(), bx.clone());
    let focal_min = EpigraphFocal::new(ScalarField::min_of(vec![f1, f2]).unwrap(), bx);
    let mut worst = 0.0f64;
    for x in linspace(-5.0, 8.0, 50) {
        let lhs = solve_g_at(&[x], &focal_min, 1e-10).unwrap();
        let rhs = solve_g_at(&[x], &focal1, 1e-10)
            .unwrap()
            .min(solve_g_at(&[x], &focal2, 1e-10).unwrap());
        worst = worst.max((lhs - rhs).abs());
    }
    criterion(
        "4 (min composition)",
        worst <= 1e-7,
        format!("max |G_min - min(G1, G2)| = {worst:.3e} at 50 grid points (<= 1e-7)"),
    );
}

/// Characterizing the closed-form equidistant function passes all three
/// conditions and reconstructs the hyperboloid within 1e-6.
#[test]
fn criterion_5_characterization_roundtrip() {
    let candidate = CandidateG::new(
        golden_candidate_field(1),
        vec![AxisRange::new(-6.0, 6.0, 41)],
    )
    .unwrap();
    let report = candidate
        .characterize(&CharacterizeConfig::default())
        .unwrap();
    let conditions_pass = report.pass();
    let mut worst = f64::INFINITY;
    let detail_recon = if let Some(recon) = &report.reconstructed {
        worst = 0.0;
        for t in linspace(-4.0, 4.0, 50) {
            let f = recon.eval(&[t]).unwrap();
            let expect = (t * t + 1.0).sqrt();
            worst = worst.max((f - expect).abs());
        }
        format!("max |f_reconstructed - sqrt(t^2+1)| = {worst:.3e} at 50 points (<= 1e-6)")
    } else {
        "no reconstruction produced".to_string()
    };
    let pass = conditions_pass && worst <= 1e-6;
    criterion(
        "5 (characterization roundtrip)",
        pass,
        format!(
            "conditions {}; {detail_recon}",
            if conditions_pass { "pass" } else { "FAIL" }
        ),
    );
}

/// The invariant suites: Lipschitz bound, sandwich, convexity,
/// monotonicity, |g| < 1, the foot-map identity and the envelope
/// conditions, each at its stated tolerance.
#[test]
fn criterion_6_invariant_suites() {
    let mut failures: Vec<String> = Vec::new();
    let mut detail = String::new();

    // 1-Lipschitz distance, 1000 random pairs, relative tolerance 1e-9
    {
        let focal = hyperboloid_focal(1, 8.0);
        let field = hyperboloid_field(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1001);
        let mut pairs = Vec::with_capacity(1000);
        for _ in 0..1000 {
            let mut point = || {
                let x = rng.gen_range(-6.0..6.0);
                let h = rng.gen_range(0.0..1.2) * field.eval(&[x]);
                SpacePoint::new(vec![x], h)
            };
            pairs.push((point(), point()));
        }
        let rep = lipschitz_check(&focal, &pairs, 1e-9).unwrap();
        if !rep.pass() {
            failures.push(format!("lipschitz ({rep})"));
        }
        detail.push_str(&format!(
            "lipschitz max violation {:.3e}; ",
            rep.max_violation
        ));
    }

    // sandwich 0 < G < f
    {
        let focal = hyperboloid_focal(1, 8.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1002);
        let mut ok = true;
        for _ in 0..25 {
            let x = rng.gen_range(-6.0..6.0);
            let g = solve_g_at(&[x], &focal, 1e-10).unwrap();
            let f = focal.field().eval(&[x]);
            ok &= 0.0 < g && g < f;
        }
        if !ok {
            failures.push("sandwich 0 < G < f".into());
        }
    }

    // convexity on 100 random triples, tolerance 1e-8
    {
        let g = EquidistantFunction::bisection(hyperboloid_focal(1, 8.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1003);
        let triples: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..100)
            .map(|_| {
                (
                    vec![rng.gen_range(-4.0..4.0)],
                    vec![rng.gen_range(-4.0..4.0)],
                    rng.gen_range(0.0..1.0),
                )
            })
            .collect();
        let rep = convexity_check(&g, &triples, 1e-8).unwrap();
        if !rep.pass() {
            failures.push(format!("convexity ({rep})"));
        }
        detail.push_str(&format!(
            "convexity worst violation {:.3e}; ",
            rep.worst_violation
        ));
    }

    // monotonicity: f1 < f1 + 1 implies G1 < G2, 50 samples
    {
        let f1 = hyperboloid_focal(1, 8.0);
        let f2 = EpigraphFocal::new(
            ScalarField::parse("sqrt(t1^2+1) + 1", 1).unwrap(),
            SearchBox::cube(-8.0, 8.0, 1),
        );
        let samples: Vec<Vec<f64>> = linspace(-4.0, 4.0, 50)
            .into_iter()
            .map(|x| vec![x])
            .collect();
        let rep = monotonicity_check(&f1, &f2, &samples, 1e-9).unwrap();
        if !rep.pass() {
            failures.push(format!("monotonicity ({rep})"));
        }
    }

    // |g(t)| < 1 along the parameterization
    {
        let param = EquidistantParam::new(hyperboloid_field(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1004);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let t = rng.gen_range(-8.0..8.0);
            let (x, y) = param.param_point(&[t]).unwrap();
            worst = worst.max(((x[0] - t) / y).abs());
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(worst < 1.0) {
            failures.push(format!("|g| bound (worst {worst})"));
        }
        detail.push_str(&format!("worst |g| {worst:.6}; "));
    }

    // foot-map identity H(x(t)) = t within 1e-8
    {
        let param = EquidistantParam::new(hyperboloid_field(1)).unwrap();
        let candidate = CandidateG::new(
            golden_candidate_field(1),
            vec![AxisRange::new(-6.0, 6.0, 5)],
        )
        .unwrap();
        let mut worst = 0.0f64;
        for t in linspace(-3.0, 3.0, 25) {
            let (x, _) = param.param_point(&[t]).unwrap();
            let h = candidate.h_map(&x).unwrap();
            worst = worst.max((h[0] - t).abs());
        }
        if worst > 1e-8 {
            failures.push(format!("H(x(t)) = t (worst {worst:.3e})"));
        }
        detail.push_str(&format!("H/x identity worst {worst:.3e}; "));
    }

    // envelope: membership, tangency, and domination by probes
    {
        let param = EquidistantParam::new(hyperboloid_field(1)).unwrap();
        let probes: Vec<Vec<f64>> = vec![vec![-2.0], vec![0.0], vec![0.5], vec![2.0], vec![3.5]];
        for t in linspace(-3.0, 3.0, 13) {
            let rep = envelope_check(&param, &[t], &probes, 1e-10).unwrap();
            if !rep.pass() {
                failures.push(format!("envelope at t = {t} ({rep})"));
            }
        }
    }

    criterion(
        "6 (invariant suites)",
        failures.is_empty(),
        if failures.is_empty() {
            format!("all suites clean: {detail}")
        } else {
            format!("failing suites: {}", failures.join("; "))
        },
    );
}

/// Finite-difference gradient of G at parametric abscissas matches
/// g / (1 + sqrt(1 - |g|^2)).
#[test]
fn criterion_7_gradient_relation() {
    let param = EquidistantParam::new(hyperboloid_field(1))
        .unwrap()
        .with_newton(NewtonConfig {
            tol: 1e-13,
            ..NewtonConfig::default()
        });
    let mut worst = 0.0f64;
    for t in linspace(-4.0, 4.0, 100) {
        let (x, y) = param.param_point(&[t]).unwrap();
        let g = (x[0] - t) / y;
        let expected = g / (1.0 + (1.0 - g * g).sqrt());
        let h = 1e-5;
        let fd =
            (param.eval_g(&[x[0] + h]).unwrap() - param.eval_g(&[x[0] - h]).unwrap()) / (2.0 * h);
        worst = worst.max((fd - expected).abs());
    }
    criterion(
        "7 (gradient relation)",
        worst <= 1e-6,
        format!("max |grad G (FD) - g/(1+sqrt(1-|g|^2))| = {worst:.3e} at 100 points (<= 1e-6)"),
    );
}

/// Bisection and the parametric inverse agree on an asymmetric convex
/// field with no closed form.
#[test]
fn cross_route_agreement_asymmetric_field() {
    let field: ScalarField<f64> = ScalarField::parse("exp(t1/2) + 1", 1).unwrap();
    let focal = EpigraphFocal::new(field.clone(), SearchBox::cube(-10.0, 8.0, 1));
    let param = EquidistantParam::new(field).unwrap();
    for t in linspace(-4.0, 3.0, 29) {
        let (x, y) = param.param_point(&[t]).unwrap();
        let g_bis = solve_g_at(&x, &focal, 1e-10).unwrap();
        assert!((g_bis - y).abs() < 1e-7, "t={t}: bisect {g_bis} vs {y}");
        let g_inv = param.eval_g(&x).unwrap();
        assert!((g_inv - y).abs() < 1e-9, "t={t}: inverse {g_inv} vs {y}");
    }
}

/// The numerical routes also agree in two dimensions (radial symmetry).
#[test]
fn cross_route_agreement_2d() {
    let focal = hyperboloid_focal(2, 6.0);
    let param = EquidistantParam::new(hyperboloid_field(2)).unwrap();
    let pts = grid(&[AxisRange::new(-3.0, 3.0, 4), AxisRange::new(-3.0, 3.0, 4)]);
    for x in pts {
        let golden = golden_g(&x);
        let parametric = param.eval_g(&x).unwrap();
        let bisect = solve_g_at(&x, &focal, 1e-10).unwrap();
        assert!(
            (golden - parametric).abs() < 1e-8,
            "parametric at {x:?}: {parametric} vs {golden}"
        );
        assert!(
            (golden - bisect).abs() < 1e-7,
            "bisect at {x:?}: {bisect} vs {golden}"
        );
    }
}
