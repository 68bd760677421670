//! Acceptance criteria; each prints one PASS/FAIL line and the run fails if any does.

mod common;

use std::sync::Arc;
use std::time::Instant;

use frontidx::cli::{parse_config, run_scenario};
use frontidx::indexcheck::{verify_front_formula, verify_morin_map_formula, verify_parallel_formula, MapPair, VerifyConfig};
use frontidx::morin::{classify_point, field_thresholds, lambda_cascade, FrontHomomorphism, Sign, Tolerances, TorusMap, Verdict};
use frontidx::surfaces::{BumpyBody, FrontField, RoundSphere, SwallowtailPatch};
use frontidx::ChartPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::checks;
use common::{fd_first, fd_second};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)+));
        }
    };
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn sphere_sanity() -> Outcome {
    let t = Instant::now();
    let mut cfg = VerifyConfig::new(256);
    cfg.oracle = true;
    let r = verify_front_formula(Arc::new(RoundSphere::new(1.0)), &cfg).map_err(e)?;
    let secs = t.elapsed().as_secs_f64();
    let d = r.degree.as_ref().ok_or("no degree")?;
    ensure!(r.lhs == 2 && r.rhs == 2 && r.chi_plus == 2 && r.residual == 0, "lhs {} rhs {} χ⁺ {}", r.lhs, r.rhs, r.chi_plus);
    ensure!((d.raw - 1.0).abs() < 1e-6, "raw degree {}", d.raw);
    ensure!(secs < 5.0, "took {secs:.2} s");
    Ok(format!("lhs=2 rhs=2 raw={:.12} ({secs:.2} s)", d.raw))
}

/// Closed-form density of the swallowtail patch.
fn swallowtail_lambda(u: f64, v: f64) -> f64 {
    2.0 * (6.0 * u * u + v) * (1.0 + u * u + u.powi(4)).sqrt()
}

fn swallowtail() -> Outcome {
    let f = FrontHomomorphism::new(Arc::new(SwallowtailPatch));
    let th = field_thresholds(&f, &Tolerances::default()).map_err(e)?;
    let o = ChartPoint::new(0.0, 0.0);
    let c = classify_point(&f, o, &th).map_err(e)?;
    ensure!(c.verdict == Verdict::A3 { sign: Sign::Plus }, "origin verdict {:?}", c.verdict);
    let got = lambda_cascade(&f, o, 2, &th).map_err(e)?;
    // f_u vanishes on the singular set, so η = ∂_u there; at the origin ∂_u μ = μ = 0
    // for μ = 6u² + v kills every η̃-correction term and λ̈ = ∂²_u λ.
    let want = [
        swallowtail_lambda(0.0, 0.0),
        fd_first(|h| swallowtail_lambda(h, 0.0), 1e-3),
        fd_second(|h| swallowtail_lambda(h, 0.0), 2e-3),
    ];
    for k in 0..3 {
        ensure!((got[k] - want[k]).abs() < 1e-8, "cascade {got:?} vs oracle {want:?}");
    }
    let p = ChartPoint::new(0.1, -0.06);
    let c = classify_point(&f, p, &th).map_err(e)?;
    ensure!(c.verdict == Verdict::A2, "fold verdict {:?}", c.verdict);
    let oracle = fd_first(|h| swallowtail_lambda(0.1 + h, -0.06), 1e-3);
    let ld = c.lambda_dot.ok_or("no λ̇")?;
    ensure!((ld - oracle).abs() < 1e-6, "λ̇ {ld} vs oracle {oracle}");
    Ok(format!("cascade=({:.1e}, {:.1e}, {:.10}) λ̇(0.1,-0.06)={ld:.9} oracle={oracle:.9}", got[0], got[1], got[2]))
}

fn blaschke_example() -> Outcome {
    let t = Instant::now();
    let cfg = parse_config("scenario=blaschke grid=512 plots=true").map_err(e)?;
    let out = run_scenario(&cfg);
    let secs = t.elapsed().as_secs_f64();
    let rep = &out.report;
    ensure!(rep.errors.is_empty(), "errors {:?}", rep.errors.iter().map(|x| &x.message).collect::<Vec<_>>());
    let r = rep.formulas.first().ok_or("no formula")?;
    ensure!(r.a3_plus + r.a3_minus == 0, "{} A3 points", r.a3_plus + r.a3_minus);
    ensure!(r.components_minus == 1 && r.chi_minus == 0, "M⁻: {} components, χ = {}", r.components_minus, r.chi_minus);
    ensure!(r.residual == 0, "residual {}", r.residual);
    let svg = out.plots.iter().find(|(n, _)| n == "xi_profile.svg").ok_or("no ξ̂ profile plot")?;
    ensure!(svg.1.contains("<svg") && svg.1.contains("</svg>"), "malformed SVG");
    ensure!(secs < 60.0, "took {secs:.2} s");
    Ok(format!("A3=0 M⁻: 1 component χ=0 residual=0, xi_profile.svg {} bytes ({secs:.2} s)", svg.1.len()))
}

fn parallel_surfaces() -> Outcome {
    let base: Arc<dyn FrontField> = Arc::new(BumpyBody::random(1, 0.03));
    let mut cfg = VerifyConfig::new(256);
    cfg.oracle = true;
    let mut lines = Vec::new();
    for t in [-1.47, -1.40, -1.17] {
        let start = Instant::now();
        let r = verify_parallel_formula(base.clone(), t, &cfg).map_err(|x| format!("t={t}: {x}"))?;
        let secs = start.elapsed().as_secs_f64();
        let d = r.degree.as_ref().ok_or("no degree")?;
        let k = r.curvature_check.as_ref().ok_or("no curvature check")?;
        ensure!(r.residual == 0, "t={t}: residual {}", r.residual);
        ensure!(!r.strata.curves.is_empty(), "t={t}: no singular set");
        ensure!(k.max_error < 1e-8, "t={t}: |λK − 1| up to {}", k.max_error);
        ensure!(d.rounded == 1 && d.preimage_count == Some(1), "t={t}: degree {} / {:?}", d.raw, d.preimage_count);
        ensure!(secs < 90.0, "t={t}: took {secs:.2} s");
        lines.push(format!("t={t}: {}={} A3 {}/{} |λK−1|≤{:.1e} ({secs:.1} s)", r.lhs, r.rhs, r.a3_plus, r.a3_minus, k.max_error));
    }
    Ok(lines.join("; "))
}

fn quine() -> Outcome {
    let cfg = VerifyConfig::new(128);
    let fold = verify_morin_map_formula(&MapPair::Torus(TorusMap::Fold { amplitude: 1.5 }), &cfg).map_err(e)?;
    ensure!(fold.residual == 0, "fold residual {}", fold.residual);
    ensure!(fold.strata.curves.len() == 2 && fold.strata.curves.iter().all(|c| c.closed), "fold: {} curves", fold.strata.curves.len());
    ensure!(fold.strata.a3_points.is_empty(), "fold: {} cusps", fold.strata.a3_points.len());
    let cover = verify_morin_map_formula(&MapPair::Torus(TorusMap::Cover { k: 2 }), &cfg).map_err(e)?;
    ensure!(cover.residual == 0, "cover residual {}", cover.residual);
    ensure!(cover.strata.curves.is_empty() && cover.strata.a3_points.is_empty(), "cover strata not empty");
    Ok(format!("fold: 2 circles, 0 cusps, {}={}; cover: deg·χ={} empty strata", fold.lhs, fold.rhs, cover.lhs))
}

fn property_suites() -> Outcome {
    const TRIALS: u64 = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut(&mut ChaCha8Rng) -> checks::Check| -> Result<(), String> {
        for k in 0..TRIALS {
            f(&mut rng).map_err(|x| format!("{name} trial {k}: {x}"))?;
        }
        counts.push(format!("{name} {TRIALS}/{TRIALS}"));
        Ok(())
    };
    run("eta-flip", &mut |r| {
        checks::swallowtail_flip(r.random_range(-0.3..0.3))?;
        checks::eta_flip(r.random())
    })?;
    run("phi-scaling", &mut |r| checks::phi_rescaling(r.random()))?;
    run("chi-split", &mut |r| checks::euler_split(r.random()))?;
    run("even-A3", &mut |r| checks::even_a3(r.random()))?;
    run("poincare-hopf", &mut |r| checks::poincare_hopf_winding(r.random()))?;
    run("blaschke-SL3", &mut |r| checks::blaschke_equivariance(r.random(), r.random_range(0.0..std::f64::consts::TAU), r.random_range(-1.2..1.2)))?;
    run("2deg=chi", &mut |r| {
        checks::gauss_degree_half_euler(r.random(), r.random_range(0.0..0.1), r.random_range(1.5..3.0), r.random_range(0.15..0.6))
    })?;
    run("grid-doubling", &mut |r| checks::grid_doubling(r.random()))?;
    Ok(counts.join(", "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 6] = [
        ("sphere sanity", sphere_sanity),
        ("swallowtail normal form", swallowtail),
        ("Blaschke normal map, eps = 17/80", blaschke_example),
        ("parallel surfaces", parallel_surfaces),
        ("Quine formula on torus maps", quine),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{}] PASS {name} ({secs:.2} s): {detail}", k + 1),
            Err(why) => {
                println!("[{}] FAIL {name} ({secs:.2} s): {why}", k + 1);
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
