//! Property checks shared by the randomized suites and the acceptance harness.

use std::sync::Arc;

use frontidx::indexcheck::{gauss_degree, poincare_hopf, verify_morin_map_formula, MapPair, TangentField, VerifyConfig};
use frontidx::morin::{
    classify_point, classify_with, field_thresholds, FrontHomomorphism, Homomorphism, NullChoice, PhiRescaled,
    Sign, Tolerances, TorusMap, Verdict,
};
use frontidx::strata::{analyze, Strata, StrataConfig};
use frontidx::surfaces::{
    blaschke_normal, conormal, BumpyBody, FrontField, LinearImage, StandardTorus, SwallowtailPatch,
};
use frontidx::{ChartPoint, Error};

use super::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)+));
        }
    };
}

pub fn graph_map(seed: u64) -> MapPair {
    let (a, b) = random_graph_params(seed);
    MapPair::Torus(TorusMap::Graph { a, b })
}

pub fn strata_of(field: &dyn Homomorphism, grid: usize) -> Result<Strata, String> {
    strata_refined(field, grid).map(|(s, _)| s)
}

/// Strata at `grid`, refining up to twice when the tracer reports an unresolved crossing;
/// returns the grid that was used.
pub fn strata_refined(field: &dyn Homomorphism, grid: usize) -> Result<(Strata, usize), String> {
    refined(grid, |g| analyze(field, &StrataConfig::new(g))).map_err(|e| format!("{}: {e}", field.label()))
}

pub fn refined<T>(grid: usize, f: impl Fn(usize) -> frontidx::Result<T>) -> Result<(T, usize), String> {
    let mut g = grid;
    loop {
        match f(g) {
            Err(Error::ResolutionTooCoarse(_)) if g < 4 * grid => g *= 2,
            r => return r.map(|x| (x, g)).map_err(|e| format!("grid {g}: {e}")),
        }
    }
}

/// Integer outputs that must not depend on the grid.
pub fn integers(s: &Strata) -> [i64; 7] {
    [
        s.curves.len() as i64,
        s.a3_count(Sign::Plus) as i64,
        s.a3_count(Sign::Minus) as i64,
        s.complex.chi_plus,
        s.complex.chi_minus,
        s.complex.components(Sign::Plus) as i64,
        s.complex.components(Sign::Minus) as i64,
    ]
}

fn flip_invariant(field: &dyn Homomorphism, p: ChartPoint) -> Check {
    let th = field_thresholds(field, &Tolerances::default()).map_err(|e| e.to_string())?;
    let a = classify_point(field, p, &th).map_err(|e| e.to_string())?;
    let b = classify_with(field, p, &th, NullChoice::flipped(), None).map_err(|e| e.to_string())?;
    ensure!(a.verdict == b.verdict, "verdict {:?} vs {:?} at {p}", a.verdict, b.verdict);
    let (Some(ld), Some(ldf), Some(ldd), Some(lddf)) = (a.lambda_dot, b.lambda_dot, a.lambda_ddot, b.lambda_ddot)
    else {
        return Err(format!("no cascade at {p}"));
    };
    ensure!((ld + ldf).abs() <= 1e-9 * (1.0 + ld.abs()), "λ̇ {ld} vs {ldf} at {p}");
    ensure!((ldd - lddf).abs() <= 1e-9 * (1.0 + ldd.abs()), "λ̈ {ldd} vs {lddf} at {p}");
    Ok(())
}

fn random_fields(seed: u64) -> (SyntheticField, MapPair) {
    (random_diagonal(seed), graph_map(seed))
}

pub fn swallowtail_flip(u: f64) -> Check {
    let f = FrontHomomorphism::new(Arc::new(SwallowtailPatch));
    flip_invariant(&f, ChartPoint::new(u, -6.0 * u * u))?;
    flip_invariant(&f, ChartPoint::new(0.0, 0.0))
}

/// A3 signs, λ̈ and fold verdicts are unchanged when η̃ is reversed.
pub fn eta_flip(seed: u64) -> Check {
    let (diag, map) = random_fields(seed);
    for field in [&diag as &dyn Homomorphism, map.homomorphism()] {
        let s = strata_of(field, 96)?;
        let th = field_thresholds(field, &Tolerances::default()).map_err(|e| e.to_string())?;
        for a in &s.a3_points {
            flip_invariant(field, a.point)?;
            let flipped =
                classify_with(field, a.point, &th, NullChoice::flipped(), None).map_err(|e| e.to_string())?;
            ensure!(flipped.verdict == Verdict::A3 { sign: a.sign }, "{:?} at {}", flipped.verdict, a.point);
        }
        for c in &s.curves {
            let p = c.points[c.points.len() / 3];
            if classify_point(field, p, &th).map_err(|e| e.to_string())?.verdict == Verdict::A2 {
                flip_invariant(field, p)?;
            }
        }
    }
    Ok(())
}

/// Replacing `λ` by `e^σ λ` changes no verdict and no integer output.
pub fn phi_rescaling(seed: u64) -> Check {
    let inner: Arc<dyn Homomorphism> = Arc::new(random_diagonal(seed));
    let sigma = Trig::random(seed.wrapping_add(77), 0.5);
    let scaled = PhiRescaled { inner: inner.clone(), sigma: sigma.jet_fn() };
    let s0 = strata_of(inner.as_ref(), 96)?;
    let s1 = strata_of(&scaled, 96)?;
    ensure!(integers(&s0) == integers(&s1), "{:?} vs {:?}", integers(&s0), integers(&s1));
    let th0 = field_thresholds(inner.as_ref(), &Tolerances::default()).map_err(|e| e.to_string())?;
    let th1 = field_thresholds(&scaled, &Tolerances::default()).map_err(|e| e.to_string())?;
    let probes = s0.a3_points.iter().map(|a| a.point).chain(s0.curves.iter().map(|c| c.points[0]));
    for p in probes {
        let v0 = classify_point(inner.as_ref(), p, &th0).map_err(|e| e.to_string())?;
        let v1 = classify_point(&scaled, p, &th1).map_err(|e| e.to_string())?;
        ensure!(v0.verdict == v1.verdict, "{:?} vs {:?} at {p}", v0.verdict, v1.verdict);
        if let (Verdict::A3 { .. }, Some(a), Some(b)) = (v0.verdict, v0.lambda_ddot, v1.lambda_ddot) {
            // at an A3 point λ = λ̇ = 0, so (e^σ λ)¨ = e^σ λ̈
            let e = sigma.eval(p.u, p.v).exp();
            ensure!((b - e * a).abs() < 1e-8 * (1.0 + b.abs()), "λ̈ {b} vs e^σ·{a}");
        }
    }
    Ok(())
}

pub fn euler_split(seed: u64) -> Check {
    let (diag, map) = random_fields(seed);
    for field in [&diag as &dyn Homomorphism, map.homomorphism()] {
        let s = strata_of(field, 96)?;
        let chi = field.domain().euler_char();
        ensure!(s.complex.chi_plus + s.complex.chi_minus == chi, "{} + {} ≠ {chi}", s.complex.chi_plus, s.complex.chi_minus);
        ensure!(s.complex.chi_total == chi, "V − E + F = {}", s.complex.chi_total);
    }
    let (r, _) = refined(96, |g| verify_morin_map_formula(&map, &VerifyConfig::new(g)))?;
    ensure!(r.residual == 0, "Quine residual {} for {}", r.residual, map.label());
    Ok(())
}

/// Closed singular curves with an oriented null line field carry an even number of A3 points.
pub fn even_a3(seed: u64) -> Check {
    let (diag, map) = random_fields(seed);
    for field in [&diag as &dyn Homomorphism, map.homomorphism()] {
        let s = strata_of(field, 96)?;
        for c in s.curves.iter().filter(|c| c.closed) {
            ensure!(!c.eta_flips_on_closing, "η flips along curve {} of {}", c.id, field.label());
            ensure!(s.a3_on_curve(c.id) % 2 == 0, "{} A3 points on curve {}", s.a3_on_curve(c.id), c.id);
        }
    }
    Ok(())
}

pub fn poincare_hopf_winding(seed: u64) -> Check {
    let field = TangentField::random_trig(seed);
    let rep = poincare_hopf(&field).map_err(|e| e.to_string())?;
    ensure!(rep.sum == rep.euler_char && rep.euler_char == 0, "sum {} vs χ {}", rep.sum, rep.euler_char);
    for (i, z) in rep.zeros.iter().enumerate() {
        let nearest = rep
            .zeros
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| {
                let (du, dv) = field.domain().displacement(z.point, w.point);
                du.hypot(dv)
            })
            .fold(f64::INFINITY, f64::min);
        let w = winding_index(&field, z.point, (0.3 * nearest).min(0.05));
        ensure!(z.index == w, "index {} vs winding {w} at {}", z.index, z.point);
        ensure!(z.index == z.jacobian.signum() as i64, "index vs sgn J at {}", z.point);
    }
    Ok(())
}

pub fn blaschke_equivariance(seed: u64, u: f64, v: f64) -> Check {
    let base: Arc<dyn FrontField> = Arc::new(BumpyBody::random(seed, 0.03));
    let a = random_unimodular(seed.wrapping_mul(31).wrapping_add(1));
    let img = LinearImage::new(base.clone(), a).map_err(|e| e.to_string())?;
    let p = ChartPoint::new(u, v);
    let d0 = blaschke_normal(base.as_ref(), p).map_err(|e| e.to_string())?;
    let d1 = blaschke_normal(&img, p).map_err(|e| e.to_string())?;
    let ax = mat_vec(&a, d0.xi);
    for r in 0..3 {
        ensure!((ax[r] - d1.xi[r]).abs() < 1e-8, "Aξ {ax:?} vs {:?}", d1.xi);
    }
    // the conormal transforms by A^{-T}: ν₁(A x) = ν₀(x)
    let (n0, n1) = (conormal(&d0).map_err(|e| e.to_string())?, conormal(&d1).map_err(|e| e.to_string())?);
    for x in [d0.xi, d0.f_u, d0.f_v] {
        let ax = mat_vec(&a, x);
        let lhs: f64 = (0..3).map(|k| n1[k] * ax[k]).sum();
        let rhs: f64 = (0..3).map(|k| n0[k] * x[k]).sum();
        ensure!((lhs - rhs).abs() < 1e-8, "conormal {lhs} vs {rhs}");
    }
    Ok(())
}

pub fn gauss_degree_half_euler(seed: u64, amp: f64, major: f64, ratio: f64) -> Check {
    let body = BumpyBody::random(seed, amp);
    let torus = StandardTorus::new(major, ratio * major);
    for f in [&body as &dyn FrontField, &torus] {
        let d = gauss_degree(f, 64).map_err(|e| e.to_string())?;
        ensure!(2 * d.rounded == f.domain().euler_char(), "{}: deg {}", f.label(), d.raw);
        ensure!(d.residual < 1e-3, "{}: residual {}", f.label(), d.residual);
    }
    Ok(())
}

pub fn grid_doubling(seed: u64) -> Check {
    let (diag, map) = random_fields(seed);
    for field in [&diag as &dyn Homomorphism, map.homomorphism()] {
        let (coarse, g) = strata_refined(field, 64)?;
        let (a, b) = (integers(&coarse), integers(&strata_of(field, 2 * g)?));
        ensure!(a == b, "{}: {a:?} vs {b:?}", field.label());
    }
    let (a, g) = refined(64, |g| verify_morin_map_formula(&map, &VerifyConfig::new(g)))?;
    let b = verify_morin_map_formula(&map, &VerifyConfig::new(2 * g)).map_err(|e| e.to_string())?;
    ensure!((a.lhs, a.rhs) == (b.lhs, b.rhs), "{}: {:?} vs {:?}", map.label(), (a.lhs, a.rhs), (b.lhs, b.rhs));
    let body = BumpyBody::random(seed, 0.08);
    let d = [32, 64].map(|g| gauss_degree(&body, g).map(|d| d.rounded).map_err(|e| e.to_string()));
    ensure!(d[0].is_ok() && d[0] == d[1], "gauss degree {d:?}");
    Ok(())
}
