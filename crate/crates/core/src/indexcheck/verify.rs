//! Verifiers: compute both sides of an index identity independently and report the
//! integer residual.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::degree::{gauss_degree, gauss_preimage_count, map_degree, map_preimage_count, DegreeResult, MapPair};
use crate::error::{Error, Result};
use crate::jets::det3;
use crate::morin::{FrontHomomorphism, GaussMapHomomorphism, Homomorphism, Sign};
use crate::strata::{analyze, Strata, StrataConfig};
use crate::surfaces::{
    blaschke_normal, front_density, gauss_kronecker, parallel_curvature, BlaschkeFront, FrontField,
    ParallelFront, SurfaceDomain,
};
use crate::ChartPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `2 deg ν̂ = χ(M⁺) − χ(M⁻) + #A₃⁺ − #A₃⁻` for a front.
    FrontIndex,
    /// `deg(f) χ(N) = χ(M⁺) − χ(M⁻) + #A₃⁺ − #A₃⁻` for a Morin map.
    QuineMorin,
    /// `2 χ(M⁻) = #A₃⁺ − #A₃⁻` for the Gauss map of an immersion.
    BleeckerWilson,
    /// The same identity for a parallel front of a convex surface.
    Parallel,
    /// The same identity for the Blaschke normal map of a convex surface.
    BlaschkeB,
}

/// `λ_t K_t = 1` on the regular samples of a parallel front.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureCheck {
    pub samples: usize,
    pub masked: usize,
    /// `max |λ_t K_t − 1|` with `K_t` from the fundamental forms of `f_t`.
    pub max_error: f64,
    /// `max |K_t / K_t^pred − 1|` against the principal-curvature prediction.
    pub max_prediction_error: f64,
}

/// Agreement between the sign of `λ` of the Blaschke normal map and the sign of the
/// affine Gauss–Kronecker curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignAgreement {
    pub samples: usize,
    pub agree: usize,
    pub opposite: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaReport {
    pub theorem: Theorem,
    pub subject: String,
    pub lhs: i64,
    pub rhs: i64,
    pub residual: i64,
    pub chi_plus: i64,
    pub chi_minus: i64,
    pub a3_plus: i64,
    pub a3_minus: i64,
    pub components_plus: i64,
    pub components_minus: i64,
    pub degree: Option<DegreeResult>,
    pub curvature_check: Option<CurvatureCheck>,
    pub sign_agreement: Option<SignAgreement>,
    #[serde(skip)]
    pub strata: Strata,
    pub warnings: Vec<String>,
}

impl FormulaReport {
    fn new(theorem: Theorem, subject: String, lhs: i64, rhs: i64, strata: Strata) -> Self {
        let c = &strata.complex;
        FormulaReport {
            theorem,
            subject,
            lhs,
            rhs,
            residual: lhs - rhs,
            chi_plus: c.chi_plus,
            chi_minus: c.chi_minus,
            a3_plus: strata.a3_count(Sign::Plus) as i64,
            a3_minus: strata.a3_count(Sign::Minus) as i64,
            components_plus: c.components(Sign::Plus) as i64,
            components_minus: c.components(Sign::Minus) as i64,
            degree: None,
            curvature_check: None,
            sign_agreement: None,
            warnings: strata.warnings.clone(),
            strata,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub strata: StrataConfig,
    /// Cells per direction of the coarse degree quadrature (the fine run doubles it).
    pub degree_grid: usize,
    /// Cross-check degrees by counting preimages.
    pub oracle: bool,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(grid: usize) -> Self {
        VerifyConfig {
            strata: StrataConfig::new(grid),
            degree_grid: 256,
            oracle: false,
            seed: 0,
        }
    }
}

fn signed_sum(s: &Strata) -> i64 {
    s.complex.chi_plus - s.complex.chi_minus + s.a3_count(Sign::Plus) as i64
        - s.a3_count(Sign::Minus) as i64
}

fn a3_balance(s: &Strata) -> i64 {
    s.a3_count(Sign::Plus) as i64 - s.a3_count(Sign::Minus) as i64
}

fn front_degree(front: &dyn FrontField, cfg: &VerifyConfig) -> Result<DegreeResult> {
    let mut d = gauss_degree(front, cfg.degree_grid)?;
    if cfg.oracle {
        let n = gauss_preimage_count(front, cfg.seed)?;
        if n != d.rounded {
            return Err(Error::DegreeMismatch { quadrature: d.rounded, preimages: n });
        }
        d.preimage_count = Some(n);
    }
    Ok(d)
}

/// Sample points of the strata range, away from the chart boundary.
fn samples(domain: &SurfaceDomain, nu: usize, nv: usize) -> Vec<ChartPoint> {
    let (u0, u1) = domain.u_range();
    let (v0, v1) = domain.strata_v_range();
    (0..nu * nv)
        .map(|k| {
            let (i, j) = (k % nu, k / nu);
            ChartPoint::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / nu as f64,
                v0 + (v1 - v0) * (j as f64 + 0.5) / nv as f64,
            )
        })
        .collect()
}

/// Strict convexity: `K > 1e-6 R⁻²` on a sample grid.
pub fn check_convex(front: &dyn FrontField) -> Result<()> {
    let r = front.bounding_radius();
    let threshold = 1e-6 / (r * r);
    samples(&front.domain(), 96, 48).par_iter().try_for_each(|&p| {
        let k = gauss_kronecker(front, p)?.gauss_kronecker;
        if k > threshold {
            Ok(())
        } else {
            Err(Error::NotConvex { point: p, curvature: k })
        }
    })
}

/// `2 deg(ν̂) = χ(M⁺) − χ(M⁻) + A3⁺ − A3⁻` for a co-orientable front.
pub fn verify_front_formula(front: Arc<dyn FrontField>, cfg: &VerifyConfig) -> Result<FormulaReport> {
    let h = FrontHomomorphism::new(front.clone());
    let strata = analyze(&h, &cfg.strata)?;
    let degree = front_degree(front.as_ref(), cfg)?;
    let rhs = signed_sum(&strata);
    let mut r = FormulaReport::new(Theorem::FrontIndex, h.label(), 2 * degree.rounded, rhs, strata);
    r.degree = Some(degree);
    Ok(r)
}

/// The generalised Quine formula for a self-map of the torus or sphere.
pub fn verify_morin_map_formula(map: &MapPair, cfg: &VerifyConfig) -> Result<FormulaReport> {
    let strata = analyze(map.homomorphism(), &cfg.strata)?;
    let mut degree = map_degree(map, cfg.degree_grid)?;
    if cfg.oracle {
        let n = map_preimage_count(map, cfg.seed)?;
        if n != degree.rounded {
            return Err(Error::DegreeMismatch { quadrature: degree.rounded, preimages: n });
        }
        degree.preimage_count = Some(n);
    }
    let lhs = degree.rounded * map.target_euler_char();
    let rhs = signed_sum(&strata);
    let mut r = FormulaReport::new(Theorem::QuineMorin, map.label(), lhs, rhs, strata);
    r.degree = Some(degree);
    Ok(r)
}

/// Bleecker–Wilson for the Gauss map of an immersed closed surface. The degree of `ν̂`
/// is reported alongside; `2 deg ν̂ = χ(M)` for immersions.
pub fn verify_gauss_map_formula(front: Arc<dyn FrontField>, cfg: &VerifyConfig) -> Result<FormulaReport> {
    let h = GaussMapHomomorphism::new(front.clone());
    let strata = analyze(&h, &cfg.strata)?;
    let degree = front_degree(front.as_ref(), cfg)?;
    let lhs = 2 * strata.complex.chi_minus;
    let rhs = a3_balance(&strata);
    let mut r = FormulaReport::new(Theorem::BleeckerWilson, h.label(), lhs, rhs, strata);
    if 2 * degree.rounded != front.domain().euler_char() {
        r.warnings.push(format!(
            "2 deg(ν̂) = {} differs from χ(M) = {}",
            2 * degree.rounded,
            front.domain().euler_char()
        ));
    }
    r.degree = Some(degree);
    Ok(r)
}

/// `λ_t K_t = 1` on samples where `σ_min(df_t) > 1e-4`; `λ_t` is normalised by the
/// area density of the shared Gauss map so that it is chart independent.
pub fn parallel_curvature_check(base: &dyn FrontField, front: &ParallelFront) -> Result<CurvatureCheck> {
    let pts = samples(&front.domain(), 128, 64);
    let rows: Vec<Option<(f64, f64)>> = pts
        .par_iter()
        .map(|&p| {
            let j = front.eval(p, 1)?;
            let (fu, fv) = j.tangents()?;
            let (a, b) = (fu.value(), fv.value());
            let g = [
                a[0] * a[0] + a[1] * a[1] + a[2] * a[2],
                a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
                b[0] * b[0] + b[1] * b[1] + b[2] * b[2],
            ];
            // smallest singular value of df_t in the orthonormal frame of the base metric
            let bj = base.eval(p, 1)?;
            let (bu, bv) = bj.tangents()?;
            let (x, y) = (bu.value(), bv.value());
            let h = [
                x[0] * x[0] + x[1] * x[1] + x[2] * x[2],
                x[0] * y[0] + x[1] * y[1] + x[2] * y[2],
                y[0] * y[0] + y[1] * y[1] + y[2] * y[2],
            ];
            let det_h = h[0] * h[2] - h[1] * h[1];
            // generalised eigenvalues of g relative to h
            let tr = (g[0] * h[2] - 2.0 * g[1] * h[1] + g[2] * h[0]) / det_h;
            let det = (g[0] * g[2] - g[1] * g[1]) / det_h;
            let smin2 = 0.5 * tr - (0.25 * tr * tr - det).max(0.0).sqrt();
            if !(smin2 > 1e-8) {
                return Ok(None);
            }
            let nu_u = j.nu.partial_u()?;
            let nu_v = j.nu.partial_v()?;
            let area = det3(&nu_u, &nu_v, &j.nu.truncate(0)).value() * front.orientation();
            let lambda = front_density(front, p, 0)?.value() / area;
            let k = gauss_kronecker(front, p)?.gauss_kronecker;
            let predicted = parallel_curvature(&gauss_kronecker(base, p)?, front.t);
            Ok(Some(((lambda * k - 1.0).abs(), (k / predicted - 1.0).abs())))
        })
        .collect::<Result<_>>()?;
    let kept: Vec<(f64, f64)> = rows.iter().flatten().copied().collect();
    Ok(CurvatureCheck {
        samples: pts.len(),
        masked: pts.len() - kept.len(),
        max_error: kept.iter().map(|k| k.0).fold(0.0, f64::max),
        max_prediction_error: kept.iter().map(|k| k.1).fold(0.0, f64::max),
    })
}

/// Parallel front `f + t ν̂` of a strictly convex surface: `2χ(M⁻) = #A₃⁺ − #A₃⁻` with
/// `M⁻` where `1/K_t < 0`.
pub fn verify_parallel_formula(
    base: Arc<dyn FrontField>,
    t: f64,
    cfg: &VerifyConfig,
) -> Result<FormulaReport> {
    check_convex(base.as_ref())?;
    let front = ParallelFront::new(base.clone(), t);
    let h = FrontHomomorphism::new(Arc::new(front.clone()));
    let strata = analyze(&h, &cfg.strata)?;
    let check = parallel_curvature_check(base.as_ref(), &front)?;
    let degree = front_degree(&front, cfg)?;
    let lhs = 2 * strata.complex.chi_minus;
    let rhs = a3_balance(&strata);
    let mut r = FormulaReport::new(Theorem::Parallel, h.label(), lhs, rhs, strata);
    if check.max_error > 1e-8 {
        r.warnings.push(format!("λ_t K_t deviates from 1 by {:e}", check.max_error));
    }
    r.degree = Some(degree);
    r.curvature_check = Some(check);
    Ok(r)
}

/// Sign of `λ` of the Blaschke normal map against the sign of the affine curvature.
pub fn blaschke_sign_agreement(front: &BlaschkeFront) -> Result<SignAgreement> {
    let pts = samples(&front.domain(), 96, 48);
    let vals: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&p| {
            let lambda = front_density(front, p, 0)?.value();
            let k = blaschke_normal(front.base.as_ref(), p)?.affine_curvature();
            Ok((lambda, k))
        })
        .collect::<Result<_>>()?;
    let lmax = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
    let kmax = vals.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    let mut out = SignAgreement { samples: 0, agree: 0, opposite: 0 };
    for (l, k) in vals {
        if l.abs() <= 1e-6 * lmax || k.abs() <= 1e-6 * kmax {
            continue;
        }
        out.samples += 1;
        if (l > 0.0) == (k > 0.0) {
            out.agree += 1;
        } else {
            out.opposite += 1;
        }
    }
    Ok(out)
}

/// `2 χ(M⁻) = A3⁺ − A3⁻` for the Blaschke normal map of a strictly convex surface.
pub fn verify_blaschke_formula(base: Arc<dyn FrontField>, cfg: &VerifyConfig) -> Result<FormulaReport> {
    check_convex(base.as_ref())?;
    let front = BlaschkeFront::new(base)?;
    let agreement = blaschke_sign_agreement(&front)?;
    let h = FrontHomomorphism::new(Arc::new(front));
    let strata = analyze(&h, &cfg.strata)?;
    let lhs = 2 * strata.complex.chi_minus;
    let rhs = a3_balance(&strata);
    let mut r = FormulaReport::new(Theorem::BlaschkeB, h.label(), lhs, rhs, strata);
    if agreement.opposite > 0 {
        r.warnings.push(format!(
            "λ of ξ̂ and the affine curvature disagree in sign at {} of {} samples",
            agreement.opposite, agreement.samples
        ));
    }
    r.sign_agreement = Some(agreement);
    Ok(r)
}
