//! Global stratification of a homomorphism field: the singular curves `λ = 0`, the
//! signed `A_3` points on them and the signed regions `M^±` with their Euler
//! characteristics.

use serde::Serialize;

use crate::error::Result;
use crate::morin::{Homomorphism, Sign, Thresholds, Tolerances};
use crate::ChartPoint;

mod a3;
mod mesh;
mod regions;
mod trace;

pub use a3::locate_a3;

/// A traced component of the singular set, as a polyline of refined zeros.
#[derive(Clone, Debug, Serialize)]
pub struct SingularCurve {
    pub id: usize,
    pub points: Vec<ChartPoint>,
    /// `λ̇` at each vertex with a null field oriented continuously along the curve.
    pub lambda_dot: Vec<f64>,
    #[serde(skip)]
    pub eta: Vec<[f64; 2]>,
    #[serde(skip)]
    pub eta_column: Vec<usize>,
    pub closed: bool,
    pub eta_flips_on_closing: bool,
    /// Homology class `(a, b)` in `H_1(T²)` for torus curves.
    pub homology: [i32; 2],
    pub plus_region: Option<usize>,
    pub minus_region: Option<usize>,
    #[serde(skip)]
    pub(crate) plus_vertex: usize,
    #[serde(skip)]
    pub(crate) minus_vertex: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedA3Point {
    pub point: ChartPoint,
    pub sign: Sign,
    pub lambda_ddot: f64,
    pub rank_det: f64,
    pub curve: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub id: usize,
    pub sign: Sign,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_loops: usize,
    pub euler_char: i64,
    pub genus: u32,
    pub wraps: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionComplex {
    pub grid: [usize; 2],
    pub vertex_count: usize,
    pub regions: Vec<Region>,
    pub chi_plus: i64,
    pub chi_minus: i64,
    /// Euler characteristic of the whole sampled complex.
    pub chi_total: i64,
    #[serde(skip)]
    pub vertex_signs: Vec<bool>,
}

impl RegionComplex {
    pub fn components(&self, sign: Sign) -> usize {
        self.regions.iter().filter(|r| r.sign == sign).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrataConfig {
    /// Cells along `u`; the sphere chart uses about half as many along `v`.
    pub grid: usize,
    pub tolerances: Tolerances,
}

impl StrataConfig {
    pub fn new(grid: usize) -> Self {
        StrataConfig {
            grid,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Strata {
    pub thresholds: Thresholds,
    pub curves: Vec<SingularCurve>,
    pub a3_points: Vec<SignedA3Point>,
    pub complex: RegionComplex,
    pub warnings: Vec<String>,
}

impl Strata {
    pub fn a3_count(&self, sign: Sign) -> usize {
        self.a3_points.iter().filter(|a| a.sign == sign).count()
    }

    pub fn a3_on_curve(&self, curve: usize) -> usize {
        self.a3_points.iter().filter(|a| a.curve == curve).count()
    }
}

/// Traces the singular set on a grid of the given resolution.
pub fn trace_singular_set(
    field: &dyn Homomorphism,
    config: &StrataConfig,
) -> Result<(Vec<SingularCurve>, Thresholds)> {
    let mesh = mesh::Mesh::build(field, config.grid, config.tolerances.sing)?;
    let th = config
        .tolerances
        .thresholds(mesh.lambda_scale, field.domain().diameter());
    let crossings = trace::find_crossings(field, &mesh, &th)?;
    Ok((trace::chain_curves(field, &mesh, &crossings)?, th))
}

/// Full stratification: curves, signed `A_3` points and the region complex.
pub fn analyze(field: &dyn Homomorphism, config: &StrataConfig) -> Result<Strata> {
    let mesh = mesh::Mesh::build(field, config.grid, config.tolerances.sing)?;
    let th = config
        .tolerances
        .thresholds(mesh.lambda_scale, field.domain().diameter());
    let crossings = trace::find_crossings(field, &mesh, &th)?;
    let mut curves = trace::chain_curves(field, &mesh, &crossings)?;
    let complex = regions::region_complex(&mesh, &mut curves)?;
    let mut a3_points = Vec::new();
    let mut warnings = Vec::new();
    for c in &curves {
        let (pts, w) = locate_a3(field, c, &th)?;
        a3_points.extend(pts);
        warnings.extend(w);
    }
    Ok(Strata {
        thresholds: th,
        curves,
        a3_points,
        complex,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morin::{FrontHomomorphism, SyntheticField, TorusMap};
    use crate::surfaces::{RoundSphere, SwallowtailPatch};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn sin_v_on_torus() {
        let s = analyze(&SyntheticField::torus_fold_model(), &StrataConfig::new(32)).unwrap();
        assert_eq!(s.curves.len(), 2);
        for c in &s.curves {
            assert!(c.closed);
            assert_eq!(c.homology[1], 0);
            assert_eq!(c.homology[0].abs(), 1);
            for p in &c.points {
                assert!(p.v.sin().abs() < 1e-9, "{p}");
            }
        }
        assert_eq!(s.a3_points.len(), 0);
        assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (0, 0));
        assert_eq!(s.complex.regions.len(), 2);
    }

    #[test]
    fn sphere_hemispheres() {
        let s = analyze(&SyntheticField::sphere_height_model(), &StrataConfig::new(32)).unwrap();
        assert_eq!(s.curves.len(), 1);
        assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (1, 1));
        assert_eq!(s.complex.chi_total, 2);
    }

    #[test]
    fn round_sphere_has_no_singular_set() {
        let f = FrontHomomorphism::new(Arc::new(RoundSphere::new(1.0)));
        let s = analyze(&f, &StrataConfig::new(32)).unwrap();
        assert!(s.curves.is_empty());
        assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (2, 0));
    }

    #[test]
    fn swallowtail_arc_and_cusp() {
        let f = FrontHomomorphism::new(Arc::new(SwallowtailPatch));
        let s = analyze(&f, &StrataConfig::new(40)).unwrap();
        assert_eq!(s.curves.len(), 1);
        let c = &s.curves[0];
        assert!(!c.closed);
        for p in &c.points {
            let w = 1.0 + p.u * p.u + p.u.powi(4);
            let lambda = 2.0 * (6.0 * p.u * p.u + p.v) * w.sqrt();
            assert!(lambda.abs() <= s.thresholds.eps_sing, "{p}");
        }
        assert_eq!(s.a3_points.len(), 1);
        let a = s.a3_points[0];
        assert_eq!(a.sign, Sign::Plus);
        assert!(a.point.u.hypot(a.point.v) < 1e-8, "{:?}", a.point);
        assert!((a.lambda_ddot - 24.0).abs() < 1e-6);
    }

    #[test]
    fn torus_fold_map_circles() {
        let m = TorusMap::Fold { amplitude: 1.5 };
        let s = analyze(&m, &StrataConfig::new(48)).unwrap();
        assert_eq!(s.curves.len(), 2);
        let v_star = (-1.0f64 / 1.5).acos();
        for c in &s.curves {
            for p in &c.points {
                let d = (p.v - v_star).abs().min((p.v - (2.0 * PI - v_star)).abs());
                assert!(d < 1e-8);
            }
        }
        assert!(s.a3_points.is_empty());
        assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (0, 0));
    }
}
