//! Equiaffine (Blaschke) normal, Blaschke metric and conormal of a strictly convex
//! surface.
//!
//! The affine normal is built constructively as `ξ = ½ Δ_h f`, where
//! `h = K^{-1/4} II` is the Blaschke metric and `II` is taken with respect to the unit
//! normal on the convex side. The defining properties (tangential `D ξ`, volume
//! condition `det(f_u, f_v, ξ) = vol_h`) are reported as defects by [`blaschke_normal`].

use std::sync::Arc;

use serde::Serialize;

use super::{cross, dot, norm, FrontField, FrontJets, SurfaceDomain};
use crate::error::{Error, Result};
use crate::jets::{Jet2, JetVec3};
use crate::ChartPoint;

/// Jets of the affine quantities at one point; `xi` and `conormal` carry the requested
/// order, `f_u`, `f_v` one more, the metric `h` two more.
#[derive(Clone, Copy, Debug)]
pub struct AffineJets {
    pub xi: JetVec3,
    pub conormal: JetVec3,
    pub f_u: JetVec3,
    pub f_v: JetVec3,
    pub h: [[Jet2; 2]; 2],
    pub gauss_kronecker: f64,
}

/// Affine normal `ξ` and its companions at order `order` (the base surface is
/// evaluated at `order + 3`).
pub fn affine_jets(base: &dyn FrontField, p: ChartPoint, order: usize) -> Result<AffineJets> {
    let n = order + 3;
    let FrontJets { f, nu } = base.eval(p, n)?;
    let fu = f.partial_u()?;
    let fv = f.partial_v()?;
    let fuu = fu.partial_u()?;
    let fuv = fu.partial_v()?;
    let fvv = fv.partial_v()?;
    let nu = nu.truncate(n - 2);
    let g11 = fu.dot(&fu);
    let g12 = fu.dot(&fv);
    let g22 = fv.dot(&fv);
    let mut b11 = fuu.dot(&nu);
    let mut b12 = fuv.dot(&nu);
    let mut b22 = fvv.dot(&nu);
    // orient II to be positive definite (normal on the convex side)
    let trace = b11.value() * g22.value() - 2.0 * b12.value() * g12.value() + b22.value() * g11.value();
    if trace < 0.0 {
        b11 = -b11;
        b12 = -b12;
        b22 = -b22;
    }
    let det_g = g11 * g22 - g12 * g12;
    let det_b = b11 * b22 - b12 * b12;
    let k = det_b.div(&det_g)?;
    let r = base.bounding_radius();
    if !(k.value() > 1e-6 / (r * r)) || !(trace.abs() > 0.0) {
        return Err(Error::NotConvex {
            point: p,
            curvature: k.value(),
        });
    }
    let scale = k.powf(-0.25)?;
    let h11 = b11 * scale;
    let h12 = b12 * scale;
    let h22 = b22 * scale;
    let det_h = h11 * h22 - h12 * h12;
    let sqrt_det_h = det_h.sqrt()?;
    // √|h| h^{ij} = adj(h)/√|h|
    let inv_sqrt = sqrt_det_h.recip()?;
    let a11 = h22 * inv_sqrt;
    let a12 = -(h12 * inv_sqrt);
    let a22 = h11 * inv_sqrt;
    let fu_t = fu.truncate(n - 2);
    let fv_t = fv.truncate(n - 2);
    let w_u = fu_t.scale(&a11) + fv_t.scale(&a12);
    let w_v = fu_t.scale(&a12) + fv_t.scale(&a22);
    let div = w_u.partial_u()? + w_v.partial_v()?;
    let xi = div.scale(&inv_sqrt.truncate(order)).scale_f64(0.5);
    let fu_o = fu.truncate(order);
    let fv_o = fv.truncate(order);
    let normal = fu_o.cross(&fv_o);
    let omega = normal.dot(&xi);
    let scale_ref = fu_o.value().iter().map(|x| x * x).sum::<f64>().sqrt()
        * fv_o.value().iter().map(|x| x * x).sum::<f64>().sqrt()
        * norm(xi.value());
    if !(omega.value().abs() > 1e-12 * scale_ref) {
        return Err(Error::TangentialAffineNormal(p));
    }
    let conormal = normal.div(&omega)?;
    Ok(AffineJets {
        xi,
        conormal,
        f_u: fu.truncate(order + 1),
        f_v: fv.truncate(order + 1),
        h: [[h11, h12], [h12, h22]],
        gauss_kronecker: k.value(),
    })
}

/// Pointwise affine data with the runtime checks of the defining properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineData {
    pub point: ChartPoint,
    pub xi: [f64; 3],
    pub xi_u: [f64; 3],
    pub xi_v: [f64; 3],
    pub f_u: [f64; 3],
    pub f_v: [f64; 3],
    /// Blaschke metric in the chart frame.
    pub h: [[f64; 2]; 2],
    /// Affine shape operator with `D_{∂_i} ξ = −f_k S^k_i`.
    pub shape: [[f64; 2]; 2],
    /// `det(f_u, f_v, ξ)`.
    pub omega: f64,
    /// `√det h`.
    pub h_volume: f64,
    /// Largest normal component of `ξ_u`, `ξ_v` relative to their length.
    pub tangential_defect: f64,
    /// `| |ω| − √det h |` relative to `√det h`.
    pub volume_defect: f64,
}

impl AffineData {
    /// Determinant of the affine shape operator (affine Gauss–Kronecker curvature).
    pub fn affine_curvature(&self) -> f64 {
        self.shape[0][0] * self.shape[1][1] - self.shape[0][1] * self.shape[1][0]
    }
}

pub fn blaschke_normal(base: &dyn FrontField, p: ChartPoint) -> Result<AffineData> {
    let a = affine_jets(base, p, 1)?;
    let xi = a.xi.value();
    let xi_u = a.xi.partial_u()?.value();
    let xi_v = a.xi.partial_v()?.value();
    let f_u = a.f_u.value();
    let f_v = a.f_v.value();
    let h = [
        [a.h[0][0].value(), a.h[0][1].value()],
        [a.h[1][0].value(), a.h[1][1].value()],
    ];
    let g = [[dot(f_u, f_u), dot(f_u, f_v)], [dot(f_u, f_v), dot(f_v, f_v)]];
    let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let m = [[dot(f_u, xi_u), dot(f_u, xi_v)], [dot(f_v, xi_u), dot(f_v, xi_v)]];
    let mut shape = [[0.0; 2]; 2];
    for c in 0..2 {
        shape[0][c] = -(g[1][1] * m[0][c] - g[0][1] * m[1][c]) / det_g;
        shape[1][c] = -(-g[1][0] * m[0][c] + g[0][0] * m[1][c]) / det_g;
    }
    let n = cross(f_u, f_v);
    let nn = norm(n);
    let unit = [n[0] / nn, n[1] / nn, n[2] / nn];
    let defect = |w: [f64; 3]| {
        let l = norm(w);
        if l == 0.0 {
            0.0
        } else {
            dot(w, unit).abs() / l
        }
    };
    let omega = dot(n, xi);
    let h_volume = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).sqrt();
    Ok(AffineData {
        point: p,
        xi,
        xi_u,
        xi_v,
        f_u,
        f_v,
        h,
        shape,
        omega,
        h_volume,
        tangential_defect: defect(xi_u).max(defect(xi_v)),
        volume_defect: (omega.abs() - h_volume).abs() / h_volume,
    })
}

/// Conormal `ν` with `ν(ξ) = 1`, `ν(f_u) = ν(f_v) = 0`, from the 3×3 system
/// `[f_u; f_v; ξ] ν = (0, 0, 1)`.
pub fn conormal(affine: &AffineData) -> Result<[f64; 3]> {
    let rows = [affine.f_u, affine.f_v, affine.xi];
    let det = dot(cross(rows[0], rows[1]), rows[2]);
    let scale = norm(rows[0]) * norm(rows[1]) * norm(rows[2]);
    if !(det.abs() > 1e-12 * scale) {
        return Err(Error::TangentialAffineNormal(affine.point));
    }
    // Cramer: ν = (f_u × f_v) / det
    let c = cross(rows[0], rows[1]);
    Ok([c[0] / det, c[1] / det, c[2] / det])
}

/// The Blaschke normal map `p ↦ ξ_p` of a strictly convex surface, as a front whose unit
/// normal is the normalised conormal.
///
/// The chart orientation is taken so that `det(f_u, f_v, ξ) > 0`, i.e. the volume form
/// `ω = det(df ·, df ·, ξ)` is positive.
#[derive(Clone)]
pub struct BlaschkeFront {
    pub base: Arc<dyn FrontField>,
    orientation: f64,
}

impl BlaschkeFront {
    pub fn new(base: Arc<dyn FrontField>) -> Result<Self> {
        let reference = reference_point(base.domain());
        let a = blaschke_normal(base.as_ref(), reference)?;
        let orientation = if a.omega > 0.0 { 1.0 } else { -1.0 };
        Ok(BlaschkeFront { base, orientation })
    }

    /// Sign relating the chart orientation to the `ω`-positive orientation.
    pub fn chart_sign(&self) -> f64 {
        self.orientation
    }
}

fn reference_point(domain: SurfaceDomain) -> ChartPoint {
    match domain {
        SurfaceDomain::Patch { u_min, u_max, v_min, v_max } => {
            ChartPoint::new(0.5 * (u_min + u_max), 0.5 * (v_min + v_max))
        }
        _ => ChartPoint::new(0.3, 0.2),
    }
}

impl FrontField for BlaschkeFront {
    fn domain(&self) -> SurfaceDomain {
        self.base.domain()
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let a = affine_jets(self.base.as_ref(), p, order)?;
        Ok(FrontJets {
            f: a.xi,
            nu: a.conormal.normalize()?,
        })
    }

    fn orientation(&self) -> f64 {
        self.orientation
    }

    fn bounding_radius(&self) -> f64 {
        // affine normals of desk-scale convex bodies stay within a few units
        4.0 * self.base.bounding_radius()
    }

    fn label(&self) -> String {
        format!("blaschke({})", self.base.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{BumpyBody, LinearImage, RotationalGamma, RoundSphere};

    #[test]
    fn unit_sphere_is_an_affine_sphere() {
        let s = RoundSphere::new(1.0);
        for &(u, v) in &[(0.2, 0.1), (2.0, -1.0), (4.0, 1.2)] {
            let p = ChartPoint::new(u, v);
            let a = blaschke_normal(&s, p).unwrap();
            let f = s.eval(p, 0).unwrap().f.value();
            for k in 0..3 {
                assert!((a.xi[k] + f[k]).abs() < 1e-12);
            }
            // h equals the first fundamental form diag(cos² v, 1)
            assert!((a.h[0][0] - v.cos().powi(2)).abs() < 1e-12);
            assert!(a.h[0][1].abs() < 1e-12);
            assert!((a.h[1][1] - 1.0).abs() < 1e-12);
            let nu = conormal(&a).unwrap();
            for k in 0..3 {
                assert!((nu[k] + f[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn defining_properties_hold_on_bumpy_body() {
        let b = BumpyBody::random(11, 0.03);
        for &(u, v) in &[(0.2, 0.1), (2.0, -1.0), (4.0, 1.2), (5.9, 0.4)] {
            let a = blaschke_normal(&b, ChartPoint::new(u, v)).unwrap();
            assert!(a.tangential_defect < 1e-8, "{}", a.tangential_defect);
            assert!(a.volume_defect < 1e-8, "{}", a.volume_defect);
        }
    }

    #[test]
    fn conormal_derivative_is_blaschke_metric() {
        let b = BumpyBody::random(5, 0.03);
        let p = ChartPoint::new(1.3, -0.4);
        let a = affine_jets(&b, p, 1).unwrap();
        let nu_u = a.conormal.partial_u().unwrap().value();
        let nu_v = a.conormal.partial_v().unwrap().value();
        let (fu, fv) = (a.f_u.value(), a.f_v.value());
        let m = [[dot(nu_u, fu), dot(nu_u, fv)], [dot(nu_v, fu), dot(nu_v, fv)]];
        for i in 0..2 {
            for j in 0..2 {
                // ⟨ν, f_j⟩ = 0 and f_ij = h_ij ξ + tangential give ν_i(f_j) = −h_ij
                assert!((m[i][j] + a.h[i][j].value()).abs() < 1e-8);
            }
        }
        assert!(m[0][0] < 0.0 && m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0);
    }

    #[test]
    fn unimodular_equivariance() {
        let base: Arc<dyn FrontField> = Arc::new(RotationalGamma::new(0.1).unwrap());
        let a = [[1.2, 0.3, 0.0], [0.1, 0.9, 0.2], [0.0, 0.0, 1.0]];
        let det = 1.2 * 0.9 - 0.3 * 0.1;
        let a = [a[0], a[1], [0.0, 0.0, 1.0 / det]];
        let img = LinearImage::new(base.clone(), a).unwrap();
        let p = ChartPoint::new(0.7, 0.5);
        let x0 = blaschke_normal(base.as_ref(), p).unwrap().xi;
        let x1 = blaschke_normal(&img, p).unwrap().xi;
        for r in 0..3 {
            let ax = a[r][0] * x0[0] + a[r][1] * x0[1] + a[r][2] * x0[2];
            assert!((ax - x1[r]).abs() < 1e-8);
        }
    }

    #[test]
    fn torus_is_not_convex() {
        let t = crate::surfaces::StandardTorus::new(2.0, 1.0);
        assert!(matches!(
            blaschke_normal(&t, ChartPoint::new(0.0, 3.0)),
            Err(Error::NotConvex { .. })
        ));
    }
}
