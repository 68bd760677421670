//! Closed parametrized surfaces and fronts with their unit normals, curvature,
//! parallel fronts and affine normals.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{det3, JetVec3};
use crate::ChartPoint;

mod affine;
mod catalog;

pub use affine::{affine_jets, blaschke_normal, conormal, AffineData, AffineJets, BlaschkeFront};
pub use catalog::{
    BumpyBody, LinearImage, ParallelFront, RotationalGamma, RoundSphere, StandardTorus,
    SwallowtailPatch, BUMPY_BASIS_LEN,
};

/// Pole cap radius used when none is configured.
pub const DEFAULT_POLE_CAP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceDomain {
    /// `[0, 2π) × [0, 2π)` with both directions periodic.
    Torus,
    /// Longitude `u ∈ [0, 2π)`, latitude `v ∈ (−π/2, π/2)`; the two caps
    /// `|v| > π/2 − pole_cap` are excluded from strata computations.
    SphereChart { pole_cap: f64 },
    /// A non-closed rectangle, used for local normal forms only.
    Patch {
        u_min: f64,
        u_max: f64,
        v_min: f64,
        v_max: f64,
    },
}

impl SurfaceDomain {
    pub fn sphere() -> Self {
        SurfaceDomain::SphereChart {
            pole_cap: DEFAULT_POLE_CAP,
        }
    }

    pub fn square_patch(half_width: f64) -> Self {
        SurfaceDomain::Patch {
            u_min: -half_width,
            u_max: half_width,
            v_min: -half_width,
            v_max: half_width,
        }
    }

    pub fn euler_char(&self) -> i64 {
        match self {
            SurfaceDomain::Torus => 0,
            SurfaceDomain::SphereChart { .. } => 2,
            SurfaceDomain::Patch { .. } => 1,
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, SurfaceDomain::Patch { .. })
    }

    pub fn periodic_u(&self) -> bool {
        !matches!(self, SurfaceDomain::Patch { .. })
    }

    pub fn periodic_v(&self) -> bool {
        matches!(self, SurfaceDomain::Torus)
    }

    /// Full chart range in `u`.
    pub fn u_range(&self) -> (f64, f64) {
        match *self {
            SurfaceDomain::Patch { u_min, u_max, .. } => (u_min, u_max),
            _ => (0.0, TAU),
        }
    }

    /// Full chart range in `v` (used by quadrature).
    pub fn v_range(&self) -> (f64, f64) {
        match *self {
            SurfaceDomain::Torus => (0.0, TAU),
            SurfaceDomain::SphereChart { .. } => (-FRAC_PI_2, FRAC_PI_2),
            SurfaceDomain::Patch { v_min, v_max, .. } => (v_min, v_max),
        }
    }

    /// Range of `v` on which singular strata are computed.
    pub fn strata_v_range(&self) -> (f64, f64) {
        match *self {
            SurfaceDomain::SphereChart { pole_cap } => (-FRAC_PI_2 + pole_cap, FRAC_PI_2 - pole_cap),
            _ => self.v_range(),
        }
    }

    /// Chart diameter `ℓ`.
    pub fn diameter(&self) -> f64 {
        let (a, b) = self.u_range();
        let (c, d) = self.v_range();
        (b - a).hypot(d - c)
    }

    /// Errors with `PoleProximity` when `p` lies in a sphere pole cap.
    pub fn check_strata_point(&self, p: ChartPoint) -> Result<()> {
        if let SurfaceDomain::SphereChart { pole_cap } = *self {
            if p.v.abs() > FRAC_PI_2 - pole_cap {
                return Err(Error::PoleProximity(p));
            }
        }
        Ok(())
    }

    /// Reduces periodic coordinates into the fundamental range.
    pub fn canonical(&self, p: ChartPoint) -> ChartPoint {
        let wrap = |x: f64| x.rem_euclid(TAU);
        match self {
            SurfaceDomain::Torus => ChartPoint::new(wrap(p.u), wrap(p.v)),
            SurfaceDomain::SphereChart { .. } => ChartPoint::new(wrap(p.u), p.v),
            SurfaceDomain::Patch { .. } => p,
        }
    }

    /// Shortest chart displacement `b − a`, respecting periodic directions.
    pub fn displacement(&self, a: ChartPoint, b: ChartPoint) -> (f64, f64) {
        let wrap = |d: f64| d - TAU * (d / TAU).round();
        let du = b.u - a.u;
        let dv = b.v - a.v;
        (
            if self.periodic_u() { wrap(du) } else { du },
            if self.periodic_v() { wrap(dv) } else { dv },
        )
    }
}

/// Value of a front and its unit normal as jets at one chart point.
#[derive(Clone, Copy, Debug)]
pub struct FrontJets {
    pub f: JetVec3,
    pub nu: JetVec3,
}

impl FrontJets {
    /// Tangent partials `f_u, f_v`, one order lower.
    pub fn tangents(&self) -> Result<(JetVec3, JetVec3)> {
        Ok((self.f.partial_u()?, self.f.partial_v()?))
    }
}

/// A co-oriented front on a surface domain with an analytic unit normal.
pub trait FrontField: Send + Sync {
    fn domain(&self) -> SurfaceDomain;

    /// `f` and `ν̂` as jets of the requested order at `p`.
    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets>;

    /// `+1` when `(u, v)` is the positive orientation of the underlying manifold,
    /// `−1` when the manifold carries the opposite orientation.
    fn orientation(&self) -> f64 {
        1.0
    }

    /// Radius of a ball centred at the origin containing the image.
    fn bounding_radius(&self) -> f64;

    fn label(&self) -> String;
}

/// Evaluates a front, enforcing the pole caps when `for_strata` is set.
pub fn eval_front(
    front: &dyn FrontField,
    p: ChartPoint,
    order: usize,
    for_strata: bool,
) -> Result<FrontJets> {
    if for_strata {
        front.domain().check_strata_point(p)?;
    }
    front.eval(p, order)
}

/// Oriented density `det(f_u, f_v, ν̂)` of a front as a jet of the requested order.
pub fn front_density(front: &dyn FrontField, p: ChartPoint, order: usize) -> Result<crate::Jet2> {
    let jets = front.eval(p, order + 1)?;
    let (fu, fv) = jets.tangents()?;
    Ok(det3(&fu, &fv, &jets.nu.truncate(order)).scale(front.orientation()))
}

/// Principal curvatures, Gauss–Kronecker curvature and shape operator at a regular point.
///
/// The shape operator `S` is taken in the chart frame with `dν̂ = −df ∘ S`, so its
/// eigenvalues are the principal curvatures `μ_j` with `dν̂(e_j) = −μ_j df(e_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureData {
    pub mu1: f64,
    pub mu2: f64,
    pub gauss_kronecker: f64,
    pub shape: [[f64; 2]; 2],
}

pub fn gauss_kronecker(front: &dyn FrontField, p: ChartPoint) -> Result<CurvatureData> {
    let jets = front.eval(p, 2)?;
    let (fu, fv) = jets.tangents()?;
    let fuu = fu.partial_u()?.value();
    let fuv = fu.partial_v()?.value();
    let fvv = fv.partial_v()?.value();
    let nu = jets.nu.value();
    let (a, b) = (fu.value(), fv.value());
    let g = [[dot(a, a), dot(a, b)], [dot(a, b), dot(b, b)]];
    let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let size = g[0][0] + g[1][1];
    if !(det_g > 1e-12 * size * size) {
        return Err(Error::SingularBasePoint(p));
    }
    let ii = [[dot(fuu, nu), dot(fuv, nu)], [dot(fuv, nu), dot(fvv, nu)]];
    // S = g^{-1} II
    let inv = [
        [g[1][1] / det_g, -g[0][1] / det_g],
        [-g[1][0] / det_g, g[0][0] / det_g],
    ];
    let mut shape = [[0.0; 2]; 2];
    for (r, row) in shape.iter_mut().enumerate() {
        for (c, s) in row.iter_mut().enumerate() {
            *s = inv[r][0] * ii[0][c] + inv[r][1] * ii[1][c];
        }
    }
    let tr = shape[0][0] + shape[1][1];
    let det = shape[0][0] * shape[1][1] - shape[0][1] * shape[1][0];
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    Ok(CurvatureData {
        mu1: 0.5 * tr - disc,
        mu2: 0.5 * tr + disc,
        gauss_kronecker: (ii[0][0] * ii[1][1] - ii[0][1] * ii[1][0]) / det_g,
        shape,
    })
}

/// The parallel front `f + t ν̂` of `base`.
pub fn parallel_front(base: Arc<dyn FrontField>, t: f64) -> ParallelFront {
    ParallelFront::new(base, t)
}

/// Gauss–Kronecker curvature of `f_t` predicted from the principal curvatures of the
/// base: `K_t = 1 / ((1/μ₁ − t)(1/μ₂ − t))`.
pub fn parallel_curvature(base: &CurvatureData, t: f64) -> f64 {
    1.0 / ((1.0 / base.mu1 - t) * (1.0 / base.mu2 - t))
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
