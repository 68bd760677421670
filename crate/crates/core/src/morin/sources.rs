//! Concrete bundle homomorphisms `φ: TM → E` together with their frame matrices.

use std::f64::consts::TAU;
use std::sync::Arc;

use super::{FrameMatrix, Homomorphism, DensitySample};
use crate::error::Result;
use crate::jets::{det3, Jet2, JetVec3};
use crate::surfaces::{front_density, FrontField, SurfaceDomain};
use crate::ChartPoint;

/// Orthonormal frame `(e₁, e₂)` of `ν̂^⊥` by Gram–Schmidt from the coordinate axis least
/// aligned with `ν̂` at the base point; `e₂ = orientation · ν̂ × e₁`.
fn normal_plane_frame(nu: &JetVec3, orientation: f64) -> Result<(JetVec3, JetVec3)> {
    let n0 = nu.value();
    let mut axis = 0;
    for k in 1..3 {
        if n0[k].abs() < n0[axis].abs() {
            axis = k;
        }
    }
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let order = nu.order();
    let a = JetVec3::constant(a, order);
    let proj = a - nu.scale(&nu.dot(&a));
    let e1 = proj.normalize()?;
    let e2 = nu.cross(&e1).scale_f64(orientation);
    Ok((e1, e2))
}

fn project(fu: &JetVec3, fv: &JetVec3, e1: &JetVec3, e2: &JetVec3) -> FrameMatrix {
    [[fu.dot(e1), fv.dot(e1)], [fu.dot(e2), fv.dot(e2)]]
}

fn len3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// The first homomorphism `df: TM → ν̂^⊥` of a front. Its density is
/// `λ = det(f_u, f_v, ν̂)` (times the orientation sign of the front).
#[derive(Clone)]
pub struct FrontHomomorphism {
    pub front: Arc<dyn FrontField>,
}

impl FrontHomomorphism {
    pub fn new(front: Arc<dyn FrontField>) -> Self {
        FrontHomomorphism { front }
    }
}

impl Homomorphism for FrontHomomorphism {
    fn domain(&self) -> SurfaceDomain {
        self.front.domain()
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let j = self.front.eval(p, order + 1)?;
        let (fu, fv) = j.tangents()?;
        let nu = j.nu.truncate(order);
        let (e1, e2) = normal_plane_frame(&nu, self.front.orientation())?;
        Ok(project(&fu, &fv, &e1, &e2))
    }

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        front_density(self.front.as_ref(), p, order)
    }

    fn density_sample(&self, p: ChartPoint) -> Result<DensitySample> {
        let j = self.front.eval(p, 1)?;
        let (fu, fv) = j.tangents()?;
        let nu = j.nu.truncate(0);
        let lambda = det3(&fu, &fv, &nu).value() * self.front.orientation();
        let nu_u = j.nu.partial_u()?.value();
        let nu_v = j.nu.partial_v()?.value();
        Ok(DensitySample {
            lambda,
            scale: (len3(fu.value()) + len3(fv.value())).powi(2) + (len3(nu_u) + len3(nu_v)).powi(2),
        })
    }

    fn label(&self) -> String {
        format!("front[{}]", self.front.label())
    }
}

/// Derivative of the Gauss map `ν̂: M → S²` of a front; its density
/// `det(ν̂_u, ν̂_v, ν̂)` equals `K det(f_u, f_v, ν̂)` at regular points.
#[derive(Clone)]
pub struct GaussMapHomomorphism {
    pub front: Arc<dyn FrontField>,
}

impl GaussMapHomomorphism {
    pub fn new(front: Arc<dyn FrontField>) -> Self {
        GaussMapHomomorphism { front }
    }
}

impl Homomorphism for GaussMapHomomorphism {
    fn domain(&self) -> SurfaceDomain {
        self.front.domain()
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let j = self.front.eval(p, order + 1)?;
        let nu_u = j.nu.partial_u()?;
        let nu_v = j.nu.partial_v()?;
        let nu = j.nu.truncate(order);
        let (e1, e2) = normal_plane_frame(&nu, self.front.orientation())?;
        Ok(project(&nu_u, &nu_v, &e1, &e2))
    }

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        let j = self.front.eval(p, order + 1)?;
        let nu_u = j.nu.partial_u()?;
        let nu_v = j.nu.partial_v()?;
        Ok(det3(&nu_u, &nu_v, &j.nu.truncate(order)).scale(self.front.orientation()))
    }

    fn density_sample(&self, p: ChartPoint) -> Result<DensitySample> {
        let j = self.front.eval(p, 1)?;
        let nu_u = j.nu.partial_u()?;
        let nu_v = j.nu.partial_v()?;
        let lambda = det3(&nu_u, &nu_v, &j.nu.truncate(0)).value() * self.front.orientation();
        Ok(DensitySample {
            lambda,
            scale: (len3(nu_u.value()) + len3(nu_v.value())).powi(2),
        })
    }

    fn label(&self) -> String {
        format!("gauss_map[{}]", self.front.label())
    }
}

/// Self-maps of the flat torus `R²/2πZ²`, given by lifts `(g₁, g₂)` that differ from a
/// linear map by doubly periodic functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusMap {
    /// `(u, v + a sin v)`: fold circles where `1 + a cos v = 0` when `|a| > 1`.
    Fold { amplitude: f64 },
    /// `(k u, v)`: a `k`-fold covering.
    Cover { k: i32 },
    /// `(u, v + a sin v + b sin u sin 2v)`: fold circles bent by a `u`-dependent term.
    Graph { a: f64, b: f64 },
}

impl TorusMap {
    pub fn components(&self, u: &Jet2, v: &Jet2) -> (Jet2, Jet2) {
        match *self {
            TorusMap::Fold { amplitude } => (*u, *v + v.sin() * amplitude),
            TorusMap::Cover { k } => (u.scale(k as f64), *v),
            TorusMap::Graph { a, b } => (
                *u,
                *v + v.sin() * a + u.sin() * (v.scale(2.0)).sin() * b,
            ),
        }
    }

    /// Image point reduced to `[0, 2π)²`.
    pub fn apply(&self, p: ChartPoint) -> ChartPoint {
        let (g1, g2) = self.components(&Jet2::constant(p.u, 0), &Jet2::constant(p.v, 0));
        ChartPoint::new(g1.value().rem_euclid(TAU), g2.value().rem_euclid(TAU))
    }

    pub fn jacobian(&self, p: ChartPoint) -> Result<[[f64; 2]; 2]> {
        let (u, v) = p.jets(1);
        let (g1, g2) = self.components(&u, &v);
        Ok([g1.gradient(), g2.gradient()])
    }

    pub fn label(&self) -> String {
        match self {
            TorusMap::Fold { amplitude } => format!("torus_fold(a={amplitude})"),
            TorusMap::Cover { k } => format!("torus_cover(k={k})"),
            TorusMap::Graph { a, b } => format!("torus_graph(a={a}, b={b})"),
        }
    }
}

impl Homomorphism for TorusMap {
    fn domain(&self) -> SurfaceDomain {
        SurfaceDomain::Torus
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let (u, v) = p.jets(order + 1);
        let (g1, g2) = self.components(&u, &v);
        Ok([
            [g1.partial_u()?, g1.partial_v()?],
            [g2.partial_u()?, g2.partial_v()?],
        ])
    }

    fn label(&self) -> String {
        TorusMap::label(self)
    }
}

/// Self-maps of the round sphere written in the sphere chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereMap {
    Identity,
}

impl SphereMap {
    /// The image unit vector as jets.
    pub fn image(&self, p: ChartPoint, order: usize) -> JetVec3 {
        let (u, v) = p.jets(order);
        match self {
            SphereMap::Identity => {
                let (cu, su, cv, sv) = (u.cos(), u.sin(), v.cos(), v.sin());
                JetVec3::new(cv * cu, cv * su, sv)
            }
        }
    }
}

impl Homomorphism for SphereMap {
    fn domain(&self) -> SurfaceDomain {
        SurfaceDomain::sphere()
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let img = self.image(p, order + 1);
        let (fu, fv) = (img.partial_u()?, img.partial_v()?);
        let (e1, e2) = normal_plane_frame(&img.truncate(order), 1.0)?;
        Ok(project(&fu, &fv, &e1, &e2))
    }

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        let img = self.image(p, order + 1);
        Ok(det3(&img.partial_u()?, &img.partial_v()?, &img.truncate(order)))
    }

    fn label(&self) -> String {
        "sphere_identity".into()
    }
}

pub type MatrixFieldFn = dyn Fn(&Jet2, &Jet2) -> FrameMatrix + Send + Sync;
pub type ScalarFieldFn = dyn Fn(&Jet2, &Jet2) -> Jet2 + Send + Sync;

/// A homomorphism given directly by its frame matrix in chart coordinates.
#[derive(Clone)]
pub struct SyntheticField {
    pub domain: SurfaceDomain,
    pub matrix: Arc<MatrixFieldFn>,
    pub name: String,
}

impl SyntheticField {
    pub fn new(domain: SurfaceDomain, name: &str, matrix: Arc<MatrixFieldFn>) -> Self {
        SyntheticField {
            domain,
            matrix,
            name: name.to_string(),
        }
    }

    /// `Φ = diag(1, λ)`, so that `λ` is the density and `∂_v` the null direction.
    pub fn diagonal(domain: SurfaceDomain, name: &str, lambda: Arc<ScalarFieldFn>) -> Self {
        Self::new(
            domain,
            name,
            Arc::new(move |u: &Jet2, v: &Jet2| {
                let l = lambda(u, v);
                let o = l.order();
                [[Jet2::constant(1.0, o), Jet2::zero(o)], [Jet2::zero(o), l]]
            }),
        )
    }

    /// The fold model `λ = sin v` on the torus.
    pub fn torus_fold_model() -> Self {
        Self::diagonal(SurfaceDomain::Torus, "torus_sin_v", Arc::new(|_u, v| v.sin()))
    }

    /// The hemisphere model `λ = z = sin v` on the round sphere.
    pub fn sphere_height_model() -> Self {
        Self::diagonal(SurfaceDomain::sphere(), "sphere_height", Arc::new(|_u, v| v.sin()))
    }

    /// `λ = u` on a square patch with null field `∂_u`.
    pub fn linear_patch_model() -> Self {
        Self::new(
            SurfaceDomain::square_patch(1.0),
            "patch_u",
            Arc::new(|u: &Jet2, _v: &Jet2| {
                let o = u.order();
                [[*u, Jet2::zero(o)], [Jet2::zero(o), Jet2::constant(1.0, o)]]
            }),
        )
    }
}

impl Homomorphism for SyntheticField {
    fn domain(&self) -> SurfaceDomain {
        self.domain
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let (u, v) = p.jets(order);
        Ok((self.matrix)(&u, &v))
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Replaces the density `λ` by the `φ`-function `e^σ λ` (first frame row scaled by
/// `e^σ`); the kernel of `φ` is unchanged.
#[derive(Clone)]
pub struct PhiRescaled {
    pub inner: Arc<dyn Homomorphism>,
    pub sigma: Arc<ScalarFieldFn>,
}

impl Homomorphism for PhiRescaled {
    fn domain(&self) -> SurfaceDomain {
        self.inner.domain()
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let mut m = self.inner.frame_matrix(p, order)?;
        let (u, v) = p.jets(order);
        let e = (self.sigma)(&u, &v).exp();
        m[0][0] = m[0][0] * e;
        m[0][1] = m[0][1] * e;
        Ok(m)
    }

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        let (u, v) = p.jets(order);
        Ok(self.inner.density(p, order)? * (self.sigma)(&u, &v).exp())
    }

    fn density_sample(&self, p: ChartPoint) -> Result<DensitySample> {
        let s = self.inner.density_sample(p)?;
        let e = (self.sigma)(&Jet2::constant(p.u, 0), &Jet2::constant(p.v, 0))
            .value()
            .exp();
        Ok(DensitySample {
            lambda: s.lambda * e,
            scale: s.scale * e,
        })
    }

    fn label(&self) -> String {
        format!("rescaled[{}]", self.inner.label())
    }
}

/// Rotates the target frame by a smooth angle field `θ(u, v)`; `λ` is unchanged.
#[derive(Clone)]
pub struct FrameRotated {
    pub inner: Arc<dyn Homomorphism>,
    pub angle: Arc<ScalarFieldFn>,
}

impl Homomorphism for FrameRotated {
    fn domain(&self) -> SurfaceDomain {
        self.inner.domain()
    }

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix> {
        let m = self.inner.frame_matrix(p, order)?;
        let (u, v) = p.jets(order);
        let th = (self.angle)(&u, &v);
        let (c, s) = (th.cos(), th.sin());
        Ok([
            [c * m[0][0] - s * m[1][0], c * m[0][1] - s * m[1][1]],
            [s * m[0][0] + c * m[1][0], s * m[0][1] + c * m[1][1]],
        ])
    }

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        self.inner.density(p, order)
    }

    fn density_sample(&self, p: ChartPoint) -> Result<DensitySample> {
        self.inner.density_sample(p)
    }

    fn label(&self) -> String {
        format!("rotated[{}]", self.inner.label())
    }
}
