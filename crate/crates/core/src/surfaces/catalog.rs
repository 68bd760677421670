use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FrontField, FrontJets, SurfaceDomain};
use crate::error::{Error, Result};
use crate::jets::{Jet2, JetVec3};
use crate::ChartPoint;

/// Unit direction `(cos v cos u, cos v sin u, sin v)` of the sphere chart.
fn sphere_direction(p: ChartPoint, order: usize) -> JetVec3 {
    let (u, v) = p.jets(order);
    let (cu, su, cv, sv) = (u.cos(), u.sin(), v.cos(), v.sin());
    JetVec3::new(cv * cu, cv * su, sv)
}

/// Front of a radial graph `f = ρ(d) d` over the unit sphere, with the outward normal.
fn radial_graph_eval(
    p: ChartPoint,
    order: usize,
    radius: impl Fn(&JetVec3) -> Jet2,
) -> Result<FrontJets> {
    let d = sphere_direction(p, order + 1);
    let rho = radius(&d);
    let f = d.scale(&rho);
    let n = f.partial_u()?.cross(&f.partial_v()?);
    let nu = n.normalize()?;
    Ok(FrontJets {
        f: f.truncate(order),
        nu,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundSphere {
    pub radius: f64,
    pub domain: SurfaceDomain,
}

impl RoundSphere {
    pub fn new(radius: f64) -> Self {
        RoundSphere {
            radius,
            domain: SurfaceDomain::sphere(),
        }
    }
}

impl FrontField for RoundSphere {
    fn domain(&self) -> SurfaceDomain {
        self.domain
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let d = sphere_direction(p, order);
        Ok(FrontJets {
            f: d.scale_f64(self.radius),
            nu: d,
        })
    }

    fn bounding_radius(&self) -> f64 {
        self.radius
    }

    fn label(&self) -> String {
        format!("sphere(R={})", self.radius)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StandardTorus {
    pub major: f64,
    pub minor: f64,
}

impl StandardTorus {
    pub fn new(major: f64, minor: f64) -> Self {
        StandardTorus { major, minor }
    }
}

impl FrontField for StandardTorus {
    fn domain(&self) -> SurfaceDomain {
        SurfaceDomain::Torus
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let (u, v) = p.jets(order);
        let (cu, su, cv, sv) = (u.cos(), u.sin(), v.cos(), v.sin());
        let ring = cv * self.minor + self.major;
        Ok(FrontJets {
            f: JetVec3::new(ring * cu, ring * su, sv * self.minor),
            nu: JetVec3::new(cv * cu, cv * su, sv),
        })
    }

    fn bounding_radius(&self) -> f64 {
        self.major + self.minor
    }

    fn label(&self) -> String {
        format!("torus(R={}, r={})", self.major, self.minor)
    }
}

/// Number of trigonometric bump terms in [`BumpyBody`].
pub const BUMPY_BASIS_LEN: usize = 9;

/// Degree-2 and degree-3 harmonic polynomials in the unit direction.
fn bumpy_basis(d: &JetVec3) -> [Jet2; BUMPY_BASIS_LEN] {
    let (x, y, z) = (d.x, d.y, d.z);
    [
        x * y,
        y * z,
        z * x,
        x * x - y * y,
        z * z * 3.0 - 1.0,
        x * (x * x - y * y * 3.0),
        y * (x * x * 3.0 - y * y),
        z * (z * z * 5.0 - 3.0),
        x * y * z,
    ]
}

/// Radial graph `f = (1 + Σ a_k Y_k(d)) d` with small smooth bumps.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpyBody {
    pub coeffs: [f64; BUMPY_BASIS_LEN],
    pub domain: SurfaceDomain,
}

impl BumpyBody {
    pub fn new(coeffs: [f64; BUMPY_BASIS_LEN]) -> Self {
        BumpyBody {
            coeffs,
            domain: SurfaceDomain::sphere(),
        }
    }

    /// Coefficients drawn uniformly from `[−amplitude, amplitude]`.
    pub fn random(seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = [0.0; BUMPY_BASIS_LEN];
        for c in coeffs.iter_mut() {
            *c = amplitude * rng.random_range(-1.0..=1.0);
        }
        Self::new(coeffs)
    }

    pub fn with_pole_cap(mut self, pole_cap: f64) -> Self {
        self.domain = SurfaceDomain::SphereChart { pole_cap };
        self
    }
}

impl FrontField for BumpyBody {
    fn domain(&self) -> SurfaceDomain {
        self.domain
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        radial_graph_eval(p, order, |d| {
            let basis = bumpy_basis(d);
            let mut rho = Jet2::constant(1.0, d.order());
            for (a, y) in self.coeffs.iter().zip(basis.iter()) {
                rho += y.scale(*a);
            }
            rho
        })
    }

    fn bounding_radius(&self) -> f64 {
        // |Y_k| <= 4 on the unit sphere for every basis element
        1.0 + 4.0 * self.coeffs.iter().map(|a| a.abs()).sum::<f64>()
    }

    fn label(&self) -> String {
        "bumpy".to_string()
    }
}

/// Surface of revolution of the profile `γ(t) = (1 − 2ε sin t)(sin t, cos t)`,
/// `t ∈ [−π/2, π/2]`, realised as the radial graph `(1 − 2ε d_z) d` about the z axis
/// (latitude `v` plays the role of `t`).
#[derive(Clone, Debug, PartialEq)]
pub struct RotationalGamma {
    pub epsilon: f64,
    pub domain: SurfaceDomain,
}

impl RotationalGamma {
    /// The profile is a convex curve only for `0 ≤ ε < 1/4`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..0.25).contains(&epsilon) {
            return Err(Error::Range {
                key: "epsilon".into(),
                message: format!("{epsilon} not in [0, 1/4)"),
            });
        }
        Ok(RotationalGamma {
            epsilon,
            domain: SurfaceDomain::sphere(),
        })
    }

    pub fn with_pole_cap(mut self, pole_cap: f64) -> Self {
        self.domain = SurfaceDomain::SphereChart { pole_cap };
        self
    }

    /// Profile point `γ(t)` as (axial, radial) coordinates.
    pub fn profile(&self, t: f64) -> [f64; 2] {
        let r = 1.0 - 2.0 * self.epsilon * t.sin();
        [r * t.sin(), r * t.cos()]
    }
}

impl FrontField for RotationalGamma {
    fn domain(&self) -> SurfaceDomain {
        self.domain
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let eps = self.epsilon;
        radial_graph_eval(p, order, |d| (d.z * (-2.0 * eps)).add_scalar(1.0))
    }

    fn bounding_radius(&self) -> f64 {
        1.0 + 2.0 * self.epsilon
    }

    fn label(&self) -> String {
        format!("rotational_gamma(eps={})", self.epsilon)
    }
}

/// Local swallowtail `f = (3u⁴ + u²v, 4u³ + 2uv, v)` with
/// `ν̂ = (1, −u, u²)/√(1 + u² + u⁴)` on `[−1, 1]²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwallowtailPatch;

impl FrontField for SwallowtailPatch {
    fn domain(&self) -> SurfaceDomain {
        SurfaceDomain::square_patch(1.0)
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let (u, v) = p.jets(order);
        let u2 = u * u;
        let f = JetVec3::new(
            u2 * u2 * 3.0 + u2 * v,
            u2 * u * 4.0 + u * v * 2.0,
            v,
        );
        let w = (u2 + u2 * u2).add_scalar(1.0);
        let inv = w.powf(-0.5)?;
        let nu = JetVec3::new(inv, -(u * inv), u2 * inv);
        Ok(FrontJets { f, nu })
    }

    fn bounding_radius(&self) -> f64 {
        8.0
    }

    fn label(&self) -> String {
        "swallowtail_patch".to_string()
    }
}

/// `f_t = f + t ν̂`; shares the unit normal of the base.
#[derive(Clone)]
pub struct ParallelFront {
    pub base: Arc<dyn FrontField>,
    pub t: f64,
}

impl ParallelFront {
    pub fn new(base: Arc<dyn FrontField>, t: f64) -> Self {
        ParallelFront { base, t }
    }
}

impl FrontField for ParallelFront {
    fn domain(&self) -> SurfaceDomain {
        self.base.domain()
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let b = self.base.eval(p, order)?;
        Ok(FrontJets {
            f: b.f + b.nu.scale_f64(self.t),
            nu: b.nu,
        })
    }

    fn orientation(&self) -> f64 {
        self.base.orientation()
    }

    fn bounding_radius(&self) -> f64 {
        self.base.bounding_radius() + self.t.abs()
    }

    fn label(&self) -> String {
        format!("parallel({}, t={})", self.base.label(), self.t)
    }
}

/// Image `A ∘ f` of a front under an invertible linear map.
#[derive(Clone)]
pub struct LinearImage {
    pub base: Arc<dyn FrontField>,
    pub matrix: [[f64; 3]; 3],
    normal_map: [[f64; 3]; 3],
    norm_bound: f64,
}

impl LinearImage {
    pub fn new(base: Arc<dyn FrontField>, matrix: [[f64; 3]; 3]) -> Result<Self> {
        let m = matrix;
        // cofactor matrix = det(A) A^{-T}; it maps normals of f to normals of A f
        let mut cof = [[0.0; 3]; 3];
        for (r, row) in cof.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
                let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
                *x = m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
            }
        }
        let det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
        if det.abs() < 1e-12 {
            return Err(Error::InvalidArgument("linear map is singular".into()));
        }
        let norm_bound = m
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        Ok(LinearImage {
            base,
            matrix,
            normal_map: cof,
            norm_bound,
        })
    }
}

impl FrontField for LinearImage {
    fn domain(&self) -> SurfaceDomain {
        self.base.domain()
    }

    fn eval(&self, p: ChartPoint, order: usize) -> Result<FrontJets> {
        let b = self.base.eval(p, order)?;
        Ok(FrontJets {
            f: b.f.linear(&self.matrix),
            nu: b.nu.linear(&self.normal_map).normalize()?,
        })
    }

    fn orientation(&self) -> f64 {
        self.base.orientation()
    }

    fn bounding_radius(&self) -> f64 {
        self.norm_bound * self.base.bounding_radius()
    }

    fn label(&self) -> String {
        format!("linear({})", self.base.label())
    }
}
