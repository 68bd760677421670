//! Mapping degrees by quadrature of the pulled-back area form, with an independent
//! signed preimage count.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{det3, JetVec3};
use crate::morin::{Homomorphism, SphereMap, TorusMap};
use crate::surfaces::{FrontField, SurfaceDomain};
use crate::ChartPoint;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeResult {
    /// Richardson-extrapolated quadrature value.
    pub raw: f64,
    /// Plain midpoint value on the finer grid.
    pub midpoint: f64,
    pub rounded: i64,
    pub residual: f64,
    pub preimage_count: Option<i64>,
    pub grid: usize,
}

/// A smooth map between closed surfaces of the same kind, as used by the Quine formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapPair {
    Torus(TorusMap),
    Sphere(SphereMap),
}

impl MapPair {
    pub fn domain(&self) -> SurfaceDomain {
        match self {
            MapPair::Torus(_) => SurfaceDomain::Torus,
            MapPair::Sphere(_) => SurfaceDomain::sphere(),
        }
    }

    pub fn target_euler_char(&self) -> i64 {
        self.domain().euler_char()
    }

    pub fn homomorphism(&self) -> &dyn Homomorphism {
        match self {
            MapPair::Torus(m) => m,
            MapPair::Sphere(m) => m,
        }
    }

    pub fn label(&self) -> String {
        self.homomorphism().label()
    }
}

/// Composite midpoint rule over the full chart of `domain`.
fn midpoint<F>(domain: &SurfaceDomain, n: usize, f: F) -> Result<f64>
where
    F: Fn(ChartPoint) -> Result<f64> + Sync,
{
    let (u0, u1) = domain.u_range();
    let (v0, v1) = domain.v_range();
    let (hu, hv) = ((u1 - u0) / n as f64, (v1 - v0) / n as f64);
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let v = v0 + (j as f64 + 0.5) * hv;
            let mut acc = 0.0;
            for i in 0..n {
                acc += f(ChartPoint::new(u0 + (i as f64 + 0.5) * hu, v))?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum::<f64>() * hu * hv)
}

fn integrate_degree<F>(domain: &SurfaceDomain, n: usize, scale: f64, f: F) -> Result<DegreeResult>
where
    F: Fn(ChartPoint) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument("degree grid must be at least 2".into()));
    }
    let coarse = midpoint(domain, n, &f)? * scale;
    let fine = midpoint(domain, 2 * n, &f)? * scale;
    let raw = (4.0 * fine - coarse) / 3.0;
    let rounded = raw.round();
    let residual = (raw - rounded).abs();
    if !(residual < 1e-3) {
        return Err(Error::NonIntegerDegree { raw, residual });
    }
    Ok(DegreeResult {
        raw,
        midpoint: fine,
        rounded: rounded as i64,
        residual,
        preimage_count: None,
        grid: n,
    })
}

/// `(orientation/4π) ∬ det(ν̂_u, ν̂_v, ν̂) du dv`.
pub fn gauss_degree(front: &dyn FrontField, grid: usize) -> Result<DegreeResult> {
    let o = front.orientation();
    integrate_degree(&front.domain(), grid, o / (4.0 * PI), |p| {
        let j = front.eval(p, 1)?;
        Ok(det3(&j.nu.partial_u()?, &j.nu.partial_v()?, &j.nu.truncate(0)).value())
    })
}

/// Degree of a self-map of the torus or the sphere.
pub fn map_degree(map: &MapPair, grid: usize) -> Result<DegreeResult> {
    let h = map.homomorphism();
    let scale = match map {
        MapPair::Torus(_) => 1.0 / (TAU * TAU),
        MapPair::Sphere(_) => 1.0 / (4.0 * PI),
    };
    integrate_degree(&map.domain(), grid, scale, |p| Ok(h.density(p, 0)?.value()))
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A root of a 2×2 system together with the sign of its Jacobian.
#[derive(Clone, Copy, Debug)]
struct Root {
    point: ChartPoint,
    sign: i64,
}

/// Residual and Jacobian of a square system at `p`.
type System<'a> = dyn Fn(ChartPoint) -> Result<([f64; 2], [[f64; 2]; 2], f64)> + Sync + 'a;

fn newton(domain: &SurfaceDomain, sys: &System, seed: ChartPoint) -> Result<Option<Root>> {
    let mut p = seed;
    for _ in 0..40 {
        let (r, j, sign) = sys(p)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let du = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let dv = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let step = du.hypot(dv);
        if step > 0.5 {
            let s = 0.5 / step;
            p = p.offset(-du * s, -dv * s);
        } else {
            p = p.offset(-du, -dv);
        }
        if let SurfaceDomain::SphereChart { .. } = domain {
            if p.v.abs() >= FRAC_PI_2 {
                return Ok(None);
            }
        }
        p = domain.canonical(p);
        if step < 1e-13 {
            let (r, _, _) = sys(p)?;
            if r[0].hypot(r[1]) < 1e-10 {
                return Ok(Some(Root {
                    point: p,
                    sign: if sign > 0.0 { 1 } else { -1 },
                }));
            }
            return Ok(None);
        }
    }
    Ok(None)
}

fn seeds(domain: &SurfaceDomain, n: usize) -> Vec<ChartPoint> {
    let (u0, u1) = domain.u_range();
    let (v0, v1) = domain.v_range();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push(ChartPoint::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / n as f64,
                v0 + (v1 - v0) * (j as f64 + 0.5) / n as f64,
            ));
        }
    }
    out
}

/// Newton from a 64×64 seed grid; roots within `1e-6·ℓ` are merged.
fn solve_all(domain: &SurfaceDomain, sys: &System) -> Result<Vec<Root>> {
    let found: Vec<Option<Root>> = seeds(domain, 64)
        .par_iter()
        .map(|&s| newton(domain, sys, s))
        .collect::<Result<_>>()?;
    let radius = 1e-6 * domain.diameter();
    let mut roots: Vec<Root> = Vec::new();
    for r in found.into_iter().flatten() {
        let dup = roots.iter().any(|q| {
            let (du, dv) = domain.displacement(q.point, r.point);
            du.hypot(dv) < radius
        });
        if !dup {
            roots.push(r);
        }
    }
    Ok(roots)
}

/// Sphere-valued map `p ↦ F(p)` and the equations `⟨F, e₁⟩ = ⟨F, e₂⟩ = 0`, `⟨F, q⟩ > 0`.
fn sphere_target_system<'a>(
    image: &'a (dyn Fn(ChartPoint) -> Result<JetVec3> + Sync),
    q: [f64; 3],
    orientation: f64,
) -> impl Fn(ChartPoint) -> Result<([f64; 2], [[f64; 2]; 2], f64)> + Sync + 'a {
    let a = if q[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(q, a));
    let e2 = cross(q, e1);
    move |p| {
        let f = image(p)?;
        let (fu, fv) = (f.partial_u()?.value(), f.partial_v()?.value());
        let f0 = f.value();
        let r = [dot(f0, e1), dot(f0, e2)];
        let j = [[dot(fu, e1), dot(fv, e1)], [dot(fu, e2), dot(fv, e2)]];
        // wrong-hemisphere roots are pushed away by a large residual
        let r = if dot(f0, q) > 0.0 { r } else { [r[0] + 10.0, r[1] + 10.0] };
        let sign = orientation * dot(cross(fu, fv), f0);
        Ok((r, j, sign))
    }
}

/// Random unit vector away from the chart poles.
fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2 = dot(v, v);
        if n2 > 1e-2 && n2 <= 1.0 {
            let u = unit(v);
            if u[2].abs() < 0.95 {
                return u;
            }
        }
    }
}

fn signed_count(roots: &[Root]) -> i64 {
    roots.iter().map(|r| r.sign).sum()
}

fn roots_usable(domain: &SurfaceDomain, roots: &[Root]) -> bool {
    match domain {
        SurfaceDomain::SphereChart { pole_cap } => roots.iter().all(|r| r.point.v.abs() < FRAC_PI_2 - pole_cap),
        _ => true,
    }
}

/// Signed count of `ν̂(p) = q` for a random regular value `q` drawn from `seed`.
pub fn gauss_preimage_count(front: &dyn FrontField, seed: u64) -> Result<i64> {
    let domain = front.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let image = |p: ChartPoint| -> Result<JetVec3> { Ok(front.eval(p, 1)?.nu) };
    for _ in 0..10 {
        let q = random_direction(&mut rng);
        let sys = sphere_target_system(&image, q, front.orientation());
        let roots = solve_all(&domain, &sys)?;
        if roots_usable(&domain, &roots) {
            return Ok(signed_count(&roots));
        }
    }
    Err(Error::InvalidArgument("no usable regular value found for the preimage count".into()))
}

/// Signed preimage count of a random regular value of a torus or sphere self-map.
pub fn map_preimage_count(map: &MapPair, seed: u64) -> Result<i64> {
    let domain = map.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match map {
        MapPair::Torus(m) => {
            let q = ChartPoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let sys = |p: ChartPoint| -> Result<([f64; 2], [[f64; 2]; 2], f64)> {
                let img = m.apply(p);
                let (du, dv) = domain.displacement(q, img);
                let j = m.jacobian(p)?;
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                Ok(([du, dv], j, det))
            };
            Ok(signed_count(&solve_all(&domain, &sys)?))
        }
        MapPair::Sphere(m) => {
            let image = |p: ChartPoint| -> Result<JetVec3> { Ok(m.image(p, 1)) };
            for _ in 0..10 {
                let q = random_direction(&mut rng);
                let sys = sphere_target_system(&image, q, 1.0);
                let roots = solve_all(&domain, &sys)?;
                if roots_usable(&domain, &roots) {
                    return Ok(signed_count(&roots));
                }
            }
            Err(Error::InvalidArgument("no usable regular value found for the preimage count".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{RoundSphere, StandardTorus};

    #[test]
    fn unit_sphere_degree_is_one() {
        let d = gauss_degree(&RoundSphere::new(1.0), 32).unwrap();
        assert_eq!(d.rounded, 1);
        assert!(d.residual < 1e-4, "{d:?}");
        assert_eq!(gauss_preimage_count(&RoundSphere::new(1.0), 3).unwrap(), 1);
    }

    #[test]
    fn torus_degree_is_zero() {
        let t = StandardTorus::new(2.0, 0.7);
        assert_eq!(gauss_degree(&t, 32).unwrap().rounded, 0);
        assert_eq!(gauss_preimage_count(&t, 5).unwrap(), 0);
    }

    #[test]
    fn torus_map_degrees() {
        let cover = MapPair::Torus(TorusMap::Cover { k: 2 });
        assert_eq!(map_degree(&cover, 16).unwrap().rounded, 2);
        assert_eq!(map_preimage_count(&cover, 1).unwrap(), 2);
        let fold = MapPair::Torus(TorusMap::Fold { amplitude: 0.5 });
        assert_eq!(map_degree(&fold, 16).unwrap().rounded, 1);
        assert_eq!(map_preimage_count(&fold, 1).unwrap(), 1);
        let sphere = MapPair::Sphere(SphereMap::Identity);
        assert_eq!(map_degree(&sphere, 16).unwrap().rounded, 1);
        assert_eq!(map_preimage_count(&sphere, 1).unwrap(), 1);
    }
}
