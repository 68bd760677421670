//! Tangent vector fields on the torus and the round sphere, their zeros and indices.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{Jet2, JetVec3};
use crate::surfaces::SurfaceDomain;
use crate::ChartPoint;

pub type ChartFieldFn = dyn Fn(&Jet2, &Jet2) -> [Jet2; 2] + Send + Sync;
pub type AmbientFieldFn = dyn Fn(&JetVec3) -> JetVec3 + Send + Sync;

/// A tangent vector field: chart components on the torus, or an ambient field on the
/// unit sphere whose tangential part is used.
#[derive(Clone)]
pub enum TangentField {
    Torus(Arc<ChartFieldFn>),
    Sphere(Arc<AmbientFieldFn>),
}

impl TangentField {
    pub fn domain(&self) -> SurfaceDomain {
        match self {
            TangentField::Torus(_) => SurfaceDomain::Torus,
            TangentField::Sphere(_) => SurfaceDomain::sphere(),
        }
    }

    pub fn constant_u() -> Self {
        TangentField::Torus(Arc::new(|u: &Jet2, _v: &Jet2| {
            let o = u.order();
            [Jet2::constant(1.0, o), Jet2::zero(o)]
        }))
    }

    /// Gradient of the height `z` on the round sphere: `e₃ − z x`.
    pub fn height_gradient() -> Self {
        TangentField::Sphere(Arc::new(|x: &JetVec3| {
            let o = x.order();
            JetVec3::constant([0.0, 0.0, 1.0], o) - x.scale(&x.z)
        }))
    }

    /// Random trigonometric polynomial field of degree ≤ 2 in each variable.
    pub fn random_trig(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = Vec::new();
        for _ in 0..2 {
            let mut c = Vec::new();
            for k in -2i32..=2 {
                for l in -2i32..=2 {
                    c.push((k, l, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                }
            }
            coeffs.push(c);
        }
        TangentField::Torus(Arc::new(move |u: &Jet2, v: &Jet2| {
            let comp = |c: &Vec<(i32, i32, f64, f64)>| {
                let mut acc = Jet2::zero(u.order());
                for &(k, l, a, b) in c {
                    let arg = u.scale(k as f64) + v.scale(l as f64);
                    acc += arg.cos() * a + arg.sin() * b;
                }
                acc
            };
            [comp(&coeffs[0]), comp(&coeffs[1])]
        }))
    }

    /// Local components `W(a, b)` and their derivatives in a positively oriented chart
    /// centred at `p`; the chart is the identity on the torus.
    pub fn local_jet(&self, p: ChartPoint, order: usize) -> Result<[Jet2; 2]> {
        match self {
            TangentField::Torus(f) => {
                let (u, v) = p.jets(order);
                Ok(f(&u, &v))
            }
            TangentField::Sphere(f) => {
                let x = sphere_point(p);
                let (t1, t2) = tangent_basis(x);
                let a = Jet2::variable_u(0.0, order);
                let b = Jet2::variable_v(0.0, order);
                let y = JetVec3::constant(x, order) + JetVec3::constant(t1, order).scale(&a)
                    + JetVec3::constant(t2, order).scale(&b);
                let y = y.normalize()?;
                let w = f(&y);
                let wt = w - y.scale(&w.dot(&y));
                Ok([wt.dot_const(t1), wt.dot_const(t2)])
            }
        }
    }
}

fn sphere_point(p: ChartPoint) -> [f64; 3] {
    [p.v.cos() * p.u.cos(), p.v.cos() * p.u.sin(), p.v.sin()]
}

fn chart_of(x: [f64; 3]) -> ChartPoint {
    ChartPoint::new(x[1].atan2(x[0]).rem_euclid(TAU), x[2].clamp(-1.0, 1.0).asin())
}

/// Orthonormal `(t₁, t₂)` with `(t₁, t₂, x)` positively oriented.
fn tangent_basis(x: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if x[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let d = a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
    let t = [a[0] - d * x[0], a[1] - d * x[1], a[2] - d * x[2]];
    let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    let t1 = [t[0] / n, t[1] / n, t[2] / n];
    let t2 = [
        x[1] * t1[2] - x[2] * t1[1],
        x[2] * t1[0] - x[0] * t1[2],
        x[0] * t1[1] - x[1] * t1[0],
    ];
    (t1, t2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldZero {
    pub point: ChartPoint,
    pub index: i64,
    pub jacobian: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorFieldZeroReport {
    pub zeros: Vec<FieldZero>,
    pub sum: i64,
    pub euler_char: i64,
}

/// One Newton step in the local chart at `p`; returns the new point and the step size.
fn newton_step(field: &TangentField, p: ChartPoint) -> Result<Option<(ChartPoint, f64, [f64; 2], f64)>> {
    let w = field.local_jet(p, 1)?;
    let r = [w[0].value(), w[1].value()];
    let (g0, g1) = (w[0].gradient(), w[1].gradient());
    let det = g0[0] * g1[1] - g0[1] * g1[0];
    if det == 0.0 || !det.is_finite() {
        return Ok(None);
    }
    let mut da = -(r[0] * g1[1] - r[1] * g0[1]) / det;
    let mut db = -(g0[0] * r[1] - g1[0] * r[0]) / det;
    let step = da.hypot(db);
    if step > 0.5 {
        da *= 0.5 / step;
        db *= 0.5 / step;
    }
    let q = match field {
        TangentField::Torus(_) => SurfaceDomain::Torus.canonical(p.offset(da, db)),
        TangentField::Sphere(_) => {
            let x = sphere_point(p);
            let (t1, t2) = tangent_basis(x);
            let y = [
                x[0] + da * t1[0] + db * t2[0],
                x[1] + da * t1[1] + db * t2[1],
                x[2] + da * t1[2] + db * t2[2],
            ];
            let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            chart_of([y[0] / n, y[1] / n, y[2] / n])
        }
    };
    Ok(Some((q, step, r, det)))
}

fn distance(field: &TangentField, a: ChartPoint, b: ChartPoint) -> f64 {
    match field {
        TangentField::Torus(_) => {
            let (du, dv) = SurfaceDomain::Torus.displacement(a, b);
            du.hypot(dv)
        }
        TangentField::Sphere(_) => {
            let (x, y) = (sphere_point(a), sphere_point(b));
            ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
        }
    }
}

/// Zeros by Newton from a 64×64 seed grid, deduplicated within `1e-6·ℓ`; the index of
/// each zero is the sign of the Jacobian determinant in an oriented chart.
pub fn poincare_hopf(field: &TangentField) -> Result<VectorFieldZeroReport> {
    let domain = field.domain();
    let n = 64;
    let (u0, u1) = domain.u_range();
    let (v0, v1) = domain.v_range();
    let seeds: Vec<ChartPoint> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            ChartPoint::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / n as f64,
                v0 + (v1 - v0) * (j as f64 + 0.5) / n as f64,
            )
        })
        .collect();
    // field scale, for the genericity test
    let scale = seeds
        .iter()
        .step_by(37)
        .map(|&p| {
            let w = field.local_jet(p, 1)?;
            let (g0, g1) = (w[0].gradient(), w[1].gradient());
            Ok(g0[0].hypot(g0[1]).max(g1[0].hypot(g1[1])))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let found: Vec<Option<ChartPoint>> = seeds
        .par_iter()
        .map(|&s| {
            let mut p = s;
            for _ in 0..50 {
                let Some((q, step, _, _)) = newton_step(field, p)? else {
                    return Ok(None);
                };
                p = q;
                if step < 1e-13 {
                    let w = field.local_jet(p, 0)?;
                    if w[0].value().hypot(w[1].value()) < 1e-10 * scale.max(1.0) {
                        return Ok(Some(p));
                    }
                    return Ok(None);
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let radius = 1e-6 * domain.diameter();
    let mut zeros: Vec<FieldZero> = Vec::new();
    for p in found.into_iter().flatten() {
        if zeros.iter().any(|z| distance(field, z.point, p) < radius) {
            continue;
        }
        let w = field.local_jet(p, 1)?;
        let (g0, g1) = (w[0].gradient(), w[1].gradient());
        let det = g0[0] * g1[1] - g0[1] * g1[0];
        if det.abs() <= 1e-10 * scale * scale {
            return Err(Error::NonGenericZero(p));
        }
        let p = if matches!(field, TangentField::Sphere(_)) && p.v.abs() > FRAC_PI_2 - 1e-12 {
            ChartPoint::new(0.0, p.v)
        } else {
            p
        };
        zeros.push(FieldZero {
            point: p,
            index: if det > 0.0 { 1 } else { -1 },
            jacobian: det,
        });
    }
    let sum = zeros.iter().map(|z| z.index).sum();
    Ok(VectorFieldZeroReport {
        zeros,
        sum,
        euler_char: domain.euler_char(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_has_no_zeros() {
        let r = poincare_hopf(&TangentField::constant_u()).unwrap();
        assert!(r.zeros.is_empty());
        assert_eq!(r.sum, 0);
    }

    #[test]
    fn height_gradient_on_sphere() {
        let r = poincare_hopf(&TangentField::height_gradient()).unwrap();
        assert_eq!(r.zeros.len(), 2);
        assert!(r.zeros.iter().all(|z| z.index == 1));
        assert_eq!(r.sum, 2);
    }

    #[test]
    fn random_trig_field_sums_to_zero() {
        let r = poincare_hopf(&TangentField::random_trig(4)).unwrap();
        assert_eq!(r.sum, 0);
        assert!(!r.zeros.is_empty());
    }
}
