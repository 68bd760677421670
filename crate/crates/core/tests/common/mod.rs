#![allow(dead_code)]

pub mod checks;

use std::f64::consts::TAU;
use std::sync::Arc;

use frontidx::indexcheck::TangentField;
use frontidx::morin::{ScalarFieldFn, SyntheticField};
use frontidx::surfaces::SurfaceDomain;
use frontidx::{ChartPoint, Jet2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Degree-one trigonometric polynomial on the torus, as jets and as plain values.
#[derive(Clone, Debug)]
pub struct Trig {
    pub c0: f64,
    /// `(k, l, a, b)` for `a cos(ku + lv) + b sin(ku + lv)`.
    pub terms: Vec<(f64, f64, f64, f64)>,
}

impl Trig {
    pub fn random(seed: u64, c0_range: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 = rng.random_range(-c0_range..=c0_range);
        let terms = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)]
            .into_iter()
            .map(|(k, l)| (k, l, rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect();
        Trig { c0, terms }
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .map(|&(k, l, a, b)| a * (k * u + l * v).cos() + b * (k * u + l * v).sin())
                .sum::<f64>()
    }

    pub fn jet_fn(&self) -> Arc<ScalarFieldFn> {
        let t = self.clone();
        Arc::new(move |u: &Jet2, v: &Jet2| {
            let o = u.order();
            let mut s = Jet2::constant(t.c0, o);
            for &(k, l, a, b) in &t.terms {
                let arg = *u * k + *v * l;
                s += arg.cos() * a + arg.sin() * b;
            }
            s
        })
    }
}

/// `Φ = diag(1, λ)` on the torus with a random trigonometric `λ`; the null line field
/// `∂_v` is globally oriented.
pub fn random_diagonal(seed: u64) -> SyntheticField {
    let t = Trig::random(seed, 0.5);
    SyntheticField::diagonal(SurfaceDomain::Torus, &format!("diag_trig_{seed}"), t.jet_fn())
}

/// Smooth torus self-map parameters `(a, b)` for `(u, v + a sin v + b sin u sin 2v)`.
pub fn random_graph_params(seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (rng.random_range(1.2..2.0), rng.random_range(0.05..0.5))
}

/// Random `A ∈ SL(3)` with bounded condition.
pub fn random_unimodular(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut a = [[0.0; 3]; 3];
        for (r, row) in a.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = rng.random_range(-0.6..0.6) + if r == c { 1.0 } else { 0.0 };
            }
        }
        let d = det3(&a);
        if d.abs() > 0.3 {
            let s = d.cbrt();
            for row in a.iter_mut() {
                for x in row.iter_mut() {
                    *x /= s;
                }
            }
            return a;
        }
    }
}

pub fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn mat_vec(a: &[[f64; 3]; 3], x: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|r| a[r][0] * x[0] + a[r][1] * x[1] + a[r][2] * x[2])
}

/// Index of an isolated zero from the winding of the field along a small circle,
/// using point values only.
pub fn winding_index(field: &TangentField, p: ChartPoint, radius: f64) -> i64 {
    let n = 512;
    let value = |th: f64| {
        let q = p.offset(radius * th.cos(), radius * th.sin());
        let w = field.local_jet(q, 0).expect("field value");
        w[1].value().atan2(w[0].value())
    };
    let mut total = 0.0;
    let mut prev = value(0.0);
    for k in 1..=n {
        let cur = value(TAU * k as f64 / n as f64);
        let mut d = cur - prev;
        while d > std::f64::consts::PI {
            d -= TAU;
        }
        while d < -std::f64::consts::PI {
            d += TAU;
        }
        total += d;
        prev = cur;
    }
    (total / TAU).round() as i64
}

/// Central second difference of `g` along `(du, dv)`, with Richardson extrapolation.
pub fn fd_second(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn fd_first(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (g(h) - g(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}
