//! Detection, classification and sign-grading of corank-one singularities of wave
//! fronts, Morin maps, Gauss maps and Blaschke normal maps of closed surfaces, together
//! with checkers for the integer index identities they satisfy.
//!
//! The crate is organised bottom-up:
//!
//! * [`jets`] — truncated bivariate Taylor arithmetic, the only differentiation engine;
//! * [`surfaces`] — parametrized closed surfaces, fronts, curvature, parallel fronts and
//!   affine (Blaschke) normals;
//! * [`morin`] — bundle homomorphisms, the density `λ`, null directions, the derivative
//!   cascade and pointwise `A_k` classification;
//! * [`strata`] — tracing of the singular curves, signed `A_3` points and the signed
//!   region complex with its Euler characteristics;
//! * [`indexcheck`] — mapping degrees, Poincaré–Hopf sums and the formula verifiers;
//! * [`cli`] — the scenario runner: config grammar, JSON report and SVG plots.

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod cli;
pub mod error;
pub mod indexcheck;
pub mod jets;
pub mod morin;
pub mod strata;
pub mod surfaces;

pub use error::{Error, Result};
pub use jets::{directional_jet_derivative, Jet2, JetVec3};

/// A point of a chart domain, `u` horizontal and `v` vertical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        ChartPoint { u, v }
    }

    /// Coordinate jets `(u, v)` expanded at this point.
    pub fn jets(&self, order: usize) -> (Jet2, Jet2) {
        (
            Jet2::variable_u(self.u, order),
            Jet2::variable_v(self.v, order),
        )
    }

    pub fn offset(&self, du: f64, dv: f64) -> Self {
        ChartPoint::new(self.u + du, self.v + dv)
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.u, self.v)
    }
}
