//! Bundle homomorphisms `φ: TM → E` between oriented rank-2 bundles, their density
//! `λ = det Φ`, null directions and the `A_k` derivative cascade.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{directional_jet_derivative, Jet2, MAX_ORDER};
use crate::surfaces::SurfaceDomain;
use crate::ChartPoint;

mod sources;

pub use sources::{
    FrontHomomorphism, FrameRotated, GaussMapHomomorphism, MatrixFieldFn, PhiRescaled,
    ScalarFieldFn, SphereMap, SyntheticField, TorusMap,
};

/// `Φ[r][c]`: component `r` (in an oriented orthonormal frame of `E`) of `φ(∂_c)`,
/// with `∂_0 = ∂_u`, `∂_1 = ∂_v`.
pub type FrameMatrix = [[Jet2; 2]; 2];

/// Value of `λ` at a point together with the size of the data it was computed from;
/// `scale` is used to decide when an adjugate column counts as vanishing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensitySample {
    pub lambda: f64,
    pub scale: f64,
}

pub trait Homomorphism: Send + Sync {
    fn domain(&self) -> SurfaceDomain;

    fn frame_matrix(&self, p: ChartPoint, order: usize) -> Result<FrameMatrix>;

    fn density(&self, p: ChartPoint, order: usize) -> Result<Jet2> {
        let m = self.frame_matrix(p, order)?;
        Ok(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    }

    fn density_sample(&self, p: ChartPoint) -> Result<DensitySample> {
        let m = self.frame_matrix(p, 0)?;
        let a = [
            m[0][0].value(),
            m[0][1].value(),
            m[1][0].value(),
            m[1][1].value(),
        ];
        let norm_sq: f64 = a.iter().map(|x| x * x).sum();
        Ok(DensitySample {
            lambda: a[0] * a[3] - a[1] * a[2],
            scale: norm_sq,
        })
    }

    fn label(&self) -> String;
}

/// Relative tolerances; absolute thresholds come from [`Tolerances::thresholds`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sing: f64,
    pub dot: f64,
    pub ddot: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sing: 1e-9,
            dot: 1e-6,
            ddot: 1e-6,
            rank: 1e-8,
        }
    }
}

impl Tolerances {
    /// Scales the relative tolerances by `λ_scale = max |λ|` and the chart diameter `ℓ`.
    pub fn thresholds(&self, lambda_scale: f64, length: f64) -> Thresholds {
        Thresholds {
            lambda_scale,
            length,
            eps_sing: self.sing * lambda_scale,
            eps_dot: self.dot * lambda_scale / length,
            eps_ddot: self.ddot * lambda_scale / (length * length),
            eps_rank: self.rank * lambda_scale * lambda_scale / length.powi(3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub lambda_scale: f64,
    pub length: f64,
    pub eps_sing: f64,
    pub eps_dot: f64,
    pub eps_ddot: f64,
    pub eps_rank: f64,
}

/// Estimates `max |λ|` on a regular grid of the chart, excluding pole caps.
pub fn lambda_scale(field: &dyn Homomorphism, n: usize) -> Result<f64> {
    let dom = field.domain();
    let (u0, u1) = dom.u_range();
    let (v0, v1) = dom.strata_v_range();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = ChartPoint::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / n as f64,
                v0 + (v1 - v0) * (j as f64 + 0.5) / n as f64,
            );
            best = best.max(field.density_sample(p)?.lambda.abs());
        }
    }
    Ok(best)
}

/// Thresholds for `field` with the given relative tolerances.
pub fn field_thresholds(field: &dyn Homomorphism, tol: &Tolerances) -> Result<Thresholds> {
    let scale = lambda_scale(field, 64)?;
    Ok(tol.thresholds(scale, field.domain().diameter()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Verdict {
    Regular,
    A2,
    A3 { sign: Sign },
    Degenerate,
}

/// How the null field `η̃` is extracted from the adjugate of `Φ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NullChoice {
    /// Force a particular adjugate column instead of the larger one.
    pub column: Option<usize>,
    /// Reverse the canonical orientation.
    pub flip: bool,
}

impl NullChoice {
    pub fn flipped() -> Self {
        NullChoice {
            column: None,
            flip: true,
        }
    }
}

/// Unit null direction at a singular point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullDirection {
    pub eta: [f64; 2],
    pub column: usize,
}

/// Null vector field `η̃` as jets (unit chart length), with the adjugate column used.
#[derive(Clone, Copy, Debug)]
pub struct NullField {
    pub eta: [Jet2; 2],
    pub column: usize,
}

fn adjugate_columns(m: &FrameMatrix) -> [[Jet2; 2]; 2] {
    [[m[1][1], -m[1][0]], [-m[0][1], m[0][0]]]
}

/// Extracts the null field from the adjugate of `Φ` at `p`.
///
/// With `reference`, `η̃` is oriented to have positive inner product with it (used when
/// following a curve); otherwise its larger-magnitude component is made positive.
pub fn null_field(
    field: &dyn Homomorphism,
    p: ChartPoint,
    order: usize,
    choice: NullChoice,
    reference: Option<[f64; 2]>,
) -> Result<NullField> {
    let m = field.frame_matrix(p, order)?;
    let cols = adjugate_columns(&m);
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c[0].value().hypot(c[1].value()))
        .collect();
    let column = choice
        .column
        .unwrap_or(if norms[1] > norms[0] { 1 } else { 0 });
    let sample = field.density_sample(p)?;
    let floor = 1e-8 * sample.scale.sqrt().max(f64::MIN_POSITIVE);
    if norms[column] <= floor || !norms[column].is_finite() {
        return Err(Error::ZeroAdjugate(p));
    }
    let c = cols[column];
    let len = (c[0].square() + c[1].square()).sqrt()?;
    let mut eta = [c[0].div(&len)?, c[1].div(&len)?];
    let e0 = [eta[0].value(), eta[1].value()];
    let mut s = match reference {
        Some(r) => {
            if e0[0] * r[0] + e0[1] * r[1] >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        None => {
            let big = if e0[0].abs() >= e0[1].abs() { e0[0] } else { e0[1] };
            if big >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
    };
    if choice.flip {
        s = -s;
    }
    if s < 0.0 {
        eta = [-eta[0], -eta[1]];
    }
    Ok(NullField { eta, column })
}

fn check_singular(field: &dyn Homomorphism, p: ChartPoint, th: &Thresholds) -> Result<()> {
    let m = field.frame_matrix(p, 0)?;
    let (a, b, c, d) = (m[0][0].value(), m[0][1].value(), m[1][0].value(), m[1][1].value());
    // singular values of a 2×2 matrix
    let s1 = 0.5 * ((a + d).hypot(c - b) + (a - d).hypot(c + b));
    let s2 = 0.5 * ((a + d).hypot(c - b) - (a - d).hypot(c + b)).abs();
    if s2 * s1 > th.eps_sing {
        return Err(Error::NotSingular(p));
    }
    Ok(())
}

/// Unit null direction at a singular point `p`.
pub fn null_direction(
    field: &dyn Homomorphism,
    p: ChartPoint,
    th: &Thresholds,
) -> Result<NullDirection> {
    check_singular(field, p, th)?;
    let nf = null_field(field, p, 0, NullChoice::default(), None)?;
    Ok(NullDirection {
        eta: [nf.eta[0].value(), nf.eta[1].value()],
        column: nf.column,
    })
}

/// Jets `λ, λ̇, …, λ^(k)` where `λ^(j+1) = η̃ λ^(j)`; entry `j` has order `k − j`.
pub fn cascade_jets(
    field: &dyn Homomorphism,
    p: ChartPoint,
    k: usize,
    choice: NullChoice,
    reference: Option<[f64; 2]>,
) -> Result<Vec<Jet2>> {
    if k > MAX_ORDER - 1 {
        return Err(Error::OrderTooHigh {
            requested: k,
            max: MAX_ORDER - 1,
        });
    }
    let lambda = field.density(p, k)?;
    let mut out = vec![lambda];
    if k == 0 {
        return Ok(out);
    }
    let nf = null_field(field, p, k - 1, choice, reference)?;
    for _ in 0..k {
        let last = out.last().unwrap();
        let next = directional_jet_derivative(last, [&nf.eta[0], &nf.eta[1]])?;
        out.push(next);
    }
    Ok(out)
}

/// Values `(λ(p), λ̇(p), …, λ^(k)(p))` at a singular point.
pub fn lambda_cascade(
    field: &dyn Homomorphism,
    p: ChartPoint,
    k: usize,
    th: &Thresholds,
) -> Result<Vec<f64>> {
    check_singular(field, p, th)?;
    Ok(cascade_jets(field, p, k, NullChoice::default(), None)?
        .iter()
        .map(Jet2::value)
        .collect())
}

/// Full pointwise classification data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub point: ChartPoint,
    pub verdict: Verdict,
    pub lambda: f64,
    pub lambda_dot: Option<f64>,
    pub lambda_ddot: Option<f64>,
    /// `det d(λ, λ̇)` at the point.
    pub rank_det: Option<f64>,
}

/// Classifies `p` as regular, fold (`A_2`), signed swallowtail/cusp (`A_3`) or degenerate.
pub fn classify_point(
    field: &dyn Homomorphism,
    p: ChartPoint,
    th: &Thresholds,
) -> Result<Classification> {
    classify_with(field, p, th, NullChoice::default(), None)
}

pub fn classify_with(
    field: &dyn Homomorphism,
    p: ChartPoint,
    th: &Thresholds,
    choice: NullChoice,
    reference: Option<[f64; 2]>,
) -> Result<Classification> {
    let mut out = Classification {
        point: p,
        verdict: Verdict::Degenerate,
        lambda: field.density_sample(p)?.lambda,
        lambda_dot: None,
        lambda_ddot: None,
        rank_det: None,
    };
    if out.lambda.abs() > th.eps_sing {
        out.verdict = Verdict::Regular;
        return Ok(out);
    }
    let c = match cascade_jets(field, p, 2, choice, reference) {
        Ok(c) => c,
        Err(Error::ZeroAdjugate(_)) => return Ok(out),
        Err(e) => return Err(e),
    };
    let (ld, ldd) = (c[1].value(), c[2].value());
    let g0 = c[0].gradient();
    let g1 = c[1].gradient();
    let rank = g0[0] * g1[1] - g0[1] * g1[0];
    out.lambda_dot = Some(ld);
    out.lambda_ddot = Some(ldd);
    out.rank_det = Some(rank);
    out.verdict = if ld.abs() > th.eps_dot {
        Verdict::A2
    } else if ldd.abs() > th.eps_ddot && rank.abs() > th.eps_rank {
        Verdict::A3 {
            sign: Sign::of(ldd),
        }
    } else {
        Verdict::Degenerate
    };
    Ok(out)
}
