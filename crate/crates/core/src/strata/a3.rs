//! Signed `A_3` points: sign changes of `λ̇` along a traced curve.

use super::{SignedA3Point, SingularCurve};
use crate::error::{Error, Result};
use crate::morin::{cascade_jets, classify_with, null_field, Homomorphism, NullChoice, Thresholds, Verdict};
use crate::surfaces::SurfaceDomain;
use crate::ChartPoint;

/// `λ̇` at `q` with `η̃` oriented along `reference`; also returns the oriented `η̃`.
fn lambda_dot(field: &dyn Homomorphism, q: ChartPoint, reference: [f64; 2]) -> Result<(f64, [f64; 2])> {
    let nf = null_field(field, q, 0, NullChoice::default(), Some(reference))?;
    let eta = [nf.eta[0].value(), nf.eta[1].value()];
    let g = field.density(q, 1)?.gradient();
    Ok((g[0] * eta[0] + g[1] * eta[1], eta))
}

/// Gradient steps back onto `λ = 0`.
pub(crate) fn project_to_zero(field: &dyn Homomorphism, mut q: ChartPoint, th: &Thresholds) -> Result<ChartPoint> {
    for _ in 0..8 {
        let j = field.density(q, 1)?;
        let (l, g) = (j.value(), j.gradient());
        if l.abs() <= th.eps_sing {
            break;
        }
        let n2 = g[0] * g[0] + g[1] * g[1];
        if n2 == 0.0 {
            break;
        }
        q = q.offset(-l * g[0] / n2, -l * g[1] / n2);
    }
    Ok(q)
}

/// Newton iteration on `(λ, λ̇) = 0`; `None` if it leaves the neighbourhood.
fn newton_polish(
    field: &dyn Homomorphism,
    start: ChartPoint,
    reference: [f64; 2],
    th: &Thresholds,
    radius: f64,
) -> Result<Option<ChartPoint>> {
    let mut q = start;
    for _ in 0..10 {
        let c = cascade_jets(field, q, 2, NullChoice::default(), Some(reference))?;
        let (f0, f1) = (c[0].value(), c[1].value());
        let (g0, g1) = (c[0].gradient(), c[1].gradient());
        let det = g0[0] * g1[1] - g0[1] * g1[0];
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let du = (f0 * g1[1] - f1 * g0[1]) / det;
        let dv = (g0[0] * f1 - g1[0] * f0) / det;
        q = q.offset(-du, -dv);
        if (q.u - start.u).hypot(q.v - start.v) > radius {
            return Ok(None);
        }
        if du.hypot(dv) < 1e-14 * th.length {
            break;
        }
    }
    Ok(Some(q))
}

/// Locates, refines and classifies the `A_3` points of `curve`; returns them with
/// any warnings raised on the way.
pub fn locate_a3(
    field: &dyn Homomorphism,
    curve: &SingularCurve,
    th: &Thresholds,
) -> Result<(Vec<SignedA3Point>, Vec<String>)> {
    let domain = field.domain();
    let n = curve.points.len();
    let mut warnings = Vec::new();
    if n < 2 {
        return Ok((Vec::new(), warnings));
    }
    let segs = if curve.closed { n } else { n - 1 };
    let mut found = Vec::new();
    for k in 0..segs {
        let k1 = (k + 1) % n;
        let d0 = curve.lambda_dot[k];
        let mut d1 = curve.lambda_dot[k1];
        if k1 == 0 && curve.eta_flips_on_closing {
            d1 = -d1;
        }
        if (d0 > 0.0) == (d1 > 0.0) {
            continue;
        }
        let a = curve.points[k];
        let (du, dv) = domain.displacement(a, curve.points[k1]);
        let seg = du.hypot(dv);
        let reference = curve.eta[k];
        let at = |s: f64| a.offset(s * du, s * dv);
        let (mut s0, mut s1) = (0.0f64, 1.0f64);
        let mut best = at(0.5);
        for _ in 0..80 {
            let s = 0.5 * (s0 + s1);
            let q = project_to_zero(field, at(s), th)?;
            best = q;
            let (x, _) = lambda_dot(field, q, reference)?;
            if x.abs() <= th.eps_dot || (s1 - s0) * seg < 1e-10 * th.length {
                break;
            }
            if (x > 0.0) == (d0 > 0.0) {
                s0 = s;
            } else {
                s1 = s;
            }
        }
        let radius = 4.0 * seg.max(1e-9 * th.length);
        let q = newton_polish(field, best, reference, th, radius)?.unwrap_or(best);
        let q = domain.canonical(q);
        let cls = classify_with(field, q, th, NullChoice::default(), Some(reference))?;
        match cls.verdict {
            Verdict::A3 { sign } => found.push(SignedA3Point {
                point: q,
                sign,
                lambda_ddot: cls.lambda_ddot.unwrap_or(0.0),
                rank_det: cls.rank_det.unwrap_or(0.0),
                curve: curve.id,
            }),
            other => {
                return Err(Error::DegenerateA3 {
                    point: q,
                    reason: format!(
                        "λ̇ changes sign but the point classifies as {other:?} (λ̈ = {:?}, rank = {:?})",
                        cls.lambda_ddot, cls.rank_det
                    ),
                })
            }
        }
    }
    let found = drop_coincident(found, &domain, th, &mut warnings);
    if curve.closed && found.len() % 2 == 1 {
        warnings.push(format!(
            "curve {} carries an odd number ({}) of A3 points",
            curve.id,
            found.len()
        ));
    }
    if curve.eta_flips_on_closing {
        warnings.push(format!("null direction reverses around curve {}", curve.id));
    }
    Ok((found, warnings))
}

fn drop_coincident(
    pts: Vec<SignedA3Point>,
    domain: &SurfaceDomain,
    th: &Thresholds,
    warnings: &mut Vec<String>,
) -> Vec<SignedA3Point> {
    let mut keep = vec![true; pts.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if !keep[i] || !keep[j] {
                continue;
            }
            let (du, dv) = domain.displacement(pts[i].point, pts[j].point);
            if du.hypot(dv) < 1e-6 * th.length {
                keep[i] = false;
                keep[j] = false;
                warnings.push(format!("dropped a coincident pair of A3 points near {}", pts[i].point));
            }
        }
    }
    pts.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}
