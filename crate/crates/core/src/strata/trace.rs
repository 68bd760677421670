//! Zero crossings on mixed mesh edges and their chaining into singular curves.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use super::mesh::Mesh;
use super::SingularCurve;
use crate::error::{Error, Result};
use crate::morin::{null_field, Homomorphism, NullChoice, Thresholds};
use crate::ChartPoint;

/// A sign-change edge of the mesh with its refined zero.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Crossing {
    pub plus: usize,
    pub minus: usize,
    pub point: ChartPoint,
}

fn lerp(a: ChartPoint, b: ChartPoint, s: f64) -> ChartPoint {
    ChartPoint::new(a.u + (b.u - a.u) * s, a.v + (b.v - a.v) * s)
}

/// Illinois false position for the zero of `λ` on the segment `a → b`.
pub(crate) fn edge_zero(
    field: &dyn Homomorphism,
    a: ChartPoint,
    b: ChartPoint,
    la: f64,
    lb: f64,
    th: &Thresholds,
) -> Result<ChartPoint> {
    let (mut s0, mut s1, mut f0, mut f1) = (0.0f64, 1.0f64, la, lb);
    let len = (b.u - a.u).hypot(b.v - a.v);
    let mut side = 0;
    for _ in 0..200 {
        let s = (s0 * f1 - s1 * f0) / (f1 - f0);
        let s = if s.is_finite() && s > s0 && s < s1 { s } else { 0.5 * (s0 + s1) };
        let p = lerp(a, b, s);
        let x = field.density_sample(p)?.lambda;
        if x.abs() <= th.eps_sing || (s1 - s0) * len < 1e-14 * th.length {
            return Ok(p);
        }
        if (x > 0.0) == (f0 > 0.0) {
            s0 = s;
            f0 = x;
            if side == -1 {
                f1 *= 0.5;
            }
            side = -1;
        } else {
            s1 = s;
            f1 = x;
            if side == 1 {
                f0 *= 0.5;
            }
            side = 1;
        }
    }
    Ok(lerp(a, b, 0.5 * (s0 + s1)))
}

/// Mixed edges keyed by vertex pair, and mixed triangles as pairs of edge ids.
pub(crate) struct Crossings {
    pub edges: Vec<Crossing>,
    pub links: Vec<[usize; 2]>,
}

pub(crate) fn find_crossings(
    field: &dyn Homomorphism,
    mesh: &Mesh,
    th: &Thresholds,
) -> Result<Crossings> {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut segs: Vec<(usize, usize, ChartPoint, ChartPoint)> = Vec::new();
    let mut links = Vec::new();
    for t in &mesh.triangles {
        let mut found = [usize::MAX; 2];
        let mut n = 0;
        for k in 0..3 {
            let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
            if mesh.sign(a) == mesh.sign(b) {
                continue;
            }
            let (plus, minus, pp, pm) = if mesh.sign(a) {
                (a, b, t.p[k], t.p[(k + 1) % 3])
            } else {
                (b, a, t.p[(k + 1) % 3], t.p[k])
            };
            let id = *ids.entry((plus, minus)).or_insert_with(|| {
                segs.push((plus, minus, pp, pm));
                segs.len() - 1
            });
            found[n] = id;
            n += 1;
        }
        if n == 2 {
            links.push(found);
        }
    }
    let edges = segs
        .par_iter()
        .map(|&(plus, minus, pp, pm)| {
            let p = edge_zero(field, pp, pm, mesh.values[plus], mesh.values[minus], th)?;
            let p = mesh.domain.canonical(p);
            let g = field.density(p, 1)?.gradient();
            if g[0].hypot(g[1]) <= 1e-6 * th.lambda_scale / th.length {
                return Err(Error::NotMorin(format!("dλ vanishes on the singular set at {p}")));
            }
            Ok(Crossing { plus, minus, point: p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Crossings { edges, links })
}

/// Chains crossings into curves (open arcs first, then closed loops) and attaches
/// the oriented `λ̇` values.
pub(crate) fn chain_curves(
    field: &dyn Homomorphism,
    mesh: &Mesh,
    crossings: &Crossings,
) -> Result<Vec<SingularCurve>> {
    let ne = crossings.edges.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for (li, l) in crossings.links.iter().enumerate() {
        adj[l[0]].push(li);
        adj[l[1]].push(li);
    }
    let mut used_edge = vec![false; ne];
    let mut used_link = vec![false; crossings.links.len()];
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    let starts: Vec<usize> = (0..ne)
        .filter(|&e| adj[e].len() < 2)
        .chain((0..ne).filter(|&e| adj[e].len() >= 2))
        .collect();
    for start in starts {
        if used_edge[start] {
            continue;
        }
        let mut chain = vec![start];
        used_edge[start] = true;
        let mut cur = start;
        let mut closed = false;
        loop {
            let next_link = adj[cur].iter().copied().find(|&l| !used_link[l]);
            let Some(l) = next_link else { break };
            used_link[l] = true;
            let l = crossings.links[l];
            let nxt = if l[0] == cur { l[1] } else { l[0] };
            if nxt == start {
                closed = true;
                break;
            }
            if used_edge[nxt] {
                break;
            }
            used_edge[nxt] = true;
            chain.push(nxt);
            cur = nxt;
        }
        if mesh.domain.is_closed() && !closed {
            return Err(Error::ResolutionTooCoarse(
                "singular curve does not close on a closed surface".into(),
            ));
        }
        chains.push((chain, closed));
    }

    chains
        .into_iter()
        .enumerate()
        .map(|(id, (chain, closed))| {
            let points: Vec<ChartPoint> = chain.iter().map(|&e| crossings.edges[e].point).collect();
            build_curve(field, mesh, id, points, closed, &chain, crossings)
        })
        .collect()
}

fn build_curve(
    field: &dyn Homomorphism,
    mesh: &Mesh,
    id: usize,
    points: Vec<ChartPoint>,
    closed: bool,
    chain: &[usize],
    crossings: &Crossings,
) -> Result<SingularCurve> {
    // canonical null direction and λ̇ at each vertex, then orientation propagation
    let raw: Vec<([f64; 2], f64, usize)> = points
        .par_iter()
        .map(|&p| {
            let nf = match null_field(field, p, 0, NullChoice::default(), None) {
                Ok(nf) => nf,
                Err(Error::ZeroAdjugate(q)) => {
                    return Err(Error::NotMorin(format!("corank two point near {q}")))
                }
                Err(e) => return Err(e),
            };
            let g = field.density(p, 1)?.gradient();
            let eta = [nf.eta[0].value(), nf.eta[1].value()];
            Ok((eta, g[0] * eta[0] + g[1] * eta[1], nf.column))
        })
        .collect::<Result<_>>()?;
    let mut signs = vec![1.0; raw.len()];
    for k in 1..raw.len() {
        let (a, b) = (raw[k - 1].0, raw[k].0);
        let d = a[0] * b[0] + a[1] * b[1];
        signs[k] = if d * signs[k - 1] >= 0.0 { 1.0 } else { -1.0 };
    }
    let flip_on_closing = closed && raw.len() > 1 && {
        let (a, b) = (raw[raw.len() - 1].0, raw[0].0);
        (a[0] * b[0] + a[1] * b[1]) * signs[raw.len() - 1] < 0.0
    };
    let eta: Vec<[f64; 2]> = raw
        .iter()
        .zip(&signs)
        .map(|(r, s)| [r.0[0] * s, r.0[1] * s])
        .collect();
    let lambda_dot: Vec<f64> = raw.iter().zip(&signs).map(|(r, s)| r.1 * s).collect();
    let eta_column = raw.iter().map(|r| r.2).collect();

    let mut wind = (0.0, 0.0);
    let n = points.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    for k in 0..segs {
        let (du, dv) = mesh.domain.displacement(points[k], points[(k + 1) % n]);
        wind.0 += du;
        wind.1 += dv;
    }
    let homology = if closed && mesh.domain.periodic_v() {
        [(wind.0 / TAU).round() as i32, (wind.1 / TAU).round() as i32]
    } else {
        [0, 0]
    };
    let first = crossings.edges[chain[0]];
    Ok(SingularCurve {
        id,
        points,
        lambda_dot,
        eta,
        eta_column,
        closed,
        eta_flips_on_closing: flip_on_closing,
        homology,
        plus_region: None,
        minus_region: None,
        plus_vertex: first.plus,
        minus_vertex: first.minus,
    })
}
