//! Sampled triangulation of the chart: grid vertices, one center vertex per cell
//! (four triangles per cell), and on the sphere two pole vertices fanned to the
//! boundary rings of the strata range.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morin::Homomorphism;
use crate::surfaces::SurfaceDomain;
use crate::ChartPoint;

/// Fractional offsets of the grid in periodic directions, chosen to keep symmetric
/// lines of the catalog surfaces off the vertex rows.
const OFFSET_U: f64 = 0.381_966_011_250_105;
const OFFSET_V: f64 = 0.276_393_202_250_021;

const SHIFTS: [f64; 3] = [0.125, 0.0625, 0.031_25];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tri {
    pub v: [usize; 3],
    /// Vertex positions lifted to a common sheet of the chart.
    pub p: [ChartPoint; 3],
}

#[derive(Clone, Debug)]
pub(crate) struct Mesh {
    pub domain: SurfaceDomain,
    pub cells: (usize, usize),
    /// Canonical vertex positions (after any zero-avoiding shift).
    pub positions: Vec<ChartPoint>,
    pub values: Vec<f64>,
    pub triangles: Vec<Tri>,
    pub lambda_scale: f64,
}

struct Layout {
    domain: SurfaceDomain,
    nu: usize,
    nv: usize,
    cols: usize,
    rows: usize,
    u0: f64,
    v0: f64,
    hu: f64,
    hv: f64,
    du: f64,
    dv: f64,
}

impl Layout {
    fn new(domain: SurfaceDomain, n: usize) -> Self {
        let (u0, u1) = domain.u_range();
        let (v0, v1) = domain.strata_v_range();
        let (nu, nv) = match domain {
            SurfaceDomain::SphereChart { .. } => (n, (n / 2).max(3) | 1),
            _ => (n, n),
        };
        let (cols, rows) = match domain {
            SurfaceDomain::Torus => (nu, nv),
            SurfaceDomain::SphereChart { .. } => (nu, nv + 1),
            SurfaceDomain::Patch { .. } => (nu + 1, nv + 1),
        };
        Layout {
            domain,
            nu,
            nv,
            cols,
            rows,
            u0,
            v0,
            hu: (u1 - u0) / nu as f64,
            hv: (v1 - v0) / nv as f64,
            du: if domain.periodic_u() { OFFSET_U } else { 0.0 },
            dv: if domain.periodic_v() { OFFSET_V } else { 0.0 },
        }
    }

    /// Unreduced position of grid coordinate `(x, y)` (fractional allowed).
    fn pos(&self, x: f64, y: f64) -> ChartPoint {
        ChartPoint::new(
            self.u0 + (x + self.du) * self.hu,
            self.v0 + (y + self.dv) * self.hv,
        )
    }

    fn grid_index(&self, i: usize, j: usize) -> usize {
        let i = if self.domain.periodic_u() { i % self.cols } else { i };
        let j = if self.domain.periodic_v() { j % self.rows } else { j };
        i + j * self.cols
    }

    fn center_index(&self, i: usize, j: usize) -> usize {
        self.cols * self.rows + i + j * self.nu
    }

    fn vertex_count(&self) -> usize {
        let poles = if matches!(self.domain, SurfaceDomain::SphereChart { .. }) { 2 } else { 0 };
        self.cols * self.rows + self.nu * self.nv + poles
    }
}

fn sample(field: &dyn Homomorphism, p: ChartPoint) -> Result<f64> {
    Ok(field.density_sample(p)?.lambda)
}

impl Mesh {
    pub fn build(field: &dyn Homomorphism, n: usize, th_rel: f64) -> Result<Mesh> {
        if n < 4 {
            return Err(Error::InvalidArgument(format!("grid {n} is below the minimum of 4")));
        }
        let domain = field.domain();
        let lay = Layout::new(domain, n);
        let total = lay.vertex_count();
        let mut positions = vec![ChartPoint::new(0.0, 0.0); total];
        // lifted (unreduced) positions of grid vertices and centers
        let mut lifted = vec![ChartPoint::new(0.0, 0.0); total];
        for j in 0..lay.rows {
            for i in 0..lay.cols {
                let p = lay.pos(i as f64, j as f64);
                let k = lay.grid_index(i, j);
                lifted[k] = p;
                positions[k] = domain.canonical(p);
            }
        }
        for j in 0..lay.nv {
            for i in 0..lay.nu {
                let p = lay.pos(i as f64 + 0.5, j as f64 + 0.5);
                let k = lay.center_index(i, j);
                lifted[k] = p;
                positions[k] = domain.canonical(p);
            }
        }
        let poles = if matches!(domain, SurfaceDomain::SphereChart { .. }) {
            let s = total - 2;
            positions[s] = ChartPoint::new(0.0, -FRAC_PI_2);
            positions[s + 1] = ChartPoint::new(0.0, FRAC_PI_2);
            lifted[s] = positions[s];
            lifted[s + 1] = positions[s + 1];
            Some((s, s + 1))
        } else {
            None
        };
        let nonpole = poles.map_or(total, |(s, _)| s);
        let mut values: Vec<f64> = positions[..nonpole]
            .par_iter()
            .map(|&p| sample(field, p))
            .collect::<Result<_>>()?;
        let lambda_scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !lambda_scale.is_finite() {
            return Err(Error::NotMorin("density is not finite on the grid".into()));
        }
        let reference = positions[..nonpole]
            .iter()
            .step_by((nonpole / 997).max(1))
            .map(|&p| field.density_sample(p).map(|s| s.scale))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        if lambda_scale <= 1e-12 * reference.max(f64::MIN_POSITIVE) {
            return Err(Error::NotMorin("density vanishes identically".into()));
        }
        let eps = th_rel * lambda_scale;

        // shift vertices sitting on the zero set
        let (hu, hv) = (lay.hu, lay.hv);
        let fixes: Vec<(usize, ChartPoint, f64)> = (0..nonpole)
            .into_par_iter()
            .filter(|&k| values[k].abs() <= eps)
            .map(|k| {
                for s in SHIFTS {
                    let q = positions[k].offset(s * hu, s * 0.618_033_988_75 * hv);
                    let x = sample(field, q)?;
                    if x.abs() > eps {
                        return Ok((k, q, x));
                    }
                }
                Err(Error::ResolutionTooCoarse(format!(
                    "density stays zero near vertex {}",
                    positions[k]
                )))
            })
            .collect::<Result<_>>()?;
        for (k, q, x) in fixes {
            let (du, dv) = (q.u - positions[k].u, q.v - positions[k].v);
            lifted[k] = lifted[k].offset(du, dv);
            positions[k] = domain.canonical(q);
            values[k] = x;
        }

        let mut mesh = Mesh {
            domain,
            cells: (lay.nu, lay.nv),
            positions,
            values,
            triangles: Vec::with_capacity(4 * lay.nu * lay.nv + 2 * lay.nu),
            lambda_scale,
        };
        if poles.is_some() {
            let (south, north) = cap_signs(field, &lay, eps)?;
            mesh.values.push(south);
            mesh.values.push(north);
            check_ring(&mesh, &lay, 0, south)?;
            check_ring(&mesh, &lay, lay.nv, north)?;
        }
        mesh.resolve_ambiguous(field, &lay, &mut lifted, eps)?;

        for j in 0..lay.nv {
            for i in 0..lay.nu {
                let corners = [
                    (lay.grid_index(i, j), lay.pos(i as f64, j as f64)),
                    (lay.grid_index(i + 1, j), lay.pos(i as f64 + 1.0, j as f64)),
                    (lay.grid_index(i + 1, j + 1), lay.pos(i as f64 + 1.0, j as f64 + 1.0)),
                    (lay.grid_index(i, j + 1), lay.pos(i as f64, j as f64 + 1.0)),
                ];
                let ci = lay.center_index(i, j);
                let cp = lifted[ci];
                for k in 0..4 {
                    let (a, pa) = corners[k];
                    let (b, pb) = corners[(k + 1) % 4];
                    mesh.triangles.push(Tri {
                        v: [a, b, ci],
                        p: [
                            lift_vertex(&lifted, a, pa),
                            lift_vertex(&lifted, b, pb),
                            cp,
                        ],
                    });
                }
            }
        }
        if let Some((s, npole)) = poles {
            for i in 0..lay.nu {
                let (a, b) = (lay.grid_index(i, 0), lay.grid_index(i + 1, 0));
                let pa = lift_vertex(&lifted, a, lay.pos(i as f64, 0.0));
                let pb = lift_vertex(&lifted, b, lay.pos(i as f64 + 1.0, 0.0));
                mesh.triangles.push(Tri {
                    v: [b, a, s],
                    p: [pb, pa, ChartPoint::new(pa.u, -FRAC_PI_2)],
                });
                let top = lay.nv;
                let (a, b) = (lay.grid_index(i, top), lay.grid_index(i + 1, top));
                let pa = lift_vertex(&lifted, a, lay.pos(i as f64, top as f64));
                let pb =
                    lift_vertex(&lifted, b, lay.pos(i as f64 + 1.0, top as f64));
                mesh.triangles.push(Tri {
                    v: [a, b, npole],
                    p: [pa, pb, ChartPoint::new(pa.u, FRAC_PI_2)],
                });
            }
        }
        mesh.check_thin_features(field, eps)?;
        Ok(mesh)
    }

    fn mixed(&self, t: &Tri) -> bool {
        let s = self.sign(t.v[0]);
        self.sign(t.v[1]) != s || self.sign(t.v[2]) != s
    }

    /// Samples the edges around the singular set at three dyadic levels; an edge whose
    /// samples change sign more often than its endpoints do hides a thin region.
    fn check_thin_features(&self, field: &dyn Homomorphism, eps: f64) -> Result<()> {
        let mut near = vec![false; self.vertex_count()];
        for t in self.triangles.iter().filter(|t| self.mixed(t)) {
            for &v in &t.v {
                near[v] = true;
            }
        }
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for t in &self.triangles {
            if !t.v.iter().any(|&v| near[v]) {
                continue;
            }
            for k in 0..3 {
                let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                if seen.insert((a.min(b), a.max(b))) {
                    edges.push((a, b, t.p[k], t.p[(k + 1) % 3]));
                }
            }
        }
        const S: [f64; 7] = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875];
        edges.par_iter().try_for_each(|&(a, b, pa, pb)| {
            if pa.v.abs() >= FRAC_PI_2 || pb.v.abs() >= FRAC_PI_2 {
                return Ok(());
            }
            let mut last = self.sign(a);
            let mut changes = 0;
            for s in S {
                let q = ChartPoint::new(pa.u + (pb.u - pa.u) * s, pa.v + (pb.v - pa.v) * s);
                let x = sample(field, q)?;
                if x.abs() <= eps {
                    continue;
                }
                if (x > 0.0) != last {
                    changes += 1;
                    last = x > 0.0;
                }
            }
            if last != self.sign(b) {
                changes += 1;
            }
            if changes > 1 {
                return Err(Error::ResolutionTooCoarse(format!(
                    "the singular set crosses the edge {pa}–{pb} {changes} times"
                )));
            }
            Ok(())
        })
    }

    pub fn sign(&self, k: usize) -> bool {
        self.values[k] > 0.0
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    /// Cells whose corners alternate in sign are checked against a finer sub-lattice;
    /// the center vertex is moved when it resolves the saddle the wrong way.
    fn resolve_ambiguous(
        &mut self,
        field: &dyn Homomorphism,
        lay: &Layout,
        lifted: &mut [ChartPoint],
        eps: f64,
    ) -> Result<()> {
        let mut ambiguous = Vec::new();
        for j in 0..lay.nv {
            for i in 0..lay.nu {
                let s = [
                    self.sign(lay.grid_index(i, j)),
                    self.sign(lay.grid_index(i + 1, j)),
                    self.sign(lay.grid_index(i + 1, j + 1)),
                    self.sign(lay.grid_index(i, j + 1)),
                ];
                if s[0] == s[2] && s[1] == s[3] && s[0] != s[1] {
                    ambiguous.push((i, j, s[0]));
                }
            }
        }
        let moves: Vec<(usize, ChartPoint, f64)> = ambiguous
            .par_iter()
            .map(|&(i, j, s0)| {
                let center_sign = self.sign(lay.center_index(i, j));
                resolve_cell(field, lay, i, j, s0, center_sign, eps)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for (k, p, x) in moves {
            lifted[k] = p;
            self.positions[k] = self.domain.canonical(p);
            self.values[k] = x;
        }
        Ok(())
    }
}

/// Lifted position of vertex `k` on the sheet of its nominal grid position.
fn lift_vertex(lifted: &[ChartPoint], k: usize, nominal: ChartPoint) -> ChartPoint {
    let base = lifted[k];
    let du = nominal.u - base.u;
    let dv = nominal.v - base.v;
    let wrap = |d: f64| TAU * (d / TAU).round();
    ChartPoint::new(base.u + wrap(du), base.v + wrap(dv))
}

/// Connectivity of the diagonal corner pairs of an alternating cell on a sub-lattice.
fn resolve_cell(
    field: &dyn Homomorphism,
    lay: &Layout,
    i: usize,
    j: usize,
    s0: bool,
    center_sign: bool,
    eps: f64,
) -> Result<Option<(usize, ChartPoint, f64)>> {
    let ci = lay.center_index(i, j);
    for level in 1..=3 {
        let m = (1usize << level) + 1;
        let mut vals = vec![0.0; m * m];
        for b in 0..m {
            for a in 0..m {
                let x = i as f64 + a as f64 / (m - 1) as f64;
                let y = j as f64 + b as f64 / (m - 1) as f64;
                vals[a + b * m] = sample(field, lay.pos(x, y))?;
            }
        }
        // corner (0,0) and (m-1,m-1) carry sign s0; the other diagonal carries !s0
        let diag0 = lattice_connected(&vals, m, (0, 0), (m - 1, m - 1), s0);
        let diag1 = lattice_connected(&vals, m, (m - 1, 0), (0, m - 1), !s0);
        let decided = match (diag0, diag1) {
            (true, false) => Some(s0),
            (false, true) => Some(!s0),
            _ => None,
        };
        if let Some(d) = decided {
            if d == center_sign {
                return Ok(None);
            }
            // nearest sub-lattice point with the deciding sign and a usable value
            let mut best: Option<(f64, ChartPoint, f64)> = None;
            for b in 1..m - 1 {
                for a in 1..m - 1 {
                    let x = vals[a + b * m];
                    if (x > 0.0) == d && x.abs() > eps {
                        let fa = a as f64 / (m - 1) as f64 - 0.5;
                        let fb = b as f64 / (m - 1) as f64 - 0.5;
                        let dist = fa.hypot(fb);
                        if best.is_none_or(|(bd, _, _)| dist < bd) {
                            let p = lay.pos(i as f64 + 0.5 + fa, j as f64 + 0.5 + fb);
                            best = Some((dist, p, x));
                        }
                    }
                }
            }
            if let Some((_, p, x)) = best {
                return Ok(Some((ci, p, x)));
            }
        }
    }
    Err(Error::ResolutionTooCoarse(format!(
        "saddle cell at {} stays ambiguous after 3 subdivisions",
        lay.pos(i as f64 + 0.5, j as f64 + 0.5)
    )))
}

fn lattice_connected(vals: &[f64], m: usize, from: (usize, usize), to: (usize, usize), sign: bool) -> bool {
    let ok = |a: usize, b: usize| (vals[a + b * m] > 0.0) == sign;
    if !ok(from.0, from.1) || !ok(to.0, to.1) {
        return false;
    }
    let mut seen = vec![false; m * m];
    let mut stack = vec![from];
    seen[from.0 + from.1 * m] = true;
    while let Some((a, b)) = stack.pop() {
        if (a, b) == to {
            return true;
        }
        let mut push = |x: usize, y: usize| {
            if ok(x, y) && !seen[x + y * m] {
                seen[x + y * m] = true;
                stack.push((x, y));
            }
        };
        if a > 0 {
            push(a - 1, b);
        }
        if a + 1 < m {
            push(a + 1, b);
        }
        if b > 0 {
            push(a, b - 1);
        }
        if b + 1 < m {
            push(a, b + 1);
        }
    }
    false
}

/// Sign of the density on each pole cap; errors when the cap is not of one sign.
fn cap_signs(field: &dyn Homomorphism, lay: &Layout, eps: f64) -> Result<(f64, f64)> {
    let (v0, v1) = lay.domain.strata_v_range();
    let rings = 6;
    let mut out = [0.0; 2];
    for (side, (edge, pole)) in [(v0, -FRAC_PI_2), (v1, FRAC_PI_2)].into_iter().enumerate() {
        let pts: Vec<ChartPoint> = (0..rings)
            .flat_map(|r| {
                let t = r as f64 / rings as f64;
                let v = edge + (pole - edge) * t * 0.98;
                (0..lay.nu).map(move |i| ChartPoint::new(lay.u0 + (i as f64 + 0.5) * lay.hu, v))
            })
            .collect();
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&p| sample(field, p))
            .collect::<Result<_>>()?;
        let s = vals[0].signum();
        for (p, x) in pts.iter().zip(&vals) {
            if x.abs() <= eps * (p.v.cos() / edge.cos()).min(1.0) || x.signum() != s {
                return Err(Error::PoleProximity(*p));
            }
        }
        out[side] = s;
    }
    Ok((out[0], out[1]))
}

fn check_ring(mesh: &Mesh, lay: &Layout, row: usize, sign: f64) -> Result<()> {
    for i in 0..lay.cols {
        let k = lay.grid_index(i, row);
        if mesh.values[k].signum() != sign {
            return Err(Error::PoleProximity(mesh.positions[k]));
        }
    }
    Ok(())
}
