//! Signed region complex: full subcomplexes of the sampled triangulation on the
//! positive and negative vertices.

use std::collections::HashMap;
use std::f64::consts::TAU;

use super::mesh::Mesh;
use super::{Region, RegionComplex, SingularCurve};
use crate::error::{Error, Result};
use crate::morin::Sign;
use crate::surfaces::SurfaceDomain;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Sheet index of a lifted chart coordinate relative to its canonical value.
fn sheet(lifted: f64, canonical: f64) -> i64 {
    ((lifted - canonical) / TAU).round() as i64
}

pub(crate) fn region_complex(mesh: &Mesh, curves: &mut [SingularCurve]) -> Result<RegionComplex> {
    let nv = mesh.vertex_count();
    // unique edges with the torus deck shift between their endpoints
    let mut edges: HashMap<(usize, usize), (i64, i64)> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
            let (pa, pb) = (t.p[k], t.p[(k + 1) % 3]);
            let (ca, cb) = (mesh.positions[a], mesh.positions[b]);
            let sa = (sheet(pa.u, ca.u), sheet(pa.v, ca.v));
            let sb = (sheet(pb.u, cb.u), sheet(pb.v, cb.v));
            let (key, shift) = if a < b {
                ((a, b), (sb.0 - sa.0, sb.1 - sa.1))
            } else {
                ((b, a), (sa.0 - sb.0, sa.1 - sb.1))
            };
            edges.entry(key).or_insert(shift);
        }
    }
    let mut uf = UnionFind::new(nv);
    for &(a, b) in edges.keys() {
        if mesh.sign(a) == mesh.sign(b) {
            uf.union(a, b);
        }
    }
    let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
    let mut comp = vec![0usize; nv];
    let mut regions: Vec<Region> = Vec::new();
    for (v, c) in comp.iter_mut().enumerate() {
        let r = uf.find(v);
        let id = *comp_of_root.entry(r).or_insert_with(|| {
            regions.push(Region {
                id: regions.len(),
                sign: if mesh.sign(v) { Sign::Plus } else { Sign::Minus },
                vertices: 0,
                edges: 0,
                faces: 0,
                boundary_loops: 0,
                euler_char: 0,
                genus: 0,
                wraps: false,
            });
            regions.len() - 1
        });
        *c = id;
        regions[id].vertices += 1;
    }
    let mut region_adj: Vec<Vec<(usize, (i64, i64))>> = vec![Vec::new(); nv];
    for (&(a, b), &s) in &edges {
        if mesh.sign(a) == mesh.sign(b) {
            regions[comp[a]].edges += 1;
            region_adj[a].push((b, s));
            region_adj[b].push((a, (-s.0, -s.1)));
        }
    }
    for t in &mesh.triangles {
        let s = mesh.sign(t.v[0]);
        if mesh.sign(t.v[1]) == s && mesh.sign(t.v[2]) == s {
            regions[comp[t.v[0]]].faces += 1;
        }
    }
    for c in curves.iter_mut() {
        let (p, m) = (comp[c.plus_vertex], comp[c.minus_vertex]);
        c.plus_region = Some(p);
        c.minus_region = Some(m);
        regions[p].boundary_loops += 1;
        regions[m].boundary_loops += 1;
    }

    // rank of the image of H1(region) in H1(T²), from deck shifts met during a BFS
    if matches!(mesh.domain, SurfaceDomain::Torus) {
        let mut lift: Vec<Option<(i64, i64)>> = vec![None; nv];
        let mut periods: Vec<Vec<(i64, i64)>> = vec![Vec::new(); regions.len()];
        for start in 0..nv {
            if lift[start].is_some() {
                continue;
            }
            lift[start] = Some((0, 0));
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                let la = lift[a].unwrap();
                for &(b, s) in &region_adj[a] {
                    let want = (la.0 + s.0, la.1 + s.1);
                    match lift[b] {
                        None => {
                            lift[b] = Some(want);
                            stack.push(b);
                        }
                        Some(lb) if lb != want => {
                            periods[comp[a]].push((want.0 - lb.0, want.1 - lb.1));
                        }
                        _ => {}
                    }
                }
            }
        }
        for (r, per) in regions.iter_mut().zip(&periods) {
            r.wraps = !per.is_empty();
            let rank2 = per.iter().any(|p| per.iter().any(|q| p.0 * q.1 - p.1 * q.0 != 0));
            r.genus = if rank2 { 1 } else { 0 };
        }
    }

    let mut chi_plus = 0;
    let mut chi_minus = 0;
    for r in regions.iter_mut() {
        r.euler_char = r.vertices as i64 - r.edges as i64 + r.faces as i64;
        match r.sign {
            Sign::Plus => chi_plus += r.euler_char,
            Sign::Minus => chi_minus += r.euler_char,
        }
        if mesh.domain.is_closed() {
            let expected = 2 - 2 * r.genus as i64 - r.boundary_loops as i64;
            if r.euler_char != expected {
                return Err(Error::EulerMismatch(format!(
                    "region {} ({:?}): V−E+F = {} but 2−2g−b = {} (g = {}, b = {})",
                    r.id, r.sign, r.euler_char, expected, r.genus, r.boundary_loops
                )));
            }
        }
    }
    let chi_total = nv as i64 - edges.len() as i64 + mesh.triangles.len() as i64;
    Ok(RegionComplex {
        grid: [mesh.cells.0, mesh.cells.1],
        vertex_count: nv,
        regions,
        chi_plus,
        chi_minus,
        chi_total,
        vertex_signs: mesh.values.iter().map(|x| *x > 0.0).collect(),
    })
}
