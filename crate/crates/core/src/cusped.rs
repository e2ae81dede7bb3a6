//! Combinatorial horoballs, cusped spaces over Cayley balls, and Gromov
//! delta estimation by the four-point condition.
//!
//! A horoball over a finite base graph `T` with depth `D` has vertices
//! `V(T) x {0..D}`, vertical edges between consecutive depths, and a
//! horizontal edge at depth `n` whenever the base distance is at most
//! `2^n`. A cusped space glues one horoball per peripheral coset onto a
//! Cayley ball along depth zero.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::groupcore::{BackendSpec, FreeWord, GroupElement, GroupError};

#[derive(Debug, Error)]
pub enum CuspError {
    #[error("base graph is disconnected")]
    DisconnectedBase,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("peripheral generator must be nontrivial")]
    TrivialPeripheral,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finite graph with optional frontier marks. Frontier vertices are
/// truncation artifacts (ball boundary, maximal depth); quadruples near
/// them are excluded from certified delta estimation.
#[derive(Clone, Debug, Default)]
pub struct MetricGraph {
    pub adj: Vec<Vec<u32>>,
    pub frontier: Vec<bool>,
    pub labels: Vec<String>,
}

impl MetricGraph {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        MetricGraph {
            adj,
            frontier: vec![false; n],
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn bfs(&self, start: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut q = VecDeque::new();
        dist[start as usize] = 0;
        q.push_back(start);
        while let Some(u) = q.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    q.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    /// All-pairs distances as a flat row-major `u16` matrix.
    pub fn distance_matrix(&self) -> Result<Vec<u16>, CuspError> {
        let n = self.adj.len();
        let mut out = vec![0u16; n * n];
        let rows: Vec<Vec<u32>> = (0..n as u32)
            .into_par_iter()
            .map(|s| self.bfs(s))
            .collect();
        for (s, row) in rows.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                if d == u32::MAX {
                    return Err(CuspError::Disconnected);
                }
                out[s * n + t] = d.min(u16::MAX as u32) as u16;
            }
        }
        Ok(out)
    }

    /// Vertices within graph distance `margin` of a frontier vertex.
    pub fn guard_mask(&self, margin: u32) -> Vec<bool> {
        let n = self.adj.len();
        let mut dist = vec![u32::MAX; n];
        let mut q = VecDeque::new();
        for i in 0..n {
            if self.frontier[i] {
                dist[i] = 0;
                q.push_back(i as u32);
            }
        }
        while let Some(u) = q.pop_front() {
            let du = dist[u as usize];
            if du >= margin {
                continue;
            }
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    q.push_back(v);
                }
            }
        }
        dist.iter().map(|&d| d != u32::MAX).collect()
    }

    /// Edge-list text export with one `vertex` line per vertex (index,
    /// frontier flag, label) and one `edge` line per unordered edge.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for i in 0..self.adj.len() {
            out.push_str(&format!(
                "vertex {} frontier={} label={}\n",
                i, self.frontier[i] as u8, self.labels[i]
            ));
        }
        for i in 0..self.adj.len() {
            for &j in &self.adj[i] {
                if (i as u32) < j {
                    out.push_str(&format!("edge {} {}\n", i, j));
                }
            }
        }
        out
    }
}

/// A combinatorial horoball over a finite connected base graph.
pub struct HoroballGraph {
    pub graph: MetricGraph,
    pub base_size: usize,
    pub depth: u32,
}

impl HoroballGraph {
    /// Vertex index of `(t, n)` for base vertex `t` at depth `n`.
    pub fn vertex(&self, t: usize, n: u32) -> u32 {
        (n as usize * self.base_size + t) as u32
    }
}

/// Builds the horoball: vertices `V(T) x {0..depth}`, vertical edges, and
/// horizontal edges at depth `n` between base vertices at distance at most
/// `2^n` (base distances computed inside `T`).
pub fn build_horoball(base: &MetricGraph, depth: u32) -> Result<HoroballGraph, CuspError> {
    if !base.is_connected() {
        return Err(CuspError::DisconnectedBase);
    }
    let nb = base.vertex_count();
    let total = nb * (depth as usize + 1);
    let mut g = MetricGraph {
        adj: vec![Vec::new(); total],
        frontier: vec![false; total],
        labels: vec![String::new(); total],
    };
    let at = |t: usize, n: u32| (n as usize * nb + t) as u32;
    for t in 0..nb {
        for n in 0..=depth {
            g.labels[at(t, n) as usize] = format!("({},{})", base.labels[t], n);
        }
    }
    // vertical edges
    for t in 0..nb {
        for n in 0..depth {
            let a = at(t, n);
            let b = at(t, n + 1);
            g.adj[a as usize].push(b);
            g.adj[b as usize].push(a);
        }
    }
    // horizontal edges: depth n joins base vertices with d_T <= 2^n
    let base_dist: Vec<Vec<u32>> = (0..nb as u32).map(|s| base.bfs(s)).collect();
    for n in 0..=depth {
        let reach = 1u64 << n.min(62);
        for t1 in 0..nb {
            for t2 in t1 + 1..nb {
                if u64::from(base_dist[t1][t2]) <= reach {
                    let a = at(t1, n);
                    let b = at(t2, n);
                    g.adj[a as usize].push(b);
                    g.adj[b as usize].push(a);
                }
            }
        }
    }
    // deepest layer is the truncation frontier
    for t in 0..nb {
        g.frontier[at(t, depth) as usize] = true;
    }
    Ok(HoroballGraph {
        graph: g,
        base_size: nb,
        depth,
    })
}

/// The Cayley ball of a backend as a metric graph; vertices at distance
/// exactly `radius` from the identity are marked as frontier.
pub fn cayley_ball_graph(
    backend: &BackendSpec,
    radius: u32,
    budget: usize,
) -> Result<(MetricGraph, Vec<GroupElement>), CuspError> {
    let elements = backend.ball(radius, budget)?;
    let index: HashMap<&GroupElement, u32> = elements
        .iter()
        .enumerate()
        .map(|(i, g)| (g, i as u32))
        .collect();
    let mut g = MetricGraph {
        adj: vec![Vec::new(); elements.len()],
        frontier: vec![false; elements.len()],
        labels: elements.iter().map(|e| backend.render(e)).collect(),
    };
    let gens = backend.generators();
    for (i, el) in elements.iter().enumerate() {
        g.frontier[i] = backend.word_length(el) == radius as u64;
        for s in &gens {
            let n = backend.multiply(el, s)?;
            if let Some(&j) = index.get(&n) {
                if (i as u32) < j {
                    g.adj[i].push(j);
                    g.adj[j as usize].push(i as u32);
                }
            }
        }
    }
    Ok((g, elements))
}

/// A cusped space: a Cayley ball with one horoball glued along each
/// peripheral coset that meets the ball.
pub struct CuspedGraph {
    pub graph: MetricGraph,
    pub cayley_size: usize,
    pub coset_count: usize,
    pub radius: u32,
    pub depth: u32,
}

/// Builds the cusped space of a free-group backend over the cyclic
/// peripheral subgroup generated by `u`. Each coset `g<u>` meeting the
/// radius ball contributes depth layers over its intersection with the
/// ball, glued along depth zero; horizontal reach is measured inside the
/// coset's full subgraph.
pub fn build_cusped(
    backend: &BackendSpec,
    u: &FreeWord,
    radius: u32,
    depth: u32,
    budget: usize,
) -> Result<CuspedGraph, CuspError> {
    if u.is_identity() {
        return Err(CuspError::TrivialPeripheral);
    }
    let (mut g, elements) = cayley_ball_graph(backend, radius, budget)?;
    // group ball elements into peripheral cosets
    let mut cosets: Vec<(FreeWord, Vec<u32>)> = Vec::new();
    let mut coset_index: HashMap<FreeWord, usize> = HashMap::new();
    for (i, el) in elements.iter().enumerate() {
        let w = match el {
            GroupElement::Free(w) => w,
            _ => continue,
        };
        let rep = crate::quotient::line_rep(w, u);
        let idx = match coset_index.get(&rep) {
            Some(&idx) => idx,
            None => {
                let idx = cosets.len();
                cosets.push((rep.clone(), Vec::new()));
                coset_index.insert(rep, idx);
                idx
            }
        };
        cosets[idx].1.push(i as u32);
    }
    // sort members of each coset along the line so base distances are
    // computed inside the coset subgraph (a segment of the line)
    for (rep, members) in &mut cosets {
        let mut keyed: Vec<(i64, u32)> = members
            .iter()
            .map(|&i| {
                let GroupElement::Free(w) = &elements[i as usize] else {
                    unreachable!()
                };
                let k = rep.inverse().concat(w).power_of(u).expect("coset member");
                (k, i)
            })
            .collect();
        keyed.sort_unstable();
        *members = keyed.into_iter().map(|(_, i)| i).collect();
    }
    let core_len = {
        let (_, core) = u.cyclic_decompose();
        core.len().max(1) as u64
    };
    // attach depth layers per coset
    for (_, members) in &cosets {
        let m = members.len();
        let mut layer_prev: Vec<u32> = members.clone();
        for n in 1..=depth {
            let mut layer: Vec<u32> = Vec::with_capacity(m);
            for t in 0..m {
                let id = g.adj.len() as u32;
                g.adj.push(Vec::new());
                g.frontier.push(n == depth);
                g.labels
                    .push(format!("({},{})", g.labels[members[t] as usize], n));
                layer.push(id);
                // vertical edge
                let below = layer_prev[t];
                g.adj[id as usize].push(below);
                g.adj[below as usize].push(id);
            }
            // horizontal edges at depth n: consecutive powers are at base
            // distance |step| * core_len
            let reach = 1u64 << n.min(62);
            for t1 in 0..m {
                for t2 in t1 + 1..m {
                    let d_base = (t2 - t1) as u64 * core_len;
                    if d_base <= reach {
                        let a = layer[t1];
                        let b = layer[t2];
                        g.adj[a as usize].push(b);
                        g.adj[b as usize].push(a);
                    }
                }
            }
            layer_prev = layer;
        }
        // depth-zero horizontal edges beyond the Cayley edges: base vertices
        // at distance 1 inside the coset line are already adjacent in the
        // Cayley graph when the generator is a single letter; for longer
        // roots the depth-zero subgraph is the full coset subgraph, which
        // has no extra edges either. Nothing to add.
    }
    Ok(CuspedGraph {
        graph: g,
        cayley_size: elements.len(),
        coset_count: cosets.len(),
        radius,
        depth,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMethod {
    FourPoint,
    /// Quadruples through a fixed basepoint, computed by a max-min matrix
    /// pass over the Gromov products (cubic cost).
    Basepoint(u32),
}

#[derive(Clone, Debug)]
pub struct DeltaEstimate {
    /// Twice the delta value (graph metrics make 2*delta an integer).
    pub twice_value: u32,
    pub method: DeltaMethod,
    pub certified_vertices: usize,
    pub certified_quadruples: u128,
    pub guard_margin: u32,
}

impl DeltaEstimate {
    pub fn value(&self) -> f64 {
        self.twice_value as f64 / 2.0
    }
}

/// Gromov product `(x . y)_w` doubled (so the result is an integer).
pub fn gromov_product_doubled(d: &[u16], n: usize, x: usize, y: usize, w: usize) -> u32 {
    d[x * n + w] as u32 + d[y * n + w] as u32 - d[x * n + y] as u32
}

/// Four-point defect of a quadruple, doubled: the largest of the three
/// pairing sums minus the median.
fn defect2(d: &[u16], n: usize, x: usize, y: usize, z: usize, w: usize) -> u32 {
    let s1 = d[x * n + y] as u32 + d[z * n + w] as u32;
    let s2 = d[x * n + z] as u32 + d[y * n + w] as u32;
    let s3 = d[x * n + w] as u32 + d[y * n + z] as u32;
    let mx = s1.max(s2).max(s3);
    let mn = s1.min(s2).min(s3);
    let mid = s1 + s2 + s3 - mx - mn;
    mx - mid
}

/// Estimates the hyperbolicity constant of a connected graph.
///
/// `FourPoint` scans all quadruples of certified vertices (those at graph
/// distance more than `guard_margin` from every frontier vertex) and
/// returns the maximal defect. `Basepoint` fixes the fourth point and uses
/// the max-min matrix formulation over Gromov products, which enumerates
/// exactly the quadruples through the basepoint.
pub fn estimate_delta(
    graph: &MetricGraph,
    method: DeltaMethod,
    guard_margin: u32,
) -> Result<DeltaEstimate, CuspError> {
    let n = graph.vertex_count();
    let d = graph.distance_matrix()?;
    let guard = graph.guard_mask(guard_margin);
    let certified: Vec<usize> = (0..n).filter(|&i| !guard[i]).collect();
    let m = certified.len();
    match method {
        DeltaMethod::FourPoint => {
            // compact distance matrix over certified vertices, scanned with a
            // vectorizable inner loop over the last index
            let mut dc = vec![0u16; m * m];
            for (i, &vi) in certified.iter().enumerate() {
                for (j, &vj) in certified.iter().enumerate() {
                    dc[i * m + j] = d[vi * n + vj];
                }
            }
            let best = (0..m)
                .into_par_iter()
                .map(|x| {
                    let mut local = 0u32;
                    for y in x + 1..m {
                        let dxy = dc[x * m + y] as u32;
                        for z in y + 1..m {
                            let dxz = dc[x * m + z] as u32;
                            let dyz = dc[y * m + z] as u32;
                            let rz = &dc[z * m..z * m + m];
                            let rx = &dc[x * m..x * m + m];
                            let ry = &dc[y * m..y * m + m];
                            for w in z + 1..m {
                                let s1 = dxy + rz[w] as u32;
                                let s2 = dxz + ry[w] as u32;
                                let s3 = dyz + rx[w] as u32;
                                let mx = s1.max(s2).max(s3);
                                let mn = s1.min(s2).min(s3);
                                let defect = mx - (s1 + s2 + s3 - mx - mn);
                                local = local.max(defect);
                            }
                        }
                    }
                    local
                })
                .max()
                .unwrap_or(0);
            let q = if m >= 4 {
                (m as u128) * (m as u128 - 1) * (m as u128 - 2) * (m as u128 - 3) / 24
            } else {
                0
            };
            Ok(DeltaEstimate {
                twice_value: best,
                method,
                certified_vertices: m,
                certified_quadruples: q,
                guard_margin,
            })
        }
        DeltaMethod::Basepoint(w0) => {
            let w = w0 as usize;
            // Gromov products doubled, restricted to certified vertices
            let mut a = vec![0u32; m * m];
            for (i, &vi) in certified.iter().enumerate() {
                for (j, &vj) in certified.iter().enumerate() {
                    a[i * m + j] = gromov_product_doubled(&d, n, vi, vj, w);
                }
            }
            // max over z of min(a[x][z], a[z][y]) minus a[x][y]
            let best = (0..m)
                .into_par_iter()
                .map(|x| {
                    let mut local = 0u32;
                    for y in 0..m {
                        let axy = a[x * m + y];
                        let mut prod = 0u32;
                        for z in 0..m {
                            prod = prod.max(a[x * m + z].min(a[z * m + y]));
                        }
                        local = local.max(prod.saturating_sub(axy));
                    }
                    local
                })
                .max()
                .unwrap_or(0);
            let q = if m >= 3 {
                (m as u128) * (m as u128 - 1) * (m as u128 - 2) / 6
            } else {
                0
            };
            Ok(DeltaEstimate {
                twice_value: best,
                method,
                certified_vertices: m,
                certified_quadruples: q,
                guard_margin,
            })
        }
    }
}

/// Exhaustive basepoint-quadruple enumeration; cross-check oracle for the
/// matrix formulation.
pub fn basepoint_delta_oracle(graph: &MetricGraph, w: u32, guard_margin: u32) -> u32 {
    let n = graph.vertex_count();
    let d = graph.distance_matrix().expect("connected");
    let guard = graph.guard_mask(guard_margin);
    let certified: Vec<usize> = (0..n).filter(|&i| !guard[i]).collect();
    let mut best = 0;
    for (i, &x) in certified.iter().enumerate() {
        for (j, &y) in certified.iter().enumerate().skip(i) {
            for &z in certified.iter().skip(j) {
                best = best.max(defect2(&d, n, x, y, z, w as usize));
            }
        }
    }
    best
}
