//! Quotient geometry of type-S vertex spaces: the projection to the free
//! factor (deleting the central coordinate), lifts, peripheral lines, exact
//! closest-point projections in the free-group tree, and the two-sided
//! distance formula across an edge.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::gog::{GogError, GraphOfGroups};
use crate::groupcore::{BackendKind, FreeWord, GroupElement};
use crate::treespace::BallGraph;

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("vertex space is not of product type")]
    NotTypeS,
    #[error("point is outside the quotient ball")]
    OutOfBall,
    #[error("peripheral line is empty")]
    EmptyLine,
    #[error("edge space is empty")]
    EmptyEdgeSpace,
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// The quotient of one vertex space: the Cayley ball of its free factor
/// plus the projection map from the ball vertices of that space.
pub struct QuotientBall {
    pub node: u32,
    pub radius: u32,
    pub free_rank: usize,
    pub points: Vec<FreeWord>,
    index: HashMap<FreeWord, u32>,
    /// Per ball vertex: index of its image point (vertices of other spaces
    /// map to `None`).
    pub image: Vec<Option<u32>>,
}

/// Deletes the central coordinate of a product element.
pub fn project_element(g: &GroupElement) -> Result<FreeWord, QuotientError> {
    match g {
        GroupElement::Product(w, _) => Ok(w.clone()),
        _ => Err(QuotientError::NotTypeS),
    }
}

/// Builds the quotient ball of one vertex space of a ball graph.
pub fn quotient_ball(ball: &BallGraph, node: u32) -> Result<QuotientBall, QuotientError> {
    let gamma = ball
        .tree_nodes()
        .get(node as usize)
        .ok_or(QuotientError::NotTypeS)?
        .gamma;
    let backend = ball.gog.backend(gamma);
    let rank = match backend.kind {
        BackendKind::Product(k) => k,
        _ => return Err(QuotientError::NotTypeS),
    };
    let mut points = Vec::new();
    let mut index = HashMap::new();
    let mut image = vec![None; ball.vertex_count()];
    for i in 0..ball.vertex_count() {
        let v = ball.vertex(i as u32);
        if v.tree_node != node {
            continue;
        }
        let w = project_element(v.nf.last_element())?;
        let id = match index.get(&w) {
            Some(&id) => id,
            None => {
                let id = points.len() as u32;
                points.push(w.clone());
                index.insert(w, id);
                id
            }
        };
        image[i] = Some(id);
    }
    Ok(QuotientBall {
        node,
        radius: ball.radius,
        free_rank: rank,
        points,
        index,
        image,
    })
}

impl QuotientBall {
    pub fn point_index(&self, w: &FreeWord) -> Option<u32> {
        self.index.get(w).copied()
    }

    /// Image of ball vertex `i`, if it lies in this quotient's vertex space.
    pub fn project(&self, i: u32) -> Result<u32, QuotientError> {
        self.image[i as usize].ok_or(QuotientError::NotTypeS)
    }

    /// Two ball vertices share a fiber iff their free-factor components agree.
    pub fn same_fiber(&self, i: u32, j: u32) -> bool {
        match (self.image[i as usize], self.image[j as usize]) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

/// A lift of the quotient point `y` through the fiber of `x`: the product
/// element with free part `y` and the central coordinate of `x`. Realizes
/// the quotient distance exactly.
pub fn lift(x: &GroupElement, y: &FreeWord) -> Result<GroupElement, QuotientError> {
    match x {
        GroupElement::Product(_, m) => Ok(GroupElement::Product(y.clone(), *m)),
        _ => Err(QuotientError::NotTypeS),
    }
}

pub fn free_distance(a: &FreeWord, b: &FreeWord) -> u64 {
    a.inverse().concat(b).len() as u64
}

/// Shortlex-minimal representative of the left coset `g <u>` in a free
/// group.
pub fn line_rep(g: &FreeWord, u: &FreeWord) -> FreeWord {
    let rl = u.len().max(1) as i64;
    let bound = (g.len() as i64) / rl + 2;
    let mut best: Option<FreeWord> = None;
    for k in -bound..=bound {
        let cand = g.concat(&u.pow(k));
        let better = match &best {
            None => true,
            Some(b) => cand.cmp_shortlex(b) == std::cmp::Ordering::Less,
        };
        if better {
            best = Some(cand);
        }
    }
    best.expect("window nonempty")
}

/// Exact closest-point projection of `z` onto the line `{rep u^k}` in the
/// free-group tree: the argmin exponent set (contiguous) and the minimal
/// distance.
pub fn project_to_line(rep: &FreeWord, u: &FreeWord, z: &FreeWord) -> (Vec<i64>, u64) {
    let w = rep.inverse().concat(z); // distance to u^k is len(u^-k w)
    let (_, core) = u.cyclic_decompose();
    let core_len = core.len().max(1) as i64;
    // any k with |k| beyond this bound is worse than k = 0
    let bound = (2 * w.len() as i64) / core_len + 2;
    let mut best = u64::MAX;
    let mut arg = Vec::new();
    for k in -bound..=bound {
        let d = u.pow(-k).concat(&w).len() as u64;
        if d < best {
            best = d;
            arg.clear();
            arg.push(k);
        } else if d == best {
            arg.push(k);
        }
    }
    (arg, best)
}

/// Diameter (in the free metric) of the projection of the finite set `zs`
/// onto the line through `rep`.
pub fn projection_diameter(rep: &FreeWord, u: &FreeWord, zs: &[FreeWord]) -> u64 {
    let mut points: Vec<FreeWord> = Vec::new();
    for z in zs {
        let (args, _) = project_to_line(rep, u, z);
        for k in args {
            let p = rep.concat(&u.pow(k));
            if !points.contains(&p) {
                points.push(p);
            }
        }
    }
    let mut diam = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diam = diam.max(free_distance(&points[i], &points[j]));
        }
    }
    diam
}

#[derive(Clone, Debug)]
pub struct ProjBoundReport {
    pub radius: u32,
    pub lines: usize,
    pub ordered_pairs: u64,
    pub max_diameter: u64,
    /// Count of projected points excluded by the boundary guard.
    pub guard_excluded: u64,
    /// (source line rep, target line rep, diameter) for pairs with a
    /// positive diameter, capped at 1000 rows.
    pub offenders: Vec<(String, String, u64)>,
}

/// Enumerates all cosets of `<u>` meeting the radius ball of a free group
/// of the given rank, projects each line onto every other, and reports the
/// maximal projection diameter. With `guard`, points of word length exactly
/// `radius` are excluded from the statistics (projections themselves are
/// computed exactly in the free group, so the guard only trims the sample).
pub fn proj_bound_free(
    rank: usize,
    u: &FreeWord,
    radius: u32,
    guard: bool,
) -> ProjBoundReport {
    let backend = crate::groupcore::BackendSpec::free(rank);
    let ball = backend
        .ball(radius, crate::treespace::DEFAULT_BUDGET)
        .expect("free ball within budget");
    let mut reps: Vec<FreeWord> = Vec::new();
    let mut seen: HashMap<FreeWord, ()> = HashMap::new();
    let mut members: HashMap<FreeWord, Vec<FreeWord>> = HashMap::new();
    for g in &ball {
        let GroupElement::Free(w) = g else { continue };
        let rep = line_rep(w, u);
        if seen.insert(rep.clone(), ()).is_none() {
            reps.push(rep.clone());
        }
        members.entry(rep).or_default().push(w.clone());
    }
    let mut guard_excluded = 0u64;
    if guard {
        for zs in members.values_mut() {
            let before = zs.len();
            zs.retain(|z| (z.len() as u32) < radius);
            guard_excluded += (before - zs.len()) as u64;
        }
    }
    let results: Vec<(usize, usize, u64)> = (0..reps.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let reps = &reps;
            let members = &members;
            (0..reps.len()).filter(move |&j| j != i).map(move |j| {
                let zs = &members[&reps[j]];
                let d = projection_diameter(&reps[i], u, zs);
                (i, j, d)
            })
        })
        .collect();
    let mut max_diameter = 0;
    let mut offenders = Vec::new();
    let render = |w: &FreeWord| {
        backend.render(&GroupElement::Free(w.clone()))
    };
    for (i, j, d) in &results {
        max_diameter = max_diameter.max(*d);
        if *d > 0 && offenders.len() < 1000 {
            offenders.push((render(&reps[*i]), render(&reps[*j]), *d));
        }
    }
    ProjBoundReport {
        radius,
        lines: reps.len(),
        ordered_pairs: results.len() as u64,
        max_diameter,
        guard_excluded,
        offenders,
    }
}

#[derive(Clone, Debug)]
pub struct DistProjsRow {
    pub pair: (usize, usize),
    pub d_edge: u64,
    pub d_yv: u64,
    pub d_yw: u64,
    pub d_xv: u64,
}

#[derive(Clone, Debug)]
pub struct DistProjsReport {
    pub radius: u32,
    pub rows: Vec<DistProjsRow>,
    pub k: f64,
    pub a: f64,
    pub violations: u64,
    pub cap: (f64, f64),
}

/// Distance-formula experiment across one edge: for all pairs of edge-group
/// elements within the radius (in the source vertex-space word metric),
/// compares `d_Xv(x,y)` with the sum of the quotient distances on both
/// sides, fits minimal `K` then `A` for the two-sided affine inequality,
/// and counts pairs violating the supplied cap. All quantities are exact.
pub fn verify_dist_projs(
    gog: &GraphOfGroups,
    e: usize,
    radius: u32,
    cap: (f64, f64),
) -> Result<DistProjsReport, QuotientError> {
    let alg = gog.edge_algebra(e)?;
    let src = gog.edge(e).source;
    let tgt = gog.edge(e).target;
    for v in [src, tgt] {
        if !matches!(gog.backend(v).kind, BackendKind::Product(_)) {
            return Err(QuotientError::NotTypeS);
        }
    }
    let far_alg = gog.edge_algebra(gog.edge(e).reverse)?;
    // enumerate edge-group elements within the radius
    let mut coords: Vec<(i64, i64)> = Vec::new();
    let rl = alg.root.len() as i64;
    let c = alg.step.abs();
    let mut k1 = 0i64;
    while k1 * rl <= radius as i64 {
        let rem = radius as i64 - k1 * rl;
        let mut k2 = 0i64;
        while k2 * c <= rem {
            for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let p = (s1 * k1, s2 * k2);
                if !coords.contains(&p) {
                    coords.push(p);
                }
            }
            k2 += 1;
        }
        k1 += 1;
    }
    if coords.is_empty() {
        return Err(QuotientError::EmptyEdgeSpace);
    }
    coords.sort_unstable();
    let mut rows = Vec::new();
    let mut k_fit: f64 = 1.0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let (a1, a2) = coords[i];
            let (b1, b2) = coords[j];
            let dk1 = b1 - a1;
            let dk2 = b2 - a2;
            // exact product metric on the source vertex space
            let d_xv = alg.root.pow(dk1).len() as u64 + (alg.step * dk2).unsigned_abs();
            // quotient of the source side: free part is root^k1
            let d_yv = alg.root.pow(dk1).len() as u64;
            // across the edge: coordinates map by tau, the far free part is
            // the far root to the power of the first mapped coordinate
            let (m1a, _) = gog.tau_coords(e, (a1, a2))?;
            let (m1b, _) = gog.tau_coords(e, (b1, b2))?;
            let d_yw = far_alg.root.pow(m1b - m1a).len() as u64;
            let d_edge = dk1.unsigned_abs() * alg.root.len() as u64
                + dk2.unsigned_abs() * alg.step.unsigned_abs();
            rows.push(DistProjsRow {
                pair: (i, j),
                d_edge,
                d_yv,
                d_yw,
                d_xv,
            });
        }
    }
    for r in &rows {
        let s = (r.d_yv + r.d_yw) as f64;
        let d = r.d_xv as f64;
        if d >= 3.0 && s > 0.0 {
            k_fit = k_fit.max(s / d).max(d / s);
        }
    }
    let mut a_fit: f64 = 0.0;
    let mut violations = 0u64;
    for r in &rows {
        let s = (r.d_yv + r.d_yw) as f64;
        let d = r.d_xv as f64;
        a_fit = a_fit.max(s - k_fit * d).max(d / k_fit - s);
        if s > cap.0 * d + cap.1 || s < d / cap.0 - cap.1 {
            violations += 1;
        }
    }
    Ok(DistProjsReport {
        radius,
        rows,
        k: k_fit,
        a: a_fit,
        violations,
        cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::fixtures::{torus3, torus_complex};
    use crate::groupcore::BackendSpec;
    use crate::normalform::NormalForm;
    use crate::treespace::{build_ball, DEFAULT_BUDGET};
    use std::sync::Arc;

    fn fw(s: &str) -> FreeWord {
        let b = BackendSpec::free(2);
        match b.element_from_str(s).unwrap() {
            GroupElement::Free(w) => w,
            _ => unreachable!(),
        }
    }

    #[test]
    fn project_deletes_center() {
        let b = BackendSpec::product_named(vec!["a".into(), "b".into()], "z".into()).unwrap();
        let g = b.element_from_str("a b z^7").unwrap();
        let w = project_element(&g).unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn projection_is_one_lipschitz_on_ball_edges() {
        let g = Arc::new(torus3());
        let ball = build_ball(&g, 3, DEFAULT_BUDGET).unwrap();
        for node in 0..ball.tree_nodes().len() as u32 {
            let qb = quotient_ball(&ball, node).unwrap();
            for i in 0..ball.vertex_count() as u32 {
                if ball.vertex(i).tree_node != node {
                    continue;
                }
                for &j in ball.neighbours(i) {
                    if ball.vertex(j).tree_node != node {
                        continue;
                    }
                    let wi = &qb.points[qb.project(i).unwrap() as usize];
                    let wj = &qb.points[qb.project(j).unwrap() as usize];
                    assert!(free_distance(wi, wj) <= 1);
                }
            }
        }
    }

    #[test]
    fn fibers_partition_by_free_part() {
        let g = Arc::new(torus3());
        let ball = build_ball(&g, 3, DEFAULT_BUDGET).unwrap();
        let qb = quotient_ball(&ball, 0).unwrap();
        for i in 0..ball.vertex_count() as u32 {
            for j in 0..ball.vertex_count() as u32 {
                if ball.vertex(i).tree_node != 0 || ball.vertex(j).tree_node != 0 {
                    continue;
                }
                let same = project_element(ball.vertex(i).nf.last_element()).unwrap()
                    == project_element(ball.vertex(j).nf.last_element()).unwrap();
                assert_eq!(qb.same_fiber(i, j), same);
            }
        }
    }

    #[test]
    fn lift_realizes_quotient_distance() {
        let g = Arc::new(torus3());
        let backend = g.backend(0).clone();
        let x = backend.element_from_str("s1^5").unwrap();
        let y = fw_named(&backend, "a1");
        let lifted = lift(&x, &y).unwrap();
        assert_eq!(lifted, backend.element_from_str("a1 s1^5").unwrap());
        // distance in the vertex space equals the quotient distance
        let diff = backend
            .multiply(&backend.invert(&x).unwrap(), &lifted)
            .unwrap();
        assert_eq!(backend.word_length(&diff), 1);
        // identity when lifting the projection of x itself
        let self_lift = lift(&x, &project_element(&x).unwrap()).unwrap();
        assert_eq!(self_lift, x);
    }

    fn fw_named(b: &BackendSpec, s: &str) -> FreeWord {
        match b.element_from_str(s).unwrap() {
            GroupElement::Product(w, _) => w,
            GroupElement::Free(w) => w,
            _ => unreachable!(),
        }
    }

    #[test]
    fn product_metric_identity_exact_on_certified_pairs() {
        let g = Arc::new(torus3());
        let ball = build_ball(&g, 4, DEFAULT_BUDGET).unwrap();
        let sel = ball.vertex_space(0).unwrap();
        let backend = g.backend(0);
        let mut checked = 0u64;
        for (ai, &a) in sel.verts.iter().enumerate() {
            for &b in sel.verts.iter().skip(ai + 1) {
                let formula = ball.vertex_space_distance(a, b).unwrap();
                // certified when a monotone product path stays in the ball
                if formula as u32 + ball.dist0(a).max(ball.dist0(b)) > ball.radius {
                    continue;
                }
                let xa = ball.vertex(a).nf.last_element().clone();
                let xb = ball.vertex(b).nf.last_element().clone();
                let diff = backend
                    .multiply(&backend.invert(&xa).unwrap(), &xb)
                    .unwrap();
                let (wf, dm) = match diff {
                    GroupElement::Product(w, m) => (w, m),
                    _ => unreachable!(),
                };
                assert_eq!(formula, wf.len() as u64 + dm.unsigned_abs());
                // in-ball distance within the space agrees
                let (d, certified) = ball.distance_certified(a, b).unwrap();
                if certified {
                    assert!(u64::from(d) <= formula);
                }
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn line_projection_examples() {
        let u = fw("x");
        // z on the line projects to itself
        let (args, d) = project_to_line(&FreeWord::identity(), &u, &fw("x x"));
        assert_eq!(d, 0);
        assert_eq!(args, vec![2]);
        // a disjoint parallel line projects to a single point
        let zs: Vec<FreeWord> = (-4..=4).map(|k| fw("y").concat(&u.pow(k))).collect();
        let diam = projection_diameter(&FreeWord::identity(), &u, &zs);
        assert_eq!(diam, 0);
        // subset of the line: projection is the set itself
        let zs: Vec<FreeWord> = vec![fw("x"), fw("x x x")];
        let diam = projection_diameter(&FreeWord::identity(), &u, &zs);
        assert_eq!(diam, 2);
    }

    #[test]
    fn proj_bound_small_radius_is_zero() {
        let rep = proj_bound_free(2, &fw("x"), 4, true);
        assert_eq!(rep.max_diameter, 0, "offenders: {:?}", rep.offenders);
        assert!(rep.lines > 1);
    }

    #[test]
    fn dist_projs_simple_exact_case() {
        // the torus-complex edge swaps free and central directions, so the
        // two quotient distances sum exactly to the vertex-space distance
        let g = torus3();
        let rep = verify_dist_projs(&g, 0, 4, (2.0, 2.0)).unwrap();
        assert_eq!(rep.k, 1.0);
        assert_eq!(rep.a, 0.0);
        assert_eq!(rep.violations, 0);
        for r in &rep.rows {
            assert_eq!(r.d_yv + r.d_yw, r.d_xv);
            assert_eq!(r.d_edge, r.d_xv);
        }
    }

    #[test]
    fn dist_projs_on_torus4_middle_edge() {
        let g = torus_complex(4);
        let e = g.edge_index("e3").unwrap();
        let rep = verify_dist_projs(&g, e, 6, (2.0, 2.0)).unwrap();
        assert!(rep.k <= 2.0);
        assert!(rep.a <= 2.0);
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn kernel_direction_stays_in_edge_space() {
        // the central fiber direction through an edge-group element stays in
        // the edge subgroup (unit central step)
        let g = torus3();
        for k1 in -3i64..=3 {
            for k2 in -3i64..=3 {
                let x = g.edge_element(0, (k1, k2)).unwrap();
                let backend = g.backend(0);
                let up = backend
                    .multiply(&x, &backend.element_from_str("s1").unwrap())
                    .unwrap();
                assert!(g.edge_membership(&up, 0).unwrap().is_some());
            }
        }
    }

    #[test]
    fn peripheral_lines_disjoint_and_connected() {
        // lines at the middle vertex of the 4-torus complex: cosets of the
        // two incident edge roots inside the quotient ball
        let backend = BackendSpec::free(2); // stand-in F2 with gens x (= a2), y (= b3)
        let ball = backend.ball(5, 1 << 22).unwrap();
        let ux = fw("x");
        let uy = fw("y");
        // distinct cosets of one subgroup are disjoint vertex sets
        let mut by_rep: std::collections::HashMap<FreeWord, Vec<FreeWord>> = Default::default();
        for g in &ball {
            let GroupElement::Free(w) = g else { unreachable!() };
            by_rep.entry(line_rep(w, &ux)).or_default().push(w.clone());
        }
        for (rep, members) in &by_rep {
            for m in members {
                assert_eq!(&line_rep(m, &ux), rep);
            }
            // connectivity: members sorted by exponent are consecutive
            let mut ks: Vec<i64> = members
                .iter()
                .map(|m| rep.inverse().concat(m).power_of(&ux).unwrap())
                .collect();
            ks.sort_unstable();
            for pair in ks.windows(2) {
                assert_eq!(pair[1] - pair[0], 1, "line members form a segment");
            }
        }
        // lines of distinct peripheral subgroups share at most one point
        for g in ball.iter().take(60) {
            let GroupElement::Free(w) = g else { unreachable!() };
            let rx = line_rep(w, &ux);
            let ry = line_rep(w, &uy);
            let mut common = 0;
            for k in -6i64..=6 {
                let p = rx.concat(&ux.pow(k));
                if line_rep(&p, &uy) == ry {
                    common += 1;
                }
            }
            assert!(common <= 1, "lines of distinct subgroups meet in <= 1 point");
        }
    }

    #[test]
    fn lift_equality_on_sampled_pairs() {
        // the lift realizes the quotient distance exactly on 10^3 samples
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let g = Arc::new(torus3());
        let backend = g.backend(0).clone();
        let ball = backend.ball(4, 1 << 22).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = &ball[rng.random_range(0..ball.len())];
            let y = match &ball[rng.random_range(0..ball.len())] {
                GroupElement::Product(w, _) => w.clone(),
                _ => unreachable!(),
            };
            let lifted = lift(x, &y).unwrap();
            let diff = backend
                .multiply(&backend.invert(x).unwrap(), &lifted)
                .unwrap();
            let d_quotient = free_distance(&project_element(x).unwrap(), &y);
            assert_eq!(backend.word_length(&diff), d_quotient);
        }
    }

    #[test]
    fn projection_contracts_on_sampled_ball_pairs() {
        // d_Y(pi x, pi y) <= d_{X_v}(x, y) on 10^3 sampled pairs, with the
        // vertex-space distance computed by BFS in the ball
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let g = Arc::new(torus3());
        let ball = build_ball(&g, 3, DEFAULT_BUDGET).unwrap();
        let qb = quotient_ball(&ball, 0).unwrap();
        let sel: Vec<u32> = (0..ball.vertex_count() as u32)
            .filter(|&i| ball.vertex(i).tree_node == 0)
            .collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let a = sel[rng.random_range(0..sel.len())];
            let b = sel[rng.random_range(0..sel.len())];
            let d_amb = ball.distance(a, b).unwrap() as u64;
            let wa = &qb.points[qb.project(a).unwrap() as usize];
            let wb = &qb.points[qb.project(b).unwrap() as usize];
            assert!(free_distance(wa, wb) <= d_amb);
        }
    }

    #[test]
    fn quotient_ball_image_covers_space() {
        let g = Arc::new(torus3());
        let ball = build_ball(&g, 3, DEFAULT_BUDGET).unwrap();
        let qb = quotient_ball(&ball, 0).unwrap();
        let nf = NormalForm::identity(&g);
        let base = ball.find(&nf).unwrap();
        assert!(qb.project(base).is_ok());
        assert!(!qb.points.is_empty());
    }
}
