//! Independent brute-force model of the double of `F2 x Z` over `<x> x Z`,
//! used as an oracle for the tree-of-spaces ball construction.
//!
//! The model carries its own element representation (amalgam syllable form
//! with the shared subgroup collected on the right), its own reduction
//! rules, and its own breadth-first enumeration. It shares no code with
//! the library's normal forms.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use admissible_core::gog::{EdgeDecl, GraphOfGroups};
use admissible_core::groupcore::{BackendSpec, GroupElement};
use admissible_core::treespace::{build_ball, DEFAULT_BUDGET};

/// Reduced free word over x (1) and y (2); letters are signed.
fn reduce_push(word: &mut Vec<i32>, letter: i32) {
    if word.last() == Some(&-letter) {
        word.pop();
    } else {
        word.push(letter);
    }
}

/// Amalgam element: alternating syllables (side, free word not ending in
/// +-x and nonempty), with the shared subgroup part `chi^a zeta^b`
/// collected on the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Elt {
    syls: Vec<(u8, Vec<i32>)>,
    a: i64,
    b: i64,
}

impl Elt {
    fn identity() -> Self {
        Elt {
            syls: Vec::new(),
            a: 0,
            b: 0,
        }
    }

    /// Right-multiplies by a generator of the given side:
    /// 1 = x, 2 = y, 3 = z (negatives are inverses).
    fn mul_gen(&self, side: u8, letter: i32) -> Elt {
        let mut out = self.clone();
        match letter.abs() {
            3 => {
                // the central generator of either side is the shared zeta
                out.b += letter.signum() as i64;
                return out;
            }
            1 => {
                // x of either side is the shared chi
                out.a += letter.signum() as i64;
                return out;
            }
            _ => {}
        }
        // letter y of `side`: fold c * y into the side's free factor
        // t = (x^a y^s, z^b); strip the trailing x-power for the new rep
        let mut f: Vec<i32> = Vec::new();
        for _ in 0..out.a.unsigned_abs() {
            reduce_push(&mut f, if out.a > 0 { 1 } else { -1 });
        }
        reduce_push(&mut f, if letter > 0 { 2 } else { -2 });
        let m = out.b;
        out.a = 0;
        out.b = 0;
        if !out.syls.is_empty() && out.syls.last().unwrap().0 == side {
            // merge with the last syllable of the same side
            let (_, prev) = out.syls.pop().unwrap();
            let mut merged = prev;
            for &l in &f {
                reduce_push(&mut merged, l);
            }
            f = merged;
        }
        // strip trailing x power into the shared part
        let mut k: i64 = 0;
        while let Some(&last) = f.last() {
            if last == 1 {
                k += 1;
                f.pop();
            } else if last == -1 {
                k -= 1;
                f.pop();
            } else {
                break;
            }
        }
        if !f.is_empty() {
            out.syls.push((side, f));
        }
        out.a = k;
        out.b = m;
        out
    }
}

/// An oracle vertex of the tree of spaces: which side's vertex space, and
/// the group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct OracleVertex {
    side: u8,
    elt: Elt,
}

struct OracleBall {
    verts: Vec<OracleVertex>,
    index: HashMap<OracleVertex, u32>,
    adj: Vec<Vec<u32>>,
}

fn oracle_ball(radius: u32) -> OracleBall {
    let start = OracleVertex {
        side: 1,
        elt: Elt::identity(),
    };
    let mut verts = vec![start.clone()];
    let mut index = HashMap::new();
    index.insert(start, 0u32);
    let mut adj: Vec<Vec<u32>> = vec![Vec::new()];
    let mut dist = vec![0u32];
    let mut q = VecDeque::new();
    q.push_back(0u32);
    while let Some(u) = q.pop_front() {
        let d = dist[u as usize];
        let v = verts[u as usize].clone();
        let mut nbrs: Vec<OracleVertex> = Vec::new();
        for letter in [1, -1, 2, -2, 3, -3] {
            nbrs.push(OracleVertex {
                side: v.side,
                elt: v.elt.mul_gen(v.side, letter),
            });
        }
        // the single attaching edge: flip the side, element unchanged
        nbrs.push(OracleVertex {
            side: 3 - v.side,
            elt: v.elt.clone(),
        });
        for n in nbrs {
            match index.get(&n) {
                Some(&w) => {
                    if !adj[u as usize].contains(&w) {
                        adj[u as usize].push(w);
                        adj[w as usize].push(u);
                    }
                }
                None => {
                    if d + 1 <= radius {
                        let w = verts.len() as u32;
                        index.insert(n.clone(), w);
                        verts.push(n);
                        adj.push(Vec::new());
                        dist.push(d + 1);
                        adj[u as usize].push(w);
                        adj[w as usize].push(u);
                        q.push_back(w);
                    }
                }
            }
        }
    }
    OracleBall { verts, index, adj }
}

fn oracle_distances(ball: &OracleBall, from: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; ball.verts.len()];
    let mut q = VecDeque::new();
    dist[from as usize] = 0;
    q.push_back(from);
    while let Some(u) = q.pop_front() {
        for &v in &ball.adj[u as usize] {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

fn double_f2z() -> GraphOfGroups {
    let v1 = BackendSpec::product_named(vec!["x1".into(), "y1".into()], "z1".into()).unwrap();
    let v2 = BackendSpec::product_named(vec!["x2".into(), "y2".into()], "z2".into()).unwrap();
    let mk = |b: &BackendSpec, s: &str| b.element_from_str(s).unwrap();
    GraphOfGroups::assemble(
        "double-f2z".to_string(),
        vec![("v1".to_string(), v1.clone()), ("v2".to_string(), v2.clone())],
        vec![
            EdgeDecl {
                id: "e1".to_string(),
                source: "v1".to_string(),
                target: "v2".to_string(),
                reverse: "e2".to_string(),
                forward: true,
                basis: [mk(&v1, "x1"), mk(&v1, "z1")],
                images: [mk(&v2, "x2"), mk(&v2, "z2")],
            },
            EdgeDecl {
                id: "e2".to_string(),
                source: "v2".to_string(),
                target: "v1".to_string(),
                reverse: "e1".to_string(),
                forward: false,
                basis: [mk(&v2, "x2"), mk(&v2, "z2")],
                images: [mk(&v1, "x1"), mk(&v1, "z1")],
            },
        ],
        None,
    )
    .unwrap()
}

/// Evaluates a library ball vertex into the oracle representation by
/// replaying its normal form through the oracle's multiplication.
fn evaluate(nf: &admissible_core::NormalForm) -> OracleVertex {
    let mut side = 1u8;
    let mut elt = Elt::identity();
    let apply = |side: u8, elt: &Elt, g: &GroupElement| -> Elt {
        let GroupElement::Product(w, m) = g else { unreachable!() };
        let mut out = elt.clone();
        for &l in w.letters() {
            // library letters: 1 = x, 2 = y with signs; oracle matches
            out = out.mul_gen(side, l);
        }
        for _ in 0..m.unsigned_abs() {
            out = out.mul_gen(side, if *m > 0 { 3 } else { -3 });
        }
        out
    };
    elt = apply(side, &elt, &nf.head);
    for (e, g) in &nf.tail {
        // crossing an edge of the double flips the side, element unchanged
        let _ = e;
        side = 3 - side;
        elt = apply(side, &elt, g);
    }
    OracleVertex { side, elt }
}

#[test]
fn oracle_model_is_consistent() {
    // x and z commute with everything they should; y does not
    let e = Elt::identity();
    let xz = e.mul_gen(1, 1).mul_gen(1, 3);
    let zx = e.mul_gen(1, 3).mul_gen(1, 1);
    assert_eq!(xz, zx);
    let xy = e.mul_gen(1, 1).mul_gen(1, 2);
    let yx = e.mul_gen(1, 2).mul_gen(1, 1);
    assert_ne!(xy, yx);
    // inverses cancel
    let w = e
        .mul_gen(1, 2)
        .mul_gen(2, 2)
        .mul_gen(2, -2)
        .mul_gen(1, -2);
    assert_eq!(w, e);
    // the shared x is the same letter from both sides
    let a = e.mul_gen(1, 1);
    let b = e.mul_gen(2, 1);
    assert_eq!(a, b);
}

#[test]
fn equal_elements_have_equal_normal_forms() {
    // soundness of reduction: random words evaluating to the same oracle
    // state must reduce to token-identical normal forms
    use admissible_core::normalform::{random_word, reduce};
    use std::collections::HashMap as Map;
    let gog = Arc::new(double_f2z());
    let mut by_state: Map<OracleVertex, admissible_core::NormalForm> = Map::new();
    let mut collisions = 0u32;
    for seed in 0..4000u64 {
        let w = random_word(&gog, seed, 6);
        let nf = reduce(&gog, &w).unwrap();
        let state = evaluate(&nf);
        match by_state.get(&state) {
            Some(prev) => {
                assert_eq!(prev, &nf, "same element, different normal forms");
                collisions += 1;
            }
            None => {
                by_state.insert(state, nf);
            }
        }
    }
    assert!(collisions > 100, "harness should hit repeated elements");
}

#[test]
fn ball_radius_3_matches_oracle_exactly() {
    let gog = Arc::new(double_f2z());
    let ball = build_ball(&gog, 3, DEFAULT_BUDGET).unwrap();
    let oracle = oracle_ball(3);

    assert_eq!(
        ball.vertex_count(),
        oracle.verts.len(),
        "vertex counts must agree"
    );

    // bijection by evaluating normal forms through the oracle arithmetic
    let mut to_oracle = vec![0u32; ball.vertex_count()];
    let mut seen = vec![false; oracle.verts.len()];
    for i in 0..ball.vertex_count() as u32 {
        let v = ball.vertex(i);
        let key = evaluate(&v.nf);
        // side tags: v1 -> 1, v2 -> 2
        let side = if gog.vertex_id(v.gamma) == "v1" { 1 } else { 2 };
        assert_eq!(key.side, side);
        let idx = *oracle
            .index
            .get(&key)
            .unwrap_or_else(|| panic!("ball vertex {i} missing from oracle: {key:?}"));
        assert!(!seen[idx as usize], "two ball vertices map to one state");
        seen[idx as usize] = true;
        to_oracle[i as usize] = idx;
    }

    // adjacency must correspond under the bijection
    for i in 0..ball.vertex_count() as u32 {
        let mut a: Vec<u32> = ball
            .neighbours(i)
            .iter()
            .map(|&j| to_oracle[j as usize])
            .collect();
        let mut b = oracle.adj[to_oracle[i as usize] as usize].clone();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b, "adjacency mismatch at ball vertex {i}");
    }

    // all pairwise distances agree; certified ones in particular
    let mut certified = 0u64;
    for i in 0..ball.vertex_count() as u32 {
        let od = oracle_distances(&oracle, to_oracle[i as usize]);
        for j in 0..ball.vertex_count() as u32 {
            let (d, cert) = ball.distance_certified(i, j).unwrap();
            assert_eq!(d, od[to_oracle[j as usize] as usize]);
            if cert {
                certified += 1;
            }
        }
    }
    assert!(certified > 0);
}
