//! Prints the extremal unguarded quadruple at a given window.

use admissible_core::cusped::build_cusped;
use admissible_core::groupcore::{BackendSpec, GroupElement};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let radius: u32 = args[1].parse().unwrap();
    let depth: u32 = args[2].parse().unwrap();
    let backend = BackendSpec::free(2);
    let u = match backend.element_from_str("x").unwrap() {
        GroupElement::Free(w) => w,
        _ => unreachable!(),
    };
    let c = build_cusped(&backend, &u, radius, depth, 5_000_000).unwrap();
    let g = &c.graph;
    let n = g.vertex_count();
    let d = g.distance_matrix().unwrap();
    let mut best = 0u32;
    let mut arg = (0usize, 0usize, 0usize, 0usize);
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                for w in z + 1..n {
                    let s1 = d[x * n + y] as u32 + d[z * n + w] as u32;
                    let s2 = d[x * n + z] as u32 + d[y * n + w] as u32;
                    let s3 = d[x * n + w] as u32 + d[y * n + z] as u32;
                    let mx = s1.max(s2).max(s3);
                    let mn = s1.min(s2).min(s3);
                    let defect = mx - (s1 + s2 + s3 - mx - mn);
                    if defect > best {
                        best = defect;
                        arg = (x, y, z, w);
                    }
                }
            }
        }
    }
    println!("twice_delta={best}");
    let (x, y, z, w) = arg;
    for (name, v) in [("x", x), ("y", y), ("z", z), ("w", w)] {
        println!("{name} = {} (frontier={})", g.labels[v], g.frontier[v]);
    }
    for (a, b, na, nb) in [
        (x, y, "x", "y"), (z, w, "z", "w"), (x, z, "x", "z"),
        (y, w, "y", "w"), (x, w, "x", "w"), (y, z, "y", "z"),
    ] {
        println!("d({na},{nb}) = {}", d[a * n + b]);
    }
}
