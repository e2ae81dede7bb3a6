//! Four-point delta with the frontier cleared (no guard at all).

use admissible_core::cusped::{build_cusped, estimate_delta, DeltaMethod};
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
    let mut c = build_cusped(&backend, &u, radius, depth, 5_000_000).unwrap();
    for f in c.graph.frontier.iter_mut() {
        *f = false;
    }
    let est = estimate_delta(&c.graph, DeltaMethod::FourPoint, 0).unwrap();
    println!(
        "unguarded (r={radius},D={depth}): twice_delta={} over {} vertices",
        est.twice_value, est.certified_vertices
    );
}
