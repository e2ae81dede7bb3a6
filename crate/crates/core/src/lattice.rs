//! Sublattice index computations in `Z^2`.

/// Index of the sublattice of `Z^2` spanned by a set of vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(u64),
    Infinite,
}

impl LatticeIndex {
    pub fn is_finite(&self) -> bool {
        matches!(self, LatticeIndex::Finite(_))
    }
}

/// Computes the index of the sublattice spanned by `vs` inside `Z^2`:
/// `|det|` of a triangular basis when the span has rank 2, infinite
/// otherwise. Exact integer row reduction.
pub fn lattice_index(vs: &[[i64; 2]]) -> LatticeIndex {
    let mut rows: Vec<[i128; 2]> = vs
        .iter()
        .filter(|v| v[0] != 0 || v[1] != 0)
        .map(|v| [v[0] as i128, v[1] as i128])
        .collect();
    // eliminate the first column down to a single pivot row by gcd steps
    let mut pivot0: Option<[i128; 2]> = None;
    let mut rest: Vec<i128> = Vec::new(); // second coordinates of rows with zero first coordinate
    for row in rows.drain(..) {
        let mut r = row;
        loop {
            match pivot0 {
                None => {
                    if r[0] == 0 {
                        rest.push(r[1]);
                    } else {
                        pivot0 = Some(r);
                    }
                    break;
                }
                Some(ref mut p) => {
                    if r[0] == 0 {
                        rest.push(r[1]);
                        break;
                    }
                    // gcd step on the first coordinate
                    if p[0].abs() > r[0].abs() {
                        std::mem::swap(p, &mut r);
                    }
                    let q = r[0] / p[0];
                    r = [r[0] - q * p[0], r[1] - q * p[1]];
                }
            }
        }
    }
    let p = match pivot0 {
        Some(p) => p,
        None => return LatticeIndex::Infinite,
    };
    let mut g: i128 = 0;
    for s in rest {
        g = gcd(g, s);
    }
    if g == 0 {
        return LatticeIndex::Infinite;
    }
    LatticeIndex::Finite((p[0].abs() * g.abs()) as u64)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
