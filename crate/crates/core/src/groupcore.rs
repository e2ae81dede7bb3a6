//! Concrete group backends with exact arithmetic.
//!
//! Three backends are supported: free groups `F_k`, free abelian groups
//! `Z^n`, and direct products `F_k x Z` with an infinite cyclic central
//! factor. Elements are stored in canonical form (freely reduced words,
//! coordinate vectors) so that structural equality is group equality and
//! elements can be used as hash keys.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("enumeration of {requested} elements exceeds budget of {budget}")]
    BudgetExceeded { requested: usize, budget: usize },
    #[error("cyclic membership asked with identity base")]
    IdentityBase,
    #[error("malformed word: {0}")]
    MalformedWord(String),
}

/// A single letter of an input word: a generator name and an optional
/// inverse marker. Input words need not be reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSymbol {
    pub name: String,
    pub inverse: bool,
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// An unreduced word over generator symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<GeneratorSymbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses whitespace-separated symbols. Each token is `name`,
    /// `name^-1`, or `name^k` for an integer `k` (expanded to |k| letters).
    pub fn parse(text: &str) -> Result<Word, GroupError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, power) = match tok.split_once('^') {
                None => (tok, 1i64),
                Some((n, p)) => {
                    let k: i64 = p
                        .parse()
                        .map_err(|_| GroupError::MalformedWord(format!("bad power `{tok}`")))?;
                    (n, k)
                }
            };
            if name.is_empty() {
                return Err(GroupError::MalformedWord(format!("empty name in `{tok}`")));
            }
            for _ in 0..power.unsigned_abs() {
                letters.push(GeneratorSymbol {
                    name: name.to_string(),
                    inverse: power < 0,
                });
            }
        }
        Ok(Word(letters))
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A freely reduced word. Letters are nonzero `i32`: `+i` is generator
/// `i-1`, `-i` its inverse. No adjacent inverse pair occurs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    pub fn generator(idx: usize) -> Self {
        FreeWord(vec![idx as i32 + 1])
    }

    pub fn from_letters(letters: &[i32]) -> Self {
        let mut w = FreeWord::identity();
        for &l in letters {
            w.push_reduce(l);
        }
        w
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    fn push_reduce(&mut self, letter: i32) {
        debug_assert!(letter != 0);
        if self.0.last() == Some(&-letter) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push_reduce(l);
        }
        out
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Writes `self = c s c^-1` with `s` cyclically reduced; returns `(c, s)`.
    pub fn cyclic_decompose(&self) -> (FreeWord, FreeWord) {
        let w = &self.0;
        let mut i = 0usize;
        let mut j = w.len();
        while j - i >= 2 && w[i] == -w[j - 1] {
            i += 1;
            j -= 1;
        }
        (FreeWord(w[..i].to_vec()), FreeWord(w[i..j].to_vec()))
    }

    /// The primitive root: returns `(r, k)` with `self = r^k`, `k >= 1`, and
    /// `r` not a proper power. The identity returns `(identity, 1)`.
    pub fn primitive_root(&self) -> (FreeWord, i64) {
        if self.is_identity() {
            return (FreeWord::identity(), 1);
        }
        let (c, s) = self.cyclic_decompose();
        let n = s.0.len();
        for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            let period = (0..n).all(|i| s.0[i] == s.0[i % p]);
            if period {
                let core = FreeWord(s.0[..p].to_vec());
                let root = c.concat(&core).concat(&c.inverse());
                return (root, (n / p) as i64);
            }
        }
        unreachable!("period p = n always matches");
    }

    pub fn is_root(&self) -> bool {
        !self.is_identity() && self.primitive_root().1 == 1
    }

    /// If `self = u^k` for some integer `k`, returns `k` (0 for identity).
    pub fn power_of(&self, u: &FreeWord) -> Option<i64> {
        if u.is_identity() {
            return if self.is_identity() { Some(0) } else { None };
        }
        if self.is_identity() {
            return Some(0);
        }
        let (c, s) = u.cyclic_decompose();
        // self = u^k  <=>  c^-1 self c = s^k, and powers of a cyclically
        // reduced word concatenate without cancellation.
        let mid = c.inverse().concat(self).concat(&c);
        let n = s.0.len();
        if mid.0.len() % n != 0 {
            return None;
        }
        let k = (mid.0.len() / n) as i64;
        if mid == s.pow(k) {
            Some(k)
        } else if mid == s.pow(-k) {
            Some(-k)
        } else {
            None
        }
    }

    /// Searches for `w` with `w self w^-1 = target`; exact conjugacy of
    /// cyclic words by rotation matching.
    pub fn conjugating_witness(&self, target: &FreeWord) -> Option<FreeWord> {
        let (ca, sa) = self.cyclic_decompose();
        let (cb, sb) = target.cyclic_decompose();
        if sa.0.len() != sb.0.len() {
            return None;
        }
        if sa.is_identity() {
            return if target.is_identity() {
                Some(FreeWord::identity())
            } else {
                None
            };
        }
        let n = sa.0.len();
        for k in 0..n {
            let rotated: Vec<i32> = sa.0[k..].iter().chain(sa.0[..k].iter()).copied().collect();
            if rotated == sb.0 {
                // prefix p = sa[..k]: p^-1 (p q) p = q p, so conjugating the
                // core by p^-1 realizes the rotation.
                let p = FreeWord(sa.0[..k].to_vec());
                let w = cb.concat(&p.inverse()).concat(&ca.inverse());
                debug_assert_eq!(w.concat(self).concat(&w.inverse()), *target);
                return Some(w);
            }
        }
        None
    }

    /// Shortlex comparison with generator order by index, positive letters
    /// before negative.
    pub fn cmp_shortlex(&self, other: &FreeWord) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.key().cmp(&other.key()))
    }

    fn key(&self) -> Vec<u32> {
        self.0.iter().map(|&l| letter_rank(l)).collect()
    }
}

fn letter_rank(l: i32) -> u32 {
    (l.unsigned_abs() - 1) * 2 + u32::from(l < 0)
}

/// Canonical element of a backend. `Product` carries the freely reduced
/// free-factor component and the central coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Free(FreeWord),
    Abelian(Vec<i64>),
    Product(FreeWord, i64),
}

impl GroupElement {
    pub fn free_part(&self) -> Option<&FreeWord> {
        match self {
            GroupElement::Free(w) => Some(w),
            GroupElement::Product(w, _) => Some(w),
            GroupElement::Abelian(_) => None,
        }
    }

    pub fn central_part(&self) -> Option<i64> {
        match self {
            GroupElement::Product(_, m) => Some(*m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Free(usize),
    FreeAbelian(usize),
    /// Direct product of a free group of the given rank with one central `Z`.
    Product(usize),
}

/// A backend specification: the kind plus generator names. Free generator
/// names come first; for `Product` the single central name follows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendSpec {
    pub kind: BackendKind,
    free_names: Vec<String>,
    abelian_names: Vec<String>,
    lookup: HashMap<String, Slot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Free(usize),
    Abelian(usize),
}

fn default_free_names(rank: usize) -> Vec<String> {
    if rank <= 2 {
        ["x", "y"][..rank].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    }
}

fn default_abelian_names(rank: usize) -> Vec<String> {
    if rank == 1 {
        vec!["z".to_string()]
    } else {
        (1..=rank).map(|i| format!("u{i}")).collect()
    }
}

impl BackendSpec {
    pub fn free(rank: usize) -> Self {
        Self::free_named(default_free_names(rank)).expect("default names are distinct")
    }

    pub fn free_named(names: Vec<String>) -> Result<Self, GroupError> {
        assert!(!names.is_empty(), "free rank must be at least 1");
        Self::build(BackendKind::Free(names.len()), names, Vec::new())
    }

    pub fn free_abelian(rank: usize) -> Self {
        assert!(rank >= 1, "abelian rank must be at least 1");
        Self::build(
            BackendKind::FreeAbelian(rank),
            Vec::new(),
            default_abelian_names(rank),
        )
        .expect("default names are distinct")
    }

    pub fn product(free_rank: usize) -> Self {
        Self::product_named(default_free_names(free_rank), "z".to_string())
            .expect("default names are distinct")
    }

    pub fn product_named(free_names: Vec<String>, central: String) -> Result<Self, GroupError> {
        assert!(!free_names.is_empty(), "free rank must be at least 1");
        Self::build(
            BackendKind::Product(free_names.len()),
            free_names,
            vec![central],
        )
    }

    fn build(
        kind: BackendKind,
        free_names: Vec<String>,
        abelian_names: Vec<String>,
    ) -> Result<Self, GroupError> {
        let mut lookup = HashMap::new();
        for (i, n) in free_names.iter().enumerate() {
            if n.is_empty() || lookup.insert(n.clone(), Slot::Free(i)).is_some() {
                return Err(GroupError::MalformedWord(format!(
                    "duplicate or empty generator name `{n}`"
                )));
            }
        }
        for (i, n) in abelian_names.iter().enumerate() {
            if n.is_empty() || lookup.insert(n.clone(), Slot::Abelian(i)).is_some() {
                return Err(GroupError::MalformedWord(format!(
                    "duplicate or empty generator name `{n}`"
                )));
            }
        }
        Ok(BackendSpec {
            kind,
            free_names,
            abelian_names,
            lookup,
        })
    }

    pub fn free_rank(&self) -> usize {
        match self.kind {
            BackendKind::Free(k) => k,
            BackendKind::Product(k) => k,
            BackendKind::FreeAbelian(_) => 0,
        }
    }

    pub fn abelian_rank(&self) -> usize {
        match self.kind {
            BackendKind::FreeAbelian(n) => n,
            BackendKind::Product(_) => 1,
            BackendKind::Free(_) => 0,
        }
    }

    pub fn free_names(&self) -> &[String] {
        &self.free_names
    }

    pub fn abelian_names(&self) -> &[String] {
        &self.abelian_names
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            BackendKind::Free(_) => GroupElement::Free(FreeWord::identity()),
            BackendKind::FreeAbelian(n) => GroupElement::Abelian(vec![0; n]),
            BackendKind::Product(_) => GroupElement::Product(FreeWord::identity(), 0),
        }
    }

    /// Canonicalizes a word: free reduction, coordinate summation, or both
    /// componentwise for products.
    pub fn canonicalize(&self, w: &Word) -> Result<GroupElement, GroupError> {
        match self.kind {
            BackendKind::Free(_) => {
                let mut fw = FreeWord::identity();
                for sym in &w.0 {
                    match self.lookup.get(&sym.name) {
                        Some(Slot::Free(i)) => {
                            let l = *i as i32 + 1;
                            fw.push_reduce(if sym.inverse { -l } else { l });
                        }
                        _ => return Err(GroupError::UnknownGenerator(sym.name.clone())),
                    }
                }
                Ok(GroupElement::Free(fw))
            }
            BackendKind::FreeAbelian(n) => {
                let mut v = vec![0i64; n];
                for sym in &w.0 {
                    match self.lookup.get(&sym.name) {
                        Some(Slot::Abelian(i)) => v[*i] += if sym.inverse { -1 } else { 1 },
                        _ => return Err(GroupError::UnknownGenerator(sym.name.clone())),
                    }
                }
                Ok(GroupElement::Abelian(v))
            }
            BackendKind::Product(_) => {
                let mut fw = FreeWord::identity();
                let mut m = 0i64;
                for sym in &w.0 {
                    match self.lookup.get(&sym.name) {
                        Some(Slot::Free(i)) => {
                            let l = *i as i32 + 1;
                            fw.push_reduce(if sym.inverse { -l } else { l });
                        }
                        Some(Slot::Abelian(_)) => m += if sym.inverse { -1 } else { 1 },
                        None => return Err(GroupError::UnknownGenerator(sym.name.clone())),
                    }
                }
                Ok(GroupElement::Product(fw, m))
            }
        }
    }

    pub fn element_from_str(&self, text: &str) -> Result<GroupElement, GroupError> {
        self.canonicalize(&Word::parse(text)?)
    }

    fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        let ok = match (&self.kind, a) {
            (BackendKind::Free(k), GroupElement::Free(w)) => {
                w.0.iter().all(|l| (l.unsigned_abs() as usize) <= *k)
            }
            (BackendKind::FreeAbelian(n), GroupElement::Abelian(v)) => v.len() == *n,
            (BackendKind::Product(k), GroupElement::Product(w, _)) => {
                w.0.iter().all(|l| (l.unsigned_abs() as usize) <= *k)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::BackendMismatch(format!(
                "element {a:?} does not live in backend {:?}",
                self.kind
            )))
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (GroupElement::Free(x), GroupElement::Free(y)) => GroupElement::Free(x.concat(y)),
            (GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                GroupElement::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupElement::Product(x, m), GroupElement::Product(y, n)) => {
                GroupElement::Product(x.concat(y), m + n)
            }
            _ => unreachable!("check() rules out mixed variants"),
        })
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(match a {
            GroupElement::Free(x) => GroupElement::Free(x.inverse()),
            GroupElement::Abelian(v) => GroupElement::Abelian(v.iter().map(|p| -p).collect()),
            GroupElement::Product(x, m) => GroupElement::Product(x.inverse(), -m),
        })
    }

    /// Word length with respect to the standard generators: reduced length,
    /// l1 norm, or their sum for products.
    pub fn word_length(&self, a: &GroupElement) -> u64 {
        match a {
            GroupElement::Free(w) => w.len() as u64,
            GroupElement::Abelian(v) => v.iter().map(|p| p.unsigned_abs()).sum(),
            GroupElement::Product(w, m) => w.len() as u64 + m.unsigned_abs(),
        }
    }

    /// All 2k (+2 for products) signed standard generators, in a fixed
    /// deterministic order.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        match self.kind {
            BackendKind::Free(k) => {
                for i in 0..k {
                    out.push(GroupElement::Free(FreeWord(vec![i as i32 + 1])));
                    out.push(GroupElement::Free(FreeWord(vec![-(i as i32 + 1)])));
                }
            }
            BackendKind::FreeAbelian(n) => {
                for i in 0..n {
                    for s in [1i64, -1] {
                        let mut v = vec![0i64; n];
                        v[i] = s;
                        out.push(GroupElement::Abelian(v));
                    }
                }
            }
            BackendKind::Product(k) => {
                for i in 0..k {
                    out.push(GroupElement::Product(FreeWord(vec![i as i32 + 1]), 0));
                    out.push(GroupElement::Product(FreeWord(vec![-(i as i32 + 1)]), 0));
                }
                out.push(GroupElement::Product(FreeWord::identity(), 1));
                out.push(GroupElement::Product(FreeWord::identity(), -1));
            }
        }
        out
    }

    /// Number of elements of word length exactly `l` in a free group of the
    /// given rank.
    fn free_sphere(rank: usize, l: u32) -> u128 {
        if l == 0 {
            return 1;
        }
        let k = rank as u128;
        2 * k * (2 * k - 1).pow(l - 1)
    }

    /// Closed-form cardinality of the radius-`r` ball.
    pub fn ball_size(&self, r: u32) -> u128 {
        match self.kind {
            BackendKind::Free(k) => (0..=r).map(|l| Self::free_sphere(k, l)).sum(),
            BackendKind::FreeAbelian(n) => {
                // Delannoy-style recursion: ball sizes of Z^n under l1.
                let mut counts = vec![1u128; r as usize + 1]; // rank 0
                for _ in 0..n {
                    let mut next = vec![0u128; r as usize + 1];
                    for radius in 0..=r as usize {
                        // sphere of radius s in Z^(d): sum over |last coord|
                        let mut total = 0u128;
                        for last in 0..=radius {
                            let rem = counts[radius - last];
                            total += if last == 0 { rem } else { 2 * rem };
                        }
                        next[radius] = total;
                    }
                    counts = next;
                }
                counts[r as usize]
            }
            BackendKind::Product(k) => (0..=r)
                .map(|l| {
                    let central = 2 * (r - l) as u128 + 1;
                    Self::free_sphere(k, l) * central
                })
                .sum(),
        }
    }

    /// Enumerates `{ g : word_length(g) <= r }` in a deterministic order.
    /// Fails with `BudgetExceeded` before allocating when the closed-form
    /// count is over budget.
    pub fn ball(&self, r: u32, budget: usize) -> Result<Vec<GroupElement>, GroupError> {
        let size = self.ball_size(r);
        if size > budget as u128 {
            return Err(GroupError::BudgetExceeded {
                requested: size.min(usize::MAX as u128) as usize,
                budget,
            });
        }
        let mut out = Vec::with_capacity(size as usize);
        match self.kind {
            BackendKind::Free(k) => {
                for w in free_ball_words(k, r) {
                    out.push(GroupElement::Free(w));
                }
            }
            BackendKind::FreeAbelian(n) => {
                let mut v = vec![0i64; n];
                abelian_ball_rec(&mut v, 0, r as i64, &mut |v| {
                    out.push(GroupElement::Abelian(v.to_vec()))
                });
            }
            BackendKind::Product(k) => {
                for w in free_ball_words(k, r) {
                    let rem = r as i64 - w.len() as i64;
                    out.push(GroupElement::Product(w.clone(), 0));
                    for m in 1..=rem {
                        out.push(GroupElement::Product(w.clone(), m));
                        out.push(GroupElement::Product(w.clone(), -m));
                    }
                }
            }
        }
        debug_assert_eq!(out.len() as u128, size);
        Ok(out)
    }

    /// Renders an element as whitespace-separated symbols with `^-1`
    /// suffixes; the identity renders as the empty string.
    pub fn render(&self, a: &GroupElement) -> String {
        let mut parts: Vec<String> = Vec::new();
        let push_free = |parts: &mut Vec<String>, w: &FreeWord, names: &[String]| {
            for &l in &w.0 {
                let name = &names[(l.unsigned_abs() - 1) as usize];
                if l > 0 {
                    parts.push(name.clone());
                } else {
                    parts.push(format!("{name}^-1"));
                }
            }
        };
        match a {
            GroupElement::Free(w) => push_free(&mut parts, w, &self.free_names),
            GroupElement::Abelian(v) => {
                for (i, &m) in v.iter().enumerate() {
                    let name = &self.abelian_names[i];
                    for _ in 0..m.unsigned_abs() {
                        if m > 0 {
                            parts.push(name.clone());
                        } else {
                            parts.push(format!("{name}^-1"));
                        }
                    }
                }
            }
            GroupElement::Product(w, m) => {
                push_free(&mut parts, w, &self.free_names);
                let name = &self.abelian_names[0];
                for _ in 0..m.unsigned_abs() {
                    if *m > 0 {
                        parts.push(name.clone());
                    } else {
                        parts.push(format!("{name}^-1"));
                    }
                }
            }
        }
        parts.join(" ")
    }

    /// Shortlex comparison of canonical elements (length, then generator
    /// order with positive letters before negative, free part before the
    /// central part).
    pub fn cmp_shortlex(&self, a: &GroupElement, b: &GroupElement) -> Ordering {
        self.word_length(a)
            .cmp(&self.word_length(b))
            .then_with(|| self.shortlex_key(a).cmp(&self.shortlex_key(b)))
    }

    fn shortlex_key(&self, a: &GroupElement) -> Vec<u32> {
        let mut key = Vec::new();
        let base = 2 * self.free_rank() as u32;
        match a {
            GroupElement::Free(w) => key.extend(w.0.iter().map(|&l| letter_rank(l))),
            GroupElement::Abelian(v) => {
                for (i, &m) in v.iter().enumerate() {
                    for _ in 0..m.unsigned_abs() {
                        key.push(2 * i as u32 + u32::from(m < 0));
                    }
                }
            }
            GroupElement::Product(w, m) => {
                key.extend(w.0.iter().map(|&l| letter_rank(l)));
                for _ in 0..m.unsigned_abs() {
                    key.push(base + u32::from(*m < 0));
                }
            }
        }
        key
    }
}

fn free_ball_words(rank: usize, r: u32) -> Vec<FreeWord> {
    let mut all: Vec<FreeWord> = vec![FreeWord::identity()];
    let mut layer: Vec<FreeWord> = vec![FreeWord::identity()];
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|i| [i, -i]).collect();
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.0.last() == Some(&-l) {
                    continue;
                }
                let mut ext = w.clone();
                ext.0.push(l);
                next.push(ext);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn abelian_ball_rec(v: &mut Vec<i64>, idx: usize, rem: i64, emit: &mut impl FnMut(&[i64])) {
    if idx == v.len() {
        emit(v);
        return;
    }
    for m in 0..=rem {
        let signs: &[i64] = if m == 0 { &[1] } else { &[1, -1] };
        for &s in signs {
            v[idx] = s * m;
            abelian_ball_rec(v, idx + 1, rem - m, emit);
        }
    }
    v[idx] = 0;
}

/// Decides whether `w` is a power of `u`, returning the exponent.
/// Errors when `u` is the identity.
pub fn cyclic_membership(w: &FreeWord, u: &FreeWord) -> Result<Option<i64>, GroupError> {
    if u.is_identity() {
        return Err(GroupError::IdentityBase);
    }
    Ok(w.power_of(u))
}
