//! Words and canonical normal forms for the fundamental group of a graph of
//! groups.
//!
//! A [`GoGWord`] is a position-coherent token sequence starting at the base
//! vertex: vertex letters, silent crossings of spanning-tree edges, and
//! stable letters for the remaining edges. [`reduce`] folds a word into its
//! unique [`NormalForm`]: an alternating sequence `g0 e1 g1 ... en gn` where
//! every intermediate `gi` is the canonical coset representative for the
//! next crossed edge and no pinch `e g e-bar` with `g` in the edge subgroup
//! remains. Normal forms are the equality and hash keys for everything
//! downstream.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gog::{GogError, GraphOfGroups};
use crate::groupcore::{GroupElement, Word};

#[derive(Debug, Error)]
pub enum WordError {
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// One token of a word over the graph-of-groups presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordToken {
    /// A word in the generators of the vertex backend at `vertex`.
    Vertex { vertex: usize, word: Word },
    /// Silent crossing of a spanning-tree edge (oriented).
    Cross { edge: usize },
    /// A stable letter for a non-tree edge; `inverse` crosses the reverse.
    Stable { edge: usize, inverse: bool },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoGWord(pub Vec<WordToken>);

/// Canonical alternating form `head e1 g1 ... en gn`. The head is an
/// element of the base vertex backend; each tail entry crosses an oriented
/// edge and carries an element of that edge's target backend. All elements
/// before a crossing are canonical coset representatives for it, and no
/// Britton pinch remains.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub head: GroupElement,
    pub tail: Vec<(usize, GroupElement)>,
}

impl NormalForm {
    pub fn identity(gog: &GraphOfGroups) -> Self {
        NormalForm {
            head: gog.backend(gog.base_vertex()).identity(),
            tail: Vec::new(),
        }
    }

    pub fn terminal(&self, gog: &GraphOfGroups) -> usize {
        match self.tail.last() {
            None => gog.base_vertex(),
            Some((e, _)) => gog.edge(*e).target,
        }
    }

    pub fn is_identity(&self, gog: &GraphOfGroups) -> bool {
        self.tail.is_empty() && self.head == gog.backend(gog.base_vertex()).identity()
    }

    /// Number of edge crossings in the reduced form.
    pub fn crossings(&self) -> usize {
        self.tail.len()
    }

    /// The final vertex-group element: the position within the terminal
    /// vertex space.
    pub fn last_element(&self) -> &GroupElement {
        match self.tail.last() {
            None => &self.head,
            Some((_, g)) => g,
        }
    }

    /// The same alternating form with the final element replaced.
    pub fn with_last(&self, g: GroupElement) -> NormalForm {
        let mut out = self.clone();
        match out.tail.last_mut() {
            None => out.head = g,
            Some((_, slot)) => *slot = g,
        }
        out
    }

    fn last_element_mut(&mut self) -> &mut GroupElement {
        match self.tail.last_mut() {
            None => &mut self.head,
            Some((_, g)) => g,
        }
    }

    /// Multiplies a vertex-backend element onto the right end.
    fn push_vertex(&mut self, gog: &GraphOfGroups, g: &GroupElement) -> Result<(), WordError> {
        let v = self.terminal(gog);
        let backend = gog.backend(v);
        let merged = backend.multiply(self.last_element(), g).map_err(GogError::from)?;
        *self.last_element_mut() = merged;
        Ok(())
    }

    /// Crosses the oriented edge `e` (terminal must be its source),
    /// maintaining the normal-form invariants: split the last element into
    /// coset representative and edge part, either pinch with the previous
    /// crossing or append a new one.
    fn push_crossing(&mut self, gog: &GraphOfGroups, e: usize) -> Result<(), WordError> {
        let v = self.terminal(gog);
        if gog.edge(e).source != v {
            return Err(WordError::MalformedWord(format!(
                "crossing `{}` starts at `{}`, but the word is at `{}`",
                gog.edge(e).id,
                gog.vertex_id(gog.edge(e).source),
                gog.vertex_id(v)
            )));
        }
        let backend = gog.backend(v);
        let last = self.last_element().clone();
        let rep = gog.coset_rep(&last, e)?;
        let part = backend
            .multiply(&backend.invert(&rep).map_err(GogError::from)?, &last)
            .map_err(GogError::from)?;
        let image = gog.tau_element(e, &part)?;
        let pinch = match self.tail.last() {
            Some((prev, _)) => *prev == gog.edge(e).reverse && rep == backend.identity(),
            None => false,
        };
        if pinch {
            self.tail.pop();
            self.push_vertex(gog, &image)?;
        } else {
            *self.last_element_mut() = rep;
            self.tail.push((e, image));
        }
        Ok(())
    }
}

/// Reduces a word to its canonical normal form. Two well-formed words
/// denote the same element of the fundamental groupoid (based at the base
/// vertex) iff their reduced forms are identical.
pub fn reduce(gog: &GraphOfGroups, word: &GoGWord) -> Result<NormalForm, WordError> {
    let mut nf = NormalForm::identity(gog);
    for tok in &word.0 {
        match tok {
            WordToken::Vertex { vertex, word } => {
                let at = nf.terminal(gog);
                if *vertex != at {
                    return Err(WordError::MalformedWord(format!(
                        "vertex letter at `{}` but the word is at `{}`",
                        gog.vertex_id(*vertex),
                        gog.vertex_id(at)
                    )));
                }
                let g = gog
                    .backend(*vertex)
                    .canonicalize(word)
                    .map_err(GogError::from)?;
                nf.push_vertex(gog, &g)?;
            }
            WordToken::Cross { edge } => {
                if !gog.is_tree_edge(*edge) {
                    return Err(WordError::MalformedWord(format!(
                        "edge `{}` is not a spanning-tree edge; use its stable letter",
                        gog.edge(*edge).id
                    )));
                }
                nf.push_crossing(gog, *edge)?;
            }
            WordToken::Stable { edge, inverse } => {
                if gog.is_tree_edge(*edge) {
                    return Err(WordError::MalformedWord(format!(
                        "edge `{}` is a spanning-tree edge; use a silent crossing",
                        gog.edge(*edge).id
                    )));
                }
                let oriented = if *inverse {
                    gog.edge(*edge).reverse
                } else {
                    *edge
                };
                nf.push_crossing(gog, oriented)?;
            }
        }
    }
    Ok(nf)
}

/// True iff the word reduces to the identity normal form at the base vertex.
pub fn is_identity(gog: &GraphOfGroups, word: &GoGWord) -> Result<bool, WordError> {
    Ok(reduce(gog, word)?.is_identity(gog))
}

/// Appends one crossing of `e` to a reduced form (exposed for ball search).
pub fn cross(gog: &GraphOfGroups, nf: &NormalForm, e: usize) -> Result<NormalForm, WordError> {
    let mut out = nf.clone();
    out.push_crossing(gog, e)?;
    Ok(out)
}

/// Multiplies a vertex-backend element onto a reduced form.
pub fn append_vertex(
    gog: &GraphOfGroups,
    nf: &NormalForm,
    g: &GroupElement,
) -> Result<NormalForm, WordError> {
    let mut out = nf.clone();
    out.push_vertex(gog, g)?;
    Ok(out)
}

/// Product of two reduced forms; the second must be based where the first
/// terminates (elements based at the base vertex always compose).
pub fn multiply_nf(
    gog: &GraphOfGroups,
    a: &NormalForm,
    b: &NormalForm,
) -> Result<NormalForm, WordError> {
    if a.terminal(gog) != gog.base_vertex() {
        return Err(WordError::MalformedWord(
            "left factor must terminate at the base vertex to compose".to_string(),
        ));
    }
    let mut out = a.clone();
    out.push_vertex(gog, &b.head)?;
    for (e, g) in &b.tail {
        out.push_crossing(gog, *e)?;
        out.push_vertex(gog, g)?;
    }
    Ok(out)
}

/// Inverse of a reduced form that terminates at the base vertex.
pub fn invert_nf(gog: &GraphOfGroups, a: &NormalForm) -> Result<NormalForm, WordError> {
    if a.terminal(gog) != gog.base_vertex() {
        return Err(WordError::MalformedWord(
            "only loops based at the base vertex can be inverted".to_string(),
        ));
    }
    let mut out = NormalForm::identity(gog);
    // walk the alternating form backwards, inverting letters and crossings
    let mut elements = vec![a.head.clone()];
    let mut crossings = Vec::new();
    for (e, g) in &a.tail {
        crossings.push(*e);
        elements.push(g.clone());
    }
    for i in (0..elements.len()).rev() {
        let v = if i == 0 {
            gog.base_vertex()
        } else {
            gog.edge(crossings[i - 1]).target
        };
        let inv = gog
            .backend(v)
            .invert(&elements[i])
            .map_err(GogError::from)?;
        out.push_vertex(gog, &inv)?;
        if i > 0 {
            out.push_crossing(gog, gog.edge(crossings[i - 1]).reverse)?;
        }
    }
    Ok(out)
}

/// Token-level inverse of a word: reversed tokens with inverted letters and
/// crossings. `w . invert_word(w)` is always the identity.
pub fn invert_word(gog: &GraphOfGroups, word: &GoGWord) -> GoGWord {
    let mut out = Vec::with_capacity(word.0.len());
    for tok in word.0.iter().rev() {
        out.push(match tok {
            WordToken::Vertex { vertex, word } => {
                let mut letters = word.0.clone();
                letters.reverse();
                for l in &mut letters {
                    l.inverse = !l.inverse;
                }
                WordToken::Vertex {
                    vertex: *vertex,
                    word: Word(letters),
                }
            }
            WordToken::Cross { edge } => WordToken::Cross {
                edge: gog.edge(*edge).reverse,
            },
            WordToken::Stable { edge, inverse } => WordToken::Stable {
                edge: *edge,
                inverse: !inverse,
            },
        });
    }
    GoGWord(out)
}

/// Deterministic random position-coherent word: `length` tokens drawn
/// uniformly from the signed generators of the current vertex backend and
/// the incident edge crossings.
pub fn random_word(gog: &GraphOfGroups, seed: u64, length: usize) -> GoGWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens = Vec::with_capacity(length);
    let mut at = gog.base_vertex();
    for _ in 0..length {
        let backend = gog.backend(at);
        let gens = backend.generators();
        let link = gog.link(at);
        let total = gens.len() + link.len();
        let pick = rng.random_range(0..total);
        if pick < gens.len() {
            let g = &gens[pick];
            let text = backend.render(g);
            tokens.push(WordToken::Vertex {
                vertex: at,
                word: Word::parse(&text).expect("rendered words parse"),
            });
        } else {
            let e = link[pick - gens.len()];
            if gog.is_tree_edge(e) {
                tokens.push(WordToken::Cross { edge: e });
            } else {
                tokens.push(WordToken::Stable {
                    edge: e,
                    inverse: false,
                });
            }
            at = gog.edge(e).target;
        }
    }
    GoGWord(tokens)
}

/// Renders a normal form in the word syntax: `v0[letters] e1 v1[letters] ...`
/// with `e<i>` for tree crossings and `t<i>` for stable letters.
pub fn render_nf(gog: &GraphOfGroups, nf: &NormalForm) -> String {
    let mut parts = Vec::new();
    let base = gog.base_vertex();
    parts.push(format!(
        "{}[{}]",
        gog.vertex_id(base),
        gog.backend(base).render(&nf.head)
    ));
    for (e, g) in &nf.tail {
        let id = &gog.edge(*e).id;
        let digits: String = id.chars().filter(|c| c.is_ascii_digit()).collect();
        if gog.is_tree_edge(*e) {
            parts.push(format!("e{digits}"));
        } else {
            parts.push(format!("t{digits}"));
        }
        let v = gog.edge(*e).target;
        parts.push(format!(
            "{}[{}]",
            gog.vertex_id(v),
            gog.backend(v).render(g)
        ));
    }
    parts.join(" ")
}

/// Parses the textual word syntax: whitespace-separated tokens
/// `v<i>[letters]`, `e<i>`, `t<i>`, `t<i>^-1`.
pub fn parse_word(gog: &GraphOfGroups, text: &str) -> Result<GoGWord, WordError> {
    let mut tokens = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let tok_end = match rest.find('[') {
            Some(open) if open < rest.find(char::is_whitespace).unwrap_or(usize::MAX) => {
                // bracketed vertex letter: consume through the matching ']'
                let close = rest[open..].find(']').ok_or_else(|| {
                    WordError::MalformedWord(format!("missing `]` in `{rest}`"))
                })? + open;
                close + 1
            }
            _ => rest.find(char::is_whitespace).unwrap_or(rest.len()),
        };
        let tok = &rest[..tok_end];
        rest = rest[tok_end..].trim_start();

        if let Some(open) = tok.find('[') {
            let id = &tok[..open];
            let inner = &tok[open + 1..tok.len() - 1];
            let vertex = gog
                .vertex_index(id)
                .ok_or_else(|| WordError::MalformedWord(format!("unknown vertex `{id}`")))?;
            let word = Word::parse(inner).map_err(GogError::from)?;
            tokens.push(WordToken::Vertex { vertex, word });
        } else if let Some(body) = tok.strip_prefix('t') {
            let (digits, inverse) = match body.strip_suffix("^-1") {
                Some(d) => (d, true),
                None => (body, false),
            };
            let id = format!("e{digits}");
            let edge = gog
                .edge_index(&id)
                .ok_or_else(|| WordError::MalformedWord(format!("unknown edge `{id}`")))?;
            tokens.push(WordToken::Stable { edge, inverse });
        } else if tok.starts_with('e') {
            let edge = gog
                .edge_index(tok)
                .ok_or_else(|| WordError::MalformedWord(format!("unknown edge `{tok}`")))?;
            tokens.push(WordToken::Cross { edge });
        } else {
            return Err(WordError::MalformedWord(format!("unrecognized token `{tok}`")));
        }
    }
    Ok(GoGWord(tokens))
}

/// Inserts a random identity-preserving rewrite into a word: a cancelling
/// generator pair, a pinch pair `e tau(a) e-bar` in place of the edge letter
/// `a`, or an edge-relation rewriting moving an edge letter across a
/// crossing. Returns the rewritten word (equal as a group element).
pub fn random_trivial_insertion(
    gog: &GraphOfGroups,
    word: &GoGWord,
    rng: &mut ChaCha8Rng,
) -> GoGWord {
    // positions are "gaps" between tokens; track the vertex at each gap
    let mut at = gog.base_vertex();
    let mut gaps = vec![at];
    for tok in &word.0 {
        match tok {
            WordToken::Vertex { .. } => {}
            WordToken::Cross { edge } => at = gog.edge(*edge).target,
            WordToken::Stable { edge, inverse } => {
                let oriented = if *inverse {
                    gog.edge(*edge).reverse
                } else {
                    *edge
                };
                at = gog.edge(oriented).target;
            }
        }
        gaps.push(at);
    }
    let pos = rng.random_range(0..gaps.len());
    let v = gaps[pos];
    let backend = gog.backend(v);
    let kind = rng.random_range(0..3u32);
    let insert: Vec<WordToken> = match kind {
        0 => {
            // g g^-1 for a random generator
            let gens = backend.generators();
            let g = &gens[rng.random_range(0..gens.len())];
            let text = backend.render(g);
            let inv = backend.render(&backend.invert(g).unwrap());
            vec![
                WordToken::Vertex {
                    vertex: v,
                    word: Word::parse(&text).unwrap(),
                },
                WordToken::Vertex {
                    vertex: v,
                    word: Word::parse(&inv).unwrap(),
                },
            ]
        }
        1 => {
            // pinch pair: cross e, drop tau_e(a), cross back, then cancel
            // with a^-1 spelled at v — in total the identity
            let link = gog.link(v);
            let e = link[rng.random_range(0..link.len())];
            let k1 = rng.random_range(-2..=2i64);
            let k2 = rng.random_range(-2..=2i64);
            let a = gog.edge_element(e, (k1, k2)).unwrap();
            let image = gog.tau_element(e, &a).unwrap();
            let w = gog.edge(e).target;
            let tok = |edge: usize| {
                if gog.is_tree_edge(edge) {
                    WordToken::Cross { edge }
                } else {
                    WordToken::Stable {
                        edge,
                        inverse: false,
                    }
                }
            };
            vec![
                tok(e),
                WordToken::Vertex {
                    vertex: w,
                    word: Word::parse(&gog.backend(w).render(&image)).unwrap(),
                },
                tok(gog.edge(e).reverse),
                WordToken::Vertex {
                    vertex: v,
                    word: Word::parse(&backend.render(&backend.invert(&a).unwrap())).unwrap(),
                },
            ]
        }
        _ => {
            // edge relation: a . e . tau(a)^-1 . e-bar
            let link = gog.link(v);
            let e = link[rng.random_range(0..link.len())];
            let k1 = rng.random_range(-2..=2i64);
            let k2 = rng.random_range(-2..=2i64);
            let a = gog.edge_element(e, (k1, k2)).unwrap();
            let image = gog.tau_element(e, &a).unwrap();
            let w = gog.edge(e).target;
            let tok = |edge: usize| {
                if gog.is_tree_edge(edge) {
                    WordToken::Cross { edge }
                } else {
                    WordToken::Stable {
                        edge,
                        inverse: false,
                    }
                }
            };
            vec![
                WordToken::Vertex {
                    vertex: v,
                    word: Word::parse(&backend.render(&a)).unwrap(),
                },
                tok(e),
                WordToken::Vertex {
                    vertex: w,
                    word: Word::parse(&gog.backend(w).render(&gog.backend(w).invert(&image).unwrap()))
                        .unwrap(),
                },
                tok(gog.edge(e).reverse),
            ]
        }
    };
    let mut tokens = word.0.clone();
    // splice at the token index corresponding to the chosen gap
    tokens.splice(pos..pos, insert);
    GoGWord(tokens)
}
