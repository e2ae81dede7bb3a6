//! Python bindings for the workbench: configs, admissibility checks, balls
//! of the tree of spaces, normal forms, and the metric experiments.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use admissible_core::config::{parse_config, parse_config_str};
use admissible_core::cusped::{
    build_cusped, build_horoball, cayley_ball_graph, estimate_delta, DeltaMethod, MetricGraph,
};
use admissible_core::gog::Verdict;
use admissible_core::groupcore::{BackendSpec, GroupElement};
use admissible_core::lattice::{lattice_index, LatticeIndex};
use admissible_core::normalform;
use admissible_core::quotient::{proj_bound_free, verify_dist_projs};
use admissible_core::treespace::{build_ball, IntrinsicMetric, DEFAULT_BUDGET};
use admissible_core::GraphOfGroups;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A parsed, validated workbench configuration.
#[pyclass]
struct Workbench {
    gog: Arc<GraphOfGroups>,
    name: String,
    content_hash: u64,
    budget: usize,
}

#[pymethods]
impl Workbench {
    #[new]
    fn new(config_text: &str) -> PyResult<Self> {
        let cfg = parse_config_str(config_text).map_err(value_err)?;
        Ok(Workbench {
            gog: Arc::new(cfg.gog),
            name: cfg.name,
            content_hash: cfg.content_hash,
            budget: cfg.budget_vertices,
        })
    }

    #[staticmethod]
    fn from_path(path: PathBuf) -> PyResult<Self> {
        let cfg = parse_config(&path).map_err(value_err)?;
        Ok(Workbench {
            gog: Arc::new(cfg.gog),
            name: cfg.name,
            content_hash: cfg.content_hash,
            budget: cfg.budget_vertices,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    #[getter]
    fn content_hash(&self) -> u64 {
        self.content_hash
    }

    fn vertex_ids(&self) -> Vec<String> {
        (0..self.gog.vertex_count())
            .map(|v| self.gog.vertex_id(v).to_string())
            .collect()
    }

    fn edge_ids(&self) -> Vec<String> {
        self.gog.all_edges().iter().map(|e| e.id.clone()).collect()
    }

    /// Structural violations (empty list = valid).
    fn validate(&self) -> Vec<String> {
        self.gog.validate().violations
    }

    /// Runs the admissibility conditions; returns a dict with per-condition
    /// verdicts, witnesses, and kernel lattice indices.
    fn check_admissible<'py>(&self, py: Python<'py>, radius: u32) -> PyResult<Bound<'py, PyDict>> {
        let report = self.gog.check_admissibility(radius).map_err(runtime_err)?;
        let out = PyDict::new(py);
        out.set_item("passed", report.passed())?;
        out.set_item("radius", report.radius)?;
        let conditions: Vec<(String, String, Vec<String>)> = report
            .conditions
            .iter()
            .map(|c| {
                let verdict = match c.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                    Verdict::InconclusiveAtRadius => "inconclusive-at-radius",
                };
                (c.name.to_string(), verdict.to_string(), c.witnesses.clone())
            })
            .collect();
        out.set_item("conditions", conditions)?;
        let kernels: Vec<(String, Option<u64>)> = report
            .kernel_indices
            .iter()
            .map(|(id, idx)| {
                let v = match idx {
                    LatticeIndex::Finite(d) => Some(*d),
                    LatticeIndex::Infinite => None,
                };
                (id.clone(), v)
            })
            .collect();
        out.set_item("kernel_indices", kernels)?;
        Ok(out)
    }

    /// Builds the radius-`radius` ball of the tree of spaces.
    #[pyo3(signature = (radius, budget=None))]
    fn build_ball(&self, radius: u32, budget: Option<usize>) -> PyResult<Ball> {
        let ball = build_ball(&self.gog, radius, budget.unwrap_or(self.budget))
            .map_err(runtime_err)?;
        Ok(Ball { inner: ball })
    }

    /// Reduces a word in the textual syntax to its normal form.
    fn reduce_word(&self, text: &str) -> PyResult<String> {
        let word = normalform::parse_word(&self.gog, text).map_err(value_err)?;
        let nf = normalform::reduce(&self.gog, &word).map_err(value_err)?;
        Ok(normalform::render_nf(&self.gog, &nf))
    }

    fn is_identity(&self, text: &str) -> PyResult<bool> {
        let word = normalform::parse_word(&self.gog, text).map_err(value_err)?;
        normalform::is_identity(&self.gog, &word).map_err(value_err)
    }

    /// Distortion profile of an edge space (kind="edge") or the source
    /// vertex space (kind="vertex") of the given edge.
    #[pyo3(signature = (edge, radius, seed, kind="edge"))]
    fn distortion<'py>(
        &self,
        py: Python<'py>,
        edge: &str,
        radius: u32,
        seed: u64,
        kind: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let e = self
            .gog
            .edge_index(edge)
            .ok_or_else(|| value_err(format!("unknown edge `{edge}`")))?;
        if self.gog.edge(e).source != self.gog.base_vertex() {
            return Err(value_err("edge source must be the base vertex"));
        }
        let ball = build_ball(&self.gog, radius, self.budget).map_err(runtime_err)?;
        let te = ball
            .tree_edge_of(0, e)
            .map_err(runtime_err)?
            .ok_or_else(|| runtime_err("edge space not visible in the ball"))?;
        let fwd = ball.tree_edges()[te as usize].edge == e;
        let (sel, metric) = match kind {
            "edge" => (
                ball.edge_space(te, fwd).map_err(runtime_err)?,
                IntrinsicMetric::EdgeL1,
            ),
            "vertex" => (
                ball.vertex_space(ball.vertex(0).tree_node)
                    .map_err(runtime_err)?,
                IntrinsicMetric::VertexWord,
            ),
            other => return Err(value_err(format!("kind must be edge or vertex, got {other}"))),
        };
        let prof = ball
            .distortion_profile(&sel, metric, Some(seed))
            .map_err(runtime_err)?;
        let out = PyDict::new(py);
        out.set_item("k", prof.k)?;
        out.set_item("a", prof.a)?;
        out.set_item("max_ratio", prof.max_ratio)?;
        out.set_item("pairs", prof.pairs)?;
        out.set_item("certified_pairs", prof.certified_pairs)?;
        out.set_item("sampled", prof.sampled)?;
        Ok(out)
    }

    /// Two-sided distance formula across an edge.
    #[pyo3(signature = (edge, radius, cap_k=2.0, cap_a=2.0))]
    fn dist_projs<'py>(
        &self,
        py: Python<'py>,
        edge: &str,
        radius: u32,
        cap_k: f64,
        cap_a: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let e = self
            .gog
            .edge_index(edge)
            .ok_or_else(|| value_err(format!("unknown edge `{edge}`")))?;
        let rep = verify_dist_projs(&self.gog, e, radius, (cap_k, cap_a)).map_err(runtime_err)?;
        let out = PyDict::new(py);
        out.set_item("k", rep.k)?;
        out.set_item("a", rep.a)?;
        out.set_item("violations", rep.violations)?;
        out.set_item("pairs", rep.rows.len())?;
        Ok(out)
    }
}

/// A finite ball of the tree of spaces.
#[pyclass]
struct Ball {
    inner: admissible_core::BallGraph,
}

#[pymethods]
impl Ball {
    #[getter]
    fn radius(&self) -> u32 {
        self.inner.radius
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn tree_node_count(&self) -> usize {
        self.inner.tree_nodes().len()
    }

    fn tree_edge_count(&self) -> usize {
        self.inner.tree_edges().len()
    }

    /// In-ball hop distance and its exactness certificate.
    fn distance(&self, a: u32, b: u32) -> PyResult<(u32, bool)> {
        self.inner.distance_certified(a, b).map_err(runtime_err)
    }

    fn dist0(&self, i: u32) -> PyResult<u32> {
        if (i as usize) < self.inner.vertex_count() {
            Ok(self.inner.dist0(i))
        } else {
            Err(value_err("vertex index out of range"))
        }
    }

    fn vertex_label(&self, i: u32) -> PyResult<String> {
        if (i as usize) < self.inner.vertex_count() {
            Ok(normalform::render_nf(
                &self.inner.gog,
                &self.inner.vertex(i).nf,
            ))
        } else {
            Err(value_err("vertex index out of range"))
        }
    }
}

/// Number of elements of the radius-`radius` ball of a free group.
#[pyfunction]
fn free_ball_count(rank: usize, radius: u32) -> u128 {
    BackendSpec::free(rank).ball_size(radius)
}

/// Index of the sublattice of Z^2 spanned by the given vectors
/// (None = infinite).
#[pyfunction]
fn sublattice_index(vectors: Vec<(i64, i64)>) -> Option<u64> {
    let vs: Vec<[i64; 2]> = vectors.iter().map(|&(a, b)| [a, b]).collect();
    match lattice_index(&vs) {
        LatticeIndex::Finite(d) => Some(d),
        LatticeIndex::Infinite => None,
    }
}

/// The exponent k with w = u^k in a free group, if any.
#[pyfunction]
#[pyo3(signature = (w, u, rank=2))]
fn cyclic_power(w: &str, u: &str, rank: usize) -> PyResult<Option<i64>> {
    let backend = BackendSpec::free(rank);
    let parse = |s: &str| -> PyResult<admissible_core::groupcore::FreeWord> {
        match backend.element_from_str(s).map_err(value_err)? {
            GroupElement::Free(w) => Ok(w),
            _ => Err(value_err("expected a free-group word")),
        }
    };
    admissible_core::groupcore::cyclic_membership(&parse(w)?, &parse(u)?).map_err(value_err)
}

/// Distance between `(a_t, a_n)` and `(b_t, b_n)` in the depth-`depth`
/// horoball over a path with `n_vertices` vertices.
#[pyfunction]
fn horoball_path_distance(
    n_vertices: usize,
    depth: u32,
    a_t: usize,
    a_n: u32,
    b_t: usize,
    b_n: u32,
) -> PyResult<u32> {
    let edges: Vec<(u32, u32)> = (0..n_vertices.saturating_sub(1))
        .map(|i| (i as u32, i as u32 + 1))
        .collect();
    let base = MetricGraph::from_edges(n_vertices, &edges);
    let h = build_horoball(&base, depth).map_err(value_err)?;
    let d = h.graph.bfs(h.vertex(a_t, a_n));
    Ok(d[h.vertex(b_t, b_n) as usize])
}

/// Gromov delta of a Cayley ball (`peripheral=None`) or a cusped space of a
/// free group over a cyclic peripheral subgroup.
#[pyfunction]
#[pyo3(signature = (base, radius, depth=3, peripheral=None, method="four-point", guard_margin=1))]
fn cusp_delta<'py>(
    py: Python<'py>,
    base: &str,
    radius: u32,
    depth: u32,
    peripheral: Option<&str>,
    method: &str,
    guard_margin: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let backend = if let Some(k) = base.strip_prefix("free") {
        BackendSpec::free(k.parse().map_err(|_| value_err("bad base"))?)
    } else if let Some(n) = base.strip_prefix("abelian") {
        BackendSpec::free_abelian(n.parse().map_err(|_| value_err("bad base"))?)
    } else {
        return Err(value_err("base must be free<k> or abelian<n>"));
    };
    let graph = match peripheral {
        Some(p) => {
            let u = match backend.element_from_str(p).map_err(value_err)? {
                GroupElement::Free(w) => w,
                _ => return Err(value_err("peripheral needs a free base")),
            };
            build_cusped(&backend, &u, radius, depth, DEFAULT_BUDGET)
                .map_err(runtime_err)?
                .graph
        }
        None => cayley_ball_graph(&backend, radius, DEFAULT_BUDGET)
            .map_err(runtime_err)?
            .0,
    };
    let m = match method {
        "four-point" => DeltaMethod::FourPoint,
        "basepoint" => DeltaMethod::Basepoint(0),
        other => return Err(value_err(format!("unknown method `{other}`"))),
    };
    let est = estimate_delta(&graph, m, guard_margin).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("delta", est.value())?;
    out.set_item("twice_delta", est.twice_value)?;
    out.set_item("vertices", graph.vertex_count())?;
    out.set_item("certified_vertices", est.certified_vertices)?;
    out.set_item("certified_quadruples", est.certified_quadruples)?;
    out.set_item("guard_margin", est.guard_margin)?;
    Ok(out)
}

/// Maximal projection diameter over distinct peripheral-coset pairs in a
/// free group.
#[pyfunction]
#[pyo3(signature = (rank, peripheral, radius, guard=true))]
fn proj_bound<'py>(
    py: Python<'py>,
    rank: usize,
    peripheral: &str,
    radius: u32,
    guard: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let backend = BackendSpec::free(rank);
    let u = match backend.element_from_str(peripheral).map_err(value_err)? {
        GroupElement::Free(w) if !w.is_identity() => w,
        _ => return Err(value_err("peripheral must be a nontrivial free word")),
    };
    let rep = proj_bound_free(rank, &u, radius, guard);
    let out = PyDict::new(py);
    out.set_item("lines", rep.lines)?;
    out.set_item("ordered_pairs", rep.ordered_pairs)?;
    out.set_item("max_diameter", rep.max_diameter)?;
    out.set_item("guard_excluded_points", rep.guard_excluded)?;
    Ok(out)
}

/// Gromov delta of an arbitrary connected graph given as an edge list.
#[pyfunction]
#[pyo3(signature = (n, edges, method="four-point"))]
fn graph_delta(n: usize, edges: Vec<(u32, u32)>, method: &str) -> PyResult<f64> {
    let g = MetricGraph::from_edges(n, &edges);
    let m = match method {
        "four-point" => DeltaMethod::FourPoint,
        "basepoint" => DeltaMethod::Basepoint(0),
        other => return Err(value_err(format!("unknown method `{other}`"))),
    };
    let est = estimate_delta(&g, m, 0).map_err(runtime_err)?;
    Ok(est.value())
}

#[pymodule]
fn admissible_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Workbench>()?;
    m.add_class::<Ball>()?;
    m.add_function(wrap_pyfunction!(free_ball_count, m)?)?;
    m.add_function(wrap_pyfunction!(sublattice_index, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_power, m)?)?;
    m.add_function(wrap_pyfunction!(horoball_path_distance, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_delta, m)?)?;
    m.add_function(wrap_pyfunction!(proj_bound, m)?)?;
    m.add_function(wrap_pyfunction!(graph_delta, m)?)?;
    Ok(())
}
