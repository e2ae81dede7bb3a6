//! The workbench config format.
//!
//! The native format is sectioned text with `key = value` fields:
//!
//! ```text
//! [graph]
//! name = torus-complex-3
//! base_vertex = v1          # optional, defaults to the least vertex id
//!
//! [vertex v1]
//! free_generators = a1 b2
//! central_generator = s1
//!
//! [edge e1]
//! source = v1
//! target = v2
//! reverse = e2
//! forward = true
//! basis = b2 | s1           # basis of the edge subgroup in the source group
//! images = s2 | a2          # images under the edge map, in the target group
//!
//! [limits]
//! budget_vertices = 5000000
//! ```
//!
//! A JSON-shaped variant with the same field names is accepted when the
//! input starts with `{`. Every parsed config is structurally validated;
//! a config that fails validation is rejected with the violation list.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::gog::{EdgeDecl, GogError, GraphOfGroups};
use crate::groupcore::{BackendSpec, GroupElement};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("schema error in {item}: {msg}")]
    Schema { item: String, msg: String },
    #[error("validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct WorkbenchConfig {
    pub gog: GraphOfGroups,
    pub name: String,
    pub budget_vertices: usize,
    /// FNV-1a content hash of the raw config text; embedded in reports so
    /// CSV artifacts are self-identifying.
    pub content_hash: u64,
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn parse_config(path: &Path) -> Result<WorkbenchConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<WorkbenchConfig, ConfigError> {
    let raw = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_sections(text)?
    };
    assemble(raw, text)
}

#[derive(Default)]
struct RawConfig {
    name: Option<String>,
    base_vertex: Option<String>,
    spanning_tree: Option<Vec<String>>,
    budget_vertices: Option<usize>,
    vertices: Vec<(String, HashMap<String, String>)>,
    edges: Vec<(String, HashMap<String, String>)>,
}

fn parse_sections(text: &str) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    let mut current: Option<(String, String, HashMap<String, String>)> = None;
    let mut graph_fields: HashMap<String, String> = HashMap::new();
    let mut limit_fields: HashMap<String, String> = HashMap::new();

    let mut flush = |cur: &mut Option<(String, String, HashMap<String, String>)>| {
        if let Some((kind, id, fields)) = cur.take() {
            match kind.as_str() {
                "vertex" => raw.vertices.push((id, fields)),
                "edge" => raw.edges.push((id, fields)),
                _ => {}
            }
        }
    };

    for (lineno, line0) in text.lines().enumerate() {
        let line = match line0.find('#') {
            Some(i) => &line0[..i],
            None => line0,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or(ConfigError::Parse {
                line: lineno + 1,
                msg: "missing `]`".to_string(),
            })?;
            let mut parts = body.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let id = parts.next().unwrap_or("").to_string();
            flush(&mut current);
            match kind.as_str() {
                "graph" | "limits" => {
                    current = Some((kind, String::new(), HashMap::new()));
                }
                "vertex" | "edge" => {
                    if id.is_empty() {
                        return Err(ConfigError::Parse {
                            line: lineno + 1,
                            msg: format!("section `{kind}` needs an identifier"),
                        });
                    }
                    current = Some((kind, id, HashMap::new()));
                }
                other => {
                    return Err(ConfigError::Parse {
                        line: lineno + 1,
                        msg: format!("unknown section `{other}`"),
                    });
                }
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: lineno + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        match &mut current {
            Some((kind, _, fields)) => {
                match kind.as_str() {
                    "graph" => {
                        graph_fields.insert(key, value);
                    }
                    "limits" => {
                        limit_fields.insert(key, value);
                    }
                    _ => {
                        fields.insert(key, value);
                    }
                };
            }
            None => {
                return Err(ConfigError::Parse {
                    line: lineno + 1,
                    msg: "field outside of any section".to_string(),
                });
            }
        }
    }
    flush(&mut current);

    raw.name = graph_fields.get("name").cloned();
    raw.base_vertex = graph_fields.get("base_vertex").cloned();
    raw.spanning_tree = graph_fields
        .get("spanning_tree")
        .map(|v| v.split_whitespace().map(String::from).collect());
    if let Some(b) = limit_fields.get("budget_vertices") {
        raw.budget_vertices = Some(b.parse().map_err(|_| ConfigError::Parse {
            line: 0,
            msg: format!("budget_vertices must be an integer, got `{b}`"),
        })?);
    }
    Ok(raw)
}

fn parse_json(text: &str) -> Result<RawConfig, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
    let mut raw = RawConfig::default();
    let obj = value.as_object().ok_or(ConfigError::Parse {
        line: 1,
        msg: "top level must be an object".to_string(),
    })?;
    if let Some(g) = obj.get("graph").and_then(|g| g.as_object()) {
        raw.name = g.get("name").and_then(|v| v.as_str()).map(String::from);
        raw.base_vertex = g
            .get("base_vertex")
            .and_then(|v| v.as_str())
            .map(String::from);
        raw.spanning_tree = g.get("spanning_tree").and_then(|v| v.as_array()).map(|a| {
            a.iter()
                .filter_map(|x| x.as_str().map(String::from))
                .collect()
        });
    }
    if let Some(l) = obj.get("limits").and_then(|g| g.as_object()) {
        raw.budget_vertices = l
            .get("budget_vertices")
            .and_then(|v| v.as_u64())
            .map(|v| v as usize);
    }
    let to_fields = |item: &serde_json::Map<String, serde_json::Value>| {
        let mut fields = HashMap::new();
        for (k, v) in item {
            if k == "id" {
                continue;
            }
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_str().unwrap_or_default().to_string())
                    .collect::<Vec<_>>()
                    .join(" | "),
                other => other.to_string(),
            };
            fields.insert(k.clone(), text);
        }
        fields
    };
    for key in ["vertices", "edges"] {
        let Some(arr) = obj.get(key).and_then(|v| v.as_array()) else {
            continue;
        };
        for item in arr {
            let item = item.as_object().ok_or(ConfigError::Parse {
                line: 1,
                msg: format!("entries of `{key}` must be objects"),
            })?;
            let id = item
                .get("id")
                .and_then(|v| v.as_str())
                .ok_or(ConfigError::Parse {
                    line: 1,
                    msg: format!("entries of `{key}` need an `id`"),
                })?
                .to_string();
            if key == "vertices" {
                raw.vertices.push((id, to_fields(item)));
            } else {
                raw.edges.push((id, to_fields(item)));
            }
        }
    }
    Ok(raw)
}

fn assemble(raw: RawConfig, text: &str) -> Result<WorkbenchConfig, ConfigError> {
    let mut vertices = Vec::new();
    let mut backends: HashMap<String, BackendSpec> = HashMap::new();
    for (id, fields) in &raw.vertices {
        let free = fields
            .get("free_generators")
            .ok_or_else(|| ConfigError::Schema {
                item: format!("vertex `{id}`"),
                msg: "missing `free_generators`".to_string(),
            })?;
        let central = fields
            .get("central_generator")
            .ok_or_else(|| ConfigError::Schema {
                item: format!("vertex `{id}`"),
                msg: "missing `central_generator`".to_string(),
            })?;
        let names: Vec<String> = free.split_whitespace().map(String::from).collect();
        if names.is_empty() {
            return Err(ConfigError::Schema {
                item: format!("vertex `{id}`"),
                msg: "free_generators must list at least one name".to_string(),
            });
        }
        let backend = BackendSpec::product_named(names, central.trim().to_string()).map_err(
            |e| ConfigError::Schema {
                item: format!("vertex `{id}`"),
                msg: e.to_string(),
            },
        )?;
        backends.insert(id.clone(), backend.clone());
        vertices.push((id.clone(), backend));
    }

    let edge_ids: Vec<String> = raw.edges.iter().map(|(id, _)| id.clone()).collect();
    let mut decls = Vec::new();
    for (id, fields) in &raw.edges {
        let get = |key: &str| -> Result<&String, ConfigError> {
            fields.get(key).ok_or_else(|| ConfigError::Schema {
                item: format!("edge `{id}`"),
                msg: format!("missing `{key}`"),
            })
        };
        let source = get("source")?.clone();
        let target = get("target")?.clone();
        let reverse = get("reverse")?.clone();
        if !edge_ids.contains(&reverse) {
            return Err(ConfigError::Schema {
                item: format!("edge `{id}`"),
                msg: format!("reverse edge `{reverse}` has no entry"),
            });
        }
        let forward = match fields.get("forward").map(String::as_str) {
            None => true,
            Some("true") | Some("yes") | Some("1") => true,
            Some("false") | Some("no") | Some("0") => false,
            Some(other) => {
                return Err(ConfigError::Schema {
                    item: format!("edge `{id}`"),
                    msg: format!("forward must be boolean, got `{other}`"),
                })
            }
        };
        let src_backend = backends.get(&source).ok_or_else(|| ConfigError::Schema {
            item: format!("edge `{id}`"),
            msg: format!("unknown source vertex `{source}`"),
        })?;
        let tgt_backend = backends.get(&target).ok_or_else(|| ConfigError::Schema {
            item: format!("edge `{id}`"),
            msg: format!("unknown target vertex `{target}`"),
        })?;
        let parse_pair = |backend: &BackendSpec,
                          key: &str|
         -> Result<[GroupElement; 2], ConfigError> {
            let text = get(key)?;
            let parts: Vec<&str> = text.split('|').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(ConfigError::Schema {
                    item: format!("edge `{id}`"),
                    msg: format!("`{key}` must list two elements separated by `|`"),
                });
            }
            let a = backend
                .element_from_str(parts[0])
                .map_err(|e| ConfigError::Schema {
                    item: format!("edge `{id}`"),
                    msg: format!("{key}[0]: {e}"),
                })?;
            let b = backend
                .element_from_str(parts[1])
                .map_err(|e| ConfigError::Schema {
                    item: format!("edge `{id}`"),
                    msg: format!("{key}[1]: {e}"),
                })?;
            Ok([a, b])
        };
        let basis = parse_pair(src_backend, "basis")?;
        let images = parse_pair(tgt_backend, "images")?;
        decls.push(EdgeDecl {
            id: id.clone(),
            source,
            target,
            reverse,
            forward,
            basis,
            images,
        });
    }

    let name = raw.name.unwrap_or_else(|| "unnamed".to_string());
    let gog = GraphOfGroups::assemble_with_tree(
        name.clone(),
        vertices,
        decls,
        raw.base_vertex,
        raw.spanning_tree,
    )
    .map_err(|e| match e {
            GogError::UnknownVertex(v) => ConfigError::Schema {
                item: format!("vertex `{v}`"),
                msg: "referenced but not declared".to_string(),
            },
            GogError::UnknownEdge(e) => ConfigError::Schema {
                item: format!("edge `{e}`"),
                msg: "referenced but not declared".to_string(),
            },
            other => ConfigError::Schema {
                item: "graph".to_string(),
                msg: other.to_string(),
            },
        })?;
    let report = gog.validate();
    if !report.ok() {
        return Err(ConfigError::Validation(report.violations));
    }
    Ok(WorkbenchConfig {
        gog,
        name,
        budget_vertices: raw.budget_vertices.unwrap_or(5_000_000),
        content_hash: fnv1a64(text.as_bytes()),
    })
}
