//! Workbench library for graphs of groups with exact `F_k x Z` vertex backends.
//!
//! The crate builds finite balls of the tree of spaces attached to a graph of
//! groups, decides admissibility conditions with exact free-group algebra,
//! and runs metric experiments: distortion of edge and vertex spaces,
//! projection bounds in hyperbolic quotients, distance formulas across edges,
//! and Gromov delta estimation on cusped spaces built from combinatorial
//! horoballs.
//!
//! Modules follow the pipeline:
//!
//! * [`groupcore`] — concrete group arithmetic (free, free abelian, product),
//!   ball enumeration, cyclic subgroup membership.
//! * [`lattice`] — sublattice index computations in `Z^2`.
//! * [`gog`] — the graph-of-groups datum, validation, edge-subgroup algebra,
//!   admissibility checks.
//! * [`normalform`] — words and canonical normal forms for the fundamental
//!   group (Britton-style pinch reduction over a spanning tree).
//! * [`treespace`] — finite balls of the tree of spaces, distances,
//!   subspaces, betweenness, sides, distortion profiles.
//! * [`quotient`] — quotient geometry of type-S vertex spaces: projections,
//!   lifts, peripheral lines, distance-formula experiments.
//! * [`cusped`] — combinatorial horoballs, cusped spaces, delta estimation.
//! * [`config`] — the textual workbench config format.

pub mod config;
pub mod cusped;
pub mod gog;
pub mod groupcore;
pub mod lattice;
pub mod normalform;
pub mod quotient;
pub mod treespace;

pub use config::{parse_config, parse_config_str, ConfigError, WorkbenchConfig};
pub use gog::{AdmissibilityReport, GogError, GraphOfGroups, Verdict};
pub use groupcore::{BackendSpec, GeneratorSymbol, GroupElement, GroupError, Word};
pub use normalform::{GoGWord, NormalForm, WordToken};
pub use treespace::BallGraph;
