//! Matching-theoretic flat-wall machinery for bipartite graphs with perfect
//! matchings.
//!
//! The crate provides: core graph types with matchings, M-directions and
//! matching minors ([`graph_core`]); tight cut and brace decomposition
//! ([`decomposition`]); Pfaffian recognition via planarity, the Heawood
//! graph and trisums ([`pfaffian`]); cylindrical and matching walls with
//! parametrisations and tilings ([`walls`]); disjoint-path and jump routing
//! ([`routing`]); flatness certification and the two-phase flat-wall
//! pipeline ([`flatwall`]); treewidth and `K_{t,t}` duality checks
//! ([`duality`]); exhaustive small-graph catalogs ([`enumeration`]); and
//! text/DOT/JSON input-output ([`io`]).

pub mod error;
pub mod decomposition;
pub mod graph_core;
pub mod io;
pub mod pfaffian;
pub mod routing;
pub mod walls;
pub mod planarity;
pub mod flatwall;

pub use error::{Error, Result};
pub use graph_core::{BipartiteGraph, Digraph, Graph, PerfectMatching};
