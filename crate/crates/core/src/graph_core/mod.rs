//! Core graph machinery: representations, matchings, M-directions,
//! canonical forms, matching minors and minor models.

pub mod direction;
pub mod graph;
pub mod iso;
pub mod matching;
pub mod minor;
pub mod model;

pub use direction::{m_direction, split};
pub use graph::{bidirect, underlying_graph, BipartiteGraph, Digraph, Graph};
pub use iso::{
    bipartite_isomorphic, canonical_bipartite, canonical_digraph, canonical_graph,
    digraphs_isomorphic, graphs_isomorphic, CanonicalForm,
};
pub use matching::{
    admissible_edges, alternating_query, bicontract, find_perfect_matching, is_conformal_set,
    is_m_conformal_set, is_matchable_avoiding, is_matching_covered, k_extendible,
    maximum_matching, AlternatingKind, ConformalSet, PerfectMatching,
};
pub use minor::{
    complete_bipartite_pattern, find_conformal_bisubdivision, has_k33_matching_minor,
    has_matching_minor, verify_bisubdivision, SubdivisionEmbedding,
};
pub use model::{verify_model, MinorModel};
