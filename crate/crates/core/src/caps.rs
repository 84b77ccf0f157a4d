use serde::{Deserialize, Serialize};

/// Desk-scale limits. Every size bound in the crate is read from here so a
/// run can widen or narrow them without recompiling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest set (product set, closure, BFS ball) materialized in memory.
    pub max_elements: usize,
    /// Largest number of products `|A|·|B|` evaluated by a single product.
    pub max_work: u64,
    pub max_perm_degree: usize,
    pub max_psl2_prime: u64,
    pub max_free_rank: usize,
    pub max_matrix_dim: usize,
    /// Exact minimal cover: largest `|AA|`.
    pub exact_cover_points: usize,
    /// Exact minimal cover: largest candidate translate count.
    pub exact_cover_candidates: usize,
    /// Subgroup enumeration scope for the Hamidoune search.
    pub subgroup_enum_order: usize,
    /// Nilpotency class cap for the lower central series.
    pub max_nil_class: usize,
    /// Largest vertex count for the dense eigen-solver.
    pub dense_eigen_vertices: usize,
    /// Largest vertex count for the iterative eigen-solver.
    pub iterative_eigen_vertices: usize,
    pub progression_rank: usize,
    /// Largest point count for an all-pairs distance matrix.
    pub max_metric_points: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_elements: 500_000,
            max_work: 2_000_000_000,
            max_perm_degree: 12,
            max_psl2_prime: 101,
            max_free_rank: 4,
            max_matrix_dim: 4,
            exact_cover_points: 4096,
            exact_cover_candidates: 64,
            subgroup_enum_order: 512,
            max_nil_class: 6,
            dense_eigen_vertices: 4096,
            iterative_eigen_vertices: 100_000,
            progression_rank: 4,
            max_metric_points: 4096,
        }
    }
}
