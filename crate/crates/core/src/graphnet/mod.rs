//! Graph Laplacians and diffusively coupled networks
//! `u̇ = F̃(u) − (L ⊗ D) u`, of which the method-of-lines discretization of
//! `u_t = F(u) + D u_ξξ` with no-flux boundary is one instance.
//!
//! `L` is always the positive semidefinite Laplacian (zero row sums,
//! non-positive off-diagonals) and the coupling is always `−(L ⊗ D)`.

mod laplacian;
mod network;

pub use laplacian::{lambda2, laplacian_from_edges, GraphLaplacian};
pub use network::{
    assemble_network, discretize_pde, power_product_gap, DiffusionMatrix, NetworkSystem,
    SpatialGrid,
};
