//! Contraction analysis of reaction systems in diagonally weighted `L^p`
//! norms, and numerical checks that contraction survives diffusion.
//!
//! A reaction field `F` whose Jacobian satisfies `μ_{p,Q}(J_F(x)) ≤ c < 0`
//! on a convex domain is contracting, and the same rate `c` bounds the
//! reaction-diffusion system `u_t = F(u) + DΔu` (Neumann boundary) and every
//! diffusively coupled network `u̇ = F̃(u) − (L⊗D)u`, for any positive
//! diagonal `D` and any graph Laplacian `L`.
//!
//! Module map:
//!
//! * [`linalg`]: dense matrices, weighted norms, Kronecker products,
//!   symmetric eigenvalues, operator norms.
//! * [`lognorm`]: logarithmic norms (closed form and estimated), semi inner
//!   products, logarithmic Lipschitz constants of vector fields.
//! * [`models`]: the vector-field abstraction and the enzyme binding model.
//! * [`graphnet`]: graph Laplacians, network assembly, method-of-lines PDE
//!   discretization.
//! * [`sim`]: fixed-step RK4 integration and empirical contraction and
//!   synchronization checks.
//! * [`certify`]: weight search, certificates, and impossibility witnesses.
//! * [`cli`]: JSON-configured runs behind the `diffcon` binary.

pub mod certify;
pub mod cli;
pub mod error;
pub mod graphnet;
pub mod linalg;
pub mod lognorm;
pub mod models;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, Lp, WeightedNorm};
