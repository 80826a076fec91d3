//! Fixed-step RK4 integration and empirical checks of contraction and
//! synchronization envelopes.

mod integrate;
mod verify;

pub use integrate::{integrate, integrate_with, Rk4, Trajectory};
pub use verify::{
    pairwise_distances, verify_contraction, verify_sync, ContractionReport, SeriesPoint, Settings,
    SyncReport, WorstPoint,
};
