//! Reference solvers used to check the planners: exact homotopic shortest
//! paths by the funnel algorithm, exact global shortest paths on the
//! visibility graph, h-signatures with a homotopy-augmented grid graph, and
//! brute-force multi-goal tours.

pub mod funnel;
pub mod grid_hag;
pub mod hsig;
pub mod tmv_exhaustive;
pub mod visibility;
