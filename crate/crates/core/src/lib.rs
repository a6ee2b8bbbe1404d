//! Tethered-robot planning over convex dissections of polygonal free space.
//!
//! A path's homotopy class is keyed by the rollback-free sequence of convex
//! cells it crosses. On top of that encoding the crate provides:
//!
//! * [`tcs`]: every optimal tethered configuration reachable under a tether
//!   length, per cell.
//! * [`planners`]: tethered point-to-point, tethered ordered multi-goal
//!   tours, and untethered global shortest paths.
//! * [`oracle`]: independent reference solvers used for testing.

pub mod dissection;
pub mod encoding;
pub mod error;
pub mod geom;
pub mod maps;
pub mod oracle;
pub mod planners;
pub mod svg;
pub mod tcs;
mod taut;

pub use dissection::{dissect, ConvexCell, Cutline, DissectionGraph, Environment};
pub use encoding::{
    encoding_product, gamma, gamma_star, optimal_homotopic_path, rbf, seq_product, theta, CellId,
    Encoding, NodeSeq,
};
pub use error::{Error, Result};
pub use geom::{Point, Polyline, Segment, SimplePolygon};
pub use tcs::{encoding_validity, get_all_foc, tcs_preprocess, Config, ConfigSet, TcsIndex};
