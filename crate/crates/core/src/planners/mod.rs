//! Planners built on the tethered configuration index: tethered
//! point-to-point ([`tpp`]), tethered ordered multi-goal tours ([`tmv`]) and
//! untethered global shortest paths ([`utpp`]).

pub mod tmv;
pub mod tpp;
pub mod utpp;

pub use tmv::{tmv_plan, tmv_search, TmvResult};
pub use tpp::{tether_profile, tpp_plan, TppQuery};
pub use utpp::{default_zeta_eff, utpp_plan, utpp_preprocess, utpp_preprocess_with_limit, UtppIndex};

use crate::encoding::{gamma_star, rbf, seq_product, NodeSeq};
use crate::error::{Error, Result};
use crate::geom::{cost, Polyline};
use crate::tcs::TcsIndex;
use crate::theta;

/// Equal-cost window for deterministic tie-breaking between candidates.
pub const TIE_EPS: f64 = 1e-9;

/// Cell sequence of a path from the end of configuration `from` to the end
/// of configuration `to`, both rooted at the same cell.
pub fn transition(from: &NodeSeq, to: &NodeSeq) -> Result<NodeSeq> {
    Ok(rbf(&seq_product(&from.reversed(), to)?))
}

/// Validates a start configuration against `idx` and returns its sequence.
pub fn start_sequence(idx: &TcsIndex, start: &Polyline) -> Result<NodeSeq> {
    let g = idx.graph();
    let tol = 1e-9 * g.diameter().max(1.0);
    if !start.first().approx_eq(idx.anchor(), tol) {
        return Err(Error::InfeasibleStartConfig(format!(
            "configuration starts at {} instead of the anchor {}",
            start.first(),
            idx.anchor()
        )));
    }
    let c = cost(&theta(g, start)?);
    if c > idx.limit() {
        return Err(Error::InfeasibleStartConfig(format!(
            "taut length {c} exceeds tether {}",
            idx.tether()
        )));
    }
    let seq = gamma_star(g, start)?.seq;
    if seq.first() == idx.anchor_cell() {
        return Ok(seq);
    }
    // The anchor sits on a cutline and the encoder picked the other cell.
    let root = NodeSeq::from_ids(&[idx.anchor_cell().0, seq.first().0]);
    if g.are_adjacent(idx.anchor_cell(), seq.first()) && g.cell_contains(seq.first(), idx.anchor()) {
        Ok(rbf(&seq_product(&root, &seq)?))
    } else {
        Err(Error::InfeasibleStartConfig(format!("sequence {seq} does not start at the anchor cell")))
    }
}
