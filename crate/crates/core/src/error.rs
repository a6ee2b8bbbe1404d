use thiserror::Error;

use crate::encoding::CellId;
use crate::geom::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("endpoint mismatch: path ends at {end} but next starts at {start}")]
    EndpointMismatch { end: Point, start: Point },
    #[error("junction mismatch: sequence ends at {last} but next starts at {first}")]
    JunctionMismatch { last: CellId, first: CellId },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("point {0} lies inside an obstacle")]
    PointInObstacle(Point),
    #[error("point {0} lies outside the boundary")]
    PointOutsideBoundary(Point),
    #[error("cells {0} and {1} are not adjacent")]
    NotAdjacent(CellId, CellId),
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("path leaves free space near {0}")]
    PathLeavesFreeSpace(Point),
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("anchor {0} lies inside an obstacle or outside the boundary")]
    AnchorInObstacle(Point),
    #[error("goal {0} lies inside an obstacle or outside the boundary")]
    GoalInObstacle(Point),
    #[error("no feasible path to the goal")]
    NoFeasiblePath,
    #[error("infeasible start configuration: {0}")]
    InfeasibleStartConfig(String),
    #[error("no feasible tour: target {0} has no feasible configuration")]
    NoFeasibleTour(usize),
    #[error("no path between the query points; increase the effective tether")]
    NoPath,
    #[error("grid resolution {0} is too coarse for this query")]
    ResolutionTooCoarse(f64),
    #[error("encoding table exceeded {0} entries")]
    TooManyEncodings(usize),
}

impl Error {
    /// True for errors that mean "the task has no solution" rather than
    /// malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::NoFeasiblePath
                | Error::InfeasibleStartConfig(_)
                | Error::NoFeasibleTour(_)
                | Error::NoPath
                | Error::TooManyEncodings(_)
        )
    }
}
