use alloc::string::String;

use crate::locality::{LocalityCondition, Witness};
use crate::model::Station;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("outcome index {index} out of range for a space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("function is not constant on cell {cell} of its partition")]
    NotMeasurable { cell: usize },

    #[error("event is not a union of partition cells (cell {cell} is split)")]
    NotPartitionMeasurable { cell: usize },

    #[error("events {first} and {second} are not disjoint")]
    NotDisjoint { first: usize, second: usize },

    #[error("axis is not a unit vector (norm {norm})")]
    NotUnitAxis { norm: f64 },

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("no kernel for axis {axis:?} at station {station}")]
    MissingKernel { station: Station, axis: [f64; 3] },

    #[error("invalid kernel for setting ({setting1}, {setting2}), lambda {lambda}: {reason}")]
    InvalidKernel {
        setting1: usize,
        setting2: usize,
        lambda: usize,
        reason: String,
    },

    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("precondition {condition} does not hold: {witness}")]
    Precondition {
        condition: LocalityCondition,
        witness: Witness,
    },

    #[error(
        "premises are inconsistent: conditional probability {value} at lambda {lambda} is neither 0 nor 1"
    )]
    Inconsistent { lambda: usize, value: f64 },

    #[error("extracted event fails verification: {0}")]
    Verification(String),

    #[error("{requested} axes requested, enumeration is limited to {limit}")]
    SizeGuard { requested: usize, limit: usize },

    #[error("search stopped at lhs {best_lhs} below target {target}")]
    SearchFailure {
        best_lhs: f64,
        target: f64,
        angles_deg: [f64; 4],
    },

    #[error("{0}")]
    Schedule(String),
}
