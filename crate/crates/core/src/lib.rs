//! Automatic selection of C loop statements to offload to an FPGA.
//!
//! The pipeline discovers loops, scores arithmetic intensity, generates
//! kernel/host artifacts, estimates resource use without a full compile,
//! and searches for the fastest offload pattern in two measurement rounds
//! under a strict budget.

pub mod error;
pub mod frontend;

pub use error::*;
pub use frontend::{ArrayRef, BodyProfile, LoopInfo, LoopKind, SourceUnit, TripEstimate, TripSource};
