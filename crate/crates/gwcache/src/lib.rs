//! Cache-aided coded multicast of correlated files through Gray-Wyner
//! descriptions.
//!
//! The crate computes achievable rate-memory curves for the two-file
//! K-receiver and three-file two-receiver networks, the matching lower bounds
//! and gaps, and simulates the placement and delivery schemes bit by bit on
//! structured sources.

pub mod allocation;
pub mod bounds;
pub mod curve;
pub mod error;
pub mod experiment;
pub mod gray_wyner;
pub mod par;
pub mod rates;
pub mod sim;
pub mod source;

pub use curve::{lower_convex_envelope, RateCurve};
pub use error::{Error, Result};
pub use gray_wyner::{GwTuple, GwTuple2, GwTuple3Sym};
pub use par::Exec;
pub use rates::{gwmr_curve, Criterion, GwmrCurve};
pub use source::{EntropyOracle, FileSubset, SourceModel};
