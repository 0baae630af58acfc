//! Higher-order tangent bundles `T^kM` in charts: curve jets and the order-k
//! chain rule, connection-map components, the linearizing trivialization,
//! lifted metrics and Lagrangians, and a truncated `T^∞M` tower.

pub mod atlas;
pub mod cli;
pub mod connection;
pub mod error;
pub mod faa;
pub mod jets;
pub mod lifts;
pub mod linalg;
pub mod linearize;
pub mod osculating;
pub mod residual;
pub mod tower;

pub use error::{Error, Result};
