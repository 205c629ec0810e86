#![allow(clippy::needless_range_loop)]
pub mod connection;
pub mod curvature;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod jets;
pub mod metrics;
pub mod quadrature;
pub mod registry;
pub mod sampling;
pub mod scalar;
