//! Multi-mode resource-constrained project scheduling: PSPLIB parsing,
//! instance preprocessing, serial schedule generation with double
//! justification, an estimation-of-distribution solver with a
//! delete-insert random walk, and a benchmark harness.

pub mod bench;
pub mod dirw;
pub mod eda;
pub mod model;
pub mod psplib;
pub mod schedule;
