//! Classification of per-satellite GPS signal reception conditions
//! (NLOS-only, LOS-only, LOS+NLOS) from dual-polarized antenna features.
//!
//! The pipeline is: label receiver/satellite geometry against a 2.5D city
//! model ([`scene`]), synthesize C/N0 observations per label ([`synth`]),
//! fit and tune a CART tree ([`cart`]), and score it per partition
//! ([`eval`]). Observation and dataset files are handled by [`ingest`].

pub mod cart;
pub mod class;
pub mod cli;
pub mod eval;
pub mod ingest;
mod io;
pub mod scene;
pub mod synth;

pub use class::{ClassCounts, SignalClass};
