//! Streaming maximum coverage.
//!
//! Sets arrive one at a time from a replayable [`setstream::SetStream`]; the
//! algorithms in [`streamalgs`] keep only thresholded state plus a
//! [`setstream::SpaceLedger`] of what they stored, [`framework`] removes the
//! need to know the optimum up front by running guesses over subsampled
//! universes and verifying with [`distinct`] sketches, and [`offline`] holds
//! the exhaustive oracles everything is checked against. [`vertexcover`]
//! covers the k-vertex variant on (hyper)graph streams.

pub mod distinct;
pub mod error;
pub mod framework;
pub mod hashing;
pub mod offline;
pub mod seed;
pub mod setstream;
pub mod streamalgs;
pub mod vertexcover;

pub use error::{Error, Result};
pub use offline::Solution;
