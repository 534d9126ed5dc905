//! Simulation of election-result surprise in a stochastic block model of
//! voters who estimate the winner from their neighbours and a media prior.

pub mod electorate;
pub mod error;
pub mod harness;
pub mod ingest;
pub mod media;
pub mod netgen;
pub mod perception;
pub mod seeds;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
