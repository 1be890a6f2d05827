//! Toolkit for the two-parameter Poisson-Dirichlet process PDP(a, b, H):
//! stick-breaking and restaurant-process samplers, exact partition laws,
//! generalized Stirling number tables, fragmentation / coagulation
//! operations, and evidence formulas for discrete base distributions.

pub mod discrete;
pub mod error;
pub mod frag_coag;
pub mod laws;
pub mod params;
pub mod partition;
pub mod pochhammer;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod stirling;
pub mod verify;

pub use error::{Error, Result};
pub use params::PdParams;
pub use partition::{
    canonicalize, enumerate_partitions, for_each_partition, IndicatorVector, MultiplicityVector,
    SetPartition, SizeBiasedPartition,
};
