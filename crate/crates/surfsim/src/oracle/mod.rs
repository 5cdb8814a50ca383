//! Independent dense reference implementations used to validate the
//! Gaussian-state machinery and the sampler on small systems.

pub mod fermion;
pub mod matching;
pub mod statevector;
