//! Simulation of the distance-d rotated surface code under coherent
//! Z-rotation errors and noisy stabilizer readout.
//!
//! The physical state is tracked exactly as a fermionic Gaussian state: each
//! data qubit is encoded in four Majorana modes, the code state is a pairing
//! of those modes, coherent Ẑ rotations act as quadratic rotations of the
//! covariance matrix, and stabilizer measurements are two-mode projections.
//! Logical-error angles are recovered from forced-outcome run probabilities,
//! decoded with a space-time minimum-weight matcher, and aggregated into
//! coherent/incoherent logical error metrics.

pub mod decoder;
pub mod experiments;
pub mod flo;
pub mod incoherent;
pub mod lattice;
pub mod metrics;
pub mod oracle;
pub mod sampler;
pub mod tolerances;
pub mod util;
