//! Modular rotatable arrays for mixed near-field and far-field multiuser
//! downlinks: geometry, channel synthesis, interference analysis, precoding
//! and joint rotation/power optimization.

pub mod beamforming;
pub mod channel;
pub mod geometry;
pub mod interference;
pub mod numerics;
pub mod optimizer;
pub mod scenario;
