//! Paraboloid interaction lab: surface measures, bilinear forms, sectors
//! and the estimate sweeps.

pub mod estimates;
pub mod measure;
pub mod null;
pub mod sector;

pub use measure::{measure_convolve, restricted_l2, ParaboloidMeasure, Region, Sheet};
pub use null::{bilinear_b, bilinear_bhat, bilinear_tilde, null_symbol, resonance_defect, resonance_scan};
pub use sector::SectorDecomposition;
