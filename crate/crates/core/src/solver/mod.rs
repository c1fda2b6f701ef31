//! Small-data Schrödinger maps in the stereographic chart.

pub mod geometry;
pub mod linear;
pub mod picard;
pub mod spectral_ops;

pub use geometry::{
    energy, inverse_stereographic, q_coefficient, q_remainder_bound, stereographic, tension, tension_q_form, MapState,
    QForm,
};
pub use linear::le_sweep;
pub use picard::{
    energy_drift, energy_series, far_shell_fraction, find_delta, lipschitz_probe, nonlinearity, picard_solve,
    EnergyDrift, IterationTrace, NonlinearSign, Outcome, Solution, SolverConfig, TraceEntry,
};
pub use spectral_ops::{duhamel, linear_propagate, linear_solution};
