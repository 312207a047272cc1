//! Exact spin dynamics of an electron in a driven, spin-orbit coupled quantum dot.

pub mod classical;
pub mod cli;
pub mod driving;
pub mod error;
pub mod hermite;
pub mod io;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod quadrature;

pub use classical::{solve_trajectory, ClassicalState, ClassicalTrajectory, ResidualAmplitude};
pub use driving::{spin_flip_schedule, DrivingKind, DrivingProfile};
pub use error::{Error, Result};
pub use observables::{
    OccupationSpectrum, PseudoSpinExpectation, Spin, SpinExpectation, SpinorWavefunction,
};
pub use params::{PhysicalParams, SystemParams};
