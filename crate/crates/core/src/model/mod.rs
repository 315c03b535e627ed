//! Domain types, Bloch right-hand sides and steady-state solutions.

mod bloch;
mod density;
mod params;
mod steady;

pub use bloch::{bloch_rhs_read, bloch_rhs_write, ReadState};
pub(crate) use bloch::read_rhs_state;
pub use density::DensityMatrix3;
pub use params::{
    plane_wave_rabi, rabi_ratio_from_intensity, AtomParams, BeamSet, SignalNormalization,
};
pub use steady::{coherence_small_gamma, coherence_steady_closed, steady_state_write};
