//! Reduced qubit dynamics under the full, rotating-wave and secular
//! master equations.

mod evolve;
mod map;
mod state;

pub use evolve::{
    bloch_maps, bloch_rhs, evolve, evolve_full_bloch, evolve_full_closed, evolve_rwa, evolve_sa,
    pair_difference, rwa_map, sa_map, xy_generator, Engine, EvolutionConfig, Trajectory,
    TRAJECTORY_CSV_HEADER,
};
pub use map::{default_ode_options, for_each_map_state, map_states, BlochAffine, MapState};
pub use state::{QubitState, BLOCH_TOL};
