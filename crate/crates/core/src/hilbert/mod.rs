//! Truncated atom ⊗ mode state space and the operators acting on it.

pub mod fourier;
pub mod hamiltonian;
pub mod space;
pub mod sparse;

pub use fourier::{fourier_mode_map, ring_hopping_matrix};
pub use hamiltonian::{
    build_effective_hamiltonian, build_full_hamiltonian, build_mode_hamiltonian,
    effective_energies, excitation_number, Channel, HamiltonianGenerator, Tone,
};
pub use space::{build_space, build_space_with_cap, Level, SpaceDescriptor, StateVector};
pub use sparse::SparseOperator;
