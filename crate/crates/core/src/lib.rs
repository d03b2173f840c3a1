//! Simulator for quantum feedforward neural networks.
//!
//! Neurons are qubits (`|0⟩` non-firing, `|1⟩` firing). Each input neuron
//! receives a U(2) gate drawn from the four-angle parametrization in
//! [`gates`], and synaptic connections are compiled from Boolean functions
//! into controlled-NOT style permutation gates in [`boolfn`]. [`network`]
//! composes these into a per-history operator, and [`environment`] averages
//! the result over a wave packet living on the angle torus.

pub mod analysis;
pub mod boolfn;
pub mod environment;
pub mod error;
pub mod gates;
pub mod network;
pub mod qstate;
pub mod quadrature;

pub use boolfn::{apply_synaptic, compile_synaptic, truth_table_of, BooleanFunction, SynapticGate};
pub use environment::{
    averaged_density, averaged_density_direct, eigenfunction, energy, evaluate_packet, purity, ModeIndex,
    WavePacket,
};
pub use error::{Error, Result};
pub use gates::{apply_single, fixed_gate, psi_amplitudes, u2_from_params, FixedGate, GateParams, Unitary2};
pub use network::{
    boolean_network_for, branch_amplitudes, run_history, verify_truth_table, Branch, HistoryOperator, NetworkSpec,
    SynapticStep,
};
pub use num_complex::Complex64;
pub use qstate::{
    basis_state, measure_probabilities, reduced_density, tensor, von_neumann_entropy, Basis, ComplexAmplitude,
    DensityMatrix, StateVector,
};
pub use quadrature::QuadratureGrid;
