//! Single-qubit state preparation and gate compilation posed as Markov
//! decision processes.
//!
//! Unitaries are unit quaternions ([`su2`]); pure states live on a
//! discretized Bloch sphere ([`bloch_grid`]). [`state_prep`] estimates cell
//! dynamics under a gateset and solves for programs that steer any cell into a
//! target cell; [`gate_compile`] does the same for `{I, H, T}` circuits over a
//! quantized quaternion space and compares against exhaustive search.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch_grid;
pub mod gate_compile;
pub mod harness;
pub mod mdp;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod state_prep;
pub mod su2;

pub use bloch_grid::{BlochGrid, CellId};
pub use mdp::{policy_iteration, Policy, Solution, SolverOptions, TabularMdp, ValueFunction};
pub use par::Exec;
pub use rng::SeedStreams;
pub use su2::{BlochPoint, Gate, GateSequence, Quaternion};
