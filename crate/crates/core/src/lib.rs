//! Executable checks for the structural theorems of quantum information.
//!
//! The crate is organized around pure-state sets and their Gram matrices:
//!
//! - [`statekit`]: states, state sets, Gram matrices and the constructive
//!   correspondence between equal Gram matrices and unitary equivalence.
//! - [`cloning`]: feasibility of assisted cloning and of generating a state
//!   from the ancilla alone, plus an explicit cloner builder.
//! - [`deleting`]: deleting unitaries, their validation and the resurrection
//!   of the deleted copy from the environment.
//! - [`compression`]: entropies, ensemble equivalence and a Schumacher
//!   compression simulator with exact fidelity evaluation.
//! - [`geometry`]: three-state invariants and entropy landscape searches.
//! - [`teleport`]: exact single-qubit teleportation branches.
//! - [`cli`]: the `qperm` command-line front end.
//!
//! Inner products are conjugate-linear in the first argument everywhere.

#![forbid(unsafe_code)]

pub mod cli;
pub mod cloning;
pub mod compression;
pub mod deleting;
mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod statekit;
pub mod teleport;
mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
