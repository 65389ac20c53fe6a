//! Discrete-time quantum walks as translation-operator stencils, their
//! decoupled scalar multi-step forms, and numerical checks of the
//! continuum limits of those forms.

pub mod cli;
pub mod conjecture;
pub mod continuum;
pub mod decouple;
pub mod error;
pub mod lattice;
pub mod stencil;
pub mod tensoralg;
pub mod walks;

pub use error::{QwError, Result};
