//! Strategic plurality voting when voters only hold a belief function about the score.
//!
//! Bottom to top: [`election`] and [`preference`] hold the voting primitives, [`uncertainty`]
//! the belief functions over score vectors, [`decision`] the move utilities and decision rules,
//! and [`dynamics`] the iterative voting engine. [`scenario`], [`trace`], [`generate`] and
//! [`campaign`] cover file formats and batch runs; [`oracles`] holds brute-force references.

pub mod campaign;
pub mod decision;
pub mod dynamics;
pub mod election;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod oracles;
pub mod preference;
pub mod rational;
pub mod scenario;
pub mod trace;
pub mod uncertainty;

pub use error::{Error, Result};
