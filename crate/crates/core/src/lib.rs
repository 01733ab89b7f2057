//! Homological CSS qudit codes, cochain-level cohomology operations, and the
//! constant-depth logical gates they define.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod cochain;
pub mod code;
pub mod complex;
pub mod data;
pub mod error;
pub mod grpcoh;
pub mod homology;
pub mod ringeval;
pub mod scenarios;
pub mod synth;
pub mod verify;

pub use cochain::Cochain;
pub use complex::CellComplex;
pub use error::{Error, Result};
