//! Analytic discs attached to model CR manifolds, at desk scale.
//!
//! The crate is `no_std` (with `alloc`). File formats, experiments and the
//! command line live in the `crdisc` companion crate.

#![no_std]

extern crate alloc;

mod fft;

pub mod circle;
pub mod spaces;
pub mod manifolds;
mod linalg;
pub mod bishop;
pub mod sector;
pub mod deformation;
