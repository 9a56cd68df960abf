//! Exact toolkit for toric GIT presentations and extremal transitions of
//! toric hypersurfaces.
//!
//! The pipeline runs entirely over arbitrary-precision rationals: anticone
//! families and stacky fans from GIT data, Stanley-Reisner cohomology with
//! twisted sectors, blow-up and total-space presentations, support functions
//! and nef/Cartier flags, crepancy certificates, wall-crossing charts, and
//! the two cohomological conditions that decide the strong comparison
//! statement for a transition.

pub mod cohomology;
pub mod error;
pub mod input;
pub mod fan;
pub mod kernel;
pub mod preset;
pub mod presentation;
pub mod report;
pub mod transition;

pub use error::{Error, Result};
