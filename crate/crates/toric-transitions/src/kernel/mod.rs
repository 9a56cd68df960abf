//! Exact rational/integer linear algebra and polyhedral primitives.
//!
//! Everything here is pure: identical inputs yield identical outputs, and all
//! values are immutable after construction.

pub mod cone;
pub mod lp;
pub mod mat;
pub mod rat;
pub mod solve;

pub use cone::{cone_facets, generators_from_facets, polar_cone, ConeRep, PolyCone};
pub use lp::strict_cone_feasibility;
pub use mat::{cokernel_presentation, overlattice_cosets, smith_normal_form, IntMatrix, SnfResult};
pub use rat::Rat;
