//! Certified subdivision for implicit hypersurfaces.
//!
//! Exact-arithmetic core: sparse rational polynomials with a multivariate
//! Taylor shift, centered-form interval enclosures, the C0 / C1 exclusion
//! predicates with their diameter-distance constants, a deterministic
//! 2^n-ary subdivision engine, 2D mesh extraction, and the complexity
//! machinery (non-adaptive counting bounds, separation bounds in log-space,
//! continuous-amortization integrals).
//!
//! The crate is `no_std` + `alloc`; everything here is pure computation.
//! File formats, the CLI, and the parallel executor live in the companion
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod complexity;
pub mod dyadic;
pub mod families;
pub mod interval;
pub mod mesh2d;
pub mod poly;
pub mod predicates;
pub mod subdivide;

pub use dyadic::Dyadic;
pub use interval::{Cube, IntervalR};
pub use poly::{MultiPoly, Rational};
