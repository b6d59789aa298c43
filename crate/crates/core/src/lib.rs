//! Intrinsic cohomology of Koszul-Vinberg algebras over exact rationals.
//!
//! A KV-algebra (left-symmetric algebra) is an algebra whose associator
//! `(a,b,c) = (ab)c - a(bc)` is symmetric in `a` and `b`. This crate builds
//! such algebras and their bimodules from structure constants, assembles the
//! KV cochain complex, and computes cohomology, extensions and formal
//! deformations with exact arithmetic.
//!
//! ```
//! use kvcohom::fixtures;
//!
//! let aff = fixtures::aff();
//! assert!(aff.is_kv());
//! assert_eq!(aff.jacobi().unwrap().dim(), 1);
//! ```

pub mod algebra;
pub mod battery;
pub mod cochain;
pub mod complex;
pub mod deform;
pub mod error;
pub mod ext;
pub mod fixtures;
pub mod geom;
pub mod graded;
pub mod io;
pub mod linalg;
pub mod nijenhuis;
pub mod random;
pub mod rat;

pub use algebra::{semidirect, KvAlgebra, KvModule, Tensor3};
pub use cochain::Cochain;
pub use complex::{CohomologyReport, KvComplex};
pub use error::{Error, Result};
pub use linalg::{Mat, Subspace};
pub use rat::Rat;
