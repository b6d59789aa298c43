//! The chapters of `book/` compiled as doc-tests, so the guide cannot drift
//! from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/complex.md")]
pub mod complex {}

#[doc = include_str!("../../../book/src/extensions.md")]
pub mod extensions {}

#[doc = include_str!("../../../book/src/deformations.md")]
pub mod deformations {}

#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}

#[doc = include_str!("../../../book/src/graded.md")]
pub mod graded {}

#[doc = include_str!("../../../book/src/battery.md")]
pub mod battery {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
