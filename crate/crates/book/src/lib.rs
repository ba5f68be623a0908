//! The guide's chapters as modules, so `cargo test --doc` runs every listing
//! in `book/src` against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/masks.md")]
pub mod masks {}
#[doc = include_str!("../../../book/src/ellipse.md")]
pub mod ellipse {}
#[doc = include_str!("../../../book/src/scale.md")]
pub mod scale {}
#[doc = include_str!("../../../book/src/biometry.md")]
pub mod biometry {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/phantoms.md")]
pub mod phantoms {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
