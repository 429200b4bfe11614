//! The regdae guide. Each chapter of `book/` is included here so its Rust
//! listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/pencils.md")]
pub mod pencils {}

#[doc = include_str!("../../../book/src/initial-values.md")]
pub mod initial_values {}

#[doc = include_str!("../../../book/src/solutions.md")]
pub mod solutions {}

#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}

#[doc = include_str!("../../../book/src/laplace.md")]
pub mod laplace {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
