#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod consistent_iv;
pub mod error;
pub mod io;
pub mod laplace;
pub mod linalg;
pub mod pencil;
pub mod quadrature;
pub mod solvers;
pub mod subspaces;
pub mod verify;

pub use error::{Error, Result};
