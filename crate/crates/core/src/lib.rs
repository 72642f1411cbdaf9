#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop
)]

pub mod acceptance;
pub mod density;
mod error;
pub mod greeks;
pub mod model;
pub mod pricing;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
