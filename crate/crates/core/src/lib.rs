//! Homogeneous Ricci flow on compact spaces with one or two irreducible
//! isotropy summands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod catalog;
pub mod classify;
pub mod einstein;
pub mod error;
pub mod flow;
pub mod io;
pub mod json;
pub mod poly;
pub mod portrait;
pub mod space;
pub mod sweep;

pub use error::{Error, Result};
