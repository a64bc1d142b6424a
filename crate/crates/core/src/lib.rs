//! Exact computations for wall-crossing of quasi-symmetric GIT quotients.

pub mod arrangement;
pub mod bwb;
pub mod catalog;
pub mod cli;
pub mod cy;
pub mod error;
pub mod geometry;
pub mod groupoid;
pub mod json;
pub mod linalg;
pub mod mutation;
pub mod rep;
pub mod root_data;
pub mod svg;
pub mod verify;
pub mod windows;

pub use error::{Error, Result};
