//! Exact module algebra for Lie algebroids, singular foliations and Dirac
//! structures presented over polynomial charts.

pub mod algebra;
pub mod error;

pub use error::{Error, Result};
pub mod sample;
pub mod submodule;
pub mod charts;
pub mod foliation;
pub mod algebroid;
pub mod dirac;
pub mod blowup;
