//! Ensemble error estimation for steady 2D Euler solutions.

pub mod defect;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod experiment;
pub mod gas;
pub mod grid;
pub mod psfield;
pub mod shockfit;
pub mod solver;
pub mod synthetic;

pub use error::{Error, Result};
