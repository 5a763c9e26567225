pub mod dephasing;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod model;
pub mod noise;
pub mod opalg;
pub mod stats;
pub mod tomography;
pub mod units;

pub use error::{Error, Result};
