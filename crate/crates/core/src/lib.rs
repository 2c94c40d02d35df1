//! Deep extreme learning machines for image-set classification.

pub mod autoencoder;
pub mod classifier;
pub mod cli;
pub mod dataset;
pub mod elm;
pub mod error;
pub mod harness;
pub mod matrix;

pub use error::{Error, FormatError, Result};
pub use matrix::FeatureMatrix;
