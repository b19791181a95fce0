//! Word growth, entropy bounds, collection and spectral screens for finitely
//! generated groups, with exact arithmetic throughout.

pub mod cli;
pub mod error;
pub mod growth;
pub mod models;
pub mod rewriting;
pub mod spectra;
pub mod words;

pub use error::{Error, Result};
