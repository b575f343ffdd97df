//! Sentiment and emotion time series from short social-media posts, and
//! lagged causal inference between series with leaky echo state networks
//! and cross mapping.

pub mod ccm;
pub mod cli;
pub mod error;
pub mod esn;
pub mod io;
pub mod lexicon;
pub mod sentiment;
pub mod series;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
