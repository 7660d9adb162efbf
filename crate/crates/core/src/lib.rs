//! Spoken language identification benchmark toolkit.
//!
//! The crate covers the whole pipeline of a 16-language robust SLID task:
//!
//! * [`dsp`]: MFCC extraction from PCM audio and the utterance duration gate.
//! * [`dataset`]: the language registry, TSV manifests, balanced training
//!   selection and speaker-disjoint validation/test splitting.
//! * [`nn`]: a small reverse-mode kernel (conv1d, batch norm, dropout,
//!   pooling, dense, softmax cross-entropy, Adam).
//! * [`model`]: the convolutional baseline, its training loop and checkpoints.
//! * [`eval`]: confusion matrices, per-language and averaged P/R/F1.
//! * [`stats`]: paired permutation tests and Pearson linear fits.

pub mod dataset;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod fsutil;
pub mod model;
pub mod nn;
pub mod settings;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
