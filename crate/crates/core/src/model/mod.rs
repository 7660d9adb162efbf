//! The convolutional baseline and its training protocol.

mod batch;
mod checkpoint;
mod config;
mod network;
mod run;
mod train;

pub use batch::{argmax, collate, predict, Example};
pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use config::BaselineConfig;
pub use network::Baseline;
pub use run::{train_run, tune_dropout, DropoutTrial, RunFiles};
pub use train::{
    score, select_dropout, train, train_step, EpochRecord, TrainHistory, TrainOutcome,
};
