//! Audio front end: PCM input, MFCC extraction and the duration gate.

mod audio;
mod featfile;
pub mod fft;
mod gate;
mod mfcc;

pub use audio::{read_wav, RawAudio};
pub use featfile::{
    decode_features, encode_features, read_features, write_features, FEATURE_MAGIC,
};
pub use gate::{trim_or_reject, GateDecision, DEFAULT_MAX_DURATION_S, DEFAULT_MIN_DURATION_S};
pub use mfcc::{
    dct_matrix, extract_mfcc, frame_and_window, hz_to_mel, mel_filterbank, mel_to_hz,
    power_spectrum, preemphasize, window_coefficients, Matrix, MfccConfig, MfccSequence, Window,
    LOG_FLOOR,
};
