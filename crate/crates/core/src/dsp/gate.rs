use crate::error::{Error, Result};

pub const DEFAULT_MIN_DURATION_S: f64 = 3.0;
pub const DEFAULT_MAX_DURATION_S: f64 = 7.0;

/// Outcome of the utterance duration gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateDecision {
    Accept,
    /// Keep the leading `keep_s` seconds.
    TrimToMax {
        keep_s: f64,
    },
    Reject,
}

pub fn trim_or_reject(duration_s: f64, min_s: f64, max_s: f64) -> Result<GateDecision> {
    if !(min_s < max_s) {
        return Err(Error::Config(format!(
            "duration bounds must satisfy min < max (got {min_s}, {max_s})"
        )));
    }
    if !(duration_s > 0.0) || !duration_s.is_finite() {
        return Err(Error::Data(format!("non-positive duration {duration_s}")));
    }
    Ok(if duration_s < min_s {
        GateDecision::Reject
    } else if duration_s <= max_s {
        GateDecision::Accept
    } else {
        GateDecision::TrimToMax { keep_s: max_s }
    })
}
