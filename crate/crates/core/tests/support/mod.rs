#![allow(dead_code)]

pub mod dsp_oracle;
pub mod gradcheck;
pub mod manifests;
pub mod published;
