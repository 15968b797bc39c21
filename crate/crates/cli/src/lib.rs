//! Shared pieces of the command-line driver: report envelopes and the CSV
//! field interchange. The binary lives in `main.rs`.

pub mod fieldio;
pub mod report;
