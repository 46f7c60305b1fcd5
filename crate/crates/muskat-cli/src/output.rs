//! Records written by the commands. Every type re-parses from its own output.

use serde::{Deserialize, Serialize};

/// One row of a snapshot file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceRow {
    pub x: f64,
    pub f: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub t: f64,
    pub dt_used: f64,
    pub margin_f: Option<f64>,
    pub margin_h: Option<f64>,
    pub rt_satisfied: bool,
    /// Snapshot file name, when one was written for this sample.
    pub snapshot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema: u32,
    pub n_x: usize,
    pub n_y: usize,
    pub termination: String,
    pub message: Option<String>,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtOutput {
    pub schema: u32,
    pub margin_f: f64,
    pub margin_h: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub m: i64,
    pub re_formula: f64,
    pub im_formula: f64,
    pub re_oracle: Option<f64>,
    pub im_oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub m: usize,
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
    pub eig1_re: f64,
    pub eig1_im: f64,
    pub eig2_re: f64,
    pub eig2_im: f64,
}

/// Finite values only; JSON has no infinities.
pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}
