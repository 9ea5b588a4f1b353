//! Conversational-network extraction from raw chat logs and graph-based
//! classification of abusive messages.
//!
//! The pipeline: parse a JSONL chat log ([`chatlog`]), build Before/After/
//! Full conversation graphs around a target message ([`netextract`]),
//! compute topological measures ([`measures`]), assemble fixed-layout
//! feature vectors ([`features`]), train a calibrated RBF-kernel SVM
//! ([`learn`]), and evaluate with repeated stratified splits, PR curves,
//! permutation importance, and ablation ([`evaluate`]). A seeded synthetic
//! corpus generator ([`synth`]) provides a label-known testbed.

pub mod chatlog;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod graph;
pub mod learn;
pub mod measures;
pub mod netextract;
pub mod par;
pub mod svg;
pub mod synth;
pub mod util;

pub use error::{Error, Result};
