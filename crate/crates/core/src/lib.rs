//! Single-image fingerprint liveness detection from image quality measures.
//!
//! The toolkit decides whether a fingerprint image comes from a living finger
//! or a spoof artifact using only that image: it segments the fingerprint from
//! the background with a Gabor filter bank, computes ten ridge-quality
//! measures (orientation strength, spectral energy concentration, orientation
//! continuity, gray-level statistics, and ridge/valley sinusoid fidelity), and
//! classifies the resulting feature vector with a linear discriminant trained
//! per sensor. Exhaustive feature-subset search and leave-one-out error
//! reporting reproduce the evaluation protocol the method was designed under.
//!
//! The crate also ships a seeded synthetic fingerprint generator so the whole
//! pipeline can be exercised end to end without any sensor data.

pub mod classify;
pub mod cli;
pub mod config;
pub mod features;
pub mod image;
pub mod manifest;
pub mod report;
pub mod ridge;
pub mod segmentation;
pub mod synth;
