//! Std companion to the core decoding library: matrix file formats, code
//! manifests, scenario configs, and the deterministic parallel Monte Carlo
//! driver behind the `qldpc` binary.

pub mod formats;
pub mod manifest;
pub mod runner;
pub mod scenario;
