//! Tactile texture fabrication toolkit.
//!
//! Applies heightfields to triangle meshes as surface micro-geometry, recovers
//! heightfields from displaced meshes, and measures how faithfully a
//! heightfield generator reproduces ground-truth geometry.
//!
//! Lengths are millimetres throughout. Heightfields are normalized to `[0, 1]`.
//!
//! The `parallel` feature (on by default) runs the per-vertex, per-pixel and
//! per-entry loops on the rayon global pool. Without it every loop runs
//! sequentially with identical results.

pub mod dataset;
pub mod eval;
pub mod extract;
pub mod generator;
pub mod heightfield;
pub mod mesh;
pub mod metrics;
mod par;
pub mod stats;
pub mod stylize;

pub use extract::{extract_heightfield, raw_displacement_stats, DisplacementStats, Extraction};
pub use heightfield::{BitDepth, Heightfield, TextureImage};
pub use mesh::{make_tile, BoundingBox, TriMesh};
pub use metrics::{mse, rms_roughness, ssim, MetricReport};
pub use stylize::{apply_heightfield, freeze_except_top, DisplacementParams};

/// Name of the face group that marks the stylizable region of a mesh.
pub const ACTIVE_GROUP: &str = "top";
