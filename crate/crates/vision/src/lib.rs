//! Rendering and classical detection for construction diagrams.
//!
//! [`render`] turns scenes into SVG and rasters; [`detect`] goes the other
//! way, recovering lines, circles and their intersections from a bitmap,
//! and generates seeded synthetic datasets to score itself against.

pub mod detect;
pub mod render;

pub use detect::{
    detect_intersections, detect_primitives, detect_primitives_with, evaluate_detection, gen_dataset, gen_sample,
    parameter_distance, DatasetConfig, DatasetSample, DetectError, DetectParams, Detection, Evaluation,
    AP_THRESHOLDS,
};
pub use render::{
    clip_line, rasterize, render_scene, render_steps, render_with, RenderError, Style, Viewport,
};
