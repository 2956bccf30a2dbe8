//! Multi-view motion-blur and noise dataset synthesis, plus the geometry used
//! to align views: volume rendering with depth, relative poses, depth-driven
//! warping, aligned stacks, training losses and evaluation metrics.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases. Dataset I/O and the CLI use `f64`.
//!
//! Conventions: poses map world to camera (`x_cam = R·x + t`), the camera looks
//! down +z with +x right and +y down, depth is camera-frame z, and pixel
//! `(u, v)` has its center at `(u + 0.5, v + 0.5)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blur;
pub mod camera;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod image;
pub mod linalg;
pub mod losses;
pub mod metrics;
pub mod noise;
pub mod real;
pub mod render;
pub mod scene;
pub mod seed;

pub use error::{Error, Result};
pub use real::Real;

pub type Vec3f = linalg::Vec3<f32>;
pub type Vec3d = linalg::Vec3<f64>;
pub type Mat3f = linalg::Mat3<f32>;
pub type Mat3d = linalg::Mat3<f64>;
pub type PoseF = camera::CameraPose<f32>;
pub type PoseD = camera::CameraPose<f64>;
pub type IntrinsicsF = camera::CameraIntrinsics<f32>;
pub type IntrinsicsD = camera::CameraIntrinsics<f64>;
pub type ImageF = image::Image<f32>;
pub type ImageD = image::Image<f64>;
pub type DepthMapF = image::DepthMap<f32>;
pub type DepthMapD = image::DepthMap<f64>;
pub type SceneF = scene::Scene<f32>;
pub type SceneD = scene::Scene<f64>;
pub type SceneStatsD = scene::stats::SceneStats<f64>;
