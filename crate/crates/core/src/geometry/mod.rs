//! Multi-view geometry: neighbour selection, relative poses, projection,
//! depth-driven warping and aligned-stack assembly.

mod sample;
mod stack;
mod warp;

pub use sample::{bilinear_sample, bilinear_sample_depth};
pub use stack::{build_aligned_stack, AlignedStack};
pub use warp::{
    nearest_k, project, relative_pose, reprojection_errors, warp_pixel, warp_view, ViewRecord,
    WarpedView, VISIBILITY_REL_TOL,
};
