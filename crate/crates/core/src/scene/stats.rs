//! Geometric statistics that set the scene-dependent blur weight.

use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, CameraPose};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::real::Real;
use crate::render::trace_depth;

use super::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SceneStats<T> {
    /// Nearest visible z-depth `n`.
    pub near: T,
    /// Farthest visible z-depth `f`.
    pub far: T,
    /// Bounding-box extents `d`.
    pub bbox_dims: Vec3<T>,
    /// `F = (f − n) / max(d)`.
    pub flatness: T,
    /// `R = f / n`.
    pub depth_range: T,
    /// `O = max(d) / min(d)`.
    pub orientation: T,
    /// `w = (F·R·O)^(1/3)`.
    pub blur_weight_base: T,
}

impl<T: Real> SceneStats<T> {
    /// Derives the factors from near/far depths and box extents.
    ///
    /// `near == far` is accepted and yields a zero weight.
    pub fn from_measurements(near: T, far: T, bbox_dims: Vec3<T>) -> Result<Self> {
        if !(near > T::zero() && far >= near) || !far.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < near <= far, got near = {near}, far = {far}"
            )));
        }
        if !(bbox_dims.min_elem() > T::zero()) || !bbox_dims.is_finite() {
            return Err(Error::DegenerateScene(
                "bounding box extents must all be positive".into(),
            ));
        }
        let d_max = bbox_dims.max_elem();
        let d_min = bbox_dims.min_elem();
        let flatness = (far - near) / d_max;
        let depth_range = far / near;
        let orientation = d_max / d_min;
        let blur_weight_base = (flatness * depth_range * orientation).cbrt();
        Ok(Self {
            near,
            far,
            bbox_dims,
            flatness,
            depth_range,
            orientation,
            blur_weight_base,
        })
    }

    /// Length-like scene range `f − n`, used to normalize depth errors.
    pub fn depth_extent(&self) -> T {
        self.far - self.near
    }

    /// Geometric mean of the bounding-box extents.
    pub fn dimension(&self) -> T {
        (self.bbox_dims.x * self.bbox_dims.y * self.bbox_dims.z).cbrt()
    }
}

/// Measures near/far by tracing every pixel of `intr` from `pose` and combines
/// them with the scene's bounding box.
pub fn compute_scene_stats<T: Real>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
) -> Result<SceneStats<T>> {
    scene.validate()?;
    let depth = trace_depth(scene, intr, pose);
    let (near, far) = depth.range().ok_or(Error::SceneNotVisible)?;
    let bbox = scene
        .bounding_box()
        .expect("validated scene has primitives");
    SceneStats::from_measurements(near, far, bbox.extents())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::look_at_pose;
    use crate::scene::procedural::random_scene;

    #[test]
    fn formula_examples() {
        let s = SceneStats::from_measurements(2.0, 6.0, Vec3::new(2.0, 2.0, 1.0)).unwrap();
        assert_eq!((s.flatness, s.depth_range, s.orientation), (2.0, 3.0, 2.0));
        assert!((s.blur_weight_base - 12f64.cbrt()).abs() < 1e-12);
        assert!((s.blur_weight_base - 2.2894).abs() < 1e-4);

        let u = SceneStats::from_measurements(1.0, 2.0, Vec3::splat(1.0)).unwrap();
        assert_eq!((u.flatness, u.depth_range, u.orientation), (1.0, 2.0, 1.0));
        assert!((u.blur_weight_base - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_limit_goes_to_zero() {
        let s = SceneStats::from_measurements(3.0, 3.0, Vec3::splat(1.0)).unwrap();
        assert_eq!(s.flatness, 0.0);
        assert_eq!(s.blur_weight_base, 0.0);
        let s = SceneStats::from_measurements(3.0, 3.0 + 1e-12, Vec3::splat(1.0)).unwrap();
        assert!(s.blur_weight_base < 1e-3);
        assert!(SceneStats::from_measurements(3.0, 2.0, Vec3::splat(1.0)).is_err());
        assert!(SceneStats::from_measurements(0.0, 2.0, Vec3::splat(1.0)).is_err());
    }

    #[test]
    fn invisible_scene_is_an_error() {
        let scene = random_scene::<f64>(1, "s");
        let intr = CameraIntrinsics::from_fov(16, 16, 40.0).unwrap();
        // looking straight away from the scene
        let pose = look_at_pose(
            Vec3::new(0.0, 0.0, 10.0),
            Vec3::new(0.0, 1.0, 20.0),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        assert!(matches!(
            compute_scene_stats(&scene, &intr, &pose),
            Err(Error::SceneNotVisible)
        ));
    }

    #[test]
    fn measured_stats_are_consistent() {
        let scene = random_scene::<f64>(4, "s");
        let intr = CameraIntrinsics::from_fov(48, 48, 50.0).unwrap();
        let pose = look_at_pose(
            Vec3::new(3.0, 3.0, 3.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        let a = compute_scene_stats(&scene, &intr, &pose).unwrap();
        let b = compute_scene_stats(&scene, &intr, &pose).unwrap();
        assert_eq!(a, b);
        assert!(a.near > 0.0 && a.far > a.near);
        assert!(a.depth_range >= 1.0 && a.orientation >= 1.0);
        let f = (a.far - a.near) / a.bbox_dims.max_elem();
        assert!((a.flatness - f).abs() < 1e-15);
    }
}
