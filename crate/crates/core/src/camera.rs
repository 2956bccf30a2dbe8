//! Camera parameterization.
//!
//! Conventions used throughout the crate:
//!
//! * Poses are world→camera: `x_cam = R·x_world + t`.
//! * Camera frame: +x right, +y down, +z forward (into the scene). z-depth of a
//!   point is its camera-frame z.
//! * Continuous pixel coordinates: pixel `(u, v)` covers `[u, u+1) × [v, v+1)`
//!   and its center sits at `(u + 0.5, v + 0.5)`.
//! * Spherical coordinates use the physics convention: polar angle φ measured
//!   from +z, azimuth θ from +x towards +y, both in degrees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Mat4, Point3, Vec3};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SphericalCoord<T> {
    pub r: T,
    /// Polar angle φ in degrees, `[0, 180]`.
    pub phi: T,
    /// Azimuth θ in degrees, `[0, 360)`.
    pub theta: T,
}

impl<T: Real> SphericalCoord<T> {
    pub fn new(r: T, phi: T, theta: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be > 0, got {r}"
            )));
        }
        if !(phi >= T::zero() && phi <= T::lit(180.0)) {
            return Err(Error::InvalidParameter(format!(
                "polar angle must lie in [0, 180] degrees, got {phi}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("azimuth must be finite".into()));
        }
        Ok(Self {
            r,
            phi,
            theta: wrap_degrees(theta),
        })
    }

    pub fn to_cartesian(&self) -> Point3<T> {
        spherical_to_cartesian(self)
    }

    /// Inverse of [`spherical_to_cartesian`]. The origin maps to `None`.
    pub fn from_cartesian(p: Point3<T>) -> Option<Self> {
        let r = p.norm();
        if !(r > T::zero()) {
            return None;
        }
        let cos_phi = (p.z / r).max(-T::one()).min(T::one());
        let phi = cos_phi.acos().to_degrees();
        let theta = wrap_degrees(p.y.atan2(p.x).to_degrees());
        Some(Self { r, phi, theta })
    }
}

/// Maps an angle in degrees into `[0, 360)`.
pub fn wrap_degrees<T: Real>(deg: T) -> T {
    let full = T::lit(360.0);
    let w = deg % full;
    let w = if w < T::zero() { w + full } else { w };
    // `-1e-20 % 360 + 360` rounds to exactly 360.
    if w >= full {
        T::zero()
    } else {
        w
    }
}

pub fn spherical_to_cartesian<T: Real>(c: &SphericalCoord<T>) -> Point3<T> {
    let phi = c.phi.to_radians();
    let theta = c.theta.to_radians();
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    Vec3::new(c.r * sp * ct, c.r * sp * st, c.r * cp)
}

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: u32,
    pub height: u32,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: u32, height: u32) -> Result<Self> {
        let intr = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        intr.validate()?;
        Ok(intr)
    }

    /// Square-pixel camera with the principal point at the image center and the
    /// given horizontal field of view (degrees).
    pub fn from_fov(width: u32, height: u32, fov_x_deg: T) -> Result<Self> {
        if !(fov_x_deg > T::zero() && fov_x_deg < T::lit(180.0)) {
            return Err(Error::InvalidParameter(format!(
                "field of view must lie in (0, 180), got {fov_x_deg}"
            )));
        }
        let w = T::lit(width as f64);
        let h = T::lit(height as f64);
        let f = w / (T::lit(2.0) * (fov_x_deg.to_radians() / T::lit(2.0)).tan());
        Self::new(f, f, w / T::lit(2.0), h / T::lit(2.0), width, height)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter(
                "image size must be non-zero".into(),
            ));
        }
        if !(self.fx > T::zero() && self.fy > T::zero())
            || !self.fx.is_finite()
            || !self.fy.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "focal lengths must be positive, got ({}, {})",
                self.fx, self.fy
            )));
        }
        let w = T::lit(self.width as f64);
        let h = T::lit(self.height as f64);
        if !(self.cx >= T::zero() && self.cx < w && self.cy >= T::zero() && self.cy < h) {
            return Err(Error::InvalidParameter(format!(
                "principal point ({}, {}) outside {}x{} image",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Mat3<T> {
        let (z, o) = (T::zero(), T::one());
        Mat3::from_rows([[self.fx, z, self.cx], [z, self.fy, self.cy], [z, z, o]])
    }

    /// `K⁻¹·(u, v, 1)`: camera-frame point at unit z-depth.
    #[inline]
    pub fn unproject_unit_depth(&self, u: T, v: T) -> Vec3<T> {
        Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, T::one())
    }

    /// Dehomogenized `K·x` for a camera-frame point.
    #[inline]
    pub fn project_camera_point(&self, x: Vec3<T>) -> (T, T) {
        (self.fx * x.x / x.z + self.cx, self.fy * x.y / x.z + self.cy)
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Horizontal field of view in radians.
    pub fn fov_x(&self) -> T {
        T::lit(2.0) * (T::lit(self.width as f64) / (T::lit(2.0) * self.fx)).atan()
    }

    pub fn cast<U: Real>(&self) -> CameraIntrinsics<U> {
        CameraIntrinsics {
            fx: U::lit(self.fx.as_f64()),
            fy: U::lit(self.fy.as_f64()),
            cx: U::lit(self.cx.as_f64()),
            cy: U::lit(self.cy.as_f64()),
            width: self.width,
            height: self.height,
        }
    }
}

/// Rigid world→camera transform `x_cam = R·x_world + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CameraPose<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> CameraPose<T> {
    /// Validates orthonormality (`RᵀR = I`, `det R = +1`) to within `tol`.
    pub fn new(rotation: Mat3<T>, translation: Vec3<T>, tol: T) -> Result<Self> {
        let pose = Self {
            rotation,
            translation,
        };
        let err = pose.orthonormality_error();
        if !(err <= tol) {
            return Err(Error::InvalidParameter(format!(
                "rotation is not orthonormal (error {err})"
            )));
        }
        Ok(pose)
    }

    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zero(),
        }
    }

    /// `max(|RᵀR − I|, |det R − 1|)`.
    pub fn orthonormality_error(&self) -> T {
        let rtr = self.rotation.transpose() * self.rotation;
        rtr.max_abs_diff(&Mat3::identity())
            .max((self.rotation.determinant() - T::one()).abs())
    }

    #[inline]
    pub fn transform_point(&self, x: Point3<T>) -> Point3<T> {
        self.rotation * x + self.translation
    }

    #[inline]
    pub fn rotate_vector(&self, v: Vec3<T>) -> Vec3<T> {
        self.rotation * v
    }

    /// Camera center in world coordinates, `−Rᵀt`.
    pub fn center(&self) -> Point3<T> {
        -(self.rotation.transpose() * self.translation)
    }

    /// Camera→world transform.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Self {
        Self {
            rotation: self.rotation * first.rotation,
            translation: self.rotation * first.translation + self.translation,
        }
    }

    pub fn to_homogeneous(&self) -> Mat4<T> {
        let r = &self.rotation.rows;
        let t = self.translation;
        let (z, o) = (T::zero(), T::one());
        [
            [r[0][0], r[0][1], r[0][2], t.x],
            [r[1][0], r[1][1], r[1][2], t.y],
            [r[2][0], r[2][1], r[2][2], t.z],
            [z, z, z, o],
        ]
    }

    /// Reads the rigid part of a 4×4 matrix; the bottom row must be `(0,0,0,1)`.
    pub fn from_homogeneous(m: &Mat4<T>) -> Result<Self> {
        let (z, o) = (T::zero(), T::one());
        if m[3] != [z, z, z, o] {
            return Err(Error::InvalidParameter(
                "homogeneous pose must have bottom row (0, 0, 0, 1)".into(),
            ));
        }
        Ok(Self {
            rotation: Mat3::from_rows([
                [m[0][0], m[0][1], m[0][2]],
                [m[1][0], m[1][1], m[1][2]],
                [m[2][0], m[2][1], m[2][2]],
            ]),
            translation: Vec3::new(m[0][3], m[1][3], m[2][3]),
        })
    }

    pub fn cast<U: Real>(&self) -> CameraPose<U> {
        CameraPose {
            rotation: self.rotation.cast(),
            translation: self.translation.cast(),
        }
    }
}

/// Pose of a camera at `position` looking at `target`.
///
/// The camera's +z axis points from `position` to `target`, +x is
/// `forward × up` and +y is `forward × x`, so the world `up` direction appears
/// towards the top of the image.
pub fn look_at_pose<T: Real>(
    position: Point3<T>,
    target: Point3<T>,
    up: Vec3<T>,
) -> Result<CameraPose<T>> {
    let forward = target - position;
    let fwd_len = forward.norm();
    if !(fwd_len > T::zero()) || !fwd_len.is_finite() {
        return Err(Error::InvalidParameter(
            "look-at position and target coincide".into(),
        ));
    }
    let forward = forward * (T::one() / fwd_len);
    let up_len = up.norm();
    let side = forward.cross(up);
    // |f × up| = |up|·sin(angle); reject near-parallel configurations.
    if !(side.norm() > T::lit(1e-9) * up_len) {
        return Err(Error::DegenerateLookAt);
    }
    let right = side.normalize();
    let down = forward.cross(right);
    let rotation = Mat3::from_row_vectors(right, down, forward);
    let translation = -(rotation * position);
    Ok(CameraPose {
        rotation,
        translation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec3<f64>, b: Vec3<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn pole_and_equator() {
        let p = spherical_to_cartesian(&SphericalCoord::new(1.0, 0.0, 123.0).unwrap());
        assert!(close(p, Vec3::new(0.0, 0.0, 1.0), 1e-15));
        let p = spherical_to_cartesian(&SphericalCoord::new(2.0, 90.0, 0.0).unwrap());
        assert!(close(p, Vec3::new(2.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn oblique_point_matches_direct_trig() {
        let p = spherical_to_cartesian(&SphericalCoord::new(3.0, 60.0, 45.0).unwrap());
        // 3·sin60·cos45 = 3·(√3/2)·(√2/2)
        let xy = 3.0 * 3f64.sqrt() / 2.0 * 2f64.sqrt() / 2.0;
        assert!(close(p, Vec3::new(xy, xy, 1.5), 1e-12));
        assert!((xy - 1.8371).abs() < 1e-4);
    }

    #[test]
    fn invalid_spherical_rejected() {
        assert!(SphericalCoord::new(0.0, 10.0, 0.0).is_err());
        assert!(SphericalCoord::new(1.0, 181.0, 0.0).is_err());
        assert_eq!(SphericalCoord::new(1.0, 10.0, -90.0).unwrap().theta, 270.0);
    }

    #[test]
    fn axis_aligned_look_at() {
        let pose = look_at_pose(
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::zero(),
            Vec3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let expected = Mat3::from_rows([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert!(pose.rotation.max_abs_diff(&expected) < 1e-15);
        // world origin sits 5 units in front of the camera
        assert!(close(
            pose.transform_point(Vec3::zero()),
            Vec3::new(0.0, 0.0, 5.0),
            1e-12
        ));
        assert!(close(
            pose.transform_point(Vec3::new(0.0, 0.0, 5.0)),
            Vec3::zero(),
            1e-12
        ));
    }

    #[test]
    fn look_at_parallel_up_is_degenerate() {
        let err = look_at_pose(
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateLookAt));
        assert!(
            look_at_pose(Vec3::splat(1.0), Vec3::splat(1.0), Vec3::new(0.0, 0.0, 1.0)).is_err()
        );
    }

    #[test]
    fn intrinsics_validation() {
        assert!(CameraIntrinsics::new(100.0, 100.0, 32.0, 32.0, 64, 64).is_ok());
        assert!(CameraIntrinsics::new(-1.0, 100.0, 32.0, 32.0, 64, 64).is_err());
        assert!(CameraIntrinsics::new(100.0, 100.0, 64.0, 32.0, 64, 64).is_err());
        let intr = CameraIntrinsics::<f64>::from_fov(256, 256, 90.0).unwrap();
        assert!((intr.fx - 128.0).abs() < 1e-12);
        assert!((intr.fov_x() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_round_trip() {
        let pose = look_at_pose(
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        let back = CameraPose::from_homogeneous(&pose.to_homogeneous()).unwrap();
        assert_eq!(back, pose);
        let mut m = pose.to_homogeneous();
        m[3][0] = 1.0;
        assert!(CameraPose::from_homogeneous(&m).is_err());
    }

    #[test]
    fn pose_in_single_precision() {
        let pose = look_at_pose(
            Vec3::new(1.0f32, -2.0, 3.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        assert!(pose.orthonormality_error() < 1e-6);
        assert!((pose.center() - Vec3::new(1.0, -2.0, 3.0)).norm() < 1e-5);
    }
}
