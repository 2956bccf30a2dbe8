use rayon::prelude::*;

use crate::camera::{CameraIntrinsics, CameraPose};
use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};
use crate::linalg::Point3;
use crate::real::Real;

use super::sample::{bilinear_sample, bilinear_sample_depth};

/// A posed source image with optional depth.
#[derive(Debug, Clone)]
pub struct ViewRecord<T> {
    pub image: Image<T>,
    pub depth: Option<DepthMap<T>>,
    pub intrinsics: CameraIntrinsics<T>,
    pub pose: CameraPose<T>,
    /// Caller-defined identifier (e.g. frame number in a dataset).
    pub index: usize,
}

impl<T: Real> ViewRecord<T> {
    pub fn new(
        image: Image<T>,
        depth: Option<DepthMap<T>>,
        intrinsics: CameraIntrinsics<T>,
        pose: CameraPose<T>,
        index: usize,
    ) -> Result<Self> {
        let dims = (intrinsics.width, intrinsics.height);
        if image.dims() != dims || depth.as_ref().is_some_and(|d| d.dims() != dims) {
            return Err(Error::DimensionMismatch(format!(
                "view {index}: image/depth size does not match {}x{} intrinsics",
                dims.0, dims.1
            )));
        }
        Ok(Self {
            image,
            depth,
            intrinsics,
            pose,
            index,
        })
    }
}

/// A neighbour resampled into the source view. Invalid pixels hold zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedView<T> {
    pub image: Image<T>,
    pub depth: Vec<T>,
    pub valid: Vec<bool>,
}

impl<T: Real> WarpedView<T> {
    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// Positions (into `views`) of the `k` views whose camera centers are closest
/// to view `i`'s, nearest first. Equal distances keep the lower position first.
pub fn nearest_k<T: Real>(views: &[ViewRecord<T>], i: usize, k: usize) -> Result<Vec<usize>> {
    let centers: Vec<Point3<T>> = views.iter().map(|v| v.pose.center()).collect();
    nearest_k_centers(&centers, i, k)
}

pub(crate) fn nearest_k_centers<T: Real>(
    centers: &[Point3<T>],
    i: usize,
    k: usize,
) -> Result<Vec<usize>> {
    if i >= centers.len() {
        return Err(Error::InvalidParameter(format!(
            "view {i} out of range for {} views",
            centers.len()
        )));
    }
    let available = centers.len() - 1;
    if k > available {
        return Err(Error::InsufficientViews {
            requested: k,
            available,
        });
    }
    let me = centers[i];
    let mut order: Vec<(T, usize)> = centers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, c)| ((*c - me).norm_squared(), j))
        .collect();
    order.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    Ok(order.into_iter().take(k).map(|(_, j)| j).collect())
}

/// `[R_k | t_k] · [R_i | t_i]⁻¹`: maps view-i camera coordinates to view-k
/// camera coordinates.
pub fn relative_pose<T: Real>(pose_i: &CameraPose<T>, pose_k: &CameraPose<T>) -> CameraPose<T> {
    pose_k.compose(&pose_i.inverse())
}

/// Projects a world point; returns the continuous pixel and its z-depth.
pub fn project<T: Real>(
    x: Point3<T>,
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
) -> Result<((T, T), T)> {
    let cam = pose.transform_point(x);
    if !(cam.z > T::zero()) {
        return Err(Error::BehindCamera { z: cam.z.as_f64() });
    }
    Ok((intr.project_camera_point(cam), cam.z))
}

/// `K_k · (R·(K_i⁻¹·p·D) + t)` for the homogeneous pixel `p = (u, v, 1)`.
/// Returns the dehomogenized pixel in view k and its view-k z-depth.
pub fn warp_pixel<T: Real>(
    p: (T, T),
    depth: T,
    intr_i: &CameraIntrinsics<T>,
    intr_k: &CameraIntrinsics<T>,
    rel: &CameraPose<T>,
) -> Result<((T, T), T)> {
    if !(depth > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "warp depth must be > 0, got {depth}"
        )));
    }
    let x_i = intr_i.unproject_unit_depth(p.0, p.1) * depth;
    let x_k = rel.transform_point(x_i);
    if !(x_k.z > T::zero()) {
        return Err(Error::BehindCamera { z: x_k.z.as_f64() });
    }
    Ok((intr_k.project_camera_point(x_k), x_k.z))
}

#[inline]
fn pixel_center<T: Real>(idx: usize, width: u32) -> (T, T) {
    let w = width as usize;
    let half = T::lit(0.5);
    (
        T::lit((idx % w) as f64) + half,
        T::lit((idx / w) as f64) + half,
    )
}

/// Backward-warps `view_k` into the source camera using the source depth.
///
/// For each valid pixel `p` of `depth_i`, `q = warp_pixel(p, D_i[p])`, then
/// `Ĩ[p] = I_k(q)` and `D̃[p] = D_k(q)` (or the warped z when `view_k` has no
/// depth). No occlusion test is performed.
pub fn warp_view<T: Real>(
    view_k: &ViewRecord<T>,
    depth_i: &DepthMap<T>,
    intr_i: &CameraIntrinsics<T>,
    pose_i: &CameraPose<T>,
) -> Result<WarpedView<T>> {
    let (w, h) = (intr_i.width, intr_i.height);
    if depth_i.dims() != (w, h) {
        return Err(Error::DimensionMismatch(format!(
            "source depth is {}x{}, intrinsics say {w}x{h}",
            depth_i.width(),
            depth_i.height()
        )));
    }
    let rel = relative_pose(pose_i, &view_k.pose);
    let per_pixel: Vec<Option<([T; 3], T)>> = (0..depth_i.len())
        .into_par_iter()
        .map(|idx| {
            let d = depth_i.get_index(idx)?;
            let (q, z) =
                warp_pixel(pixel_center(idx, w), d, intr_i, &view_k.intrinsics, &rel).ok()?;
            let (rgb, inside) = bilinear_sample(&view_k.image, q.0, q.1);
            if !inside {
                return None;
            }
            let dk = match &view_k.depth {
                Some(dm) => match bilinear_sample_depth(dm, q.0, q.1) {
                    (v, true) => v,
                    _ => return None,
                },
                None => z,
            };
            Some((rgb, dk))
        })
        .collect();
    let mut image = Image::new(w, h);
    let mut depth = vec![T::zero(); per_pixel.len()];
    let mut valid = vec![false; per_pixel.len()];
    for (idx, px) in per_pixel.into_iter().enumerate() {
        if let Some((rgb, d)) = px {
            image.data_mut()[idx * 3..idx * 3 + 3].copy_from_slice(&rgb);
            depth[idx] = d;
            valid[idx] = true;
        }
    }
    Ok(WarpedView {
        image,
        depth,
        valid,
    })
}

/// Relative depth disagreement above which a point counts as occluded.
pub const VISIBILITY_REL_TOL: f64 = 0.01;

/// Forward-backward reprojection error per source pixel, in pixels.
///
/// Pixel `p` is warped into view k with `D_i[p]`, the target depth is read
/// bilinearly at the landing point, and that point is warped back into view i.
/// `None` marks pixels that are not visible in both views: off-screen, or
/// occluded in view k (projected depth disagrees with `D_k` by more than
/// [`VISIBILITY_REL_TOL`]).
pub fn reprojection_errors<T: Real>(
    depth_i: &DepthMap<T>,
    intr_i: &CameraIntrinsics<T>,
    pose_i: &CameraPose<T>,
    depth_k: &DepthMap<T>,
    intr_k: &CameraIntrinsics<T>,
    pose_k: &CameraPose<T>,
) -> Vec<Option<T>> {
    let fwd = relative_pose(pose_i, pose_k);
    let back = relative_pose(pose_k, pose_i);
    let w = intr_i.width;
    (0..depth_i.len())
        .into_par_iter()
        .map(|idx| {
            let d = depth_i.get_index(idx)?;
            let p = pixel_center::<T>(idx, w);
            let (q, z) = warp_pixel(p, d, intr_i, intr_k, &fwd).ok()?;
            let (dk, ok) = bilinear_sample_depth(depth_k, q.0, q.1);
            if !ok || (dk - z).abs() > T::lit(VISIBILITY_REL_TOL) * z {
                return None;
            }
            let (p2, _) = warp_pixel(q, dk, intr_k, intr_i, &back).ok()?;
            Some(((p2.0 - p.0).powi(2) + (p2.1 - p.1).powi(2)).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::look_at_pose;
    use crate::linalg::{Mat3, Vec3};

    fn intr() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(100.0, 100.0, 32.0, 24.0, 64, 48).unwrap()
    }

    fn translated(tx: f64) -> CameraPose<f64> {
        CameraPose {
            rotation: Mat3::identity(),
            translation: Vec3::new(tx, 0.0, 0.0),
        }
    }

    #[test]
    fn nearest_on_a_line() {
        let centers = [0.0, 1.0, 5.0].map(|x| Vec3::new(x, 0.0, 0.0));
        assert_eq!(nearest_k_centers(&centers, 0, 1).unwrap(), vec![1]);
        assert_eq!(
            nearest_k_centers(&centers, 0, 0).unwrap(),
            Vec::<usize>::new()
        );
        assert_eq!(nearest_k_centers(&centers, 2, 2).unwrap(), vec![1, 0]);
        assert!(matches!(
            nearest_k_centers(&centers, 0, 3),
            Err(Error::InsufficientViews {
                requested: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn ties_prefer_lower_position() {
        let centers = [0.0, 1.0, -1.0].map(|x| Vec3::new(x, 0.0, 0.0));
        assert_eq!(nearest_k_centers(&centers, 0, 1).unwrap(), vec![1]);
        let centers = [1.0, 0.0, -1.0].map(|x| Vec3::new(x, 0.0, 0.0));
        assert_eq!(nearest_k_centers(&centers, 1, 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn relative_pose_special_cases() {
        let p = look_at_pose(
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
        )
        .unwrap();
        let same = relative_pose(&p, &p);
        assert!(same.rotation.max_abs_diff(&Mat3::identity()) < 1e-12);
        assert!(same.translation.norm() < 1e-12);
        let r = relative_pose(&CameraPose::identity(), &p);
        assert!(r.rotation.max_abs_diff(&p.rotation) < 1e-15);
        assert!((r.translation - p.translation).norm() < 1e-15);
    }

    #[test]
    fn projection_cases() {
        let i = intr();
        let ((u, v), z) = project(Vec3::new(0.0, 0.0, 5.0), &i, &CameraPose::identity()).unwrap();
        assert_eq!((u, v, z), (32.0, 24.0, 5.0));
        let ((u, _), _) = project(Vec3::new(0.1, 0.0, 2.0), &i, &CameraPose::identity()).unwrap();
        assert!((u - 37.0).abs() < 1e-12);
        assert!(matches!(
            project(Vec3::new(0.0, 0.0, -1.0), &i, &CameraPose::identity()),
            Err(Error::BehindCamera { .. })
        ));
    }

    #[test]
    fn translation_gives_disparity() {
        let i = intr();
        let ((u, v), z) = warp_pixel((10.5, 7.5), 2.0, &i, &i, &translated(0.1)).unwrap();
        assert!((u - 15.5).abs() < 1e-12);
        assert!((v - 7.5).abs() < 1e-12);
        assert_eq!(z, 2.0);
        assert!(warp_pixel((10.5, 7.5), 0.0, &i, &i, &translated(0.1)).is_err());
        let behind = CameraPose {
            rotation: Mat3::identity(),
            translation: Vec3::new(0.0, 0.0, -3.0),
        };
        assert!(matches!(
            warp_pixel((10.5, 7.5), 2.0, &i, &i, &behind),
            Err(Error::BehindCamera { .. })
        ));
    }

    #[test]
    fn identity_warp_reproduces_view() {
        let i = intr();
        let img = Image::from_fn(64, 48, |x, y| [x as f64 / 64.0, y as f64 / 48.0, 0.5]);
        let depth = DepthMap::from_fn(64, 48, |x, y| {
            if (x + y) % 7 == 0 {
                None
            } else {
                Some(1.0 + x as f64 * 0.1)
            }
        });
        let view = ViewRecord::new(
            img.clone(),
            Some(depth.clone()),
            i,
            CameraPose::identity(),
            0,
        )
        .unwrap();
        let warped = warp_view(&view, &depth, &i, &CameraPose::identity()).unwrap();
        for idx in 0..depth.len() {
            assert_eq!(warped.valid[idx], depth.validity()[idx]);
            if warped.valid[idx] {
                for c in 0..3 {
                    assert!(
                        (warped.image.data()[idx * 3 + c] - img.data()[idx * 3 + c]).abs() < 1e-9
                    );
                }
                assert!((warped.depth[idx] - depth.values()[idx]).abs() < 1e-9);
            } else {
                assert_eq!(warped.depth[idx], 0.0);
                assert_eq!(&warped.image.data()[idx * 3..idx * 3 + 3], &[0.0; 3]);
            }
        }
    }

    #[test]
    fn out_of_view_pixels_are_invalid() {
        let i = intr();
        let img = Image::filled(64, 48, [1.0; 3]);
        let depth = DepthMap::from_depths(64, 48, vec![1.0; 64 * 48]).unwrap();
        // shift by half the image width at depth 1
        let view = ViewRecord::new(img, None, i, translated(0.32), 1).unwrap();
        let warped = warp_view(&view, &depth, &i, &CameraPose::identity()).unwrap();
        for idx in 0..depth.len() {
            let u = (idx % 64) as f64 + 0.5 + 32.0;
            assert_eq!(warped.valid[idx], u <= 64.0, "pixel {idx}");
        }
        // without target depth the warped z is used
        assert!(warped
            .depth
            .iter()
            .zip(&warped.valid)
            .all(|(d, v)| !v || *d == 1.0));
    }

    #[test]
    fn view_record_checks_dimensions() {
        let i = intr();
        assert!(ViewRecord::new(
            Image::<f64>::new(10, 10),
            None,
            i,
            CameraPose::identity(),
            0
        )
        .is_err());
        let depth_i = DepthMap::<f64>::invalid(10, 10);
        let view = ViewRecord::new(Image::new(64, 48), None, i, CameraPose::identity(), 0).unwrap();
        assert!(matches!(
            warp_view(&view, &depth_i, &i, &CameraPose::identity()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
