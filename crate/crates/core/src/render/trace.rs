use rayon::prelude::*;

use crate::camera::{CameraIntrinsics, CameraPose};
use crate::image::{DepthMap, Image};
use crate::linalg::{Point3, Vec3};
use crate::real::Real;
use crate::scene::{Hit, Scene};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray<T> {
    pub origin: Point3<T>,
    /// Unit length.
    pub direction: Vec3<T>,
}

impl<T: Real> Ray<T> {
    /// Normalizes `direction`.
    pub fn new(origin: Point3<T>, direction: Vec3<T>) -> Self {
        Self {
            origin,
            direction: direction.normalize(),
        }
    }

    #[inline]
    pub fn at(&self, t: T) -> Point3<T> {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions<T> {
    /// Radiance returned for rays that miss every primitive.
    pub background: [T; 3],
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        Self {
            background: [T::lit(0.5); 3],
        }
    }
}

/// Ray through the center `(u + 0.5, v + 0.5)` of pixel `(u, v)`.
#[inline]
pub fn pixel_ray<T: Real>(
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
    u: u32,
    v: u32,
) -> Ray<T> {
    let half = T::lit(0.5);
    let cam = intr.unproject_unit_depth(T::lit(u as f64) + half, T::lit(v as f64) + half);
    let world = pose.rotation.transpose() * cam;
    Ray::new(pose.center(), world)
}

/// One ray per pixel, row-major.
pub fn generate_rays<T: Real>(intr: &CameraIntrinsics<T>, pose: &CameraPose<T>) -> Vec<Ray<T>> {
    let mut rays = Vec::with_capacity(intr.pixel_count());
    for v in 0..intr.height {
        for u in 0..intr.width {
            rays.push(pixel_ray(intr, pose, u, v));
        }
    }
    rays
}

fn t_min<T: Real>() -> T {
    T::lit(1e-9)
}

fn camera_z<T: Real>(pose: &CameraPose<T>, hit: &Hit<T>) -> T {
    pose.transform_point(hit.point).z
}

/// Nearest-hit Lambertian render plus camera-frame z-depth.
///
/// Pixels are independent, so the output does not depend on how rows are
/// scheduled across threads.
pub fn trace_image<T: Real>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
    opts: &TraceOptions<T>,
) -> (Image<T>, DepthMap<T>) {
    let (w, h) = (intr.width, intr.height);
    let row_len = w as usize;
    let mut color = vec![T::zero(); row_len * h as usize * 3];
    let mut depth: Vec<Option<T>> = vec![None; row_len * h as usize];
    color
        .par_chunks_mut(row_len * 3)
        .zip(depth.par_chunks_mut(row_len))
        .enumerate()
        .for_each(|(v, (crow, drow))| {
            for u in 0..w {
                let ray = pixel_ray(intr, pose, u, v as u32);
                let (rgb, z) = match scene.intersect(ray.origin, ray.direction, t_min()) {
                    Some(hit) => (scene.shade(&hit), Some(camera_z(pose, &hit))),
                    None => (opts.background, None),
                };
                let o = u as usize * 3;
                crow[o..o + 3].copy_from_slice(&rgb);
                drow[u as usize] = z;
            }
        });
    let image = Image::from_raw(w, h, color).expect("buffer sized from intrinsics");
    let mut dmap = DepthMap::invalid(w, h);
    for (i, d) in depth.into_iter().enumerate() {
        dmap.set_index(i, d);
    }
    (image, dmap)
}

/// Depth-only variant of [`trace_image`].
pub fn trace_depth<T: Real>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
) -> DepthMap<T> {
    let w = intr.width as usize;
    let depth: Vec<Option<T>> = (0..intr.pixel_count())
        .into_par_iter()
        .map(|i| {
            let ray = pixel_ray(intr, pose, (i % w) as u32, (i / w) as u32);
            scene
                .intersect(ray.origin, ray.direction, t_min())
                .map(|hit| camera_z(pose, &hit))
        })
        .collect();
    let mut dmap = DepthMap::invalid(intr.width, intr.height);
    for (i, d) in depth.into_iter().enumerate() {
        dmap.set_index(i, d);
    }
    dmap
}
