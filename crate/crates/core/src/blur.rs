//! 3D-consistent motion blur.
//!
//! A blurred frame is the mean of `m` sharp renders taken at camera positions
//! spread along a short segment in spherical coordinates,
//! `p_i ~ U(p, p + w·δ)`. Trajectory components are interpreted as
//! `δ = (Δr, Δφ, Δθ)` with `Δr` in percent of the start radius and the angles
//! in degrees. Every latent camera is re-aimed at the world origin with +z up.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{look_at_pose, wrap_degrees, CameraIntrinsics, CameraPose, SphericalCoord};
use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};
use crate::linalg::Vec3;
use crate::real::Real;
use crate::render::{trace_image, TraceOptions};
use crate::scene::stats::{compute_scene_stats, SceneStats};
use crate::scene::viewpoint::{Quadrant, ViewpointSampler};
use crate::scene::Scene;
use crate::seed::{frame_seed, rng_from_seed, viewpoint_seed};

/// Polar angles of latent cameras are kept inside this margin of the poles.
const POLAR_MARGIN_DEG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Trajectory<T> {
    pub start: SphericalCoord<T>,
    /// `(Δr [% of r], Δφ [deg], Δθ [deg])`.
    pub direction: Vec3<T>,
    pub weight: T,
}

impl<T: Real> Trajectory<T> {
    /// Position a fraction `s ∈ [0, 1]` along the segment.
    pub fn position_at(&self, s: T) -> SphericalCoord<T> {
        let step = self.direction * (s * self.weight);
        let r = self.start.r * (T::one() + step.x / T::lit(100.0));
        let margin = T::lit(POLAR_MARGIN_DEG);
        let phi = (self.start.phi + step.y)
            .max(margin)
            .min(T::lit(180.0) - margin);
        SphericalCoord {
            r,
            phi,
            theta: wrap_degrees(self.start.theta + step.z),
        }
    }

    pub fn is_static(&self) -> bool {
        self.weight == T::zero() || self.direction == Vec3::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentSampling {
    /// i.i.d. uniform fractions along the segment.
    Uniform,
    /// Fractions `(i + ½)/m`.
    EvenlySpaced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlurConfig {
    /// Blur levels to emit; 0 is the sharp reference.
    pub levels: Vec<u32>,
    /// Trajectory magnitude bound `δ0`; components are drawn from `[δ0/2, δ0]`.
    pub delta0: f64,
    /// Latent renders averaged per frame (`m`).
    pub latent_samples: usize,
    /// Frames per level and viewpoint (`n`).
    pub frames_per_level: usize,
    pub sampling: LatentSampling,
}

impl Default for BlurConfig {
    fn default() -> Self {
        Self {
            levels: vec![1, 2, 3, 4],
            delta0: 2.5,
            latent_samples: 34,
            frames_per_level: 34,
            sampling: LatentSampling::Uniform,
        }
    }
}

impl BlurConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_samples == 0 || self.frames_per_level == 0 {
            return Err(Error::InvalidParameter(
                "latent samples (m) and frames per level (n) must be >= 1".into(),
            ));
        }
        if !(self.delta0 >= 0.0) || !self.delta0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta0 must be >= 0, got {}",
                self.delta0
            )));
        }
        if self.levels.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one blur level is required".into(),
            ));
        }
        Ok(())
    }

    pub fn frames_per_viewpoint(&self) -> usize {
        self.levels.len() * self.frames_per_level
    }
}

/// Each component has magnitude `U(δ0/2, δ0)` and an independent fair sign.
pub fn sample_trajectory_direction<T: Real, R: Rng + ?Sized>(rng: &mut R, delta0: f64) -> Vec3<T> {
    let mut c = [T::zero(); 3];
    for v in c.iter_mut() {
        let mag = if delta0 > 0.0 {
            rng.random_range(0.5 * delta0..=delta0)
        } else {
            0.0
        };
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        *v = T::lit(sign * mag);
    }
    Vec3::from(c)
}

/// `w_l ~ U(0.9·w_u·l, 1.1·w_u·l)`; level 0 gives exactly zero.
pub fn sample_blur_weight<T: Real, R: Rng + ?Sized>(
    stats: &SceneStats<T>,
    level: u32,
    rng: &mut R,
) -> T {
    // Draw unconditionally so the stream position does not depend on the level.
    let u: f64 = rng.random();
    if level == 0 {
        return T::zero();
    }
    let center = stats.blur_weight_base.as_f64() * level as f64;
    let (lo, hi) = (0.9 * center, 1.1 * center);
    T::lit((lo + (hi - lo) * u).min(hi))
}

/// Camera looking at the world origin from a spherical position.
pub fn orbit_pose<T: Real>(c: &SphericalCoord<T>) -> Result<CameraPose<T>> {
    look_at_pose(
        c.to_cartesian(),
        Vec3::zero(),
        Vec3::new(T::zero(), T::zero(), T::one()),
    )
}

#[derive(Debug, Clone)]
pub struct BlurredFrame<T> {
    pub image: Image<T>,
    /// Depth traced from the segment midpoint.
    pub depth: DepthMap<T>,
    /// Pose of the segment-midpoint camera.
    pub reference_pose: CameraPose<T>,
    pub latent_positions: Vec<SphericalCoord<T>>,
}

/// Renders `m` latent images along `traj` and averages them.
///
/// Accumulation is in `f64` in latent order. A static trajectory renders a
/// single latent image and returns it unchanged.
pub fn render_blurred_frame<T: Real, R: Rng + ?Sized>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    traj: &Trajectory<T>,
    m: usize,
    sampling: LatentSampling,
    rng: &mut R,
    opts: &TraceOptions<T>,
) -> Result<BlurredFrame<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let fractions: Vec<f64> = match sampling {
        LatentSampling::Uniform => (0..m).map(|_| rng.random::<f64>()).collect(),
        LatentSampling::EvenlySpaced => (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect(),
    };
    let positions: Vec<SphericalCoord<T>> = fractions
        .iter()
        .map(|&s| traj.position_at(T::lit(s)))
        .collect();
    let reference_pose = orbit_pose(&traj.position_at(T::lit(0.5)))?;

    if traj.is_static() {
        let pose = orbit_pose(&traj.start)?;
        let (image, depth) = trace_image(scene, intr, &pose, opts);
        return Ok(BlurredFrame {
            image,
            depth,
            reference_pose: pose,
            latent_positions: positions,
        });
    }

    let mut acc = vec![0.0f64; intr.pixel_count() * 3];
    for p in &positions {
        let pose = orbit_pose(p)?;
        let (latent, _) = trace_image(scene, intr, &pose, opts);
        acc.par_iter_mut()
            .zip(latent.data().par_iter())
            .for_each(|(a, &v)| *a += v.as_f64());
    }
    let inv = 1.0 / m as f64;
    let data = acc.into_iter().map(|v| T::lit(v * inv)).collect();
    let image = Image::from_raw(intr.width, intr.height, data)?;
    let (_, depth) = trace_image(scene, intr, &reference_pose, opts);
    Ok(BlurredFrame {
        image,
        depth,
        reference_pose,
        latent_positions: positions,
    })
}

/// A sampled camera position and the scene statistics measured from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Viewpoint<T> {
    pub index: usize,
    pub quadrant: Quadrant,
    pub coord: SphericalCoord<T>,
    pub stats: SceneStats<T>,
}

/// Samples viewpoint `index` (sector `index mod 4`) and measures its stats.
pub fn plan_viewpoint<T: Real>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    sampler: &ViewpointSampler,
    index: usize,
    global_seed: u64,
) -> Result<Viewpoint<T>> {
    sampler.validate()?;
    scene.validate()?;
    let radius = scene.bounding_radius().expect("validated scene");
    let mut rng = rng_from_seed(viewpoint_seed(global_seed, &scene.id, index as u64));
    let quadrant = Quadrant::from_index(index);
    let coord = sampler.sample(&mut rng, radius, Some(quadrant));
    let pose = orbit_pose(&coord)?;
    let stats = compute_scene_stats(scene, intr, &pose)?;
    Ok(Viewpoint {
        index,
        quadrant,
        coord,
        stats,
    })
}

/// Everything known about one generated frame except its pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMeta<T> {
    pub viewpoint: usize,
    pub level: u32,
    pub frame: usize,
    pub seed: u64,
    pub trajectory: Trajectory<T>,
    pub is_reference: bool,
}

/// Generates all frames for one viewpoint and hands each to `sink` as soon as
/// it is rendered. Frames are produced in parallel; the returned values are in
/// (level, frame) order.
pub fn generate_setting_with<T, O, F>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    viewpoint: &Viewpoint<T>,
    cfg: &BlurConfig,
    global_seed: u64,
    opts: &TraceOptions<T>,
    sink: F,
) -> Result<Vec<O>>
where
    T: Real,
    O: Send,
    F: Fn(FrameMeta<T>, BlurredFrame<T>) -> Result<O> + Sync,
{
    cfg.validate()?;
    let jobs: Vec<(u32, usize)> = cfg
        .levels
        .iter()
        .flat_map(|&l| (0..cfg.frames_per_level).map(move |f| (l, f)))
        .collect();
    jobs.par_iter()
        .map(|&(level, frame)| {
            let seed = frame_seed(
                global_seed,
                &scene.id,
                viewpoint.index as u64,
                level as u64,
                frame as u64,
            );
            let mut rng = rng_from_seed(seed);
            let direction = sample_trajectory_direction(&mut rng, cfg.delta0);
            let weight = sample_blur_weight(&viewpoint.stats, level, &mut rng);
            let trajectory = Trajectory {
                start: viewpoint.coord,
                direction,
                weight,
            };
            let out = render_blurred_frame(
                scene,
                intr,
                &trajectory,
                cfg.latent_samples,
                cfg.sampling,
                &mut rng,
                opts,
            )?;
            let meta = FrameMeta {
                viewpoint: viewpoint.index,
                level,
                frame,
                seed,
                trajectory,
                is_reference: level == 0,
            };
            sink(meta, out)
        })
        .collect()
}

/// Collecting variant of [`generate_setting_with`].
pub fn generate_setting<T: Real>(
    scene: &Scene<T>,
    intr: &CameraIntrinsics<T>,
    viewpoint: &Viewpoint<T>,
    cfg: &BlurConfig,
    global_seed: u64,
    opts: &TraceOptions<T>,
) -> Result<Vec<(FrameMeta<T>, BlurredFrame<T>)>> {
    generate_setting_with(scene, intr, viewpoint, cfg, global_seed, opts, |m, f| {
        Ok((m, f))
    })
}
