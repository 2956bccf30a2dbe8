use std::path::PathBuf;
use std::time::Instant;

use clap::builder::TypedValueParser;
use clap::Args;

use super::{parse_pair, GlobalArgs};
use crate::blur::{generate_setting_with, plan_viewpoint, BlurConfig, LatentSampling};
use crate::camera::CameraIntrinsics;
use crate::dataset::{
    export_transforms, AxisConvention, BitDepth, DatasetManifest, DatasetWriter, FrameRecord,
    DEFAULT_GAMMA,
};
use crate::error::{Error, Result};
use crate::render::TraceOptions;
use crate::scene::procedural::random_scene;
use crate::scene::viewpoint::ViewpointSampler;
use crate::scene::Scene;

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Scene JSON file; a procedural scene is used when absent.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Seed of the procedural scene (default: --seed).
    #[arg(long)]
    pub scene_seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub viewpoints: u32,
    /// Blur levels to render; level 0 is the sharp reference.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub levels: Vec<u32>,
    /// Frames per blur level.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Latent sharp images averaged per blurred frame.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Camera distance as a multiple of the bounding-sphere radius, `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "2.5,3.5")]
    pub radius_scale: (f64, f64),
    /// Trajectory magnitude bound Δ₀.
    #[arg(long, default_value_t = 2.5)]
    pub delta0: f64,
    /// Place latent samples evenly along the trajectory instead of uniformly at random.
    #[arg(long)]
    pub even_spacing: bool,
    /// Horizontal field of view in degrees.
    #[arg(long, default_value_t = 50.0)]
    pub fov: f64,
    /// PNG bits per channel (8 or 16).
    #[arg(long, default_value_t = 16, value_parser = clap::builder::PossibleValuesParser::new(["8", "16"]).map(|s| s.parse::<u8>().unwrap()))]
    pub bit_depth: u8,
    /// Skip depth maps.
    #[arg(long)]
    pub no_depth: bool,
    /// Also write transforms.json with this camera axis convention.
    #[arg(long, value_enum)]
    pub transforms: Option<Convention>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Convention {
    Opencv,
    Opengl,
}

pub(super) fn procedural_scene(seed: u64) -> Scene<f64> {
    random_scene(seed, &format!("procedural-{seed}"))
}

pub(super) fn run(g: &GlobalArgs, a: &GenerateArgs) -> Result<()> {
    let out = g.require_out()?;
    let bits = BitDepth::try_from(a.bit_depth).map_err(Error::InvalidParameter)?;
    let scene = match &a.scene {
        Some(p) => Scene::load(p)?,
        None => procedural_scene(a.scene_seed.unwrap_or(g.seed)),
    };
    scene.validate()?;
    let intr = CameraIntrinsics::from_fov(g.width, g.height, a.fov)?;
    let sampler = ViewpointSampler::with_radius_scale(a.radius_scale.0, a.radius_scale.1)?;
    let cfg = BlurConfig {
        levels: a.levels.clone(),
        delta0: a.delta0,
        latent_samples: a.m,
        frames_per_level: a.n,
        sampling: if a.even_spacing {
            LatentSampling::EvenlySpaced
        } else {
            LatentSampling::Uniform
        },
    };
    cfg.validate()?;

    let start = Instant::now();
    let writer = DatasetWriter::create(out, bits, DEFAULT_GAMMA)?;
    let mut manifest = DatasetManifest::new(g.seed, scene.id.clone());
    manifest.bit_depth = bits;
    manifest.blur = Some(cfg.clone());
    let opts = TraceOptions::default();
    for index in 0..a.viewpoints as usize {
        let vp = plan_viewpoint(&scene, &intr, &sampler, index, g.seed)?;
        let records =
            generate_setting_with(&scene, &intr, &vp, &cfg, g.seed, &opts, |meta, frame| {
                let rec = FrameRecord::from_meta(&meta, &frame.reference_pose, &intr, !a.no_depth);
                let depth = (!a.no_depth).then_some(&frame.depth);
                writer.write_frame(&rec, &frame.image, depth)?;
                Ok(rec)
            })?;
        manifest.viewpoints.push(vp);
        manifest.frames.extend(records);
    }
    writer.finish(&manifest)?;
    if let Some(c) = a.transforms {
        let conv = match c {
            Convention::Opencv => AxisConvention::OpenCv,
            Convention::Opengl => AxisConvention::OpenGl,
        };
        export_transforms(&manifest, out, conv)?;
    }
    println!(
        "generated {} frames ({} viewpoints, scene {}) in {:.2}s -> {}",
        manifest.frames.len(),
        manifest.viewpoints.len(),
        scene.id,
        start.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}
