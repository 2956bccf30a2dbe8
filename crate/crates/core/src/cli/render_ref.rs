use std::path::PathBuf;

use clap::Args;

use super::{fmt_f64, GlobalArgs};
use crate::camera::{CameraIntrinsics, CameraPose};
use crate::dataset::{encode_gamma, write_depth, write_png, BitDepth, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::render::{volume_render_image, volume_render_ray, FieldSpec, Ray};

#[derive(Debug, Clone, Args)]
pub struct RenderRefArgs {
    /// Field description JSON; without it a constant field is built from
    /// --sigma, --color and --far.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_delimiter = ',', num_args = 3, default_value = "1,1,1")]
    pub color: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub far: f64,
    /// Quadrature steps for the convergence report (finest row).
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Rows in the convergence table; each halves the step count.
    #[arg(long, default_value_t = 5)]
    pub halvings: u32,
    /// Steps per ray for the image written to --out.
    #[arg(long, default_value_t = 256)]
    pub image_steps: usize,
    #[arg(long, default_value_t = 50.0)]
    pub fov: f64,
}

impl RenderRefArgs {
    fn spec(&self) -> Result<FieldSpec> {
        let spec = match &self.field {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| Error::json(p.display().to_string(), e))?
            }
            None => FieldSpec::Constant {
                sigma: self.sigma,
                color: [self.color[0], self.color[1], self.color[2]],
                far: self.far,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub(super) fn run(g: &GlobalArgs, a: &RenderRefArgs) -> Result<()> {
    let spec = a.spec()?;
    if a.steps == 0 || a.image_steps == 0 {
        return Err(Error::InvalidParameter("step counts must be >= 1".into()));
    }
    let field = spec.build::<f64>();
    let ray = Ray::new(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0));
    let exact = spec.constant::<f64>();
    match exact {
        Some(_) => println!("steps,color_err,depth_err,transmittance,depth_err_ratio"),
        None => println!("steps,r,g,b,depth,transmittance"),
    }
    let mut prev_err: Option<f64> = None;
    for h in 0..=a.halvings {
        let steps = a.steps >> h;
        if steps == 0 {
            break;
        }
        let s = volume_render_ray(field.as_ref(), &ray, steps)?;
        match &exact {
            Some(c) => {
                let ec = c.exact_color();
                let color_err = (0..3)
                    .map(|k| (s.color[k] - ec[k]).abs())
                    .fold(0.0, f64::max);
                let depth_err = (s.depth - c.exact_depth()).abs();
                let ratio = prev_err.map_or(f64::NAN, |p| depth_err / p);
                println!(
                    "{steps},{:e},{:e},{},{}",
                    color_err,
                    depth_err,
                    fmt_f64(s.transmittance),
                    fmt_f64(ratio)
                );
                prev_err = Some(depth_err);
            }
            None => println!(
                "{steps},{},{},{},{},{}",
                fmt_f64(s.color[0]),
                fmt_f64(s.color[1]),
                fmt_f64(s.color[2]),
                fmt_f64(s.depth),
                fmt_f64(s.transmittance)
            ),
        }
    }
    if let Some(out) = &g.out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let intr = CameraIntrinsics::from_fov(g.width, g.height, a.fov)?;
        let (img, depth) = volume_render_image(
            field.as_ref(),
            &intr,
            &CameraPose::identity(),
            a.image_steps,
        )?;
        write_png(
            &out.join("render.png"),
            &encode_gamma(&img, DEFAULT_GAMMA),
            BitDepth::Sixteen,
            Some(DEFAULT_GAMMA),
        )?;
        write_depth(&out.join("render_depth.bin"), &depth)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
