use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use super::{parse_pair, GlobalArgs};
use crate::dataset::{read_dataset, DatasetWriter, FrameRecord};
use crate::error::Result;
use crate::noise::{degrade, NoiseConfig};
use crate::seed::noise_seed;

#[derive(Debug, Clone, Args)]
pub struct DegradeArgs {
    /// Source dataset root.
    #[arg(long)]
    pub input: PathBuf,
    /// Gains to apply; each one produces `<out>/gain_<g>`.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub gains: Vec<f64>,
    /// Shot-noise coefficient.
    #[arg(long, default_value_t = NoiseConfig::default().shot_coeff)]
    pub shot: f64,
    /// Read-noise coefficient.
    #[arg(long, default_value_t = NoiseConfig::default().read_coeff)]
    pub read: f64,
    /// White-balance gain range `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "0.7,1.3")]
    pub wb: (f64, f64),
    /// Do not clamp noisy values to [0, 1].
    #[arg(long)]
    pub no_clip: bool,
}

impl DegradeArgs {
    fn config(&self, gain: f64, gamma: f64) -> Result<NoiseConfig> {
        let cfg = NoiseConfig {
            gain,
            gamma,
            wb_range: self.wb,
            shot_coeff: self.shot,
            read_coeff: self.read,
            clip_max: (!self.no_clip).then_some(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub(super) fn run(g: &GlobalArgs, a: &DegradeArgs) -> Result<()> {
    let out = g.require_out()?;
    let ds = read_dataset(&a.input)?;
    let gamma = ds.manifest().gamma;
    let configs = a
        .gains
        .iter()
        .map(|&gain| a.config(gain, gamma))
        .collect::<Result<Vec<_>>>()?;
    for cfg in configs {
        let root = out.join(format!("gain_{}", cfg.gain));
        let writer = DatasetWriter::create(&root, ds.manifest().bit_depth, gamma)?;
        let frames = (0..ds.len())
            .into_par_iter()
            .map(|i| {
                let display = ds.load_display(i)?;
                let seed = noise_seed(g.seed, cfg.gain.to_bits(), i as u64);
                let (noisy, record) = degrade(&display, &cfg, seed)?;
                let depth = match ds.frame(i).depth_path {
                    Some(_) => Some(ds.load_depth(i)?),
                    None => None,
                };
                let rec = FrameRecord {
                    noise: Some(record),
                    ..ds.frame(i).clone()
                };
                writer.write_display_frame(&rec, &noisy, depth.as_ref())?;
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut manifest = ds.manifest().clone();
        manifest.frames = frames;
        writer.finish(&manifest)?;
        println!(
            "degraded {} frames at gain {} -> {}",
            ds.len(),
            cfg.gain,
            root.display()
        );
    }
    Ok(())
}
