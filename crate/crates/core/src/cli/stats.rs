use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use super::{fmt_f64, write_text, GlobalArgs};
use crate::dataset::{read_dataset, write_png, BitDepth};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::metrics::{histogram, Histogram};

pub const STATS_HEADER: &str = "histogram,bin_lo,bin_hi,count";

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Dataset roots; one scene per dataset.
    pub roots: Vec<PathBuf>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub bins: u32,
    /// Also draw each histogram as a PNG bar chart into this directory.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

/// Histogram over the data's own range, widened when all values coincide.
fn auto_histogram(values: &[f64], bins: usize) -> Result<Histogram<f64>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = (lo.abs() * 0.05).max(0.5);
        (lo - pad, lo + pad)
    };
    histogram(values, bins, lo, hi)
}

fn bar_chart(h: &Histogram<f64>) -> Image<f64> {
    let bar = 16u32;
    let height = 96u32;
    let width = bar * h.counts.len() as u32;
    let peak = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    Image::from_fn(width, height, |x, y| {
        let c = h.counts[(x / bar) as usize] as f64;
        let top = height as f64 * (1.0 - c / peak);
        if (y as f64) >= top && x % bar != 0 {
            [0.2, 0.35, 0.7]
        } else {
            [1.0; 3]
        }
    })
}

pub(super) fn run(g: &GlobalArgs, a: &StatsArgs) -> Result<()> {
    let bins = a.bins as usize;
    let mut scene_range = Vec::new();
    let mut dimension = Vec::new();
    let mut weights: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for root in &a.roots {
        let ds = read_dataset(root)?;
        let m = ds.manifest();
        if !m.viewpoints.is_empty() {
            let n = m.viewpoints.len() as f64;
            scene_range.push(
                m.viewpoints
                    .iter()
                    .map(|v| v.stats.depth_range)
                    .sum::<f64>()
                    / n,
            );
            dimension.push(m.viewpoints[0].stats.dimension());
        }
        for f in &m.frames {
            weights.entry(f.blur_level).or_default().push(f.blur_weight);
        }
    }
    let mut named = vec![
        ("scene_range".to_string(), scene_range),
        ("dimension".to_string(), dimension),
    ];
    named.extend(
        weights
            .into_iter()
            .map(|(l, w)| (format!("blur_weight_l{l}"), w)),
    );

    let mut csv = String::new();
    writeln!(csv, "{STATS_HEADER}").expect("string write");
    if let Some(dir) = &a.plot {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    for (name, values) in named.iter().filter(|(_, v)| !v.is_empty()) {
        let h = auto_histogram(values, bins)?;
        for (k, c) in h.counts.iter().enumerate() {
            writeln!(
                csv,
                "{name},{},{},{c}",
                fmt_f64(h.edges[k]),
                fmt_f64(h.edges[k + 1])
            )
            .expect("string write");
        }
        if let Some(dir) = &a.plot {
            write_png(
                &dir.join(format!("{name}.png")),
                &bar_chart(&h),
                BitDepth::Eight,
                None,
            )?;
        }
    }
    write_text(g.out.as_deref(), &csv)
}
