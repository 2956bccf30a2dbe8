use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use super::{fmt_f64, write_text, GlobalArgs};
use crate::dataset::{read_dataset, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{depth_stability, psnr, ssim, SsimParams};

pub const EVAL_HEADER: &str = "frame,psnr_db,ssim,delta_abs_depth,delta_rel_depth";

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Test dataset.
    #[arg(long)]
    pub a: PathBuf,
    /// Reference dataset, paired frame by frame with --a.
    #[arg(
        long,
        required_unless_present = "reference",
        conflicts_with = "reference"
    )]
    pub b: Option<PathBuf>,
    /// Compare every blurred frame of --a with the level-0 frame of its viewpoint.
    #[arg(long)]
    pub reference: bool,
    /// Normaliser for relative depth (default: far − near of the frame's viewpoint).
    #[arg(long)]
    pub scene_range: Option<f64>,
}

struct Row {
    label: String,
    level: u32,
    psnr: f64,
    ssim: f64,
    depth: Option<(f64, f64)>,
}

fn reference_pairs(a: &Dataset) -> Result<Vec<(usize, usize)>> {
    let mut refs = BTreeMap::new();
    for (i, f) in a.manifest().frames.iter().enumerate() {
        if f.is_reference {
            refs.entry(f.viewpoint).or_insert(i);
        }
    }
    (0..a.len())
        .filter(|&i| !a.frame(i).is_reference)
        .map(|i| {
            let vp = a.frame(i).viewpoint;
            refs.get(&vp).map(|&r| (i, r)).ok_or_else(|| {
                Error::InconsistentManifest(format!(
                    "viewpoint {vp} has no level-0 reference frame"
                ))
            })
        })
        .collect()
}

fn stem(path: &str) -> &str {
    let name = path.rsplit('/').next().unwrap_or(path);
    name.rsplit_once('.').map_or(name, |(s, _)| s)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

pub(super) fn run(g: &GlobalArgs, args: &EvalArgs) -> Result<()> {
    if args.scene_range.is_some_and(|r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("--scene-range must be > 0".into()));
    }
    let a = read_dataset(&args.a)?;
    let b = match &args.b {
        Some(p) => Some(read_dataset(p)?),
        None => None,
    };
    let pairs: Vec<(usize, usize)> = match &b {
        Some(b) => {
            if a.len() != b.len() {
                return Err(Error::ShapeMismatch(format!(
                    "frame-count mismatch: {} vs {}",
                    a.len(),
                    b.len()
                )));
            }
            (0..a.len()).map(|i| (i, i)).collect()
        }
        None => reference_pairs(&a)?,
    };
    let other = b.as_ref().unwrap_or(&a);
    let params = SsimParams::default();
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| {
            let fa = a.frame(i);
            let img_a = a.load_image(i)?;
            let img_b = other.load_image(j)?;
            let depth = match (&fa.depth_path, &other.frame(j).depth_path) {
                (Some(_), Some(_)) => {
                    let range = args.scene_range.or_else(|| {
                        a.manifest()
                            .viewpoints
                            .iter()
                            .find(|v| v.index == fa.viewpoint)
                            .map(|v| v.stats.depth_extent())
                            .filter(|r| *r > 0.0)
                    });
                    match range {
                        Some(r) => {
                            let rep = depth_stability(&other.load_depth(j)?, &a.load_depth(i)?, r)?;
                            Some((rep.delta_abs, rep.delta_rel))
                        }
                        None => None,
                    }
                }
                _ => None,
            };
            Ok(Row {
                label: stem(&fa.file_path).to_string(),
                level: fa.blur_level,
                psnr: psnr(&img_a, &img_b, 1.0)?,
                ssim: ssim(&img_a, &img_b, &params)?,
                depth,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::new();
    writeln!(csv, "{EVAL_HEADER}").expect("string write");
    let line = |csv: &mut String, label: &str, p: f64, s: f64, d: Option<(f64, f64)>| {
        let (da, dr) = d.map_or((String::new(), String::new()), |(x, y)| {
            (fmt_f64(x), fmt_f64(y))
        });
        writeln!(csv, "{label},{},{},{da},{dr}", fmt_f64(p), fmt_f64(s)).expect("string write");
    };
    for r in &rows {
        line(&mut csv, &r.label, r.psnr, r.ssim, r.depth);
    }
    let aggregate = |rs: &[&Row]| {
        let depth = rs
            .iter()
            .all(|r| r.depth.is_some())
            .then(|| {
                (
                    mean(rs.iter().filter_map(|r| r.depth.map(|d| d.0))),
                    mean(rs.iter().filter_map(|r| r.depth.map(|d| d.1))),
                )
            })
            .filter(|_| !rs.is_empty());
        (
            mean(rs.iter().map(|r| r.psnr)),
            mean(rs.iter().map(|r| r.ssim)),
            depth,
        )
    };
    let mut levels: BTreeMap<u32, Vec<&Row>> = BTreeMap::new();
    for r in &rows {
        levels.entry(r.level).or_default().push(r);
    }
    for (l, rs) in &levels {
        let (p, s, d) = aggregate(rs);
        line(&mut csv, &format!("mean_level_{l}"), p, s, d);
    }
    let all: Vec<&Row> = rows.iter().collect();
    let (p, s, d) = aggregate(&all);
    line(&mut csv, "mean_all", p, s, d);
    write_text(g.out.as_deref(), &csv)
}
