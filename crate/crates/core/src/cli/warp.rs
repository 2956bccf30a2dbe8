use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use super::{fmt_f64, GlobalArgs};
use crate::dataset::{encode_gamma, read_dataset, write_depth, write_png, BitDepth};
use crate::error::{Error, Result};
use crate::geometry::{
    build_aligned_stack, nearest_k, reprojection_errors, warp_view, AlignedStack,
};
use crate::image::{DepthMap, Image};

#[derive(Debug, Clone, Args)]
pub struct WarpArgs {
    /// Dataset root (must contain depth maps).
    #[arg(long)]
    pub input: PathBuf,
    /// Source frame index into the manifest.
    #[arg(long)]
    pub index: usize,
    /// Number of neighbours. Candidates are the frames of other viewpoints
    /// with the same blur level and frame number as the source.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

/// Magic of the aligned-stack file: `STK1 | W u32 | H u32 | C u32 | f32 LE`.
const STACK_MAGIC: &[u8; 4] = b"STK1";

fn write_stack(path: &std::path::Path, s: &AlignedStack<f64>) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + s.channels.len() * 4);
    bytes.extend_from_slice(STACK_MAGIC);
    for v in [s.width, s.height, s.channel_count() as u32] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for &v in &s.channels {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(super) fn run(g: &GlobalArgs, a: &WarpArgs) -> Result<()> {
    let out = g.require_out()?;
    let ds = read_dataset(&a.input)?;
    if a.index >= ds.len() {
        return Err(Error::InvalidParameter(format!(
            "frame {} out of range ({} frames)",
            a.index,
            ds.len()
        )));
    }
    let src = ds.frame(a.index);
    let candidates: Vec<usize> = (0..ds.len())
        .filter(|&j| {
            let f = ds.frame(j);
            j == a.index
                || (f.blur_level == src.blur_level
                    && f.frame == src.frame
                    && f.viewpoint != src.viewpoint)
        })
        .collect();
    let views = candidates
        .iter()
        .map(|&j| {
            ds.view_record(j, true).map_err(|e| match e {
                Error::MissingDepth(_) => Error::InvalidParameter(format!(
                    "frame {j} ({}) has no depth map; warping needs depth",
                    ds.frame(j).file_path
                )),
                e => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pos = candidates
        .iter()
        .position(|&j| j == a.index)
        .expect("source is a candidate");
    let neighbours = nearest_k(&views, pos, a.k)?;
    let view_i = &views[pos];
    let depth_i = view_i.depth.as_ref().expect("loaded with depth");

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let gamma = ds.manifest().gamma;
    let mut csv = String::from("neighbour,frame,checked_pixels,mean_px,max_px,within_0_5px\n");
    let mut warps = Vec::with_capacity(neighbours.len());
    let mut all_errors = Vec::new();
    for (j, &nb) in neighbours.iter().enumerate() {
        let view_k = &views[nb];
        let warped = warp_view(view_k, depth_i, &view_i.intrinsics, &view_i.pose)?;
        let (w, h) = warped.image.dims();
        write_png(
            &out.join(format!("warped_{j}.png")),
            &encode_gamma(&warped.image, gamma),
            BitDepth::Sixteen,
            Some(gamma),
        )?;
        let mut d = DepthMap::invalid(w, h);
        for p in 0..warped.valid.len() {
            d.set_index(p, warped.valid[p].then_some(warped.depth[p]));
        }
        write_depth(&out.join(format!("warped_{j}_depth.bin")), &d)?;
        let mask = Image::from_fn(w, h, |x, y| {
            let v = if warped.valid[(y * w + x) as usize] {
                1.0
            } else {
                0.0
            };
            [v; 3]
        });
        write_png(
            &out.join(format!("warped_{j}_mask.png")),
            &mask,
            BitDepth::Eight,
            None,
        )?;

        let depth_k = view_k.depth.as_ref().expect("loaded with depth");
        let errs: Vec<f64> = reprojection_errors(
            depth_i,
            &view_i.intrinsics,
            &view_i.pose,
            depth_k,
            &view_k.intrinsics,
            &view_k.pose,
        )
        .into_iter()
        .flatten()
        .collect();
        let n = errs.len();
        let mean = if n > 0 {
            errs.iter().sum::<f64>() / n as f64
        } else {
            f64::NAN
        };
        let max = errs.iter().copied().fold(f64::NAN, f64::max);
        let within = if n > 0 {
            errs.iter().filter(|&&e| e < 0.5).count() as f64 / n as f64
        } else {
            f64::NAN
        };
        writeln!(
            csv,
            "{j},{},{n},{},{},{}",
            candidates[nb],
            fmt_f64(mean),
            fmt_f64(max),
            fmt_f64(within)
        )
        .expect("string write");
        all_errors.extend(errs);
        warps.push(warped);
    }
    let stack = build_aligned_stack(view_i, &warps)?;
    write_stack(&out.join("stack.bin"), &stack)?;
    let csv_path = out.join("reprojection.csv");
    std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
    let mean = if all_errors.is_empty() {
        f64::NAN
    } else {
        all_errors.iter().sum::<f64>() / all_errors.len() as f64
    };
    println!(
        "warped {} neighbours into frame {} ({} channels); mean reprojection error {} px",
        warps.len(),
        a.index,
        stack.channel_count(),
        fmt_f64(mean)
    );
    Ok(())
}
