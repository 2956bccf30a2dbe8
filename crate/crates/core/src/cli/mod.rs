//! Command-line front end.
//!
//! Every subcommand is deterministic under `--seed` whatever `--threads` is.
//! Failures print one line starting with `error:` and exit with status 1.

mod degrade;
mod eval;
mod generate;
mod render_ref;
mod stats;
mod warp;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub use degrade::DegradeArgs;
pub use eval::{EvalArgs, EVAL_HEADER};
pub use generate::GenerateArgs;
pub use render_ref::RenderRefArgs;
pub use stats::{StatsArgs, STATS_HEADER};
pub use warp::WarpArgs;

#[derive(Debug, Parser)]
#[command(
    name = "mvblur",
    version,
    about = "Multi-view blur/noise dataset synthesis and geometry tools"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Output path (directory or file, depending on the command).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..=16384))]
    pub width: u32,
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..=16384))]
    pub height: u32,
}

impl GlobalArgs {
    fn require_out(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("--out is required for this command".into()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a blurred multi-view dataset.
    Generate(GenerateArgs),
    /// Apply the noise model to a dataset at one or more gains.
    Degrade(DegradeArgs),
    /// Warp the nearest neighbours of one frame into it and report reprojection errors.
    Warp(WarpArgs),
    /// Volume-render an analytic field and report quadrature convergence.
    RenderRef(RenderRefArgs),
    /// Compare two datasets (or blurred frames against references) frame by frame.
    Eval(EvalArgs),
    /// Histograms of scene range, scene dimension and blur weight.
    Stats(StatsArgs),
    /// Print or save the procedural scene for a seed.
    Scene(SceneArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SceneArgs {
    /// Procedural scene seed (default: --seed).
    #[arg(long)]
    pub scene_seed: Option<u64>,
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        builder = builder.num_threads(n as usize);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Generate(a) => generate::run(&cli.global, a),
        Command::Degrade(a) => degrade::run(&cli.global, a),
        Command::Warp(a) => warp::run(&cli.global, a),
        Command::RenderRef(a) => render_ref::run(&cli.global, a),
        Command::Eval(a) => eval::run(&cli.global, a),
        Command::Stats(a) => stats::run(&cli.global, a),
        Command::Scene(a) => scene_dump(&cli.global, a),
    })
}

/// Parses `args` (including the program name) and runs them, returning the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return 1;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            1
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn scene_dump(g: &GlobalArgs, a: &SceneArgs) -> Result<()> {
    let seed = a.scene_seed.unwrap_or(g.seed);
    let scene = generate::procedural_scene(seed);
    write_text(g.out.as_deref(), &scene.to_json())
}

/// Writes to `path`, or stdout when absent.
fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(p, text).map_err(|e| Error::io(p, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Parses `"a,b"` into a pair.
fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let a = a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        format!("{v}")
    }
}
