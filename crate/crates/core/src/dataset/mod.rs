//! Dataset layout on disk.
//!
//! ```text
//! root/manifest.json
//! root/images/<level>/v000_l1_f000.png   gamma-encoded RGB, 8 or 16 bit
//! root/depth/v000_l1_f000.bin            "DGF1", u32 W, u32 H, f32 LE, NaN = invalid
//! ```
//!
//! The manifest is written last through a rename, so an interrupted write
//! never leaves a readable dataset behind.

mod codec;
mod transforms;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use codec::{
    check_depth_header, read_depth, read_depth_raw, read_png, write_depth, write_png, BitDepth,
    DEPTH_MAGIC,
};
pub use transforms::{
    export_transforms, import_transforms, AxisConvention, TransformFrame, Transforms,
};

use crate::blur::{BlurConfig, FrameMeta, Viewpoint};
use crate::camera::{CameraIntrinsics, CameraPose};
use crate::error::{Error, Result};
use crate::geometry::ViewRecord;
use crate::image::{DepthMap, Image};
use crate::linalg::{Mat4, Vec3};
use crate::noise::DegradeRecord;

pub const SCHEMA_VERSION: u32 = 1;
pub const GENERATOR: &str = concat!("mvblur ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST_FILE: &str = "manifest.json";
/// Display gamma applied to stored images.
pub const DEFAULT_GAMMA: f64 = 2.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    /// Image path relative to the dataset root, forward slashes.
    pub file_path: String,
    pub depth_path: Option<String>,
    pub viewpoint: usize,
    pub blur_level: u32,
    pub frame: usize,
    /// World→camera, row-major 4×4.
    pub pose: Mat4<f64>,
    pub intrinsics: CameraIntrinsics<f64>,
    pub blur_weight: f64,
    /// Trajectory direction δ (Δr %, Δφ °, Δθ °).
    pub trajectory: Vec3<f64>,
    pub noise: Option<DegradeRecord>,
    pub seed: u64,
    pub is_reference: bool,
}

/// `v000_l1_f000`.
pub fn frame_stem(viewpoint: usize, level: u32, frame: usize) -> String {
    format!("v{viewpoint:03}_l{level}_f{frame:03}")
}

impl FrameRecord {
    /// Record for a generated frame using the standard file layout.
    pub fn from_meta(
        meta: &FrameMeta<f64>,
        pose: &CameraPose<f64>,
        intrinsics: &CameraIntrinsics<f64>,
        with_depth: bool,
    ) -> Self {
        let stem = frame_stem(meta.viewpoint, meta.level, meta.frame);
        Self {
            file_path: format!("images/{}/{stem}.png", meta.level),
            depth_path: with_depth.then(|| format!("depth/{stem}.bin")),
            viewpoint: meta.viewpoint,
            blur_level: meta.level,
            frame: meta.frame,
            pose: pose.to_homogeneous(),
            intrinsics: *intrinsics,
            blur_weight: meta.trajectory.weight,
            trajectory: meta.trajectory.direction,
            noise: None,
            seed: meta.seed,
            is_reference: meta.is_reference,
        }
    }

    pub fn camera_pose(&self) -> Result<CameraPose<f64>> {
        CameraPose::from_homogeneous(&self.pose)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub generator: String,
    pub global_seed: u64,
    pub scene_id: String,
    pub bit_depth: BitDepth,
    /// Stored pixel values are `linear^(1/gamma)`.
    pub gamma: f64,
    pub blur: Option<BlurConfig>,
    /// Sampled camera positions with their per-view scene statistics.
    pub viewpoints: Vec<Viewpoint<f64>>,
    /// Serialized order is iteration order.
    pub frames: Vec<FrameRecord>,
}

fn check_relative(p: &str) -> Result<()> {
    let bad = p.is_empty()
        || p.starts_with('/')
        || p.contains('\\')
        || p.split('/').any(|c| c == ".." || c.is_empty());
    if bad {
        return Err(Error::InconsistentManifest(format!(
            "path {p:?} must be relative, forward-slashed and stay inside the dataset"
        )));
    }
    Ok(())
}

impl DatasetManifest {
    pub fn new(global_seed: u64, scene_id: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: GENERATOR.to_string(),
            global_seed,
            scene_id: scene_id.into(),
            bit_depth: BitDepth::default(),
            gamma: DEFAULT_GAMMA,
            blur: None,
            viewpoints: Vec::new(),
            frames: Vec::new(),
        }
    }

    /// Structural checks that do not touch the filesystem.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InconsistentManifest(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        let mut seen = HashSet::new();
        for (i, f) in self.frames.iter().enumerate() {
            for p in std::iter::once(&f.file_path).chain(&f.depth_path) {
                check_relative(p)?;
                if !seen.insert(p.as_str()) {
                    return Err(Error::InconsistentManifest(format!(
                        "duplicate path {p:?} (frame {i})"
                    )));
                }
            }
            f.camera_pose()
                .map_err(|e| Error::InconsistentManifest(format!("frame {i}: {e}")))?;
            f.intrinsics
                .validate()
                .map_err(|e| Error::InconsistentManifest(format!("frame {i}: {e}")))?;
        }
        if let Some(cfg) = &self.blur {
            let expected = self.viewpoints.len() * cfg.frames_per_viewpoint();
            if self.frames.len() > expected {
                return Err(Error::InconsistentManifest(format!(
                    "{} frames exceed {} viewpoints × {} frames",
                    self.frames.len(),
                    self.viewpoints.len(),
                    cfg.frames_per_viewpoint()
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::json("manifest", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::json("manifest", e))?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InconsistentManifest("missing schema_version".into()))?;
        if found != SCHEMA_VERSION as u64 {
            return Err(Error::SchemaMismatch {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: SCHEMA_VERSION,
            });
        }
        let m: Self = serde_json::from_value(value).map_err(|e| Error::json("manifest", e))?;
        m.validate()?;
        Ok(m)
    }
}

/// Linear radiance → stored display values.
pub fn encode_gamma(img: &Image<f64>, gamma: f64) -> Image<f64> {
    let g = 1.0 / gamma;
    img.map(|v| v.clamp(0.0, 1.0).powf(g))
}

/// Stored display values → linear radiance.
pub fn decode_gamma(img: &Image<f64>, gamma: f64) -> Image<f64> {
    img.map(|v| v.powf(gamma))
}

/// Writes frames one at a time (from any thread) and the manifest last.
#[derive(Debug)]
pub struct DatasetWriter {
    root: PathBuf,
    bit_depth: BitDepth,
    gamma: f64,
}

impl DatasetWriter {
    /// Prepares `root`, removing any existing manifest so the directory is
    /// not a valid dataset until [`DatasetWriter::finish`] succeeds.
    pub fn create(root: &Path, bit_depth: BitDepth, gamma: f64) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let manifest = root.join(MANIFEST_FILE);
        match std::fs::remove_file(&manifest) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(manifest, e)),
        }
        Ok(Self {
            root: root.to_path_buf(),
            bit_depth,
            gamma,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn prepare(&self, rel: &str) -> Result<PathBuf> {
        check_relative(rel)?;
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        Ok(path)
    }

    /// Writes a frame given in linear radiance.
    pub fn write_frame(
        &self,
        rec: &FrameRecord,
        image: &Image<f64>,
        depth: Option<&DepthMap<f64>>,
    ) -> Result<()> {
        self.write_display_frame(rec, &encode_gamma(image, self.gamma), depth)
    }

    /// Writes a frame whose values are already gamma-encoded.
    pub fn write_display_frame(
        &self,
        rec: &FrameRecord,
        display: &Image<f64>,
        depth: Option<&DepthMap<f64>>,
    ) -> Result<()> {
        let dims = (rec.intrinsics.width, rec.intrinsics.height);
        if display.dims() != dims || depth.is_some_and(|d| d.dims() != dims) {
            return Err(Error::InconsistentManifest(format!(
                "{}: buffers do not match {}x{} intrinsics",
                rec.file_path, dims.0, dims.1
            )));
        }
        let path = self.prepare(&rec.file_path)?;
        write_png(&path, display, self.bit_depth, Some(self.gamma))?;
        match (&rec.depth_path, depth) {
            (Some(rel), Some(d)) => write_depth(&self.prepare(rel)?, d),
            (None, None) => Ok(()),
            _ => Err(Error::InconsistentManifest(format!(
                "{}: depth_path and depth buffer must be given together",
                rec.file_path
            ))),
        }
    }

    /// Validates the manifest against the written files, then publishes it.
    pub fn finish(self, manifest: &DatasetManifest) -> Result<()> {
        manifest.validate()?;
        if manifest.bit_depth != self.bit_depth || manifest.gamma != self.gamma {
            return Err(Error::InconsistentManifest(
                "manifest encoding differs from the writer's".into(),
            ));
        }
        for f in &manifest.frames {
            for p in std::iter::once(&f.file_path).chain(&f.depth_path) {
                if !self.root.join(p).is_file() {
                    return Err(Error::MissingFile(self.root.join(p)));
                }
            }
        }
        let tmp = self.root.join(format!("{MANIFEST_FILE}.tmp"));
        std::fs::write(&tmp, manifest.to_json()?).map_err(|e| Error::io(&tmp, e))?;
        let dst = self.root.join(MANIFEST_FILE);
        std::fs::rename(&tmp, &dst).map_err(|e| Error::io(dst, e))
    }
}

/// Writes a complete dataset. `images` are linear radiance, one per frame.
pub fn write_dataset(
    manifest: &DatasetManifest,
    images: &[Image<f64>],
    depths: &[Option<DepthMap<f64>>],
    root: &Path,
) -> Result<()> {
    let n = manifest.frames.len();
    if images.len() != n || depths.len() != n {
        return Err(Error::InconsistentManifest(format!(
            "{n} frames but {} images and {} depth maps",
            images.len(),
            depths.len()
        )));
    }
    manifest.validate()?;
    let writer = DatasetWriter::create(root, manifest.bit_depth, manifest.gamma)?;
    for ((rec, img), d) in manifest.frames.iter().zip(images).zip(depths) {
        writer.write_frame(rec, img, d.as_ref())?;
    }
    writer.finish(manifest)
}

/// A validated dataset whose frames are decoded on demand.
#[derive(Debug, Clone)]
pub struct Dataset {
    root: PathBuf,
    manifest: DatasetManifest,
}

/// Opens `root`, validating the manifest, file presence and depth headers.
pub fn read_dataset(root: &Path) -> Result<Dataset> {
    let path = root.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| codec::missing_or_io(&path, e))?;
    let manifest = DatasetManifest::from_json(&text)?;
    for f in &manifest.frames {
        let img = root.join(&f.file_path);
        if !img.is_file() {
            return Err(Error::MissingFile(img));
        }
        if let Some(d) = &f.depth_path {
            let dims = check_depth_header(&root.join(d))?;
            if dims != (f.intrinsics.width, f.intrinsics.height) {
                return Err(Error::CorruptDepth {
                    path: root.join(d),
                    reason: format!("size {dims:?} does not match intrinsics"),
                });
            }
        }
    }
    Ok(Dataset {
        root: root.to_path_buf(),
        manifest,
    })
}

impl Dataset {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn into_manifest(self) -> DatasetManifest {
        self.manifest
    }

    pub fn len(&self) -> usize {
        self.manifest.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.frames.is_empty()
    }

    pub fn frame(&self, i: usize) -> &FrameRecord {
        &self.manifest.frames[i]
    }

    /// Stored (gamma-encoded) values in `[0, 1]`.
    pub fn load_display(&self, i: usize) -> Result<Image<f64>> {
        let f = self.frame(i);
        let path = self.root.join(&f.file_path);
        let img = read_png(&path)?;
        if img.dims() != (f.intrinsics.width, f.intrinsics.height) {
            return Err(Error::CorruptImage {
                path,
                reason: format!("size {:?} does not match intrinsics", img.dims()),
            });
        }
        Ok(img)
    }

    /// Linear radiance.
    pub fn load_image(&self, i: usize) -> Result<Image<f64>> {
        Ok(decode_gamma(&self.load_display(i)?, self.manifest.gamma))
    }

    pub fn load_depth(&self, i: usize) -> Result<DepthMap<f64>> {
        match &self.frame(i).depth_path {
            Some(p) => read_depth(&self.root.join(p)),
            None => Err(Error::MissingDepth(i)),
        }
    }

    /// Frame `i` as a posed view in linear radiance.
    pub fn view_record(&self, i: usize, with_depth: bool) -> Result<ViewRecord<f64>> {
        let f = self.frame(i);
        let depth = if with_depth {
            Some(self.load_depth(i)?)
        } else {
            None
        };
        ViewRecord::new(
            self.load_image(i)?,
            depth,
            f.intrinsics,
            f.camera_pose()?,
            i,
        )
    }
}
