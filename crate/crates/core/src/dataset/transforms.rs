//! Export to the NeRF-synthetic `transforms.json` layout.
//!
//! `transform_matrix` is camera→world. With [`AxisConvention::OpenCv`] it is
//! exactly the inverse of the stored world→camera pose (camera +x right, +y
//! down, +z forward). [`AxisConvention::OpenGl`] negates the y and z camera
//! axes, which is what most NeRF tooling expects.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetManifest;
use crate::camera::CameraPose;
use crate::error::{Error, Result};
use crate::linalg::{mat4_mul, Mat4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisConvention {
    #[default]
    OpenCv,
    OpenGl,
}

impl AxisConvention {
    fn flip(self) -> Mat4<f64> {
        let s = match self {
            AxisConvention::OpenCv => 1.0,
            AxisConvention::OpenGl => -1.0,
        };
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, 0.0],
            [0.0, 0.0, s, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformFrame {
    pub file_path: String,
    pub transform_matrix: Mat4<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transforms {
    pub camera_angle_x: f64,
    pub fl_x: f64,
    pub fl_y: f64,
    pub cx: f64,
    pub cy: f64,
    pub w: u32,
    pub h: u32,
    pub axis_convention: AxisConvention,
    pub frames: Vec<TransformFrame>,
}

impl Transforms {
    pub fn from_manifest(manifest: &DatasetManifest, convention: AxisConvention) -> Result<Self> {
        let first = manifest
            .frames
            .first()
            .ok_or_else(|| Error::InconsistentManifest("no frames to export".into()))?;
        let intr = first.intrinsics;
        if manifest.frames.iter().any(|f| f.intrinsics != intr) {
            return Err(Error::MixedIntrinsics);
        }
        let flip = convention.flip();
        let frames = manifest
            .frames
            .iter()
            .map(|f| {
                let c2w = CameraPose::from_homogeneous(&f.pose)?
                    .inverse()
                    .to_homogeneous();
                Ok(TransformFrame {
                    file_path: f.file_path.clone(),
                    transform_matrix: mat4_mul(&c2w, &flip),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            camera_angle_x: 2.0 * (intr.width as f64 / (2.0 * intr.fx)).atan(),
            fl_x: intr.fx,
            fl_y: intr.fy,
            cx: intr.cx,
            cy: intr.cy,
            w: intr.width,
            h: intr.height,
            axis_convention: convention,
            frames,
        })
    }

    /// World→camera poses recovered from the stored matrices.
    pub fn world_to_camera(&self) -> Result<Vec<CameraPose<f64>>> {
        let flip = self.axis_convention.flip();
        self.frames
            .iter()
            .map(|f| {
                Ok(CameraPose::from_homogeneous(&mat4_mul(&f.transform_matrix, &flip))?.inverse())
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::json("transforms", e))
    }
}

/// Writes `root/transforms.json` and returns its contents.
pub fn export_transforms(
    manifest: &DatasetManifest,
    root: &Path,
    convention: AxisConvention,
) -> Result<Transforms> {
    let t = Transforms::from_manifest(manifest, convention)?;
    let path = root.join("transforms.json");
    std::fs::write(&path, t.to_json()?).map_err(|e| Error::io(&path, e))?;
    Ok(t)
}

pub fn import_transforms(path: &Path) -> Result<Transforms> {
    let text = std::fs::read_to_string(path).map_err(|e| super::codec::missing_or_io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}
