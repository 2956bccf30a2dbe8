use crate::error::{Error, Result};
use crate::real::Real;

use super::warp::{ViewRecord, WarpedView};

/// Channel concatenation of a source view with K warped neighbours:
/// `[I (3), D (1), Ĩ_1 (3) … Ĩ_K (3), D̃_1 (1) … D̃_K (1)]`, stored pixel-major
/// (`H × W × 4(K+1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedStack<T> {
    pub width: u32,
    pub height: u32,
    pub neighbours: usize,
    pub channels: Vec<T>,
    /// `H × W × K`, pixel-major.
    pub valid: Vec<bool>,
}

impl<T: Real> AlignedStack<T> {
    pub fn channel_count(&self) -> usize {
        4 * (self.neighbours + 1)
    }

    /// Plane of a single channel, row-major.
    pub fn channel(&self, c: usize) -> Vec<T> {
        let n = self.channel_count();
        assert!(c < n, "channel {c} out of range for {n} channels");
        self.channels.iter().skip(c).step_by(n).copied().collect()
    }

    /// Channel offsets of the neighbour-`j` image (3 channels) and depth.
    pub fn neighbour_channels(&self, j: usize) -> (usize, usize) {
        (4 + 3 * j, 4 + 3 * self.neighbours + j)
    }
}

pub fn build_aligned_stack<T: Real>(
    view_i: &ViewRecord<T>,
    warps: &[WarpedView<T>],
) -> Result<AlignedStack<T>> {
    let (w, h) = view_i.image.dims();
    let depth = view_i
        .depth
        .as_ref()
        .ok_or(Error::MissingDepth(view_i.index))?;
    if depth.dims() != (w, h) {
        return Err(Error::DimensionMismatch(
            "source depth does not match source image".into(),
        ));
    }
    for (j, wv) in warps.iter().enumerate() {
        let n = w as usize * h as usize;
        if wv.image.dims() != (w, h) || wv.depth.len() != n || wv.valid.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "warped view {j} is not {w}x{h}"
            )));
        }
    }
    let k = warps.len();
    let nc = 4 * (k + 1);
    let n = w as usize * h as usize;
    let mut channels = Vec::with_capacity(n * nc);
    let mut valid = Vec::with_capacity(n * k);
    let src = view_i.image.data();
    for p in 0..n {
        channels.extend_from_slice(&src[p * 3..p * 3 + 3]);
        channels.push(depth.get_index(p).unwrap_or(T::zero()));
        for wv in warps {
            if wv.valid[p] {
                channels.extend_from_slice(&wv.image.data()[p * 3..p * 3 + 3]);
            } else {
                channels.extend_from_slice(&[T::zero(); 3]);
            }
        }
        for wv in warps {
            channels.push(if wv.valid[p] { wv.depth[p] } else { T::zero() });
            valid.push(wv.valid[p]);
        }
    }
    Ok(AlignedStack {
        width: w,
        height: h,
        neighbours: k,
        channels,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{CameraIntrinsics, CameraPose};
    use crate::image::{DepthMap, Image};

    fn source() -> ViewRecord<f64> {
        let img = Image::from_fn(3, 2, |x, y| [x as f64, y as f64, 7.0]);
        let depth = DepthMap::from_fn(3, 2, |x, _| Some(1.0 + x as f64));
        let intr = CameraIntrinsics::new(10.0, 10.0, 1.5, 1.0, 3, 2).unwrap();
        ViewRecord::new(img, Some(depth), intr, CameraPose::identity(), 0).unwrap()
    }

    fn warped(tag: f64, invalid_at: usize) -> WarpedView<f64> {
        let mut valid = vec![true; 6];
        valid[invalid_at] = false;
        let mut image = Image::filled(3, 2, [tag; 3]);
        image.data_mut()[invalid_at * 3..invalid_at * 3 + 3].copy_from_slice(&[0.0; 3]);
        let depth = (0..6)
            .map(|p| if p == invalid_at { 0.0 } else { tag * 10.0 })
            .collect();
        WarpedView {
            image,
            depth,
            valid,
        }
    }

    #[test]
    fn zero_neighbours_is_image_plus_depth() {
        let s = build_aligned_stack(&source(), &[]).unwrap();
        assert_eq!(s.channel_count(), 4);
        assert_eq!(s.channel(0), vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        assert_eq!(s.channel(3), vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert!(s.valid.is_empty());
    }

    #[test]
    fn two_neighbours_follow_concatenation_order() {
        let src = source();
        let s = build_aligned_stack(&src, &[warped(0.25, 1), warped(0.5, 4)]).unwrap();
        assert_eq!(s.channel_count(), 12);
        assert_eq!(s.channels.len(), 6 * 12);
        // I_i
        assert_eq!(s.channel(2), vec![7.0; 6]);
        // Ĩ_1, Ĩ_2
        assert_eq!(s.channel(4), vec![0.25, 0.0, 0.25, 0.25, 0.25, 0.25]);
        assert_eq!(s.channel(7), vec![0.5, 0.5, 0.5, 0.5, 0.0, 0.5]);
        // D̃_1, D̃_2
        assert_eq!(s.channel(10), vec![2.5, 0.0, 2.5, 2.5, 2.5, 2.5]);
        assert_eq!(s.channel(11), vec![5.0, 5.0, 5.0, 5.0, 0.0, 5.0]);
        assert_eq!(s.neighbour_channels(1), (7, 11));
        assert!(!s.valid[2]);
        assert!(!s.valid[9]);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let mut bad = warped(0.1, 0);
        bad.depth.pop();
        assert!(matches!(
            build_aligned_stack(&source(), &[bad]),
            Err(Error::DimensionMismatch(_))
        ));
        let mut no_depth = source();
        no_depth.depth = None;
        assert!(matches!(
            build_aligned_stack(&no_depth, &[]),
            Err(Error::MissingDepth(0))
        ));
    }
}
