//! Image-quality and depth-stability metrics, plus histogram binning for
//! dataset statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};
use crate::real::Real;

fn check_shapes<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

pub fn mse<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<T> {
    check_shapes(a, b)?;
    if a.data().is_empty() {
        return Err(Error::NoValidPixels);
    }
    let mut sum = T::zero();
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let d = x - y;
        sum += d * d;
    }
    Ok(sum / T::lit(a.data().len() as f64))
}

/// Peak signal-to-noise ratio in dB. Identical inputs give `+∞`.
pub fn psnr<T: Real>(a: &Image<T>, b: &Image<T>, peak: T) -> Result<T> {
    if !(peak > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "peak must be > 0, got {peak}"
        )));
    }
    let m = mse(a, b)?;
    if m == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::lit(10.0) * (peak * peak / m).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    /// Odd window side length.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub peak: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            peak: 1.0,
        }
    }
}

fn gaussian_kernel<T: Real>(size: usize, sigma: f64) -> Vec<T> {
    let c = (size / 2) as f64;
    let w: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| T::lit(v / s)).collect()
}

/// Separable "valid" convolution of a `w×h` plane.
fn filter_valid<T: Real>(plane: &[T], w: usize, h: usize, k: &[T]) -> Vec<T> {
    let n = k.len();
    let ow = w + 1 - n;
    let oh = h + 1 - n;
    let mut tmp = vec![T::zero(); ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            let mut s = T::zero();
            for (j, &kj) in k.iter().enumerate() {
                s += kj * row[x + j];
            }
            tmp[y * ow + x] = s;
        }
    }
    let mut out = vec![T::zero(); ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut s = T::zero();
            for (j, &kj) in k.iter().enumerate() {
                s += kj * tmp[(y + j) * ow + x];
            }
            out[y * ow + x] = s;
        }
    }
    out
}

/// Mean structural similarity over all fully covered window positions and
/// the three channels.
pub fn ssim<T: Real>(a: &Image<T>, b: &Image<T>, params: &SsimParams) -> Result<T> {
    check_shapes(a, b)?;
    let win = params.window;
    if win == 0 || win.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window must be odd, got {win}"
        )));
    }
    if !(params.sigma > 0.0 && params.peak > 0.0) {
        return Err(Error::InvalidParameter("sigma and peak must be > 0".into()));
    }
    let (w, h) = (a.width() as usize, a.height() as usize);
    if w < win || h < win {
        return Err(Error::ShapeMismatch(format!(
            "{w}x{h} image is smaller than the {win}x{win} window"
        )));
    }
    let k = gaussian_kernel::<T>(win, params.sigma);
    let c1 = T::lit((params.k1 * params.peak).powi(2));
    let c2 = T::lit((params.k2 * params.peak).powi(2));
    let two = T::lit(2.0);
    let mut total = T::zero();
    let mut count = 0usize;
    for c in 0..3 {
        let pa: Vec<T> = a.data().iter().skip(c).step_by(3).copied().collect();
        let pb: Vec<T> = b.data().iter().skip(c).step_by(3).copied().collect();
        let prod = |p: &[T], q: &[T]| p.iter().zip(q).map(|(&x, &y)| x * y).collect::<Vec<T>>();
        let mu_a = filter_valid(&pa, w, h, &k);
        let mu_b = filter_valid(&pb, w, h, &k);
        let e_aa = filter_valid(&prod(&pa, &pa), w, h, &k);
        let e_bb = filter_valid(&prod(&pb, &pb), w, h, &k);
        let e_ab = filter_valid(&prod(&pa, &pb), w, h, &k);
        for i in 0..mu_a.len() {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = e_aa[i] - ma * ma;
            let vb = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            let num = (two * ma * mb + c1) * (two * cov + c2);
            let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
            total += num / den;
            count += 1;
        }
    }
    Ok(total / T::lit(count as f64))
}

/// Mean per-pixel change between two depth predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthStabilityReport<T> {
    /// Mean `|d_test − d_ref|` in scene units.
    pub delta_abs: T,
    /// `delta_abs` normalised by the scene range.
    pub delta_rel: T,
    pub pixel_count: usize,
}

/// Compares depth over jointly valid pixels. `scene_range` is the far − near
/// extent of the scene.
pub fn depth_stability<T: Real>(
    d_ref: &DepthMap<T>,
    d_test: &DepthMap<T>,
    scene_range: T,
) -> Result<DepthStabilityReport<T>> {
    if d_ref.dims() != d_test.dims() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            d_ref.dims(),
            d_test.dims()
        )));
    }
    if !(scene_range > T::zero()) || !scene_range.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "scene range must be > 0, got {scene_range}"
        )));
    }
    let mut sum = T::zero();
    let mut n = 0usize;
    for i in 0..d_ref.len() {
        if let (Some(a), Some(b)) = (d_ref.get_index(i), d_test.get_index(i)) {
            sum += (b - a).abs();
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoValidPixels);
    }
    let delta_abs = sum / T::lit(n as f64);
    Ok(DepthStabilityReport {
        delta_abs,
        delta_rel: delta_abs / scene_range,
        pixel_count: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    /// `bins + 1` uniformly spaced edges.
    pub edges: Vec<T>,
    pub counts: Vec<u64>,
    /// Values below the first edge.
    pub underflow: u64,
    /// Values above the last edge, plus non-finite values.
    pub overflow: u64,
}

impl<T: Real> Histogram<T> {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

/// Uniform-width histogram over `[lo, hi]`; `hi` itself lands in the last bin.
pub fn histogram<T: Real>(values: &[T], bins: usize, lo: T, hi: T) -> Result<Histogram<T>> {
    if bins == 0 {
        return Err(Error::InvalidParameter(
            "histogram needs at least one bin".into(),
        ));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "invalid histogram range [{lo}, {hi}]"
        )));
    }
    let nb = T::lit(bins as f64);
    let edges = (0..=bins)
        .map(|i| lo + (hi - lo) * T::lit(i as f64) / nb)
        .collect();
    let mut counts = vec![0u64; bins];
    let (mut underflow, mut overflow) = (0, 0);
    for &v in values {
        if v < lo {
            underflow += 1;
        } else if !(v <= hi) {
            overflow += 1;
        } else {
            let idx = ((v - lo) / (hi - lo) * nb).floor().to_usize().unwrap_or(0);
            counts[idx.min(bins - 1)] += 1;
        }
    }
    Ok(Histogram {
        edges,
        counts,
        underflow,
        overflow,
    })
}
