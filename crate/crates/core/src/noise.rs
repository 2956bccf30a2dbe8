//! Signal-dependent sensor noise.
//!
//! `degrade` runs: inverse gamma → random white balance → heteroscedastic
//! Gaussian noise → inverse white balance → gamma. The noise standard
//! deviation at linear signal `x` is `sqrt((g·λ_read)² + g·λ_shot·x)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::real::Real;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Sensor gain `g ≥ 1`.
    pub gain: f64,
    pub gamma: f64,
    /// Per-channel white-balance gains are drawn from `U(lo, hi)`.
    pub wb_range: (f64, f64),
    /// Shot-noise variance per unit signal per unit gain.
    pub shot_coeff: f64,
    /// Read-noise standard deviation per unit gain.
    pub read_coeff: f64,
    /// Upper clamp applied after noise; `None` disables clamping on both ends.
    pub clip_max: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            gain: 1.0,
            gamma: 2.2,
            wb_range: (0.7, 1.3),
            shot_coeff: 2.5e-4,
            read_coeff: 1e-3,
            clip_max: Some(1.0),
        }
    }
}

impl NoiseConfig {
    pub fn with_gain(gain: f64) -> Self {
        Self {
            gain,
            ..Self::default()
        }
    }

    /// No noise and unit white balance.
    pub fn clean() -> Self {
        Self {
            wb_range: (1.0, 1.0),
            shot_coeff: 0.0,
            read_coeff: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.wb_range;
        if !(self.gain >= 1.0) || !self.gain.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gain must be >= 1, got {}",
                self.gain
            )));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(lo > 0.0 && lo <= hi) || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "white-balance range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
            )));
        }
        if !(self.shot_coeff >= 0.0 && self.read_coeff >= 0.0) {
            return Err(Error::InvalidParameter(
                "noise coefficients must be >= 0".into(),
            ));
        }
        if let Some(c) = self.clip_max {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "clip_max must be > 0, got {c}"
                )));
            }
        }
        Ok(())
    }

    /// Noise variance at linear signal level `x` (negative signal counts as 0).
    pub fn variance(&self, x: f64) -> f64 {
        let read = self.gain * self.read_coeff;
        read * read + self.gain * self.shot_coeff * x.max(0.0)
    }

    fn clamp(&self, v: f64) -> f64 {
        match self.clip_max {
            Some(c) => v.max(0.0).min(c),
            None => v,
        }
    }
}

/// Everything needed to reproduce one `degrade` call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradeRecord {
    pub gains: [f64; 3],
    pub seed: u64,
    pub config: NoiseConfig,
}

fn check_non_negative<T: Real>(img: &Image<T>) -> Result<()> {
    if let Some(v) = img.data().iter().find(|v| !(**v >= T::zero())) {
        return Err(Error::OutOfRange(format!(
            "pixel value {v} is negative or NaN"
        )));
    }
    Ok(())
}

/// `out = in^γ`.
pub fn linearize<T: Real>(img: &Image<T>, gamma: f64) -> Result<Image<T>> {
    check_non_negative(img)?;
    let g = T::lit(gamma);
    Ok(img.map(|v| v.powf(g)))
}

/// `out = in^(1/γ)`.
pub fn delinearize<T: Real>(img: &Image<T>, gamma: f64) -> Result<Image<T>> {
    check_non_negative(img)?;
    let g = T::lit(1.0 / gamma);
    Ok(img.map(|v| v.powf(g)))
}

/// Multiplies each channel by a gain drawn once per image from `U(lo, hi)`.
pub fn apply_white_balance<T: Real, R: Rng + ?Sized>(
    img: &Image<T>,
    rng: &mut R,
    wb_range: (f64, f64),
) -> (Image<T>, [f64; 3]) {
    let (lo, hi) = wb_range;
    let mut gains = [1.0; 3];
    for g in gains.iter_mut() {
        // consume the stream even for a degenerate range
        let u: f64 = rng.random();
        *g = if hi > lo { lo + (hi - lo) * u } else { lo };
    }
    (scale_channels(img, gains), gains)
}

/// Divides each channel by its gain.
pub fn remove_white_balance<T: Real>(img: &Image<T>, gains: [f64; 3]) -> Image<T> {
    scale_channels(img, gains.map(|g| 1.0 / g))
}

fn scale_channels<T: Real>(img: &Image<T>, s: [f64; 3]) -> Image<T> {
    let s = s.map(T::lit);
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        for k in 0..3 {
            px[k] *= s[k];
        }
    }
    out
}

/// Adds zero-mean Gaussian noise with variance [`NoiseConfig::variance`] of the
/// clean value, then clamps.
pub fn add_shot_read_noise<T: Real, R: Rng + ?Sized>(
    img: &Image<T>,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Image<T> {
    let mut out = img.clone();
    for v in out.data_mut() {
        let x = v.as_f64();
        let z: f64 = rng.sample(StandardNormal);
        *v = T::lit(cfg.clamp(x + z * cfg.variance(x).sqrt()));
    }
    out
}

/// Full degradation pipeline; the result is in the same (display) encoding
/// as the input.
pub fn degrade<T: Real>(
    img: &Image<T>,
    cfg: &NoiseConfig,
    seed: u64,
) -> Result<(Image<T>, DegradeRecord)> {
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let linear = linearize(img, cfg.gamma)?;
    let (balanced, gains) = apply_white_balance(&linear, &mut rng, cfg.wb_range);
    let noisy = add_shot_read_noise(&balanced, cfg, &mut rng);
    let restored = remove_white_balance(&noisy, gains);
    let restored = match cfg.clip_max {
        Some(_) => restored.map(|v| T::lit(cfg.clamp(v.as_f64()))),
        // without clamping negative values cannot go through the gamma curve
        None => restored.map(|v| v.max(T::zero())),
    };
    let out = delinearize(&restored, cfg.gamma)?;
    Ok((
        out,
        DegradeRecord {
            gains,
            seed,
            config: *cfg,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient() -> Image<f64> {
        Image::from_fn(16, 8, |x, y| [x as f64 / 15.0, y as f64 / 7.0, 0.5])
    }

    #[test]
    fn linearize_values() {
        let img = Image::filled(1, 1, [0.5f64; 3]);
        assert_eq!(linearize(&img, 1.0).unwrap(), img);
        let v: f64 = linearize(&img, 2.2).unwrap().get(0, 0)[0];
        assert!((v - 0.21764).abs() < 1e-5);
        let back = delinearize(&linearize(&gradient(), 2.2).unwrap(), 2.2).unwrap();
        for (a, b) in back.data().iter().zip(gradient().data()) {
            assert!((a - b).abs() < 1e-9);
        }
        let neg = Image::filled(1, 1, [-0.1; 3]);
        assert!(matches!(linearize(&neg, 2.2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn white_balance_inverts() {
        let mut rng = rng_from_seed(1);
        let (same, gains) = apply_white_balance(&gradient(), &mut rng, (1.0, 1.0));
        assert_eq!(gains, [1.0; 3]);
        assert_eq!(same, gradient());
        let (wb, gains) = apply_white_balance(&gradient(), &mut rng, (0.7, 1.3));
        let back = remove_white_balance(&wb, gains);
        for (a, b) in back.data().iter().zip(gradient().data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let cfg = NoiseConfig {
            gain: 16.0,
            ..NoiseConfig::clean()
        };
        let mut rng = rng_from_seed(4);
        assert_eq!(add_shot_read_noise(&gradient(), &cfg, &mut rng), gradient());
        let (out, rec) = degrade(&gradient(), &cfg, 9).unwrap();
        for (a, b) in out.data().iter().zip(gradient().data()) {
            assert!((a - b).abs() < 1e-7);
        }
        assert_eq!(rec.gains, [1.0; 3]);
        assert_eq!(rec.seed, 9);
    }

    #[test]
    fn degrade_is_deterministic() {
        let cfg = NoiseConfig::with_gain(8.0);
        let a = degrade(&gradient(), &cfg, 42).unwrap();
        let b = degrade(&gradient(), &cfg, 42).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_ne!(degrade(&gradient(), &cfg, 43).unwrap().0, a.0);
        assert!(a.0.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn config_validation() {
        assert!(NoiseConfig::with_gain(0.5).validate().is_err());
        let bad_wb = NoiseConfig {
            wb_range: (1.2, 1.0),
            ..NoiseConfig::default()
        };
        assert!(bad_wb.validate().is_err());
        let cfg = NoiseConfig::with_gain(4.0);
        assert!((cfg.variance(0.5) - (16e-6 + 4.0 * 2.5e-4 * 0.5)).abs() < 1e-18);
    }
}
