//! Training objectives and their analytic gradients.
//!
//! Reductions run sequentially in index order so values are reproducible
//! bit-for-bit regardless of threading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};
use crate::real::Real;

/// A scalar loss and its gradient with respect to the prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad<T, G = Vec<T>> {
    pub value: T,
    pub grad: G,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    /// Weight of the depth term.
    pub lambda_depth: f64,
    /// Base weight of the restoration term (before annealing).
    pub lambda_restore: f64,
    /// Smooth-L1 transition point.
    pub beta: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_depth: 1.0,
            lambda_restore: 0.01,
            beta: 1.0,
        }
    }
}

/// Exponential decay of the restoration weight, `max(floor, αⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub alpha: f64,
    pub floor: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            alpha: 0.99997,
            floor: 0.01,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.floor) {
            return Err(Error::InvalidParameter(format!(
                "floor must lie in [0, 1], got {}",
                self.floor
            )));
        }
        Ok(())
    }

    /// `max(floor, αⁿ)`.
    pub fn factor(&self, nstep: u64) -> f64 {
        self.alpha.powf(nstep as f64).max(self.floor)
    }
}

fn check_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{what}: {a} vs {b} elements")));
    }
    Ok(())
}

/// Mean squared error; gradient `2(pred − gt)/N`.
pub fn photometric_loss<T: Real>(pred: &[T], gt: &[T]) -> Result<LossGrad<T>> {
    check_len(pred.len(), gt.len(), "photometric loss")?;
    if pred.is_empty() {
        return Err(Error::NoValidPixels);
    }
    let n = T::lit(pred.len() as f64);
    let mut sum = T::zero();
    let mut grad = Vec::with_capacity(pred.len());
    for (&p, &g) in pred.iter().zip(gt) {
        let d = p - g;
        sum += d * d;
        grad.push(T::lit(2.0) * d / n);
    }
    Ok(LossGrad {
        value: sum / n,
        grad,
    })
}

/// `0.5·d²/β` for `|d| < β`, else `|d| − 0.5·β`.
#[inline]
pub fn smooth_l1<T: Real>(d: T, beta: T) -> T {
    let a = d.abs();
    if a < beta {
        T::lit(0.5) * d * d / beta
    } else {
        a - T::lit(0.5) * beta
    }
}

#[inline]
pub fn smooth_l1_derivative<T: Real>(d: T, beta: T) -> T {
    if d.abs() < beta {
        d / beta
    } else {
        d.signum()
    }
}

/// Mean smooth-L1 over pixels valid in both maps. The pseudo ground truth is
/// a constant: only the gradient with respect to `pred` is returned (zero on
/// excluded pixels).
pub fn depth_loss<T: Real>(
    pred: &DepthMap<T>,
    pseudo_gt: &DepthMap<T>,
    beta: T,
) -> Result<LossGrad<T>> {
    if pred.dims() != pseudo_gt.dims() {
        return Err(Error::ShapeMismatch(format!(
            "depth loss: {:?} vs {:?}",
            pred.dims(),
            pseudo_gt.dims()
        )));
    }
    if !(beta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be > 0, got {beta}"
        )));
    }
    let mask: Vec<Option<T>> = (0..pred.len())
        .map(|i| Some(pred.get_index(i)? - pseudo_gt.get_index(i)?))
        .collect();
    let count = mask.iter().filter(|d| d.is_some()).count();
    if count == 0 {
        return Err(Error::NoValidPixels);
    }
    let n = T::lit(count as f64);
    let mut sum = T::zero();
    let grad = mask
        .iter()
        .map(|d| match d {
            Some(d) => {
                sum += smooth_l1(*d, beta);
                smooth_l1_derivative(*d, beta) / n
            }
            None => T::zero(),
        })
        .collect();
    Ok(LossGrad {
        value: sum / n,
        grad,
    })
}

/// `Σ_i mean|Î_i − I_i|` over image pairs. Each per-image gradient is the
/// subgradient `sign(Î − I)/N_i` with `sign(0) = 0`.
pub fn restoration_loss<T: Real>(
    restored: &[Image<T>],
    clean: &[Image<T>],
) -> Result<LossGrad<T, Vec<Vec<T>>>> {
    check_len(restored.len(), clean.len(), "restoration loss image count")?;
    let mut value = T::zero();
    let mut grads = Vec::with_capacity(restored.len());
    for (r, c) in restored.iter().zip(clean) {
        if !r.same_shape(c) {
            return Err(Error::ShapeMismatch(format!(
                "restoration loss: {:?} vs {:?}",
                r.dims(),
                c.dims()
            )));
        }
        if r.data().is_empty() {
            return Err(Error::NoValidPixels);
        }
        let n = T::lit(r.data().len() as f64);
        let mut sum = T::zero();
        let mut g = Vec::with_capacity(r.data().len());
        for (&a, &b) in r.data().iter().zip(c.data()) {
            let d = a - b;
            sum += d.abs();
            g.push(if d == T::zero() {
                T::zero()
            } else {
                d.signum() / n
            });
        }
        value += sum / n;
        grads.push(g);
    }
    Ok(LossGrad { value, grad: grads })
}

/// Restoration weight at optimizer step `nstep`.
pub fn anneal_weight(lambda_restore: f64, sched: &AnnealSchedule, nstep: u64) -> f64 {
    sched.factor(nstep) * lambda_restore
}

/// `photo + λ_depth·depth + λ_restore(nstep)·restore`, with the annealed
/// restoration weight in place of the base one.
pub fn total_loss<T: Real>(
    photo: T,
    depth: T,
    restore: T,
    weights: &LossWeights,
    sched: &AnnealSchedule,
    nstep: u64,
) -> Result<T> {
    for (name, v) in [
        ("photometric", photo),
        ("depth", depth),
        ("restoration", restore),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} loss is {v}")));
        }
    }
    let lr = T::lit(anneal_weight(weights.lambda_restore, sched, nstep));
    Ok(photo + T::lit(weights.lambda_depth) * depth + lr * restore)
}
