//! Bilinear grid sampling.
//!
//! Sample coordinates are continuous pixel coordinates with pixel `(u, v)`
//! centered at `(u + 0.5, v + 0.5)`. Points inside the image rectangle
//! `[0, W] × [0, H]` are in bounds; within the outer half pixel the nearest
//! edge value is used. Anything outside returns zero and `in_bounds = false`.

use crate::image::{DepthMap, Image};
use crate::real::Real;

/// Integer taps and weights for a continuous coordinate.
struct Taps<T> {
    x0: u32,
    x1: u32,
    y0: u32,
    y1: u32,
    wx: T,
    wy: T,
}

fn axis_taps<T: Real>(c: T, n: u32) -> Option<(u32, u32, T)> {
    let size = T::lit(n as f64);
    if !(c >= T::zero() && c <= size) {
        return None;
    }
    let half = T::lit(0.5);
    let last = T::lit((n - 1) as f64);
    let idx = (c - half).max(T::zero()).min(last);
    let i0 = idx.floor();
    let frac = idx - i0;
    let i0 = i0.to_u32().unwrap_or(0).min(n - 1);
    let i1 = (i0 + 1).min(n - 1);
    Some((i0, i1, frac))
}

fn taps<T: Real>(x: T, y: T, w: u32, h: u32) -> Option<Taps<T>> {
    if w == 0 || h == 0 {
        return None;
    }
    let (x0, x1, wx) = axis_taps(x, w)?;
    let (y0, y1, wy) = axis_taps(y, h)?;
    Some(Taps {
        x0,
        x1,
        y0,
        y1,
        wx,
        wy,
    })
}

pub fn bilinear_sample<T: Real>(img: &Image<T>, x: T, y: T) -> ([T; 3], bool) {
    let Some(t) = taps(x, y, img.width(), img.height()) else {
        return ([T::zero(); 3], false);
    };
    let one = T::one();
    let (a, b) = (img.get(t.x0, t.y0), img.get(t.x1, t.y0));
    let (c, d) = (img.get(t.x0, t.y1), img.get(t.x1, t.y1));
    let mut out = [T::zero(); 3];
    for k in 0..3 {
        let top = a[k] * (one - t.wx) + b[k] * t.wx;
        let bottom = c[k] * (one - t.wx) + d[k] * t.wx;
        out[k] = top * (one - t.wy) + bottom * t.wy;
    }
    (out, true)
}

/// Bilinear depth lookup. The result is invalid when any tap carrying
/// weight above `sqrt(ε)` is invalid; taps below that (round-off from an
/// almost exact pixel-center hit) are dropped and the rest renormalized.
pub fn bilinear_sample_depth<T: Real>(depth: &DepthMap<T>, x: T, y: T) -> (T, bool) {
    let Some(t) = taps(x, y, depth.width(), depth.height()) else {
        return (T::zero(), false);
    };
    let one = T::one();
    let corners = [
        (t.x0, t.y0, (one - t.wx) * (one - t.wy)),
        (t.x1, t.y0, t.wx * (one - t.wy)),
        (t.x0, t.y1, (one - t.wx) * t.wy),
        (t.x1, t.y1, t.wx * t.wy),
    ];
    let eps = T::epsilon().sqrt();
    let mut acc = T::zero();
    let mut total = T::zero();
    for (cx, cy, w) in corners {
        if w <= eps {
            continue;
        }
        match depth.get(cx, cy) {
            Some(d) => {
                acc += w * d;
                total += w;
            }
            None => return (T::zero(), false),
        }
    }
    (acc / total, true)
}
