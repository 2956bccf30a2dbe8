//! Dense image buffers.

use crate::error::{Error, Result};
use crate::real::Real;

/// Row-major, interleaved RGB radiance.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

impl<T: Real> Image<T> {
    pub fn new(width: u32, height: u32) -> Self {
        Self::filled(width, height, [T::zero(); 3])
    }

    pub fn filled(width: u32, height: u32, rgb: [T; 3]) -> Self {
        let n = width as usize * height as usize;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&rgb);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: u32, height: u32, data: Vec<T>) -> Result<Self> {
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} RGB image needs {expected} values, got {}",
                width,
                height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [T; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<T> {
        self.data
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [T; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, rgb: [T; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&rgb);
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dims() == other.dims()
    }

    pub fn cast<U: Real>(&self) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Per-pixel camera-frame z-depth with an explicit validity mask.
///
/// Invalid pixels (ray misses, failed warps) store zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap<T> {
    width: u32,
    height: u32,
    depth: Vec<T>,
    valid: Vec<bool>,
}

impl<T: Real> DepthMap<T> {
    pub fn invalid(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            depth: vec![T::zero(); n],
            valid: vec![false; n],
        }
    }

    /// Fully valid map with the given depths; non-positive or non-finite
    /// entries are marked invalid.
    pub fn from_depths(width: u32, height: u32, depth: Vec<T>) -> Result<Self> {
        let n = width as usize * height as usize;
        if depth.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} depth map needs {n} values, got {}",
                depth.len()
            )));
        }
        let mut map = Self::invalid(width, height);
        for (i, d) in depth.into_iter().enumerate() {
            map.set_index(i, Some(d));
        }
        Ok(map)
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Option<T>) -> Self {
        let mut map = Self::invalid(width, height);
        for y in 0..height {
            for x in 0..width {
                map.set(x, y, f(x, y));
            }
        }
        map
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    #[inline]
    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Option<T> {
        self.get_index(self.index(x, y))
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> Option<T> {
        if self.valid[i] {
            Some(self.depth[i])
        } else {
            None
        }
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, d: Option<T>) {
        let i = self.index(x, y);
        self.set_index(i, d);
    }

    #[inline]
    pub fn set_index(&mut self, i: usize, d: Option<T>) {
        match d {
            Some(d) if d > T::zero() && d.is_finite() => {
                self.depth[i] = d;
                self.valid[i] = true;
            }
            _ => {
                self.depth[i] = T::zero();
                self.valid[i] = false;
            }
        }
    }

    /// Raw depth values; invalid entries hold zero.
    #[inline]
    pub fn values(&self) -> &[T] {
        &self.depth
    }

    #[inline]
    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Minimum and maximum valid depth.
    pub fn range(&self) -> Option<(T, T)> {
        self.depth.iter().zip(&self.valid).filter(|(_, &v)| v).fold(
            None,
            |acc, (&d, _)| match acc {
                None => Some((d, d)),
                Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
            },
        )
    }

    pub fn map_valid(&self, f: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        for i in 0..out.depth.len() {
            if out.valid[i] {
                let d = f(out.depth[i]);
                out.set_index(i, Some(d));
            }
        }
        out
    }

    pub fn cast<U: Real>(&self) -> DepthMap<U> {
        DepthMap {
            width: self.width,
            height: self.height,
            depth: self.depth.iter().map(|v| U::lit(v.as_f64())).collect(),
            valid: self.valid.clone(),
        }
    }
}
