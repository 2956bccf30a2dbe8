//! Quadrature of the emission-absorption integral
//! `C = ∫₀^{t_f} T(t)·σ(o + t·d)·c(o + t·d, d) dt`, `T(t) = exp(−∫₀^t σ)`,
//! and of its depth variant where `c` is replaced by `t`.
//!
//! The interval `[0, t_f]` is split into `steps` equal pieces of width `δ`.
//! Piece `j` is represented by its left end `t_j = j·δ`:
//! `α_j = 1 − exp(−σ_j·δ)`, `T_j = Π_{i<j} (1 − α_i)`,
//! `color = Σ T_j·α_j·c_j`, `depth = Σ T_j·α_j·t_j`.
//! The compositing weights are exact for piecewise-constant density, so the
//! color of a constant field is exact for any step count while the depth
//! converges at first order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{CameraIntrinsics, CameraPose};
use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};
use crate::linalg::{Point3, Vec3};
use crate::real::Real;

use super::trace::{pixel_ray, Ray};

pub trait RadianceField<T: Real>: Sync {
    /// Density `σ(x) ≥ 0`.
    fn sigma(&self, x: Point3<T>) -> T;
    /// Emitted color `c(x, d)`.
    fn color(&self, x: Point3<T>, d: Vec3<T>) -> [T; 3];
    /// Integration bound `t_f` along each ray.
    fn far_bound(&self) -> T;
}

/// Spatially constant density and color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField<T> {
    pub sigma: T,
    pub color: [T; 3],
    pub far: T,
}

impl<T: Real> ConstantField<T> {
    /// Closed-form color `c·(1 − e^{−σ t_f})`.
    pub fn exact_color(&self) -> [T; 3] {
        let a = T::one() - (-self.sigma * self.far).exp();
        self.color.map(|c| c * a)
    }

    /// Closed-form depth `∫₀^{t_f} σ·e^{−σt}·t dt = (1 − e^{−σ t_f}(1 + σ t_f)) / σ`.
    pub fn exact_depth(&self) -> T {
        if self.sigma == T::zero() {
            return T::zero();
        }
        let st = self.sigma * self.far;
        (T::one() - (-st).exp() * (T::one() + st)) / self.sigma
    }

    pub fn exact_transmittance(&self) -> T {
        (-self.sigma * self.far).exp()
    }
}

impl<T: Real> RadianceField<T> for ConstantField<T> {
    fn sigma(&self, _: Point3<T>) -> T {
        self.sigma
    }

    fn color(&self, _: Point3<T>, _: Vec3<T>) -> [T; 3] {
        self.color
    }

    fn far_bound(&self) -> T {
        self.far
    }
}

/// Homogeneous ball of density `sigma` in otherwise empty space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereField<T> {
    pub center: Point3<T>,
    pub radius: T,
    pub sigma: T,
    pub color: [T; 3],
    pub far: T,
}

impl<T: Real> RadianceField<T> for SphereField<T> {
    fn sigma(&self, x: Point3<T>) -> T {
        if (x - self.center).norm_squared() <= self.radius * self.radius {
            self.sigma
        } else {
            T::zero()
        }
    }

    fn color(&self, _: Point3<T>, _: Vec3<T>) -> [T; 3] {
        self.color
    }

    fn far_bound(&self) -> T {
        self.far
    }
}

/// JSON description of an analytic field, e.g.
/// `{"kind": "constant", "sigma": 1.0, "color": [1, 1, 1], "far": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Constant {
        sigma: f64,
        color: [f64; 3],
        far: f64,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
        sigma: f64,
        color: [f64; 3],
        far: f64,
    },
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        let (sigma, far, color) = match self {
            FieldSpec::Constant { sigma, color, far } => (*sigma, *far, color),
            FieldSpec::Sphere {
                sigma,
                color,
                far,
                radius,
                ..
            } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParameter(
                        "sphere field radius must be > 0".into(),
                    ));
                }
                (*sigma, *far, color)
            }
        };
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(
                "density must be non-negative".into(),
            ));
        }
        if !(far > 0.0) {
            return Err(Error::InvalidParameter("far bound must be > 0".into()));
        }
        if color.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("field color must be finite".into()));
        }
        Ok(())
    }

    pub fn constant<T: Real>(&self) -> Option<ConstantField<T>> {
        match self {
            FieldSpec::Constant { sigma, color, far } => Some(ConstantField {
                sigma: T::lit(*sigma),
                color: color.map(T::lit),
                far: T::lit(*far),
            }),
            _ => None,
        }
    }

    pub fn build<T: Real>(&self) -> Box<dyn RadianceField<T>> {
        match self {
            FieldSpec::Constant { .. } => Box::new(self.constant::<T>().expect("constant spec")),
            FieldSpec::Sphere {
                center,
                radius,
                sigma,
                color,
                far,
            } => Box::new(SphereField {
                center: Vec3::new(T::lit(center[0]), T::lit(center[1]), T::lit(center[2])),
                radius: T::lit(*radius),
                sigma: T::lit(*sigma),
                color: color.map(T::lit),
                far: T::lit(*far),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSample<T> {
    pub color: [T; 3],
    pub depth: T,
    /// Transmittance after the last interval.
    pub transmittance: T,
}

pub fn volume_render_ray<T: Real, F: RadianceField<T> + ?Sized>(
    field: &F,
    ray: &Ray<T>,
    steps: usize,
) -> Result<VolumeSample<T>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let far = field.far_bound();
    if !(far > T::zero()) || !far.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "far bound must be > 0, got {far}"
        )));
    }
    let delta = far / T::lit(steps as f64);
    let mut transmittance = T::one();
    let mut color = [T::zero(); 3];
    let mut depth = T::zero();
    for j in 0..steps {
        let t = T::lit(j as f64) * delta;
        let x = ray.at(t);
        let sigma = field.sigma(x);
        if !sigma.is_finite() || sigma < T::zero() {
            return Err(Error::NonFiniteField { t: t.as_f64() });
        }
        let keep = (-sigma * delta).exp();
        let weight = transmittance * (T::one() - keep);
        if weight > T::zero() {
            let c = field.color(x, ray.direction);
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteField { t: t.as_f64() });
            }
            for k in 0..3 {
                color[k] += weight * c[k];
            }
            depth += weight * t;
        }
        transmittance *= keep;
    }
    Ok(VolumeSample {
        color,
        depth,
        transmittance,
    })
}

/// Renders one ray per pixel. Depth is reported along the ray, converted to
/// camera-frame z.
pub fn volume_render_image<T: Real, F: RadianceField<T> + ?Sized>(
    field: &F,
    intr: &CameraIntrinsics<T>,
    pose: &CameraPose<T>,
    steps: usize,
) -> Result<(Image<T>, DepthMap<T>)> {
    let w = intr.width as usize;
    let forward = pose.rotation.row(2);
    let samples: Vec<(VolumeSample<T>, T)> = (0..intr.pixel_count())
        .into_par_iter()
        .map(|i| {
            let ray = pixel_ray(intr, pose, (i % w) as u32, (i / w) as u32);
            volume_render_ray(field, &ray, steps).map(|s| (s, ray.direction.dot(forward)))
        })
        .collect::<Result<_>>()?;
    let mut img = Image::new(intr.width, intr.height);
    let mut depth = DepthMap::invalid(intr.width, intr.height);
    for (i, (s, cos)) in samples.into_iter().enumerate() {
        img.data_mut()[i * 3..i * 3 + 3].copy_from_slice(&s.color);
        let opacity = T::one() - s.transmittance;
        depth.set_index(
            i,
            if opacity > T::zero() {
                Some(s.depth * cos)
            } else {
                None
            },
        );
    }
    Ok((img, depth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis_ray() -> Ray<f64> {
        Ray::new(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0))
    }

    #[test]
    fn empty_space_is_transparent() {
        let f = ConstantField {
            sigma: 0.0,
            color: [1.0; 3],
            far: 3.0,
        };
        let s = volume_render_ray(&f, &axis_ray(), 100).unwrap();
        assert_eq!(s.color, [0.0; 3]);
        assert_eq!(s.transmittance, 1.0);
        assert_eq!(s.depth, 0.0);
    }

    #[test]
    fn constant_field_color_is_exact_at_any_resolution() {
        let f = ConstantField {
            sigma: 1.0,
            color: [1.0, 0.5, 0.25],
            far: 1.0,
        };
        for steps in [1, 7, 100] {
            let s = volume_render_ray(&f, &axis_ray(), steps).unwrap();
            let exact = f.exact_color();
            for (c, e) in s.color.iter().zip(exact.iter()) {
                assert!((c - e).abs() < 1e-13);
            }
            assert!((s.transmittance - f.exact_transmittance()).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = ConstantField {
            sigma: 1.0,
            color: [1.0; 3],
            far: 1.0,
        };
        assert!(volume_render_ray(&f, &axis_ray(), 0).is_err());
        let nan = ConstantField {
            sigma: f64::NAN,
            color: [1.0; 3],
            far: 1.0,
        };
        assert!(matches!(
            volume_render_ray(&nan, &axis_ray(), 4),
            Err(Error::NonFiniteField { .. })
        ));
        let bad_color = ConstantField {
            sigma: 1.0,
            color: [f64::INFINITY, 0.0, 0.0],
            far: 1.0,
        };
        assert!(volume_render_ray(&bad_color, &axis_ray(), 4).is_err());
    }

    #[test]
    fn sphere_field_matches_chord_length() {
        let f = SphereField {
            center: Vec3::new(0.0, 0.0, 3.0),
            radius: 1.0,
            sigma: 0.7,
            color: [1.0; 3],
            far: 6.0,
        };
        let s = volume_render_ray(&f, &axis_ray(), 60_000).unwrap();
        // chord of length 2 through the center
        assert!((s.transmittance - (-1.4f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn single_precision_constant_field() {
        let f = ConstantField {
            sigma: 1.0f32,
            color: [1.0; 3],
            far: 1.0,
        };
        let ray = Ray::new(Vec3::zero(), Vec3::new(0.0f32, 0.0, 1.0));
        let s = volume_render_ray(&f, &ray, 1000).unwrap();
        assert!((s.color[0] - f.exact_color()[0]).abs() < 1e-4);
        assert!((s.depth - f.exact_depth()).abs() < 2e-3);
    }

    #[test]
    fn field_spec_json() {
        let spec: FieldSpec =
            serde_json::from_str(r#"{"kind":"constant","sigma":1.0,"color":[1,1,1],"far":1.0}"#)
                .unwrap();
        spec.validate().unwrap();
        assert!(spec.constant::<f64>().is_some());
        let bad: FieldSpec =
            serde_json::from_str(r#"{"kind":"constant","sigma":-1.0,"color":[1,1,1],"far":1.0}"#)
                .unwrap();
        assert!(bad.validate().is_err());
    }
}
