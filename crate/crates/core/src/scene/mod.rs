//! Procedural scenes: analytic primitives with solid textures, lit by
//! directional lights plus an ambient term.
//!
//! Scenes are described by a versioned JSON document:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "id": "demo",
//!   "primitives": [
//!     { "type": "sphere", "center": [0, 0, 0.5], "radius": 0.5,
//!       "texture": { "type": "checker", "scale": 0.25,
//!                    "colors": [[0.9, 0.9, 0.9], [0.1, 0.2, 0.6]] } },
//!     { "type": "box", "min": [-1, -1, -0.1], "max": [1, 1, 0],
//!       "texture": { "type": "value_noise", "scale": 0.3, "seed": 7,
//!                    "colors": [[0.2, 0.2, 0.2], [0.8, 0.7, 0.5]] } },
//!     { "type": "plane", "center": [0, 0, 0], "normal": [0, 0, 1],
//!       "tangent": [1, 0, 0], "half_extents": [2, 2],
//!       "texture": { "type": "solid", "color": [0.5, 0.5, 0.5] } }
//!   ],
//!   "lights": [
//!     { "type": "directional", "direction": [1, 1, 2], "radiance": [0.8, 0.8, 0.8] },
//!     { "type": "ambient", "radiance": [0.2, 0.2, 0.2] }
//!   ]
//! }
//! ```
//!
//! `plane` is a finite rectangle: `tangent` gives the first in-plane axis and
//! `half_extents` the half sizes along `tangent` and `normal × tangent`.
//! Light `direction` points from the surface towards the light.

pub mod procedural;
pub mod stats;
pub mod viewpoint;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Point3, Vec3};
use crate::real::Real;

pub const SCENE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Scene<T> {
    pub schema: u32,
    pub id: String,
    pub primitives: Vec<Primitive<T>>,
    pub lights: Vec<Light<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "type", rename_all = "snake_case")]
pub enum Primitive<T> {
    Sphere {
        center: Point3<T>,
        radius: T,
        texture: Texture<T>,
    },
    Box {
        min: Point3<T>,
        max: Point3<T>,
        texture: Texture<T>,
    },
    Plane {
        center: Point3<T>,
        normal: Vec3<T>,
        tangent: Vec3<T>,
        half_extents: [T; 2],
        texture: Texture<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "type", rename_all = "snake_case")]
pub enum Texture<T> {
    Solid {
        color: [T; 3],
    },
    /// 3D checkerboard with cells of edge `scale`.
    Checker {
        scale: T,
        colors: [[T; 3]; 2],
    },
    /// Trilinearly interpolated lattice noise with feature size `scale`,
    /// blending between the two colors.
    ValueNoise {
        scale: T,
        seed: u64,
        colors: [[T; 3]; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "type", rename_all = "snake_case")]
pub enum Light<T> {
    Directional {
        direction: Vec3<T>,
        radiance: [T; 3],
    },
    Ambient {
        radiance: [T; 3],
    },
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn extents(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            min: self.min.component_min(o.min),
            max: self.max.component_max(o.max),
        }
    }

    pub fn corners(&self) -> [Point3<T>; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vec3::new(a.x, a.y, a.z),
            Vec3::new(b.x, a.y, a.z),
            Vec3::new(a.x, b.y, a.z),
            Vec3::new(b.x, b.y, a.z),
            Vec3::new(a.x, a.y, b.z),
            Vec3::new(b.x, a.y, b.z),
            Vec3::new(a.x, b.y, b.z),
            Vec3::new(b.x, b.y, b.z),
        ]
    }
}

/// Nearest ray/primitive intersection.
#[derive(Debug, Clone, Copy)]
pub struct Hit<T> {
    /// Distance along the (unit) ray direction.
    pub t: T,
    pub point: Point3<T>,
    /// Unit normal facing the incoming ray.
    pub normal: Vec3<T>,
    pub primitive: usize,
}

impl<T: Real> Primitive<T> {
    pub fn texture(&self) -> &Texture<T> {
        match self {
            Primitive::Sphere { texture, .. }
            | Primitive::Box { texture, .. }
            | Primitive::Plane { texture, .. } => texture,
        }
    }

    fn plane_axes(normal: Vec3<T>, tangent: Vec3<T>) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
        let n = normal.normalize();
        // Gram-Schmidt so slightly skewed tangents still yield a rectangle.
        let u = (tangent - n * tangent.dot(n)).normalize();
        let v = n.cross(u);
        (n, u, v)
    }

    pub fn bounds(&self) -> Aabb<T> {
        match *self {
            Primitive::Sphere { center, radius, .. } => Aabb {
                min: center - Vec3::splat(radius),
                max: center + Vec3::splat(radius),
            },
            Primitive::Box { min, max, .. } => Aabb { min, max },
            Primitive::Plane {
                center,
                normal,
                tangent,
                half_extents,
                ..
            } => {
                let (_, u, v) = Self::plane_axes(normal, tangent);
                let abs = |w: Vec3<T>| Vec3::new(w.x.abs(), w.y.abs(), w.z.abs());
                let half = abs(u) * half_extents[0] + abs(v) * half_extents[1];
                Aabb {
                    min: center - half,
                    max: center + half,
                }
            }
        }
    }

    /// Closest intersection with `t > t_min` along `origin + t·dir`.
    pub fn intersect(&self, origin: Point3<T>, dir: Vec3<T>, t_min: T) -> Option<(T, Vec3<T>)> {
        match *self {
            Primitive::Sphere { center, radius, .. } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let a = dir.norm_squared();
                let disc = b * b - a * c;
                if disc < T::zero() {
                    return None;
                }
                let sq = disc.sqrt();
                let mut t = (-b - sq) / a;
                if t <= t_min {
                    t = (-b + sq) / a;
                    if t <= t_min {
                        return None;
                    }
                }
                let n = (origin + dir * t - center) * (T::one() / radius);
                Some((t, n))
            }
            Primitive::Box { min, max, .. } => {
                let mut t0 = T::neg_infinity();
                let mut t1 = T::infinity();
                for axis in 0..3 {
                    let o = origin[axis];
                    let d = dir[axis];
                    if d == T::zero() {
                        if o < min[axis] || o > max[axis] {
                            return None;
                        }
                        continue;
                    }
                    let inv = T::one() / d;
                    let mut ta = (min[axis] - o) * inv;
                    let mut tb = (max[axis] - o) * inv;
                    if ta > tb {
                        std::mem::swap(&mut ta, &mut tb);
                    }
                    t0 = t0.max(ta);
                    t1 = t1.min(tb);
                    if t0 > t1 {
                        return None;
                    }
                }
                let t = if t0 > t_min {
                    t0
                } else if t1 > t_min {
                    t1
                } else {
                    return None;
                };
                let p = origin + dir * t;
                let center = (min + max) * T::lit(0.5);
                let half = (max - min) * T::lit(0.5);
                // Face normal from the dominant normalized offset.
                let rel = p - center;
                let q = [rel.x / half.x, rel.y / half.y, rel.z / half.z];
                let mut axis = 0;
                for k in 1..3 {
                    if q[k].abs() > q[axis].abs() {
                        axis = k;
                    }
                }
                let mut n = [T::zero(); 3];
                n[axis] = q[axis].signum();
                Some((t, Vec3::from(n)))
            }
            Primitive::Plane {
                center,
                normal,
                tangent,
                half_extents,
                ..
            } => {
                let (n, u, v) = Self::plane_axes(normal, tangent);
                let denom = n.dot(dir);
                if denom == T::zero() {
                    return None;
                }
                let t = (center - origin).dot(n) / denom;
                if !(t > t_min) {
                    return None;
                }
                let rel = origin + dir * t - center;
                if rel.dot(u).abs() > half_extents[0] || rel.dot(v).abs() > half_extents[1] {
                    return None;
                }
                Some((t, n))
            }
        }
    }

    fn validate(&self, idx: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::DegenerateScene(format!("primitive {idx}: {what}")));
        match *self {
            Primitive::Sphere { center, radius, .. } => {
                if !(radius > T::zero()) || !center.is_finite() || !radius.is_finite() {
                    return bad("sphere radius must be positive and finite");
                }
            }
            Primitive::Box { min, max, .. } => {
                if !(min.x < max.x && min.y < max.y && min.z < max.z)
                    || !min.is_finite()
                    || !max.is_finite()
                {
                    return bad("box needs min < max on every axis");
                }
            }
            Primitive::Plane {
                center,
                normal,
                tangent,
                half_extents,
                ..
            } => {
                let n = normal.normalize();
                let in_plane = tangent - n * tangent.dot(n);
                if !(normal.norm() > T::zero())
                    || !(in_plane.norm() > T::lit(1e-9))
                    || !(half_extents[0] > T::zero() && half_extents[1] > T::zero())
                    || !center.is_finite()
                {
                    return bad("plane needs a non-zero normal, a tangent not parallel to it and positive half extents");
                }
            }
        }
        self.texture().validate(idx)
    }
}

impl<T: Real> Texture<T> {
    pub fn albedo(&self, p: Point3<T>) -> [T; 3] {
        match self {
            Texture::Solid { color } => *color,
            Texture::Checker { scale, colors } => {
                let cell = |c: T| (c / *scale).floor().to_i64().unwrap_or(0);
                let parity = (cell(p.x) + cell(p.y) + cell(p.z)).rem_euclid(2);
                colors[parity as usize]
            }
            Texture::ValueNoise {
                scale,
                seed,
                colors,
            } => {
                let s = value_noise(p * (T::one() / *scale), *seed);
                let mut out = [T::zero(); 3];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = colors[0][k] + (colors[1][k] - colors[0][k]) * s;
                }
                out
            }
        }
    }

    fn validate(&self, idx: usize) -> Result<()> {
        let colors: Vec<[T; 3]> = match self {
            Texture::Solid { color } => vec![*color],
            Texture::Checker { scale, colors } | Texture::ValueNoise { scale, colors, .. } => {
                if !(*scale > T::zero()) {
                    return Err(Error::DegenerateScene(format!(
                        "primitive {idx}: texture scale must be positive"
                    )));
                }
                colors.to_vec()
            }
        };
        if colors
            .iter()
            .flatten()
            .any(|c| !(*c >= T::zero()) || !c.is_finite())
        {
            return Err(Error::DegenerateScene(format!(
                "primitive {idx}: texture colors must be finite and non-negative"
            )));
        }
        Ok(())
    }
}

fn lattice_hash(x: i64, y: i64, z: i64, seed: u64) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for c in [x, y, z] {
        h = crate::seed::splitmix64(h ^ (c as u64));
    }
    h
}

fn lattice_value(x: i64, y: i64, z: i64, seed: u64) -> f64 {
    (lattice_hash(x, y, z, seed) >> 11) as f64 / (1u64 << 53) as f64
}

/// Smoothstep-interpolated value noise in `[0, 1)`.
pub fn value_noise<T: Real>(p: Point3<T>, seed: u64) -> T {
    let (px, py, pz) = (p.x.as_f64(), p.y.as_f64(), p.z.as_f64());
    let (x0, y0, z0) = (px.floor(), py.floor(), pz.floor());
    let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
    let (fx, fy, fz) = (smooth(px - x0), smooth(py - y0), smooth(pz - z0));
    let (ix, iy, iz) = (x0 as i64, y0 as i64, z0 as i64);
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let mut acc = [[0.0; 2]; 2];
    for (dz, row) in acc.iter_mut().enumerate() {
        for (dy, v) in row.iter_mut().enumerate() {
            let a = lattice_value(ix, iy + dy as i64, iz + dz as i64, seed);
            let b = lattice_value(ix + 1, iy + dy as i64, iz + dz as i64, seed);
            *v = lerp(a, b, fx);
        }
    }
    let z0v = lerp(acc[0][0], acc[0][1], fy);
    let z1v = lerp(acc[1][0], acc[1][1], fy);
    T::lit(lerp(z0v, z1v, fz))
}

impl<T: Real> Scene<T> {
    pub fn new(
        id: impl Into<String>,
        primitives: Vec<Primitive<T>>,
        lights: Vec<Light<T>>,
    ) -> Self {
        Self {
            schema: SCENE_SCHEMA_VERSION,
            id: id.into(),
            primitives,
            lights,
        }
    }

    /// Union of primitive bounds; `None` for an empty scene.
    pub fn bounding_box(&self) -> Option<Aabb<T>> {
        self.primitives
            .iter()
            .map(Primitive::bounds)
            .reduce(|a, b| a.union(&b))
    }

    /// Radius of the smallest origin-centered sphere enclosing the scene.
    pub fn bounding_radius(&self) -> Option<T> {
        self.bounding_box()
            .map(|b| b.corners().iter().map(|c| c.norm()).fold(T::zero(), T::max))
    }

    /// Checks the schema version, primitive parameters, lighting and that the
    /// bounding box is finite with three positive extents.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCENE_SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                found: self.schema,
                expected: SCENE_SCHEMA_VERSION,
            });
        }
        for (i, p) in self.primitives.iter().enumerate() {
            p.validate(i)?;
        }
        if !self
            .lights
            .iter()
            .any(|l| matches!(l, Light::Directional { .. }))
        {
            return Err(Error::DegenerateScene(
                "scene needs at least one directional light".into(),
            ));
        }
        for l in &self.lights {
            let (dir_ok, radiance) = match l {
                Light::Directional {
                    direction,
                    radiance,
                } => (direction.norm() > T::zero(), radiance),
                Light::Ambient { radiance } => (true, radiance),
            };
            if !dir_ok
                || radiance
                    .iter()
                    .any(|c| !(*c >= T::zero()) || !c.is_finite())
            {
                return Err(Error::DegenerateScene(
                    "lights need a non-zero direction and non-negative radiance".into(),
                ));
            }
        }
        let bbox = self
            .bounding_box()
            .ok_or_else(|| Error::DegenerateScene("scene has no primitives".into()))?;
        let ext = bbox.extents();
        if !ext.is_finite() || !(ext.min_elem() > T::zero()) {
            return Err(Error::DegenerateScene(format!(
                "bounding box extents must all be positive, got ({}, {}, {})",
                ext.x, ext.y, ext.z
            )));
        }
        Ok(())
    }

    /// Nearest hit with `t > t_min`.
    pub fn intersect(&self, origin: Point3<T>, dir: Vec3<T>, t_min: T) -> Option<Hit<T>> {
        let mut best: Option<Hit<T>> = None;
        for (i, prim) in self.primitives.iter().enumerate() {
            if let Some((t, n)) = prim.intersect(origin, dir, t_min) {
                if best.is_none_or(|b| t < b.t) {
                    let normal = if n.dot(dir) > T::zero() { -n } else { n };
                    best = Some(Hit {
                        t,
                        point: origin + dir * t,
                        normal,
                        primitive: i,
                    });
                }
            }
        }
        best
    }

    /// Lambertian radiance leaving `hit`: `albedo · (ambient + Σ max(0, n·l)·L)`.
    pub fn shade(&self, hit: &Hit<T>) -> [T; 3] {
        let albedo = self.primitives[hit.primitive].texture().albedo(hit.point);
        let mut irradiance = [T::zero(); 3];
        for light in &self.lights {
            let (w, radiance) = match light {
                Light::Ambient { radiance } => (T::one(), radiance),
                Light::Directional {
                    direction,
                    radiance,
                } => (
                    hit.normal.dot(direction.normalize()).max(T::zero()),
                    radiance,
                ),
            };
            for k in 0..3 {
                irradiance[k] += w * radiance[k];
            }
        }
        [
            albedo[0] * irradiance[0],
            albedo[1] * irradiance[1],
            albedo[2] * irradiance[2],
        ]
    }

    /// Copy with every length multiplied by `s` (textures scale too, so the
    /// rendered appearance is unchanged from a correspondingly scaled camera).
    pub fn scaled(&self, s: T) -> Self {
        let tex = |t: &Texture<T>| match t {
            Texture::Solid { color } => Texture::Solid { color: *color },
            Texture::Checker { scale, colors } => Texture::Checker {
                scale: *scale * s,
                colors: *colors,
            },
            Texture::ValueNoise {
                scale,
                seed,
                colors,
            } => Texture::ValueNoise {
                scale: *scale * s,
                seed: *seed,
                colors: *colors,
            },
        };
        let primitives = self
            .primitives
            .iter()
            .map(|p| match p {
                Primitive::Sphere {
                    center,
                    radius,
                    texture,
                } => Primitive::Sphere {
                    center: *center * s,
                    radius: *radius * s,
                    texture: tex(texture),
                },
                Primitive::Box { min, max, texture } => Primitive::Box {
                    min: *min * s,
                    max: *max * s,
                    texture: tex(texture),
                },
                Primitive::Plane {
                    center,
                    normal,
                    tangent,
                    half_extents,
                    texture,
                } => Primitive::Plane {
                    center: *center * s,
                    normal: *normal,
                    tangent: *tangent,
                    half_extents: [half_extents[0] * s, half_extents[1] * s],
                    texture: tex(texture),
                },
            })
            .collect();
        Self {
            schema: self.schema,
            id: self.id.clone(),
            primitives,
            lights: self.lights.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Self = serde_json::from_str(text).map_err(|e| Error::json("scene file", e))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.to_path_buf())
            } else {
                Error::io(path, e)
            }
        })?;
        Self::from_json(&text)
    }
}
