//! Seeded procedural scenes.

use rand::Rng;

use crate::linalg::Vec3;
use crate::real::Real;
use crate::seed::{derive_seed, hash_str, rng_from_seed};

use super::{Light, Primitive, Scene, Texture};

fn rgb<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> [f64; 3] {
    [
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    ]
}

fn texture<T: Real, R: Rng>(rng: &mut R) -> Texture<T> {
    let colors = [rgb(rng, 0.05, 0.45), rgb(rng, 0.55, 0.95)].map(|c| c.map(T::lit));
    if rng.random_bool(0.5) {
        Texture::Checker {
            scale: T::lit(rng.random_range(0.08..0.25)),
            colors,
        }
    } else {
        Texture::ValueNoise {
            scale: T::lit(rng.random_range(0.05..0.2)),
            seed: rng.random(),
            colors,
        }
    }
}

fn v<T: Real>(x: f64, y: f64, z: f64) -> Vec3<T> {
    Vec3::new(T::lit(x), T::lit(y), T::lit(z))
}

/// A textured ground slab carrying 3–6 random spheres and boxes, centered on
/// the world origin with +z up.
pub fn random_scene<T: Real>(seed: u64, id: &str) -> Scene<T> {
    let mut rng = rng_from_seed(derive_seed(seed, &[hash_str(id)]));
    let half = rng.random_range(0.8..1.4);
    let mut primitives = vec![Primitive::Box {
        min: v(-half, -half * rng.random_range(0.7..1.0), -0.08),
        max: v(half, half * rng.random_range(0.7..1.0), 0.0),
        texture: texture(&mut rng),
    }];
    let count = rng.random_range(3..=6);
    for _ in 0..count {
        let x = rng.random_range(-0.6..0.6) * half;
        let y = rng.random_range(-0.6..0.6) * half;
        if rng.random_bool(0.5) {
            let r = rng.random_range(0.12..0.35);
            primitives.push(Primitive::Sphere {
                center: v(x, y, r),
                radius: T::lit(r),
                texture: texture(&mut rng),
            });
        } else {
            let sx = rng.random_range(0.1..0.3);
            let sy = rng.random_range(0.1..0.3);
            let h = rng.random_range(0.15..0.8);
            primitives.push(Primitive::Box {
                min: v(x - sx, y - sy, 0.0),
                max: v(x + sx, y + sy, h),
                texture: texture(&mut rng),
            });
        }
    }
    let az: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let lights = vec![
        Light::Directional {
            direction: v(az.cos(), az.sin(), rng.random_range(0.8..2.0)),
            radiance: [T::lit(0.75); 3],
        },
        Light::Directional {
            direction: v(-az.cos(), -az.sin(), 0.6),
            radiance: [T::lit(0.2); 3],
        },
        Light::Ambient {
            radiance: [T::lit(0.2); 3],
        },
    ];
    Scene::new(id, primitives, lights)
}

/// A single tilted rectangle carrying smooth value noise, facing the −y
/// half-space. Used for warping checks: its depth varies smoothly and every
/// pixel that sees it has a unique correspondence in other views.
pub fn textured_plane_scene<T: Real>(seed: u64) -> Scene<T> {
    Scene::new(
        "textured-plane",
        vec![Primitive::Plane {
            center: Vec3::zero(),
            normal: v(0.15, -1.0, 0.35),
            tangent: v(1.0, 0.0, 0.0),
            half_extents: [T::lit(3.0), T::lit(3.0)],
            texture: Texture::ValueNoise {
                scale: T::lit(0.35),
                seed,
                colors: [
                    [T::lit(0.15), T::lit(0.2), T::lit(0.3)],
                    [T::lit(0.9), T::lit(0.8), T::lit(0.6)],
                ],
            },
        }],
        vec![
            Light::Directional {
                direction: v(0.2, -1.0, 0.4),
                radiance: [T::lit(0.7); 3],
            },
            Light::Ambient {
                radiance: [T::lit(0.3); 3],
            },
        ],
    )
}
