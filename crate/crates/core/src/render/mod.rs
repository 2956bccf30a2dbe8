//! Image formation: a ray tracer for procedural scenes and a reference volume
//! renderer for analytic radiance fields.

mod trace;
mod volume;

pub use trace::{generate_rays, pixel_ray, trace_depth, trace_image, Ray, TraceOptions};
pub use volume::{
    volume_render_image, volume_render_ray, ConstantField, FieldSpec, RadianceField, SphereField,
    VolumeSample,
};
