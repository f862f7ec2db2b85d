//! Vectors, orthonormal frames, frame fields and direction angles.

mod angles;
mod builtin;
mod frame;
mod vec3;

pub use angles::{angles_from_direction, direction_from_angles, wrap_angle, AngularPoint, POLAR_GAP};
pub use builtin::{builtin_frame, BTildeField, BuiltinFrame, ClosedFormId, GraphFunctions, AXIS_TOL};
pub use frame::{
    orthonormalize, AnalyticField, AnalyticFrame, AzimuthalField, ClosureFrame, FnField, Frame, FrameAxis, FrameComponent,
    FrameField, FramePoint, VectorField, LOOSE_FRAME_TOL, STRICT_FRAME_TOL,
};
pub use vec3::Vec3;
