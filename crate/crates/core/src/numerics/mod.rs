//! Numerical kernels shared by every other module.

pub mod geometry;
pub mod quad;
pub mod roots;
pub mod winding;

pub use geometry::{hausdorff_distance, hausdorff_points, polyline_self_intersects, Polyline, SelfIntersection};
pub use quad::{integrate_circle, integrate_real_line, integrate_segment, residue_numeric, ToleranceSpec};
pub use roots::{cubic_discriminant, cubic_roots, find_root_1d};
pub use winding::winding_number;
