//! Exact spherical-geometry kernel: points, great hyperspheres, geodesic
//! segments, convex cells of S^d, splits and measure computations.
//!
//! All values are immutable after construction and freely shareable across
//! threads; the only stateful inputs are the random generators passed into
//! the sampling helpers.

pub mod arc;
pub mod cell2;
pub mod coned;
pub mod hypersphere;
pub mod measures;
pub mod vector;

pub use arc::{segment_intrinsic_volumes, Arc2};
pub use cell2::{edge_span, Cell2, CircleSide};
pub use coned::{ConeCell, SubspherePiece};
pub use hypersphere::{segment_crossing, segment_hit, GeodesicSegment, GreatHypersphere, Side};
pub use measures::{
    curvature_boundary, curvature_interior, curvature_measure_2d, curvature_vertex,
    sample_in_cell, CurvatureConfig,
};
pub use vector::{
    frame_coordinates, from_frame_coordinates, geodesic_distance, orthonormal_complement,
    rotate_around_3, sample_uniform_on_subsphere, sample_uniform_sphere, UnitVector, EPS_INNER,
};
