//! Piecewise-affine bi-Lipschitz extension of boundary homeomorphisms.
//!
//! Input: a piecewise-affine homeomorphism `u` from the boundary of the
//! centered unit square onto the boundary of a simple polygon, bi-Lipschitz
//! with constant `L`. Output: a triangulated piecewise-affine homeomorphism
//! `v` of the whole square onto the closed polygon that agrees with `u` on
//! the boundary and is bi-Lipschitz with constant at most `636000 * L^4`.
//!
//! The construction runs in stages, each with its own module:
//!
//! 1. [`boundary`]: validate the input map, estimate `L`, refine the
//!    parametrization so consecutive vertices subtend small angles at the
//!    square center.
//! 2. [`ball`]: choose an inscribed ball of the image polygon whose contact
//!    points split the square boundary into arcs of length at most 2, and
//!    cut the polygon into primary sectors, one per pair of adjacent
//!    contacts.
//! 3. [`partition`]: triangulate each sector by a recursive weight-reducing
//!    partition into admissible triangles.
//! 4. [`paths`]: route a polyline from every sector arc vertex to the sector
//!    chord through the triangle partition, with quantitative angle, length,
//!    and spacing guarantees.
//! 5. [`speed`]: assign a monotone pace along each polyline controlling how
//!    fast points travel toward the chord.
//! 6. [`extend`]: realize each sector extension as affine triangles between
//!    consecutive polylines, classify the global configuration, and glue the
//!    sectors around a central point with a fan of triangles, correcting
//!    shallow sectors with an explicit piecewise-affine pull map.
//! 7. [`distortion`]: compute exact per-triangle singular values, certified
//!    per-piece bounds, mesh validity, and the global distortion verdict.
//!
//! The [`pipeline`] module chains the stages; [`io`], [`svg`], and
//! [`generate`] provide the serialization formats, the SVG renderer, and a
//! deterministic test-map generator used by the CLI.

pub mod ball;
pub mod boundary;
pub mod distortion;
pub mod extend;
pub mod generate;
pub mod geom;
pub mod io;
pub mod partition;
pub mod paths;
pub mod pipeline;
pub mod speed;
pub mod svg;
pub mod tolerances;

mod par;

pub use geom::Point2;
pub use tolerances::Tol;
