//! Planar geometric primitives and predicates.
//!
//! Everything downstream works in f64 with tolerance-banded predicates:
//! each predicate compares against [`Tol::eps_geom`] scaled by the
//! magnitudes of its operands, so the behavior is invariant under uniform
//! scaling of the input. No exact arithmetic is used; the construction
//! tolerates the resulting ties because every downstream consumer treats
//! the degenerate band as a separate explicit case.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::Tol;

/// A point (or vector) in the plane. Serialized as a two-element array
/// `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product of `self` and `o` as vectors.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    /// Unit vector in the direction of `self`; `None` for (near-)zero input.
    pub fn unit(self) -> Option<Point2> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct P2Visitor;
        impl<'de> Visitor<'de> for P2Visitor {
            type Value = Point2;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a two-element array [x, y]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point2, A::Error> {
                let x: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Point2::new(x, y))
            }
        }
        deserializer.deserialize_seq(P2Visitor)
    }
}

/// A closed segment with distinguishable endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment2 { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn dir(&self) -> Point2 {
        self.b.sub(self.a)
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    pub fn midpoint(&self) -> Point2 {
        self.at(0.5)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    /// An angle was requested at a vertex with a (near-)coincident arm.
    #[error("degenerate angle: arm of length {arm_len:.3e} at scale {scale:.3e}")]
    DegenerateAngle { arm_len: f64, scale: f64 },
    /// A projection target segment has (near-)zero length.
    #[error("degenerate segment of length {len:.3e}")]
    DegenerateSegment { len: f64 },
}

/// Side classification returned by [`orient`].
pub type Orientation = i8;

/// Orientation of the ordered triple `(p, q, r)`: `1` for counterclockwise,
/// `-1` for clockwise, `0` when the triple is collinear within the
/// tolerance band `eps_geom * |q - p| * |r - p|`.
pub fn orient(p: Point2, q: Point2, r: Point2, tol: &Tol) -> Orientation {
    let u = q.sub(p);
    let v = r.sub(p);
    let c = u.cross(v);
    let band = tol.eps_geom * u.norm() * v.norm();
    if c > band {
        1
    } else if c < -band {
        -1
    } else {
        0
    }
}

/// Unsigned angle at vertex `q` of the path `p -> q -> r`, in `[0, pi]`.
/// Robust near 0 and pi via `atan2(|cross|, dot)`.
pub fn angle_at(p: Point2, q: Point2, r: Point2, tol: &Tol) -> Result<f64, GeomError> {
    let u = p.sub(q);
    let v = r.sub(q);
    let scale = u.norm().max(v.norm()).max(1.0);
    let short = u.norm().min(v.norm());
    if short <= tol.eps_geom * scale {
        return Err(GeomError::DegenerateAngle {
            arm_len: short,
            scale,
        });
    }
    Ok(u.cross(v).abs().atan2(u.dot(v)))
}

/// Acute angle in `[0, pi/2]` between the undirected lines spanned by `u`
/// and `v`. Used for checks stated about lines rather than rays.
pub fn line_angle(u: Point2, v: Point2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v).abs())
}

/// Orthogonal projection of `p` onto the line through `seg`, returned as
/// `(foot, t)` with `foot = seg.at(t)`. Errors on a degenerate segment.
pub fn project_onto_line(p: Point2, seg: &Segment2, tol: &Tol) -> Result<(Point2, f64), GeomError> {
    let d = seg.dir();
    let len2 = d.dot(d);
    let scale = seg.a.norm().max(seg.b.norm()).max(1.0);
    if len2.sqrt() <= tol.eps_geom * scale {
        return Err(GeomError::DegenerateSegment { len: len2.sqrt() });
    }
    let t = p.sub(seg.a).dot(d) / len2;
    Ok((seg.at(t), t))
}

/// Distance from `p` to the closed segment `seg`, together with the
/// clamped parameter of the nearest point.
pub fn dist_point_segment(p: Point2, seg: &Segment2) -> (f64, f64) {
    let d = seg.dir();
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return (p.dist(seg.a), 0.0);
    }
    let t = (p.sub(seg.a).dot(d) / len2).clamp(0.0, 1.0);
    (p.dist(seg.at(t)), t)
}

/// True when the open interiors of the two segments share at least one
/// point: a transversal crossing, or a collinear overlap of positive
/// length. Shared endpoints and endpoint-on-interior touches do not count.
pub fn segments_properly_intersect(s1: &Segment2, s2: &Segment2, tol: &Tol) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a, tol);
    let o2 = orient(s1.a, s1.b, s2.b, tol);
    let o3 = orient(s2.a, s2.b, s1.a, tol);
    let o4 = orient(s2.a, s2.b, s1.b, tol);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // Collinear: check for overlap of positive length along the
        // common direction.
        let d = s1.dir();
        let axis = if d.x.abs() >= d.y.abs() {
            |p: Point2| p.x
        } else {
            |p: Point2| p.y
        };
        let (mut a1, mut b1) = (axis(s1.a), axis(s1.b));
        let (mut a2, mut b2) = (axis(s2.a), axis(s2.b));
        if a1 > b1 {
            std::mem::swap(&mut a1, &mut b1);
        }
        if a2 > b2 {
            std::mem::swap(&mut a2, &mut b2);
        }
        let overlap = b1.min(b2) - a1.max(a2);
        let scale = (b1 - a1).max(b2 - a2).max(1.0);
        return overlap > tol.eps_geom * scale;
    }
    false
}

/// Intersection of the infinite lines through `s1` and `s2`, as the pair
/// of parameters `(t1, t2)` with the meeting point `s1.at(t1) == s2.at(t2)`.
/// `None` for (near-)parallel lines.
pub fn line_intersection_params(s1: &Segment2, s2: &Segment2, tol: &Tol) -> Option<(f64, f64)> {
    let d1 = s1.dir();
    let d2 = s2.dir();
    let denom = d1.cross(d2);
    if denom.abs() <= tol.eps_geom * d1.norm() * d2.norm() {
        return None;
    }
    let w = s2.a.sub(s1.a);
    let t1 = w.cross(d2) / denom;
    let t2 = w.cross(d1) / denom;
    Some((t1, t2))
}

/// Where a point sits relative to a closed polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Classifies `p` against the closed region bounded by `poly` (vertices in
/// order, closing edge implicit). Points within the scaled tolerance band
/// of an edge report `Boundary`; otherwise the crossing-number parity
/// decides. Orientation of `poly` does not matter.
pub fn polygon_contains(poly: &[Point2], p: Point2, tol: &Tol) -> Containment {
    let n = poly.len();
    debug_assert!(n >= 3);
    let band = tol.eps_geom * polygon_scale(poly);
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let (d, _) = dist_point_segment(p, &Segment2::new(a, b));
        if d <= band {
            return Containment::Boundary;
        }
        // Half-open crossing rule on the edge's y-span avoids double
        // counting at shared vertices.
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x_cross > p.x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Characteristic size of a polygon: the larger side of its bounding box,
/// floored at 1 so tolerance bands never collapse for tiny polygons near
/// the origin.
pub fn polygon_scale(poly: &[Point2]) -> f64 {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    (max_x - min_x).max(max_y - min_y).max(1.0)
}

/// Signed area of a polygon (positive for counterclockwise order).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a.cross(b);
    }
    0.5 * s
}

/// True when no two non-adjacent edges of the closed polygon share an open
/// point and no vertex lies on the interior of a non-incident edge.
/// Quadratic in the edge count; fine for the input sizes this library
/// accepts.
pub fn polygon_is_simple(poly: &[Point2], tol: &Tol) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let band = tol.eps_geom * polygon_scale(poly);
    for i in 0..n {
        let si = Segment2::new(poly[i], poly[(i + 1) % n]);
        if si.len() <= band {
            return false;
        }
        for j in (i + 1)..n {
            let sj = Segment2::new(poly[j], poly[(j + 1) % n]);
            if segments_properly_intersect(&si, &sj, tol) {
                return false;
            }
            // A vertex resting on the interior of a non-incident edge also
            // breaks simplicity but is not a proper intersection.
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent {
                let (d1, t1) = dist_point_segment(poly[j], &si);
                if d1 <= band && t1 > 0.0 && t1 < 1.0 {
                    return false;
                }
                let (d2, t2) = dist_point_segment(poly[i], &sj);
                if d2 <= band && t2 > 0.0 && t2 < 1.0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Singular values of a 2x2 matrix `[[m00, m01], [m10, m11]]`, returned as
/// `(sigma_max, sigma_min)`. Closed form via the rotation split: with
/// `p = (m00 + m11)/2`, `q = (m00 - m11)/2`, `r = (m01 + m10)/2`,
/// `s = (m10 - m01)/2`, the singular values are `hypot(p, s) +- hypot(q, r)`.
pub fn svd2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let p = (m[0][0] + m[1][1]) * 0.5;
    let q = (m[0][0] - m[1][1]) * 0.5;
    let r = (m[0][1] + m[1][0]) * 0.5;
    let s = (m[1][0] - m[0][1]) * 0.5;
    let big = p.hypot(s);
    let small = q.hypot(r);
    (big + small, (big - small).abs())
}

/// Linear part of the affine map sending the source triangle to the
/// destination triangle, as a row-major 2x2 matrix. `None` when the source
/// triangle is degenerate.
pub fn affine_linear_part(src: &[Point2; 3], dst: &[Point2; 3]) -> Option<[[f64; 2]; 2]> {
    let e1 = src[1].sub(src[0]);
    let e2 = src[2].sub(src[0]);
    let f1 = dst[1].sub(dst[0]);
    let f2 = dst[2].sub(dst[0]);
    let det = e1.cross(e2);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    // M = [f1 f2] * [e1 e2]^{-1}
    let m00 = (f1.x * e2.y - f2.x * e1.y) * inv;
    let m01 = (f2.x * e1.x - f1.x * e2.x) * inv;
    let m10 = (f1.y * e2.y - f2.y * e1.y) * inv;
    let m11 = (f2.y * e1.x - f1.y * e2.x) * inv;
    Some([[m00, m01], [m10, m11]])
}

/// Evaluates the affine map determined by `src -> dst` at point `p` using
/// barycentric coordinates with respect to the source triangle.
pub fn affine_apply(src: &[Point2; 3], dst: &[Point2; 3], p: Point2) -> Point2 {
    let (b0, b1, b2) = barycentric(src, p);
    dst[0].scale(b0).add(dst[1].scale(b1)).add(dst[2].scale(b2))
}

/// Barycentric coordinates of `p` with respect to the triangle `tri`.
pub fn barycentric(tri: &[Point2; 3], p: Point2) -> (f64, f64, f64) {
    let e1 = tri[1].sub(tri[0]);
    let e2 = tri[2].sub(tri[0]);
    let det = e1.cross(e2);
    let w = p.sub(tri[0]);
    let b1 = w.cross(e2) / det;
    let b2 = e1.cross(w) / det;
    (1.0 - b1 - b2, b1, b2)
}

/// Signed doubled area of the triangle `(a, b, c)`; positive when the
/// vertices are in counterclockwise order.
pub fn tri_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Uniform bucket grid over a set of segments, for narrowing candidate
/// sets in segment-vs-segment queries. Buckets hold the indices of every
/// segment whose bounding box overlaps the bucket.
pub struct SegmentGrid {
    min: Point2,
    inv_cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentGrid {
    /// Builds a grid with roughly `res * res` cells covering the bounding
    /// box of the segments, padded slightly so queries on the hull land
    /// inside.
    pub fn build(segs: &[Segment2], res: usize) -> SegmentGrid {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in segs {
            for p in [s.a, s.b] {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
        let pad = span * 1e-6;
        min = Point2::new(min.x - pad, min.y - pad);
        let cell = span * (1.0 + 2e-6) / res as f64;
        let inv_cell = 1.0 / cell;
        let cols = ((max.x + pad - min.x) * inv_cell).ceil().max(1.0) as usize;
        let rows = ((max.y + pad - min.y) * inv_cell).ceil().max(1.0) as usize;
        let mut buckets = vec![Vec::new(); cols * rows];
        for (i, s) in segs.iter().enumerate() {
            let (c0, r0) = Self::cell_of(min, inv_cell, cols, rows, s.a.x.min(s.b.x), s.a.y.min(s.b.y));
            let (c1, r1) = Self::cell_of(min, inv_cell, cols, rows, s.a.x.max(s.b.x), s.a.y.max(s.b.y));
            for r in r0..=r1 {
                for c in c0..=c1 {
                    buckets[r * cols + c].push(i as u32);
                }
            }
        }
        SegmentGrid {
            min,
            inv_cell,
            cols,
            rows,
            buckets,
        }
    }

    fn cell_of(min: Point2, inv_cell: f64, cols: usize, rows: usize, x: f64, y: f64) -> (usize, usize) {
        let c = (((x - min.x) * inv_cell).floor().max(0.0) as usize).min(cols - 1);
        let r = (((y - min.y) * inv_cell).floor().max(0.0) as usize).min(rows - 1);
        (c, r)
    }

    /// Indices of all segments whose bounding box could overlap the query
    /// segment, sorted and deduplicated.
    pub fn query_segment(&self, seg: &Segment2) -> Vec<u32> {
        let (c0, r0) = Self::cell_of(
            self.min,
            self.inv_cell,
            self.cols,
            self.rows,
            seg.a.x.min(seg.b.x),
            seg.a.y.min(seg.b.y),
        );
        let (c1, r1) = Self::cell_of(
            self.min,
            self.inv_cell,
            self.cols,
            self.rows,
            seg.a.x.max(seg.b.x),
            seg.a.y.max(seg.b.y),
        );
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend_from_slice(&self.buckets[r * self.cols + c]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tol {
        Tol::default()
    }

    #[test]
    fn orient_basic() {
        let t = tol();
        let o = orient(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            &t,
        );
        assert_eq!(o, 1);
        let o = orient(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 1e-15),
            &t,
        );
        assert_eq!(o, 0);
    }

    #[test]
    fn svd2_identity_and_shear() {
        let (smax, smin) = svd2([[1.0, 0.0], [0.0, 1.0]]);
        assert!((smax - 1.0).abs() < 1e-15);
        assert!((smin - 1.0).abs() < 1e-15);
        let (smax, smin) = svd2([[1.0, 1.0], [0.0, 1.0]]);
        // Known singular values of the unit shear: (1 + sqrt(5)) / 2 and
        // its reciprocal.
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((smax - phi).abs() < 1e-12);
        assert!((smin - 1.0 / phi).abs() < 1e-12);
    }

    #[test]
    fn affine_roundtrip() {
        let src = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let dst = [
            Point2::new(2.0, 1.0),
            Point2::new(3.0, 1.5),
            Point2::new(1.5, 2.5),
        ];
        let m = affine_linear_part(&src, &dst).unwrap();
        let p = Point2::new(0.25, 0.25);
        let q = affine_apply(&src, &dst, p);
        let lin = Point2::new(
            m[0][0] * (p.x - src[0].x) + m[0][1] * (p.y - src[0].y),
            m[1][0] * (p.x - src[0].x) + m[1][1] * (p.y - src[0].y),
        );
        let q2 = dst[0].add(lin);
        assert!(q.dist(q2) < 1e-13);
    }

    #[test]
    fn contains_square() {
        let t = tol();
        let sq = vec![
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ];
        assert_eq!(
            polygon_contains(&sq, Point2::new(0.0, 0.0), &t),
            Containment::Inside
        );
        assert_eq!(
            polygon_contains(&sq, Point2::new(0.5, 0.0), &t),
            Containment::Boundary
        );
        assert_eq!(
            polygon_contains(&sq, Point2::new(0.7, 0.0), &t),
            Containment::Outside
        );
    }

    #[test]
    fn proper_intersection_excludes_shared_endpoint() {
        let t = tol();
        let s1 = Segment2::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let s2 = Segment2::new(Point2::new(1.0, 0.0), Point2::new(2.0, 1.0));
        assert!(!segments_properly_intersect(&s1, &s2, &t));
        let s3 = Segment2::new(Point2::new(0.5, -0.5), Point2::new(0.5, 0.5));
        assert!(segments_properly_intersect(&s1, &s3, &t));
    }
}
