//! Boundary map model: a piecewise-affine homeomorphism from the boundary
//! of the centered unit square onto a simple polygon.
//!
//! The square is `(-1/2, 1/2)^2`. Boundary points are addressed by arc
//! length `t` in `[0, 4)`, measured counterclockwise from the bottom-left
//! corner, so the corners sit at `t = 0, 1, 2, 3`. A map is a list of
//! `(t, image)` vertices; between consecutive vertices the map is affine
//! in `t`. Loading validates the map (simple image, counterclockwise,
//! injective), inserts the four corners as vertices if absent, and pins
//! down the bi-Lipschitz constant `L`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Containment, Point2, Segment2};
use crate::tolerances::{Tol, ARC_CHORD_FACTOR, REFINE_ANGLE_DENOM};

/// Total arc length of the square boundary.
pub const PERIMETER: f64 = 4.0;

/// An input vertex: source parameter plus image point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RawVertex {
    pub t: f64,
    pub img: Point2,
}

/// A validated vertex: source parameter, source point, image point.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryVertex {
    pub t: f64,
    pub src: Point2,
    pub img: Point2,
}

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("a boundary map needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate in vertex at t = {0}")]
    NonFinite(f64),
    #[error("parameter {0} outside [0, 4)")]
    ParamOutOfRange(f64),
    #[error("duplicate parameters near t = {0}")]
    DuplicateParam(f64),
    #[error("two vertices share the image point ({0:.6}, {1:.6})")]
    NonInjective(f64, f64),
    #[error("image polygon is not simple")]
    SelfIntersectingImage,
    #[error("image polygon is clockwise and auto_orient is off")]
    ClockwiseImage,
    #[error("declared L = {declared} is below the certified lower bound {certified}")]
    InsufficientL { declared: f64, certified: f64 },
}

/// The point of the square boundary at arc-length parameter `t` (taken
/// modulo 4).
pub fn point_on_square(t: f64) -> Point2 {
    let t = t.rem_euclid(PERIMETER);
    let side = t.floor().min(3.0);
    let f = t - side;
    match side as u32 {
        0 => Point2::new(-0.5 + f, -0.5),
        1 => Point2::new(0.5, -0.5 + f),
        2 => Point2::new(0.5 - f, 0.5),
        _ => Point2::new(-0.5, 0.5 - f),
    }
}

/// Shortest-arc distance between two parameters, with the direction that
/// realizes it: `(length, +1)` for counterclockwise from `p`, `(length, -1)`
/// for clockwise. A tie (antipodal parameters, arc exactly 2) reports
/// counterclockwise.
pub fn arc_between(p: f64, q: f64) -> (f64, i8) {
    let d = (q - p).rem_euclid(PERIMETER);
    if d <= 2.0 {
        (d, 1)
    } else {
        (PERIMETER - d, -1)
    }
}

/// Shortest-arc distance between two parameters.
pub fn source_arc(p: f64, q: f64) -> f64 {
    arc_between(p, q).0
}

/// A validated boundary map.
#[derive(Debug, Clone)]
pub struct BoundaryMap {
    verts: Vec<BoundaryVertex>,
    /// Cumulative image polyline length: `img_cum[i]` is the image length
    /// from vertex 0 to vertex i going counterclockwise. One extra entry
    /// closes the loop, so `img_cum[n]` is the image perimeter.
    img_cum: Vec<f64>,
    /// Validated upper bound for the bi-Lipschitz constant.
    pub l: f64,
    /// True when loading reflected the source parametrization to make the
    /// image counterclockwise. The reflection is `(x, y) -> (y, x)` on the
    /// square, `t -> (4 - t) mod 4` on parameters.
    pub auto_oriented: bool,
}

impl BoundaryMap {
    pub fn vertices(&self) -> &[BoundaryVertex] {
        &self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn image_perimeter(&self) -> f64 {
        *self.img_cum.last().unwrap()
    }

    /// Image polygon in counterclockwise vertex order (may contain
    /// collinear vertices).
    pub fn image_polygon(&self) -> Vec<Point2> {
        self.verts.iter().map(|v| v.img).collect()
    }

    /// Index of the map segment containing parameter `t`: the segment from
    /// vertex `i` to vertex `i + 1` (cyclic). `t` equal to a vertex
    /// parameter yields the segment starting there.
    pub fn segment_index(&self, t: f64) -> usize {
        let t = t.rem_euclid(PERIMETER);
        // Vertices are sorted by parameter and vertex 0 has t = 0.
        match self
            .verts
            .binary_search_by(|v| v.t.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Evaluates the map at parameter `t`.
    pub fn eval(&self, t: f64) -> Point2 {
        let t = t.rem_euclid(PERIMETER);
        let i = self.segment_index(t);
        let a = &self.verts[i];
        let b = &self.verts[(i + 1) % self.verts.len()];
        let span = self.param_span(i);
        if span == 0.0 {
            return a.img;
        }
        a.img.lerp(b.img, (t - a.t) / span)
    }

    fn param_span(&self, i: usize) -> f64 {
        let n = self.verts.len();
        if i + 1 < n {
            self.verts[i + 1].t - self.verts[i].t
        } else {
            PERIMETER - self.verts[i].t
        }
    }

    /// Cumulative image length at parameter `t`, measured counterclockwise
    /// from vertex 0.
    fn img_cum_at(&self, t: f64) -> f64 {
        let t = t.rem_euclid(PERIMETER);
        let i = self.segment_index(t);
        let span = self.param_span(i);
        if span == 0.0 {
            return self.img_cum[i];
        }
        let frac = (t - self.verts[i].t) / span;
        self.img_cum[i] + frac * (self.img_cum[i + 1] - self.img_cum[i])
    }

    /// Image length of the counterclockwise boundary arc from `p` to `q`.
    pub fn img_len_ccw(&self, p: f64, q: f64) -> f64 {
        let total = self.image_perimeter();
        let d = self.img_cum_at(q) - self.img_cum_at(p);
        if (q - p).rem_euclid(PERIMETER) == 0.0 {
            return 0.0;
        }
        d.rem_euclid(total)
    }

    /// Image length of the shortest source arc between `p` and `q` (ties
    /// resolved counterclockwise, consistent with [`arc_between`]).
    pub fn image_arc_between(&self, p: f64, q: f64) -> f64 {
        let (_, dir) = arc_between(p, q);
        if dir >= 0 {
            self.img_len_ccw(p, q)
        } else {
            self.img_len_ccw(q, p)
        }
    }

    /// Returns a copy with vertices inserted at the given parameters
    /// (skipping parameters within `eps` of an existing vertex). The map as
    /// a function is unchanged.
    pub fn with_vertices_at(&self, params: &[f64], eps: f64) -> BoundaryMap {
        let mut ts: Vec<f64> = self.verts.iter().map(|v| v.t).collect();
        for &t in params {
            let t = t.rem_euclid(PERIMETER);
            let is_new = ts
                .iter()
                .all(|&e| cyclic_param_dist(e, t) > eps);
            if is_new {
                ts.push(t);
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let verts: Vec<BoundaryVertex> = ts
            .iter()
            .map(|&t| BoundaryVertex {
                t,
                src: point_on_square(t),
                img: self.eval(t),
            })
            .collect();
        BoundaryMap::assemble(verts, self.l, self.auto_oriented)
    }

    fn assemble(verts: Vec<BoundaryVertex>, l: f64, auto_oriented: bool) -> BoundaryMap {
        let n = verts.len();
        let mut img_cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        img_cum.push(0.0);
        for i in 0..n {
            let j = (i + 1) % n;
            acc += verts[i].img.dist(verts[j].img);
            img_cum.push(acc);
        }
        BoundaryMap {
            verts,
            img_cum,
            l,
            auto_oriented,
        }
    }

    /// Refines the vertex set until every pair of consecutive vertices
    /// subtends an angle of at most `1 / (50 L)` at the square center,
    /// splitting segments at their parameter midpoint. Idempotent once the
    /// condition holds; the map as a function is unchanged.
    pub fn refine_for_angle(&self) -> BoundaryMap {
        let threshold = 1.0 / (REFINE_ANGLE_DENOM * self.l);
        let mut params: Vec<f64> = Vec::new();
        let n = self.verts.len();
        let mut stack: Vec<(f64, f64)> = Vec::new();
        for i in 0..n {
            let lo = self.verts[i].t;
            let hi = if i + 1 < n {
                self.verts[i + 1].t
            } else {
                PERIMETER
            };
            stack.push((lo, hi));
        }
        let mut out_params: Vec<f64> = self.verts.iter().map(|v| v.t).collect();
        let mut guard = 0usize;
        while let Some((lo, hi)) = stack.pop() {
            guard += 1;
            assert!(
                guard < 4_000_000,
                "angle refinement failed to terminate (threshold {threshold})"
            );
            let a = point_on_square(lo);
            let b = point_on_square(hi);
            let ang = a.cross(b).abs().atan2(a.dot(b));
            if ang > threshold {
                let mid = 0.5 * (lo + hi);
                params.push(mid);
                stack.push((lo, mid));
                stack.push((mid, hi));
            }
        }
        out_params.extend_from_slice(&params);
        out_params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out_params.dedup();
        let verts: Vec<BoundaryVertex> = out_params
            .iter()
            .map(|&t| BoundaryVertex {
                t,
                src: point_on_square(t),
                img: self.eval(t),
            })
            .collect();
        BoundaryMap::assemble(verts, self.l, self.auto_oriented)
    }

    /// Lower-bound estimate of the bi-Lipschitz constant, converged by
    /// local refinement.
    ///
    /// The estimate is the maximum of `max(|du|/|dx|, |dx|/|du|)` over:
    /// vertex pairs, a fixed even parameter grid, per-segment local
    /// stretches (the two-sided limit of the ratio at coincident points),
    /// `depth` rounds of midpoint insertion around the currently extremal
    /// pairs, and a final golden-section polish of the best pair. The
    /// result never decreases in `depth` and never drops below the plain
    /// vertex-pair bound.
    pub fn estimate_bilip_constant(&self, depth: usize) -> f64 {
        let mut ts: Vec<f64> = self.verts.iter().map(|v| v.t).collect();
        let grid = 128usize;
        for k in 0..grid {
            ts.push(PERIMETER * k as f64 / grid as f64);
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let mut best = self.per_segment_stretch_max();
        let mut best_pair = (0.0, 0.0);
        for round in 0..=depth {
            let pts: Vec<(f64, Point2, Point2)> = ts
                .iter()
                .map(|&t| (t, point_on_square(t), self.eval(t)))
                .collect();
            let m = pts.len();
            let mut top: Vec<(f64, usize, usize)> = Vec::new();
            for i in 0..m {
                for j in (i + 1)..m {
                    let dsrc = pts[i].1.dist(pts[j].1);
                    if dsrc <= 1e-12 {
                        continue;
                    }
                    let dimg = pts[i].2.dist(pts[j].2);
                    let r = (dimg / dsrc).max(dsrc / dimg);
                    if r > best {
                        best = r;
                        best_pair = (pts[i].0, pts[j].0);
                    }
                    top.push((r, i, j));
                }
            }
            if round == depth {
                break;
            }
            top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            top.truncate(32);
            let mut extra: Vec<f64> = Vec::new();
            for &(_, i, j) in &top {
                for &k in &[i, j] {
                    if k > 0 {
                        extra.push(0.5 * (pts[k - 1].0 + pts[k].0));
                    }
                    if k + 1 < m {
                        extra.push(0.5 * (pts[k].0 + pts[k + 1].0));
                    }
                }
            }
            ts.extend_from_slice(&extra);
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        }
        if depth > 0 && best_pair.0 != best_pair.1 {
            best = best.max(self.polish_pair(best_pair.0, best_pair.1));
        }
        best
    }

    fn per_segment_stretch_max(&self) -> f64 {
        let n = self.verts.len();
        let mut best: f64 = 1.0;
        for i in 0..n {
            let span = self.param_span(i);
            if span <= 1e-12 {
                continue;
            }
            let img_len = self.img_cum[i + 1] - self.img_cum[i];
            if img_len <= 1e-15 {
                continue;
            }
            let s = img_len / span;
            best = best.max(s.max(1.0 / s));
        }
        best
    }

    /// Golden-section polish of the pair ratio within the two map segments
    /// containing the given parameters, alternating coordinates.
    fn polish_pair(&self, ta: f64, tb: f64) -> f64 {
        let bounds = |t: f64| -> (f64, f64) {
            let i = self.segment_index(t);
            let lo = self.verts[i].t;
            (lo, lo + self.param_span(i))
        };
        let ratio = |a: f64, b: f64| -> f64 {
            let dsrc = point_on_square(a).dist(point_on_square(b));
            if dsrc <= 1e-12 {
                return 0.0;
            }
            let dimg = self.eval(a).dist(self.eval(b));
            (dimg / dsrc).max(dsrc / dimg)
        };
        let golden = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> f64 {
            let inv_phi = 0.618_033_988_749_894_9_f64;
            let mut x1 = hi - inv_phi * (hi - lo);
            let mut x2 = lo + inv_phi * (hi - lo);
            let mut f1 = f(x1);
            let mut f2 = f(x2);
            for _ in 0..40 {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = f(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = f(x1);
                }
            }
            if f1 > f2 {
                x1
            } else {
                x2
            }
        };
        let (mut a, mut b) = (ta, tb);
        let (alo, ahi) = bounds(ta);
        let (blo, bhi) = bounds(tb);
        for _ in 0..3 {
            let bb = b;
            a = golden(&|x| ratio(x, bb), alo, ahi);
            let aa = a;
            b = golden(&|x| ratio(aa, x), blo, bhi);
        }
        ratio(a, b)
    }

    /// Verifies that whenever the straight segment between the images of
    /// two vertices lies in the closed image polygon, the source arc
    /// between them is at most `sqrt(2) * L` times the segment length.
    pub fn check_arc_chord_bound(&self, tol: &Tol) -> ArcChordReport {
        let poly = self.image_polygon();
        let n = self.verts.len();
        let mut checked = 0usize;
        let mut violations = Vec::new();
        let mut worst_margin = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let seg = Segment2::new(self.verts[i].img, self.verts[j].img);
                if seg.len() <= tol.eps_len {
                    continue;
                }
                if !segment_in_closure(&poly, &seg, tol) {
                    continue;
                }
                checked += 1;
                let arc = source_arc(self.verts[i].t, self.verts[j].t);
                let bound = ARC_CHORD_FACTOR * self.l * seg.len() + tol.eps_len;
                let margin = bound - arc;
                worst_margin = worst_margin.min(margin);
                if margin < 0.0 {
                    violations.push((self.verts[i].t, self.verts[j].t, arc, seg.len()));
                }
            }
        }
        ArcChordReport {
            pairs_checked: checked,
            worst_margin,
            violations,
        }
    }
}

/// Result of [`BoundaryMap::check_arc_chord_bound`].
#[derive(Debug, Clone)]
pub struct ArcChordReport {
    pub pairs_checked: usize,
    /// Smallest slack `bound - arc` over checked pairs (infinite when no
    /// pair qualified).
    pub worst_margin: f64,
    /// Offending pairs as `(t1, t2, source_arc, image_chord)`.
    pub violations: Vec<(f64, f64, f64, f64)>,
}

/// True when `seg` (between two boundary points of `poly`) stays in the
/// closed region: no polygon edge crosses its interior transversally and
/// interior samples do not fall outside.
pub fn segment_in_closure(poly: &[Point2], seg: &Segment2, tol: &Tol) -> bool {
    let n = poly.len();
    for k in 0..n {
        let edge = Segment2::new(poly[k], poly[(k + 1) % n]);
        if geom::segments_properly_intersect(&edge, seg, tol) {
            return false;
        }
    }
    for f in [0.25, 0.5, 0.75] {
        if geom::polygon_contains(poly, seg.at(f), tol) == Containment::Outside {
            return false;
        }
    }
    true
}

fn cyclic_param_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PERIMETER);
    d.min(PERIMETER - d)
}

/// Validates raw vertices into a [`BoundaryMap`].
///
/// Inserts the four corner parameters as vertices when absent (snapping
/// inputs within 1e-9 of a corner parameter to it), orients the image
/// counterclockwise (by reflecting the source parametrization, when
/// `auto_orient` allows), and fixes `L`: the declared value when given and
/// consistent with the certified lower-bound estimate, otherwise the
/// estimate itself.
pub fn load_and_validate(
    raw: &[RawVertex],
    declared_l: Option<f64>,
    auto_orient: bool,
    tol: &Tol,
) -> Result<BoundaryMap, BoundaryError> {
    if raw.len() < 3 {
        return Err(BoundaryError::TooFewVertices(raw.len()));
    }
    let mut vs: Vec<RawVertex> = Vec::with_capacity(raw.len());
    for v in raw {
        if !v.t.is_finite() || !v.img.is_finite() {
            return Err(BoundaryError::NonFinite(v.t));
        }
        if !(0.0..PERIMETER).contains(&v.t) {
            return Err(BoundaryError::ParamOutOfRange(v.t));
        }
        let mut t = v.t;
        for corner in [0.0, 1.0, 2.0, 3.0] {
            if cyclic_param_dist(t, corner) <= 1e-9 {
                t = corner;
            }
        }
        vs.push(RawVertex { t, img: v.img });
    }
    vs.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    for i in 0..vs.len() {
        let j = (i + 1) % vs.len();
        if cyclic_param_dist(vs[i].t, vs[j].t) <= tol.eps_len && vs.len() > 1 {
            return Err(BoundaryError::DuplicateParam(vs[i].t));
        }
    }
    let scale = geom::polygon_scale(&vs.iter().map(|v| v.img).collect::<Vec<_>>());
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            if vs[i].img.dist(vs[j].img) <= tol.eps_geom * scale {
                return Err(BoundaryError::NonInjective(vs[i].img.x, vs[i].img.y));
            }
        }
    }

    let mut auto_oriented = false;
    let area = geom::polygon_area(&vs.iter().map(|v| v.img).collect::<Vec<_>>());
    if area < 0.0 {
        if !auto_orient {
            return Err(BoundaryError::ClockwiseImage);
        }
        // Reflect the source square across its diagonal: parameters map by
        // t -> (4 - t) mod 4, which reverses the traversal and keeps every
        // distance on the square unchanged.
        for v in vs.iter_mut() {
            v.t = (PERIMETER - v.t).rem_euclid(PERIMETER);
        }
        vs.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        auto_oriented = true;
    }

    // Insert missing corner vertices by interpolating within the containing
    // segment, then build the final vertex list.
    let mut params: Vec<f64> = vs.iter().map(|v| v.t).collect();
    for corner in [0.0, 1.0, 2.0, 3.0] {
        if !params.iter().any(|&t| t == corner) {
            params.push(corner);
        }
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let interim = interim_eval(&vs);
    let verts: Vec<BoundaryVertex> = params
        .iter()
        .map(|&t| BoundaryVertex {
            t,
            src: point_on_square(t),
            img: interim(t),
        })
        .collect();

    let poly: Vec<Point2> = verts.iter().map(|v| v.img).collect();
    if !geom::polygon_is_simple(&poly, tol) {
        return Err(BoundaryError::SelfIntersectingImage);
    }

    let mut map = BoundaryMap::assemble(verts, 1.0, auto_oriented);
    let estimate = map.estimate_bilip_constant(4);
    map.l = match declared_l {
        Some(decl) => {
            if decl < estimate - 1e-6 {
                return Err(BoundaryError::InsufficientL {
                    declared: decl,
                    certified: estimate,
                });
            }
            decl
        }
        None => estimate,
    };
    Ok(map)
}

/// Piecewise-affine evaluation over a raw sorted vertex list, used before
/// the final map exists.
fn interim_eval(vs: &[RawVertex]) -> impl Fn(f64) -> Point2 + '_ {
    move |t: f64| {
        let t = t.rem_euclid(PERIMETER);
        let n = vs.len();
        let mut i = match vs
            .binary_search_by(|v| v.t.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => n - 1,
            Err(i) => i - 1,
        };
        if t < vs[0].t {
            i = n - 1;
        }
        let a = &vs[i];
        let b = &vs[(i + 1) % n];
        let span = (b.t - a.t).rem_euclid(PERIMETER);
        if span == 0.0 {
            return a.img;
        }
        let dt = (t - a.t).rem_euclid(PERIMETER);
        a.img.lerp(b.img, dt / span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_param_walk() {
        assert!(point_on_square(0.0).dist(Point2::new(-0.5, -0.5)) < 1e-15);
        assert!(point_on_square(0.5).dist(Point2::new(0.0, -0.5)) < 1e-15);
        assert!(point_on_square(1.0).dist(Point2::new(0.5, -0.5)) < 1e-15);
        assert!(point_on_square(2.5).dist(Point2::new(0.0, 0.5)) < 1e-15);
        assert!(point_on_square(3.9).dist(Point2::new(-0.5, -0.4)) < 1e-12);
    }

    #[test]
    fn arcs() {
        assert_eq!(arc_between(0.5, 1.5), (1.0, 1));
        assert_eq!(arc_between(3.5, 0.5), (1.0, 1));
        assert_eq!(arc_between(0.5, 3.5), (1.0, -1));
        assert_eq!(arc_between(0.0, 2.0), (2.0, 1));
    }
}
