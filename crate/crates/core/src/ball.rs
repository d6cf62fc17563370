//! Central ball selection and primary sector decomposition.
//!
//! Among the balls inscribed in the image polygon that touch the boundary
//! in at least two points, the construction needs one whose contact
//! preimages split the square boundary into arcs of length at most 2.
//! Candidates are enumerated in closed form from boundary features
//! (maximal straight edges and reflex vertices): triples of features with a
//! common equidistant point, antipodal feature pairs, and sliding families
//! between facing parallel edges, plus a grid-seeded local search as a
//! safety net. The accepted ball maximizes, in order: the largest
//! pairwise contact arc, the radius, then the smallest center coordinates.

use thiserror::Error;

use crate::boundary::{self, BoundaryMap};
use crate::geom::{self, Containment, Point2, Segment2};
use crate::par::par_map;
use crate::tolerances::{
    Tol, BALL_RADIUS_LOWER_SAFE_COEFF, BALL_RADIUS_UPPER_COEFF,
};

/// A contact point of the ball with the image boundary, with its source
/// parameter.
#[derive(Debug, Clone, Copy)]
pub struct Contact {
    pub t: f64,
    pub point: Point2,
}

/// An inscribed ball with its boundary contacts, ordered by source
/// parameter.
#[derive(Debug, Clone)]
pub struct CentralBall {
    pub center: Point2,
    pub r: f64,
    pub contacts: Vec<Contact>,
}

impl CentralBall {
    /// Cyclic source-parameter gaps between consecutive contacts.
    pub fn gaps(&self) -> Vec<f64> {
        let n = self.contacts.len();
        (0..n)
            .map(|i| {
                let a = self.contacts[i].t;
                let b = self.contacts[(i + 1) % n].t;
                (b - a).rem_euclid(boundary::PERIMETER)
            })
            .collect()
    }

    /// Largest shortest-arc distance over contact pairs; the primary
    /// selection key.
    pub fn max_pair_arc(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.contacts.len() {
            for j in (i + 1)..self.contacts.len() {
                best = best.max(boundary::source_arc(self.contacts[i].t, self.contacts[j].t));
            }
        }
        best
    }
}

/// A vertex of a sector arc: unwrapped source parameter (increasing along
/// the sector), source point on the square boundary, image point, and
/// cumulative image length from the sector start.
#[derive(Debug, Clone, Copy)]
pub struct SectorVertex {
    pub t: f64,
    pub src: Point2,
    pub img: Point2,
    pub s_img: f64,
}

/// The region of the image polygon between two adjacent contacts: the
/// boundary arc from contact A to contact B plus the closing chord.
#[derive(Debug, Clone)]
pub struct Sector {
    pub index: usize,
    /// Arc vertices from A to B inclusive; `t` strictly increasing
    /// (unwrapped past 4 when the arc crosses the parameter origin).
    pub verts: Vec<SectorVertex>,
    pub chord: Segment2,
}

impl Sector {
    pub fn a(&self) -> &SectorVertex {
        self.verts.first().unwrap()
    }

    pub fn b(&self) -> &SectorVertex {
        self.verts.last().unwrap()
    }

    /// Source arc length of the whole sector.
    pub fn arc_len(&self) -> f64 {
        self.b().t - self.a().t
    }

    /// Image arc length of the whole sector.
    pub fn img_arc_total(&self) -> f64 {
        self.b().s_img
    }

    /// Source arc between two sector vertices.
    pub fn src_arc(&self, i: usize, j: usize) -> f64 {
        (self.verts[j].t - self.verts[i].t).abs()
    }

    /// Image arc between two sector vertices.
    pub fn img_arc(&self, i: usize, j: usize) -> f64 {
        (self.verts[j].s_img - self.verts[i].s_img).abs()
    }

    /// Region polygon: arc vertices in order (the chord closes it).
    /// Positively oriented.
    pub fn region(&self) -> Vec<Point2> {
        self.verts.iter().map(|v| v.img).collect()
    }

    /// Unit normal of the chord pointing into the sector.
    pub fn inward_normal(&self) -> Point2 {
        let d = self.chord.dir();
        Point2::new(d.y, -d.x).unit().expect("degenerate sector chord")
    }
}

#[derive(Debug, Error)]
pub enum BallError {
    #[error("no inscribed ball candidates found")]
    NoCandidates,
    #[error("no candidate ball satisfies the contact arc condition")]
    NoValidBall,
    #[error("sector chord leaves the image polygon interior near t = {0}")]
    ChordNotInterior(f64),
}

/// A boundary feature a ball can rest against.
#[derive(Debug, Clone, Copy)]
enum Feature {
    /// Maximal straight edge with its inward unit normal.
    Edge { seg: Segment2, normal: Point2 },
    /// Reflex vertex.
    Vertex(Point2),
}

fn extract_features(poly: &[Point2], tol: &Tol) -> Vec<Feature> {
    let n = poly.len();
    let scale = geom::polygon_scale(poly);
    // Walk the polygon merging collinear runs into maximal edges.
    let mut corner_flags = vec![false; n];
    for i in 0..n {
        let prev = poly[(i + n - 1) % n];
        let next = poly[(i + 1) % n];
        let d1 = poly[i].sub(prev);
        let d2 = next.sub(poly[i]);
        let collinear = d1.cross(d2).abs() <= tol.eps_geom * scale * (d1.norm() + d2.norm())
            && d1.dot(d2) > 0.0;
        corner_flags[i] = !collinear;
    }
    let corners: Vec<usize> = (0..n).filter(|&i| corner_flags[i]).collect();
    let mut features = Vec::new();
    if corners.is_empty() {
        return features;
    }
    for w in 0..corners.len() {
        let i = corners[w];
        let j = corners[(w + 1) % corners.len()];
        let seg = Segment2::new(poly[i], poly[j]);
        if let Some(u) = seg.dir().unit() {
            features.push(Feature::Edge {
                seg,
                normal: u.perp(),
            });
        }
        let prev = poly[(i + n - 1) % n];
        let next = poly[(i + 1) % n];
        if poly[i].sub(prev).cross(next.sub(poly[i])) < 0.0 {
            features.push(Feature::Vertex(poly[i]));
        }
    }
    features
}

/// Distance from the ball center to the whole boundary (all polygon
/// edges).
fn clearance(poly: &[Point2], p: Point2) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let seg = Segment2::new(poly[i], poly[(i + 1) % n]);
        let (d, _) = geom::dist_point_segment(p, &seg);
        best = best.min(d);
    }
    best
}

/// Contacts of the ball centered at `center` with radius equal to its
/// clearance: the nearest point of every map edge within the contact
/// tolerance, merged across shared vertices and annotated with source
/// parameters.
fn contacts_of(map: &BoundaryMap, center: Point2, r: f64, tol: &Tol) -> Vec<Contact> {
    let verts = map.vertices();
    let n = verts.len();
    let ctol = tol.eps_len.max(1e-7 * r);
    let mut raw: Vec<Contact> = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let seg = Segment2::new(verts[i].img, verts[j].img);
        let (d, frac) = geom::dist_point_segment(center, &seg);
        if d <= r + ctol {
            let span = if j == 0 {
                boundary::PERIMETER - verts[i].t
            } else {
                verts[j].t - verts[i].t
            };
            let t = (verts[i].t + frac * span).rem_euclid(boundary::PERIMETER);
            raw.push(Contact {
                t,
                point: seg.at(frac),
            });
        }
    }
    raw.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    // Merge contacts that are the same geometric point (a contact at a
    // polygon vertex is reported by both incident edges).
    let mut merged: Vec<Contact> = Vec::new();
    for c in raw {
        if let Some(last) = merged.last() {
            if c.point.dist(last.point) <= 2.0 * ctol {
                continue;
            }
        }
        merged.push(c);
    }
    if merged.len() >= 2 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if first.point.dist(last.point) <= 2.0 * ctol {
            merged.pop();
        }
    }
    merged
}

/// Solves for centers equidistant from a feature triple. Returns up to two
/// candidate centers.
fn solve_triple(f1: &Feature, f2: &Feature, f3: &Feature) -> Vec<Point2> {
    use Feature::*;
    match (f1, f2, f3) {
        (Edge { seg: s1, normal: n1 }, Edge { seg: s2, normal: n2 }, Edge { seg: s3, normal: n3 }) => {
            // Signed distances to the three lines equal: two linear
            // equations in the center.
            let c1 = s1.a.dot(*n1);
            let c2 = s2.a.dot(*n2);
            let c3 = s3.a.dot(*n3);
            let a = [
                [n1.x - n2.x, n1.y - n2.y],
                [n1.x - n3.x, n1.y - n3.y],
            ];
            let rhs = [c1 - c2, c1 - c3];
            solve2(a, rhs).map(|p| vec![p]).unwrap_or_default()
        }
        (Edge { seg: s1, normal: n1 }, Edge { seg: s2, normal: n2 }, Vertex(v)) => {
            edge_edge_vertex(s1, n1, s2, n2, *v)
        }
        (Edge { seg: s1, normal: n1 }, Vertex(v), Edge { seg: s2, normal: n2 }) => {
            edge_edge_vertex(s1, n1, s2, n2, *v)
        }
        (Vertex(v), Edge { seg: s1, normal: n1 }, Edge { seg: s2, normal: n2 }) => {
            edge_edge_vertex(s1, n1, s2, n2, *v)
        }
        (Edge { seg, normal }, Vertex(v), Vertex(w)) => edge_vertex_vertex(seg, normal, *v, *w),
        (Vertex(v), Edge { seg, normal }, Vertex(w)) => edge_vertex_vertex(seg, normal, *v, *w),
        (Vertex(v), Vertex(w), Edge { seg, normal }) => edge_vertex_vertex(seg, normal, *v, *w),
        (Vertex(a), Vertex(b), Vertex(c)) => circumcenter(*a, *b, *c).map(|p| vec![p]).unwrap_or_default(),
    }
}

fn solve2(a: [[f64; 2]; 2], rhs: [f64; 2]) -> Option<Point2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-14 {
        return None;
    }
    Some(Point2::new(
        (rhs[0] * a[1][1] - rhs[1] * a[0][1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ))
}

/// Centers with equal signed distance to two edge lines and equal distance
/// to a vertex: a quadratic along the signed bisector line.
fn edge_edge_vertex(s1: &Segment2, n1: &Point2, s2: &Segment2, n2: &Point2, v: Point2) -> Vec<Point2> {
    let nbar = n1.sub(*n2);
    if nbar.norm() < 1e-9 {
        return Vec::new();
    }
    let c12 = s1.a.dot(*n1) - s2.a.dot(*n2);
    // Point on the bisector nearest the origin, then its direction.
    let p0 = nbar.scale(c12 / nbar.dot(nbar));
    let d = nbar.perp().unit().unwrap();
    quad_on_line(p0, d, v, s1.a, *n1)
}

/// Centers on the perpendicular bisector of two vertices with distance to
/// the first vertex equal to the signed distance to an edge line.
fn edge_vertex_vertex(s1: &Segment2, n1: &Point2, v: Point2, w: Point2) -> Vec<Point2> {
    let mid = v.lerp(w, 0.5);
    let d = match w.sub(v).perp().unit() {
        Some(u) => u,
        None => return Vec::new(),
    };
    quad_on_line(mid, d, v, s1.a, *n1)
}

/// Solves |p0 + s d - v| = (p0 + s d - a) . n for s and maps the roots to
/// points.
fn quad_on_line(p0: Point2, d: Point2, v: Point2, a: Point2, n: Point2) -> Vec<Point2> {
    let g0 = p0.sub(v);
    let h0 = p0.sub(a).dot(n);
    let hd = d.dot(n);
    let qa = d.dot(d) - hd * hd;
    let qb = 2.0 * (g0.dot(d) - h0 * hd);
    let qc = g0.dot(g0) - h0 * h0;
    let mut out = Vec::new();
    if qa.abs() < 1e-14 {
        if qb.abs() > 1e-14 {
            out.push(p0.add(d.scale(-qc / qb)));
        }
        return out;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return out;
    }
    let sq = disc.sqrt();
    for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        out.push(p0.add(d.scale(s)));
    }
    out
}

fn circumcenter(a: Point2, b: Point2, c: Point2) -> Option<Point2> {
    let m = [
        [b.x - a.x, b.y - a.y],
        [c.x - a.x, c.y - a.y],
    ];
    let rhs = [
        0.5 * (b.dot(b) - a.dot(a) - 2.0 * a.x * (b.x - a.x) - 2.0 * a.y * (b.y - a.y)),
        0.5 * (c.dot(c) - a.dot(a) - 2.0 * a.x * (c.x - a.x) - 2.0 * a.y * (c.y - a.y)),
    ];
    // Shift to a-centered coordinates to keep the system well scaled.
    solve2(m, rhs).map(|p| p.add(a))
}

/// Candidate centers from facing parallel edge pairs: the sliding family
/// along the mid-line, sampled at feature projections plus, when the
/// two-contact arc condition has a sign change, the bisected parameter
/// where the contact gap is exactly half the perimeter.
fn parallel_plateau_candidates(map: &BoundaryMap, features: &[Feature], tol: &Tol) -> Vec<Point2> {
    let mut out = Vec::new();
    let edges: Vec<(&Segment2, &Point2)> = features
        .iter()
        .filter_map(|f| match f {
            Feature::Edge { seg, normal } => Some((seg, normal)),
            _ => None,
        })
        .collect();
    let poly = map.image_polygon();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (s1, n1) = edges[i];
            let (s2, n2) = edges[j];
            if n1.dot(*n2) > -1.0 + 1e-9 {
                continue;
            }
            let gap = s2.a.sub(s1.a).dot(*n1);
            if gap <= 0.0 {
                continue;
            }
            let axis = s1.dir().unit().unwrap();
            let origin = s1.a.add(n1.scale(gap * 0.5));
            let proj = |p: Point2| p.sub(origin).dot(axis);
            // Range of slide positions where the mid-line ball touches both
            // edge segments.
            let (a1, b1) = ordered(proj(s1.a), proj(s1.b));
            let (a2, b2) = ordered(proj(s2.a), proj(s2.b));
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi <= lo {
                continue;
            }
            let at = |s: f64| origin.add(axis.scale(s));
            let mut samples = vec![lo, 0.5 * (lo + hi), hi];
            for f in features {
                let p = match f {
                    Feature::Edge { seg, .. } => seg.a,
                    Feature::Vertex(v) => *v,
                };
                let s = proj(p);
                if s > lo && s < hi {
                    samples.push(s);
                }
            }
            for &s in &samples {
                out.push(at(s));
            }
            // Slide to the position where a two-contact ball has both
            // source gaps exactly 2, if the family crosses it.
            let gap_defect = |s: f64| -> Option<f64> {
                let c = at(s);
                let r = clearance(&poly, c);
                let cts = contacts_of(map, c, r, tol);
                if cts.len() != 2 {
                    return None;
                }
                let d = (cts[1].t - cts[0].t).rem_euclid(boundary::PERIMETER);
                Some(d - 2.0)
            };
            if let (Some(flo), Some(fhi)) = (gap_defect(lo), gap_defect(hi)) {
                if flo.signum() != fhi.signum() {
                    let (mut a, mut b) = (lo, hi);
                    let mut fa = flo;
                    for _ in 0..80 {
                        let m = 0.5 * (a + b);
                        match gap_defect(m) {
                            Some(fm) => {
                                if fm.signum() == fa.signum() {
                                    a = m;
                                    fa = fm;
                                } else {
                                    b = m;
                                }
                            }
                            None => break,
                        }
                    }
                    out.push(at(0.5 * (a + b)));
                }
            }
        }
    }
    out
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Antipodal two-feature candidates: edge-vertex (vertex projecting onto
/// the edge) and vertex-vertex midpoints.
fn antipodal_candidates(features: &[Feature]) -> Vec<Point2> {
    let mut out = Vec::new();
    for i in 0..features.len() {
        for j in 0..features.len() {
            if i == j {
                continue;
            }
            match (&features[i], &features[j]) {
                (Feature::Edge { seg, .. }, Feature::Vertex(v)) => {
                    let d = seg.dir();
                    let len2 = d.dot(d);
                    if len2 > 0.0 {
                        let t = v.sub(seg.a).dot(d) / len2;
                        if (0.0..=1.0).contains(&t) {
                            out.push(v.lerp(seg.at(t), 0.5));
                        }
                    }
                }
                (Feature::Vertex(v), Feature::Vertex(w)) if i < j => {
                    out.push(v.lerp(*w, 0.5));
                }
                _ => {}
            }
        }
    }
    out
}

/// Grid-seeded compass search fallback: maximize clearance from the best
/// grid cells by coordinate pattern search.
fn grid_ascent_candidates(poly: &[Point2], tol: &Tol) -> Vec<Point2> {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let res = 96usize;
    let dx = (max_x - min_x) / res as f64;
    let dy = (max_y - min_y) / res as f64;
    let mut scored: Vec<(f64, Point2)> = Vec::new();
    for iy in 0..res {
        for ix in 0..res {
            let p = Point2::new(
                min_x + (ix as f64 + 0.5) * dx,
                min_y + (iy as f64 + 0.5) * dy,
            );
            if geom::polygon_contains(poly, p, tol) == Containment::Inside {
                scored.push((clearance(poly, p), p));
            }
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored.truncate(8);
    let mut out = Vec::new();
    for (_, seed) in scored {
        let mut p = seed;
        let mut best = clearance(poly, p);
        let mut step = dx.max(dy);
        for _ in 0..60 {
            let mut improved = false;
            for dir in [
                Point2::new(1.0, 0.0),
                Point2::new(-1.0, 0.0),
                Point2::new(0.0, 1.0),
                Point2::new(0.0, -1.0),
                Point2::new(1.0, 1.0),
                Point2::new(-1.0, 1.0),
                Point2::new(1.0, -1.0),
                Point2::new(-1.0, -1.0),
            ] {
                let q = p.add(dir.scale(step));
                if geom::polygon_contains(poly, q, tol) != Containment::Inside {
                    continue;
                }
                let c = clearance(poly, q);
                if c > best {
                    best = c;
                    p = q;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        out.push(p);
    }
    out
}

/// Enumerates inscribed-ball candidates with at least two contacts.
/// Deterministic: candidates are deduplicated and sorted by center then
/// radius.
pub fn inscribed_ball_candidates(map: &BoundaryMap, tol: &Tol) -> Vec<CentralBall> {
    let poly = map.image_polygon();
    let features = extract_features(&poly, tol);
    let nf = features.len();
    let r_min = BALL_RADIUS_LOWER_SAFE_COEFF / map.l * 0.8;
    let r_max = BALL_RADIUS_UPPER_COEFF * map.l * 1.2;

    let mut centers: Vec<Point2> = Vec::new();
    let triple_batches = par_map(&(0..nf).collect::<Vec<_>>(), |&i| {
        let mut local = Vec::new();
        for j in (i + 1)..nf {
            for k in (j + 1)..nf {
                for c in solve_triple(&features[i], &features[j], &features[k]) {
                    local.push(c);
                }
            }
        }
        local
    });
    for batch in triple_batches {
        centers.extend(batch);
    }
    centers.extend(antipodal_candidates(&features));
    centers.extend(parallel_plateau_candidates(map, &features, tol));
    centers.extend(grid_ascent_candidates(&poly, tol));

    centers.retain(|c| c.is_finite());
    centers.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    centers.dedup_by(|a, b| a.dist(*b) < 1e-10);

    let balls = par_map(&centers, |&c| {
        if geom::polygon_contains(&poly, c, tol) != Containment::Inside {
            return None;
        }
        let r = clearance(&poly, c);
        if r < r_min || r > r_max {
            return None;
        }
        let contacts = contacts_of(map, c, r, tol);
        if contacts.len() < 2 {
            return None;
        }
        Some(CentralBall {
            center: c,
            r,
            contacts,
        })
    });
    balls.into_iter().flatten().collect()
}

/// True when every cyclic gap between consecutive contact parameters is at
/// most 2 (half the perimeter), up to tolerance.
pub fn arc_condition(ball: &CentralBall, tol: &Tol) -> bool {
    ball.gaps().iter().all(|&g| g <= 2.0 + tol.eps_len)
}

/// Selects the central ball: filters candidates by the arc condition, then
/// maximizes (largest pairwise contact arc, radius, -center.x, -center.y)
/// lexicographically with tolerance-banded comparisons.
pub fn select_central_ball(map: &BoundaryMap, tol: &Tol) -> Result<CentralBall, BallError> {
    let candidates = inscribed_ball_candidates(map, tol);
    if candidates.is_empty() {
        return Err(BallError::NoCandidates);
    }
    let mut passing: Vec<CentralBall> = candidates
        .into_iter()
        .filter(|b| arc_condition(b, tol))
        .collect();
    if passing.is_empty() {
        return Err(BallError::NoValidBall);
    }
    let eps = tol.eps_len;
    // Staged banded argmax: keep everything within eps of the best key
    // before moving to the next key, so near-ties fall through to later
    // keys instead of being decided by noise.
    let best_arc = passing
        .iter()
        .map(|b| b.max_pair_arc())
        .fold(f64::NEG_INFINITY, f64::max);
    passing.retain(|b| b.max_pair_arc() >= best_arc - eps);
    let best_r = passing.iter().map(|b| b.r).fold(f64::NEG_INFINITY, f64::max);
    passing.retain(|b| b.r >= best_r - eps);
    let best_x = passing
        .iter()
        .map(|b| b.center.x)
        .fold(f64::INFINITY, f64::min);
    passing.retain(|b| b.center.x <= best_x + eps);
    let best_y = passing
        .iter()
        .map(|b| b.center.y)
        .fold(f64::INFINITY, f64::min);
    passing.retain(|b| b.center.y <= best_y + eps);
    Ok(passing.swap_remove(0))
}

/// Splits the boundary map at the contact parameters and builds one sector
/// per adjacent contact pair. Returns the map with contacts inserted as
/// vertices together with the sectors in contact order.
pub fn primary_sectors(
    map: &BoundaryMap,
    ball: &CentralBall,
    tol: &Tol,
) -> Result<(BoundaryMap, Vec<Sector>), BallError> {
    let params: Vec<f64> = ball.contacts.iter().map(|c| c.t).collect();
    let map2 = map.with_vertices_at(&params, 1e-12);
    let verts = map2.vertices();
    let n = verts.len();
    let poly = map2.image_polygon();

    // Locate the contact vertices in the refined map.
    let mut idx: Vec<usize> = Vec::with_capacity(params.len());
    for &t in &params {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, v) in verts.iter().enumerate() {
            let d = (v.t - t).abs().min((v.t - t + 4.0).abs()).min((v.t - t - 4.0).abs());
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        idx.push(best);
    }

    let k = idx.len();
    let mut sectors = Vec::with_capacity(k);
    for s in 0..k {
        let i0 = idx[s];
        let i1 = idx[(s + 1) % k];
        let t0 = verts[i0].t;
        let mut sector_verts: Vec<SectorVertex> = Vec::new();
        let mut i = i0;
        let mut wrapped = false;
        let mut s_img = 0.0;
        let mut prev_img = verts[i0].img;
        loop {
            let v = &verts[i];
            let t_unwrapped = if wrapped {
                v.t + boundary::PERIMETER
            } else {
                v.t
            };
            s_img += v.img.dist(prev_img);
            prev_img = v.img;
            sector_verts.push(SectorVertex {
                t: t_unwrapped,
                src: v.src,
                img: v.img,
                s_img,
            });
            if i == i1 && sector_verts.len() > 1 {
                break;
            }
            i = (i + 1) % n;
            if i == 0 {
                wrapped = true;
            }
            if sector_verts.len() > n + 1 {
                return Err(BallError::ChordNotInterior(t0));
            }
        }
        let chord = Segment2::new(sector_verts.first().unwrap().img, sector_verts.last().unwrap().img);
        // The open chord of two ball contacts runs through the open ball,
        // hence through the polygon interior; verify anyway.
        for f in [0.25, 0.5, 0.75] {
            if geom::polygon_contains(&poly, chord.at(f), tol) == Containment::Outside {
                return Err(BallError::ChordNotInterior(t0));
            }
        }
        sectors.push(Sector {
            index: s,
            verts: sector_verts,
            chord,
        });
    }
    Ok((map2, sectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{load_and_validate, RawVertex};

    fn identity_map() -> BoundaryMap {
        let raw: Vec<RawVertex> = (0..8)
            .map(|i| {
                let t = i as f64 * 0.5;
                RawVertex {
                    t,
                    img: boundary::point_on_square(t),
                }
            })
            .collect();
        load_and_validate(&raw, None, false, &Tol::default()).unwrap()
    }

    #[test]
    fn identity_ball_is_centered() {
        let map = identity_map();
        let tol = Tol::default();
        let ball = select_central_ball(&map, &tol).unwrap();
        assert!(ball.center.norm() < 1e-9);
        assert!((ball.r - 0.5).abs() < 1e-9);
        assert_eq!(ball.contacts.len(), 4);
        let gaps = ball.gaps();
        for g in gaps {
            assert!((g - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn identity_sectors() {
        let map = identity_map();
        let tol = Tol::default();
        let ball = select_central_ball(&map, &tol).unwrap();
        let (_m2, sectors) = primary_sectors(&map, &ball, &tol).unwrap();
        assert_eq!(sectors.len(), 4);
        for s in &sectors {
            assert!((s.arc_len() - 1.0).abs() < 1e-9);
            assert_eq!(s.verts.len(), 3);
            // Inward normal points away from the center.
            let a = s.a().img;
            let d = s
                .inward_normal()
                .dot(Point2::ZERO.sub(a));
            assert!(d < 0.0);
        }
    }
}
