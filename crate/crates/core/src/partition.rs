//! Recursive triangulation of a sector into chord-apex triangles.
//!
//! Each sector is refined by erecting a triangle on its chord. When some
//! arc vertex is perpendicularly visible from the chord, the closest such
//! vertex becomes the apex and the two sub-chords recurse. When none is,
//! the unique visible side of the sub-polygon receives a new vertex
//! (projected from the chord midpoint, or a perpendicular foot when the
//! visible side touches a chord endpoint), which becomes the apex. A
//! half-integer weight (arc side count, plus one half when no vertex is
//! visible) strictly decreases into every child, which bounds the depth.

use thiserror::Error;

use crate::ball::{Sector, SectorVertex};
use crate::boundary;
use crate::geom::{self, Containment, GeomError, Point2, Segment2, SegmentGrid};
use crate::tolerances::Tol;

/// One triangle of the partition: chord from `lo` to `hi`, apex between
/// them. Children cover the sub-chords `(lo, apex)` and `(apex, hi)`;
/// a missing child means that side lies on the image boundary.
#[derive(Debug, Clone)]
pub struct TriNode {
    pub lo: usize,
    pub apex: usize,
    pub hi: usize,
    pub low_child: Option<usize>,
    pub high_child: Option<usize>,
    /// True when the apex was inserted on a boundary side during the
    /// split rather than being a pre-existing arc vertex.
    pub apex_added: bool,
}

/// Partition of one sector: the final arc vertices (originals plus
/// inserted split points, ordered by source parameter) and the triangle
/// tree over them.
#[derive(Debug, Clone)]
pub struct SectorTree {
    pub sector_index: usize,
    pub verts: Vec<SectorVertex>,
    pub nodes: Vec<TriNode>,
    pub root: usize,
}

impl SectorTree {
    pub fn chord_of(&self, node: usize) -> Segment2 {
        let nd = &self.nodes[node];
        Segment2::new(self.verts[nd.lo].img, self.verts[nd.hi].img)
    }

    /// Source arc between two arc vertices.
    pub fn src_arc(&self, i: usize, j: usize) -> f64 {
        (self.verts[j].t - self.verts[i].t).abs()
    }

    /// Image arc between two arc vertices.
    pub fn img_arc(&self, i: usize, j: usize) -> f64 {
        (self.verts[j].s_img - self.verts[i].s_img).abs()
    }

    /// True when the node is a bare triangle: both sides are single
    /// boundary edges and there are no children.
    pub fn is_leaf_triangle(&self, node: usize) -> bool {
        let nd = &self.nodes[node];
        nd.apex == nd.lo + 1 && nd.hi == nd.apex + 1 && nd.low_child.is_none() && nd.high_child.is_none()
    }

    /// Chain of nodes that contain vertex `v` strictly between their
    /// chord endpoints, ordered deepest first. Empty for the two sector
    /// endpoints.
    pub fn natural_sequence(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if v == 0 || v + 1 == self.verts.len() {
            return out;
        }
        let mut cur = self.root;
        loop {
            let nd = &self.nodes[cur];
            debug_assert!(nd.lo < v && v < nd.hi);
            out.push(cur);
            if v == nd.apex {
                break;
            }
            let next = if v < nd.apex {
                nd.low_child
            } else {
                nd.high_child
            };
            match next {
                Some(c) => cur = c,
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// Structural validation: reachability, index ordering, child spans,
    /// positive triangle orientation, and flatness of childless sides.
    pub fn verify(&self, tol: &Tol) -> Result<(), PartitionError> {
        let bad = |msg: String| PartitionError::InvalidTree(msg);
        let v = &self.verts;
        let root = &self.nodes[self.root];
        if root.lo != 0 || root.hi != v.len() - 1 {
            return Err(bad("root does not span the sector arc".into()));
        }
        let poly: Vec<Point2> = v.iter().map(|x| x.img).collect();
        let scale = geom::polygon_scale(&poly);
        let mut reached = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            if reached[i] {
                return Err(bad(format!("node {i} reached twice")));
            }
            reached[i] = true;
            let nd = &self.nodes[i];
            if !(nd.lo < nd.apex && nd.apex < nd.hi) {
                return Err(bad(format!("node {i} has unordered indices")));
            }
            if !(v[nd.lo].t < v[nd.apex].t && v[nd.apex].t < v[nd.hi].t) {
                return Err(bad(format!("node {i} has unordered parameters")));
            }
            if geom::tri_area2(v[nd.lo].img, v[nd.apex].img, v[nd.hi].img) <= 0.0 {
                return Err(bad(format!("node {i} triangle is not positively oriented")));
            }
            for (child, clo, chi) in [
                (nd.low_child, nd.lo, nd.apex),
                (nd.high_child, nd.apex, nd.hi),
            ] {
                match child {
                    Some(c) => {
                        let cn = &self.nodes[c];
                        if cn.lo != clo || cn.hi != chi {
                            return Err(bad(format!("node {i} child {c} spans the wrong chord")));
                        }
                        stack.push(c);
                    }
                    None => {
                        let seg = Segment2::new(v[clo].img, v[chi].img);
                        for k in (clo + 1)..chi {
                            let (d, _) = geom::dist_point_segment(v[k].img, &seg);
                            if d > 10.0 * tol.eps_geom * scale {
                                return Err(bad(format!(
                                    "node {i} childless side [{clo}, {chi}] is not flat at vertex {k}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(bad("unreachable nodes in arena".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("sector arc has fewer than three vertices")]
    DegenerateSector,
    #[error("degenerate chord near t = {t:.6}")]
    DegenerateChord { t: f64 },
    #[error("side over t in [{t_lo:.6}, {t_hi:.6}] is neither flat nor strictly interior")]
    MixedSide { t_lo: f64, t_hi: f64 },
    #[error("inward ray from the chord midpoint hits no side, t in [{t_lo:.6}, {t_hi:.6}]")]
    NoVisibleSide { t_lo: f64, t_hi: f64 },
    #[error("more than one side is visible from the chord, t in [{t_lo:.6}, {t_hi:.6}]")]
    MultipleVisibleSides { t_lo: f64, t_hi: f64 },
    #[error("split point parameter {lambda:.6} is not strictly inside its side")]
    SplitPointOutsideSide { lambda: f64 },
    #[error("perpendicular foot parameter {lambda:.6} is not strictly inside the end side")]
    FootOutsideSide { lambda: f64 },
    #[error("chord weight failed to decrease: {child:.1} under parent {parent:.1}")]
    WeightNotDecreasing { child: f64, parent: f64 },
    #[error("partition recursion depth exceeded")]
    DepthExceeded,
    #[error("tree structure invalid: {0}")]
    InvalidTree(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

struct Ctx<'a> {
    poly: &'a [Point2],
    edges: Vec<Segment2>,
    grid: SegmentGrid,
    scale: f64,
    tol: &'a Tol,
}

struct Built {
    verts: Vec<SectorVertex>,
    nodes: Vec<TriNode>,
    root: usize,
}

enum SidePart {
    Flat(Vec<SectorVertex>),
    Sub(Built),
}

/// Strict transversal crossing of open interiors: all four orientations
/// nonzero and opposite. Collinear contact does not count, so travel
/// along the boundary is allowed.
fn strictly_crosses(s: &Segment2, e: &Segment2, tol: &Tol) -> bool {
    let o1 = geom::orient(s.a, s.b, e.a, tol);
    let o2 = geom::orient(s.a, s.b, e.b, tol);
    let o3 = geom::orient(e.a, e.b, s.a, tol);
    let o4 = geom::orient(e.a, e.b, s.b, tol);
    o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4
}

/// Perpendicular visibility of arc vertex `i` from the chord: the foot
/// must land on the closed chord and the connecting segment must stay in
/// the closure of the image polygon (boundary grazing allowed). Returns
/// the distance to the chord line when visible.
fn sees(ctx: &Ctx, verts: &[SectorVertex], i: usize, chord: &Segment2) -> Option<f64> {
    let v = verts[i].img;
    let d = chord.dir();
    let len2 = d.dot(d);
    if len2 <= 0.0 {
        return None;
    }
    let lam = v.sub(chord.a).dot(d) / len2;
    let band = ctx.tol.eps_geom * ctx.scale / len2.sqrt();
    if lam < -band || lam > 1.0 + band {
        return None;
    }
    let foot = chord.at(lam);
    let dir = foot.sub(v);
    let dist = dir.norm();
    if dist <= ctx.tol.eps_geom * ctx.scale {
        return Some(dist);
    }
    // Local test at the departure vertex: the segment must start into the
    // closed interior cone between the incident boundary edges.
    let e_in = v.sub(verts[i - 1].img);
    let e_out = verts[i + 1].img.sub(v);
    let cb = |e: Point2| ctx.tol.eps_geom * e.norm() * dist;
    let left_in = e_in.cross(dir) >= -cb(e_in);
    let left_out = e_out.cross(dir) >= -cb(e_out);
    let convex = e_in.cross(e_out) >= -ctx.tol.eps_geom * e_in.norm() * e_out.norm();
    let inward = if convex {
        left_in && left_out
    } else {
        left_in || left_out
    };
    if !inward {
        return None;
    }
    let seg = Segment2::new(v, foot);
    for idx in ctx.grid.query_segment(&seg) {
        if strictly_crosses(&seg, &ctx.edges[idx as usize], ctx.tol) {
            return None;
        }
    }
    Some(dist)
}

enum SideClass {
    Flat,
    Interior,
}

/// Classifies the segment between the first and last vertex of `sub`:
/// flat (all intermediate vertices on the segment, so it runs along the
/// boundary) or strictly interior (crosses nothing, passes no vertex,
/// and its samples lie inside the polygon).
fn classify_side(ctx: &Ctx, sub: &[SectorVertex]) -> Result<SideClass, PartitionError> {
    let n = sub.len();
    if n == 2 {
        return Ok(SideClass::Flat);
    }
    let seg = Segment2::new(sub[0].img, sub[n - 1].img);
    let band = ctx.tol.eps_geom * ctx.scale;
    if sub[1..n - 1]
        .iter()
        .all(|p| geom::dist_point_segment(p.img, &seg).0 <= band)
    {
        return Ok(SideClass::Flat);
    }
    let mixed = || PartitionError::MixedSide {
        t_lo: sub[0].t,
        t_hi: sub[n - 1].t,
    };
    for idx in ctx.grid.query_segment(&seg) {
        let e = &ctx.edges[idx as usize];
        if geom::segments_properly_intersect(&seg, e, ctx.tol) {
            return Err(mixed());
        }
        // No polygon vertex may sit strictly inside the open segment.
        for p in [e.a, e.b] {
            if p.dist(seg.a) <= band || p.dist(seg.b) <= band {
                continue;
            }
            if geom::dist_point_segment(p, &seg).0 <= band {
                return Err(mixed());
            }
        }
    }
    for f in [0.25, 0.5, 0.75] {
        if geom::polygon_contains(ctx.poly, seg.at(f), ctx.tol) != Containment::Inside {
            return Err(mixed());
        }
    }
    Ok(SideClass::Interior)
}

/// First local side hit by the inward perpendicular ray from `x` on the
/// chord, as `(side index, parameter on the side, ray distance)`.
fn first_hit(
    ctx: &Ctx,
    verts: &[SectorVertex],
    x: Point2,
    normal: Point2,
) -> Option<(usize, f64, f64)> {
    let ray = Segment2::new(x, x.add(normal));
    let tau_eps = ctx.tol.eps_geom * ctx.scale;
    let mut best: Option<(usize, f64, f64)> = None;
    for j in 0..verts.len() - 1 {
        let side = Segment2::new(verts[j].img, verts[j + 1].img);
        if let Some((tau, lam)) = geom::line_intersection_params(&ray, &side, ctx.tol) {
            let lam_band = ctx.tol.eps_geom * ctx.scale / side.len().max(1e-300);
            if tau > tau_eps && lam >= -lam_band && lam <= 1.0 + lam_band {
                if best.map_or(true, |(_, _, t)| tau < t) {
                    best = Some((j, lam, tau));
                }
            }
        }
    }
    best
}

/// Identifies the unique side visible from the chord when no vertex is.
/// Returns the side index together with the hit of the chord-midpoint
/// ray on it. Rays from every projection sub-interval must agree up to
/// hits near a vertex shared with the candidate side.
fn visible_side(
    ctx: &Ctx,
    verts: &[SectorVertex],
    chord: &Segment2,
) -> Result<(usize, Point2, f64), PartitionError> {
    let n = verts.len();
    let d = chord.dir();
    let normal = Point2::new(d.y, -d.x).unit().expect("degenerate chord");
    let t_lo = verts[0].t;
    let t_hi = verts[n - 1].t;
    let (k, lam_k, _) = first_hit(ctx, verts, chord.at(0.5), normal)
        .ok_or(PartitionError::NoVisibleSide { t_lo, t_hi })?;
    let c_pt = Segment2::new(verts[k].img, verts[k + 1].img).at(lam_k);

    let len2 = d.dot(d);
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    for v in &verts[1..n - 1] {
        let lam = v.img.sub(chord.a).dot(d) / len2;
        if lam > 1e-9 && lam < 1.0 - 1e-9 {
            cuts.push(lam);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let shared_tol = 1e-6 * ctx.scale;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (j, lam_j, _) = first_hit(ctx, verts, chord.at(mid), normal)
            .ok_or(PartitionError::NoVisibleSide { t_lo, t_hi })?;
        if j == k {
            continue;
        }
        let hit = Segment2::new(verts[j].img, verts[j + 1].img).at(lam_j);
        let near_shared = [verts[k].img, verts[k + 1].img]
            .iter()
            .any(|s| hit.dist(*s) <= shared_tol);
        if !near_shared {
            return Err(PartitionError::MultipleVisibleSides { t_lo, t_hi });
        }
    }
    Ok((k, c_pt, lam_k))
}

/// New arc vertex at image point `c` on the side between `p` and `q`.
/// The source parameter interpolates by image fraction, which matches
/// the affine parametrization of the boundary map on a single side.
fn insert_vertex(p: &SectorVertex, q: &SectorVertex, c: Point2) -> SectorVertex {
    let full = q.img.dist(p.img);
    let frac = if full > 0.0 { c.dist(p.img) / full } else { 0.5 };
    let t = p.t + (q.t - p.t) * frac;
    SectorVertex {
        t,
        src: boundary::point_on_square(t.rem_euclid(boundary::PERIMETER)),
        img: c,
        s_img: p.s_img + c.dist(p.img),
    }
}

fn chord_weight(n_verts: usize, any_seen: bool) -> f64 {
    (n_verts - 1) as f64 + if any_seen { 0.0 } else { 0.5 }
}

fn merge(low: SidePart, high: SidePart, apex_added: bool) -> Built {
    let (mut verts, mut nodes, low_root) = match low {
        SidePart::Flat(v) => (v, Vec::new(), None),
        SidePart::Sub(b) => (b.verts, b.nodes, Some(b.root)),
    };
    let offset_v = verts.len() - 1;
    let offset_n = nodes.len();
    let (hverts, hnodes, high_root) = match high {
        SidePart::Flat(v) => (v, Vec::new(), None),
        SidePart::Sub(b) => (b.verts, b.nodes, Some(b.root)),
    };
    verts.extend_from_slice(&hverts[1..]);
    for mut nd in hnodes {
        nd.lo += offset_v;
        nd.apex += offset_v;
        nd.hi += offset_v;
        nd.low_child = nd.low_child.map(|c| c + offset_n);
        nd.high_child = nd.high_child.map(|c| c + offset_n);
        nodes.push(nd);
    }
    let parent = TriNode {
        lo: 0,
        apex: offset_v,
        hi: verts.len() - 1,
        low_child: low_root,
        high_child: high_root.map(|r| r + offset_n),
        apex_added,
    };
    nodes.push(parent);
    let root = nodes.len() - 1;
    Built { verts, nodes, root }
}

fn build_chord(
    ctx: &Ctx,
    verts: Vec<SectorVertex>,
    bound: f64,
    depth: usize,
) -> Result<Built, PartitionError> {
    if depth > 4096 {
        return Err(PartitionError::DepthExceeded);
    }
    let n = verts.len();
    debug_assert!(n >= 3);
    let chord = Segment2::new(verts[0].img, verts[n - 1].img);
    if chord.len() <= ctx.tol.eps_geom * ctx.scale {
        return Err(PartitionError::DegenerateChord { t: verts[0].t });
    }
    let dists: Vec<Option<f64>> = (1..n - 1).map(|i| sees(ctx, &verts, i, &chord)).collect();
    let any_seen = dists.iter().any(|d| d.is_some());
    let weight = chord_weight(n, any_seen);
    if weight > bound - 0.25 {
        return Err(PartitionError::WeightNotDecreasing {
            child: weight,
            parent: bound,
        });
    }

    if any_seen {
        let mut m = 0usize;
        let mut best = f64::INFINITY;
        for (off, d) in dists.iter().enumerate() {
            if let Some(d) = d {
                if *d < best {
                    best = *d;
                    m = off + 1;
                }
            }
        }
        let low_sub = &verts[0..=m];
        let high_sub = &verts[m..];
        let low = match classify_side(ctx, low_sub)? {
            SideClass::Flat => SidePart::Flat(low_sub.to_vec()),
            SideClass::Interior => SidePart::Sub(build_chord(ctx, low_sub.to_vec(), weight, depth + 1)?),
        };
        let high = match classify_side(ctx, high_sub)? {
            SideClass::Flat => SidePart::Flat(high_sub.to_vec()),
            SideClass::Interior => SidePart::Sub(build_chord(ctx, high_sub.to_vec(), weight, depth + 1)?),
        };
        return Ok(merge(low, high, false));
    }

    let (k, c_pt, lam) = visible_side(ctx, &verts, &chord)?;
    if k >= 1 && k <= n - 3 {
        // The split point projects onto the chord midpoint; it must fall
        // strictly inside its side or the visibility classification was
        // inconsistent.
        if !(1e-7..=1.0 - 1e-7).contains(&lam) {
            return Err(PartitionError::SplitPointOutsideSide { lambda: lam });
        }
        let newv = insert_vertex(&verts[k], &verts[k + 1], c_pt);
        let mut low_in: Vec<SectorVertex> = verts[0..=k].to_vec();
        low_in.push(newv);
        let mut high_in: Vec<SectorVertex> = vec![newv];
        high_in.extend_from_slice(&verts[k + 1..]);
        let low = SidePart::Sub(build_chord(ctx, low_in, weight, depth + 1)?);
        let high = SidePart::Sub(build_chord(ctx, high_in, weight, depth + 1)?);
        Ok(merge(low, high, true))
    } else if k == 0 {
        let side = Segment2::new(verts[0].img, verts[1].img);
        let (foot, lam) = geom::project_onto_line(verts[n - 1].img, &side, ctx.tol)?;
        if !(1e-7..=1.0 - 1e-7).contains(&lam) {
            return Err(PartitionError::FootOutsideSide { lambda: lam });
        }
        let newv = insert_vertex(&verts[0], &verts[1], foot);
        let mut high_in: Vec<SectorVertex> = vec![newv];
        high_in.extend_from_slice(&verts[1..]);
        let low = SidePart::Flat(vec![verts[0], newv]);
        let high = SidePart::Sub(build_chord(ctx, high_in, weight, depth + 1)?);
        Ok(merge(low, high, true))
    } else {
        let side = Segment2::new(verts[n - 2].img, verts[n - 1].img);
        let (foot, lam) = geom::project_onto_line(verts[0].img, &side, ctx.tol)?;
        if !(1e-7..=1.0 - 1e-7).contains(&lam) {
            return Err(PartitionError::FootOutsideSide { lambda: lam });
        }
        let newv = insert_vertex(&verts[n - 2], &verts[n - 1], foot);
        let mut low_in: Vec<SectorVertex> = verts[0..=n - 2].to_vec();
        low_in.push(newv);
        let low = SidePart::Sub(build_chord(ctx, low_in, weight, depth + 1)?);
        let high = SidePart::Flat(vec![newv, verts[n - 1]]);
        Ok(merge(low, high, true))
    }
}

/// Builds the triangle tree of one sector against the full image polygon.
pub fn build_sector_tree(
    sector: &Sector,
    poly: &[Point2],
    tol: &Tol,
) -> Result<SectorTree, PartitionError> {
    if sector.verts.len() < 3 {
        return Err(PartitionError::DegenerateSector);
    }
    let n = poly.len();
    let edges: Vec<Segment2> = (0..n)
        .map(|i| Segment2::new(poly[i], poly[(i + 1) % n]))
        .collect();
    let grid = SegmentGrid::build(&edges, 64);
    let ctx = Ctx {
        poly,
        edges,
        grid,
        scale: geom::polygon_scale(poly),
        tol,
    };
    let built = build_chord(&ctx, sector.verts.clone(), f64::INFINITY, 0)?;
    Ok(SectorTree {
        sector_index: sector.index,
        verts: built.verts,
        nodes: built.nodes,
        root: built.root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::Sector;

    fn sv(t: f64, x: f64, y: f64, s: f64) -> SectorVertex {
        SectorVertex {
            t,
            src: boundary::point_on_square(t.rem_euclid(boundary::PERIMETER)),
            img: Point2::new(x, y),
            s_img: s,
        }
    }

    #[test]
    fn corner_sector_is_single_leaf() {
        let poly = vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ];
        let sector = Sector {
            index: 0,
            verts: vec![
                sv(0.5, 1.0, -1.0, 0.0),
                sv(1.0, 1.0, 1.0, 2.0),
                sv(1.5, -1.0, 1.0, 4.0),
            ],
            chord: Segment2::new(Point2::new(1.0, -1.0), Point2::new(-1.0, 1.0)),
        };
        let tree = build_sector_tree(&sector, &poly, &Tol::default()).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        let root = &tree.nodes[tree.root];
        assert_eq!((root.lo, root.apex, root.hi), (0, 1, 2));
        assert!(root.low_child.is_none() && root.high_child.is_none());
        assert!(tree.is_leaf_triangle(tree.root));
        tree.verify(&Tol::default()).unwrap();
        assert_eq!(tree.natural_sequence(1), vec![tree.root]);
        assert!(tree.natural_sequence(0).is_empty());
    }

    #[test]
    fn convex_fan_descends() {
        // A convex arc of four segments: the apex recursion splits it
        // into nested triangles without inserting vertices.
        let poly = vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 3.0),
            Point2::new(3.0, 4.0),
            Point2::new(1.0, 4.0),
            Point2::new(0.0, 3.0),
        ];
        let sector = Sector {
            index: 0,
            verts: vec![
                sv(0.0, 4.0, 0.0, 0.0),
                sv(0.5, 4.0, 3.0, 3.0),
                sv(1.0, 3.0, 4.0, 3.0 + 2f64.sqrt()),
                sv(1.5, 1.0, 4.0, 5.0 + 2f64.sqrt()),
                sv(2.0, 0.0, 3.0, 5.0 + 2.0 * 2f64.sqrt()),
            ],
            chord: Segment2::new(Point2::new(4.0, 0.0), Point2::new(0.0, 3.0)),
        };
        let tree = build_sector_tree(&sector, &poly, &Tol::default()).unwrap();
        tree.verify(&Tol::default()).unwrap();
        assert_eq!(tree.verts.len(), 5);
        assert_eq!(tree.nodes.len(), 3);
        // Every interior vertex has a nonempty chain ending at a node
        // whose apex it is.
        for v in 1..4 {
            let seq = tree.natural_sequence(v);
            assert!(!seq.is_empty());
            assert_eq!(tree.nodes[seq[0]].apex, v);
        }
    }
}
