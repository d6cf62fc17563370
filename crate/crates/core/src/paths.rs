//! Good-path construction over a sector partition.
//!
//! Every arc vertex is routed to the sector chord through the chain of
//! triangles that contain it: one straight segment per triangle, each
//! ending on that triangle's chord. Per triangle, the apex exits at a
//! point chosen inside an exit window that keeps all departure and
//! arrival angles bounded, and the vertices of each side are transported
//! onto the chord by a length-controlled mapping (isometric when the
//! window forces it, a shortening minimum at healthy angles, and a
//! two-rate compression at shallow angles). The resulting paths are
//! pairwise disjoint, uniformly short relative to the image arc, and
//! keep chord spacings between a source-arc lower bound and an image-arc
//! upper bound.

use thiserror::Error;

use crate::geom::{self, GeomError, Point2};
use crate::partition::SectorTree;
use crate::tolerances::{
    Tol, ARC_CHORD_FACTOR, EXIT_ANGLE_MIN, EXIT_GAP_DENOM, LAMBDA_MIN,
    PATH_TOTAL_LENGTH_FACTOR, PATH_VS_END_ARC_FACTOR, SEGMENT_SIDE_ANGLE_DENOM,
};

/// Exit data of one triangle: the admissible window on the chord and the
/// chosen apex exit position, plus the chord positions of every strictly
/// interior vertex.
#[derive(Debug, Clone)]
pub struct NodePlacement {
    pub x_plus: f64,
    pub x_minus: f64,
    pub c1: f64,
    /// `(vertex, position)` pairs ordered by vertex index; the apex is
    /// included with position `c1`.
    pub positions: Vec<(usize, f64)>,
}

/// One stop of a vertex path: the triangle it crosses and the landing
/// point on that triangle's chord.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub node: usize,
    pub s: f64,
    pub img: Point2,
}

/// The full path field of one sector.
#[derive(Debug, Clone)]
pub struct SectorPaths {
    pub tree: SectorTree,
    pub placements: Vec<NodePlacement>,
    pub l: f64,
}

#[derive(Debug, Error)]
pub enum PathError {
    #[error("node {node}: exit window is empty ({x_plus:.6} > {x_minus:.6})")]
    ExitWindowEmpty { node: usize, x_plus: f64, x_minus: f64 },
    #[error("node {node}: source arc exceeds the chord bound (ratio {ratio:.3})")]
    StimeACViolated { node: usize, ratio: f64 },
    #[error("node {node}: apex projection {pos:.6} outside exit window [{x_plus:.6}, {x_minus:.6}]")]
    ProjectionOutsideExit { node: usize, pos: f64, x_plus: f64, x_minus: f64 },
    #[error("node {node}: compression rate {lambda:.6} outside (3/7, 1)")]
    LambdaOutOfRange { node: usize, lambda: f64 },
    #[error("node {node}: chord positions out of order at vertex {vert}")]
    OrderViolation { node: usize, vert: usize },
    #[error("vertex {vert}: departure sine {sin:.3e} below 1/(6 L^2) = {needed:.3e}")]
    AngleTooShallow { vert: usize, sin: f64, needed: f64 },
    #[error("node {node}: arrival angle {angle:.4} below pi/12")]
    ExitAngleTooSmall { node: usize, angle: f64 },
    #[error("vertex {vert}: path length {len:.6} exceeds {bound:.6}")]
    PathTooLong { vert: usize, len: f64, bound: f64 },
    #[error("vertex {vert}: path length {len:.6} exceeds 113 times its end arc {arc:.6}")]
    PathTooLongVsEndArc { vert: usize, len: f64, arc: f64 },
    #[error("node {node}: chord gap between vertices {p} and {q} below source-arc bound")]
    ArcGapViolated { node: usize, p: usize, q: usize },
    #[error("node {node}: chord gap between vertices {p} and {q} above image-arc bound")]
    ArcGapUpper { node: usize, p: usize, q: usize },
    #[error("node {node}: spacing of {p} and {q} grew from child to parent")]
    MonotoneViolated { node: usize, p: usize, q: usize },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Aggregate slack margins of a verified path field.
#[derive(Debug, Clone)]
pub struct PathReport {
    pub vertex_count: usize,
    pub node_count: usize,
    pub min_start_sin: f64,
    pub min_exit_angle: f64,
    pub max_len_over_arc: f64,
    pub min_pair_slack: f64,
}

impl SectorPaths {
    /// Landing point for position `s` on the chord of `node`.
    pub fn chord_point(&self, node: usize, s: f64) -> Point2 {
        let chord = self.tree.chord_of(node);
        let len = chord.len();
        chord.at(if len > 0.0 { s / len } else { 0.0 })
    }

    /// Position of vertex `v` on the chord of `node`, if it is strictly
    /// interior to that node.
    pub fn position_of(&self, node: usize, v: usize) -> Option<f64> {
        let pos = &self.placements[node].positions;
        pos.binary_search_by_key(&v, |&(vert, _)| vert)
            .ok()
            .map(|i| pos[i].1)
    }

    /// The path of vertex `v`: one landing per triangle of its chain,
    /// deepest first. Empty for the sector endpoints.
    pub fn vertex_path(&self, v: usize) -> Vec<PathPoint> {
        self.tree
            .natural_sequence(v)
            .into_iter()
            .map(|node| {
                let s = self.position_of(node, v).expect("chain node lacks position");
                PathPoint {
                    node,
                    s,
                    img: self.chord_point(node, s),
                }
            })
            .collect()
    }

    /// Total Euclidean length of the path of vertex `v`.
    pub fn path_length(&self, v: usize) -> f64 {
        let pts = self.vertex_path(v);
        let mut prev = self.tree.verts[v].img;
        let mut total = 0.0;
        for p in pts {
            total += p.img.dist(prev);
            prev = p.img;
        }
        total
    }
}

/// Transports the side vertices `entries` (ordered toward the apex, with
/// positions `d` measured from the side's chord endpoint) to positions on
/// the chord, measured from the same endpoint. `side_len` is the length
/// of the straight side, `c1_e` the apex exit position from this
/// endpoint, `beta` the angle between side and chord at the endpoint.
#[allow(clippy::too_many_arguments)]
fn side_map(
    verts_t: &[f64],
    endpoint: usize,
    apex: usize,
    entries: &[(usize, f64)],
    side_len: f64,
    c1_e: f64,
    beta: f64,
    chord_len: f64,
    l: f64,
    tol: &Tol,
    node: usize,
) -> Result<Vec<f64>, PathError> {
    if entries.is_empty() {
        return Ok(Vec::new());
    }
    let src = |i: usize, j: usize| (verts_t[i] - verts_t[j]).abs();
    if (side_len - c1_e).abs() <= tol.eps_geom * chord_len {
        return Ok(entries.iter().map(|&(_, d)| d).collect());
    }
    if beta >= EXIT_ANGLE_MIN {
        return Ok(entries
            .iter()
            .map(|&(v, d)| d.min(c1_e - src(v, apex) / (EXIT_GAP_DENOM * l)))
            .collect());
    }
    // Shallow angle: compress the side onto [0, c1_e], keeping intervals
    // that are already short relative to their source arc at full length
    // and scaling the rest by a single rate.
    let mut ids: Vec<usize> = Vec::with_capacity(entries.len() + 2);
    let mut ds: Vec<f64> = Vec::with_capacity(entries.len() + 2);
    ids.push(endpoint);
    ds.push(0.0);
    for &(v, d) in entries {
        ids.push(v);
        ds.push(d);
    }
    ids.push(apex);
    ds.push(side_len);
    let m = ds.len() - 1;
    let mut small = vec![false; m];
    let mut delta = 0.0;
    for i in 0..m {
        let spacing = ds[i + 1] - ds[i];
        let arc = src(ids[i], ids[i + 1]);
        if arc > 0.0 && spacing / arc <= 1.0 / (3.0 * l) {
            small[i] = true;
            delta += spacing;
        }
    }
    let denom = side_len - delta;
    let lambda = if denom > tol.eps_geom * chord_len {
        (c1_e - delta) / denom
    } else {
        1.0
    };
    if lambda <= LAMBDA_MIN - tol.eps_len || lambda > 1.0 + tol.eps_len {
        return Err(PathError::LambdaOutOfRange { node, lambda });
    }
    let mut out = Vec::with_capacity(entries.len());
    let mut cur = 0.0;
    for i in 0..m {
        let spacing = ds[i + 1] - ds[i];
        cur += if small[i] { spacing } else { lambda * spacing };
        if i + 1 < ds.len() - 1 {
            out.push(cur);
        }
    }
    Ok(out)
}

fn process_node(
    tree: &SectorTree,
    l: f64,
    tol: &Tol,
    node: usize,
    placements: &mut Vec<Option<NodePlacement>>,
) -> Result<Vec<(usize, f64)>, PathError> {
    let nd = tree.nodes[node].clone();
    let v = &tree.verts;
    let a = v[nd.lo].img;
    let b = v[nd.hi].img;
    let c = v[nd.apex].img;
    let chord_len = a.dist(b);
    let ale = a.dist(c);
    let ble = b.dist(c);
    let x_plus = chord_len - ble;
    let x_minus = ale;
    let scale = chord_len.max(1.0);
    if x_plus > x_minus + tol.eps_len * scale {
        return Err(PathError::ExitWindowEmpty {
            node,
            x_plus,
            x_minus,
        });
    }
    let arc_lo = tree.src_arc(nd.lo, nd.apex);
    let arc_hi = tree.src_arc(nd.apex, nd.hi);
    if arc_lo > ARC_CHORD_FACTOR * l * ale + tol.eps_len {
        return Err(PathError::StimeACViolated {
            node,
            ratio: arc_lo / (l * ale).max(1e-300),
        });
    }
    if arc_hi > ARC_CHORD_FACTOR * l * ble + tol.eps_len {
        return Err(PathError::StimeACViolated {
            node,
            ratio: arc_hi / (l * ble).max(1e-300),
        });
    }
    let chord_dir = b.sub(a);
    let proj_c = c.sub(a).dot(chord_dir) / chord_len;
    if proj_c < x_plus - tol.eps_len * scale || proj_c > x_minus + tol.eps_len * scale {
        return Err(PathError::ProjectionOutsideExit {
            node,
            pos: proj_c,
            x_plus,
            x_minus,
        });
    }
    let tilde = chord_len * arc_lo / (arc_lo + arc_hi);
    let c1 = tilde.clamp(x_plus.min(x_minus), x_minus);

    let verts_t: Vec<f64> = v.iter().map(|x| x.t).collect();

    // Low side, measured from the lo endpoint.
    let low_entries: Vec<(usize, f64)> = match nd.low_child {
        Some(child) => process_node(tree, l, tol, child, placements)?,
        None => ((nd.lo + 1)..nd.apex)
            .map(|u| (u, v[u].img.dist(a)))
            .collect(),
    };
    let beta_lo = geom::angle_at(c, a, b, tol)?;
    let low_new = side_map(
        &verts_t, nd.lo, nd.apex, &low_entries, ale, c1, beta_lo, chord_len, l, tol, node,
    )?;

    // High side, measured from the hi endpoint; entry order runs from
    // the endpoint toward the apex, so vertex indices descend.
    let high_entries: Vec<(usize, f64)> = match nd.high_child {
        Some(child) => {
            let child_positions = process_node(tree, l, tol, child, placements)?;
            let mut entries: Vec<(usize, f64)> = child_positions
                .into_iter()
                .map(|(u, s)| (u, ble - s))
                .collect();
            entries.reverse();
            entries
        }
        None => ((nd.apex + 1)..nd.hi)
            .rev()
            .map(|u| (u, v[u].img.dist(b)))
            .collect(),
    };
    let beta_hi = geom::angle_at(c, b, a, tol)?;
    let high_new = side_map(
        &verts_t,
        nd.hi,
        nd.apex,
        &high_entries,
        ble,
        chord_len - c1,
        beta_hi,
        chord_len,
        l,
        tol,
        node,
    )?;

    let mut positions: Vec<(usize, f64)> = Vec::with_capacity(low_new.len() + high_new.len() + 1);
    for (k, &(u, _)) in low_entries.iter().enumerate() {
        positions.push((u, low_new[k]));
    }
    positions.push((nd.apex, c1));
    for (k, &(u, _)) in high_entries.iter().enumerate().rev() {
        positions.push((u, chord_len - high_new[k]));
    }
    placements[node] = Some(NodePlacement {
        x_plus,
        x_minus,
        c1,
        positions: positions.clone(),
    });
    Ok(positions)
}

/// Builds the path field of one sector. Consumes the tree.
pub fn build_paths(tree: SectorTree, l: f64, tol: &Tol) -> Result<SectorPaths, PathError> {
    let mut placements: Vec<Option<NodePlacement>> = vec![None; tree.nodes.len()];
    process_node(&tree, l, tol, tree.root, &mut placements)?;
    let placements = placements
        .into_iter()
        .map(|p| p.expect("every node processed"))
        .collect();
    Ok(SectorPaths {
        tree,
        placements,
        l,
    })
}

/// Verifies every quantitative path invariant: strict per-chord order,
/// source-arc and image-arc spacing bounds with virtual chord endpoints,
/// spacing monotonicity from child to parent, departure and arrival
/// angles, and both length bounds.
pub fn verify_path_invariants(paths: &SectorPaths, tol: &Tol) -> Result<PathReport, PathError> {
    let tree = &paths.tree;
    let l = paths.l;
    let v = &tree.verts;
    let nverts = v.len();
    let poly: Vec<Point2> = v.iter().map(|x| x.img).collect();
    let scale = geom::polygon_scale(&poly);
    let sector_arc = v[nverts - 1].s_img;
    let need_sin = 1.0 / (SEGMENT_SIDE_ANGLE_DENOM * l * l);

    let mut report = PathReport {
        vertex_count: nverts,
        node_count: tree.nodes.len(),
        min_start_sin: f64::INFINITY,
        min_exit_angle: f64::INFINITY,
        max_len_over_arc: 0.0,
        min_pair_slack: f64::INFINITY,
    };

    for (ni, nd) in tree.nodes.iter().enumerate() {
        let place = &paths.placements[ni];
        let chord_len = tree.chord_of(ni).len();
        let mut with_ends: Vec<(usize, f64)> = Vec::with_capacity(place.positions.len() + 2);
        with_ends.push((nd.lo, 0.0));
        with_ends.extend_from_slice(&place.positions);
        with_ends.push((nd.hi, chord_len));
        for w in with_ends.windows(2) {
            if w[1].1 <= w[0].1 {
                return Err(PathError::OrderViolation {
                    node: ni,
                    vert: w[1].0,
                });
            }
        }
        for i in 0..with_ends.len() {
            for j in (i + 1)..with_ends.len() {
                let (pv, ps) = with_ends[i];
                let (qv, qs) = with_ends[j];
                let gap = (qs - ps).abs();
                let lower = tree.src_arc(pv, qv) / (EXIT_GAP_DENOM * l);
                if gap < lower - tol.eps_len {
                    return Err(PathError::ArcGapViolated { node: ni, p: pv, q: qv });
                }
                let upper = tree.img_arc(pv, qv);
                if gap > upper + tol.eps_len {
                    return Err(PathError::ArcGapUpper { node: ni, p: pv, q: qv });
                }
                report.min_pair_slack = report.min_pair_slack.min(gap - lower);
            }
        }
        // Spacing between two vertices may only shrink from the child
        // chord to this chord.
        let parent_s = |u: usize| -> f64 {
            if u == nd.lo {
                0.0
            } else if u == nd.hi {
                chord_len
            } else {
                paths.position_of(ni, u).expect("interior vertex placed")
            }
        };
        for (child, clo, chi) in [
            (nd.low_child, nd.lo, nd.apex),
            (nd.high_child, nd.apex, nd.hi),
        ] {
            let Some(child) = child else { continue };
            let child_len = tree.chord_of(child).len();
            let child_s = |u: usize| -> f64 {
                if u == clo {
                    0.0
                } else if u == chi {
                    child_len
                } else {
                    paths.position_of(child, u).expect("interior vertex placed")
                }
            };
            let mut span: Vec<usize> = vec![clo];
            span.extend(
                paths.placements[child]
                    .positions
                    .iter()
                    .map(|&(u, _)| u),
            );
            span.push(chi);
            for i in 0..span.len() {
                for j in (i + 1)..span.len() {
                    let (p, q) = (span[i], span[j]);
                    let dp = (parent_s(q) - parent_s(p)).abs();
                    let dc = (child_s(q) - child_s(p)).abs();
                    if dp > dc + tol.eps_len {
                        return Err(PathError::MonotoneViolated { node: ni, p, q });
                    }
                }
            }
        }
    }

    for vert in 1..nverts - 1 {
        let pts = paths.vertex_path(vert);
        debug_assert!(!pts.is_empty());
        let mut prev = v[vert].img;
        let mut total = 0.0;
        for (k, p) in pts.iter().enumerate() {
            let seg = p.img.sub(prev);
            let len = seg.norm();
            total += len;
            if len > tol.eps_geom * scale {
                let start_dirs: Vec<Point2> = if k == 0 {
                    if tree.nodes[p.node].apex == vert {
                        vec![
                            v[vert].img.sub(v[vert - 1].img),
                            v[vert + 1].img.sub(v[vert].img),
                        ]
                    } else {
                        vec![v[vert + 1].img.sub(v[vert].img)]
                    }
                } else {
                    vec![tree.chord_of(pts[k - 1].node).dir()]
                };
                for side in start_dirs {
                    let s = geom::line_angle(seg, side).sin();
                    report.min_start_sin = report.min_start_sin.min(s);
                    if s < need_sin - tol.eps_len {
                        return Err(PathError::AngleTooShallow {
                            vert,
                            sin: s,
                            needed: need_sin,
                        });
                    }
                }
                let exit = geom::line_angle(seg, tree.chord_of(p.node).dir());
                report.min_exit_angle = report.min_exit_angle.min(exit);
                if exit < EXIT_ANGLE_MIN - tol.eps_len {
                    return Err(PathError::ExitAngleTooSmall {
                        node: p.node,
                        angle: exit,
                    });
                }
            }
            prev = p.img;
        }
        let bound = PATH_TOTAL_LENGTH_FACTOR * sector_arc;
        if total > bound + tol.eps_len {
            return Err(PathError::PathTooLong {
                vert,
                len: total,
                bound,
            });
        }
        report.max_len_over_arc = report.max_len_over_arc.max(total / sector_arc.max(1e-300));
        let end_arc = v[vert]
            .s_img
            .min(sector_arc - v[vert].s_img);
        if total > PATH_VS_END_ARC_FACTOR * end_arc + tol.eps_len {
            return Err(PathError::PathTooLongVsEndArc {
                vert,
                len: total,
                arc: end_arc,
            });
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Sector, SectorVertex};
    use crate::geom::Segment2;
    use crate::partition::build_sector_tree;

    fn sv(t: f64, x: f64, y: f64, s: f64) -> SectorVertex {
        SectorVertex {
            t,
            src: crate::boundary::point_on_square(t.rem_euclid(crate::boundary::PERIMETER)),
            img: Point2::new(x, y),
            s_img: s,
        }
    }

    fn corner_paths() -> SectorPaths {
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
        build_paths(tree, 1.5, &Tol::default()).unwrap()
    }

    #[test]
    fn corner_apex_exits_inside_window() {
        let paths = corner_paths();
        let place = &paths.placements[paths.tree.root];
        assert!(place.x_plus <= place.c1 + 1e-12 && place.c1 <= place.x_minus + 1e-12);
        // Symmetric triangle: the source-arc split puts the exit at the
        // chord midpoint.
        let chord_len = paths.tree.chord_of(paths.tree.root).len();
        assert!((place.c1 - chord_len / 2.0).abs() < 1e-12);
        let path = paths.vertex_path(1);
        assert_eq!(path.len(), 1);
        assert!(path[0].img.dist(Point2::new(0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn corner_invariants_hold() {
        let paths = corner_paths();
        let report = verify_path_invariants(&paths, &Tol::default()).unwrap();
        assert_eq!(report.node_count, 1);
        assert!(report.min_exit_angle >= std::f64::consts::FRAC_PI_4 - 1e-9);
        assert!(report.max_len_over_arc <= 4.0);
    }
}
