//! Distortion certification and mesh validity of a finished extension.
//!
//! Every piece is affine, so its exact bi-Lipschitz constant is the
//! larger of its top singular value and the reciprocal of its bottom
//! one. The source square is convex, which makes the piecewise maximum
//! of forward singular values a global forward Lipschitz constant. The
//! image polygon need not be convex, so the inverse direction is
//! certified locally and then probed globally with a deterministic
//! random sample of point pairs.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::boundary::BoundaryMap;
use crate::extend::{Extension, Piece, PieceTag};
use crate::geom::{self, GeomError, Point2, Segment2};
use crate::par::par_map;
use crate::tolerances::{Tol, DISTORTION_BOUND_COEFF, SECTOR_DISTORTION_COEFF};

/// Seed for the sampled inverse probe; fixed so runs are reproducible.
/// Default stream seed for the sampled inverse estimate.
pub const SAMPLE_SEED: u64 = 0x1b9_2e4;

#[derive(Debug, Error)]
pub enum DistortionError {
    #[error("piece {index} has a degenerate source triangle")]
    DegeneratePiece { index: usize },
    #[error("no piece contains the source point ({x:.9}, {y:.9})")]
    PointLocationFailure { x: f64, y: f64 },
    #[error("piece {index} ({tag}) has distortion {got:.1} above its bound {bound:.1}")]
    PieceBoundExceeded {
        index: usize,
        tag: &'static str,
        got: f64,
        bound: f64,
    },
    #[error("global distortion {got:.1} exceeds the certified bound {bound:.1}")]
    DistortionExceeded { got: f64, bound: f64 },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Exact singular values of the affine map of one piece.
pub fn piece_singular_values(piece: &Piece) -> Option<(f64, f64)> {
    let m = geom::affine_linear_part(&piece.src, &piece.dst)?;
    Some(geom::svd2(m))
}

/// Closed-form upper bounds for the Lipschitz constant of the affine map
/// between two triangles, written in terms of two side lengths and the
/// enclosed angle. The first is sharper; the second drops the cosine
/// cancellation. Both dominate the exact top singular value.
pub fn lip_triangle_bounds(
    src: &[Point2; 3],
    dst: &[Point2; 3],
    tol: &Tol,
) -> Result<(f64, f64), GeomError> {
    let a = src[1].dist(src[0]);
    let b = src[2].dist(src[0]);
    let ap = dst[1].dist(dst[0]);
    let bp = dst[2].dist(dst[0]);
    let alpha = geom::angle_at(src[1], src[0], src[2], tol)?;
    let alpha_p = geom::angle_at(dst[1], dst[0], dst[2], tol)?;
    let (sa, ca) = alpha.sin_cos();
    let (sap, cap) = alpha_p.sin_cos();
    let bound1 = ap / a + bp * sap / (b * sa) + (bp * cap / (b * sa) - ap * ca / (a * sa)).abs();
    let bound2 = ap / a + 2.0 * bp / (b * sa) + ap / (a * sa);
    Ok((bound1, bound2))
}

/// Uniform grid over the source square for point-in-piece queries.
pub struct PieceLocator {
    res: usize,
    cells: Vec<Vec<u32>>,
}

impl PieceLocator {
    pub fn build(pieces: &[Piece]) -> PieceLocator {
        let res = ((pieces.len() as f64).sqrt().ceil() as usize).clamp(8, 256);
        let mut cells = vec![Vec::new(); res * res];
        for (i, p) in pieces.iter().enumerate() {
            let xs = [p.src[0].x, p.src[1].x, p.src[2].x];
            let ys = [p.src[0].y, p.src[1].y, p.src[2].y];
            let lo_x = Self::cell_index(xs.iter().cloned().fold(f64::MAX, f64::min), res);
            let hi_x = Self::cell_index(xs.iter().cloned().fold(f64::MIN, f64::max), res);
            let lo_y = Self::cell_index(ys.iter().cloned().fold(f64::MAX, f64::min), res);
            let hi_y = Self::cell_index(ys.iter().cloned().fold(f64::MIN, f64::max), res);
            for cy in lo_y..=hi_y {
                for cx in lo_x..=hi_x {
                    cells[cy * res + cx].push(i as u32);
                }
            }
        }
        PieceLocator { res, cells }
    }

    fn cell_index(coord: f64, res: usize) -> usize {
        let u = (coord + 0.5).clamp(0.0, 1.0);
        ((u * res as f64) as usize).min(res - 1)
    }

    fn candidates(&self, p: Point2) -> &[u32] {
        let cx = Self::cell_index(p.x, self.res);
        let cy = Self::cell_index(p.y, self.res);
        &self.cells[cy * self.res + cx]
    }

    /// Index of a piece containing `p`, with a small barycentric slack.
    pub fn locate(&self, pieces: &[Piece], p: Point2) -> Option<usize> {
        for &i in self.candidates(p) {
            let (b0, b1, b2) = geom::barycentric(&pieces[i as usize].src, p);
            if b0 >= -1e-12 && b1 >= -1e-12 && b2 >= -1e-12 {
                return Some(i as usize);
            }
        }
        None
    }

    /// All pieces containing `p` under the given barycentric slack.
    fn locate_all(&self, pieces: &[Piece], p: Point2, slack: f64) -> Vec<usize> {
        self.candidates(p)
            .iter()
            .filter(|&&i| {
                let (b0, b1, b2) = geom::barycentric(&pieces[i as usize].src, p);
                b0 >= -slack && b1 >= -slack && b2 >= -slack
            })
            .map(|&i| i as usize)
            .collect()
    }
}

/// Evaluates the extension at a source point.
pub fn eval(
    pieces: &[Piece],
    locator: &PieceLocator,
    p: Point2,
) -> Result<Point2, DistortionError> {
    let i = locator
        .locate(pieces, p)
        .ok_or(DistortionError::PointLocationFailure { x: p.x, y: p.y })?;
    Ok(geom::affine_apply(&pieces[i].src, &pieces[i].dst, p))
}

#[derive(Debug, Clone)]
pub struct DistortionReport {
    /// Largest forward singular value over all pieces; a global forward
    /// Lipschitz constant because the source square is convex.
    pub forward: f64,
    /// Largest reciprocal bottom singular value over all pieces.
    pub inverse_local: f64,
    /// Largest inverse difference quotient over the sampled pairs.
    pub inverse_sampled: f64,
    /// Final certified constant.
    pub global: f64,
    /// The bound the constant is checked against.
    pub bound: f64,
    /// Largest per-piece distortion among plain sector and fan pieces.
    pub sector_piece_max: f64,
    pub sample_pairs: usize,
    pub sample_seed: u64,
}

/// Per-piece distortion bounds: plain pieces stay within the sector
/// budget, pieces composed with the wedge map within the global one.
pub fn verify_piece_bounds(ext: &Extension, l: f64, tol: &Tol) -> Result<f64, DistortionError> {
    let sector_bound = SECTOR_DISTORTION_COEFF * l.powi(4);
    let global_bound = DISTORTION_BOUND_COEFF * l.powi(4);
    let mut sector_max = 0.0f64;
    for (i, p) in ext.pieces.iter().enumerate() {
        let (smax, smin) =
            piece_singular_values(p).ok_or(DistortionError::DegeneratePiece { index: i })?;
        let sigma = smax.max(1.0 / smin);
        let bound = match p.tag {
            PieceTag::PhiComposed => global_bound,
            _ => sector_bound,
        };
        if sigma > bound * (1.0 + tol.eps_len) {
            return Err(DistortionError::PieceBoundExceeded {
                index: i,
                tag: p.tag.as_str(),
                got: sigma,
                bound,
            });
        }
        if p.tag != PieceTag::PhiComposed {
            sector_max = sector_max.max(sigma);
        }
    }
    Ok(sector_max)
}

/// Certifies the global bi-Lipschitz constant of the extension.
pub fn global_distortion(
    ext: &Extension,
    l: f64,
    sample_pairs: usize,
    sample_seed: u64,
    tol: &Tol,
) -> Result<DistortionReport, DistortionError> {
    let sector_piece_max = verify_piece_bounds(ext, l, tol)?;

    let sigmas = par_map(&ext.pieces, |p| piece_singular_values(p));
    let mut forward = 0.0f64;
    let mut inverse_local = 0.0f64;
    for (i, s) in sigmas.into_iter().enumerate() {
        let (smax, smin) = s.ok_or(DistortionError::DegeneratePiece { index: i })?;
        forward = forward.max(smax);
        inverse_local = inverse_local.max(1.0 / smin);
    }

    let locator = PieceLocator::build(&ext.pieces);
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let mut inverse_sampled = 0.0f64;
    for _ in 0..sample_pairs {
        let p = Point2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let q = Point2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let d_src = p.dist(q);
        if d_src < 1e-12 {
            continue;
        }
        let vp = eval(&ext.pieces, &locator, p)?;
        let vq = eval(&ext.pieces, &locator, q)?;
        let d_dst = vp.dist(vq);
        if d_dst > 0.0 {
            inverse_sampled = inverse_sampled.max(d_src / d_dst);
        } else {
            inverse_sampled = f64::INFINITY;
        }
    }

    let global = forward.max(inverse_local).max(inverse_sampled);
    let bound = DISTORTION_BOUND_COEFF * l.powi(4);
    if global > bound * (1.0 + tol.eps_len) {
        return Err(DistortionError::DistortionExceeded { got: global, bound });
    }
    Ok(DistortionReport {
        forward,
        inverse_local,
        inverse_sampled,
        global,
        bound,
        sector_piece_max,
        sample_pairs,
        sample_seed,
    })
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no pieces")]
    Empty,
    #[error("piece {index} has a non-positive {side} area")]
    NonPositiveArea { index: usize, side: &'static str },
    #[error("source areas sum to {got:.12}, expected {expected:.12}")]
    SrcAreaMismatch { got: f64, expected: f64 },
    #[error("image areas sum to {got:.12}, expected {expected:.12}")]
    DstAreaMismatch { got: f64, expected: f64 },
    #[error("source point ({x:.9}, {y:.9}) lies in {count} pieces")]
    MembershipFailure { x: f64, y: f64, count: usize },
    #[error("boundary vertex at t = {t:.9} is not a mesh vertex with the input image")]
    BoundaryVertexMissing { t: f64 },
    #[error("boundary midpoint error {err:.3e} at t = {t:.9}")]
    BoundaryMidpointMismatch { t: f64, err: f64 },
    #[error(
        "source edge ({ax:.12}, {ay:.12})-({bx:.12}, {by:.12}) appears {count} times \
         (expected {expected})"
    )]
    EdgeCountBad {
        count: usize,
        expected: usize,
        ax: f64,
        ay: f64,
        bx: f64,
        by: f64,
    },
    #[error("shared edge image midpoints differ by {err:.3e}")]
    EdgeMidpointMismatch { err: f64 },
    #[error("no piece contains the probe point ({x:.9}, {y:.9})")]
    PointLocationFailure { x: f64, y: f64 },
}

#[derive(Debug, Clone)]
pub struct MeshReport {
    pub piece_count: usize,
    pub src_area_err: f64,
    pub dst_area_err: f64,
    pub membership_checked: usize,
    pub membership_skipped: usize,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    pub max_edge_midpoint_err: f64,
    pub max_boundary_err: f64,
}

const MEMBERSHIP_SAMPLES: usize = 10_000;
const MEMBERSHIP_SEED: u64 = 0x7a11;

fn bits(p: Point2) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

fn on_square_boundary(p: Point2) -> bool {
    p.x.abs() == 0.5 || p.y.abs() == 0.5
}

/// Structural checks: orientation, area conservation, unique membership,
/// boundary agreement with the input map, and continuity across shared
/// edges.
pub fn mesh_validity(ext: &Extension, map: &BoundaryMap) -> Result<MeshReport, MeshError> {
    let pieces = &ext.pieces;
    if pieces.is_empty() {
        return Err(MeshError::Empty);
    }
    let poly = map.image_polygon();
    let scale = geom::polygon_scale(&poly);

    let mut src_sum = 0.0f64;
    let mut dst_sum = 0.0f64;
    for (i, p) in pieces.iter().enumerate() {
        let sa = 0.5 * geom::tri_area2(p.src[0], p.src[1], p.src[2]);
        let da = 0.5 * geom::tri_area2(p.dst[0], p.dst[1], p.dst[2]);
        if sa <= 0.0 {
            return Err(MeshError::NonPositiveArea {
                index: i,
                side: "source",
            });
        }
        if da <= 0.0 {
            return Err(MeshError::NonPositiveArea {
                index: i,
                side: "image",
            });
        }
        src_sum += sa;
        dst_sum += da;
    }
    let src_area_err = (src_sum - 1.0).abs();
    if src_area_err > 1e-9 {
        return Err(MeshError::SrcAreaMismatch {
            got: src_sum,
            expected: 1.0,
        });
    }
    let poly_area = geom::polygon_area(&poly);
    let dst_area_err = (dst_sum - poly_area).abs() / poly_area.max(1.0);
    if dst_area_err > 1e-9 {
        return Err(MeshError::DstAreaMismatch {
            got: dst_sum,
            expected: poly_area,
        });
    }

    let locator = PieceLocator::build(pieces);
    let mut rng = ChaCha8Rng::seed_from_u64(MEMBERSHIP_SEED);
    let mut checked = 0usize;
    let mut skipped = 0usize;
    for _ in 0..MEMBERSHIP_SAMPLES {
        let p = Point2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let hits = locator.locate_all(pieces, p, 1e-9);
        if hits.is_empty() {
            return Err(MeshError::PointLocationFailure { x: p.x, y: p.y });
        }
        let near_edge = hits.iter().any(|&i| {
            let t = &pieces[i].src;
            (0..3).any(|k| {
                geom::dist_point_segment(p, &Segment2::new(t[k], t[(k + 1) % 3])).0 <= 1e-9
            })
        });
        if near_edge {
            skipped += 1;
            continue;
        }
        let strict: Vec<usize> = hits
            .into_iter()
            .filter(|&i| {
                let (b0, b1, b2) = geom::barycentric(&pieces[i].src, p);
                b0 > 0.0 && b1 > 0.0 && b2 > 0.0
            })
            .collect();
        if strict.len() != 1 {
            return Err(MeshError::MembershipFailure {
                x: p.x,
                y: p.y,
                count: strict.len(),
            });
        }
        checked += 1;
    }

    // Boundary vertices must appear as mesh vertices with exactly the
    // input image point.
    let mut vertex_images: HashMap<(u64, u64), (u64, u64)> = HashMap::new();
    for p in pieces {
        for k in 0..3 {
            vertex_images.insert(bits(p.src[k]), bits(p.dst[k]));
        }
    }
    let mut max_boundary_err = 0.0f64;
    let verts = map.vertices();
    for v in verts {
        match vertex_images.get(&bits(v.src)) {
            Some(&img) if img == bits(v.img) => {}
            _ => return Err(MeshError::BoundaryVertexMissing { t: v.t }),
        }
    }
    for i in 0..verts.len() {
        let a = &verts[i];
        let b = &verts[(i + 1) % verts.len()];
        let mid_src = a.src.lerp(b.src, 0.5);
        let mid_img = a.img.lerp(b.img, 0.5);
        let got = match locator.locate(pieces, mid_src) {
            Some(idx) => geom::affine_apply(&pieces[idx].src, &pieces[idx].dst, mid_src),
            None => {
                return Err(MeshError::PointLocationFailure {
                    x: mid_src.x,
                    y: mid_src.y,
                })
            }
        };
        let err = got.dist(mid_img) / scale;
        max_boundary_err = max_boundary_err.max(err);
        if err > 1e-12 {
            return Err(MeshError::BoundaryMidpointMismatch { t: a.t, err });
        }
    }

    // Interior edges must appear exactly twice with matching image
    // midpoints; edges on the square boundary exactly once.
    let mut edge_map: HashMap<((u64, u64), (u64, u64)), Vec<Point2>> = HashMap::new();
    for p in pieces {
        for k in 0..3 {
            let (sa, sb) = (p.src[k], p.src[(k + 1) % 3]);
            let (da, db) = (p.dst[k], p.dst[(k + 1) % 3]);
            let (ka, kb) = (bits(sa), bits(sb));
            let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
            edge_map.entry(key).or_default().push(da.lerp(db, 0.5));
        }
    }
    let mut interior_edges = 0usize;
    let mut boundary_edges = 0usize;
    let mut max_edge_midpoint_err = 0.0f64;
    for (key, mids) in &edge_map {
        let a = Point2::new(f64::from_bits(key.0 .0), f64::from_bits(key.0 .1));
        let b = Point2::new(f64::from_bits(key.1 .0), f64::from_bits(key.1 .1));
        let expected = if on_square_boundary(a) && on_square_boundary(b) {
            1
        } else {
            2
        };
        if mids.len() != expected {
            return Err(MeshError::EdgeCountBad {
                count: mids.len(),
                expected,
                ax: a.x,
                ay: a.y,
                bx: b.x,
                by: b.y,
            });
        }
        if expected == 2 {
            interior_edges += 1;
            let err = mids[0].dist(mids[1]) / scale;
            max_edge_midpoint_err = max_edge_midpoint_err.max(err);
            if err > 1e-12 {
                return Err(MeshError::EdgeMidpointMismatch { err });
            }
        } else {
            boundary_edges += 1;
        }
    }

    Ok(MeshReport {
        piece_count: pieces.len(),
        src_area_err,
        dst_area_err,
        membership_checked: checked,
        membership_skipped: skipped,
        interior_edges,
        boundary_edges,
        max_edge_midpoint_err,
        max_boundary_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::PieceTag;

    fn unit_pieces() -> Vec<Piece> {
        // Two triangles tiling the square, image stretched by 2 in x.
        let a = Point2::new(-0.5, -0.5);
        let b = Point2::new(0.5, -0.5);
        let c = Point2::new(0.5, 0.5);
        let d = Point2::new(-0.5, 0.5);
        let f = |p: Point2| Point2::new(2.0 * p.x, p.y);
        vec![
            Piece {
                src: [a, b, c],
                dst: [f(a), f(b), f(c)],
                tag: PieceTag::Fan,
            },
            Piece {
                src: [a, c, d],
                dst: [f(a), f(c), f(d)],
                tag: PieceTag::Fan,
            },
        ]
    }

    #[test]
    fn singular_values_of_pure_stretch() {
        let pieces = unit_pieces();
        let (smax, smin) = piece_singular_values(&pieces[0]).unwrap();
        assert!((smax - 2.0).abs() < 1e-12);
        assert!((smin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_bounds_dominate_singular_value() {
        let pieces = unit_pieces();
        let tol = Tol::default();
        for p in &pieces {
            let (smax, _) = piece_singular_values(p).unwrap();
            let (b1, b2) = lip_triangle_bounds(&p.src, &p.dst, &tol).unwrap();
            assert!(b1 >= smax - 1e-12);
            assert!(b2 >= b1 - 1e-12);
        }
    }

    #[test]
    fn locator_finds_every_sample() {
        let pieces = unit_pieces();
        let locator = PieceLocator::build(&pieces);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = Point2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let i = locator.locate(&pieces, p).unwrap();
            let v = geom::affine_apply(&pieces[i].src, &pieces[i].dst, p);
            assert!((v.x - 2.0 * p.x).abs() < 1e-12);
            assert!((v.y - p.y).abs() < 1e-12);
        }
    }
}
