//! Piecewise-affine extension of the boundary map to the whole square.
//!
//! Every boundary vertex travels along its good path while its source
//! point moves radially toward the origin at depth `tau / (10 L)`. The
//! region between two adjacent vertex trajectories is tiled by triangle
//! fans (where the deeper path has extra stops) and quad strips (along
//! the aligned tails). The final stops of all paths form a ring that is
//! fanned to a center point. When a sector chord passes too close to
//! the fan center, or the center lies beyond a chord, a piecewise-affine
//! wedge map nudges the chord midpoint away first; its cells are applied
//! to the finished pieces by cutting them along the wedge lines with a
//! canonical edge interpolation, so seams stay bit-consistent.

use thiserror::Error;

use crate::ball::{CentralBall, Sector};
use crate::geom::{self, GeomError, Point2, Segment2};
use crate::par::par_map_range;
use crate::paths::SectorPaths;
use crate::speed::SectorSpeeds;
use crate::tolerances::{
    Tol, CASE_A_DEPTH_DIV, CASE_C_DEPTH_DIV, FAN_APEX_ANGLE_DENOM, RADIAL_DEPTH_DENOM,
    RADIAL_DEPTH_MAX, WEDGE_FORWARD_LIP, WEDGE_INVERSE_LIP, WEDGE_INVERSE_LIP_DEEP,
};

/// Origin of the source square; every radial trajectory aims at it.
const O_SRC: Point2 = Point2::ZERO;

/// One affine piece of the extension: a positively oriented source
/// triangle and its image.
#[derive(Debug, Clone)]
pub struct Piece {
    pub src: [Point2; 3],
    pub dst: [Point2; 3],
    pub tag: PieceTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceTag {
    SectorPart2,
    SectorPart3Quad,
    Fan,
    PhiComposed,
}

impl PieceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            PieceTag::SectorPart2 => "sector-part2",
            PieceTag::SectorPart3Quad => "sector-part3quad",
            PieceTag::Fan => "fan",
            PieceTag::PhiComposed => "phi-composed",
        }
    }
}

/// Position of the fan center relative to the sector chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Ball center clears every chord; plain fans.
    A,
    /// Some chord passes close to the center; those sectors get the
    /// wedge correction.
    B,
    /// The center lies well beyond one chord; the fan center moves into
    /// that sector behind its corrected chord.
    C,
}

impl CaseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseKind::A => "A",
            CaseKind::B => "B",
            CaseKind::C => "C",
        }
    }
}

/// All per-sector data the assembly step consumes.
pub struct SectorBundle {
    pub sector: Sector,
    pub paths: SectorPaths,
    pub speeds: SectorSpeeds,
}

/// The assembled extension of the whole square.
#[derive(Debug, Clone)]
pub struct Extension {
    pub case: CaseKind,
    pub o_src: Point2,
    pub o_dst: Point2,
    pub pieces: Vec<Piece>,
    /// Largest radial depth used by any trajectory; at most 4/5.
    pub max_t: f64,
    /// Smallest source-side base angle over all fan edges.
    pub min_fan_angle: f64,
    /// Sectors that received the wedge correction.
    pub phi_sectors: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("vertex {vert}: radial depth {t:.6} exceeds 4/5")]
    TExceedsBound { vert: usize, t: f64 },
    #[error("sector {sector}: path chains of adjacent vertices do not align at vertex {vert}")]
    ChainMisaligned { sector: usize, vert: usize },
    #[error("degenerate piece: {detail}")]
    DegeneratePiece { detail: String },
    #[error("fan base angle {angle:.3e} below 1/(87 L) = {needed:.3e}")]
    FanAngleTooSmall { angle: f64, needed: f64 },
    #[error("wedge map violates its Lipschitz bounds (forward {fwd:.3}, inverse {inv:.3})")]
    PhiLipschitzViolated { fwd: f64, inv: f64 },
    #[error("wedge apex at distance {dist:.6} from the ball center exceeds the radius {r:.6}")]
    ApexOutsideBall { dist: f64, r: f64 },
    #[error("more than one sector places the center beyond its chord")]
    MultipleCaseC,
    #[error("chord depths fit no assembly case: {detail}")]
    CaseUnclassifiable { detail: String },
    #[error("degenerate wedge cell")]
    DegenerateWedge,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Radial source stops and chord landings of one vertex path.
struct VertexChain {
    src_pts: Vec<Point2>,
    dst_pts: Vec<Point2>,
    nodes: Vec<usize>,
}

/// One node of the central fan ring.
#[derive(Clone, Copy)]
struct RingEntry {
    src: Point2,
    dst: Point2,
    /// True for contact points, which are never remapped.
    contact: bool,
}

fn build_chains(bundle: &SectorBundle) -> Result<(Vec<VertexChain>, f64), ExtendError> {
    let tree = &bundle.paths.tree;
    let l = bundle.paths.l;
    let nv = tree.verts.len();
    let mut max_t = 0.0f64;
    let mut chains = Vec::with_capacity(nv);
    for v in 0..nv {
        let src0 = tree.verts[v].src;
        let path = bundle.paths.vertex_path(v);
        let times = bundle.speeds.path_times(&bundle.paths, v);
        let mut src_pts = vec![src0];
        let mut dst_pts = vec![tree.verts[v].img];
        let mut nodes = Vec::with_capacity(path.len());
        for (p, &tau) in path.iter().zip(&times) {
            let t = tau / (RADIAL_DEPTH_DENOM * l);
            if t > RADIAL_DEPTH_MAX + 1e-9 {
                return Err(ExtendError::TExceedsBound { vert: v, t });
            }
            max_t = max_t.max(t);
            src_pts.push(src0.scale(1.0 - t));
            dst_pts.push(p.img);
            nodes.push(p.node);
        }
        chains.push(VertexChain {
            src_pts,
            dst_pts,
            nodes,
        });
    }
    Ok((chains, max_t))
}

/// Normalizes a triangle pair to positive source orientation and checks
/// both areas.
fn emit(
    out: &mut Vec<Piece>,
    mut src: [Point2; 3],
    mut dst: [Point2; 3],
    tag: PieceTag,
) -> Result<(), ExtendError> {
    if geom::tri_area2(src[0], src[1], src[2]) < 0.0 {
        src.swap(1, 2);
        dst.swap(1, 2);
    }
    let sa = geom::tri_area2(src[0], src[1], src[2]);
    let da = geom::tri_area2(dst[0], dst[1], dst[2]);
    if sa <= 0.0 || da <= 0.0 {
        return Err(ExtendError::DegeneratePiece {
            detail: format!(
                "{} triangle with non-positive area (src {:?} {:?} {:?} area2 {sa:.3e}, \
                 dst {:?} {:?} {:?} area2 {da:.3e})",
                tag.as_str(),
                src[0],
                src[1],
                src[2],
                dst[0],
                dst[1],
                dst[2]
            ),
        });
    }
    out.push(Piece { src, dst, tag });
    Ok(())
}

fn sector_strips(
    bundle: &SectorBundle,
    chains: &[VertexChain],
) -> Result<Vec<Piece>, ExtendError> {
    let mut out = Vec::new();
    let sector = bundle.sector.index;
    for w in 0..chains.len() - 1 {
        let (ca, cb) = (&chains[w], &chains[w + 1]);
        let (long, short) = if ca.nodes.len() >= cb.nodes.len() {
            (ca, cb)
        } else {
            (cb, ca)
        };
        let n = long.nodes.len();
        let m = short.nodes.len();
        if long.nodes[n - m..] != short.nodes[..] {
            return Err(ExtendError::ChainMisaligned { sector, vert: w });
        }
        for i in 0..n - m {
            emit(
                &mut out,
                [long.src_pts[i], long.src_pts[i + 1], short.src_pts[0]],
                [long.dst_pts[i], long.dst_pts[i + 1], short.dst_pts[0]],
                PieceTag::SectorPart2,
            )?;
        }
        for i in n - m..n {
            let j = i - (n - m);
            emit(
                &mut out,
                [long.src_pts[i], long.src_pts[i + 1], short.src_pts[j + 1]],
                [long.dst_pts[i], long.dst_pts[i + 1], short.dst_pts[j + 1]],
                PieceTag::SectorPart3Quad,
            )?;
            emit(
                &mut out,
                [short.src_pts[j + 1], short.src_pts[j], long.src_pts[i]],
                [short.dst_pts[j + 1], short.dst_pts[j], long.dst_pts[i]],
                PieceTag::SectorPart3Quad,
            )?;
        }
    }
    Ok(out)
}

/// Ring nodes contributed by one sector: its leading contact and the
/// final stop of every interior vertex, in chord order. The trailing
/// contact belongs to the next sector.
fn sector_ring(bundle: &SectorBundle, chains: &[VertexChain]) -> Vec<RingEntry> {
    let tree = &bundle.paths.tree;
    let nv = tree.verts.len();
    let mut out = Vec::with_capacity(nv - 1);
    out.push(RingEntry {
        src: chains[0].src_pts[0],
        dst: chains[0].dst_pts[0],
        contact: true,
    });
    for v in 1..nv - 1 {
        out.push(RingEntry {
            src: *chains[v].src_pts.last().unwrap(),
            dst: *chains[v].dst_pts.last().unwrap(),
            contact: false,
        });
    }
    out
}

/// Signed distance of `p` from the oriented line through `line`.
fn line_signed(line: &Segment2, p: Point2) -> f64 {
    let d = line.dir().unit().expect("degenerate cut line");
    d.cross(p.sub(line.a))
}

/// Classifies a signed distance against the cut band: 0 inside the band,
/// otherwise the sign. Pieces and ring share this predicate so they
/// always agree on which edges a line crosses.
fn banded_side(d: f64, band: f64) -> i8 {
    if d > band {
        1
    } else if d < -band {
        -1
    } else {
        0
    }
}

/// Deterministic intersection of a paired edge with a line: endpoints are
/// ordered by image coordinates before interpolating, so both pieces
/// sharing the edge compute identical cut points.
fn cut_edge_canonical(
    src_a: Point2,
    src_b: Point2,
    dst_a: Point2,
    dst_b: Point2,
    line: &Segment2,
) -> (Point2, Point2) {
    let ((sa, da), (sb, db)) = if (dst_a.x, dst_a.y) <= (dst_b.x, dst_b.y) {
        ((src_a, dst_a), (src_b, dst_b))
    } else {
        ((src_b, dst_b), (src_a, dst_a))
    };
    let dl = line_signed(line, da);
    let dh = line_signed(line, db);
    let u = dl / (dl - dh);
    (sa.lerp(sb, u), da.lerp(db, u))
}

#[derive(Clone)]
struct PairedPoly {
    src: Vec<Point2>,
    dst: Vec<Point2>,
    tag: PieceTag,
    touched: bool,
}

/// Splits a paired polygon by a line, classifying image vertices with a
/// tolerance band. Band vertices go to both outputs; a side without any
/// strictly interior vertex stays empty, so no sliver thinner than the
/// band is ever produced.
fn split_by_line(
    poly: &PairedPoly,
    line: &Segment2,
    band: f64,
) -> (Option<PairedPoly>, Option<PairedPoly>) {
    let n = poly.dst.len();
    let sides: Vec<i8> = poly
        .dst
        .iter()
        .map(|&p| banded_side(line_signed(line, p), band))
        .collect();
    let has_plus = sides.contains(&1);
    let has_minus = sides.contains(&-1);
    if !has_plus {
        return (None, Some(poly.clone()));
    }
    if !has_minus {
        return (Some(poly.clone()), None);
    }
    let mut plus = PairedPoly {
        src: Vec::new(),
        dst: Vec::new(),
        tag: poly.tag,
        touched: true,
    };
    let mut minus = plus.clone();
    for i in 0..n {
        let j = (i + 1) % n;
        match sides[i] {
            1 => {
                plus.src.push(poly.src[i]);
                plus.dst.push(poly.dst[i]);
            }
            -1 => {
                minus.src.push(poly.src[i]);
                minus.dst.push(poly.dst[i]);
            }
            _ => {
                plus.src.push(poly.src[i]);
                plus.dst.push(poly.dst[i]);
                minus.src.push(poly.src[i]);
                minus.dst.push(poly.dst[i]);
            }
        }
        if sides[i] as i32 * sides[j] as i32 == -1 {
            let (cs, cd) =
                cut_edge_canonical(poly.src[i], poly.src[j], poly.dst[i], poly.dst[j], line);
            plus.src.push(cs);
            plus.dst.push(cd);
            minus.src.push(cs);
            minus.dst.push(cd);
        }
    }
    let keep = |p: PairedPoly| if p.dst.len() >= 3 { Some(p) } else { None };
    (keep(plus), keep(minus))
}

/// The wedge correction for one sector: two affine cells that move the
/// chord midpoint to a clearance point, identity elsewhere.
struct Phi {
    lines: [Segment2; 3],
    cell1_src: [Point2; 3],
    cell1_dst: [Point2; 3],
    cell2_src: [Point2; 3],
    cell2_dst: [Point2; 3],
}

impl Phi {
    fn build(
        a1: Point2,
        a2: Point2,
        m: Point2,
        c: Point2,
        d: Point2,
        inv_bound: f64,
        tol: &Tol,
    ) -> Result<Phi, ExtendError> {
        let phi = Phi {
            lines: [Segment2::new(a1, c), Segment2::new(a2, c), Segment2::new(m, c)],
            cell1_src: [a1, m, c],
            cell1_dst: [a1, d, c],
            cell2_src: [a2, m, c],
            cell2_dst: [a2, d, c],
        };
        let mut fwd = 0.0f64;
        let mut inv = 0.0f64;
        for (s, t) in [
            (&phi.cell1_src, &phi.cell1_dst),
            (&phi.cell2_src, &phi.cell2_dst),
        ] {
            let m = geom::affine_linear_part(s, t).ok_or(ExtendError::DegenerateWedge)?;
            let (smax, smin) = geom::svd2(m);
            fwd = fwd.max(smax);
            inv = inv.max(1.0 / smin);
        }
        if fwd > WEDGE_FORWARD_LIP + tol.eps_len || inv > inv_bound + tol.eps_len {
            return Err(ExtendError::PhiLipschitzViolated { fwd, inv });
        }
        Ok(phi)
    }

    /// Moves a point exactly onto a wedge line when it sits within the
    /// cut band of that line's segment. The two maps meeting along the
    /// line agree on it up to rounding, so every piece and the fan ring
    /// place such a vertex consistently. Points already on a line (the
    /// cell corners in particular) keep their bits.
    fn snap(&self, p: Point2, band: f64) -> Point2 {
        let c = self.lines[0].b;
        for corner in [self.lines[0].a, self.lines[1].a, self.lines[2].a, c] {
            if p.x == corner.x && p.y == corner.y {
                return p;
            }
        }
        if p.dist(c) <= 2.0 * band {
            return c;
        }
        for line in &self.lines {
            let dir = line.dir();
            let len = dir.norm();
            let unit = dir.scale(1.0 / len);
            let signed = unit.cross(p.sub(line.a));
            if signed != 0.0 && signed.abs() <= band {
                let along = p.sub(line.a).dot(unit);
                if (-2.0 * band..=len + 2.0 * band).contains(&along) {
                    let normal = Point2::new(-unit.y, unit.x);
                    return p.sub(normal.scale(signed));
                }
            }
        }
        p
    }

    fn cell_of(&self, p: Point2) -> Option<usize> {
        for (k, tri) in [&self.cell1_src, &self.cell2_src].into_iter().enumerate() {
            let (b0, b1, b2) = geom::barycentric(tri, p);
            if b0 >= -1e-9 && b1 >= -1e-9 && b2 >= -1e-9 {
                return Some(k);
            }
        }
        None
    }

    /// Applies one cell map. Cell corners map to their exact images so
    /// the contact points and the apex keep their bits.
    fn apply_cell(&self, k: usize, p: Point2) -> Point2 {
        let (s, t) = if k == 0 {
            (&self.cell1_src, &self.cell1_dst)
        } else {
            (&self.cell2_src, &self.cell2_dst)
        };
        for i in 0..3 {
            if p.x == s[i].x && p.y == s[i].y {
                return t[i];
            }
        }
        geom::affine_apply(s, t, p)
    }

}

/// Inserts a ring node wherever a ring edge strictly straddles a wedge
/// line. The side test and the interpolation match the piece cuts, so
/// the new node carries the same bits as the fragment vertices along the
/// same edge.
fn ring_insert_cuts(rings: &mut [Vec<RingEntry>], line: &Segment2, band: f64) {
    let k = rings.len();
    for s in 0..k {
        let mut i = 0;
        while i < rings[s].len() {
            let a = rings[s][i];
            let b = if i + 1 < rings[s].len() {
                rings[s][i + 1]
            } else {
                rings[(s + 1) % k][0]
            };
            let sa = banded_side(line_signed(line, a.dst), band);
            let sb = banded_side(line_signed(line, b.dst), band);
            if sa as i32 * sb as i32 == -1 {
                let (cs, cd) = cut_edge_canonical(a.src, b.src, a.dst, b.dst, line);
                rings[s].insert(
                    i + 1,
                    RingEntry {
                        src: cs,
                        dst: cd,
                        contact: false,
                    },
                );
                i += 1;
            }
            i += 1;
        }
    }
}

/// Per-sector signed chord depth of the ball center: positive when the
/// center lies outside the sector (behind its chord).
fn chord_depths(ball: &CentralBall, bundles: &[SectorBundle]) -> Vec<f64> {
    bundles
        .iter()
        .map(|b| {
            let a = b.sector.chord.a;
            let n = b.sector.inward_normal();
            -(ball.center.sub(a)).dot(n)
        })
        .collect()
}

/// Assembles the full extension from the per-sector path fields.
pub fn assemble(
    ball: &CentralBall,
    bundles: &[SectorBundle],
    tol: &Tol,
) -> Result<Extension, ExtendError> {
    let l = bundles[0].paths.l;
    let r = ball.r;
    let k = bundles.len();

    let chain_results = par_map_range(k, |i| build_chains(&bundles[i]));
    let mut chains_by_sector = Vec::with_capacity(k);
    let mut max_t = 0.0f64;
    for res in chain_results {
        let (chains, mt) = res?;
        max_t = max_t.max(mt);
        chains_by_sector.push(chains);
    }

    let strip_results = par_map_range(k, |i| sector_strips(&bundles[i], &chains_by_sector[i]));
    let mut pieces: Vec<Piece> = Vec::new();
    for res in strip_results {
        pieces.extend(res?);
    }

    let mut rings: Vec<Vec<RingEntry>> = (0..k)
        .map(|i| sector_ring(&bundles[i], &chains_by_sector[i]))
        .collect();

    // Source-side fan base angles are independent of the case, so they
    // are checked on the raw ring over every adjacent vertex pair.
    let need_angle = 1.0 / (FAN_APEX_ANGLE_DENOM * l);
    let mut min_fan_angle = f64::INFINITY;
    let flat: Vec<RingEntry> = rings.iter().flatten().copied().collect();
    for i in 0..flat.len() {
        let a = flat[i];
        let b = flat[(i + 1) % flat.len()];
        for (p, q) in [(a.src, b.src), (b.src, a.src)] {
            let ang = geom::angle_at(q, p, O_SRC, tol)?;
            min_fan_angle = min_fan_angle.min(ang);
            if ang < need_angle - tol.eps_len {
                return Err(ExtendError::FanAngleTooSmall {
                    angle: ang,
                    needed: need_angle,
                });
            }
        }
    }

    let depths = chord_depths(ball, bundles);
    let deep: Vec<usize> = (0..k).filter(|&i| depths[i] < -r / CASE_C_DEPTH_DIV).collect();
    let shallow: Vec<usize> = (0..k).filter(|&i| depths[i] < r / CASE_A_DEPTH_DIV).collect();

    let scale = {
        let mut s = 1.0f64;
        for b in bundles {
            for v in &b.paths.tree.verts {
                s = s.max(v.img.x.abs()).max(v.img.y.abs());
            }
        }
        s
    };
    let band = tol.eps_geom * scale;

    let (case, o_dst, phi_sectors) = if deep.is_empty() && shallow.is_empty() {
        (CaseKind::A, ball.center, Vec::new())
    } else if deep.is_empty() {
        (CaseKind::B, ball.center, shallow.clone())
    } else {
        if deep.len() > 1 {
            return Err(ExtendError::MultipleCaseC);
        }
        let others_ok = (0..k)
            .filter(|i| *i != deep[0])
            .all(|i| depths[i] >= r / CASE_A_DEPTH_DIV);
        if !others_ok {
            return Err(ExtendError::CaseUnclassifiable {
                detail: format!("depths {depths:?} with radius {r:.6}"),
            });
        }
        (CaseKind::C, Point2::ZERO, deep.clone())
    };

    let mut o_dst = o_dst;
    let mut phis: Vec<Phi> = Vec::with_capacity(phi_sectors.len());
    for &si in &phi_sectors {
        let sector = &bundles[si].sector;
        let a1 = sector.chord.a;
        let a2 = sector.chord.b;
        let m = sector.chord.midpoint();
        let n = sector.inward_normal();
        let (c, d, inv_bound) = match case {
            CaseKind::B => (
                ball.center.add(n.scale(r)),
                ball.center.add(n.scale(r / 4.0)),
                WEDGE_INVERSE_LIP,
            ),
            CaseKind::C => {
                let c = m.add(n.scale(3f64.sqrt() / 2.0 * sector.chord.len()));
                let dist = ball.center.dist(c);
                if dist > r + tol.eps_len {
                    return Err(ExtendError::ApexOutsideBall { dist, r });
                }
                o_dst = c.add(m.sub(c).scale(2.0 / 3.0));
                (c, c.add(m.sub(c).scale(1.0 / 3.0)), WEDGE_INVERSE_LIP_DEEP)
            }
            CaseKind::A => unreachable!(),
        };
        phis.push(Phi::build(a1, a2, m, c, d, inv_bound, tol)?);
    }

    if !phis.is_empty() {
        // Every wedge line cuts both the pieces and the ring before any
        // cell map runs. All crossings are therefore interpolated from
        // the raw assembled coordinates, and every copy of a shared edge
        // derives bitwise identical cut vertices.
        let mut frags: Vec<PairedPoly> = pieces
            .drain(..)
            .map(|p| PairedPoly {
                src: p.src.to_vec(),
                dst: p.dst.to_vec(),
                tag: p.tag,
                touched: false,
            })
            .collect();
        for phi in &phis {
            for line in &phi.lines {
                let mut next = Vec::with_capacity(frags.len());
                for f in frags {
                    let (p, m) = split_by_line(&f, line, band);
                    next.extend(p);
                    next.extend(m);
                }
                frags = next;
                ring_insert_cuts(&mut rings, line, band);
            }
        }
        // Image vertices within the cut band move exactly onto their
        // line, so the identity side and the cell side of each line
        // place them equally up to rounding.
        let snap_all = |p: Point2| phis.iter().fold(p, |q, phi| phi.snap(q, band));
        for f in &mut frags {
            for v in &mut f.dst {
                *v = snap_all(*v);
            }
        }
        for ring in rings.iter_mut() {
            for e in ring.iter_mut() {
                e.dst = snap_all(e.dst);
            }
        }
        let cell_hit = |p: Point2| {
            phis.iter()
                .find_map(|phi| phi.cell_of(p).map(|cell| (phi, cell)))
        };
        for f in frags {
            let centroid = f
                .dst
                .iter()
                .fold(Point2::ZERO, |acc, &p| acc.add(p))
                .scale(1.0 / f.dst.len() as f64);
            match cell_hit(centroid) {
                None if !f.touched => pieces.push(Piece {
                    src: [f.src[0], f.src[1], f.src[2]],
                    dst: [f.dst[0], f.dst[1], f.dst[2]],
                    tag: f.tag,
                }),
                None => {
                    for k in 1..f.dst.len() - 1 {
                        emit(
                            &mut pieces,
                            [f.src[0], f.src[k], f.src[k + 1]],
                            [f.dst[0], f.dst[k], f.dst[k + 1]],
                            f.tag,
                        )?;
                    }
                }
                Some((phi, cell)) => {
                    let dst: Vec<Point2> =
                        f.dst.iter().map(|&p| phi.apply_cell(cell, p)).collect();
                    for k in 1..dst.len() - 1 {
                        emit(
                            &mut pieces,
                            [f.src[0], f.src[k], f.src[k + 1]],
                            [dst[0], dst[k], dst[k + 1]],
                            PieceTag::PhiComposed,
                        )?;
                    }
                }
            }
        }
        for ring in rings.iter_mut() {
            for e in ring.iter_mut() {
                if e.contact {
                    continue;
                }
                if let Some((phi, cell)) = cell_hit(e.dst) {
                    e.dst = phi.apply_cell(cell, e.dst);
                }
            }
        }
    }

    let ring: Vec<RingEntry> = rings.into_iter().flatten().collect();
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        emit(
            &mut pieces,
            [a.src, b.src, O_SRC],
            [a.dst, b.dst, o_dst],
            PieceTag::Fan,
        )?;
    }

    Ok(Extension {
        case,
        o_src: O_SRC,
        o_dst,
        pieces,
        max_t,
        min_fan_angle,
        phi_sectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{primary_sectors, select_central_ball};
    use crate::boundary::{load_and_validate, point_on_square, RawVertex};
    use crate::partition::build_sector_tree;
    use crate::paths::build_paths;
    use crate::speed::assign_speeds;

    fn identity_bundles() -> (CentralBall, Vec<SectorBundle>) {
        let raw: Vec<RawVertex> = (0..8)
            .map(|i| {
                let t = i as f64 * 0.5;
                RawVertex {
                    t,
                    img: point_on_square(t),
                }
            })
            .collect();
        let tol = Tol::default();
        let map = load_and_validate(&raw, None, false, &tol).unwrap();
        let ball = select_central_ball(&map, &tol).unwrap();
        let (map2, sectors) = primary_sectors(&map, &ball, &tol).unwrap();
        let poly = map2.image_polygon();
        let l = map2.l;
        let bundles = sectors
            .into_iter()
            .map(|sector| {
                let tree = build_sector_tree(&sector, &poly, &tol).unwrap();
                let paths = build_paths(tree, l, &tol).unwrap();
                let speeds = assign_speeds(&paths);
                SectorBundle {
                    sector,
                    paths,
                    speeds,
                }
            })
            .collect();
        (ball, bundles)
    }

    #[test]
    fn identity_assembles_as_case_a() {
        let (ball, bundles) = identity_bundles();
        let ext = assemble(&ball, &bundles, &Tol::default()).unwrap();
        assert_eq!(ext.case, CaseKind::A);
        assert!(ext.phi_sectors.is_empty());
        assert!(ext.o_dst.norm() < 1e-12);
        // 4 sectors, each with one interior vertex: 2 strip triangles
        // per sector and an 8-edge fan.
        assert_eq!(ext.pieces.len(), 16);
        assert!(ext.max_t <= 0.8);
        let src_area: f64 = ext
            .pieces
            .iter()
            .map(|p| 0.5 * geom::tri_area2(p.src[0], p.src[1], p.src[2]))
            .sum();
        let dst_area: f64 = ext
            .pieces
            .iter()
            .map(|p| 0.5 * geom::tri_area2(p.dst[0], p.dst[1], p.dst[2]))
            .sum();
        assert!((src_area - 1.0).abs() < 1e-12);
        assert!((dst_area - 1.0).abs() < 1e-12);
    }
}
