//! Time parametrization of the good paths.
//!
//! Each vertex path gets a nondecreasing time value at every chord
//! landing, zero at the boundary vertex itself. A bare triangle is
//! crossed at unit speed; all other crossings advance time by the
//! segment length over `60 L`, then get raised just enough to restore
//! the per-chord modulus bound `|tau_p - tau_q| <= 170 L arc(p, q)`
//! against the pre-clamp values of the same chord. The verified outcome:
//! every path segment has time slope within `[1/(60 L), 1]`, and every
//! chord (with its zero-time endpoints) satisfies the modulus bound.

use thiserror::Error;

use crate::paths::SectorPaths;
use crate::tolerances::{Tol, SPEED_MODULUS_COEFF, SPEED_SLOPE_DENOM};

/// Time values aligned with the chord placements: `tau[node][k]`
/// corresponds to `placements[node].positions[k]`.
#[derive(Debug, Clone)]
pub struct SectorSpeeds {
    pub tau: Vec<Vec<f64>>,
    /// Number of values raised by the modulus clamp.
    pub clamped_count: usize,
}

#[derive(Debug, Error)]
pub enum SpeedError {
    #[error("vertex {vert}: time slope {slope:.6} exceeds one")]
    SpeedExceedsOne { vert: usize, slope: f64 },
    #[error("vertex {vert}: time slope {slope:.6} below 1/(60 L) = {floor:.6}")]
    SpeedBelowFloor { vert: usize, slope: f64, floor: f64 },
    #[error("node {node}: time gap of vertices {p} and {q} exceeds the modulus bound")]
    ModulusViolated { node: usize, p: usize, q: usize },
    #[error("vertex {vert}: time decreases along its path")]
    TimeDecreases { vert: usize },
}

/// Aggregate margins of a verified time assignment.
#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub max_slope: f64,
    pub min_slope: f64,
    pub max_modulus_ratio: f64,
    pub clamped_count: usize,
}

struct Assigner<'a> {
    paths: &'a SectorPaths,
    tau: Vec<Vec<f64>>,
    clamped: usize,
}

impl<'a> Assigner<'a> {
    /// Time of vertex `v` on the chord of `node`, already assigned
    /// because children are processed first.
    fn tau_of(&self, node: usize, v: usize) -> f64 {
        let pos = &self.paths.placements[node].positions;
        let k = pos
            .binary_search_by_key(&v, |&(u, _)| u)
            .expect("vertex placed on chord");
        self.tau[node][k]
    }

    fn process(&mut self, node: usize) {
        let nd = self.paths.tree.nodes[node].clone();
        if let Some(c) = nd.low_child {
            self.process(c);
        }
        if let Some(c) = nd.high_child {
            self.process(c);
        }
        let l = self.paths.l;
        let positions = self.paths.placements[node].positions.clone();
        let unit_speed = self.paths.tree.is_leaf_triangle(node);
        let mut tentative = Vec::with_capacity(positions.len());
        for &(v, s) in &positions {
            let cur = self.paths.chord_point(node, s);
            let (prev_tau, prev_pt) = if v == nd.apex {
                (0.0, self.paths.tree.verts[v].img)
            } else {
                let child = if v < nd.apex { nd.low_child } else { nd.high_child };
                match child {
                    Some(c) => {
                        let s_child = self
                            .paths
                            .position_of(c, v)
                            .expect("vertex inside child chord");
                        (self.tau_of(c, v), self.paths.chord_point(c, s_child))
                    }
                    None => (0.0, self.paths.tree.verts[v].img),
                }
            };
            let len = cur.dist(prev_pt);
            let rate = if unit_speed {
                1.0
            } else {
                1.0 / (SPEED_SLOPE_DENOM * l)
            };
            tentative.push(prev_tau + len * rate);
        }
        // Raise each value to the largest demand made by the other
        // pre-clamp values on this chord under the modulus bound. The
        // chord endpoints carry time zero and never demand a raise.
        let mut fin = tentative.clone();
        for i in 0..positions.len() {
            let (vi, _) = positions[i];
            for j in 0..positions.len() {
                if i == j {
                    continue;
                }
                let (vj, _) = positions[j];
                let demand = tentative[j]
                    - SPEED_MODULUS_COEFF * l * self.paths.tree.img_arc(vi, vj);
                if demand > fin[i] {
                    fin[i] = demand;
                    self.clamped += 1;
                }
            }
        }
        self.tau[node] = fin;
    }
}

/// Assigns times bottom-up over the triangle tree.
pub fn assign_speeds(paths: &SectorPaths) -> SectorSpeeds {
    let mut a = Assigner {
        paths,
        tau: vec![Vec::new(); paths.tree.nodes.len()],
        clamped: 0,
    };
    a.process(paths.tree.root);
    SectorSpeeds {
        tau: a.tau,
        clamped_count: a.clamped,
    }
}

impl SectorSpeeds {
    /// Time of vertex `v` on the chord of `node`.
    pub fn tau_of(&self, paths: &SectorPaths, node: usize, v: usize) -> f64 {
        let pos = &paths.placements[node].positions;
        let k = pos
            .binary_search_by_key(&v, |&(u, _)| u)
            .expect("vertex placed on chord");
        self.tau[node][k]
    }

    /// Times along the path of vertex `v`, aligned with
    /// [`SectorPaths::vertex_path`].
    pub fn path_times(&self, paths: &SectorPaths, v: usize) -> Vec<f64> {
        paths
            .tree
            .natural_sequence(v)
            .into_iter()
            .map(|node| self.tau_of(paths, node, v))
            .collect()
    }
}

/// Verifies both speed conditions: per-segment slope within
/// `[1/(60 L), 1]` and the per-chord modulus bound including the
/// zero-time chord endpoints.
pub fn verify_speeds(
    paths: &SectorPaths,
    speeds: &SectorSpeeds,
    tol: &Tol,
) -> Result<SpeedReport, SpeedError> {
    let tree = &paths.tree;
    let l = paths.l;
    let floor = 1.0 / (SPEED_SLOPE_DENOM * l);
    let mut report = SpeedReport {
        max_slope: 0.0,
        min_slope: f64::INFINITY,
        max_modulus_ratio: 0.0,
        clamped_count: speeds.clamped_count,
    };

    for vert in 1..tree.verts.len() - 1 {
        let pts = paths.vertex_path(vert);
        let times = speeds.path_times(paths, vert);
        let mut prev_pt = tree.verts[vert].img;
        let mut prev_tau = 0.0;
        for (p, &t) in pts.iter().zip(&times) {
            if t < prev_tau - tol.eps_len {
                return Err(SpeedError::TimeDecreases { vert });
            }
            let len = p.img.dist(prev_pt);
            if len > tol.eps_len {
                let slope = (t - prev_tau) / len;
                report.max_slope = report.max_slope.max(slope);
                report.min_slope = report.min_slope.min(slope);
                if slope > 1.0 + tol.eps_len {
                    return Err(SpeedError::SpeedExceedsOne { vert, slope });
                }
                if slope < floor - tol.eps_len {
                    return Err(SpeedError::SpeedBelowFloor { vert, slope, floor });
                }
            }
            prev_pt = p.img;
            prev_tau = t;
        }
    }

    for (ni, nd) in tree.nodes.iter().enumerate() {
        let positions = &paths.placements[ni].positions;
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(positions.len() + 2);
        entries.push((nd.lo, 0.0));
        for (k, &(v, _)) in positions.iter().enumerate() {
            entries.push((v, speeds.tau[ni][k]));
        }
        entries.push((nd.hi, 0.0));
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                let (pv, pt) = entries[i];
                let (qv, qt) = entries[j];
                let bound = SPEED_MODULUS_COEFF * l * tree.img_arc(pv, qv);
                let gap = (pt - qt).abs();
                if gap > bound + tol.eps_len {
                    return Err(SpeedError::ModulusViolated { node: ni, p: pv, q: qv });
                }
                if bound > 0.0 {
                    report.max_modulus_ratio = report.max_modulus_ratio.max(gap / bound);
                }
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Sector, SectorVertex};
    use crate::geom::{Point2, Segment2};
    use crate::partition::build_sector_tree;
    use crate::paths::build_paths;

    fn sv(t: f64, x: f64, y: f64, s: f64) -> SectorVertex {
        SectorVertex {
            t,
            src: crate::boundary::point_on_square(t.rem_euclid(crate::boundary::PERIMETER)),
            img: Point2::new(x, y),
            s_img: s,
        }
    }

    #[test]
    fn leaf_triangle_runs_at_unit_speed() {
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
        let paths = build_paths(tree, 1.5, &Tol::default()).unwrap();
        let speeds = assign_speeds(&paths);
        // Apex travels from (1, 1) to the chord midpoint (0, 0).
        let expected = 2f64.sqrt();
        assert!((speeds.tau[paths.tree.root][0] - expected).abs() < 1e-12);
        let report = verify_speeds(&paths, &speeds, &Tol::default()).unwrap();
        assert!((report.max_slope - 1.0).abs() < 1e-12);
    }
}
