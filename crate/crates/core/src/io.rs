//! JSON formats for boundary-map input and extension-mesh output.
//!
//! The input format carries the boundary homeomorphism as a list of
//! `(t, image)` vertices with an optional declared Lipschitz constant and
//! options. The output format carries the finished triangulation together
//! with the chosen ball, the case, and a verification report. Both sides
//! round-trip through serde, and serialization order is fixed by struct
//! declaration order, so identical runs produce identical bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{CentralBall, Contact};
use crate::boundary::RawVertex;
use crate::extend::{CaseKind, Extension, Piece, PieceTag};
use crate::geom::Point2;
use crate::pipeline::{ExtensionResult, InvariantSummary};
use crate::tolerances::{
    Tol, BALL_RADIUS_LOWER_COEFF, BALL_RADIUS_LOWER_SAFE_COEFF, BALL_RADIUS_UPPER_COEFF,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown piece tag {0:?}")]
    UnknownTag(String),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
}

/// One input vertex: boundary parameter and image point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputVertex {
    pub t: f64,
    pub img: [f64; 2],
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct InputOptions {
    #[serde(default)]
    pub auto_orient: bool,
}

/// The boundary-map input document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputMap {
    pub vertices: Vec<InputVertex>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default)]
    pub options: InputOptions,
}

impl InputMap {
    pub fn from_raw(raw: &[RawVertex], l: Option<f64>, auto_orient: bool) -> InputMap {
        InputMap {
            vertices: raw
                .iter()
                .map(|v| InputVertex {
                    t: v.t,
                    img: [v.img.x, v.img.y],
                })
                .collect(),
            l,
            options: InputOptions { auto_orient },
        }
    }

    pub fn to_raw(&self) -> Vec<RawVertex> {
        self.vertices
            .iter()
            .map(|v| RawVertex {
                t: v.t,
                img: Point2::new(v.img[0], v.img[1]),
            })
            .collect()
    }
}

pub fn parse_input(json: &str) -> Result<InputMap, IoError> {
    Ok(serde_json::from_str(json)?)
}

pub fn input_to_json(input: &InputMap) -> String {
    serde_json::to_string_pretty(input).expect("input serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactOut {
    pub t: f64,
    pub point: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallOut {
    pub center: [f64; 2],
    pub r: f64,
    pub contacts: Vec<ContactOut>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceOut {
    pub src: [[f64; 2]; 3],
    pub dst: [[f64; 2]; 3],
    pub tag: String,
}

/// Ball radius against its two-sided bound in the recorded constant. The
/// lower bound is reported with both the contract coefficient 2/3 and the
/// attainable chord-based coefficient sqrt(2)/3; the contract one can
/// honestly fail (the identity map has r = 1/2 < 2/3).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusCheck {
    pub r: f64,
    pub lower: f64,
    pub lower_met: bool,
    pub lower_safe: f64,
    pub lower_safe_met: bool,
    pub upper: f64,
    pub upper_met: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistortionOut {
    pub forward: f64,
    pub inverse_local: f64,
    pub inverse_sampled: f64,
    pub global: f64,
    pub bound: f64,
    pub sector_piece_max: f64,
    pub sample_pairs: usize,
    pub sample_seed: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshOut {
    pub piece_count: usize,
    pub src_area_err: f64,
    pub dst_area_err: f64,
    pub membership_checked: usize,
    pub interior_edges: usize,
    pub boundary_edges: usize,
    pub max_edge_midpoint_err: f64,
    pub max_boundary_err: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub l: f64,
    pub vertex_count: usize,
    pub sector_count: usize,
    pub max_t: f64,
    pub min_fan_angle: f64,
    pub phi_sectors: Vec<usize>,
    pub ball_radius: RadiusCheck,
    pub distortion: DistortionOut,
    pub mesh: MeshOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantSummary>,
}

/// The extension-mesh output document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputMesh {
    pub case: String,
    #[serde(rename = "O_src")]
    pub o_src: [f64; 2],
    #[serde(rename = "O_dst")]
    pub o_dst: [f64; 2],
    pub ball: BallOut,
    pub pieces: Vec<PieceOut>,
    pub report: Report,
}

fn pt(p: Point2) -> [f64; 2] {
    [p.x, p.y]
}

fn tri(t: &[Point2; 3]) -> [[f64; 2]; 3] {
    [pt(t[0]), pt(t[1]), pt(t[2])]
}

pub fn build_output(res: &ExtensionResult, tol: &Tol) -> OutputMesh {
    let l = res.map.l;
    let r = res.ball.r;
    let lower = BALL_RADIUS_LOWER_COEFF / l;
    let lower_safe = BALL_RADIUS_LOWER_SAFE_COEFF / l;
    let upper = BALL_RADIUS_UPPER_COEFF * l;
    let d = &res.distortion;
    OutputMesh {
        case: res.extension.case.as_str().to_string(),
        o_src: pt(res.extension.o_src),
        o_dst: pt(res.extension.o_dst),
        ball: BallOut {
            center: pt(res.ball.center),
            r,
            contacts: res
                .ball
                .contacts
                .iter()
                .map(|c| ContactOut {
                    t: c.t,
                    point: pt(c.point),
                })
                .collect(),
        },
        pieces: res
            .extension
            .pieces
            .iter()
            .map(|p| PieceOut {
                src: tri(&p.src),
                dst: tri(&p.dst),
                tag: p.tag.as_str().to_string(),
            })
            .collect(),
        report: Report {
            l,
            vertex_count: res.map.vertex_count(),
            sector_count: res.sector_count,
            max_t: res.extension.max_t,
            min_fan_angle: res.extension.min_fan_angle,
            phi_sectors: res.extension.phi_sectors.clone(),
            ball_radius: RadiusCheck {
                r,
                lower,
                lower_met: r >= lower - tol.eps_len,
                lower_safe,
                lower_safe_met: r >= lower_safe - tol.eps_len,
                upper,
                upper_met: r <= upper + tol.eps_len,
            },
            distortion: DistortionOut {
                forward: d.forward,
                inverse_local: d.inverse_local,
                inverse_sampled: d.inverse_sampled,
                global: d.global,
                bound: d.bound,
                sector_piece_max: d.sector_piece_max,
                sample_pairs: d.sample_pairs,
                sample_seed: d.sample_seed,
                pass: d.global <= d.bound + tol.eps_len,
            },
            mesh: MeshOut {
                piece_count: res.mesh.piece_count,
                src_area_err: res.mesh.src_area_err,
                dst_area_err: res.mesh.dst_area_err,
                membership_checked: res.mesh.membership_checked,
                interior_edges: res.mesh.interior_edges,
                boundary_edges: res.mesh.boundary_edges,
                max_edge_midpoint_err: res.mesh.max_edge_midpoint_err,
                max_boundary_err: res.mesh.max_boundary_err,
            },
            invariants: res.invariants.clone(),
        },
    }
}

pub fn output_to_json(out: &OutputMesh) -> String {
    serde_json::to_string_pretty(out).expect("output serializes")
}

pub fn parse_output(json: &str) -> Result<OutputMesh, IoError> {
    Ok(serde_json::from_str(json)?)
}

fn tag_from_str(s: &str) -> Result<PieceTag, IoError> {
    Ok(match s {
        "sector-part2" => PieceTag::SectorPart2,
        "sector-part3quad" => PieceTag::SectorPart3Quad,
        "fan" => PieceTag::Fan,
        "phi-composed" => PieceTag::PhiComposed,
        _ => return Err(IoError::UnknownTag(s.to_string())),
    })
}

fn case_from_str(s: &str) -> Result<CaseKind, IoError> {
    Ok(match s {
        "A" => CaseKind::A,
        "B" => CaseKind::B,
        "C" => CaseKind::C,
        _ => return Err(IoError::UnknownCase(s.to_string())),
    })
}

fn point(a: [f64; 2]) -> Point2 {
    Point2::new(a[0], a[1])
}

impl OutputMesh {
    /// Rebuilds the in-memory extension and ball from a saved document,
    /// for re-validation against an input map.
    pub fn to_extension(&self) -> Result<(Extension, CentralBall), IoError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(Piece {
                    src: [point(p.src[0]), point(p.src[1]), point(p.src[2])],
                    dst: [point(p.dst[0]), point(p.dst[1]), point(p.dst[2])],
                    tag: tag_from_str(&p.tag)?,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let ext = Extension {
            case: case_from_str(&self.case)?,
            o_src: point(self.o_src),
            o_dst: point(self.o_dst),
            pieces,
            max_t: self.report.max_t,
            min_fan_angle: self.report.min_fan_angle,
            phi_sectors: self.report.phi_sectors.clone(),
        };
        let ball = CentralBall {
            center: point(self.ball.center),
            r: self.ball.r,
            contacts: self
                .ball
                .contacts
                .iter()
                .map(|c| Contact {
                    t: c.t,
                    point: point(c.point),
                })
                .collect(),
        };
        Ok((ext, ball))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::point_on_square;
    use crate::pipeline::{run, PipelineOptions};

    fn identity_raw() -> Vec<RawVertex> {
        (0..8)
            .map(|i| {
                let t = i as f64 * 0.5;
                RawVertex {
                    t,
                    img: point_on_square(t),
                }
            })
            .collect()
    }

    #[test]
    fn input_roundtrip_preserves_vertices() {
        let raw = identity_raw();
        let doc = InputMap::from_raw(&raw, Some(1.0), false);
        let json = input_to_json(&doc);
        let back = parse_input(&json).unwrap();
        assert_eq!(back.vertices.len(), raw.len());
        for (a, b) in back.to_raw().iter().zip(&raw) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.img.x, b.img.x);
            assert_eq!(a.img.y, b.img.y);
        }
        assert_eq!(back.l, Some(1.0));
    }

    #[test]
    fn output_roundtrip_preserves_mesh_bits() {
        let tol = Tol::default();
        let opts = PipelineOptions {
            sample_pairs: 500,
            ..Default::default()
        };
        let res = run(&identity_raw(), None, false, &tol, &opts).unwrap();
        let doc = build_output(&res, &tol);
        let json = output_to_json(&doc);
        let back = parse_output(&json).unwrap();
        let (ext, ball) = back.to_extension().unwrap();
        assert_eq!(ext.pieces.len(), res.extension.pieces.len());
        for (a, b) in ext.pieces.iter().zip(&res.extension.pieces) {
            for k in 0..3 {
                assert_eq!(a.src[k].x.to_bits(), b.src[k].x.to_bits());
                assert_eq!(a.dst[k].y.to_bits(), b.dst[k].y.to_bits());
            }
            assert_eq!(a.tag, b.tag);
        }
        assert_eq!(ball.contacts.len(), res.ball.contacts.len());
        assert!(doc.report.distortion.pass);
        // The identity ball has radius 1/2, which honestly misses the
        // contract lower bound 2/3 but meets the chord-based one.
        assert!(!doc.report.ball_radius.lower_met);
        assert!(doc.report.ball_radius.lower_safe_met);
    }

    #[test]
    fn serialization_is_deterministic() {
        let tol = Tol::default();
        let opts = PipelineOptions {
            sample_pairs: 200,
            ..Default::default()
        };
        let a = {
            let res = run(&identity_raw(), None, false, &tol, &opts).unwrap();
            output_to_json(&build_output(&res, &tol))
        };
        let b = {
            let res = run(&identity_raw(), None, false, &tol, &opts).unwrap();
            output_to_json(&build_output(&res, &tol))
        };
        assert_eq!(a, b);
    }
}
