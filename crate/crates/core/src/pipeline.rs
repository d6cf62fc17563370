//! End-to-end construction: validate the boundary map, refine it, pick
//! the central ball, build the per-sector fields, assemble the pieces,
//! and certify every quantitative invariant along the way.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{primary_sectors, select_central_ball, BallError, CentralBall};
use crate::boundary::{load_and_validate, BoundaryError, BoundaryMap, RawVertex};
use crate::distortion::{
    global_distortion, mesh_validity, DistortionError, DistortionReport, MeshError, MeshReport,
};
use crate::extend::{assemble, CaseKind, ExtendError, Extension, SectorBundle};
use crate::par::par_map;
use crate::partition::{build_sector_tree, PartitionError};
use crate::paths::{build_paths, verify_path_invariants, PathError, PathReport};
use crate::speed::{assign_speeds, verify_speeds, SpeedError, SpeedReport};
use crate::tolerances::Tol;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("boundary map: {0}")]
    Boundary(#[from] BoundaryError),
    #[error("central ball: {0}")]
    Ball(#[from] BallError),
    #[error("sector {sector}: partition: {source}")]
    Partition {
        sector: usize,
        source: PartitionError,
    },
    #[error("sector {sector}: paths: {source}")]
    Path { sector: usize, source: PathError },
    #[error("sector {sector}: speeds: {source}")]
    Speed { sector: usize, source: SpeedError },
    #[error("extension: {0}")]
    Extend(#[from] ExtendError),
    #[error("mesh validity: {0}")]
    Mesh(#[from] MeshError),
    #[error("distortion: {0}")]
    Distortion(#[from] DistortionError),
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Random point pairs probed for the inverse Lipschitz constant.
    pub sample_pairs: usize,
    /// Stream seed for the pair sampler; fixed default so reports are
    /// reproducible, recorded in the output.
    pub sample_seed: u64,
    /// Skip the pairwise path and speed verifiers (they are quadratic in
    /// the sector vertex count); construction checks still run.
    pub skip_invariant_checks: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            sample_pairs: 100_000,
            sample_seed: crate::distortion::SAMPLE_SEED,
            skip_invariant_checks: false,
        }
    }
}

/// Aggregated invariant extrema over all sectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub min_start_sin: f64,
    pub min_exit_angle: f64,
    pub max_len_over_arc: f64,
    pub min_pair_slack: f64,
    pub max_speed: f64,
    pub min_speed: f64,
    pub max_modulus_ratio: f64,
    pub clamped_speed_values: usize,
}

/// Everything the run produced, ready for serialization or rendering.
pub struct ExtensionResult {
    /// The refined boundary map the extension interpolates.
    pub map: BoundaryMap,
    pub ball: CentralBall,
    pub extension: Extension,
    pub distortion: DistortionReport,
    pub mesh: MeshReport,
    pub invariants: Option<InvariantSummary>,
    pub sector_count: usize,
}

impl ExtensionResult {
    pub fn case(&self) -> CaseKind {
        self.extension.case
    }
}

fn summarize(paths: &[PathReport], speeds: &[SpeedReport]) -> InvariantSummary {
    let mut s = InvariantSummary {
        min_start_sin: f64::INFINITY,
        min_exit_angle: f64::INFINITY,
        max_len_over_arc: 0.0,
        min_pair_slack: f64::INFINITY,
        max_speed: 0.0,
        min_speed: f64::INFINITY,
        max_modulus_ratio: 0.0,
        clamped_speed_values: 0,
    };
    for p in paths {
        s.min_start_sin = s.min_start_sin.min(p.min_start_sin);
        s.min_exit_angle = s.min_exit_angle.min(p.min_exit_angle);
        s.max_len_over_arc = s.max_len_over_arc.max(p.max_len_over_arc);
        s.min_pair_slack = s.min_pair_slack.min(p.min_pair_slack);
    }
    for r in speeds {
        s.max_speed = s.max_speed.max(r.max_slope);
        s.min_speed = s.min_speed.min(r.min_slope);
        s.max_modulus_ratio = s.max_modulus_ratio.max(r.max_modulus_ratio);
        s.clamped_speed_values += r.clamped_count;
    }
    s
}

/// Runs the full construction on a validated boundary map.
pub fn extend_map(
    map: BoundaryMap,
    tol: &Tol,
    opts: &PipelineOptions,
) -> Result<ExtensionResult, PipelineError> {
    let map = map.refine_for_angle();
    let ball = select_central_ball(&map, tol)?;
    let (map, sectors) = primary_sectors(&map, &ball, tol)?;
    let poly = map.image_polygon();
    let l = map.l;
    let sector_count = sectors.len();

    let built = par_map(&sectors, |sector| {
        let si = sector.index;
        let tree = crate::par::with_deep_stack(|| build_sector_tree(sector, &poly, tol))
            .map_err(|source| PipelineError::Partition { sector: si, source })?;
        tree.verify(tol)
            .map_err(|source| PipelineError::Partition { sector: si, source })?;
        let paths = crate::par::with_deep_stack(|| build_paths(tree, l, tol))
            .map_err(|source| PipelineError::Path { sector: si, source })?;
        let speeds = crate::par::with_deep_stack(|| assign_speeds(&paths));
        let reports = if opts.skip_invariant_checks {
            None
        } else {
            let pr = verify_path_invariants(&paths, tol)
                .map_err(|source| PipelineError::Path { sector: si, source })?;
            let sr = verify_speeds(&paths, &speeds, tol)
                .map_err(|source| PipelineError::Speed { sector: si, source })?;
            Some((pr, sr))
        };
        Ok::<_, PipelineError>((
            SectorBundle {
                sector: sector.clone(),
                paths,
                speeds,
            },
            reports,
        ))
    });

    let mut bundles = Vec::with_capacity(sector_count);
    let mut path_reports = Vec::new();
    let mut speed_reports = Vec::new();
    for res in built {
        let (bundle, reports) = res?;
        if let Some((pr, sr)) = reports {
            path_reports.push(pr);
            speed_reports.push(sr);
        }
        bundles.push(bundle);
    }
    let invariants = if opts.skip_invariant_checks {
        None
    } else {
        Some(summarize(&path_reports, &speed_reports))
    };

    let extension = assemble(&ball, &bundles, tol)?;
    let mesh = mesh_validity(&extension, &map)?;
    let distortion = global_distortion(&extension, l, opts.sample_pairs, opts.sample_seed, tol)?;

    Ok(ExtensionResult {
        map,
        ball,
        extension,
        distortion,
        mesh,
        invariants,
        sector_count,
    })
}

/// Validates raw input vertices and runs the construction.
pub fn run(
    raw: &[RawVertex],
    declared_l: Option<f64>,
    auto_orient: bool,
    tol: &Tol,
    opts: &PipelineOptions,
) -> Result<ExtensionResult, PipelineError> {
    let map = load_and_validate(raw, declared_l, auto_orient, tol)?;
    extend_map(map, tol, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::point_on_square;

    #[test]
    fn identity_map_certifies() {
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
        let opts = PipelineOptions {
            sample_pairs: 2_000,
            ..Default::default()
        };
        let res = run(&raw, None, false, &tol, &opts).unwrap();
        assert_eq!(res.case(), CaseKind::A);
        assert!(res.distortion.global <= res.distortion.bound);
        let inv = res.invariants.as_ref().unwrap();
        assert!(inv.max_speed <= 1.0 + 1e-9);
        assert!(res.mesh.membership_checked > 0);
    }
}
