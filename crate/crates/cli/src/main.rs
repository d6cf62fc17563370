//! Command-line driver: `extend` runs the full pipeline on an input
//! boundary map and writes the certified mesh (plus an optional SVG),
//! `generate` produces random test maps, `check` re-validates a saved
//! mesh against its input map.
//!
//! Exit codes: 0 all checks pass, 1 OS-level I/O failure, 2 invalid
//! input, 3 construction failure, 4 invariant-suite failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lipext_core::ball::primary_sectors;
use lipext_core::boundary::load_and_validate;
use lipext_core::distortion::{global_distortion, mesh_validity, SAMPLE_SEED};
use lipext_core::generate::generate_boundary_map;
use lipext_core::io::{
    build_output, input_to_json, output_to_json, parse_input, parse_output, InputMap,
};
use lipext_core::pipeline::{run, PipelineError, PipelineOptions};
use lipext_core::svg::render_svg;
use lipext_core::tolerances::{Tol, EPS_GEOM_DEFAULT, EPS_LEN_DEFAULT};

#[derive(Parser)]
#[command(
    name = "lipext",
    version,
    about = "Piecewise-affine bi-Lipschitz extension of square boundary maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extend a boundary map to the whole square and certify the result.
    Extend(ExtendArgs),
    /// Generate a random boundary map below a target bi-Lipschitz constant.
    Generate(GenerateArgs),
    /// Re-validate a saved mesh against its input map.
    Check(CheckArgs),
}

#[derive(Args)]
struct ToleranceArgs {
    /// Geometric predicate tolerance, in (0, 1e-3).
    #[arg(long, default_value_t = EPS_GEOM_DEFAULT)]
    eps_geom: f64,
    /// Length comparison slack, in (0, 1e-3).
    #[arg(long, default_value_t = EPS_LEN_DEFAULT)]
    eps_len: f64,
}

impl ToleranceArgs {
    fn build(&self) -> Result<Tol, Fail> {
        for (name, v) in [("--eps-geom", self.eps_geom), ("--eps-len", self.eps_len)] {
            if !(v.is_finite() && v > 0.0 && v < 1e-3) {
                return Err(Fail::input(format!("{name} must lie in (0, 1e-3), got {v}")));
            }
        }
        Ok(Tol::new(self.eps_geom, self.eps_len))
    }
}

#[derive(Args)]
struct ExtendArgs {
    /// Input boundary map JSON.
    #[arg(long)]
    input: PathBuf,
    /// Output mesh JSON.
    #[arg(long)]
    output: PathBuf,
    /// Optional two-panel SVG rendering of the mesh.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Random point pairs for the sampled inverse-constant estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Seed for the pair sampler (fixed default, recorded in the report).
    #[arg(long, default_value_t = SAMPLE_SEED)]
    seed: u64,
    /// Reverse the input orientation if its image polygon is clockwise.
    #[arg(long)]
    auto_orient: bool,
    /// Skip the quadratic pairwise path and speed verifiers.
    #[arg(long)]
    skip_invariant_checks: bool,
    #[command(flatten)]
    tol: ToleranceArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator seed; the output is a pure function of it.
    #[arg(long)]
    seed: u64,
    /// Number of boundary vertices.
    #[arg(long, default_value_t = 24)]
    vertices: usize,
    /// Reject candidates whose estimated bi-Lipschitz constant exceeds this.
    #[arg(long, default_value_t = 10.0)]
    target_l: f64,
    /// Output boundary map JSON.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    tol: ToleranceArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Input boundary map JSON the mesh claims to extend.
    #[arg(long)]
    input: PathBuf,
    /// Saved mesh JSON to validate.
    #[arg(long)]
    mesh: PathBuf,
    /// Random point pairs for the sampled inverse-constant estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Seed for the pair sampler.
    #[arg(long, default_value_t = SAMPLE_SEED)]
    seed: u64,
    #[command(flatten)]
    tol: ToleranceArgs,
}

struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn input(message: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Fail {
        Fail {
            code: 4,
            message: message.into(),
        }
    }

    fn from_pipeline(e: PipelineError) -> Fail {
        let code = match e {
            PipelineError::Boundary(_) => 2,
            PipelineError::Ball(_)
            | PipelineError::Partition { .. }
            | PipelineError::Path { .. }
            | PipelineError::Speed { .. }
            | PipelineError::Extend(_) => 3,
            PipelineError::Mesh(_) | PipelineError::Distortion(_) => 4,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path)
        .map_err(|e| Fail::input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Fail> {
    std::fs::write(path, content).map_err(|e| Fail {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn cmd_extend(args: &ExtendArgs) -> Result<(), Fail> {
    let tol = args.tol.build()?;
    let doc = parse_input(&read_file(&args.input)?)
        .map_err(|e| Fail::input(format!("{}: {e}", args.input.display())))?;
    let raw = doc.to_raw();
    let auto_orient = args.auto_orient || doc.options.auto_orient;
    let opts = PipelineOptions {
        sample_pairs: args.samples,
        sample_seed: args.seed,
        skip_invariant_checks: args.skip_invariant_checks,
    };
    let res = run(&raw, doc.l, auto_orient, &tol, &opts).map_err(Fail::from_pipeline)?;
    let out = build_output(&res, &tol);
    write_file(&args.output, &output_to_json(&out))?;
    if let Some(svg_path) = &args.svg {
        write_file(svg_path, &render_svg(&res.extension, &res.ball))?;
    }
    println!(
        "extend ok: case={} pieces={} L={:.4} global={:.4} bound={:.4e}",
        res.extension.case.as_str(),
        res.extension.pieces.len(),
        res.map.l,
        res.distortion.global,
        res.distortion.bound
    );
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Fail> {
    let tol = args.tol.build()?;
    if args.vertices < 4 {
        return Err(Fail::input(format!(
            "--vertices must be at least 4, got {}",
            args.vertices
        )));
    }
    if !(args.target_l.is_finite() && args.target_l >= 1.0) {
        return Err(Fail::input(format!(
            "--target-l must be at least 1, got {}",
            args.target_l
        )));
    }
    let raw = generate_boundary_map(args.seed, args.vertices, args.target_l, &tol)
        .map_err(|e| Fail {
            code: 3,
            message: e.to_string(),
        })?;
    let map = load_and_validate(&raw, None, false, &tol)
        .map_err(|e| Fail::input(format!("generated map failed validation: {e}")))?;
    let doc = InputMap::from_raw(&raw, None, false);
    write_file(&args.output, &input_to_json(&doc))?;
    println!(
        "generate ok: seed={} vertices={} estimated L={:.4}",
        args.seed,
        raw.len(),
        map.l
    );
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), Fail> {
    let tol = args.tol.build()?;
    let doc = parse_input(&read_file(&args.input)?)
        .map_err(|e| Fail::input(format!("{}: {e}", args.input.display())))?;
    let mesh_doc = parse_output(&read_file(&args.mesh)?)
        .map_err(|e| Fail::input(format!("{}: {e}", args.mesh.display())))?;
    let (ext, ball) = mesh_doc
        .to_extension()
        .map_err(|e| Fail::input(format!("{}: {e}", args.mesh.display())))?;

    let map = load_and_validate(&doc.to_raw(), doc.l, doc.options.auto_orient, &tol)
        .map_err(|e| Fail::input(format!("{}: {e}", args.input.display())))?;
    let refined = map.refine_for_angle();
    let (with_contacts, _sectors) = primary_sectors(&refined, &ball, &tol)
        .map_err(|e| Fail::invariant(format!("saved ball does not fit the map: {e}")))?;

    let mesh = mesh_validity(&ext, &with_contacts)
        .map_err(|e| Fail::invariant(format!("mesh validity: {e}")))?;
    let report = global_distortion(&ext, with_contacts.l, args.samples, args.seed, &tol)
        .map_err(|e| Fail::invariant(format!("distortion: {e}")))?;
    println!(
        "check ok: case={} pieces={} global={:.4} bound={:.4e}",
        mesh_doc.case, mesh.piece_count, report.global, report.bound
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Extend(args) => cmd_extend(args),
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
