//! Command-line interface: generate / flatness / dims / measure / eta /
//! verify-table / pipeline.
//!
//! Exit codes: 0 success, 1 failed verification cells, 2 input error.

use crate::dimension::{
    eta, loglog_pairs, measure_compare, minkowski_dims, slab_covering_constant,
};
use crate::flatness::{classify_with, flatness_profile, ClassifyOptions, Sided};
use crate::generators::{self, GeneratorSpec};
use crate::harness::{
    run_pipeline, spread_indices, verify_table, LadderSpec, PipelineSpec, VerifyConfig,
};
use crate::io::{read_cloud, write_cloud, write_json};
use crate::{input_error, Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "reifdim",
    about = "Generate flat/fractal point sets, certify Reifenberg-type flatness, estimate dimensions and pre-measures, and reproduce the classification table"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for the seeded generators and trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = auto).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Emit machine-readable JSON on stdout instead of a text summary.
    #[arg(long, global = true, default_value_t = false)]
    json: bool,

    /// Directory that relative output paths are resolved under.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

/// Resolves a relative output path under the global --out-dir, creating the
/// directory when needed.
fn resolve_out(path: &std::path::Path, out_dir: Option<&std::path::Path>) -> Result<PathBuf> {
    match out_dir {
        Some(dir) if path.is_relative() => {
            std::fs::create_dir_all(dir)?;
            Ok(dir.join(path))
        }
        _ => Ok(path.to_path_buf()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Comb,
    Koch,
    VariableKoch,
    LipschitzGraph,
    PlanePatch,
    FiniteUnion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SidedArg {
    One,
    Two,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    out: PathBuf,
    /// Intrinsic dimension j (comb, lipschitz-graph, plane-patch).
    #[arg(long, default_value_t = 1)]
    j: usize,
    /// Ambient dimension n.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Slab count for the comb.
    #[arg(long, default_value_t = 50)]
    slabs: usize,
    /// Sampling density h.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Bend angle in radians (koch).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
    theta: f64,
    /// Comma-separated per-depth bend angles (variable-koch).
    #[arg(long)]
    thetas: Option<String>,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Lipschitz constant (lipschitz-graph).
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    /// Patch radius (plane-patch).
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    /// Comma-separated input cloud files (finite-union).
    #[arg(long)]
    inputs: Option<String>,
}

#[derive(Args)]
struct FlatnessArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    j: usize,
    /// max:ratio:count
    #[arg(long)]
    ladder: String,
    #[arg(long, value_enum, default_value_t = SidedArg::One)]
    sided: SidedArg,
    #[arg(long)]
    out: PathBuf,
    /// Number of base points, spread evenly through the cloud.
    #[arg(long, default_value_t = 8)]
    base_count: usize,
    /// Comma-separated delta grid (default 0.4,0.2,0.1,0.05,0.025).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// max:ratio:count
    #[arg(long)]
    ladder: String,
    #[arg(long)]
    out: PathBuf,
    /// Write (log 1/eps, log N) pairs for external plotting.
    #[arg(long)]
    emit_loglog: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    scale: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EtaArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    j: usize,
    /// Override the covering constant instead of computing it.
    #[arg(long)]
    c_cover: Option<f64>,
}

#[derive(Args)]
struct VerifyTableArgs {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    koch_depth: usize,
    #[arg(long, default_value_t = 50)]
    comb_slabs: usize,
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline spec: JSON or flat key=value lines.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "pipeline-out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an example set as a cloud CSV plus a JSON sidecar.
    Generate(GenerateArgs),
    /// Flatness profiles and the twelve-way verdict for a cloud.
    Flatness(FlatnessArgs),
    /// Box-counting dimension estimate over a scale ladder.
    Dims(DimsArgs),
    /// Packing vs Hausdorff pre-measures at one scale.
    Measure(MeasureArgs),
    /// The dimension-gap exponent eta(delta) with its covering constant.
    Eta(EtaArgs),
    /// Reproduce the desk-verifiable rows of the classification table.
    VerifyTable(VerifyTableArgs),
    /// generate -> flatness -> dims -> measure with a manifest.
    Pipeline(PipelineArgs),
}

fn parse_ladder(text: &str) -> Result<LadderSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(input_error!("ladder must be max:ratio:count, got {text}"));
    }
    let max: f64 = parts[0]
        .parse()
        .map_err(|_| input_error!("bad ladder max {}", parts[0]))?;
    let ratio: f64 = parts[1]
        .parse()
        .map_err(|_| input_error!("bad ladder ratio {}", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| input_error!("bad ladder count {}", parts[2]))?;
    Ok(LadderSpec { max, ratio, count })
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| input_error!("bad float {t}"))
        })
        .collect()
}

fn run_generate(args: &GenerateArgs, seed: u64, out_dir: Option<&std::path::Path>) -> Result<()> {
    let (cloud, spec) = match args.kind {
        KindArg::Comb => {
            let spec = GeneratorSpec::Comb {
                j: args.j,
                n: args.n,
                slabs: args.slabs,
                h: args.h,
            };
            (spec.generate()?, spec)
        }
        KindArg::Koch => {
            let spec = GeneratorSpec::Koch {
                theta: args.theta,
                depth: args.depth,
            };
            (spec.generate()?, spec)
        }
        KindArg::VariableKoch => {
            let thetas = parse_f64_list(
                args.thetas
                    .as_deref()
                    .ok_or_else(|| input_error!("variable-koch needs --thetas"))?,
            )?;
            let spec = GeneratorSpec::VariableKoch {
                thetas,
                depth: args.depth,
            };
            (spec.generate()?, spec)
        }
        KindArg::LipschitzGraph => {
            let spec = GeneratorSpec::LipschitzGraph {
                j: args.j,
                n: args.n,
                lipschitz: args.lipschitz,
                seed,
                h: args.h,
            };
            (spec.generate()?, spec)
        }
        KindArg::PlanePatch => {
            let spec = GeneratorSpec::PlanePatch {
                j: args.j,
                n: args.n,
                rho0: args.rho0,
                h: args.h,
            };
            (spec.generate()?, spec)
        }
        KindArg::FiniteUnion => {
            let inputs = args
                .inputs
                .as_deref()
                .ok_or_else(|| input_error!("finite-union needs --inputs a.csv,b.csv"))?;
            let clouds = inputs
                .split(',')
                .map(|p| read_cloud(std::path::Path::new(p.trim())))
                .collect::<Result<Vec<_>>>()?;
            let cloud = generators::union(&clouds)?;
            // The sidecar records the file provenance rather than nested specs.
            let spec = GeneratorSpec::FiniteUnion { parts: vec![] };
            (cloud, spec)
        }
    };
    let out = resolve_out(&args.out, out_dir)?;
    write_cloud(&out, &cloud)?;
    let sidecar = out.with_extension("spec.json");
    write_json(&sidecar, &spec)?;
    eprintln!(
        "wrote {} ({} points, dim {}) + {}",
        out.display(),
        cloud.len(),
        cloud.dim(),
        sidecar.display()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct FlatnessReportOut {
    verdict: crate::flatness::ReifenbergVerdict,
    profiles: Vec<crate::flatness::FlatnessProfile>,
}

fn run_flatness(
    args: &FlatnessArgs,
    threads: usize,
    json: bool,
    out_dir: Option<&std::path::Path>,
) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let ladder = parse_ladder(&args.ladder)?.to_ladder()?;
    let grid = match &args.grid {
        Some(g) => parse_f64_list(g)?,
        None => crate::flatness::default_delta_grid(),
    };
    let base = spread_indices(cloud.len(), args.base_count);
    let sided = match args.sided {
        SidedArg::One => Sided::One,
        SidedArg::Two => Sided::Two,
    };
    let profiles = base
        .iter()
        .map(|&i| flatness_profile(&cloud, i, &ladder, args.j, sided))
        .collect::<Result<Vec<_>>>()?;
    let verdict = classify_with(
        &cloud,
        args.j,
        &grid,
        &ladder,
        &base,
        &ClassifyOptions { threads },
    )?;
    let out_path = resolve_out(&args.out, out_dir)?;
    let out = FlatnessReportOut { verdict, profiles };
    write_json(&out_path, &out)?;
    if json {
        println!("{}", serde_json::to_string(&out)?);
    } else {
        for p in &out.verdict.properties {
            println!(
                "{:<14} ({:>4}): {}",
                p.key,
                p.numeral,
                if p.consistent {
                    "consistent"
                } else {
                    "violated"
                }
            );
        }
        println!("report: {}", out_path.display());
    }
    Ok(())
}

fn run_dims(args: &DimsArgs, json: bool, out_dir: Option<&std::path::Path>) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let ladder = parse_ladder(&args.ladder)?.radii()?;
    let est = minkowski_dims(&cloud, &ladder)?;
    write_json(&resolve_out(&args.out, out_dir)?, &est)?;
    if let Some(path) = &args.emit_loglog {
        let mut csv = String::from("log_inv_eps,log_count\n");
        for (x, y) in loglog_pairs(&est) {
            csv.push_str(&format!("{x},{y}\n"));
        }
        std::fs::write(resolve_out(path, out_dir)?, csv)?;
    }
    if json {
        println!("{}", serde_json::to_string(&est)?);
    } else {
        println!(
            "global slope {:.4} (local window range [{:.4}, {:.4}])",
            est.global, est.lower_est, est.upper_est
        );
    }
    Ok(())
}

fn run_measure(args: &MeasureArgs, json: bool, out_dir: Option<&std::path::Path>) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let rep = measure_compare(&cloud, args.j, args.scale)?;
    if let Some(out) = &args.out {
        write_json(&resolve_out(out, out_dir)?, &rep)?;
    }
    if json {
        println!("{}", serde_json::to_string(&rep)?);
    } else {
        println!(
            "hausdorff {:.5}  packing {:.5}  ratio {:.4}",
            rep.hausdorff_pre, rep.packing_pre, rep.ratio
        );
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct EtaOut {
    delta: f64,
    n: usize,
    j: usize,
    q: Option<u64>,
    c_cover: f64,
    eta: f64,
}

fn run_eta(args: &EtaArgs, json: bool) -> Result<()> {
    let (q, c_cover) = match args.c_cover {
        Some(c) => (None, c),
        None => {
            if args.delta <= 0.125 {
                let (q, c) = slab_covering_constant(args.n, args.j, args.delta)?;
                (Some(q), c)
            } else {
                // branch regime: the covering constant is not used
                (None, 1.0)
            }
        }
    };
    let value = eta(args.delta, c_cover, args.n, args.j)?;
    let out = EtaOut {
        delta: args.delta,
        n: args.n,
        j: args.j,
        q,
        c_cover,
        eta: value,
    };
    if json {
        println!("{}", serde_json::to_string(&out)?);
    } else {
        println!("eta({}) = {:.6} (C = {:.4})", args.delta, value, c_cover);
    }
    Ok(())
}

fn run_verify_table(
    args: &VerifyTableArgs,
    seed: u64,
    threads: usize,
    json: bool,
    global_out: Option<&std::path::Path>,
) -> Result<i32> {
    let cfg = VerifyConfig {
        seed,
        threads,
        out_dir: args
            .out_dir
            .clone()
            .or_else(|| global_out.map(|d| d.to_path_buf())),
        koch_depth: args.koch_depth,
        comb_slabs: args.comb_slabs,
        ..VerifyConfig::default()
    };
    let report = verify_table(&cfg)?;
    if json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        for c in &report.checks {
            println!(
                "check {:<40} {}  [{}]",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            );
        }
        for cell in &report.cells {
            println!(
                "({:>4}) {:<14} q{}: expected {:?} -> {:?}",
                cell.property, cell.key, cell.question, cell.expected, cell.status
            );
        }
        println!(
            "confirmed {}  not-desk-verifiable {}  FAILED {}",
            report.confirmed, report.not_desk_verifiable, report.failed
        );
    }
    Ok(report.exit_code())
}

/// Flat key=value pipeline configs are translated into the JSON spec schema;
/// anything starting with '{' is parsed as JSON directly.
fn parse_pipeline_spec(text: &str, seed: u64) -> Result<PipelineSpec> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    let mut kv = std::collections::BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {line}")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).cloned();
    let parse_f = |k: &str, d: f64| -> Result<f64> {
        get(k).map_or(Ok(d), |v| {
            v.parse()
                .map_err(|_| input_error!("bad float for {k}: {v}"))
        })
    };
    let parse_u = |k: &str, d: usize| -> Result<usize> {
        get(k).map_or(Ok(d), |v| {
            v.parse()
                .map_err(|_| input_error!("bad integer for {k}: {v}"))
        })
    };
    let kind = get("kind").ok_or_else(|| input_error!("pipeline config needs kind="))?;
    let generator = match kind.as_str() {
        "comb" => GeneratorSpec::Comb {
            j: parse_u("j", 1)?,
            n: parse_u("n", 2)?,
            slabs: parse_u("slabs", 50)?,
            h: parse_f("h", 1e-3)?,
        },
        "koch" => GeneratorSpec::Koch {
            theta: parse_f("theta", std::f64::consts::FRAC_PI_3)?,
            depth: parse_u("depth", 6)?,
        },
        "variable-koch" => GeneratorSpec::VariableKoch {
            thetas: parse_f64_list(
                &get("thetas").ok_or_else(|| input_error!("variable-koch needs thetas="))?,
            )?,
            depth: parse_u("depth", 6)?,
        },
        "lipschitz-graph" => GeneratorSpec::LipschitzGraph {
            j: parse_u("j", 1)?,
            n: parse_u("n", 2)?,
            lipschitz: parse_f("lipschitz", 1.0)?,
            seed: kv
                .get("seed")
                .map(|v| v.parse().map_err(|_| input_error!("bad seed {v}")))
                .transpose()?
                .unwrap_or(seed),
            h: parse_f("h", 1e-3)?,
        },
        "plane-patch" => GeneratorSpec::PlanePatch {
            j: parse_u("j", 1)?,
            n: parse_u("n", 2)?,
            rho0: parse_f("rho0", 1.0)?,
            h: parse_f("h", 1e-3)?,
        },
        other => return Err(input_error!("unknown generator kind {other}")),
    };
    let flatness = match get("flatness_ladder") {
        Some(l) => Some(crate::harness::FlatnessStage {
            j: parse_u("flatness_j", 1)?,
            ladder: parse_ladder(&l)?,
            base_count: parse_u("flatness_base_count", 8)?,
            delta_grid: None,
        }),
        None => None,
    };
    let dims = match get("dims_ladder") {
        Some(l) => Some(crate::harness::DimsStage {
            ladder: parse_ladder(&l)?,
        }),
        None => None,
    };
    let measure = match get("measure_scale") {
        Some(s) => Some(crate::harness::MeasureStage {
            j: parse_u("measure_j", 1)?,
            scale: s
                .parse()
                .map_err(|_| input_error!("bad measure_scale {s}"))?,
        }),
        None => None,
    };
    Ok(PipelineSpec {
        seed: parse_u("seed", seed as usize)? as u64,
        generator,
        flatness,
        dims,
        measure,
    })
}

fn run_pipeline_cmd(
    args: &PipelineArgs,
    seed: u64,
    threads: usize,
    json: bool,
    out_dir: Option<&std::path::Path>,
) -> Result<()> {
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = parse_pipeline_spec(&text, seed)?;
    let dest = resolve_out(&args.out_dir, out_dir)?;
    let manifest = run_pipeline(&spec, &dest, threads)?;
    if json {
        println!("{}", serde_json::to_string(&manifest)?);
    } else {
        println!(
            "pipeline complete: {} artifacts under {}",
            manifest.artifacts.len(),
            dest.display()
        );
    }
    Ok(())
}

/// Entry point used by `main`; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let out_dir = cli.out_dir.as_deref();
    let result: Result<i32> = match &cli.command {
        Command::Generate(args) => run_generate(args, cli.seed, out_dir).map(|_| 0),
        Command::Flatness(args) => run_flatness(args, cli.threads, cli.json, out_dir).map(|_| 0),
        Command::Dims(args) => run_dims(args, cli.json, out_dir).map(|_| 0),
        Command::Measure(args) => run_measure(args, cli.json, out_dir).map(|_| 0),
        Command::Eta(args) => run_eta(args, cli.json).map(|_| 0),
        Command::VerifyTable(args) => {
            run_verify_table(args, cli.seed, cli.threads, cli.json, out_dir)
        }
        Command::Pipeline(args) => {
            run_pipeline_cmd(args, cli.seed, cli.threads, cli.json, out_dir).map(|_| 0)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
