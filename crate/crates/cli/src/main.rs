//! `tactile`: batch interface to the tactile texture pipeline.
//!
//! Results are JSON on stdout. Failures exit nonzero with a single JSON line
//! on stderr: `{"error": "...", "command": "..."}`.

mod args;
mod plot;
mod stats_cmd;

use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use clap::Parser;
use serde_json::json;
use tactile_core::dataset::{assign_split, augment_rotations, generate_synthetic_corpus, DatasetManifest, Split};
use tactile_core::eval::{run_formative, run_technical_eval, EvalReport, Selection, TileParams};
use tactile_core::generator::{GeneratorKind, DEFAULT_TIMEOUT_MS};
use tactile_core::heightfield::{load_heightfield, save_heightfield};
use tactile_core::mesh::{load_obj, save_obj};
use tactile_core::metrics::compare;
use tactile_core::{
    apply_heightfield, extract_heightfield, make_tile, raw_displacement_stats, BitDepth, DisplacementParams,
};

use args::{Cli, Command, DatasetCommand, EvalCommand, GeneratorArgs};

pub const ENDPOINT_ENV: &str = "TACTILE_GENERATOR_ENDPOINT";
pub const TIMEOUT_ENV: &str = "TACTILE_GENERATOR_TIMEOUT_MS";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", json!({ "error": first.trim_start_matches("error: "), "command": "args" }));
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}"), "command": name }));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        ensure!(n > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Tile(a) => {
            let mesh = make_tile(a.size_mm(), a.target_faces)?;
            save_obj(&mesh, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
            emit(&json!({ "output": a.output, "faces": mesh.face_count(), "vertices": mesh.vertex_count() }))
        }
        Command::Apply(a) => {
            let mesh = load_obj(&a.mesh)?;
            let h = load_heightfield(&a.heightfield).with_context(|| format!("reading {}", a.heightfield.display()))?;
            let mask = match &a.active_group {
                Some(g) => Some(
                    mesh.group_vertices(g)
                        .with_context(|| format!("mesh has no face group `{g}`"))?,
                ),
                None => mesh.group_vertices(tactile_core::ACTIVE_GROUP),
            };
            let params = DisplacementParams {
                magnification: a.magnification,
                amplitude_mm: a.amplitude_mm,
                active_mask: mask,
            };
            let out = apply_heightfield(&mesh, &h, &params)?;
            save_obj(&out, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
            let stats = raw_displacement_stats(&mesh, &out)?;
            emit(&json!({ "output": a.output, "vertices": out.vertex_count(), "displacement_mm": stats }))
        }
        Command::Extract(a) => {
            let original = load_obj(&a.original)?;
            let modified = load_obj(&a.modified)?;
            let ex = extract_heightfield(&original, &modified, a.resolution.0)?;
            save_heightfield(&ex.heightfield, &a.output, BitDepth::Sixteen)
                .with_context(|| format!("writing {}", a.output.display()))?;
            let stats = raw_displacement_stats(&original, &modified)?;
            emit(&json!({
                "output": a.output,
                "resolution": ex.heightfield.dims(),
                "raw_min_mm": ex.raw_min,
                "raw_max_mm": ex.raw_max,
                "displacement_mm": stats,
            }))
        }
        Command::Metrics(a) => {
            let ha = load_heightfield(&a.a).with_context(|| format!("reading {}", a.a.display()))?;
            let hb = load_heightfield(&a.b).with_context(|| format!("reading {}", a.b.display()))?;
            emit(&compare(&ha, &hb)?)
        }
        Command::Stats(s) => emit(&stats_cmd::run(s)?),
        Command::Dataset(d) => dataset(d, seed),
        Command::Eval(e) => eval(e, seed),
        Command::Plot(p) => {
            let report = EvalReport::load(&p.report)?;
            let svg = plot::box_plots(&report);
            std::fs::write(&p.output, svg).with_context(|| format!("writing {}", p.output.display()))?;
            emit(&json!({ "output": p.output, "conditions": report.conditions.len() }))
        }
        Command::Serve(s) => serve(s),
    }
}

fn emit<T: serde::Serialize>(value: &T) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        // a closed pipe (`| head`) is not a failure of the command
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn dataset(cmd: DatasetCommand, seed: u64) -> Result<()> {
    match cmd {
        DatasetCommand::Split(a) => {
            let m = DatasetManifest::load(&a.manifest)?;
            let out = assign_split(&m, a.test_fraction, seed)?;
            let path = a.output.unwrap_or(a.manifest);
            out.save(&path)?;
            emit(&json!({
                "output": path,
                "train": out.count(Split::Train),
                "test": out.count(Split::Test),
                "seed": seed,
            }))
        }
        DatasetCommand::Augment(a) => {
            let m = DatasetManifest::load(&a.manifest)?;
            let out = augment_rotations(&m, &a.output_dir)?;
            let path = a.output.unwrap_or(a.manifest);
            out.save(&path)?;
            emit(&json!({ "output": path, "train": out.count(Split::Train), "test": out.count(Split::Test) }))
        }
        DatasetCommand::Synth(a) => {
            let m = generate_synthetic_corpus(a.n, a.resolution, seed, &a.output_dir)?;
            emit(&json!({
                "manifest": a.output_dir.join(tactile_core::dataset::MANIFEST_FILE),
                "entries": m.entries.len(),
                "resolution": a.resolution,
                "seed": seed,
            }))
        }
    }
}

/// Resolves `--generator` values, applying the environment overrides:
/// bare `remote` takes its endpoint from the environment, and the timeout
/// variable applies to every remote generator.
fn resolve_generator(value: &str) -> Result<GeneratorKind> {
    let timeout = match std::env::var(TIMEOUT_ENV) {
        Ok(v) => Some(Duration::from_millis(
            v.parse().with_context(|| format!("{TIMEOUT_ENV}=`{v}` is not a number of milliseconds"))?,
        )),
        Err(_) => None,
    };
    let kind = if value == "remote" {
        let endpoint = std::env::var(ENDPOINT_ENV)
            .with_context(|| format!("--generator remote needs an endpoint: use remote=URL or set {ENDPOINT_ENV}"))?;
        GeneratorKind::remote(endpoint, Duration::from_millis(DEFAULT_TIMEOUT_MS))?
    } else {
        value.parse()?
    };
    Ok(match (kind, timeout) {
        (GeneratorKind::Remote { endpoint, .. }, Some(t)) => GeneratorKind::remote(endpoint, t)?,
        (kind, _) => kind,
    })
}

fn selection(g: &GeneratorArgs, seed: u64) -> Selection {
    Selection { sample: g.sample, seed }
}

fn write_report(report: &EvalReport, output: &Path) -> Result<()> {
    report.save(output)?;
    let conditions: Vec<_> = report
        .conditions
        .iter()
        .map(|c| json!({ "label": c.label, "entries": c.entries.len(), "failures": c.failures.len(), "aggregate": c.aggregate }))
        .collect();
    emit(&json!({ "output": output, "failures": report.failure_count(), "conditions": conditions, "tests": report.tests }))
}

fn eval(cmd: EvalCommand, seed: u64) -> Result<()> {
    match cmd {
        EvalCommand::Formative(a) => {
            ensure!(a.common.generator.len() == 1, "formative evaluates exactly one --generator");
            let kind = resolve_generator(&a.common.generator[0])?;
            let corpus = DatasetManifest::load(&a.common.manifest)?;
            let defaults = TileParams::default();
            let tile = TileParams {
                size_mm: a.size_mm().unwrap_or(defaults.size_mm),
                target_faces: a.target_faces,
                amplitude_mm: a.amplitude_mm,
                magnification: a.magnification,
                resolution: a.resolution.map(|r| r.0),
            };
            let report = run_formative(&corpus, &kind, &tile, &selection(&a.common, seed))?;
            write_report(&report, &a.common.output)
        }
        EvalCommand::Technical(a) => {
            let kinds = a.generator.iter().map(|g| resolve_generator(g)).collect::<Result<Vec<_>>>()?;
            let corpus = DatasetManifest::load(&a.manifest)?;
            let report = run_technical_eval(&corpus, &kinds, &selection(&a, seed))?;
            write_report(&report, &a.output)
        }
    }
}

fn serve(a: args::ServeArgs) -> Result<()> {
    let kind = resolve_generator(&a.generator)?;
    if kind == GeneratorKind::GroundtruthPassthrough {
        bail!("the studio has no ground truth to pass through: serve with baseline or remote");
    }
    let config = tactile_server::ServerConfig {
        target_faces: a.target_faces,
        amplitude_mm: a.amplitude_mm,
        session_capacity: std::num::NonZeroUsize::new(a.capacity).context("--capacity must be at least 1")?,
        cors_origin: a.cors_origin,
        ..Default::default()
    };
    let router = if a.stub {
        tactile_server::stub::router(tactile_server::StubConfig::default())
    } else {
        tactile_server::studio_router(kind, config)
    };
    let addr = std::net::SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(tactile_server::serve(addr, router))
        .with_context(|| format!("serving on {addr}"))
}
