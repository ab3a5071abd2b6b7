//! The two quantitative experiments.
//!
//! * [`run_formative`] — mesh path: every selected pair is displaced onto a
//!   tile twice (ground truth and candidate), both heightfields are recovered
//!   from the meshes, and their RMS distributions are compared with Welch's t.
//! * [`run_technical_eval`] — heightfield path: candidates are compared to
//!   the ground truth directly by RMS, MSE and SSIM, with Welch's ANOVA and
//!   Games-Howell on the RMS groups and pairwise Welch t on MSE.
//!
//! Entries run in parallel; records are sorted by id so a report depends only
//! on its inputs. An entry whose generator fails is recorded as a failure and
//! left out of the statistics.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetEntry, DatasetError, DatasetManifest};
use crate::extract::{extract_heightfield, raw_displacement_stats, ExtractError};
use crate::generator::{generate, GeneratorKind};
use crate::mesh::{make_tile, MeshError, TriMesh};
use crate::metrics::{mse, rms_roughness, ssim, MetricError};
use crate::stats::{games_howell, welch_anova, welch_t, AnovaResult, GamesHowellEntry, Sample, StatsError, TTestResult};
use crate::stylize::{apply_heightfield, freeze_except_top, DisplacementParams, StylizeError};
use crate::{par, Heightfield};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Label of the ground-truth group in statistical tests.
pub const GROUNDTRUTH_LABEL: &str = "groundtruth";

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("corpus has no entries")]
    EmptyCorpus,
    #[error("at least one candidate generator is required")]
    NoCandidates,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("cannot build tile: {0}")]
    Mesh(#[from] MeshError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: invalid report: {source}")]
    Json {
        path: std::path::PathBuf,
        source: serde_json::Error,
    },
}

/// Per-entry failure reasons.
#[derive(Debug, thiserror::Error)]
enum EntryError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("generator: {0}")]
    Generator(#[from] crate::generator::GeneratorError),
    #[error(transparent)]
    Stylize(#[from] StylizeError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Tile and displacement settings for the mesh path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileParams {
    pub size_mm: [f64; 3],
    pub target_faces: usize,
    pub amplitude_mm: f64,
    pub magnification: f64,
    /// Extraction resolution; `None` uses each ground truth's own size.
    pub resolution: Option<(usize, usize)>,
}

impl Default for TileParams {
    fn default() -> Self {
        TileParams {
            size_mm: [50.0, 50.0, 10.0],
            target_faces: 25_000,
            amplitude_mm: 1.0,
            magnification: 1.0,
            resolution: None,
        }
    }
}

/// Which entries to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Evaluate a seeded random subset of this many entries.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for Selection {
    fn default() -> Self {
        Selection {
            sample: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Formative,
    Technical,
}

/// Where RMS was measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementPath {
    /// Heightfields recovered from displaced meshes.
    ExtractedFromMesh,
    /// Heightfields compared as images.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub id: String,
    pub rms_groundtruth: f64,
    pub rms_candidate: f64,
    pub mse: f64,
    pub ssim: f64,
    /// Mean-centered RMS of the physical displacement, mm (mesh path only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement_rms_groundtruth_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement_rms_candidate_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFailure {
    pub id: String,
    pub error: String,
}

/// Mean and sample standard deviation of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        Some(Summary { n, mean, sd, min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub rms_groundtruth: Option<Summary>,
    pub rms_candidate: Option<Summary>,
    pub mse: Option<Summary>,
    pub ssim: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub label: String,
    pub generator: GeneratorKind,
    pub entries: Vec<EntryRecord>,
    pub failures: Vec<EntryFailure>,
    pub aggregate: Aggregate,
}

impl ConditionReport {
    fn new(generator: &GeneratorKind, mut results: Vec<(String, Result<EntryRecord, String>)>) -> Self {
        results.sort_by(|a, b| a.0.cmp(&b.0));
        let mut entries = Vec::new();
        let mut failures = Vec::new();
        for (id, r) in results {
            match r {
                Ok(rec) => entries.push(rec),
                Err(error) => {
                    log::warn!("{}: entry {id} failed: {error}", generator.label());
                    failures.push(EntryFailure { id, error });
                }
            }
        }
        let col = |f: fn(&EntryRecord) -> f64| entries.iter().map(f).collect::<Vec<_>>();
        let aggregate = Aggregate {
            rms_groundtruth: Summary::of(&col(|e| e.rms_groundtruth)),
            rms_candidate: Summary::of(&col(|e| e.rms_candidate)),
            mse: Summary::of(&col(|e| e.mse)),
            ssim: Summary::of(&col(|e| e.ssim)),
        };
        ConditionReport {
            label: generator.label(),
            generator: generator.clone(),
            entries,
            failures,
            aggregate,
        }
    }

    pub fn rms_candidate(&self) -> Sample {
        Sample::new(
            self.label.clone(),
            self.entries.iter().map(|e| e.rms_candidate).collect::<Vec<_>>(),
        )
    }

    pub fn rms_groundtruth(&self) -> Sample {
        Sample::new(
            GROUNDTRUTH_LABEL,
            self.entries.iter().map(|e| e.rms_groundtruth).collect::<Vec<_>>(),
        )
    }

    pub fn mse(&self) -> Sample {
        Sample::new(
            self.label.clone(),
            self.entries.iter().map(|e| e.mse).collect::<Vec<_>>(),
        )
    }
}

/// A test result, or why it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    fn from(r: Result<T, StatsError>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub a: String,
    pub b: String,
    pub metric: String,
    pub result: Outcome<TTestResult>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Tests {
    /// Welch's t between ground-truth and candidate RMS, per candidate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rms_welch_t: Vec<PairedComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rms_welch_anova: Option<Outcome<AnovaResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rms_games_howell: Option<Outcome<Vec<GamesHowellEntry>>>,
    /// Welch's t between candidates' MSE distributions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mse_welch_t: Vec<PairedComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub generators: Vec<GeneratorKind>,
    /// See [`DatasetManifest::content_hash`].
    pub manifest_hash: String,
    pub entry_count: usize,
    pub parameters: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub measurement: MeasurementPath,
    pub provenance: Provenance,
    pub conditions: Vec<ConditionReport>,
    pub tests: Tests,
}

impl EvalReport {
    pub fn failure_count(&self) -> usize {
        self.conditions.iter().map(|c| c.failures.len()).sum()
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EvalError> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, text + "\n").map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| EvalError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn select<'a>(corpus: &'a DatasetManifest, selection: &Selection) -> Result<Vec<&'a DatasetEntry>, EvalError> {
    if corpus.entries.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    corpus.validate()?;
    let mut entries: Vec<&DatasetEntry> = corpus.entries.iter().collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(k) = selection.sample {
        if k < entries.len() {
            entries.shuffle(&mut ChaCha8Rng::seed_from_u64(selection.seed));
            entries.truncate(k);
            entries.sort_by(|a, b| a.id.cmp(&b.id));
        }
    }
    Ok(entries)
}

fn provenance(
    corpus: &DatasetManifest,
    generators: &[GeneratorKind],
    entry_count: usize,
    parameters: serde_json::Value,
) -> Result<Provenance, EvalError> {
    Ok(Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        generators: generators.to_vec(),
        manifest_hash: corpus.content_hash()?,
        entry_count,
        parameters,
    })
}

struct MeshPipeline {
    tile: TriMesh,
    params: DisplacementParams,
    resolution: Option<(usize, usize)>,
}

impl MeshPipeline {
    fn new(p: &TileParams) -> Result<Self, EvalError> {
        let tile = make_tile(p.size_mm, p.target_faces)?;
        let params = freeze_except_top(&tile)
            .expect("tiles carry the active group")
            .with_magnification(p.magnification)
            .with_amplitude_mm(p.amplitude_mm);
        Ok(MeshPipeline {
            tile,
            params,
            resolution: p.resolution,
        })
    }

    /// Displaces the tile by `h` and recovers it; also returns the physical
    /// displacement RMS.
    fn round_trip(&self, h: &Heightfield, resolution: (usize, usize)) -> Result<(Heightfield, f64), EntryError> {
        let displaced = apply_heightfield(&self.tile, h, &self.params)?;
        let raw = raw_displacement_stats(&self.tile, &displaced)?;
        let extracted = extract_heightfield(&self.tile, &displaced, resolution)?;
        Ok((extracted.heightfield, raw.rms))
    }

    fn entry(&self, corpus: &DatasetManifest, e: &DatasetEntry, candidate: &GeneratorKind) -> Result<EntryRecord, EntryError> {
        let (texture, gt) = corpus.load_pair(e)?;
        let cand = generate(candidate, &texture, Some(&gt))?;
        let resolution = self.resolution.unwrap_or(gt.dims());
        let (hg, raw_g) = self.round_trip(&gt, resolution)?;
        let (hc, raw_c) = self.round_trip(&cand, resolution)?;
        Ok(EntryRecord {
            id: e.id.clone(),
            rms_groundtruth: rms_roughness(&hg),
            rms_candidate: rms_roughness(&hc),
            mse: mse(&hg, &hc),
            ssim: ssim(&hg, &hc)?,
            displacement_rms_groundtruth_mm: Some(raw_g),
            displacement_rms_candidate_mm: Some(raw_c),
        })
    }
}

/// Formative-study comparison along the mesh path.
pub fn run_formative(
    corpus: &DatasetManifest,
    candidate: &GeneratorKind,
    tile: &TileParams,
    selection: &Selection,
) -> Result<EvalReport, EvalError> {
    let entries = select(corpus, selection)?;
    let pipeline = MeshPipeline::new(tile)?;
    let results = par::map_slice(&entries, |e| {
        let r = pipeline.entry(corpus, e, candidate).map_err(|err| err.to_string());
        (e.id.clone(), r)
    });
    let condition = ConditionReport::new(candidate, results);
    let tests = Tests {
        rms_welch_t: vec![PairedComparison {
            a: GROUNDTRUTH_LABEL.into(),
            b: condition.label.clone(),
            metric: "rms".into(),
            result: Outcome::from(welch_t(&condition.rms_groundtruth(), &condition.rms_candidate())),
        }],
        ..Tests::default()
    };
    let parameters = serde_json::json!({ "tile": tile, "selection": selection });
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        experiment: Experiment::Formative,
        measurement: MeasurementPath::ExtractedFromMesh,
        provenance: provenance(corpus, std::slice::from_ref(candidate), entries.len(), parameters)?,
        conditions: vec![condition],
        tests,
    })
}

fn direct_entry(corpus: &DatasetManifest, e: &DatasetEntry, candidate: &GeneratorKind) -> Result<EntryRecord, EntryError> {
    let (texture, gt) = corpus.load_pair(e)?;
    let cand = generate(candidate, &texture, Some(&gt))?;
    Ok(EntryRecord {
        id: e.id.clone(),
        rms_groundtruth: rms_roughness(&gt),
        rms_candidate: rms_roughness(&cand),
        mse: mse(&gt, &cand),
        ssim: ssim(&gt, &cand)?,
        displacement_rms_groundtruth_mm: None,
        displacement_rms_candidate_mm: None,
    })
}

/// Technical evaluation along the direct heightfield path.
///
/// The RMS groups are the ground truth (over all successfully loaded
/// entries) and each candidate.
pub fn run_technical_eval(
    corpus: &DatasetManifest,
    candidates: &[GeneratorKind],
    selection: &Selection,
) -> Result<EvalReport, EvalError> {
    if candidates.is_empty() {
        return Err(EvalError::NoCandidates);
    }
    let entries = select(corpus, selection)?;
    let conditions: Vec<ConditionReport> = candidates
        .iter()
        .map(|c| {
            let results = par::map_slice(&entries, |e| {
                (e.id.clone(), direct_entry(corpus, e, c).map_err(|err| err.to_string()))
            });
            ConditionReport::new(c, results)
        })
        .collect();

    // ground-truth RMS does not depend on the candidate: take it from the
    // condition that evaluated the most entries
    let gt = conditions
        .iter()
        .max_by_key(|c| c.entries.len())
        .map(ConditionReport::rms_groundtruth)
        .expect("at least one condition");
    let mut groups = vec![gt];
    groups.extend(conditions.iter().map(ConditionReport::rms_candidate));

    let mut mse_welch_t = Vec::new();
    for i in 0..conditions.len() {
        for j in i + 1..conditions.len() {
            let (a, b) = (&conditions[i], &conditions[j]);
            mse_welch_t.push(PairedComparison {
                a: a.label.clone(),
                b: b.label.clone(),
                metric: "mse".into(),
                result: Outcome::from(welch_t(&a.mse(), &b.mse())),
            });
        }
    }
    let tests = Tests {
        rms_welch_t: Vec::new(),
        rms_welch_anova: Some(Outcome::from(welch_anova(&groups))),
        rms_games_howell: Some(Outcome::from(games_howell(&groups))),
        mse_welch_t,
    };
    let parameters = serde_json::json!({ "selection": selection });
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        experiment: Experiment::Technical,
        measurement: MeasurementPath::Direct,
        provenance: provenance(corpus, candidates, entries.len(), parameters)?,
        conditions,
        tests,
    })
}
