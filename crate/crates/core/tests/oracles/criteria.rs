//! End-to-end checks shared by the pipeline, eval and acceptance tests.

#![allow(dead_code)]

use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tactile_core::dataset::{generate_synthetic_corpus, synthetic_pair, DatasetManifest};
use tactile_core::eval::{run_formative, run_technical_eval, EvalReport, Selection, TileParams};
use tactile_core::generator::GeneratorKind;
use tactile_core::metrics::pearson;
use tactile_core::{apply_heightfield, extract_heightfield, freeze_except_top, make_tile, rms_roughness};

pub const TILE_MM: [f64; 3] = [50.0, 50.0, 10.0];
pub const TARGET_FACES: usize = 25_000;
pub const ROUND_TRIP_RES: usize = 256;
pub const MIN_PEARSON: f64 = 0.95;
pub const RMS_REL_TOL: f64 = 0.10;
pub const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(10);

pub const LINEARITY_TOL_MM: f64 = 1e-9;
pub const LINEARITY_VERTICES: usize = 1000;
pub const MAGNIFICATIONS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];

pub const CORPUS_SIZE: usize = 50;
pub const CORPUS_RES: usize = 64;
pub const CORPUS_SEED: u64 = 42;
pub const ALPHA: f64 = 0.05;
pub const FORMATIVE_BUDGET: Duration = Duration::from_secs(300);

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub faces: usize,
    pub pearson: f64,
    pub rms_input: f64,
    pub rms_extracted: f64,
    pub elapsed: Duration,
}

impl RoundTrip {
    pub fn rms_rel_error(&self) -> f64 {
        (self.rms_extracted - self.rms_input).abs() / self.rms_input
    }

    pub fn passed(&self) -> bool {
        self.faces >= TARGET_FACES
            && self.pearson >= MIN_PEARSON
            && self.rms_rel_error() <= RMS_REL_TOL
            && self.elapsed < ROUND_TRIP_BUDGET
    }
}

/// Tile, displace with a band-limited synthetic heightfield, extract, compare.
pub fn round_trip(seed: u64) -> RoundTrip {
    let start = Instant::now();
    let (_, input) = synthetic_pair(ROUND_TRIP_RES, seed, 0);
    let tile = make_tile(TILE_MM, TARGET_FACES).unwrap();
    let params = freeze_except_top(&tile).unwrap().with_amplitude_mm(1.0).with_magnification(1.0);
    let displaced = apply_heightfield(&tile, &input, &params).unwrap();
    let out = extract_heightfield(&tile, &displaced, (ROUND_TRIP_RES, ROUND_TRIP_RES)).unwrap();
    let elapsed = start.elapsed();
    RoundTrip {
        faces: tile.face_count(),
        pearson: pearson(out.heightfield.values(), input.values()),
        rms_input: rms_roughness(&input),
        rms_extracted: rms_roughness(&out.heightfield),
        elapsed,
    }
}

/// Worst ‖p'(m) − p'(0) − m(p'(1) − p'(0))‖ over randomly drawn vertices, mm.
pub fn linearity_error(seed: u64) -> f64 {
    let (_, h) = synthetic_pair(128, seed, 1);
    let tile = make_tile(TILE_MM, TARGET_FACES).unwrap();
    let base = freeze_except_top(&tile).unwrap().with_amplitude_mm(1.0);
    let at = |m: f64| apply_heightfield(&tile, &h, &base.clone().with_magnification(m)).unwrap();
    let (p0, p1) = (at(0.0), at(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = (0..LINEARITY_VERTICES)
        .map(|_| rng.random_range(0..tile.vertex_count()))
        .collect();
    let mut worst = 0.0f64;
    for m in MAGNIFICATIONS {
        let pm = at(m);
        for &i in &picks {
            let mut sq = 0.0;
            for k in 0..3 {
                let d = pm.vertices[i][k] - p0.vertices[i][k] - m * (p1.vertices[i][k] - p0.vertices[i][k]);
                sq += d * d;
            }
            worst = worst.max(sq.sqrt());
        }
    }
    worst
}

pub fn decorrelated_corpus(dir: &Path) -> DatasetManifest {
    generate_synthetic_corpus(CORPUS_SIZE, CORPUS_RES, CORPUS_SEED, dir).unwrap()
}

pub fn formative(corpus: &DatasetManifest, candidate: GeneratorKind) -> (EvalReport, Duration) {
    let start = Instant::now();
    let report = run_formative(corpus, &candidate, &TileParams::default(), &Selection::default()).unwrap();
    (report, start.elapsed())
}

pub fn formative_p(report: &EvalReport) -> f64 {
    report.tests.rms_welch_t[0].result.ok().expect("welch t computed").p
}

pub fn technical(corpus: &DatasetManifest) -> EvalReport {
    run_technical_eval(
        corpus,
        &[GeneratorKind::GroundtruthPassthrough, GeneratorKind::BaselineLuminance],
        &Selection::default(),
    )
    .unwrap()
}

pub struct MseOrdering {
    pub baseline_mean: f64,
    pub passthrough_mean: f64,
    pub p: f64,
}

pub fn mse_ordering(report: &EvalReport) -> MseOrdering {
    let mean = |label: &str| report.condition(label).unwrap().mse().mean();
    let p = report.tests.mse_welch_t[0].result.ok().expect("welch t computed").p;
    MseOrdering {
        baseline_mean: mean("baseline"),
        passthrough_mean: mean("groundtruth"),
        p,
    }
}
