//! Texture/heightfield pair corpora.
//!
//! A manifest is a JSON document next to the data it lists:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "seed": 42,
//!   "test_fraction": 0.1,
//!   "entries": [
//!     {"id": "wood_0001", "texture_path": "textures/wood_0001.png",
//!      "heightfield_path": "heightfields/wood_0001.png",
//!      "category": "Wood", "split": "train"}
//!   ]
//! }
//! ```
//!
//! Paths are relative to the directory holding the manifest. Augmented
//! entries additionally carry `parent` and `quarter_turns`.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::heightfield::{
    load_heightfield, load_texture, save_heightfield, save_texture, BitDepth, Heightfield,
    ImageError, TextureImage,
};
use crate::par;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        source: ImageError,
    },
    #[error("{path}: invalid manifest: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("unsupported manifest schema version {0} (expected {MANIFEST_SCHEMA_VERSION})")]
    UnsupportedSchema(u32),
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("entry `{id}` references missing file {path}")]
    MissingFile { id: String, path: PathBuf },
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("entry `{0}` has no split assigned")]
    SplitNotAssigned(String),
    #[error("generated id `{0}` collides with an existing entry")]
    IdCollision(String),
    #[error("corpus size must be at least 1")]
    EmptyCorpus,
}

/// Texture categories of the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Parquets,
    Wood,
    Rocks,
    Walls,
    Roofs,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Parquets,
        Category::Wood,
        Category::Rocks,
        Category::Walls,
        Category::Roofs,
    ];

    fn slug(self) -> &'static str {
        match self {
            Category::Parquets => "parquets",
            Category::Wood => "wood",
            Category::Rocks => "rocks",
            Category::Walls => "walls",
            Category::Roofs => "roofs",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
    #[default]
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    pub texture_path: PathBuf,
    pub heightfield_path: PathBuf,
    pub category: Category,
    #[serde(default)]
    pub split: Split,
    /// Id of the entry this one was rotated from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub quarter_turns: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_fraction: Option<f64>,
    pub entries: Vec<DatasetEntry>,
    /// Directory the entry paths are relative to.
    #[serde(skip)]
    pub root: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn image_err(path: &Path) -> impl FnOnce(ImageError) -> DatasetError + '_ {
    move |source| DatasetError::Image {
        path: path.to_path_buf(),
        source,
    }
}

/// `path` relative to `base` when it lies below it, otherwise unchanged.
fn relative_to(path: &Path, base: &Path) -> PathBuf {
    path.strip_prefix(base)
        .map(Path::to_path_buf)
        .unwrap_or_else(|_| path.to_path_buf())
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, entries: Vec<DatasetEntry>) -> Self {
        DatasetManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            seed: None,
            test_fraction: None,
            entries,
            root: root.into(),
        }
    }

    /// Reads a manifest; does not check that referenced files exist.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut m: DatasetManifest =
            serde_json::from_str(&text).map_err(|source| DatasetError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(DatasetError::UnsupportedSchema(m.schema_version));
        }
        m.root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    /// Writes the manifest, rebasing entry paths onto the new location.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut out = self.clone();
        if dir != self.root {
            let (abs_root, abs_dir) = (absolute(&self.root), absolute(&dir));
            for e in &mut out.entries {
                e.texture_path = relative_to(&abs_root.join(&e.texture_path), &abs_dir);
                e.heightfield_path = relative_to(&abs_root.join(&e.heightfield_path), &abs_dir);
            }
        }
        let text = serde_json::to_string_pretty(&out).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(io_err(path))
    }

    pub fn texture_path(&self, e: &DatasetEntry) -> PathBuf {
        self.root.join(&e.texture_path)
    }

    pub fn heightfield_path(&self, e: &DatasetEntry) -> PathBuf {
        self.root.join(&e.heightfield_path)
    }

    pub fn load_pair(&self, e: &DatasetEntry) -> Result<(TextureImage, Heightfield), DatasetError> {
        let tp = self.texture_path(e);
        let hp = self.heightfield_path(e);
        let texture = load_texture(&tp).map_err(image_err(&tp))?;
        let height = load_heightfield(&hp).map_err(image_err(&hp))?;
        Ok((texture, height))
    }

    /// Checks schema, id uniqueness and that every referenced file exists.
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(DatasetError::UnsupportedSchema(self.schema_version));
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(DatasetError::DuplicateId(e.id.clone()));
            }
            for p in [self.texture_path(e), self.heightfield_path(e)] {
                if !p.is_file() {
                    return Err(DatasetError::MissingFile {
                        id: e.id.clone(),
                        path: p,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn count(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }

    pub fn entries_in(&self, split: Split) -> impl Iterator<Item = &DatasetEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// SHA-256 over the manifest document and the bytes of every referenced
    /// file, in id order. Changes whenever any input changes.
    pub fn content_hash(&self) -> Result<String, DatasetError> {
        let mut hasher = Sha256::new();
        let mut doc = self.clone();
        doc.entries.sort_by(|a, b| a.id.cmp(&b.id));
        hasher.update(serde_json::to_vec(&doc).expect("manifest serializes"));
        for e in &doc.entries {
            for p in [self.texture_path(e), self.heightfield_path(e)] {
                let bytes = std::fs::read(&p).map_err(io_err(&p))?;
                hasher.update((bytes.len() as u64).to_le_bytes());
                hasher.update(&bytes);
            }
        }
        Ok(hex(&hasher.finalize()))
    }
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Number of test items for a category of `n` entries.
fn test_count(n: usize, fraction: f64) -> usize {
    // the epsilon keeps e.g. 100 * 0.1 from rounding down to 9
    (n as f64 * fraction + 1e-9).floor() as usize
}

/// Stratified seeded split: within each category, entries (in id order) are
/// shuffled and the first `floor(n * test_fraction)` become test items.
pub fn assign_split(
    m: &DatasetManifest,
    test_fraction: f64,
    seed: u64,
) -> Result<DatasetManifest, DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(test_fraction));
    }
    let mut out = m.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for category in Category::ALL {
        let mut idx: Vec<usize> = (0..out.entries.len())
            .filter(|&i| out.entries[i].category == category)
            .collect();
        if idx.is_empty() {
            continue;
        }
        idx.sort_by(|&a, &b| out.entries[a].id.cmp(&out.entries[b].id));
        // Fisher-Yates with the shared stream so categories stay independent of input order
        for i in (1..idx.len()).rev() {
            let j = rng.random_range(0..=i);
            idx.swap(i, j);
        }
        let n_test = test_count(idx.len(), test_fraction);
        if n_test == 0 {
            log::warn!(
                "category {category} has {} entries, too few for a test item at fraction {test_fraction}",
                idx.len()
            );
        }
        for (rank, &i) in idx.iter().enumerate() {
            out.entries[i].split = if rank < n_test { Split::Test } else { Split::Train };
        }
    }
    out.seed = Some(seed);
    out.test_fraction = Some(test_fraction);
    Ok(out)
}

/// Adds three rotated copies (1, 2, 3 quarter turns) of every original train
/// entry, writing the rotated images into `output_dir`. Test entries are left
/// alone.
pub fn augment_rotations(
    m: &DatasetManifest,
    output_dir: impl AsRef<Path>,
) -> Result<DatasetManifest, DatasetError> {
    let output_dir = output_dir.as_ref();
    if let Some(e) = m.entries.iter().find(|e| e.split == Split::Unassigned) {
        return Err(DatasetError::SplitNotAssigned(e.id.clone()));
    }
    let sources: Vec<&DatasetEntry> = m
        .entries
        .iter()
        .filter(|e| e.split == Split::Train && e.parent.is_none())
        .collect();
    if sources.is_empty() {
        return Ok(m.clone());
    }

    let mut ids: HashSet<String> = m.entries.iter().map(|e| e.id.clone()).collect();
    for e in &sources {
        for turns in 1..4 {
            let id = rotated_id(&e.id, turns);
            if !ids.insert(id.clone()) {
                return Err(DatasetError::IdCollision(id));
            }
        }
    }

    let tex_dir = output_dir.join("textures");
    let hf_dir = output_dir.join("heightfields");
    for d in [&tex_dir, &hf_dir] {
        std::fs::create_dir_all(d).map_err(io_err(d))?;
    }
    let abs_root = absolute(&m.root);
    let generated = par::map_slice(&sources, |e| -> Result<Vec<DatasetEntry>, DatasetError> {
        let (texture, height) = m.load_pair(e)?;
        let mut out = Vec::with_capacity(3);
        for turns in 1..4 {
            let id = rotated_id(&e.id, turns);
            let tp = tex_dir.join(format!("{id}.png"));
            let hp = hf_dir.join(format!("{id}.png"));
            save_texture(&texture.rotate90(turns), &tp).map_err(image_err(&tp))?;
            save_heightfield(&height.rotate90(turns), &hp, height.source_depth())
                .map_err(image_err(&hp))?;
            out.push(DatasetEntry {
                id,
                texture_path: relative_to(&absolute(&tp), &abs_root),
                heightfield_path: relative_to(&absolute(&hp), &abs_root),
                category: e.category,
                split: Split::Train,
                parent: Some(e.id.clone()),
                quarter_turns: turns,
            });
        }
        Ok(out)
    });

    let mut out = m.clone();
    for batch in generated {
        out.entries.extend(batch?);
    }
    Ok(out)
}

fn rotated_id(id: &str, quarter_turns: u32) -> String {
    format!("{id}_rot{}", 90 * quarter_turns)
}

/// Writes `n` synthetic pairs plus `manifest.json` into `output_dir`.
///
/// Heights are sums of randomly oriented sinusoids (band-limited, min-max
/// normalized to `[0, 1]`). Textures are two-colour stripe or checker
/// patterns drawn from an independent random stream, so texture luminance
/// carries almost no information about height. Categories are assigned
/// round-robin.
pub fn generate_synthetic_corpus(
    n: usize,
    resolution: usize,
    seed: u64,
    output_dir: impl AsRef<Path>,
) -> Result<DatasetManifest, DatasetError> {
    if n == 0 {
        return Err(DatasetError::EmptyCorpus);
    }
    let output_dir = output_dir.as_ref();
    let tex_dir = output_dir.join("textures");
    let hf_dir = output_dir.join("heightfields");
    for d in [&tex_dir, &hf_dir] {
        std::fs::create_dir_all(d).map_err(io_err(d))?;
    }
    let entries = par::map_range(n, |i| -> Result<DatasetEntry, DatasetError> {
        let category = Category::ALL[i % Category::ALL.len()];
        let id = format!("{}_{:04}", category.slug(), i / Category::ALL.len());
        let (texture, height) = synthetic_pair(resolution, seed, i as u64);
        let tp = tex_dir.join(format!("{id}.png"));
        let hp = hf_dir.join(format!("{id}.png"));
        save_texture(&texture, &tp).map_err(image_err(&tp))?;
        save_heightfield(&height, &hp, BitDepth::Sixteen).map_err(image_err(&hp))?;
        Ok(DatasetEntry {
            texture_path: Path::new("textures").join(format!("{id}.png")),
            heightfield_path: Path::new("heightfields").join(format!("{id}.png")),
            id,
            category,
            split: Split::Unassigned,
            parent: None,
            quarter_turns: 0,
        })
    });
    let entries = entries.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut m = DatasetManifest::new(output_dir, entries);
    m.seed = Some(seed);
    m.save(output_dir.join(MANIFEST_FILE))?;
    Ok(m)
}

/// One synthetic `(texture, heightfield)` pair; entry `index` draws from its
/// own ChaCha stream so generation order does not matter.
pub fn synthetic_pair(resolution: usize, seed: u64, index: u64) -> (TextureImage, Heightfield) {
    let res = resolution.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index);
    let height = band_limited_noise(res, &mut rng);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index + 1);
    let texture = two_colour_pattern(res, &mut rng);
    (texture, height)
}

fn band_limited_noise(res: usize, rng: &mut ChaCha8Rng) -> Heightfield {
    let waves: Vec<(f64, f64, f64, f64)> = (0..8)
        .map(|_| {
            let cycles = rng.random_range(1.0..7.0);
            let angle = rng.random_range(0.0..TAU);
            let phase = rng.random_range(0.0..TAU);
            (cycles * angle.cos(), cycles * angle.sin(), phase, 1.0 / cycles)
        })
        .collect();
    let raw: Vec<f64> = (0..res * res)
        .map(|k| {
            let x = (k % res) as f64 / res as f64;
            let y = (k / res) as f64 / res as f64;
            waves
                .iter()
                .map(|&(fx, fy, ph, amp)| amp * (TAU * (fx * x + fy * y) + ph).sin())
                .sum()
        })
        .collect();
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    Heightfield::from_fn(res, res, |x, y| (raw[y * res + x] - lo) / span)
}

fn two_colour_pattern(res: usize, rng: &mut ChaCha8Rng) -> TextureImage {
    // resample until the colours differ clearly in luminance
    let (a, b) = loop {
        let a: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let b: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        if (luma(a) - luma(b)).abs() > 0.25 {
            break (a, b);
        }
    };
    let checker = rng.random_bool(0.5);
    let cycles = rng.random_range(4.0..12.0);
    let angle = rng.random_range(0.0..TAU);
    let phase = rng.random_range(0.0..TAU);
    let (c, s) = (angle.cos(), angle.sin());
    TextureImage::from_fn(res, res, |x, y| {
        let (u, v) = (x as f64 / res as f64, y as f64 / res as f64);
        let along = (TAU * cycles * (c * u + s * v) + phase).sin();
        let on = if checker {
            let across = (TAU * cycles * (-s * u + c * v) + phase).sin();
            along * across > 0.0
        } else {
            along > 0.0
        };
        if on {
            a
        } else {
            b
        }
    })
}

fn luma(c: [f64; 3]) -> f64 {
    0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]
}
