// Metric fixtures: hand-computed RMS/MSE and frozen scikit-image SSIM values
// (see reference.py). Shared with the acceptance suite via `#[path]`.

use tactile_core::metrics::{mse, rms_roughness, ssim, SSIM_K1};
use tactile_core::{BitDepth, Heightfield};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub got: f64,
    pub expected: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.got - self.expected).abs() <= self.tol
    }
}

pub const HAND_TOL: f64 = 1e-9;
pub const SSIM_TOL: f64 = 1e-6;

pub fn pattern(kind: &str, w: usize, h: usize) -> Heightfield {
    Heightfield::from_fn(w, h, |xi, yi| {
        let (x, y) = (xi as f64, yi as f64);
        match kind {
            "waves" => (0.5 + 0.3 * (0.37 * x + 0.11 * y).sin() + 0.15 * (0.23 * x - 0.41 * y).cos())
                .clamp(0.0, 1.0),
            "hash" => (((xi as i64 * 73856093) ^ (yi as i64 * 19349663)) % 1000) as f64 / 999.0,
            "ramp" => x / (w - 1) as f64,
            "blobs" => (0.5 + 0.45 * (0.2 * x).sin() * (0.15 * y).cos()).clamp(0.0, 1.0),
            _ => panic!("unknown pattern {kind}"),
        }
    })
}

/// scikit-image `structural_similarity(gaussian_weights=True, sigma=1.5,
/// use_sample_covariance=False, data_range=1)`.
pub const SSIM_REFERENCE: [(&str, &str, usize, usize, f64); 5] = [
    ("waves", "blobs", 32, 32, -0.05250200085231111),
    ("waves", "hash", 24, 20, -0.0014452996265354949),
    ("ramp", "waves", 16, 12, -0.5692444142590298),
    ("hash", "blobs", 40, 31, 0.014968371882204548),
    ("ramp", "hash", 11, 11, -0.2687808353304017),
];

fn field(w: usize, h: usize, v: &[f64]) -> Heightfield {
    Heightfield::new(w, h, v.to_vec(), BitDepth::Sixteen).unwrap()
}

pub fn rms_mse_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: &str, got: f64, expected: f64| {
        out.push(Check {
            name: name.into(),
            got,
            expected,
            tol: HAND_TOL,
        })
    };
    // mean 0.5, deviations +-0.5
    push("rms(0,1,0,1)", rms_roughness(&field(2, 2, &[0.0, 1.0, 0.0, 1.0])), 0.5);
    // mean 0.4; squared deviations .16 .01 .01 .16 0 0
    let v = [0.0, 0.3, 0.5, 0.8, 0.4, 0.4];
    push("rms(6 values)", rms_roughness(&field(3, 2, &v)), (0.34f64 / 6.0).sqrt());
    push("rms(constant)", rms_roughness(&Heightfield::constant(7, 3, 0.37)), 0.0);
    push("mse(a,a)", mse(&field(2, 2, &[0.1, 0.2, 0.3, 0.4]), &field(2, 2, &[0.1, 0.2, 0.3, 0.4])), 0.0);
    push("mse(0,1)", mse(&Heightfield::constant(3, 3, 0.0), &Heightfield::constant(3, 3, 1.0)), 1.0);
    // diffs .1 .2 .3 .4 -> (.01+.04+.09+.16)/4
    push(
        "mse(4 values)",
        mse(&field(2, 2, &[0.1, 0.2, 0.3, 0.4]), &field(2, 2, &[0.0, 0.0, 0.0, 0.0])),
        0.075,
    );
    out
}

pub fn ssim_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (ka, kb, w, h, expected) in SSIM_REFERENCE {
        out.push(Check {
            name: format!("ssim({ka}, {kb}, {w}x{h})"),
            got: ssim(&pattern(ka, w, h), &pattern(kb, w, h)).unwrap(),
            expected,
            tol: SSIM_TOL,
        });
    }
    let c1 = SSIM_K1 * SSIM_K1;
    out.push(Check {
        name: "ssim(constant 0, constant 1)".into(),
        got: ssim(&Heightfield::constant(16, 16, 0.0), &Heightfield::constant(16, 16, 1.0)).unwrap(),
        expected: c1 / (1.0 + c1),
        tol: SSIM_TOL,
    });
    out
}
