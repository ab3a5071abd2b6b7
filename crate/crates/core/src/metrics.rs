//! Fidelity metrics between heightfields.
//!
//! When two fields differ in size the second is bilinearly resampled to the
//! first before comparing.

use serde::{Deserialize, Serialize};

use crate::heightfield::Heightfield;
use crate::par;

/// Side of the square SSIM window.
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("image {width}x{height} is smaller than the {window}x{window} SSIM window")]
    TooSmall {
        width: usize,
        height: usize,
        window: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rms_a: f64,
    pub rms_b: f64,
    pub mse: f64,
    pub ssim: f64,
    /// Pearson correlation of the pixel values.
    pub pearson: f64,
    /// `(width, height)` the comparison ran at.
    pub resolution: (usize, usize),
}

/// Mean-centered RMS (Rq) of the heights.
pub fn rms_roughness(h: &Heightfield) -> f64 {
    centered_rms(h.values())
}

pub(crate) fn centered_rms(values: &[f64]) -> f64 {
    // shifted by the first value so constant input gives exactly 0
    let Some(&shift) = values.first() else {
        return 0.0;
    };
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v - shift).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - shift - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

fn matched<'a>(a: &Heightfield, b: &'a Heightfield) -> std::borrow::Cow<'a, Heightfield> {
    if a.dims() == b.dims() {
        std::borrow::Cow::Borrowed(b)
    } else {
        std::borrow::Cow::Owned(b.resample(a.width(), a.height()))
    }
}

/// Mean squared difference of normalized heights.
pub fn mse(a: &Heightfield, b: &Heightfield) -> f64 {
    let b = matched(a, b);
    let n = a.values().len() as f64;
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        / n
}

/// Normalized 1D Gaussian kernel of [`SSIM_WINDOW`] taps.
pub fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, w) in k.iter_mut().enumerate() {
        let x = i as f64 - r;
        *w = (-0.5 * x * x / (SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.map(|w| w / sum)
}

/// Mean SSIM over every window position that fits inside the image, with an
/// 11x11 Gaussian window (sigma 1.5) and dynamic range 1.
pub fn ssim(a: &Heightfield, b: &Heightfield) -> Result<f64, MetricError> {
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricError::TooSmall {
            width: w,
            height: h,
            window: SSIM_WINDOW,
        });
    }
    let b = matched(a, b);
    let (av, bv) = (a.values(), b.values());
    let kernel = gaussian_kernel();
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;

    // horizontal pass: five moment maps of size ow x h
    let horizontal: Vec<[f64; 5]> = par::map_range(ow * h, |idx| {
        let (x, y) = (idx % ow, idx / ow);
        let mut m = [0.0; 5];
        for (k, &wk) in kernel.iter().enumerate() {
            let i = y * w + x + k;
            let (p, q) = (av[i], bv[i]);
            m[0] += wk * p;
            m[1] += wk * q;
            m[2] += wk * p * p;
            m[3] += wk * q * q;
            m[4] += wk * p * q;
        }
        m
    });

    let rows: Vec<f64> = par::map_range(oh, |y| {
        let mut total = 0.0;
        for x in 0..ow {
            let mut m = [0.0; 5];
            for (k, &wk) in kernel.iter().enumerate() {
                let src = horizontal[(y + k) * ow + x];
                for c in 0..5 {
                    m[c] += wk * src[c];
                }
            }
            let [mu_a, mu_b, aa, bb, ab] = m;
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
        total
    });
    Ok(rows.iter().sum::<f64>() / (ow * oh) as f64)
}

/// Pearson correlation of two equally long samples. Zero variance gives 0.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson needs equal lengths");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// All metrics of `b` against `a` at `a`'s resolution.
pub fn compare(a: &Heightfield, b: &Heightfield) -> Result<MetricReport, MetricError> {
    let b_matched = matched(a, b);
    Ok(MetricReport {
        rms_a: rms_roughness(a),
        rms_b: rms_roughness(b),
        mse: mse(a, &b_matched),
        ssim: ssim(a, &b_matched)?,
        pearson: pearson(a.values(), b_matched.values()),
        resolution: a.dims(),
    })
}
