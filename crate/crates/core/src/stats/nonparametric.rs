use super::dist::{chisq_sf, normal_cdf, student_t_sf};
use super::{FriedmanResult, Sample, SpearmanResult, StatsError, WilcoxonMethod, WilcoxonResult};

/// Largest number of non-zero differences for which the Wilcoxon p-value is
/// computed from the exact null distribution.
pub const EXACT_WILCOXON_MAX_N: usize = 15;

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of tie groups among `values` (groups of one included).
fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        sizes.push(j - i + 1);
        i = j + 1;
    }
    sizes
}

fn tie_term(values: &[f64]) -> f64 {
    tie_sizes(values)
        .into_iter()
        .map(|t| (t * t * t - t) as f64)
        .sum()
}

/// Friedman rank test over a `subjects x conditions` matrix.
///
/// Rows are ranked independently with average ranks for ties and the
/// statistic is divided by the usual tie correction. If every row is fully
/// tied the statistic is 0.
pub fn friedman(ratings: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let n = ratings.len();
    if n < 2 {
        return Err(StatsError::InvalidParameter(format!(
            "friedman needs at least 2 subjects, got {n}"
        )));
    }
    let k = ratings[0].len();
    if k < 2 {
        return Err(StatsError::InvalidParameter(format!(
            "friedman needs at least 2 conditions, got {k}"
        )));
    }
    if let Some(row) = ratings.iter().find(|r| r.len() != k) {
        return Err(StatsError::LengthMismatch(row.len(), k));
    }
    if ratings.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite("ratings".into()));
    }

    let mut rank_sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in ratings {
        for (s, r) in rank_sums.iter_mut().zip(average_ranks(row)) {
            *s += r;
        }
        ties += tie_term(row);
    }
    let (nf, kf) = (n as f64, k as f64);
    let center = (kf + 1.0) / 2.0;
    let raw = 12.0 * nf / (kf * (kf + 1.0))
        * rank_sums
            .iter()
            .map(|s| (s / nf - center).powi(2))
            .sum::<f64>();
    let correction = 1.0 - ties / (nf * (kf * kf * kf - kf));
    let chi2 = if correction <= 0.0 { 0.0 } else { raw / correction };
    let df = kf - 1.0;
    Ok(FriedmanResult {
        chi2,
        df,
        p: chisq_sf(chi2, df)?,
    })
}

/// Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped. `w = min(W+, W-)`. Up to
/// [`EXACT_WILCOXON_MAX_N`] remaining pairs the two-sided p-value comes from
/// the exact permutation distribution of the (tie-averaged) ranks; above it
/// from the normal approximation with tie-corrected variance and a 0.5
/// continuity correction.
pub fn wilcoxon_signed_rank(a: &Sample, b: &Sample) -> Result<WilcoxonResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    a.check(1)?;
    b.check(1)?;
    let diffs: Vec<f64> = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w: 0.0,
            n_effective: 0,
            p: 1.0,
            method: WilcoxonMethod::Degenerate,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .fold(0.0, |acc, (_, r)| acc + r);
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);

    if n <= EXACT_WILCOXON_MAX_N {
        let p = exact_signed_rank_p(&ranks, w);
        return Ok(WilcoxonResult {
            w,
            n_effective: n,
            p,
            method: WilcoxonMethod::Exact,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = (nf * (nf + 1.0) * (2.0 * nf + 1.0) - tie_term(&abs) / 2.0) / 24.0;
    let d = w_plus - mean;
    let z = (d - 0.5 * d.signum()) / var.sqrt();
    let p = (2.0 * normal_cdf(-z.abs())).min(1.0);
    Ok(WilcoxonResult {
        w,
        n_effective: n,
        p,
        method: WilcoxonMethod::Normal,
    })
}

/// `min(1, 2 P(S <= w))` where `S` is the sum of a uniformly random subset of
/// `ranks`. Ranks are multiples of 1/2, so the distribution is counted over
/// doubled integer ranks.
fn exact_signed_rank_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (2.0 * w).round() as usize;
    let below: u64 = counts[..=limit.min(max)].iter().sum();
    let total = 2f64.powi(ranks.len() as i32);
    (2.0 * below as f64 / total).min(1.0)
}

/// Holm step-down adjustment with family size equal to the number of p-values.
pub fn holm_correct(pvalues: &[f64]) -> Result<Vec<f64>, StatsError> {
    holm_correct_with_family(pvalues, pvalues.len())
}

/// Holm step-down adjustment for `pvalues` drawn from a family of `m`
/// comparisons (`m >= pvalues.len()`). Output is in input order.
pub fn holm_correct_with_family(pvalues: &[f64], m: usize) -> Result<Vec<f64>, StatsError> {
    if m < pvalues.len() {
        return Err(StatsError::InvalidParameter(format!(
            "family size {m} is smaller than the {} p-values given",
            pvalues.len()
        )));
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::InvalidParameter(format!(
            "p-value {p} outside [0, 1]"
        )));
    }
    let mut order: Vec<usize> = (0..pvalues.len()).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let mut adjusted = vec![0.0; pvalues.len()];
    let mut running = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64 * pvalues[idx]).min(1.0);
        running = running.max(scaled);
        adjusted[idx] = running;
    }
    Ok(adjusted)
}

/// Spearman rank correlation with a t-distribution p-value on `n - 2` df.
pub fn spearman(a: &Sample, b: &Sample) -> Result<SpearmanResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    a.check(3)?;
    b.check(3)?;
    let ra = average_ranks(&a.values);
    let rb = average_ranks(&b.values);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 {
        return Err(StatsError::ZeroVariance(a.label.clone()));
    }
    if sbb == 0.0 {
        return Err(StatsError::ZeroVariance(b.label.clone()));
    }
    let rho = (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0);
    if (1.0 - rho.abs()) < 1e-12 {
        return Ok(SpearmanResult { rho: rho.signum(), p: 0.0 });
    }
    let df = n - 2.0;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let p = (2.0 * student_t_sf(t.abs(), df)?).min(1.0);
    Ok(SpearmanResult { rho, p })
}
