use super::dist::{f_sf, student_t_sf, studentized_range_sf};
use super::{AnovaResult, GamesHowellEntry, Sample, StatsError, TTestResult};

/// Squared standard error of the mean.
fn se2(s: &Sample) -> f64 {
    s.variance() / s.len() as f64
}

fn welch_df(a: &Sample, b: &Sample) -> f64 {
    let (va, vb) = (se2(a), se2(b));
    (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64)
}

/// Welch's unequal-variance t-test.
///
/// When both samples are constant with equal means the statistic is defined
/// as `t = 0, p = 1` (with pooled df `n_a + n_b - 2`).
pub fn welch_t(a: &Sample, b: &Sample) -> Result<TTestResult, StatsError> {
    a.check(2)?;
    b.check(2)?;
    let diff = a.mean() - b.mean();
    let denom2 = se2(a) + se2(b);
    if denom2 == 0.0 {
        if diff == 0.0 {
            return Ok(TTestResult {
                t: 0.0,
                df: (a.len() + b.len() - 2) as f64,
                p: 1.0,
            });
        }
        return Err(StatsError::UndefinedStatistic);
    }
    let t = diff / denom2.sqrt();
    let df = welch_df(a, b);
    let p = (2.0 * student_t_sf(t.abs(), df)?).min(1.0);
    Ok(TTestResult { t, df, p })
}

fn check_groups(groups: &[Sample]) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::InvalidParameter(format!(
            "need at least 2 groups, got {}",
            groups.len()
        )));
    }
    for g in groups {
        g.check(2)?;
        if g.variance() == 0.0 {
            return Err(StatsError::ZeroVariance(g.label.clone()));
        }
    }
    Ok(())
}

/// Welch's heteroscedastic one-way ANOVA.
pub fn welch_anova(groups: &[Sample]) -> Result<AnovaResult, StatsError> {
    check_groups(groups)?;
    let k = groups.len() as f64;
    let weights: Vec<f64> = groups.iter().map(|g| g.len() as f64 / g.variance()).collect();
    let means: Vec<f64> = groups.iter().map(Sample::mean).collect();
    let total_w: f64 = weights.iter().sum();
    let grand = weights.iter().zip(&means).map(|(w, m)| w * m).sum::<f64>() / total_w;

    let between = weights
        .iter()
        .zip(&means)
        .map(|(w, m)| w * (m - grand).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    let lambda = groups
        .iter()
        .zip(&weights)
        .map(|(g, w)| (1.0 - w / total_w).powi(2) / (g.len() - 1) as f64)
        .sum::<f64>();
    let correction = 1.0 + 2.0 * (k - 2.0) / (k * k - 1.0) * lambda;
    let f = between / correction;
    let df1 = k - 1.0;
    let df2 = (k * k - 1.0) / (3.0 * lambda);
    let p = f_sf(f, df1, df2)?;
    Ok(AnovaResult { f, df1, df2, p })
}

/// Games-Howell pairwise comparisons, in `(i, j)` order with `i < j`.
///
/// `t = |mean_i - mean_j| / sqrt(s_i^2/n_i + s_j^2/n_j)` with Welch df and
/// `p = P(Q >= t * sqrt(2))` for the studentized range of all `k` groups.
pub fn games_howell(groups: &[Sample]) -> Result<Vec<GamesHowellEntry>, StatsError> {
    check_groups(groups)?;
    let k = groups.len() as u32;
    let mut out = Vec::with_capacity(groups.len() * (groups.len() - 1) / 2);
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let (a, b) = (&groups[i], &groups[j]);
            let mean_diff = a.mean() - b.mean();
            let t = mean_diff.abs() / (se2(a) + se2(b)).sqrt();
            let df = welch_df(a, b);
            let p = studentized_range_sf(t * std::f64::consts::SQRT_2, k, df)?;
            out.push(GamesHowellEntry {
                pair: (a.label.clone(), b.label.clone()),
                mean_diff,
                t,
                df,
                p,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(label: &str, v: &[f64]) -> Sample {
        Sample::new(label, v.to_vec())
    }

    #[test]
    fn identical_samples() {
        let a = s("a", &[1.0, 2.0, 4.0]);
        let r = welch_t(&a, &a.clone()).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
    }

    #[test]
    fn swap_negates_t() {
        let a = s("a", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = s("b", &[2.0, 4.0, 6.0, 8.0, 10.0]);
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        assert_eq!(ab.t, -ba.t);
        assert_eq!(ab.p, ba.p);
        assert_eq!(ab.df, ba.df);
    }

    #[test]
    fn constant_samples() {
        let a = s("a", &[2.0, 2.0, 2.0]);
        let r = welch_t(&a, &s("b", &[2.0, 2.0])).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        assert!(matches!(
            welch_t(&a, &s("b", &[3.0, 3.0])),
            Err(StatsError::UndefinedStatistic)
        ));
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            welch_t(&s("a", &[1.0]), &s("b", &[1.0, 2.0])),
            Err(StatsError::TooFewValues { .. })
        ));
    }

    #[test]
    fn anova_names_zero_variance_group() {
        let err = welch_anova(&[s("ok", &[1.0, 2.0]), s("flat", &[3.0, 3.0, 3.0])]).unwrap_err();
        assert_eq!(err, StatsError::ZeroVariance("flat".into()));
    }

    #[test]
    fn anova_identical_groups() {
        let g = s("g", &[1.0, 2.5, 4.0, 3.0]);
        let r = welch_anova(&[g.clone(), g.clone(), g]).unwrap();
        assert!(r.f.abs() < 1e-20);
        assert!((r.p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn anova_two_groups_is_t_squared() {
        let a = s("a", &[0.12, 0.35, 0.28, 0.41, 0.19, 0.33]);
        let b = s("b", &[0.52, 0.47, 0.61, 0.39, 0.58]);
        let t = welch_t(&a, &b).unwrap();
        let f = welch_anova(&[a, b]).unwrap();
        assert!((f.f - t.t * t.t).abs() < 1e-9);
        assert!((f.df2 - t.df).abs() < 1e-9);
        assert!((f.p - t.p).abs() < 1e-9);
    }

    #[test]
    fn games_howell_identical_pair() {
        let out = games_howell(&[s("g", &[1.0, 2.0, 3.0]), s("h", &[1.0, 2.0, 3.0])]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].t, 0.0);
        assert_eq!(out[0].p, 1.0);
    }

    #[test]
    fn games_howell_two_groups_matches_welch() {
        let a = s("a", &[3.0, 3.0, 4.0, 5.0, 7.0, 8.0, 12.0]);
        let b = s("b", &[1.0, 2.0, 2.0, 3.0]);
        let t = welch_t(&a, &b).unwrap();
        let gh = games_howell(&[a, b]).unwrap();
        assert!((gh[0].p - t.p).abs() < 2e-3);
        assert!((gh[0].t - t.t.abs()).abs() < 1e-12);
    }
}
