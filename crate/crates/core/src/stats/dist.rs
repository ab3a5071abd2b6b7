//! Distribution functions used by the tests.
//!
//! Student t, F and chi-square come from `statrs`. The studentized range
//! distribution has no closed form and is integrated here.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, StudentsT};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::StatsError;

fn check_df(df: f64) -> Result<(), StatsError> {
    if df > 0.0 && !df.is_nan() {
        Ok(())
    } else {
        Err(StatsError::InvalidDf(df))
    }
}

pub fn student_t_cdf(t: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    Ok(StudentsT::new(0.0, 1.0, df)
        .map_err(|_| StatsError::InvalidDf(df))?
        .cdf(t))
}

/// Upper tail `P(T > t)`.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    Ok(StudentsT::new(0.0, 1.0, df)
        .map_err(|_| StatsError::InvalidDf(df))?
        .sf(t))
}

pub fn f_cdf(x: f64, df1: f64, df2: f64) -> Result<f64, StatsError> {
    check_df(df1)?;
    check_df(df2)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(FisherSnedecor::new(df1, df2)
        .map_err(|_| StatsError::InvalidDf(df1.min(df2)))?
        .cdf(x))
}

pub fn f_sf(x: f64, df1: f64, df2: f64) -> Result<f64, StatsError> {
    check_df(df1)?;
    check_df(df2)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    Ok(FisherSnedecor::new(df1, df2)
        .map_err(|_| StatsError::InvalidDf(df1.min(df2)))?
        .sf(x))
}

pub fn chisq_cdf(x: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(ChiSquared::new(df).map_err(|_| StatsError::InvalidDf(df))?.cdf(x))
}

pub fn chisq_sf(x: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    Ok(ChiSquared::new(df).map_err(|_| StatsError::InvalidDf(df))?.sf(x))
}

#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[inline]
fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule, as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod (G7/K15) quadrature with bisection.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gauss_kronrod(f, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let mid = 0.5 * (a + b);
    integrate(f, a, mid, 0.5 * tol, depth - 1) + integrate(f, mid, b, 0.5 * tol, depth - 1)
}

/// Probability that the range of `k` standard normals is at most `w`.
fn normal_range_cdf(w: f64, k: u32) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let f = |z: f64| normal_pdf(z) * (normal_cdf(z) - normal_cdf(z - w)).powi(km1);
    // the normal density is below 1e-16 outside [-8.5, 8.5]
    let mut pts = vec![-8.5, -3.0, 0.0, 3.0, 8.5];
    if (0.5 * w) < 8.5 {
        pts.push(0.5 * w);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let total: f64 = pts
        .windows(2)
        .map(|s| integrate(&f, s[0], s[1], 1e-13, 30))
        .sum();
    (k as f64 * total).clamp(0.0, 1.0)
}

/// `P(Q <= q)` for the studentized range of `k` means with `df` degrees of
/// freedom.
///
/// The outer integral runs over the scaled chi variable `s = sqrt(X / df)`
/// with `X ~ chi2(df)`, the inner one over the normal range:
/// `P(Q <= q) = int f_s(s) P(R_k <= q s) ds`. Both use adaptive G7/K15
/// quadrature; the outer domain is split at multiples of the chi standard
/// deviation around its mode. Absolute error is at most 1e-6 for
/// `2 <= k <= 10` and `df >= 2`.
pub fn studentized_range_cdf(q: f64, k: u32, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    if k < 2 {
        return Err(StatsError::InvalidParameter(format!(
            "studentized range needs k >= 2, got {k}"
        )));
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    if df > 1e7 {
        return Ok(normal_range_cdf(q, k));
    }
    let half = 0.5 * df;
    let log_norm = half * df.ln() - ln_gamma(half) - (half - 1.0) * std::f64::consts::LN_2;
    let density = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (log_norm + (df - 1.0) * s.ln() - half * s * s).exp()
    };
    let integrand = |s: f64| {
        let d = density(s);
        if d < 1e-300 {
            0.0
        } else {
            d * normal_range_cdf(q * s, k)
        }
    };

    let mode = ((df - 1.0).max(0.0) / df).sqrt();
    let sd = (1.0 / (2.0 * df)).sqrt().max(1e-6);
    let mut pts = vec![0.0];
    for m in [-32.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        let x = mode + m * sd;
        if x > 0.0 {
            pts.push(x);
        }
    }
    // long right tail for very small df
    let tail = if df < 4.0 { 60.0 / df.sqrt() + mode } else { mode + 64.0 * sd };
    pts.push(tail.max(mode + 64.0 * sd));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let total: f64 = pts
        .windows(2)
        .map(|s| integrate(&integrand, s[0], s[1], 1e-11, 24))
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Upper tail `P(Q > q)`.
pub fn studentized_range_sf(q: f64, k: u32, df: f64) -> Result<f64, StatsError> {
    Ok((1.0 - studentized_range_cdf(q, k, df)?).clamp(0.0, 1.0))
}

/// Inverse of [`studentized_range_cdf`] by bisection.
pub fn studentized_range_quantile(p: f64, k: u32, df: f64) -> Result<f64, StatsError> {
    if !(0.0..1.0).contains(&p) {
        return Err(StatsError::InvalidParameter(format!(
            "probability must lie in [0, 1), got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 4.0;
    while studentized_range_cdf(hi, k, df)? < p {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(StatsError::InvalidParameter("quantile search diverged".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if studentized_range_cdf(mid, k, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
