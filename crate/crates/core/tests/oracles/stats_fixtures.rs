// Frozen outputs of reference.py (scipy / statsmodels), shared by the core
// oracle tests and the acceptance suite via `#[path]`.

use tactile_core::stats::dist::{
    chisq_cdf, f_cdf, student_t_cdf, studentized_range_cdf, studentized_range_quantile,
};
use tactile_core::stats::{
    friedman, games_howell, holm_correct, spearman, welch_anova, welch_t, wilcoxon_signed_rank,
    Sample, WilcoxonMethod,
};

/// One compared number.
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

fn check(out: &mut Vec<Check>, name: impl Into<String>, got: f64, expected: f64, tol: f64) {
    out.push(Check {
        name: name.into(),
        got,
        expected,
        tol,
    });
}

fn s(label: &str, v: &[f64]) -> Sample {
    Sample::new(label, v.to_vec())
}

pub const TOL: f64 = 1e-6;
pub const GAMES_HOWELL_TOL: f64 = 1e-3;
pub const TABLE_TOL: f64 = 1e-2;

type Pair = (&'static [f64], &'static [f64]);

pub const WELCH_T: [(Pair, [f64; 3]); 5] = [
    ((&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 6.0, 8.0, 10.0]), [-1.8973665961010275, 5.882352941176471, 0.10753119493062718]),
    ((&[0.12, 0.35, 0.28, 0.41, 0.19, 0.33], &[0.52, 0.47, 0.61, 0.39, 0.58]), [-3.9670515001579147, 8.999999586973509, 0.0032691939099937944]),
    ((&[10.1, 9.8, 10.4, 10.0, 9.9, 10.2, 10.3], &[9.5, 10.9, 8.7, 11.2, 10.0]), [0.08621276984723202, 4.256859682165062, 0.9352017076222143]),
    ((&[3.0, 3.0, 4.0, 5.0, 7.0, 8.0, 12.0], &[1.0, 2.0, 2.0, 3.0]), [3.076489676952349, 7.211731044349071, 0.017252819241417233]),
    ((&[-1.5, 0.2, 0.8, 2.1], &[-0.3, 0.1, 0.05, -0.2, 0.4, 0.0]), [0.519503545729629, 3.108578071824087, 0.6381430192800945]),
];

pub const ANOVA_GROUPS: [&[&[f64]]; 5] = [
    &[&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 6.0, 8.0, 10.0], &[3.0, 3.5, 4.0, 4.5, 5.5]],
    &[&[0.12, 0.35, 0.28, 0.41, 0.19, 0.33], &[0.52, 0.47, 0.61, 0.39, 0.58], &[0.31, 0.29, 0.45, 0.22]],
    &[&[10.1, 9.8, 10.4, 10.0, 9.9], &[9.5, 10.9, 8.7, 11.2, 10.0, 10.4], &[12.0, 11.1, 13.2], &[9.9, 10.0, 10.1, 10.05]],
    &[&[3.0, 3.0, 4.0, 5.0, 7.0, 8.0, 12.0], &[1.0, 2.0, 2.0, 3.0], &[6.0, 9.0, 4.0, 7.0]],
    &[&[0.21, 0.25, 0.19, 0.30, 0.27, 0.22], &[0.41, 0.12, 0.33, 0.29, 0.50, 0.18], &[0.26, 0.24, 0.28, 0.25, 0.27]],
];

/// (F, df1, df2, p)
pub const ANOVA: [[f64; 4]; 5] = [
    [1.8373437660908047, 2.0, 6.946553554913623, 0.22882704087381764],
    [8.458507059790206, 2.0, 7.464378915102893, 0.012061814107266623],
    [3.1841676936963124, 3.0, 5.662467063983863, 0.11072681173823982],
    [10.488066627704539, 2.0, 6.494358009539279, 0.009251107422832711],
    [0.8730321513665273, 2.0, 7.702590879075078, 0.45526299420930166],
];

/// (t, df, p) per pair in (0,1), (0,2), (1,2), ... order.
pub const GAMES_HOWELL: [&[[f64; 3]]; 5] = [
    &[
        [1.8973665961010275, 5.882352941176471, 0.22093717254572998],
        [1.329068605326389, 6.603571114433988, 0.42712340619041345],
        [1.2853691738343032, 4.733722090364321, 0.46378432438192196],
    ],
    &[
        [3.9670515001579147, 8.999999586973509, 0.008254485471932527],
        [0.5748012489295109, 7.114776485546004, 0.8373608474842588],
        [3.159132685899041, 6.246834299283146, 0.04267871493920783],
    ],
    &[
        [0.19608049774530298, 5.73299757058616, 0.9970207796546597],
        [3.339126162825602, 2.115367995807126, 0.17887379608338594],
        [0.2467294029690241, 5.28565573118618, 0.9940926240138073],
        [2.771041006055111, 3.619773984375569, 0.1658382747481647],
        [0.2744073438815635, 5.127541694899137, 0.9919163868517085],
        [3.4234060002674305, 2.019723070294203, 0.17912962470846605],
    ],
    &[
        [3.076489676952349, 7.211731044349071, 0.040510777546757915],
        [0.3096617686426662, 8.734474594791475, 0.9488193156993037],
        [4.024922359499621, 3.9017341040462434, 0.03546026801588498],
    ],
    &[
        [1.0825818012738695, 5.836175596875343, 0.5586305709856644],
        [1.1009637651263615, 6.678932842686295, 0.5446226025227344],
        [0.7745966692414831, 5.150050864699899, 0.7328910761075633],
    ],
];

pub const FRIEDMAN: [(&[&[f64]], [f64; 2]); 5] = [
    (&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]], [6.0, 0.04978706836786395]),
    (
        &[&[3.0, 5.0, 4.0, 2.0], &[4.0, 4.0, 5.0, 1.0], &[2.0, 5.0, 5.0, 3.0], &[3.0, 4.0, 4.0, 2.0], &[1.0, 3.0, 5.0, 4.0], &[5.0, 5.0, 5.0, 5.0]],
        [9.63829787234044, 0.021904717050890955],
    ),
    (
        &[&[7.0, 9.9, 8.5], &[5.3, 5.7, 4.7], &[4.9, 7.6, 5.5], &[8.8, 8.9, 8.1], &[8.7, 8.5, 9.0], &[7.6, 7.4, 7.0], &[6.4, 6.1, 5.8]],
        [2.5714285714285694, 0.27645304662956466],
    ),
    (
        &[&[1.0, 1.0, 2.0, 2.0, 3.0], &[2.0, 1.0, 3.0, 3.0, 3.0], &[1.0, 2.0, 2.0, 4.0, 5.0], &[3.0, 3.0, 3.0, 3.0, 4.0]],
        [12.507936507936519, 0.013947993872688825],
    ),
    (
        &[&[4.0, 3.0], &[5.0, 5.0], &[2.0, 4.0], &[3.0, 6.0], &[1.0, 2.0], &[6.0, 6.0], &[2.0, 5.0], &[3.0, 3.0]],
        [1.8, 0.17971249487899593],
    ),
];

/// (W, p); the last three have tied |differences| and come from sign
/// enumeration.
#[allow(clippy::approx_constant)]
pub const WILCOXON_EXACT: [(Pair, [f64; 2]); 8] = [
    ((&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[2.0, 3.0, 4.0, 5.0, 6.0, 7.0]), [0.0, 0.03125]),
    (
        (&[1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30], &[0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29]),
        [5.0, 0.0390625],
    ),
    (
        (&[125.0, 115.0, 130.0, 140.0, 140.5, 115.2, 140.9, 125.3, 140.1, 135.0], &[110.0, 122.0, 125.0, 120.0, 140.0, 124.0, 123.0, 137.0, 135.0, 145.0]),
        [22.0, 0.625],
    ),
    (
        (&[0.1, 0.5, -0.2, 0.9, 1.4, -0.75, 0.33, 0.61, 1.1, 0.02, -0.4, 0.85], &[0.0; 12]),
        [16.0, 0.0771484375],
    ),
    (
        (
            &[5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.9, 4.8, 5.6, 6.4, 5.0, 5.2, 6.3],
            &[5.0, 5.25, 5.95, 5.15, 5.42, 5.61, 4.71, 5.83, 5.37, 5.06, 5.12, 5.74, 4.91, 5.43, 5.68],
        ),
        [21.0, 0.02557373046875],
    ),
    // same data with one tied |difference| (0.58 twice)
    (
        (
            &[5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.9, 4.8, 5.6, 6.4, 5.0, 5.2, 6.3],
            &[5.0, 5.25, 5.95, 5.15, 5.42, 5.61, 4.72, 5.83, 5.37, 5.06, 5.12, 5.74, 4.91, 5.43, 5.68],
        ),
        [21.0, 0.02496337890625],
    ),
    ((&[3.0, 4.0, 2.0, 5.0, 5.0, 1.0, 4.0, 3.0], &[1.0, 2.0, 2.0, 3.0, 4.0, 2.0, 2.0, 1.0]), [1.5, 0.046875]),
    ((&[2.0, 2.0, 3.0, 4.0, 1.0, 5.0, 3.0], &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 5.0]), [7.0, 0.328125]),
];

pub const WILCOXON_APPROX: [(Pair, [f64; 2]); 3] = [
    (
        (
            &[3.0, 4.0, 2.0, 5.0, 5.0, 1.0, 4.0, 3.0, 4.0, 5.0, 2.0, 3.0, 4.0, 4.0, 5.0, 1.0, 2.0, 3.0, 5.0, 4.0],
            &[2.0, 2.0, 2.0, 3.0, 4.0, 2.0, 2.0, 1.0, 3.0, 3.0, 1.0, 3.0, 2.0, 5.0, 3.0, 2.0, 1.0, 1.0, 4.0, 2.0],
        ),
        [15.0, 0.0016944464320308255],
    ),
    (
        (
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0, 1.0],
            &[0.0, 3.0, 1.0, 4.0, 2.0, 0.0, 3.0, 1.0, 4.0, 2.0, 0.0, 3.0, 1.0, 4.0, 2.0, 0.0, 3.0, 1.0, 4.0, 2.0, 0.0, 3.0, 1.0, 4.0, 2.0, 0.0, 3.0, 1.0, 4.0, 2.0],
        ),
        [112.0, 0.10721811173710738],
    ),
    (
        (
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0],
            &[2.0, 1.0, 5.0, 3.0, 8.0, 4.0, 6.0, 12.0, 7.0, 9.0, 10.0, 15.0, 11.0, 20.0, 13.0, 14.0, 22.0, 16.0],
        ),
        [77.5, 0.7412117482225649],
    ),
];

pub const SPEARMAN: [(Pair, [f64; 2]); 5] = [
    ((&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[2.0, 1.0, 4.0, 3.0, 6.0, 5.0]), [0.8285714285714287, 0.04156268221574334]),
    ((&[1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 4.0, 5.0], &[3.0, 1.0, 2.0, 2.0, 5.0, 4.0, 6.0, 6.0]), [0.7889568540593018, 0.019936718107142433]),
    ((&[0.3, 0.1, 0.9, 0.5, 0.7, 0.2, 0.8], &[10.0, 12.0, 3.0, 7.0, 4.0, 11.0, 6.0]), [-0.9642857142857145, 0.0004541491691941689]),
    (
        (&[5.0, 5.0, 5.0, 6.0, 6.0, 7.0, 8.0, 9.0, 9.0, 10.0], &[1.0, 2.0, 1.0, 3.0, 3.0, 2.0, 5.0, 4.0, 6.0, 6.0]),
        [0.9031426396769454, 0.00034207050289408687],
    ),
    ((&[1.0, 3.0, 2.0, 5.0, 4.0, 6.0], &[5.0, 3.0, 4.0, 1.0, 2.0, 2.0]), [-0.8986451052612952, 0.014888622005580311]),
];

pub const HOLM: [(&[f64], &[f64]); 5] = [
    (&[0.01, 0.04, 0.03], &[0.03, 0.06, 0.06]),
    (&[0.001, 0.2, 0.04, 0.03, 0.5], &[0.005, 0.4, 0.12, 0.12, 0.5]),
    (&[0.05], &[0.05]),
    (&[0.012, 0.012, 0.3, 0.0004, 0.049, 0.9], &[0.06, 0.06, 0.6, 0.0024000000000000002, 0.14700000000000002, 0.9]),
    (&[0.5, 0.45, 0.6, 0.01], &[1.0, 1.0, 1.0, 0.04]),
];

/// (q, k, df, P(Q <= q))
pub const PTUKEY: [(f64, u32, f64, f64); 6] = [
    (3.5, 3, 10.0, 0.9228966891615896),
    (2.0, 2, 5.0, 0.7835627707303147),
    (4.0, 4, 20.0, 0.9529311481626277),
    (5.0, 5, 30.0, 0.9891099811863214),
    (1.0, 3, 3.7, 0.22634294045067335),
    (3.0, 6, 1000.0, 0.7229984266018235),
];

/// Published upper percentage points of the studentized range: (p, k, df, q).
pub const TUKEY_TABLE: [(f64, u32, f64, f64); 6] = [
    (0.95, 3, 10.0, 3.877),
    (0.95, 2, 5.0, 3.635),
    (0.95, 4, 20.0, 3.958),
    (0.95, 5, 30.0, 4.102),
    (0.99, 3, 10.0, 5.270),
    (0.95, 10, 60.0, 4.646),
];

pub fn welch_t_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, ((a, b), [t, df, p])) in WELCH_T.iter().enumerate() {
        let r = welch_t(&s("a", a), &s("b", b)).unwrap();
        check(&mut out, format!("welch_t[{i}].t"), r.t, *t, TOL);
        check(&mut out, format!("welch_t[{i}].df"), r.df, *df, TOL);
        check(&mut out, format!("welch_t[{i}].p"), r.p, *p, TOL);
    }
    out
}

fn groups(set: &[&[f64]]) -> Vec<Sample> {
    set.iter()
        .enumerate()
        .map(|(i, g)| Sample::new(format!("g{i}"), g.to_vec()))
        .collect()
}

pub fn welch_anova_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, (set, [f, df1, df2, p])) in ANOVA_GROUPS.iter().zip(ANOVA).enumerate() {
        let r = welch_anova(&groups(set)).unwrap();
        check(&mut out, format!("welch_anova[{i}].f"), r.f, f, TOL);
        check(&mut out, format!("welch_anova[{i}].df1"), r.df1, df1, TOL);
        check(&mut out, format!("welch_anova[{i}].df2"), r.df2, df2, TOL);
        check(&mut out, format!("welch_anova[{i}].p"), r.p, p, TOL);
    }
    // two groups: F = t^2
    for (i, ((a, b), _)) in WELCH_T.iter().enumerate() {
        let (a, b) = (s("a", a), s("b", b));
        let t = welch_t(&a, &b).unwrap();
        let f = welch_anova(&[a, b]).unwrap();
        check(&mut out, format!("welch_anova_two_groups[{i}].f_minus_t2"), f.f - t.t * t.t, 0.0, 1e-9);
    }
    out
}

pub fn games_howell_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, (set, expected)) in ANOVA_GROUPS.iter().zip(GAMES_HOWELL).enumerate() {
        let r = games_howell(&groups(set)).unwrap();
        assert_eq!(r.len(), expected.len());
        for (j, (e, [t, df, p])) in r.iter().zip(expected).enumerate() {
            check(&mut out, format!("games_howell[{i}][{j}].t"), e.t, *t, TOL);
            check(&mut out, format!("games_howell[{i}][{j}].df"), e.df, *df, TOL);
            check(&mut out, format!("games_howell[{i}][{j}].p"), e.p, *p, GAMES_HOWELL_TOL);
        }
    }
    out
}

pub fn friedman_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, (rows, [chi2, p])) in FRIEDMAN.iter().enumerate() {
        let m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let r = friedman(&m).unwrap();
        check(&mut out, format!("friedman[{i}].chi2"), r.chi2, *chi2, TOL);
        check(&mut out, format!("friedman[{i}].p"), r.p, *p, TOL);
    }
    out
}

pub fn wilcoxon_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let regimes = [
        ("exact", &WILCOXON_EXACT[..], WilcoxonMethod::Exact),
        ("approx", &WILCOXON_APPROX[..], WilcoxonMethod::Normal),
    ];
    for (regime, fixtures, method) in regimes {
        for (i, ((a, b), [w, p])) in fixtures.iter().enumerate() {
            let r = wilcoxon_signed_rank(&s("a", a), &s("b", b)).unwrap();
            assert_eq!(r.method, method, "wilcoxon_{regime}[{i}]");
            check(&mut out, format!("wilcoxon_{regime}[{i}].w"), r.w, *w, TOL);
            check(&mut out, format!("wilcoxon_{regime}[{i}].p"), r.p, *p, TOL);
        }
    }
    out
}

pub fn spearman_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, ((a, b), [rho, p])) in SPEARMAN.iter().enumerate() {
        let r = spearman(&s("a", a), &s("b", b)).unwrap();
        check(&mut out, format!("spearman[{i}].rho"), r.rho, *rho, TOL);
        check(&mut out, format!("spearman[{i}].p"), r.p, *p, TOL);
    }
    out
}

pub fn holm_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, (raw, adjusted)) in HOLM.iter().enumerate() {
        let r = holm_correct(raw).unwrap();
        assert_eq!(r.len(), adjusted.len());
        for (j, (got, expected)) in r.iter().zip(adjusted.iter()).enumerate() {
            check(&mut out, format!("holm[{i}][{j}]"), *got, *expected, TOL);
        }
    }
    out
}

pub fn distribution_checks() -> Vec<Check> {
    let mut out = Vec::new();
    check(&mut out, "t_cdf(1.5, 7)", student_t_cdf(1.5, 7.0).unwrap(), 0.911350756505015, TOL);
    check(&mut out, "t_cdf(-2.3, 3.4)", student_t_cdf(-2.3, 3.4).unwrap(), 0.047309387241470185, TOL);
    check(&mut out, "f_cdf(2.7, 3, 11.5)", f_cdf(2.7, 3.0, 11.5).unwrap(), 0.9053663308620805, TOL);
    check(&mut out, "chisq_cdf(4.2, 5)", chisq_cdf(4.2, 5.0).unwrap(), 0.47900504656859483, TOL);
    for (q, k, df, expected) in PTUKEY {
        let got = studentized_range_cdf(q, k, df).unwrap();
        check(&mut out, format!("ptukey({q}, {k}, {df})"), got, expected, TOL);
    }
    for (p, k, df, q) in TUKEY_TABLE {
        let got = studentized_range_quantile(p, k, df).unwrap();
        check(&mut out, format!("qtukey({p}, {k}, {df})"), got, q, TABLE_TOL);
    }
    out
}

#[allow(dead_code)]
pub fn all_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.extend(welch_t_checks());
    out.extend(welch_anova_checks());
    out.extend(games_howell_checks());
    out.extend(friedman_checks());
    out.extend(wilcoxon_checks());
    out.extend(spearman_checks());
    out.extend(holm_checks());
    out.extend(distribution_checks());
    out
}
