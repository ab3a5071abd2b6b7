"""Reference values for the statistics and SSIM oracle tests.

Run with `python3 reference.py`; the printed constants are frozen into
`stats_oracles.rs` and `metric_oracles.rs`. Uses scipy, statsmodels and
scikit-image as independent implementations.
"""
import itertools
import math

import numpy as np
from scipy import stats
from skimage.metrics import structural_similarity
from statsmodels.stats.multitest import multipletests
from statsmodels.stats.oneway import anova_oneway

WELCH_T = [
    ([1, 2, 3, 4, 5], [2, 4, 6, 8, 10]),
    ([0.12, 0.35, 0.28, 0.41, 0.19, 0.33], [0.52, 0.47, 0.61, 0.39, 0.58]),
    ([10.1, 9.8, 10.4, 10.0, 9.9, 10.2, 10.3], [9.5, 10.9, 8.7, 11.2, 10.0]),
    ([3, 3, 4, 5, 7, 8, 12], [1, 2, 2, 3]),
    ([-1.5, 0.2, 0.8, 2.1], [-0.3, 0.1, 0.05, -0.2, 0.4, 0.0]),
]

ANOVA = [
    [[1, 2, 3, 4, 5], [2, 4, 6, 8, 10], [3, 3.5, 4, 4.5, 5.5]],
    [[0.12, 0.35, 0.28, 0.41, 0.19, 0.33], [0.52, 0.47, 0.61, 0.39, 0.58], [0.31, 0.29, 0.45, 0.22]],
    [[10.1, 9.8, 10.4, 10.0, 9.9], [9.5, 10.9, 8.7, 11.2, 10.0, 10.4], [12.0, 11.1, 13.2], [9.9, 10.0, 10.1, 10.05]],
    [[3, 3, 4, 5, 7, 8, 12], [1, 2, 2, 3], [6, 9, 4, 7]],
    [[0.21, 0.25, 0.19, 0.30, 0.27, 0.22], [0.41, 0.12, 0.33, 0.29, 0.50, 0.18], [0.26, 0.24, 0.28, 0.25, 0.27]],
]

FRIEDMAN = [
    [[1, 2, 3], [1, 2, 3], [1, 2, 3]],
    [[3, 5, 4, 2], [4, 4, 5, 1], [2, 5, 5, 3], [3, 4, 4, 2], [1, 3, 5, 4], [5, 5, 5, 5]],
    [[7.0, 9.9, 8.5], [5.3, 5.7, 4.7], [4.9, 7.6, 5.5], [8.8, 8.9, 8.1], [8.7, 8.5, 9.0], [7.6, 7.4, 7.0], [6.4, 6.1, 5.8]],
    [[1, 1, 2, 2, 3], [2, 1, 3, 3, 3], [1, 2, 2, 4, 5], [3, 3, 3, 3, 4]],
    [[4, 3], [5, 5], [2, 4], [3, 6], [1, 2], [6, 6], [2, 5], [3, 3]],
]

# exact regime, no ties -> scipy exact
WILCOXON_EXACT = [
    ([1, 2, 3, 4, 5, 6], [2, 3, 4, 5, 6, 7]),
    ([1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30], [0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29]),
    ([125, 115, 130, 140, 140.5, 115.2, 140.9, 125.3, 140.1, 135], [110, 122, 125, 120, 140, 124, 123, 137, 135, 145]),
    ([0.1, 0.5, -0.2, 0.9, 1.4, -0.75, 0.33, 0.61, 1.1, 0.02, -0.4, 0.85], [0] * 12),
    ([5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.9, 4.8, 5.6, 6.4, 5.0, 5.2, 6.3],
     [5.0, 5.25, 5.95, 5.15, 5.42, 5.61, 4.71, 5.83, 5.37, 5.06, 5.12, 5.74, 4.91, 5.43, 5.68]),
]

# exact regime with ties -> brute force sign enumeration (scipy's exact
# distribution assumes untied ranks)
WILCOXON_EXACT_TIES = [
    ([5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.9, 4.8, 5.6, 6.4, 5.0, 5.2, 6.3],
     [5.0, 5.25, 5.95, 5.15, 5.42, 5.61, 4.72, 5.83, 5.37, 5.06, 5.12, 5.74, 4.91, 5.43, 5.68]),
    ([3, 4, 2, 5, 5, 1, 4, 3], [1, 2, 2, 3, 4, 2, 2, 1]),
    ([2, 2, 3, 4, 1, 5, 3], [1, 1, 1, 2, 2, 2, 5]),
]

# approximate regime (n_effective > 15), tie heavy
WILCOXON_APPROX = [
    ([3, 4, 2, 5, 5, 1, 4, 3, 4, 5, 2, 3, 4, 4, 5, 1, 2, 3, 5, 4],
     [2, 2, 2, 3, 4, 2, 2, 1, 3, 3, 1, 3, 2, 5, 3, 2, 1, 1, 4, 2]),
    ([float(i % 7) for i in range(30)], [float((i * 3) % 5) for i in range(30)]),
    ([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18],
     [2, 1, 5, 3, 8, 4, 6, 12, 7, 9, 10, 15, 11, 20, 13, 14, 22, 16]),
]

SPEARMAN = [
    ([1, 2, 3, 4, 5, 6], [2, 1, 4, 3, 6, 5]),
    ([1, 2, 2, 3, 4, 4, 4, 5], [3, 1, 2, 2, 5, 4, 6, 6]),
    ([0.3, 0.1, 0.9, 0.5, 0.7, 0.2, 0.8], [10, 12, 3, 7, 4, 11, 6]),
    ([5, 5, 5, 6, 6, 7, 8, 9, 9, 10], [1, 2, 1, 3, 3, 2, 5, 4, 6, 6]),
    ([1, 3, 2, 5, 4, 6], [5, 3, 4, 1, 2, 2]),
]

HOLM = [
    ([0.01, 0.04, 0.03], None),
    ([0.001, 0.2, 0.04, 0.03, 0.5], None),
    ([0.05], None),
    ([0.012, 0.012, 0.3, 0.0004, 0.049, 0.9], None),
    ([0.5, 0.45, 0.6, 0.01], None),
]


def rust_vec(xs):
    return "[" + ", ".join(repr(float(x)) for x in xs) + "]"


def wilcoxon_bruteforce(a, b):
    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0]
    r = stats.rankdata(np.abs(d))
    wplus = r[d > 0].sum()
    wminus = r[d < 0].sum()
    w = min(wplus, wminus)
    n = len(d)
    count = 0
    for signs in itertools.product([0, 1], repeat=n):
        s = sum(ri for ri, si in zip(r, signs) if si)
        if s <= w + 1e-9:
            count += 1
    return w, min(1.0, 2 * count / 2 ** n)


def games_howell(groups):
    k = len(groups)
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = np.asarray(groups[i], float), np.asarray(groups[j], float)
            va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
            t = abs(a.mean() - b.mean()) / math.sqrt(va + vb)
            df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
            p = stats.studentized_range.sf(t * math.sqrt(2), k, df)
            out.append((i, j, t, df, p))
    return out


def pattern(kind, w, h):
    y, x = np.mgrid[0:h, 0:w].astype(float)
    if kind == "waves":
        return np.clip(0.5 + 0.3 * np.sin(0.37 * x + 0.11 * y) + 0.15 * np.cos(0.23 * x - 0.41 * y), 0, 1)
    if kind == "hash":
        xi, yi = np.mgrid[0:w, 0:h].T.astype(np.int64)[::-1] if False else (x.astype(np.int64), y.astype(np.int64))
        v = ((xi * 73856093) ^ (yi * 19349663)) % 1000
        return v / 999.0
    if kind == "ramp":
        return x / (w - 1)
    if kind == "blobs":
        return np.clip(0.5 + 0.45 * np.sin(0.2 * x) * np.cos(0.15 * y), 0, 1)
    raise ValueError(kind)


SSIM_PAIRS = [
    ("waves", "blobs", 32, 32),
    ("waves", "hash", 24, 20),
    ("ramp", "waves", 16, 12),
    ("hash", "blobs", 40, 31),
    ("ramp", "hash", 11, 11),
]


def main():
    print("// welch_t: (t, df, p)")
    for a, b in WELCH_T:
        r = stats.ttest_ind(a, b, equal_var=False)
        va, vb = np.var(a, ddof=1) / len(a), np.var(b, ddof=1) / len(b)
        df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
        print(f"({rust_vec(a)}, {rust_vec(b)}, {float(r.statistic)!r}, {df!r}, {float(r.pvalue)!r}),")

    print("// welch_anova: (F, df1, df2, p)")
    for groups in ANOVA:
        r = anova_oneway([np.asarray(g, float) for g in groups], use_var="unequal", welch_correction=True)
        print(f"{float(r.statistic)!r}, {r.df[0]!r}, {r.df[1]!r}, {float(r.pvalue)!r}")

    print("// games_howell: (i, j, t, df, p)")
    for groups in ANOVA:
        print(games_howell(groups))

    print("// friedman: (chi2, p)")
    for m in FRIEDMAN:
        cols = np.asarray(m, float).T
        r = stats.friedmanchisquare(*cols) if cols.shape[0] >= 3 else None
        if r is None:
            # scipy requires k >= 3; tie-corrected formula by hand for k = 2
            arr = np.asarray(m, float)
            n, k = arr.shape
            ranks = np.apply_along_axis(stats.rankdata, 1, arr)
            rbar = ranks.mean(axis=0)
            chi2 = 12 * n / (k * (k + 1)) * ((rbar - (k + 1) / 2) ** 2).sum()
            ties = 0.0
            for row in arr:
                _, c = np.unique(row, return_counts=True)
                ties += (c ** 3 - c).sum()
            chi2 /= 1 - ties / (n * (k ** 3 - k))
            print(f"{chi2!r}, {stats.chi2.sf(chi2, k - 1)!r}")
        else:
            print(f"{float(r.statistic)!r}, {float(r.pvalue)!r}")

    print("// wilcoxon exact: (w, p)")
    for a, b in WILCOXON_EXACT:
        r = stats.wilcoxon(a, b, method="exact")
        print(f"{float(r.statistic)!r}, {float(r.pvalue)!r}")
    print("// wilcoxon exact ties (brute force): (w, p)")
    for a, b in WILCOXON_EXACT_TIES:
        print(wilcoxon_bruteforce(a, b))
    print("// wilcoxon approx: (w, p)")
    for a, b in WILCOXON_APPROX:
        r = stats.wilcoxon(a, b, method="approx", correction=True, zero_method="wilcox")
        print(f"{float(r.statistic)!r}, {float(r.pvalue)!r}")

    print("// spearman: (rho, p)")
    for a, b in SPEARMAN:
        r = stats.spearmanr(a, b)
        print(f"{float(r.statistic)!r}, {float(r.pvalue)!r}")

    print("// holm")
    for p, _ in HOLM:
        print(rust_vec(multipletests(p, method="holm")[1]))

    print("// distributions")
    print("t_cdf(1.5, 7)", stats.t.cdf(1.5, 7))
    print("t_cdf(-2.3, 3.4)", stats.t.cdf(-2.3, 3.4))
    print("f_cdf(2.7, 3, 11.5)", stats.f.cdf(2.7, 3, 11.5))
    print("chisq_cdf(4.2, 5)", stats.chi2.cdf(4.2, 5))
    for q, k, df in [(3.5, 3, 10), (2.0, 2, 5), (4.0, 4, 20), (5.0, 5, 30), (1.0, 3, 3.7), (3.0, 6, 1000.0)]:
        print(f"ptukey({q}, {k}, {df})", stats.studentized_range.cdf(q, k, df))

    print("// ssim (skimage, gaussian sigma 1.5, population covariance)")
    for ka, kb, w, h in SSIM_PAIRS:
        a, b = pattern(ka, w, h), pattern(kb, w, h)
        s = structural_similarity(a, b, data_range=1.0, gaussian_weights=True, sigma=1.5,
                                  use_sample_covariance=False)
        print(f'("{ka}", "{kb}", {w}, {h}, {s!r}),')


if __name__ == "__main__":
    main()
