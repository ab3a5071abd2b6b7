//! `tactile stats ...`: CSV in, JSON result out.

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use tactile_core::stats::table::{descriptors, read_groups, read_pairs, read_pvalues, read_ratings, RatingMatrix, RatingRow};
use tactile_core::stats::{
    friedman, games_howell, holm_correct, holm_correct_with_family, spearman, welch_anova, welch_t,
    wilcoxon_signed_rank, Sample,
};

use crate::args::{RatingsInput, StatsCommand};

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn groups(path: &Path) -> Result<Vec<Sample>> {
    read_groups(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn summary(s: &Sample) -> Value {
    json!({ "label": s.label, "n": s.len(), "mean": s.mean() })
}

fn pick<'a>(groups: &'a [Sample], label: &str) -> Result<&'a Sample> {
    groups
        .iter()
        .find(|g| g.label == label)
        .with_context(|| format!("group `{label}` does not occur in the input"))
}

pub fn run(cmd: StatsCommand) -> Result<Value> {
    Ok(match cmd {
        StatsCommand::WelchT { data, a, b } => {
            let gs = groups(&data.input)?;
            let (ga, gb) = match (a, b) {
                (Some(a), Some(b)) => (pick(&gs, &a)?, pick(&gs, &b)?),
                (None, None) if gs.len() == 2 => (&gs[0], &gs[1]),
                (None, None) => bail!("input has {} groups; choose two with --a and --b", gs.len()),
                _ => bail!("--a and --b go together"),
            };
            let r = welch_t(ga, gb)?;
            json!({ "test": "welch_t", "a": summary(ga), "b": summary(gb), "t": r.t, "df": r.df, "p": r.p })
        }
        StatsCommand::WelchAnova(data) => {
            let gs = groups(&data.input)?;
            let r = welch_anova(&gs)?;
            json!({
                "test": "welch_anova",
                "groups": gs.iter().map(summary).collect::<Vec<_>>(),
                "f": r.f, "df1": r.df1, "df2": r.df2, "p": r.p,
            })
        }
        StatsCommand::GamesHowell(data) => {
            let gs = groups(&data.input)?;
            json!({
                "test": "games_howell",
                "groups": gs.iter().map(summary).collect::<Vec<_>>(),
                "comparisons": games_howell(&gs)?,
            })
        }
        StatsCommand::Friedman(data) => per_descriptor("friedman", &data, |m| {
            let r = friedman(&m.values)?;
            Ok((json!({ "chi2": r.chi2, "df": r.df, "p": r.p, "blocks": m.blocks.len(), "conditions": m.conditions }), r.p))
        })?,
        StatsCommand::Wilcoxon { data, a, b } => wilcoxon(&data, a.zip(b))?,
        StatsCommand::Spearman { input } => {
            let (x, y) = read_pairs(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
            let r = spearman(&x, &y)?;
            json!({ "test": "spearman", "n": x.len(), "rho": r.rho, "p": r.p })
        }
        StatsCommand::Holm { input, family_size } => {
            let p = read_pvalues(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
            let adjusted = match family_size {
                Some(m) => holm_correct_with_family(&p, m)?,
                None => holm_correct(&p)?,
            };
            json!({ "test": "holm", "family_size": family_size.unwrap_or(p.len()), "p": p, "p_adjusted": adjusted })
        }
    })
}

fn ratings(data: &RatingsInput) -> Result<(Vec<RatingRow>, Vec<String>)> {
    let rows = read_ratings(open(&data.input)?).with_context(|| format!("reading {}", data.input.display()))?;
    let all = descriptors(&rows);
    let selected = match &data.descriptor {
        Some(d) if all.contains(d) => vec![d.clone()],
        Some(d) => bail!("descriptor `{d}` does not occur in the input"),
        None => all,
    };
    Ok((rows, selected))
}

/// Runs `test` on every selected descriptor and Holm-corrects across them.
fn per_descriptor(
    name: &str,
    data: &RatingsInput,
    test: impl Fn(&RatingMatrix) -> Result<(Value, f64)>,
) -> Result<Value> {
    let (rows, selected) = ratings(data)?;
    let mut results = Vec::new();
    let mut p = Vec::new();
    for d in &selected {
        let m = RatingMatrix::from_rows(&rows, d)?;
        let (mut v, pd) = test(&m).with_context(|| format!("descriptor `{d}`"))?;
        v["descriptor"] = json!(d);
        results.push(v);
        p.push(pd);
    }
    let adjusted = holm_correct(&p)?;
    for (v, q) in results.iter_mut().zip(adjusted) {
        v["p_holm"] = json!(q);
    }
    Ok(json!({ "test": name, "descriptors": results }))
}

/// Pairwise signed-rank tests; with no explicit pair, every pair of
/// conditions is tested and Holm-corrected within each descriptor.
fn wilcoxon(data: &RatingsInput, pair: Option<(String, String)>) -> Result<Value> {
    let (rows, selected) = ratings(data)?;
    let mut results = Vec::new();
    for d in &selected {
        let m = RatingMatrix::from_rows(&rows, d)?;
        let pairs: Vec<(String, String)> = match &pair {
            Some(p) => vec![p.clone()],
            None => {
                let c = &m.conditions;
                (0..c.len()).flat_map(|i| (i + 1..c.len()).map(move |j| (c[i].clone(), c[j].clone()))).collect()
            }
        };
        let mut tests = Vec::new();
        let mut p = Vec::new();
        for (a, b) in &pairs {
            let r = wilcoxon_signed_rank(&m.column(a)?, &m.column(b)?)
                .with_context(|| format!("descriptor `{d}`, {a} vs {b}"))?;
            tests.push(json!({ "a": a, "b": b, "w": r.w, "n_effective": r.n_effective, "p": r.p, "method": r.method }));
            p.push(r.p);
        }
        for (v, q) in tests.iter_mut().zip(holm_correct(&p)?) {
            v["p_holm"] = json!(q);
        }
        results.push(json!({ "descriptor": d, "blocks": m.blocks.len(), "comparisons": tests }));
    }
    Ok(json!({ "test": "wilcoxon", "descriptors": results }))
}
