//! CSV ingestion for the statistical tests.
//!
//! | test                               | columns                                         |
//! |------------------------------------|-------------------------------------------------|
//! | friedman, wilcoxon                 | `subject,texture,condition,descriptor,rating`   |
//! | welch-t, welch-anova, games-howell | `group,value`                                   |
//! | spearman                           | `x,y`                                           |
//! | holm                               | `p`                                             |
//!
//! Ratings are long format: one row per subject x texture x condition x
//! descriptor. A *block* is one `(subject, texture)` pair; Friedman ranks
//! conditions within each block and Wilcoxon pairs two conditions by block.
//! Groups and conditions keep their order of first appearance.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use super::Sample;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("no rows{0}")]
    Empty(String),
    #[error("block subject={subject} texture={texture} has no rating for condition `{condition}`")]
    MissingCell {
        subject: String,
        texture: String,
        condition: String,
    },
    #[error("block subject={subject} texture={texture} rates condition `{condition}` more than once")]
    DuplicateCell {
        subject: String,
        texture: String,
        condition: String,
    },
    #[error("condition `{0}` does not occur in the table")]
    UnknownCondition(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RatingRow {
    pub subject: String,
    pub texture: String,
    pub condition: String,
    pub descriptor: String,
    pub rating: f64,
}

#[derive(Deserialize)]
struct GroupRow {
    group: String,
    value: f64,
}

#[derive(Deserialize)]
struct PairRow {
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct PRow {
    p: f64,
}

fn rows<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>, TableError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let out = reader.deserialize().collect::<Result<Vec<T>, _>>()?;
    if out.is_empty() {
        return Err(TableError::Empty(String::new()));
    }
    Ok(out)
}

pub fn read_ratings<R: Read>(input: R) -> Result<Vec<RatingRow>, TableError> {
    rows(input)
}

/// Samples from a `group,value` table.
pub fn read_groups<R: Read>(input: R) -> Result<Vec<Sample>, TableError> {
    let mut groups: Vec<Sample> = Vec::new();
    for row in rows::<GroupRow, _>(input)? {
        match groups.iter_mut().find(|g| g.label == row.group) {
            Some(g) => g.values.push(row.value),
            None => groups.push(Sample::new(row.group, vec![row.value])),
        }
    }
    Ok(groups)
}

/// Paired samples from an `x,y` table.
pub fn read_pairs<R: Read>(input: R) -> Result<(Sample, Sample), TableError> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows::<PairRow, _>(input)?
        .into_iter()
        .map(|r| (r.x, r.y))
        .unzip();
    Ok((Sample::new("x", x), Sample::new("y", y)))
}

/// P-values from a `p` table.
pub fn read_pvalues<R: Read>(input: R) -> Result<Vec<f64>, TableError> {
    Ok(rows::<PRow, _>(input)?.into_iter().map(|r| r.p).collect())
}

/// Descriptors in order of first appearance.
pub fn descriptors(rows: &[RatingRow]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in rows {
        if !out.contains(&r.descriptor) {
            out.push(r.descriptor.clone());
        }
    }
    out
}

/// Ratings of one descriptor as a `blocks x conditions` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    pub conditions: Vec<String>,
    /// `(subject, texture)` per row, sorted.
    pub blocks: Vec<(String, String)>,
    pub values: Vec<Vec<f64>>,
}

impl RatingMatrix {
    pub fn from_rows(rows: &[RatingRow], descriptor: &str) -> Result<Self, TableError> {
        let selected: Vec<&RatingRow> = rows.iter().filter(|r| r.descriptor == descriptor).collect();
        if selected.is_empty() {
            return Err(TableError::Empty(format!(" for descriptor `{descriptor}`")));
        }
        let mut conditions: Vec<String> = Vec::new();
        for r in &selected {
            if !conditions.contains(&r.condition) {
                conditions.push(r.condition.clone());
            }
        }
        let mut cells: BTreeMap<(String, String), Vec<Option<f64>>> = BTreeMap::new();
        for r in &selected {
            let col = conditions.iter().position(|c| *c == r.condition).unwrap();
            let row = cells
                .entry((r.subject.clone(), r.texture.clone()))
                .or_insert_with(|| vec![None; conditions.len()]);
            row.resize(conditions.len(), None);
            if row[col].replace(r.rating).is_some() {
                return Err(TableError::DuplicateCell {
                    subject: r.subject.clone(),
                    texture: r.texture.clone(),
                    condition: r.condition.clone(),
                });
            }
        }
        let mut blocks = Vec::with_capacity(cells.len());
        let mut values = Vec::with_capacity(cells.len());
        for ((subject, texture), mut row) in cells {
            row.resize(conditions.len(), None);
            let complete: Option<Vec<f64>> = row.iter().copied().collect();
            match complete {
                Some(v) => values.push(v),
                None => {
                    let missing = row.iter().position(Option::is_none).unwrap();
                    return Err(TableError::MissingCell {
                        subject,
                        texture,
                        condition: conditions[missing].clone(),
                    });
                }
            }
            blocks.push((subject, texture));
        }
        Ok(RatingMatrix {
            conditions,
            blocks,
            values,
        })
    }

    /// Column of one condition as a sample, in block order.
    pub fn column(&self, condition: &str) -> Result<Sample, TableError> {
        let j = self
            .conditions
            .iter()
            .position(|c| c == condition)
            .ok_or_else(|| TableError::UnknownCondition(condition.to_string()))?;
        Ok(Sample::new(
            condition,
            self.values.iter().map(|row| row[j]).collect::<Vec<_>>(),
        ))
    }
}
