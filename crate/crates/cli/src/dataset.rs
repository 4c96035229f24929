//! Dataset loading (csv, libsvm, ranking formats), label typing, feature
//! standardization and the deterministic train/test split.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rgboost::objectives::{LabeledData, Labels};
use rgboost::SampleSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Libsvm,
    Ranking,
}

impl DataFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(DataFormat::Csv),
            "libsvm" => Ok(DataFormat::Libsvm),
            "ranking" => Ok(DataFormat::Ranking),
            other => bail!("unknown data format {other:?} (expected csv, libsvm or ranking)"),
        }
    }

    pub fn infer(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(DataFormat::Csv),
            Some("libsvm") | Some("svm") => Ok(DataFormat::Libsvm),
            Some("ranking") | Some("rank") => Ok(DataFormat::Ranking),
            _ => bail!(
                "cannot infer data format from {}; pass --format",
                path.display()
            ),
        }
    }
}

/// Rows in file order: a dense feature matrix, one numeric label per row and
/// query-group ids for the ranking format.
#[derive(Debug, Clone)]
pub struct RawData {
    pub features: Array2<f64>,
    pub labels: Vec<f64>,
    pub groups: Option<Vec<u64>>,
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<RawData> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match format {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Libsvm => parse_sparse(&text, false),
        DataFormat::Ranking => parse_sparse(&text, true),
    }
    .with_context(|| format!("loading {}", path.display()))
}

/// Header line followed by numeric rows; the last column is the label.
fn parse_csv(text: &str) -> Result<RawData> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty file"))?;
    let columns = header.split(',').count();
    if columns < 2 {
        bail!("line 1: need at least one feature column and a label column");
    }
    let d = columns - 1;
    let mut rows: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    for (index, line) in lines {
        let lineno = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            bail!(
                "line {lineno}: expected {columns} columns, found {}",
                fields.len()
            );
        }
        for field in &fields[..d] {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| anyhow!("line {lineno}: bad feature value {field:?}"))?;
            rows.push(value);
        }
        let label: f64 = fields[d]
            .trim()
            .parse()
            .map_err(|_| anyhow!("line {lineno}: bad label {:?}", fields[d]))?;
        labels.push(label);
    }
    if labels.is_empty() {
        bail!("no data rows");
    }
    let features = Array2::from_shape_vec((labels.len(), d), rows)?;
    Ok(RawData {
        features,
        labels,
        groups: None,
    })
}

/// Sparse rows `label [qid:G] idx:val ...` with 1-indexed feature ids.
fn parse_sparse(text: &str, with_groups: bool) -> Result<RawData> {
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (index, line) in text.lines().enumerate() {
        let lineno = index + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label: f64 = tokens
            .next()
            .ok_or_else(|| anyhow!("line {lineno}: missing label"))?
            .parse()
            .map_err(|_| anyhow!("line {lineno}: bad label"))?;
        labels.push(label);
        let mut entries = Vec::new();
        let mut group_seen = false;
        for token in tokens {
            let (key, value) = token
                .split_once(':')
                .ok_or_else(|| anyhow!("line {lineno}: bad token {token:?}"))?;
            if key == "qid" {
                if !with_groups {
                    bail!("line {lineno}: unexpected qid in non-ranking data");
                }
                let qid: u64 = value
                    .parse()
                    .map_err(|_| anyhow!("line {lineno}: bad qid {value:?}"))?;
                groups.push(qid);
                group_seen = true;
                continue;
            }
            let feature: usize = key
                .parse()
                .map_err(|_| anyhow!("line {lineno}: bad feature index {key:?}"))?;
            if feature == 0 {
                bail!("line {lineno}: feature indices are 1-based");
            }
            let value: f64 = value
                .parse()
                .map_err(|_| anyhow!("line {lineno}: bad value {value:?}"))?;
            max_index = max_index.max(feature);
            entries.push((feature - 1, value));
        }
        if with_groups && !group_seen {
            bail!("line {lineno}: ranking rows need a qid:<group> token");
        }
        sparse_rows.push(entries);
    }
    if labels.is_empty() {
        bail!("no data rows");
    }
    let d = max_index.max(1);
    let mut features = Array2::zeros((labels.len(), d));
    for (row, entries) in sparse_rows.into_iter().enumerate() {
        for (feature, value) in entries {
            features[[row, feature]] = value;
        }
    }
    Ok(RawData {
        features,
        labels,
        groups: if with_groups { Some(groups) } else { None },
    })
}

/// How labels are typed for the chosen objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Regression,
    Binary,
    Multiclass,
    Ranking,
}

/// A typed dataset: the full sample space, labels for every point, and
/// disjoint train/test index lists covering all points.
pub struct Dataset {
    pub space: Arc<SampleSpace>,
    pub labels: LabeledData,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub task: TaskKind,
    /// Original label value for each remapped class index (multiclass).
    pub class_values: Option<Vec<f64>>,
}

impl Dataset {
    pub fn build(
        raw: RawData,
        task: TaskKind,
        test_fraction: f64,
        seed: u64,
        standardize: bool,
    ) -> Result<Self> {
        let mut features = raw.features;
        if standardize {
            standardize_features(&mut features);
        }
        let n = features.nrows();

        let (labels, class_values, output_dim) = match task {
            TaskKind::Regression => {
                let targets = Array2::from_shape_vec((n, 1), raw.labels.clone())?;
                (Labels::Real(targets), None, 1)
            }
            TaskKind::Binary => {
                let mut distinct = raw.labels.clone();
                distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
                distinct.dedup();
                if distinct.len() != 2 {
                    bail!(
                        "binary task needs exactly 2 distinct labels, found {}",
                        distinct.len()
                    );
                }
                if distinct != [-1.0, 1.0] {
                    log::info!(
                        "binary labels remapped: {} -> -1, {} -> +1",
                        distinct[0],
                        distinct[1]
                    );
                }
                let mapped: Vec<f64> = raw
                    .labels
                    .iter()
                    .map(|y| if *y == distinct[0] { -1.0 } else { 1.0 })
                    .collect();
                (Labels::Binary(mapped), None, 1)
            }
            TaskKind::Multiclass => {
                let mut distinct = raw.labels.clone();
                distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
                distinct.dedup();
                let k = distinct.len();
                if k < 2 {
                    bail!("multiclass task needs at least 2 distinct labels");
                }
                let classes: Vec<usize> = raw
                    .labels
                    .iter()
                    .map(|y| distinct.iter().position(|v| v == y).unwrap() + 1)
                    .collect();
                log::info!(
                    "class mapping: {:?}",
                    distinct
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v, i + 1))
                        .collect::<Vec<_>>()
                );
                (
                    Labels::Class {
                        classes,
                        num_classes: k,
                    },
                    Some(distinct),
                    k,
                )
            }
            TaskKind::Ranking => {
                if raw.groups.is_none() {
                    bail!("ranking task needs query groups (qid tokens)");
                }
                let targets = Array2::from_shape_vec((n, 1), raw.labels.clone())?;
                (Labels::Real(targets), None, 1)
            }
        };

        let space = SampleSpace::uniform(features, output_dim)
            .map_err(|e| anyhow!("building sample space: {e}"))?;
        let labeled = LabeledData {
            labels,
            groups: raw.groups,
        };
        labeled
            .validate(&space)
            .map_err(|e| anyhow!("label validation: {e}"))?;

        let (train, test) = split_indices(n, test_fraction, seed, labeled.groups.as_deref());
        if train.is_empty() {
            bail!("train split is empty");
        }
        Ok(Dataset {
            space,
            labels: labeled,
            train,
            test,
            task,
            class_values,
        })
    }

    /// Space and labels restricted to the given point indices, with uniform
    /// weights over the subset.
    pub fn subspace(&self, indices: &[usize]) -> Result<(Arc<SampleSpace>, LabeledData)> {
        let d = self.space.num_features();
        let mut features = Array2::zeros((indices.len(), d));
        for (row, &i) in indices.iter().enumerate() {
            features.row_mut(row).assign(&self.space.feature_row(i));
        }
        let labels = match &self.labels.labels {
            Labels::Real(t) => {
                let mut out = Array2::zeros((indices.len(), t.ncols()));
                for (row, &i) in indices.iter().enumerate() {
                    out.row_mut(row).assign(&t.row(i));
                }
                Labels::Real(out)
            }
            Labels::Class {
                classes,
                num_classes,
            } => Labels::Class {
                classes: indices.iter().map(|&i| classes[i]).collect(),
                num_classes: *num_classes,
            },
            Labels::Binary(labels) => Labels::Binary(indices.iter().map(|&i| labels[i]).collect()),
        };
        let groups = self
            .labels
            .groups
            .as_ref()
            .map(|g| indices.iter().map(|&i| g[i]).collect());
        let space = SampleSpace::uniform(features, self.space.output_dim())
            .map_err(|e| anyhow!("building split space: {e}"))?;
        let labeled = LabeledData { labels, groups };
        labeled
            .validate(&space)
            .map_err(|e| anyhow!("split label validation: {e}"))?;
        Ok((space, labeled))
    }
}

fn standardize_features(features: &mut Array2<f64>) {
    let n = features.nrows() as f64;
    for mut column in features.columns_mut() {
        let mean = column.sum() / n;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        let scale = if std > 0.0 { std } else { 1.0 };
        column.mapv_inplace(|v| (v - mean) / scale);
    }
}

/// Deterministic seeded shuffle split. Ranking data is split by whole query
/// groups so preference pairs never straddle the boundary.
pub fn split_indices(
    n: usize,
    test_fraction: f64,
    seed: u64,
    groups: Option<&[u64]>,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = (n as f64 * test_fraction).round() as usize;
    let mut test: Vec<usize> = Vec::new();
    match groups {
        None => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            test.extend(&order[..target.min(n)]);
        }
        Some(groups) => {
            let mut unique: Vec<u64> = Vec::new();
            for &g in groups {
                if !unique.contains(&g) {
                    unique.push(g);
                }
            }
            unique.shuffle(&mut rng);
            for g in unique {
                if test.len() >= target {
                    break;
                }
                test.extend((0..n).filter(|&i| groups[i] == g));
            }
        }
    }
    test.sort_unstable();
    let train: Vec<usize> = (0..n).filter(|i| !test.contains(i)).collect();
    (train, test)
}

/// The subset of features selected by `indices`, as an owned matrix.
pub fn gather_rows(features: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((indices.len(), features.ncols()));
    for (row, &i) in indices.iter().enumerate() {
        out.row_mut(row).assign(&features.row(i));
    }
    out
}

/// Relevance column for ranking metrics.
pub fn real_column(labels: &LabeledData) -> Option<Array1<f64>> {
    match &labels.labels {
        Labels::Real(t) if t.ncols() == 1 => Some(t.column(0).to_owned()),
        _ => None,
    }
}
