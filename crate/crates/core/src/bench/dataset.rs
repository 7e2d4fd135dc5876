use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

impl DataFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "libsvm" | "svmlight" => Some(DataFormat::Libsvm),
            _ => None,
        }
    }
}

/// A named `N × d` data matrix with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<f64>>,
}

impl Dataset {
    /// Checks the invariants: `N >= 2`, `d >= 1`, rectangular, all finite.
    pub fn new(
        name: impl Into<String>,
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<f64>>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        if rows.len() < 2 {
            return Err(Error::InvalidInput(
                "a dataset needs at least two rows".into(),
            ));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::InvalidDimension("rows have no columns".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {d} values, found {}", r.len()),
                });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "non-finite value".into(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != rows.len() {
                return Err(Error::InvalidInput(
                    "label count differs from row count".into(),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            rows,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    /// Centres every column and scales it to unit variance (constant columns are only centred).
    pub fn standardize(&mut self) {
        let n = self.rows.len() as f64;
        for j in 0..self.dim() {
            let mean = self.rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = self.rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 1.0 };
            for r in &mut self.rows {
                r[j] = (r[j] - mean) * scale;
            }
        }
    }

    /// `size` distinct rows chosen uniformly (partial Fisher–Yates) from `seed`.
    pub fn subset_indices(&self, size: usize, seed: u64) -> Result<Vec<usize>> {
        if size > self.len() {
            return Err(Error::InvalidInput(format!(
                "subset of {size} rows requested from {} rows",
                self.len()
            )));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let mut r = rng::rng_from_seed(seed);
        for i in 0..size {
            let j = rand::Rng::random_range(&mut r, i..idx.len());
            idx.swap(i, j);
        }
        idx.truncate(size);
        Ok(idx)
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {:?} as a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {:?}", field.trim()),
        });
    }
    Ok(v)
}

/// Comma-separated numbers; a first line with any non-numeric field is a header.
pub fn parse_csv(text: &str, name: &str) -> Result<Dataset> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if rows.is_empty() && lineno == 1 && fields.iter().any(|f| f.trim().parse::<f64>().is_err())
        {
            continue;
        }
        let row = fields
            .iter()
            .map(|f| parse_number(f, lineno))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {} values, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    Dataset::new(name, rows, None)
}

/// `label idx:value ...` lines with 1-based indices. The dimension is the
/// largest index seen unless `dim` is given.
pub fn parse_libsvm(text: &str, name: &str, dim: Option<usize>) -> Result<Dataset> {
    let mut sparse = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let label = parse_number(parts.next().expect("non-empty line"), lineno)?;
        let mut entries = Vec::new();
        for tok in parts {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected index:value, found {tok:?}"),
            })?;
            let idx: usize = idx
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("bad feature index {idx:?}"),
                })?;
            max_index = max_index.max(idx);
            entries.push((idx - 1, parse_number(val, lineno)?));
        }
        labels.push(label);
        sparse.push((lineno, entries));
    }
    let d = match dim {
        Some(d) if d < max_index => {
            return Err(Error::InvalidInput(format!(
                "feature index {max_index} exceeds dimension {d}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };
    let rows = sparse
        .into_iter()
        .map(|(_, entries)| {
            let mut row = vec![0.0; d];
            for (k, v) in entries {
                row[k] = v;
            }
            row
        })
        .collect();
    Dataset::new(name, rows, Some(labels))
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyData);
    }
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    match format {
        DataFormat::Csv => parse_csv(&text, name),
        DataFormat::Libsvm => parse_libsvm(&text, name, None),
    }
}
