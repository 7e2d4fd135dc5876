use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Method, Result};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// One repetition of one (dataset, kernel, method, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub dataset: String,
    pub kernel: String,
    pub method: Method,
    pub n: usize,
    /// Output feature dimension shared by every method of the cell.
    pub dim: usize,
    pub run: usize,
    pub error: f64,
    pub map_seconds: f64,
    pub gram_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub dataset: String,
    pub kernel: String,
    pub method: Method,
    pub n: usize,
    pub dim: usize,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    /// Half-width of the Student-t 95% confidence interval of the mean.
    pub ci_half_width: f64,
}

impl CellSummary {
    pub fn ci(&self) -> (f64, f64) {
        (
            self.mean - self.ci_half_width,
            self.mean + self.ci_half_width,
        )
    }

    fn from_errors(first: &ErrorRow, errors: &[f64]) -> Self {
        let (mean, std, ci_half_width) = mean_ci95(errors);
        CellSummary {
            dataset: first.dataset.clone(),
            kernel: first.kernel.clone(),
            method: first.method,
            n: first.n,
            dim: first.dim,
            runs: errors.len(),
            mean,
            std,
            ci_half_width,
        }
    }
}

/// Mean, sample standard deviation and 95% CI half-width.
pub fn mean_ci95(values: &[f64]) -> (f64, f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, 0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let std = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, (k - 1) as f64)
        .expect("positive dof")
        .inverse_cdf(0.975);
    (mean, std, t * std / (k as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    pub cells: Vec<CellSummary>,
}

impl ErrorReport {
    /// Groups consecutive rows sharing (dataset, kernel, method, n) into cells.
    pub fn from_rows(rows: Vec<ErrorRow>) -> Self {
        let mut cells = Vec::new();
        let mut start = 0;
        for i in 1..=rows.len() {
            let boundary = i == rows.len() || {
                let (a, b) = (&rows[start], &rows[i]);
                (&a.dataset, &a.kernel, a.method, a.n) != (&b.dataset, &b.kernel, b.method, b.n)
            };
            if boundary {
                let errs: Vec<f64> = rows[start..i].iter().map(|r| r.error).collect();
                cells.push(CellSummary::from_errors(&rows[start], &errs));
                start = i;
            }
        }
        ErrorReport { rows, cells }
    }

    pub fn cell(&self, kernel: &str, method: Method, n: usize) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.kernel == kernel && c.method == method && c.n == n)
    }

    /// One line per run, without timings.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dataset,kernel,method,n,D,run,relative_frobenius_error\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.dataset, r.kernel, r.method, r.n, r.dim, r.run, r.error
            );
        }
        s
    }

    pub fn timings_csv(&self) -> String {
        let mut s = String::from("dataset,kernel,method,n,D,run,map_seconds,gram_seconds\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:.9},{:.9}",
                r.dataset, r.kernel, r.method, r.n, r.dim, r.run, r.map_seconds, r.gram_seconds
            );
        }
        s
    }

    /// `{"schema": 1, "results": {dataset: {kernel: {method: {n: {...}}}}}}`.
    pub fn to_json(&self) -> Result<String> {
        let mut results = Map::new();
        for c in &self.cells {
            let errors: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| {
                    r.dataset == c.dataset
                        && r.kernel == c.kernel
                        && r.method == c.method
                        && r.n == c.n
                })
                .map(|r| r.error)
                .collect();
            let entry = json!({
                "D": c.dim,
                "runs": c.runs,
                "mean": c.mean,
                "std": c.std,
                "ci95_low": c.ci().0,
                "ci95_high": c.ci().1,
                "errors": errors,
            });
            let by_kernel = obj(results.entry(c.dataset.clone()));
            let by_method = obj(by_kernel.entry(c.kernel.clone()));
            let by_n = obj(by_method.entry(c.method.name().to_string()));
            by_n.insert(c.n.to_string(), entry);
        }
        let doc = json!({ "schema": REPORT_SCHEMA, "results": results });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Writes `report.csv`, `report.json` and `timings.csv` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let files = [
            (dir.join("report.csv"), self.to_csv()),
            (dir.join("report.json"), self.to_json()?),
            (dir.join("timings.csv"), self.timings_csv()),
        ];
        let mut out = Vec::new();
        for (path, body) in files {
            std::fs::write(&path, body)?;
            out.push(path);
        }
        Ok(out)
    }
}

fn obj(entry: serde_json::map::Entry<'_>) -> &mut Map<String, Value> {
    entry
        .or_insert_with(|| Value::Object(Map::new()))
        .as_object_mut()
        .expect("object node")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: Method, n: usize, run: usize, error: f64) -> ErrorRow {
        ErrorRow {
            dataset: "ds".into(),
            kernel: "gaussian".into(),
            method,
            n,
            dim: 11,
            run,
            error,
            map_seconds: 0.0,
            gram_seconds: 0.0,
        }
    }

    #[test]
    fn ci_matches_student_t() {
        let (m, s, h) = mean_ci95(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert!((h - 4.302652729911275 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(mean_ci95(&[5.0]), (5.0, 0.0, 0.0));
    }

    #[test]
    fn cells_and_json_layout() {
        let rep = ErrorReport::from_rows(vec![
            row(Method::G, 1, 0, 0.2),
            row(Method::G, 1, 1, 0.4),
            row(Method::Gort, 1, 0, 0.1),
        ]);
        assert_eq!(rep.cells.len(), 2);
        assert!((rep.cell("gaussian", Method::G, 1).unwrap().mean - 0.3).abs() < 1e-15);
        let v: Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["results"]["ds"]["gaussian"]["g"]["1"]["runs"], 2);
        assert_eq!(v["results"]["ds"]["gaussian"]["gort"]["1"]["D"], 11);
        assert_eq!(rep.to_csv().lines().count(), 4);
    }
}
