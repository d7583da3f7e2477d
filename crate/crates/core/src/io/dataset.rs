use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// A column picked by zero-based position (negative counts from the end) or header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(i64),
    Name(String),
}

impl FromStr for ColumnRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::usage("empty column reference"));
        }
        Ok(s.parse::<i64>()
            .map(ColumnRef::Index)
            .unwrap_or_else(|_| ColumnRef::Name(s.to_string())))
    }
}

impl ColumnRef {
    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize> {
        match self {
            ColumnRef::Index(i) => {
                let idx = if *i < 0 { width as i64 + i } else { *i };
                if idx < 0 || idx as usize >= width {
                    return Err(Error::usage(format!("column {i} out of range for {width} columns")));
                }
                Ok(idx as usize)
            }
            ColumnRef::Name(name) => header
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::usage(format!("no column named `{name}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub label_column: ColumnRef,
    /// Cells equal to this token are imputed.
    pub missing_token: String,
    pub seed: u64,
    /// `None` detects a header from the first row.
    pub has_header: Option<bool>,
    pub delimiter: u8,
    /// Columns dropped before parsing, e.g. record ids.
    pub ignore_columns: Vec<ColumnRef>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            label_column: ColumnRef::Index(-1),
            missing_token: "?".into(),
            seed: 0,
            has_header: None,
            delimiter: b',',
            ignore_columns: Vec::new(),
        }
    }
}

/// Feature preprocessing applied after loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    #[default]
    None,
    MinMax,
    ZScore,
}

impl Scaling {
    pub fn as_str(self) -> &'static str {
        match self {
            Scaling::None => "none",
            Scaling::MinMax => "minmax",
            Scaling::ZScore => "zscore",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Array2<f64>,
    pub labels: Vec<String>,
    /// (row, feature column) pairs that were missing, in file order.
    pub imputed_cells: Vec<(usize, usize)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_count(&self) -> usize {
        let mut l: Vec<&String> = self.labels.iter().collect();
        l.sort();
        l.dedup();
        l.len()
    }

    /// Rescales every feature to [0, 1]; constant columns become 0.
    pub fn scale_minmax(&mut self) {
        for mut col in self.features.columns_mut() {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            col.mapv_inplace(|v| if span > 0.0 { (v - lo) / span } else { 0.0 });
        }
    }

    /// Centres every feature and divides by its population standard deviation;
    /// constant columns become 0.
    pub fn scale_zscore(&mut self) {
        let n = self.len() as f64;
        for mut col in self.features.columns_mut() {
            let mean = col.sum() / n;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            col.mapv_inplace(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 });
        }
    }

    pub fn scale(&mut self, scaling: Scaling) {
        match scaling {
            Scaling::None => {}
            Scaling::MinMax => self.scale_minmax(),
            Scaling::ZScore => self.scale_zscore(),
        }
    }
}

/// Reads a delimited file: one instance per row, one label column, numeric features.
///
/// Missing cells are replaced by a uniform draw between the observed minimum
/// and maximum of their column. Each draw comes from a stream keyed by the seed
/// and the cell's (row, column), so it does not depend on processing order.
/// Load errors report 1-based file rows and columns.
pub fn load_dataset(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut records: Vec<(usize, Vec<String>)> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line + 1, rec.iter().map(str::to_string).collect()));
    }
    let Some((_, first)) = records.first() else {
        return Err(Error::Dataset {
            path: path.into(),
            message: "file is empty".into(),
        });
    };
    let width = first.len();

    // Header detection needs the label column, which may itself need the header.
    let header_candidate = first.clone();
    let is_missing = |cell: &str| cell == opts.missing_token;
    let has_header = match opts.has_header {
        Some(h) => h,
        None => match opts.label_column.resolve(Some(&header_candidate), width) {
            Ok(label) => header_candidate
                .iter()
                .enumerate()
                .any(|(c, cell)| c != label && !is_missing(cell) && cell.parse::<f64>().is_err()),
            Err(_) => true,
        },
    };
    let header = has_header.then_some(header_candidate);
    if has_header {
        records.remove(0);
    }
    if records.is_empty() {
        return Err(Error::Dataset {
            path: path.into(),
            message: "no data rows".into(),
        });
    }

    let label_col = opts.label_column.resolve(header.as_deref(), width)?;
    let mut ignored = Vec::new();
    for c in &opts.ignore_columns {
        ignored.push(c.resolve(header.as_deref(), width)?);
    }
    if ignored.contains(&label_col) {
        return Err(Error::usage("the label column cannot be ignored"));
    }
    let feature_cols: Vec<usize> = (0..width)
        .filter(|c| *c != label_col && !ignored.contains(c))
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::usage("no feature columns left"));
    }

    let n = records.len();
    let m = feature_cols.len();
    let mut values = vec![f64::NAN; n * m];
    let mut labels = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (r, (line, rec)) in records.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::Load {
                path: path.into(),
                row: *line,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        labels.push(rec[label_col].clone());
        for (f, &c) in feature_cols.iter().enumerate() {
            let cell = rec[c].as_str();
            if is_missing(cell) {
                missing.push((r, f));
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values[r * m + f] = v,
                _ => {
                    return Err(Error::Load {
                        path: path.into(),
                        row: *line,
                        column: c + 1,
                        message: format!("cannot parse `{cell}` as a number"),
                    })
                }
            }
        }
    }
    let mut features = Array2::from_shape_vec((n, m), values).expect("n * m values");

    let bounds: Vec<Option<(f64, f64)>> = features
        .columns()
        .into_iter()
        .map(|col| {
            col.iter().filter(|v| !v.is_nan()).fold(None, |acc, &v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
            })
        })
        .collect();
    for &(r, f) in &missing {
        let (lo, hi) = bounds[f].ok_or_else(|| Error::Dataset {
            path: path.into(),
            message: format!("column {} has no observed values to impute from", feature_cols[f] + 1),
        })?;
        let u: f64 = rng::stream(opts.seed, r as u64, f as u64).random();
        features[[r, f]] = lo + (hi - lo) * u;
    }

    Ok(Dataset {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        features,
        labels,
        imputed_cells: missing,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Load {
            path: path.into(),
            row: line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}
