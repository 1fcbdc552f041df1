//! Tabular PV time series: ingestion, cleaning, feature engineering,
//! splitting and a deterministic synthetic plant generator.
//!
//! The on-disk format is a CSV with header
//! `timestamp,air_temp,rel_humidity,wind_speed,wind_dir,ghi,dhi,pv_power`
//! (column order free). Timestamps are ISO 8601 with a fixed UTC offset;
//! `pv_power` (W) is the regression target, everything else a feature.

use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, FixedOffset, SecondsFormat, TimeZone};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

/// Canonical CSV column order used by `save_csv` and the synthetic generator.
pub const CSV_SCHEMA: [&str; 8] = [
    "timestamp",
    "air_temp",
    "rel_humidity",
    "wind_speed",
    "wind_dir",
    "ghi",
    "dhi",
    "pv_power",
];

/// Column holding the regression target.
pub const TARGET_COLUMN: &str = "pv_power";
/// Column holding the row instant.
pub const TIMESTAMP_COLUMN: &str = "timestamp";

/// Name of the previous-year lag feature added by [`add_lag_features`].
pub const PREV_YEAR_COLUMN: &str = "pv_prev_year";
/// Name of the hour-of-day feature added by [`add_lag_features`].
pub const HOUR_COLUMN: &str = "hour";

const SECONDS_PER_DAY: i64 = 86_400;
const YEAR_OFFSET_S: i64 = 365 * SECONDS_PER_DAY;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("unexpected column: {0}")]
    UnexpectedColumn(String),
    #[error("parse error at data row {row}, column {column}: {reason}")]
    ParseError {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("timestamps are not strictly increasing")]
    NonMonotonicTimestamps,
    #[error("no rows survived cleaning")]
    EmptyAfterClean,
    #[error("dataset spans less than one year; previous-year lag unavailable")]
    InsufficientHistory,
    #[error("invalid configuration for field {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("inconsistent dataset: {0}")]
    Inconsistent(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Immutable tabular time series at a fixed cadence.
///
/// Row count, timestamp count and target length always agree; timestamps
/// are strictly increasing and lie on the cadence grid. Values may contain
/// NaN/infinities until [`clean`] has run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    timestamps: Vec<i64>,
    utc_offset_secs: i32,
    cadence_s: i64,
    feature_names: Vec<String>,
    /// Row-major matrix, one row per instant.
    features: Vec<f64>,
    target: Vec<f64>,
}

impl Dataset {
    pub fn new(
        timestamps: Vec<i64>,
        utc_offset_secs: i32,
        cadence_s: i64,
        feature_names: Vec<String>,
        features: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        let n = timestamps.len();
        let d = feature_names.len();
        if target.len() != n {
            return Err(DatasetError::Inconsistent(format!(
                "{} timestamps but {} target values",
                n,
                target.len()
            )));
        }
        if features.len() != n * d {
            return Err(DatasetError::Inconsistent(format!(
                "feature matrix has {} cells, expected {} rows x {} columns",
                features.len(),
                n,
                d
            )));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if feature_names[i] == feature_names[j] {
                    return Err(DatasetError::Inconsistent(format!(
                        "duplicate feature name {}",
                        feature_names[i]
                    )));
                }
            }
        }
        if cadence_s <= 0 {
            return Err(DatasetError::InvalidConfig {
                field: "cadence_s".into(),
                reason: "must be positive".into(),
            });
        }
        for w in timestamps.windows(2) {
            let delta = w[1] - w[0];
            if delta <= 0 {
                return Err(DatasetError::NonMonotonicTimestamps);
            }
            if delta % cadence_s != 0 {
                return Err(DatasetError::Inconsistent(format!(
                    "timestamp gap {delta}s is off the {cadence_s}s cadence grid"
                )));
            }
        }
        Ok(Self {
            timestamps,
            utc_offset_secs,
            cadence_s,
            feature_names,
            features,
            target,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn utc_offset_secs(&self) -> i32 {
        self.utc_offset_secs
    }

    pub fn cadence_s(&self) -> i64 {
        self.cadence_s
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Row-major feature matrix (`n_rows * n_features` cells).
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn feature_column(&self, j: usize) -> Vec<f64> {
        let d = self.n_features();
        self.features.iter().skip(j).step_by(d).copied().collect()
    }

    /// New dataset keeping only the given rows. Indices must be strictly
    /// increasing so timestamps stay ordered.
    pub fn take_rows(&self, indices: &[usize]) -> Result<Self, DatasetError> {
        let d = self.n_features();
        let mut timestamps = Vec::with_capacity(indices.len());
        let mut features = Vec::with_capacity(indices.len() * d);
        let mut target = Vec::with_capacity(indices.len());
        for &i in indices {
            timestamps.push(self.timestamps[i]);
            features.extend_from_slice(self.row(i));
            target.push(self.target[i]);
        }
        Self::new(
            timestamps,
            self.utc_offset_secs,
            self.cadence_s,
            self.feature_names.clone(),
            features,
            target,
        )
    }

    /// New dataset with feature column `j` removed.
    pub fn with_column_removed(&self, j: usize) -> Result<Self, DatasetError> {
        let d = self.n_features();
        if j >= d {
            return Err(DatasetError::Inconsistent(format!(
                "column index {j} out of range ({d} features)"
            )));
        }
        let mut names = self.feature_names.clone();
        names.remove(j);
        let mut features = Vec::with_capacity(self.n_rows() * (d - 1));
        for i in 0..self.n_rows() {
            let row = self.row(i);
            features.extend_from_slice(&row[..j]);
            features.extend_from_slice(&row[j + 1..]);
        }
        Self::new(
            self.timestamps.clone(),
            self.utc_offset_secs,
            self.cadence_s,
            names,
            features,
            self.target.clone(),
        )
    }

    /// New dataset with a feature column appended on the right.
    pub fn with_column_appended(&self, name: &str, values: &[f64]) -> Result<Self, DatasetError> {
        if values.len() != self.n_rows() {
            return Err(DatasetError::Inconsistent(format!(
                "column {} has {} values for {} rows",
                name,
                values.len(),
                self.n_rows()
            )));
        }
        let mut names = self.feature_names.clone();
        names.push(name.to_string());
        let d = self.n_features();
        let mut features = Vec::with_capacity(self.n_rows() * (d + 1));
        for i in 0..self.n_rows() {
            features.extend_from_slice(self.row(i));
            features.push(values[i]);
        }
        Self::new(
            self.timestamps.clone(),
            self.utc_offset_secs,
            self.cadence_s,
            names,
            features,
            self.target.clone(),
        )
    }

    /// New dataset with the target replaced.
    pub fn with_target(&self, target: Vec<f64>) -> Result<Self, DatasetError> {
        Self::new(
            self.timestamps.clone(),
            self.utc_offset_secs,
            self.cadence_s,
            self.feature_names.clone(),
            self.features.clone(),
            target,
        )
    }

    /// Local seconds since midnight for row `i`.
    fn local_seconds_of_day(&self, i: usize) -> i64 {
        (self.timestamps[i] + i64::from(self.utc_offset_secs)).rem_euclid(SECONDS_PER_DAY)
    }
}

/// How to divide a dataset into train and test parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitMode {
    /// Earliest rows train, latest rows test.
    Chronological,
    /// Seeded random partition; rows keep chronological order within each part.
    Random { seed: u64 },
    /// Everything at or after `test_start` (epoch seconds) is test.
    Holdout { test_start: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub mode: SplitMode,
}

impl SplitSpec {
    pub fn chronological(train_fraction: f64) -> Self {
        Self {
            train_fraction,
            mode: SplitMode::Chronological,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(DatasetError::InvalidConfig {
                field: "train_fraction".into(),
                reason: format!("must lie in (0,1), got {}", self.train_fraction),
            });
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::chronological(0.8)
    }
}

/// Which engineered columns [`add_lag_features`] appends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LagConfig {
    /// Append `pv_prev_year`: the target observed exactly 365 days earlier.
    pub prev_year: bool,
    /// Append `hour`: integer local hour-of-day in [0, 24).
    pub hour_indicator: bool,
}

/// Synthetic plant configuration. One simulated day has `86400 / cadence_s`
/// rows (288 at the default 5-minute cadence).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_days: u32,
    pub cadence_s: i64,
    pub peak_power_w: f64,
    pub cloud_noise_sd: f64,
    pub seasonal_amplitude: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_days: 2,
            cadence_s: 300,
            peak_power_w: 5_000.0,
            cloud_noise_sd: 0.2,
            seasonal_amplitude: 0.25,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.n_days < 2 {
            return Err(DatasetError::InvalidConfig {
                field: "n_days".into(),
                reason: format!("must be >= 2, got {}", self.n_days),
            });
        }
        if self.cadence_s <= 0 || SECONDS_PER_DAY % self.cadence_s != 0 {
            return Err(DatasetError::InvalidConfig {
                field: "cadence_s".into(),
                reason: format!("{} does not divide 86400", self.cadence_s),
            });
        }
        if !(self.peak_power_w > 0.0) {
            return Err(DatasetError::InvalidConfig {
                field: "peak_power_w".into(),
                reason: "must be positive".into(),
            });
        }
        if self.cloud_noise_sd < 0.0 {
            return Err(DatasetError::InvalidConfig {
                field: "cloud_noise_sd".into(),
                reason: "must be >= 0".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.seasonal_amplitude) {
            return Err(DatasetError::InvalidConfig {
                field: "seasonal_amplitude".into(),
                reason: "must lie in [0,1]".into(),
            });
        }
        Ok(())
    }
}

/// Load a CSV whose header contains exactly the `schema` columns (any order).
///
/// The `timestamp` column is parsed as ISO 8601 with a fixed UTC offset that
/// must be shared by every row; numeric cells parse as `f64` (literal
/// `NaN`/`inf` are accepted and later removed by [`clean`]). Row numbers in
/// errors are 0-based data rows, excluding the header. The cadence is
/// inferred as the GCD of the timestamp gaps.
pub fn load_csv<P: AsRef<Path>>(path: P, schema: &[&str]) -> Result<Dataset, DatasetError> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    for want in schema {
        if !header.iter().any(|h| h == want) {
            return Err(DatasetError::MissingColumn((*want).to_string()));
        }
    }
    for have in &header {
        if !schema.iter().any(|s| s == have) {
            return Err(DatasetError::UnexpectedColumn(have.clone()));
        }
    }

    let ts_pos = header
        .iter()
        .position(|h| h == TIMESTAMP_COLUMN)
        .ok_or_else(|| DatasetError::MissingColumn(TIMESTAMP_COLUMN.into()))?;
    let target_pos = header
        .iter()
        .position(|h| h == TARGET_COLUMN)
        .ok_or_else(|| DatasetError::MissingColumn(TARGET_COLUMN.into()))?;
    // Feature columns keep the schema's order, not the file's.
    let feature_cols: Vec<(String, usize)> = schema
        .iter()
        .filter(|s| **s != TIMESTAMP_COLUMN && **s != TARGET_COLUMN)
        .map(|s| {
            let pos = header.iter().position(|h| h == s).expect("checked above");
            (s.to_string(), pos)
        })
        .collect();

    let mut timestamps = Vec::new();
    let mut features = Vec::new();
    let mut target = Vec::new();
    let mut offset: Option<i32> = None;

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let ts_raw = record.get(ts_pos).unwrap_or("");
        let parsed: DateTime<FixedOffset> =
            DateTime::parse_from_rfc3339(ts_raw).map_err(|e| DatasetError::ParseError {
                row: row_idx,
                column: TIMESTAMP_COLUMN.into(),
                reason: e.to_string(),
            })?;
        let this_offset = parsed.offset().local_minus_utc();
        match offset {
            None => offset = Some(this_offset),
            Some(o) if o != this_offset => {
                return Err(DatasetError::ParseError {
                    row: row_idx,
                    column: TIMESTAMP_COLUMN.into(),
                    reason: "inconsistent UTC offset".into(),
                })
            }
            _ => {}
        }
        timestamps.push(parsed.timestamp());

        for (name, pos) in &feature_cols {
            let cell = record.get(*pos).unwrap_or("");
            let value: f64 = cell.trim().parse().map_err(|_| DatasetError::ParseError {
                row: row_idx,
                column: name.clone(),
                reason: format!("not a number: {cell:?}"),
            })?;
            features.push(value);
        }
        let cell = record.get(target_pos).unwrap_or("");
        let value: f64 = cell.trim().parse().map_err(|_| DatasetError::ParseError {
            row: row_idx,
            column: TARGET_COLUMN.into(),
            reason: format!("not a number: {cell:?}"),
        })?;
        target.push(value);
    }

    for w in timestamps.windows(2) {
        if w[1] <= w[0] {
            return Err(DatasetError::NonMonotonicTimestamps);
        }
    }
    let cadence = infer_cadence(&timestamps);
    let feature_names = feature_cols.into_iter().map(|(n, _)| n).collect();
    Dataset::new(
        timestamps,
        offset.unwrap_or(0),
        cadence,
        feature_names,
        features,
        target,
    )
}

fn infer_cadence(timestamps: &[i64]) -> i64 {
    let mut g = 0i64;
    for w in timestamps.windows(2) {
        g = gcd(g, w[1] - w[0]);
    }
    if g == 0 {
        300
    } else {
        g
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Write the dataset as CSV: `timestamp`, feature columns in dataset order,
/// then `pv_power`. Floats use the shortest round-trip representation, so
/// `load_csv(save_csv(d))` returns `d` for contiguous clean datasets.
pub fn save_csv<P: AsRef<Path>>(d: &Dataset, path: P) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec![TIMESTAMP_COLUMN.to_string()];
    header.extend(d.feature_names().iter().cloned());
    header.push(TARGET_COLUMN.to_string());
    writer.write_record(&header)?;

    let offset = FixedOffset::east_opt(d.utc_offset_secs()).ok_or_else(|| {
        DatasetError::Inconsistent(format!("invalid UTC offset {}", d.utc_offset_secs()))
    })?;
    for i in 0..d.n_rows() {
        let ts = offset
            .timestamp_opt(d.timestamps()[i], 0)
            .single()
            .ok_or_else(|| DatasetError::Inconsistent("timestamp out of range".into()))?;
        let mut record = vec![ts.to_rfc3339_opts(SecondsFormat::Secs, false)];
        for v in d.row(i) {
            record.push(format!("{v}"));
        }
        record.push(format!("{}", d.target()[i]));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn cell_in_range(name: &str, v: f64) -> bool {
    if !v.is_finite() {
        return false;
    }
    match name {
        "ghi" | "dhi" => v >= 0.0,
        "rel_humidity" => (0.0..=100.0).contains(&v),
        "wind_dir" => v.abs() <= 360.0,
        _ => true,
    }
}

/// Drop rows with missing or physically impossible values.
///
/// A row survives when every cell is finite, irradiance and PV power are
/// non-negative, humidity lies in [0, 100] and |wind_dir| <= 360. Returns
/// the cleaned dataset and the number of rows removed.
pub fn clean(raw: &Dataset) -> Result<(Dataset, usize), DatasetError> {
    let mut keep = Vec::with_capacity(raw.n_rows());
    for i in 0..raw.n_rows() {
        let t = raw.target()[i];
        let mut ok = t.is_finite() && t >= 0.0;
        if ok {
            for (j, name) in raw.feature_names().iter().enumerate() {
                if !cell_in_range(name, raw.row(i)[j]) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            keep.push(i);
        }
    }
    if keep.is_empty() {
        return Err(DatasetError::EmptyAfterClean);
    }
    let removed = raw.n_rows() - keep.len();
    Ok((raw.take_rows(&keep)?, removed))
}

/// Append engineered time features.
///
/// `pv_prev_year` is the target observed exactly 365 days earlier (exact
/// cadence-aligned lookup into the input dataset); rows whose lag instant is
/// not present are dropped. `hour` is the integer local hour-of-day.
pub fn add_lag_features(d: &Dataset, lags: LagConfig) -> Result<Dataset, DatasetError> {
    if !lags.prev_year && !lags.hour_indicator {
        return Ok(d.clone());
    }

    let mut keep: Vec<usize> = (0..d.n_rows()).collect();
    let mut prev_year_col: Option<Vec<f64>> = None;

    if lags.prev_year {
        let span = match (d.timestamps().first(), d.timestamps().last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        };
        if span < YEAR_OFFSET_S {
            return Err(DatasetError::InsufficientHistory);
        }
        let by_ts: HashMap<i64, usize> = d
            .timestamps()
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i))
            .collect();
        let mut kept = Vec::new();
        let mut col = Vec::new();
        for &i in &keep {
            let want = d.timestamps()[i] - YEAR_OFFSET_S;
            if let Some(&src) = by_ts.get(&want) {
                kept.push(i);
                col.push(d.target()[src]);
            }
        }
        if kept.is_empty() {
            return Err(DatasetError::InsufficientHistory);
        }
        keep = kept;
        prev_year_col = Some(col);
    }

    let mut out = d.take_rows(&keep)?;
    if let Some(col) = prev_year_col {
        out = out.with_column_appended(PREV_YEAR_COLUMN, &col)?;
    }
    if lags.hour_indicator {
        let hours: Vec<f64> = (0..out.n_rows())
            .map(|i| (out.local_seconds_of_day(i) / 3600) as f64)
            .collect();
        out = out.with_column_appended(HOUR_COLUMN, &hours)?;
    }
    Ok(out)
}

/// Partition into train and test per the spec's mode.
///
/// `|train| = round(train_fraction * n)`; the parts are disjoint and cover
/// the dataset. Random mode keeps chronological order inside each part.
pub fn split(d: &Dataset, s: &SplitSpec) -> Result<(Dataset, Dataset), DatasetError> {
    s.validate()?;
    let n = d.n_rows();
    if n < 2 {
        return Err(DatasetError::Inconsistent(
            "need at least 2 rows to split".into(),
        ));
    }
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = match s.mode {
        SplitMode::Chronological => {
            let n_train = (s.train_fraction * n as f64).round() as usize;
            ((0..n_train).collect(), (n_train..n).collect())
        }
        SplitMode::Random { seed } => {
            let n_train = (s.train_fraction * n as f64).round() as usize;
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = rng::stream(seed, "split", 0);
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let mut train: Vec<usize> = order[..n_train].to_vec();
            let mut test: Vec<usize> = order[n_train..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        }
        SplitMode::Holdout { test_start } => {
            let cut = d.timestamps().partition_point(|&t| t < test_start);
            ((0..cut).collect(), (cut..n).collect())
        }
    };
    Ok((d.take_rows(&train_idx)?, d.take_rows(&test_idx)?))
}

/// Deterministic synthetic PV plant.
///
/// The target is `peak_power_w * clear_sky * seasonal * clearness`, where
/// `clear_sky = max(0, sin(pi*(hour-6)/12))`, `seasonal = 1 +
/// seasonal_amplitude*sin(2*pi*day/365)` and `clearness` is a bounded
/// positive AR(1) cloud process (identically 1 when `cloud_noise_sd` is 0).
/// Weather columns are generated consistently: irradiance proportional to
/// the clear-sky term times clearness, a diurnal temperature sine, humidity
/// anti-correlated with irradiance.
pub fn synth_generate(c: &SynthConfig) -> Result<Dataset, DatasetError> {
    c.validate()?;
    // Alice-Springs-like fixed offset (+09:30), start of 2016.
    let offset_secs = 9 * 3600 + 1800;
    let offset = FixedOffset::east_opt(offset_secs).expect("static offset");
    let start = offset
        .with_ymd_and_hms(2016, 1, 1, 0, 0, 0)
        .single()
        .expect("static instant")
        .timestamp();

    let per_day = (SECONDS_PER_DAY / c.cadence_s) as usize;
    let n = c.n_days as usize * per_day;

    let mut cloud_rng = rng::stream(c.seed, "synth-cloud", 0);
    let mut wind_rng = rng::stream(c.seed, "synth-wind", 0);

    let mut timestamps = Vec::with_capacity(n);
    let mut features = Vec::with_capacity(n * 6);
    let mut target = Vec::with_capacity(n);

    // Smooth AR(1) driver for cloud cover, variance-normalized.
    let rho: f64 = 0.98;
    let innov = (1.0 - rho * rho).sqrt();
    let mut ar = 0.0f64;

    for i in 0..n {
        let day = (i / per_day) as f64;
        let sec_of_day = (i % per_day) as i64 * c.cadence_s;
        let hour = sec_of_day as f64 / 3600.0;

        let z: f64 = cloud_rng.sample(StandardNormal);
        ar = rho * ar + innov * z;
        let cloud = (ar.abs() * c.cloud_noise_sd).min(0.95);
        let clearness = 1.0 - cloud;

        let clear_sky = (std::f64::consts::PI * (hour - 6.0) / 12.0).sin().max(0.0);
        let seasonal = 1.0 + c.seasonal_amplitude * (2.0 * std::f64::consts::PI * day / 365.0).sin();
        let pv = c.peak_power_w * clear_sky * seasonal * clearness;

        let ghi = 1000.0 * clear_sky * seasonal * clearness;
        let dhi = ghi * (0.2 + 0.6 * cloud);
        let air_temp = 18.0
            + 9.0 * (std::f64::consts::PI * (hour - 9.0) / 12.0).sin()
            + 4.0 * (2.0 * std::f64::consts::PI * day / 365.0).sin();
        let rel_humidity = (82.0 - 0.05 * ghi + 12.0 * cloud).clamp(5.0, 100.0);
        let wv: f64 = wind_rng.sample(StandardNormal);
        let wd: f64 = wind_rng.sample(StandardNormal);
        let wind_speed = (3.2 + 1.8 * (2.0 * std::f64::consts::PI * (hour - 3.0) / 24.0).sin()
            + 0.4 * wv)
            .max(0.0);
        let wind_dir = (195.0
            + 75.0 * (2.0 * std::f64::consts::PI * day / 365.0).sin()
            + 25.0 * (2.0 * std::f64::consts::PI * hour / 24.0).sin()
            + 15.0 * wd)
            .rem_euclid(360.0);

        timestamps.push(start + i as i64 * c.cadence_s);
        features.extend_from_slice(&[air_temp, rel_humidity, wind_speed, wind_dir, ghi, dhi]);
        target.push(pv);
    }

    Dataset::new(
        timestamps,
        offset_secs,
        c.cadence_s,
        CSV_SCHEMA[1..7].iter().map(|s| s.to_string()).collect(),
        features,
        target,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn tiny_csv(contents: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    const SCHEMA: [&str; 8] = CSV_SCHEMA;

    #[test]
    fn load_csv_two_rows() {
        let f = tiny_csv(
            "timestamp,air_temp,rel_humidity,wind_speed,wind_dir,ghi,dhi,pv_power\n\
             2016-01-01T00:00:00+09:30,20,50,3,180,0,0,0\n\
             2016-01-01T00:05:00+09:30,21,49,3.5,181,0,0,0\n",
        );
        let d = load_csv(f.path(), &SCHEMA).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.n_features(), 6);
        assert_eq!(d.cadence_s(), 300);
        assert_eq!(d.utc_offset_secs(), 34200);
        assert_eq!(d.row(0), &[20.0, 50.0, 3.0, 180.0, 0.0, 0.0]);
    }

    #[test]
    fn load_csv_missing_target_column() {
        let f = tiny_csv(
            "timestamp,air_temp,rel_humidity,wind_speed,wind_dir,ghi,dhi\n\
             2016-01-01T00:00:00+09:30,20,50,3,180,0,0\n",
        );
        match load_csv(f.path(), &SCHEMA) {
            Err(DatasetError::MissingColumn(c)) => assert_eq!(c, "pv_power"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_bad_cell_reports_row_and_column() {
        let mut body = String::from(
            "timestamp,air_temp,rel_humidity,wind_speed,wind_dir,ghi,dhi,pv_power\n",
        );
        for i in 0..10 {
            let cell = if i == 7 { "abc" } else { "3" };
            body.push_str(&format!(
                "2016-01-01T{:02}:00:00+09:30,20,50,{cell},180,0,0,0\n",
                i
            ));
        }
        let f = tiny_csv(&body);
        match load_csv(f.path(), &SCHEMA) {
            Err(DatasetError::ParseError { row, column, .. }) => {
                assert_eq!(row, 7);
                assert_eq!(column, "wind_speed");
            }
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_unordered_timestamps() {
        let f = tiny_csv(
            "timestamp,air_temp,rel_humidity,wind_speed,wind_dir,ghi,dhi,pv_power\n\
             2016-01-01T00:05:00+09:30,20,50,3,180,0,0,0\n\
             2016-01-01T00:00:00+09:30,21,49,3.5,181,0,0,0\n",
        );
        assert!(matches!(
            load_csv(f.path(), &SCHEMA),
            Err(DatasetError::NonMonotonicTimestamps)
        ));
    }

    #[test]
    fn clean_removes_nan_rows() {
        let mut d = synth_generate(&SynthConfig::default()).unwrap();
        // Poison one row's temperature.
        d.features[3 * d.n_features()] = f64::NAN;
        let (cleaned, removed) = clean(&d).unwrap();
        assert_eq!(removed, 1);
        assert_eq!(cleaned.n_rows(), d.n_rows() - 1);
    }

    #[test]
    fn clean_removes_negative_power() {
        let mut d = synth_generate(&SynthConfig::default()).unwrap();
        d.target[10] = -5.0;
        let (cleaned, removed) = clean(&d).unwrap();
        assert_eq!(removed, 1);
        assert_eq!(cleaned.n_rows(), d.n_rows() - 1);
        assert!(cleaned.target().iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn clean_is_identity_on_clean_data() {
        let d = synth_generate(&SynthConfig::default()).unwrap();
        let (cleaned, removed) = clean(&d).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(cleaned, d);
    }

    #[test]
    fn clean_errors_when_nothing_survives() {
        let mut d = synth_generate(&SynthConfig::default()).unwrap();
        for t in d.target.iter_mut() {
            *t = f64::NAN;
        }
        assert!(matches!(clean(&d), Err(DatasetError::EmptyAfterClean)));
    }

    #[test]
    fn prev_year_lag_matches_brute_force_index_arithmetic() {
        let cfg = SynthConfig {
            n_days: 366,
            cloud_noise_sd: 0.0,
            ..SynthConfig::default()
        };
        let d = synth_generate(&cfg).unwrap();
        let out = add_lag_features(
            &d,
            LagConfig {
                prev_year: true,
                hour_indicator: false,
            },
        )
        .unwrap();
        let per_day = (86_400 / cfg.cadence_s) as usize;
        assert_eq!(out.n_rows(), per_day); // first 365 days dropped
        let col = out.feature_index(PREV_YEAR_COLUMN).unwrap();
        let steps_per_year = 365 * per_day;
        for i in 0..out.n_rows() {
            // Surviving row i corresponds to original row 365*per_day + i.
            let original = steps_per_year + i;
            assert_eq!(out.row(i)[col], d.target()[original - steps_per_year]);
            assert_eq!(out.timestamps()[i], d.timestamps()[original]);
        }
    }

    #[test]
    fn hour_indicator_is_clock_arithmetic() {
        let d = synth_generate(&SynthConfig::default()).unwrap();
        let out = add_lag_features(
            &d,
            LagConfig {
                prev_year: false,
                hour_indicator: true,
            },
        )
        .unwrap();
        let col = out.feature_index(HOUR_COLUMN).unwrap();
        for i in 0..out.n_rows() {
            let expect = (out.local_seconds_of_day(i) / 3600) as f64;
            assert_eq!(out.row(i)[col], expect);
            assert!((0.0..24.0).contains(&out.row(i)[col]));
        }
    }

    #[test]
    fn prev_year_needs_a_year_of_history() {
        let d = synth_generate(&SynthConfig {
            n_days: 10,
            ..SynthConfig::default()
        })
        .unwrap();
        assert!(matches!(
            add_lag_features(
                &d,
                LagConfig {
                    prev_year: true,
                    hour_indicator: false
                }
            ),
            Err(DatasetError::InsufficientHistory)
        ));
    }

    #[test]
    fn chronological_split_is_prefix_suffix() {
        let d = synth_generate(&SynthConfig::default()).unwrap();
        let ten = d.take_rows(&(0..10).collect::<Vec<_>>()).unwrap();
        let (train, test) = split(&ten, &SplitSpec::chronological(0.8)).unwrap();
        assert_eq!(train.n_rows(), 8);
        assert_eq!(test.n_rows(), 2);
        assert_eq!(train.timestamps(), &ten.timestamps()[..8]);
        assert_eq!(test.timestamps(), &ten.timestamps()[8..]);
    }

    #[test]
    fn random_split_is_deterministic() {
        let d = synth_generate(&SynthConfig::default()).unwrap();
        let spec = SplitSpec {
            train_fraction: 0.8,
            mode: SplitMode::Random { seed: 1 },
        };
        let (a_train, a_test) = split(&d, &spec).unwrap();
        let (b_train, b_test) = split(&d, &spec).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_test, b_test);
    }

    #[test]
    fn random_split_partitions_rows() {
        let d = synth_generate(&SynthConfig::default()).unwrap();
        for seed in 0..100u64 {
            let spec = SplitSpec {
                train_fraction: 0.7,
                mode: SplitMode::Random { seed },
            };
            let (train, test) = split(&d, &spec).unwrap();
            let mut all: Vec<i64> = train
                .timestamps()
                .iter()
                .chain(test.timestamps())
                .copied()
                .collect();
            all.sort_unstable();
            assert_eq!(all, d.timestamps());
            assert_eq!(train.n_rows() + test.n_rows(), d.n_rows());
        }
    }

    #[test]
    fn synth_endpoints_are_exact_without_noise() {
        let cfg = SynthConfig {
            n_days: 2,
            cloud_noise_sd: 0.0,
            seasonal_amplitude: 0.0,
            ..SynthConfig::default()
        };
        let d = synth_generate(&cfg).unwrap();
        let per_day = 288;
        // Solar noon of day 0 is local 12:00 -> row 144.
        assert_eq!(d.target()[144], cfg.peak_power_w);
        // Midnight.
        assert_eq!(d.target()[0], 0.0);
        assert_eq!(d.target()[per_day], 0.0);
        assert!(d.target().iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn synth_same_seed_bit_identical() {
        let cfg = SynthConfig {
            n_days: 3,
            ..SynthConfig::default()
        };
        assert_eq!(synth_generate(&cfg).unwrap(), synth_generate(&cfg).unwrap());
    }

    #[test]
    fn synth_row_count() {
        let d = synth_generate(&SynthConfig {
            n_days: 730,
            ..SynthConfig::default()
        })
        .unwrap();
        assert_eq!(d.n_rows(), 730 * 288);
    }

    #[test]
    fn synth_rejects_bad_cadence() {
        let err = synth_generate(&SynthConfig {
            cadence_s: 7,
            ..SynthConfig::default()
        })
        .unwrap_err();
        match err {
            DatasetError::InvalidConfig { field, .. } => assert_eq!(field, "cadence_s"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let d = synth_generate(&SynthConfig {
            n_days: 2,
            seed: 42,
            ..SynthConfig::default()
        })
        .unwrap();
        let f = NamedTempFile::new().unwrap();
        save_csv(&d, f.path()).unwrap();
        let back = load_csv(f.path(), &SCHEMA).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn lagged_chronological_split_never_leaks_future_values() {
        let cfg = SynthConfig {
            n_days: 500,
            ..SynthConfig::default()
        };
        let d = synth_generate(&cfg).unwrap();
        let lagged = add_lag_features(
            &d,
            LagConfig {
                prev_year: true,
                hour_indicator: true,
            },
        )
        .unwrap();
        let (_, test) = split(&lagged, &SplitSpec::chronological(0.8)).unwrap();
        // Every pv_prev_year value in a test row references an instant a full
        // year earlier, never anything inside the test period.
        let test_start = test.timestamps()[0];
        for &t in test.timestamps() {
            assert!(t - YEAR_OFFSET_S < test_start);
        }
    }
}
