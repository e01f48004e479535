//! Seed sweeps over `(alpha, k, n_stas, scheme, mode)`, CSV result tables and
//! trend checks between sweep points.
//!
//! A sweep file looks like:
//!
//! ```toml
//! base_config = "baseline.toml"   # relative to the sweep file
//! out = "results.csv"
//!
//! [seeds]
//! count = 20
//! base = 1                      # run i uses seed base + i
//!
//! [axes]
//! alpha = [0.01, 0.1, 0.5, 0.9]
//! k = [4, 12]
//! n_stas = [4, 8, 12]
//! scheme = ["original"]
//! mode = ["non-cooperative", "cooperative"]
//! ```
//!
//! The CSV has one `data` row per (point, seed) followed by one `summary` row
//! per point holding means and sample standard deviations.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Mode, Scheme, SimConfig, Violation};
use crate::sim::{self, RunMetrics, RunOptions, SimError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("sweep file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid sweep: {}", .0.join("; "))]
    InvalidSweep(Vec<String>),
    #[error("point {point}: {}", join(.violations))]
    InvalidPoint { point: String, violations: Vec<Violation> },
    #[error("point {point}, seed {seed}: {source}")]
    Run { point: String, seed: u64, source: SimError },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    pub alpha: Vec<f64>,
    pub k: Vec<usize>,
    pub n_stas: Vec<usize>,
    pub scheme: Vec<Scheme>,
    pub mode: Vec<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub count: u32,
    pub base: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base_config: PathBuf,
    pub out: PathBuf,
    pub seeds: Seeds,
    pub axes: Axes,
}

impl SweepSpec {
    /// Parses a sweep file; relative paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.to_owned(), source })?;
        let mut spec: SweepSpec = toml::from_str(&text)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        if spec.base_config.is_relative() {
            spec.base_config = dir.join(&spec.base_config);
        }
        if spec.out.is_relative() {
            spec.out = dir.join(&spec.out);
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let axes = &self.axes;
        for (name, empty) in [
            ("alpha", axes.alpha.is_empty()),
            ("k", axes.k.is_empty()),
            ("n_stas", axes.n_stas.is_empty()),
            ("scheme", axes.scheme.is_empty()),
            ("mode", axes.mode.is_empty()),
        ] {
            if empty {
                problems.push(format!("axis {name} is empty"));
            }
        }
        if self.seeds.count == 0 {
            problems.push("seeds.count must be at least 1".to_owned());
        }
        problems
    }

    /// Cartesian product of the axes, `alpha` outermost and `mode` innermost.
    pub fn points(&self) -> Vec<SweepPoint> {
        let a = &self.axes;
        let mut out = Vec::new();
        for &alpha in &a.alpha {
            for &k in &a.k {
                for &n_stas in &a.n_stas {
                    for &scheme in &a.scheme {
                        for &mode in &a.mode {
                            out.push(SweepPoint { alpha, k, n_stas, scheme, mode });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub k: usize,
    pub n_stas: usize,
    pub scheme: Scheme,
    pub mode: Mode,
}

impl SweepPoint {
    pub fn apply(&self, base: &SimConfig, seed: u64) -> SimConfig {
        let mut cfg = base.clone();
        let net = &mut cfg.network;
        net.alpha = self.alpha;
        net.k = self.k;
        net.n_stas = self.n_stas;
        net.scheme = self.scheme;
        net.mode = self.mode;
        net.seed = seed;
        cfg
    }

    /// Summary key with `alpha` as exact bits.
    fn key(&self) -> PointKey {
        (self.alpha.to_bits(), self.k, self.n_stas, self.scheme, self.mode)
    }
}

type PointKey = (u64, usize, usize, Scheme, Mode);

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={} k={} n_stas={} scheme={} mode={}", self.alpha, self.k, self.n_stas, self.scheme, self.mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Data,
    Summary,
}

/// One CSV line. Data rows leave the `*_std` columns empty; summary rows
/// leave `seed` empty and set `n` to the number of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub row: RowKind,
    pub alpha: f64,
    pub k: usize,
    pub n_stas: usize,
    pub scheme: Scheme,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub n: u32,
    pub mse_mean: f64,
    pub throughput: f64,
    pub jain: f64,
    pub sensing_count: f64,
    pub comm_count: f64,
    pub mse_std: Option<f64>,
    pub throughput_std: Option<f64>,
    pub jain_std: Option<f64>,
    pub sensing_count_std: Option<f64>,
    pub comm_count_std: Option<f64>,
}

impl ResultRow {
    pub fn point(&self) -> SweepPoint {
        SweepPoint { alpha: self.alpha, k: self.k, n_stas: self.n_stas, scheme: self.scheme, mode: self.mode }
    }

    fn data(point: &SweepPoint, seed: u64, m: &RunMetrics) -> Self {
        Self {
            row: RowKind::Data,
            alpha: point.alpha,
            k: point.k,
            n_stas: point.n_stas,
            scheme: point.scheme,
            mode: point.mode,
            seed: Some(seed),
            n: 1,
            mse_mean: m.mse_mean,
            throughput: m.throughput,
            jain: m.jain,
            sensing_count: m.sensing_count as f64,
            comm_count: m.comm_count as f64,
            mse_std: None,
            throughput_std: None,
            jain_std: None,
            sensing_count_std: None,
            comm_count_std: None,
        }
    }

    fn summary(point: &SweepPoint, data: &[ResultRow]) -> Self {
        let col = |f: fn(&ResultRow) -> f64| -> Vec<f64> { data.iter().map(f).collect() };
        let (mse, mse_sd) = mean_std(&col(|r| r.mse_mean));
        let (thr, thr_sd) = mean_std(&col(|r| r.throughput));
        let (jain, jain_sd) = mean_std(&col(|r| r.jain));
        let (sense, sense_sd) = mean_std(&col(|r| r.sensing_count));
        let (comm, comm_sd) = mean_std(&col(|r| r.comm_count));
        Self {
            row: RowKind::Summary,
            alpha: point.alpha,
            k: point.k,
            n_stas: point.n_stas,
            scheme: point.scheme,
            mode: point.mode,
            seed: None,
            n: data.len() as u32,
            mse_mean: mse,
            throughput: thr,
            jain,
            sensing_count: sense,
            comm_count: comm,
            mse_std: Some(mse_sd),
            throughput_std: Some(thr_sd),
            jain_std: Some(jain_sd),
            sensing_count_std: Some(sense_sd),
            comm_count_std: Some(comm_sd),
        }
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Data rows of each point, then its summary row, points in sweep order.
    pub rows: Vec<ResultRow>,
    /// Per-run traces in row order when requested.
    pub traces: Vec<(SweepPoint, u64, String)>,
}

impl SweepResult {
    pub fn summaries(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.row == RowKind::Summary)
    }

    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        write_csv(&self.rows)
    }
}

pub fn write_csv(rows: &[ResultRow]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_csv(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?)
}

/// Runs every point of the spec for every seed against `base`, in parallel.
pub fn run_sweep_with(base: &SimConfig, spec: &SweepSpec, trace: bool) -> Result<SweepResult, ExperimentError> {
    let problems = spec.validate();
    if !problems.is_empty() {
        return Err(ExperimentError::InvalidSweep(problems));
    }
    let points = spec.points();
    for p in &points {
        let violations = p.apply(base, spec.seeds.base).validate();
        if !violations.is_empty() {
            return Err(ExperimentError::InvalidPoint { point: p.to_string(), violations });
        }
    }
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|i| (0..u64::from(spec.seeds.count)).map(move |s| (i, spec.seeds.base.wrapping_add(s))))
        .collect();
    let opts = RunOptions { trace, record_decisions: false };
    let runs: Vec<RunMetrics> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            sim::run(&points[i].apply(base, seed), opts).map_err(|source| ExperimentError::Run {
                point: points[i].to_string(),
                seed,
                source,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(jobs.len() + points.len());
    let mut traces = Vec::new();
    let per_point = spec.seeds.count as usize;
    for (i, point) in points.iter().enumerate() {
        let slice = &jobs[i * per_point..(i + 1) * per_point];
        let data: Vec<ResultRow> = slice
            .iter()
            .zip(&runs[i * per_point..(i + 1) * per_point])
            .map(|(&(_, seed), m)| ResultRow::data(point, seed, m))
            .collect();
        if trace {
            for (&(_, seed), m) in slice.iter().zip(&runs[i * per_point..(i + 1) * per_point]) {
                traces.push((*point, seed, m.trace_text()));
            }
        }
        let summary = ResultRow::summary(point, &data);
        rows.extend(data);
        rows.push(summary);
    }
    Ok(SweepResult { rows, traces })
}

/// Loads the base configuration named by the spec and runs the sweep.
pub fn run_sweep(spec: &SweepSpec, trace: bool) -> Result<SweepResult, ExperimentError> {
    let base = SimConfig::load(&spec.base_config)?;
    run_sweep_with(&base, spec, trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendStatus {
    Pass,
    Fail,
    /// The results do not cover the points this trend compares.
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendLine {
    pub name: String,
    pub status: TrendStatus,
    pub detail: String,
}

impl fmt::Display for TrendLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            TrendStatus::Pass => "PASS",
            TrendStatus::Fail => "FAIL",
            TrendStatus::Missing => "MISSING",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrendReport {
    pub lines: Vec<TrendLine>,
}

impl TrendReport {
    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.status == TrendStatus::Fail)
    }

    fn push(&mut self, name: String, pass: Option<bool>, detail: String) {
        let status = match pass {
            Some(true) => TrendStatus::Pass,
            Some(false) => TrendStatus::Fail,
            None => TrendStatus::Missing,
        };
        self.lines.push(TrendLine { name, status, detail });
    }
}

impl fmt::Display for TrendReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Relative amount by which `lower` undercuts `higher`.
fn margin(lower: f64, higher: f64) -> f64 {
    (higher - lower) / higher.abs()
}

/// A series that should decrease: every step may rise by at most
/// `tolerance`, and at least `min_strict` steps must drop by `strict`.
fn decreasing(series: &[f64], tolerance: f64, strict: f64, min_strict: usize) -> bool {
    let steps: Vec<f64> = series.windows(2).map(|w| margin(w[1], w[0])).collect();
    steps.iter().all(|&m| m >= -tolerance) && steps.iter().filter(|&&m| m >= strict).count() >= min_strict
}

fn fmt_series(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(" > ")
}

/// Checks the qualitative orderings the results should show, using the
/// summary rows. Comparisons whose points are absent are reported as missing.
pub fn compare_schemes(rows: &[ResultRow]) -> TrendReport {
    let summaries: BTreeMap<PointKey, &ResultRow> =
        rows.iter().filter(|r| r.row == RowKind::Summary).map(|r| (r.point().key(), r)).collect();
    let get = |alpha: f64, k: usize, n: usize, scheme: Scheme, mode: Mode| {
        summaries.get(&(alpha.to_bits(), k, n, scheme, mode)).copied()
    };
    let mut alphas: Vec<f64> = summaries.keys().map(|k| f64::from_bits(k.0)).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let mut ks: Vec<usize> = summaries.keys().map(|k| k.1).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut ms: Vec<usize> = summaries.keys().map(|k| k.2).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut report = TrendReport::default();

    // Sensing/communications tradeoff along alpha.
    for &k in &ks {
        for &m in &ms {
            for mode in Mode::ALL {
                let series: Option<Vec<&ResultRow>> =
                    alphas.iter().map(|&a| get(a, k, m, Scheme::Original, mode)).collect();
                let name = format!("alpha tradeoff k={k} n_stas={m} {mode}");
                match series {
                    Some(s) if s.len() >= 2 => {
                        let mse: Vec<f64> = s.iter().map(|r| r.mse_mean).collect();
                        let thr: Vec<f64> = s.iter().map(|r| r.throughput).collect();
                        let need = (s.len() - 1).min(2);
                        let ok = decreasing(&mse, 0.02, 0.02, need) && decreasing(&thr, 0.02, 0.02, need);
                        report.push(name, Some(ok), format!("mse {}; throughput {}", fmt_series(&mse), fmt_series(&thr)));
                    }
                    _ => report.push(name, None, "needs two or more alpha values".into()),
                }
            }
        }
    }

    // Candidate-count insensitivity.
    if let (Some(&k_lo), Some(&k_hi)) = (ks.first(), ks.last()) {
        for &a in &alphas {
            for &m in &ms {
                for mode in Mode::ALL {
                    let name = format!("k insensitivity alpha={a} n_stas={m} {mode}");
                    match (get(a, k_lo, m, Scheme::Original, mode), get(a, k_hi, m, Scheme::Original, mode)) {
                        (Some(lo), Some(hi)) if k_lo != k_hi => {
                            let dm = (lo.mse_mean - hi.mse_mean).abs() / hi.mse_mean;
                            let dt = (lo.throughput - hi.throughput).abs() / hi.throughput;
                            report.push(name, Some(dm <= 0.10 && dt <= 0.10), format!("mse diff {dm:.3}, throughput diff {dt:.3}"));
                        }
                        _ => report.push(name, None, "needs two k values".into()),
                    }
                }
            }
        }
    }

    // Cooperative against non-cooperative.
    for &a in &alphas {
        for &k in &ks {
            for &m in &ms {
                let name = format!("mode ordering alpha={a} k={k} n_stas={m}");
                match (
                    get(a, k, m, Scheme::Original, Mode::Cooperative),
                    get(a, k, m, Scheme::Original, Mode::NonCooperative),
                ) {
                    (Some(c), Some(n)) => {
                        let need = if a == 0.5 { 0.02 } else { 0.0 };
                        let dm = margin(c.mse_mean, n.mse_mean);
                        let dt = margin(c.throughput, n.throughput);
                        let ok = dm > need && dt > need;
                        report.push(name, Some(ok), format!("coop mse lower by {dm:.3}, non-coop throughput higher by {dt:.3}"));
                    }
                    _ => report.push(name, None, "needs both modes".into()),
                }
            }
        }
    }

    // More stations, better tracking.
    for &a in &alphas {
        for &k in &ks {
            for mode in Mode::ALL {
                let name = format!("station count alpha={a} k={k} {mode}");
                let series: Option<Vec<f64>> =
                    ms.iter().map(|&m| get(a, k, m, Scheme::Original, mode).map(|r| r.mse_mean)).collect();
                match series {
                    Some(s) if s.len() >= 2 => {
                        let overall = margin(s[s.len() - 1], s[0]);
                        let ok = decreasing(&s, 0.02, 0.0, 0) && overall >= 0.05;
                        report.push(name, Some(ok), format!("mse {}; overall decrease {overall:.3}", fmt_series(&s)));
                    }
                    _ => report.push(name, None, "needs two or more station counts".into()),
                }
            }
        }
    }

    // Baselines.
    for &a in &alphas {
        for &k in &ks {
            for &m in &ms {
                for mode in Mode::ALL {
                    let Some(orig) = get(a, k, m, Scheme::Original, mode) else { continue };
                    let tag = format!("alpha={a} k={k} n_stas={m} {mode}");
                    let mut check = |scheme: Scheme, name: &str, f: &dyn Fn(&ResultRow, &ResultRow) -> (bool, String)| {
                        let name = format!("{name} {tag}");
                        match get(a, k, m, scheme, mode) {
                            Some(other) => {
                                let (ok, detail) = f(orig, other);
                                report.push(name, Some(ok), detail);
                            }
                            None => report.push(name, None, format!("needs scheme {scheme}")),
                        }
                    };
                    check(Scheme::RsmsS, "original vs rsms-s", &|o, s| {
                        let dm = margin(o.mse_mean, s.mse_mean);
                        let dt = (o.throughput - s.throughput).abs() / s.throughput;
                        let dj = (o.jain - s.jain).abs() / s.jain;
                        (dm >= 0.05 && dt <= 0.05 && dj <= 0.05, format!("mse lower by {dm:.3}; throughput diff {dt:.3}; jain diff {dj:.3}"))
                    });
                    check(Scheme::RsmsC, "original vs rsms-c", &|o, c| {
                        let dt = margin(c.throughput, o.throughput);
                        let dj = margin(c.jain, o.jain);
                        let dm = (o.mse_mean - c.mse_mean).abs() / c.mse_mean;
                        (dt >= 0.02 && dj >= 0.02 && dm <= 0.05, format!("throughput higher by {dt:.3}; jain higher by {dj:.3}; mse diff {dm:.3}"))
                    });
                    check(Scheme::RsmsSC, "original vs rsms-sc", &|o, sc| {
                        let ok = o.mse_mean < sc.mse_mean && o.throughput > sc.throughput && o.jain > sc.jain;
                        (ok, format!(
                            "mse {:.4e} vs {:.4e}; throughput {:.4e} vs {:.4e}; jain {:.4} vs {:.4}",
                            o.mse_mean, sc.mse_mean, o.throughput, sc.throughput, o.jain, sc.jain
                        ))
                    });
                }
            }
        }
    }
    report
}
