//! Shared domain types, run configuration and validation.
//!
//! Internally all durations are integer nanoseconds and all SNRs are linear
//! power ratios. The on-disk format (TOML) uses microseconds for durations so
//! that the timing table can be written the way it is usually quoted.
//!
//! Config file layout:
//!
//! ```toml
//! [network]
//! n_links = 3
//! n_stas = 12
//! carrier_freq_hz = [2.437e9, 5.25e9, 6.295e9]
//! bandwidth_hz = [4.0e7, 8.0e7, 1.6e8]
//! ap_tx_power_dbm = 43.0
//! sta_tx_power_dbm = 23.0
//! mimo = [4, 2]
//! noise_figure_db = 7.0
//! arena_half_width_m = 10.0
//! dl_arrival_rate_bps = 2.0e7
//! alpha = 0.5
//! k = 4
//! process_noise_intensity = 0.1
//! cv_offdiag = "standard"
//! scheme = "original"
//! mode = "non-cooperative"
//! seed = 1
//!
//! [timing]
//! sifs_us = 16.0
//! tf_us = 10.8
//! cts_us = 4.6
//! ack_us = 4.6
//! ndp_base_us = 44.0
//! ltf_symbols = 4
//! ltf_repetitions = 4
//! window_us = 10240.0
//! n_windows = 200
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::Path;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Simulation time in nanoseconds.
pub type Nanos = u64;

pub const NANOS_PER_MICRO: u64 = 1_000;
pub const NANOS_PER_SEC: u64 = 1_000_000_000;

pub fn micros(us: f64) -> Nanos {
    (us * NANOS_PER_MICRO as f64).round() as Nanos
}

pub fn nanos_to_secs(t: Nanos) -> f64 {
    t as f64 / NANOS_PER_SEC as f64
}

/// Kinematic state `[x, vx, y, vy]` in metres and metres per second.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TargetState {
    pub x: f64,
    pub vx: f64,
    pub y: f64,
    pub vy: f64,
}

impl TargetState {
    pub fn new(x: f64, vx: f64, y: f64, vy: f64) -> Self {
        Self { x, vx, y, vy }
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.x, self.vx, self.y, self.vy)
    }

    pub fn position(&self) -> Position {
        Position::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.vx.is_finite() && self.y.is_finite() && self.vy.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeliefKind {
    Predicted,
    Updated,
}

/// Filtered state estimate together with its mean-squared-error matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackBelief {
    pub state: TargetState,
    pub mse: Matrix4<f64>,
    pub kind: BeliefKind,
}

impl TrackBelief {
    pub fn updated(state: TargetState, mse: Matrix4<f64>) -> Self {
        Self { state, mse, kind: BeliefKind::Updated }
    }

    /// Symmetric to 1e-9 relative and no eigenvalue below `-1e-9 * trace`.
    pub fn mse_is_valid(&self) -> bool {
        let scale = self.mse.abs().max().max(f64::MIN_POSITIVE);
        let asym = (self.mse - self.mse.transpose()).abs().max();
        if asym > 1e-9 * scale {
            return false;
        }
        let sym = (self.mse + self.mse.transpose()) * 0.5;
        let trace = sym.trace().abs();
        sym.symmetric_eigenvalues().iter().all(|&ev| ev >= -1e-9 * trace.max(scale))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Per-station snapshot as seen by the AP MLD.
#[derive(Debug, Clone, PartialEq)]
pub struct StaRecord {
    /// Zero-based station index.
    pub id: usize,
    pub pos: Position,
    /// Linear UL SNR per link.
    pub ul_snr: Vec<f64>,
    /// Linear DL SNR per link.
    pub dl_snr: Vec<f64>,
    /// Cumulative DL bytes delivered.
    pub bytes_received: u64,
    /// DL bytes waiting at the AP.
    pub backlog: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "rsms-s")]
    RsmsS,
    #[serde(rename = "rsms-c")]
    RsmsC,
    #[serde(rename = "rsms-sc")]
    RsmsSC,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Original, Scheme::RsmsS, Scheme::RsmsC, Scheme::RsmsSC];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Original => "original",
            Scheme::RsmsS => "rsms-s",
            Scheme::RsmsC => "rsms-c",
            Scheme::RsmsSC => "rsms-sc",
        }
    }

    pub fn random_sensing(&self) -> bool {
        matches!(self, Scheme::RsmsS | Scheme::RsmsSC)
    }

    pub fn random_comm(&self) -> bool {
        matches!(self, Scheme::RsmsC | Scheme::RsmsSC)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "non-cooperative")]
    NonCooperative,
    #[serde(rename = "cooperative")]
    Cooperative,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::NonCooperative, Mode::Cooperative];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::NonCooperative => "non-cooperative",
            Mode::Cooperative => "cooperative",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Off-diagonal convention of the white-noise-acceleration covariance block.
///
/// `Printed` uses `T^2` off the diagonal, `Standard` uses `T^2 / 2`. Only the
/// standard block is positive semidefinite, so ground truth is always sampled
/// with it; the switch selects what the tracking filter assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvOffDiag {
    Printed,
    #[default]
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_links: usize,
    pub n_stas: usize,
    pub carrier_freq_hz: Vec<f64>,
    pub bandwidth_hz: Vec<f64>,
    pub ap_tx_power_dbm: f64,
    pub sta_tx_power_dbm: f64,
    pub mimo: (u32, u32),
    pub noise_figure_db: f64,
    pub arena_half_width_m: f64,
    pub dl_arrival_rate_bps: f64,
    pub alpha: f64,
    pub k: usize,
    pub process_noise_intensity: f64,
    #[serde(default)]
    pub cv_offdiag: CvOffDiag,
    pub scheme: Scheme,
    pub mode: Mode,
    #[serde(serialize_with = "ser_seed", deserialize_with = "de_seed")]
    pub seed: u64,
}

impl NetworkConfig {
    /// Three-link network with twelve stations and the default channel plan.
    pub fn baseline() -> Self {
        Self {
            n_links: 3,
            n_stas: 12,
            carrier_freq_hz: vec![2.437e9, 5.250e9, 6.295e9],
            bandwidth_hz: vec![40e6, 80e6, 160e6],
            ap_tx_power_dbm: 43.0,
            sta_tx_power_dbm: 23.0,
            mimo: (4, 2),
            noise_figure_db: 7.0,
            arena_half_width_m: 10.0,
            dl_arrival_rate_bps: 20e6,
            alpha: 0.5,
            k: 4,
            process_noise_intensity: 0.1,
            cv_offdiag: CvOffDiag::Standard,
            scheme: Scheme::Original,
            mode: Mode::NonCooperative,
            seed: 1,
        }
    }
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

// TOML integers are i64; seeds above i64::MAX are written as decimal strings.
fn ser_seed<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(*seed) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.serialize_str(&seed.to_string()),
    }
}

fn de_seed<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(v) => u64::try_from(v).map_err(|_| serde::de::Error::custom("seed must be non-negative")),
        Raw::Text(s) => s.trim().parse().map_err(serde::de::Error::custom),
    }
}

/// MAC timing. Durations are nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TimingFile", into = "TimingFile")]
pub struct TimingConfig {
    pub sifs: Nanos,
    pub tf: Nanos,
    pub cts: Nanos,
    pub ack: Nanos,
    pub ndp_base: Nanos,
    /// EHT-LTF symbols per NDP.
    pub ltf_symbols: u32,
    /// EHT-LTF repetitions per NDP.
    pub ltf_repetitions: u32,
    pub window: Nanos,
    pub n_windows: u32,
}

impl TimingConfig {
    pub fn baseline() -> Self {
        Self {
            sifs: micros(16.0),
            tf: micros(10.8),
            cts: micros(4.6),
            ack: micros(4.6),
            ndp_base: micros(44.0),
            ltf_symbols: 4,
            ltf_repetitions: 4,
            window: micros(10_240.0),
            n_windows: 200,
        }
    }

    /// NDP airtime: base plus 8 µs per LTF symbol per repetition.
    pub fn ndp(&self) -> Nanos {
        self.ndp_base + 8 * NANOS_PER_MICRO * self.ltf_symbols as u64 * self.ltf_repetitions as u64
    }
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimingFile {
    sifs_us: f64,
    tf_us: f64,
    cts_us: f64,
    ack_us: f64,
    ndp_base_us: f64,
    ltf_symbols: u32,
    ltf_repetitions: u32,
    window_us: f64,
    n_windows: u32,
}

impl TryFrom<TimingFile> for TimingConfig {
    type Error = String;

    fn try_from(f: TimingFile) -> Result<Self, String> {
        let conv = |name: &str, us: f64| -> Result<Nanos, String> {
            if !us.is_finite() || us < 0.0 {
                return Err(format!("{name} must be a finite non-negative duration"));
            }
            Ok(micros(us))
        };
        Ok(Self {
            sifs: conv("sifs_us", f.sifs_us)?,
            tf: conv("tf_us", f.tf_us)?,
            cts: conv("cts_us", f.cts_us)?,
            ack: conv("ack_us", f.ack_us)?,
            ndp_base: conv("ndp_base_us", f.ndp_base_us)?,
            ltf_symbols: f.ltf_symbols,
            ltf_repetitions: f.ltf_repetitions,
            window: conv("window_us", f.window_us)?,
            n_windows: f.n_windows,
        })
    }
}

impl From<TimingConfig> for TimingFile {
    fn from(t: TimingConfig) -> Self {
        let us = |ns: Nanos| ns as f64 / NANOS_PER_MICRO as f64;
        Self {
            sifs_us: us(t.sifs),
            tf_us: us(t.tf),
            cts_us: us(t.cts),
            ack_us: us(t.ack),
            ndp_base_us: us(t.ndp_base),
            ltf_symbols: t.ltf_symbols,
            ltf_repetitions: t.ltf_repetitions,
            window_us: us(t.window),
            n_windows: t.n_windows,
        }
    }
}

/// A complete run description as stored on disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub network: NetworkConfig,
    pub timing: TimingConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid config:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_config(&self.network, &self.timing)
    }

    /// Parses and validates; any violation is an error.
    pub fn load_valid(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let cfg = Self::load(path)?;
        let violations = cfg.validate();
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

/// Lists every invariant violation of the two configs; empty means valid.
pub fn validate_config(cfg: &NetworkConfig, timing: &TimingConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |field: &'static str, reason: &str| {
        out.push(Violation { field, reason: reason.to_string() })
    };

    if cfg.n_links < 1 {
        bad("n_links", "at least one link is required (L ≥ 1)");
    }
    if cfg.n_stas < 1 {
        bad("n_stas", "at least one station is required (M ≥ 1)");
    }
    if cfg.carrier_freq_hz.len() != cfg.n_links {
        bad("carrier_freq_hz", "one carrier frequency per link is required");
    }
    if cfg.carrier_freq_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        bad("carrier_freq_hz", "carrier frequencies must be positive");
    }
    if cfg.bandwidth_hz.len() != cfg.n_links {
        bad("bandwidth_hz", "one bandwidth per link is required");
    }
    if cfg.bandwidth_hz.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        bad("bandwidth_hz", "bandwidth entries must be positive");
    }
    if !cfg.ap_tx_power_dbm.is_finite() {
        bad("ap_tx_power_dbm", "must be finite");
    }
    if !cfg.sta_tx_power_dbm.is_finite() {
        bad("sta_tx_power_dbm", "must be finite");
    }
    if cfg.mimo.0 < 1 || cfg.mimo.1 < 1 {
        bad("mimo", "antenna counts must be at least 1");
    }
    if !cfg.noise_figure_db.is_finite() {
        bad("noise_figure_db", "must be finite");
    }
    if !(cfg.arena_half_width_m.is_finite() && cfg.arena_half_width_m > 0.0) {
        bad("arena_half_width_m", "must be positive");
    }
    if !(cfg.dl_arrival_rate_bps.is_finite() && cfg.dl_arrival_rate_bps >= 0.0) {
        bad("dl_arrival_rate_bps", "must be finite and non-negative");
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        bad("alpha", "alpha must lie in open interval (0,1)");
    }
    if cfg.k < 3 {
        bad("k", "k must allow a trilateration triple (k ≥ 3)");
    }
    if !(cfg.process_noise_intensity.is_finite() && cfg.process_noise_intensity > 0.0) {
        bad("process_noise_intensity", "process noise intensity must be positive");
    }

    for (field, value) in [
        ("timing.sifs", timing.sifs),
        ("timing.tf", timing.tf),
        ("timing.cts", timing.cts),
        ("timing.ack", timing.ack),
        ("timing.ndp_base", timing.ndp_base),
        ("timing.window", timing.window),
    ] {
        if value == 0 {
            bad(field, "durations must be positive");
        }
    }
    if timing.ltf_symbols < 1 {
        bad("timing.ltf_symbols", "at least one EHT-LTF symbol is required");
    }
    if timing.ltf_repetitions < 1 {
        bad("timing.ltf_repetitions", "at least one EHT-LTF repetition is required (η ≥ 1)");
    }
    if timing.n_windows < 1 {
        bad("timing.n_windows", "at least one time window is required");
    }
    if timing.window > 0 && timing.window < crate::policy::min_durations(timing).any {
        bad("timing.window", "window must fit at least one sensing or communications exchange");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_defaults_are_valid() {
        assert!(validate_config(&NetworkConfig::baseline(), &TimingConfig::baseline()).is_empty());
    }

    #[test]
    fn alpha_boundary_rejected() {
        let cfg = NetworkConfig { alpha: 1.0, ..NetworkConfig::baseline() };
        let v = validate_config(&cfg, &TimingConfig::baseline());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].reason, "alpha must lie in open interval (0,1)");
        let cfg = NetworkConfig { alpha: 0.0, ..NetworkConfig::baseline() };
        assert_eq!(validate_config(&cfg, &TimingConfig::baseline()).len(), 1);
    }

    #[test]
    fn k_below_three_rejected() {
        let cfg = NetworkConfig { k: 2, ..NetworkConfig::baseline() };
        let v = validate_config(&cfg, &TimingConfig::baseline());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].reason, "k must allow a trilateration triple (k ≥ 3)");
    }

    #[test]
    fn zero_repetitions_rejected() {
        let timing = TimingConfig { ltf_repetitions: 0, ..TimingConfig::baseline() };
        let v = validate_config(&NetworkConfig::baseline(), &timing);
        assert!(v.iter().any(|v| v.field == "timing.ltf_repetitions"));
    }

    #[test]
    fn every_violation_is_reported() {
        let cfg = NetworkConfig {
            n_stas: 0,
            alpha: -0.5,
            k: 1,
            bandwidth_hz: vec![40e6, -1.0],
            ..NetworkConfig::baseline()
        };
        let v = validate_config(&cfg, &TimingConfig { sifs: 0, ..TimingConfig::baseline() });
        let fields: Vec<_> = v.iter().map(|v| v.field).collect();
        for f in ["n_stas", "alpha", "k", "bandwidth_hz", "timing.sifs"] {
            assert!(fields.contains(&f), "missing {f} in {fields:?}");
        }
        assert_eq!(v, validate_config(&cfg, &TimingConfig { sifs: 0, ..TimingConfig::baseline() }));
    }

    #[test]
    fn ndp_duration_from_ltf_counts() {
        assert_eq!(TimingConfig::baseline().ndp(), micros(172.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = SimConfig::default().to_toml_string().unwrap();
        text = text.replace("[timing]", "[timing]\nbogus_us = 1.0");
        assert!(matches!(SimConfig::from_toml_str(&text), Err(ConfigError::Parse(_))));

        let text = SimConfig::default().to_toml_string().unwrap().replace("k = 4", "k = 4\ncandidates = 5");
        assert!(SimConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn large_seed_survives_file_round_trip() {
        let mut cfg = SimConfig::default();
        cfg.network.seed = u64::MAX;
        let back = SimConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
