//! Discrete-event simulation of one AP MLD serving EMLSR stations over `L`
//! links while tracking a moving target.
//!
//! Events are popped in `(time, seq)` order. A station engaged in a frame
//! exchange on any link is unavailable on every link until strictly after the
//! exchange ends. Exchanges never cross a window boundary.
//!
//! The optional trace has one line per event with the columns
//! `time_ns,kind,interface,beta,selection,metric`:
//!
//! | kind     | beta          | selection                         | metric                      |
//! |----------|---------------|-----------------------------------|-----------------------------|
//! | `txop`   | `1`, `0`, `skip` | `a;b;c`, `id:bytes;…`, skip reason | bound (m²), byte budget, empty |
//! | `end`    | `1` or `0`    | empty                             | exchange duration (ns)      |
//! | `window` | empty         | empty                             | index of the window started |

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{nanos_to_secs, Nanos, NetworkConfig, Position, SimConfig, TargetState, TrackBelief, Violation};
use crate::crlb::{self, LinkView};
use crate::kalman;
use crate::policy::{self, Action, Decision, PolicyError, PolicyParams, PolicyState, StationView, TxopContext};
use crate::sched::{self, Grant};

pub const DIFS: Nanos = 34_000;
pub const SLOT: Nanos = 9_000;
pub const MAX_BACKOFF_SLOTS: u64 = 15;
/// Path-loss distances are clamped to this many metres.
pub const MIN_DISTANCE_M: f64 = 0.1;
const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Stream ids for independent random number sequences derived from one seed.
mod stream {
    pub const PLACEMENT: u64 = 0;
    pub const MOTION: u64 = 1;
    pub const MEASUREMENT: u64 = 2;
    pub const CONTENTION: u64 = 3;
    pub const SELECTION: u64 = 4;
}

fn rng_stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {}", join(.0))]
    Config(Vec<Violation>),
    #[error("policy failure at {time} ns: {source}")]
    Policy { time: Nanos, source: PolicyError },
    #[error("invariant violated at {time} ns: {what}")]
    Invariant { time: Nanos, what: String },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear `(ul, dl)` SNR between the AP MLD and a station on `link`:
/// free-space path loss, thermal noise plus noise figure, and a fixed MIMO
/// array gain.
pub fn snr_model(ap: &Position, sta: &Position, link: usize, cfg: &NetworkConfig) -> (f64, f64) {
    let d = ap.distance(sta).max(MIN_DISTANCE_M);
    let fspl = 20.0 * d.log10() + 20.0 * cfg.carrier_freq_hz[link].log10() - 147.55;
    let noise = THERMAL_NOISE_DBM_HZ + 10.0 * cfg.bandwidth_hz[link].log10() + cfg.noise_figure_db;
    let gain = 10.0 * f64::from(cfg.mimo.0 * cfg.mimo.1).log10();
    let ul = cfg.sta_tx_power_dbm + gain - fspl - noise;
    let dl = cfg.ap_tx_power_dbm + gain - fspl - noise;
    (db_to_linear(ul), db_to_linear(dl))
}

/// DIFS plus a uniform backoff of 0..=15 slots.
pub fn contention_next_txop<R: Rng + ?Sized>(now: Nanos, rng: &mut R) -> Nanos {
    now + DIFS + rng.random_range(0..=MAX_BACKOFF_SLOTS) * SLOT
}

/// Bytes arriving at `rate_bps` over `elapsed` ns. `carry` holds the
/// fractional byte in units of bit-nanoseconds across calls.
pub fn traffic_arrival(rate_bps: u64, elapsed: Nanos, carry: &mut u64) -> u64 {
    const UNIT: u128 = 8 * 1_000_000_000;
    let total = rate_bps as u128 * elapsed as u128 + *carry as u128;
    *carry = (total % UNIT) as u64;
    (total / UNIT) as u64
}

/// Nanoseconds to send `bytes` at the Shannon rate of `bandwidth` and `snr`.
fn airtime_ns(bytes: u64, bandwidth: f64, snr: f64) -> f64 {
    if bytes == 0 {
        return 0.0;
    }
    bytes as f64 * 8.0 * 1e9 / (bandwidth * (1.0 + snr).log2())
}

/// Rounds up, treating values within 1e-6 ns of an integer as that integer.
fn ceil_ns(ns: f64) -> Nanos {
    let r = ns.round();
    if (ns - r).abs() < 1e-6 {
        r as Nanos
    } else {
        ns.ceil() as Nanos
    }
}

/// Frame exchange length: fixed for sensing, and for communications the
/// minimum plus each granted station's payload sent back to back.
pub fn exchange_duration(action: &Action, dl_snr: &[f64], bandwidth: f64, durations: &policy::MinDurations) -> Nanos {
    match action {
        Action::Sense { .. } => durations.sensing,
        Action::Communicate { grants, .. } => {
            let payload: f64 = grants.iter().map(|g| airtime_ns(g.bytes, bandwidth, dl_snr[g.id])).sum();
            durations.comm + ceil_ns(payload)
        }
        Action::Skip(_) => 0,
    }
}

/// Cuts grants, in order, so their serialized airtime fits in `airtime` ns.
pub fn fit_grants(grants: &[Grant], dl_snr: &[f64], bandwidth: f64, airtime: Nanos) -> Vec<Grant> {
    let mut left = airtime as f64;
    grants
        .iter()
        .map(|g| {
            let rate = bandwidth * (1.0 + dl_snr[g.id]).log2();
            let fit = (left.max(0.0) * rate / 8e9).floor() as u64;
            let bytes = g.bytes.min(fit);
            left -= airtime_ns(bytes, bandwidth, dl_snr[g.id]);
            Grant { id: g.id, bytes }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    TxopGained(usize),
    ExchangeEnd(usize),
    WindowEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    time: Nanos,
    seq: u64,
    kind: EventKind,
}

/// One interface of the AP MLD.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterfaceState {
    pub busy_until: Nanos,
    /// Pending TXOP, if contention has been scheduled.
    pub next_txop: Option<Nanos>,
    /// Waiting for the next window after a draw too close to the boundary.
    pub parked: bool,
    in_flight: Option<InFlight>,
}

#[derive(Debug, Clone, PartialEq)]
struct InFlight {
    sensing: bool,
    started: Nanos,
    grants: Vec<Grant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionKind {
    Sense,
    Communicate,
    Skip,
}

/// Per-decision diagnostics, kept when [`RunOptions::record_decisions`] is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRecord {
    pub time: Nanos,
    pub interface: usize,
    pub window: u32,
    pub kind: DecisionKind,
    pub n_available: usize,
    /// Sensing count of the memory consulted, before this decision.
    pub sensing_count: u32,
    pub squared_error: f64,
    /// Stations taking part in the exchange.
    pub stations: Vec<usize>,
    pub exchange_end: Option<Nanos>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub trace: bool,
    pub record_decisions: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Squared position error (m²) at every TXOP decision.
    pub mse_samples: Vec<f64>,
    pub mse_mean: f64,
    pub delivered_bytes: Vec<u64>,
    pub arrived_bytes: Vec<u64>,
    /// Seconds.
    pub sim_time: f64,
    /// Bits per second.
    pub throughput: f64,
    pub jain: f64,
    pub sensing_count: u64,
    pub comm_count: u64,
    pub skip_count: u64,
    pub trace: Vec<String>,
    pub decisions: Vec<DecisionRecord>,
}

pub const TRACE_HEADER: &str = "time_ns,kind,interface,beta,selection,metric";

impl RunMetrics {
    /// Trace with header, newline-terminated.
    pub fn trace_text(&self) -> String {
        let mut s = String::with_capacity(self.trace.len() * 40);
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for line in &self.trace {
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

/// Static scenario drawn from the placement stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub ap: Position,
    pub stations: Vec<Position>,
    pub target: TargetState,
    /// `[link][station]`, linear.
    pub ul_snr: Vec<Vec<f64>>,
    pub dl_snr: Vec<Vec<f64>>,
}

impl Topology {
    /// Draws the AP, then the stations, then the target, uniformly in the
    /// arena; the target starts at 1 m/s in a uniform direction.
    pub fn draw(cfg: &NetworkConfig) -> Self {
        let mut rng = rng_stream(cfg.seed, stream::PLACEMENT);
        let h = cfg.arena_half_width_m;
        let mut point = || Position::new(rng.random_range(-h..=h), rng.random_range(-h..=h));
        let ap = point();
        let stations: Vec<Position> = (0..cfg.n_stas).map(|_| point()).collect();
        let start = point();
        let heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let target = TargetState::new(start.x, heading.cos(), start.y, heading.sin());
        let (ul_snr, dl_snr) = (0..cfg.n_links)
            .map(|l| stations.iter().map(|s| snr_model(&ap, s, l, cfg)).unzip::<f64, f64, Vec<_>, Vec<_>>())
            .unzip();
        Self { ap, stations, target, ul_snr, dl_snr }
    }
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    params: PolicyParams,
    opts: RunOptions,
    topo: Topology,
    rate_bps: u64,

    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    now: Nanos,
    window: u32,

    interfaces: Vec<InterfaceState>,
    sta_busy_until: Vec<Nanos>,
    backlog: Vec<u64>,
    received: Vec<u64>,
    arrived: Vec<u64>,
    carry: Vec<u64>,
    last_accrual: Nanos,

    truth: TargetState,
    truth_time: Nanos,
    policy: PolicyState,

    motion_rng: ChaCha8Rng,
    measurement_rng: ChaCha8Rng,
    contention_rng: ChaCha8Rng,
    selection_rng: ChaCha8Rng,

    metrics: RunMetrics,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig, opts: RunOptions) -> Self {
        let net = &cfg.network;
        let topo = Topology::draw(net);
        let initial = TrackBelief::updated(topo.target, nalgebra::Matrix4::identity());
        let m = net.n_stas;
        Self {
            cfg,
            params: PolicyParams::from_config(cfg),
            opts,
            rate_bps: net.dl_arrival_rate_bps.round() as u64,
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
            window: 0,
            interfaces: vec![InterfaceState::default(); net.n_links],
            sta_busy_until: vec![0; m],
            backlog: vec![0; m],
            received: vec![0; m],
            arrived: vec![0; m],
            carry: vec![0; m],
            last_accrual: 0,
            truth: topo.target,
            truth_time: 0,
            policy: PolicyState::new(net.mode, net.n_links, initial, cfg.timing.window),
            motion_rng: rng_stream(net.seed, stream::MOTION),
            measurement_rng: rng_stream(net.seed, stream::MEASUREMENT),
            contention_rng: rng_stream(net.seed, stream::CONTENTION),
            selection_rng: rng_stream(net.seed, stream::SELECTION),
            topo,
            metrics: RunMetrics {
                mse_samples: Vec::new(),
                mse_mean: 0.0,
                delivered_bytes: Vec::new(),
                arrived_bytes: Vec::new(),
                sim_time: 0.0,
                throughput: 0.0,
                jain: 1.0,
                sensing_count: 0,
                comm_count: 0,
                skip_count: 0,
                trace: Vec::new(),
                decisions: Vec::new(),
            },
        }
    }

    fn window_end(&self) -> Nanos {
        (u64::from(self.window) + 1) * self.cfg.timing.window
    }

    fn push(&mut self, time: Nanos, kind: EventKind) {
        self.queue.push(Reverse(Event { time, seq: self.seq, kind }));
        self.seq += 1;
    }

    fn trace(&mut self, line: impl FnOnce() -> String) {
        if self.opts.trace {
            self.metrics.trace.push(line());
        }
    }

    fn invariant(&self, what: impl Into<String>) -> SimError {
        SimError::Invariant { time: self.now, what: what.into() }
    }

    fn contend(&mut self, l: usize) {
        let t = contention_next_txop(self.now, &mut self.contention_rng);
        let latest = self.window_end().saturating_sub(self.params.durations.any);
        let iface = &mut self.interfaces[l];
        if t > latest {
            iface.parked = true;
            iface.next_txop = None;
        } else {
            iface.parked = false;
            iface.next_txop = Some(t);
            self.push(t, EventKind::TxopGained(l));
        }
    }

    fn accrue(&mut self) {
        let elapsed = self.now - self.last_accrual;
        for m in 0..self.backlog.len() {
            let bytes = traffic_arrival(self.rate_bps, elapsed, &mut self.carry[m]);
            self.backlog[m] += bytes;
            self.arrived[m] += bytes;
        }
        self.last_accrual = self.now;
    }

    fn advance_truth(&mut self) -> Result<(), SimError> {
        let dt = nanos_to_secs(self.now - self.truth_time);
        self.truth = kalman::propagate_truth(&self.truth, dt, self.params.motion.g_s, &mut self.motion_rng)
            .map_err(|e| self.invariant(e.to_string()))?;
        self.truth_time = self.now;
        if !self.truth.is_finite() {
            return Err(self.invariant("ground truth diverged"));
        }
        Ok(())
    }

    fn next_txop_elsewhere(&self, l: usize) -> Nanos {
        let t = self.now;
        self.interfaces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != l)
            .filter_map(|(_, i)| i.next_txop.filter(|&x| x > t))
            .min()
            .unwrap_or(Nanos::MAX)
            .min(self.window_end())
    }

    fn on_txop(&mut self, l: usize) -> Result<(), SimError> {
        let t = self.now;
        self.interfaces[l].next_txop = None;
        self.accrue();
        self.advance_truth()?;
        let available: Vec<usize> = (0..self.sta_busy_until.len()).filter(|&m| self.sta_busy_until[m] < t).collect();
        let all_idle = available.len() == self.sta_busy_until.len();
        let sensing_seen = self.policy.memory(l).sensing_count;
        let ctx = TxopContext {
            time: t,
            interface: l,
            window_end: self.window_end(),
            available: &available,
            all_idle,
            next_txop: self.next_txop_elsewhere(l),
            bandwidth: self.cfg.network.bandwidth_hz[l],
            stations: StationView {
                positions: &self.topo.stations,
                ul_snr: &self.topo.ul_snr[l],
                dl_snr: &self.topo.dl_snr[l],
                bytes_received: &self.received,
                backlog: &self.backlog,
            },
        };
        let decision = policy::decide(&self.policy, &ctx, &self.params, &mut self.selection_rng)
            .map_err(|source| SimError::Policy { time: t, source })?;
        let Decision { action, predicted, .. } = decision;
        let err = {
            let p = predicted.state.position();
            (p.x - self.truth.x).powi(2) + (p.y - self.truth.y).powi(2)
        };
        if !err.is_finite() {
            return Err(self.invariant("non-finite tracking error"));
        }
        self.metrics.mse_samples.push(err);

        let action = match action {
            Action::Sense { triple, metric } => self.start_sensing(l, triple, metric, &predicted)?,
            Action::Communicate { grants, deadline, budget } => self.start_comm(l, grants, deadline, budget)?,
            skip => skip,
        };
        let (kind, stations) = match &action {
            Action::Sense { triple, .. } => (DecisionKind::Sense, triple.to_vec()),
            Action::Communicate { grants, .. } => (DecisionKind::Communicate, grants.iter().map(|g| g.id).collect()),
            Action::Skip(_) => (DecisionKind::Skip, Vec::new()),
        };
        if kind == DecisionKind::Sense && self.params.mode == crate::config::Mode::NonCooperative && available.len() < 3 {
            return Err(self.invariant("sensing with fewer than three available stations"));
        }
        match kind {
            DecisionKind::Sense => self.metrics.sensing_count += 1,
            DecisionKind::Communicate => self.metrics.comm_count += 1,
            DecisionKind::Skip => {
                self.metrics.skip_count += 1;
                self.contend(l);
            }
        }
        if self.opts.record_decisions {
            self.metrics.decisions.push(DecisionRecord {
                time: t,
                interface: l,
                window: self.window,
                kind,
                n_available: available.len(),
                sensing_count: sensing_seen,
                squared_error: err,
                exchange_end: (kind != DecisionKind::Skip).then_some(self.interfaces[l].busy_until),
                stations,
            });
        }
        self.trace(|| {
            let (beta, selection, metric) = match &action {
                Action::Sense { triple, metric } => {
                    ("1", format!("{};{};{}", triple[0], triple[1], triple[2]), metric.to_string())
                }
                Action::Communicate { grants, budget, .. } => {
                    let mut s = String::new();
                    for (i, g) in grants.iter().enumerate() {
                        let _ = write!(s, "{}{}:{}", if i > 0 { ";" } else { "" }, g.id, g.bytes);
                    }
                    ("0", s, budget.to_string())
                }
                Action::Skip(reason) => ("skip", reason.as_str().to_string(), String::new()),
            };
            format!("{t},txop,{l},{beta},{selection},{metric}")
        });
        Ok(())
    }

    fn occupy(&mut self, l: usize, stations: &[usize], duration: Nanos, flight: InFlight) -> Result<(), SimError> {
        let end = self.now + duration;
        if end > self.window_end() {
            return Err(self.invariant(format!("exchange on interface {l} ends at {end}, past the window end")));
        }
        for &m in stations {
            if self.sta_busy_until[m] >= self.now {
                return Err(self.invariant(format!("station {m} already in an exchange")));
            }
            self.sta_busy_until[m] = end;
        }
        let iface = &mut self.interfaces[l];
        if iface.in_flight.is_some() {
            return Err(SimError::Invariant { time: self.now, what: format!("interface {l} already busy") });
        }
        iface.busy_until = end;
        iface.in_flight = Some(flight);
        self.push(end, EventKind::ExchangeEnd(l));
        Ok(())
    }

    fn start_sensing(
        &mut self,
        l: usize,
        triple: crlb::Triple,
        metric: f64,
        predicted: &TrackBelief,
    ) -> Result<Action, SimError> {
        let link = LinkView {
            positions: &self.topo.stations,
            ul_snr: &self.topo.ul_snr[l],
            bandwidth: self.cfg.network.bandwidth_hz[l],
            eta: self.params.eta,
        };
        let variance = match crlb::measurement_variance(&triple, self.truth.position(), predicted.state.position(), &link) {
            Ok(v) => v,
            Err(_) => return Ok(Action::Skip(policy::SkipReason::AllDegenerate)),
        };
        let meas = kalman::synthesize_measurement(&self.truth, variance, &mut self.measurement_rng);
        let now = self.now;
        policy::commit_sensing(self.policy.memory_mut(l), predicted, &meas, now)
            .map_err(|source| SimError::Policy { time: now, source })?;
        let action = Action::Sense { triple, metric };
        let duration = self.params.durations.sensing;
        self.occupy(l, &triple, duration, InFlight { sensing: true, started: now, grants: Vec::new() })?;
        Ok(action)
    }

    fn start_comm(&mut self, l: usize, grants: Vec<Grant>, deadline: Nanos, budget: u64) -> Result<Action, SimError> {
        let bandwidth = self.cfg.network.bandwidth_hz[l];
        let airtime = deadline.saturating_sub(self.now).saturating_sub(self.params.durations.comm);
        let grants = fit_grants(&grants, &self.topo.dl_snr[l], bandwidth, airtime);
        let action = Action::Communicate { grants, deadline, budget };
        let duration = exchange_duration(&action, &self.topo.dl_snr[l], bandwidth, &self.params.durations);
        if self.now + duration > deadline {
            return Err(self.invariant(format!("communications on interface {l} overruns its deadline {deadline}")));
        }
        let Action::Communicate { grants, .. } = &action else { unreachable!() };
        for g in grants {
            self.backlog[g.id] -= g.bytes;
        }
        let ids: Vec<usize> = grants.iter().map(|g| g.id).collect();
        let flight = InFlight { sensing: false, started: self.now, grants: grants.clone() };
        self.occupy(l, &ids, duration, flight)?;
        Ok(action)
    }

    fn finish_exchange(&mut self, l: usize) -> Option<InFlight> {
        let flight = self.interfaces[l].in_flight.take()?;
        for g in &flight.grants {
            self.received[g.id] += g.bytes;
        }
        Some(flight)
    }

    fn on_exchange_end(&mut self, l: usize) {
        if let Some(flight) = self.finish_exchange(l) {
            let t = self.now;
            self.trace(|| format!("{t},end,{l},{},,{}", if flight.sensing { 1 } else { 0 }, t - flight.started));
        }
        self.contend(l);
    }

    /// Returns false once the last window has closed.
    fn on_window_end(&mut self) -> bool {
        self.window += 1;
        if self.window >= self.cfg.timing.n_windows {
            return false;
        }
        let end = self.window_end();
        self.policy.start_window(end);
        self.push(end, EventKind::WindowEnd);
        let w = self.window;
        let t = self.now;
        self.trace(|| format!("{t},window,,,,{w}"));
        for l in 0..self.interfaces.len() {
            if self.interfaces[l].parked {
                self.contend(l);
            }
        }
        true
    }

    fn run(mut self) -> Result<RunMetrics, SimError> {
        if self.cfg.timing.n_windows > 0 {
            self.push(self.cfg.timing.window, EventKind::WindowEnd);
            for l in 0..self.interfaces.len() {
                self.contend(l);
            }
        }
        while let Some(Reverse(ev)) = self.queue.pop() {
            if ev.time < self.now {
                return Err(self.invariant("event time went backwards"));
            }
            self.now = ev.time;
            let more = match ev.kind {
                EventKind::TxopGained(l) => self.on_txop(l).map(|_| true)?,
                EventKind::ExchangeEnd(l) => {
                    self.on_exchange_end(l);
                    true
                }
                EventKind::WindowEnd => self.on_window_end(),
            };
            if !more {
                break;
            }
        }
        // Exchanges ending exactly on the final boundary.
        for l in 0..self.interfaces.len() {
            self.finish_exchange(l);
        }
        Ok(self.into_metrics())
    }

    fn into_metrics(mut self) -> RunMetrics {
        let mut m = std::mem::replace(&mut self.metrics, RunMetrics {
            mse_samples: Vec::new(),
            mse_mean: 0.0,
            delivered_bytes: Vec::new(),
            arrived_bytes: Vec::new(),
            sim_time: 0.0,
            throughput: 0.0,
            jain: 1.0,
            sensing_count: 0,
            comm_count: 0,
            skip_count: 0,
            trace: Vec::new(),
            decisions: Vec::new(),
        });
        m.sim_time = nanos_to_secs(u64::from(self.cfg.timing.n_windows) * self.cfg.timing.window);
        m.mse_mean = if m.mse_samples.is_empty() {
            0.0
        } else {
            m.mse_samples.iter().sum::<f64>() / m.mse_samples.len() as f64
        };
        let total: u64 = self.received.iter().sum();
        m.throughput = if m.sim_time > 0.0 { 8.0 * total as f64 / m.sim_time } else { 0.0 };
        let delivered: Vec<f64> = self.received.iter().map(|&b| b as f64).collect();
        m.jain = sched::jain_index(&delivered);
        m.delivered_bytes = self.received;
        m.arrived_bytes = self.arrived;
        m
    }
}

/// Runs one simulation of `cfg` (seeded by `cfg.network.seed`).
pub fn run(cfg: &SimConfig, opts: RunOptions) -> Result<RunMetrics, SimError> {
    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(SimError::Config(violations));
    }
    Engine::new(cfg, opts).run()
}
