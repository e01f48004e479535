//! ISAC decisions (sense, communicate or skip) and station selection for the
//! non-cooperative and cooperative variants and the randomized baselines.

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::config::{nanos_to_secs, Mode, Nanos, Position, Scheme, SimConfig, TimingConfig, TrackBelief};
use crate::crlb::{self, CrlbError, LinkView, Triple};
use crate::kalman::{self, KalmanError, Measurement, MotionModel};
use crate::sched::{self, ByteBudget, Grant};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Kalman(#[from] KalmanError),
    #[error(transparent)]
    Crlb(#[from] CrlbError),
    #[error("decision at {time} ns precedes last sensing at {last_sensing} ns")]
    TimeReversal { time: Nanos, last_sensing: Nanos },
}

/// Shortest possible sensing and communications frame exchanges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinDurations {
    /// MU-RTS/CTS, NDPA trigger and NDP sounding.
    pub sensing: Nanos,
    /// MU-RTS/CTS, data and ACK with no payload.
    pub comm: Nanos,
    /// Larger of the two; the least a TXOP must leave before the window end.
    pub any: Nanos,
}

pub fn min_durations(timing: &TimingConfig) -> MinDurations {
    let sensing = 3 * timing.sifs + 2 * timing.tf + timing.cts + timing.ndp();
    let comm = 3 * timing.sifs + timing.tf + timing.cts + timing.ndp() + timing.ack;
    MinDurations { sensing, comm, any: sensing.max(comm) }
}

/// Time after which sensing is preferred:
/// `α^(N+1) · t′ + (1 − α^(N+1)) · t_E`, in nanoseconds.
pub fn threshold_time(last_sensing: Nanos, window_end: Nanos, sensing_count: u32, alpha: f64) -> f64 {
    let a = alpha.powi(sensing_count.saturating_add(1).min(i32::MAX as u32) as i32);
    a * last_sensing as f64 + (1.0 - a) * window_end as f64
}

/// Tracker state owned by one interface (non-cooperative) or shared by all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyMemory {
    pub last_sensing_time: Nanos,
    /// Belief after the most recent measurement update.
    pub belief: TrackBelief,
    /// Sensing exchanges committed in the current window.
    pub sensing_count: u32,
    pub window_end: Nanos,
}

impl PolicyMemory {
    pub fn new(initial: TrackBelief, window_end: Nanos) -> Self {
        Self { last_sensing_time: 0, belief: initial, sensing_count: 0, window_end }
    }

    pub fn start_window(&mut self, window_end: Nanos) {
        self.sensing_count = 0;
        self.window_end = window_end;
    }

    pub fn threshold(&self, alpha: f64) -> f64 {
        threshold_time(self.last_sensing_time, self.window_end, self.sensing_count, alpha)
    }

    /// Prior at `time` from the last updated belief.
    pub fn predict_at(&self, time: Nanos, motion: &MotionModel) -> Result<TrackBelief, PolicyError> {
        if time < self.last_sensing_time {
            return Err(PolicyError::TimeReversal { time, last_sensing: self.last_sensing_time });
        }
        Ok(kalman::predict(&self.belief, nanos_to_secs(time - self.last_sensing_time), motion)?)
    }
}

/// Applies a sensing measurement obtained by a TXOP decided at `time`.
pub fn commit_sensing(
    mem: &mut PolicyMemory,
    predicted: &TrackBelief,
    measurement: &Measurement,
    time: Nanos,
) -> Result<(), PolicyError> {
    mem.belief = kalman::update(predicted, measurement)?;
    mem.last_sensing_time = time;
    mem.sensing_count += 1;
    Ok(())
}

/// Memories for every interface, or one shared memory in cooperative mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    mode: Mode,
    memories: Vec<PolicyMemory>,
}

impl PolicyState {
    pub fn new(mode: Mode, n_links: usize, initial: TrackBelief, window_end: Nanos) -> Self {
        let n = match mode {
            Mode::NonCooperative => n_links,
            Mode::Cooperative => 1,
        };
        Self { mode, memories: vec![PolicyMemory::new(initial, window_end); n] }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn memory(&self, interface: usize) -> &PolicyMemory {
        match self.mode {
            Mode::NonCooperative => &self.memories[interface],
            Mode::Cooperative => &self.memories[0],
        }
    }

    pub fn memory_mut(&mut self, interface: usize) -> &mut PolicyMemory {
        match self.mode {
            Mode::NonCooperative => &mut self.memories[interface],
            Mode::Cooperative => &mut self.memories[0],
        }
    }

    pub fn memories_mut(&mut self) -> &mut [PolicyMemory] {
        &mut self.memories
    }

    pub fn start_window(&mut self, window_end: Nanos) {
        self.memories.iter_mut().for_each(|m| m.start_window(window_end));
    }
}

/// Station data on the deciding interface's link, indexed by station id.
#[derive(Debug, Clone, Copy)]
pub struct StationView<'a> {
    pub positions: &'a [Position],
    pub ul_snr: &'a [f64],
    pub dl_snr: &'a [f64],
    pub bytes_received: &'a [u64],
    pub backlog: &'a [u64],
}

/// Everything the AP MLD knows when interface `interface` gains a TXOP.
#[derive(Debug, Clone, Copy)]
pub struct TxopContext<'a> {
    pub time: Nanos,
    pub interface: usize,
    pub window_end: Nanos,
    /// Stations listening on this link, ascending ids.
    pub available: &'a [usize],
    /// Whether no station is engaged in any exchange.
    pub all_idle: bool,
    /// Earliest TXOP already scheduled on another interface after `time`,
    /// or the window end if none is.
    pub next_txop: Nanos,
    pub bandwidth: f64,
    pub stations: StationView<'a>,
}

impl TxopContext<'_> {
    pub fn remaining(&self) -> Nanos {
        self.window_end.saturating_sub(self.time)
    }
}

/// Fixed policy inputs derived from the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    pub alpha: f64,
    pub k: usize,
    pub n_stas: usize,
    pub eta: u32,
    pub motion: MotionModel,
    pub durations: MinDurations,
    pub scheme: Scheme,
    pub mode: Mode,
}

impl PolicyParams {
    pub fn from_config(cfg: &SimConfig) -> Self {
        let net = &cfg.network;
        Self {
            alpha: net.alpha,
            k: net.k,
            n_stas: net.n_stas,
            eta: cfg.timing.ltf_repetitions,
            motion: MotionModel::new(net.process_noise_intensity, net.cv_offdiag),
            durations: min_durations(&cfg.timing),
            scheme: net.scheme,
            mode: net.mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SkipReason {
    NoneAvailable,
    WindowTooShort,
    /// No cooperative criterion holds at this instant.
    CoopGap,
    /// Cooperative sensing waits until every station is idle.
    AwaitingIdle,
    AllDegenerate,
    NothingToSend,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SkipReason::NoneAvailable => "none-available",
            SkipReason::WindowTooShort => "window-too-short",
            SkipReason::CoopGap => "coop-gap",
            SkipReason::AwaitingIdle => "awaiting-idle",
            SkipReason::AllDegenerate => "all-degenerate",
            SkipReason::NothingToSend => "nothing-to-send",
        }
    }
}

/// Outcome of the decision rule before any station is selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intent {
    Sense,
    /// The exchange must finish by `deadline`.
    Communicate { deadline: Nanos },
    Skip(SkipReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub intent: Intent,
    pub predicted: TrackBelief,
    /// Sensing threshold in force for this decision, ns.
    pub threshold: f64,
}

pub fn decide_noncoop(mem: &PolicyMemory, ctx: &TxopContext<'_>, params: &PolicyParams) -> Result<Verdict, PolicyError> {
    let predicted = mem.predict_at(ctx.time, &params.motion)?;
    let threshold = mem.threshold(params.alpha);
    let intent = if let Some(reason) = gate(ctx, params) {
        Intent::Skip(reason)
    } else if ctx.available.len() >= 3 && ctx.time as f64 > threshold {
        Intent::Sense
    } else {
        Intent::Communicate { deadline: ctx.window_end }
    };
    Ok(Verdict { intent, predicted, threshold })
}

pub fn decide_coop(mem: &PolicyMemory, ctx: &TxopContext<'_>, params: &PolicyParams) -> Result<Verdict, PolicyError> {
    let predicted = mem.predict_at(ctx.time, &params.motion)?;
    let threshold = mem.threshold(params.alpha);
    let t = ctx.time as f64;
    let sensing_done = mem.last_sensing_time.saturating_add(params.durations.sensing);
    let comm = params.durations.comm as f64;
    let intent = if let Some(reason) = gate(ctx, params) {
        Intent::Skip(reason)
    } else if t <= threshold - comm {
        Intent::Communicate { deadline: threshold.floor() as Nanos }
    } else if t < (sensing_done as f64).min(ctx.next_txop as f64 - comm) {
        Intent::Communicate { deadline: ctx.next_txop.min(ctx.window_end) }
    } else if t > threshold.max(sensing_done as f64) {
        if params.n_stas < 3 {
            Intent::Communicate { deadline: ctx.window_end }
        } else if !ctx.all_idle {
            Intent::Skip(SkipReason::AwaitingIdle)
        } else {
            Intent::Sense
        }
    } else {
        Intent::Skip(SkipReason::CoopGap)
    };
    Ok(Verdict { intent, predicted, threshold })
}

fn gate(ctx: &TxopContext<'_>, params: &PolicyParams) -> Option<SkipReason> {
    if ctx.available.is_empty() {
        Some(SkipReason::NoneAvailable)
    } else if ctx.remaining() < params.durations.any {
        Some(SkipReason::WindowTooShort)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// `metric` is the predicted trilateration bound at the predicted position.
    Sense { triple: Triple, metric: f64 },
    /// `budget` is the byte allowance the grants were cut from.
    Communicate { grants: Vec<Grant>, deadline: Nanos, budget: u64 },
    Skip(SkipReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    pub predicted: TrackBelief,
    pub threshold: f64,
}

/// Turns a verdict into a concrete station selection under `params.scheme`.
/// Random draws for the baselines come from `rng`.
pub fn select_for_decision<R: Rng + ?Sized>(
    verdict: &Verdict,
    ctx: &TxopContext<'_>,
    params: &PolicyParams,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    let action = match verdict.intent {
        Intent::Skip(reason) => Action::Skip(reason),
        Intent::Sense => select_sensing(verdict, ctx, params, rng)?,
        Intent::Communicate { deadline } => select_comm(ctx, params, deadline, rng),
    };
    Ok(Decision { action, predicted: verdict.predicted, threshold: verdict.threshold })
}

fn select_sensing<R: Rng + ?Sized>(
    verdict: &Verdict,
    ctx: &TxopContext<'_>,
    params: &PolicyParams,
    rng: &mut R,
) -> Result<Action, PolicyError> {
    let all: Vec<usize>;
    let pool = match params.mode {
        Mode::NonCooperative => ctx.available,
        Mode::Cooperative => {
            all = (0..params.n_stas).collect();
            &all
        }
    };
    let link = LinkView {
        positions: ctx.stations.positions,
        ul_snr: ctx.stations.ul_snr,
        bandwidth: ctx.bandwidth,
        eta: params.eta,
    };
    let ref_pos = verdict.predicted.state.position();
    let picked = if params.scheme.random_sensing() {
        let mut triple: Triple = [0; 3];
        for (slot, i) in triple.iter_mut().zip(index::sample(rng, pool.len(), 3)) {
            *slot = pool[i];
        }
        triple.sort_unstable();
        crlb::predicted_trilat_crlb(&link.geometry(&triple, ref_pos)).map(|m| (triple, m))
    } else {
        let candidates = crlb::nominate_candidates(pool, ctx.stations.ul_snr, params.k);
        crlb::select_sensing_triple(&candidates, ref_pos, &link)
    };
    match picked {
        Ok((triple, metric)) => Ok(Action::Sense { triple, metric }),
        Err(CrlbError::AllDegenerate | CrlbError::DegenerateGeometry) => Ok(Action::Skip(SkipReason::AllDegenerate)),
        Err(e) => Err(e.into()),
    }
}

fn select_comm<R: Rng + ?Sized>(ctx: &TxopContext<'_>, params: &PolicyParams, deadline: Nanos, rng: &mut R) -> Action {
    let s = &ctx.stations;
    let window = deadline.saturating_sub(ctx.time).saturating_sub(params.durations.comm);
    let mean_dl = ctx.available.iter().map(|&id| s.dl_snr[id]).sum::<f64>() / ctx.available.len() as f64;
    let limit = sched::byte_budget(ctx.bandwidth, mean_dl, nanos_to_secs(window));
    let snapshot: Vec<(usize, u64, u64)> =
        ctx.available.iter().map(|&id| (id, s.bytes_received[id], s.backlog[id])).collect();
    let candidates = sched::build_candidates(&snapshot);
    let mut budget = ByteBudget::new(limit);
    let grants = if params.scheme.random_comm() {
        // Uniform over all subsets of the available set, empty included.
        let chosen: Vec<_> = candidates.into_iter().filter(|_| rng.random_bool(0.5)).collect();
        sched::admit_in_order(&chosen, &mut budget)
    } else {
        sched::select_comm_stas(&candidates, &mut budget)
    };
    if grants.is_empty() {
        Action::Skip(SkipReason::NothingToSend)
    } else {
        Action::Communicate { grants, deadline, budget: limit }
    }
}

/// Full decision for interface `ctx.interface` under the state's mode.
pub fn decide<R: Rng + ?Sized>(
    state: &PolicyState,
    ctx: &TxopContext<'_>,
    params: &PolicyParams,
    rng: &mut R,
) -> Result<Decision, PolicyError> {
    let mem = state.memory(ctx.interface);
    let verdict = match state.mode() {
        Mode::NonCooperative => decide_noncoop(mem, ctx, params)?,
        Mode::Cooperative => decide_coop(mem, ctx, params)?,
    };
    select_for_decision(&verdict, ctx, params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{micros, CvOffDiag, TargetState};
    use nalgebra::{Matrix4, Vector2};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const WINDOW: Nanos = 10_240_000;

    fn belief() -> TrackBelief {
        TrackBelief::updated(TargetState::new(0.0, 1.0, 0.0, 0.0), Matrix4::identity())
    }

    fn params(mode: Mode, scheme: Scheme) -> PolicyParams {
        PolicyParams {
            alpha: 0.5,
            k: 4,
            n_stas: 8,
            eta: 4,
            motion: MotionModel::new(0.1, CvOffDiag::Standard),
            durations: min_durations(&TimingConfig::baseline()),
            scheme,
            mode,
        }
    }

    struct Fixture {
        positions: Vec<Position>,
        ul: Vec<f64>,
        dl: Vec<f64>,
        received: Vec<u64>,
        backlog: Vec<u64>,
    }

    impl Fixture {
        fn new(n: usize) -> Self {
            let positions = (0..n)
                .map(|i| {
                    let a = i as f64 * std::f64::consts::TAU / n as f64;
                    Position::new(5.0 * a.cos(), 5.0 * a.sin())
                })
                .collect();
            Self {
                positions,
                ul: (0..n).map(|i| 1e6 * (1.0 + i as f64)).collect(),
                dl: vec![1e8; n],
                received: vec![0; n],
                backlog: vec![5000; n],
            }
        }

        fn ctx<'a>(&'a self, time: Nanos, available: &'a [usize]) -> TxopContext<'a> {
            TxopContext {
                time,
                interface: 0,
                window_end: WINDOW,
                available,
                all_idle: available.len() == self.positions.len(),
                next_txop: WINDOW,
                bandwidth: 40e6,
                stations: StationView {
                    positions: &self.positions,
                    ul_snr: &self.ul,
                    dl_snr: &self.dl,
                    bytes_received: &self.received,
                    backlog: &self.backlog,
                },
            }
        }
    }

    #[test]
    fn table_timing_durations() {
        let d = min_durations(&TimingConfig::baseline());
        assert_eq!(d.sensing, micros(246.2));
        assert_eq!(d.comm, micros(240.0));
        assert_eq!(d.any, micros(246.2));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_time(0, WINDOW, 0, 0.5), 5_120_000.0);
        let t = threshold_time(1_000_000, WINDOW, 0, 0.999);
        assert!(t - 1_000_000.0 <= 0.001 * (WINDOW - 1_000_000) as f64);
        let t = threshold_time(0, WINDOW, 200, 0.5);
        assert!((WINDOW as f64 - t) < 1e-6);
        // Exponent N + 1 = 2 after one sensing.
        assert_eq!(threshold_time(0, WINDOW, 1, 0.5), 0.75 * WINDOW as f64);
    }

    #[test]
    fn noncoop_gating_and_rule() {
        let f = Fixture::new(8);
        let p = params(Mode::NonCooperative, Scheme::Original);
        let mem = PolicyMemory::new(belief(), WINDOW);
        let v = decide_noncoop(&mem, &f.ctx(6_000_000, &[]), &p).unwrap();
        assert_eq!(v.intent, Intent::Skip(SkipReason::NoneAvailable));
        let v = decide_noncoop(&mem, &f.ctx(6_000_000, &[1, 2]), &p).unwrap();
        assert_eq!(v.intent, Intent::Communicate { deadline: WINDOW });
        let v = decide_noncoop(&mem, &f.ctx(5_120_000, &[1, 2, 3]), &p).unwrap();
        assert_eq!(v.intent, Intent::Communicate { deadline: WINDOW });
        let v = decide_noncoop(&mem, &f.ctx(5_120_001, &[1, 2, 3]), &p).unwrap();
        assert_eq!(v.intent, Intent::Sense);
        let v = decide_noncoop(&mem, &f.ctx(WINDOW - 246_199, &[1, 2, 3]), &p).unwrap();
        assert_eq!(v.intent, Intent::Skip(SkipReason::WindowTooShort));
    }

    #[test]
    fn noncoop_prediction_uses_elapsed_since_sensing() {
        let f = Fixture::new(8);
        let p = params(Mode::NonCooperative, Scheme::Original);
        let mut mem = PolicyMemory::new(belief(), WINDOW);
        mem.last_sensing_time = 1_000_000;
        let v = decide_noncoop(&mem, &f.ctx(3_000_000, &[1]), &p).unwrap();
        assert!((v.predicted.state.x - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn coop_criteria() {
        let f = Fixture::new(8);
        let all: Vec<usize> = (0..8).collect();
        let p = params(Mode::Cooperative, Scheme::Original);
        let mem = PolicyMemory::new(belief(), WINDOW);
        // t* = 5.12 ms; criterion (i) up to t* − 240 µs.
        let v = decide_coop(&mem, &f.ctx(1_000_000, &all), &p).unwrap();
        assert_eq!(v.intent, Intent::Communicate { deadline: 5_120_000 });
        let v = decide_coop(&mem, &f.ctx(5_000_000, &all), &p).unwrap();
        assert_eq!(v.intent, Intent::Skip(SkipReason::CoopGap));
        let v = decide_coop(&mem, &f.ctx(5_120_001, &all), &p).unwrap();
        assert_eq!(v.intent, Intent::Sense);
        let v = decide_coop(&mem, &f.ctx(5_120_001, &all[1..]), &p).unwrap();
        assert_eq!(v.intent, Intent::Skip(SkipReason::AwaitingIdle));
    }

    #[test]
    fn coop_criterion_two_targets_next_txop() {
        let f = Fixture::new(8);
        let p = params(Mode::Cooperative, Scheme::Original);
        let mut mem = PolicyMemory::new(belief(), WINDOW);
        // Sensing just committed at 6 ms: t* moves to 9.18 ms (N = 1).
        mem.last_sensing_time = 6_000_000;
        mem.sensing_count = 1;
        mem.belief = belief();
        let mut ctx = f.ctx(6_100_000, &[0, 1, 2]);
        ctx.next_txop = 9_500_000;
        let v = decide_coop(&mem, &ctx, &p).unwrap();
        // (i) holds first here, with deadline t*.
        assert_eq!(v.intent, Intent::Communicate { deadline: 9_180_000 });
        // Just inside the gap before t* = 10.07 ms, while the previous
        // sensing exchange (started 9.9 ms) is still running.
        mem.sensing_count = 0;
        mem.last_sensing_time = 9_900_000;
        let mut ctx = f.ctx(9_950_000, &[0, 1, 2]);
        ctx.next_txop = WINDOW - 40_000;
        let v = decide_coop(&mem, &ctx, &p).unwrap();
        assert_eq!(v.intent, Intent::Communicate { deadline: WINDOW - 40_000 });
    }

    #[test]
    fn coop_sensing_draws_from_all_stations() {
        let f = Fixture::new(8);
        let p = params(Mode::Cooperative, Scheme::Original);
        let mem = PolicyMemory::new(belief(), WINDOW);
        let mut ctx = f.ctx(6_000_000, &[2]);
        ctx.all_idle = true;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = decide(&PolicyState::new(Mode::Cooperative, 3, belief(), WINDOW), &ctx, &p, &mut rng).unwrap();
        let _ = mem;
        match d.action {
            Action::Sense { triple, .. } => assert!(triple.iter().any(|&id| id != 2)),
            other => panic!("expected sensing, got {other:?}"),
        }
    }

    #[test]
    fn original_sense_with_three_candidates_picks_them() {
        let f = Fixture::new(8);
        let p = params(Mode::NonCooperative, Scheme::Original);
        let state = PolicyState::new(Mode::NonCooperative, 3, belief(), WINDOW);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = decide(&state, &f.ctx(6_000_000, &[1, 4, 6]), &p, &mut rng).unwrap();
        assert!(matches!(d.action, Action::Sense { triple: [1, 4, 6], .. }));
    }

    #[test]
    fn random_comm_subsets_are_uniform() {
        let f = Fixture::new(3);
        let p = params(Mode::NonCooperative, Scheme::RsmsC);
        let mem = PolicyMemory::new(belief(), WINDOW);
        let ctx = f.ctx(1_000_000, &[1, 2]);
        let verdict = decide_noncoop(&mem, &ctx, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u32; 4];
        let draws = 10_000;
        for _ in 0..draws {
            let d = select_for_decision(&verdict, &ctx, &p, &mut rng).unwrap();
            let idx = match d.action {
                Action::Skip(SkipReason::NothingToSend) => 0,
                Action::Communicate { grants, .. } => grants.iter().map(|g| g.id).sum::<usize>(),
                other => panic!("{other:?}"),
            };
            counts[idx] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99th percentile of χ² with 3 degrees of freedom.
        assert!(chi2 < 11.345, "counts {counts:?} chi2 {chi2}");
    }

    #[test]
    fn commit_updates_memory() {
        let p = params(Mode::NonCooperative, Scheme::Original);
        let mut mem = PolicyMemory::new(belief(), WINDOW);
        let pred = mem.predict_at(2_000_000, &p.motion).unwrap();
        let meas = Measurement { z: Vector2::new(0.0, 0.0), noise_var: 1e-6 };
        commit_sensing(&mut mem, &pred, &meas, 2_000_000).unwrap();
        assert_eq!(mem.sensing_count, 1);
        assert_eq!(mem.last_sensing_time, 2_000_000);
        assert_eq!(mem.threshold(0.5), 0.25 * 2_000_000.0 + 0.75 * WINDOW as f64);
        mem.start_window(2 * WINDOW);
        assert_eq!(mem.sensing_count, 0);
    }

    #[test]
    fn noncoop_ignores_other_memories() {
        let f = Fixture::new(8);
        let p = params(Mode::NonCooperative, Scheme::Original);
        let mut state = PolicyState::new(Mode::NonCooperative, 3, belief(), WINDOW);
        let mut ctx = f.ctx(6_000_000, &[0, 1, 2, 3]);
        ctx.interface = 1;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let before = decide(&state, &ctx, &p, &mut rng).unwrap();
        state.memories_mut()[0].sensing_count = 9;
        state.memories_mut()[2] = PolicyMemory::new(belief(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(decide(&state, &ctx, &p, &mut rng).unwrap(), before);
    }

    proptest! {
        #[test]
        fn threshold_non_increasing_in_alpha(
            last in 0u64..WINDOW, n in 0u32..10, a in 0.01f64..0.98, da in 0.001f64..0.01,
        ) {
            let lo = threshold_time(last, WINDOW, n, a);
            let hi = threshold_time(last, WINDOW, n, a + da);
            prop_assert!(hi <= lo + 1e-6);
            prop_assert!(lo >= last as f64 - 1e-6 && lo <= WINDOW as f64 + 1e-6);
        }

        #[test]
        fn noncoop_sense_needs_three(time in 0u64..WINDOW, n_avail in 0usize..8) {
            let f = Fixture::new(8);
            let avail: Vec<usize> = (0..n_avail).collect();
            let p = params(Mode::NonCooperative, Scheme::Original);
            let mem = PolicyMemory::new(belief(), WINDOW);
            let v = decide_noncoop(&mem, &f.ctx(time, &avail), &p).unwrap();
            if v.intent == Intent::Sense {
                prop_assert!(n_avail >= 3);
            }
        }
    }
}
