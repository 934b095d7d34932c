//! Seeded event-driven simulation of a k-channel loss system.
//!
//! Calls arrive as a Poisson stream, hold a channel for a random time, and are
//! lost if every channel is busy on arrival. By PASTA the long-run fraction of
//! lost calls converges to the Erlang-B value for the same offered load.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::teletraffic::{self, TrafficError, TrafficScenario};

pub const DEFAULT_TOTAL_CALLS: u64 = 1_000_000;
pub const DEFAULT_WARMUP_CALLS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("loss system has zero channels")]
    ZeroChannels,
    #[error("arrival rate must be positive and finite")]
    ZeroArrivalRate,
    #[error("mean holding time must be positive and finite")]
    InvalidHolding,
    #[error("total calls ({total}) must exceed warmup calls ({warmup})")]
    CallCounts { total: u64, warmup: u64 },
    #[error("per-user arrivals need a positive user count")]
    NoUsers,
    #[error(transparent)]
    Traffic(#[from] TrafficError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoldingDistribution {
    #[default]
    Exponential,
    /// Every call lasts exactly the mean.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalMode {
    /// One superposed Poisson stream.
    #[default]
    Aggregate,
    /// One Poisson stream per user, merged in time order.
    PerUser,
}

/// The queue-free system being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSystem {
    /// Total call arrival rate, per minute.
    pub arrival_rate: f64,
    /// Mean holding time, minutes.
    pub mean_holding: f64,
    pub channels: u64,
    /// Users sharing the arrival rate equally (per-user mode only).
    pub users: u32,
}

impl LossSystem {
    /// The loss system behind a scenario's Erlang-B figure.
    ///
    /// Offered load in the blocking model is `A = s m t_h M`, so calls enter
    /// at rate `A / t_h = s m M` per minute and hold for `t_h`; the channel
    /// pool is `k = floor(N / m)`.
    pub fn from_scenario(sc: &TrafficScenario) -> Result<Self, SimError> {
        let report = teletraffic::evaluate(sc)?;
        Ok(LossSystem {
            arrival_rate: f64::from(sc.users) * f64::from(sc.rb_per_call) * sc.call_rate,
            mean_holding: sc.holding,
            channels: report.channels,
            users: sc.users,
        })
    }

    /// A system with the given offered Erlangs, unit mean holding time.
    pub fn with_offered(offered: f64, channels: u64) -> Self {
        LossSystem {
            arrival_rate: offered,
            mean_holding: 1.0,
            channels,
            users: 1,
        }
    }

    pub fn offered(&self) -> f64 {
        self.arrival_rate * self.mean_holding
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub system: LossSystem,
    /// Arrivals generated, warmup included.
    pub total_calls: u64,
    /// Leading arrivals excluded from the statistics.
    pub warmup_calls: u64,
    pub seed: u64,
    pub holding: HoldingDistribution,
    pub arrivals: ArrivalMode,
}

impl SimConfig {
    pub fn new(system: LossSystem, seed: u64) -> Self {
        SimConfig {
            system,
            total_calls: DEFAULT_TOTAL_CALLS,
            warmup_calls: DEFAULT_WARMUP_CALLS,
            seed,
            holding: HoldingDistribution::default(),
            arrivals: ArrivalMode::default(),
        }
    }

    pub fn for_scenario(sc: &TrafficScenario, seed: u64) -> Result<Self, SimError> {
        Ok(SimConfig::new(LossSystem::from_scenario(sc)?, seed))
    }

    fn validate(&self) -> Result<(), SimError> {
        let s = &self.system;
        if s.channels == 0 {
            return Err(SimError::ZeroChannels);
        }
        if !(s.arrival_rate > 0.0 && s.arrival_rate.is_finite()) {
            return Err(SimError::ZeroArrivalRate);
        }
        if !(s.mean_holding > 0.0 && s.mean_holding.is_finite()) {
            return Err(SimError::InvalidHolding);
        }
        if self.total_calls <= self.warmup_calls {
            return Err(SimError::CallCounts {
                total: self.total_calls,
                warmup: self.warmup_calls,
            });
        }
        if self.arrivals == ArrivalMode::PerUser && s.users == 0 {
            return Err(SimError::NoUsers);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub seed: u64,
    pub offered: f64,
    pub channels: u64,
    pub calls_observed: u64,
    pub calls_blocked: u64,
    pub blocked_fraction: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub std_error: f64,
}

impl SimResult {
    fn from_counts(seed: u64, system: &LossSystem, observed: u64, blocked: u64) -> Self {
        let p = blocked as f64 / observed as f64;
        SimResult {
            seed,
            offered: system.offered(),
            channels: system.channels,
            calls_observed: observed,
            calls_blocked: blocked,
            blocked_fraction: p,
            std_error: (p * (1.0 - p) / observed as f64).sqrt(),
        }
    }

    /// Pools independent replications by summing their counts.
    pub fn pool(runs: &[SimResult]) -> Option<SimResult> {
        let first = runs.first()?;
        let observed = runs.iter().map(|r| r.calls_observed).sum();
        let blocked = runs.iter().map(|r| r.calls_blocked).sum();
        let system = LossSystem::with_offered(first.offered, first.channels);
        Some(SimResult::from_counts(
            first.seed, &system, observed, blocked,
        ))
    }

    /// Number of standard errors between the estimate and `expected`.
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.blocked_fraction - expected) / self.std_error
    }
}

/// Runs one replication. Identical configurations give identical results.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let system = &cfg.system;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let holding = Exp::new(1.0 / system.mean_holding).map_err(|_| SimError::InvalidHolding)?;
    let draw_holding = |rng: &mut ChaCha12Rng| match cfg.holding {
        HoldingDistribution::Exponential => holding.sample(rng),
        HoldingDistribution::Deterministic => system.mean_holding,
    };
    let mut arrivals = ArrivalStream::new(cfg.arrivals, system, &mut rng)?;

    let channels = system.channels as usize;
    let mut departures: BinaryHeap<Reverse<Time>> = BinaryHeap::with_capacity(channels + 1);
    let mut observed = 0u64;
    let mut blocked = 0u64;
    for call in 0..cfg.total_calls {
        let now = arrivals.next(&mut rng);
        while departures.peek().is_some_and(|Reverse(t)| t.0 <= now) {
            departures.pop();
        }
        let accepted = departures.len() < channels;
        if accepted {
            departures.push(Reverse(Time(now + draw_holding(&mut rng))));
        }
        debug_assert!(departures.len() <= channels);
        if call >= cfg.warmup_calls {
            observed += 1;
            if !accepted {
                blocked += 1;
            }
        }
    }
    Ok(SimResult::from_counts(cfg.seed, system, observed, blocked))
}

/// Pooled outcome of several replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replications {
    pub runs: Vec<SimResult>,
    pub pooled: SimResult,
}

/// Seed used by replication `index` of a batch started from `base`.
pub fn replication_seed(base: u64, index: u64) -> u64 {
    // splitmix64 step, so neighbouring base seeds don't share streams.
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `count` independent replications in parallel and pools them.
/// Output order follows replication index, whatever the scheduling.
pub fn simulate_replications(cfg: &SimConfig, count: u64) -> Result<Replications, SimError> {
    cfg.validate()?;
    let count = count.max(1);
    let runs = (0..count)
        .into_par_iter()
        .map(|i| {
            simulate(&SimConfig {
                seed: replication_seed(cfg.seed, i),
                ..*cfg
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pooled = SimResult::pool(&runs).expect("at least one replication");
    Ok(Replications { runs, pooled })
}

#[derive(Debug, Clone, Copy)]
struct Time(f64);

impl PartialEq for Time {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

enum ArrivalStream {
    Aggregate {
        now: f64,
        gap: Exp<f64>,
    },
    PerUser {
        gap: Exp<f64>,
        next: BinaryHeap<Reverse<Time>>,
    },
}

impl ArrivalStream {
    fn new(mode: ArrivalMode, system: &LossSystem, rng: &mut impl Rng) -> Result<Self, SimError> {
        match mode {
            ArrivalMode::Aggregate => Ok(ArrivalStream::Aggregate {
                now: 0.0,
                gap: Exp::new(system.arrival_rate).map_err(|_| SimError::ZeroArrivalRate)?,
            }),
            ArrivalMode::PerUser => {
                let per_user = system.arrival_rate / f64::from(system.users);
                let gap = Exp::new(per_user).map_err(|_| SimError::ZeroArrivalRate)?;
                let next = (0..system.users)
                    .map(|_| Reverse(Time(gap.sample(rng))))
                    .collect();
                Ok(ArrivalStream::PerUser { gap, next })
            }
        }
    }

    fn next(&mut self, rng: &mut impl Rng) -> f64 {
        match self {
            ArrivalStream::Aggregate { now, gap } => {
                *now += gap.sample(rng);
                *now
            }
            ArrivalStream::PerUser { gap, next } => {
                let Reverse(Time(t)) = next.pop().expect("at least one user");
                next.push(Reverse(Time(t + gap.sample(rng))));
                t
            }
        }
    }
}
