//! Monte Carlo oracle: samples channel realizations, evaluates the SINR
//! expressions, and averages the exact normal-approximation error.
//!
//! Trials are cut into fixed-size chunks whose boundaries depend only on the
//! trial count. Each chunk is summed on its own and chunk partials are merged
//! in index order, so results are bit-identical for any number of workers.
//! How chunks are executed is left to a [`ChunkRunner`]; the std companion
//! crate provides a threaded one.
//!
//! The simulated channel always uses the backscatter noise term of the signal
//! model (`D_m = Omega_xi(BD->m) beta^2`), independent of the analytic engine's
//! `DTermMode`, so that the oracle can tell the two conventions apart.

use crate::channel::{ChannelStream, Link};
use crate::config::{DTermMode, Scenario};
use crate::fbl::{instantaneous_bler, BlerResult, PacketSpec, StageBlers};
use crate::sinr::{coeffs_with_mode, sinrs_from_gains, Gains, SinrCoeffs, SinrStream, User};
use crate::{Error, NeumaierSum, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

pub const MIN_TRIALS: u64 = 10_000;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Trials per chunk; fixed so the reduction tree never depends on workers.
pub const CHUNK_TRIALS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Noma,
    /// Time-division baseline, see [`mc_oma_baseline`].
    Oma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPlan {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub mode: Scheme,
}

impl McPlan {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Result<Self> {
        let plan = Self {
            trials,
            seed,
            workers,
            mode: Scheme::Noma,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_mode(mut self, mode: Scheme) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid(
                "trials",
                alloc::format!("at least {MIN_TRIALS} trials are required"),
            ));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be >= 1"));
        }
        Ok(())
    }

    pub fn chunks(&self) -> usize {
        self.trials.div_ceil(CHUNK_TRIALS) as usize
    }

    pub fn chunk_range(&self, chunk: usize) -> Range<u64> {
        let start = chunk as u64 * CHUNK_TRIALS;
        start..(start + CHUNK_TRIALS).min(self.trials)
    }
}

/// Executes independent chunk jobs and returns their results in chunk order.
pub trait ChunkRunner {
    fn map_chunks<T, F>(&self, chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs every chunk on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkRunner for Sequential {
    fn map_chunks<T, F>(&self, chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..chunks).map(job).collect()
    }
}

struct Sampler<'a> {
    sc: &'a Scenario,
    stream: ChannelStream,
}

impl<'a> Sampler<'a> {
    fn new(sc: &'a Scenario, seed: u64) -> Self {
        Self {
            sc,
            stream: ChannelStream::new(seed),
        }
    }

    fn gain(&self, link: Link, trial: u64) -> f64 {
        let draw = self.stream.sample_channel(link, trial, self.sc.link(link));
        // The RSU-BD link is static, so its true and estimated gains coincide.
        if link == Link::RsuBd {
            draw.h_t.norm_sqr()
        } else {
            draw.h_hat_1.norm_sqr()
        }
    }

    fn gains(&self, user: User, trial: u64) -> Gains {
        Gains {
            direct: self.gain(user.direct_link(), trial),
            backscatter: self.gain(user.backscatter_link(), trial),
            relay: self.gain(Link::RsuBd, trial),
        }
    }
}

fn physical_coeffs(user: User, sc: &Scenario) -> SinrCoeffs {
    coeffs_with_mode(user, sc, DTermMode::DerivationConsistent)
}

/// Empirical `P(SINR <= u)` at each grid point.
pub fn empirical_cdf<R: ChunkRunner>(
    stream: SinrStream,
    grid: &[f64],
    sc: &Scenario,
    plan: &McPlan,
    runner: &R,
) -> Result<Vec<f64>> {
    Ok(empirical_cdfs(&[stream], grid, sc, plan, runner)?.remove(0))
}

/// [`empirical_cdf`] for several streams at once, sharing channel draws.
pub fn empirical_cdfs<R: ChunkRunner>(
    streams: &[SinrStream],
    grid: &[f64],
    sc: &Scenario,
    plan: &McPlan,
    runner: &R,
) -> Result<Vec<Vec<f64>>> {
    plan.validate()?;
    if grid.windows(2).any(|w| !(w[0] <= w[1])) || grid.iter().any(|u| u.is_nan()) {
        return Err(Error::invalid("u_grid", "grid must be sorted ascending"));
    }
    let users = [User::Near, User::Far];
    let wanted = users.map(|u| streams.iter().any(|s| s.user() == u));
    let coeffs = users.map(|u| physical_coeffs(u, sc));
    let sampler = Sampler::new(sc, plan.seed);
    let bins = grid.len() + 1;
    let partials = runner.map_chunks(plan.chunks(), |chunk| {
        let mut counts = vec![0u64; bins * streams.len()];
        for trial in plan.chunk_range(chunk) {
            let samples = [0, 1].map(|i| {
                wanted[i].then(|| {
                    let gains = sampler.gains(users[i], trial);
                    sinrs_from_gains(users[i], &coeffs[i], &gains, sc.gamma)
                })
            });
            for (j, stream) in streams.iter().enumerate() {
                let i = usize::from(stream.user() == User::Far);
                if let Some(s) = &samples[i] {
                    let g = stream.pick(s);
                    counts[j * bins + grid.partition_point(|&u| u < g)] += 1;
                }
            }
        }
        counts
    });
    let mut totals = vec![0u64; bins * streams.len()];
    for counts in &partials {
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    let n = plan.trials as f64;
    Ok(totals
        .chunks(bins)
        .map(|hist| {
            let mut running = 0u64;
            hist[..grid.len()]
                .iter()
                .map(|c| {
                    running += c;
                    running as f64 / n
                })
                .collect()
        })
        .collect())
}

/// Monte Carlo average BLER of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McBler {
    /// End-to-end BLER: the mean over trials of each trial's chain failure
    /// probability.
    pub total: BlerResult,
    /// Per-stage means (near user only). In the orthogonal baseline there is
    /// no far-stream stage, so `far` is zero.
    pub stages: Option<StageBlers>,
}

#[derive(Clone, Copy)]
struct Packets {
    first: PacketSpec,
    second: PacketSpec,
    third: PacketSpec,
}

fn average<R: ChunkRunner>(
    user: User,
    sc: &Scenario,
    plan: &McPlan,
    runner: &R,
    coeffs: &SinrCoeffs,
    packets: Packets,
    oma: bool,
) -> McBler {
    let sampler = Sampler::new(sc, plan.seed);
    let partials = runner.map_chunks(plan.chunks(), |chunk| {
        let mut sums = [NeumaierSum::new(); 4];
        for trial in plan.chunk_range(chunk) {
            let s = sinrs_from_gains(user, coeffs, &sampler.gains(user, trial), sc.gamma);
            match (user, oma) {
                (User::Far, _) => {
                    let q = instantaneous_bler(s.g_f, &packets.first);
                    sums[0].add(q);
                    sums[3].add(q);
                }
                (User::Near, false) => {
                    let qf = instantaneous_bler(s.g_f, &packets.first);
                    let qn = instantaneous_bler(s.g_n, &packets.second);
                    let qc = instantaneous_bler(s.g_c, &packets.third);
                    sums[0].add(qf);
                    sums[1].add(qn);
                    sums[2].add(qc);
                    sums[3].add(1.0 - (1.0 - qf) * (1.0 - qn) * (1.0 - qc));
                }
                (User::Near, true) => {
                    // Own stream at full power, then the backscatter stream.
                    let qn = instantaneous_bler(s.g_f, &packets.second);
                    let qc = instantaneous_bler(s.g_c, &packets.third);
                    sums[1].add(qn);
                    sums[2].add(qc);
                    sums[3].add(1.0 - (1.0 - qn) * (1.0 - qc));
                }
            }
        }
        sums
    });
    let mut totals = [NeumaierSum::new(); 4];
    for p in &partials {
        for (t, s) in totals.iter_mut().zip(p) {
            t.merge(s);
        }
    }
    let n = plan.trials as f64;
    let mean = |i: usize| (totals[i].value() / n).clamp(0.0, 1.0);
    McBler {
        total: BlerResult::monte_carlo(mean(3), plan.trials),
        stages: match user {
            User::Near => Some(StageBlers {
                far: mean(0),
                near: mean(1),
                backscatter: mean(2),
            }),
            User::Far => None,
        },
    }
}

/// Monte Carlo end-to-end BLER under the plan's multiple-access scheme.
pub fn mc_average_bler<R: ChunkRunner>(
    user: User,
    sc: &Scenario,
    plan: &McPlan,
    runner: &R,
) -> Result<McBler> {
    plan.validate()?;
    if plan.mode == Scheme::Oma {
        return mc_oma_baseline(user, sc, plan, runner);
    }
    let packets = Packets {
        first: sc.packet_far,
        second: sc.packet_near,
        third: sc.packet_backscatter,
    };
    Ok(average(
        user,
        sc,
        plan,
        runner,
        &physical_coeffs(user, sc),
        packets,
        false,
    ))
}

/// Time-division orthogonal baseline.
///
/// Each user gets its own slot with the whole transmit power and no
/// superposed stream; the BD keeps backscattering in both slots. To carry the
/// same payload in half the time, every stream (including the backscatter
/// stream decoded in the near user's slot) uses `L / 2` channel uses at rate
/// `2R`. The near user decodes its own stream and then the backscatter stream.
pub fn mc_oma_baseline<R: ChunkRunner>(
    user: User,
    sc: &Scenario,
    plan: &McPlan,
    runner: &R,
) -> Result<McBler> {
    plan.validate()?;
    let base = physical_coeffs(user, sc);
    let retained = sc.link(user.direct_link()).retained_power();
    let coeffs = SinrCoeffs {
        a: retained,
        g: 0.0,
        ..base
    };
    let packets = Packets {
        first: sc.packet_far.half_slot()?,
        second: sc.packet_near.half_slot()?,
        third: sc.packet_backscatter.half_slot()?,
    };
    Ok(average(user, sc, plan, runner, &coeffs, packets, true))
}
