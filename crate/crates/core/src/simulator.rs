//! Seeded Monte Carlo estimate of the outage probability.
//!
//! Trials are grouped in fixed blocks of [`BLOCK_TRIALS`]. Each block owns a
//! fresh, warmed-up fleet per mobility mode and advances it between trials;
//! fading and file requests come from a per-trial counter-based stream. Block
//! results are merged by integer summation, so the outcome depends only on
//! the seed and never on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caching::{select_relay, CacheLayout, FileSampler, Scheme};
use crate::channel::{af_end_to_end_snr, sample_nakagami_power, sample_sr_power};
use crate::error::{Error, Result};
use crate::mobility::{step, MobilityMode, UavState};
use crate::scenario::{Scenario, SnrPoint};

pub const BLOCK_TRIALS: u64 = 1000;

const DOMAIN_FADING: u64 = 0;
const DOMAIN_MOBILITY: u64 = 1;
const DOMAIN_REWARM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimPlan {
    pub trials: u64,
    pub warmup_steps: u64,
    /// Re-initialise and re-warm the fleet before every trial.
    pub rewarm_every_trial: bool,
    /// Mobility slots between consecutive trials of a block.
    pub slots_per_trial: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SimPlan {
    fn default() -> Self {
        Self {
            trials: 100_000,
            warmup_steps: 10_000,
            rewarm_every_trial: false,
            slots_per_trial: 20,
            seed: 1,
            workers: default_workers(),
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl SimPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("sim.trials", "need at least one trial"));
        }
        if self.slots_per_trial == 0 {
            return Err(Error::config("sim.slots_per_trial", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("sim.workers", "need at least one worker"));
        }
        Ok(())
    }
}

/// Independent stream `index` of `domain` under `seed`.
fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 62) | (index & ((1 << 62) - 1)));
    rng
}

fn mode_index(mode: MobilityMode) -> u64 {
    match mode {
        MobilityMode::Fully3D => 0,
        MobilityMode::FixedHeight => 1,
    }
}

/// Fresh fleet advanced by `steps` slots.
pub fn warm_fleet<R: Rng + ?Sized>(scenario: &Scenario, mode: MobilityMode, steps: u64, rng: &mut R) -> Vec<UavState> {
    let p = &scenario.mobility;
    (0..scenario.relays)
        .map(|_| {
            let mut s = UavState::initial(p, mode, rng);
            for _ in 0..steps {
                s = step(&s, p, mode, rng);
            }
            s
        })
        .collect()
}

/// Channel and request draws of one trial, shared by every scheme and SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    /// Requested file, 1-based.
    pub file: usize,
    /// Second-hop distances.
    pub distances: Vec<f64>,
    pub sr_power: Vec<f64>,
    pub ud_power: Vec<f64>,
}

impl TrialDraw {
    pub fn sample<R: Rng + ?Sized>(scenario: &Scenario, files: &FileSampler, states: &[UavState], rng: &mut R) -> Self {
        let file = files.sample(rng);
        let sr_power = states.iter().map(|_| sample_sr_power(&scenario.sr, rng)).collect();
        let ud_power = states.iter().map(|_| sample_nakagami_power(&scenario.nakagami, rng)).collect();
        Self {
            file,
            distances: states.iter().map(UavState::distance).collect(),
            sr_power,
            ud_power,
        }
    }

    fn second_hop(&self, scenario: &Scenario, eta_u: f64) -> Vec<f64> {
        let alpha = scenario.nakagami.alpha;
        self.distances
            .iter()
            .zip(&self.ud_power)
            .map(|(&w, &g)| if w > 0.0 { eta_u * w.powf(-alpha) * g } else { f64::INFINITY })
            .collect()
    }

    pub fn outcome(&self, scenario: &Scenario, scheme: Scheme, snr: SnrPoint) -> TrialOutcome {
        let ud = self.second_hop(scenario, snr.eta_u);
        let e2e: Vec<f64> = self
            .sr_power
            .iter()
            .zip(&ud)
            .map(|(&g, &l)| af_end_to_end_snr(snr.eta_s * g, l))
            .collect();
        let layout: &CacheLayout = &scenario.cache;
        let hit = layout.is_hit(scheme, self.file);
        let (selected_relay, outage) = if !hit {
            let i = select_relay(&ud, &e2e, false).expect("non-empty fleet");
            (i, e2e[i] < scenario.gamma_th1())
        } else if scheme == Scheme::Uc {
            let i = layout.uc_holder(self.file).expect("hit implies a holder");
            (i, ud[i] < scenario.gamma_th2())
        } else {
            let i = select_relay(&ud, &e2e, true).expect("non-empty fleet");
            (i, ud[i] < scenario.gamma_th2())
        };
        TrialOutcome {
            requested_file: self.file,
            hit,
            selected_relay,
            outage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub requested_file: usize,
    pub hit: bool,
    pub selected_relay: usize,
    pub outage: bool,
}

/// Advance the fleet one slot, then draw and judge one trial.
pub fn run_trial<R: Rng + ?Sized>(
    scheme: Scheme,
    mode: MobilityMode,
    scenario: &Scenario,
    states: &mut [UavState],
    snr: SnrPoint,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let files = FileSampler::new(&scenario.cache)?;
    for s in states.iter_mut() {
        *s = step(s, &scenario.mobility, mode, rng);
    }
    Ok(TrialDraw::sample(scenario, &files, states, rng).outcome(scenario, scheme, snr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub op_hat: f64,
    pub stderr: f64,
    pub n_events: u64,
    pub trials: u64,
}

impl SimEstimate {
    pub fn from_counts(n_events: u64, trials: u64) -> Self {
        let op_hat = n_events as f64 / trials as f64;
        Self {
            op_hat,
            stderr: crate::stats::binomial_stderr(op_hat, trials),
            n_events,
            trials,
        }
    }
}

/// Outage counts of a sweep, indexed by (mode, scheme, snr).
#[derive(Debug, Clone, PartialEq)]
pub struct SimTable {
    modes: Vec<MobilityMode>,
    schemes: Vec<Scheme>,
    snrs: Vec<SnrPoint>,
    counts: Vec<u64>,
    hits: Vec<u64>,
    pub trials: u64,
}

impl SimTable {
    fn index(&self, mode: usize, scheme: usize, snr: usize) -> usize {
        (mode * self.schemes.len() + scheme) * self.snrs.len() + snr
    }

    pub fn estimate(&self, mode: MobilityMode, scheme: Scheme, snr_idx: usize) -> Option<SimEstimate> {
        let mi = self.modes.iter().position(|&m| m == mode)?;
        let si = self.schemes.iter().position(|&s| s == scheme)?;
        (snr_idx < self.snrs.len()).then(|| SimEstimate::from_counts(self.counts[self.index(mi, si, snr_idx)], self.trials))
    }

    /// Fraction of trials whose request was a cache hit under `scheme`.
    pub fn hit_frequency(&self, scheme: Scheme) -> Option<f64> {
        let si = self.schemes.iter().position(|&s| s == scheme)?;
        Some(self.hits[si] as f64 / self.trials as f64)
    }
}

/// Monte Carlo outage estimates for every (mode, scheme, snr) combination.
pub fn simulate(
    scenario: &Scenario,
    plan: &SimPlan,
    modes: &[MobilityMode],
    schemes: &[Scheme],
    snrs: &[SnrPoint],
) -> Result<SimTable> {
    plan.validate()?;
    scenario.validate()?;
    let files = FileSampler::new(&scenario.cache)?;
    let blocks = plan.trials.div_ceil(BLOCK_TRIALS);
    let cells = modes.len() * schemes.len() * snrs.len();

    let run_block = |block: u64| -> (Vec<u64>, Vec<u64>) {
        let mut counts = vec![0u64; cells];
        let mut hits = vec![0u64; schemes.len()];
        let first = block * BLOCK_TRIALS;
        let last = (first + BLOCK_TRIALS).min(plan.trials);
        let mut fleets: Vec<(ChaCha8Rng, Vec<UavState>)> = modes
            .iter()
            .map(|&mode| {
                let mut rng = stream(plan.seed, DOMAIN_MOBILITY, block * 2 + mode_index(mode));
                let fleet = if plan.rewarm_every_trial {
                    Vec::new()
                } else {
                    warm_fleet(scenario, mode, plan.warmup_steps, &mut rng)
                };
                (rng, fleet)
            })
            .collect();
        for trial in first..last {
            let fade = stream(plan.seed, DOMAIN_FADING, trial);
            for (mi, &mode) in modes.iter().enumerate() {
                let (mob_rng, fleet) = &mut fleets[mi];
                if plan.rewarm_every_trial {
                    let mut rng = stream(plan.seed, DOMAIN_REWARM, trial * 2 + mode_index(mode));
                    *fleet = warm_fleet(scenario, mode, plan.warmup_steps, &mut rng);
                    for s in fleet.iter_mut() {
                        *s = step(s, &scenario.mobility, mode, &mut rng);
                    }
                } else {
                    for _ in 0..plan.slots_per_trial {
                        for s in fleet.iter_mut() {
                            *s = step(s, &scenario.mobility, mode, mob_rng);
                        }
                    }
                }
                // every mode sees the same request and fading draws
                let mut fade_mode = fade.clone();
                let draw = TrialDraw::sample(scenario, &files, fleet, &mut fade_mode);
                for (si, &scheme) in schemes.iter().enumerate() {
                    if mi == 0 && scenario.cache.is_hit(scheme, draw.file) {
                        hits[si] += 1;
                    }
                    for (ni, &snr) in snrs.iter().enumerate() {
                        if draw.outcome(scenario, scheme, snr).outage {
                            counts[(mi * schemes.len() + si) * snrs.len() + ni] += 1;
                        }
                    }
                }
            }
        }
        (counts, hits)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::config("sim.workers", e.to_string()))?;
    let (counts, hits) = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(run_block)
            .reduce(
                || (vec![0u64; cells], vec![0u64; schemes.len()]),
                |(mut ca, mut ha), (cb, hb)| {
                    ca.iter_mut().zip(cb).for_each(|(a, b)| *a += b);
                    ha.iter_mut().zip(hb).for_each(|(a, b)| *a += b);
                    (ca, ha)
                },
            )
    });
    Ok(SimTable {
        modes: modes.to_vec(),
        schemes: schemes.to_vec(),
        snrs: snrs.to_vec(),
        counts,
        hits,
        trials: plan.trials,
    })
}

/// Monte Carlo estimate for a single (scheme, mode, snr).
pub fn estimate_op(scenario: &Scenario, plan: &SimPlan, scheme: Scheme, mode: MobilityMode, snr: SnrPoint) -> Result<SimEstimate> {
    let table = simulate(scenario, plan, &[mode], &[scheme], &[snr])?;
    Ok(table.estimate(mode, scheme, 0).expect("single cell"))
}

/// Fleet states seen by the trials of one mode, in trial order (all relays
/// of a trial are adjacent).
pub fn sample_trial_states(scenario: &Scenario, plan: &SimPlan, mode: MobilityMode) -> Result<Vec<UavState>> {
    plan.validate()?;
    let blocks = plan.trials.div_ceil(BLOCK_TRIALS);
    let per_block: Vec<Vec<UavState>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = stream(plan.seed, DOMAIN_MOBILITY, block * 2 + mode_index(mode));
            let mut fleet = warm_fleet(scenario, mode, plan.warmup_steps, &mut rng);
            let first = block * BLOCK_TRIALS;
            let mut out = Vec::with_capacity(BLOCK_TRIALS as usize * scenario.relays);
            for _ in first..(first + BLOCK_TRIALS).min(plan.trials) {
                for _ in 0..plan.slots_per_trial {
                    for s in fleet.iter_mut() {
                        *s = step(s, &scenario.mobility, mode, &mut rng);
                    }
                }
                out.extend_from_slice(&fleet);
            }
            out
        })
        .collect();
    Ok(per_block.concat())
}

/// Second-hop distances seen by the trials of one mode, in trial order.
pub fn sample_trial_distances(scenario: &Scenario, plan: &SimPlan, mode: MobilityMode) -> Result<Vec<f64>> {
    Ok(sample_trial_states(scenario, plan, mode)?.iter().map(UavState::distance).collect())
}
