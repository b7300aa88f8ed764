//! TOML experiment configuration. Every key is optional; an empty file gives
//! the reference scenario. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::caching::{CacheLayout, Scheme};
use crate::channel::{BeamPattern, LinkBudget, NakagamiParams, SrFadingParams};
use crate::error::{Error, Result};
use crate::mobility::{BoundaryRule, MobilityMode, MobilityParams};
use crate::scenario::{Scenario, SnrCoupling};
use crate::simulator::{default_workers, SimPlan};

pub const WORKERS_ENV: &str = "HSTN_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub satellite: SatelliteConfig,
    pub fleet: FleetConfig,
    pub terrestrial: TerrestrialConfig,
    pub cache: CacheConfig,
    pub sweep: SweepConfig,
    pub sim: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SatelliteConfig {
    /// Transmit power in W; only used with `snr_coupling = "link_budget"`
    /// when no sweep overrides it.
    #[serde(rename = "P_s")]
    pub p_s: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "W")]
    pub bandwidth: f64,
    pub f_c: f64,
    pub d_u: f64,
    pub theta_u: f64,
    #[serde(rename = "theta_3dB")]
    pub theta_3db: f64,
    pub gain_s_db: f64,
    pub gain_u_db: f64,
    pub beam_pattern: BeamPattern,
    pub m_su: f64,
    pub b_su: f64,
    #[serde(rename = "Omega_su")]
    pub omega_su: f64,
    #[serde(rename = "N")]
    pub antennas: u32,
}

impl Default for SatelliteConfig {
    fn default() -> Self {
        let b = LinkBudget::default();
        Self {
            p_s: b.p_s,
            temperature: b.temperature,
            bandwidth: b.bandwidth,
            f_c: b.carrier,
            d_u: b.distance,
            theta_u: b.theta_u_deg,
            theta_3db: b.theta_3db_deg,
            gain_s_db: b.gain_s_db,
            gain_u_db: b.gain_u_db,
            beam_pattern: b.pattern,
            m_su: 2.0,
            b_su: 0.063,
            omega_su: 0.0005,
            antennas: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetConfig {
    #[serde(rename = "M")]
    pub relays: usize,
    #[serde(rename = "H")]
    pub height: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "R_prime")]
    pub max_step: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Dwell range; derived from `p_s` when both are absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    pub p_s: f64,
    pub slot_duration: f64,
    pub boundary: BoundaryRule,
}

impl Default for FleetConfig {
    fn default() -> Self {
        let p = MobilityParams::default();
        Self {
            relays: 2,
            height: p.height,
            radius: p.radius,
            max_step: p.max_step,
            v_min: p.v_min,
            v_max: p.v_max,
            tau_min: None,
            tau_max: None,
            p_s: p.stay_probability,
            slot_duration: p.slot_duration,
            boundary: p.boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerrestrialConfig {
    pub m_ud: f64,
    #[serde(rename = "Omega_ud")]
    pub omega_ud: f64,
    pub alpha: f64,
    /// Target rate in bit/s/Hz.
    pub rate: f64,
    pub snr_coupling: SnrCoupling,
}

impl Default for TerrestrialConfig {
    fn default() -> Self {
        Self {
            m_ud: 1.0,
            omega_ud: 1.0,
            alpha: 2.0,
            rate: 1.0,
            snr_coupling: SnrCoupling::Equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheConfig {
    #[serde(rename = "K")]
    pub catalogue: usize,
    #[serde(rename = "C")]
    pub capacity: usize,
    pub lambda: f64,
}

impl Default for CacheConfig {
    fn default() -> Self {
        Self {
            catalogue: 20,
            capacity: 2,
            lambda: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub snr_db_start: f64,
    pub snr_db_stop: f64,
    pub snr_db_step: f64,
    pub schemes: Vec<Scheme>,
    pub modes: Vec<MobilityMode>,
    pub exact: bool,
    pub asymptotic: bool,
    pub simulated: bool,
    pub diversity_window: [f64; 2],
    pub out: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db_start: 0.0,
            snr_db_stop: 70.0,
            snr_db_step: 2.0,
            schemes: Scheme::ALL.to_vec(),
            modes: MobilityMode::ALL.to_vec(),
            exact: true,
            asymptotic: false,
            simulated: true,
            diversity_window: [50.0, 70.0],
            out: PathBuf::from("outage.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub trials: u64,
    pub warmup_steps: u64,
    pub rewarm_every_trial: bool,
    pub slots_per_trial: u64,
    pub seed: u64,
    /// 0 means one worker per available core.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        let p = SimPlan::default();
        Self {
            trials: p.trials,
            warmup_steps: p.warmup_steps,
            rewarm_every_trial: p.rewarm_every_trial,
            slots_per_trial: p.slots_per_trial,
            seed: p.seed,
            workers: 0,
        }
    }
}

/// Which outputs a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub exact: bool,
    pub asymptotic: bool,
    pub simulated: bool,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub modes: Vec<MobilityMode>,
    pub outputs: Outputs,
    pub diversity_window: (f64, f64),
    pub sim: SimPlan,
    pub output_path: PathBuf,
}

fn integer_severity(key: &str, v: f64) -> Result<u32> {
    if !(v >= 1.0) || v.fract() != 0.0 || v > 64.0 {
        return Err(Error::config(key, format!("{v} must be an integer between 1 and 64")));
    }
    Ok(v as u32)
}

/// Inclusive SNR grid `start, start+step, ..., ≤ stop`.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(Error::config("sweep.snr_db_stop", format!("sweep [{start}, {stop}] is empty")));
    }
    if !(step > 0.0) {
        return Err(Error::config("sweep.snr_db_step", format!("step {step} must be positive")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::config("sweep.snr_db_step", "sweep has more than 100000 points"));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serialisable")
    }

    /// Check every invariant and build the experiment.
    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let s = &self.satellite;
        let m_su = integer_severity("satellite.m_su", s.m_su)?;
        let sr = SrFadingParams::new(m_su, s.b_su, s.omega_su, s.antennas)?;
        let budget = LinkBudget {
            p_s: s.p_s,
            temperature: s.temperature,
            bandwidth: s.bandwidth,
            carrier: s.f_c,
            distance: s.d_u,
            theta_u_deg: s.theta_u,
            theta_3db_deg: s.theta_3db,
            gain_s_db: s.gain_s_db,
            gain_u_db: s.gain_u_db,
            pattern: s.beam_pattern,
        };
        budget.validate()?;

        let t = &self.terrestrial;
        let nakagami = NakagamiParams::new(integer_severity("terrestrial.m_ud", t.m_ud)?, t.omega_ud, t.alpha)?;
        if !(t.rate > 0.0 && t.rate.is_finite()) {
            return Err(Error::config("terrestrial.rate", format!("{} must be positive", t.rate)));
        }

        let f = &self.fleet;
        if f.relays == 0 {
            return Err(Error::config("fleet.M", "need at least one relay"));
        }
        let mut mobility = MobilityParams {
            height: f.height,
            radius: f.radius,
            max_step: f.max_step,
            v_min: f.v_min,
            v_max: f.v_max,
            tau_min: 0.0,
            tau_max: 0.0,
            stay_probability: f.p_s,
            slot_duration: f.slot_duration,
            boundary: f.boundary,
        };
        match (f.tau_min, f.tau_max) {
            (None, None) => {
                if (0.0..=1.0).contains(&f.p_s) && f.v_min > 0.0 && f.v_max > f.v_min {
                    mobility.derive_dwell_range();
                }
            }
            (Some(lo), Some(hi)) => {
                mobility.tau_min = lo;
                mobility.tau_max = hi;
            }
            _ => return Err(Error::config("fleet.tau_max", "set both tau_min and tau_max, or neither")),
        }
        mobility.validate()?;

        let c = &self.cache;
        if c.catalogue == 0 {
            return Err(Error::config("cache.K", "catalogue must hold at least one file"));
        }
        if c.capacity > c.catalogue {
            return Err(Error::config("cache.C", format!("capacity {} exceeds catalogue {}", c.capacity, c.catalogue)));
        }
        let cache = CacheLayout::new(c.catalogue, c.capacity, f.relays, c.lambda)?;

        let w = &self.sweep;
        let snr_db = snr_grid(w.snr_db_start, w.snr_db_stop, w.snr_db_step)?;
        let mut schemes = w.schemes.clone();
        schemes.sort();
        schemes.dedup();
        let mut modes = w.modes.clone();
        modes.sort();
        modes.dedup();
        if schemes.is_empty() {
            return Err(Error::config("sweep.schemes", "select at least one scheme"));
        }
        if modes.is_empty() {
            return Err(Error::config("sweep.modes", "select at least one mobility mode"));
        }
        if schemes.contains(&Scheme::Uc) && f.relays * c.capacity >= c.catalogue {
            return Err(Error::config(
                "cache.C",
                format!("uniform caching needs M·C < K, got {}·{} >= {}", f.relays, c.capacity, c.catalogue),
            ));
        }
        let outputs = Outputs {
            exact: w.exact,
            asymptotic: w.asymptotic,
            simulated: w.simulated,
        };
        if !(outputs.exact || outputs.asymptotic || outputs.simulated) {
            return Err(Error::config("sweep.exact", "enable at least one of exact, asymptotic, simulated"));
        }
        let [lo, hi] = w.diversity_window;
        if !(hi > lo) {
            return Err(Error::config("sweep.diversity_window", format!("[{lo}, {hi}] is empty")));
        }

        let sc = &self.sim;
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::config(WORKERS_ENV, format!("`{v}` is not a worker count")))?,
            Err(_) => sc.workers,
        };
        let sim = SimPlan {
            trials: sc.trials,
            warmup_steps: sc.warmup_steps,
            rewarm_every_trial: sc.rewarm_every_trial,
            slots_per_trial: sc.slots_per_trial,
            seed: sc.seed,
            workers: if workers == 0 { default_workers() } else { workers },
        };
        sim.validate()?;

        let scenario = Scenario {
            sr,
            nakagami,
            mobility,
            budget,
            coupling: t.snr_coupling,
            relays: f.relays,
            cache,
            rate: t.rate,
        };
        scenario.validate()?;
        Ok(ExperimentSpec {
            scenario,
            snr_db,
            schemes,
            modes,
            outputs,
            diversity_window: (lo, hi),
            sim,
            output_path: w.out.clone(),
        })
    }
}

/// Read, parse and validate a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    Config::load(path)?.to_spec()
}
