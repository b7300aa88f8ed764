//! Zipf file popularity, cache placement and relay selection.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// No caching: every request goes over both hops.
    #[serde(rename = "NC", alias = "nc")]
    Nc,
    /// Most-popular caching: all relays hold files `1..=C`.
    #[serde(rename = "MPC", alias = "mpc")]
    Mpc,
    /// Uniform caching: relay `i` holds files `(i-1)C+1..=iC`.
    #[serde(rename = "UC", alias = "uc")]
    Uc,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Nc, Scheme::Mpc, Scheme::Uc];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Nc => "NC",
            Scheme::Mpc => "MPC",
            Scheme::Uc => "UC",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NC" => Ok(Scheme::Nc),
            "MPC" => Ok(Scheme::Mpc),
            "UC" => Ok(Scheme::Uc),
            other => Err(Error::config("sweep.schemes", format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheLayout {
    pub catalogue: usize,
    pub capacity: usize,
    pub relays: usize,
    pub lambda: f64,
}

impl CacheLayout {
    pub fn new(catalogue: usize, capacity: usize, relays: usize, lambda: f64) -> Result<Self> {
        let layout = Self {
            catalogue,
            capacity,
            relays,
            lambda,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Structural checks only; `M·C < K` is enforced by the configuration
    /// layer because the analytic formulas stay meaningful without it.
    pub fn validate(&self) -> Result<()> {
        if self.catalogue == 0 {
            return Err(Error::domain("zipf_pmf", "catalogue size K must be at least 1"));
        }
        if self.relays == 0 {
            return Err(Error::config("fleet.M", "need at least one relay"));
        }
        if self.capacity > self.catalogue {
            return Err(Error::config("cache.C", format!("capacity {} exceeds catalogue {}", self.capacity, self.catalogue)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("cache.lambda", format!("Zipf exponent {} must be non-negative", self.lambda)));
        }
        Ok(())
    }

    /// Relay holding file `k` (1-based) under uniform caching.
    pub fn uc_holder(&self, k: usize) -> Option<usize> {
        if self.capacity == 0 || k == 0 {
            return None;
        }
        let relay = (k - 1) / self.capacity;
        (relay < self.relays).then_some(relay)
    }

    /// Whether file `k` (1-based) is served from a cache under `scheme`.
    pub fn is_hit(&self, scheme: Scheme, k: usize) -> bool {
        match scheme {
            Scheme::Nc => false,
            Scheme::Mpc => k >= 1 && k <= self.capacity,
            Scheme::Uc => self.uc_holder(k).is_some(),
        }
    }
}

/// `f_k = k^{-λ} / Σ_j j^{-λ}`, `k = 1..=K`.
pub fn zipf_pmf(layout: &CacheLayout) -> Result<Vec<f64>> {
    if layout.catalogue == 0 {
        return Err(Error::domain("zipf_pmf", "catalogue size K must be at least 1"));
    }
    let weights: Vec<f64> = (1..=layout.catalogue).map(|k| (k as f64).powf(-layout.lambda)).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitMass {
    /// Request mass served by each relay's cache. Under MPC every relay can
    /// serve the same mass.
    pub per_relay: Vec<f64>,
    pub hit: f64,
    pub miss: f64,
}

pub fn hit_mass(layout: &CacheLayout, scheme: Scheme) -> Result<HitMass> {
    let pmf = zipf_pmf(layout)?;
    let cached = |range: std::ops::Range<usize>| pmf[range.start.min(pmf.len())..range.end.min(pmf.len())].iter().sum::<f64>();
    let c = layout.capacity;
    let (per_relay, hit, miss) = match scheme {
        Scheme::Nc => (vec![0.0; layout.relays], 0.0, 1.0),
        Scheme::Mpc => {
            let hit = cached(0..c);
            (vec![hit; layout.relays], hit, cached(c..layout.catalogue))
        }
        Scheme::Uc => {
            let per: Vec<f64> = (0..layout.relays).map(|i| cached(i * c..(i + 1) * c)).collect();
            let top = layout.relays * c;
            (per, cached(0..top), cached(top..layout.catalogue))
        }
    };
    Ok(HitMass { per_relay, hit, miss })
}

/// Draws 1-based file indices from the Zipf law.
#[derive(Debug, Clone)]
pub struct FileSampler {
    index: WeightedIndex<f64>,
}

impl FileSampler {
    pub fn new(layout: &CacheLayout) -> Result<Self> {
        let pmf = zipf_pmf(layout)?;
        let index = WeightedIndex::new(&pmf).map_err(|e| Error::domain("zipf_pmf", e.to_string()))?;
        Ok(Self { index })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng) + 1
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Best relay: largest second-hop SNR for a cached request, largest
/// end-to-end SNR otherwise. Ties go to the lowest index.
pub fn select_relay(second_hop: &[f64], end_to_end: &[f64], cached: bool) -> Result<usize> {
    if second_hop.is_empty() || end_to_end.is_empty() {
        return Err(Error::domain("select_relay", "no relays to choose from"));
    }
    Ok(if cached { argmax(second_hop) } else { argmax(end_to_end) })
}
