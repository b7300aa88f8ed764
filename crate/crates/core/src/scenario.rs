//! The physical scenario shared by the analysis and the simulator.

use serde::{Deserialize, Serialize};

use crate::caching::CacheLayout;
use crate::channel::{db_to_linear, LinkBudget, NakagamiParams, SrFadingParams};
use crate::error::{Error, Result};
use crate::mobility::MobilityParams;

/// How the sweep's SNR axis maps onto the two hop scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SnrCoupling {
    /// `η_s = η_u = 10^{snr/10}`.
    #[default]
    Equal,
    /// `P_s = P_u = 10^{snr/10}` W; `η_s` from the satellite link budget,
    /// `η_u = P_u`.
    LinkBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub eta_s: f64,
    pub eta_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sr: SrFadingParams,
    pub nakagami: NakagamiParams,
    pub mobility: MobilityParams,
    pub budget: LinkBudget,
    pub coupling: SnrCoupling,
    pub relays: usize,
    pub cache: CacheLayout,
    /// Target rate in bit/s/Hz.
    pub rate: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            sr: SrFadingParams::new(2, 0.063, 0.0005, 2).expect("default fading"),
            nakagami: NakagamiParams::new(1, 1.0, 2.0).expect("default terrestrial link"),
            mobility: MobilityParams::default(),
            budget: LinkBudget::default(),
            coupling: SnrCoupling::Equal,
            relays: 2,
            cache: CacheLayout::new(20, 2, 2, 2.0).expect("default cache"),
            rate: 1.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.mobility.validate()?;
        self.budget.validate()?;
        self.cache.validate()?;
        if self.relays == 0 {
            return Err(Error::config("fleet.M", "need at least one relay"));
        }
        if self.cache.relays != self.relays {
            return Err(Error::config("cache", "cache layout relay count differs from fleet.M"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::config("terrestrial.rate", format!("target rate {} must be positive", self.rate)));
        }
        Ok(())
    }

    /// Two-slot threshold `2^{2R} - 1`.
    pub fn gamma_th1(&self) -> f64 {
        (2.0 * self.rate).exp2() - 1.0
    }

    /// Single-hop threshold `2^R - 1`.
    pub fn gamma_th2(&self) -> f64 {
        self.rate.exp2() - 1.0
    }

    pub fn snr(&self, snr_db: f64) -> Result<SnrPoint> {
        let lin = db_to_linear(snr_db);
        let (eta_s, eta_u) = match self.coupling {
            SnrCoupling::Equal => (lin, lin),
            SnrCoupling::LinkBudget => {
                let budget = LinkBudget { p_s: lin, ..self.budget };
                (budget.eta_s()?, lin)
            }
        };
        Ok(SnrPoint { snr_db, eta_s, eta_u })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let s = Scenario::default();
        assert_eq!(s.gamma_th1(), 3.0);
        assert_eq!(s.gamma_th2(), 1.0);
    }

    #[test]
    fn snr_coupling() {
        let mut s = Scenario::default();
        let p = s.snr(20.0).unwrap();
        assert!((p.eta_s - 100.0).abs() < 1e-12 && (p.eta_u - 100.0).abs() < 1e-12);
        s.coupling = SnrCoupling::LinkBudget;
        let p = s.snr(20.0).unwrap();
        assert!((p.eta_s - 100.0 * s.budget.eta_s().unwrap()).abs() < 1e-12);
        assert!((p.eta_u - 100.0).abs() < 1e-12);
    }
}
