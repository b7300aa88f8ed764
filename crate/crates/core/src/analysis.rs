//! Exact and high-SNR outage probability of the cached relay network.
//!
//! `Ψ(γ)` is the outage probability of one AF relay path at threshold `γ`.
//! It is evaluated in closed form as `1 - S`, where `S` is a finite sum of
//! positive terms, each carrying one distance integral of a Bessel-K kernel.
//! Two purely numerical routes are provided next to it as references.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::caching::{hit_mass, Scheme};
use crate::channel::{sr_sum_cdf_scaled, sr_sum_cdf_small};
use crate::error::{Error, Result};
use crate::mobility::{DistanceDistribution, MobilityMode};
use crate::scenario::{Scenario, SnrPoint};
use crate::specfun::{
    binomial, factorial, integrate_finite, integrate_semi_infinite, ln_bessel_k, ln_factorial, ln_gamma_unchecked,
    reg_lower_gamma_unchecked, QuadratureSpec,
};
use crate::stats::ls_slope;

/// One outage evaluation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub scheme: Scheme,
    pub mode: MobilityMode,
    pub snr: SnrPoint,
}

/// Analytic outage probability at one operating point. `op_asymptotic` is
/// the raw high-SNR expression and may exceed one at low SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub op_exact: f64,
    pub op_asymptotic: f64,
    pub psi: f64,
    pub cdf_ud_at_th2: f64,
    pub hit_mass: f64,
    pub miss_mass: f64,
}

impl OutageResult {
    pub fn asymptotic_clamped(&self) -> f64 {
        self.op_asymptotic.clamp(0.0, 1.0)
    }
}

/// Analytic engine for one scenario; holds the tabulated distance laws of
/// both mobility modes.
#[derive(Debug, Clone)]
pub struct Analyzer {
    scenario: Scenario,
    fully3d: DistanceDistribution,
    fixed: DistanceDistribution,
    spec: QuadratureSpec,
}

impl Analyzer {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        Ok(Self {
            fully3d: DistanceDistribution::new(MobilityMode::Fully3D, scenario.mobility)?,
            fixed: DistanceDistribution::new(MobilityMode::FixedHeight, scenario.mobility)?,
            scenario,
            spec: QuadratureSpec::new(1e-300, 1e-12, 4000)?,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn distance(&self, mode: MobilityMode) -> &DistanceDistribution {
        match mode {
            MobilityMode::Fully3D => &self.fully3d,
            MobilityMode::FixedHeight => &self.fixed,
        }
    }

    /// `∫ g(r) f_W(r) dr` over the mode's support, split at the density's kinks.
    fn over_distance<F: Fn(f64) -> f64>(&self, mode: MobilityMode, g: F, spec: &QuadratureSpec) -> Result<f64> {
        let dist = self.distance(mode);
        let mut total = 0.0;
        for seg in dist.breakpoints().windows(2) {
            total += integrate_finite(|r| if r > 0.0 { g(r) * dist.pdf(r) } else { 0.0 }, seg[0], seg[1], spec)?;
        }
        Ok(total)
    }

    /// Rate `m / (Ω η_u)` of the second-hop SNR per unit path loss.
    fn ud_rate(&self, eta_u: f64) -> f64 {
        let n = &self.scenario.nakagami;
        n.m as f64 / (n.omega * eta_u)
    }

    /// CDF of the second-hop SNR `η_u W^{-α} |g|²`.
    pub fn cdf_lambda_ud(&self, x: f64, eta_u: f64, mode: MobilityMode) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(1.0);
        }
        let n = self.scenario.nakagami;
        let c = self.ud_rate(eta_u) * x;
        let v = self.over_distance(mode, |r| reg_lower_gamma_unchecked(n.m as f64, c * r.powf(n.alpha)), &self.spec)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Density of the second-hop SNR at `y`.
    pub fn pdf_lambda_ud(&self, y: f64, eta_u: f64, mode: MobilityMode, spec: &QuadratureSpec) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let n = self.scenario.nakagami;
        let m = n.m as f64;
        let c = self.ud_rate(eta_u);
        let ln_norm = -ln_gamma_unchecked(m);
        self.over_distance(
            mode,
            |r| {
                let a = c * r.powf(n.alpha);
                (ln_norm + m * a.ln() + (m - 1.0) * y.ln() - a * y).exp()
            },
            spec,
        )
    }

    /// `𝒥₂ = ∫ r^{mα} f_W(r) dr`
    pub fn j2(&self, mode: MobilityMode) -> Result<f64> {
        let n = self.scenario.nakagami;
        let e = n.m as f64 * n.alpha;
        self.over_distance(mode, |r| r.powf(e), &self.spec)
    }

    /// Leading high-SNR term `(1/m!) (m x / (Ω η_u))^m 𝒥₂` of the second-hop CDF.
    pub fn cdf_lambda_ud_asymptotic(&self, x: f64, eta_u: f64, mode: MobilityMode) -> Result<f64> {
        let m = self.scenario.nakagami.m;
        Ok((self.ud_rate(eta_u) * x).powi(m as i32) / factorial(m) * self.j2(mode)?)
    }

    /// Closed-form `Ψ(γ) = Pr[Λ_id < γ]`.
    pub fn psi(&self, gamma: f64, snr: SnrPoint, mode: MobilityMode) -> Result<f64> {
        if !(gamma > 0.0) {
            return Ok(0.0);
        }
        if gamma.is_infinite() {
            return Ok(1.0);
        }
        let sr = &self.scenario.sr;
        let nak = self.scenario.nakagami;
        let m = nak.m as i64;
        let mf = m as f64;
        let c = self.ud_rate(snr.eta_u);
        let theta0 = sr.decay();
        let theta = theta0 / snr.eta_s;
        let t = gamma;
        let tt1 = t * (t + 1.0);
        let b = theta * tt1;
        let max_g = sr.terms().iter().map(|s| s.shape as i64).max().unwrap_or(1);

        // distance integrals by Bessel order ν = n - q + 1, ν ∈ [2 - max_g, m]
        let nu_lo = 2 - max_g;
        let mut kernel = Vec::with_capacity((m - nu_lo + 1) as usize);
        for nu in nu_lo..=m {
            let order = nu.unsigned_abs() as u32;
            let power = mf - nu as f64 / 2.0;
            let value = self.over_distance(
                mode,
                |r| {
                    let a = c * r.powf(nak.alpha);
                    let z = 2.0 * (b * a).sqrt();
                    let lk = ln_bessel_k(order, z).unwrap_or(f64::NEG_INFINITY);
                    (power * a.ln() - a * t + lk).exp()
                },
                &self.spec,
            )?;
            kernel.push(value);
        }

        let ln_common = std::f64::consts::LN_2 - ln_gamma_unchecked(mf) - theta * t;
        let mut survival = 0.0;
        for term in sr.terms() {
            let g = term.shape as i64;
            let ln_w = term.coef.ln() + ln_factorial(g as u32 - 1) - g as f64 * theta0.ln();
            for p in 0..g {
                for q in 0..=p {
                    for n in 0..m {
                        let nu = n - q + 1;
                        let k = kernel[(nu - nu_lo) as usize];
                        if k == 0.0 {
                            continue;
                        }
                        let ln_term = ln_w - ln_factorial(p as u32)
                            + binomial(p as u32, q as u32).ln()
                            + (p - q) as f64 * (theta * t).ln()
                            + q as f64 * b.ln()
                            + binomial((m - 1) as u32, n as u32).ln()
                            + (m - 1 - n) as f64 * t.ln()
                            + nu as f64 / 2.0 * b.ln()
                            + ln_common;
                        survival += ln_term.exp() * k;
                    }
                }
            }
        }
        Ok((1.0 - survival).clamp(0.0, 1.0))
    }

    /// Reference `Ψ(γ) = 1 - ∫₀^∞ [1 - F_su(γ(x+γ+1)/x)] f_ud(x+γ) dx`, nested quadrature.
    pub fn psi_oracle(&self, gamma: f64, snr: SnrPoint, mode: MobilityMode) -> Result<f64> {
        let sr = &self.scenario.sr;
        let inner = QuadratureSpec::new(1e-300, 1e-11, 4000)?;
        let outer = QuadratureSpec::new(1e-15, 1e-10, 4000)?;
        let f = |x: f64| -> f64 {
            if x <= 0.0 {
                return 0.0;
            }
            let y = gamma * (x + gamma + 1.0) / x;
            let surv = 1.0 - sr_sum_cdf_scaled(y, sr, snr.eta_s);
            if surv == 0.0 {
                return 0.0;
            }
            surv * self.pdf_lambda_ud(x + gamma, snr.eta_u, mode, &inner).unwrap_or(f64::NAN)
        };
        let s = integrate_semi_infinite(f, 0.0, &outer)?;
        if !s.is_finite() {
            return Err(Error::Accuracy {
                estimate: s,
                error_bound: f64::INFINITY,
                subdivisions: 0,
            });
        }
        Ok((1.0 - s).clamp(0.0, 1.0))
    }

    /// `Ψ(γ) = F_ud(γ) + ∫₀^∞ F_su(γ(x+γ+1)/x) f_ud(x+γ) dx`, a sum of
    /// positive parts that keeps relative accuracy when `Ψ` is small.
    pub fn psi_direct(&self, gamma: f64, snr: SnrPoint, mode: MobilityMode) -> Result<f64> {
        let sr = &self.scenario.sr;
        let inner = QuadratureSpec::new(1e-300, 1e-11, 4000)?;
        let outer = QuadratureSpec::new(1e-300, 1e-9, 4000)?;
        let f = |x: f64| -> f64 {
            if x <= 0.0 {
                return 0.0;
            }
            let y = gamma * (x + gamma + 1.0) / x;
            sr_sum_cdf_scaled(y, sr, snr.eta_s) * self.pdf_lambda_ud(x + gamma, snr.eta_u, mode, &inner).unwrap_or(f64::NAN)
        };
        let tail = integrate_semi_infinite(f, 0.0, &outer)?;
        Ok(self.cdf_lambda_ud(gamma, snr.eta_u, mode)? + tail)
    }

    /// High-SNR form `α^N γ^N/(N! η_s^N) + F_ud,asym(γ)` of `Ψ(γ)`.
    pub fn psi_asymptotic(&self, gamma: f64, snr: SnrPoint, mode: MobilityMode) -> Result<f64> {
        Ok(sr_sum_cdf_small(gamma, &self.scenario.sr, snr.eta_s) + self.cdf_lambda_ud_asymptotic(gamma, snr.eta_u, mode)?)
    }

    pub fn op_nc(&self, snr: SnrPoint, mode: MobilityMode) -> Result<OutageResult> {
        self.evaluate(OutageQuery {
            scheme: Scheme::Nc,
            mode,
            snr,
        })
    }

    pub fn op_mpc(&self, snr: SnrPoint, mode: MobilityMode) -> Result<OutageResult> {
        self.evaluate(OutageQuery {
            scheme: Scheme::Mpc,
            mode,
            snr,
        })
    }

    pub fn op_uc(&self, snr: SnrPoint, mode: MobilityMode) -> Result<OutageResult> {
        self.evaluate(OutageQuery {
            scheme: Scheme::Uc,
            mode,
            snr,
        })
    }

    /// Exact and asymptotic OP of one scheme/mode at one SNR point.
    pub fn evaluate(&self, q: OutageQuery) -> Result<OutageResult> {
        let s = &self.scenario;
        let m = s.relays as i32;
        let th1 = s.gamma_th1();
        let th2 = s.gamma_th2();
        let masses = hit_mass(&s.cache, q.scheme)?;

        let psi = self.psi(th1, q.snr, q.mode)?;
        let nc = psi.powi(m);
        let nc_asym = self.psi_asymptotic(th1, q.snr, q.mode)?.powi(m);

        let (cdf_th2, op_exact, op_asymptotic) = match q.scheme {
            Scheme::Nc => (f64::NAN, nc, nc_asym),
            Scheme::Mpc | Scheme::Uc => {
                let f = self.cdf_lambda_ud(th2, q.snr.eta_u, q.mode)?;
                let fa = self.cdf_lambda_ud_asymptotic(th2, q.snr.eta_u, q.mode)?;
                let (hit_exact, hit_asym) = if q.scheme == Scheme::Mpc {
                    (f.powi(m), fa.powi(m))
                } else {
                    (f, fa)
                };
                (
                    f,
                    hit_exact * masses.hit + nc * masses.miss,
                    hit_asym * masses.hit + nc_asym * masses.miss,
                )
            }
        };
        Ok(OutageResult {
            op_exact,
            op_asymptotic,
            psi,
            cdf_ud_at_th2: cdf_th2,
            hit_mass: masses.hit,
            miss_mass: masses.miss,
        })
    }

    /// Negative least-squares slope of `log₁₀(asymptotic OP)` against
    /// `log₁₀ η` over `window_db`, sampled every 2.5 dB (at least 5 points).
    /// The window slides down in 10 dB steps while the OP underflows.
    pub fn diversity_order(&self, scheme: Scheme, mode: MobilityMode, window_db: (f64, f64)) -> Result<f64> {
        let (mut lo, mut hi) = window_db;
        if !(hi > lo) {
            return Err(Error::domain("diversity_order", format!("empty window [{lo}, {hi}]")));
        }
        for _ in 0..20 {
            let count = (((hi - lo) / 2.5).round() as usize + 1).max(5);
            let mut xs = Vec::with_capacity(count);
            let mut ys = Vec::with_capacity(count);
            let mut underflow = false;
            for i in 0..count {
                let db = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                let snr = self.scenario.snr(db)?;
                let op = self.evaluate(OutageQuery { scheme, mode, snr })?.op_asymptotic;
                if !(op > f64::MIN_POSITIVE) || !op.is_finite() {
                    underflow = true;
                    break;
                }
                xs.push(db / 10.0);
                ys.push(op.log10());
            }
            if !underflow {
                return Ok(-ls_slope(&xs, &ys));
            }
            warn!("asymptotic OP underflows in [{lo}, {hi}] dB; shifting the fit window down by 10 dB");
            lo -= 10.0;
            hi -= 10.0;
        }
        Err(Error::domain("diversity_order", "asymptotic OP underflows at every window"))
    }
}
