//! Cross-validation suite: closed forms against oracles, simulation against
//! analysis, structural orderings, sampler fidelity and reproducibility.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{Analyzer, OutageQuery};
use crate::caching::{CacheLayout, Scheme};
use crate::channel::{sample_nakagami_power, sample_sr_power, sr_sum_cdf_scaled, NakagamiParams, SrFadingParams};
use crate::config::Config;
use crate::error::Result;
use crate::experiment::{csv_bytes, enough_events, run};
use crate::mobility::{altitude_cdf, range_cdf, MobilityMode};
use crate::scenario::Scenario;
use crate::simulator::{default_workers, sample_trial_states, simulate, SimPlan};
use crate::specfun::reg_lower_gamma_unchecked;
use crate::stats::ks_distance;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {} ({}): {} [{:.1} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub workers: usize,
    /// Seeds of the simulation agreement check.
    pub seeds: u64,
    pub trials: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            workers: default_workers(),
            seeds: 20,
            trials: 100_000,
        }
    }
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Result<CheckOutcome> {
    let t0 = Instant::now();
    let (passed, detail) = f()?;
    Ok(CheckOutcome {
        id,
        name,
        passed,
        detail,
        elapsed: t0.elapsed(),
    })
}

/// Reference scenario with `N` antennas, satellite severity `m_su`,
/// terrestrial severity `m_ud` and Zipf skew `lambda`.
pub fn scenario(n: u32, m_su: u32, m_ud: u32, lambda: f64) -> Result<Scenario> {
    let mut s = Scenario::default();
    s.sr = SrFadingParams::new(m_su, s.sr.b, s.sr.omega, n)?;
    s.nakagami = NakagamiParams::new(m_ud, s.nakagami.omega, s.nakagami.alpha)?;
    s.cache = CacheLayout::new(s.cache.catalogue, s.cache.capacity, s.relays, lambda)?;
    Ok(s)
}

fn grid_0_70() -> Vec<f64> {
    (0..=35).map(|i| 2.0 * i as f64).collect()
}

fn op_exact(a: &Analyzer, scheme: Scheme, mode: MobilityMode, db: f64) -> Result<f64> {
    let snr = a.scenario().snr(db)?;
    Ok(a.evaluate(OutageQuery { scheme, mode, snr })?.op_exact)
}

/// Closed-form first-hop/second-hop outage term against the double-integral
/// oracle.
pub fn psi_oracle_equivalence() -> Result<CheckOutcome> {
    timed(1, "psi closed form vs oracle", || {
        let t0 = Instant::now();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (n, m_su, m_ud) in [(1, 2, 1), (2, 2, 1), (2, 2, 2)] {
            let a = Analyzer::new(scenario(n, m_su, m_ud, 2.0)?)?;
            let th1 = a.scenario().gamma_th1();
            for mode in MobilityMode::ALL {
                for db in [10.0, 20.0, 30.0] {
                    let snr = a.scenario().snr(db)?;
                    let closed = a.psi(th1, snr, mode)?;
                    let oracle = a.psi_oracle(th1, snr, mode)?;
                    worst = worst.max((closed / oracle - 1.0).abs());
                    count += 1;
                }
            }
        }
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            worst < 1e-4 && secs < 60.0,
            format!("{count} points, max relative difference {worst:.3e} (limit 1e-4), {secs:.1} s (limit 60 s)"),
        ))
    })
}

/// Monte Carlo against exact OP at 10/20/30 dB over many seeds.
pub fn simulation_agreement(opts: &CheckOptions) -> Result<CheckOutcome> {
    timed(2, "simulation vs analysis", || {
        let t0 = Instant::now();
        let s = Scenario::default();
        let a = Analyzer::new(s.clone())?;
        let dbs = [10.0, 20.0, 30.0];
        let snrs = dbs.iter().map(|&db| s.snr(db)).collect::<Result<Vec<_>>>()?;
        let mut exact = Vec::new();
        for mode in MobilityMode::ALL {
            for scheme in Scheme::ALL {
                for &db in &dbs {
                    exact.push((mode, scheme, db, op_exact(&a, scheme, mode, db)?));
                }
            }
        }
        let mut compared = 0u64;
        let mut agreed = 0u64;
        let mut skipped = 0u64;
        for seed in 1..=opts.seeds {
            let plan = SimPlan {
                trials: opts.trials,
                seed,
                workers: opts.workers,
                ..SimPlan::default()
            };
            let table = simulate(&s, &plan, &MobilityMode::ALL, &Scheme::ALL, &snrs)?;
            for &(mode, scheme, db, p) in &exact {
                if !enough_events(p, plan.trials) {
                    skipped += 1;
                    continue;
                }
                let idx = dbs.iter().position(|&d| d == db).expect("grid point");
                let est = table.estimate(mode, scheme, idx).expect("simulated cell");
                compared += 1;
                if (est.op_hat - p).abs() <= 3.0 * est.stderr {
                    agreed += 1;
                }
            }
        }
        let rate = if compared > 0 { agreed as f64 / compared as f64 } else { 0.0 };
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            compared > 0 && rate >= 0.95 && secs < 600.0,
            format!(
                "{agreed}/{compared} comparisons within 3 stderr ({:.1}%, limit 95%), {skipped} gated out, {} seeds x {} trials, {secs:.0} s",
                100.0 * rate,
                opts.seeds,
                opts.trials
            ),
        ))
    })
}

/// High-SNR slopes of the asymptotic OP.
pub fn diversity_orders() -> Result<CheckOutcome> {
    timed(3, "diversity orders", || {
        let cases = [
            (Scheme::Nc, (2, 2, 1), 2.0),
            (Scheme::Mpc, (2, 2, 1), 2.0),
            (Scheme::Uc, (2, 2, 1), 1.0),
            (Scheme::Mpc, (2, 2, 2), 4.0),
            (Scheme::Uc, (2, 2, 2), 2.0),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (scheme, (n, m_su, m_ud), want) in cases {
            let a = Analyzer::new(scenario(n, m_su, m_ud, 2.0)?)?;
            for mode in MobilityMode::ALL {
                let d = a.diversity_order(scheme, mode, (50.0, 70.0))?;
                ok &= (d - want).abs() <= 0.05;
                parts.push(format!("{scheme}{{{n},{m_su},{m_ud}}}/{}={d:.3}", mode.as_str()));
            }
        }
        Ok((ok, parts.join(" ")))
    })
}

fn violations(pairs: &[(f64, f64, f64)]) -> Vec<f64> {
    // relative slack for round-off where both sides coincide
    pairs
        .iter()
        .filter(|&&(_, lo, hi)| lo > hi * (1.0 + 1e-9))
        .map(|&(db, _, _)| db)
        .collect()
}

/// MPC never loses to NC or UC; UC falls behind NC at high SNR.
pub fn scheme_ordering() -> Result<CheckOutcome> {
    timed(4, "scheme ordering", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for lambda in [0.7, 2.0] {
            let a = Analyzer::new(scenario(2, 2, 1, lambda)?)?;
            for mode in MobilityMode::ALL {
                let rows = grid_0_70()
                    .par_iter()
                    .map(|&db| {
                        Ok((
                            db,
                            op_exact(&a, Scheme::Nc, mode, db)?,
                            op_exact(&a, Scheme::Mpc, mode, db)?,
                            op_exact(&a, Scheme::Uc, mode, db)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let vs_nc = violations(&rows.iter().map(|r| (r.0, r.2, r.1)).collect::<Vec<_>>());
                let vs_uc = violations(&rows.iter().map(|r| (r.0, r.2, r.3)).collect::<Vec<_>>());
                let high: Vec<_> = rows.iter().filter(|r| r.0 >= 50.0).map(|r| (r.0, r.1, r.3)).collect();
                let uc_worse = violations(&high);
                ok &= vs_nc.is_empty() && vs_uc.is_empty() && uc_worse.is_empty();
                parts.push(format!(
                    "lambda={lambda}/{}: MPC>NC at {vs_nc:?}, MPC>UC at {vs_uc:?}, UC<NC (>=50 dB) at {uc_worse:?}",
                    mode.as_str()
                ));
            }
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Full 3D mobility never loses to fixed height.
pub fn mode_ordering() -> Result<CheckOutcome> {
    timed(5, "mode ordering", || {
        let a = Analyzer::new(Scenario::default())?;
        let mut ok = true;
        let mut parts = Vec::new();
        for scheme in Scheme::ALL {
            let rows = grid_0_70()
                .par_iter()
                .map(|&db| {
                    Ok((
                        db,
                        op_exact(&a, scheme, MobilityMode::Fully3D, db)?,
                        op_exact(&a, scheme, MobilityMode::FixedHeight, db)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let bad = violations(&rows);
            let gap = rows.last().map_or(1.0, |r| r.2 / r.1);
            ok &= bad.is_empty();
            parts.push(format!("{scheme}: violations {bad:?}, fixed/3D at 70 dB {gap:.3}"));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Popularity skew helps MPC more than UC.
pub fn lambda_sensitivity() -> Result<CheckOutcome> {
    timed(6, "lambda sensitivity", || {
        let low = Analyzer::new(scenario(2, 2, 2, 0.7)?)?;
        let high = Analyzer::new(scenario(2, 2, 2, 2.0)?)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for mode in MobilityMode::ALL {
            let ratio = |scheme| -> Result<f64> { Ok(op_exact(&low, scheme, mode, 30.0)? / op_exact(&high, scheme, mode, 30.0)?) };
            let (mpc, uc) = (ratio(Scheme::Mpc)?, ratio(Scheme::Uc)?);
            ok &= mpc > uc;
            parts.push(format!("{}: MPC ratio - 1 = {:.3e}, UC ratio - 1 = {:.3e}", mode.as_str(), mpc - 1.0, uc - 1.0));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Sampler output against the analytic laws.
pub fn distribution_fidelity(opts: &CheckOptions) -> Result<CheckOutcome> {
    timed(7, "distribution fidelity", || {
        const N: usize = 100_000;
        let s = Scenario::default();
        let a = Analyzer::new(s.clone())?;
        let p = s.mobility;
        let plan = SimPlan {
            trials: N as u64,
            seed: 7,
            workers: opts.workers,
            ..SimPlan::default()
        };
        let mut results: Vec<(String, f64)> = Vec::new();
        for mode in MobilityMode::ALL {
            // one relay per trial keeps the sample count at N
            let states: Vec<_> = sample_trial_states(&s, &plan, mode)?.into_iter().step_by(s.relays).collect();
            if mode == MobilityMode::Fully3D {
                let mut alt: Vec<f64> = states.iter().map(|u| u.altitude).collect();
                results.push(("altitude".into(), ks_distance(&mut alt, |x| altitude_cdf(x, &p))));
            }
            let mut range: Vec<f64> = states.iter().map(|u| u.range()).collect();
            results.push((format!("range/{}", mode.as_str()), ks_distance(&mut range, |z| range_cdf(z, &p))));
            let dist = a.distance(mode);
            let mut w: Vec<f64> = states.iter().map(|u| u.distance()).collect();
            results.push((format!("distance/{}", mode.as_str()), ks_distance(&mut w, |x| dist.cdf(x))));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [1, 2] {
            let sr = SrFadingParams::new(s.sr.m, s.sr.b, s.sr.omega, n)?;
            let mut xs: Vec<f64> = (0..N).map(|_| sample_sr_power(&sr, &mut rng)).collect();
            results.push((format!("SR N={n}"), ks_distance(&mut xs, |x| sr_sum_cdf_scaled(x, &sr, 1.0))));
        }
        for m in [1, 2] {
            let nak = NakagamiParams::new(m, 1.0, 2.0)?;
            let mut xs: Vec<f64> = (0..N).map(|_| sample_nakagami_power(&nak, &mut rng)).collect();
            let k = m as f64;
            results.push((
                format!("Nakagami m={m}"),
                ks_distance(&mut xs, |x| reg_lower_gamma_unchecked(k, k * x / nak.omega)),
            ));
        }
        let ok = results.iter().all(|(_, d)| *d < 0.01);
        let detail = results.iter().map(|(k, d)| format!("{k}={d:.4}")).collect::<Vec<_>>().join(" ");
        Ok((ok, format!("KS distances (limit 0.01): {detail}")))
    })
}

/// Exact and asymptotic OP agree at 70 dB.
pub fn asymptotic_consistency() -> Result<CheckOutcome> {
    timed(8, "asymptotic consistency", || {
        let a = Analyzer::new(Scenario::default())?;
        let snr = a.scenario().snr(70.0)?;
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for scheme in Scheme::ALL {
            for mode in MobilityMode::ALL {
                let r = a.evaluate(OutageQuery { scheme, mode, snr })?;
                let dev = (r.op_exact / r.op_asymptotic - 1.0).abs();
                worst = worst.max(dev);
                parts.push(format!("{scheme}/{}={dev:.2e}", mode.as_str()));
            }
        }
        Ok((worst < 0.1, format!("|exact/asymptotic - 1| (limit 0.1): {}", parts.join(" "))))
    })
}

/// Byte-identical CSV across repeated runs and worker counts.
pub fn determinism() -> Result<CheckOutcome> {
    timed(9, "determinism", || {
        let base = Config::default().to_spec()?;
        let mut outputs = Vec::new();
        for workers in [1, 1, 8] {
            let mut spec = base.clone();
            spec.sim.workers = workers;
            outputs.push(csv_bytes(&run(&spec)?.rows)?);
        }
        let ok = outputs[0] == outputs[1] && outputs[0] == outputs[2];
        Ok((
            ok,
            format!(
                "default sweep, {} bytes; repeat run {}, 8 workers {}",
                outputs[0].len(),
                if outputs[0] == outputs[1] { "identical" } else { "DIFFERS" },
                if outputs[0] == outputs[2] { "identical" } else { "DIFFERS" }
            ),
        ))
    })
}

/// Every check, in order.
pub fn run_all(opts: &CheckOptions) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        psi_oracle_equivalence()?,
        simulation_agreement(opts)?,
        diversity_orders()?,
        scheme_ordering()?,
        mode_ordering()?,
        lambda_sensitivity()?,
        distribution_fidelity(opts)?,
        asymptotic_consistency()?,
        determinism()?,
    ])
}
