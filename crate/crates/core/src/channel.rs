//! Satellite link budget, fading laws and the amplify-and-forward SNR.
//!
//! All SNRs are normalised by the noise power, so `η_s` and `η_u` are the
//! linear transmit-SNR scales of the two hops.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{beta, bessel_j, factorial, ln_factorial, pochhammer, reg_lower_gamma_unchecked};

pub const BOLTZMANN: f64 = 1.38e-23;
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One aggregated term `c_g x^{g-1} e^{-θx}` of the shadowed-Rician sum pdf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrTerm {
    pub shape: u32,
    pub coef: f64,
}

/// Shadowed-Rician fading of an `N`-antenna satellite link, with the derived
/// series constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SrFadingParams {
    pub m: u32,
    pub b: f64,
    pub omega: f64,
    pub antennas: u32,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    terms: Vec<SrTerm>,
}

impl SrFadingParams {
    pub fn new(m: u32, b: f64, omega: f64, antennas: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("satellite.m_su", "must be a positive integer"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::config("satellite.b_su", format!("{b} must be positive")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::config("satellite.Omega_su", format!("{omega} must be non-negative")));
        }
        if antennas == 0 {
            return Err(Error::config("satellite.N", "need at least one antenna"));
        }
        let two_b = 2.0 * b;
        let mf = m as f64;
        let alpha = (two_b * mf / (two_b * mf + omega)).powi(m as i32) / two_b;
        let beta_u = 1.0 / two_b;
        let delta = omega / (two_b * (two_b * mf + omega));
        if !(beta_u > delta) {
            return Err(Error::config("satellite.Omega_su", "requires beta_u > delta_u"));
        }
        let mut p = Self {
            m,
            b,
            omega,
            antennas,
            alpha,
            beta: beta_u,
            delta,
            terms: Vec::new(),
        };
        p.terms = p.aggregate_terms();
        Ok(p)
    }

    /// Accepts a real severity so configuration input can be checked; the
    /// series only terminate for integers.
    pub fn from_real(m: f64, b: f64, omega: f64, antennas: u32) -> Result<Self> {
        if !(m >= 1.0) || m.fract() != 0.0 || m > 64.0 {
            return Err(Error::Unsupported(format!(
                "satellite.m_su = {m}: the shadowed-Rician series needs an integer severity in 1..=64"
            )));
        }
        Self::new(m as u32, b, omega, antennas)
    }

    /// `ζ(κ) = (-1)^κ (1-m)_κ δ^κ / (κ!)²`
    pub fn zeta(&self, kappa: u32) -> f64 {
        let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
        let k_fact = factorial(kappa);
        sign * pochhammer(1.0 - self.m as f64, kappa) * self.delta.powi(kappa as i32) / (k_fact * k_fact)
    }

    /// Sums `Ξ(N)` over all index tuples `i ∈ {0..m-1}^N` sharing the same
    /// exponent `g = Σi + N`.
    fn aggregate_terms(&self) -> Vec<SrTerm> {
        let n = self.antennas as usize;
        let m = self.m as usize;
        let max_g = n * m;
        let mut coefs = vec![0.0; max_g + 1];
        let zetas: Vec<f64> = (0..self.m).map(|k| self.zeta(k)).collect();
        let mut idx = vec![0usize; n];
        loop {
            let mut xi = self.alpha.powi(n as i32);
            for &i in &idx {
                xi *= zetas[i];
            }
            let mut partial = 0usize;
            for j in 1..n {
                partial += idx[j - 1];
                // B(Σ_{l≤j} i_l + j, i_{j+1} + 1)
                xi *= beta((partial + j) as f64, (idx[j] + 1) as f64).expect("positive arguments");
            }
            let g = idx.iter().sum::<usize>() + n;
            coefs[g] += xi;

            let mut pos = 0;
            loop {
                if pos == n {
                    return coefs
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, c)| c != 0.0)
                        .map(|(g, coef)| SrTerm { shape: g as u32, coef })
                        .collect();
                }
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn terms(&self) -> &[SrTerm] {
        &self.terms
    }

    /// Decay rate `β_u - δ_u` of the unscaled power.
    pub fn decay(&self) -> f64 {
        self.beta - self.delta
    }

    pub fn mean_power(&self) -> f64 {
        self.antennas as f64 * (2.0 * self.b + self.omega)
    }
}

/// Density of `‖g‖²`.
pub fn sr_sum_pdf(x: f64, p: &SrFadingParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let decay = p.decay();
    p.terms()
        .iter()
        .map(|t| {
            if x == 0.0 {
                if t.shape == 1 {
                    t.coef
                } else {
                    0.0
                }
            } else {
                t.coef * ((t.shape - 1) as f64 * x.ln() - decay * x).exp()
            }
        })
        .sum()
}

/// CDF of `Λ_su = η_s ‖g‖²`, as a sum of regularised lower incomplete gamma
/// functions so that small arguments keep full relative accuracy.
pub fn sr_sum_cdf_scaled(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let theta = p.decay() / eta_s;
    let decay = p.decay();
    let cdf: f64 = p
        .terms()
        .iter()
        .map(|t| {
            let g = t.shape;
            // c_g (g-1)!/(β-δ)^g P(g, Θx)
            let weight = (t.coef.ln() + ln_factorial(g - 1) - g as f64 * decay.ln()).exp();
            weight * reg_lower_gamma_unchecked(g as f64, theta * x)
        })
        .sum();
    cdf.clamp(0.0, 1.0)
}

/// Survival `1 - F` of `Λ_su` via the finite Poisson sums, without cancellation.
pub fn sr_sum_survival_scaled(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let theta = p.decay() / eta_s;
    let decay = p.decay();
    let tx = theta * x;
    p.terms()
        .iter()
        .map(|t| {
            let g = t.shape;
            let weight = (t.coef.ln() + ln_factorial(g - 1) - g as f64 * decay.ln()).exp();
            let poisson: f64 = (0..g)
                .map(|k| (k as f64 * tx.ln() - tx - ln_factorial(k)).exp())
                .sum();
            weight * poisson
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Leading small-argument term `α^N x^N / (N! η_s^N)` of the first-hop CDF.
pub fn sr_sum_cdf_small(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    let n = p.antennas as i32;
    p.alpha.powi(n) * (x / eta_s).powi(n) / factorial(p.antennas)
}

/// One draw of `‖g‖²`: per antenna, a complex Gaussian scatter component of
/// power `2b` plus a line-of-sight amplitude whose power is Gamma(m, Ω/m).
pub fn sample_sr_power<R: Rng + ?Sized>(p: &SrFadingParams, rng: &mut R) -> f64 {
    let los = if p.omega > 0.0 {
        Some(Gamma::new(p.m as f64, p.omega / p.m as f64).expect("validated parameters"))
    } else {
        None
    };
    let s = p.b.sqrt();
    (0..p.antennas)
        .map(|_| {
            let a = los.as_ref().map_or(0.0, |g| g.sample(rng).sqrt());
            let re: f64 = s * rng.sample::<f64, _>(StandardNormal) + a;
            let im: f64 = s * rng.sample::<f64, _>(StandardNormal);
            re * re + im * im
        })
        .sum()
}

/// Nakagami-m terrestrial link with distance-dependent path loss `W^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    pub m: u32,
    pub omega: f64,
    pub alpha: f64,
}

impl NakagamiParams {
    pub fn new(m: u32, omega: f64, alpha: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("terrestrial.m_ud", "must be a positive integer"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::config("terrestrial.Omega_ud", format!("{omega} must be positive")));
        }
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return Err(Error::config("terrestrial.alpha", format!("path-loss exponent {alpha} must be at least 2")));
        }
        Ok(Self { m, omega, alpha })
    }

    pub fn gamma(&self) -> Gamma<f64> {
        Gamma::new(self.m as f64, self.omega / self.m as f64).expect("validated parameters")
    }
}

pub fn sample_nakagami_power<R: Rng + ?Sized>(p: &NakagamiParams, rng: &mut R) -> f64 {
    p.gamma().sample(rng)
}

/// `Λ_su Λ_ud / (Λ_su + Λ_ud + 1)`
pub fn af_end_to_end_snr(lambda_su: f64, lambda_ud: f64) -> f64 {
    let prod = lambda_su * lambda_ud;
    if prod == 0.0 {
        return 0.0;
    }
    prod / (lambda_su + lambda_ud + 1.0)
}

/// Second-hop SNR `η_u w^{-α} |g|²`.
pub fn lambda_ud(eta_u: f64, w: f64, alpha: f64, gain: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::domain("lambda_ud", format!("distance {w} must be positive")));
    }
    Ok(eta_u * w.powf(-alpha) * gain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BeamPattern {
    /// `ϑ_u (J₁(ρ)/2ρ + 36 J₃(ρ)/ρ³)`
    #[default]
    Unsquared,
    /// `ϑ_u (J₁(ρ)/2ρ + 36 J₃(ρ)/ρ³)²`
    Squared,
}

/// Satellite downlink budget. Gains are in dB, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_s: f64,
    pub temperature: f64,
    pub bandwidth: f64,
    pub carrier: f64,
    pub distance: f64,
    pub theta_u_deg: f64,
    pub theta_3db_deg: f64,
    pub gain_s_db: f64,
    pub gain_u_db: f64,
    pub pattern: BeamPattern,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            p_s: 1.0,
            temperature: 300.0,
            bandwidth: 15e6,
            carrier: 2e9,
            distance: 35_786e3,
            theta_u_deg: 0.8,
            theta_3db_deg: 0.3,
            gain_s_db: 53.45,
            gain_u_db: 4.8,
            pattern: BeamPattern::Unsquared,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("satellite.P_s", self.p_s),
            ("satellite.T", self.temperature),
            ("satellite.W", self.bandwidth),
            ("satellite.f_c", self.carrier),
            ("satellite.d_u", self.distance),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("{v} must be positive")));
            }
        }
        for (key, v) in [("satellite.theta_u", self.theta_u_deg), ("satellite.theta_3dB", self.theta_3db_deg)] {
            if !(v > 0.0 && v < 90.0) {
                return Err(Error::config(key, format!("{v} degrees must lie in (0, 90)")));
            }
        }
        Ok(())
    }

    /// `ρ_u = 2.07123 sin θ_u / sin θ_3dB`
    pub fn rho(&self) -> f64 {
        2.07123 * self.theta_u_deg.to_radians().sin() / self.theta_3db_deg.to_radians().sin()
    }

    /// Beam gain towards the relays, linear.
    pub fn beam_gain(&self) -> Result<f64> {
        let bracket = beam_bracket(self.rho())?;
        let shaped = match self.pattern {
            BeamPattern::Unsquared => bracket,
            BeamPattern::Squared => bracket * bracket,
        };
        Ok(db_to_linear(self.gain_u_db) * shaped)
    }

    /// Free-space amplitude factor `c / (4π f_c d_u)`.
    pub fn free_space_amplitude(&self) -> f64 {
        SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * self.carrier * self.distance)
    }

    pub fn noise_power(&self) -> f64 {
        BOLTZMANN * self.temperature * self.bandwidth
    }

    /// First-hop SNR scale `η_s = P_s ϑ_s ϑ(θ_u) ℒ_su / (K_B T W)`.
    pub fn eta_s(&self) -> Result<f64> {
        let fsl = self.free_space_amplitude();
        Ok(self.p_s * db_to_linear(self.gain_s_db) * self.beam_gain()? / self.noise_power() * fsl * fsl)
    }
}

/// `J₁(ρ)/(2ρ) + 36 J₃(ρ)/ρ³`, equal to 1 at boresight.
pub fn beam_bracket(rho: f64) -> Result<f64> {
    if rho < 1e-4 {
        // series: 1/4 - ρ²/96 + 3/4 - ρ²/80 + O(ρ⁴)
        return Ok(1.0 - rho * rho * (1.0 / 96.0 + 1.0 / 80.0));
    }
    Ok(bessel_j(1, rho)? / (2.0 * rho) + 36.0 * bessel_j(3, rho)? / rho.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_finite, integrate_semi_infinite, QuadratureSpec};
    use crate::stats::ks_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn heavy(n: u32) -> SrFadingParams {
        SrFadingParams::new(2, 0.063, 0.0005, n).unwrap()
    }

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-13, 1e-11, 4000).unwrap()
    }

    #[test]
    fn heavy_shadowing_constants() {
        let p = heavy(1);
        assert!((p.alpha - 7.905_107_342_417_41).abs() < 1e-12);
        assert!((p.beta - 7.936_507_936_507_937).abs() < 1e-12);
        assert!((p.delta - 0.015_715_857_300_015_716).abs() < 1e-15);
    }

    #[test]
    fn non_integer_severity_is_unsupported() {
        assert!(matches!(SrFadingParams::from_real(2.5, 0.063, 0.0005, 1), Err(Error::Unsupported(_))));
        assert!(SrFadingParams::from_real(2.0, 0.063, 0.0005, 1).is_ok());
    }

    #[test]
    fn zeta_terminates_at_severity() {
        let p = heavy(1);
        assert_eq!(p.zeta(0), 1.0);
        assert_eq!(p.zeta(2), 0.0);
        assert!((p.zeta(1) - p.delta).abs() < 1e-18);
    }

    #[test]
    fn pdf_normalises_and_has_sr_mean() {
        for n in 1..=3 {
            let p = heavy(n);
            let mass = integrate_semi_infinite(|x| sr_sum_pdf(x, &p), 0.0, &tight()).unwrap();
            assert!((mass - 1.0).abs() < 1e-9, "N={n}: {mass}");
            let mean = integrate_semi_infinite(|x| x * sr_sum_pdf(x, &p), 0.0, &tight()).unwrap();
            assert!((mean - n as f64 * 0.1265).abs() < 1e-6, "N={n}: {mean}");
        }
    }

    #[test]
    fn single_antenna_pdf_matches_confluent_form() {
        // α e^{-βx} ₁F₁(m; 1; δx), the hypergeometric summed term by term
        let p = SrFadingParams::new(3, 0.126, 0.835, 1).unwrap();
        for x in [0.01, 0.3, 1.0, 2.5] {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 0..200 {
                let kf = k as f64;
                term *= (3.0 + kf) / ((kf + 1.0) * (kf + 1.0)) * p.delta * x;
                sum += term;
            }
            let oracle = p.alpha * (-p.beta * x).exp() * sum;
            assert!(((sr_sum_pdf(x, &p) - oracle) / oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn two_antenna_pdf_is_self_convolution() {
        let p1 = heavy(1);
        let p2 = heavy(2);
        for x in [0.05, 0.2, 0.7] {
            let conv = integrate_finite(|s| sr_sum_pdf(s, &p1) * sr_sum_pdf(x - s, &p1), 0.0, x, &tight()).unwrap();
            assert!(((sr_sum_pdf(x, &p2) - conv) / conv).abs() < 1e-9);
        }
    }

    #[test]
    fn scaled_cdf_is_a_cdf() {
        let p = heavy(2);
        let eta = 5.0;
        assert_eq!(sr_sum_cdf_scaled(0.0, &p, eta), 0.0);
        assert_eq!(sr_sum_cdf_scaled(f64::INFINITY, &p, eta), 1.0);
        let mut prev = 0.0;
        for i in 1..=200 {
            let x = i as f64 * 0.25;
            let c = sr_sum_cdf_scaled(x, &p, eta);
            assert!(c >= prev && c <= 1.0);
            prev = c;
        }
        assert!(prev > 0.999_999);
    }

    #[test]
    fn cdf_derivative_matches_scaled_pdf() {
        let p = heavy(2);
        let eta = 10.0;
        for x in [0.1, 0.5, 1.0, 3.0, 8.0] {
            let h = 1e-4 * x;
            let fd = (sr_sum_cdf_scaled(x + h, &p, eta) - sr_sum_cdf_scaled(x - h, &p, eta)) / (2.0 * h);
            let pdf = sr_sum_pdf(x / eta, &p) / eta;
            assert!(((fd - pdf) / pdf).abs() < 1e-5, "x={x}");
        }
    }

    #[test]
    fn cdf_and_survival_agree() {
        let p = heavy(3);
        for x in [1e-3, 0.1, 1.0, 10.0, 60.0] {
            let s = sr_sum_cdf_scaled(x, &p, 4.0) + sr_sum_survival_scaled(x, &p, 4.0);
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn small_argument_cdf() {
        for n in 1..=2 {
            let p = heavy(n);
            let eta = 1e3;
            let x = eta * 1e-4;
            let ratio = sr_sum_cdf_scaled(x, &p, eta) / sr_sum_cdf_small(x, &p, eta);
            assert!((ratio - 1.0).abs() < 0.05, "N={n}: {ratio}");
        }
    }

    #[test]
    fn sr_samples_match_pdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=2 {
            let p = heavy(n);
            let mut xs: Vec<f64> = (0..100_000).map(|_| sample_sr_power(&p, &mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            assert!((mean - p.mean_power()).abs() < 3.0 * (var / xs.len() as f64).sqrt());
            let d = ks_distance(&mut xs, |x| sr_sum_cdf_scaled(x, &p, 1.0));
            assert!(d < 0.01, "N={n} KS {d}");
        }
    }

    #[test]
    fn sr_without_los_is_gamma() {
        let p = SrFadingParams::new(2, 0.063, 0.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut xs: Vec<f64> = (0..100_000).map(|_| sample_sr_power(&p, &mut rng)).collect();
        // Gamma(2, 2b): 1 - e^{-y}(1 + y), y = x/2b
        let d = ks_distance(&mut xs, |x| {
            let y = x / 0.126;
            1.0 - (-y).exp() * (1.0 + y)
        });
        assert!(d < 0.01, "KS {d}");
    }

    #[test]
    fn nakagami_moments_and_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for m in 1..=2u32 {
            let p = NakagamiParams::new(m, 1.5, 2.0).unwrap();
            let n = 100_000;
            let mut xs: Vec<f64> = (0..n).map(|_| sample_nakagami_power(&p, &mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let true_var = 1.5 * 1.5 / m as f64;
            assert!((mean - 1.5).abs() < 3.0 * (true_var / n as f64).sqrt());
            // Var of the sample variance for Gamma(k, θ): (μ4 - σ⁴)/n, μ4 = 3σ⁴(1 + 2/k)
            let se_var = ((3.0 * (1.0 + 2.0 / m as f64) - 1.0) * true_var * true_var / n as f64).sqrt();
            assert!((var - true_var).abs() < 3.0 * se_var, "m={m}: {var}");
            let d = ks_distance(&mut xs, |x| reg_lower_gamma_unchecked(m as f64, m as f64 * x / 1.5));
            assert!(d < 0.01);
        }
    }

    #[test]
    fn af_snr_values_and_bound() {
        assert_eq!(af_end_to_end_snr(0.0, 7.0), 0.0);
        assert!((af_end_to_end_snr(10.0, 10.0) - 100.0 / 21.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..1_000_000 {
            let a = rng.random::<f64>() * 1e3;
            let b = rng.random::<f64>() * 1e3;
            let v = af_end_to_end_snr(a, b);
            assert!(v <= a.min(b));
            assert!(v <= a * b / (a + b) + 1e-12);
        }
    }

    #[test]
    fn lambda_ud_values() {
        assert_eq!(lambda_ud(5.0, 3.0, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(lambda_ud(5.0, 1.0, 2.0, 0.7).unwrap(), 3.5);
        assert!((lambda_ud(1e6, 100.0, 2.0, 1.0).unwrap() - 100.0).abs() < 1e-10);
        assert!(lambda_ud(1.0, 0.0, 2.0, 1.0).is_err());
    }

    /// J_n through Bessel's integral, trapezoid on a periodic integrand.
    fn j_integral(n: u32, x: f64) -> f64 {
        let m = 1024;
        (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn beam_bracket_values() {
        assert!((beam_bracket(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((beam_bracket(1e-3).unwrap() - 1.0).abs() < 1e-5);
        let b = LinkBudget::default();
        assert!((b.rho() - 5.523_125_773_007_363).abs() < 1e-9);
        let rho = b.rho();
        let oracle = j_integral(1, rho) / (2.0 * rho) + 36.0 * j_integral(3, rho) / rho.powi(3);
        assert!((beam_bracket(rho).unwrap() - oracle).abs() < 1e-9);
        assert!((oracle - 0.022_661_186_173_737_55).abs() < 1e-9);
    }

    #[test]
    fn link_budget_arithmetic() {
        let b = LinkBudget::default();
        assert!((b.free_space_amplitude() - 3.335_556_008_464_805e-10).abs() < 1e-21);
        assert!((b.noise_power() - 6.21e-14).abs() < 1e-27);
        let eta = b.eta_s().unwrap();
        assert!(((eta - 0.027_134_855_517_042_17) / eta).abs() < 1e-9);
        let doubled = LinkBudget { p_s: 2.0, ..b };
        assert!((doubled.eta_s().unwrap() - 2.0 * eta).abs() < 1e-15);
        let sq = LinkBudget {
            pattern: BeamPattern::Squared,
            ..b
        };
        assert!(((sq.eta_s().unwrap() - 6.149_080_126_691_621e-4) / 6.149e-4).abs() < 1e-8);
    }

    #[test]
    fn link_budget_validation() {
        let b = LinkBudget {
            theta_3db_deg: 95.0,
            ..LinkBudget::default()
        };
        assert!(b.validate().is_err());
        assert!(LinkBudget::default().validate().is_ok());
    }
}
