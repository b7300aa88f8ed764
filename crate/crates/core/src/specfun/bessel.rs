//! Integer-order Bessel functions: `J_n` of the first kind for the satellite
//! beam pattern and the modified `K_n` of the second kind for the outage
//! closed forms.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT_J: f64 = 12.0;
const SERIES_LIMIT_K: f64 = 2.0;

/// Bessel function of the first kind for the orders the beam gain needs (1 and 3).
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order != 1 && order != 3 {
        return Err(Error::domain("bessel_j", format!("order {order} is not supported (1 or 3)")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j", format!("x = {x} must be finite and non-negative")));
    }
    Ok(if x < SERIES_LIMIT_J {
        j_series(order, x)
    } else {
        j_hankel(order, x)
    })
}

fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = (0..n).fold(1.0, |acc, k| acc * half / (k + 1) as f64);
    let mut sum = term;
    for k in 1..200u32 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion, truncated at its smallest term.
fn j_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60u32 {
        if term.abs() > prev {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        prev = term.abs();
        if prev < 1e-17 {
            break;
        }
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (FRAC_2_PI / x).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Modified Bessel function of the second kind `K_n(x)`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}

/// Exponentially scaled `e^x K_n(x)`, finite across the full positive range.
pub fn bessel_k_scaled(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_k", format!("x = {x} must be positive and finite")));
    }
    let (k0, k1) = if x <= SERIES_LIMIT_K {
        let (k0, k1) = k01_series(x);
        let scale = x.exp();
        (k0 * scale, k1 * scale)
    } else {
        k01_steed(x)
    };
    Ok(upward(order, x, k0, k1))
}

/// Natural log of `K_n(x)`; stays finite where `K_n` itself would overflow
/// (tiny `x`, high order) or underflow (large `x`).
pub fn ln_bessel_k(order: u32, x: f64) -> Result<f64> {
    let scaled = bessel_k_scaled(order, x)?;
    if scaled.is_finite() && scaled > 0.0 {
        return Ok(scaled.ln() - x);
    }
    // Leading small-argument term: K_n(x) ~ (n-1)!/2 (2/x)^n.
    let n = order.max(1);
    Ok(super::gamma::ln_factorial(n - 1) - std::f64::consts::LN_2 + n as f64 * (2.0 / x).ln())
}

fn upward(order: u32, x: f64, k0: f64, k1: f64) -> f64 {
    match order {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for v in 1..order {
                let next = prev + 2.0 * v as f64 / x * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Ascending series for `K_0`, `K_1` (small argument, unscaled).
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    // psi(k+1) = -gamma + H_k
    let mut harmonic = 0.0;
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k! (k+1)!)
    for k in 0..100u32 {
        if k > 0 {
            let kf = k as f64;
            harmonic += 1.0 / kf;
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += t0 * psi_k1;
        s1 += t1 * (psi_k1 + psi_k2);
        if t0 < 1e-18 * i0 {
            break;
        }
    }
    i1 *= 0.5 * x;
    let k0 = -log_half * i0 + s0;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for the scaled pair
/// `e^x K_0(x)`, `e^x K_1(x)`, valid for `x >= 2`.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000u32 {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route for `J_n`: the trapezoid rule on Bessel's integral
    /// `J_n(x) = (1/2π) ∫_0^{2π} cos(nτ - x sin τ) dτ` converges geometrically
    /// because the integrand is smooth and periodic.
    fn j_oracle(n: u32, x: f64) -> f64 {
        let m = 512;
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|i| {
                let tau = i as f64 * h;
                (n as f64 * tau - x * tau.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    /// Independent route for `K_v`: `∫_0^∞ e^{-x cosh t} cosh(v t) dt`, truncated
    /// where the integrand is below 1e-300 and summed with a fine trapezoid
    /// (the integrand is smooth and decays double-exponentially).
    fn k_oracle(v: u32, x: f64) -> f64 {
        let h = 1e-3;
        let mut sum = 0.5 * (-x).exp();
        let mut t: f64 = h;
        loop {
            let f = (-x * t.cosh() + (v as f64 * t).cosh().ln()).exp();
            sum += f;
            if f < 1e-300 || t > 50.0 {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j1_first_zero() {
        assert!(bessel_j(1, 3.831_705_970_207_512).unwrap().abs() < 1e-9);
        // same point through the power series oracle
        assert!(j_series(1, 3.831_705_970_207_512).abs() < 1e-9);
    }

    #[test]
    fn j_matches_integral_oracle_on_grid() {
        for &n in &[1u32, 3] {
            let mut x = 0.0;
            while x <= 50.0 {
                let got = bessel_j(n, x).unwrap();
                let want = j_oracle(n, x);
                assert!((got - want).abs() < 1e-10, "J_{n}({x}): {got} vs {want}");
                x += 0.173;
            }
        }
    }

    #[test]
    fn j_rejects_other_orders() {
        assert!(bessel_j(2, 1.0).is_err());
        assert!(bessel_j(1, -1.0).is_err());
    }

    #[test]
    fn k_reference_values_against_integral_oracle() {
        let k0 = bessel_k(0, 1.0).unwrap();
        let k1 = bessel_k(1, 1.0).unwrap();
        assert!((k0 - k_oracle(0, 1.0)).abs() / k0 < 1e-9);
        assert!((k1 - k_oracle(1, 1.0)).abs() / k1 < 1e-9);
        assert!((k0 - 0.421_024_438_240_708_3).abs() < 1e-10);
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-10);
    }

    #[test]
    fn k_matches_integral_oracle_across_branches() {
        for v in 0..=6u32 {
            for &x in &[1e-3, 0.05, 0.5, 1.9, 2.0, 2.1, 3.7, 9.0, 30.0, 120.0] {
                let got = bessel_k(v, x).unwrap();
                let want = k_oracle(v, x);
                assert!(((got - want) / want).abs() < 1e-9, "K_{v}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn k_recurrence_residual() {
        for v in 1..=6u32 {
            for &x in &[0.01, 0.1, 1.0, 10.0, 100.0] {
                let km = bessel_k_scaled(v - 1, x).unwrap();
                let k = bessel_k_scaled(v, x).unwrap();
                let kp = bessel_k_scaled(v + 1, x).unwrap();
                let residual = (kp - km - 2.0 * v as f64 / x * k).abs();
                assert!(residual < 1e-9 * kp, "v={v} x={x}");
            }
        }
        let r = bessel_k(2, 1.0).unwrap() - bessel_k(0, 1.0).unwrap() - 2.0 * bessel_k(1, 1.0).unwrap();
        assert!(r.abs() < 1e-9 * bessel_k(2, 1.0).unwrap());
    }

    #[test]
    fn k_large_argument_limit() {
        for v in 0..4u32 {
            let x = 500.0;
            let lim = bessel_k_scaled(v, x).unwrap() * (2.0 * x / PI).sqrt();
            assert!((lim - 1.0).abs() < 0.01);
        }
        // unscaled value still representable at the top of the range
        assert!(bessel_k(0, 700.0).unwrap() > 0.0);
    }

    #[test]
    fn ln_k_is_finite_at_extremes() {
        let tiny = ln_bessel_k(4, 1e-90).unwrap();
        assert!(tiny.is_finite() && tiny > 800.0);
        let big = ln_bessel_k(2, 5000.0).unwrap();
        assert!(big.is_finite() && big < -4000.0);
        let mid = ln_bessel_k(1, 1.0).unwrap();
        assert!((mid - 0.601_907_230_197_234_6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn k_domain() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -2.0).is_err());
    }
}
