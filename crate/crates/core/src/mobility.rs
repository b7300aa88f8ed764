//! UAV position processes inside the cylinder of radius `R` and height `H`
//! centred above the ground user.
//!
//! Two deployments are modelled:
//!
//! * **fully 3D** (mixed mobility): vertical random-waypoint legs with a
//!   random dwell at each waypoint; while dwelling the UAV random-walks in the
//!   horizontal plane.
//! * **fixed height**: altitude pinned to `H`, horizontal random walk only.
//!
//! Alongside the samplers this module carries the closed-form steady-state
//! densities of the altitude, horizontal range and UAV-to-user distance that
//! the outage analysis integrates against.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{integrate_finite, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityMode {
    #[serde(rename = "fully3d", alias = "fully_3d")]
    Fully3D,
    FixedHeight,
}

impl MobilityMode {
    pub const ALL: [MobilityMode; 2] = [MobilityMode::Fully3D, MobilityMode::FixedHeight];

    pub fn as_str(self) -> &'static str {
        match self {
            MobilityMode::Fully3D => "fully3d",
            MobilityMode::FixedHeight => "fixed_height",
        }
    }
}

impl std::str::FromStr for MobilityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fully3d" | "fully_3d" | "3d" => Ok(MobilityMode::Fully3D),
            "fixed_height" | "fixedheight" | "fixed" => Ok(MobilityMode::FixedHeight),
            other => Err(Error::config("sweep.modes", format!("unknown mobility mode `{other}`"))),
        }
    }
}

/// What happens when a horizontal step would leave the disk of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRule {
    /// Reject the step and keep the current position for this slot.
    #[default]
    StayPut,
    /// Redraw the displacement until the new position is inside.
    Resample,
    /// Mirror the overshoot radially back into the disk.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    /// Cylinder height `H` in metres.
    pub height: f64,
    /// Cylinder radius `R` in metres.
    pub radius: f64,
    /// Maximum horizontal displacement per move, `R'`.
    pub max_step: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Long-run fraction of time spent dwelling, `p_s`.
    pub stay_probability: f64,
    pub slot_duration: f64,
    pub boundary: BoundaryRule,
}

impl Default for MobilityParams {
    fn default() -> Self {
        let mut p = Self {
            height: 80.0,
            radius: 100.0,
            max_step: 40.0,
            v_min: 0.1,
            v_max: 30.0,
            tau_min: 0.0,
            tau_max: 0.0,
            stay_probability: 0.5,
            slot_duration: 1.0,
            boundary: BoundaryRule::StayPut,
        };
        p.derive_dwell_range();
        p
    }
}

impl MobilityParams {
    pub fn validate(&self) -> Result<()> {
        let h = self.height;
        let r = self.radius;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config("fleet.H", format!("height {h} must be positive")));
        }
        if !(r > h && r.is_finite()) {
            return Err(Error::config("fleet.H", format!("height {h} must be below the radius {r} (H < R)")));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::config("fleet.R_prime", "maximum step must be positive"));
        }
        if !(self.v_min > 0.0 && self.v_min < self.v_max && self.v_max.is_finite()) {
            return Err(Error::config("fleet.v_min", "velocities must satisfy 0 < v_min < v_max"));
        }
        if !(self.tau_min >= 0.0 && self.tau_min <= self.tau_max) {
            return Err(Error::config("fleet.tau_min", "dwell range must satisfy 0 <= tau_min <= tau_max"));
        }
        if !(0.0..=1.0).contains(&self.stay_probability) {
            return Err(Error::config("fleet.p_s", "stay probability must lie in [0, 1]"));
        }
        if !(self.slot_duration > 0.0 && self.slot_duration.is_finite()) {
            return Err(Error::config("fleet.slot_duration", "slot duration must be positive"));
        }
        Ok(())
    }

    /// Mean duration of a vertical leg, `ln(v_max/v_min)/(v_max-v_min) · H/3`.
    pub fn mean_movement_time(&self) -> f64 {
        (self.v_max / self.v_min).ln() / (self.v_max - self.v_min) * self.height / 3.0
    }

    pub fn mean_dwell_time(&self) -> f64 {
        0.5 * (self.tau_min + self.tau_max)
    }

    /// Centre a uniform dwell range on `p_s/(1-p_s) · E[T_m]` so the process
    /// realises the configured stay probability.
    pub fn derive_dwell_range(&mut self) {
        let ps = self.stay_probability;
        if ps >= 1.0 {
            self.tau_min = f64::INFINITY;
            self.tau_max = f64::INFINITY;
        } else {
            let mean = ps / (1.0 - ps) * self.mean_movement_time();
            self.tau_min = 0.0;
            self.tau_max = 2.0 * mean;
        }
    }

    /// Largest possible UAV-to-user distance, `sqrt(R² + H²)`.
    pub fn max_distance(&self) -> f64 {
        self.radius.hypot(self.height)
    }
}

/// Steady-state density of the altitude:
/// `p_s / H + (1 - p_s)(6x/H² - 6x²/H³)` on `[0, H]`.
pub fn altitude_pdf(x: f64, params: &MobilityParams) -> f64 {
    let h = params.height;
    if !(0.0..=h).contains(&x) {
        return 0.0;
    }
    let ps = params.stay_probability;
    ps / h + (1.0 - ps) * (6.0 * x / (h * h) - 6.0 * x * x / (h * h * h))
}

pub fn altitude_cdf(x: f64, params: &MobilityParams) -> f64 {
    let h = params.height;
    let u = (x / h).clamp(0.0, 1.0);
    let ps = params.stay_probability;
    ps * u + (1.0 - ps) * (3.0 * u * u - 2.0 * u * u * u)
}

/// Steady-state density of the horizontal range `‖z‖`, uniform over the disk.
pub fn range_pdf(z: f64, params: &MobilityParams) -> f64 {
    let r = params.radius;
    if !(0.0..=r).contains(&z) {
        return 0.0;
    }
    2.0 * z / (r * r)
}

pub fn range_cdf(z: f64, params: &MobilityParams) -> f64 {
    let u = (z / params.radius).clamp(0.0, 1.0);
    u * u
}

const CDF_GRID: usize = 4096;

/// Steady-state law of the UAV-to-user distance for one deployment mode,
/// with a tabulated CDF for inverse-transform sampling.
#[derive(Debug, Clone)]
pub struct DistanceDistribution {
    mode: MobilityMode,
    params: MobilityParams,
    lo: f64,
    hi: f64,
    cdf: Vec<f64>,
}

impl DistanceDistribution {
    pub fn new(mode: MobilityMode, params: MobilityParams) -> Result<Self> {
        params.validate()?;
        let (lo, hi) = match mode {
            MobilityMode::Fully3D => (0.0, params.max_distance()),
            MobilityMode::FixedHeight => (params.height, params.max_distance()),
        };
        let mut dist = Self {
            mode,
            params,
            lo,
            hi,
            cdf: Vec::new(),
        };
        dist.cdf = dist.tabulate()?;
        Ok(dist)
    }

    pub fn mode(&self) -> MobilityMode {
        self.mode
    }

    pub fn params(&self) -> &MobilityParams {
        &self.params
    }

    /// Support `[lo, hi]` of the distance.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Points where the density changes its analytic form; quadrature over the
    /// support should split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.mode {
            MobilityMode::Fully3D => vec![0.0, self.params.height, self.params.radius, self.hi],
            MobilityMode::FixedHeight => vec![self.lo, self.hi],
        }
    }

    pub fn pdf(&self, w: f64) -> f64 {
        distance_pdf(w, self.mode, &self.params)
    }

    fn tabulate(&self) -> Result<Vec<f64>> {
        let spec = QuadratureSpec::new(1e-14, 1e-12, 200)?;
        let step = (self.hi - self.lo) / (CDF_GRID - 1) as f64;
        let mut cdf = Vec::with_capacity(CDF_GRID);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..CDF_GRID {
            let a = self.lo + (i - 1) as f64 * step;
            let b = if i == CDF_GRID - 1 { self.hi } else { self.lo + i as f64 * step };
            acc += integrate_finite(|w| self.pdf(w), a, b, &spec)?;
            cdf.push(acc);
        }
        // absorb the quadrature residue so that the table ends exactly at one
        for v in cdf.iter_mut() {
            *v /= acc;
        }
        Ok(cdf)
    }

    /// Tabulated CDF with linear interpolation between grid points.
    pub fn cdf(&self, w: f64) -> f64 {
        if w <= self.lo {
            return 0.0;
        }
        if w >= self.hi {
            return 1.0;
        }
        let pos = (w - self.lo) / (self.hi - self.lo) * (CDF_GRID - 1) as f64;
        let i = (pos.floor() as usize).min(CDF_GRID - 2);
        let frac = pos - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Inverse of the tabulated CDF (monotone piecewise-linear).
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // first grid index whose CDF is >= u
        let j = self.cdf.partition_point(|&c| c < u);
        let step = (self.hi - self.lo) / (CDF_GRID - 1) as f64;
        if j == 0 {
            return self.lo;
        }
        if j >= CDF_GRID {
            return self.hi;
        }
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        (self.lo + (j - 1) as f64 * step + frac * step).min(self.hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Steady-state density of the UAV-to-user distance `W`.
///
/// Fully 3D: the `p_s`-weighted mixture of the densities induced by a uniform
/// (dwelling) and a random-waypoint (moving) altitude, each combined with the
/// uniform-disk horizontal position. Fixed height: `2w/R²` on `[H, sqrt(R²+H²)]`.
pub fn distance_pdf(w: f64, mode: MobilityMode, params: &MobilityParams) -> f64 {
    let h = params.height;
    let r = params.radius;
    let top = params.max_distance();
    match mode {
        MobilityMode::FixedHeight => {
            if w >= h && w <= top {
                2.0 * w / (r * r)
            } else {
                0.0
            }
        }
        MobilityMode::Fully3D => {
            if !(0.0..=top).contains(&w) {
                return 0.0;
            }
            let ps = params.stay_probability;
            ps * distance_pdf_dwelling(w, h, r) + (1.0 - ps) * distance_pdf_moving(w, h, r)
        }
    }
}

fn distance_pdf_dwelling(w: f64, h: f64, r: f64) -> f64 {
    let r2 = r * r;
    if w < h {
        2.0 * w * w / (r2 * h)
    } else if w < r {
        2.0 * w / r2
    } else {
        let s = (w * w - r2).max(0.0).sqrt();
        2.0 * w / r2 - 2.0 * w * s / (r2 * h)
    }
}

fn distance_pdf_moving(w: f64, h: f64, r: f64) -> f64 {
    let r2 = r * r;
    if w < h {
        6.0 * w.powi(3) / (r2 * h * h) - 4.0 * w.powi(4) / (r2 * h.powi(3))
    } else if w < r {
        2.0 * w / r2
    } else {
        let e = (w * w - r2).max(0.0);
        2.0 * w / r2 - 6.0 * w * e / (r2 * h * h) + 4.0 * w * e.powf(1.5) / (r2 * h.powi(3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Dwelling { remaining: f64 },
    Moving { target: f64, velocity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    pub altitude: f64,
    pub position: [f64; 2],
    pub phase: Phase,
}

impl UavState {
    /// Horizontal range `‖z‖`.
    pub fn range(&self) -> f64 {
        self.position[0].hypot(self.position[1])
    }

    /// Distance to the ground user at the cylinder base centre.
    pub fn distance(&self) -> f64 {
        self.range().hypot(self.altitude)
    }

    /// A fresh state: uniform altitude (or `H` when pinned), uniform position
    /// in the disk, and a newly drawn dwell.
    pub fn initial<R: Rng + ?Sized>(params: &MobilityParams, mode: MobilityMode, rng: &mut R) -> Self {
        let altitude = match mode {
            MobilityMode::Fully3D => rng.random::<f64>() * params.height,
            MobilityMode::FixedHeight => params.height,
        };
        Self {
            altitude,
            position: uniform_in_disk(params.radius, rng),
            phase: Phase::Dwelling {
                remaining: draw_dwell(params, rng),
            },
        }
    }
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let rho = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    [rho * theta.cos(), rho * theta.sin()]
}

fn draw_dwell<R: Rng + ?Sized>(params: &MobilityParams, rng: &mut R) -> f64 {
    if params.tau_max.is_infinite() {
        return f64::INFINITY;
    }
    params.tau_min + (params.tau_max - params.tau_min) * rng.random::<f64>()
}

fn horizontal_move<R: Rng + ?Sized>(position: [f64; 2], params: &MobilityParams, rng: &mut R) -> [f64; 2] {
    let r = params.radius;
    let propose = |rng: &mut R| {
        let u = uniform_in_disk(params.max_step, rng);
        [position[0] + u[0], position[1] + u[1]]
    };
    let inside = |p: [f64; 2]| p[0].hypot(p[1]) <= r;
    match params.boundary {
        BoundaryRule::StayPut => {
            let next = propose(rng);
            if inside(next) {
                next
            } else {
                position
            }
        }
        BoundaryRule::Resample => loop {
            let next = propose(rng);
            if inside(next) {
                break next;
            }
        },
        BoundaryRule::Reflect => {
            let next = propose(rng);
            let norm = next[0].hypot(next[1]);
            if norm <= r {
                next
            } else {
                let folded = (2.0 * r - norm).max(0.0);
                [next[0] * folded / norm, next[1] * folded / norm]
            }
        }
    }
}

/// Advance one UAV by one slot.
///
/// The vertical process runs in continuous time and is observed at slot
/// boundaries: a leg that reaches its waypoint mid-slot clamps at the target
/// and the remainder of the slot is spent dwelling (and possibly starting the
/// next leg). A UAV that starts the slot dwelling makes a horizontal move with
/// probability `p_s`. In fixed-height mode only the horizontal rule runs.
pub fn step<R: Rng + ?Sized>(state: &UavState, params: &MobilityParams, mode: MobilityMode, rng: &mut R) -> UavState {
    let mut next = *state;
    let dwelling = matches!(state.phase, Phase::Dwelling { .. }) || mode == MobilityMode::FixedHeight;
    if dwelling && rng.random::<f64>() < params.stay_probability {
        next.position = horizontal_move(state.position, params, rng);
    }
    if mode == MobilityMode::FixedHeight {
        next.altitude = params.height;
        return next;
    }

    let mut budget = params.slot_duration;
    loop {
        match next.phase {
            Phase::Dwelling { remaining } => {
                if remaining > budget {
                    next.phase = Phase::Dwelling {
                        remaining: remaining - budget,
                    };
                    break;
                }
                budget -= remaining;
                let target = rng.random::<f64>() * params.height;
                let velocity = params.v_min + (params.v_max - params.v_min) * rng.random::<f64>();
                next.phase = Phase::Moving { target, velocity };
            }
            Phase::Moving { target, velocity } => {
                let gap = target - next.altitude;
                let needed = gap.abs() / velocity;
                if needed > budget {
                    next.altitude += gap.signum() * velocity * budget;
                    break;
                }
                budget -= needed;
                next.altitude = target;
                next.phase = Phase::Dwelling {
                    remaining: draw_dwell(params, rng),
                };
            }
        }
    }
    next.altitude = next.altitude.clamp(0.0, params.height);
    next
}

/// Sample one steady-state distance by inverse transform on the tabulated CDF.
pub fn sample_steady_distance<R: Rng + ?Sized>(dist: &DistanceDistribution, rng: &mut R) -> f64 {
    dist.sample(rng)
}
