//! Sweep orchestration: analytic grid, Monte Carlo table, CSV and summary.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{Analyzer, OutageQuery};
use crate::caching::{hit_mass, Scheme};
use crate::config::ExperimentSpec;
use crate::error::{Error, Result};
use crate::mobility::MobilityMode;
use crate::simulator::{simulate, SimTable};

pub const CSV_HEADER: [&str; 11] = [
    "snr_db",
    "scheme",
    "mode",
    "op_exact",
    "op_asymptotic",
    "op_sim",
    "sim_stderr",
    "n_trials",
    "hit_mass",
    "gamma_th1",
    "gamma_th2",
];

/// Minimum expected outage (and success) count for a simulated point to
/// take part in comparisons.
pub const MIN_EVENTS: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub snr_db: f64,
    pub scheme: Scheme,
    pub mode: MobilityMode,
    pub op_exact: Option<f64>,
    pub op_asymptotic: Option<f64>,
    pub op_sim: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub n_trials: Option<u64>,
    pub hit_mass: f64,
    pub gamma_th1: f64,
    pub gamma_th2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Ordered by (scheme, mode, snr).
    pub rows: Vec<Row>,
    pub summary: Vec<String>,
}

/// Whether a simulated point at `p` over `trials` is well populated on both
/// sides of the binomial.
pub fn enough_events(p: f64, trials: u64) -> bool {
    let n = trials as f64;
    n * p >= MIN_EVENTS && n * (1.0 - p) >= MIN_EVENTS
}

fn prob(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.16e}"))
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format!("{}", r.snr_db),
            r.scheme.as_str().to_string(),
            r.mode.as_str().to_string(),
            prob(r.op_exact),
            prob(r.op_asymptotic),
            prob(r.op_sim),
            prob(r.sim_stderr),
            r.n_trials.map_or_else(String::new, |n| n.to_string()),
            prob(Some(r.hit_mass)),
            format!("{}", r.gamma_th1),
            format!("{}", r.gamma_th2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_bytes(rows: &[Row]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(buf)
}

pub fn write_csv_file(rows: &[Row], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_csv(rows, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Exact and asymptotic OP for every (mode, snr, scheme), indexed like the
/// simulator table.
fn analytic_grid(spec: &ExperimentSpec, analyzer: &Analyzer) -> Result<Vec<(f64, f64)>> {
    let cells: Vec<(MobilityMode, f64)> = spec
        .modes
        .iter()
        .flat_map(|&m| spec.snr_db.iter().map(move |&db| (m, db)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.sim.workers)
        .build()
        .map_err(|e| Error::config("sim.workers", e.to_string()))?;
    let per_cell: Vec<Result<Vec<(f64, f64)>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(mode, db)| {
                let snr = analyzer.scenario().snr(db)?;
                spec.schemes
                    .iter()
                    .map(|&scheme| {
                        let r = analyzer.evaluate(OutageQuery { scheme, mode, snr })?;
                        Ok((r.op_exact, r.op_asymptotic))
                    })
                    .collect()
            })
            .collect()
    });
    let mut out = Vec::with_capacity(cells.len() * spec.schemes.len());
    for c in per_cell {
        out.extend(c?);
    }
    Ok(out)
}

/// Run the sweep described by `spec`.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let scenario = &spec.scenario;
    let want_analysis = spec.outputs.exact || spec.outputs.asymptotic;
    let analyzer = if want_analysis { Some(Analyzer::new(scenario.clone())?) } else { None };
    let analytic = match &analyzer {
        Some(a) => Some(analytic_grid(spec, a)?),
        None => None,
    };
    let sim = if spec.outputs.simulated {
        let snrs = spec.snr_db.iter().map(|&db| scenario.snr(db)).collect::<Result<Vec<_>>>()?;
        Some(simulate(scenario, &spec.sim, &spec.modes, &spec.schemes, &snrs)?)
    } else {
        None
    };

    let n_snr = spec.snr_db.len();
    let n_sch = spec.schemes.len();
    let mut rows = Vec::with_capacity(n_snr * n_sch * spec.modes.len());
    for (si, &scheme) in spec.schemes.iter().enumerate() {
        let mass = hit_mass(&scenario.cache, scheme)?.hit;
        for (mi, &mode) in spec.modes.iter().enumerate() {
            for (ni, &db) in spec.snr_db.iter().enumerate() {
                let a = analytic.as_ref().map(|g| g[(mi * n_snr + ni) * n_sch + si]);
                let est = sim.as_ref().and_then(|t| t.estimate(mode, scheme, ni));
                rows.push(Row {
                    snr_db: db,
                    scheme,
                    mode,
                    op_exact: a.filter(|_| spec.outputs.exact).map(|x| x.0),
                    op_asymptotic: a.filter(|_| spec.outputs.asymptotic).map(|x| x.1),
                    op_sim: est.map(|e| e.op_hat),
                    sim_stderr: est.map(|e| e.stderr),
                    n_trials: est.map(|e| e.trials),
                    hit_mass: mass,
                    gamma_th1: scenario.gamma_th1(),
                    gamma_th2: scenario.gamma_th2(),
                });
            }
        }
    }

    let summary = summarise(spec, analyzer.as_ref(), &rows, sim.as_ref())?;
    Ok(Report { rows, summary })
}

fn find(rows: &[Row], scheme: Scheme, mode: MobilityMode, db: f64) -> Option<&Row> {
    rows.iter().find(|r| r.scheme == scheme && r.mode == mode && r.snr_db == db)
}

/// Check `lhs ≤ rhs` at every SNR point where both values exist.
fn ordering_verdict(
    spec: &ExperimentSpec,
    rows: &[Row],
    value: impl Fn(&Row) -> Option<f64>,
    lhs: (Scheme, MobilityMode),
    rhs: (Scheme, MobilityMode),
) -> Option<String> {
    let mut checked = 0;
    let mut violations = Vec::new();
    for &db in &spec.snr_db {
        let (Some(a), Some(b)) = (find(rows, lhs.0, lhs.1, db), find(rows, rhs.0, rhs.1, db)) else {
            continue;
        };
        let (Some(x), Some(y)) = (value(a), value(b)) else { continue };
        checked += 1;
        // relative slack for round-off when both sides coincide
        if x > y * (1.0 + 1e-9) + 1e-300 {
            violations.push(db);
        }
    }
    (checked > 0).then(|| {
        if violations.is_empty() {
            format!("ok at {checked} points")
        } else {
            format!("VIOLATED at {} of {checked} points (first at {} dB)", violations.len(), violations[0])
        }
    })
}

fn summarise(spec: &ExperimentSpec, analyzer: Option<&Analyzer>, rows: &[Row], sim: Option<&SimTable>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if let Some(a) = analyzer {
        let (lo, hi) = spec.diversity_window;
        for &scheme in &spec.schemes {
            for &mode in &spec.modes {
                let d = a.diversity_order(scheme, mode, spec.diversity_window)?;
                out.push(format!("diversity {scheme} {mode:<12} [{lo}, {hi}] dB: {d:.4}", mode = mode.as_str()));
            }
        }
    }

    let mut pairs = Vec::new();
    for &mode in &spec.modes {
        for (l, r) in [(Scheme::Mpc, Scheme::Nc), (Scheme::Mpc, Scheme::Uc)] {
            if spec.schemes.contains(&l) && spec.schemes.contains(&r) {
                pairs.push(((l, mode), (r, mode)));
            }
        }
    }
    if spec.modes.len() == 2 {
        for &scheme in &spec.schemes {
            pairs.push(((scheme, MobilityMode::Fully3D), (scheme, MobilityMode::FixedHeight)));
        }
    }
    let label = |(s, m): (Scheme, MobilityMode)| format!("{s}/{}", m.as_str());
    for &(l, r) in &pairs {
        if let Some(v) = ordering_verdict(spec, rows, |row| row.op_exact, l, r) {
            out.push(format!("ordering exact {} <= {}: {v}", label(l), label(r)));
        }
        let trials = spec.sim.trials;
        let gated = |row: &Row| row.op_sim.filter(|&p| enough_events(p, trials));
        if let Some(v) = ordering_verdict(spec, rows, gated, l, r) {
            out.push(format!("ordering simulated {} <= {}: {v}", label(l), label(r)));
        }
    }

    if sim.is_some() && spec.outputs.exact {
        let mut compared = 0;
        let mut agreed = 0;
        for r in rows {
            let (Some(p), Some(hat), Some(se)) = (r.op_exact, r.op_sim, r.sim_stderr) else { continue };
            if !enough_events(p, spec.sim.trials) {
                continue;
            }
            compared += 1;
            if (hat - p).abs() <= 3.0 * se {
                agreed += 1;
            }
        }
        out.push(format!(
            "simulation within 3 stderr of exact: {agreed}/{compared} points with >= {MIN_EVENTS} expected events"
        ));
    }
    if let Some(t) = sim {
        for &scheme in &spec.schemes {
            if let Some(f) = t.hit_frequency(scheme) {
                let mass = hit_mass(&spec.scenario.cache, scheme)?.hit;
                out.push(format!("hit frequency {scheme}: {f:.5} (analytic {mass:.5})"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn spec(text: &str) -> ExperimentSpec {
        Config::from_toml(text).unwrap().to_spec().unwrap()
    }

    #[test]
    fn single_point_exact_only() {
        let s = spec("[sweep]\nsnr_db_start = 30\nsnr_db_stop = 30\nschemes = [\"MPC\"]\nmodes = [\"fully3d\"]\nsimulated = false\n");
        let report = run(&s).unwrap();
        assert_eq!(report.rows.len(), 1);
        let text = String::from_utf8(csv_bytes(&report.rows).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 11);
        assert_eq!(&cells[..3], &["30", "MPC", "fully3d"]);
        assert!(!cells[3].is_empty());
        assert!(cells[4..8].iter().all(|c| c.is_empty()));
        assert_eq!(&cells[9..], &["3", "1"]);
    }

    #[test]
    fn rows_are_ordered_and_complete() {
        let s = spec("[sweep]\nsnr_db_step = 35\nasymptotic = true\n[sim]\ntrials = 2000\nwarmup_steps = 200\n");
        let report = run(&s).unwrap();
        assert_eq!(report.rows.len(), 3 * 3 * 2);
        let keys: Vec<_> = report.rows.iter().map(|r| (r.scheme, r.mode, r.snr_db as i64)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert!(report.rows.iter().all(|r| r.op_exact.is_some() && r.op_asymptotic.is_some() && r.n_trials == Some(2000)));
        assert!(report.summary.iter().any(|l| l.starts_with("diversity MPC")));
    }

    #[test]
    fn probabilities_round_trip_through_csv() {
        let s = spec("[sweep]\nsnr_db_start = 20\nsnr_db_stop = 20\nsimulated = false\n");
        let report = run(&s).unwrap();
        let text = String::from_utf8(csv_bytes(&report.rows).unwrap()).unwrap();
        for (line, row) in text.lines().skip(1).zip(&report.rows) {
            let v: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            assert_eq!(v, row.op_exact.unwrap());
        }
    }
}
