//! Seeded Monte Carlo experiments: elimination rates, growth of the number of
//! surviving edges, and soundness against the exact oracle.

mod config;
mod method;

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{EdgeCount, ExperimentConfig, ExperimentKind};
pub use method::{hyperbolas_empty, Criterion, Method, Witness};

use crate::error::{Error, Result};
use crate::instance::{DensitySpec, Instance};
use crate::oracle::{ExactOracle, DEFAULT_TOL};
use crate::rng::{derive_seed, seeded};

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The `k`-th unordered pair `(i, j)`, `i < j`, in the order
/// `(0,1), (0,2), (1,2), (0,3), ...`.
pub fn unrank_pair(k: usize) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0).floor() as usize;
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    (k - j * (j - 1) / 2, j)
}

/// `amount` distinct pairs of `0..n`, uniformly without replacement.
pub fn sample_pairs(n: usize, amount: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = pair_count(n);
    let amount = amount.min(total);
    if amount == total {
        return (0..total).map(unrank_pair).collect();
    }
    let mut rng = seeded(seed);
    index::sample(&mut rng, total, amount)
        .into_iter()
        .map(unrank_pair)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub criterion: Criterion,
    pub mode: String,
    pub edges_checked: u64,
    pub edges_eliminated: u64,
    pub rate: f64,
    /// Rate-scaled estimate of surviving edges in the complete graph.
    pub remaining: f64,
    pub seed: u64,
    pub wall_ms: u64,
}

impl ExperimentRow {
    pub fn std_error(&self) -> f64 {
        if self.edges_checked == 0 {
            return 0.0;
        }
        (self.rate * (1.0 - self.rate) / self.edges_checked as f64).sqrt()
    }
}

/// One unit of work: an instance and how many of its edges to evaluate.
struct Job {
    trial: usize,
    part: usize,
    edges: usize,
}

fn jobs_for(n: usize, trials: usize, edges: EdgeCount) -> Vec<Job> {
    let total = pair_count(n);
    let mut jobs = Vec::new();
    for trial in 0..trials {
        match edges {
            EdgeCount::All => jobs.push(Job { trial, part: 0, edges: total }),
            // More edges than one instance has: spread over fresh instances.
            EdgeCount::Sample(k) => {
                let mut left = k;
                let mut part = 0;
                while left > 0 {
                    let take = left.min(total);
                    jobs.push(Job { trial, part, edges: take });
                    left -= take;
                    part += 1;
                }
            }
        }
    }
    jobs
}

fn instance_seed(master: u64, n: usize, trial: usize, part: usize) -> u64 {
    derive_seed(master, &[n as u64, trial as u64, part as u64, 0])
}

fn sampling_seed(master: u64, n: usize, trial: usize, part: usize) -> u64 {
    derive_seed(master, &[n as u64, trial as u64, part as u64, 1])
}

/// Counts of `(checked, eliminated)` for `method` at size `n`.
pub fn run_rate(
    method: &Method,
    n: usize,
    trials: usize,
    edges: EdgeCount,
    density: &DensitySpec,
    seed: u64,
) -> Result<(u64, u64)> {
    method.check_size(n)?;
    let jobs = jobs_for(n, trials, edges);
    let counts: Vec<(u64, u64)> = jobs
        .par_iter()
        .map(|job| -> Result<(u64, u64)> {
            let inst = Instance::generate(n, density, instance_seed(seed, n, job.trial, job.part))?;
            let pairs = sample_pairs(n, job.edges, sampling_seed(seed, n, job.trial, job.part));
            let eliminated = pairs
                .par_iter()
                .map(|&(i, j)| method.evaluate(&inst, i, j).map(|w| w.is_some() as u64))
                .sum::<Result<u64>>()?;
            Ok((pairs.len() as u64, eliminated))
        })
        .collect::<Result<_>>()?;
    Ok(counts
        .into_iter()
        .fold((0, 0), |(c, e), (c2, e2)| (c + c2, e + e2)))
}

pub fn elimination_rate_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    let method = config.method();
    config
        .n_values
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let (checked, eliminated) =
                run_rate(&method, n, config.trials, config.edges, &config.density, config.seed)?;
            let rate = if checked == 0 { 0.0 } else { eliminated as f64 / checked as f64 };
            Ok(ExperimentRow {
                n,
                criterion: config.criterion,
                mode: method.label(n),
                edges_checked: checked,
                edges_eliminated: eliminated,
                rate,
                remaining: (1.0 - rate) * pair_count(n) as f64,
                seed: config.seed,
                wall_ms: if config.timing { start.elapsed().as_millis() as u64 } else { 0 },
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub rows: Vec<ExperimentRow>,
    /// Least-squares slope of `ln(remaining)` against `ln(n)`.
    pub slope: f64,
}

impl GrowthReport {
    pub fn per_n(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.remaining / r.n as f64).collect()
    }

    pub fn per_n2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.remaining / (r.n as f64 * r.n as f64)).collect()
    }

    /// `max / min - 1` of `remaining / n` over the rows.
    pub fn per_n_spread(&self) -> f64 {
        let v = self.per_n();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min - 1.0
    }
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidConfig("slope needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidConfig("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("slope needs distinct n values".into()));
    }
    Ok(sxy / sxx)
}

pub fn remaining_edges_growth(config: &ExperimentConfig) -> Result<GrowthReport> {
    let mut distinct = config.n_values.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidConfig("growth needs at least 3 distinct n values".into()));
    }
    let rate_config = ExperimentConfig {
        experiment: ExperimentKind::Rates,
        n_values: distinct,
        ..config.clone()
    };
    let rows = elimination_rate_experiment(&rate_config)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.remaining).collect();
    let slope = log_log_slope(&xs, &ys)?;
    Ok(GrowthReport { rows, slope })
}

/// An eliminated edge that the exact oracle says is used by an optimal tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub n: usize,
    pub instance_seed: u64,
    pub method: String,
    pub i: usize,
    pub j: usize,
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub instances: usize,
    pub edges_checked: u64,
    /// Eliminations per method label, in the order the methods were given.
    pub eliminated: Vec<(String, u64)>,
    pub violations: Vec<Violation>,
}

impl SoundnessReport {
    pub fn total_eliminated(&self) -> u64 {
        self.eliminated.iter().map(|(_, c)| c).sum()
    }
}

/// Runs every method on all edges of `trials` random instances (trial `t`
/// has `n_values[t % len]` points) and checks each elimination exactly.
pub fn soundness_experiment(
    trials: usize,
    n_values: &[usize],
    methods: &[Method],
    density: &DensitySpec,
    seed: u64,
) -> Result<SoundnessReport> {
    if trials == 0 {
        return Ok(SoundnessReport::default());
    }
    if n_values.is_empty() {
        return Err(Error::InvalidConfig("n_values must not be empty".into()));
    }
    let oracle = ExactOracle::default();
    for &n in n_values {
        if !(5..=oracle.max_n).contains(&n) {
            return Err(Error::SizeOutOfRange { n, min: 5, max: oracle.max_n });
        }
        for m in methods {
            m.check_size(n)?;
        }
    }
    let per_trial: Vec<(u64, Vec<u64>, Vec<Violation>)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<_> {
            let n = n_values[trial % n_values.len()];
            let iseed = instance_seed(seed, n, trial, 0);
            let inst = Instance::generate(n, density, iseed)?;
            let best = oracle.optimal_tour(&inst)?;
            let mut counts = vec![0u64; methods.len()];
            let mut violations = Vec::new();
            let pairs = sample_pairs(n, pair_count(n), 0);
            for &(i, j) in &pairs {
                for (k, m) in methods.iter().enumerate() {
                    let Some(w) = m.evaluate(&inst, i, j)? else {
                        continue;
                    };
                    counts[k] += 1;
                    let forced = oracle.optimal_tour_with_edge(&inst, i, j)?;
                    if !(forced.length > best.length + DEFAULT_TOL) {
                        violations.push(Violation {
                            trial,
                            n,
                            instance_seed: iseed,
                            method: format!("{}:{}", m.criterion.name(), m.label(n)),
                            i,
                            j,
                            witness: w.to_string(),
                        });
                    }
                }
            }
            Ok((pairs.len() as u64, counts, violations))
        })
        .collect::<Result<_>>()?;
    let mut report = SoundnessReport {
        instances: trials,
        eliminated: methods
            .iter()
            .map(|m| (format!("{}:{}", m.criterion.name(), m.label(n_values[0])), 0))
            .collect(),
        ..Default::default()
    };
    for (checked, counts, violations) in per_trial {
        report.edges_checked += checked;
        for (slot, c) in report.eliminated.iter_mut().zip(counts) {
            slot.1 += c;
        }
        report.violations.extend(violations);
    }
    Ok(report)
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    n: usize,
    criterion: &'a str,
    mode: &'a str,
    edges_checked: u64,
    edges_eliminated: u64,
    rate: String,
    seed: u64,
    wall_ms: u64,
}

pub const CSV_HEADER: &str = "n,criterion,mode,edges_checked,edges_eliminated,rate,seed,wall_ms";

pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            n: r.n,
            criterion: r.criterion.name(),
            mode: &r.mode,
            edges_checked: r.edges_checked,
            edges_eliminated: r.edges_eliminated,
            rate: format!("{:.6}", r.rate),
            seed: r.seed,
            wall_ms: r.wall_ms,
        })?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[ExperimentRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn summary_table(rows: &[ExperimentRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:>4}  {:<22} {:>10} {:>10} {:>9} {:>8} {:>14} {:>10}",
        "n", "crit", "mode", "checked", "elim", "rate%", "se%", "remaining", "rem/n"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>8}  {:>4}  {:<22} {:>10} {:>10} {:>9.3} {:>8.3} {:>14.1} {:>10.2}",
            r.n,
            r.criterion.name(),
            r.mode,
            r.edges_checked,
            r.edges_eliminated,
            100.0 * r.rate,
            100.0 * r.std_error(),
            r.remaining,
            r.remaining / r.n as f64
        );
    }
    out
}
