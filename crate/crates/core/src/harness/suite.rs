//! Suites of reductions over generated instances, with reports.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{generate_instance, Instance, InstanceSpec};
use crate::bodies::NormSpec;
use crate::error::{Error, Result};
use crate::reductions::{
    cvp_via_sieve2, cvp_via_sieve_q, exact_oracle, svp_via_cvp2, svp_via_cvp_q, Mode, ReductionConfig,
    ReductionResult, DEFAULT_MAX_BUDGET,
};
use crate::rng::stream;

const TAG_INSTANCE: u64 = 31;

/// CSV header of the run summary.
pub const CSV_COLUMNS: [&str; 9] = [
    "instance_id",
    "mode",
    "n",
    "norm",
    "epsilon",
    "seed",
    "factor",
    "runtime_ms",
    "status",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub suite: String,
    pub instances: Vec<InstanceSpec>,
    pub modes: Vec<Mode>,
    pub epsilon: f64,
    /// Each instance runs once per seed.
    pub seeds: Vec<u64>,
    /// Seed of the instance generator.
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default)]
    pub repetition_budget: Option<usize>,
    #[serde(default = "default_max_budget")]
    pub max_budget: usize,
    #[serde(default = "default_oracle_rank")]
    pub oracle_rank_limit: usize,
}

fn default_max_budget() -> usize {
    DEFAULT_MAX_BUDGET
}

fn default_oracle_rank() -> usize {
    6
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        for s in &self.instances {
            s.validate()?;
        }
        if !self.instances.is_empty() && (self.modes.is_empty() || self.seeds.is_empty()) {
            return Err(Error::validation("a suite with instances needs at least one mode and one seed"));
        }
        for s in &self.instances {
            for m in &self.modes {
                if m.uses_q() && s.norm_q.is_none() {
                    return Err(Error::validation(format!("mode {m} needs normQ on every instance spec")));
                }
            }
        }
        ReductionConfig {
            epsilon: self.epsilon,
            repetition_budget: self.repetition_budget,
            max_budget: self.max_budget,
            ..Default::default()
        }
        .validate()
    }

    /// Named presets.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-figure-2-analogue" => Ok(ExperimentConfig {
                suite: name.into(),
                instances: (4..=6)
                    .map(|n| InstanceSpec {
                        n,
                        bound: 5,
                        norm: NormSpec::linf(),
                        norm_q: None,
                        target: false,
                        count: 3,
                    })
                    .collect(),
                modes: vec![Mode::SvpCvp2],
                epsilon: 0.25,
                seeds: (0..5).collect(),
                instance_seed: 2,
                repetition_budget: Some(8),
                max_budget: DEFAULT_MAX_BUDGET,
                oracle_rank_limit: 6,
            }),
            other => Err(Error::validation(format!("unknown suite preset {other:?}"))),
        }
    }
}

/// One reduction run. Records are deterministic given the config; timings
/// live in [`Report::runtimes_ms`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub mode: Mode,
    pub n: usize,
    pub norm: String,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(rename = "achievedFactor")]
    pub achieved_factor: Option<f64>,
    pub value: Option<f64>,
    pub optimum: Option<f64>,
    pub trace_digest: Option<String>,
    /// `ok`, `failed` (budget or tolerance) or `invalid`.
    pub status: String,
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mode: Mode,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_factor: Option<f64>,
    pub p90_factor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    /// Wall-clock time of each record, in the same order.
    pub runtimes_ms: Vec<u64>,
    pub aggregates: Vec<Aggregate>,
    pub environment: Environment,
}

/// Nearest-rank percentile of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Per-mode statistics, recomputable from the records alone.
pub fn aggregate(records: &[RunRecord], modes: &[Mode]) -> Vec<Aggregate> {
    modes
        .iter()
        .map(|&mode| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.mode == mode).collect();
            let successes = runs.iter().filter(|r| r.status == "ok").count();
            let mut factors: Vec<f64> = runs.iter().filter_map(|r| r.achieved_factor).filter(|f| f.is_finite()).collect();
            factors.sort_by(f64::total_cmp);
            Aggregate {
                mode,
                runs: runs.len(),
                successes,
                success_rate: if runs.is_empty() { 0.0 } else { successes as f64 / runs.len() as f64 },
                median_factor: percentile(&factors, 0.5),
                p90_factor: percentile(&factors, 0.9),
            }
        })
        .collect()
}

/// Runs one reduction on an instance.
pub fn run_instance(instance: &Instance, mode: Mode, config: &ReductionConfig) -> Result<ReductionResult> {
    let basis = instance.lattice()?;
    let body = instance.body()?;
    let q = || {
        instance
            .body_q()?
            .ok_or_else(|| Error::validation(format!("mode {mode} needs normQ")))
    };
    let target = || {
        instance
            .target_values()?
            .ok_or_else(|| Error::validation(format!("mode {mode} needs a target")))
    };
    match mode {
        Mode::SvpCvp2 => svp_via_cvp2(&basis, &body, config, &exact_oracle),
        Mode::SvpCvpQ => svp_via_cvp_q(&basis, &body, &q()?, config, &exact_oracle),
        Mode::CvpSieve2 => cvp_via_sieve2(&basis, &target()?, &body, config),
        Mode::CvpSieveQ => cvp_via_sieve_q(&basis, &target()?, &body, &q()?, config),
    }
}

/// The generated instances of a suite, with ids `spec-index`.
pub fn suite_instances(config: &ExperimentConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (si, spec) in config.instances.iter().enumerate() {
        let needs_target = spec.target || config.modes.iter().any(|m| !m.is_svp());
        let spec = InstanceSpec {
            target: needs_target,
            ..spec.clone()
        };
        for k in 0..spec.count {
            let mut rng = stream(config.instance_seed, &[TAG_INSTANCE, si as u64, k as u64]);
            out.push(generate_instance(&spec, Some(format!("s{si}-n{}-{k}", spec.n)), &mut rng)?);
        }
    }
    Ok(out)
}

/// Executes every (instance, mode, seed) run; failures are recorded, never
/// propagated.
pub fn run_suite(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let instances = suite_instances(config)?;
    let jobs: Vec<(&Instance, Mode, u64)> = instances
        .iter()
        .flat_map(|inst| {
            config
                .modes
                .iter()
                .flat_map(move |&m| config.seeds.iter().map(move |&s| (inst, m, s)))
        })
        .collect();
    let results: Vec<(RunRecord, u64)> = jobs
        .par_iter()
        .map(|&(inst, mode, seed)| {
            let rc = ReductionConfig {
                epsilon: config.epsilon,
                repetition_budget: config.repetition_budget,
                max_budget: config.max_budget,
                seed,
                oracle_rank_limit: config.oracle_rank_limit,
                ..Default::default()
            };
            let start = Instant::now();
            let outcome = run_instance(inst, mode, &rc);
            let ms = start.elapsed().as_millis() as u64;
            let mut rec = RunRecord {
                instance_id: inst.id.clone().unwrap_or_default(),
                mode,
                n: inst.rank,
                norm: inst.norm.label(),
                epsilon: config.epsilon,
                seed,
                achieved_factor: None,
                value: None,
                optimum: None,
                trace_digest: None,
                status: "ok".into(),
                message: None,
            };
            match outcome {
                Ok(r) => {
                    rec.achieved_factor = r.achieved_factor;
                    rec.value = Some(r.value);
                    rec.optimum = r.optimum;
                    rec.trace_digest = Some(r.trace_digest);
                }
                Err(e) => {
                    rec.status = if e.is_validation() { "invalid" } else { "failed" }.into();
                    rec.message = Some(e.to_string());
                }
            }
            (rec, ms)
        })
        .collect();
    let (records, runtimes_ms): (Vec<RunRecord>, Vec<u64>) = results.into_iter().unzip();
    Ok(Report {
        suite: config.suite.clone(),
        aggregates: aggregate(&records, &config.modes),
        config: config.clone(),
        records,
        runtimes_ms,
        environment: Environment::current(),
    })
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV summary with the fixed [`CSV_COLUMNS`].
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for (r, ms) in self.records.iter().zip(&self.runtimes_ms) {
            w.write_record([
                r.instance_id.clone(),
                r.mode.to_string(),
                r.n.to_string(),
                r.norm.clone(),
                r.epsilon.to_string(),
                r.seed.to_string(),
                r.achieved_factor.map(|f| f.to_string()).unwrap_or_default(),
                ms.to_string(),
                r.status.clone(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Failure(e.to_string()))
    }

    /// Writes `<stem>.json` and `<stem>.csv` next to each other.
    pub fn write(&self, json_path: &Path) -> Result<()> {
        std::fs::write(json_path, self.to_json()?)?;
        std::fs::write(json_path.with_extension("csv"), self.to_csv()?)?;
        Ok(())
    }
}
