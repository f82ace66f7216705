use anyhow::{bail, Result};
use nhtopo::invariants::{invariant_z, invariant_z2, InvariantKind, InvariantOptions, InvariantReport};
use nhtopo::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const STATUS_OK: &str = "ok";
pub const STATUS_GAPLESS: &str = "gapless_or_critical";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub invariant: Option<i64>,
    pub quantization_error: Option<f64>,
    pub rank_plus: Option<usize>,
    pub rank_minus: Option<usize>,
    pub kramers_pairs: Option<usize>,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    fn failed(parameter: f64, e: &Error) -> Self {
        Self {
            parameter,
            invariant: None,
            quantization_error: None,
            rank_plus: None,
            rank_minus: None,
            kramers_pairs: None,
            status: status_of(e),
        }
    }

    fn from_report(parameter: f64, r: &InvariantReport<f64>) -> Self {
        Self {
            parameter,
            invariant: Some(r.value),
            quantization_error: Some(r.quantization_error),
            rank_plus: Some(r.rank_plus),
            rank_minus: Some(r.rank_minus),
            kramers_pairs: r.kramers_pairs,
            status: STATUS_OK.to_string(),
        }
    }
}

pub fn status_of(e: &Error) -> String {
    match e {
        Error::GaplessOrCritical { .. } => STATUS_GAPLESS.to_string(),
        other => format!("error:{}", other.kind()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Invariant values of the `ok` rows in parameter order.
    pub fn values(&self) -> Vec<(f64, i64)> {
        self.rows
            .iter()
            .filter_map(|r| r.invariant.filter(|_| r.is_ok()).map(|v| (r.parameter, v)))
            .collect()
    }
}

/// A validated sweep, ready to evaluate.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub config: RunConfig,
    pub parameter: String,
    pub points: Vec<f64>,
    pub kind: InvariantKind,
    pub options: InvariantOptions<f64>,
}

impl SweepPlan {
    /// Checks everything that can be checked without evaluating an invariant.
    pub fn new(config: &RunConfig) -> Result<Self> {
        let Some(range) = &config.sweep else {
            bail!("no [sweep] section or --vary flag");
        };
        let points = range.points()?;
        if config.model.zoo.is_none() {
            bail!("sweeps need a zoo model");
        }
        let first = config.build_at(&range.parameter, points[0])?;
        let kind = config.invariant_kind(&first)?;
        let options = config.invariant_options()?;
        if config.output.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        Ok(Self {
            config: config.clone(),
            parameter: range.parameter.clone(),
            points,
            kind,
            options,
        })
    }

    pub fn evaluate(&self, x: f64) -> SweepRow {
        let report = self.config.build_at(&self.parameter, x).and_then(|m| match self.kind {
            InvariantKind::Z => invariant_z(&m, &self.options),
            InvariantKind::Z2 => invariant_z2(&m, &self.options),
        });
        match report {
            Ok(r) => SweepRow::from_report(x, &r),
            Err(e) => SweepRow::failed(x, &e),
        }
    }

    /// Evaluates every point on a pool of `workers` threads. Point failures
    /// become rows; rows come back in parameter order.
    pub fn run(&self) -> Result<SweepResult> {
        let rows = with_workers(self.config.output.workers, || {
            self.points.par_iter().map(|&x| self.evaluate(x)).collect::<Vec<_>>()
        })?;
        Ok(SweepResult { rows })
    }
}

pub fn run_sweep(config: &RunConfig) -> Result<SweepResult> {
    SweepPlan::new(config)?.run()
}

/// Runs `f` inside a rayon pool of the given size, or the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}
