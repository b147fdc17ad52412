//! Classification over a family of initial directions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{analyze, predict, AncientType, ForwardOutcome, SingularType};
use crate::einstein::einstein_roots;
use crate::error::{Error, Result};
use crate::flow::{IntegrationOptions, MetricState};
use crate::space::FlowCoefficients;

/// Tolerance on y-limits when comparing against the predicted table.
pub const MATCH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Log,
    Linear,
    /// Log-uniform draws from a seeded ChaCha stream.
    Random,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Spacing::Log),
            "linear" => Ok(Spacing::Linear),
            "random" => Ok(Spacing::Random),
            _ => Err(Error::InvalidOptions(format!(
                "unknown spacing `{s}` (log, linear, random)"
            ))),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
            Spacing::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub seed: u64,
    /// `x2(0)`; each start is `(y0 scale, scale)`.
    pub scale: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOptions(m.into()));
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        if !(self.lo > 0.0 && self.lo.is_finite() && self.hi.is_finite() && self.hi >= self.lo) {
            return bad("range must satisfy 0 < lo <= hi < inf");
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad("scale must be positive");
        }
        Ok(())
    }

    /// Initial directions in row order.
    pub fn directions(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.count;
        let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let (llo, lhi) = (self.lo.ln(), self.hi.ln());
        Ok(match self.spacing {
            Spacing::Log => (0..n)
                .map(|i| match i {
                    0 => self.lo,
                    _ if i == n - 1 => self.hi,
                    _ => (llo + frac(i) * (lhi - llo)).exp(),
                })
                .collect(),
            Spacing::Linear => (0..n)
                .map(|i| self.lo + frac(i) * (self.hi - self.lo))
                .collect(),
            Spacing::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..n)
                    .map(|_| (llo + rng.random::<f64>() * (lhi - llo)).exp())
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub y0: f64,
    pub regime: Option<String>,
    pub outcome: Option<ForwardOutcome>,
    pub singular_type: Option<SingularType>,
    pub t_estimate: Option<f64>,
    pub ancient_exists: Option<bool>,
    pub ancient_type: Option<AncientType>,
    pub forward_y_limit: Option<f64>,
    pub backward_y_limit: Option<f64>,
    /// Agreement with the theorem table.
    pub matches_prediction: Option<bool>,
    /// Error message when the start could not be classified.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_undetermined(&self) -> bool {
        self.error.is_some() || self.singular_type == Some(SingularType::Undetermined)
    }
}

/// Classifies one start.
pub fn sweep_row(
    coeffs: &FlowCoefficients,
    index: usize,
    y0: f64,
    scale: f64,
    opts: &IntegrationOptions,
) -> SweepRow {
    let mut row = SweepRow {
        index,
        y0,
        regime: None,
        outcome: None,
        singular_type: None,
        t_estimate: None,
        ancient_exists: None,
        ancient_type: None,
        forward_y_limit: None,
        backward_y_limit: None,
        matches_prediction: None,
        error: None,
    };
    match analyze(coeffs, MetricState::from_ratio(y0, scale), opts) {
        Ok(a) => {
            let r = a.report;
            let es = einstein_roots(coeffs);
            row.matches_prediction = Some(predict(&r.regime, &es).matches(&r, MATCH_TOL));
            row.regime = Some(r.regime_code);
            row.outcome = Some(r.forward_outcome);
            row.singular_type = Some(r.singular_type);
            row.t_estimate = r.t_estimate;
            row.ancient_exists = Some(r.ancient_exists);
            row.ancient_type = r.ancient_type;
            row.forward_y_limit = r.forward_y_limit;
            row.backward_y_limit = r.backward_y_limit;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every start in parallel; rows come back in input order.
pub fn run_sweep(
    coeffs: &FlowCoefficients,
    spec: &SweepSpec,
    opts: &IntegrationOptions,
) -> Result<Vec<SweepRow>> {
    opts.validate()?;
    let ys = spec.directions()?;
    Ok(ys
        .par_iter()
        .enumerate()
        .map(|(i, &y0)| sweep_row(coeffs, i, y0, spec.scale, opts))
        .collect())
}
