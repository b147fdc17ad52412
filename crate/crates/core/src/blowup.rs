//! Parabolic rescaling near the singular time and the soliton it converges to.
//!
//! The rescaled flow based at `t_j` is
//! `x_k^j(s) = kappa(t_j) x_k(t_j + s / kappa(t_j))`, with the curvature proxy
//! `kappa` in place of `|Rm|`. Homogeneity makes the base point irrelevant.

use serde::{Deserialize, Serialize};

use crate::classify::{forward_outcome, ForwardOutcome};
use crate::einstein::{einstein_scale_constants, EinsteinSet};
use crate::error::{Error, Result};
use crate::flow::{curvature_proxy, rhs_two, IntegrationOptions, MetricState, Trajectory};

/// Relative spread allowed over the final decade of `T - t`.
pub const CAUCHY_TOL: f64 = 1e-3;

/// Samples required in the final decade of `T - t`.
pub const MIN_TAIL_SAMPLES: usize = 10;

/// Collapse threshold for runs meant for [`soliton_limit`]. Approach to a
/// simple Einstein direction can be as slow as a small power of `T - t`, so
/// the run has to go deeper than an ordinary classification run.
pub const BLOWUP_COLLAPSE_EPSILON: f64 = 1e-12;

/// Forward options for blow-up runs.
pub fn blowup_options() -> IntegrationOptions {
    IntegrationOptions {
        collapse_epsilon: BLOWUP_COLLAPSE_EPSILON,
        ..IntegrationOptions::forward()
    }
}

/// The flow rescaled at one base time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledState {
    /// Base time `t_j` in the original chart.
    pub t_base: f64,
    /// `kappa(t_j)`, the rescaling factor.
    pub kappa: f64,
    pub x1: f64,
    pub x2: f64,
}

impl RescaledState {
    /// Original time corresponding to rescaled time `s`.
    pub fn original_time(&self, s: f64) -> f64 {
        self.t_base + s / self.kappa
    }

    /// Rescaled time corresponding to original time `t`.
    pub fn rescaled_time(&self, t: f64) -> f64 {
        (t - self.t_base) * self.kappa
    }

    pub fn state(&self) -> MetricState {
        MetricState::new(0.0, self.x1, self.x2)
    }
}

fn interpolate(traj: &Trajectory, t: f64) -> Result<MetricState> {
    let (t0, t1) = (traj.first().state.t, traj.last().state.t);
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    if !(t >= lo && t <= hi) {
        return Err(Error::OutOfRange { t, lo, hi });
    }
    let sign = if t1 >= t0 { 1.0 } else { -1.0 };
    let idx = traj
        .samples
        .partition_point(|s| sign * (s.state.t - t) < 0.0)
        .min(traj.len() - 1);
    let b = traj.samples[idx].state;
    if b.t == t || idx == 0 {
        return Ok(b);
    }
    let a = traj.samples[idx - 1].state;
    let w = (t - a.t) / (b.t - a.t);
    Ok(MetricState::new(
        t,
        a.x1 + w * (b.x1 - a.x1),
        a.x2 + w * (b.x2 - a.x2),
    ))
}

/// Rescales the trajectory at time `t_j`, interpolating linearly between
/// samples when `t_j` is not a sample time. The rescaled proxy is 1.
pub fn rescale_at(traj: &Trajectory, t_j: f64) -> Result<RescaledState> {
    let state = interpolate(traj, t_j)?;
    let kappa = curvature_proxy(&state, &traj.coeffs)?;
    Ok(RescaledState {
        t_base: t_j,
        kappa,
        x1: kappa * state.x1,
        x2: kappa * state.x2,
    })
}

/// The limit of the rescaled flows as `t_j -> T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolitonLimit {
    /// A shrinking homogeneous Einstein metric on the whole space.
    EinsteinPoint {
        /// Limiting rescaled pair `(kappa x1, kappa x2)`, proportional to the
        /// shrink rates `(k1, k2)`.
        rescaled: (f64, f64),
        /// `k1 / k2` read from the rescaled pair.
        ratio: f64,
        /// The Einstein direction it matches.
        root: f64,
        /// Shrink rates of that Einstein direction for `x2 = T - t`.
        rates: (f64, f64),
    },
    /// The fibre Einstein metric times a flat factor of dimension `q`.
    RigidProduct {
        /// Limiting rescaled fibre coefficient `kappa x1`.
        fiber_scale: f64,
        /// `-dx1/dt` of the limiting fibre, unchanged by the rescaling.
        fiber_rate: f64,
        q: u32,
    },
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let min = values.clone().fold(f64::INFINITY, f64::min);
    let max = values.fold(f64::NEG_INFINITY, f64::max);
    (max - min) / max.abs().max(f64::MIN_POSITIVE)
}

/// Identifies the soliton the rescaled flows converge to.
///
/// The limit is the value at the last sample, accepted when the rescaled
/// coefficient(s) that stay bounded vary by at most [`CAUCHY_TOL`] over the
/// final decade of `T - t`.
pub fn soliton_limit(traj: &Trajectory, es: &EinsteinSet) -> Result<SolitonLimit> {
    let t_sing = match (traj.termination.is_collapse(), traj.t_estimate) {
        (true, Some(t)) => t,
        _ => return Err(Error::NotCollapsed),
    };
    let outcome = forward_outcome(&traj.coeffs, traj.termination)?;
    let gap_end = t_sing - traj.last().state.t;
    let tail: Vec<RescaledState> = traj
        .samples
        .iter()
        .filter(|s| {
            let gap = t_sing - s.state.t;
            gap > 0.0 && gap <= 10.0 * gap_end
        })
        .map(|s| rescale_at(traj, s.state.t))
        .collect::<Result<_>>()?;
    if tail.len() < MIN_TAIL_SAMPLES {
        return Err(Error::Unclassified(format!(
            "{} samples in the final decade of T - t, need {MIN_TAIL_SAMPLES}",
            tail.len()
        )));
    }
    let last = *tail.last().unwrap();
    let check = |name: &str, s: f64| {
        if s <= CAUCHY_TOL {
            Ok(())
        } else {
            Err(Error::Unclassified(format!(
                "rescaled {name} varies by {s:.3e} over the final decade"
            )))
        }
    };
    match outcome {
        ForwardOutcome::ShrinkToPoint | ForwardOutcome::SimultaneousCollapse => {
            check("x1", spread(tail.iter().map(|r| r.x1)))?;
            check("x2", spread(tail.iter().map(|r| r.x2)))?;
            let ratio = last.x1 / last.x2;
            let root = es
                .nearest(ratio)
                .map(|i| es.roots[i].value)
                .ok_or_else(|| Error::Unclassified("no Einstein direction".into()))?;
            if (ratio - root).abs() > CAUCHY_TOL * root.max(1.0) {
                return Err(Error::Unclassified(format!(
                    "rescaled ratio {ratio} is not within {CAUCHY_TOL} of a root"
                )));
            }
            let rates = einstein_scale_constants(&traj.coeffs, root)?;
            Ok(SolitonLimit::EinsteinPoint {
                rescaled: (last.x1, last.x2),
                ratio,
                root,
                rates,
            })
        }
        ForwardOutcome::FiberCollapse => {
            check("x1", spread(tail.iter().map(|r| r.x1)))?;
            if tail.windows(2).any(|w| w[1].x2 < w[0].x2) {
                return Err(Error::Unclassified(
                    "rescaled x2 does not grow without bound".into(),
                ));
            }
            let (dx1, _) = rhs_two(&traj.last().state, &traj.coeffs)?;
            Ok(SolitonLimit::RigidProduct {
                fiber_scale: last.x1,
                fiber_rate: -dx1,
                q: traj.coeffs.dims().1,
            })
        }
        ForwardOutcome::BaseCollapse => Err(Error::Unclassified(
            "the base collapses with the fibre bounded".into(),
        )),
    }
}
