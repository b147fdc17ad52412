//! Adaptive integration of the two-summand flow with collapse detection.

use serde::{Deserialize, Serialize};

use super::rhs::{curvature_proxy, field, first_integral, scalar_curvature, MetricState};
use super::stepper::{dopri_step, rk4_step, Dense, Step};
use crate::classify::{continue_ratio, RatioLimit};
use crate::einstein::{quadratic_einstein_roots, CaseLabel, EinsteinSet};
use crate::error::{Error, Result};
use crate::space::{FlowCoefficients, NonMaxCoeffs};

/// States with a larger Euclidean norm abort the run.
pub const BLOWUP_NORM: f64 = 1e12;
/// Fraction of a vanishing component's time-to-zero allowed per step.
pub const COLLAPSE_STEP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    /// Runs `tau = t0 - t` forward through the negated field.
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dopri5,
    /// Classical RK4 with the given step, still shortened near a collapse.
    Rk4 { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub direction: Direction,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub collapse_epsilon: f64,
    /// Largest elapsed time `|t - t0|`.
    pub max_time: f64,
    pub max_steps: usize,
    /// Keep every n-th accepted step; the first and last states are always kept.
    pub sample_stride: usize,
    pub method: Method,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            direction: Direction::Forward,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            collapse_epsilon: 1e-8,
            max_time: 1e3,
            max_steps: 2_000_000,
            sample_stride: 1,
            method: Method::Dopri5,
        }
    }
}

impl IntegrationOptions {
    pub fn forward() -> Self {
        Self::default()
    }

    pub fn backward() -> Self {
        Self {
            direction: Direction::Backward,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOptions(m.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad("rel_tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return bad("abs_tol must lie in (0, 1)");
        }
        if !(self.collapse_epsilon > 0.0 && self.collapse_epsilon.is_finite()) {
            return bad("collapse_epsilon must be positive");
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return bad("max_time must be positive");
        }
        if self.max_steps == 0 || self.sample_stride == 0 {
            return bad("max_steps and sample_stride must be positive");
        }
        if let Method::Rk4 { step } = self.method {
            if !(step > 0.0 && step.is_finite()) {
                return bad("RK4 step must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    CollapseX1,
    CollapseX2,
    CollapseBoth,
    HorizonReached,
    StepLimit,
}

impl Termination {
    pub fn is_collapse(self) -> bool {
        matches!(
            self,
            Termination::CollapseX1 | Termination::CollapseX2 | Termination::CollapseBoth
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: MetricState,
    /// Scalar curvature.
    pub r: f64,
    pub kappa: f64,
    pub first_integral: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub direction: Direction,
    pub coeffs: FlowCoefficients,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Time at which the vanishing coefficient(s) reach zero, extrapolated
    /// linearly from the collapse event.
    pub t_estimate: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.t).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.y()).collect()
    }

    /// `|t - t0|` at sample `i`.
    pub fn elapsed(&self, i: usize) -> f64 {
        (self.samples[i].state.t - self.samples[0].state.t).abs()
    }
}

struct Diagnostics<'a> {
    coeffs: &'a FlowCoefficients,
    integral: Option<(NonMaxCoeffs, EinsteinSet)>,
}

impl<'a> Diagnostics<'a> {
    fn new(coeffs: &'a FlowCoefficients) -> Self {
        let integral = match coeffs {
            FlowCoefficients::NonMaximal(c) => {
                let es = quadratic_einstein_roots(c);
                matches!(es.case_label, CaseLabel::A | CaseLabel::B).then_some((*c, es))
            }
            FlowCoefficients::Maximal(_) => None,
        };
        Self { coeffs, integral }
    }

    fn sample(&self, state: MetricState) -> Result<Sample> {
        let first_integral = match &self.integral {
            Some((c, es)) => first_integral(&state, c, es).ok().flatten(),
            None => None,
        };
        Ok(Sample {
            state,
            r: scalar_curvature(&state, self.coeffs)?,
            kappa: curvature_proxy(&state, self.coeffs)?,
            first_integral,
        })
    }
}

/// Integrates from `init` until a coefficient falls to `collapse_epsilon`,
/// the horizon `max_time` elapses or `max_steps` steps are taken.
///
/// Steps are rejected and shortened when a stage leaves the positive
/// quadrant, and limited to a tenth of the time a decreasing coefficient
/// needs to vanish at its current rate, so a collapse is approached
/// geometrically. When the step drops below the time resolution of `t`
/// while a coefficient's time to vanish is at that resolution, the collapse
/// is declared at the current state.
pub fn integrate(
    coeffs: &FlowCoefficients,
    init: MetricState,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    if !init.is_riemannian() {
        return Err(Error::DomainError(format!(
            "initial state ({}, {}) is not Riemannian",
            init.x1, init.x2
        )));
    }
    let sign = opts.direction.sign();
    let vf = |x: &[f64; 2]| -> Option<[f64; 2]> {
        if x[0] > 0.0 && x[1] > 0.0 {
            let (a, b) = field(coeffs, x[0], x[1]);
            Some([sign * a, sign * b])
        } else {
            None
        }
    };
    let diag = Diagnostics::new(coeffs);
    let t0 = init.t;
    let eps = opts.collapse_epsilon;

    let mut x = [init.x1, init.x2];
    let mut f = vf(&x).expect("positive state");
    let mut tau = 0.0_f64;
    let mut samples = vec![diag.sample(init)?];
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    let limiter = |x: &[f64; 2], f: &[f64; 2]| -> f64 {
        let mut h = f64::INFINITY;
        for i in 0..2 {
            if f[i] < 0.0 {
                h = h.min(COLLAPSE_STEP_FRACTION * x[i] / -f[i]);
            }
        }
        h
    };
    let mut h = match opts.method {
        Method::Rk4 { step } => step,
        Method::Dopri5 => {
            let rate = (f[0].abs() / x[0]).max(f[1].abs() / x[1]);
            1e-3 / rate.max(1e-3)
        }
    };

    let state_at = |tau: f64, x: [f64; 2]| MetricState::new(t0 + sign * tau, x[0], x[1]);
    let collapse = |x: [f64; 2], f: [f64; 2], t: f64| -> (Termination, f64) {
        let v = if x[0] <= x[1] { 0 } else { 1 };
        let o = 1 - v;
        let gap = if f[v] < 0.0 { x[v] / -f[v] } else { 0.0 };
        let other = x[o] + f[o] * gap;
        // The ratio flow decides which coefficients vanish: a positive limit
        // of y means both do. Failing that, coefficients vanishing together
        // at a linear rate reach zero at the same time, so the other one
        // loses most of its size by then.
        let fate = continue_ratio(coeffs, x[0] / x[1], opts.direction);
        let term = if matches!(fate, RatioLimit::Converges(r) if r > 0.0) {
            Termination::CollapseBoth
        } else if fate == RatioLimit::ReachesZero && v == 0 {
            Termination::CollapseX1
        } else if fate == RatioLimit::Escapes && v == 1 {
            Termination::CollapseX2
        } else if other <= 0.5 * x[o] {
            Termination::CollapseBoth
        } else if v == 0 {
            Termination::CollapseX1
        } else {
            Termination::CollapseX2
        };
        (term, t + sign * gap)
    };

    let (termination, t_estimate) = loop {
        if accepted >= opts.max_steps {
            break (Termination::StepLimit, None);
        }
        let t_now = t0 + sign * tau;
        let resolution = 8.0 * f64::EPSILON * t_now.abs().max(tau).max(1.0);
        let h_lim = limiter(&x, &f);
        if h_lim < resolution {
            let (term, te) = collapse(x, f, t_now);
            break (term, Some(te));
        }
        if let Method::Rk4 { step } = opts.method {
            h = step;
        }
        h = h.min(h_lim).min(opts.max_time - tau);
        let last = h >= opts.max_time - tau;
        if h < resolution {
            let vanishing = (0..2).any(|i| f[i] < 0.0 && x[i] / -f[i] <= 1e3 * resolution);
            if vanishing {
                let (term, te) = collapse(x, f, t_now);
                break (term, Some(te));
            }
            break (Termination::StepLimit, None);
        }

        let attempt: Option<Step<2>> = match opts.method {
            Method::Dopri5 => dopri_step(&vf, &x, &f, h, opts.rel_tol, opts.abs_tol),
            Method::Rk4 { .. } => rk4_step(&vf, &x, &f, h),
        };
        let Some(step) = attempt else {
            rejected += 1;
            h *= 0.25;
            continue;
        };
        if step.err > 1.0 {
            rejected += 1;
            h *= (0.9 * step.err.powf(-0.2)).max(0.2);
            continue;
        }

        accepted += 1;
        let tau_new = if last { opts.max_time } else { tau + h };
        let norm = step.x[0].hypot(step.x[1]);
        if !(norm <= BLOWUP_NORM) {
            // Backward in time one coefficient may blow up while the other
            // vanishes; that is a genuine finite-time singularity.
            let small = step.x[0].min(step.x[1]) <= eps * step.x[0].max(step.x[1]);
            if opts.direction == Direction::Backward && small && norm.is_finite() {
                let (term, te) = collapse(x, f, t0 + sign * tau);
                break (term, Some(te));
            }
            return Err(Error::BlowupDetected {
                t: t0 + sign * tau_new,
                norm,
            });
        }

        if step.x[0].min(step.x[1]) <= eps {
            let theta = locate(&step.dense, eps, h, tau);
            let xe = step.dense.at(theta);
            let xe = if xe[0] > 0.0 && xe[1] > 0.0 { xe } else { step.x };
            let te = tau + theta * h;
            let fe = vf(&xe).unwrap_or(step.f);
            samples.push(diag.sample(state_at(te, xe))?);
            let (term, tt) = collapse(xe, fe, t0 + sign * te);
            break (term, Some(tt));
        }

        x = step.x;
        f = step.f;
        tau = tau_new;
        if last || accepted.is_multiple_of(opts.sample_stride) {
            samples.push(diag.sample(state_at(tau, x))?);
        }
        if last {
            break (Termination::HorizonReached, None);
        }
        if let Method::Dopri5 = opts.method {
            let grow = if step.err == 0.0 {
                5.0
            } else {
                (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        }
    };

    if let Some(last) = samples.last() {
        if last.state.t != t0 + sign * tau && !termination.is_collapse() {
            samples.push(diag.sample(state_at(tau, x))?);
        }
    }

    Ok(Trajectory {
        direction: opts.direction,
        coeffs: *coeffs,
        samples,
        termination,
        t_estimate,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Bisects the continuous extension for the first fraction of the step at
/// which the smaller coefficient reaches `eps`.
fn locate(dense: &Dense<2>, eps: f64, h: f64, tau: f64) -> f64 {
    let g = |theta: f64| {
        let x = dense.at(theta);
        x[0].min(x[1]) - eps
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let tol = 1e-13 * tau.max(1.0);
    for _ in 0..200 {
        if (hi - lo) * h <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
