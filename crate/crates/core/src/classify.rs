//! Case taxonomy, predicted outcomes and classification of integrated runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::einstein::{CaseLabel, EinsteinSet};
use crate::error::{Error, Result};
use crate::flow::stepper::dopri_step;
use crate::einstein::einstein_roots;
use crate::flow::{integrate, ratio_rate, Direction, IntegrationOptions, MetricState, Termination, Trajectory};
use crate::space::{FlowCoefficients, SpaceKind};

/// Starting ratios closer than this to an Einstein root count as on it.
pub const ROOT_TOL: f64 = 1e-9;
/// Window, in decades of `T - t` or `|t|`, used for type decisions.
pub const TYPE_WINDOW_DECADES: f64 = 2.0;
/// `(T - t) kappa` varying by less than this fraction is bounded.
pub const TYPE_I_SPREAD: f64 = 0.1;
/// Growth factor of `(T - t) kappa` or `|t| kappa` taken as unbounded.
pub const TYPE_II_GROWTH: f64 = 10.0;
/// Largest ratio of successive per-decade changes of `(T - t) kappa` for
/// which it is taken to be converging.
pub const SETTLING_RATIO: f64 = 0.5;
/// Log time up to which the reduced ratio flow is continued.
pub const CONTINUATION_HORIZON: f64 = 1e8;
/// Samples used for the raw tail estimate of a ratio limit.
pub const TAIL_SAMPLES: usize = 5;
/// Collapse threshold for the second attempt at a forward run whose type
/// could not be read off the first one.
pub const DEEP_COLLAPSE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    C0,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "irreducible")]
    Irreducible,
}

impl From<CaseLabel> for Family {
    fn from(c: CaseLabel) -> Self {
        match c {
            CaseLabel::A => Family::A,
            CaseLabel::B => Family::B,
            CaseLabel::C => Family::C,
            CaseLabel::C0 => Family::C0,
            CaseLabel::D => Family::D,
            CaseLabel::E => Family::E,
            CaseLabel::F => Family::F,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcase {
    None,
    /// 1-based interval of the start among the sorted Einstein roots; for
    /// case (e) intervals 4..6 mean the simple root lies above the double one.
    Interval(u8),
    Below,
    Above,
    /// Start on the given (0-based) Einstein root.
    Fixed(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub family: Family,
    pub subcase: Subcase,
    /// Case (e) only: whether the simple root is larger than the double root.
    pub single_above_double: Option<bool>,
}

impl RegimeLabel {
    pub fn code(&self) -> String {
        let fam = match self.family {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::C0 => "C0",
            Family::D => "d",
            Family::E => "e",
            Family::F => "f",
            Family::Irreducible => "irreducible",
        };
        match self.subcase {
            Subcase::None => fam.to_string(),
            Subcase::Interval(i) => format!("{fam}{i}"),
            Subcase::Below => format!("{fam}-below"),
            Subcase::Above => format!("{fam}-above"),
            Subcase::Fixed(i) => format!("{fam}-fixed{}", i + 1),
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForwardOutcome {
    ShrinkToPoint,
    FiberCollapse,
    SimultaneousCollapse,
    /// Only `x2` vanished; never predicted for a valid space.
    BaseCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularType {
    TypeI,
    TypeII,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AncientType {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorReport {
    pub regime: RegimeLabel,
    pub regime_code: String,
    pub forward_outcome: ForwardOutcome,
    pub singular_type: SingularType,
    /// Limit of the ratio flow continued from the end of the forward run.
    pub forward_y_limit: Option<f64>,
    pub ancient_exists: bool,
    pub ancient_type: Option<AncientType>,
    /// Limit of the ratio flow continued from the end of an ancient run.
    pub backward_y_limit: Option<f64>,
    pub t_estimate: Option<f64>,
    pub forward_termination: Termination,
    pub backward_termination: Termination,
    /// Median ratio over the last samples of each run.
    pub forward_tail_y: f64,
    pub backward_tail_y: f64,
}

impl BehaviorReport {
    pub fn is_undetermined(&self) -> bool {
        self.singular_type == SingularType::Undetermined
    }
}

/// What the theorems predict for a regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub forward_outcome: ForwardOutcome,
    pub forward_y_limit: f64,
    pub ancient_exists: bool,
    pub ancient_type: Option<AncientType>,
    pub backward_y_limit: Option<f64>,
}

impl Prediction {
    /// Whether a report agrees with the prediction, limits to within `tol`.
    pub fn matches(&self, report: &BehaviorReport, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * b.abs().max(1.0);
        let backward = match (self.backward_y_limit, report.backward_y_limit) {
            (Some(a), Some(b)) => close(b, a),
            (None, None) => true,
            _ => false,
        };
        self.forward_outcome == report.forward_outcome
            && report.forward_y_limit.is_some_and(|y| close(y, self.forward_y_limit))
            && self.ancient_exists == report.ancient_exists
            && self.ancient_type == report.ancient_type
            && backward
    }
}

fn interval(roots: &[f64], y0: f64) -> u8 {
    roots.iter().filter(|&&r| r < y0).count() as u8 + 1
}

/// Interval classification of `y0` against the Einstein directions.
pub fn regime_of(coeffs: &FlowCoefficients, es: &EinsteinSet, y0: f64) -> Result<RegimeLabel> {
    if !(y0 > 0.0) || !y0.is_finite() {
        return Err(Error::DomainError(format!("y0 = {y0} must be positive")));
    }
    if let Some(i) = es.root_near(y0, ROOT_TOL) {
        return Err(Error::OnEinsteinRoot {
            y0,
            root: es.roots[i].value,
        });
    }
    Ok(regime_or_fixed(coeffs, es, y0))
}

/// Like [`regime_of`], but starts on an Einstein root get `Subcase::Fixed`.
pub fn regime_or_fixed(_coeffs: &FlowCoefficients, es: &EinsteinSet, y0: f64) -> RegimeLabel {
    let family = Family::from(es.case_label);
    let values = es.values();
    let mut label = RegimeLabel {
        family,
        subcase: Subcase::None,
        single_above_double: None,
    };
    if family == Family::E {
        let double = es.roots.iter().position(|r| r.multiplicity == 2).unwrap_or(0);
        label.single_above_double = Some(double == 0);
    }
    if let Some(i) = es.root_near(y0, ROOT_TOL) {
        label.subcase = Subcase::Fixed(i as u8);
        return label;
    }
    label.subcase = match family {
        Family::A | Family::D => Subcase::Interval(interval(&values, y0)),
        Family::B => Subcase::Interval(interval(&values, y0)),
        Family::E => {
            let offset = if label.single_above_double == Some(true) { 3 } else { 0 };
            Subcase::Interval(interval(&values, y0) + offset)
        }
        Family::C0 => {
            if y0 < values[0] {
                Subcase::Below
            } else {
                Subcase::Above
            }
        }
        Family::C | Family::F | Family::Irreducible => Subcase::None,
    };
    label
}

/// The outcome table of the classification theorems.
pub fn predict(label: &RegimeLabel, es: &EinsteinSet) -> Prediction {
    use ForwardOutcome::*;
    let r = es.values();
    let maximal = matches!(label.family, Family::D | Family::E | Family::F);
    let shrink = if maximal { SimultaneousCollapse } else { ShrinkToPoint };
    let type_i = Some(AncientType::TypeI);
    let p = |forward_outcome, forward_y_limit, backward: Option<f64>, ancient_type| Prediction {
        forward_outcome,
        forward_y_limit,
        ancient_exists: backward.is_some(),
        ancient_type: if backward.is_some() { ancient_type } else { None },
        backward_y_limit: backward,
    };
    if let Subcase::Fixed(i) = label.subcase {
        let y = r[i as usize];
        return p(shrink, y, Some(y), type_i);
    }
    match (label.family, label.subcase) {
        (Family::A, Subcase::Interval(1)) => p(FiberCollapse, 0.0, Some(r[0]), type_i),
        (Family::A, Subcase::Interval(2)) => p(ShrinkToPoint, r[1], Some(r[0]), type_i),
        (Family::A, _) => p(ShrinkToPoint, r[1], None, None),
        (Family::B, Subcase::Interval(1)) => p(FiberCollapse, 0.0, Some(r[0]), type_i),
        (Family::B, _) => p(ShrinkToPoint, r[0], None, None),
        (Family::C, _) => p(FiberCollapse, 0.0, None, None),
        (Family::C0, Subcase::Below) => {
            p(ShrinkToPoint, r[0], Some(0.0), Some(AncientType::TypeII))
        }
        (Family::C0, _) => p(ShrinkToPoint, r[0], None, None),
        (Family::D, Subcase::Interval(1)) => p(shrink, r[0], None, None),
        (Family::D, Subcase::Interval(2)) => p(shrink, r[0], Some(r[1]), type_i),
        (Family::D, Subcase::Interval(3)) => p(shrink, r[2], Some(r[1]), type_i),
        (Family::D, _) => p(shrink, r[2], None, None),
        (Family::E, Subcase::Interval(k)) => {
            // Sorted roots: (single, double) for k <= 3, (double, single) otherwise.
            let (lo, hi) = (r[0], r[1]);
            match k {
                1 => p(shrink, lo, None, None),
                2 => p(shrink, lo, Some(hi), type_i),
                3 => p(shrink, hi, None, None),
                4 => p(shrink, lo, None, None),
                5 => p(shrink, hi, Some(lo), type_i),
                _ => p(shrink, hi, None, None),
            }
        }
        (Family::E, _) | (Family::F, _) => p(shrink, r[0], None, None),
        (Family::Irreducible, _) => p(ShrinkToPoint, 1.0, Some(1.0), type_i),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median ratio over the last [`TAIL_SAMPLES`] samples.
pub fn tail_ratio(traj: &Trajectory) -> f64 {
    let ys = traj.ratios();
    let start = ys.len().saturating_sub(TAIL_SAMPLES);
    median(ys[start..].to_vec())
}

pub fn estimate_singular_time(traj: &Trajectory) -> Result<f64> {
    match (traj.termination.is_collapse(), traj.t_estimate) {
        (true, Some(t)) => Ok(t),
        _ => Err(Error::NotCollapsed),
    }
}

/// Where the ratio flow ends up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RatioLimit {
    /// `y -> value` as the log time `s -> infinity`; the value may be zero
    /// when `y = 0` is an equilibrium.
    Converges(f64),
    /// `y` reaches zero at finite log time.
    ReachesZero,
    /// `y` escapes to infinity at finite log time.
    Escapes,
}

impl RatioLimit {
    /// The limiting ratio, with zero for [`RatioLimit::ReachesZero`].
    pub fn value(self) -> Option<f64> {
        match self {
            RatioLimit::Converges(y) => Some(y),
            RatioLimit::ReachesZero => Some(0.0),
            RatioLimit::Escapes => None,
        }
    }
}

fn rate_slope(coeffs: &FlowCoefficients, sign: f64, y: f64) -> f64 {
    let dy = 1e-6 * y.max(1.0);
    sign * (ratio_rate(coeffs, y + dy) - ratio_rate(coeffs, y - dy)) / (2.0 * dy)
}

/// Follows the autonomous ratio equation `dy/ds = F(y)` (forward) or
/// `-F(y)` (backward), `ds = dt / x2`, from `y0` up to log time
/// [`CONTINUATION_HORIZON`].
///
/// Near a double root the approach is only algebraic in `s`, which is why
/// limits are not read from the finite runs alone. A finite-`s` singularity
/// means the metric itself only lives for finite time in that direction.
pub fn continue_ratio(coeffs: &FlowCoefficients, y0: f64, direction: Direction) -> RatioLimit {
    let sign = direction.sign();
    let zero_is_fixed = matches!(coeffs, FlowCoefficients::NonMaximal(c) if c.c == 0.0);
    let to_zero = || {
        if zero_is_fixed {
            RatioLimit::Converges(0.0)
        } else {
            RatioLimit::ReachesZero
        }
    };
    if !(y0 > 0.0) {
        return to_zero();
    }
    let rate0 = ratio_rate(coeffs, y0);
    // Already stationary to rounding: the starting point is an equilibrium.
    if rate0.abs() <= 1e-13 * y0.max(1.0) * rate_slope(coeffs, 1.0, y0).abs().max(1.0) {
        return RatioLimit::Converges(y0);
    }
    let floor = 1e-12 * y0.max(1.0);
    let field = |y: &[f64; 1]| -> Option<[f64; 1]> {
        (y[0] > 0.0).then(|| [sign * ratio_rate(coeffs, y[0])])
    };
    let mut y = [y0];
    let mut f = [sign * rate0];
    let mut s = 0.0_f64;
    let mut h = 1e-3 / (f[0].abs() / y0).max(1e-3);
    let mut still = 0;
    for _ in 0..1_000_000 {
        if s >= CONTINUATION_HORIZON || still >= 10 {
            break;
        }
        h = h.min(CONTINUATION_HORIZON - s);
        if f[0] < 0.0 {
            h = h.min(0.2 * y[0] / -f[0]);
        }
        // Stay well inside the stability region near an attracting root.
        let slope = rate_slope(coeffs, sign, y[0]);
        if slope < 0.0 {
            h = h.min(1.0 / -slope);
        }
        if h <= 1e-14 * s.max(1.0) {
            return if f[0] < 0.0 { to_zero() } else { RatioLimit::Escapes };
        }
        let Some(step) = dopri_step(&field, &y, &f, h, 1e-12, 1e-15) else {
            h *= 0.25;
            continue;
        };
        if step.err > 1.0 {
            h *= (0.9 * step.err.powf(-0.2)).max(0.2);
            continue;
        }
        let yn = step.x[0];
        if yn <= floor {
            return to_zero();
        }
        if yn > 1e12 {
            return RatioLimit::Escapes;
        }
        still = if yn == y[0] { still + 1 } else { 0 };
        // At an attracting simple root the Newton distance hits rounding level.
        let slope = rate_slope(coeffs, sign, yn);
        if slope < 0.0 && (step.f[0] / slope).abs() <= 1e-14 * yn.max(1.0) {
            return RatioLimit::Converges(yn);
        }
        s += h;
        y = step.x;
        f = step.f;
        h *= if step.err == 0.0 {
            5.0
        } else {
            (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0)
        };
    }
    RatioLimit::Converges(y[0])
}

struct Window {
    first: f64,
    last: f64,
    min: f64,
    max: f64,
    monotone_up: bool,
    len: usize,
}

/// Statistics of `q` over points whose scale parameter lies in the last
/// [`TYPE_WINDOW_DECADES`] decades ending at `end`, ordered toward `end`.
fn window(points: &[(f64, f64)], end: f64, toward_small: bool) -> Option<Window> {
    let span = 10f64.powf(TYPE_WINDOW_DECADES);
    let inside: Vec<f64> = points
        .iter()
        .filter(|(p, _)| {
            if toward_small {
                *p <= end * span
            } else {
                *p >= end / span
            }
        })
        .map(|&(_, q)| q)
        .collect();
    let reach = points.iter().any(|(p, _)| {
        if toward_small {
            *p >= end * span
        } else {
            *p <= end / span
        }
    });
    if inside.len() < 5 || !reach {
        return None;
    }
    let min = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let max = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let monotone_up = inside.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    Some(Window {
        first: inside[0],
        last: *inside.last().unwrap(),
        min,
        max,
        monotone_up,
        len: inside.len(),
    })
}

/// Type of the forward singularity from `(T - t) kappa` over the final
/// decades of `T - t`.
pub fn forward_singular_type(traj: &Trajectory) -> SingularType {
    let Some(t_sing) = traj.t_estimate else {
        return SingularType::Undetermined;
    };
    let points: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .map(|s| (t_sing - s.state.t, s.kappa))
        .filter(|(g, _)| *g > 0.0)
        .map(|(g, k)| (g, g * k))
        .collect();
    let Some(end) = points.iter().map(|p| p.0).reduce(f64::min) else {
        return SingularType::Undetermined;
    };
    let Some(w) = window(&points, end, true) else {
        return SingularType::Undetermined;
    };
    if (w.max - w.min) / w.min < TYPE_I_SPREAD && w.last <= w.first * (1.0 + TYPE_I_SPREAD) {
        SingularType::TypeI
    } else if w.last / w.first > TYPE_II_GROWTH {
        SingularType::TypeII
    } else if settles_geometrically(&points, end) {
        SingularType::TypeI
    } else {
        SingularType::Undetermined
    }
}

/// Whether a quantity still moving at the end of the window converges, with
/// the geometric tail of its per-decade changes within [`TYPE_I_SPREAD`].
fn settles_geometrically(points: &[(f64, f64)], end: f64) -> bool {
    let at = |g: f64| {
        points
            .iter()
            .min_by(|a, b| (a.0 / g).ln().abs().total_cmp(&(b.0 / g).ln().abs()))
            .map(|p| p.1)
    };
    let (Some(q0), Some(q1), Some(q2)) = (at(100.0 * end), at(10.0 * end), at(end)) else {
        return false;
    };
    let (d1, d2) = (q1 - q0, q2 - q1);
    let r = d2 / d1;
    if !(r > 0.0 && r <= SETTLING_RATIO) {
        return false;
    }
    (d2 * r / (1.0 - r)).abs() <= TYPE_I_SPREAD * q2.abs()
}

/// Type of an ancient run from `|t| kappa` over the last decades of `|t|`,
/// with `|t|` measured from the start of the run.
pub fn ancient_type(traj: &Trajectory) -> AncientType {
    let points: Vec<(f64, f64)> = (1..traj.len())
        .map(|i| {
            let tau = traj.elapsed(i);
            (tau, tau * traj.samples[i].kappa)
        })
        .collect();
    let end = points.iter().map(|p| p.0).fold(0.0, f64::max);
    match window(&points, end, false) {
        Some(w) if w.monotone_up && w.last / w.first > TYPE_II_GROWTH && w.len >= 5 => {
            AncientType::TypeII
        }
        _ => AncientType::TypeI,
    }
}

pub fn forward_outcome(coeffs: &FlowCoefficients, term: Termination) -> Result<ForwardOutcome> {
    Ok(match term {
        Termination::CollapseX1 => ForwardOutcome::FiberCollapse,
        Termination::CollapseX2 => ForwardOutcome::BaseCollapse,
        Termination::CollapseBoth => match coeffs.kind() {
            SpaceKind::NonMaximal => ForwardOutcome::ShrinkToPoint,
            SpaceKind::Maximal => ForwardOutcome::SimultaneousCollapse,
        },
        _ => return Err(Error::NotCollapsed),
    })
}

/// Reads a [`BehaviorReport`] off a forward and a backward run from the
/// same initial state.
pub fn classify_trajectory(
    fwd: &Trajectory,
    bwd: &Trajectory,
    coeffs: &FlowCoefficients,
    es: &EinsteinSet,
) -> Result<BehaviorReport> {
    if bwd.termination == Termination::StepLimit {
        return Err(Error::InsufficientHorizon);
    }
    let forward_limit = continue_ratio(coeffs, fwd.first().state.y(), Direction::Forward);
    let forward_outcome = forward_outcome(coeffs, fwd.termination)?;
    let regime = regime_or_fixed(coeffs, es, fwd.first().state.y());
    let (b0, b1) = (bwd.first().state, bwd.last().state);
    let backward_limit = continue_ratio(coeffs, b0.y(), Direction::Backward);
    let ancient_exists = bwd.termination == Termination::HorizonReached
        && b1.x1 > b0.x1
        && b1.x2 > b0.x2
        && matches!(backward_limit, RatioLimit::Converges(_));
    let forward_y_limit = forward_limit.value();
    let backward_y_limit = if ancient_exists {
        backward_limit.value()
    } else {
        None
    };
    Ok(BehaviorReport {
        regime_code: regime.code(),
        regime,
        forward_outcome,
        singular_type: forward_singular_type(fwd),
        forward_y_limit,
        ancient_exists,
        ancient_type: ancient_exists.then(|| ancient_type(bwd)),
        backward_y_limit,
        t_estimate: fwd.t_estimate,
        forward_termination: fwd.termination,
        backward_termination: bwd.termination,
        forward_tail_y: tail_ratio(fwd),
        backward_tail_y: tail_ratio(bwd),
    })
}

/// A forward run, a backward run and their classification.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub forward: Trajectory,
    pub backward: Trajectory,
    pub report: BehaviorReport,
}

/// Integrates both ways from `init` and classifies the pair. The
/// directions in `opts` are overridden. A forward run of undetermined type
/// is repeated once with collapse threshold [`DEEP_COLLAPSE_EPSILON`] when
/// `opts` asks for a shallower one.
pub fn analyze(
    coeffs: &FlowCoefficients,
    init: MetricState,
    opts: &IntegrationOptions,
) -> Result<Analysis> {
    let mut forward = integrate(
        coeffs,
        init,
        &IntegrationOptions {
            direction: Direction::Forward,
            ..*opts
        },
    )?;
    let backward = integrate(
        coeffs,
        init,
        &IntegrationOptions {
            direction: Direction::Backward,
            ..*opts
        },
    )?;
    let es = einstein_roots(coeffs);
    let mut report = classify_trajectory(&forward, &backward, coeffs, &es)?;
    if report.is_undetermined() && opts.collapse_epsilon > DEEP_COLLAPSE_EPSILON {
        let deep = IntegrationOptions {
            direction: Direction::Forward,
            collapse_epsilon: DEEP_COLLAPSE_EPSILON,
            ..*opts
        };
        forward = integrate(coeffs, init, &deep)?;
        report = classify_trajectory(&forward, &backward, coeffs, &es)?;
    }
    Ok(Analysis {
        forward,
        backward,
        report,
    })
}
