//! Vector fields, scalar curvature, the curvature proxy and first integrals.

use serde::{Deserialize, Serialize};

use crate::einstein::{CaseLabel, EinsteinSet};
use crate::error::{Error, Result};
use crate::space::{FlowCoefficients, GeneralSpace, NonMaxCoeffs};

/// Distance to an Einstein root below which first integrals are refused.
pub const FIRST_INTEGRAL_ROOT_TOL: f64 = 1e-9;

/// A point of the two-summand phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricState {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MetricState {
    pub fn new(t: f64, x1: f64, x2: f64) -> Self {
        Self { t, x1, x2 }
    }

    /// State with ratio `y0` and `x2 = scale`.
    pub fn from_ratio(y0: f64, scale: f64) -> Self {
        Self {
            t: 0.0,
            x1: y0 * scale,
            x2: scale,
        }
    }

    pub fn y(&self) -> f64 {
        self.x1 / self.x2
    }

    pub fn is_riemannian(&self) -> bool {
        self.x1 > 0.0 && self.x2 > 0.0 && self.x1.is_finite() && self.x2.is_finite()
    }

    fn check(&self) -> Result<()> {
        if self.is_riemannian() {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "x1 = {}, x2 = {} must be positive",
                self.x1, self.x2
            )))
        }
    }
}

/// The homogeneous Ricci flow for any number of summands:
/// `x_i' = -b_i + (1/d_i) sum [ijk] x_k/x_j - (1/(2 d_i)) sum [ijk] x_i^2/(x_j x_k)`.
pub fn rhs_general(x: &[f64], space: &GeneralSpace) -> Result<Vec<f64>> {
    let l = space.summands();
    if x.len() != l {
        return Err(Error::DomainError(format!(
            "state has {} components for {} summands",
            x.len(),
            l
        )));
    }
    if let Some(i) = x.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::DomainError(format!("x{} = {} is not positive", i + 1, x[i])));
    }
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let d = f64::from(space.dims[i]);
        let mut gain = 0.0;
        let mut loss = 0.0;
        for j in 0..l {
            for k in 0..l {
                let t = space.triple.get(i, j, k);
                if t == 0.0 {
                    continue;
                }
                gain += t * x[k] / x[j];
                loss += t * x[i] * x[i] / (x[j] * x[k]);
            }
        }
        out.push(-space.killing[i] + gain / d - loss / (2.0 * d));
    }
    Ok(out)
}

/// Two-summand field without domain checks.
pub(crate) fn field(c: &FlowCoefficients, x1: f64, x2: f64) -> (f64, f64) {
    let y = x1 / x2;
    match c {
        FlowCoefficients::NonMaximal(c) => (-c.c - c.a * y * y, -c.d + c.b * y),
        FlowCoefficients::Maximal(c) => (
            -c.a1 + c.b1 / y - c.c1 * y * y,
            -c.a2 + c.b2 * y - c.c2 / (y * y),
        ),
    }
}

pub fn rhs_two(state: &MetricState, c: &FlowCoefficients) -> Result<(f64, f64)> {
    match c {
        FlowCoefficients::NonMaximal(_) if !(state.x2 > 0.0) => Err(Error::DomainError(format!(
            "x2 = {} must be positive",
            state.x2
        ))),
        FlowCoefficients::Maximal(_) => {
            state.check()?;
            Ok(field(c, state.x1, state.x2))
        }
        _ => Ok(field(c, state.x1, state.x2)),
    }
}

/// `dy/ds` in the log time `ds = dt / x2`. Its sign is the direction in
/// which `y` moves; its positive zeros are the Einstein directions.
pub fn ratio_rate(c: &FlowCoefficients, y: f64) -> f64 {
    match c {
        FlowCoefficients::NonMaximal(c) => -c.c + c.d * y - (c.a + c.b) * y * y,
        FlowCoefficients::Maximal(c) => {
            let [p0, p1, p2, p3] = c.einstein_cubic();
            (p0 + y * (p1 + y * (p2 + y * p3))) / y
        }
    }
}

pub fn scalar_curvature(state: &MetricState, c: &FlowCoefficients) -> Result<f64> {
    state.check()?;
    let (x1, x2) = (state.x1, state.x2);
    Ok(match c {
        FlowCoefficients::NonMaximal(c) => {
            let (d1, d2) = (f64::from(c.d1), f64::from(c.d2));
            let y = x1 / x2;
            (0.5 * c.c * d1 + 0.5 * c.d * d2 * y - 0.5 * c.a * d1 * y * y) / x1
        }
        FlowCoefficients::Maximal(c) => {
            let (d1, d2) = (f64::from(c.d1), f64::from(c.d2));
            0.5 * c.a1 * d1 / x1 + 0.5 * c.a2 * d2 / x2
                - 0.25 * d1 * c.b1 * x2 / (x1 * x1)
                - 0.25 * d2 * c.b2 * x1 / (x2 * x2)
        }
    })
}

/// Stand-in for `|Rm|`: `1/x1 + 1/x2 + x1/x2^2 + w x2/x1^2` with `w = 1`
/// for maximal spaces and `w = 0` otherwise. Scales like `1/c` under
/// `g -> c g`.
pub fn curvature_proxy(state: &MetricState, c: &FlowCoefficients) -> Result<f64> {
    state.check()?;
    let (x1, x2) = (state.x1, state.x2);
    let w2 = match c {
        FlowCoefficients::NonMaximal(_) => 0.0,
        FlowCoefficients::Maximal(_) => 1.0,
    };
    Ok(1.0 / x1 + 1.0 / x2 + x1 / (x2 * x2) + w2 * x2 / (x1 * x1))
}

/// The conserved quantity of a non-maximal flow with Einstein directions.
///
/// Two simple roots `y1 < y2`:
/// `x2^-1 |y - y1|^(-(B + e)/(A+B)) |y2 - y|^(e/(A+B))` with
/// `e = (D - B y2)/(y2 - y1)`.
///
/// A double root `r`:
/// `x2^-1 exp(-(D - B y)/((A+B)(y - r))) |y - r|^(-B/(A+B))`.
///
/// `None` when there is no Einstein direction or the C = 0 root.
pub fn first_integral(
    state: &MetricState,
    c: &NonMaxCoeffs,
    es: &EinsteinSet,
) -> Result<Option<f64>> {
    state.check()?;
    let y = state.y();
    for r in &es.roots {
        if (y - r.value).abs() < FIRST_INTEGRAL_ROOT_TOL {
            return Err(Error::OnRoot { y, root: r.value });
        }
    }
    let s = c.a + c.b;
    let value = match es.case_label {
        CaseLabel::A => {
            let (y1, y2) = (es.roots[0].value, es.roots[1].value);
            let e = (c.d - c.b * y2) / (y2 - y1);
            let log = -state.x2.ln() - (c.b + e) / s * (y - y1).abs().ln()
                + e / s * (y2 - y).abs().ln();
            log.exp()
        }
        CaseLabel::B => {
            let r = es.roots[0].value;
            let log = -state.x2.ln() - (c.d - c.b * y) / (s * (y - r))
                - c.b / s * (y - r).abs().ln();
            log.exp()
        }
        _ => return Ok(None),
    };
    Ok(Some(value))
}
