//! Closed-form flows: one isotropy irreducible summand, and products of such.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::GeneralSpace;

/// `x(t) = x0 - C t` with `C = b - [111]/(2d)`, vanishing at `T = x0 / C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreducibleFlow {
    pub c_irr: f64,
    pub x0: f64,
    pub t_sing: f64,
}

impl IrreducibleFlow {
    /// Defined on `(-inf, T]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t > self.t_sing || t.is_nan() {
            return Err(Error::OutOfRange {
                t,
                lo: f64::NEG_INFINITY,
                hi: self.t_sing,
            });
        }
        if t == self.t_sing {
            return Ok(0.0);
        }
        Ok((self.x0 - self.c_irr * t).max(0.0))
    }
}

pub fn irreducible_flow(b: f64, d: u32, t111: f64, x0: f64) -> Result<IrreducibleFlow> {
    if d == 0 || !(x0 > 0.0) {
        return Err(Error::DomainError(format!("need d >= 1 and x0 > 0, got d = {d}, x0 = {x0}")));
    }
    let c_irr = b - t111 / (2.0 * f64::from(d));
    if !(c_irr > 0.0) {
        return Err(Error::NonpositiveC(c_irr));
    }
    Ok(IrreducibleFlow {
        c_irr,
        x0,
        t_sing: x0 / c_irr,
    })
}

/// Independent linear flows on a space whose only nonzero structure
/// constants are the diagonal `[iii]`.
pub fn product_flow(space: &GeneralSpace, x0: &[f64]) -> Result<Vec<IrreducibleFlow>> {
    let l = space.summands();
    if x0.len() != l {
        return Err(Error::DomainError(format!(
            "{} initial values for {} summands",
            x0.len(),
            l
        )));
    }
    for (i, j, k, _) in space.triple.representatives() {
        if !(i == j && j == k) {
            return Err(Error::InvalidSpace(format!(
                "[{}{}{}] couples summands; not a product",
                i + 1,
                j + 1,
                k + 1
            )));
        }
    }
    (0..l)
        .map(|i| irreducible_flow(space.killing[i], space.dims[i], space.triple.get(i, i, i), x0[i]))
        .collect()
}
