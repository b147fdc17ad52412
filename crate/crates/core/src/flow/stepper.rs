//! Single steps of the Dormand-Prince 5(4) pair and of classical RK4, with
//! continuous extensions for event location.

/// Vector field on an open domain; `None` outside it.
pub trait Field<const N: usize> {
    fn eval(&self, x: &[f64; N]) -> Option<[f64; N]>;
}

impl<const N: usize, F: Fn(&[f64; N]) -> Option<[f64; N]>> Field<N> for F {
    fn eval(&self, x: &[f64; N]) -> Option<[f64; N]> {
        self(x)
    }
}


const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn comb<const N: usize>(x: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *x;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (w, k) in terms {
            s += w * k[i];
        }
        *o += h * s;
    }
    out
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
pub enum Dense<const N: usize> {
    Dopri { r: [[f64; N]; 5] },
    Hermite { x0: [f64; N], x1: [f64; N], f0: [f64; N], f1: [f64; N], h: f64 },
}

impl<const N: usize> Dense<N> {
    /// State at fraction `theta` in `[0, 1]` of the step.
    pub fn at(&self, theta: f64) -> [f64; N] {
        let mut out = [0.0; N];
        match self {
            Dense::Dopri { r } => {
                let t1 = 1.0 - theta;
                for i in 0..N {
                    out[i] = r[0][i]
                        + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
                }
            }
            Dense::Hermite { x0, x1, f0, f1, h } => {
                let t = theta;
                let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                let h10 = t * (1.0 - t) * (1.0 - t);
                let h01 = t * t * (3.0 - 2.0 * t);
                let h11 = t * t * (t - 1.0);
                for i in 0..N {
                    out[i] = h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i];
                }
            }
        }
        out
    }
}

pub struct Step<const N: usize> {
    pub x: [f64; N],
    pub f: [f64; N],
    /// Scaled error norm; a step is acceptable when this is at most 1.
    pub err: f64,
    pub dense: Dense<N>,
}

/// One Dormand-Prince step from `x` with derivative `f0`. Returns `None` if
/// any stage leaves the domain of the field.
pub fn dopri_step<const N: usize>(
    field: &impl Field<N>,
    x: &[f64; N],
    f0: &[f64; N],
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Option<Step<N>> {
    let k1 = *f0;
    let k2 = field.eval(&comb(x, h, &[(A21, &k1)]))?;
    let k3 = field.eval(&comb(x, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = field.eval(&comb(x, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = field.eval(&comb(x, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = field.eval(&comb(
        x,
        h,
        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ))?;
    let x_new = comb(
        x,
        h,
        &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = field.eval(&x_new)?;
    let zero = [0.0; N];
    let e = comb(
        &zero,
        h,
        &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
    );
    let mut sq = 0.0;
    for i in 0..N {
        let sc = abs_tol + rel_tol * x[i].abs().max(x_new[i].abs());
        sq += (e[i] / sc).powi(2);
    }
    let err = (sq / N as f64).sqrt();

    let mut r = [[0.0; N]; 5];
    for i in 0..N {
        let diff = x_new[i] - x[i];
        let bspl = h * k1[i] - diff;
        r[0][i] = x[i];
        r[1][i] = diff;
        r[2][i] = bspl;
        r[3][i] = diff - h * k7[i] - bspl;
        r[4][i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Some(Step {
        x: x_new,
        f: k7,
        err,
        dense: Dense::Dopri { r },
    })
}

/// One classical fourth-order step; `err` is always zero.
pub fn rk4_step<const N: usize>(
    field: &impl Field<N>,
    x: &[f64; N],
    f0: &[f64; N],
    h: f64,
) -> Option<Step<N>> {
    let k1 = *f0;
    let k2 = field.eval(&comb(x, h, &[(0.5, &k1)]))?;
    let k3 = field.eval(&comb(x, h, &[(0.5, &k2)]))?;
    let k4 = field.eval(&comb(x, h, &[(1.0, &k3)]))?;
    let x_new = comb(
        x,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    );
    let f = field.eval(&x_new)?;
    Some(Step {
        x: x_new,
        f,
        err: 0.0,
        dense: Dense::Hermite {
            x0: *x,
            x1: x_new,
            f0: k1,
            f1: f,
            h,
        },
    })
}
