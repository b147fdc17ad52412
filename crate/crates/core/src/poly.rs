//! Real roots of polynomials of degree at most three.
//!
//! Quadratics use the closed form. Cubics are split into monotone pieces at
//! the critical points and each sign change is refined by a bracketed
//! Newton/bisection hybrid. Roots closer than `merge_tol * (1 + |r|)` are
//! reported once with their multiplicity; a critical point whose value is
//! small enough that the nearby pair of roots would be that close is reported
//! as a double root even when the pair is numerically complex.

use serde::{Deserialize, Serialize};

/// Default multiplicity merge tolerance.
pub const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

/// Horner evaluation; coefficients in ascending powers.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// Largest monomial magnitude `max_i |a_i x^i|`, the natural scale for a
/// residual at `x`.
pub fn monomial_scale(coeffs: &[f64], x: f64) -> f64 {
    let mut p = 1.0;
    let mut m: f64 = 0.0;
    for &c in coeffs {
        m = m.max((c * p).abs());
        p *= x;
    }
    m
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol * (1.0 + a.abs().max(b.abs()))
}

/// All real roots, sorted ascending, with multiplicities.
pub fn real_roots(coeffs: &[f64], merge_tol: f64) -> Vec<Root> {
    let p = trimmed(coeffs);
    match p.len() {
        0 | 1 => Vec::new(),
        2 => vec![Root {
            value: -p[0] / p[1],
            multiplicity: 1,
        }],
        3 => quadratic_roots(p[0], p[1], p[2], merge_tol),
        4 => cubic_roots([p[0], p[1], p[2], p[3]], merge_tol),
        n => panic!("degree {} polynomials are not supported", n - 1),
    }
}

/// Roots of `a0 + a1 x + a2 x^2` with `a2 != 0`.
pub fn quadratic_roots(a0: f64, a1: f64, a2: f64, merge_tol: f64) -> Vec<Root> {
    let vertex = -a1 / (2.0 * a2);
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let split = disc.abs().sqrt() / a2.abs();
    if split < merge_tol * (1.0 + vertex.abs()) {
        return vec![Root {
            value: vertex,
            multiplicity: 2,
        }];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    // Cancellation-free pair: q = -(a1 + sign(a1) sqrt(disc)) / 2.
    let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a2, a0 / q)
    };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    vec![
        Root {
            value: lo,
            multiplicity: 1,
        },
        Root {
            value: hi,
            multiplicity: 1,
        },
    ]
}

/// Refines a root of `p` inside `[lo, hi]` where `p(lo)` and `p(hi)` have
/// opposite signs and `p` is monotone.
pub fn refine_bracketed(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let dp = derivative(p);
    let mut f_lo = eval(p, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = eval(p, x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let d = eval(&dp, x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if x == lo || x == hi {
            break;
        }
    }
    x
}

fn cubic_roots(p: [f64; 4], merge_tol: f64) -> Vec<Root> {
    let a3 = p[3];
    // Triple root: p ~ a3 (x - c)^3 within the merge radius of the inflection point.
    let inflection = -p[2] / (3.0 * a3);
    let delta = merge_tol * (1.0 + inflection.abs());
    let dp = derivative(&p);
    let slope = eval(&dp, inflection) / a3;
    let value = eval(&p, inflection) / a3;
    if slope.abs() <= delta * delta && value.abs() <= delta * delta * delta {
        return vec![Root {
            value: inflection,
            multiplicity: 3,
        }];
    }

    let crit: Vec<f64> = {
        let disc = dp[1] * dp[1] - 4.0 * dp[2] * dp[0];
        if disc <= 0.0 {
            Vec::new()
        } else {
            let q = -0.5 * (dp[1] + dp[1].signum() * disc.sqrt());
            let mut c = vec![q / dp[2], dp[0] / q];
            c.sort_by(|a, b| a.total_cmp(b));
            c
        }
    };

    let bound = 1.0 + (0..3).map(|i| (p[i] / a3).abs()).fold(0.0, f64::max);
    let mut breaks = vec![-bound];
    breaks.extend(crit.iter().copied().filter(|c| c.abs() < bound));
    breaks.push(bound);

    // (value, is_touch)
    let mut candidates: Vec<(f64, bool)> = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (f_lo, f_hi) = (eval(&p, lo), eval(&p, hi));
        if f_lo * f_hi < 0.0 {
            candidates.push((refine_bracketed(&p, lo, hi), false));
        }
    }
    let ddp = derivative(&dp);
    for &c in &crit {
        let curv = eval(&ddp, c);
        if curv == 0.0 {
            continue;
        }
        let split = (2.0 * eval(&p, c).abs() / curv.abs()).sqrt();
        if split < merge_tol * (1.0 + c.abs()) {
            candidates.push((c, true));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out: Vec<Root> = Vec::new();
    let mut i = 0;
    while i < candidates.len() {
        let mut j = i + 1;
        while j < candidates.len() && near(candidates[j - 1].0, candidates[j].0, merge_tol) {
            j += 1;
        }
        let cluster = &candidates[i..j];
        let simple = cluster.iter().filter(|c| !c.1).count();
        let touch = cluster.iter().find(|c| c.1).map(|c| c.0);
        let multiplicity = simple.max(if touch.is_some() { 2 } else { 0 }).min(3) as u8;
        let value = touch.unwrap_or_else(|| {
            cluster.iter().map(|c| c.0).sum::<f64>() / cluster.len() as f64
        });
        out.push(Root {
            value,
            multiplicity,
        });
        i = j;
    }
    out
}
