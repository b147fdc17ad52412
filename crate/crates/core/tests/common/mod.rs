#![allow(dead_code)]

use hrflow::space::{GeneralSpace, TripleTable, TwoSummandSpace};
use rand::Rng;

fn maybe_zero(rng: &mut impl Rng, hi: f64) -> f64 {
    if rng.random_bool(0.5) {
        0.0
    } else {
        rng.random_range(0.0..hi)
    }
}

/// A valid two-summand space with `[112] = 0`; `c_i >= 0` makes every
/// derived coefficient carry the right sign.
pub fn random_nonmax(rng: &mut impl Rng) -> TwoSummandSpace {
    let d = vec![rng.random_range(1..=12), rng.random_range(1..=12)];
    let triple = TripleTable::zeros(2)
        .with(0, 0, 0, maybe_zero(rng, 3.0))
        .with(0, 1, 1, rng.random_range(0.05..3.0))
        .with(1, 1, 1, maybe_zero(rng, 3.0));
    let c = vec![maybe_zero(rng, 2.0), rng.random_range(0.0..2.0)];
    TwoSummandSpace::new(GeneralSpace::from_casimir("random", d, c, triple)).unwrap()
}

/// A valid two-summand space with `[112], [122] > 0`.
pub fn random_max(rng: &mut impl Rng) -> TwoSummandSpace {
    let d = vec![rng.random_range(1..=12), rng.random_range(1..=12)];
    let triple = TripleTable::zeros(2)
        .with(0, 0, 0, maybe_zero(rng, 3.0))
        .with(0, 0, 1, rng.random_range(0.05..3.0))
        .with(0, 1, 1, rng.random_range(0.05..3.0))
        .with(1, 1, 1, maybe_zero(rng, 3.0));
    let c = vec![rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)];
    TwoSummandSpace::new(GeneralSpace::from_casimir("random", d, c, triple)).unwrap()
}

/// Horner evaluation, ascending coefficients.
pub fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Roots of `p` in `(lo, hi)` found by scanning `n` log-spaced points for
/// sign changes and bisecting each bracket to machine precision. Misses
/// roots of even multiplicity.
pub fn bisection_roots(p: &[f64], lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let pts: Vec<f64> = (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect();
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (mut l, mut h) = (w[0], w[1]);
        let (fl, fh) = (eval(p, l), eval(p, h));
        if fl == 0.0 {
            out.push(l);
            continue;
        }
        if fl.signum() == fh.signum() || fh == 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (l + h);
            if m <= l || m >= h {
                break;
            }
            if eval(p, m).signum() == fl.signum() {
                l = m;
            } else {
                h = m;
            }
        }
        out.push(0.5 * (l + h));
    }
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
