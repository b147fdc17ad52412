//! Invariant Einstein metrics, critical directions and scalar-curvature zero
//! directions, all as roots of low-degree polynomials in `y = x1/x2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, Root, MERGE_TOL};
use crate::space::{FlowCoefficients, MaxCoeffs, NonMaxCoeffs};

/// Relative residual accepted for the shrink-rate system.
pub const SCALE_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Non-maximal, two simple roots.
    A,
    /// Non-maximal, one double root.
    B,
    /// Non-maximal, no root.
    C,
    /// Non-maximal with `C = 0`: the single root `D / (A + B)`.
    C0,
    /// Maximal, three distinct roots.
    D,
    /// Maximal, a simple and a double root.
    E,
    /// Maximal, one distinct root (simple or triple).
    F,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::A => "a",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
            CaseLabel::C0 => "C0",
            CaseLabel::D => "d",
            CaseLabel::E => "e",
            CaseLabel::F => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EinsteinSet {
    pub roots: Vec<Root>,
    pub case_label: CaseLabel,
}

impl EinsteinSet {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Index of a root within `tol` of `y`.
    pub fn root_near(&self, y: f64, tol: f64) -> Option<usize> {
        self.roots.iter().position(|r| (r.value - y).abs() <= tol)
    }

    /// Index of the root closest to `y`.
    pub fn nearest(&self, y: f64) -> Option<usize> {
        self.roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.value - y).abs().total_cmp(&(b.1.value - y).abs()))
            .map(|(i, _)| i)
    }
}

/// Positive roots of `C - D y + (A + B) y^2`.
pub fn quadratic_einstein_roots(c: &NonMaxCoeffs) -> EinsteinSet {
    if c.c == 0.0 {
        return EinsteinSet {
            roots: vec![Root {
                value: c.d / (c.a + c.b),
                multiplicity: 1,
            }],
            case_label: CaseLabel::C0,
        };
    }
    let roots: Vec<Root> = poly::quadratic_roots(c.c, -c.d, c.a + c.b, MERGE_TOL)
        .into_iter()
        .filter(|r| r.value > 0.0)
        .collect();
    let case_label = match roots.as_slice() {
        [] => CaseLabel::C,
        [r] if r.multiplicity == 2 => CaseLabel::B,
        _ => CaseLabel::A,
    };
    EinsteinSet { roots, case_label }
}

/// Real roots of `-(B2 + C1) y^3 + A2 y^2 - A1 y + (B1 + C2)`; all are
/// positive for valid coefficients.
pub fn cubic_einstein_roots(c: &MaxCoeffs) -> EinsteinSet {
    let roots = poly::real_roots(&c.einstein_cubic(), MERGE_TOL);
    let case_label = match roots.len() {
        3 => CaseLabel::D,
        2 => CaseLabel::E,
        _ => CaseLabel::F,
    };
    EinsteinSet { roots, case_label }
}

pub fn einstein_roots(c: &FlowCoefficients) -> EinsteinSet {
    match c {
        FlowCoefficients::NonMaximal(c) => quadratic_einstein_roots(c),
        FlowCoefficients::Maximal(c) => cubic_einstein_roots(c),
    }
}

/// Einstein polynomial value and its monomial scale at `y`.
pub fn einstein_residual(c: &FlowCoefficients, y: f64) -> (f64, f64) {
    let coeffs: Vec<f64> = match c {
        FlowCoefficients::NonMaximal(c) => vec![c.c, -c.d, c.a + c.b],
        FlowCoefficients::Maximal(c) => c.einstein_cubic().to_vec(),
    };
    (poly::eval(&coeffs, y), poly::monomial_scale(&coeffs, y))
}

/// Decay slopes `(k1, k2)` of the shrinking solution `x_i = k_i (T - t)`
/// along the Einstein direction `root`. `k2` comes from the `x2` equation,
/// `k1 = root * k2`, and the `x1` equation is checked as a residual.
pub fn einstein_scale_constants(c: &FlowCoefficients, root: f64) -> Result<(f64, f64)> {
    if !(root > 0.0) {
        return Err(Error::NotAnEinsteinRoot {
            y: root,
            residual: f64::INFINITY,
        });
    }
    let (k2, k1_from_x1) = match c {
        FlowCoefficients::NonMaximal(c) => (c.d - c.b * root, c.c + c.a * root * root),
        FlowCoefficients::Maximal(c) => (
            c.a2 - c.b2 * root + c.c2 / (root * root),
            c.a1 - c.b1 / root + c.c1 * root * root,
        ),
    };
    let k1 = root * k2;
    let residual = (k1_from_x1 - k1).abs() / k1.abs().max(k1_from_x1.abs());
    if !(k2 > 0.0) || !(k1 > 0.0) || !(residual <= SCALE_RESIDUAL_TOL) {
        return Err(Error::NotAnEinsteinRoot { y: root, residual });
    }
    Ok((k1, k2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalDirections {
    /// Root of `g1 = -C1 y^3 - A1 y + B1`, where `x1' = 0`.
    pub y_tilde_1: f64,
    /// Root of `g2 = B2 y^3 - A2 y^2 - C2`, where `x2' = 0`.
    pub y_tilde_2: f64,
}

pub fn g1(c: &MaxCoeffs, y: f64) -> f64 {
    -c.c1 * y * y * y - c.a1 * y + c.b1
}

pub fn g2(c: &MaxCoeffs, y: f64) -> f64 {
    c.b2 * y * y * y - c.a2 * y * y - c.c2
}

fn unique_positive(coeffs: &[f64]) -> f64 {
    poly::real_roots(coeffs, MERGE_TOL)
        .into_iter()
        .map(|r| r.value)
        .filter(|&v| v > 0.0)
        .fold(f64::NAN, |acc, v| if acc.is_nan() { v } else { acc.max(v) })
}

pub fn critical_directions(c: &MaxCoeffs) -> CriticalDirections {
    let y_tilde_1 = unique_positive(&[c.b1, -c.a1, 0.0, -c.c1]);
    let y_tilde_2 = unique_positive(&[-c.c2, 0.0, -c.a2, c.b2]);
    debug_assert!(y_tilde_1 < y_tilde_2);
    CriticalDirections {
        y_tilde_1,
        y_tilde_2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarZeroDirections {
    pub positive_roots: Vec<f64>,
    pub negative_roots: Vec<f64>,
    /// `y = 0` solves the equation (non-maximal with `C = 0`).
    pub zero_root: bool,
}

/// Directions `y` where the scalar curvature vanishes.
pub fn scalar_zero_directions(c: &FlowCoefficients) -> ScalarZeroDirections {
    match c {
        FlowCoefficients::NonMaximal(c) => {
            let d1 = f64::from(c.d1);
            let d2 = f64::from(c.d2);
            if c.c == 0.0 {
                return ScalarZeroDirections {
                    positive_roots: vec![2.0 * c.d / c.b],
                    negative_roots: Vec::new(),
                    zero_root: true,
                };
            }
            // C d1/2 + D d2/2 y - A d1/2 y^2 = 0, solved directly in y.
            let roots = poly::quadratic_roots(0.5 * c.c * d1, 0.5 * c.d * d2, -0.5 * c.a * d1, 0.0);
            split_signs(&roots)
        }
        FlowCoefficients::Maximal(c) => {
            let d1 = f64::from(c.d1);
            let d2 = f64::from(c.d2);
            let coeffs = [
                -0.25 * d1 * c.b1,
                0.5 * d1 * c.a1,
                0.5 * d2 * c.a2,
                -0.25 * d2 * c.b2,
            ];
            split_signs(&poly::real_roots(&coeffs, MERGE_TOL))
        }
    }
}

fn split_signs(roots: &[Root]) -> ScalarZeroDirections {
    ScalarZeroDirections {
        positive_roots: roots.iter().map(|r| r.value).filter(|&v| v > 0.0).collect(),
        negative_roots: roots.iter().map(|r| r.value).filter(|&v| v < 0.0).collect(),
        zero_root: roots.iter().any(|r| r.value == 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::space::{derive_maximal_coeffs, derive_nonmaximal_coeffs};

    fn nonmax(space: &crate::space::TwoSummandSpace) -> NonMaxCoeffs {
        derive_nonmaximal_coeffs(space).unwrap()
    }

    #[test]
    fn su42_has_no_einstein_metric() {
        let es = quadratic_einstein_roots(&nonmax(&catalog::su42()));
        assert!(es.is_empty());
        assert_eq!(es.case_label, CaseLabel::C);
    }

    #[test]
    fn fix_a_and_fix_b_roots() {
        let es = quadratic_einstein_roots(&nonmax(&catalog::fix_a()));
        assert_eq!(es.case_label, CaseLabel::A);
        assert!((es.roots[0].value - 0.5).abs() < 1e-15);
        assert!((es.roots[1].value - 1.0).abs() < 1e-15);

        let es = quadratic_einstein_roots(&nonmax(&catalog::fix_b()));
        assert_eq!(es.case_label, CaseLabel::B);
        assert_eq!(es.roots.len(), 1);
        assert_eq!(es.roots[0].multiplicity, 2);
        assert!((es.roots[0].value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fix_d_cubic_roots() {
        let es = cubic_einstein_roots(&derive_maximal_coeffs(&catalog::fix_d()).unwrap());
        assert_eq!(es.case_label, CaseLabel::D);
        for (r, e) in es.roots.iter().zip([0.5, 1.0, 2.0]) {
            assert!((r.value - e).abs() < 1e-13);
        }
    }

    #[test]
    fn fix_e_fixtures_have_a_double_root() {
        for (space, double_above) in [(catalog::fix_e1(), true), (catalog::fix_e2(), false)] {
            let es = cubic_einstein_roots(&derive_maximal_coeffs(&space).unwrap());
            assert_eq!(es.case_label, CaseLabel::E, "{}", space.name());
            let double = es.roots.iter().position(|r| r.multiplicity == 2).unwrap();
            assert_eq!(double == 1, double_above);
        }
        let es = cubic_einstein_roots(&derive_maximal_coeffs(&catalog::fix_f()).unwrap());
        assert_eq!(es.case_label, CaseLabel::F);
    }

    #[test]
    fn scale_constants_fix_a() {
        let c = FlowCoefficients::from(nonmax(&catalog::fix_a()));
        let (k1, k2) = einstein_scale_constants(&c, 1.0).unwrap();
        assert!((k1 - 2.0).abs() < 1e-15 && (k2 - 2.0).abs() < 1e-15);
        let (k1, k2) = einstein_scale_constants(&c, 0.5).unwrap();
        assert!((k1 - 1.25).abs() < 1e-15 && (k2 - 2.5).abs() < 1e-15);
        assert!(matches!(
            einstein_scale_constants(&c, 0.75),
            Err(Error::NotAnEinsteinRoot { .. })
        ));
    }

    #[test]
    fn scalar_zero_su42() {
        let c = FlowCoefficients::from(nonmax(&catalog::su42()));
        let z = scalar_zero_directions(&c);
        assert_eq!(z.positive_roots.len(), 1);
        assert_eq!(z.negative_roots.len(), 1);
        assert!((z.positive_roots[0] - 6.54).abs() < 5e-3);
        assert!(20.0 / 7.0 < z.positive_roots[0]);
    }

    #[test]
    fn scalar_zero_c0() {
        let c = FlowCoefficients::from(nonmax(&catalog::c0_fixture()));
        let z = scalar_zero_directions(&c);
        assert!(z.zero_root);
        assert_eq!(z.positive_roots, vec![6.0]);
    }

    #[test]
    fn critical_directions_fix_d() {
        let c = derive_maximal_coeffs(&catalog::fix_d()).unwrap();
        let cd = critical_directions(&c);
        assert!((cd.y_tilde_1 - 0.1427).abs() < 1e-4);
        assert!((cd.y_tilde_2 - 4.41).abs() < 5e-3);
        assert!(g1(&c, cd.y_tilde_1).abs() < 1e-14);
        assert!(g2(&c, cd.y_tilde_2).abs() < 1e-12);
        assert!(cd.y_tilde_1 < 0.5 && 2.0 < cd.y_tilde_2);
        assert_eq!(g1(&c, 0.0), c.b1);
        assert_eq!(g2(&c, 0.0), -c.c2);
    }
}
