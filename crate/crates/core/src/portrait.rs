//! Vector-field samples on a rectangular grid of metrics, with the
//! separating directions of the phase plane.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::einstein::{
    critical_directions, einstein_roots, scalar_zero_directions, CriticalDirections,
    ScalarZeroDirections,
};
use crate::error::{Error, Result};
use crate::flow::{rhs_two, scalar_curvature, MetricState};
use crate::space::FlowCoefficients;

/// Largest number of points per axis.
pub const MAX_AXIS_POINTS: usize = 4096;

/// Points `lo + i (hi - lo) / n` for `i = 1..=n`, so `lo` itself is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(move |i| self.lo + i as f64 * (self.hi - self.lo) / self.n as f64)
    }
}

/// A grid over `(x1, x2)`, written `lo:hi:n,lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x1: Axis,
    pub x2: Axis,
}

fn parse_axis(text: &str) -> Result<Axis> {
    let bad = |m: &str| Error::InvalidGrid(format!("`{text}`: {m}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad("expected lo:hi:n"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad("hi is not a number"))?;
    let n: usize = n.trim().parse().map_err(|_| bad("n is not a count"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if lo < 0.0 {
        return Err(bad("lo must be nonnegative"));
    }
    if hi <= lo {
        return Err(bad("hi must exceed lo"));
    }
    if n == 0 || n > MAX_AXIS_POINTS {
        return Err(bad("n must be between 1 and 4096"));
    }
    Ok(Axis { lo, hi, n })
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some((a, b)) = s.split_once(',') else {
            return Err(Error::InvalidGrid(format!("`{s}`: expected two axes")));
        };
        Ok(Self {
            x1: parse_axis(a)?,
            x2: parse_axis(b)?,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.x1.lo, self.x1.hi, self.x1.n, self.x2.lo, self.x2.hi, self.x2.n
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `y < D/B`: `x2` decreasing.
    BelowDb,
    OnDb,
    /// `y > D/B`: `x2` increasing.
    AboveDb,
    /// `y < y~1`.
    X1,
    /// `y~1 < y < y~2`: both coefficients decreasing.
    X2,
    /// `y > y~2`.
    X3,
    /// On `y = y~1` or `y = y~2`.
    Boundary,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::BelowDb => "y<D/B",
            Region::OnDb => "y=D/B",
            Region::AboveDb => "y>D/B",
            Region::X1 => "X1",
            Region::X2 => "X2",
            Region::X3 => "X3",
            Region::Boundary => "boundary",
        }
    }
}

/// Separating directions of the phase plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitLines {
    pub einstein: Vec<f64>,
    /// `D/B`, non-maximal only.
    pub d_over_b: Option<f64>,
    /// Maximal only.
    pub critical: Option<CriticalDirections>,
    pub scalar_zero: ScalarZeroDirections,
}

pub fn portrait_lines(c: &FlowCoefficients) -> PortraitLines {
    let (d_over_b, critical) = match c {
        FlowCoefficients::NonMaximal(c) => (Some(c.d / c.b), None),
        FlowCoefficients::Maximal(c) => (None, Some(critical_directions(c))),
    };
    PortraitLines {
        einstein: einstein_roots(c).values(),
        d_over_b,
        critical,
        scalar_zero: scalar_zero_directions(c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitRow {
    pub x1: f64,
    pub x2: f64,
    pub dx1: f64,
    pub dx2: f64,
    /// `dy/dt`; zero on Einstein directions.
    pub dy: f64,
    pub r_sign: i8,
    pub region: Region,
}

pub const PORTRAIT_HEADER: &str = "x1,x2,dx1,dx2,dy,R_sign,region";

fn r_sign(state: &MetricState, c: &FlowCoefficients) -> Result<i8> {
    let r = scalar_curvature(state, c)?;
    let (x1, x2) = (state.x1, state.x2);
    // Magnitude of the largest term, for a relative zero test.
    let scale = match c {
        FlowCoefficients::NonMaximal(c) => {
            let y = x1 / x2;
            (c.c.abs() + c.d * y + c.a * y * y) * f64::from(c.d1.max(c.d2)) / x1
        }
        FlowCoefficients::Maximal(c) => {
            (c.a1 / x1 + c.a2 / x2 + c.b1 * x2 / (x1 * x1) + c.b2 * x1 / (x2 * x2))
                * f64::from(c.d1.max(c.d2))
        }
    };
    Ok(if r.abs() <= 1e-12 * scale {
        0
    } else if r > 0.0 {
        1
    } else {
        -1
    })
}

fn region(y: f64, lines: &PortraitLines) -> Region {
    let tol = 1e-12;
    if let Some(db) = lines.d_over_b {
        if (y - db).abs() <= tol * db {
            Region::OnDb
        } else if y < db {
            Region::BelowDb
        } else {
            Region::AboveDb
        }
    } else if let Some(cd) = lines.critical {
        let near = |v: f64| (y - v).abs() <= tol * v;
        if near(cd.y_tilde_1) || near(cd.y_tilde_2) {
            Region::Boundary
        } else if y < cd.y_tilde_1 {
            Region::X1
        } else if y < cd.y_tilde_2 {
            Region::X2
        } else {
            Region::X3
        }
    } else {
        unreachable!("lines carry either D/B or the critical directions")
    }
}

/// One row per grid point, `x1` varying fastest.
pub fn sample_portrait(c: &FlowCoefficients, grid: &GridSpec) -> Result<(Vec<PortraitRow>, PortraitLines)> {
    let lines = portrait_lines(c);
    let mut rows = Vec::with_capacity(grid.x1.n * grid.x2.n);
    for x2 in grid.x2.points() {
        for x1 in grid.x1.points() {
            let state = MetricState::new(0.0, x1, x2);
            let (dx1, dx2) = rhs_two(&state, c)?;
            let y = x1 / x2;
            rows.push(PortraitRow {
                x1,
                x2,
                dx1,
                dx2,
                dy: (dx1 - y * dx2) / x2,
                r_sign: r_sign(&state, c)?,
                region: region(y, &lines),
            });
        }
    }
    Ok((rows, lines))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn coeffs(s: &crate::space::TwoSummandSpace) -> FlowCoefficients {
        FlowCoefficients::derive(s).unwrap()
    }

    #[test]
    fn parses_and_formats() {
        let g: GridSpec = "0:2:50,0:2:50".parse().unwrap();
        assert_eq!(g.x1.n, 50);
        let pts: Vec<f64> = g.x1.points().collect();
        assert_eq!(pts[0], 0.04);
        assert_eq!(*pts.last().unwrap(), 2.0);
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn rejects_bad_grids() {
        for s in [
            "", "0:2:50", "0:2:50,0:2", "2:0:5,0:1:5", "-1:1:5,0:1:5", "0:1:0,0:1:5",
            "0:1:5000,0:1:5", "0:inf:5,0:1:5", "0:1:x,0:1:5", "0:1:5,0:1:5,0:1:5",
        ] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn su42_positive_below_scalar_zero() {
        let c = coeffs(&catalog::su42());
        let (rows, lines) = sample_portrait(&c, &"0:2:50,0:2:50".parse().unwrap()).unwrap();
        let ybar = lines.scalar_zero.positive_roots[0];
        assert!((ybar - 6.54).abs() < 0.01, "{ybar}");
        assert_eq!(rows.len(), 2500);
        for r in rows.iter().filter(|r| r.x1 / r.x2 < ybar) {
            assert_eq!(r.r_sign, 1, "{r:?}");
        }
    }

    #[test]
    fn maximal_middle_band_decreases() {
        let c = coeffs(&catalog::fix_d());
        let (rows, lines) = sample_portrait(&c, &"0:3:30,0:3:30".parse().unwrap()).unwrap();
        assert!(lines.critical.is_some());
        let mut seen = 0;
        for r in &rows {
            if r.region == Region::X2 {
                seen += 1;
                assert!(r.dx1 < 0.0 && r.dx2 < 0.0, "{r:?}");
            }
            if r.region == Region::X1 {
                assert!(r.dx1 > 0.0);
            }
            if r.region == Region::X3 {
                assert!(r.dx2 > 0.0);
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn einstein_line_is_fixed() {
        let c = coeffs(&catalog::fix_a());
        let (rows, _) = sample_portrait(&c, &"0:2:4,0:2:4".parse().unwrap()).unwrap();
        for r in rows.iter().filter(|r| r.x1 == r.x2) {
            assert_eq!(r.dy, 0.0);
            assert_eq!(r.region, Region::BelowDb);
        }
    }
}
