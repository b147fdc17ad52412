//! Homogeneous spaces as structure-constant tables.
//!
//! A space with `l` pairwise inequivalent irreducible isotropy summands is
//! described by the summand dimensions `d_i`, the Killing coefficients `b_i`
//! of the background metric `Q`, the Casimir constants `c_i` and the fully
//! symmetric structure constants `[ijk]`. These are tied together by
//!
//! ```text
//! d_i b_i = 2 d_i c_i + sum_{j,k} [ijk]
//! ```
//!
//! Indices in this module are zero-based: `triple.get(0, 1, 1)` is `[122]`.

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the Casimir relation and the coefficient identities.
pub const RELATION_TOL: f64 = 1e-12;

/// Largest summand count accepted from external input.
pub const MAX_SUMMANDS: usize = 32;

/// Dense `l x l x l` table of structure constants. Storage is raw so that an
/// asymmetric table can be represented and reported by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TripleTable {
    l: usize,
    values: Vec<f64>,
}

impl TripleTable {
    pub fn zeros(l: usize) -> Self {
        Self {
            l,
            values: vec![0.0; l * l * l],
        }
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        assert!(i < self.l && j < self.l && k < self.l, "triple index out of range");
        (i * self.l + j) * self.l + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// Sets a single ordered entry, leaving its permutations untouched.
    pub fn set_raw(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let idx = self.index(i, j, k);
        self.values[idx] = value;
    }

    /// Sets `[ijk]` and every permutation of it.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.set_raw(a, b, c, value);
        }
    }

    pub fn with(mut self, i: usize, j: usize, k: usize, value: f64) -> Self {
        self.set(i, j, k, value);
        self
    }

    /// `sum_{j,k} [ijk]` over ordered pairs.
    pub fn row_sum(&self, i: usize) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.l {
            for k in 0..self.l {
                sum += self.get(i, j, k);
            }
        }
        sum
    }

    /// Unordered representatives `i <= j <= k` with nonzero value.
    pub fn representatives(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.l {
            for j in i..self.l {
                for k in j..self.l {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }
}

/// A homogeneous space with `l` monotypic isotropy summands.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSpace {
    pub name: String,
    pub dims: Vec<u32>,
    pub killing: Vec<f64>,
    pub casimir: Vec<f64>,
    pub triple: TripleTable,
}

impl GeneralSpace {
    pub fn new(
        name: impl Into<String>,
        dims: Vec<u32>,
        killing: Vec<f64>,
        casimir: Vec<f64>,
        triple: TripleTable,
    ) -> Self {
        Self {
            name: name.into(),
            dims,
            killing,
            casimir,
            triple,
        }
    }

    /// Builds a space from `b_i`, solving the Casimir relation for `c_i`.
    pub fn from_killing(
        name: impl Into<String>,
        dims: Vec<u32>,
        killing: Vec<f64>,
        triple: TripleTable,
    ) -> Self {
        let casimir = dims
            .iter()
            .zip(&killing)
            .enumerate()
            .map(|(i, (&d, &b))| {
                let d = f64::from(d);
                (d * b - triple.row_sum(i)) / (2.0 * d)
            })
            .collect();
        Self::new(name, dims, killing, casimir, triple)
    }

    /// Builds a space from `c_i`, solving the Casimir relation for `b_i`.
    pub fn from_casimir(
        name: impl Into<String>,
        dims: Vec<u32>,
        casimir: Vec<f64>,
        triple: TripleTable,
    ) -> Self {
        let killing = dims
            .iter()
            .zip(&casimir)
            .enumerate()
            .map(|(i, (&d, &c))| {
                let d = f64::from(d);
                (2.0 * d * c + triple.row_sum(i)) / d
            })
            .collect();
        Self::new(name, dims, killing, casimir, triple)
    }

    pub fn summands(&self) -> usize {
        self.dims.len()
    }

    pub fn dimension(&self) -> u32 {
        self.dims.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Shape,
    NonFinite,
    Dimension,
    Killing,
    Casimir,
    TripleSign,
    TripleSymmetry,
    CasimirRelation,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Shape => "shape",
            Rule::NonFinite => "non-finite",
            Rule::Dimension => "dimension",
            Rule::Killing => "killing",
            Rule::Casimir => "casimir",
            Rule::TripleSign => "triple-sign",
            Rule::TripleSymmetry => "triple-symmetry",
            Rule::CasimirRelation => "casimir-relation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub message: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{}: {}", v.rule.id(), v.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks shape, sign bounds, symmetry of `[ijk]` and the Casimir relation.
/// Every violation is collected; nothing is thrown.
pub fn validate(space: &GeneralSpace) -> ValidationReport {
    let mut out = Vec::new();
    let l = space.dims.len();
    fn push(out: &mut Vec<Violation>, rule: Rule, message: String, magnitude: f64) {
        out.push(Violation {
            rule,
            message,
            magnitude,
        })
    }

    if l == 0 {
        push(&mut out, Rule::Shape, "no summands".into(), 0.0);
        return ValidationReport::from_violations(out);
    }
    if space.killing.len() != l || space.casimir.len() != l || space.triple.len() != l {
        push(
            &mut out,
            Rule::Shape,
            format!(
                "array lengths d={}, b={}, c={}, triple={} disagree",
                l,
                space.killing.len(),
                space.casimir.len(),
                space.triple.len()
            ),
            0.0,
        );
        return ValidationReport::from_violations(out);
    }

    for i in 0..l {
        let n = i + 1;
        if space.dims[i] == 0 {
            push(&mut out, Rule::Dimension, format!("d{n} must be at least 1"), 1.0);
        }
        let b = space.killing[i];
        if !b.is_finite() {
            push(&mut out, Rule::NonFinite, format!("b{n} is not finite"), f64::INFINITY);
        } else if b <= 0.0 {
            push(&mut out, Rule::Killing, format!("b{n} = {b} must be positive"), -b);
        }
        let c = space.casimir[i];
        if !c.is_finite() {
            push(&mut out, Rule::NonFinite, format!("c{n} is not finite"), f64::INFINITY);
        } else if c < 0.0 {
            push(&mut out, Rule::Casimir, format!("c{n} = {c} must be nonnegative"), -c);
        }
    }

    for i in 0..l {
        for j in 0..l {
            for k in 0..l {
                let v = space.triple.get(i, j, k);
                let label = format!("[{}{}{}]", i + 1, j + 1, k + 1);
                if !v.is_finite() {
                    push(&mut out, Rule::NonFinite, format!("{label} is not finite"), f64::INFINITY);
                    continue;
                }
                if v < 0.0 {
                    push(&mut out, Rule::TripleSign, format!("{label} = {v} is negative"), -v);
                }
                // Compare each entry only against permutations that sort after it.
                for (a, b, c) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    if (a, b, c) <= (i, j, k) {
                        continue;
                    }
                    let w = space.triple.get(a, b, c);
                    if w != v && w.is_finite() {
                        let scale = v.abs().max(w.abs());
                        if (v - w).abs() > RELATION_TOL * scale {
                            push(
                                &mut out,
                                Rule::TripleSymmetry,
                                format!(
                                    "triple not symmetric: {label} = {v} but [{}{}{}] = {w}",
                                    a + 1,
                                    b + 1,
                                    c + 1
                                ),
                                (v - w).abs(),
                            );
                        }
                    }
                }
            }
        }
    }

    if out.iter().any(|v| v.rule == Rule::NonFinite || v.rule == Rule::Dimension) {
        return ValidationReport::from_violations(out);
    }

    for i in 0..l {
        let d = f64::from(space.dims[i]);
        let lhs = d * space.killing[i];
        let sum = space.triple.row_sum(i);
        let rhs = 2.0 * d * space.casimir[i] + sum;
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let rel = (lhs - rhs).abs() / scale;
        if rel > RELATION_TOL {
            push(
                &mut out,
                Rule::CasimirRelation,
                format!(
                    "d{n} b{n} = {lhs} but 2 d{n} c{n} + sum[{n}jk] = {rhs}",
                    n = i + 1
                ),
                rel,
            );
        }
    }

    ValidationReport::from_violations(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// `[112] = 0`: an intermediate subalgebra `k + p1` exists.
    NonMaximal,
    /// `[112] > 0` and `[122] > 0`: the isotropy group is maximal.
    Maximal,
}

/// A validated space with exactly two summands.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSummandSpace {
    space: GeneralSpace,
    kind: SpaceKind,
}

impl TwoSummandSpace {
    pub fn new(space: GeneralSpace) -> Result<Self> {
        if space.summands() != 2 {
            return Err(Error::InvalidSpace(format!(
                "expected 2 summands, got {}",
                space.summands()
            )));
        }
        let report = validate(&space);
        if !report.ok {
            return Err(Error::InvalidSpace(report.summary()));
        }
        let t112 = space.triple.get(0, 0, 1);
        let t122 = space.triple.get(0, 1, 1);
        let kind = match (t112 > 0.0, t122 > 0.0) {
            (false, true) => SpaceKind::NonMaximal,
            (true, true) => SpaceKind::Maximal,
            (false, false) => return Err(Error::ProductSpace),
            (true, false) => {
                return Err(Error::InvalidSpace(
                    "[112] > 0 with [122] = 0: relabel the summands so that p1 is the fibre".into(),
                ))
            }
        };
        Ok(Self { space, kind })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn general(&self) -> &GeneralSpace {
        &self.space
    }

    pub fn name(&self) -> &str {
        &self.space.name
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.space.dims[0], self.space.dims[1])
    }

    fn raw(&self) -> RawTwo<f64> {
        let s = &self.space;
        RawTwo {
            d1: s.dims[0],
            d2: s.dims[1],
            b1: s.killing[0],
            b2: s.killing[1],
            t111: s.triple.get(0, 0, 0),
            t112: s.triple.get(0, 0, 1),
            t122: s.triple.get(0, 1, 1),
            t222: s.triple.get(1, 1, 1),
        }
    }
}

impl TryFrom<GeneralSpace> for TwoSummandSpace {
    type Error = Error;

    fn try_from(space: GeneralSpace) -> Result<Self> {
        Self::new(space)
    }
}

/// Raw two-summand data, generic so the same formulas serve `f64` and exact
/// rationals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawTwo<T> {
    pub d1: u32,
    pub d2: u32,
    pub b1: T,
    pub b2: T,
    pub t111: T,
    pub t112: T,
    pub t122: T,
    pub t222: T,
}

impl<T: Num + Copy + FromPrimitive> RawTwo<T> {
    fn dim(d: u32) -> T {
        T::from_u32(d).expect("dimension representable")
    }

    /// `[A, B, C, D]` of the non-maximal system.
    pub fn nonmax_formulas(&self) -> [T; 4] {
        let two = T::one() + T::one();
        let d1 = Self::dim(self.d1);
        let d2 = Self::dim(self.d2);
        let a = self.t122 / (two * d1);
        let b = self.t122 / d2;
        let c = self.b1 - self.t111 / (two * d1) - self.t122 / d1;
        let d = self.b2 - self.t222 / (two * d2);
        [a, b, c, d]
    }

    /// `[A1, B1, C1, A2, B2, C2]` of the maximal system.
    pub fn max_formulas(&self) -> [T; 6] {
        let two = T::one() + T::one();
        let d1 = Self::dim(self.d1);
        let d2 = Self::dim(self.d2);
        let a1 = self.b1 - self.t111 / (two * d1) - self.t122 / d1;
        let b1 = self.t112 / d1;
        let c1 = self.t122 / (two * d1);
        let a2 = self.b2 - self.t222 / (two * d2) - self.t112 / d2;
        let b2 = self.t122 / d2;
        let c2 = self.t112 / (two * d2);
        [a1, b1, c1, a2, b2, c2]
    }
}

impl RawTwo<Ratio<i64>> {
    /// Discriminant `D^2 - 4 C (A + B)` of the non-maximal Einstein quadratic.
    pub fn einstein_discriminant(&self) -> Ratio<i64> {
        let [a, b, c, d] = self.nonmax_formulas();
        d * d - Ratio::from_integer(4) * c * (a + b)
    }
}

/// Coefficients of `x1' = -C - A y^2`, `x2' = -D + B y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonMaxCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub d1: u32,
    pub d2: u32,
}

impl NonMaxCoeffs {
    /// Builds coefficients directly, checking the sign bounds and the
    /// dimension relation `(d1/2) A = (d2/4) B`.
    pub fn new(a: f64, b: f64, c: f64, d: f64, d1: u32, d2: u32) -> Result<Self> {
        for (name, v) in [("A", a), ("B", b), ("D", d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::PositivityViolation { name, value: v });
            }
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::PositivityViolation { name: "C", value: c });
        }
        let out = Self { a, b, c, d, d1, d2 };
        let (lhs, rhs) = out.dimension_relation();
        if (lhs - rhs).abs() > RELATION_TOL * lhs.abs().max(rhs.abs()) {
            return Err(Error::InvalidSpace(format!(
                "(d1/2)A = {lhs} differs from (d2/4)B = {rhs}"
            )));
        }
        Ok(out)
    }

    /// `((d1/2) A, (d2/4) B)`; the two agree for every valid space.
    pub fn dimension_relation(&self) -> (f64, f64) {
        (
            0.5 * f64::from(self.d1) * self.a,
            0.25 * f64::from(self.d2) * self.b,
        )
    }

    /// `C - D y + (A + B) y^2`; its positive roots are the Einstein directions.
    pub fn einstein_poly(&self, y: f64) -> f64 {
        self.c - self.d * y + (self.a + self.b) * y * y
    }
}

/// Coefficients of `x1' = -A1 + B1/y - C1 y^2`, `x2' = -A2 + B2 y - C2/y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxCoeffs {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub d1: u32,
    pub d2: u32,
}

impl MaxCoeffs {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a1: f64,
        b1: f64,
        c1: f64,
        a2: f64,
        b2: f64,
        c2: f64,
        d1: u32,
        d2: u32,
    ) -> Result<Self> {
        for (name, v) in [
            ("A1", a1),
            ("B1", b1),
            ("C1", c1),
            ("A2", a2),
            ("B2", b2),
            ("C2", c2),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::PositivityViolation { name, value: v });
            }
        }
        let out = Self {
            a1,
            b1,
            c1,
            a2,
            b2,
            c2,
            d1,
            d2,
        };
        for (lhs, rhs) in out.cross_relations() {
            if (lhs - rhs).abs() > RELATION_TOL * lhs.abs().max(rhs.abs()) {
                return Err(Error::InvalidSpace(format!(
                    "cross relation violated: {lhs} vs {rhs}"
                )));
            }
        }
        Ok(out)
    }

    /// `[(d1 B1, 2 d2 C2), (d2 B2, 2 d1 C1)]`.
    pub fn cross_relations(&self) -> [(f64, f64); 2] {
        let d1 = f64::from(self.d1);
        let d2 = f64::from(self.d2);
        [
            (d1 * self.b1, 2.0 * d2 * self.c2),
            (d2 * self.b2, 2.0 * d1 * self.c1),
        ]
    }

    /// Polynomial coefficients (ascending powers) of the Einstein cubic
    /// `-(B2 + C1) y^3 + A2 y^2 - A1 y + (B1 + C2)`.
    pub fn einstein_cubic(&self) -> [f64; 4] {
        [
            self.b1 + self.c2,
            -self.a1,
            self.a2,
            -(self.b2 + self.c1),
        ]
    }
}

pub fn derive_nonmaximal_coeffs(space: &TwoSummandSpace) -> Result<NonMaxCoeffs> {
    if space.kind != SpaceKind::NonMaximal {
        return Err(Error::KindMismatch {
            expected: SpaceKind::NonMaximal,
            found: space.kind,
        });
    }
    let raw = space.raw();
    let [a, b, mut c, d] = raw.nonmax_formulas();
    // C = 2 c1 + [111]/(2 d1) is exactly zero for a trivial fibre; absorb rounding.
    if c < 0.0 && c.abs() <= RELATION_TOL * raw.b1.abs().max(1.0) * 8.0 {
        c = 0.0;
    }
    NonMaxCoeffs::new(a, b, c, d, raw.d1, raw.d2)
}

pub fn derive_maximal_coeffs(space: &TwoSummandSpace) -> Result<MaxCoeffs> {
    if space.kind != SpaceKind::Maximal {
        return Err(Error::KindMismatch {
            expected: SpaceKind::Maximal,
            found: space.kind,
        });
    }
    let raw = space.raw();
    let [a1, b1, c1, a2, b2, c2] = raw.max_formulas();
    MaxCoeffs::new(a1, b1, c1, a2, b2, c2, raw.d1, raw.d2)
}

/// Either coefficient set, for operations that accept both kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FlowCoefficients {
    NonMaximal(NonMaxCoeffs),
    Maximal(MaxCoeffs),
}

impl FlowCoefficients {
    pub fn derive(space: &TwoSummandSpace) -> Result<Self> {
        match space.kind() {
            SpaceKind::NonMaximal => derive_nonmaximal_coeffs(space).map(Self::NonMaximal),
            SpaceKind::Maximal => derive_maximal_coeffs(space).map(Self::Maximal),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Self::NonMaximal(_) => SpaceKind::NonMaximal,
            Self::Maximal(_) => SpaceKind::Maximal,
        }
    }

    pub fn dims(&self) -> (u32, u32) {
        match self {
            Self::NonMaximal(c) => (c.d1, c.d2),
            Self::Maximal(c) => (c.d1, c.d2),
        }
    }
}

impl From<NonMaxCoeffs> for FlowCoefficients {
    fn from(c: NonMaxCoeffs) -> Self {
        Self::NonMaximal(c)
    }
}

impl From<MaxCoeffs> for FlowCoefficients {
    fn from(c: MaxCoeffs) -> Self {
        Self::Maximal(c)
    }
}
