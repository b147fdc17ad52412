//! Named spaces: the SU(4)/SU(2) table, round spheres and synthetic fixtures
//! built to hit each case of the two-summand classification.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::space::{GeneralSpace, RawTwo, TripleTable, TwoSummandSpace};

/// Fixed catalog names, in listing order. `SPHERE(n)` is parametric.
pub const NAMES: &[&str] = &[
    "SU42", "SPHERE(2)", "SPHERE(3)", "FIX-A", "FIX-B", "FIX-C0", "FIX-D", "FIX-E1", "FIX-E2",
    "FIX-F",
];

fn two(name: &str, dims: [u32; 2], killing: [f64; 2], triple: TripleTable) -> TwoSummandSpace {
    let space = GeneralSpace::from_killing(name, dims.to_vec(), killing.to_vec(), triple);
    TwoSummandSpace::new(space).expect("catalog fixture is valid")
}

/// SU(4)/SU(2) over Sp(2): `d = (7, 5)`, `b = (1, 1)`, `[111] = 21/20`,
/// `[122] = 7/4`. Carries no invariant Einstein metric.
pub fn su42() -> TwoSummandSpace {
    let triple = TripleTable::zeros(2)
        .with(0, 0, 0, 21.0 / 20.0)
        .with(0, 1, 1, 7.0 / 4.0);
    two("SU42", [7, 5], [1.0, 1.0], triple)
}

/// The SU(4)/SU(2) table in exact rational arithmetic.
pub fn su42_exact() -> RawTwo<Ratio<i64>> {
    let zero = Ratio::from_integer(0);
    RawTwo {
        d1: 7,
        d2: 5,
        b1: Ratio::from_integer(1),
        b2: Ratio::from_integer(1),
        t111: Ratio::new(21, 20),
        t112: zero,
        t122: Ratio::new(7, 4),
        t222: zero,
    }
}

/// `S^n = SO(n+1)/SO(n)` with `Q = -B`: one summand of dimension `n`,
/// `b = 1`, `[111] = 0`.
pub fn sphere(n: u32) -> GeneralSpace {
    GeneralSpace::from_killing(
        format!("SPHERE({n})"),
        vec![n],
        vec![1.0],
        TripleTable::zeros(1),
    )
}

/// Non-maximal, two Einstein directions: `A = B = C = 1`, `D = 3`, roots
/// `1/2` and `1`. Dimensions `(1, 2)` are forced by `(d1/2) A = (d2/4) B`.
pub fn fix_a() -> TwoSummandSpace {
    two("FIX-A", [1, 2], [3.0, 3.0], TripleTable::zeros(2).with(0, 1, 1, 2.0))
}

/// Non-maximal, one double Einstein direction: `A = B = 1`, `C = 1/2`,
/// `D = 2`, root `1/2`.
pub fn fix_b() -> TwoSummandSpace {
    two("FIX-B", [1, 2], [2.5, 2.0], TripleTable::zeros(2).with(0, 1, 1, 2.0))
}

/// Non-maximal with a trivial one-dimensional fibre: `A = B = 1`, `C = 0`,
/// `D = 3`, Einstein direction `D/(A+B) = 3/2`.
pub fn c0_fixture() -> TwoSummandSpace {
    two("FIX-C0", [1, 2], [2.0, 3.0], TripleTable::zeros(2).with(0, 1, 1, 2.0))
}

/// Maximal family around FIX-D: `d = (2, 1)`, `[122] = 4/5`, `[112] = k`,
/// `b = (3.9, 3.5 + k)`. Then `A1 = A2 = 7/2`, `B2 + C1 = 1` and
/// `B1 + C2 = k`, so the Einstein cubic is `-(y^3 - 7/2 y^2 + 7/2 y - k)`.
pub fn maximal_family(name: &str, k: f64) -> TwoSummandSpace {
    let triple = TripleTable::zeros(2)
        .with(0, 0, 1, k)
        .with(0, 1, 1, 0.8);
    two(name, [2, 1], [3.9, 3.5 + k], triple)
}

fn family_level(y: f64) -> f64 {
    y * y * y - 3.5 * y * y + 3.5 * y
}

/// Three Einstein directions `1/2, 1, 2`.
pub fn fix_d() -> TwoSummandSpace {
    maximal_family("FIX-D", 1.0)
}

/// Double Einstein direction at the larger critical point `(7 + sqrt 7)/6`
/// with the simple root below it.
pub fn fix_e1() -> TwoSummandSpace {
    let y = (7.0 + 7f64.sqrt()) / 6.0;
    maximal_family("FIX-E1", family_level(y))
}

/// Double Einstein direction at the smaller critical point `(7 - sqrt 7)/6`
/// with the simple root above it.
pub fn fix_e2() -> TwoSummandSpace {
    let y = (7.0 - 7f64.sqrt()) / 6.0;
    maximal_family("FIX-E2", family_level(y))
}

/// A single Einstein direction near `0.1705`.
pub fn fix_f() -> TwoSummandSpace {
    maximal_family("FIX-F", 0.5)
}

/// Every fixed catalog entry.
pub fn catalog() -> Vec<GeneralSpace> {
    NAMES.iter().map(|n| lookup(n).expect("catalog name")).collect()
}

pub fn lookup(name: &str) -> Result<GeneralSpace> {
    let upper = name.trim().to_ascii_uppercase();
    if let Some(rest) = upper.strip_prefix("SPHERE(").and_then(|r| r.strip_suffix(')')) {
        let n: u32 = rest
            .parse()
            .map_err(|_| Error::UnknownSpace(name.to_string()))?;
        if n < 2 {
            return Err(Error::UnknownSpace(name.to_string()));
        }
        return Ok(sphere(n));
    }
    let space = match upper.as_str() {
        "SU42" => su42(),
        "FIX-A" => fix_a(),
        "FIX-B" => fix_b(),
        "FIX-C0" => c0_fixture(),
        "FIX-D" => fix_d(),
        "FIX-E" | "FIX-E1" => fix_e1(),
        "FIX-E2" => fix_e2(),
        "FIX-F" => fix_f(),
        _ => return Err(Error::UnknownSpace(name.to_string())),
    };
    Ok(space.general().clone())
}
