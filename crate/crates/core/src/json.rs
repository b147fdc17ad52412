//! JSON space definitions.
//!
//! ```json
//! {
//!   "name": "SU42",
//!   "l": 2,
//!   "d": [7, 5],
//!   "b": [1, 1],
//!   "triple": [{"i": 1, "j": 1, "k": 1, "value": 1.05},
//!              {"i": 1, "j": 2, "k": 2, "value": 1.75}]
//! }
//! ```
//!
//! Indices are 1-based. One entry per unordered triple is enough; the other
//! permutations are filled in on load. Either of `b` and `c` may be omitted
//! and is then solved from the Casimir relation. Listing several
//! permutations with different values keeps them as given, so the asymmetry
//! shows up in validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{GeneralSpace, TripleTable, MAX_SUMMANDS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// The on-disk form of a [`GeneralSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub name: String,
    pub l: usize,
    pub d: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default)]
    pub triple: Vec<TripleEntry>,
}

fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
}

impl SpaceDocument {
    pub fn from_space(space: &GeneralSpace) -> Self {
        let l = space.triple.len();
        let mut triple = Vec::new();
        for i in 0..l {
            for j in i..l {
                for k in j..l {
                    let v = space.triple.get(i, j, k);
                    let perms = permutations(i, j, k);
                    let uniform = perms
                        .iter()
                        .all(|&(a, b, c)| space.triple.get(a, b, c).to_bits() == v.to_bits());
                    let mut emit = |(a, b, c): (usize, usize, usize)| {
                        triple.push(TripleEntry {
                            i: a + 1,
                            j: b + 1,
                            k: c + 1,
                            value: space.triple.get(a, b, c),
                        })
                    };
                    if !uniform {
                        let mut seen = Vec::new();
                        for p in perms {
                            if !seen.contains(&p) {
                                seen.push(p);
                                emit(p);
                            }
                        }
                    } else if v.to_bits() != 0 {
                        emit((i, j, k));
                    }
                }
            }
        }
        Self {
            name: space.name.clone(),
            l: space.dims.len(),
            d: space.dims.clone(),
            b: Some(space.killing.clone()),
            c: Some(space.casimir.clone()),
            triple,
        }
    }

    /// Builds the space, symmetrizing the triple table and solving for a
    /// missing `b` or `c`. Shape errors are rejected here; value errors are
    /// left to [`crate::space::validate`].
    pub fn into_space(self) -> Result<GeneralSpace> {
        let l = self.l;
        let bad = |m: String| Err(Error::InvalidSpace(m));
        if l == 0 || l > MAX_SUMMANDS {
            return bad(format!("l = {l} must be between 1 and {MAX_SUMMANDS}"));
        }
        if self.d.len() != l {
            return bad(format!("d has {} entries, expected {l}", self.d.len()));
        }
        for (name, arr) in [("b", &self.b), ("c", &self.c)] {
            if let Some(a) = arr {
                if a.len() != l {
                    return bad(format!("{name} has {} entries, expected {l}", a.len()));
                }
            }
        }
        let mut table = TripleTable::zeros(l);
        let mut explicit = vec![false; l * l * l];
        let slot = |i: usize, j: usize, k: usize| (i * l + j) * l + k;
        for e in &self.triple {
            if [e.i, e.j, e.k].iter().any(|&n| n == 0 || n > l) {
                return bad(format!("triple index ({}, {}, {}) outside 1..={l}", e.i, e.j, e.k));
            }
            let (i, j, k) = (e.i - 1, e.j - 1, e.k - 1);
            if explicit[slot(i, j, k)] {
                return bad(format!("triple [{}{}{}] listed twice", e.i, e.j, e.k));
            }
            explicit[slot(i, j, k)] = true;
            table.set_raw(i, j, k, e.value);
        }
        for i in 0..l {
            for j in i..l {
                for k in j..l {
                    let perms = permutations(i, j, k);
                    let Some(&(a, b, c)) = perms.iter().find(|&&(a, b, c)| explicit[slot(a, b, c)])
                    else {
                        continue;
                    };
                    let v = table.get(a, b, c);
                    for (p, q, r) in perms {
                        if !explicit[slot(p, q, r)] {
                            table.set_raw(p, q, r, v);
                        }
                    }
                }
            }
        }
        let (space, solved) = match (self.b, self.c) {
            (Some(b), Some(c)) => (GeneralSpace::new(self.name, self.d, b, c, table), None),
            (Some(b), None) => (GeneralSpace::from_killing(self.name, self.d, b, table), Some("c")),
            (None, Some(c)) => (GeneralSpace::from_casimir(self.name, self.d, c, table), Some("b")),
            (None, None) => return bad("at least one of b and c is required".into()),
        };
        if let Some(name) = solved {
            let values = if name == "c" { &space.casimir } else { &space.killing };
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return bad(format!(
                    "cannot solve for {name}{}: d{} = {}",
                    i + 1,
                    i + 1,
                    space.dims[i]
                ));
            }
        }
        Ok(space)
    }
}

/// Parses a space definition.
pub fn parse_space(text: &str) -> Result<GeneralSpace> {
    let doc: SpaceDocument = serde_json::from_str(text)?;
    doc.into_space()
}

/// Serializes a space so that [`parse_space`] reproduces it bit for bit.
pub fn space_to_json(space: &GeneralSpace) -> String {
    serde_json::to_string_pretty(&SpaceDocument::from_space(space)).expect("finite values serialize")
}
