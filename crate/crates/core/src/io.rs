//! Text and JSON formats.
//!
//! Matrix text: a header line `p h k n`, then `n` lines of `k` element codes
//! separated by spaces. Points are the rows. Blank lines are ignored.

use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arc::{secant_tangent_census, Arc};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::linalg::Vek;

/// Field and points read from matrix text, before any arc validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMatrix {
    pub field: FieldSpec,
    pub k: usize,
    pub points: Vec<Vek>,
}

impl PointMatrix {
    pub fn into_arc(self) -> Result<Arc> {
        Arc::new(self.field, self.k, self.points)
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

fn numbers(line: usize, text: &str) -> Result<Vec<u64>> {
    text.split_whitespace()
        .map(|w| w.parse::<u64>().map_err(|_| parse_err(line, format!("{w:?} is not a nonnegative integer"))))
        .collect()
}

/// Parse matrix text. `modulus` overrides the default modulus of GF(p^h).
pub fn parse_matrix(text: &str, modulus: Option<&[u32]>, max_order: u64) -> Result<PointMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header \"p h k n\""))?;
    let head = numbers(hl, header)?;
    let &[p, h, k, n] = head.as_slice() else {
        return Err(parse_err(hl, format!("header needs 4 numbers \"p h k n\", got {}", head.len())));
    };
    let h = u32::try_from(h).map_err(|_| parse_err(hl, "extension degree too large"))?;
    let field = match modulus {
        Some(m) => {
            if m.len() != h as usize + 1 {
                return Err(Error::InvalidModulus(format!(
                    "modulus of degree {} given for h = {h}",
                    m.len().saturating_sub(1)
                )));
            }
            FieldSpec::with_modulus(p, m, max_order)?
        }
        None => FieldSpec::with_limit(p, h, max_order)?,
    };
    let k = k as usize;
    let mut points = Vec::with_capacity(n as usize);
    for (ln, line) in lines.by_ref().take(n as usize) {
        let codes = numbers(ln, line)?;
        if codes.len() != k {
            return Err(parse_err(ln, format!("expected {k} codes, got {}", codes.len())));
        }
        let v = Vek::from_codes(&field, &codes).map_err(|e| parse_err(ln, e.to_string()))?;
        points.push(v);
    }
    if points.len() != n as usize {
        return Err(parse_err(hl, format!("header announces {n} rows, found {}", points.len())));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing data after the last row"));
    }
    Ok(PointMatrix { field, k, points })
}

/// Parse matrix text and validate it as an arc.
pub fn parse_arc(text: &str, modulus: Option<&[u32]>, max_order: u64) -> Result<Arc> {
    parse_matrix(text, modulus, max_order)?.into_arc()
}

pub fn format_points(field: &FieldSpec, k: usize, points: &[Vek]) -> String {
    let mut out = format!("{} {} {k} {}\n", field.p(), field.h(), points.len());
    for p in points {
        let _ = writeln!(out, "{}", p.codes().iter().join(" "));
    }
    out
}

pub fn format_arc(arc: &Arc) -> String {
    format_points(arc.field(), arc.k(), arc.points())
}

/// JSON form of an arc; the modulus is included so the field is reproduced exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcJson {
    pub p: u32,
    pub h: u32,
    pub modulus: Vec<u32>,
    pub k: usize,
    pub points: Vec<Vec<u32>>,
}

impl ArcJson {
    pub fn from_arc(arc: &Arc) -> Self {
        let f = arc.field();
        ArcJson {
            p: f.p(),
            h: f.h(),
            modulus: f.modulus().to_vec(),
            k: arc.k(),
            points: arc.points().iter().map(|v| v.codes()).collect(),
        }
    }

    pub fn to_arc(&self, max_order: u64) -> Result<Arc> {
        if self.modulus.len() != self.h as usize + 1 {
            return Err(Error::InvalidModulus(format!("modulus length does not match h = {}", self.h)));
        }
        let field = FieldSpec::with_modulus(self.p as u64, &self.modulus, max_order)?;
        let points = self
            .points
            .iter()
            .map(|row| Vek::from_codes(&field, &row.iter().map(|&c| c as u64).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Arc::new(field, self.k, points)
    }
}

/// `{"t": t, "per_Y": [...]}` over every `(k-2)`-subset in lexicographic order.
pub fn census_json(arc: &Arc) -> Result<Value> {
    let subsets: Vec<Vec<usize>> = (0..arc.len()).combinations(arc.k() - 2).collect();
    let per_y = subsets
        .par_iter()
        .map(|y| {
            let c = secant_tangent_census(arc, y)?;
            Ok(json!({
                "Y": c.y,
                "tangent_count": c.tangent_count(),
                "tangents": c.tangents.iter().map(|f| f.codes()).collect::<Vec<_>>(),
                "unisecants": c.unisecants.iter().map(|(f, j)| json!({"form": f.codes(), "point": j})).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "t": arc.t(), "per_Y": per_y }))
}
