//! Arcs: ordered point sequences of F_q^k in which every k-subset is a basis.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldSpec};
use crate::linalg::{det_in_place, kernel, pencil, LinearForm, Vek};

/// An arc of F_q^k.
///
/// Point representatives are kept exactly as given; determinant signs and the
/// point order are part of the data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    field: FieldSpec,
    k: usize,
    points: Vec<Vek>,
}

/// Outcome of an MDS check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MdsVerdict {
    Pass,
    /// The lexicographically first k-subset with zero determinant.
    Fail { witness: Vec<usize> },
}

impl MdsVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, MdsVerdict::Pass)
    }
}

fn check_dims(k: usize, points: &[Vek]) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!("dimension k = {k} must be at least 2")));
    }
    for p in points {
        if p.dim() != k {
            return Err(Error::DimensionMismatch { expected: k, found: p.dim() });
        }
    }
    Ok(())
}

fn det_of_points(field: &FieldSpec, points: &[Vek], idx: &[usize], buf: &mut Vec<Fe>) -> Fe {
    let k = idx.len();
    buf.clear();
    for &i in idx {
        buf.extend_from_slice(points[i].coords());
    }
    det_in_place(field, buf, k)
}

/// Scan every k-subset in lexicographic order and report the first singular one.
pub fn mds_check(field: &FieldSpec, k: usize, points: &[Vek]) -> Result<MdsVerdict> {
    check_dims(k, points)?;
    let n = points.len();
    if n < k {
        return Ok(MdsVerdict::Pass);
    }
    // Split on the first index; the smallest failing branch holds the lex-first witness.
    let first = (0..=n - k).into_par_iter().find_map_first(|i0| {
        let mut buf = Vec::with_capacity(k * k);
        let mut idx = Vec::with_capacity(k);
        for rest in (i0 + 1..n).combinations(k - 1) {
            idx.clear();
            idx.push(i0);
            idx.extend_from_slice(&rest);
            if det_of_points(field, points, &idx, &mut buf).is_zero() {
                return Some(idx.clone());
            }
        }
        None
    });
    Ok(match first {
        Some(witness) => MdsVerdict::Fail { witness },
        None => MdsVerdict::Pass,
    })
}

/// Incremental variant: each point is checked against all (k-1)-subsets of its
/// predecessors. Returns the first singular subset met in that order.
pub fn mds_check_incremental(field: &FieldSpec, k: usize, points: &[Vek]) -> Result<MdsVerdict> {
    check_dims(k, points)?;
    let mut buf = Vec::with_capacity(k * k);
    for j in k.saturating_sub(1)..points.len() {
        for mut idx in (0..j).combinations(k - 1) {
            idx.push(j);
            if det_of_points(field, points, &idx, &mut buf).is_zero() {
                return Ok(MdsVerdict::Fail { witness: idx });
            }
        }
    }
    Ok(MdsVerdict::Pass)
}

impl Arc {
    /// Validated constructor: fails with the first singular k-subset.
    pub fn new(field: FieldSpec, k: usize, points: Vec<Vek>) -> Result<Self> {
        match mds_check(&field, k, &points)? {
            MdsVerdict::Pass => {}
            MdsVerdict::Fail { witness } => return Err(Error::NotAnArc(witness)),
        }
        if points.len() < k && points.iter().any(|p| p.is_zero()) {
            return Err(Error::NotAnArc(vec![points.iter().position(|p| p.is_zero()).unwrap()]));
        }
        Ok(Arc { field, k, points })
    }

    /// Constructor for sequences already known to be arcs.
    pub(crate) fn trusted(field: FieldSpec, k: usize, points: Vec<Vek>) -> Self {
        debug_assert!(points.iter().all(|p| p.dim() == k));
        Arc { field, k, points }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vek] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vek {
        &self.points[i]
    }

    /// Number of tangent hyperplanes through each (k-2)-subset: `q + k - 1 - n`.
    pub fn t(&self) -> usize {
        let v = self.field.q() as i64 + self.k as i64 - 1 - self.points.len() as i64;
        debug_assert!(v >= 0, "an arc has at most q + k - 1 points");
        v.max(0) as usize
    }

    /// Determinant of the points at `idx`, taken as rows in that order.
    pub fn det_of(&self, idx: &[usize]) -> Result<Fe> {
        if idx.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: idx.len() });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.points.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.points.len() });
        }
        let mut buf = Vec::with_capacity(self.k * self.k);
        Ok(det_of_points(&self.field, &self.points, idx, &mut buf))
    }

    /// The same arc with point `i` replaced by `s` times itself.
    pub fn rescaled(&self, i: usize, s: Fe) -> Result<Arc> {
        if s.is_zero() {
            return Err(Error::InvalidParameters("scale factor must be nonzero".into()));
        }
        let mut points = self.points.clone();
        points[i] = points[i].scale(&self.field, s);
        Ok(Arc::trusted(self.field.clone(), self.k, points))
    }

    pub fn verify(&self) -> Result<MdsVerdict> {
        mds_check(&self.field, self.k, &self.points)
    }

    /// Points with their first nonzero coordinate scaled to 1.
    pub fn normalized_points(&self) -> Vec<Vek> {
        self.points
            .iter()
            .map(|p| p.normalized(&self.field).expect("arc points are nonzero"))
            .collect()
    }
}

fn check_k(field: &FieldSpec, k: usize) -> Result<()> {
    if k < 2 || k > field.q() as usize {
        return Err(Error::InvalidParameters(format!(
            "k = {k} must satisfy 2 <= k <= q = {}",
            field.q()
        )));
    }
    Ok(())
}

/// The normal rational curve `(1, s, ..., s^(k-1))` for `s` in code order, then `(0, ..., 0, 1)`.
pub fn nrc(field: &FieldSpec, k: usize) -> Result<Arc> {
    check_k(field, k)?;
    let mut points: Vec<Vek> = field
        .elements()
        .map(|s| Vek((0..k).map(|i| field.pow(s, i as u64)).collect()))
        .collect();
    points.push(Vek::unit(k, k - 1));
    Ok(Arc::trusted(field.clone(), k, points))
}

/// The conic `(1, s, s^2)` plus `(0, 0, 1)` plus its nucleus `(0, 1, 0)`, in even characteristic.
pub fn hyperoval(field: &FieldSpec) -> Result<Arc> {
    if field.p() != 2 {
        return Err(Error::InvalidParameters(format!(
            "hyperovals of this form need characteristic 2, not {}",
            field.p()
        )));
    }
    let mut points: Vec<Vek> = field
        .elements()
        .map(|s| Vek(vec![Fe::ONE, s, field.mul(s, s)]))
        .collect();
    points.push(Vek::unit(3, 2));
    points.push(Vek::unit(3, 1));
    Ok(Arc::trusted(field.clone(), 3, points))
}

/// `e_1, ..., e_k, e_1 + ... + e_k`.
pub fn bush_frame(field: &FieldSpec, k: usize) -> Result<Arc> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!("dimension k = {k} must be at least 2")));
    }
    let mut points: Vec<Vek> = (0..k).map(|i| Vek::unit(k, i)).collect();
    points.push(Vek(vec![Fe::ONE; k]));
    Ok(Arc::trusted(field.clone(), k, points))
}

/// Columns of a parity-check matrix of the code generated by the arc's points.
///
/// With the points as the columns of a `k x n` generator matrix `G`, the rows of
/// `H` are the standard kernel basis of `G`, so `G H^T = 0`. The dual of an MDS
/// code is MDS, so the result is again an arc.
pub fn dual_arc(arc: &Arc) -> Result<Arc> {
    let (n, k) = (arc.len(), arc.k());
    if n <= k {
        return Err(Error::InvalidParameters(format!("dual needs n > k, got n = {n}, k = {k}")));
    }
    let field = arc.field();
    let g: Vec<Vec<Fe>> = (0..k).map(|r| arc.points.iter().map(|p| p.0[r]).collect()).collect();
    let rows: Vec<&[Fe]> = g.iter().map(|r| r.as_slice()).collect();
    let h = kernel(field, &rows, n)?;
    if h.len() != n - k {
        return Err(Error::Dependent);
    }
    let points: Vec<Vek> = (0..n).map(|c| Vek(h.iter().map(|row| row[c]).collect())).collect();
    let dk = n - k;
    if dk < 2 {
        return Err(Error::InvalidParameters(format!(
            "dual dimension {dk} is below the supported minimum 2"
        )));
    }
    Ok(Arc::trusted(field.clone(), dk, points))
}

/// Partition of the pencil through a (k-2)-subset into unisecants and tangents.
#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub y: Vec<usize>,
    /// Hyperplanes through `Y` containing no further point.
    pub tangents: Vec<LinearForm>,
    /// Hyperplanes through `Y` and the single further point they contain.
    pub unisecants: Vec<(LinearForm, usize)>,
}

impl Census {
    pub fn tangent_count(&self) -> usize {
        self.tangents.len()
    }
}

pub(crate) fn validate_subset(arc: &Arc, y: &[usize], size: usize) -> Result<()> {
    if y.len() != size {
        return Err(Error::InvalidIndexSet(format!("expected {size} indices, got {}", y.len())));
    }
    for (i, &a) in y.iter().enumerate() {
        if a >= arc.len() {
            return Err(Error::IndexOutOfRange { index: a, len: arc.len() });
        }
        if y[..i].contains(&a) {
            return Err(Error::InvalidIndexSet(format!("index {a} repeated")));
        }
    }
    Ok(())
}

/// Tangent and unisecant hyperplanes through the points of `arc` indexed by `y`.
pub fn secant_tangent_census(arc: &Arc, y: &[usize]) -> Result<Census> {
    let k = arc.k();
    validate_subset(arc, y, k - 2)?;
    let field = arc.field();
    let rows: Vec<&[Fe]> = y.iter().map(|&i| arc.point(i).coords()).collect();
    let pen = pencil(field, k, &rows)?;
    let q = field.q() as usize;
    let mut hit: Vec<Option<usize>> = vec![None; q + 1];
    for (j, x) in arc.points().iter().enumerate() {
        if y.contains(&j) {
            continue;
        }
        let Some(m) = pen.member_through(field, x.coords()) else {
            let mut bad = y.to_vec();
            bad.push(j);
            return Err(Error::NotAnArc(bad));
        };
        if let Some(other) = hit[m] {
            let mut bad = y.to_vec();
            bad.extend([other, j]);
            return Err(Error::NotAnArc(bad));
        }
        hit[m] = Some(j);
    }
    let mut tangents = Vec::new();
    let mut unisecants = Vec::new();
    for (m, h) in hit.iter().enumerate() {
        let form = pen.member(field, m);
        match h {
            Some(j) => unisecants.push((form, *j)),
            None => tangents.push(form),
        }
    }
    tangents.sort();
    Ok(Census { y: y.to_vec(), tangents, unisecants })
}
