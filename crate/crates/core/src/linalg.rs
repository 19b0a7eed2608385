//! Exact vectors, determinants, annihilators and hyperplane pencils over F_q.
//!
//! Matrices are given as rows. A determinant `det(a_1, ..., a_k)` is the
//! determinant of the matrix whose i-th row is `a_i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldSpec};

/// A vector of F_q^k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vek(pub Vec<Fe>);

impl Vek {
    pub fn new(coords: Vec<Fe>) -> Self {
        Vek(coords)
    }

    pub fn from_codes(field: &FieldSpec, codes: &[u64]) -> Result<Self> {
        codes.iter().map(|&c| field.elem(c)).collect::<Result<Vec<_>>>().map(Vek)
    }

    pub fn zero(k: usize) -> Self {
        Vek(vec![Fe::ZERO; k])
    }

    /// The i-th standard basis vector (0-based).
    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = vec![Fe::ZERO; k];
        v[i] = Fe::ONE;
        Vek(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Fe] {
        &self.0
    }

    pub fn codes(&self) -> Vec<u32> {
        self.0.iter().map(|c| c.code()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, field: &FieldSpec, s: Fe) -> Vek {
        Vek(self.0.iter().map(|&c| field.mul(c, s)).collect())
    }

    pub fn add(&self, field: &FieldSpec, other: &Vek) -> Vek {
        Vek(self.0.iter().zip(&other.0).map(|(&a, &b)| field.add(a, b)).collect())
    }

    /// Scalar multiple whose first nonzero coordinate is 1, or `None` for the zero vector.
    pub fn normalized(&self, field: &FieldSpec) -> Option<Vek> {
        normalize_coords(field, &self.0).map(Vek)
    }
}

impl fmt::Display for Vek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn normalize_coords(field: &FieldSpec, coords: &[Fe]) -> Option<Vec<Fe>> {
    let lead = *coords.iter().find(|c| !c.is_zero())?;
    let s = field.inv(lead).ok()?;
    Some(coords.iter().map(|&c| field.mul(c, s)).collect())
}

/// A nonzero linear map F_q^k -> F_q, stored as its covector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    covector: Vec<Fe>,
    normalized: bool,
}

impl LinearForm {
    pub fn new(covector: Vec<Fe>) -> Result<Self> {
        let lead = covector.iter().find(|c| !c.is_zero()).ok_or(Error::ZeroForm)?;
        let normalized = *lead == Fe::ONE;
        Ok(LinearForm { covector, normalized })
    }

    /// Normalized representative: first nonzero coordinate equal to 1.
    pub fn normalized_from(field: &FieldSpec, covector: &[Fe]) -> Result<Self> {
        let covector = normalize_coords(field, covector).ok_or(Error::ZeroForm)?;
        Ok(LinearForm { covector, normalized: true })
    }

    pub fn covector(&self) -> &[Fe] {
        &self.covector
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn codes(&self) -> Vec<u32> {
        self.covector.iter().map(|c| c.code()).collect()
    }

    #[inline]
    pub fn eval(&self, field: &FieldSpec, x: &[Fe]) -> Fe {
        dot(field, &self.covector, x)
    }

    pub fn scaled(&self, field: &FieldSpec, s: Fe) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::ZeroForm);
        }
        LinearForm::new(self.covector.iter().map(|&c| field.mul(c, s)).collect())
    }

    pub fn normalize(&self, field: &FieldSpec) -> Self {
        LinearForm::normalized_from(field, &self.covector).expect("linear forms are nonzero")
    }
}

#[inline]
pub fn dot(field: &FieldSpec, a: &[Fe], b: &[Fe]) -> Fe {
    a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// Determinant of the square matrix with the given rows, by Gaussian elimination.
pub fn det(field: &FieldSpec, rows: &[&[Fe]]) -> Result<Fe> {
    let k = rows.len();
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: r.len() });
        }
    }
    let mut m: Vec<Fe> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    Ok(det_in_place(field, &mut m, k))
}

/// Determinant of a row-major `k x k` matrix, destroying it.
pub(crate) fn det_in_place(field: &FieldSpec, m: &mut [Fe], k: usize) -> Fe {
    let mut acc = Fe::ONE;
    for col in 0..k {
        let Some(pivot) = (col..k).find(|&r| !m[r * k + col].is_zero()) else {
            return Fe::ZERO;
        };
        if pivot != col {
            for j in col..k {
                m.swap(pivot * k + j, col * k + j);
            }
            acc = field.neg(acc);
        }
        let pv = m[col * k + col];
        acc = field.mul(acc, pv);
        let pinv = field.inv(pv).expect("pivot is nonzero");
        for r in col + 1..k {
            let lead = m[r * k + col];
            if lead.is_zero() {
                continue;
            }
            let f = field.neg(field.mul(lead, pinv));
            for j in col..k {
                let v = field.add(m[r * k + j], field.mul(f, m[col * k + j]));
                m[r * k + j] = v;
            }
        }
    }
    acc
}

/// Determinant of the rows obtained by concatenating the given groups in order.
pub fn det_seq(field: &FieldSpec, parts: &[&[Vek]]) -> Result<Fe> {
    let rows: Vec<&[Fe]> = parts.iter().flat_map(|g| g.iter().map(|v| v.coords())).collect();
    det(field, &rows)
}

/// Row-reduced echelon form in place; returns the pivot columns.
///
/// The pivot for each column is the first eligible row from the top, so the
/// result is a deterministic function of the input.
pub fn rref(field: &FieldSpec, m: &mut [Vec<Fe>]) -> Vec<usize> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = field.inv(m[row][col]).expect("pivot is nonzero");
        for v in m[row].iter_mut().take(ncols) {
            *v = field.mul(*v, inv);
        }
        let pivot_row = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = field.neg(line[col]);
            for (v, &pv) in line.iter_mut().zip(&pivot_row).take(ncols) {
                *v = field.add(*v, field.mul(f, pv));
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(field: &FieldSpec, rows: &[&[Fe]]) -> usize {
    let mut m: Vec<Vec<Fe>> = rows.iter().map(|r| r.to_vec()).collect();
    rref(field, &mut m).len()
}

/// Basis of `{v : M v = 0}` for the matrix with the given rows and `ncols` columns.
///
/// One basis vector per free column, in increasing column order; the vector for
/// free column `f` has a 1 in position `f` and zeros in the other free positions.
pub fn kernel(field: &FieldSpec, rows: &[&[Fe]], ncols: usize) -> Result<Vec<Vec<Fe>>> {
    for r in rows {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch { expected: ncols, found: r.len() });
        }
    }
    let mut m: Vec<Vec<Fe>> = rows.iter().map(|r| r.to_vec()).collect();
    let pivots = rref(field, &mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Fe::ZERO; ncols];
        v[free] = Fe::ONE;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(m[i][free]);
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Normalized forms spanning the annihilator of `span(points)`.
pub fn nullspace_forms(field: &FieldSpec, k: usize, points: &[&[Fe]]) -> Result<Vec<LinearForm>> {
    if points.len() >= k {
        return Err(Error::DimensionMismatch { expected: k - 1, found: points.len() });
    }
    let basis = kernel(field, points, k)?;
    if basis.len() != k - points.len() {
        return Err(Error::Dependent);
    }
    basis.iter().map(|v| LinearForm::normalized_from(field, v)).collect()
}

/// The q+1 hyperplanes through a codimension-2 subspace, as `first + mu * second`
/// for `mu` in F_q followed by `second` alone.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub first: LinearForm,
    pub second: LinearForm,
}

impl Pencil {
    /// Number of members, q+1.
    pub fn len(&self, field: &FieldSpec) -> usize {
        field.q() as usize + 1
    }

    /// Member `i`: `first + mu * second` for `mu` of code `i < q`, and `second` for `i = q`.
    pub fn member(&self, field: &FieldSpec, i: usize) -> LinearForm {
        if i == field.q() as usize {
            return self.second.clone();
        }
        let mu = Fe::from_code(i as u32);
        let c: Vec<Fe> = self
            .first
            .covector()
            .iter()
            .zip(self.second.covector())
            .map(|(&a, &b)| field.add(a, field.mul(mu, b)))
            .collect();
        LinearForm::normalized_from(field, &c).expect("pencil generators are independent")
    }

    pub fn members<'a>(&'a self, field: &'a FieldSpec) -> impl Iterator<Item = LinearForm> + 'a {
        (0..=field.q() as usize).map(move |i| self.member(field, i))
    }

    /// Index of the unique member vanishing at `x`, or `None` when every member
    /// vanishes there, i.e. `x` lies in the base subspace.
    pub fn member_through(&self, field: &FieldSpec, x: &[Fe]) -> Option<usize> {
        let a = self.first.eval(field, x);
        let b = self.second.eval(field, x);
        match (a.is_zero(), b.is_zero()) {
            (true, true) => None,
            (_, true) => Some(field.q() as usize),
            _ => {
                // (first + mu * second)(x) = 0  =>  mu = -a / b
                let mu = field.neg(field.div(a, b).expect("b is nonzero"));
                Some(mu.code() as usize)
            }
        }
    }
}

/// The pencil of hyperplanes containing `y`, which must be k-2 independent vectors.
pub fn pencil(field: &FieldSpec, k: usize, y: &[&[Fe]]) -> Result<Pencil> {
    if k < 2 || y.len() != k - 2 {
        return Err(Error::DimensionMismatch { expected: k.saturating_sub(2), found: y.len() });
    }
    let mut forms = nullspace_forms(field, k, y)?;
    let second = forms.pop().expect("two forms");
    let first = forms.pop().expect("two forms");
    Ok(Pencil { first, second })
}
