//! Evaluators for the tangent-function identities.
//!
//! Every check evaluates the statement literally: both sides (or the whole
//! sum, for identities of the form `0 = Σ ...`) are computed term by term from
//! tangent values and determinants, with no algebraic simplification. Sign
//! exponents are reduced mod 2 and applied as `±1` in the field.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::arc::Arc;
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldSpec};
use crate::linalg::{det, Vek};
use crate::tangent::{sigma, SegreQuery, TangentBundle};

/// Which identity a report refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// Triple-product lemma of tangents.
    Tangents,
    /// Interpolation of the tangent function.
    Interpolation,
    /// Transposing two entries of `A` in a Segre product.
    Numerator,
    /// Transposing two entries of `B` in a Segre product.
    Denominator,
    /// Exchanging the roles of `x` and `y` when `|A| = |B| - 1`.
    Switch,
    /// The sum over `B ⊆ L` against the sum over `Δ ⊆ Ω`.
    Main,
    /// The double sum over `B ⊆ L` and `τ ⊆ M` for `(q+2)`-arcs.
    Twotothen,
    /// Laplace expansion identity for determinants.
    Laplace,
    /// The sum over `Δ ⊆ Ω` with `ℓ_0` removed from the product.
    Appendix,
}

impl Lemma {
    pub const ALL: [Lemma; 9] = [
        Lemma::Tangents,
        Lemma::Interpolation,
        Lemma::Numerator,
        Lemma::Denominator,
        Lemma::Switch,
        Lemma::Main,
        Lemma::Twotothen,
        Lemma::Laplace,
        Lemma::Appendix,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Lemma::Tangents => "tangents",
            Lemma::Interpolation => "interpolation",
            Lemma::Numerator => "numerator",
            Lemma::Denominator => "denominator",
            Lemma::Switch => "switch",
            Lemma::Main => "main",
            Lemma::Twotothen => "twotothen",
            Lemma::Laplace => "laplace",
            Lemma::Appendix => "appendix",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.tag() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown lemma tag {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Values {
    Equality { lhs: Fe, rhs: Fe },
    ZeroSum { sum: Fe },
}

/// Result of evaluating one identity on one configuration.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub lemma: Lemma,
    pub config: Value,
    #[serde(flatten)]
    pub values: Values,
    pub pass: bool,
}

impl IdentityReport {
    fn equality(lemma: Lemma, config: Value, lhs: Fe, rhs: Fe) -> Self {
        IdentityReport { lemma, config, values: Values::Equality { lhs, rhs }, pass: lhs == rhs }
    }

    fn zero_sum(lemma: Lemma, config: Value, sum: Fe) -> Self {
        IdentityReport { lemma, config, values: Values::ZeroSum { sum }, pass: sum.is_zero() }
    }
}

fn hypothesis(msg: String) -> Error {
    Error::Hypothesis(msg)
}

/// All named index blocks are in range and pairwise disjoint, with no repeats.
fn check_disjoint(arc: &Arc, blocks: &[(&str, &[usize])]) -> Result<()> {
    let n = arc.len();
    let mut seen = vec![false; n];
    for (name, block) in blocks {
        for &i in *block {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if seen[i] {
                return Err(Error::InvalidIndexSet(format!("index {i} in {name} is used twice")));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

fn check_size(name: &str, block: &[usize], expected: i64) -> Result<()> {
    if block.len() as i64 != expected {
        return Err(hypothesis(format!("|{name}| = {} but must be {expected}", block.len())));
    }
    Ok(())
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `∏_{z ∈ zs} det(z, tail)^{-1}`.
fn inverse_det_product(arc: &Arc, zs: &[usize], tail: &[usize]) -> Result<Fe> {
    let field = arc.field();
    let mut idx = Vec::with_capacity(arc.k());
    let mut prod = Fe::ONE;
    for &z in zs {
        idx.clear();
        idx.push(z);
        idx.extend_from_slice(tail);
        prod = field.mul(prod, arc.det_of(&idx)?);
    }
    field.inv(prod)
}

/// Split `seq` into the subsequence at `positions` and its complement, both in order.
fn split_at_positions(seq: &[usize], positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut inside = Vec::with_capacity(positions.len());
    let mut outside = Vec::with_capacity(seq.len() - positions.len());
    for (i, &x) in seq.iter().enumerate() {
        if positions.contains(&i) {
            inside.push(x);
        } else {
            outside.push(x);
        }
    }
    (inside, outside)
}

fn with_sign(field: &FieldSpec, odd: bool, x: Fe) -> Fe {
    field.mul(field.sign(odd), x)
}

/// `T_{{x}∪D}(y) T_{{y}∪D}(z) T_{{z}∪D}(x) = (-1)^{t+1} T_{{x}∪D}(z) T_{{y}∪D}(x) T_{{z}∪D}(y)`.
pub fn check_lemma_of_tangents(
    bundle: &TangentBundle,
    d: &[usize],
    x: usize,
    y: usize,
    z: usize,
) -> Result<IdentityReport> {
    let arc = bundle.arc();
    let k = arc.k();
    let t = arc.t();
    if k < 3 {
        return Err(hypothesis(format!("needs k >= 3, got {k}")));
    }
    if t < 1 {
        return Err(hypothesis("needs t >= 1".into()));
    }
    check_size("D", d, k as i64 - 3)?;
    check_disjoint(arc, &[("D", d), ("x", &[x]), ("y", &[y]), ("z", &[z])])?;
    let field = arc.field();
    let with = |p: usize| concat(&[&[p], d]);
    let (bx, by, bz) = (with(x), with(y), with(z));
    let tv = |base: &[usize], p: usize| bundle.tangent_value_at(base, p);
    let lhs = field.product([tv(&bx, y)?, tv(&by, z)?, tv(&bz, x)?]);
    let rhs = field.product([tv(&bx, z)?, tv(&by, x)?, tv(&bz, y)?]);
    let rhs = with_sign(field, (t + 1) % 2 == 1, rhs);
    let config = json!({ "D": d, "x": x, "y": y, "z": z });
    Ok(IdentityReport::equality(Lemma::Tangents, config, lhs, rhs))
}

/// `0 = Σ_{a ∈ E} T_Y(a) ∏_{z ∈ E∖{a}} det(z, a, Y)^{-1}` for `|Y| = k-2`, `|E| = t+2`.
pub fn check_interpolation(bundle: &TangentBundle, y: &[usize], e: &[usize]) -> Result<IdentityReport> {
    let arc = bundle.arc();
    let (k, t, n) = (arc.k(), arc.t(), arc.len());
    if !(n >= k + t && k + t > k) {
        return Err(hypothesis(format!("needs |S| >= k + t > k, got |S| = {n}, k = {k}, t = {t}")));
    }
    check_size("Y", y, k as i64 - 2)?;
    check_size("E", e, t as i64 + 2)?;
    check_disjoint(arc, &[("Y", y), ("E", e)])?;
    let field = arc.field();
    let mut sum = Fe::ZERO;
    for &a in e {
        let others: Vec<usize> = e.iter().copied().filter(|&z| z != a).collect();
        let tail = concat(&[&[a], y]);
        let term = field.mul(bundle.tangent_value_at(y, a)?, inverse_det_product(arc, &others, &tail)?);
        sum = field.add(sum, term);
    }
    Ok(IdentityReport::zero_sum(Lemma::Interpolation, json!({ "Y": y, "E": e }), sum))
}

fn check_segre_shape(arc: &Arc, query: &SegreQuery) -> Result<()> {
    let n = query.a.len();
    check_size("B", &query.b, n as i64)?;
    check_size("D", &query.d, arc.k() as i64 - n as i64 - 1)?;
    check_disjoint(arc, &[("A", &query.a), ("B", &query.b), ("D", &query.d)])
}

fn check_swap(
    bundle: &TangentBundle,
    query: &SegreQuery,
    i: usize,
    j: usize,
    in_numerator: bool,
) -> Result<IdentityReport> {
    let arc = bundle.arc();
    check_segre_shape(arc, query)?;
    let n = query.a.len();
    if !(i < j && j < n) {
        return Err(hypothesis(format!("transposition ({i} {j}) is not valid for length {n}")));
    }
    let mut swapped = query.clone();
    if in_numerator {
        swapped.a.swap(i, j);
    } else {
        swapped.b.swap(i, j);
    }
    let field = arc.field();
    let lhs = bundle.segre_product(&swapped)?;
    let rhs = with_sign(field, (arc.t() + 1) % 2 == 1, bundle.segre_product(query)?);
    let lemma = if in_numerator { Lemma::Numerator } else { Lemma::Denominator };
    let config = json!({ "A": query.a, "B": query.b, "D": query.d, "swap": [i, j] });
    Ok(IdentityReport::equality(lemma, config, lhs, rhs))
}

/// `P_D(A*, B) = (-1)^{t+1} P_D(A, B)` where `A*` swaps positions `i` and `j` of `A`.
pub fn check_numerator_swap(
    bundle: &TangentBundle,
    query: &SegreQuery,
    i: usize,
    j: usize,
) -> Result<IdentityReport> {
    check_swap(bundle, query, i, j, true)
}

/// `P_D(A, B*) = (-1)^{t+1} P_D(A, B)` where `B*` swaps positions `i` and `j` of `B`.
pub fn check_denominator_swap(
    bundle: &TangentBundle,
    query: &SegreQuery,
    i: usize,
    j: usize,
) -> Result<IdentityReport> {
    check_swap(bundle, query, i, j, false)
}

/// `T_{D∪B}(y)/T_{D∪B}(x) · P_{D∪{y}}((x, A), B) = (-1)^{t+1} P_{D∪{x}}((y, A), B)`
/// with `|A| = |B| - 1`.
pub fn check_switch(
    bundle: &TangentBundle,
    d: &[usize],
    a: &[usize],
    b: &[usize],
    x: usize,
    y: usize,
) -> Result<IdentityReport> {
    let arc = bundle.arc();
    let n = b.len();
    if n == 0 {
        return Err(hypothesis("needs |B| >= 1".into()));
    }
    check_size("A", a, n as i64 - 1)?;
    check_size("D", d, arc.k() as i64 - n as i64 - 2)?;
    check_disjoint(arc, &[("D", d), ("A", a), ("B", b), ("x", &[x]), ("y", &[y])])?;
    let field = arc.field();
    let db = concat(&[d, b]);
    let ratio = field.div(bundle.tangent_value_at(&db, y)?, bundle.tangent_value_at(&db, x)?)?;
    let left = SegreQuery::new(concat(&[&[x], a]), b.to_vec(), concat(&[d, &[y]]));
    let right = SegreQuery::new(concat(&[&[y], a]), b.to_vec(), concat(&[d, &[x]]));
    let lhs = field.mul(ratio, bundle.segre_product(&left)?);
    let rhs = with_sign(field, (arc.t() + 1) % 2 == 1, bundle.segre_product(&right)?);
    let config = json!({ "D": d, "A": a, "B": b, "x": x, "y": y });
    Ok(IdentityReport::equality(Lemma::Switch, config, lhs, rhs))
}

/// Blocks for the sum over `B ⊆ L` against the sum over `Δ ⊆ Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainLemmaConfig {
    pub a: Vec<usize>,
    pub l: Vec<usize>,
    pub d: Vec<usize>,
    pub omega: Vec<usize>,
}

impl MainLemmaConfig {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn r(&self) -> usize {
        self.l.len()
    }

    /// Checks `n <= r <= n + p - 1`, `r <= t + 2`, the block sizes and disjointness.
    pub fn validate(&self, arc: &Arc) -> Result<()> {
        let (n, r) = (self.n() as i64, self.r() as i64);
        let (k, t, p) = (arc.k() as i64, arc.t() as i64, arc.field().p() as i64);
        if !(n <= r && r < n + p) {
            return Err(hypothesis(format!("needs n <= r <= n + p - 1, got n = {n}, r = {r}, p = {p}")));
        }
        if r > t + 2 {
            return Err(hypothesis(format!("needs r <= t + 2, got r = {r}, t = {t}")));
        }
        check_size("D", &self.d, k - 1 - r)?;
        check_size("Ω", &self.omega, t + 1 - n)?;
        check_disjoint(arc, &[("A", &self.a), ("L", &self.l), ("D", &self.d), ("Ω", &self.omega)])
    }

    fn to_json(&self) -> Value {
        json!({ "A": self.a, "L": self.l, "D": self.d, "Omega": self.omega, "n": self.n(), "r": self.r() })
    }
}

/// Terms of both sides of the main identity, in summation order.
///
/// Left: `(-1)^{σ(B,L)} P_{D∪(L∖B)}(A, B) ∏_{z ∈ Ω∪B} det(z, A, L∖B, D)^{-1}`
/// over `n`-subsets `B` of `L`. Right: `P_D(A∪Δ, L) ∏_{z ∈ (Ω∖Δ)∪L} det(z, A, Δ, D)^{-1}`
/// over `(r-n)`-subsets `Δ` of `Ω`, without the overall sign.
pub fn main_lemma_terms(bundle: &TangentBundle, cfg: &MainLemmaConfig) -> Result<(Vec<Fe>, Vec<Fe>)> {
    let arc = bundle.arc();
    let field = arc.field();
    let t = arc.t();
    let (n, r) = (cfg.n(), cfg.r());
    let mut left = Vec::new();
    for pos in (0..r).combinations(n) {
        let (b, l_minus_b) = split_at_positions(&cfg.l, &pos);
        let odd = sigma(&b, &cfg.l, t)? % 2 == 1;
        let query = SegreQuery::new(cfg.a.clone(), b.clone(), concat(&[&cfg.d, &l_minus_b]));
        let p = bundle.segre_product(&query)?;
        let zs = concat(&[&cfg.omega, &b]);
        let tail = concat(&[&cfg.a, &l_minus_b, &cfg.d]);
        let dets = inverse_det_product(arc, &zs, &tail)?;
        left.push(with_sign(field, odd, field.mul(p, dets)));
    }
    let mut right = Vec::new();
    for pos in (0..cfg.omega.len()).combinations(r - n) {
        let (delta, rest) = split_at_positions(&cfg.omega, &pos);
        let query = SegreQuery::new(concat(&[&cfg.a, &delta]), cfg.l.clone(), cfg.d.clone());
        let p = bundle.segre_product(&query)?;
        let zs = concat(&[&rest, &cfg.l]);
        let tail = concat(&[&cfg.a, &delta, &cfg.d]);
        right.push(field.mul(p, inverse_det_product(arc, &zs, &tail)?));
    }
    Ok((left, right))
}

/// Both sides of the main identity; the right side carries `(-1)^{(r-n)(nt+n+1)}`.
pub fn check_main_lemma(bundle: &TangentBundle, cfg: &MainLemmaConfig) -> Result<IdentityReport> {
    let arc = bundle.arc();
    cfg.validate(arc)?;
    let field = arc.field();
    let (left, right) = main_lemma_terms(bundle, cfg)?;
    let (n, r, t) = (cfg.n(), cfg.r(), arc.t());
    let odd = ((r - n) * (n * t + n + 1)) % 2 == 1;
    let lhs = field.sum(left);
    let rhs = with_sign(field, odd, field.sum(right));
    Ok(IdentityReport::equality(Lemma::Main, cfg.to_json(), lhs, rhs))
}

/// Blocks for the double sum over `B ⊆ L` and `τ ⊆ M = {1, ..., m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoToTheNConfig {
    /// `n` in `|A| = n - m`, `|Ω| = k - 2 - n`.
    pub n: usize,
    pub a: Vec<usize>,
    pub l: Vec<usize>,
    pub omega: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl TwoToTheNConfig {
    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// Checks `|S| = q + 2`, `n >= k - p`, the block sizes and disjointness.
    pub fn validate(&self, arc: &Arc) -> Result<()> {
        let (k, p, q) = (arc.k() as i64, arc.field().p() as i64, arc.field().q() as usize);
        let (n, m) = (self.n as i64, self.m() as i64);
        if arc.len() != q + 2 {
            return Err(hypothesis(format!("needs |S| = q + 2 = {}, got {}", q + 2, arc.len())));
        }
        if n < k - p {
            return Err(hypothesis(format!("needs n >= k - p = {}, got n = {n}", k - p)));
        }
        check_size("A", &self.a, n - m)?;
        check_size("L", &self.l, k - 1 - m)?;
        check_size("Ω", &self.omega, k - 2 - n)?;
        check_size("Y", &self.y, m)?;
        check_disjoint(
            arc,
            &[("A", &self.a), ("L", &self.l), ("Ω", &self.omega), ("X", &self.x), ("Y", &self.y)],
        )
    }

    fn to_json(&self) -> Value {
        json!({
            "A": self.a, "L": self.l, "Omega": self.omega, "X": self.x, "Y": self.y,
            "n": self.n, "m": self.m(),
        })
    }
}

/// Terms of the double sum, ordered by `B` then by `τ` as a bitmask.
pub fn twotothen_terms(bundle: &TangentBundle, cfg: &TwoToTheNConfig) -> Result<Vec<Fe>> {
    let arc = bundle.arc();
    let field = arc.field();
    let t = arc.t();
    let m = cfg.m();
    let mut terms = Vec::new();
    for pos in (0..cfg.l.len()).combinations(cfg.n - m) {
        let (b, l_minus_b) = split_at_positions(&cfg.l, &pos);
        let sigma_b = sigma(&b, &cfg.l, t)?;
        for mask in 0u32..(1 << m) {
            let tau: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let (x_tau, x_rest) = split_at_positions(&cfg.x, &tau);
            let (y_tau, y_rest) = split_at_positions(&cfg.y, &tau);
            let exponent = sigma_b + sigma(&x_tau, &cfg.x, t)? + tau.len() as u64;
            let query = SegreQuery::new(
                concat(&[&cfg.a, &y_tau]),
                concat(&[&b, &x_tau]),
                concat(&[&l_minus_b, &x_rest]),
            );
            let p = bundle.segre_product(&query)?;
            let zs = concat(&[&cfg.omega, &b, &x_tau, &y_rest]);
            let tail = concat(&[&cfg.a, &x_rest, &y_tau, &l_minus_b]);
            let dets = inverse_det_product(arc, &zs, &tail)?;
            terms.push(with_sign(field, exponent % 2 == 1, field.mul(p, dets)));
        }
    }
    Ok(terms)
}

pub fn check_twotothen(bundle: &TangentBundle, cfg: &TwoToTheNConfig) -> Result<IdentityReport> {
    let arc = bundle.arc();
    cfg.validate(arc)?;
    let sum = arc.field().sum(twotothen_terms(bundle, cfg)?);
    Ok(IdentityReport::zero_sum(Lemma::Twotothen, cfg.to_json(), sum))
}

/// `Σ_j (-1)^{j-1} det(y, W∖w_j, L) det(w_j, X, L) = det(W, L) det(y, X, L)`.
///
/// This is a polynomial identity; it holds for every input of the right sizes.
pub fn check_laplace(
    field: &FieldSpec,
    w: &[Vek],
    x: &[Vek],
    l: &[Vek],
    y: &Vek,
) -> Result<IdentityReport> {
    let n = x.len();
    let k = y.dim();
    if w.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: w.len() });
    }
    if n + 1 + l.len() != k {
        return Err(Error::DimensionMismatch { expected: k - n - 1, found: l.len() });
    }
    let rows = |parts: &[&[&Vek]]| -> Result<Fe> {
        let rows: Vec<&[Fe]> = parts.iter().flat_map(|g| g.iter().map(|v| v.coords())).collect();
        det(field, &rows)
    };
    let wr: Vec<&Vek> = w.iter().collect();
    let xr: Vec<&Vek> = x.iter().collect();
    let lr: Vec<&Vek> = l.iter().collect();
    let mut lhs = Fe::ZERO;
    for j in 0..=n {
        let w_minus: Vec<&Vek> = wr.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| *v).collect();
        let term = field.mul(rows(&[&[y], &w_minus, &lr])?, rows(&[&[wr[j]], &xr, &lr])?);
        lhs = field.add(lhs, with_sign(field, j % 2 == 1, term));
    }
    let rhs = field.mul(rows(&[&wr, &lr])?, rows(&[&[y], &xr, &lr])?);
    let codes = |vs: &[Vek]| vs.iter().map(|v| v.codes()).collect::<Vec<_>>();
    let config = json!({ "W": codes(w), "X": codes(x), "L": codes(l), "y": y.codes() });
    Ok(IdentityReport::equality(Lemma::Laplace, config, lhs, rhs))
}

/// `0 = Σ_{Δ ⊆ Ω, |Δ|=r} P_D(Δ, L) ∏_{z ∈ (Ω∖Δ)∪(L∖{ℓ_0})} det(z, Δ, D)^{-1}`.
pub fn check_appendix(
    bundle: &TangentBundle,
    l: &[usize],
    d: &[usize],
    omega: &[usize],
) -> Result<IdentityReport> {
    let arc = bundle.arc();
    let (k, t, p) = (arc.k() as i64, arc.t() as i64, arc.field().p() as i64);
    let r = l.len() as i64;
    if !(1 <= r && r <= t + 2 && r < p) {
        return Err(hypothesis(format!(
            "needs 1 <= r <= t + 2 and r <= p - 1, got r = {r}, t = {t}, p = {p}"
        )));
    }
    check_size("D", d, k - 1 - r)?;
    check_size("Ω", omega, t + 2)?;
    check_disjoint(arc, &[("L", l), ("D", d), ("Ω", omega)])?;
    let field = arc.field();
    let mut sum = Fe::ZERO;
    for pos in (0..omega.len()).combinations(l.len()) {
        let (delta, rest) = split_at_positions(omega, &pos);
        let query = SegreQuery::new(delta.clone(), l.to_vec(), d.to_vec());
        let pv = bundle.segre_product(&query)?;
        let zs = concat(&[&rest, &l[1..]]);
        let tail = concat(&[&delta, d]);
        sum = field.add(sum, field.mul(pv, inverse_det_product(arc, &zs, &tail)?));
    }
    let config = json!({ "L": l, "D": d, "Omega": omega, "r": r });
    Ok(IdentityReport::zero_sum(Lemma::Appendix, config, sum))
}

// ---------------------------------------------------------------------------
// Suites

/// How configurations are chosen by [`run_suite`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Exhaustive when the configuration count is at most `exhaustive_limit`.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct SamplingPolicy {
    pub mode: Sampling,
    pub exhaustive_limit: u64,
    pub samples: usize,
    pub seed: u64,
    /// Longest Segre product used by the transposition and switch suites.
    pub max_segre_len: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            mode: Sampling::Auto,
            exhaustive_limit: 100_000,
            samples: 1_000,
            seed: 1,
            max_segre_len: 2,
        }
    }
}

impl SamplingPolicy {
    pub fn exhaustive() -> Self {
        SamplingPolicy { mode: Sampling::Exhaustive, ..Default::default() }
    }

    pub fn sampled(samples: usize, seed: u64) -> Self {
        SamplingPolicy { mode: Sampling::Sampled, samples, seed, ..Default::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub lemma: Lemma,
    pub configurations: u128,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub reports: Vec<IdentityReport>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&IdentityReport> {
        self.reports.iter().find(|r| !r.pass)
    }

    /// `PASS m/m` or `FAIL j/m (first counterexample: ...)`, where `j` counts failures.
    pub fn summary(&self) -> String {
        let total = self.reports.len();
        match self.first_failure() {
            None => format!("PASS {total}/{total}"),
            Some(bad) => format!(
                "FAIL {}/{total} (first counterexample: {})",
                total - self.passed(),
                bad.config
            ),
        }
    }
}

#[derive(Clone, Debug)]
struct Block {
    size: usize,
    ordered: bool,
}

#[derive(Clone, Debug)]
struct Shape {
    params: Vec<(&'static str, usize)>,
    blocks: Vec<Block>,
}

fn ordered(_name: &'static str, size: usize) -> Block {
    Block { size, ordered: true }
}

fn unordered(_name: &'static str, size: usize) -> Block {
    Block { size, ordered: false }
}

impl Shape {
    fn footprint(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    fn param(&self, name: &str) -> usize {
        self.params.iter().find(|(n, _)| *n == name).map(|p| p.1).expect("shape parameter")
    }

    /// Number of ways to fill the blocks from `n` points.
    fn count(&self, n: usize) -> u128 {
        let f = self.footprint();
        if f > n {
            return 0;
        }
        let mut c: u128 = 1;
        for i in 0..f {
            c = c.saturating_mul((n - i) as u128);
        }
        for b in self.blocks.iter().filter(|b| !b.ordered) {
            c /= (1..=b.size as u128).product::<u128>();
        }
        c
    }

    fn enumerate(&self, n: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        let mut used = vec![false; n];
        let mut current: Vec<Vec<usize>> = Vec::new();
        self.fill(0, n, &mut used, &mut current, out);
    }

    fn fill(
        &self,
        block: usize,
        n: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if block == self.blocks.len() {
            out.push(current.clone());
            return;
        }
        let spec = &self.blocks[block];
        let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        let choices: Vec<Vec<usize>> = if spec.ordered {
            free.iter().copied().permutations(spec.size).collect()
        } else {
            free.iter().copied().combinations(spec.size).collect()
        };
        for choice in choices {
            for &i in &choice {
                used[i] = true;
            }
            current.push(choice.clone());
            self.fill(block + 1, n, used, current, out);
            current.pop();
            for &i in &choice {
                used[i] = false;
            }
        }
    }

    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        let picked = sample_indices(rng, n, self.footprint()).into_vec();
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut at = 0;
        for b in &self.blocks {
            let mut block = picked[at..at + b.size].to_vec();
            if !b.ordered {
                block.sort_unstable();
            }
            at += b.size;
            out.push(block);
        }
        out
    }
}

fn shapes(arc: &Arc, lemma: Lemma, policy: &SamplingPolicy) -> Vec<Shape> {
    let (k, t, p, n) = (arc.k(), arc.t(), arc.field().p() as usize, arc.len());
    let q = arc.field().q() as usize;
    let mut out = Vec::new();
    match lemma {
        Lemma::Tangents => {
            if k >= 3 && t >= 1 {
                out.push(Shape { params: vec![], blocks: vec![unordered("D", k - 3), ordered("xyz", 3)] });
            }
        }
        Lemma::Interpolation => {
            if t >= 1 && n >= k + t {
                out.push(Shape {
                    params: vec![],
                    blocks: vec![unordered("Y", k - 2), unordered("E", t + 2)],
                });
            }
        }
        Lemma::Numerator | Lemma::Denominator => {
            for len in 2..=policy.max_segre_len.min(k - 1) {
                for i in 0..len - 1 {
                    out.push(Shape {
                        params: vec![("swap", i)],
                        blocks: vec![ordered("A", len), ordered("B", len), unordered("D", k - len - 1)],
                    });
                }
            }
        }
        Lemma::Switch => {
            for len in 1..=policy.max_segre_len.min(k.saturating_sub(2)) {
                out.push(Shape {
                    params: vec![],
                    blocks: vec![
                        unordered("D", k - len - 2),
                        ordered("A", len - 1),
                        ordered("B", len),
                        ordered("xy", 2),
                    ],
                });
            }
        }
        Lemma::Main => {
            for nn in 0..=(t + 1).min(k - 1) {
                let r_max = (nn + p - 1).min(t + 2).min(k - 1);
                for r in nn..=r_max {
                    out.push(Shape {
                        params: vec![("n", nn), ("r", r)],
                        blocks: vec![
                            ordered("A", nn),
                            ordered("L", r),
                            unordered("D", k - 1 - r),
                            unordered("Omega", t + 1 - nn),
                        ],
                    });
                }
            }
        }
        Lemma::Twotothen => {
            if n == q + 2 && k >= 2 {
                let n_min = k.saturating_sub(p);
                for nn in n_min..=k - 2 {
                    for m in 0..=nn {
                        out.push(Shape {
                            params: vec![("n", nn)],
                            blocks: vec![
                                ordered("A", nn - m),
                                ordered("L", k - 1 - m),
                                unordered("Omega", k - 2 - nn),
                                ordered("X", m),
                                ordered("Y", m),
                            ],
                        });
                    }
                }
            }
        }
        Lemma::Appendix => {
            let r_max = (t + 2).min(p.saturating_sub(1)).min(k - 1);
            for r in 1..=r_max {
                out.push(Shape {
                    params: vec![],
                    blocks: vec![ordered("L", r), unordered("D", k - 1 - r), unordered("Omega", t + 2)],
                });
            }
        }
        Lemma::Laplace => {}
    }
    out.retain(|s| s.count(n) > 0);
    out
}

fn evaluate(bundle: &TangentBundle, lemma: Lemma, shape: &Shape, b: &[Vec<usize>]) -> Result<IdentityReport> {
    match lemma {
        Lemma::Tangents => check_lemma_of_tangents(bundle, &b[0], b[1][0], b[1][1], b[1][2]),
        Lemma::Interpolation => check_interpolation(bundle, &b[0], &b[1]),
        Lemma::Numerator | Lemma::Denominator => {
            let q = SegreQuery::new(b[0].clone(), b[1].clone(), b[2].clone());
            let i = shape.param("swap");
            check_swap(bundle, &q, i, i + 1, lemma == Lemma::Numerator)
        }
        Lemma::Switch => check_switch(bundle, &b[0], &b[1], &b[2], b[3][0], b[3][1]),
        Lemma::Main => {
            let cfg = MainLemmaConfig { a: b[0].clone(), l: b[1].clone(), d: b[2].clone(), omega: b[3].clone() };
            check_main_lemma(bundle, &cfg)
        }
        Lemma::Twotothen => {
            let cfg = TwoToTheNConfig {
                n: shape.param("n"),
                a: b[0].clone(),
                l: b[1].clone(),
                omega: b[2].clone(),
                x: b[3].clone(),
                y: b[4].clone(),
            };
            check_twotothen(bundle, &cfg)
        }
        Lemma::Appendix => check_appendix(bundle, &b[0], &b[1], &b[2]),
        Lemma::Laplace => Err(Error::InvalidParameters("the Laplace suite takes a field, not an arc".into())),
    }
}

/// Verify `lemma` on every configuration of the arc, or on a seeded sample.
///
/// Reports come back in generation order regardless of thread count.
pub fn run_suite(bundle: &TangentBundle, lemma: Lemma, policy: &SamplingPolicy) -> Result<SuiteOutcome> {
    let arc = bundle.arc();
    let n = arc.len();
    let shapes = shapes(arc, lemma, policy);
    if shapes.is_empty() {
        return Err(Error::NoValidConfiguration);
    }
    let total: u128 = shapes.iter().map(|s| s.count(n)).sum();
    let exhaustive = match policy.mode {
        Sampling::Exhaustive => true,
        Sampling::Sampled => false,
        Sampling::Auto => total <= policy.exhaustive_limit as u128,
    };
    let mut configs: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    if exhaustive {
        for (si, s) in shapes.iter().enumerate() {
            let mut out = Vec::new();
            s.enumerate(n, &mut out);
            configs.extend(out.into_iter().map(|c| (si, c)));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
        for i in 0..policy.samples {
            let si = i % shapes.len();
            configs.push((si, shapes[si].sample(n, &mut rng)));
        }
    }
    let reports = configs
        .par_iter()
        .map(|(si, blocks)| evaluate(bundle, lemma, &shapes[*si], blocks))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteOutcome {
        lemma,
        configurations: total,
        exhaustive,
        seed: (!exhaustive).then_some(policy.seed),
        reports,
    })
}

fn random_vek(field: &FieldSpec, k: usize, rng: &mut ChaCha8Rng) -> Vek {
    Vek((0..k).map(|_| field.elem(rng.gen_range(0..field.q() as u64)).unwrap()).collect())
}

fn random_combination(field: &FieldSpec, k: usize, basis: &[&Vek], rng: &mut ChaCha8Rng) -> Vek {
    let mut acc = Vek::zero(k);
    for v in basis {
        let c = field.elem(rng.gen_range(0..field.q() as u64)).unwrap();
        acc = acc.add(field, &v.scale(field, c));
    }
    acc
}

/// Seeded random instances of the Laplace identity in dimension `k`.
///
/// `W ∪ L` is always a basis; about a quarter of the instances take `y` in
/// `span(X ∪ L)`, where the right side vanishes.
pub fn run_laplace_suite(field: &FieldSpec, k: usize, samples: usize, seed: u64) -> Result<SuiteOutcome> {
    if k < 1 {
        return Err(Error::InvalidParameters("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(samples);
    while instances.len() < samples {
        let n = rng.gen_range(0..k);
        let w: Vec<Vek> = (0..=n).map(|_| random_vek(field, k, &mut rng)).collect();
        let l: Vec<Vek> = (0..k - n - 1).map(|_| random_vek(field, k, &mut rng)).collect();
        let rows: Vec<&[Fe]> = w.iter().chain(&l).map(|v| v.coords()).collect();
        if det(field, &rows)?.is_zero() {
            continue;
        }
        let x: Vec<Vek> = (0..n).map(|_| random_vek(field, k, &mut rng)).collect();
        let y = if rng.gen_range(0..4) == 0 {
            let span: Vec<&Vek> = x.iter().chain(&l).collect();
            random_combination(field, k, &span, &mut rng)
        } else {
            random_vek(field, k, &mut rng)
        };
        instances.push((w, x, l, y));
    }
    let reports = instances
        .par_iter()
        .map(|(w, x, l, y)| check_laplace(field, w, x, l, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteOutcome {
        lemma: Lemma::Laplace,
        configurations: samples as u128,
        exhaustive: false,
        seed: Some(seed),
        reports,
    })
}

/// Configuration object of a report as a map, for callers that inspect it.
pub fn config_map(report: &IdentityReport) -> Option<&Map<String, Value>> {
    report.config.as_object()
}
