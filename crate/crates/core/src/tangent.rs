//! Tangent functions `T_Y` and Segre products `P_D(A, B)` over a fixed arc.
//!
//! Index sets `Y` always refer to positions in the arc's point sequence. For
//! each `(k-2)`-subset the bundle caches the `t` tangent forms, normalized and
//! sorted, so `T_Y` is a well-defined function rather than a function up to a
//! scalar.

use std::collections::HashMap;
use std::sync::{Arc as Shared, RwLock};

use itertools::Itertools;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::arc::{secant_tangent_census, Arc};
use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::linalg::LinearForm;

type YKey = SmallVec<[u16; 8]>;

/// Per-form rescaling hook, called with the sorted `Y` and the form's position.
pub type FormScaler = dyn Fn(&[usize], usize) -> Fe + Send + Sync;

pub struct TangentBundle<'a> {
    arc: &'a Arc,
    cache: RwLock<HashMap<YKey, Shared<[LinearForm]>>>,
    scaler: Option<Box<FormScaler>>,
}

/// Arguments of a Segre product `P_D(A, B)`, as arc indices.
///
/// `a = (a_1, ..., a_n)`, `b = (b_0, ..., b_{n-1})` and `|d| = k - n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegreQuery {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub d: Vec<usize>,
}

impl SegreQuery {
    pub fn new(a: Vec<usize>, b: Vec<usize>, d: Vec<usize>) -> Self {
        SegreQuery { a, b, d }
    }

    /// `Y_i = D ∪ {a_1, ..., a_{i-1}} ∪ {b_i, ..., b_{n-1}}`, 0-based `i`.
    pub fn base(&self, i: usize) -> Vec<usize> {
        let mut y = self.d.clone();
        y.extend_from_slice(&self.a[..i]);
        y.extend_from_slice(&self.b[i + 1..]);
        y
    }
}

impl<'a> TangentBundle<'a> {
    pub fn new(arc: &'a Arc) -> Self {
        TangentBundle { arc, cache: RwLock::new(HashMap::new()), scaler: None }
    }

    /// A bundle whose tangent forms are multiplied by `scaler(Y, j)` after
    /// normalization. Every quantity consumed downstream is invariant under
    /// such rescaling; this exists to test that.
    pub fn with_scaler(arc: &'a Arc, scaler: Box<FormScaler>) -> Self {
        TangentBundle { arc, cache: RwLock::new(HashMap::new()), scaler: Some(scaler) }
    }

    pub fn arc(&self) -> &'a Arc {
        self.arc
    }

    pub fn t(&self) -> usize {
        self.arc.t()
    }

    fn key(&self, y: &[usize]) -> Result<YKey> {
        let need = self.arc.k() - 2;
        if y.len() != need {
            return Err(Error::InvalidIndexSet(format!(
                "tangent base needs {need} points, got {}",
                y.len()
            )));
        }
        let n = self.arc.len();
        let mut key: YKey = SmallVec::with_capacity(y.len());
        for &i in y {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            key.push(i as u16);
        }
        key.sort_unstable();
        if key.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet(format!("repeated index in {y:?}")));
        }
        Ok(key)
    }

    /// The `t` tangent forms at `Y`, sorted by normalized covector.
    pub fn tangent_forms(&self, y: &[usize]) -> Result<Shared<[LinearForm]>> {
        let key = self.key(y)?;
        if let Some(forms) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(forms.clone());
        }
        let sorted: Vec<usize> = key.iter().map(|&i| i as usize).collect();
        let census = secant_tangent_census(self.arc, &sorted)?;
        let mut forms = census.tangents;
        debug_assert_eq!(forms.len(), self.t());
        if let Some(scale) = &self.scaler {
            let field = self.arc.field();
            for (j, f) in forms.iter_mut().enumerate() {
                *f = f.scaled(field, scale(&sorted, j))?;
            }
        }
        let forms: Shared<[LinearForm]> = forms.into();
        // Concurrent builders compute the same value; the first insert wins.
        let mut cache = self.cache.write().expect("cache lock");
        Ok(cache.entry(key).or_insert(forms).clone())
    }

    /// `T_Y(x) = ∏ α(x)` over the tangent forms at `Y`.
    pub fn tangent_value(&self, y: &[usize], x: &[Fe]) -> Result<Fe> {
        let field = self.arc.field();
        let forms = self.tangent_forms(y)?;
        Ok(field.product(forms.iter().map(|f| f.eval(field, x))))
    }

    /// `T_Y` at the arc point with index `x`.
    pub fn tangent_value_at(&self, y: &[usize], x: usize) -> Result<Fe> {
        if x >= self.arc.len() {
            return Err(Error::IndexOutOfRange { index: x, len: self.arc.len() });
        }
        self.tangent_value(y, self.arc.point(x).coords())
    }

    /// Populate the cache for every `(k-2)`-subset.
    pub fn prebuild(&self) -> Result<usize> {
        let subsets: Vec<Vec<usize>> = (0..self.arc.len()).combinations(self.arc.k() - 2).collect();
        subsets.par_iter().try_for_each(|y| self.tangent_forms(y).map(|_| ()))?;
        Ok(subsets.len())
    }

    pub fn cached(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// `P_D(A, B) = ∏_i T_{Y_i}(a_i) / T_{Y_i}(b_{i-1})`; `P_D(∅, ∅) = 1`.
    pub fn segre_product(&self, query: &SegreQuery) -> Result<Fe> {
        let n = query.a.len();
        let k = self.arc.k();
        if query.b.len() != n {
            return Err(Error::MalformedQuery {
                position: 0,
                reason: format!("|A| = {n} but |B| = {}", query.b.len()),
            });
        }
        if n + query.d.len() + 1 != k {
            return Err(Error::MalformedQuery {
                position: 0,
                reason: format!("|D| = {} but k - n - 1 = {}", query.d.len(), k as i64 - n as i64 - 1),
            });
        }
        let field = self.arc.field();
        let mut num = Fe::ONE;
        let mut den = Fe::ONE;
        for i in 0..n {
            let y = query.base(i);
            let malformed = |reason: String| Error::MalformedQuery { position: i + 1, reason };
            let key = self.key(&y).map_err(|e| malformed(e.to_string()))?;
            let (ai, bi) = (query.a[i], query.b[i]);
            if key.contains(&(ai as u16)) {
                return Err(malformed(format!("a_{} = {ai} lies in the base", i + 1)));
            }
            if key.contains(&(bi as u16)) {
                return Err(malformed(format!("b_{i} = {bi} lies in the base")));
            }
            num = field.mul(num, self.tangent_value_at(&y, ai)?);
            den = field.mul(den, self.tangent_value_at(&y, bi)?);
        }
        field.div(num, den)
    }
}

/// Adjacent transpositions needed to move `b` to the end of `l`, keeping relative orders.
pub fn inversions(b: &[usize], l: &[usize]) -> Result<u64> {
    if let Some(&x) = b.iter().find(|x| !l.contains(x)) {
        return Err(Error::InvalidIndexSet(format!("{x} is not an element of L = {l:?}")));
    }
    let mut count = 0u64;
    let mut outside_after = 0u64;
    for x in l.iter().rev() {
        if b.contains(x) {
            count += outside_after;
        } else {
            outside_after += 1;
        }
    }
    Ok(count)
}

/// `σ(B, L) = (t + 1) · inversions(B, L)`; only its parity is consumed.
pub fn sigma(b: &[usize], l: &[usize], t: usize) -> Result<u64> {
    Ok((t as u64 + 1) * inversions(b, l)?)
}
