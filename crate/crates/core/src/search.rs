//! Exhaustive backtracking search for maximal arcs.
//!
//! Points of PG(k-1, q) are indexed in lexicographic order of their normalized
//! representatives (first nonzero coordinate 1). An arc is grown one point at a
//! time, always with a larger index than the previous one, and after each
//! extension every candidate lying on a hyperplane spanned by `k-1` chosen
//! points is removed set-wise.
//!
//! Every arc with at least `k+1` points contains `k+1` points in general
//! position, and the projective group maps any such frame to the standard one.
//! So the maximum over arcs through the standard frame is the global maximum,
//! and the frame-fixed search only explores supersets of the frame.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::arc::{bush_frame, Arc};
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldSpec};
use crate::linalg::{dot, kernel, Vek};

/// Largest projective space the search will index.
pub const MAX_POINTS: usize = 8192;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    MaxSize,
    /// Count arcs of every size through the root, without pruning.
    Census,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Root at the standard frame.
    FrameFixed,
    /// Root at the empty arc.
    Naive,
}

#[derive(Clone, Debug)]
pub struct SearchTask {
    pub field: FieldSpec,
    pub k: usize,
    pub mode: SearchMode,
    pub reduction: Reduction,
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    pub jobs: usize,
}

impl SearchTask {
    pub fn new(field: FieldSpec, k: usize) -> Self {
        SearchTask {
            field,
            k,
            mode: SearchMode::MaxSize,
            reduction: Reduction::FrameFixed,
            node_budget: None,
            time_budget: None,
            jobs: 1,
        }
    }

    pub fn naive(mut self) -> Self {
        self.reduction = Reduction::Naive;
        self
    }

    pub fn census(mut self) -> Self {
        self.mode = SearchMode::Census;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn node_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn time_budget(mut self, limit: Duration) -> Self {
        self.time_budget = Some(limit);
        self
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub size: usize,
    /// Lexicographically first arc of maximum size, points in index order.
    pub witness: Arc,
    pub nodes: u64,
    pub elapsed: Duration,
    /// Number of arcs through the root for each size, in census mode.
    pub census: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    fn and_not(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    /// Bits at positions `>= from`.
    fn count_from(&self, from: usize) -> usize {
        let w = from / 64;
        if w >= self.0.len() {
            return 0;
        }
        let head = (self.0[w] >> (from % 64)).count_ones() as usize;
        head + self.0[w + 1..].iter().map(|x| x.count_ones() as usize).sum::<usize>()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// Normalized points of PG(k-1, q) with their hyperplane incidences.
pub struct PointSpace {
    field: FieldSpec,
    k: usize,
    points: Vec<Vek>,
    /// `hyperplanes[h]` holds the points on the hyperplane whose normalized
    /// covector is `points[h]`.
    hyperplanes: Vec<Bits>,
}

impl PointSpace {
    pub fn new(field: &FieldSpec, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameters(format!("dimension k = {k} must be at least 2")));
        }
        let q = field.q() as u128;
        let count = (q.pow(k as u32) - 1) / (q - 1);
        if count > MAX_POINTS as u128 {
            return Err(Error::InvalidParameters(format!(
                "PG({}, {q}) has {count} points; the search indexes at most {MAX_POINTS}",
                k - 1
            )));
        }
        let q = q as u64;
        let mut points = Vec::with_capacity(count as usize);
        for lead in (0..k).rev() {
            let tail_len = k - 1 - lead;
            for code in 0..q.pow(tail_len as u32) {
                let mut coords = vec![Fe::ZERO; k];
                coords[lead] = Fe::ONE;
                let mut c = code;
                for j in (lead + 1..k).rev() {
                    coords[j] = field.elem(c % q)?;
                    c /= q;
                }
                points.push(Vek(coords));
            }
        }
        let n = points.len();
        let hyperplanes = points
            .par_iter()
            .map(|h| {
                let mut bits = Bits::new(n);
                for (i, p) in points.iter().enumerate() {
                    if dot(field, h.coords(), p.coords()).is_zero() {
                        bits.set(i);
                    }
                }
                bits
            })
            .collect();
        Ok(PointSpace { field: field.clone(), k, points, hyperplanes })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Vek {
        &self.points[i]
    }

    /// Index of the projective point of a nonzero vector.
    pub fn index_of(&self, v: &[Fe]) -> Result<usize> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: v.len() });
        }
        let lead = v.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroForm)?;
        let s = self.field.inv(v[lead])?;
        let q = self.field.q() as usize;
        let mut tail = 0usize;
        for &c in &v[lead + 1..] {
            tail = tail * q + self.field.mul(c, s).code() as usize;
        }
        Ok((q.pow((self.k - 1 - lead) as u32) - 1) / (q - 1) + tail)
    }

    fn hyperplane_through(&self, idx: &[usize]) -> usize {
        let rows: Vec<&[Fe]> = idx.iter().map(|&i| self.points[i].coords()).collect();
        let normal = kernel(&self.field, &rows, self.k).expect("rows have k columns");
        debug_assert_eq!(normal.len(), 1, "hyperplane through dependent points");
        self.index_of(&normal[0]).expect("kernel vectors are nonzero")
    }

    /// Remove from `alive` every point that would break the arc `chosen ∪ {c}`.
    fn forbid(&self, chosen: &[usize], c: usize, alive: &mut Bits) {
        let k = self.k;
        if chosen.len() + 1 >= k - 1 {
            let mut idx = Vec::with_capacity(k - 1);
            for t in chosen.iter().copied().combinations(k - 2) {
                idx.clear();
                idx.extend_from_slice(&t);
                idx.push(c);
                alive.and_not(&self.hyperplanes[self.hyperplane_through(&idx)]);
            }
        } else {
            // Fewer than k-1 points: every point of their span is excluded.
            let basis: Vec<&Vek> = chosen.iter().chain(std::iter::once(&c)).map(|&i| &self.points[i]).collect();
            let q = self.field.q() as u64;
            for code in 1..q.pow(basis.len() as u32) {
                let mut v = Vek::zero(k);
                let mut rest = code;
                for b in &basis {
                    let coeff = self.field.elem(rest % q).expect("digit below q");
                    rest /= q;
                    v = v.add(&self.field, &b.scale(&self.field, coeff));
                }
                if let Ok(i) = self.index_of(v.coords()) {
                    alive.clear(i);
                }
            }
        }
    }

    /// Candidates compatible with every point of `chosen`, which must be an arc.
    fn alive_after(&self, chosen: &[usize]) -> Bits {
        let mut alive = Bits::full(self.len());
        for (j, &c) in chosen.iter().enumerate() {
            self.forbid(&chosen[..j], c, &mut alive);
        }
        alive
    }
}

/// The standard frame `e_1, ..., e_k, e_1 + ... + e_k`.
pub fn frame_fix(field: &FieldSpec, k: usize) -> Result<Arc> {
    bush_frame(field, k)
}

/// Normalized points `x` such that `arc ∪ {x}` is again an arc, in lexicographic order.
///
/// Below `k` points the stronger condition is used: `x` must lie outside the
/// span of the arc, so that the result can still be extended to a basis.
pub fn extend_candidates(arc: &Arc) -> Result<Vec<Vek>> {
    let space = PointSpace::new(arc.field(), arc.k())?;
    let chosen = arc
        .points()
        .iter()
        .map(|p| space.index_of(p.coords()))
        .collect::<Result<Vec<_>>>()?;
    let alive = space.alive_after(&chosen);
    Ok(alive.ones().map(|i| space.points[i].clone()).collect())
}

struct Limits<'a> {
    start: Instant,
    node_budget: Option<u64>,
    time_budget: Option<Duration>,
    total: &'a AtomicU64,
    abort: &'a AtomicBool,
}

impl Limits<'_> {
    const FLUSH: u64 = 64;

    fn flush(&self, pending: &mut u64) -> bool {
        let total = self.total.fetch_add(*pending, Ordering::Relaxed) + *pending;
        *pending = 0;
        if self.node_budget.is_some_and(|b| total > b)
            || self.time_budget.is_some_and(|t| self.start.elapsed() > t)
        {
            self.abort.store(true, Ordering::Relaxed);
        }
        self.abort.load(Ordering::Relaxed)
    }
}

struct Branch<'a> {
    space: &'a PointSpace,
    limits: &'a Limits<'a>,
    census: Option<Vec<u64>>,
    chosen: Vec<usize>,
    best: usize,
    witness: Vec<usize>,
    nodes: u64,
    pending: u64,
}

impl Branch<'_> {
    /// Visit the arc `self.chosen`; `alive` holds its candidates of larger index.
    fn visit(&mut self, alive: &Bits, from: usize) -> bool {
        self.nodes += 1;
        self.pending += 1;
        if self.pending >= Limits::FLUSH && self.limits.flush(&mut self.pending) {
            return false;
        }
        let len = self.chosen.len();
        if let Some(c) = &mut self.census {
            if c.len() <= len {
                c.resize(len + 1, 0);
            }
            c[len] += 1;
        }
        if len > self.best {
            self.best = len;
            self.witness = self.chosen.clone();
        }
        let pruning = self.census.is_none();
        for c in alive.ones().filter(|&c| c >= from) {
            if pruning && len + alive.count_from(c) <= self.best {
                break;
            }
            let mut next = alive.clone();
            self.space.forbid(&self.chosen, c, &mut next);
            self.chosen.push(c);
            let ok = self.visit(&next, c + 1);
            self.chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Exact maximum arc size (or census) for the task.
///
/// The tree is split at the first free decision; each branch runs with its own
/// bound, so the node count and witness do not depend on `jobs`.
pub fn max_arc_size(task: &SearchTask) -> Result<SearchOutcome> {
    if task.jobs == 0 {
        return Err(Error::InvalidParameters("parallel width must be positive".into()));
    }
    if task.node_budget == Some(0) || task.time_budget.is_some_and(|t| t.is_zero()) {
        return Err(Error::InvalidParameters("budgets must be positive".into()));
    }
    let start = Instant::now();
    let space = PointSpace::new(&task.field, task.k)?;
    let root: Vec<usize> = match task.reduction {
        Reduction::Naive => Vec::new(),
        Reduction::FrameFixed => {
            let frame = frame_fix(&task.field, task.k)?;
            let mut idx = frame
                .points()
                .iter()
                .map(|p| space.index_of(p.coords()))
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            idx
        }
    };
    let mut alive = space.alive_after(&root);
    // Candidates below the largest root point are still allowed: the root is a
    // fixed set, not a prefix of the increasing order.
    for &r in &root {
        alive.clear(r);
    }
    let total = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let limits = Limits {
        start,
        node_budget: task.node_budget,
        time_budget: task.time_budget,
        total: &total,
        abort: &abort,
    };
    let census_mode = task.mode == SearchMode::Census;
    let first: Vec<usize> = alive.ones().collect();

    let run_branch = |c: usize| {
        if abort.load(Ordering::Relaxed) {
            return (false, 0, Vec::new(), 0, None);
        }
        let mut next = alive.clone();
        space.forbid(&root, c, &mut next);
        let mut chosen = root.clone();
        chosen.push(c);
        let mut b = Branch {
            space: &space,
            limits: &limits,
            census: census_mode.then(Vec::new),
            chosen,
            best: root.len(),
            witness: Vec::new(),
            nodes: 0,
            pending: 0,
        };
        let ok = b.visit(&next, c + 1);
        limits.flush(&mut b.pending);
        (ok, b.best, b.witness, b.nodes, b.census)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(task.jobs)
        .build()
        .map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let results: Vec<_> = pool.install(|| first.par_iter().map(|&c| run_branch(c)).collect());

    let mut nodes = 1u64;
    let mut best = root.len();
    let mut witness = root.clone();
    let mut census: Vec<u64> = vec![0; root.len() + 1];
    census[root.len()] = 1;
    let mut complete = true;
    for (ok, size, w, n, c) in results {
        complete &= ok;
        nodes += n;
        if size > best {
            best = size;
            witness = w;
        }
        for (i, x) in c.unwrap_or_default().into_iter().enumerate() {
            if census.len() <= i {
                census.resize(i + 1, 0);
            }
            census[i] += x;
        }
    }
    if !complete || task.node_budget.is_some_and(|b| nodes > b) {
        return Err(Error::BudgetExhausted { nodes: total.load(Ordering::Relaxed) + 1 });
    }
    witness.sort_unstable();
    let points = witness.iter().map(|&i| space.points[i].clone()).collect();
    Ok(SearchOutcome {
        size: best,
        witness: Arc::new(task.field.clone(), task.k, points)?,
        nodes,
        elapsed: start.elapsed(),
        census: census_mode.then_some(census),
    })
}
