use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use proptest::prelude::*;

use arclab_core::arc::{dual_arc, hyperoval, mds_check, mds_check_incremental, nrc, Arc};
use arclab_core::identity::{
    check_appendix, check_interpolation, main_lemma_terms, run_suite, Lemma, MainLemmaConfig, SamplingPolicy, Values,
};
use arclab_core::io::{format_arc, parse_arc, ArcJson};
use arclab_core::linalg::{det, nullspace_forms, rank};
use arclab_core::search::{extend_candidates, max_arc_size, SearchTask};
use arclab_core::{Fe, FieldSpec, SegreQuery, TangentBundle, Vek};

const ORDERS: [(u64, u32); 12] =
    [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (2, 4), (5, 2), (3, 3), (2, 6)];

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|(p, h)| FieldSpec::new(p, h).unwrap())
}

fn elements(f: &FieldSpec, n: usize) -> impl Strategy<Value = Vec<Fe>> {
    let f = f.clone();
    prop::collection::vec(0..f.q() as u64, n).prop_map(move |c| c.into_iter().map(|x| f.elem(x).unwrap()).collect())
}

fn field_and(n: usize) -> impl Strategy<Value = (FieldSpec, Vec<Fe>)> {
    field_strategy().prop_flat_map(move |f| (Just(f.clone()), elements(&f, n)))
}

fn matrix(k: usize) -> impl Strategy<Value = (FieldSpec, Vec<Vec<Fe>>)> {
    field_and(k * k).prop_map(move |(f, xs)| (f, xs.chunks(k).map(|c| c.to_vec()).collect()))
}

fn det_of(f: &FieldSpec, m: &[Vec<Fe>]) -> Fe {
    let rows: Vec<&[Fe]> = m.iter().map(|r| r.as_slice()).collect();
    det(f, &rows).unwrap()
}

proptest! {
    #[test]
    fn field_axioms((f, x) in field_and(3)) {
        let (a, b, c) = (x[0], x[1], x[2]);
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            prop_assert_eq!(f.div(f.mul(b, a), a).unwrap(), b);
        }
    }

    #[test]
    fn det_is_multilinear_and_alternating((f, m) in (2usize..6).prop_flat_map(matrix), i in 0usize..6, j in 0usize..6, s in 0u64..64) {
        let k = m.len();
        let (i, j) = (i % k, j % k);
        let s = f.elem(s % f.q() as u64).unwrap();
        let d = det_of(&f, &m);
        let mut scaled = m.clone();
        scaled[i] = scaled[i].iter().map(|&x| f.mul(x, s)).collect();
        prop_assert_eq!(det_of(&f, &scaled), f.mul(d, s));
        if i != j {
            let mut swapped = m.clone();
            swapped.swap(i, j);
            prop_assert_eq!(det_of(&f, &swapped), f.neg(d));
            let mut repeated = m.clone();
            repeated[j] = repeated[i].clone();
            prop_assert_eq!(det_of(&f, &repeated), Fe::ZERO);
            let mut sheared = m.clone();
            sheared[j] = m[j].iter().zip(&m[i]).map(|(&y, &x)| f.add(y, f.mul(s, x))).collect();
            prop_assert_eq!(det_of(&f, &sheared), d);
        }
        let rows: Vec<&[Fe]> = m.iter().map(|r| r.as_slice()).collect();
        prop_assert_eq!(d.is_zero(), rank(&f, &rows) < k);
    }

    #[test]
    fn nullspace_forms_annihilate((f, xs) in field_and(15), m in 0usize..4) {
        let k = 5;
        let pts: Vec<&[Fe]> = xs.chunks(k).take(m).collect();
        match nullspace_forms(&f, k, &pts) {
            Ok(forms) => {
                prop_assert_eq!(forms.len(), k - m);
                for form in &forms {
                    prop_assert!(form.is_normalized());
                    for p in &pts {
                        prop_assert_eq!(form.eval(&f, p), Fe::ZERO);
                    }
                }
            }
            Err(_) => prop_assert!(rank(&f, &pts) < m),
        }
    }

    #[test]
    fn segre_products_ignore_form_scaling(seed in any::<u64>(), order in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
        let f = FieldSpec::new(11, 1).unwrap();
        let arc = nrc(&f, 4).unwrap();
        let plain = TangentBundle::new(&arc);
        let scaled = scaled_bundle(&arc, seed);
        let q = SegreQuery::new(order[0..2].to_vec(), order[2..4].to_vec(), order[4..5].to_vec());
        prop_assert_eq!(plain.segre_product(&q).unwrap(), scaled.segre_product(&q).unwrap());
    }
}

fn scaled_bundle(arc: &Arc, seed: u64) -> TangentBundle<'_> {
    let q = arc.field().q() as u64;
    let f = arc.field().clone();
    let state = AtomicU64::new(seed | 1);
    TangentBundle::with_scaler(
        arc,
        Box::new(move |y, j| {
            let mix = y.iter().fold(state.fetch_add(0x9e37_79b9, Ordering::Relaxed), |h, &i| h.rotate_left(7) ^ i as u64);
            f.elem(1 + (mix ^ j as u64) % (q - 1)).unwrap()
        }),
    )
}

#[test]
fn fermat_and_characteristic_over_whole_fields() {
    for (p, h) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 4), (2, 8), (7, 3), (2, 9)] {
        let f = FieldSpec::new(p, h).unwrap();
        let q = f.q() as u64;
        assert!(q <= 512);
        for a in f.elements() {
            if !a.is_zero() {
                assert_eq!(f.pow(a, q - 1), Fe::ONE);
            }
            assert_eq!(f.elem(a.code() as u64).unwrap(), a);
            if p == 2 {
                assert_eq!(f.neg(a), a);
            }
        }
        assert_eq!(f.sum(std::iter::repeat_n(Fe::ONE, p as usize)), Fe::ZERO);
        assert_eq!(f.pow(Fe::ONE, 0), Fe::ONE);
    }
}

fn suites_pass(bundle: &TangentBundle) {
    let policy = SamplingPolicy::sampled(150, 3);
    for lemma in [Lemma::Tangents, Lemma::Interpolation, Lemma::Numerator, Lemma::Switch, Lemma::Main, Lemma::Appendix] {
        if let Ok(out) = run_suite(bundle, lemma, &policy) {
            assert!(out.all_passed(), "{lemma}: {}", out.summary());
        }
    }
}

#[test]
fn verdicts_survive_form_scaling() {
    for (p, h, k) in [(7, 1, 3), (11, 1, 4), (3, 2, 4)] {
        let arc = nrc(&FieldSpec::new(p, h).unwrap(), k).unwrap();
        suites_pass(&scaled_bundle(&arc, 17));
    }
}

#[test]
fn verdicts_survive_rescaled_points() {
    let f = FieldSpec::new(11, 1).unwrap();
    let mut arc = nrc(&f, 4).unwrap();
    for i in 0..arc.len() {
        arc = arc.rescaled(i, f.elem(1 + (3 * i as u64 + 2) % 10).unwrap()).unwrap();
    }
    suites_pass(&TangentBundle::new(&arc));
}

#[test]
fn verdicts_survive_relabeling() {
    let f = FieldSpec::new(7, 1).unwrap();
    let base = nrc(&f, 4).unwrap();
    let mut pts = base.points().to_vec();
    pts.reverse();
    pts.rotate_left(3);
    let arc = Arc::new(f, 4, pts).unwrap();
    suites_pass(&TangentBundle::new(&arc));
}

#[test]
fn main_identity_at_r_equal_n_is_syntactic() {
    let arc = nrc(&FieldSpec::new(3, 2).unwrap(), 4).unwrap();
    let bundle = TangentBundle::new(&arc);
    let t = arc.t();
    for n in 0..=2 {
        for order in (0..arc.len()).permutations(n + n + (3 - n) + (t + 1 - n)).take(40) {
            let (a, rest) = order.split_at(n);
            let (l, rest) = rest.split_at(n);
            let (d, omega) = rest.split_at(3 - n);
            let cfg = MainLemmaConfig { a: a.to_vec(), l: l.to_vec(), d: d.to_vec(), omega: omega.to_vec() };
            let (left, right) = main_lemma_terms(&bundle, &cfg).unwrap();
            assert_eq!(left, right);
        }
    }
}

#[test]
fn appendix_at_r_one_is_scaled_interpolation() {
    let f = FieldSpec::new(7, 1).unwrap();
    let arc = nrc(&f, 3).unwrap();
    let bundle = TangentBundle::new(&arc);
    let t = arc.t();
    for order in (0..arc.len()).permutations(1 + 1 + t + 2).step_by(7) {
        let (l0, d, omega) = (order[0], order[1], &order[2..]);
        let app = check_appendix(&bundle, &[l0], &[d], omega).unwrap();
        let int = check_interpolation(&bundle, &[d], omega).unwrap();
        let (Values::ZeroSum { sum: a }, Values::ZeroSum { sum: i }) = (&app.values, &int.values) else {
            panic!("zero-sum reports expected");
        };
        assert_eq!(f.mul(*a, bundle.tangent_value_at(&[d], l0).unwrap()), *i);
    }
}

#[test]
fn identities_are_not_vacuous_in_odd_characteristic() {
    let arc = nrc(&FieldSpec::new(7, 1).unwrap(), 3).unwrap();
    let bundle = TangentBundle::new(&arc);
    let out = run_suite(&bundle, Lemma::Tangents, &SamplingPolicy::exhaustive()).unwrap();
    for r in &out.reports {
        let Values::Equality { lhs, rhs } = r.values else { panic!() };
        assert!(!lhs.is_zero());
        assert_eq!(rhs, lhs);
    }
}

#[test]
fn arcs_round_trip_through_text_and_json() {
    for (p, h, k) in [(5, 1, 3), (2, 3, 3), (3, 2, 4), (13, 1, 6)] {
        let f = FieldSpec::new(p, h).unwrap();
        let mut arcs = vec![nrc(&f, k).unwrap()];
        if p == 2 {
            arcs.push(hyperoval(&f).unwrap());
        }
        arcs.push(dual_arc(&arcs[0]).unwrap());
        for a in arcs {
            assert_eq!(parse_arc(&format_arc(&a), None, 1 << 20).unwrap(), a);
            let text = serde_json::to_string(&ArcJson::from_arc(&a)).unwrap();
            assert_eq!(serde_json::from_str::<ArcJson>(&text).unwrap().to_arc(1 << 20).unwrap(), a);
        }
    }
}

#[test]
fn candidates_match_incremental_check() {
    for (p, h, k, take) in [(5, 1, 3, 4), (2, 2, 3, 3), (5, 1, 4, 4), (7, 1, 3, 2)] {
        let f = FieldSpec::new(p, h).unwrap();
        let base = nrc(&f, k).unwrap();
        let arc = Arc::new(f.clone(), k, base.points()[..take].to_vec()).unwrap();
        let got: Vec<Vec<u32>> = extend_candidates(&arc).unwrap().iter().map(Vek::codes).collect();
        let q = f.q() as u64;
        let mut want = Vec::new();
        for code in 0..q.pow(k as u32) {
            let v: Vec<u64> = (0..k).map(|i| code / q.pow((k - 1 - i) as u32) % q).collect();
            if v.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            let x = Vek::from_codes(&f, &v).unwrap();
            let mut pts = arc.points().to_vec();
            pts.push(x.clone());
            if mds_check_incremental(&f, k, &pts).unwrap().passed() && !arc.normalized_points().contains(&x) {
                want.push(x.codes());
            }
        }
        assert_eq!(got, want, "q = {}, k = {k}", f.q());
    }
}

#[test]
fn search_is_deterministic_and_monotone() {
    for (p, h, k) in [(2, 1, 3), (3, 1, 3), (2, 2, 4), (5, 1, 3), (7, 1, 3)] {
        let f = FieldSpec::new(p, h).unwrap();
        let a = max_arc_size(&SearchTask::new(f.clone(), k)).unwrap();
        let b = max_arc_size(&SearchTask::new(f.clone(), k).jobs(3)).unwrap();
        assert_eq!((a.size, a.nodes, &a.witness), (b.size, b.nodes, &b.witness));
        assert!(a.size > k);
        assert!(mds_check(&f, k, a.witness.points()).unwrap().passed());
    }
}
