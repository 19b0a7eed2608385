//! Acceptance grid. Prints one line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;

use arclab_core::arc::{bush_frame, dual_arc, hyperoval, mds_check, nrc, secant_tangent_census, Arc};
use arclab_core::identity::{
    main_lemma_terms, run_laplace_suite, run_suite, twotothen_terms, Lemma, MainLemmaConfig,
    SamplingPolicy, SuiteOutcome, TwoToTheNConfig, Values,
};
use arclab_core::search::{max_arc_size, SearchTask};
use arclab_core::{FieldSpec, TangentBundle};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Check);

fn gf(q: u32) -> FieldSpec {
    let (p, h) = match q {
        4 => (2, 2),
        8 => (2, 3),
        9 => (3, 2),
        _ => (q as u64, 1),
    };
    FieldSpec::new(p, h).expect("field")
}

fn nrc_q(q: u32, k: usize) -> Arc {
    nrc(&gf(q), k).expect("nrc")
}

fn suite(arc: &Arc, lemma: Lemma, policy: &SamplingPolicy) -> std::result::Result<SuiteOutcome, String> {
    let bundle = TangentBundle::new(arc);
    bundle.prebuild().map_err(|e| e.to_string())?;
    run_suite(&bundle, lemma, policy).map_err(|e| format!("{lemma} on q={} k={}: {e}", arc.field().q(), arc.k()))
}

fn require(out: &SuiteOutcome, label: &str, min: usize) -> std::result::Result<String, String> {
    if out.reports.len() < min {
        return Err(format!("{label}: only {} configurations", out.reports.len()));
    }
    if !out.all_passed() {
        return Err(format!("{label}: {}", out.summary()));
    }
    Ok(format!("{label} {}", out.summary()))
}

fn c1() -> Check {
    let mut parts = Vec::new();
    for (q, want) in [(5, 120), (7, 336), (8, 504)] {
        let out = suite(&nrc_q(q, 3), Lemma::Tangents, &SamplingPolicy::exhaustive())?;
        if out.reports.len() != want {
            return Err(format!("conic/GF({q}): {} triples, expected {want}", out.reports.len()));
        }
        parts.push(require(&out, &format!("conic/GF({q})"), want)?);
    }
    for (q, k) in [(9, 4), (11, 4), (11, 5)] {
        let out = suite(&nrc_q(q, k), Lemma::Tangents, &SamplingPolicy::sampled(1000, 1))?;
        parts.push(require(&out, &format!("NRC({q},{k})"), 1000)?);
    }
    Ok(parts.join(", "))
}

fn c2() -> Check {
    let mut parts = Vec::new();
    for (q, k) in [(5, 3), (7, 3), (8, 3), (11, 4)] {
        let arc = nrc_q(q, k);
        let (n, t) = (arc.len(), arc.t());
        if !(n >= k + t && t >= 1) {
            return Err(format!("NRC({q},{k}) violates the hypothesis"));
        }
        let out = suite(&arc, Lemma::Interpolation, &SamplingPolicy::default())?;
        if !out.exhaustive {
            return Err(format!("NRC({q},{k}) was sampled"));
        }
        parts.push(require(&out, &format!("NRC({q},{k})"), 1)?);
    }
    Ok(parts.join(", "))
}

fn c3() -> Check {
    let mut parts = Vec::new();
    for (q, k) in [(7, 3), (11, 4)] {
        let arc = nrc_q(q, k);
        for lemma in [Lemma::Numerator, Lemma::Denominator, Lemma::Switch] {
            let out = suite(&arc, lemma, &SamplingPolicy::exhaustive())?;
            parts.push(require(&out, &format!("{lemma} NRC({q},{k})"), 1)?);
        }
    }
    Ok(parts.join(", "))
}

fn c4() -> Check {
    let mut parts = Vec::new();
    for (q, k) in [(11, 5), (9, 4), (8, 3)] {
        let arc = nrc_q(q, k);
        let out = suite(&arc, Lemma::Main, &SamplingPolicy::sampled(1000, 1))?;
        let mut shapes: Vec<(u64, u64)> = out
            .reports
            .iter()
            .map(|r| (r.config["n"].as_u64().unwrap(), r.config["r"].as_u64().unwrap()))
            .collect();
        shapes.sort_unstable();
        shapes.dedup();
        let p = arc.field().p() as u64;
        let t = arc.t() as u64;
        for n in 0..=2u64 {
            for r in n..=(n + p - 1).min(t + 2).min(k as u64 - 1) {
                if !shapes.contains(&(n, r)) {
                    return Err(format!("NRC({q},{k}): no sample with n={n}, r={r}"));
                }
            }
        }
        parts.push(require(&out, &format!("NRC({q},{k}) over {} (n,r) shapes", shapes.len()), 500)?);
    }
    Ok(parts.join(", "))
}

fn c5() -> Check {
    let mut parts = Vec::new();
    for (q, k) in [(11, 4), (7, 3)] {
        let out = suite(&nrc_q(q, k), Lemma::Appendix, &SamplingPolicy::sampled(1000, 1))?;
        parts.push(require(&out, &format!("NRC({q},{k})"), 500)?);
    }
    Ok(parts.join(", "))
}

fn c6() -> Check {
    let mut total = 0;
    let mut degenerate = 0;
    for q in [2, 3, 4, 5, 7, 9] {
        for k in 2..=6 {
            let out = run_laplace_suite(&gf(q), k, 334, 1).map_err(|e| e.to_string())?;
            if !out.all_passed() {
                return Err(format!("GF({q}) k={k}: {}", out.summary()));
            }
            total += out.reports.len();
            degenerate += out
                .reports
                .iter()
                .filter(|r| matches!(r.values, Values::Equality { rhs, .. } if rhs.is_zero()))
                .count();
        }
    }
    if total < 10_000 || degenerate == 0 {
        return Err(format!("{total} instances, {degenerate} with vanishing right side"));
    }
    Ok(format!("PASS {total}/{total}, {degenerate} with vanishing right side"))
}

fn c7() -> Check {
    let mut info = Vec::new();
    for q in [2, 4] {
        let arc = hyperoval(&gf(q)).map_err(|e| e.to_string())?;
        let out = suite(&arc, Lemma::Twotothen, &SamplingPolicy::exhaustive())?;
        let m1: Vec<_> = out.reports.iter().filter(|r| r.config["m"] == 1 && r.config["n"] == 1).collect();
        let ok = m1.iter().filter(|r| r.pass).count();
        info.push(format!("GF({q}) hyperoval n=m=1: sum zero on {ok}/{}", m1.len()));
    }
    // The m = 0 terms coincide with the left side of the main identity at r = k-1, D = ∅.
    let mut compared = 0;
    for q in [2, 4, 8] {
        let arc = hyperoval(&gf(q)).map_err(|e| e.to_string())?;
        let bundle = TangentBundle::new(&arc);
        let (k, p) = (arc.k(), arc.field().p() as usize);
        for n in k.saturating_sub(p)..=k - 2 {
            for fp in (0..arc.len()).permutations(k - 1 + (k - 2 - n) + n) {
                let (a, rest) = fp.split_at(n);
                let (l, omega) = rest.split_at(k - 1);
                if omega.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                let two = TwoToTheNConfig {
                    n,
                    a: a.to_vec(),
                    l: l.to_vec(),
                    omega: omega.to_vec(),
                    x: vec![],
                    y: vec![],
                };
                let main = MainLemmaConfig { a: a.to_vec(), l: l.to_vec(), d: vec![], omega: omega.to_vec() };
                two.validate(&arc).map_err(|e| e.to_string())?;
                main.validate(&arc).map_err(|e| e.to_string())?;
                let lhs = twotothen_terms(&bundle, &two).map_err(|e| e.to_string())?;
                let (left, _) = main_lemma_terms(&bundle, &main).map_err(|e| e.to_string())?;
                if lhs != left {
                    return Err(format!("m=0 reduction differs on GF({q}) A={a:?} L={l:?} Omega={omega:?}"));
                }
                compared += 1;
            }
        }
    }
    Ok(format!(
        "m=0 reduction term-for-term on {compared} configurations; informational: {}",
        info.join("; ")
    ))
}

const TABLE: [(u32, usize, usize); 10] = [
    (2, 3, 4),
    (3, 3, 4),
    (4, 3, 6),
    (5, 3, 6),
    (7, 3, 8),
    (8, 3, 10),
    (9, 3, 10),
    (3, 4, 5),
    (5, 4, 6),
    (7, 4, 8),
];

fn c8() -> Check {
    let mut cells = Vec::new();
    for (q, k, want) in TABLE {
        let task = SearchTask::new(gf(q), k);
        let one = max_arc_size(&task).map_err(|e| e.to_string())?;
        let four = max_arc_size(&task.clone().jobs(4)).map_err(|e| e.to_string())?;
        if one.size != want {
            return Err(format!("q={q} k={k}: max {} but expected {want}", one.size));
        }
        if (one.size, one.nodes, &one.witness) != (four.size, four.nodes, &four.witness) {
            return Err(format!("q={q} k={k}: width 4 differs from width 1"));
        }
        if !mds_check(one.witness.field(), k, one.witness.points()).map_err(|e| e.to_string())?.passed() {
            return Err(format!("q={q} k={k}: witness fails the full check"));
        }
        if q <= 4 {
            let naive = max_arc_size(&SearchTask::new(gf(q), k).naive()).map_err(|e| e.to_string())?;
            if naive.size != one.size {
                return Err(format!("q={q} k={k}: naive search finds {}", naive.size));
            }
        }
        cells.push(format!("({q},{k})={}", one.size));
    }
    Ok(cells.join(" "))
}

fn constructed() -> Vec<(String, Arc)> {
    let mut out = Vec::new();
    for (q, k) in [(5, 3), (7, 3), (8, 3), (9, 4), (11, 4), (11, 5), (7, 4), (4, 3), (9, 3)] {
        out.push((format!("NRC({q},{k})"), nrc_q(q, k)));
    }
    for q in [2, 4, 8] {
        out.push((format!("hyperoval GF({q})"), hyperoval(&gf(q)).unwrap()));
    }
    for (q, k) in [(2, 3), (3, 4), (5, 3), (7, 4)] {
        out.push((format!("frame({q},{k})"), bush_frame(&gf(q), k).unwrap()));
    }
    out
}

fn c9() -> Check {
    let mut checked = 0;
    let mut skipped = 0;
    for (name, arc) in constructed() {
        if arc.len() < arc.k() + 2 {
            skipped += 1;
            continue;
        }
        let dual = dual_arc(&arc).map_err(|e| format!("{name}: {e}"))?;
        if !mds_check(dual.field(), dual.k(), dual.points()).map_err(|e| e.to_string())?.passed() {
            return Err(format!("dual of {name} is not an arc"));
        }
        checked += 1;
    }
    let d = dual_arc(&hyperoval(&gf(8)).unwrap()).map_err(|e| e.to_string())?;
    if (d.len(), d.k()) != (10, 7) {
        return Err(format!("dual of the GF(8) hyperoval has {} points in dimension {}", d.len(), d.k()));
    }
    Ok(format!(
        "{checked} duals pass, GF(8) hyperoval dual is a 10-arc in F_8^7 ({skipped} arcs with n = k+1 skipped, dual dimension 1)"
    ))
}

fn c10() -> Check {
    let mut arcs = constructed();
    for (name, arc) in constructed() {
        if arc.len() >= arc.k() + 2 {
            let d = dual_arc(&arc).unwrap();
            if d.k() >= 2 {
                arcs.push((format!("dual {name}"), d));
            }
        }
    }
    let mut subsets = 0;
    for (name, arc) in &arcs {
        let q = arc.field().q() as usize;
        let want = q + arc.k() - 1 - arc.len();
        for y in (0..arc.len()).combinations(arc.k() - 2) {
            let c = secant_tangent_census(arc, &y).map_err(|e| format!("{name}: {e}"))?;
            if c.tangent_count() != want {
                return Err(format!("{name} Y={y:?}: {} tangents, expected {want}", c.tangent_count()));
            }
            subsets += 1;
        }
    }
    Ok(format!("{} arcs, {subsets} subsets", arcs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1", "lemma of tangents", Duration::from_secs(10), c1),
        ("C2", "interpolation", Duration::from_secs(10), c2),
        ("C3", "Segre sign and switch", Duration::from_secs(30), c3),
        ("C4", "main identity", Duration::from_secs(60), c4),
        ("C5", "appendix identity", Duration::from_secs(30), c5),
        ("C6", "Laplace identity", Duration::from_secs(10), c6),
        ("C7", "twotothen", Duration::from_secs(60), c7),
        ("C8", "search table", Duration::from_secs(300), c8),
        ("C9", "duality", Duration::from_secs(5), c9),
        ("C10", "tangent census", Duration::from_secs(10), c10),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit:?} limit")),
            Err(e) => (false, e),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {id} {name} [{:.2}s / {}s]: {detail}", elapsed.as_secs_f64(), limit.as_secs());
        failed += usize::from(!ok);
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
