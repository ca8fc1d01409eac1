//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test --test acceptance` (add `--release` for speed).

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use continual_dp::counting::{calibrated_bound, BoundRequest, TreeCounter};
use continual_dp::graph::{
    core_numbers_naive, max_matching_brute_force, mincut_brute_force, st_mincut_brute_force, DynamicGraph,
};
use continual_dp::graph_mech::{LadderMechanism, LadderTarget};
use continual_dp::harness::{
    build_deghist_gadget, build_kcore_gadget, build_matching_gadget, build_msf_stream, build_topk_reduction,
    diff_streams, msf_family, run_inc_reduction, ExactOracle, GadgetInstance, InnerProductInstance,
    MarginalsInstance, MsfProblem, ZeroBasedGadget,
};
use continual_dp::privacy::{NoiseMode, PrivacyBudget, RandomSource};
use continual_dp::sne::{eval_norm, static_topk, static_topk_bound, BoostedSne, NormSpec, SneMechanism};
use continual_dp::stream::Update;
use continual_dp::svt::{svt_alpha, SvtAnswer, SvtInstance};
use continual_dp::Result;

type Build = fn(&InnerProductInstance) -> Result<GadgetInstance>;
type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn first(failures: &[String]) -> String {
    failures.first().map(|f| format!(", first at {f}")).unwrap_or_default()
}

/// Edge multiset replayed straight from a stream, independent of the library graph type.
fn replay(updates: &[Update]) -> HashMap<(usize, usize), i64> {
    let mut edges = HashMap::new();
    for u in updates {
        match *u {
            Update::InsertEdge(a, b) => *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1,
            Update::DeleteEdge(a, b) => *edges.entry((a.min(b), a.max(b))).or_insert(0) -= 1,
            _ => {}
        }
    }
    edges.retain(|_, f| *f > 0);
    edges
}

fn present(updates: &[Update]) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = replay(updates).into_keys().collect();
    e.sort_unstable();
    e
}

/// Kuhn's augmenting paths on a bipartite graph with left side `0..left`.
fn bipartite_matching(vertices: usize, left: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); vertices];
    for &(a, b) in edges {
        let (l, r) = if a < left { (a, b) } else { (b, a) };
        assert!(l < left && r >= left, "edge ({a}, {b}) is not bipartite");
        adj[l].push(r);
    }
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], mate: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if !seen[r] {
                seen[r] = true;
                if mate[r].is_none_or(|m| augment(m, adj, seen, mate)) {
                    mate[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }
    let mut mate = vec![None; vertices];
    (0..left).filter(|&l| augment(l, &adj, &mut vec![false; vertices], &mut mate)).count()
}

fn degrees(vertices: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut deg = vec![0; vertices];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

fn criterion_1() -> Result<Outcome> {
    let started = Instant::now();
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for d in 1..=6 {
        for seed in 0..20u64 {
            let inst = InnerProductInstance::random(d, 1.0, &mut RandomSource::new(1_000 * d as u64 + seed))?;
            let m = inst.query_count();

            let g = build_matching_gadget(&inst)?;
            let n = g.stream.universe();
            let ups = g.stream.updates();
            for r in &g.timetable {
                let j = r.query;
                let truth = inst.answer(j);
                let before = bipartite_matching(n, (m + 2) * d, &present(&ups[..r.before.unwrap()]));
                let after = bipartite_matching(n, (m + 2) * d, &present(&ups[..r.after]));
                checks += 1;
                if before != j * d || after != j * d + truth {
                    failures.push(format!("matching d={d} seed={seed} j={j}"));
                }
            }

            let g = build_kcore_gadget(&inst)?;
            let ups = g.stream.updates();
            for r in &g.timetable {
                let j = r.query;
                let truth = inst.answer(j);
                let core = |t: usize| -> Result<usize> {
                    let gr = DynamicGraph::from_edges(g.stream.universe(), &present(&ups[..t]))?;
                    Ok(core_numbers_naive(&gr)[0])
                };
                checks += 1;
                if core(r.before.unwrap())? != 2 * j * d || core(r.after)? != 2 * j * d + truth {
                    failures.push(format!("kcore d={d} seed={seed} j={j}"));
                }
            }

            let g = build_deghist_gadget(&inst)?;
            let ups = g.stream.updates();
            for r in &g.timetable {
                let j = r.query;
                let deg = degrees(g.stream.universe(), &present(&ups[..r.after]));
                checks += 1;
                if deg.iter().filter(|&&x| x == j + 1).count() != inst.answer(j) {
                    failures.push(format!("deghist d={d} seed={seed} j={j}"));
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 120.0,
        format!("{checks} readings, {} mismatches{}", failures.len(), first(&failures)),
    )
}

fn msf_oracle(problem: MsfProblem, vertices: usize, edges: &[(usize, usize)]) -> Result<usize> {
    let g = DynamicGraph::from_edges(vertices, edges)?;
    Ok(match problem {
        MsfProblem::StMincut => st_mincut_brute_force(&g, 0, 1),
        MsfProblem::Mincut => mincut_brute_force(&g),
        MsfProblem::KCore => core_numbers_naive(&g)[0],
        MsfProblem::DegAtLeast(tau) => degrees(vertices, edges).iter().filter(|&&x| x >= tau).count(),
        MsfProblem::EdgeCount => edges.len(),
        MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair) => max_matching_brute_force(&g),
        MsfProblem::ZeroBased(ZeroBasedGadget::Triangle) => {
            let mut count = 0;
            for a in 0..vertices {
                for b in a + 1..vertices {
                    for c in b + 1..vertices {
                        if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                            count += 1;
                        }
                    }
                }
            }
            count
        }
    })
}

fn criterion_2() -> Result<Outcome> {
    let mut problems = vec![
        MsfProblem::StMincut,
        MsfProblem::Mincut,
        MsfProblem::KCore,
        MsfProblem::EdgeCount,
        MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair),
        MsfProblem::ZeroBased(ZeroBasedGadget::Triangle),
    ];
    problems.extend((1..=4).map(MsfProblem::DegAtLeast));
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for &problem in &problems {
        for n in 2..=6 {
            if let MsfProblem::DegAtLeast(tau) = problem {
                if n <= 2 * ((tau - 1) / 2) {
                    continue;
                }
            }
            let fam = msf_family(problem, n)?;
            for d in 1..=4 {
                for seed in 0..5u64 {
                    let mut rng = RandomSource::new(97 * n as u64 + 13 * d as u64 + seed);
                    let y = MarginalsInstance::random(n, d, &mut rng)?;
                    let g = build_msf_stream(problem, &y)?;
                    let xi = fam.base_edges.len();
                    for r in &g.timetable {
                        let j = r.query;
                        let edges = present(&g.stream.updates()[..r.after]);
                        let value = msf_oracle(problem, fam.vertices, &edges)? as f64;
                        checks += 1;
                        if r.after != xi + 2 * j * n - n || value != fam.weight * y.column_sum(j - 1) as f64 {
                            failures.push(format!("{} n={n} d={d} seed={seed} j={j}", problem.name()));
                        }
                    }
                    let flip = rng.below(n);
                    let other = build_msf_stream(problem, &y.with_row_flipped(flip))?;
                    let report = diff_streams(&g.stream, &other.stream)?;
                    let (a, b) = fam.marked[flip];
                    checks += 1;
                    if report.touched_edges.len() != 1 || !report.touched_edges.contains(&(a.min(b), a.max(b))) {
                        failures.push(format!("{} n={n} d={d} seed={seed} neighbor", problem.name()));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checks} checks over {} families, {} mismatches{}", problems.len(), failures.len(), first(&failures)),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut decoded = 0usize;
    let mut failures = Vec::new();
    let builders: [(&str, Build); 4] = [
        ("matching", build_matching_gadget),
        ("kcore", build_kcore_gadget),
        ("deghist", build_deghist_gadget),
        ("topk", build_topk_reduction),
    ];
    for (name, build) in builders {
        for d in 1..=6 {
            for seed in 0..10u64 {
                let inst = InnerProductInstance::random(d, 1.0, &mut RandomSource::new(500 + 31 * d as u64 + seed))?;
                let g = build(&inst)?;
                let mut oracle = ExactOracle::for_instance(&g)?;
                let report = run_inc_reduction(&g, &mut oracle, 0.0)?;
                let offset = if name == "topk" { 1.0 } else { 0.0 };
                for o in &report.outcomes {
                    decoded += 1;
                    if o.decoded != o.truth as f64 + offset {
                        failures.push(format!("{name} d={d} seed={seed} j={}", o.query));
                    }
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{decoded} decodes, {} mismatches{}", failures.len(), first(&failures)))
}

fn criterion_4() -> Result<Outcome> {
    let started = Instant::now();
    let (n, horizon, zeta) = (64, 2000, 0.25);
    let mut violations = 0usize;
    let mut checks = 0usize;
    let mut informative = 0usize;
    // Larger epsilon shrinks the thresholds so the lower bound becomes non-vacuous.
    for (i, eps) in [1.0, 1e3, 1e4, 1e5].into_iter().enumerate() {
        let budget = PrivacyBudget::pure(eps, 0.1)?.with_noise(NoiseMode::Off);
        let mut rng = RandomSource::new(4_000 + i as u64);
        let mut sne = SneMechanism::new(n, horizon, zeta, &budget, rng.fork())?;
        let mut norms = vec![NormSpec::Lp(1.0), NormSpec::Lp(2.0)];
        norms.extend((1..=n).map(NormSpec::TopK));
        for _ in 0..horizon {
            // Skewed draws: low indices are much more frequent.
            let x = rng.open_unit();
            let element = ((x * x * x) * n as f64) as usize;
            sne.step(&Update::InsertElement(element.min(n - 1)))?;
            let f: Vec<f64> = sne.frequencies().iter().map(|&c| c as f64).collect();
            for spec in &norms {
                let truth = eval_norm(spec, &f)?;
                let est = eval_norm(spec, sne.estimate())?;
                let (lo, hi) = sne.parameters().sandwich(truth, spec.unit_value());
                checks += 1;
                informative += usize::from(lo > 0.0);
                if est < lo || est > hi {
                    violations += 1;
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs < 60.0,
        format!("{checks} checks, {violations} violations, {informative} with a positive lower bound"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let horizon = 1024;
    let budget = PrivacyBudget::pure(1.0, 0.01)?;
    let bound = calibrated_bound(&BoundRequest::new(1, &budget, horizon))?;
    let mut within = 0;
    for trial in 0..200u64 {
        let mut rng = RandomSource::new(5_000 + trial);
        let mut counter = TreeCounter::new(horizon, &budget, rng.fork())?;
        let mut total = 0i64;
        let mut worst = 0f64;
        for _ in 0..horizon {
            let v = i64::from(rng.bernoulli(0.5));
            total += v;
            worst = worst.max((counter.step(v)? - total as f64).abs());
        }
        within += usize::from(worst <= bound);
    }
    outcome(within >= 190, format!("{within}/200 within bound {bound:.2}"))
}

fn sne_norms() -> Vec<NormSpec> {
    vec![NormSpec::Lp(1.0), NormSpec::Lp(2.0), NormSpec::TopK(10)]
}

fn random_element(rng: &mut RandomSource, n: usize) -> Update {
    let x = rng.open_unit();
    Update::InsertElement((((x * x) * n as f64) as usize).min(n - 1))
}

fn sandwich_holds(zeta: f64, slack: f64, truth: f64, est: f64, unit: f64) -> bool {
    let lo = (1.0 - 3.0 * zeta) / (1.0 + zeta) * truth - slack * unit;
    let hi = (1.0 + zeta) * truth;
    lo <= est && est <= hi
}

/// Runs `trials` closures on scoped threads and returns their results in trial order.
fn parallel<T: Send>(trials: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let workers = std::thread::available_parallelism().map_or(4, |p| p.get()).min(trials.max(1));
    let chunks: Vec<Vec<usize>> = (0..workers).map(|w| (w..trials).step_by(workers).collect()).collect();
    let mut out: Vec<Option<T>> = (0..trials).map(|_| None).collect();
    let results = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                let f = &f;
                s.spawn(move || chunk.iter().map(|&i| f(i).map(|v| (i, v))).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect::<Vec<_>>()
    });
    for r in results {
        for (i, v) in r? {
            out[i] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every trial ran")).collect())
}

fn criterion_6() -> Result<Outcome> {
    let (n, horizon, zeta) = (100, 5000, 0.5);
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let fixed = parallel(60, |trial| {
        let mut rng = RandomSource::new(6_000 + trial as u64);
        let mut sne = SneMechanism::new(n, horizon, zeta, &budget, rng.fork())?;
        for _ in 0..horizon {
            sne.step(&random_element(&mut rng, n))?;
        }
        let f: Vec<f64> = sne.frequencies().iter().map(|&c| c as f64).collect();
        let slack = sne.parameters().additive_slack();
        let mut ok = true;
        for spec in sne_norms() {
            ok &= sandwich_holds(zeta, slack, eval_norm(&spec, &f)?, eval_norm(&spec, sne.estimate())?, 1.0);
        }
        Ok(ok)
    })?;
    let fixed_pass = fixed.iter().filter(|&&ok| ok).count();

    let boosted = parallel(50, |trial| {
        let mut rng = RandomSource::new(6_500 + trial as u64);
        let mut sne = BoostedSne::new(n, horizon, zeta, &budget, rng.fork())?;
        let slack = sne.copies().iter().map(|c| c.parameters().additive_slack()).fold(0.0, f64::max);
        let mut f = vec![0.0; n];
        for _ in 0..horizon {
            let u = random_element(&mut rng, n);
            f[u.element().unwrap()] += 1.0;
            sne.step(&u)?;
            for spec in sne_norms() {
                if !sandwich_holds(zeta, slack, eval_norm(&spec, &f)?, sne.query(&spec)?, 1.0) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    let boosted_pass = boosted.iter().filter(|&&ok| ok).count();
    outcome(
        fixed_pass * 100 >= 55 * 60 && boosted_pass * 100 >= 85 * 50,
        format!("fixed step {fixed_pass}/60 (need 33), boosted all steps {boosted_pass}/50 (need 43)"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let (queries, cap) = (200, 5);
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let alpha = svt_alpha(&budget, queries, cap, 1.0);
    let threshold = 0.0;
    // Monotone: queries sit just outside the alpha band below, then the last `cap` jump above it.
    let stream: Vec<f64> = (0..queries)
        .map(|t| {
            let drift = 1e-3 * t as f64;
            if t < queries - cap {
                threshold - alpha - 1.0 + drift
            } else {
                threshold + alpha + 1.0 + drift
            }
        })
        .collect();
    let mut good = 0;
    for trial in 0..100u64 {
        let mut svt = SvtInstance::new(&budget, cap, RandomSource::new(7_000 + trial))?;
        let mut ok = true;
        for &q in &stream {
            if svt.is_halted() {
                ok = false;
                break;
            }
            ok &= match svt.query(q, threshold)? {
                SvtAnswer::Positive => q >= threshold - alpha,
                SvtAnswer::Negative => q <= threshold + alpha,
            };
        }
        good += usize::from(ok);
    }
    outcome(good >= 90, format!("{good}/100 runs alpha-accurate (alpha = {alpha:.1})"))
}

fn criterion_8() -> Result<Outcome> {
    let (n, horizon) = (60, 200);
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let mut structural_failures = 0;
    let mut accurate = 0;
    let mut allowance = 0.0;
    for trial in 0..100u64 {
        let mut rng = RandomSource::new(8_000 + trial);
        let mut ladder = LadderMechanism::new(LadderTarget::Matching, n, horizon, &budget, rng.fork())?;
        allowance = ladder.error_allowance(&budget);
        let (lo, k) = (ladder.range().0 as f64, ladder.step_size() as f64);
        let mut prev = lo;
        let mut jumps = 0;
        let mut structural = true;
        let mut worst = 0f64;
        for _ in 0..horizon {
            let u = rng.below(n);
            let v = (u + 1 + rng.below(n - 1)) % n;
            let released = ladder.step(&Update::insert_edge(u, v))?;
            let rung = (released - lo) / k;
            structural &= released >= prev && rung.fract() == 0.0;
            if released > prev {
                jumps += ((released - prev) / k) as usize;
            }
            prev = released;
            worst = worst.max((released - ladder.true_value() as f64).abs());
        }
        structural &= jumps <= ladder.cap();
        structural_failures += usize::from(!structural);
        accurate += usize::from(worst <= allowance);
    }
    outcome(
        structural_failures == 0 && accurate >= 85,
        format!("structure violated in {structural_failures}/100, error within {allowance:.1} in {accurate}/100"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let n = 256;
    let budget = PrivacyBudget::pure(1.0, 0.01)?;
    let bound = static_topk_bound(n, &budget)?;
    let mut within = 0;
    for trial in 0..200u64 {
        let mut rng = RandomSource::new(9_000 + trial);
        let f: Vec<i64> = (0..n).map(|_| rng.below(1_000) as i64).collect();
        let mut sorted = f.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let released = static_topk(&f, &budget, rng.fork())?;
        let mut prefix = 0i64;
        let mut worst = 0f64;
        for (k, est) in released.iter().enumerate() {
            prefix += sorted[k];
            worst = worst.max((est - prefix as f64).abs());
        }
        within += usize::from(worst <= bound);
    }
    outcome(within >= 180, format!("{within}/200 within bound {bound:.2}"))
}

fn criterion_10() -> Result<Outcome> {
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let mut parts = Vec::new();
    for d in [4, 8, 16, 32] {
        let mut total = 0.0;
        for trial in 0..3u64 {
            let mut rng = RandomSource::new(1000 * d as u64 + trial);
            let inst = InnerProductInstance::random(d, 1.0, &mut rng)?;
            let g = build_matching_gadget(&inst)?;
            let (n, horizon) = (g.stream.universe(), g.stream.horizon());
            let mut ladder = LadderMechanism::new(LadderTarget::Matching, n, horizon, &budget, rng.fork())?;
            total += run_inc_reduction(&g, &mut ladder, 0.0)?.max_error;
        }
        parts.push(format!("d={d}: {:.1}", total / 3.0));
    }
    let csv = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../results/lower_bound_matching.csv");
    let recorded = if csv.exists() { "recorded in results/lower_bound_matching.csv" } else { "results file missing" };
    outcome(
        csv.exists(),
        format!("demonstrative, mean max decode error {}; {recorded}", parts.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("gadget algebra", criterion_1),
        ("marginals families", criterion_2),
        ("exact round trips", criterion_3),
        ("noise-off SNE sandwich", criterion_4),
        ("continual counting", criterion_5),
        ("noisy SNE", criterion_6),
        ("SVT accuracy", criterion_7),
        ("ladder mechanism", criterion_8),
        ("static TopK", criterion_9),
        ("matching lower-bound experiment", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} [{}] {name}: {detail} ({:.1}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
