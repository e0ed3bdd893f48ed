//! Acceptance criteria 1 to 10. Each prints one PASS/FAIL line with its
//! measurements; the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locol::analysis::{check_structural_claims, expansion_check, DiagnosticRun};
use locol::coloring::vizing_color;
use locol::decomposition::{default_schedule, generator_count, greedy_matchings, matching_breaker, orient_into_functions};
use locol::driver::{edge_color, DriverParams, Mode};
use locol::engine::{build_k, initial_matching_lenient, run_rounds, RunOptions, Schedule};
use locol::generators::{plant_high_degree, random_bounded_degree, random_regular, rotation_cycle};
use locol::labeling::sparse_labeling;
use locol::oracle::{brute_augmenting_path, brute_chromatic_index, enumerate_connected, verify_proper, AugmentingQuery};
use locol::precolor::{color_budget, extend_precoloring, random_precoloring, search_f_counterexample, ExtendOptions, FVerdict};
use locol::stats::geometric_fit;
use locol::{Edge, Exec, Graph, Instance, VertexSet};

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut out = f();
    let took = t.elapsed();
    if took > limit {
        out.pass = false;
    }
    out.detail = format!("{} [{:.1}s of {}s]", out.detail, took.as_secs_f64(), limit.as_secs());
    out
}

fn params(n0: usize) -> DriverParams {
    DriverParams { schedule: Schedule { n0, ..Schedule::practical() }, ..DriverParams::default() }
}

fn bipartite_budget() -> Outcome {
    let jobs: Vec<usize> = (0..50).collect();
    let results = Exec::Parallel.map(&jobs, |&i| {
        let d = 2 + i % 2;
        let n = 100 + 6 * i;
        let inst = random_regular(n, d, true, 1000 + i as u64).unwrap();
        let mut fractions = Vec::new();
        let mut ok = true;
        for n0 in [3, 5, 7, 9] {
            let st = edge_color(&inst, Mode::Bipartite, &params(n0)).unwrap();
            ok &= st.palette_used() <= d + 1 && verify_proper(&inst.graph, &st.colored_pairs());
            fractions.push(st.exceptional_vertex_fraction());
        }
        let monotone = fractions.windows(2).all(|w| w[1] <= w[0]);
        (ok, monotone, fractions[3])
    });
    let colors_ok = results.iter().all(|r| r.0);
    let monotone = results.iter().filter(|r| r.1).count();
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    Outcome {
        pass: colors_ok && monotone == 50 && worst <= 0.05,
        detail: format!("palette<=d+1 and proper: {colors_ok}; monotone over n0: {monotone}/50; max exceptional at n0=9: {worst:.4}"),
    }
}

fn general_budget() -> Outcome {
    let jobs: Vec<usize> = (0..50).collect();
    let results = Exec::Parallel.map(&jobs, |&i| {
        let n = 100 + 6 * i;
        let base = random_regular(n, 3, false, 2000 + i as u64).unwrap();
        let inst = plant_high_degree(&base, 3, 0.05, i as u64).unwrap();
        let st = edge_color(&inst, Mode::General, &DriverParams::default()).unwrap();
        (st.palette_used(), verify_proper(&inst.graph, &st.colored_pairs()), inst.j.len())
    });
    let worst = results.iter().map(|r| r.0).max().unwrap();
    let proper = results.iter().all(|r| r.1);
    let planted = results.iter().all(|r| r.2 > 0);
    Outcome {
        pass: worst <= 13 && proper && planted,
        detail: format!("max palette {worst} (limit 13); proper: {proper}; every instance has a planted set: {planted}"),
    }
}

/// Strictly decreasing, then constant.
fn decreasing_to_fixed_point(c: &[usize]) -> bool {
    let stop = c.windows(2).position(|w| w[1] >= w[0]).map_or(c.len(), |p| p + 1);
    c[stop.saturating_sub(1)..].windows(2).all(|w| w[0] == w[1])
}

fn unhappy_decay() -> Outcome {
    let cases = [
        ("rotation_cycle(1001)", rotation_cycle(1001).unwrap(), Mode::General),
        ("bipartite cubic n=1000", random_regular(1000, 3, true, 7).unwrap(), Mode::Bipartite),
    ];
    let mut pass_shape = true;
    let mut fitted = false;
    let mut parts = Vec::new();
    for (name, inst, mode) in cases {
        let st = edge_color(&inst, mode, &DriverParams::default()).unwrap();
        let curve = &st.unhappy_curves[0];
        let shape = decreasing_to_fixed_point(curve);
        pass_shape &= shape;
        let counts: Vec<f64> = curve.iter().map(|&c| c as f64).collect();
        let fit = geometric_fit(&counts);
        // A fit through two points is exact and says nothing.
        let good = fit.map_or(false, |f| f.points >= 3 && f.ratio < 1.0 && f.r_squared >= 0.8);
        fitted |= good;
        parts.push(format!(
            "{name}: {curve:?} {}",
            fit.map_or("fit undefined".to_string(), |f| format!("ratio {:.3} R^2 {:.3}", f.ratio, f.r_squared))
        ));
    }
    Outcome { pass: pass_shape && fitted, detail: parts.join("; ") }
}

fn engine_check(inst: &Instance, n0: usize) -> Option<String> {
    let s = Schedule { n0, ..Schedule::practical() };
    let lab = sparse_labeling(&inst.graph, s.r + 2);
    let kctx = build_k(inst, s.r, s.r_prime, &lab);
    let (m0, _) = initial_matching_lenient(inst, s.r1);
    let opts = RunOptions { exec: Exec::Sequential, record_history: false, check_each_flip: true };
    let st = match run_rounds(inst, &kctx, m0, n0, opts) {
        Ok(st) => st,
        Err(e) => return Some(format!("engine error {e}")),
    };
    let edges = st.matching.edges();
    let k: Vec<usize> = kctx.k.iter().collect();
    let q = AugmentingQuery { g: &inst.graph, d: inst.d, k: &k, matching: &edges };
    match brute_augmenting_path(&q, n0) {
        Ok(None) => None,
        Ok(Some(p)) => Some(format!("augmenting path {p:?} left in {:?}", inst.graph.edges())),
        Err(e) => Some(format!("oracle error {e}")),
    }
}

/// Instances for a graph: `d = Δ`, and `d = Δ − 1` when the vertices of
/// maximum degree are pairwise non-adjacent.
fn instances_of(g: &Graph) -> Vec<Instance> {
    let delta = g.max_degree();
    let mut out = Vec::new();
    if delta == 0 {
        return out;
    }
    out.push(Instance::new(g.clone(), delta, None).unwrap());
    let tops: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == delta).collect();
    let independent = tops.iter().all(|&u| tops.iter().all(|&v| !g.has_edge(u, v)));
    if delta >= 2 && independent {
        out.push(Instance::new(g.clone(), delta - 1, None).unwrap());
    }
    out
}

fn small_graphs(n_max: usize) -> Vec<Graph> {
    enumerate_connected(n_max, |g: &Graph| g.max_degree() <= 3, Exec::Parallel).into_iter().flatten().collect()
}

fn engine_oracle() -> Outcome {
    let graphs = small_graphs(10);
    let insts: Vec<Instance> = graphs.iter().flat_map(instances_of).collect();
    let fails: Vec<String> = Exec::Parallel.map(&insts, |i| engine_check(i, 9)).into_iter().flatten().collect();
    let seeds: Vec<u64> = (0..200).collect();
    let random_fails: Vec<String> = Exec::Parallel
        .map(&seeds, |&s| {
            let n = 10 + (s as usize * 7) % 51;
            let g = random_bounded_degree(n, 3, n + (s as usize % n), 500 + s);
            let d = g.max_degree().max(1);
            engine_check(&Instance::new(g, d, Some(s)).unwrap(), 9)
        })
        .into_iter()
        .flatten()
        .collect();
    Outcome {
        pass: fails.is_empty() && random_fails.is_empty(),
        detail: format!(
            "{} enumerated graphs, {} instances, {} violations; 200 random, {} violations{}",
            graphs.len(),
            insts.len(),
            fails.len(),
            random_fails.len(),
            fails.first().or(random_fails.first()).map_or(String::new(), |f| format!("; first: {f}"))
        ),
    }
}

fn diagnostic_corpus() -> Vec<(String, Instance)> {
    let mut out: Vec<(String, Instance)> = Vec::new();
    for n in [31, 64, 101] {
        out.push((format!("rotation_cycle({n})"), rotation_cycle(n).unwrap()));
    }
    for (n, s) in [(60, 0), (120, 1), (200, 2), (200, 3)] {
        out.push((format!("bipartite cubic n={n} seed={s}"), random_regular(n, 3, true, s).unwrap()));
        out.push((format!("cubic n={n} seed={s}"), random_regular(n, 3, false, s).unwrap()));
        let base = random_regular(n, 3, false, 50 + s).unwrap();
        out.push((format!("planted cubic n={n} seed={s}"), plant_high_degree(&base, 3, 0.05, s).unwrap()));
        out.push((format!("4-regular n={n} seed={s}"), random_regular(n, 4, false, 90 + s).unwrap()));
    }
    out.push(("rotation_cycle(1001)".into(), rotation_cycle(1001).unwrap()));
    out.push(("bipartite cubic n=1000".into(), random_regular(1000, 3, true, 7).unwrap()));
    for s in 0..200u64 {
        let n = 10 + (s as usize * 7) % 51;
        let g = random_bounded_degree(n, 3, n + (s as usize % n), 500 + s);
        let d = g.max_degree().max(1);
        out.push((format!("random n={n} seed={s}"), Instance::new(g, d, Some(s)).unwrap()));
    }
    for (i, g) in small_graphs(8).into_iter().enumerate() {
        for inst in instances_of(&g) {
            out.push((format!("small graph #{i} d={}", inst.d), inst));
        }
    }
    out
}

fn claim_suite() -> Outcome {
    let corpus = diagnostic_corpus();
    let reports = Exec::Parallel.map(&corpus, |(name, inst)| {
        let mut failures = Vec::new();
        let mut checks = Vec::new();
        let mut stubborn = 0;
        let mut both = 0;
        for n0 in [7, 9] {
            let s = Schedule { n0, ..Schedule::practical() };
            let lab = sparse_labeling(&inst.graph, s.r + 2);
            let kctx = build_k(inst, s.r, s.r_prime, &lab);
            let (m0, _) = initial_matching_lenient(inst, s.r1);
            let opts = RunOptions { exec: Exec::Sequential, record_history: false, check_each_flip: true };
            let st = run_rounds(inst, &kctx, m0, n0, opts).unwrap();
            let run = DiagnosticRun { inst, kctx: &kctx, matching: st.matching.edges(), n0, c_tilde: 12 };
            let rep = check_structural_claims(&run, Exec::Sequential);
            stubborn += rep.growth.iter().map(|g| g.tt).sum::<usize>();
            both += rep.growth.iter().map(|g| g.b).sum::<usize>();
            for r in &rep.results {
                checks.push(r.claim);
                if !r.pass {
                    failures.push(format!("{name} n0={n0}: {} n={} {}", r.claim, r.n, r.witness.clone().unwrap_or_default()));
                }
            }
        }
        (failures, checks, stubborn, both)
    });
    let failures: Vec<&String> = reports.iter().flat_map(|r| &r.0).collect();
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for id in reports.iter().flat_map(|r| &r.1) {
        match counts.iter_mut().find(|c| c.0 == *id) {
            Some(c) => c.1 += 1,
            None => counts.push((id, 1)),
        }
    }
    let required = [
        "heads-covered",
        "head-tail-bijection",
        "tails-min-degree",
        "k-disjoint-unhappy",
        "complete-star-hit",
        "disjoint-partition",
        "both-monotone",
        "head-tail-matching",
        "tt-edge-both",
        "stubborn-edge-in-family",
        "family-in-both",
        "families-disjoint",
        "family-unique-neighbor",
        "bipartite-no-both",
    ];
    let missing: Vec<&str> = required.iter().copied().filter(|id| !counts.iter().any(|c| c.0 == *id)).collect();
    let stubborn: usize = reports.iter().map(|r| r.2).sum();
    let both: usize = reports.iter().map(|r| r.3).sum();
    let dense = counts.iter().find(|c| c.0 == "outside-dense").map_or(0, |c| c.1);
    Outcome {
        pass: failures.is_empty() && missing.is_empty(),
        detail: format!(
            "{} runs, {} checks, {} counterexamples; stubborn vertices met {stubborn}, B-vertices met {both}; density checks on dense K: {dense}; unexercised: {missing:?}{}",
            2 * corpus.len(),
            counts.iter().map(|c| c.1).sum::<usize>(),
            failures.len(),
            failures.first().map_or(String::new(), |f| format!("; first: {f}"))
        ),
    }
}

fn precolor_extension() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [16usize, 25, 36, 64] {
        let seeds: Vec<u64> = (0..200).collect();
        let res = Exec::Parallel.map(&seeds, |&s| {
            let pc = random_precoloring(2 * d, d, s * 31 + d as u64);
            let ext = extend_precoloring(&pc, &ExtendOptions { samples: 64, seed: s });
            let pairs = ext.coloring.pairs();
            let proper = verify_proper(&pc.graph, &pairs) && pairs.len() == pc.graph.edge_count();
            let respects = pc.colored_leaves.iter().all(|(&e, &c)| ext.coloring.color_of(e) == Some(c));
            let leaves_ok = pc.colored_leaves.len() == d && pc.graph.max_degree() <= d;
            (proper && respects && leaves_ok, ext.span <= color_budget(d), ext.fallback, ext.span)
        });
        let ok = res.iter().filter(|r| r.0).count();
        let within = res.iter().filter(|r| r.1).count();
        let fallbacks = res.iter().filter(|r| r.2).count();
        let max_span = res.iter().map(|r| r.3).max().unwrap();
        pass &= ok == 200 && within == 200 && (d != 64 || fallbacks == 0);
        parts.push(format!("d={d}: valid {ok}/200, within {} colors {within}/200 (max {max_span}), fallbacks {fallbacks}", color_budget(d)));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn conjecture_probe() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for d in 1..=3 {
        let r = search_f_counterexample(d, 8, Exec::Parallel).unwrap();
        let clean = r.verdict == FVerdict::NoCounterexample;
        pass &= clean;
        parts.push(format!("d={d}: {} graphs, {} pre-colorings, {:?}", r.graphs, r.precolorings, r.verdict));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn decomposition_bounds() -> Outcome {
    let mut violations = Vec::new();
    for s in 0..100u64 {
        let d = 1 + s as usize % 4;
        let g = random_bounded_degree(40, d, 40 * d / 2, 700 + s);
        let o = orient_into_functions(&g, d, &sparse_labeling(&g, 2)).unwrap();
        if o.k() > d || o.verify(&g, false).is_err() {
            violations.push(format!("orientation seed {s}"));
        }
        let classes = greedy_matchings(&g);
        let delta = g.max_degree();
        let functions = classes.iter().map(|c| c.iter().map(|e| (e.0, e.1)).collect()).collect();
        let as_maps = locol::decomposition::Orientation { functions };
        if classes.len() > (2 * delta).saturating_sub(1) || as_maps.verify(&g, true).is_err() {
            violations.push(format!("greedy matchings seed {s}"));
        }
    }
    for n in [30, 60, 120] {
        let c = Graph::cycle(n).edges();
        match matching_breaker(n, &[c], &[], &default_schedule(4)) {
            Ok(out) if out.largest.iter().all(|&x| x <= out.bound) => {}
            other => violations.push(format!("breaker C_{n}: {other:?}")),
        }
    }
    let mut gen_insts = vec![rotation_cycle(8).unwrap(), rotation_cycle(9).unwrap()];
    gen_insts.push(random_regular(100, 3, true, 3).unwrap());
    gen_insts.push(plant_high_degree(&random_regular(120, 3, false, 4).unwrap(), 3, 0.05, 4).unwrap());
    let mut maps = Vec::new();
    for inst in &gen_insts {
        for relaxed in [false, true] {
            let rep = generator_count(inst, relaxed, &DriverParams::default()).unwrap();
            // Independent regeneration: every edge is some map's arc, nothing else is.
            let arcs: BTreeSet<Edge> = rep.maps.functions.iter().flatten().map(|&(u, v)| Edge::new(u, v)).collect();
            let total: usize = rep.maps.functions.iter().map(Vec::len).sum();
            let edges: BTreeSet<Edge> = inst.graph.edges().into_iter().collect();
            if arcs != edges || total != edges.len() || rep.maps.verify(&inst.graph, !relaxed).is_err() || rep.k() > rep.bound {
                violations.push(format!("generators relaxed={relaxed} n={}", inst.n()));
            }
            maps.push(rep.k());
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!("{} violations; generator map counts {maps:?}{}", violations.len(), violations.first().map_or(String::new(), |v| format!("; first: {v}"))),
    }
}

/// A random maximal `(r+1)`-sparse set, which is `(r+1)`-dense.
fn random_dense_set(g: &Graph, r: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(rng);
    let mut q = VertexSet::new(g.n());
    let mut blocked = vec![false; g.n()];
    for v in order {
        if !blocked[v] {
            q.insert(v);
            for w in g.ball(v, r + 1) {
                blocked[w] = true;
            }
        }
    }
    q
}

fn expansion() -> Outcome {
    let graphs = [(Graph::cycle(200), 2usize), (random_regular(200, 3, false, 11).unwrap().graph, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = 0;
    let mut trials = 0;
    for (g, d) in &graphs {
        for t in 0..500 {
            let r = t % 3;
            let q = random_dense_set(g, r, &mut rng);
            let w: Vec<usize> = if t % 2 == 0 {
                let c = rng.gen_range(0..g.n());
                g.ball(c, rng.gen_range(0..6)).into_iter().filter(|&v| !q.contains(v)).collect()
            } else {
                let p: f64 = rng.gen_range(0.05..0.9);
                (0..g.n()).filter(|&v| !q.contains(v) && rng.gen_bool(p)).collect()
            };
            let ws = VertexSet::from_iter(g.n(), w.iter().copied());
            // Boundary counted directly from the edge list.
            let boundary = g.edges().iter().filter(|e| ws.contains(e.0) != ws.contains(e.1)).count();
            let holds = (boundary as f64) * (*d as f64).powi(r as i32) >= w.len() as f64;
            let lib = expansion_check(g, *d, &q, r, &ws);
            if !holds || lib != Ok(true) {
                failures += 1;
            }
            trials += 1;
        }
    }
    Outcome { pass: failures == 0 && trials == 1000, detail: format!("{trials} trials, {failures} failures") }
}

fn exact_baselines() -> Outcome {
    let cases = [("C_6", Graph::cycle(6), 2), ("C_5", Graph::cycle(5), 3), ("K_4", Graph::complete(4), 3), ("Petersen", Graph::petersen(), 4)];
    let mut wrong = Vec::new();
    for (name, g, want) in &cases {
        let got = brute_chromatic_index(g).unwrap();
        if got != *want {
            wrong.push(format!("{name}: {got} != {want}"));
        }
    }
    let graphs = small_graphs(10);
    let bad = Exec::Parallel
        .map(&graphs, |g| {
            let c = vizing_color(g);
            c.palette_size() > g.max_degree() + 1 || !verify_proper(g, &c.pairs()) || c.pairs().len() != g.edge_count()
        })
        .into_iter()
        .filter(|&b| b)
        .count();
    Outcome {
        pass: wrong.is_empty() && bad == 0,
        detail: format!("chromatic index mismatches {wrong:?}; Vizing over {} graphs, {bad} above Delta+1", graphs.len()),
    }
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, u64, fn() -> Outcome)> = vec![
        ("bipartite color budget", 60, bipartite_budget),
        ("general color budget", 120, general_budget),
        ("unhappy-set decay", 60, unhappy_decay),
        ("engine/oracle equivalence", 600, engine_oracle),
        ("structural claim suite", 300, claim_suite),
        ("pre-coloring extension", 120, precolor_extension),
        ("pre-coloring conjecture probe", 600, conjecture_probe),
        ("decomposition bounds", 120, decomposition_bounds),
        ("expansion property", 30, expansion),
        ("exact baselines", 300, exact_baselines),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out = timed(Duration::from_secs(limit), f);
        // Written to the process stdout directly so the lines survive output capture.
        let line = format!("{} criterion {} ({name}): {}\n", if out.pass { "PASS" } else { "FAIL" }, i + 1, out.detail);
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if !out.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
