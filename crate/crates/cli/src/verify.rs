use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use clique_gibbs::chain::{
    contraction_bound, default_p, empirical_contraction, exact_coin_kernel_full_activity, exact_kernel_full_activity,
    mixing_time, sample, step, BoundFamily, ChainParams,
};
use clique_gibbs::cube::{simulate_transition_batch, BatchState, CubeSimulator, BATCH_ROUNDS_CONSTANT, BATCH_WORDS_CONSTANT};
use clique_gibbs::estimator::{build_schedule, detect_triangle, dyer_frieze_ratio, TriangleMode};
use clique_gibbs::model::{partition_polynomial, DEFAULT_ENUMERATION_CAP};
use clique_gibbs::net::audit_ledger;
use clique_gibbs::*;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::args::{Family, Suite, VerifyArgs};
use crate::error::Failure;

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        ok,
        detail,
    }
}

type SuiteResult = Result<Vec<Check>, Failure>;

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    let suites: &[(Suite, fn(&VerifyArgs) -> SuiteResult)] = &[
        (Suite::Oracle, oracle),
        (Suite::Tv, tv),
        (Suite::Coupling, coupling),
        (Suite::Ledger, ledger),
        (Suite::Triangle, triangle),
        (Suite::Schedule, schedule),
    ];
    let mut failed = 0;
    let mut total = 0;
    for (suite, f) in suites {
        if args.suite != Suite::All && args.suite != *suite {
            continue;
        }
        let start = Instant::now();
        for c in f(args)? {
            total += 1;
            if !c.ok {
                failed += 1;
            }
            println!("[{}] {}: {} ({:.1}s)", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail, start.elapsed().as_secs_f64());
        }
    }
    if failed > 0 {
        return Err(Failure::suite(format!("{failed} of {total} checks failed")));
    }
    println!("all {total} checks passed");
    Ok(())
}

fn three_models(g: Graph) -> Vec<GibbsModel> {
    let g = Arc::new(g);
    vec![
        make_potts(g.clone(), 4, Temperature::Finite(0.8)).expect("q > 0"),
        make_hardcore(g.clone(), Fugacity::from_ratio(3, 10).expect("valid")),
        make_pointer_model(g, Temperature::Finite(1.5)).expect("valid beta"),
    ]
}

/// Batch simulation against chain replay, gathered against direct
/// Hamiltonians, and the three-coin kernel against the reference kernel.
fn oracle(args: &VerifyArgs) -> SuiteResult {
    let n_max = args.n.unwrap_or(12).max(2);
    let mut runs = 0;
    let mut replay_bad = 0;
    let mut gather_bad = 0;
    for n in 4.min(n_max)..=n_max {
        for seed in 0..args.seeds {
            for m in three_models(Graph::gnp(n, 0.4, args.seed ^ seed).map_err(|e| Failure::usage(e.into()))?) {
                let mut sim = CubeSimulator::new(&m, n)?;
                let mut batch = BatchState::initial(&m, seed, n);
                let mut cols = batch.columns();
                let mut ledger = MessageLedger::new(n);
                let params = ChainParams::new(0.5, 0);
                for t in 0..20 {
                    sim.transition(&mut batch, 0.5, seed, t, &mut ledger)?;
                    for (i, c) in cols.iter_mut().enumerate() {
                        *c = step(&m, c, &params, seed, t, i as u64);
                    }
                }
                runs += 1;
                if batch.columns() != cols {
                    replay_bad += 1;
                }
                let hs = sim.gather_hamiltonians(&batch, &mut ledger)?;
                gather_bad += hs
                    .iter()
                    .enumerate()
                    .filter(|&(i, &h)| m.hamiltonian(&batch.column(i)).ok() != Some(h))
                    .count();
            }
        }
    }
    let mut kernels = 0;
    let mut kernel_bad = 0;
    for q in [2u32, 3] {
        for lambda in [Fugacity::zero(), Fugacity::from_ratio(1, 3).expect("valid"), Fugacity::one()] {
            let m = make_potts(Arc::new(Graph::path(2)), q, Temperature::Infinite)
                .expect("q > 0")
                .with_fugacity(lambda);
            for a in 0..q {
                for b in 0..q {
                    let x = Labeling(vec![a, b]);
                    kernels += 1;
                    if exact_coin_kernel_full_activity(&m, &x)? != exact_kernel_full_activity(&m, &x) {
                        kernel_bad += 1;
                    }
                }
            }
        }
    }
    Ok(vec![
        check("batch replay", replay_bad == 0, format!("{replay_bad} of {runs} runs differ")),
        check("hamiltonian gather", gather_bad == 0, format!("{gather_bad} wrong Hamiltonians")),
        check("three-coin kernel", kernel_bad == 0, format!("{kernel_bad} of {kernels} kernels differ")),
    ])
}

fn empirical_tv(model: &GibbsModel, params: &ChainParams, samples: u64, seed: u64) -> Result<f64, Failure> {
    let dist = exact_distribution(model, DEFAULT_ENUMERATION_CAP).map_err(|e| Failure::usage(e.into()))?;
    let mut counts: HashMap<Labeling, u64> = HashMap::new();
    for i in 0..samples {
        *counts.entry(sample(model, params, seed, i)).or_default() += 1;
    }
    Ok(dist.tv_distance(&counts))
}

fn tv(args: &VerifyArgs) -> SuiteResult {
    let edge = make_hardcore(Arc::new(Graph::path(2)), Fugacity::one());
    let (p, _) = default_p(&edge);
    let t = mixing_time(&edge, p, 0.005)?;
    let d_edge = empirical_tv(&edge, &ChainParams::new(p, t), args.samples, args.seed)?;
    // proper 3-colorings of a triangle are absorbing, so no mixing bound
    // applies; by symmetry the absorbed state is still uniform
    let k3 = make_potts(Arc::new(Graph::complete(3)), 3, Temperature::Infinite).expect("q > 0");
    let d_k3 = empirical_tv(&k3, &ChainParams::new(0.5, 200), args.samples, args.seed + 1)?;
    Ok(vec![
        check("tv hardcore edge", d_edge <= args.tv, format!("TV {d_edge:.4} at t = {t}, {} samples", args.samples)),
        check("tv potts triangle", d_k3 <= args.tv, format!("TV {d_k3:.4} at t = 200, {} samples", args.samples)),
    ])
}

fn regular(n: usize, d: usize, seed: u64) -> Result<Arc<Graph>, Failure> {
    Graph::random_regular(n, d, seed)
        .map(Arc::new)
        .map_err(|e| Failure::usage(e.into()))
}

fn coupling(args: &VerifyArgs) -> SuiteResult {
    let grid_p = [0.1, 0.3, 0.5];
    let mut out = Vec::new();
    let hardcore = !matches!(args.model, Some(Family::Potts) | Some(Family::Pointer));
    let potts = !matches!(args.model, Some(Family::Hardcore) | Some(Family::Pointer));
    if hardcore {
        let (mut points, mut worst, mut bad) = (0, f64::NEG_INFINITY, Vec::new());
        for d in 2..=args.delta_max {
            let n = (d + 2).max(12) + ((d + 2).max(12) * d) % 2;
            let g = regular(n, d, args.seed + d as u64)?;
            for lambda in [0.5 / (d - 1) as f64, 0.9 / (d - 1) as f64] {
                let m = make_hardcore(g.clone(), Fugacity::from_f64(lambda).map_err(|e| Failure::usage(e.into()))?);
                for p in grid_p {
                    let y = Labeling(vec![0; n]);
                    let mut x = y.clone();
                    x[0] = 1;
                    let (mean, se) = empirical_contraction(&m, &x, &y, &ChainParams::new(p, 0), args.seed, args.trials)?;
                    let bound = contraction_bound(BoundFamily::Hardcore { lambda }, d, p);
                    points += 1;
                    worst = worst.max(mean - bound - 3.0 * se);
                    if mean > bound + 3.0 * se {
                        bad.push(format!("D={d} lambda={lambda:.3} p={p}"));
                    }
                }
            }
        }
        out.push(check(
            "coupling hardcore",
            bad.is_empty(),
            format!("{points} points, max excess over bound + 3se {worst:.4}, failing {bad:?}"),
        ));
    }
    if potts {
        let (mut points, mut worst, mut bad) = (0, f64::NEG_INFINITY, Vec::new());
        for d in 2..=args.delta_max {
            let n = (d + 2).max(12) + ((d + 2).max(12) * d) % 2;
            let g = regular(n, d, args.seed + 100 + d as u64)?;
            let qs: Vec<u32> = match args.q {
                Some(q) if q as usize > 2 * d => vec![q],
                Some(_) => continue,
                None => vec![2 * d as u32 + 1, 3 * d as u32],
            };
            for q in qs {
                let m = make_potts(g.clone(), q, Temperature::Infinite).map_err(|e| Failure::usage(e.into()))?;
                for p in grid_p {
                    let x = m.initial_state(args.seed, 0);
                    let mut y = x.clone();
                    y[0] = (x[0] + 1) % q;
                    let (mean, se) = empirical_contraction(&m, &x, &y, &ChainParams::new(p, 0), args.seed, args.trials)?;
                    let bound = contraction_bound(BoundFamily::Potts { q: q as f64 }, d, p);
                    points += 1;
                    worst = worst.max(mean - bound - 3.0 * se);
                    if mean > bound + 3.0 * se {
                        bad.push(format!("D={d} q={q} p={p}"));
                    }
                }
            }
        }
        out.push(check(
            "coupling potts",
            bad.is_empty() && points > 0,
            format!("{points} points, max excess over bound + 3se {worst:.4}, failing {bad:?}"),
        ));
    }
    Ok(out)
}

/// One batch transition on a random regular hardcore instance, compared
/// with the frozen word and round constants.
fn ledger(args: &VerifyArgs) -> SuiteResult {
    let n = args.n.unwrap_or(27).max(2);
    let mut d = 4.min(n - 1);
    if n * d % 2 == 1 {
        d -= 1;
    }
    let m = make_hardcore(regular(n, d, args.seed)?, Fugacity::from_ratio(1, 5).expect("valid"));
    let mut batch = BatchState::initial(&m, args.seed, n);
    let mut ledger = MessageLedger::new(n);
    simulate_transition_batch(&m, &mut batch, 0.3, args.seed, 0, &mut ledger)?;
    let words = ledger.max_machine_words().1;
    let rounds = ledger.rounds_total();
    let cw = words as f64 / (n as f64).powf(4.0 / 3.0);
    let cr = rounds as f64 / (n as f64).powf(1.0 / 3.0);
    let report = audit_ledger(
        &ledger,
        (2.0 * BATCH_WORDS_CONSTANT * (n as f64).powf(4.0 / 3.0)).ceil() as u64,
        (2.0 * BATCH_ROUNDS_CONSTANT * (n as f64).powf(1.0 / 3.0)).ceil() as u64,
    );
    Ok(vec![check(
        "ledger scaling",
        report.passed() && cw >= BATCH_WORDS_CONSTANT / 2.0 && cr >= BATCH_ROUNDS_CONSTANT / 2.0,
        format!(
            "n = {n}: words {words} (C = {cw:.2}, frozen {BATCH_WORDS_CONSTANT}), rounds {rounds} (C = {cr:.2}, frozen {BATCH_ROUNDS_CONSTANT})"
        ),
    )])
}

fn brute_triangle(g: &Graph) -> bool {
    let n = g.n();
    (0..n).any(|a| (a + 1..n).any(|b| (b + 1..n).any(|c| g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c))))
}

pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e))
            .expect("distinct pairs")
    })
}

fn triangle(args: &VerifyArgs) -> SuiteResult {
    let mode = TriangleMode::Exact {
        cap: DEFAULT_ENUMERATION_CAP,
    };
    let mut graphs: Vec<Graph> = all_graphs(4).collect();
    for s in 0..args.random_graphs {
        graphs.push(Graph::gnp(5 + (s as usize % 2), 0.45, args.seed + s).map_err(|e| Failure::usage(e.into()))?);
    }
    let (mut wrong, mut gap_bad) = (0, 0);
    for g in &graphs {
        let r = detect_triangle(g, &mode)?;
        let truth = brute_triangle(g);
        wrong += (r.has_triangle != truth) as usize;
        let n = g.n() as f64;
        gap_bad += (truth && r.gap < 1.0 / (16.0 * n * n)) as usize;
    }
    Ok(vec![check(
        "triangle reduction",
        wrong == 0 && gap_bad == 0,
        format!("{} graphs, {wrong} disagreements, {gap_bad} gap violations", graphs.len()),
    )])
}

fn schedule(_: &VerifyArgs) -> SuiteResult {
    let k3 = Arc::new(Graph::complete(3));
    let instances = [
        (make_potts(k3.clone(), 7, Temperature::Infinite), 0.15),
        (make_potts(Arc::new(Graph::cycle(4).expect("n >= 3")), 9, Temperature::Infinite), 0.15),
        (make_potts(Arc::new(Graph::path(4)), 3, Temperature::Finite(2.0)), 0.1),
        (Ok(make_hardcore(Arc::new(Graph::path(3)), Fugacity::from_ratio(2, 5).expect("valid"))), 0.1),
        (make_pointer_model(k3, Temperature::Infinite), 0.2),
    ];
    let bound = BigRational::new(7389.into(), 1000.into());
    let (mut steps, mut df_bad, mut tele_bad, mut worst) = (0, 0, 0, 0.0f64);
    for (model, eps) in instances {
        let model = model.map_err(|e| Failure::usage(e.into()))?;
        let s = build_schedule(&model, eps, 1.0)?;
        let z = partition_polynomial(&model, DEFAULT_ENUMERATION_CAP).map_err(|e| Failure::usage(e.into()))?;
        for w in s.fugacities.windows(2) {
            steps += 1;
            let r = dyer_frieze_ratio(|l| z.eval_exact(l), w[0].exact(), w[1].exact());
            worst = worst.max(r.to_f64().unwrap_or(f64::INFINITY));
            df_bad += (r > bound) as usize;
        }
        let telescoped = s
            .fugacities
            .windows(2)
            .fold(s.anchor.clone(), |acc, w| acc * z.eval_exact(w[1].exact()) / z.eval_exact(w[0].exact()));
        let target = z.eval_exact(model.fugacity().exact());
        let slack = BigRational::one() + BigRational::from_float(eps / 2.0).expect("finite");
        tele_bad += (telescoped > &target * &slack || telescoped < &target / &slack) as usize;
    }
    Ok(vec![
        check("schedule variance", df_bad == 0, format!("{steps} steps, max ratio {worst:.4} (bound e^2)")),
        check("schedule telescoping", tele_bad == 0, format!("{tele_bad} instances off by more than eps/2")),
    ])
}
