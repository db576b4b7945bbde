use std::sync::Arc;
use std::time::Instant;

use clique_gibbs::chain::{default_p, delta_for_samples, mixing_time, ChainParams};
use clique_gibbs::cube::{hardcore_fast_batch, simulate_transition_batch, BatchState};
use clique_gibbs::estimator::{detect_triangle, TriangleMode};
use clique_gibbs::model::DEFAULT_ENUMERATION_CAP;
use clique_gibbs::{make_hardcore, Fugacity, Graph, MessageLedger};
use serde::Serialize;

use crate::args::{BenchArgs, BenchMode};
use crate::error::Failure;
use crate::output::emit;
use crate::verify::all_graphs;

pub const HEADER: [&str; 8] = ["n", "mode", "model", "params", "rounds", "max_words", "wall_ms", "detected"];

/// Largest size for the exhaustive triangle sweep (2^15 graphs at n = 6).
const TRIANGLE_MAX_N: usize = 6;

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    mode: &'static str,
    model: String,
    params: String,
    rounds: u64,
    max_words: u64,
    wall_ms: f64,
    detected: Option<bool>,
}

fn sizes(args: &BenchArgs) -> Result<Vec<usize>, Failure> {
    args.n
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::usage(anyhow::anyhow!("bad size `{s}` in --n"))))
        .collect()
}

fn hardcore_instance(args: &BenchArgs, n: usize) -> Result<(clique_gibbs::GibbsModel, String), Failure> {
    let d = args.degree;
    let g = Graph::random_regular(n, d, args.seed).map_err(|e| Failure::usage(e.into()))?;
    let lambda = args.lambda.unwrap_or(0.5 / (d.max(2) - 1) as f64);
    let lambda = Fugacity::from_f64(lambda).map_err(|e| Failure::usage(e.into()))?;
    let desc = format!("D={d} lambda={lambda}");
    Ok((make_hardcore(Arc::new(g), lambda), desc))
}

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for n in sizes(args)? {
        match args.mode {
            BenchMode::Batch => {
                let (m, desc) = hardcore_instance(args, n)?;
                let start = Instant::now();
                let mut state = BatchState::initial(&m, args.seed, n);
                let mut ledger = MessageLedger::new(n);
                simulate_transition_batch(&m, &mut state, args.p, args.seed, 0, &mut ledger)?;
                rows.push(Row {
                    n,
                    mode: "batch",
                    model: "hardcore".into(),
                    params: format!("{desc} p={}", args.p),
                    rounds: ledger.rounds_total(),
                    max_words: ledger.max_machine_words().1,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    detected: None,
                });
            }
            BenchMode::Fast => {
                let (m, desc) = hardcore_instance(args, n)?;
                let start = Instant::now();
                let (p, _) = default_p(&m);
                let t = mixing_time(&m, p, delta_for_samples(n as u64))?;
                let mut ledger = MessageLedger::new(n);
                let (_, stats) = hardcore_fast_batch(&m, n, &ChainParams::new(p, t), args.seed, &mut ledger)?;
                rows.push(Row {
                    n,
                    mode: "fast",
                    model: "hardcore".into(),
                    params: format!("{desc} p={p} t_mix={t}"),
                    rounds: ledger.rounds_total(),
                    max_words: stats.max_words(),
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    detected: None,
                });
            }
            BenchMode::Triangle => {
                if n > TRIANGLE_MAX_N {
                    return Err(Failure::usage(anyhow::anyhow!(
                        "exhaustive triangle sweep supports n <= {TRIANGLE_MAX_N}, got {n}"
                    )));
                }
                let mode = TriangleMode::Exact {
                    cap: DEFAULT_ENUMERATION_CAP,
                };
                for g in all_graphs(n) {
                    let start = Instant::now();
                    let r = detect_triangle(&g, &mode)?;
                    let edges: Vec<String> = g.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
                    rows.push(Row {
                        n,
                        mode: "triangle",
                        model: "pointer".into(),
                        params: edges.join(" "),
                        rounds: 0,
                        max_words: 0,
                        wall_ms: start.elapsed().as_secs_f64() * 1e3,
                        detected: Some(r.has_triangle),
                    });
                }
            }
        }
    }
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    csv.write_record(HEADER).map_err(|e| Failure::io(e.into()))?;
    for row in &rows {
        csv.serialize(row).map_err(|e| Failure::io(e.into()))?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::io(anyhow::anyhow!("{e}")))?;
    emit(args.out.as_deref(), &bytes)
}
