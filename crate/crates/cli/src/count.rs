use std::fmt::Write as _;
use std::path::Path;

use clique_gibbs::chain::RegimeGate;
use clique_gibbs::estimator::{estimate_partition, EstimateOptions, EstimateResult, SamplerKind};

use crate::args::CountArgs;
use crate::error::Failure;
use crate::output::emit;

const DEFAULT_EPSILON: f64 = 0.1;

pub fn run(args: &CountArgs) -> Result<(), Failure> {
    let (model, config) = args.model.build(args.graph.load()?)?;
    let eps = args.eps.or(config.epsilon).unwrap_or(DEFAULT_EPSILON);
    let options = EstimateOptions {
        repetitions: args.r,
        c_m: args.cm,
        p: args.chain.p,
        t_mix: args.chain.t_mix,
        gate: RegimeGate::default(),
        force: args.chain.force,
        sample_budget: args.budget,
        seed: args.chain.seed,
        sampler: args.sampler.map(SamplerKind::from),
    };
    let result = estimate_partition(&model, eps, &options)?;
    if let Some(path) = &args.json {
        let json = serde_json::to_vec_pretty(&result).map_err(|e| Failure::io(e.into()))?;
        emit(Some(path), &json)?;
    }
    emit(None, summary(&result).as_bytes())
}

/// Prints the summary of a saved result record.
pub fn show(path: &Path) -> Result<(), Failure> {
    let text =
        std::fs::read(path).map_err(|e| Failure::io(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let result: EstimateResult =
        serde_json::from_slice(&text).map_err(|e| Failure::io(anyhow::anyhow!("{}: {e}", path.display())))?;
    emit(None, summary(&result).as_bytes())
}

pub fn summary(r: &EstimateResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model        {} (n = {})", r.model, r.n);
    let _ = writeln!(s, "estimate     {} (log {})", r.estimate, r.log_estimate);
    let _ = writeln!(s, "epsilon      {}", r.epsilon);
    let _ = writeln!(s, "schedule     {} terms x {} samples", r.schedule_len, r.samples_per_term);
    let _ = writeln!(s, "repetitions  {} ({} samples in total)", r.repetitions, r.total_samples);
    let _ = writeln!(s, "chains       {} sampler, p = {}, t_mix = {}", r.sampler, r.p, r.t_mix);
    let _ = writeln!(
        s,
        "ledger       {} rounds, {} phases, max machine words {}, total words {}",
        r.ledger.rounds_total, r.ledger.phases, r.ledger.max_machine_words, r.ledger.total_words
    );
    s
}
