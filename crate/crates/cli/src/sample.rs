use clique_gibbs::chain::{
    check_regime, contraction_bound, default_p, delta_for_samples, mixing_time, mixing_time_from_rho, sample,
    BoundFamily, ChainParams, RegimeGate,
};
use clique_gibbs::cube::{hardcore_fast_batch, BatchState, CubeSimulator};
use clique_gibbs::estimator::SamplerKind;
use clique_gibbs::net::derive_seed;
use clique_gibbs::{GibbsModel, Labeling, MessageLedger};

use crate::args::{ChainArgs, SampleArgs};
use crate::error::Failure;
use crate::output::emit;

/// `p` and `t_mix` from the flags, falling back to the regime defaults.
/// Outside the regime only `--force` proceeds; it then needs a contraction
/// factor below 1 or an explicit `--t-mix`.
pub fn chain_params(model: &GibbsModel, args: &ChainArgs, delta: f64) -> Result<ChainParams, Failure> {
    let p = args.p.unwrap_or_else(|| default_p(model).0);
    if !(0.0..=1.0).contains(&p) {
        return Err(Failure::usage(anyhow::anyhow!("activation probability {p} outside [0, 1]")));
    }
    if !args.force {
        check_regime(model, &RegimeGate::default())?;
    }
    let t_mix = match args.t_mix {
        Some(t) => t,
        None if args.force => {
            let rho = contraction_bound(BoundFamily::of(model), model.graph().max_degree(), p);
            mixing_time_from_rho(rho, model.n(), delta)?
        }
        None => mixing_time(model, p, delta)?,
    };
    Ok(ChainParams::new(p, t_mix).with_delta(delta))
}

pub fn run(args: &SampleArgs) -> Result<(), Failure> {
    let (model, _) = args.model.build(args.graph.load()?)?;
    let n = model.n();
    if n == 0 || args.chains == 0 {
        return Err(Failure::usage(anyhow::anyhow!("need at least one vertex and one chain")));
    }
    let delta = args.delta.unwrap_or_else(|| delta_for_samples(args.chains as u64));
    let params = chain_params(&model, &args.chain, delta)?;
    let kind = args.sampler.map(SamplerKind::from).unwrap_or_else(|| SamplerKind::default_for(&model));
    let mut ledger = if args.ledger.is_some() {
        MessageLedger::with_history(n)
    } else {
        MessageLedger::new(n)
    };

    // waves of at most n chains, each with its own derived seed, so every
    // sampler draws the same labelings
    let mut drawn: Vec<(Labeling, u64)> = Vec::with_capacity(args.chains);
    let mut sim: Option<CubeSimulator> = None;
    let mut wave = 0u64;
    while drawn.len() < args.chains {
        let k = (args.chains - drawn.len()).min(n);
        let seed = derive_seed(args.chain.seed, &[wave]);
        match kind {
            SamplerKind::Reference => {
                for i in 0..k {
                    let x = sample(&model, &params, seed, i as u64);
                    let h = model.hamiltonian_unchecked(&x);
                    drawn.push((x, h));
                }
            }
            SamplerKind::Cube => {
                if sim.as_ref().is_none_or(|s| s.partition().chains() != k) {
                    sim = Some(CubeSimulator::new(&model, k)?);
                }
                let s = sim.as_mut().expect("just built");
                let mut state = BatchState::initial(&model, seed, k);
                for t in 0..params.t_mix {
                    s.transition(&mut state, params.p, seed, t, &mut ledger)?;
                }
                let hs = s.gather_hamiltonians(&state, &mut ledger)?;
                drawn.extend(state.columns().into_iter().zip(hs));
            }
            SamplerKind::Fast => {
                let (state, _) = hardcore_fast_batch(&model, k, &params, seed, &mut ledger)?;
                for x in state.columns() {
                    let h = model.hamiltonian_unchecked(&x);
                    drawn.push((x, h));
                }
            }
        }
        wave += 1;
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["chain", "hamiltonian", "labeling"]).map_err(|e| Failure::io(e.into()))?;
    for (i, (x, h)) in drawn.iter().enumerate() {
        csv.write_record([i.to_string(), h.to_string(), x.to_string()])
            .map_err(|e| Failure::io(e.into()))?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::io(anyhow::anyhow!("{e}")))?;
    emit(args.out.as_deref(), &bytes)?;
    if let Some(path) = &args.ledger {
        let mut buf = Vec::new();
        ledger.write_csv(&mut buf)?;
        emit(Some(path), &buf)?;
    }
    let sum = ledger.summary();
    eprintln!(
        "{} samples of {model}: sampler {}, p {}, t_mix {}, {} rounds, max machine words {}",
        drawn.len(),
        kind.build().name(),
        params.p,
        params.t_mix,
        sum.rounds_total,
        sum.max_machine_words
    );
    Ok(())
}
