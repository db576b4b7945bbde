//! Telescoping-product estimation of `Z` with median boosting.

use serde::{Deserialize, Serialize};

use super::sampler::{BatchSampler, SamplerKind};
use super::schedule::{build_schedule, CoolingSchedule};
use super::EstimateError;
use crate::chain::{
    check_regime, contraction_bound, default_p, delta_for_samples, mixing_time, mixing_time_from_rho, BoundFamily,
    ChainParams, RegimeGate,
};
use crate::graph::Graph;
use crate::model::{make_hardcore, make_potts, Fugacity, GibbsModel, ModelFamily, Temperature};
use crate::net::{derive_seed, LedgerSummary, MessageLedger};

/// Default sample-count constant `c_m` in `m = ceil(c_m l / eps_s^2)`.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 0.1;
pub const DEFAULT_REPETITIONS: usize = 9;
/// Largest total sample count a run may request.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 20_000_000;

/// Knobs of [`estimate_partition`].
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub repetitions: usize,
    pub c_m: f64,
    /// Activation probability; chosen from the contraction bound if unset.
    pub p: Option<f64>,
    /// Transitions per sample; `mixing_time` at `delta = 1/(8k)` if unset.
    pub t_mix: Option<u64>,
    pub gate: RegimeGate,
    /// Skip the regime gate.
    pub force: bool,
    pub sample_budget: u64,
    pub seed: u64,
    /// Sampler; the model's default if unset.
    pub sampler: Option<SamplerKind>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            repetitions: DEFAULT_REPETITIONS,
            c_m: DEFAULT_SAMPLE_CONSTANT,
            p: None,
            t_mix: None,
            gate: RegimeGate::default(),
            force: false,
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            seed: 0,
            sampler: None,
        }
    }
}

impl EstimateOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Outcome of one estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub model: String,
    pub n: usize,
    pub epsilon: f64,
    /// `ln` of the reported estimate, the median of the repetitions.
    pub log_estimate: f64,
    pub estimate: f64,
    pub repetitions: usize,
    pub repetition_log_estimates: Vec<f64>,
    pub schedule_len: usize,
    pub samples_per_term: u64,
    pub total_samples: u64,
    pub p: f64,
    pub t_mix: u64,
    pub sampler: String,
    pub ledger: LedgerSummary,
}

impl EstimateResult {
    /// Whether the estimate lies in `[(1 - eps) z, (1 + eps) z]`.
    pub fn within(&self, z: f64) -> bool {
        self.estimate >= (1.0 - self.epsilon) * z && self.estimate <= (1.0 + self.epsilon) * z
    }
}

/// Compensated (Kahan) sum of log factors.
#[derive(Debug, Default, Clone, Copy)]
pub struct LogAccumulator {
    sum: f64,
    carry: f64,
}

impl LogAccumulator {
    pub fn new(start: f64) -> Self {
        LogAccumulator { sum: start, carry: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// `ln mean(exp(log_step H))`, the log of the ratio estimate
/// `Z(lambda_{i+1}) / Z(lambda_i)` from samples at `lambda_i`, where
/// `log_step = ln(lambda_{i+1} / lambda_i) = beta_i - beta_{i+1}`.
pub fn estimate_log_ratio(hamiltonians: &[u64], log_step: f64) -> Result<f64, EstimateError> {
    if hamiltonians.is_empty() {
        return Err(EstimateError::NoSamples);
    }
    let logs = hamiltonians.iter().map(|&h| if h == 0 { 0.0 } else { log_step * h as f64 });
    let top = logs.clone().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs.map(|x| (x - top).exp()).sum();
    Ok(top + s.ln() - (hamiltonians.len() as f64).ln())
}

/// Sample mean of `exp((beta_i - beta_{i+1}) H)`.
pub fn estimate_ratio(hamiltonians: &[u64], log_step: f64) -> Result<f64, EstimateError> {
    estimate_log_ratio(hamiltonians, log_step).map(f64::exp)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Chain parameters for every sample of a run consuming `total` samples.
fn chain_params(model: &GibbsModel, total: u64, options: &EstimateOptions) -> Result<ChainParams, EstimateError> {
    let p = options.p.unwrap_or_else(|| default_p(model).0);
    let delta = delta_for_samples(total);
    let t_mix = match options.t_mix {
        Some(t) => t,
        None if options.force => {
            let rho = contraction_bound(BoundFamily::of(model), model.graph().max_degree(), p);
            mixing_time_from_rho(rho, model.n(), delta)?
        }
        None => mixing_time(model, p, delta)?,
    };
    Ok(ChainParams::new(p, t_mix).with_delta(delta))
}

/// Estimates `Z` of `model` at its own fugacity (`lambda = 0` is `beta = inf`)
/// to relative error `epsilon`.
pub fn estimate_partition(
    model: &GibbsModel,
    epsilon: f64,
    options: &EstimateOptions,
) -> Result<EstimateResult, EstimateError> {
    let kind = options.sampler.unwrap_or_else(|| SamplerKind::default_for(model));
    estimate_partition_with(model, epsilon, options, kind.build().as_mut())
}

/// [`estimate_partition`] with an explicit sampler.
pub fn estimate_partition_with(
    model: &GibbsModel,
    epsilon: f64,
    options: &EstimateOptions,
    sampler: &mut dyn BatchSampler,
) -> Result<EstimateResult, EstimateError> {
    let n = model.n();
    if options.repetitions == 0 {
        return Err(EstimateError::NoRepetitions);
    }
    if !options.force {
        check_regime(model, &options.gate)?;
    }
    if epsilon <= 1.0 / (n as f64).sqrt() {
        log::warn!("epsilon {epsilon} is at most 1/sqrt(n) = {:.4}; the sample bounds assume it is larger", 1.0 / (n as f64).sqrt());
    }
    let schedule = build_schedule(model, epsilon, options.c_m)?;
    let total = schedule.total_samples(options.repetitions);
    if total > options.sample_budget {
        return Err(EstimateError::SampleBudget {
            needed: total,
            budget: options.sample_budget,
        });
    }
    let params = if schedule.is_empty() {
        ChainParams::new(options.p.unwrap_or(0.0), 0)
    } else {
        chain_params(model, total, options)?
    };
    let mut ledger = MessageLedger::new(n);
    let reps = (0..options.repetitions)
        .map(|rep| run_repetition(model, &schedule, &params, options.seed, rep, sampler, &mut ledger))
        .collect::<Result<Vec<f64>, _>>()?;
    let log_estimate = median(&reps);
    Ok(EstimateResult {
        model: model.to_string(),
        n,
        epsilon,
        log_estimate,
        estimate: log_estimate.exp(),
        repetitions: options.repetitions,
        repetition_log_estimates: reps,
        schedule_len: schedule.len(),
        samples_per_term: schedule.samples_per_term,
        total_samples: total,
        p: params.p,
        t_mix: params.t_mix,
        sampler: sampler.name().to_string(),
        ledger: ledger.summary(),
    })
}

/// One telescoping product. Each term's samples are drawn in waves of at
/// most `n` chains, every wave with its own derived seed.
fn run_repetition(
    model: &GibbsModel,
    schedule: &CoolingSchedule,
    params: &ChainParams,
    seed: u64,
    rep: usize,
    sampler: &mut dyn BatchSampler,
    ledger: &mut MessageLedger,
) -> Result<f64, EstimateError> {
    let n = model.n();
    let mut acc = LogAccumulator::new(schedule.log_anchor());
    let mut hs = Vec::with_capacity(schedule.samples_per_term as usize);
    for (term, log_step) in schedule.log_steps().into_iter().enumerate() {
        let at = model.with_fugacity(schedule.fugacities[term].clone());
        hs.clear();
        let mut wave = 0u64;
        while (hs.len() as u64) < schedule.samples_per_term {
            let k = ((schedule.samples_per_term - hs.len() as u64) as usize).min(n);
            let wave_seed = derive_seed(seed, &[rep as u64, term as u64, wave]);
            hs.extend(sampler.hamiltonians(&at, k, params, wave_seed, ledger)?);
            wave += 1;
        }
        acc.add(estimate_log_ratio(&hs, log_step)?);
    }
    Ok(acc.value())
}

/// Number of proper `q`-colorings of `g`.
pub fn count_colorings(
    g: &Graph,
    q: u32,
    epsilon: f64,
    options: &EstimateOptions,
) -> Result<EstimateResult, EstimateError> {
    let model = make_potts(std::sync::Arc::new(g.clone()), q, Temperature::Infinite)?;
    estimate_partition(&model, epsilon, options)
}

/// Hardcore partition function of `g` at fugacity `lambda`.
pub fn count_hardcore(
    g: &Graph,
    lambda: Fugacity,
    epsilon: f64,
    options: &EstimateOptions,
) -> Result<EstimateResult, EstimateError> {
    let model = make_hardcore(std::sync::Arc::new(g.clone()), lambda);
    debug_assert_eq!(model.family(), ModelFamily::Hardcore);
    estimate_partition(&model, epsilon, options)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chain::ChainError;

    #[test]
    fn ratio_examples() {
        assert_eq!(estimate_ratio(&[0, 0, 0], -0.3).unwrap(), 1.0);
        assert!((estimate_ratio(&[4], -0.25).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((estimate_ratio(&[0, 2], -0.5).unwrap() - 0.5 * (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!(matches!(estimate_ratio(&[], 0.1), Err(EstimateError::NoSamples)));
    }

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let mut acc = LogAccumulator::new(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        assert_eq!(acc.value(), 1e16 + 1000.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn exactly_anchored_cases() {
        let opts = EstimateOptions::default();
        let r = count_colorings(&Graph::empty(4), 3, 0.1, &opts).unwrap();
        assert!((r.estimate - 81.0).abs() < 1e-9);
        let r = count_hardcore(&Graph::cycle(5).unwrap(), Fugacity::zero(), 0.1, &opts).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.total_samples, 0);
    }

    #[test]
    fn gate_and_budget() {
        let k3 = Graph::complete(3);
        let opts = EstimateOptions::default();
        assert!(matches!(
            count_colorings(&k3, 4, 0.1, &opts),
            Err(EstimateError::Chain(ChainError::OutsideRegime(_)))
        ));
        let tight = EstimateOptions {
            sample_budget: 10,
            ..EstimateOptions::default()
        };
        assert!(matches!(count_colorings(&k3, 7, 0.1, &tight), Err(EstimateError::SampleBudget { .. })));
    }

    #[test]
    fn empty_graph_hardcore() {
        let g = Graph::empty(5);
        let opts = EstimateOptions::default().with_seed(3);
        let r = count_hardcore(&g, Fugacity::one(), 0.2, &opts).unwrap();
        assert!(r.within(32.0), "{}", r.estimate);
        let model = make_hardcore(Arc::new(g), Fugacity::one());
        assert_eq!(r.model, model.to_string());
    }
}
