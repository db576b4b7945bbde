//! Sources of independent samples, reported as their Hamiltonians.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EstimateError;
use crate::chain::{sample, ChainParams};
use crate::cube::{hardcore_fast_batch, BatchState, CubeSimulator};
use crate::model::{GibbsModel, ModelFamily};
use crate::net::{charge_phase, phase_load, MessageLedger, RoutingRequest};

/// Draws `k <= n` independent samples of `model`, each after `params.t_mix`
/// transitions, and returns their Hamiltonians.
pub trait BatchSampler {
    fn name(&self) -> &'static str;

    fn hamiltonians(
        &mut self,
        model: &GibbsModel,
        k: usize,
        params: &ChainParams,
        seed: u64,
        ledger: &mut MessageLedger,
    ) -> Result<Vec<u64>, EstimateError>;
}

/// One reference chain per sample. Charges nothing to the ledger.
#[derive(Debug, Default, Clone)]
pub struct ReferenceSampler;

impl BatchSampler for ReferenceSampler {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn hamiltonians(
        &mut self,
        model: &GibbsModel,
        k: usize,
        params: &ChainParams,
        seed: u64,
        _ledger: &mut MessageLedger,
    ) -> Result<Vec<u64>, EstimateError> {
        Ok((0..k as u64)
            .map(|i| model.hamiltonian_unchecked(&sample(model, params, seed, i)))
            .collect())
    }
}

/// The subcube batch simulation followed by the Hamiltonian gather.
#[derive(Debug, Default, Clone)]
pub struct CubeSampler {
    cached: Option<CubeSimulator>,
}

impl BatchSampler for CubeSampler {
    fn name(&self) -> &'static str {
        "cube"
    }

    fn hamiltonians(
        &mut self,
        model: &GibbsModel,
        k: usize,
        params: &ChainParams,
        seed: u64,
        ledger: &mut MessageLedger,
    ) -> Result<Vec<u64>, EstimateError> {
        let reuse = self
            .cached
            .as_ref()
            .is_some_and(|s| s.partition().chains() == k && s.model() == model);
        if !reuse {
            self.cached = Some(CubeSimulator::new(model, k)?);
        }
        let sim = self.cached.as_mut().expect("just built");
        let mut state = BatchState::initial(model, seed, k);
        for t in 0..params.t_mix {
            sim.transition(&mut state, params.p, seed, t, ledger)?;
        }
        Ok(sim.gather_hamiltonians(&state, ledger)?)
    }
}

/// The hardcore notification fast path. `H` is the set size, so every
/// occupied vertex reports one word to the machine of its chain, which
/// forwards the total to machine 0.
#[derive(Debug, Default, Clone)]
pub struct HardcoreFastSampler;

impl BatchSampler for HardcoreFastSampler {
    fn name(&self) -> &'static str {
        "fast"
    }

    fn hamiltonians(
        &mut self,
        model: &GibbsModel,
        k: usize,
        params: &ChainParams,
        seed: u64,
        ledger: &mut MessageLedger,
    ) -> Result<Vec<u64>, EstimateError> {
        let (state, _) = hardcore_fast_batch(model, k, params, seed, ledger)?;
        let n = model.n();
        let mut report = Vec::new();
        for i in 0..k {
            for v in 0..n {
                if state.get(v, i) == 1 {
                    report.push(RoutingRequest::new(v as u32, i as u32, 1));
                }
            }
        }
        if !report.is_empty() {
            charge_phase("hardcore-size-to-chain", &phase_load(n, &report), ledger);
        }
        let forward: Vec<RoutingRequest> = (1..k).map(|i| RoutingRequest::new(i as u32, 0, 1)).collect();
        if !forward.is_empty() {
            charge_phase("hardcore-size-to-root", &phase_load(n, &forward), ledger);
        }
        Ok((0..k)
            .map(|i| state.column_slice(i).iter().map(|&x| x as u64).sum())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Reference,
    Cube,
    Fast,
}

impl SamplerKind {
    pub fn build(self) -> Box<dyn BatchSampler> {
        match self {
            SamplerKind::Reference => Box::new(ReferenceSampler),
            SamplerKind::Cube => Box::new(CubeSampler::default()),
            SamplerKind::Fast => Box::new(HardcoreFastSampler),
        }
    }

    /// The fast path for hardcore, the cube simulation otherwise.
    pub fn default_for(model: &GibbsModel) -> Self {
        match model.family() {
            ModelFamily::Hardcore => SamplerKind::Fast,
            _ => SamplerKind::Cube,
        }
    }
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reference" => Ok(SamplerKind::Reference),
            "cube" => Ok(SamplerKind::Cube),
            "fast" => Ok(SamplerKind::Fast),
            _ => Err(format!("unknown sampler `{s}` (expected reference, cube or fast)")),
        }
    }
}
