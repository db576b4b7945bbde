//! Non-adaptive cooling schedules with unit Hamiltonian steps.
//!
//! A schedule is a fugacity sequence `lambda_0, ..., lambda_l` with
//! `|ln(lambda_{i+1} / lambda_i)| <= 1 / h_max`, where `h_max` bounds the
//! Hamiltonian. Each ratio `Z(lambda_{i+1}) / Z(lambda_i)` is then the mean of
//! a weight `(lambda_{i+1} / lambda_i)^H` lying within a factor `e` of 1,
//! which bounds the per-term second moment by `e^2`.
//!
//! Potts and pointer models run from `lambda = 1` (`beta = 0`, where `Z` is
//! known) down to the target. Infinite `beta` is cut off at
//! `beta_max = ln(2 Z(0) / eps) + 1`. The hardcore model runs upward from a
//! small `lambda_0` at which `Z(lambda_0) ~ 1 + n lambda_0` to within `1 + eps/2`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::EstimateError;
use crate::model::{Fugacity, GibbsModel, ModelFamily};

/// Per-term second-moment bound `B = e^2` of a unit-step schedule.
pub const SCHEDULE_VARIANCE_BOUND: f64 = std::f64::consts::E * std::f64::consts::E;

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingSchedule {
    /// `lambda_0, ..., lambda_l`.
    pub fugacities: Vec<Fugacity>,
    /// `Z(lambda_0)`, or for the hardcore model its lower bound `1 + n lambda_0`.
    pub anchor: BigRational,
    /// Whether `anchor` is exactly `Z(lambda_0)`.
    pub anchor_exact: bool,
    /// The Hamiltonian bound used for the step size.
    pub h_max: u64,
    /// Whether an infinite `beta` was cut off at a finite `beta_max`.
    pub truncated: bool,
    /// Relative error left for the sampled ratios.
    pub sampling_epsilon: f64,
    /// Samples per ratio.
    pub samples_per_term: u64,
}

impl CoolingSchedule {
    /// Number of ratios `l`.
    pub fn len(&self) -> usize {
        self.fugacities.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln(lambda_{i+1} / lambda_i)` for every term.
    pub fn log_steps(&self) -> Vec<f64> {
        self.fugacities
            .windows(2)
            .map(|w| w[1].value().ln() - w[0].value().ln())
            .collect()
    }

    pub fn log_anchor(&self) -> f64 {
        ln_rational(&self.anchor)
    }

    /// Total samples for `r` repetitions.
    pub fn total_samples(&self, repetitions: usize) -> u64 {
        self.len() as u64 * self.samples_per_term * repetitions as u64
    }
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub(crate) fn ln_rational(x: &BigRational) -> f64 {
    let num = x.numer().to_biguint().expect("non-negative");
    let den = x.denom().to_biguint().expect("positive");
    ln_biguint(&num) - ln_biguint(&den)
}

fn hardcore_anchor_ok(n: usize, lambda: &BigRational, slack: &BigRational) -> bool {
    let one = BigRational::one();
    let upper = (0..n).fold(one.clone(), |acc, _| acc * (&one + lambda));
    let lower = &one + BigRational::from(BigInt::from(n)) * lambda;
    upper <= (one + slack) * lower
}

/// Largest `lambda_0 <= cap` (up to bisection precision) with
/// `(1 + lambda_0)^n <= (1 + slack)(1 + n lambda_0)`, so that `1 + n lambda_0`
/// is within a factor `1 + slack` of `Z(lambda_0)` on any `n`-vertex graph.
pub fn hardcore_anchor_fugacity(n: usize, slack: f64, cap: f64) -> Fugacity {
    let nf = n as f64;
    let ok = |l: f64| nf * (1.0 + l).ln() <= (1.0 + slack).ln() + (1.0 + nf * l).ln();
    let mut lambda = if ok(cap) {
        cap
    } else {
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let slack_exact = BigRational::from_float(slack).expect("finite slack");
    while lambda > 0.0 {
        let f = Fugacity::from_f64(lambda).expect("positive");
        if hardcore_anchor_ok(n, f.exact(), &slack_exact) {
            return f;
        }
        lambda *= 0.5;
    }
    Fugacity::zero()
}

/// `beta_max = ln(2 Z(0) / eps) + 1`.
pub fn beta_cap(log_anchor: f64, epsilon: f64) -> f64 {
    log_anchor + (2.0 / epsilon).ln() + 1.0
}

/// Builds the schedule reaching the fugacity of `model`, with
/// `ceil(c_m l / eps_s^2)` samples per term for `eps_s = eps / 2`.
pub fn build_schedule(model: &GibbsModel, epsilon: f64, c_m: f64) -> Result<CoolingSchedule, EstimateError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(EstimateError::BadEpsilon(epsilon));
    }
    if !(c_m > 0.0 && c_m.is_finite()) {
        return Err(EstimateError::BadSampleConstant(c_m));
    }
    let h_max = model.hamiltonian_bound();
    let target = model.fugacity().clone();
    let mut truncated = false;
    let (fugacities, anchor, anchor_exact) = match model.family() {
        ModelFamily::Hardcore => {
            let n = model.n();
            if target.is_zero() {
                (vec![target], BigRational::one(), true)
            } else {
                let l0 = hardcore_anchor_fugacity(n, epsilon / 2.0, target.value());
                let anchor = BigRational::one() + BigRational::from(BigInt::from(n)) * l0.exact();
                let exact = n <= 1;
                if l0 == target || l0.value() >= target.value() {
                    (vec![target], anchor, exact)
                } else {
                    let span = target.value().ln() - l0.value().ln();
                    let steps = (span * h_max as f64).ceil().max(1.0) as usize;
                    let mut fs: Vec<Fugacity> = (0..steps)
                        .map(|i| {
                            let x = (l0.value().ln() + span * i as f64 / steps as f64).exp();
                            Fugacity::from_f64(x).expect("positive")
                        })
                        .collect();
                    fs[0] = l0;
                    fs.push(target);
                    (fs, anchor, exact)
                }
            }
        }
        ModelFamily::Potts { .. } | ModelFamily::Pointer => {
            let anchor = BigRational::from(BigInt::from(model.anchor_partition()));
            let beta_end = if target.is_zero() {
                truncated = true;
                beta_cap(ln_rational(&anchor), epsilon)
            } else {
                -target.value().ln()
            };
            if beta_end <= 0.0 {
                (vec![Fugacity::one()], anchor, true)
            } else {
                let steps = ((beta_end * h_max as f64).ceil() as usize).max(1);
                let mut fs: Vec<Fugacity> = (0..=steps)
                    .map(|i| Fugacity::from_f64((-beta_end * i as f64 / steps as f64).exp()).expect("positive"))
                    .collect();
                fs[0] = Fugacity::one();
                if !truncated {
                    fs[steps] = target;
                }
                (fs, anchor, true)
            }
        }
    };
    let sampling_epsilon = epsilon / 2.0;
    let len = fugacities.len() - 1;
    let samples_per_term = if len == 0 {
        0
    } else {
        (c_m * len as f64 / (sampling_epsilon * sampling_epsilon)).ceil() as u64
    };
    Ok(CoolingSchedule {
        fugacities,
        anchor,
        anchor_exact,
        h_max,
        truncated,
        sampling_epsilon,
        samples_per_term,
    })
}

/// `Z(a) Z(c) / Z(b)^2` for consecutive fugacities `a, b` with `c = b^2 / a`
/// (inverse temperatures `beta_i`, `beta_{i+1}`, `2 beta_{i+1} - beta_i`).
pub fn dyer_frieze_ratio<F>(z: F, a: &BigRational, b: &BigRational) -> BigRational
where
    F: Fn(&BigRational) -> BigRational,
{
    if a.is_zero() {
        return BigRational::one();
    }
    let c = b * b / a;
    z(a) * z(&c) / (z(b) * z(b))
}
