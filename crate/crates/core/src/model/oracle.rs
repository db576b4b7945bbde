//! Brute-force oracles: exact partition functions and Gibbs distributions of
//! small instances by enumerating the support.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{GibbsModel, Label, Labeling, ModelFamily};

/// Default cap on the number of enumerated labelings.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("enumeration of {size} labelings exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("the support is empty (partition function is zero)")]
    EmptySupport,
}

/// `Z` as a polynomial in `lambda`: coefficient `h` counts the support
/// labelings with Hamiltonian `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPolynomial {
    coeffs: Vec<u128>,
}

impl PartitionPolynomial {
    pub fn coefficients(&self) -> &[u128] {
        &self.coeffs
    }

    /// Number of support labelings with `H = h`.
    pub fn count(&self, h: usize) -> u128 {
        self.coeffs.get(h).copied().unwrap_or(0)
    }

    /// Support size, `Z` at `lambda = 1`.
    pub fn support_size(&self) -> u128 {
        self.coeffs.iter().sum()
    }

    /// `Z` at `lambda = 0` (`beta = inf`): labelings with zero energy.
    pub fn ground_count(&self) -> u128 {
        self.count(0)
    }

    pub fn eval_exact(&self, lambda: &BigRational) -> BigRational {
        // Horner
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, &c| acc * lambda + BigRational::from(BigInt::from(c)))
    }

    pub fn eval_f64(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * lambda + c as f64)
    }

    /// `Z(beta) = sum_h c_h exp(-beta h)` for finite `beta`.
    pub fn eval_beta(&self, beta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(h, &c)| c as f64 * (-beta * h as f64).exp())
            .sum()
    }
}

/// Per-vertex enumeration classes: `(representative label, multiplicity)`.
///
/// The pointer model's `3n` free labels never interact, so for counting they
/// collapse into one class of multiplicity `3n`.
fn classes(model: &GibbsModel, v: usize, collapse: bool) -> Vec<(Label, u128)> {
    match model.family() {
        ModelFamily::Pointer if collapse => {
            let n = model.n();
            std::iter::once((0, 3 * n as u128))
                .chain(model.graph().neighbors(v).iter().map(|&w| (model.pointer_label(w as usize), 1)))
                .collect()
        }
        _ => model.admissible_labels(v).into_iter().map(|x| (x, 1)).collect(),
    }
}

fn enumeration_size(cls: &[Vec<(Label, u128)>]) -> Option<u128> {
    cls.iter().try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
}

/// Depth-first enumeration of the support. `visit` receives the labeling,
/// its Hamiltonian and its multiplicity.
fn enumerate<F>(model: &GibbsModel, cap: u64, collapse: bool, mut visit: F) -> Result<(), OracleError>
where
    F: FnMut(&[Label], u64, u128),
{
    let n = model.n();
    let cls: Vec<_> = (0..n).map(|v| classes(model, v, collapse)).collect();
    let size = enumeration_size(&cls).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(OracleError::CapExceeded { size, cap });
    }
    // neighbors with smaller index, so each edge is scored once
    let earlier: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            model
                .graph()
                .neighbors(v)
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| w < v)
                .collect()
        })
        .collect();
    let mut labels = vec![0 as Label; n];

    fn rec<F: FnMut(&[Label], u64, u128)>(
        v: usize,
        energy: u64,
        mult: u128,
        model: &GibbsModel,
        cls: &[Vec<(Label, u128)>],
        earlier: &[Vec<usize>],
        labels: &mut [Label],
        visit: &mut F,
    ) {
        if v == labels.len() {
            visit(labels, energy, mult);
            return;
        }
        'choice: for &(x, k) in &cls[v] {
            let mut e = energy + model.vertex_energy(x) as u64;
            for &w in &earlier[v] {
                // canonical orientation (w, v) with w < v
                let y = labels[w];
                if !model.edge_allowed(y, x) {
                    continue 'choice;
                }
                e += model.edge_energy(y, x) as u64;
            }
            labels[v] = x;
            rec(v + 1, e, mult * k, model, cls, earlier, labels, visit);
        }
    }

    rec(0, 0, 1, model, &cls, &earlier, &mut labels, &mut visit);
    Ok(())
}

/// The partition polynomial of `model`'s support, independent of `lambda`.
pub fn partition_polynomial(model: &GibbsModel, cap: u64) -> Result<PartitionPolynomial, OracleError> {
    let mut coeffs: Vec<u128> = vec![0; model.hamiltonian_bound() as usize + 1];
    enumerate(model, cap, true, |_, h, mult| {
        coeffs[h as usize] += mult;
    })?;
    while coeffs.len() > 1 && coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(PartitionPolynomial { coeffs })
}

/// Exact `Z` at the model's own fugacity.
pub fn exact_partition(model: &GibbsModel, cap: u64) -> Result<BigRational, OracleError> {
    Ok(partition_polynomial(model, cap)?.eval_exact(model.fugacity().exact()))
}

/// The Gibbs distribution of a small instance, with exact probabilities.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub entries: Vec<(Labeling, BigRational)>,
    pub partition: BigRational,
    index: HashMap<Labeling, usize>,
}

impl ExactDistribution {
    pub fn probability(&self, sigma: &Labeling) -> BigRational {
        self.index
            .get(sigma)
            .map(|&i| self.entries[i].1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn probability_f64(&self, sigma: &Labeling) -> f64 {
        self.probability(sigma).to_f64().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total variation distance to the empirical distribution of `counts`.
    pub fn tv_distance(&self, counts: &HashMap<Labeling, u64>) -> f64 {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return 1.0;
        }
        let mut dist = 0.0;
        for (sigma, p) in &self.entries {
            let emp = counts.get(sigma).copied().unwrap_or(0) as f64 / total as f64;
            dist += (p.to_f64().unwrap_or(0.0) - emp).abs();
        }
        // mass the oracle does not know about
        for (sigma, &c) in counts {
            if !self.index.contains_key(sigma) {
                dist += c as f64 / total as f64;
            }
        }
        dist / 2.0
    }

    /// Expectation of `f(H)` under the distribution, exactly.
    pub fn expectation<F>(&self, model: &GibbsModel, f: F) -> BigRational
    where
        F: Fn(u64) -> BigRational,
    {
        self.entries
            .iter()
            .map(|(s, p)| p * f(model.hamiltonian_unchecked(s)))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Enumerates the support with probabilities `lambda^H / Z`.
pub fn exact_distribution(model: &GibbsModel, cap: u64) -> Result<ExactDistribution, OracleError> {
    let lambda = model.fugacity().exact().clone();
    let mut raw: Vec<(Labeling, u64)> = Vec::new();
    enumerate(model, cap, false, |labels, h, _| raw.push((Labeling(labels.to_vec()), h)))?;
    let max_h = raw.iter().map(|(_, h)| *h).max().unwrap_or(0) as usize;
    let mut powers = vec![BigRational::one()];
    for _ in 0..max_h {
        let next = powers.last().unwrap() * &lambda;
        powers.push(next);
    }
    let partition = raw
        .iter()
        .fold(BigRational::zero(), |acc, (_, h)| acc + &powers[*h as usize]);
    if partition.is_zero() {
        return Err(OracleError::EmptySupport);
    }
    let mut entries = Vec::with_capacity(raw.len());
    let mut index = HashMap::with_capacity(raw.len());
    for (sigma, h) in raw {
        let p = &powers[h as usize] / &partition;
        index.insert(sigma.clone(), entries.len());
        entries.push((sigma, p));
    }
    Ok(ExactDistribution {
        entries,
        partition,
        index,
    })
}
