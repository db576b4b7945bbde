//! One transition of the distributed Metropolis-Hastings chain.
//!
//! Randomness is keyed so that any simulator asking the same questions gets
//! the same answers: vertex `v` draws its activation coin and proposal from
//! the stream `(v, t, Propose, chain)`, edge `{u, v}` its acceptance uniform
//! from `(min, max, t, Accept, chain)`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::ChainParams;
use crate::model::{GibbsModel, Label, Labeling};
use crate::net::{rng_stream, Purpose, StreamKey};

/// A proposal, `None` for an inactive vertex (the blank label).
pub type Proposal = Option<Label>;

/// Activation coin and proposal of vertex `v` at transition `t`.
///
/// The proposal is drawn proportionally to `b_v` by rejection: a uniform
/// label is accepted with probability `b_v(x) / max b`.
#[inline]
pub fn propose_vertex(model: &GibbsModel, p: f64, seed: u64, v: usize, t: u64, chain: u64) -> Proposal {
    let mut rng = rng_stream(seed, StreamKey::vertex(v as u32, t, Purpose::Propose, chain));
    if rng.gen::<f64>() >= p {
        return None;
    }
    let a = model.alphabet_size();
    let max_b = model.max_vertex_weight();
    loop {
        let x = rng.gen_range(0..a);
        let b = model.vertex_weight(v, x);
        if b >= max_b || (b > 0.0 && rng.gen::<f64>() * max_b < b) {
            return Some(x);
        }
    }
}

/// Proposals of every vertex of one chain.
pub fn propose(model: &GibbsModel, params: &ChainParams, seed: u64, t: u64, chain: u64) -> Vec<Proposal> {
    (0..model.n())
        .map(|v| propose_vertex(model, params.p, seed, v, t, chain))
        .collect()
}

#[inline]
fn factor(model: &GibbsModel, x: Proposal, y: Proposal, max_a: f64) -> f64 {
    match (x, y) {
        (Some(x), Some(y)) => model.edge_weight(x, y) / max_a,
        _ => 1.0,
    }
}

/// Acceptance probability of edge `{u, v}`, with `u < v` the canonical
/// orientation of `A_e`. Factors touching an inactive endpoint are 1.
#[inline]
pub fn edge_accept_probability(
    model: &GibbsModel,
    x_u: Label,
    x_v: Label,
    s_u: Proposal,
    s_v: Proposal,
) -> f64 {
    if s_u.is_none() && s_v.is_none() {
        return 1.0;
    }
    let max_a = model.max_edge_weight();
    factor(model, Some(x_u), s_v, max_a) * factor(model, s_u, Some(x_v), max_a) * factor(model, s_u, s_v, max_a)
}

/// Exact version of [`edge_accept_probability`].
pub fn edge_accept_probability_exact(
    model: &GibbsModel,
    x_u: Label,
    x_v: Label,
    s_u: Proposal,
    s_v: Proposal,
) -> BigRational {
    let max_a = model.max_edge_weight_exact();
    let f = |x: Proposal, y: Proposal| match (x, y) {
        (Some(x), Some(y)) => model.edge_weight_exact(x, y) / &max_a,
        _ => BigRational::one(),
    };
    f(Some(x_u), s_v) * f(s_u, Some(x_v)) * f(s_u, s_v)
}

/// Decides edge `{u, v}` at transition `t`. No uniform is consumed when the
/// outcome is certain.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn edge_accept(
    model: &GibbsModel,
    u: usize,
    v: usize,
    x_u: Label,
    x_v: Label,
    s_u: Proposal,
    s_v: Proposal,
    seed: u64,
    t: u64,
    chain: u64,
) -> bool {
    let (u, v, x_u, x_v, s_u, s_v) = if u < v {
        (u, v, x_u, x_v, s_u, s_v)
    } else {
        (v, u, x_v, x_u, s_v, s_u)
    };
    let prob = edge_accept_probability(model, x_u, x_v, s_u, s_v);
    if prob >= 1.0 {
        true
    } else if prob <= 0.0 {
        false
    } else {
        let mut rng = rng_stream(seed, StreamKey::edge(u as u32, v as u32, t, Purpose::Accept, chain));
        rng.gen::<f64>() < prob
    }
}

/// Final update: every active vertex whose incident edges were all accepted
/// adopts its proposal.
pub fn apply_proposals(x: &mut Labeling, proposals: &[Proposal], rejected: &[bool]) {
    for (v, s) in proposals.iter().enumerate() {
        if let Some(s) = s {
            if !rejected[v] {
                x[v] = *s;
            }
        }
    }
}

/// Reusable buffers for [`step_into`].
#[derive(Debug, Default, Clone)]
pub struct StepScratch {
    proposals: Vec<Proposal>,
    rejected: Vec<bool>,
}

/// One transition of chain `chain` at time `t`, in place.
pub fn step_into(
    model: &GibbsModel,
    x: &mut Labeling,
    params: &ChainParams,
    seed: u64,
    t: u64,
    chain: u64,
    scratch: &mut StepScratch,
) {
    let n = model.n();
    scratch.proposals.clear();
    scratch
        .proposals
        .extend((0..n).map(|v| propose_vertex(model, params.p, seed, v, t, chain)));
    scratch.rejected.clear();
    scratch.rejected.resize(n, false);
    let props = &scratch.proposals;
    for &(u, v) in model.graph().edges() {
        let (u, v) = (u as usize, v as usize);
        if props[u].is_none() && props[v].is_none() {
            continue;
        }
        if !edge_accept(model, u, v, x[u], x[v], props[u], props[v], seed, t, chain) {
            scratch.rejected[u] = true;
            scratch.rejected[v] = true;
        }
    }
    apply_proposals(x, &scratch.proposals, &scratch.rejected);
}

/// One transition; returns the next state.
pub fn step(model: &GibbsModel, x: &Labeling, params: &ChainParams, seed: u64, t: u64, chain: u64) -> Labeling {
    let mut next = x.clone();
    step_into(model, &mut next, params, seed, t, chain, &mut StepScratch::default());
    next
}

/// Runs chain `chain` from the model's initial state for `params.t_mix`
/// transitions.
pub fn sample(model: &GibbsModel, params: &ChainParams, seed: u64, chain: u64) -> Labeling {
    let mut x = model.initial_state(seed, chain);
    let mut scratch = StepScratch::default();
    for t in 0..params.t_mix {
        step_into(model, &mut x, params, seed, t, chain, &mut scratch);
    }
    x
}

/// The exact one-step kernel from `x` when every vertex is active and the
/// proposal distribution is `b_v`-proportional: next state and probability.
///
/// Enumerates proposals and the acceptance events of every edge, so only
/// usable on a handful of vertices.
pub fn exact_kernel_full_activity(model: &GibbsModel, x: &Labeling) -> Vec<(Labeling, BigRational)> {
    let n = model.n();
    let per_vertex: Vec<Vec<(Label, BigRational)>> = (0..n)
        .map(|v| {
            let labels = model.admissible_labels(v);
            let total = labels
                .iter()
                .fold(BigRational::zero(), |acc, &l| acc + model.vertex_weight_exact(v, l));
            labels
                .into_iter()
                .map(|l| (l, model.vertex_weight_exact(v, l) / &total))
                .filter(|(_, p)| !p.is_zero())
                .collect()
        })
        .collect();
    let edges = model.graph().edges();
    let mut out: Vec<(Labeling, BigRational)> = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let props: Vec<Proposal> = (0..n).map(|v| Some(per_vertex[v][choice[v]].0)).collect();
        let p_props = (0..n).fold(BigRational::one(), |acc, v| acc * &per_vertex[v][choice[v]].1);
        let acc_p: Vec<BigRational> = edges
            .iter()
            .map(|&(u, v)| {
                let (u, v) = (u as usize, v as usize);
                edge_accept_probability_exact(model, x[u], x[v], props[u], props[v])
            })
            .collect();
        for mask in 0u64..(1u64 << edges.len()) {
            let mut p = p_props.clone();
            let mut rejected = vec![false; n];
            for (e, &(u, v)) in edges.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    p *= &acc_p[e];
                } else {
                    p *= BigRational::one() - &acc_p[e];
                    rejected[u as usize] = true;
                    rejected[v as usize] = true;
                }
            }
            if p.is_zero() {
                continue;
            }
            let mut next = x.clone();
            apply_proposals(&mut next, &props, &rejected);
            accumulate(&mut out, next, p);
        }
        // odometer over proposal choices
        let mut v = 0;
        while v < n {
            choice[v] += 1;
            if choice[v] < per_vertex[v].len() {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
        if v == n {
            break;
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub(crate) fn accumulate(out: &mut Vec<(Labeling, BigRational)>, state: Labeling, p: BigRational) {
    match out.iter_mut().find(|(s, _)| *s == state) {
        Some((_, q)) => *q += p,
        None => out.push((state, p)),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;
    use crate::model::{make_hardcore, make_potts, Fugacity, Temperature};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn params(p: f64) -> ChainParams {
        ChainParams::new(p, 0)
    }

    #[test]
    fn hardcore_one_third_proposes_one_a_quarter_of_the_time() {
        let m = make_hardcore(Arc::new(Graph::empty(1)), Fugacity::from_ratio(1, 3).unwrap());
        let draws = 100_000u64;
        let ones = (0..draws)
            .filter(|&c| propose_vertex(&m, 1.0, 11, 0, 0, c) == Some(1))
            .count() as f64;
        let sd = (draws as f64 * 0.25 * 0.75).sqrt();
        assert!((ones - 25_000.0).abs() <= 3.0 * sd, "{ones}");
    }

    #[test]
    fn full_activity_never_leaves_blanks() {
        let m = make_potts(Arc::new(Graph::cycle(5).unwrap()), 4, Temperature::Finite(1.0)).unwrap();
        for t in 0..50 {
            assert!(propose(&m, &params(1.0), 3, t, 0).iter().all(|s| s.is_some()));
        }
    }

    #[test]
    fn acceptance_probabilities() {
        let hc = make_hardcore(Arc::new(Graph::path(2)), Fugacity::one());
        assert_eq!(edge_accept_probability(&hc, 0, 1, None, None), 1.0);
        // sigma_u = 1 against X_v = 1
        assert_eq!(edge_accept_probability(&hc, 0, 1, Some(1), None), 0.0);

        let potts = make_potts(Arc::new(Graph::path(2)), 2, Temperature::Finite(2f64.ln())).unwrap();
        let p = edge_accept_probability(&potts, 0, 0, Some(0), Some(0));
        assert!((p - 0.125).abs() < 1e-15);
        let half = potts.with_fugacity(Fugacity::from_ratio(1, 2).unwrap());
        assert_eq!(edge_accept_probability_exact(&half, 0, 0, Some(0), Some(0)), r(1, 8));
    }

    #[test]
    fn isolated_active_vertex_adopts() {
        let m = make_potts(Arc::new(Graph::empty(3)), 5, Temperature::Infinite).unwrap();
        let x = Labeling(vec![0, 0, 0]);
        for t in 0..20 {
            let props = propose(&m, &params(1.0), 5, t, 0);
            let y = step(&m, &x, &params(1.0), 5, t, 0);
            assert_eq!(y.0, props.iter().map(|s| s.unwrap()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn single_edge_hardcore_kernel_by_hand() {
        // From (0,0), both active: proposals uniform over {0,1}^2. (1,1)
        // conflicts on the third factor, everything else is accepted.
        let m = make_hardcore(Arc::new(Graph::path(2)), Fugacity::one());
        let k = exact_kernel_full_activity(&m, &Labeling(vec![0, 0]));
        let expect = vec![
            (Labeling(vec![0, 0]), r(1, 2)),
            (Labeling(vec![0, 1]), r(1, 4)),
            (Labeling(vec![1, 0]), r(1, 4)),
        ];
        assert_eq!(k, expect);

        // the sampled chain matches the enumeration
        let trials = 40_000u64;
        let mut counts = [0u64; 4];
        for c in 0..trials {
            let y = step(&m, &Labeling(vec![0, 0]), &params(1.0), 2, 0, c);
            counts[(y[0] * 2 + y[1]) as usize] += 1;
        }
        assert_eq!(counts[3], 0);
        for (i, want) in [(0, 0.5), (1, 0.25), (2, 0.25)] {
            let sd = (trials as f64 * want * (1.0 - want)).sqrt();
            assert!((counts[i] as f64 - trials as f64 * want).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn hardcore_stays_independent() {
        let g = Arc::new(Graph::gnp(12, 0.3, 4).unwrap());
        let m = make_hardcore(g, Fugacity::from_ratio(3, 2).unwrap());
        let mut x = m.initial_state(1, 0);
        let mut scratch = StepScratch::default();
        for t in 0..300 {
            step_into(&m, &mut x, &params(0.7), 1, t, 0, &mut scratch);
            assert!(m.in_support(&x));
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let m = make_potts(Arc::new(Graph::cycle(4).unwrap()), 3, Temperature::Infinite).unwrap();
        assert_eq!(sample(&m, &params(0.5), 9, 2), m.initial_state(9, 2));
    }
}
