//! One-step couplings of two chains at Hamming distance one, used to check
//! the contraction bounds empirically.
//!
//! Hardcore uses the identity coupling: both chains read the same keyed
//! streams, so they share activations and proposals. Potts uses the
//! three-coin coupling: shared coins and activations, and proposals that are
//! red/blue-swapped on the type-1 neighborhood of the disagreeing vertex.

use num_rational::BigRational;

use super::coins::{apply_coin_view, draw_coins, CoinTriple};
use super::step::{propose_vertex, step_into, Proposal, StepScratch};
use super::{ChainError, ChainParams};
use crate::model::{GibbsModel, Label, Labeling, ModelFamily};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledOutcome {
    pub x: Labeling,
    pub y: Labeling,
    pub distance: usize,
}

fn disagreement(x: &Labeling, y: &Labeling) -> Result<usize, ChainError> {
    if x.len() != y.len() {
        return Err(ChainError::NotAdjacent(usize::MAX));
    }
    let diff: Vec<usize> = (0..x.len()).filter(|&v| x[v] != y[v]).collect();
    match diff.as_slice() {
        [v] => Ok(*v),
        _ => Err(ChainError::NotAdjacent(diff.len())),
    }
}

/// `coins[e]` for edge `{a, b}` seen from `(a, b)`.
struct EdgeCoins<'a> {
    index: std::collections::HashMap<(u32, u32), usize>,
    coins: &'a [CoinTriple],
}

impl<'a> EdgeCoins<'a> {
    fn new(edges: &[(u32, u32)], coins: &'a [CoinTriple]) -> Self {
        let index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        EdgeCoins { index, coins }
    }

    fn get(&self, a: usize, b: usize) -> CoinTriple {
        let key = (a.min(b) as u32, a.max(b) as u32);
        self.coins[self.index[&key]].directed(a, b)
    }
}

/// Chain-`Y` proposals of the Potts coupling, given chain `X`'s proposals.
///
/// With `red = X_{v'}` and `blue = Y_{v'}`: an active `u` in the type-1
/// neighborhood `N~(v')` proposes its `X` color with red and blue swapped,
/// unless some neighbor `w != v'` of `u` has `(w, u)` type-1 active with
/// `X_w` red/blue, or `w` outside `N~(v')`, `{w, u}` type-2 active and
/// `s_w` red/blue. Everyone else proposes as in `X`.
pub fn potts_coupled_proposals(
    model: &GibbsModel,
    x: &Labeling,
    y: &Labeling,
    props_x: &[Proposal],
    coins: &[CoinTriple],
) -> Result<Vec<Proposal>, ChainError> {
    let vp = disagreement(x, y)?;
    let (red, blue) = (x[vp], y[vp]);
    let g = model.graph();
    let ec = EdgeCoins::new(g.edges(), coins);
    let rb = |c: Label| c == red || c == blue;
    let tilde: Vec<bool> = {
        let mut t = vec![false; x.len()];
        for &w in g.neighbors(vp) {
            t[w as usize] = !ec.get(vp, w as usize).c1;
        }
        t
    };
    let mut props_y = props_x.to_vec();
    for u in 0..x.len() {
        let Some(s) = props_x[u] else { continue };
        if !tilde[u] {
            continue;
        }
        let exception = g.neighbors(u).iter().map(|&w| w as usize).filter(|&w| w != vp).any(|w| {
            let type1 = !ec.get(w, u).c1 && rb(x[w]);
            let type2 = !tilde[w] && !ec.get(w, u).c3 && props_x[w].is_some_and(rb);
            type1 || type2
        });
        if !exception {
            props_y[u] = Some(if s == red {
                blue
            } else if s == blue {
                red
            } else {
                s
            });
        }
    }
    Ok(props_y)
}

/// The deterministic part of the Potts coupling.
pub fn potts_coupled_given(
    model: &GibbsModel,
    x: &Labeling,
    y: &Labeling,
    props_x: &[Proposal],
    coins: &[CoinTriple],
) -> Result<(Labeling, Labeling), ChainError> {
    let props_y = potts_coupled_proposals(model, x, y, props_x, coins)?;
    let edges = model.graph().edges();
    Ok((apply_coin_view(x, edges, props_x, coins), apply_coin_view(y, edges, &props_y, coins)))
}

/// One coupled transition of `x` and `y`, which must differ at exactly one vertex.
pub fn coupled_step(
    model: &GibbsModel,
    x: &Labeling,
    y: &Labeling,
    params: &ChainParams,
    seed: u64,
    t: u64,
    chain: u64,
) -> Result<CoupledOutcome, ChainError> {
    disagreement(x, y)?;
    let (nx, ny) = match model.family() {
        ModelFamily::Hardcore => {
            let mut scratch = StepScratch::default();
            let (mut nx, mut ny) = (x.clone(), y.clone());
            step_into(model, &mut nx, params, seed, t, chain, &mut scratch);
            step_into(model, &mut ny, params, seed, t, chain, &mut scratch);
            (nx, ny)
        }
        ModelFamily::Potts { .. } => {
            let coins = draw_coins(model, seed, t, chain);
            let props: Vec<Proposal> = (0..model.n())
                .map(|v| propose_vertex(model, params.p, seed, v, t, chain))
                .collect();
            potts_coupled_given(model, x, y, &props, &coins)?
        }
        ModelFamily::Pointer => return Err(ChainError::Unsupported("no coupling for the pointer model")),
    };
    let distance = nx.hamming(&ny);
    Ok(CoupledOutcome {
        x: nx,
        y: ny,
        distance,
    })
}

/// Mean and standard error of the one-step coupled distance over `trials`
/// independent transitions.
pub fn empirical_contraction(
    model: &GibbsModel,
    x: &Labeling,
    y: &Labeling,
    params: &ChainParams,
    seed: u64,
    trials: u64,
) -> Result<(f64, f64), ChainError> {
    let mut sum = 0.0;
    let mut sq = 0.0;
    for c in 0..trials {
        let d = coupled_step(model, x, y, params, seed, 0, c)?.distance as f64;
        sum += d;
        sq += d * d;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Exact joint kernel of the Potts coupling with every vertex active: the
/// marginals of `X'` and `Y'`.
#[allow(clippy::type_complexity)]
pub fn exact_coupled_marginals_full_activity(
    model: &GibbsModel,
    x: &Labeling,
    y: &Labeling,
) -> Result<(Vec<(Labeling, BigRational)>, Vec<(Labeling, BigRational)>), ChainError> {
    use num_traits::{One, Zero};
    let q = model.alphabet_size() as u64;
    let n = model.n();
    let m = model.graph().m();
    let lambda = model.fugacity().exact().clone();
    let p_props = BigRational::new(1.into(), num_bigint::BigInt::from(q).pow(n as u32));
    let (mut mx, mut my) = (Vec::new(), Vec::new());
    for code in 0..q.pow(n as u32) {
        let props: Vec<Proposal> = (0..n).map(|v| Some(((code / q.pow(v as u32)) % q) as Label)).collect();
        for cc in 0..8u64.pow(m as u32) {
            let coins: Vec<CoinTriple> = (0..m)
                .map(|e| {
                    let b = (cc >> (3 * e)) & 7;
                    CoinTriple {
                        c1: b & 1 == 1,
                        c2: b & 2 == 2,
                        c3: b & 4 == 4,
                    }
                })
                .collect();
            let p = coins.iter().fold(p_props.clone() * BigRational::one(), |acc, c| acc * c.probability(&lambda));
            if p.is_zero() {
                continue;
            }
            let (nx, ny) = potts_coupled_given(model, x, y, &props, &coins)?;
            super::step::accumulate(&mut mx, nx, p.clone());
            super::step::accumulate(&mut my, ny, p);
        }
    }
    mx.sort_by(|a, b| a.0.cmp(&b.0));
    my.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((mx, my))
}
