//! One transition of `k <= n` chains at once: proposals are local, edge
//! decisions are made subcube by subcube on the machines owning them, and
//! each vertex learns whether any incident edge rejected from the flattened
//! slabs sent back to it.

use std::io::{self, Write};
use std::ops::Range;

use super::partition::{partition_cube_for, CubePartition, SubcubeIndex, Unit};
use super::CubeError;
use crate::chain::{edge_accept, propose_vertex, Proposal};
use crate::model::{GibbsModel, Label, Labeling};
use crate::net::{charge_phase, phase_load, MessageLedger, PhaseLoad, RoutingRequest};

/// Labels of `k` chains over `n` vertices, stored chain by chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchState {
    n: usize,
    k: usize,
    labels: Vec<Label>,
}

impl BatchState {
    pub fn from_columns(columns: &[Labeling]) -> Self {
        let n = columns.first().map_or(0, |c| c.len());
        assert!(columns.iter().all(|c| c.len() == n), "ragged batch");
        BatchState {
            n,
            k: columns.len(),
            labels: columns.iter().flat_map(|c| c.0.iter().copied()).collect(),
        }
    }

    /// Chain `i` starts at `model.initial_state(seed, i)`.
    pub fn initial(model: &GibbsModel, seed: u64, k: usize) -> Self {
        let cols: Vec<Labeling> = (0..k as u64).map(|i| model.initial_state(seed, i)).collect();
        let mut s = Self::from_columns(&cols);
        s.n = model.n();
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, v: usize, chain: usize) -> Label {
        self.labels[chain * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, v: usize, chain: usize, x: Label) {
        self.labels[chain * self.n + v] = x;
    }

    pub fn column_slice(&self, chain: usize) -> &[Label] {
        &self.labels[chain * self.n..(chain + 1) * self.n]
    }

    pub fn column(&self, chain: usize) -> Labeling {
        Labeling(self.column_slice(chain).to_vec())
    }

    pub fn columns(&self) -> Vec<Labeling> {
        (0..self.k).map(|i| self.column(i)).collect()
    }

    /// Text dump: a header line `n k`, then one row per vertex with the
    /// labels of all chains.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.n, self.k)?;
        for v in 0..self.n {
            let row: Vec<String> = (0..self.k).map(|i| self.get(v, i).to_string()).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let mut head = lines.next()?.split_whitespace().map(|t| t.parse::<usize>().ok());
        let (n, k) = (head.next()??, head.next()??);
        let mut s = BatchState {
            n,
            k,
            labels: vec![0; n * k],
        };
        for v in 0..n {
            let row: Vec<Label> = lines
                .next()?
                .split_whitespace()
                .map(|t| t.parse().ok())
                .collect::<Option<_>>()?;
            if row.len() != k {
                return None;
            }
            for (i, x) in row.into_iter().enumerate() {
                s.set(v, i, x);
            }
        }
        Some(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlattenMode {
    /// Union along the column axis (rejection indicators).
    Or,
    /// Sum along the column axis (edge Hamiltonians).
    Sum,
}

/// Cell payloads of a subcube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cells {
    /// `true` iff the pair is an edge that was rejected in that chain.
    Acceptance(Vec<bool>),
    /// The edge Hamiltonian of the pair in that chain, 0 for non-edges.
    Hamiltonian(Vec<u32>),
}

/// A computed subcube `Q[x,y,z]`: rows `u` in block `x`, columns `w` in
/// block `y`, chains `i` in block `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcube {
    pub index: SubcubeIndex,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    pub chains: Range<usize>,
    pub cells: Cells,
}

impl Subcube {
    #[inline]
    pub fn offset(&self, u: usize, w: usize, i: usize) -> usize {
        ((u - self.rows.start) * self.cols.len() + (w - self.cols.start)) * self.chains.len() + (i - self.chains.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlabValues {
    Or(Vec<bool>),
    Sum(Vec<u64>),
}

/// `R^y[x,z]`: one value per (row vertex, chain) of a flattened subcube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenedSlab {
    pub y: usize,
    pub rows: Range<usize>,
    pub chains: Range<usize>,
    pub values: SlabValues,
}

impl FlattenedSlab {
    #[inline]
    pub fn offset(&self, u: usize, i: usize) -> usize {
        (u - self.rows.start) * self.chains.len() + (i - self.chains.start)
    }
}

/// Collapses a subcube along its column axis.
pub fn flatten(cube: &Subcube, mode: FlattenMode) -> Result<FlattenedSlab, CubeError> {
    let (r, c, z) = (cube.rows.len(), cube.cols.len(), cube.chains.len());
    let values = match (&cube.cells, mode) {
        (Cells::Acceptance(cells), FlattenMode::Or) => {
            let mut out = vec![false; r * z];
            for a in 0..r {
                for b in 0..c {
                    let base = (a * c + b) * z;
                    for i in 0..z {
                        out[a * z + i] |= cells[base + i];
                    }
                }
            }
            SlabValues::Or(out)
        }
        (Cells::Hamiltonian(cells), FlattenMode::Sum) => {
            let mut out = vec![0u64; r * z];
            for a in 0..r {
                for b in 0..c {
                    let base = (a * c + b) * z;
                    for i in 0..z {
                        out[a * z + i] += cells[base + i] as u64;
                    }
                }
            }
            SlabValues::Sum(out)
        }
        _ => return Err(CubeError::ModeMismatch),
    };
    Ok(FlattenedSlab {
        y: cube.index.1,
        rows: cube.rows.clone(),
        chains: cube.chains.clone(),
        values,
    })
}

/// Which payload a pass over the cube computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pass {
    Accept,
    Hamiltonian,
}

/// Per-transition communication of the batch simulation. It depends only on
/// the partition, so it is computed once.
#[derive(Debug, Clone)]
struct PhaseCosts {
    distribute: PhaseLoad,
    collect: PhaseLoad,
}

fn unit_requests(part: &CubePartition, unit: &Unit, machine: u32, pass: Pass) -> (Vec<RoutingRequest>, Vec<RoutingRequest>) {
    let bx = part.block(unit.x);
    let by = part.block(unit.y);
    let bz = part.chain_block(unit.z);
    let chain_words = bz.len() as u64;
    // sigma and X slabs, or X only
    let state_words = match pass {
        Pass::Accept => 2 * chain_words,
        Pass::Hamiltonian => chain_words,
    };
    let mut dist = Vec::new();
    let mut coll = Vec::new();
    for u in bx.clone() {
        // row u of A[x,y], then its state slab
        dist.push(RoutingRequest::new(u as u32, machine, by.len() as u64 + state_words));
        coll.push(RoutingRequest::new(machine, u as u32, chain_words));
    }
    if unit.is_pair() {
        for w in by {
            dist.push(RoutingRequest::new(w as u32, machine, state_words));
            coll.push(RoutingRequest::new(machine, w as u32, chain_words));
        }
    }
    dist.retain(|r| r.words > 0);
    coll.retain(|r| r.words > 0);
    (dist, coll)
}

fn phase_costs(part: &CubePartition, pass: Pass) -> PhaseCosts {
    let mut dist = Vec::new();
    let mut coll = Vec::new();
    for (i, unit) in part.units().iter().enumerate() {
        let m = part.unit_owner(i).0;
        let (d, c) = unit_requests(part, unit, m, pass);
        dist.extend(d);
        coll.extend(c);
    }
    PhaseCosts {
        distribute: phase_load(part.n(), &dist),
        collect: phase_load(part.n(), &coll),
    }
}

/// Batch simulator for a fixed model and chain count.
#[derive(Debug, Clone)]
pub struct CubeSimulator {
    model: GibbsModel,
    partition: CubePartition,
    accept_costs: PhaseCosts,
    ham_costs: PhaseCosts,
    gather_chain: PhaseLoad,
    gather_root: PhaseLoad,
    proposals: Vec<Proposal>,
    rejected: Vec<bool>,
}

impl CubeSimulator {
    pub fn new(model: &GibbsModel, k: usize) -> Result<Self, CubeError> {
        let n = model.n();
        if k > n {
            return Err(CubeError::TooManyChains { k, n });
        }
        let partition = partition_cube_for(n, k);
        let accept_costs = phase_costs(&partition, Pass::Accept);
        let ham_costs = phase_costs(&partition, Pass::Hamiltonian);
        let mut to_chain = Vec::new();
        for u in 0..n {
            for i in 0..k {
                to_chain.push(RoutingRequest::new(u as u32, i as u32, 1));
            }
        }
        let to_root: Vec<RoutingRequest> = (0..k).map(|i| RoutingRequest::new(i as u32, 0, 1)).collect();
        Ok(CubeSimulator {
            model: model.clone(),
            gather_chain: phase_load(n, &to_chain),
            gather_root: phase_load(n, &to_root),
            partition,
            accept_costs,
            ham_costs,
            proposals: Vec::new(),
            rejected: Vec::new(),
        })
    }

    pub fn partition(&self) -> &CubePartition {
        &self.partition
    }

    pub fn model(&self) -> &GibbsModel {
        &self.model
    }

    fn check(&self, state: &BatchState, ledger: &MessageLedger) -> Result<(), CubeError> {
        if state.n() != self.model.n() || state.k() != self.partition.chains() {
            return Err(CubeError::ShapeMismatch {
                n: state.n(),
                k: state.k(),
            });
        }
        assert_eq!(ledger.machines(), self.model.n(), "ledger sized for a different clique");
        Ok(())
    }

    /// Fills the subcubes of `unit`. The pair's second subcube is the
    /// transpose of the first, since edge outcomes are symmetric.
    fn compute_unit(&self, unit: &Unit, state: &BatchState, pass: Pass, seed: u64, t: u64) -> Vec<Subcube> {
        let part = &self.partition;
        let (bx, by, bz) = (part.block(unit.x), part.block(unit.y), part.chain_block(unit.z));
        let g = self.model.graph();
        let zl = bz.len();
        let size = bx.len() * by.len() * zl;
        let mut acc = vec![false; if pass == Pass::Accept { size } else { 0 }];
        let mut ham = vec![0u32; if pass == Pass::Hamiltonian { size } else { 0 }];
        let mut mirror_acc = vec![false; if unit.is_pair() { acc.len() } else { 0 }];
        let mut mirror_ham = vec![0u32; if unit.is_pair() { ham.len() } else { 0 }];
        let at = |u: usize, w: usize, rows: &Range<usize>, cols: &Range<usize>| {
            ((u - rows.start) * cols.len() + (w - cols.start)) * zl
        };
        let n = self.model.n();
        for u in bx.clone() {
            for &w in g.neighbors(u) {
                let w = w as usize;
                if !by.contains(&w) || (!unit.is_pair() && w < u) {
                    continue;
                }
                let (a, b) = (u.min(w), u.max(w));
                let base = at(u, w, &bx, &by);
                let mbase = if unit.is_pair() { at(w, u, &by, &bx) } else { at(w, u, &bx, &by) };
                for (j, i) in bz.clone().enumerate() {
                    match pass {
                        Pass::Accept => {
                            let (sa, sb) = (self.proposals[i * n + a], self.proposals[i * n + b]);
                            let rej = (sa.is_some() || sb.is_some())
                                && !edge_accept(
                                    &self.model,
                                    a,
                                    b,
                                    state.get(a, i),
                                    state.get(b, i),
                                    sa,
                                    sb,
                                    seed,
                                    t,
                                    i as u64,
                                );
                            acc[base + j] = rej;
                            if unit.is_pair() {
                                mirror_acc[mbase + j] = rej;
                            } else {
                                acc[mbase + j] = rej;
                            }
                        }
                        Pass::Hamiltonian => {
                            let h = self.model.edge_energy(state.get(a, i), state.get(b, i));
                            ham[base + j] = h;
                            if unit.is_pair() {
                                mirror_ham[mbase + j] = h;
                            } else {
                                ham[mbase + j] = h;
                            }
                        }
                    }
                }
            }
        }
        let cells = |a: Vec<bool>, h: Vec<u32>| match pass {
            Pass::Accept => Cells::Acceptance(a),
            Pass::Hamiltonian => Cells::Hamiltonian(h),
        };
        let mut out = vec![Subcube {
            index: (unit.x, unit.y, unit.z),
            rows: bx.clone(),
            cols: by.clone(),
            chains: bz.clone(),
            cells: cells(acc, ham),
        }];
        if unit.is_pair() {
            out.push(Subcube {
                index: (unit.y, unit.x, unit.z),
                rows: by,
                cols: bx,
                chains: bz,
                cells: cells(mirror_acc, mirror_ham),
            });
        }
        out
    }

    /// Every machine computes and flattens its subcubes; the slabs are
    /// delivered to the row vertices, which combine them.
    fn cube_pass(&self, state: &BatchState, pass: Pass, seed: u64, t: u64) -> Vec<FlattenedSlab> {
        let mode = match pass {
            Pass::Accept => FlattenMode::Or,
            Pass::Hamiltonian => FlattenMode::Sum,
        };
        let mut slabs = Vec::new();
        for unit in self.partition.units() {
            for cube in self.compute_unit(unit, state, pass, seed, t) {
                slabs.push(flatten(&cube, mode).expect("pass and mode agree"));
            }
        }
        slabs
    }

    /// One transition of every chain. Returns the number of label changes.
    pub fn transition(
        &mut self,
        state: &mut BatchState,
        p: f64,
        seed: u64,
        t: u64,
        ledger: &mut MessageLedger,
    ) -> Result<usize, CubeError> {
        self.check(state, ledger)?;
        let (n, k) = (state.n(), state.k());
        // local: every vertex proposes in every chain
        self.proposals.clear();
        for i in 0..k {
            for v in 0..n {
                self.proposals.push(propose_vertex(&self.model, p, seed, v, t, i as u64));
            }
        }
        charge_phase("batch-distribute", &self.accept_costs.distribute, ledger);
        let slabs = self.cube_pass(state, Pass::Accept, seed, t);
        charge_phase("batch-collect", &self.accept_costs.collect, ledger);
        self.rejected.clear();
        self.rejected.resize(n * k, false);
        for slab in &slabs {
            if let SlabValues::Or(vals) = &slab.values {
                for u in slab.rows.clone() {
                    for i in slab.chains.clone() {
                        self.rejected[i * n + u] |= vals[slab.offset(u, i)];
                    }
                }
            }
        }
        let mut changes = 0;
        for i in 0..k {
            for v in 0..n {
                if let Some(s) = self.proposals[i * n + v] {
                    if !self.rejected[i * n + v] && state.get(v, i) != s {
                        state.set(v, i, s);
                        changes += 1;
                    }
                }
            }
        }
        Ok(changes)
    }

    /// `H` of every chain, computed in doubled units at the vertices, summed
    /// at machine `i` for chain `i` and gathered at machine 0.
    pub fn gather_hamiltonians(&self, state: &BatchState, ledger: &mut MessageLedger) -> Result<Vec<u64>, CubeError> {
        self.check(state, ledger)?;
        let (n, k) = (state.n(), state.k());
        charge_phase("hamiltonian-distribute", &self.ham_costs.distribute, ledger);
        let slabs = self.cube_pass(state, Pass::Hamiltonian, 0, 0);
        charge_phase("hamiltonian-collect", &self.ham_costs.collect, ledger);
        // vertex u, chain i: 2 H_u + sum_y R^y
        let mut doubled = vec![0u64; n * k];
        for i in 0..k {
            for u in 0..n {
                doubled[i * n + u] = 2 * self.model.vertex_energy(state.get(u, i)) as u64;
            }
        }
        for slab in &slabs {
            if let SlabValues::Sum(vals) = &slab.values {
                for u in slab.rows.clone() {
                    for i in slab.chains.clone() {
                        doubled[i * n + u] += vals[slab.offset(u, i)];
                    }
                }
            }
        }
        charge_phase("hamiltonian-to-chain", &self.gather_chain, ledger);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let total: u64 = doubled[i * n..(i + 1) * n].iter().sum();
            if !total.is_multiple_of(2) {
                return Err(CubeError::Parity { chain: i, doubled: total });
            }
            out.push(total / 2);
        }
        charge_phase("hamiltonian-to-root", &self.gather_root, ledger);
        Ok(out)
    }
}

/// One transition of all chains in `state`; see [`CubeSimulator`].
pub fn simulate_transition_batch(
    model: &GibbsModel,
    state: &mut BatchState,
    p: f64,
    seed: u64,
    t: u64,
    ledger: &mut MessageLedger,
) -> Result<usize, CubeError> {
    CubeSimulator::new(model, state.k())?.transition(state, p, seed, t, ledger)
}

/// Hamiltonians of all chains in `state`; see [`CubeSimulator::gather_hamiltonians`].
pub fn gather_hamiltonians(
    model: &GibbsModel,
    state: &BatchState,
    ledger: &mut MessageLedger,
) -> Result<Vec<u64>, CubeError> {
    CubeSimulator::new(model, state.k())?.gather_hamiltonians(state, ledger)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chain::{step, ChainParams};
    use crate::graph::Graph;
    use crate::model::{make_hardcore, make_pointer_model, make_potts, Fugacity, Temperature};

    fn models(g: Graph) -> Vec<GibbsModel> {
        let g = Arc::new(g);
        vec![
            make_potts(g.clone(), 4, Temperature::Finite(0.7)).unwrap(),
            make_hardcore(g.clone(), Fugacity::from_ratio(1, 2).unwrap()),
            make_pointer_model(g, Temperature::Finite(1.5)).unwrap(),
        ]
    }

    #[test]
    fn flatten_examples() {
        let cube = |cells: Cells| Subcube {
            index: (0, 1, 0),
            rows: 0..2,
            cols: 2..5,
            chains: 0..2,
            cells,
        };
        let all_false = cube(Cells::Acceptance(vec![false; 12]));
        assert_eq!(flatten(&all_false, FlattenMode::Or).unwrap().values, SlabValues::Or(vec![false; 4]));

        let mut cells = vec![false; 12];
        let c = cube(Cells::Acceptance(vec![]));
        cells[c.offset(1, 3, 0)] = true;
        let slab = flatten(&cube(Cells::Acceptance(cells)), FlattenMode::Or).unwrap();
        assert_eq!(slab.values, SlabValues::Or(vec![false, false, true, false]));

        let mut h = vec![0; 12];
        h[c.offset(0, 2, 1)] = 1;
        h[c.offset(0, 4, 1)] = 2;
        let slab = flatten(&cube(Cells::Hamiltonian(h.clone())), FlattenMode::Sum).unwrap();
        assert_eq!(slab.values, SlabValues::Sum(vec![0, 3, 0, 0]));

        assert_eq!(flatten(&cube(Cells::Hamiltonian(h)), FlattenMode::Or), Err(CubeError::ModeMismatch));
    }

    #[test]
    fn replays_reference_chains() {
        for seed in 0..3 {
            for g in [Graph::complete(5), Graph::gnp(11, 0.4, seed).unwrap(), Graph::cycle(8).unwrap()] {
                for m in models(g) {
                    let n = m.n();
                    let mut sim = CubeSimulator::new(&m, n).unwrap();
                    let mut batch = BatchState::initial(&m, seed, n);
                    let mut cols = batch.columns();
                    let mut ledger = MessageLedger::new(n);
                    for t in 0..10 {
                        sim.transition(&mut batch, 0.6, seed, t, &mut ledger).unwrap();
                        for (i, c) in cols.iter_mut().enumerate() {
                            *c = step(&m, c, &ChainParams::new(0.6, 0), seed, t, i as u64);
                        }
                        assert_eq!(batch.columns(), cols, "{m} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn gathered_hamiltonians_are_exact() {
        for m in models(Graph::gnp(9, 0.5, 3).unwrap()) {
            let mut batch = BatchState::initial(&m, 1, 9);
            let mut ledger = MessageLedger::new(9);
            let mut sim = CubeSimulator::new(&m, 9).unwrap();
            for t in 0..5 {
                sim.transition(&mut batch, 0.9, 1, t, &mut ledger).unwrap();
            }
            let hs = sim.gather_hamiltonians(&batch, &mut ledger).unwrap();
            let direct: Vec<u64> = batch.columns().iter().map(|c| m.hamiltonian(c).unwrap()).collect();
            assert_eq!(hs, direct);
        }
        let k3 = make_potts(Arc::new(Graph::complete(3)), 3, Temperature::Infinite).unwrap();
        let same = BatchState::from_columns(&[Labeling(vec![2, 2, 2])]);
        assert_eq!(gather_hamiltonians(&k3, &same, &mut MessageLedger::new(3)).unwrap(), vec![3]);
    }

    #[test]
    fn inactive_transition_changes_nothing_but_costs() {
        let m = make_hardcore(Arc::new(Graph::cycle(8).unwrap()), Fugacity::one());
        let mut batch = BatchState::initial(&m, 0, 8);
        let before = batch.clone();
        let mut ledger = MessageLedger::with_history(8);
        let changes = simulate_transition_batch(&m, &mut batch, 0.0, 0, 0, &mut ledger).unwrap();
        assert_eq!(changes, 0);
        assert_eq!(batch, before);
        assert_eq!(ledger.history().unwrap().len(), 2);
        assert!(ledger.rounds_total() >= 2);
    }

    #[test]
    fn rejects_too_many_chains() {
        let m = make_hardcore(Arc::new(Graph::path(3)), Fugacity::one());
        assert_eq!(
            CubeSimulator::new(&m, 4).unwrap_err(),
            CubeError::TooManyChains { k: 4, n: 3 }
        );
    }

    #[test]
    fn dump_round_trips() {
        let m = make_potts(Arc::new(Graph::cycle(5).unwrap()), 3, Temperature::Infinite).unwrap();
        let batch = BatchState::initial(&m, 4, 3);
        let mut buf = Vec::new();
        batch.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("5 3\n"));
        assert_eq!(BatchState::parse_text(&text).unwrap(), batch);
    }
}
