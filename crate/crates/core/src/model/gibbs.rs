use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Fugacity, ModelError, Temperature};
use crate::graph::Graph;
use crate::net::{rng_stream, Purpose, StreamKey};

/// A label index into the model's alphabet.
pub type Label = u32;

/// One label per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Labeling(pub Vec<Label>);

impl Labeling {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming(&self, other: &Labeling) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl std::ops::Index<usize> for Labeling {
    type Output = Label;
    fn index(&self, v: usize) -> &Label {
        &self.0[v]
    }
}

impl std::ops::IndexMut<usize> for Labeling {
    fn index_mut(&mut self, v: usize) -> &mut Label {
        &mut self.0[v]
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelFamily {
    /// Colorings with `q` colors, energy = monochromatic edges.
    Potts { q: u32 },
    /// Independent sets, energy = occupied vertices.
    Hardcore,
    /// Labels in `[3n]` or a neighboring vertex; energy = edges whose
    /// endpoints point at the same vertex.
    Pointer,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Potts { .. } => "potts",
            ModelFamily::Hardcore => "hardcore",
            ModelFamily::Pointer => "pointer",
        }
    }
}

/// A local Gibbs distribution given as a pairwise Markov random field.
///
/// For all three families the weights have the form
/// `b_v(x) = [x admissible at v] * lambda^{H_v(x)}` and
/// `A_e(x, y) = [(x, y) allowed] * lambda^{H_e(x, y)}`, so the PMRF product
/// of a labeling is `lambda^{H(sigma)}` on the support and zero elsewhere.
/// Edge weights are evaluated in the `(min id, max id)` orientation; all
/// three families happen to be symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    graph: Arc<Graph>,
    family: ModelFamily,
    lambda: Fugacity,
}

impl GibbsModel {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn fugacity(&self) -> &Fugacity {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Same model at another fugacity.
    pub fn with_fugacity(&self, lambda: Fugacity) -> GibbsModel {
        GibbsModel {
            graph: Arc::clone(&self.graph),
            family: self.family,
            lambda,
        }
    }

    /// Number of free (never interacting) labels of the pointer model, `3n`.
    fn free_labels(&self) -> u32 {
        3 * self.graph.n() as u32
    }

    pub fn alphabet_size(&self) -> u32 {
        match self.family {
            ModelFamily::Potts { q } => q,
            ModelFamily::Hardcore => 2,
            ModelFamily::Pointer => 4 * self.graph.n() as u32,
        }
    }

    /// For the pointer model: the vertex a label points at, if any.
    pub fn pointee(&self, x: Label) -> Option<usize> {
        match self.family {
            ModelFamily::Pointer if x >= self.free_labels() => Some((x - self.free_labels()) as usize),
            _ => None,
        }
    }

    /// Pointer-model label that points at vertex `w`.
    pub fn pointer_label(&self, w: usize) -> Label {
        self.free_labels() + w as Label
    }

    #[inline]
    pub fn is_admissible(&self, v: usize, x: Label) -> bool {
        match self.family {
            ModelFamily::Potts { q } => x < q,
            ModelFamily::Hardcore => x < 2,
            ModelFamily::Pointer => {
                x < self.free_labels()
                    || (x < self.alphabet_size() && self.graph.has_edge(v, (x - self.free_labels()) as usize))
            }
        }
    }

    /// Admissible labels of `v`, ascending.
    pub fn admissible_labels(&self, v: usize) -> Vec<Label> {
        match self.family {
            ModelFamily::Pointer => (0..self.free_labels())
                .chain(self.graph.neighbors(v).iter().map(|&w| self.pointer_label(w as usize)))
                .collect(),
            _ => (0..self.alphabet_size()).collect(),
        }
    }

    /// Hard edge constraint: whether `(x, y)` may appear on an edge at all.
    #[inline]
    pub fn edge_allowed(&self, x: Label, y: Label) -> bool {
        !(self.family == ModelFamily::Hardcore && x == 1 && y == 1)
    }

    /// `H_v(x)`.
    #[inline]
    pub fn vertex_energy(&self, x: Label) -> u32 {
        match self.family {
            ModelFamily::Hardcore => x,
            _ => 0,
        }
    }

    /// `H_e(x, y)`.
    #[inline]
    pub fn edge_energy(&self, x: Label, y: Label) -> u32 {
        match self.family {
            ModelFamily::Potts { .. } => (x == y) as u32,
            ModelFamily::Hardcore => 0,
            ModelFamily::Pointer => (x == y && x >= self.free_labels()) as u32,
        }
    }

    /// Bound `h` on every subfunction.
    pub fn h(&self) -> u32 {
        1
    }

    /// `sum_v max H_v + sum_e max H_e`, an upper bound on `H` over the support.
    pub fn hamiltonian_bound(&self) -> u64 {
        match self.family {
            ModelFamily::Hardcore => self.graph.n() as u64,
            ModelFamily::Potts { .. } | ModelFamily::Pointer => self.graph.m() as u64,
        }
    }

    /// `b_v(x)`.
    #[inline]
    pub fn vertex_weight(&self, v: usize, x: Label) -> f64 {
        if !self.is_admissible(v, x) {
            0.0
        } else if self.vertex_energy(x) == 1 {
            self.lambda.value()
        } else {
            1.0
        }
    }

    pub fn max_vertex_weight(&self) -> f64 {
        match self.family {
            ModelFamily::Hardcore => self.lambda.value().max(1.0),
            _ => 1.0,
        }
    }

    /// `A_e(x, y)`.
    #[inline]
    pub fn edge_weight(&self, x: Label, y: Label) -> f64 {
        if !self.edge_allowed(x, y) {
            0.0
        } else if self.edge_energy(x, y) == 1 {
            self.lambda.value()
        } else {
            1.0
        }
    }

    pub fn max_edge_weight(&self) -> f64 {
        match self.family {
            ModelFamily::Hardcore => 1.0,
            _ => self.lambda.value().max(1.0),
        }
    }

    pub fn vertex_weight_exact(&self, v: usize, x: Label) -> BigRational {
        if !self.is_admissible(v, x) {
            BigRational::zero()
        } else if self.vertex_energy(x) == 1 {
            self.lambda.exact().clone()
        } else {
            BigRational::one()
        }
    }

    pub fn edge_weight_exact(&self, x: Label, y: Label) -> BigRational {
        if !self.edge_allowed(x, y) {
            BigRational::zero()
        } else if self.edge_energy(x, y) == 1 {
            self.lambda.exact().clone()
        } else {
            BigRational::one()
        }
    }

    pub fn max_edge_weight_exact(&self) -> BigRational {
        let one = BigRational::one();
        match self.family {
            ModelFamily::Hardcore => one,
            _ => {
                if self.lambda.exact() > &one {
                    self.lambda.exact().clone()
                } else {
                    one
                }
            }
        }
    }

    /// First vertex or edge at which `sigma` leaves the support, if any.
    pub fn support_violation(&self, sigma: &Labeling) -> Option<ModelError> {
        if sigma.len() != self.n() {
            return Some(ModelError::WrongLength {
                expected: self.n(),
                got: sigma.len(),
            });
        }
        for (v, &x) in sigma.0.iter().enumerate() {
            if !self.is_admissible(v, x) {
                return Some(ModelError::InadmissibleLabel { vertex: v, label: x });
            }
        }
        for &(u, v) in self.graph.edges() {
            if !self.edge_allowed(sigma[u as usize], sigma[v as usize]) {
                return Some(ModelError::ForbiddenEdge(u as usize, v as usize));
            }
        }
        None
    }

    pub fn in_support(&self, sigma: &Labeling) -> bool {
        self.support_violation(sigma).is_none()
    }

    /// `H(sigma) = sum_v H_v + sum_e H_e`, for `sigma` in the support.
    pub fn hamiltonian(&self, sigma: &Labeling) -> Result<u64, ModelError> {
        if let Some(e) = self.support_violation(sigma) {
            return Err(e);
        }
        Ok(self.hamiltonian_unchecked(sigma))
    }

    #[inline]
    pub fn hamiltonian_unchecked(&self, sigma: &Labeling) -> u64 {
        let vertex: u64 = sigma.0.iter().map(|&x| self.vertex_energy(x) as u64).sum();
        let edge: u64 = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| self.edge_energy(sigma[u as usize], sigma[v as usize]) as u64)
            .sum();
        vertex + edge
    }

    /// A member of the support to start chain `chain` from: Potts uniform
    /// colors, hardcore the empty set, pointer uniform labels from `[3n]`.
    pub fn initial_state(&self, seed: u64, chain: u64) -> Labeling {
        let n = self.n();
        let draw = |v: usize, bound: u32| -> Label {
            let mut rng = rng_stream(seed, StreamKey::vertex(v as u32, 0, Purpose::Init, chain));
            rng.gen_range(0..bound)
        };
        match self.family {
            ModelFamily::Hardcore => Labeling(vec![0; n]),
            ModelFamily::Potts { q } => Labeling((0..n).map(|v| draw(v, q)).collect()),
            ModelFamily::Pointer => Labeling((0..n).map(|v| draw(v, self.free_labels())).collect()),
        }
    }

    /// Known partition function at the family's anchor temperature:
    /// Potts `Z(0) = q^n`, pointer `Z(0) = prod_v (3n + deg v)`, hardcore
    /// `Z(lambda = 0) = 1`.
    pub fn anchor_partition(&self) -> num_bigint::BigUint {
        let n = self.n();
        match self.family {
            ModelFamily::Potts { q } => num_bigint::BigUint::from(q).pow(n as u32),
            ModelFamily::Hardcore => num_bigint::BigUint::one(),
            ModelFamily::Pointer => (0..n)
                .map(|v| num_bigint::BigUint::from(3 * n + self.graph.degree(v)))
                .product(),
        }
    }
}

impl fmt::Display for GibbsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            ModelFamily::Potts { q } => write!(f, "potts(q={q}, lambda={})", self.lambda),
            ModelFamily::Hardcore => write!(f, "hardcore(lambda={})", self.lambda),
            ModelFamily::Pointer => write!(f, "pointer(lambda={})", self.lambda),
        }
    }
}

/// Potts model with `q` colors at inverse temperature `beta`.
pub fn make_potts(graph: Arc<Graph>, q: u32, beta: Temperature) -> Result<GibbsModel, ModelError> {
    if q == 0 {
        return Err(ModelError::ZeroColors);
    }
    Ok(GibbsModel {
        graph,
        family: ModelFamily::Potts { q },
        lambda: beta.fugacity()?,
    })
}

/// Hardcore model with fugacity `lambda`.
pub fn make_hardcore(graph: Arc<Graph>, lambda: Fugacity) -> GibbsModel {
    GibbsModel {
        graph,
        family: ModelFamily::Hardcore,
        lambda,
    }
}

/// The triangle-detection pointer model at inverse temperature `beta`.
pub fn make_pointer_model(graph: Arc<Graph>, beta: Temperature) -> Result<GibbsModel, ModelError> {
    Ok(GibbsModel {
        graph,
        family: ModelFamily::Pointer,
        lambda: beta.fugacity()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: Graph) -> Arc<Graph> {
        Arc::new(g)
    }

    #[test]
    fn potts_rejects_zero_colors() {
        assert!(matches!(
            make_potts(arc(Graph::path(2)), 0, Temperature::Infinite),
            Err(ModelError::ZeroColors)
        ));
    }

    #[test]
    fn hamiltonians_of_small_cases() {
        let k3 = arc(Graph::complete(3));
        let potts = make_potts(k3.clone(), 3, Temperature::Infinite).unwrap();
        assert_eq!(potts.hamiltonian(&Labeling(vec![1, 1, 1])).unwrap(), 3);
        assert_eq!(potts.hamiltonian(&Labeling(vec![0, 1, 2])).unwrap(), 0);

        let edge = arc(Graph::path(2));
        let hc = make_hardcore(edge.clone(), Fugacity::one());
        assert_eq!(hc.hamiltonian(&Labeling(vec![1, 0])).unwrap(), 1);
        assert!(matches!(
            hc.hamiltonian(&Labeling(vec![1, 1])),
            Err(ModelError::ForbiddenEdge(0, 1))
        ));

        // both endpoints of {0,1} point at their common neighbor 2
        let ptr = make_pointer_model(k3, Temperature::Finite(0.0)).unwrap();
        let w = ptr.pointer_label(2);
        assert_eq!(ptr.hamiltonian(&Labeling(vec![w, w, 0])).unwrap(), 1);
        assert!(ptr.hamiltonian(&Labeling(vec![ptr.pointer_label(0), 0, 0])).is_err());
    }

    #[test]
    fn single_edge_potts_energies_at_beta_zero() {
        let m = make_potts(arc(Graph::path(2)), 2, Temperature::Finite(0.0)).unwrap();
        let hs: Vec<u64> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|l| m.hamiltonian(&Labeling(l.to_vec())).unwrap())
            .collect();
        assert_eq!(hs, vec![1, 0, 0, 1]);
    }

    #[test]
    fn weights_are_positive_somewhere() {
        let g = arc(Graph::complete(4));
        let models = [
            make_potts(g.clone(), 3, Temperature::Infinite).unwrap(),
            make_hardcore(g.clone(), Fugacity::zero()),
            make_pointer_model(g.clone(), Temperature::Infinite).unwrap(),
        ];
        for m in &models {
            let a = m.alphabet_size();
            for v in 0..g.n() {
                assert!((0..a).any(|x| m.vertex_weight(v, x) > 0.0), "{m}");
            }
            let max_a = (0..a)
                .flat_map(|x| (0..a).map(move |y| (x, y)))
                .map(|(x, y)| m.edge_weight(x, y))
                .fold(0.0, f64::max);
            assert!(max_a > 0.0);
            assert_eq!(max_a, m.max_edge_weight(), "{m}");
        }
    }

    #[test]
    fn initial_states_are_in_support() {
        let g = arc(Graph::cycle(5).unwrap());
        let hc = make_hardcore(g.clone(), Fugacity::one());
        assert_eq!(hc.initial_state(1, 0), Labeling(vec![0; 5]));
        let ptr = make_pointer_model(g.clone(), Temperature::Infinite).unwrap();
        let s = ptr.initial_state(1, 0);
        assert!(s.0.iter().all(|&x| x < 15));
        assert_eq!(ptr.hamiltonian(&s).unwrap(), 0);
        let potts = make_potts(g, 4, Temperature::Infinite).unwrap();
        assert!(potts.in_support(&potts.initial_state(9, 3)));
    }

    #[test]
    fn anchors() {
        let k3 = arc(Graph::complete(3));
        let ptr = make_pointer_model(k3.clone(), Temperature::Infinite).unwrap();
        assert_eq!(ptr.anchor_partition(), 1331u32.into());
        let potts = make_potts(k3, 7, Temperature::Infinite).unwrap();
        assert_eq!(potts.anchor_partition(), 343u32.into());
    }
}
