//! Division of the (vertex, vertex, chain) cube into subcubes and their
//! assignment to machines.

use std::ops::Range;

use crate::net::MachineId;

/// Subcube index `(x, y, z)`: row block, column block, chain block.
pub type SubcubeIndex = (usize, usize, usize);

/// What one machine computes: the pair `Q[x,y,z]`, `Q[y,x,z]` when `x < y`,
/// or the single diagonal subcube `Q[x,x,z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unit {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Unit {
    pub fn is_pair(&self) -> bool {
        self.x != self.y
    }

    pub fn subcubes(&self) -> Vec<SubcubeIndex> {
        if self.is_pair() {
            vec![(self.x, self.y, self.z), (self.y, self.x, self.z)]
        } else {
            vec![(self.x, self.x, self.z)]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubePartition {
    n: usize,
    k: usize,
    side: usize,
    blocks: usize,
    chain_blocks: usize,
    units: Vec<Unit>,
    owner: Vec<MachineId>,
}

fn ceil_two_thirds(n: usize) -> usize {
    // smallest s with s^3 >= n^2
    let target = (n as u128) * (n as u128);
    let mut s = (n as f64).powf(2.0 / 3.0).floor().max(1.0) as usize;
    while (s as u128).pow(3) < target {
        s += 1;
    }
    while s > 1 && ((s - 1) as u128).pow(3) >= target {
        s -= 1;
    }
    s
}

fn machines_needed(blocks: usize, chain_blocks: usize) -> usize {
    let pairs = chain_blocks * blocks * (blocks - 1) / 2;
    let singles = chain_blocks * blocks;
    pairs + singles.div_ceil(2)
}

/// Partition for `n` vertices and `n` chains.
pub fn partition_cube(n: usize) -> CubePartition {
    partition_cube_for(n, n)
}

/// Partition for `n` vertices and `k <= n` chains.
///
/// The block side is `ceil(n^{2/3})`, with ragged final blocks, raised only
/// when the ceiling leaves more subcubes than `n` machines can hold at two
/// apiece (`n = 11` is the first such size). Units are assigned in
/// lexicographic `(z, x, y)` order, one per machine; if there are more units
/// than machines the pairs get a machine each and diagonal singles are
/// packed two per machine.
pub fn partition_cube_for(n: usize, k: usize) -> CubePartition {
    assert!(n >= 1, "empty clique");
    assert!(k <= n, "more chains than machines");
    let mut side = ceil_two_thirds(n);
    loop {
        let b = n.div_ceil(side);
        if machines_needed(b, b) <= n {
            break;
        }
        side += 1;
    }
    let blocks = n.div_ceil(side);
    let chain_blocks = k.div_ceil(side);
    let mut units = Vec::new();
    for z in 0..chain_blocks {
        for x in 0..blocks {
            for y in x..blocks {
                units.push(Unit { x, y, z });
            }
        }
    }
    let owner = if units.len() <= n {
        (0..units.len()).map(|i| MachineId(i as u32)).collect()
    } else {
        let mut owner = vec![MachineId(0); units.len()];
        let mut next = 0u32;
        for (i, u) in units.iter().enumerate() {
            if u.is_pair() {
                owner[i] = MachineId(next);
                next += 1;
            }
        }
        let singles: Vec<usize> = (0..units.len()).filter(|&i| !units[i].is_pair()).collect();
        for chunk in singles.chunks(2) {
            for &i in chunk {
                owner[i] = MachineId(next);
            }
            next += 1;
        }
        owner
    };
    CubePartition {
        n,
        k,
        side,
        blocks,
        chain_blocks,
        units,
        owner,
    }
}

impl CubePartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chains(&self) -> usize {
        self.k
    }

    /// Block side `s`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of vertex blocks per axis.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Number of non-empty chain blocks.
    pub fn chain_blocks(&self) -> usize {
        self.chain_blocks
    }

    /// Vertices of block `b`.
    pub fn block(&self, b: usize) -> Range<usize> {
        (b * self.side).min(self.n)..((b + 1) * self.side).min(self.n)
    }

    /// Chains of chain block `z`.
    pub fn chain_block(&self, z: usize) -> Range<usize> {
        (z * self.side).min(self.k)..((z + 1) * self.side).min(self.k)
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn unit_owner(&self, unit: usize) -> MachineId {
        self.owner[unit]
    }

    /// Machine computing subcube `(x, y, z)`.
    pub fn owner(&self, (x, y, z): SubcubeIndex) -> MachineId {
        let (a, b) = (x.min(y), x.max(y));
        let i = self
            .units
            .iter()
            .position(|u| u.x == a && u.y == b && u.z == z)
            .expect("subcube outside the partition");
        self.owner[i]
    }

    /// Subcubes assigned to machine `m`.
    pub fn subcubes_of(&self, m: MachineId) -> Vec<SubcubeIndex> {
        self.units
            .iter()
            .zip(&self.owner)
            .filter(|(_, &o)| o == m)
            .flat_map(|(u, _)| u.subcubes())
            .collect()
    }
}
