//! Chimera graphs, triangle clique minors, and disjoint clique packing.
//!
//! `C(M, N, L)` is an `M × N` grid of unit cells. Each cell is a complete
//! bipartite graph between its `u` shore and its `v` shore, `L` qubits each.
//! Shore-`u` qubit `k` couples to the same qubit in the cell below, and
//! shore-`v` qubit `k` to the same qubit in the cell to the right.
//!
//! The triangle construction embeds `K_{L·s}` in an `s × s` block: chain
//! `(g, k)` runs along column `g` on the `u` shore and along row `g` on the
//! `v` shore, meeting in the diagonal cell, so each chain has `s + 1` qubits.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::QuboModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shore {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChimeraCoord {
    pub row: usize,
    pub col: usize,
    pub shore: Shore,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChimeraGraph {
    m: usize,
    n: usize,
    l: usize,
    adj: Vec<Vec<usize>>,
}

/// Builds `C(m, n, l)`.
pub fn chimera(m: usize, n: usize, l: usize) -> Result<ChimeraGraph> {
    ChimeraGraph::new(m, n, l)
}

impl ChimeraGraph {
    pub fn new(m: usize, n: usize, l: usize) -> Result<Self> {
        if m == 0 || n == 0 || l == 0 {
            return Err(Error::InvalidParams("Chimera dimensions must be at least 1".into()));
        }
        let mut g = ChimeraGraph {
            m,
            n,
            l,
            adj: vec![Vec::new(); 2 * m * n * l],
        };
        let link = |g: &mut ChimeraGraph, a: usize, b: usize| {
            g.adj[a].push(b);
            g.adj[b].push(a);
        };
        for r in 0..m {
            for c in 0..n {
                for i in 0..l {
                    let u = g.index(r, c, Shore::U, i);
                    for j in 0..l {
                        let v = g.index(r, c, Shore::V, j);
                        link(&mut g, u, v);
                    }
                    if r + 1 < m {
                        let below = g.index(r + 1, c, Shore::U, i);
                        link(&mut g, u, below);
                    }
                    if c + 1 < n {
                        let v = g.index(r, c, Shore::V, i);
                        let right = g.index(r, c + 1, Shore::V, i);
                        link(&mut g, v, right);
                    }
                }
            }
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn shore_size(&self) -> usize {
        self.l
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Linear index `((row·N + col)·2 + shore)·L + k`, shore `u` = 0.
    pub fn index(&self, row: usize, col: usize, shore: Shore, k: usize) -> usize {
        let s = match shore {
            Shore::U => 0,
            Shore::V => 1,
        };
        ((row * self.n + col) * 2 + s) * self.l + k
    }

    pub fn coord(&self, node: usize) -> ChimeraCoord {
        let k = node % self.l;
        let rest = node / self.l;
        let shore = if rest.is_multiple_of(2) { Shore::U } else { Shore::V };
        let cell = rest / 2;
        ChimeraCoord {
            row: cell / self.n,
            col: cell % self.n,
            shore,
            k,
        }
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// One `a b` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (a, b) in self.edges() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

/// Chains of physical qubits, keyed by logical qubit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pub chains: BTreeMap<usize, Vec<usize>>,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn max_chain_length(&self) -> usize {
        self.chains.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn physical_qubits(&self) -> usize {
        self.chains.values().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Checks that chains are disjoint, that each chain is connected in `g`,
    /// and that every required logical edge has a physical edge between
    /// the two chains.
    pub fn validate(&self, g: &ChimeraGraph, required: &[(usize, usize)]) -> Result<()> {
        let mut owner: Vec<Option<usize>> = vec![None; g.node_count()];
        for (&logical, chain) in &self.chains {
            if chain.is_empty() {
                return Err(Error::InvalidEmbedding(format!("chain {logical} is empty")));
            }
            for &q in chain {
                let slot = owner.get_mut(q).ok_or_else(|| {
                    Error::InvalidEmbedding(format!("node {q} is not in the graph"))
                })?;
                if let Some(other) = slot {
                    return Err(Error::InvalidEmbedding(format!(
                        "node {q} is shared by chains {other} and {logical}"
                    )));
                }
                *slot = Some(logical);
            }
        }
        for (&logical, chain) in &self.chains {
            let members: HashSet<usize> = chain.iter().copied().collect();
            let mut seen = HashSet::from([chain[0]]);
            let mut queue = VecDeque::from([chain[0]]);
            while let Some(q) = queue.pop_front() {
                for &nb in g.neighbours(q) {
                    if members.contains(&nb) && seen.insert(nb) {
                        queue.push_back(nb);
                    }
                }
            }
            if seen.len() != members.len() {
                return Err(Error::InvalidEmbedding(format!("chain {logical} is not connected")));
            }
        }
        let mut covered: HashSet<(usize, usize)> = HashSet::new();
        for (a, b) in g.edges() {
            if let (Some(x), Some(y)) = (owner[a], owner[b]) {
                if x != y {
                    covered.insert((x.min(y), x.max(y)));
                }
            }
        }
        for &(a, b) in required {
            if !self.chains.contains_key(&a) || !self.chains.contains_key(&b) {
                return Err(Error::InvalidEmbedding(format!("edge ({a}, {b}) has no chain")));
            }
            if a != b && !covered.contains(&(a.min(b), a.max(b))) {
                return Err(Error::InvalidEmbedding(format!(
                    "no physical edge between chains {a} and {b}"
                )));
            }
        }
        Ok(())
    }

    /// Validates against the complete graph on the embedded logical qubits.
    pub fn validate_clique(&self, g: &ChimeraGraph) -> Result<()> {
        let keys: Vec<usize> = self.chains.keys().copied().collect();
        let required: Vec<(usize, usize)> = keys
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| keys[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        self.validate(g, &required)
    }
}

/// The four ways of laying a triangle in a square block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    /// Chains meet on the main diagonal; the triangle lies above it.
    UpperRight,
    /// Chains meet on the main diagonal; the triangle lies below it.
    LowerLeft,
    /// Chains meet on the anti-diagonal; the triangle lies above it.
    UpperLeft,
    /// Chains meet on the anti-diagonal; the triangle lies below it.
    LowerRight,
}

pub const ORIENTATIONS: [Orientation; 4] = [
    Orientation::UpperRight,
    Orientation::LowerLeft,
    Orientation::UpperLeft,
    Orientation::LowerRight,
];

/// Side of the square block the triangle embedding of `K_k` needs.
pub fn triangle_side(k: usize, l: usize) -> usize {
    k.div_ceil(l).max(1)
}

/// Chains of the triangle embedding of `K_k` in the `side × side` block at
/// `(row0, col0)`. Chain `i` belongs to group `i / L`, shore index `i % L`.
/// `K_1` is a single qubit.
pub fn triangle_chains(
    g: &ChimeraGraph,
    k: usize,
    row0: usize,
    col0: usize,
    side: usize,
    orientation: Orientation,
) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![g.index(row0, col0, Shore::U, 0)]];
    }
    (0..k)
        .map(|i| {
            let (grp, idx) = (i / g.l, i % g.l);
            let (rows, col, row, cols) = match orientation {
                Orientation::UpperRight => (0..grp + 1, grp, grp, grp..side),
                Orientation::LowerLeft => (grp..side, grp, grp, 0..grp + 1),
                Orientation::UpperLeft => (0..grp + 1, side - 1 - grp, grp, 0..side - grp),
                Orientation::LowerRight => (grp..side, side - 1 - grp, grp, side - 1 - grp..side),
            };
            let mut chain: Vec<usize> = rows
                .map(|r| g.index(row0 + r, col0 + col, Shore::U, idx))
                .chain(cols.map(|c| g.index(row0 + row, col0 + c, Shore::V, idx)))
                .collect();
            chain.sort_unstable();
            chain
        })
        .collect()
}

/// Triangle embedding of `K_k` in the top-left block of side `⌈k/L⌉`.
pub fn clique_embedding(g: &ChimeraGraph, k: usize) -> Result<Embedding> {
    let capacity = g.l * g.m.min(g.n);
    if k > capacity {
        return Err(Error::Capacity {
            requested: k,
            capacity,
        });
    }
    if k == 0 {
        return Ok(Embedding::default());
    }
    let side = triangle_side(k, g.l);
    let chains = triangle_chains(g, k, 0, 0, side, Orientation::UpperRight);
    Ok(Embedding {
        chains: chains.into_iter().enumerate().collect(),
    })
}

/// Placement budget for the backtracking packer.
pub const PACKING_BUDGET: u64 = 2_000_000;

struct Packer<'a> {
    g: &'a ChimeraGraph,
    words: usize,
    order: Vec<usize>,
    sizes: Vec<usize>,
    used: Vec<u64>,
    placed: Vec<Option<(usize, usize, Orientation)>>,
    visits: u64,
    deepest: usize,
}

impl Packer<'_> {
    fn mask(&self, chains: &[Vec<usize>]) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for &q in chains.iter().flatten() {
            m[q / 64] |= 1 << (q % 64);
        }
        m
    }

    fn fits(&self, m: &[u64]) -> bool {
        self.used.iter().zip(m).all(|(a, b)| a & b == 0)
    }

    fn toggle(&mut self, m: &[u64]) {
        for (a, b) in self.used.iter_mut().zip(m) {
            *a ^= b;
        }
    }

    /// Places `order[depth..]`; equal sizes are placed in increasing
    /// candidate order to skip permutations.
    fn search(&mut self, depth: usize, floor: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        self.deepest = self.deepest.max(depth);
        let clique = self.order[depth];
        let k = self.sizes[clique];
        let side = triangle_side(k, self.g.l);
        if side > self.g.m || side > self.g.n {
            return false;
        }
        let mut candidate = 0;
        for r0 in 0..=self.g.m - side {
            for c0 in 0..=self.g.n - side {
                for o in ORIENTATIONS {
                    candidate += 1;
                    if candidate <= floor {
                        continue;
                    }
                    if self.visits >= PACKING_BUDGET {
                        return false;
                    }
                    self.visits += 1;
                    let chains = triangle_chains(self.g, k, r0, c0, side, o);
                    let m = self.mask(&chains);
                    if !self.fits(&m) {
                        continue;
                    }
                    self.toggle(&m);
                    self.placed[clique] = Some((r0, c0, o));
                    let next_floor = match self.order.get(depth + 1) {
                        Some(&next) if self.sizes[next] == k => candidate,
                        _ => 0,
                    };
                    if self.search(depth + 1, next_floor) {
                        return true;
                    }
                    self.toggle(&m);
                    self.placed[clique] = None;
                }
            }
        }
        false
    }
}

/// Vertex-disjoint triangle embeddings of `K_{sizes[0]}`, `K_{sizes[1]}`, ...
///
/// Logical qubits are numbered consecutively across the cliques in input
/// order. Each clique occupies a square block in one of four orientations;
/// blocks may overlap as long as the qubits used do not. Placement is a
/// depth-first search, largest clique first, with a fixed budget. A failure
/// means this construction found no packing, not that none exists.
pub fn disjoint_clique_embedding(g: &ChimeraGraph, sizes: &[usize]) -> Result<Embedding> {
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::InvalidParams(format!("clique #{i} has size 0")));
    }
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let words = g.node_count().div_ceil(64);
    let mut packer = Packer {
        g,
        words,
        order,
        sizes: sizes.to_vec(),
        used: vec![0; words],
        placed: vec![None; sizes.len()],
        visits: 0,
        deepest: 0,
    };
    if !packer.search(0, 0) {
        let index = packer.order[packer.deepest];
        return Err(Error::Packing {
            index,
            size: sizes[index],
        });
    }
    let mut chains = BTreeMap::new();
    let mut next = 0;
    for (i, &k) in sizes.iter().enumerate() {
        let (r0, c0, o) = packer.placed[i].expect("every clique was placed");
        for chain in triangle_chains(g, k, r0, c0, triangle_side(k, g.l), o) {
            chains.insert(next, chain);
            next += 1;
        }
    }
    Ok(Embedding { chains })
}

/// Embeds a model's coupling graph. A model that is one connected component
/// gets a single clique; otherwise every component gets its own clique in a
/// disjoint packing. Logical qubits are the model's qubit indices.
pub fn embed_qubo(model: &QuboModel, g: &ChimeraGraph) -> Result<Embedding> {
    let blocks = model.block_decomposition();
    let emb = if blocks.len() == 1 {
        let chains = clique_embedding(g, blocks[0].len())?.chains;
        Embedding {
            chains: blocks[0].iter().copied().zip(chains.into_values()).collect(),
        }
    } else {
        let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
        let packed = disjoint_clique_embedding(g, &sizes)?.chains;
        Embedding {
            chains: blocks.iter().flatten().copied().zip(packed.into_values()).collect(),
        }
    };
    emb.validate(g, &model.edges())?;
    Ok(emb)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityModel {
    /// One fully connected model: the largest triangle clique.
    Vanilla,
    /// Four disjoint `K_33` per `16 × 16` tile.
    Sylvester,
}

/// Qubits of a QUBO model that fit on a square Chimera graph. Vanilla is
/// `L·side`; Sylvester is `132·t²` for `side = 16t` with `L = 4`.
pub fn capacity(g: &ChimeraGraph, model: CapacityModel) -> Result<usize> {
    if g.m != g.n {
        return Err(Error::InvalidParams("capacity needs a square Chimera graph".into()));
    }
    match model {
        CapacityModel::Vanilla => Ok(g.l * g.m),
        CapacityModel::Sylvester => {
            if g.l != 4 || !g.m.is_multiple_of(16) {
                return Err(Error::InvalidParams(
                    "Sylvester capacity needs shore size 4 and a side that is a multiple of 16".into(),
                ));
            }
            let t = g.m / 16;
            Ok(132 * t * t)
        }
    }
}

/// Sorted set of nodes used by an embedding.
pub fn used_nodes(e: &Embedding) -> BTreeSet<usize> {
    e.chains.values().flatten().copied().collect()
}
