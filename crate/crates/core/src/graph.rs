//! Four-coloured graphs: the combinatorial encoding of a 3-manifold triangulation.
//!
//! A [`ColouredGraph`] stores, for each colour `c` in `0..4`, a fixed-point-free
//! involution on the vertex set. Vertex `v` and its `c`-neighbour `adj[v][c]` span
//! a `c`-coloured edge. Parallel edges of distinct colours are simply two colours
//! mapping the same pair.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Number of edge colours of a graph encoding a 3-manifold.
pub const NUM_COLOURS: usize = 4;

/// Errors raised when a graph violates one of the structural invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph order {0} is not even and positive")]
    OddOrder(usize),
    #[error("colour {colour} has a fixed point at vertex {vertex}")]
    FixedPoint { colour: usize, vertex: usize },
    #[error("colour {colour} is not an involution at vertex {vertex}")]
    NotInvolution { colour: usize, vertex: usize },
    #[error("colour {colour} maps vertex {vertex} outside the vertex set")]
    OutOfRange { colour: usize, vertex: usize },
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("graph is not a crystallization (contracted manifold gem)")]
    NotCrystallization,
}

/// A subset of the colour set `{0,1,2,3}`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ColourSet(u8);

impl ColourSet {
    pub const EMPTY: ColourSet = ColourSet(0);
    pub const ALL: ColourSet = ColourSet(0b1111);

    pub fn from_bits(bits: u8) -> Self {
        ColourSet(bits & 0b1111)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn single(c: usize) -> Self {
        ColourSet(1 << c)
    }

    pub fn pair(a: usize, b: usize) -> Self {
        ColourSet((1 << a) | (1 << b))
    }

    /// All colours except `c` (the set written `ĉ`).
    pub fn hat(c: usize) -> Self {
        ColourSet(0b1111 & !(1 << c))
    }

    pub fn contains(self, c: usize) -> bool {
        self.0 & (1 << c) != 0
    }

    pub fn with(self, c: usize) -> Self {
        ColourSet(self.0 | (1 << c))
    }

    pub fn complement(self) -> Self {
        ColourSet(0b1111 & !self.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..NUM_COLOURS).filter(move |&c| self.contains(c))
    }
}

impl FromIterator<usize> for ColourSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ColourSet::EMPTY, |s, c| s.with(c))
    }
}

impl fmt::Debug for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Connected components of the subgraph spanned by a colour subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePartition {
    pub colour_set: ColourSet,
    /// Components, each sorted, ordered by their minimum vertex.
    pub components: Vec<Vec<u32>>,
}

/// A 4-regular, properly edge-coloured multigraph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColouredGraph {
    adj: Vec<[u32; NUM_COLOURS]>,
}

impl fmt::Debug for ColouredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColouredGraph(order={}, adj={:?})", self.order(), self.adj)
    }
}

pub(crate) fn check_involutions<const K: usize>(rows: &[[u32; K]]) -> Result<(), GraphError> {
    let n = rows.len();
    if n == 0 || n % 2 != 0 {
        return Err(GraphError::OddOrder(n));
    }
    for (v, row) in rows.iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            let w = w as usize;
            if w >= n {
                return Err(GraphError::OutOfRange { colour: c, vertex: v });
            }
            if w == v {
                return Err(GraphError::FixedPoint { colour: c, vertex: v });
            }
            if rows[w][c] as usize != v {
                return Err(GraphError::NotInvolution { colour: c, vertex: v });
            }
        }
    }
    Ok(())
}

/// Labels the components of the subgraph of `rows` spanned by `mask` (a bitmask on colours).
pub(crate) fn component_labels<const K: usize>(rows: &[[u32; K]], mask: u8) -> (Vec<u32>, usize) {
    let n = rows.len();
    let mut label = vec![u32::MAX; n];
    let mut count = 0usize;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = count as u32;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for c in 0..K {
                if mask & (1 << c) == 0 {
                    continue;
                }
                let w = rows[v][c] as usize;
                if label[w] == u32::MAX {
                    label[w] = count as u32;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

impl ColouredGraph {
    /// Builds a validated, connected graph from four colour maps.
    pub fn build(order: usize, maps: &[Vec<u32>; NUM_COLOURS]) -> Result<Self, GraphError> {
        for (c, m) in maps.iter().enumerate() {
            if m.len() != order {
                return Err(GraphError::OutOfRange { colour: c, vertex: m.len().min(order) });
            }
        }
        let rows = (0..order)
            .map(|v| [maps[0][v], maps[1][v], maps[2][v], maps[3][v]])
            .collect();
        Self::from_rows(rows)
    }

    /// Builds a validated, connected graph from per-vertex neighbour rows.
    pub fn from_rows(rows: Vec<[u32; NUM_COLOURS]>) -> Result<Self, GraphError> {
        let g = Self::from_rows_allow_disconnected(rows)?;
        let (_, k) = component_labels(&g.adj, 0b1111);
        if k != 1 {
            return Err(GraphError::Disconnected(k));
        }
        Ok(g)
    }

    pub(crate) fn from_rows_allow_disconnected(
        rows: Vec<[u32; NUM_COLOURS]>,
    ) -> Result<Self, GraphError> {
        check_involutions(&rows)?;
        Ok(ColouredGraph { adj: rows })
    }

    /// Rows are trusted: used internally where the construction guarantees validity.
    pub(crate) fn from_rows_unchecked(rows: Vec<[u32; NUM_COLOURS]>) -> Self {
        debug_assert!(check_involutions(&rows).is_ok());
        ColouredGraph { adj: rows }
    }

    /// The two-vertex graph with all four colours joining its vertices (a crystallization of S³).
    pub fn sphere() -> Self {
        ColouredGraph { adj: vec![[1; 4], [0; 4]] }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbour(&self, v: usize, c: usize) -> usize {
        self.adj[v][c] as usize
    }

    pub fn rows(&self) -> &[[u32; NUM_COLOURS]] {
        &self.adj
    }

    /// The `c`-coloured edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self, c: usize) -> Vec<(usize, usize)> {
        (0..self.order())
            .filter_map(|v| {
                let w = self.neighbour(v, c);
                (v < w).then_some((v, w))
            })
            .collect()
    }

    /// Component label of each vertex in the subgraph spanned by `set`, plus the component count.
    /// Labels are assigned in order of minimum vertex.
    pub fn residue_labels(&self, set: ColourSet) -> (Vec<u32>, usize) {
        component_labels(&self.adj, set.bits())
    }

    pub fn residues(&self, set: ColourSet) -> ResiduePartition {
        let (label, count) = self.residue_labels(set);
        let mut components = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            components[l as usize].push(v as u32);
        }
        ResiduePartition { colour_set: set, components }
    }

    pub fn residue_count(&self, set: ColourSet) -> usize {
        self.residue_labels(set).1
    }

    /// Number of `{i,j}`-coloured cycles, written `g_{ij}`.
    pub fn bicoloured_cycles(&self, i: usize, j: usize) -> usize {
        self.residue_count(ColourSet::pair(i, j))
    }

    pub fn is_connected(&self) -> bool {
        self.residue_count(ColourSet::ALL) == 1
    }

    /// Every `ĉ`-residue is connected.
    pub fn is_contracted(&self) -> bool {
        (0..NUM_COLOURS).all(|c| self.residue_count(ColourSet::hat(c)) == 1)
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.order();
        let mut side = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for c in 0..NUM_COLOURS {
                    let w = self.neighbour(v, c);
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[v];
                        queue.push_back(w);
                    } else if side[w] == side[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Euler characteristic of the surface represented by each `ĉ`-residue.
    ///
    /// For a residue with `v` vertices, the surface has `v` triangles, `3v/2` edges and
    /// one vertex per bicoloured cycle inside the residue.
    pub fn residue_euler_characteristics(&self, c: usize) -> Vec<i64> {
        let hat = ColourSet::hat(c);
        let (label, count) = self.residue_labels(hat);
        let mut verts = vec![0i64; count];
        for &l in &label {
            verts[l as usize] += 1;
        }
        let mut chi: Vec<i64> = verts.iter().map(|&v| v - 3 * v / 2).collect();
        let others: Vec<usize> = hat.iter().collect();
        for a in 0..others.len() {
            for b in a + 1..others.len() {
                let (cl, cc) = self.residue_labels(ColourSet::pair(others[a], others[b]));
                let mut seen = vec![false; cc];
                for v in 0..self.order() {
                    let k = cl[v] as usize;
                    if !seen[k] {
                        seen[k] = true;
                        chi[label[v] as usize] += 1;
                    }
                }
            }
        }
        chi
    }

    /// Every 3-coloured residue represents the 2-sphere.
    pub fn is_manifold_gem(&self) -> bool {
        (0..NUM_COLOURS).all(|c| self.residue_euler_characteristics(c).iter().all(|&x| x == 2))
    }

    pub fn is_crystallization(&self) -> bool {
        self.is_connected() && self.is_contracted() && self.is_manifold_gem()
    }

    /// `min{g01, g02, g03} - 1` for a crystallization.
    pub fn regular_genus(&self) -> Result<usize, GraphError> {
        if !self.is_crystallization() {
            return Err(GraphError::NotCrystallization);
        }
        Ok(self.genus_unchecked())
    }

    pub(crate) fn genus_unchecked(&self) -> usize {
        (1..NUM_COLOURS)
            .map(|i| self.bicoloured_cycles(0, i))
            .min()
            .unwrap_or(1)
            - 1
    }

    /// Applies a vertex permutation (`perm[old] = new`) and a colour permutation
    /// (`colours[old] = new`).
    pub fn relabel(&self, perm: &[usize], colours: &[usize; NUM_COLOURS]) -> ColouredGraph {
        let n = self.order();
        assert_eq!(perm.len(), n);
        let mut rows = vec![[0u32; NUM_COLOURS]; n];
        for v in 0..n {
            for c in 0..NUM_COLOURS {
                rows[perm[v]][colours[c]] = perm[self.neighbour(v, c)] as u32;
            }
        }
        ColouredGraph::from_rows_unchecked(rows)
    }

    /// Builds the graph on the vertices `keep` (in the given order) from arbitrary rows, renumbering.
    pub(crate) fn renumber(rows: &[[u32; NUM_COLOURS]], keep: &[usize]) -> Vec<[u32; NUM_COLOURS]> {
        let mut index = vec![u32::MAX; rows.len()];
        for (k, &v) in keep.iter().enumerate() {
            index[v] = k as u32;
        }
        keep.iter()
            .map(|&v| {
                let mut r = [0u32; NUM_COLOURS];
                for c in 0..NUM_COLOURS {
                    r[c] = index[rows[v][c] as usize];
                    debug_assert!(r[c] != u32::MAX);
                }
                r
            })
            .collect()
    }
}
