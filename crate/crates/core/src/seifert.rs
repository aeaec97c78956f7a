//! Coloured triangulations of Seifert fibred spaces `(S², (α1,β1), (α2,β2), (α3,β3))`.
//!
//! A triangulated pants × S¹ block has three boundary tori, each a one-vertex torus made of
//! two triangles. Each torus is filled with a layered solid torus so that the fibre edge goes
//! to the edge labelled `α` and the section edge to the edge labelled `θ` or `σ`. The first
//! barycentric subdivision of the closed result is read off as a 4-coloured graph.
//!
//! Tetrahedra have local vertices `0..4`; face `f` is the face opposite vertex `f`. A gluing
//! of face `f` of `t` to `u` is a permutation `perm` sending local vertices of `t` to local
//! vertices of `u`, with `perm[f]` the face of `u`.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::graph::{ColouredGraph, NUM_COLOURS};
use crate::invariants::{seifert_group_exceptional, seifert_group_first, seifert_group_second, GroupPresentation, HomologyResult};
use crate::moves::{reduce_to_rigid, MoveLog};
use crate::snf::{smith_form, SparseRow};

pub type Perm = [u8; 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    #[error("invalid layered solid torus parameters ({0}, {1}, {2})")]
    InvalidParams(i64, i64, i64),
    #[error("no boundary edge labelled {0}")]
    NoSuchBoundaryEdge(i64),
    #[error("invalid Seifert spec: {0}")]
    InvalidSpec(String),
    #[error("inconsistent gluing: {0}")]
    BadGluing(String),
}

const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn edge_index(a: u8, b: u8) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGES.iter().position(|&e| e == (a, b)).unwrap()
}

fn inverse(p: Perm) -> Perm {
    let mut q = [0u8; 4];
    for (i, &v) in p.iter().enumerate() {
        q[v as usize] = i as u8;
    }
    q
}

fn is_perm(p: Perm) -> bool {
    let mut seen = [false; 4];
    p.iter().all(|&v| v < 4 && !std::mem::replace(&mut seen[v as usize], true))
}

/// Union-find whose links carry a parity, used for oriented edge classes.
struct ParityUf {
    parent: Vec<usize>,
    flip: Vec<bool>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), flip: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (r, f) = self.find(p);
        self.parent[x] = r;
        self.flip[x] ^= f;
        (r, self.flip[x])
    }

    /// Records `x ~ y` with relative parity `f`; false on a contradiction.
    fn union(&mut self, x: usize, y: usize, f: bool) -> bool {
        let (rx, fx) = self.find(x);
        let (ry, fy) = self.find(y);
        if rx == ry {
            return fx ^ fy == f;
        }
        self.parent[rx] = ry;
        self.flip[rx] = fx ^ fy ^ f;
        true
    }
}

/// A pseudo-simplicial 3-complex given by face pairings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Triangulation {
    glue: Vec<[Option<(usize, Perm)>; 4]>,
}

impl Triangulation {
    pub fn new() -> Self {
        Triangulation::default()
    }

    /// Appends `k` free tetrahedra and returns the index of the first.
    pub fn add_tetrahedra(&mut self, k: usize) -> usize {
        let first = self.glue.len();
        self.glue.resize(first + k, [None; 4]);
        first
    }

    pub fn len(&self) -> usize {
        self.glue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glue.is_empty()
    }

    pub fn neighbour(&self, t: usize, f: usize) -> Option<(usize, Perm)> {
        self.glue[t][f]
    }

    /// Glues face `f` of `t` to face `perm[f]` of `u`.
    pub fn glue(&mut self, t: usize, f: usize, u: usize, perm: Perm) -> Result<(), SeifertError> {
        if !is_perm(perm) || t >= self.len() || u >= self.len() {
            return Err(SeifertError::BadGluing(format!("bad gluing {t}:{f} -> {u} {perm:?}")));
        }
        let g = perm[f] as usize;
        if (t, f) == (u, g) {
            return Err(SeifertError::BadGluing(format!("face {t}:{f} glued to itself")));
        }
        if self.glue[t][f].is_some() || self.glue[u][g].is_some() {
            return Err(SeifertError::BadGluing(format!("face {t}:{f} or {u}:{g} already glued")));
        }
        self.glue[t][f] = Some((u, perm));
        self.glue[u][g] = Some((t, inverse(perm)));
        Ok(())
    }

    /// Each pairing once, as `(t, f, u, g, perm)` with `(t, f) < (u, g)`.
    pub fn gluings(&self) -> Vec<(usize, usize, usize, usize, Perm)> {
        let mut out = Vec::new();
        for (t, faces) in self.glue.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                if let Some((u, p)) = *g {
                    if (t, f) < (u, p[f] as usize) {
                        out.push((t, f, u, p[f] as usize, p));
                    }
                }
            }
        }
        out
    }

    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, faces) in self.glue.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                if g.is_none() {
                    out.push((t, f));
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.glue.iter().all(|fs| fs.iter().all(Option::is_some))
    }

    /// Class of each local vertex `4t + v`, numbered densely.
    fn vertex_classes(&self) -> (Vec<usize>, usize) {
        let mut uf = ParityUf::new(4 * self.len());
        for (t, f, u, _, p) in self.gluings() {
            for v in 0..4 {
                if v != f {
                    uf.union(4 * t + v, 4 * u + p[v] as usize, false);
                }
            }
        }
        dense((0..4 * self.len()).map(|x| uf.find(x).0).collect())
    }

    /// Class and orientation flip of each local edge `6t + e`, edges oriented low to high.
    fn edge_classes(&self) -> Result<(Vec<(usize, bool)>, usize), SeifertError> {
        let mut uf = ParityUf::new(6 * self.len());
        for (t, f, u, _, p) in self.gluings() {
            for &(a, b) in &EDGES {
                if a as usize == f || b as usize == f {
                    continue;
                }
                let (pa, pb) = (p[a as usize], p[b as usize]);
                if !uf.union(6 * t + edge_index(a, b), 6 * u + edge_index(pa, pb), pa > pb) {
                    return Err(SeifertError::BadGluing(format!("edge {a}{b} of tetrahedron {t} identified with its reverse")));
                }
            }
        }
        let found: Vec<(usize, bool)> = (0..6 * self.len()).map(|x| uf.find(x)).collect();
        let (ids, n) = dense(found.iter().map(|x| x.0).collect());
        Ok((ids.into_iter().zip(found.iter().map(|x| x.1)).collect(), n))
    }

    /// Number of vertex, edge, face and tetrahedron classes.
    pub fn face_counts(&self) -> Result<[usize; 4], SeifertError> {
        let v = self.vertex_classes().1;
        let e = self.edge_classes()?.1;
        let f = 4 * self.len() - self.gluings().len();
        Ok([v, e, f, self.len()])
    }

    pub fn euler_characteristic(&self) -> Result<i64, SeifertError> {
        let [v, e, f, t] = self.face_counts()?;
        Ok(v as i64 - e as i64 + f as i64 - t as i64)
    }

    /// First homology of the complex from its cellular chains.
    pub fn first_homology(&self) -> Result<HomologyResult, SeifertError> {
        let (verts, nv) = self.vertex_classes();
        let (edges, ne) = self.edge_classes()?;
        let mut d1: Vec<SparseRow> = vec![Vec::new(); ne];
        for t in 0..self.len() {
            for (k, &(a, b)) in EDGES.iter().enumerate() {
                let (id, flip) = edges[6 * t + k];
                if d1[id].is_empty() {
                    let (from, to) = if flip { (b, a) } else { (a, b) };
                    let (vf, vt) = (verts[4 * t + from as usize], verts[4 * t + to as usize]);
                    d1[id] = merge(vec![(vt, 1), (vf, -1)]);
                }
            }
        }
                let rank1 = smith_form(&d1, nv).rank;
        let mut d2: Vec<SparseRow> = Vec::new();
        for t in 0..self.len() {
            for f in 0..4u8 {
                if let Some((u, p)) = self.glue[t][f as usize] {
                    if (u, p[f as usize] as usize) < (t, f as usize) {
                        continue;
                    }
                }
                let vs: Vec<u8> = (0..4).filter(|&v| v != f).collect();
                let mut row: SparseRow = Vec::new();
                for (k, &(a, b)) in [(vs[1], vs[2]), (vs[0], vs[2]), (vs[0], vs[1])].iter().enumerate() {
                    let (id, flip) = edges[6 * t + edge_index(a, b)];
                    let sign = if (k % 2 == 0) ^ flip { 1 } else { -1 };
                    row.push((id, sign));
                }
                d2.push(merge(row));
            }
        }
        let s = smith_form(&d2, ne);
        Ok(HomologyResult { free_rank: ne - rank1 - s.rank, torsion: s.torsion() })
    }

    /// The dual graph of the first barycentric subdivision: one vertex per flag
    /// (vertex ⊂ edge ⊂ face ⊂ tetrahedron), colour `c` changing the `c`-dimensional member.
    pub fn barycentric_coloured_graph(&self) -> Result<ColouredGraph, SeifertError> {
        if !self.is_closed() {
            return Err(SeifertError::BadGluing("triangulation has boundary faces".into()));
        }
        let perms = all_perms();
        let mut index = [usize::MAX; 256];
        for (k, p) in perms.iter().enumerate() {
            index[key(*p)] = k;
        }
        let mut rows = vec![[0u32; NUM_COLOURS]; 24 * self.len()];
        for t in 0..self.len() {
            for (k, &s) in perms.iter().enumerate() {
                let row = &mut rows[24 * t + k];
                for c in 0..3 {
                    let mut q = s;
                    q.swap(c, c + 1);
                    row[c] = (24 * t + index[key(q)]) as u32;
                }
                let (u, p) = self.glue[t][s[3] as usize].unwrap();
                let q = [p[s[0] as usize], p[s[1] as usize], p[s[2] as usize], p[s[3] as usize]];
                row[3] = (24 * u + index[key(q)]) as u32;
            }
        }
        ColouredGraph::from_rows(rows).map_err(|e| SeifertError::BadGluing(e.to_string()))
    }
}

fn key(p: Perm) -> usize {
    p.iter().fold(0, |acc, &v| acc * 4 + v as usize)
}

fn all_perms() -> Vec<Perm> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                if a == b || a == c || b == c {
                    continue;
                }
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

fn dense(roots: Vec<usize>) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let ids = roots
        .into_iter()
        .map(|r| {
            let n = map.len();
            *map.entry(r).or_insert(n)
        })
        .collect();
    (ids, map.len())
}

fn merge(mut row: SparseRow) -> SparseRow {
    row.sort_unstable();
    let mut out: SparseRow = Vec::new();
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}

/// The three boundary labels of a layered solid torus, as an unordered set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LstParams {
    labels: [i64; 3],
}

impl LstParams {
    /// Validates `p + q + r = 0`, `gcd(|p|,|q|) = 1` and nonzero labels; flips the sign so that
    /// two labels are positive.
    pub fn new(p: i64, q: i64, r: i64) -> Result<Self, SeifertError> {
        if p + q + r != 0 || p == 0 || q == 0 || r == 0 || p.abs().gcd(&q.abs()) != 1 {
            return Err(SeifertError::InvalidParams(p, q, r));
        }
        let mut labels = [p, q, r];
        if labels.iter().filter(|&&x| x > 0).count() < 2 {
            labels.iter_mut().for_each(|x| *x = -*x);
        }
        labels.sort_unstable();
        Ok(LstParams { labels })
    }

    /// Sorted labels: the negative one first.
    pub fn labels(&self) -> [i64; 3] {
        self.labels
    }
}

impl fmt::Display for LstParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.labels;
        write!(f, "{{{b},{c},{a}}}")
    }
}

/// A boundary triangle of a layered solid torus: for each of its edges, the edge slot and
/// the local endpoints in the slot's orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BoundaryFace {
    tet: usize,
    edges: [(usize, u8, u8); 3],
}

impl BoundaryFace {
    fn edge(&self, slot: usize) -> (u8, u8) {
        let e = self.edges.iter().find(|e| e.0 == slot).unwrap();
        (e.1, e.2)
    }

    /// Local vertex of the triangle not on the edge of `slot`.
    fn opposite_corner(&self, slot: usize) -> u8 {
        let (a, b) = self.edge(slot);
        self.corners().into_iter().find(|&v| v != a && v != b).unwrap()
    }

    fn corners(&self) -> Vec<u8> {
        let mut v: Vec<u8> = self.edges.iter().flat_map(|e| [e.1, e.2]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The face index (local vertex not in the triangle).
    fn face(&self) -> u8 {
        6 - self.corners().iter().sum::<u8>()
    }
}

/// A layered solid torus with its two boundary triangles and three boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSolidTorus {
    pub triangulation: Triangulation,
    faces: [BoundaryFace; 2],
    /// Class of each boundary edge slot in `H₁` of the solid torus (generated by the core).
    classes: [i64; 3],
}

impl LayeredSolidTorus {
    /// The one-tetrahedron torus `{1,2,-3}`: face `012` glued to face `123` by `i ↦ i+1`.
    pub fn base() -> Self {
        let mut t = Triangulation::new();
        t.add_tetrahedra(1);
        t.glue(0, 3, 0, [1, 2, 3, 0]).unwrap();
        // slots: 0 = {01,12,23}, 1 = {02,13}, 2 = {03}
        let f1 = BoundaryFace { tet: 0, edges: [(1, 0, 2), (0, 2, 3), (2, 0, 3)] };
        let f2 = BoundaryFace { tet: 0, edges: [(0, 0, 1), (1, 1, 3), (2, 0, 3)] };
        LayeredSolidTorus { triangulation: t, faces: [f1, f2], classes: [1, 2, 3] }
    }

    pub fn tetrahedra(&self) -> usize {
        self.triangulation.len()
    }

    /// Boundary labels per slot, signed so that the largest is negative.
    fn slot_labels(&self) -> [i64; 3] {
        let abs = self.classes.map(i64::abs);
        let max = *abs.iter().max().unwrap();
        let top = abs.iter().position(|&a| a == max).unwrap();
        let mut out = abs;
        out[top] = -max;
        out
    }

    pub fn params(&self) -> LstParams {
        let [a, b, c] = self.slot_labels();
        LstParams::new(a, b, c).expect("layering keeps labels valid")
    }

    fn slot_of(&self, label: i64, skip: &[usize]) -> Option<usize> {
        let labels = self.slot_labels();
        (0..3).find(|&s| !skip.contains(&s) && labels[s].abs() == label.abs())
    }

    /// Layers a new tetrahedron on the boundary edge carrying `label`.
    pub fn layering(&self, label: i64) -> Result<Self, SeifertError> {
        let slot = self.slot_of(label, &[]).ok_or(SeifertError::NoSuchBoundaryEdge(label))?;
        Ok(self.layer_slot(slot))
    }

    fn layer_slot(&self, e: usize) -> Self {
        let mut t = self.triangulation.clone();
        let n = t.add_tetrahedra(1);
        let [b1, b2] = self.faces;
        let (f1, h1) = b1.edge(e);
        let (f2, h2) = b2.edge(e);
        let (w1, w2) = (b1.opposite_corner(e), b2.opposite_corner(e));
        // new vertices 0,1 lie on the layered edge; 2 on b1's far corner, 3 on b2's
        t.glue(n, 3, b1.tet, [f1, h1, w1, b1.face()]).unwrap();
        t.glue(n, 2, b2.tet, [f2, h2, b2.face(), w2]).unwrap();
        let m1 = |v: u8| -> u8 { if v == f1 { 0 } else if v == h1 { 1 } else { 2 } };
        let m2 = |v: u8| -> u8 { if v == f2 { 0 } else if v == h2 { 1 } else { 3 } };
        let side = |b: &BoundaryFace, m: &dyn Fn(u8) -> u8, at: u8| {
            b.edges
                .iter()
                .filter(|x| x.0 != e)
                .map(|&(s, a, c)| (s, m(a), m(c)))
                .find(|&(_, a, c)| a == at || c == at)
                .unwrap()
        };
        let e02 = side(&b1, &m1, 0);
        let e12 = side(&b1, &m1, 1);
        let e03 = side(&b2, &m2, 0);
        let e13 = side(&b2, &m2, 1);
        assert_ne!(e02.0, e03.0, "boundary square sides must pair up");
        let signed = |x: (usize, u8, u8), from: u8| if x.1 == from { self.classes[x.0] } else { -self.classes[x.0] };
        let mut classes = self.classes;
        classes[e] = signed(e03, 0) - signed(e02, 0);
        let g1 = BoundaryFace { tet: n, edges: [e02, e03, (e, 2, 3)] };
        let g2 = BoundaryFace { tet: n, edges: [e12, e13, (e, 2, 3)] };
        LayeredSolidTorus { triangulation: t, faces: [g1, g2], classes }
    }
}

/// Builds the layered solid torus with the given label set.
pub fn lst(params: LstParams) -> LayeredSolidTorus {
    let [neg, x, y] = params.labels();
    debug_assert_eq!(-neg, x + y);
    build_lst(x, y)
}

fn build_lst(x: i64, y: i64) -> LayeredSolidTorus {
    match (x, y) {
        (1, 2) => LayeredSolidTorus::base(),
        (1, 1) => LayeredSolidTorus::base().layering(3).unwrap(),
        _ => {
            let d = y - x;
            build_lst(x.min(d), x.max(d)).layering(d).unwrap()
        }
    }
}

/// One triangle of a boundary square of the pants block: tetrahedron, the three local
/// vertices (`x0,y0,y1` for the lower half, `x0,x1,y1` for the upper), and the face index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Half {
    tet: usize,
    verts: [u8; 3],
    face: u8,
}

fn glue_halves(t: &mut Triangulation, a: Half, b: Half) {
    let mut p = [0u8; 4];
    for i in 0..3 {
        p[a.verts[i] as usize] = b.verts[i];
    }
    p[a.face as usize] = b.face;
    t.glue(a.tet, a.face as usize, b.tet, p).unwrap();
}

/// Square over the side at order positions `(i, j)` of the prism starting at tetrahedron `base`.
fn square(base: usize, i: usize, j: usize) -> [Half; 2] {
    let h = |t: usize, verts: [u8; 3], face: u8| Half { tet: base + t, verts, face };
    match (i, j) {
        (0, 1) => [h(1, [0, 1, 2], 3), h(2, [0, 1, 2], 3)],
        (1, 2) => [h(0, [1, 2, 3], 0), h(1, [1, 2, 3], 0)],
        (0, 2) => [h(0, [0, 2, 3], 1), h(2, [0, 1, 3], 2)],
        _ => unreachable!(),
    }
}

/// The triangulated pants × S¹ with its three boundary tori left open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsBlock {
    pub triangulation: Triangulation,
    /// Lower and upper triangle of the boundary square of each boundary circle.
    tori: [[Half; 2]; 3],
}

/// Section direction of one boundary circle of the pants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizontal {
    /// Section edge glued to the edge labelled `θ`; the fibre gets `β = θ`.
    Theta,
    /// Section edge glued to the edge labelled `σ` with reversed circle; `β = -σ`.
    Sigma,
}

pub fn pants_block() -> PantsBlock {
    pants_block_with([false; 3])
}

/// The pants is a heptagon `p0..p6` fanned from `p6`, with sides `p0p1`, `p2p3`, `p4p5` the
/// three boundary circles and `p1p2 ~ p0p6`, `p3p4 ~ p6p5` identified. Corner `p6` comes first
/// in every triangle, so each boundary circle may run either way (`reversed`).
pub fn pants_block_with(reversed: [bool; 3]) -> PantsBlock {
    let orders: [[usize; 3]; 5] = [
        if reversed[0] { [6, 1, 0] } else { [6, 0, 1] },
        [6, 2, 1],
        if reversed[1] { [6, 3, 2] } else { [6, 2, 3] },
        [6, 3, 4],
        if reversed[2] { [6, 5, 4] } else { [6, 4, 5] },
    ];
    let mut t = Triangulation::new();
    let bases: Vec<usize> = (0..5).map(|_| t.add_tetrahedra(3)).collect();
    for &b in &bases {
        t.glue(b, 2, b + 1, [0, 1, 2, 3]).unwrap();
        t.glue(b + 1, 1, b + 2, [0, 1, 2, 3]).unwrap();
        // P×{0} ~ P×{1}
        t.glue(b, 3, b + 2, [1, 2, 3, 0]).unwrap();
    }
    let sq = |k: usize, x: usize, y: usize| {
        let o = &orders[k];
        let i = o.iter().position(|&v| v == x).unwrap();
        let j = o.iter().position(|&v| v == y).unwrap();
        assert!(i < j);
        square(bases[k], i, j)
    };
    // (triangle, tail, head) pairs for identified sides
    let pairs = [
        ((0, 6, 1), (1, 6, 1)),
        ((1, 6, 2), (2, 6, 2)),
        ((2, 6, 3), (3, 6, 3)),
        ((3, 6, 4), (4, 6, 4)),
        ((0, 6, 0), (1, 2, 1)),
        ((3, 3, 4), (4, 6, 5)),
    ];
    for ((k1, x1, y1), (k2, x2, y2)) in pairs {
        let a = sq(k1, x1, y1);
        let b = sq(k2, x2, y2);
        glue_halves(&mut t, a[0], b[0]);
        glue_halves(&mut t, a[1], b[1]);
    }
    let circle = |k: usize, a: usize, b: usize, rev: bool| if rev { sq(k, b, a) } else { sq(k, a, b) };
    let tori = [circle(0, 0, 1, reversed[0]), circle(2, 2, 3, reversed[1]), circle(4, 4, 5, reversed[2])];
    PantsBlock { triangulation: t, tori }
}

/// Three layered solid tori `(α_i, θ_i, σ_i)` and the section choice for each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertSpec {
    pub triples: [(i64, i64, i64); 3],
    pub horizontal: [Horizontal; 3],
}

impl SeifertSpec {
    pub fn new(triples: [(i64, i64, i64); 3], horizontal: [Horizontal; 3]) -> Result<Self, SeifertError> {
        for &(a, t, s) in &triples {
            LstParams::new(a, t, s)?;
            if a <= 0 {
                return Err(SeifertError::InvalidSpec(format!("alpha must be positive in ({a},{t},{s})")));
            }
        }
        Ok(SeifertSpec { triples, horizontal })
    }

    /// Section edges `θ, θ, σ`: the choice under which every row of the bundled table
    /// describes its listed manifold.
    pub fn from_triples(triples: [(i64, i64, i64); 3]) -> Result<Self, SeifertError> {
        Self::new(triples, [Horizontal::Theta, Horizontal::Theta, Horizontal::Sigma])
    }

    /// Chooses, per fibre, `θ = β` when possible and otherwise `σ = -β`.
    pub fn for_fibres(triples: [(i64, i64, i64); 3], fibres: [(i64, i64); 3]) -> Result<Self, SeifertError> {
        let mut horizontal = [Horizontal::Theta; 3];
        for i in 0..3 {
            let (a, t, s) = triples[i];
            let (alpha, beta) = fibres[i];
            if a != alpha {
                return Err(SeifertError::InvalidSpec(format!("fibre {i}: alpha {a} != {alpha}")));
            }
            horizontal[i] = if t == beta {
                Horizontal::Theta
            } else if s == -beta {
                Horizontal::Sigma
            } else {
                return Err(SeifertError::InvalidSpec(format!("fibre {i}: neither theta = {beta} nor sigma = {}", -beta)));
            };
        }
        Self::new(triples, horizontal)
    }

    /// Parses `"(2,1,-3),(4,1,-5),(4,-5,1)"`.
    pub fn parse_triples(s: &str) -> Result<[(i64, i64, i64); 3], SeifertError> {
        let nums: Result<Vec<i64>, _> = s
            .split(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect();
        let nums = nums.map_err(|_| SeifertError::InvalidSpec(format!("cannot parse {s:?}")))?;
        if nums.len() != 9 {
            return Err(SeifertError::InvalidSpec(format!("expected three triples, got {s:?}")));
        }
        Ok([(nums[0], nums[1], nums[2]), (nums[3], nums[4], nums[5]), (nums[6], nums[7], nums[8])])
    }

    pub fn fibres(&self) -> [(i64, i64); 3] {
        let mut out = [(0, 0); 3];
        for i in 0..3 {
            let (a, t, s) = self.triples[i];
            out[i] = (a, if self.horizontal[i] == Horizontal::Theta { t } else { -s });
        }
        out
    }
}

impl fmt::Display for SeifertSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.triples.iter().map(|(a, b, c)| format!("({a},{b},{c})")).collect();
        write!(f, "{}", t.join(","))
    }
}

/// Gluing one boundary torus to a layered solid torus: fibre edge to `α`, section to `x`,
/// diagonal to the remaining edge. Tries both triangle assignments.
fn attach(t: &mut Triangulation, torus: [Half; 2], solid: &LayeredSolidTorus, offset: usize, alpha: i64, x: i64) -> Result<(), SeifertError> {
    let sa = solid.slot_of(alpha, &[]).ok_or(SeifertError::NoSuchBoundaryEdge(alpha))?;
    let sx = solid.slot_of(x, &[sa]).ok_or(SeifertError::NoSuchBoundaryEdge(x))?;
    let sy = 3 - sa - sx;
    let [lower, upper] = torus;
    // lower (x0,y0,y1): h = y0y1, q = x0y0, d = x0y1; upper (x0,x1,y1): h = x0x1, q = x1y1, d = x0y1
    let lower_edges = [(1, 2), (0, 1), (0, 2)];
    let upper_edges = [(0, 1), (1, 2), (0, 2)];
    let slots = [sa, sx, sy];
    for (fl, fu) in [(0, 1), (1, 0)] {
        let (bl, bu) = (solid.faces[fl], solid.faces[fu]);
        // triangle vertex opposite edge role r goes to the face corner opposite slot r
        let map = |b: &BoundaryFace, edges: &[(usize, usize); 3]| {
            let mut m = [0u8; 3];
            for (r, &(i, j)) in edges.iter().enumerate() {
                m[3 - i - j] = b.opposite_corner(slots[r]);
            }
            m
        };
        let ml = map(&bl, &lower_edges);
        let mu = map(&bu, &upper_edges);
        let consistent = (0..3).all(|r| {
            let dir = |b: &BoundaryFace, m: [u8; 3], (i, j): (usize, usize)| b.edge(slots[r]) == (m[i], m[j]);
            dir(&bl, ml, lower_edges[r]) == dir(&bu, mu, upper_edges[r])
        });
        if consistent {
            for (half, b, m) in [(lower, bl, ml), (upper, bu, mu)] {
                let target = Half { tet: offset + b.tet, verts: m, face: b.face() };
                glue_halves(t, half, target);
            }
            return Ok(());
        }
    }
    Err(SeifertError::BadGluing("no orientation-consistent torus gluing".into()))
}

/// The closed triangulation of the Seifert manifold described by `spec`.
pub fn assemble(spec: &SeifertSpec) -> Result<Triangulation, SeifertError> {
    let block = pants_block_with(spec.horizontal.map(|h| h == Horizontal::Sigma));
    let mut t = block.triangulation.clone();
    for i in 0..3 {
        let (a, th, s) = spec.triples[i];
        let solid = lst(LstParams::new(a, th, s)?);
        let offset = t.len();
        t.add_tetrahedra(solid.tetrahedra());
        for (u, f, v, _, p) in solid.triangulation.gluings() {
            t.glue(offset + u, f, offset + v, p)?;
        }
        let x = if spec.horizontal[i] == Horizontal::Theta { th } else { s };
        attach(&mut t, block.tori[i], &solid, offset, a, x)?;
    }
    debug_assert!(t.is_closed());
    Ok(t)
}

/// Dipole cancellation and ρ-pair switching down to a rigid crystallization.
pub fn crystallize(g: &ColouredGraph) -> (ColouredGraph, MoveLog) {
    reduce_to_rigid(g)
}

/// Seifert invariants agree up to `β_i ↦ β_i + k_i α_i` with `Σ k_i = 0`, reordering, and
/// orientation reversal.
pub fn seifert_equivalent(a: &[(i64, i64); 3], b: &[(i64, i64); 3]) -> bool {
    let euler = |f: &[(i64, i64); 3]| {
        // Σ β/α as a fraction over the product of the α
        let den: i128 = f.iter().map(|x| x.0 as i128).product();
        let num: i128 = f.iter().map(|x| x.1 as i128 * den / x.0 as i128).sum();
        (num, den)
    };
    let same = |x: &[(i64, i64); 3], y: &[(i64, i64); 3]| {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        perms.iter().any(|p| {
            let z = [y[p[0]], y[p[1]], y[p[2]]];
            let fibres_match = (0..3).all(|i| x[i].0 == z[i].0 && (x[i].1 - z[i].1).rem_euclid(x[i].0) == 0);
            let (n1, d1) = euler(x);
            let (n2, d2) = euler(&z);
            fibres_match && n1 * d2 == n2 * d1
        })
    };
    let mirror = b.map(|(al, be)| (al, -be));
    same(a, b) || same(a, &mirror)
}

/// Which two-generator shape of the fundamental group applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupShape {
    /// `⟨a,b | a^α1 = b^α2 = (ab)^α3⟩`.
    First(i64, i64, i64),
    /// `⟨a,b | a^α3 = b^α2 = (a^{-ε} b^ε)^α1⟩`.
    Second(i64, i64, i64, i32),
    /// `⟨a,b | a⁵ = b³ = (ab⁻²)⁻³⟩`.
    Exceptional,
}

impl GroupShape {
    pub fn fibres(&self) -> [(i64, i64); 3] {
        match *self {
            GroupShape::First(a1, a2, a3) => [(a1, 1), (a2, 1), (a3.abs(), -a3.signum())],
            GroupShape::Second(a1, a2, a3, e) => [(a1, 1), (a2, -e as i64), (a3, e as i64)],
            GroupShape::Exceptional => [(3, 1), (3, 1), (5, -4)],
        }
    }

    pub fn presentation(&self) -> GroupPresentation {
        match *self {
            GroupShape::First(a1, a2, a3) => seifert_group_first(a1, a2, a3),
            GroupShape::Second(a1, a2, a3, e) => seifert_group_second(a1, a2, a3, e),
            GroupShape::Exceptional => seifert_group_exceptional(),
        }
    }
}

/// A two-generator shape whose Seifert manifold is `fibres`, if any.
pub fn group_shape(fibres: &[(i64, i64); 3]) -> Option<GroupShape> {
    let alphas = fibres.map(|f| f.0);
    let mut candidates = vec![GroupShape::Exceptional];
    for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let (a1, a2, a3) = (alphas[p[0]], alphas[p[1]], alphas[p[2]]);
        candidates.push(GroupShape::First(a1, a2, a3));
        candidates.push(GroupShape::First(a1, a2, -a3));
        candidates.push(GroupShape::Second(a1, a2, a3, 1));
        candidates.push(GroupShape::Second(a1, a2, a3, -1));
    }
    candidates.into_iter().find(|s| seifert_equivalent(&s.fibres(), fibres))
}

/// `⟨q1,q2,q3,h | [q_i,h], q_i^{α_i} h^{β_i}, q1q2q3⟩`.
pub fn seifert_presentation(fibres: &[(i64, i64); 3]) -> GroupPresentation {
    let h = 4;
    let pow = |g: i32, n: i64| -> Vec<i32> { (0..n.abs()).map(|_| if n > 0 { g } else { -g }).collect() };
    let mut rels = Vec::new();
    for (i, &(a, b)) in fibres.iter().enumerate() {
        let q = i as i32 + 1;
        rels.push(vec![q, h, -q, -h]);
        let mut w = pow(q, a);
        w.extend(pow(h, b));
        rels.push(w);
    }
    rels.push(vec![1, 2, 3]);
    GroupPresentation::new(4, rels)
}

/// Summary of one construction.
#[derive(Debug, Clone)]
pub struct SeifertBuild {
    pub spec: SeifertSpec,
    pub triangulation: Triangulation,
    pub graph: ColouredGraph,
    pub crystallization: Option<(ColouredGraph, MoveLog)>,
}

pub fn build(spec: &SeifertSpec, crystallize_graph: bool) -> Result<SeifertBuild, SeifertError> {
    let triangulation = assemble(spec)?;
    let graph = triangulation.barycentric_coloured_graph()?;
    let crystallization = crystallize_graph.then(|| crystallize(&graph));
    Ok(SeifertBuild { spec: spec.clone(), triangulation, graph, crystallization })
}
