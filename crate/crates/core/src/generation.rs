//! Exhaustive generation of rigid crystallizations of a given regular genus.
//!
//! A crystallization of genus `g` has `min g_ij = g + 1` over colour pairs, and its
//! `{0,1,2}`-residue is a rigid planar 3-coloured graph (a sphere seed). Up to permuting
//! colours 0,1,2 the seed has exactly `g + 1` alternating `{0,1}`-cycles. Seeds are grown by
//! adding colour-2 edges to a fixed layout of those cycles, and each seed is completed by
//! adding colour-3 edges. Both searches reject a partial graph as soon as the surface it
//! spans (cells for the closed bicoloured cycles) stops being planar.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::code::{canonical_code, canonical_words, Code};
use crate::graph::{component_labels, ColouredGraph, NUM_COLOURS};
use crate::moves::{find_rho_pairs, rho_candidates};

const NONE: u32 = u32::MAX;

/// A connected rigid planar 3-coloured graph (colours 0, 1, 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereSeed {
    rows: Vec<[u32; 3]>,
}

impl SphereSeed {
    pub fn from_rows(rows: Vec<[u32; 3]>) -> Option<Self> {
        crate::graph::check_involutions(&rows).ok()?;
        let seed = SphereSeed { rows };
        (seed.is_connected() && seed.is_planar() && seed.is_rigid()).then_some(seed)
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[u32; 3]] {
        &self.rows
    }

    /// Number of `{i,j}`-cycles.
    pub fn cycles(&self, i: usize, j: usize) -> usize {
        component_labels(&self.rows, (1 << i) | (1 << j)).1
    }

    pub fn is_connected(&self) -> bool {
        component_labels(&self.rows, 0b111).1 == 1
    }

    /// `v - e + f = 2`.
    pub fn is_planar(&self) -> bool {
        let p = self.order() / 2;
        self.cycles(0, 1) + self.cycles(0, 2) + self.cycles(1, 2) == p + 2
    }

    /// No two edges of one colour share both of their bicoloured cycles.
    pub fn is_rigid(&self) -> bool {
        rho_candidates(&self.rows, 0b111).is_empty()
    }

    /// Some colour pair has exactly `genus + 1` cycles and no pair has fewer.
    pub fn admits_genus(&self, genus: usize) -> bool {
        let g = [self.cycles(0, 1), self.cycles(0, 2), self.cycles(1, 2)];
        g.iter().min() == Some(&(genus + 1))
    }

    /// Canonical code over the three colours.
    pub fn code(&self) -> String {
        let w = canonical_words(&self.rows);
        format!("{};{}", self.order(), w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Counts describing the surface spanned by two complete colours `a`, `b` and a partial
/// colour `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PartialSurface {
    twice_genus: i64,
    closed_ax: usize,
    closed_bx: usize,
    components: usize,
}

/// Reusable buffers for [`partial_surface`].
struct Scratch {
    mark: Vec<u32>,
    stamp: u32,
    end_a: Vec<u32>,
    end_b: Vec<u32>,
    parent: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { mark: vec![0; n], stamp: 0, end_a: vec![NONE; n], end_b: vec![NONE; n], parent: vec![0; n] }
    }

    fn fresh(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.stamp
    }
}

fn find(parent: &mut [u32], mut v: u32) -> u32 {
    while parent[v as usize] != v {
        let p = parent[v as usize];
        parent[v as usize] = parent[p as usize];
        v = p;
    }
    v
}

/// Traces the `{a,x}` structure: closed cycles are counted, open paths have their two
/// (free) ends recorded in `end`.
fn trace(a: &[u32], x: &[u32], s: &mut Scratch, which_b: bool) -> usize {
    let n = a.len();
    let st = s.fresh();
    for v in 0..n {
        if x[v] != NONE || s.mark[v] == st {
            continue;
        }
        let mut cur = v;
        s.mark[cur] = st;
        let end = loop {
            let w = a[cur] as usize;
            s.mark[w] = st;
            if x[w] == NONE {
                break w;
            }
            cur = x[w] as usize;
            s.mark[cur] = st;
        };
        let ends = if which_b { &mut s.end_b } else { &mut s.end_a };
        ends[v] = end as u32;
        ends[end] = v as u32;
    }
    let mut closed = 0;
    for v in 0..n {
        if s.mark[v] == st {
            continue;
        }
        closed += 1;
        let mut cur = v;
        loop {
            s.mark[cur] = st;
            let w = a[cur] as usize;
            s.mark[w] = st;
            cur = x[w] as usize;
            if cur == v {
                break;
            }
        }
    }
    closed
}

fn partial_surface(a: &[u32], b: &[u32], x: &[u32], closed_ab: usize, x_edges: usize, s: &mut Scratch) -> PartialSurface {
    let n = a.len();
    let closed_ax = trace(a, x, s, false);
    let closed_bx = trace(b, x, s, true);
    for v in 0..n {
        s.parent[v] = v as u32;
    }
    let mut components = n;
    for v in 0..n {
        for w in [a[v], b[v], x[v]] {
            if w != NONE && (w as usize) > v {
                let (r1, r2) = (find(&mut s.parent, v as u32), find(&mut s.parent, w));
                if r1 != r2 {
                    s.parent[r1 as usize] = r2;
                    components -= 1;
                }
            }
        }
    }
    // boundary curves alternate open {a,x}- and {b,x}-paths through free vertices
    let st = s.fresh();
    let mut boundary = 0i64;
    for v in 0..n {
        if x[v] != NONE || s.mark[v] == st {
            continue;
        }
        boundary += 1;
        let mut cur = v;
        loop {
            s.mark[cur] = st;
            let u = s.end_a[cur] as usize;
            s.mark[u] = st;
            cur = s.end_b[u] as usize;
            if cur == v {
                break;
            }
        }
    }
    let faces = (closed_ab + closed_ax + closed_bx) as i64;
    let chi = faces - x_edges as i64;
    PartialSurface { twice_genus: 2 * components as i64 - boundary - chi, closed_ax, closed_bx, components }
}

/// Colours 0, 1 as alternating cycles of half-lengths `lens`, laid out consecutively.
fn cycle_layout(lens: &[usize]) -> (Vec<u32>, Vec<u32>) {
    let n = 2 * lens.iter().sum::<usize>();
    let mut c0 = vec![0u32; n];
    let mut c1 = vec![0u32; n];
    let mut base = 0;
    for &l in lens {
        for t in 0..l {
            let a = base + 2 * t;
            let b = a + 1;
            let c = base + (2 * t + 2) % (2 * l);
            c0[a] = b as u32;
            c0[b] = a as u32;
            c1[b] = c as u32;
            c1[c] = b as u32;
        }
        base += 2 * l;
    }
    (c0, c1)
}

/// Non-decreasing partitions of `p` into exactly `k` parts.
fn partitions(p: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in min..=left {
            if x * parts > left {
                break;
            }
            cur.push(x);
            rec(left - x, parts - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, k, 1, &mut Vec::new(), &mut out);
    out
}

/// Algorithm variant for the two searches; registered by name.
pub trait GenerationStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Rigid planar seeds on `2p` vertices, one per colour-isomorphism class. With
    /// `genus_filter = Some(g)` only seeds admitting genus `g` are returned.
    fn sphere_seeds(&self, p: usize, genus_filter: Option<usize>) -> Vec<SphereSeed>;

    /// All rigid crystallizations whose `{0,1,2}`-residue is `seed`, one per code.
    fn complete(&self, seed: &SphereSeed) -> Vec<ColouredGraph>;
}

/// Backtracking with planarity pruning on every partial residue.
pub struct Pruned;

/// The same searches with all checks deferred to complete graphs; only for small orders.
pub struct Plain;

struct SeedSearch<'a> {
    c0: &'a [u32],
    c1: &'a [u32],
    c2: Vec<u32>,
    /// `{0,1}`-cycle of each vertex, first vertex and half-length of each cycle
    cycle_of: Vec<usize>,
    cycle_start: Vec<usize>,
    lens: &'a [usize],
    /// colour-2 edges touching each `{0,1}`-cycle
    touched: Vec<usize>,
    closed01: usize,
    /// upper bound on closed {0,2}- and {1,2}-cycles, from the genus filter
    max_closed: usize,
    prune: bool,
    scratch: Scratch,
    lab02: Vec<u32>,
    lab12: Vec<u32>,
    keys: Vec<u64>,
    found: BTreeMap<String, SphereSeed>,
    genus_filter: Option<usize>,
}

/// Labels the vertices of closed `{a,x}`-cycles; vertices on open paths get `NONE`.
fn closed_labels(a: &[u32], x: &[u32], out: &mut [u32]) -> usize {
    out.iter_mut().for_each(|l| *l = NONE);
    let n = a.len();
    let mut count = 0u32;
    for v in 0..n {
        if out[v] != NONE || x[v] == NONE {
            continue;
        }
        // walk forward along x then a; give up on reaching a free vertex
        let mut cur = v;
        let closed = loop {
            let w = x[cur] as usize;
            let nxt = a[w] as usize;
            if nxt == v {
                break true;
            }
            if x[nxt] == NONE {
                break false;
            }
            cur = nxt;
        };
        if closed {
            let mut cur = v;
            loop {
                out[cur] = count;
                let w = x[cur] as usize;
                out[w] = count;
                cur = a[w] as usize;
                if cur == v {
                    break;
                }
            }
            count += 1;
        }
    }
    count as usize
}

/// True when some sorted key repeats.
fn has_repeat(keys: &mut Vec<u64>) -> bool {
    keys.sort_unstable();
    keys.windows(2).any(|w| w[0] == w[1])
}

impl SeedSearch<'_> {
    fn run(&mut self, placed: usize) {
        let n = self.c0.len();
        let Some(v) = (0..n).find(|&v| self.c2[v] == NONE) else {
            self.leaf();
            return;
        };
        let cv = self.cycle_of[v];
        for w in v + 1..n {
            if self.c2[w] != NONE {
                continue;
            }
            let cw = self.cycle_of[w];
            if self.prune && cw != cv && self.touched[cw] == 0 {
                // an untouched cycle can be rotated and reflected freely, and swapped with
                // an untouched cycle of the same length: try only its first vertex, and only
                // the first such cycle
                if w != self.cycle_start[cw] {
                    continue;
                }
                let twin = (0..cw).any(|c| c != cv && self.touched[c] == 0 && self.lens[c] == self.lens[cw]);
                if twin {
                    continue;
                }
            }
            self.c2[v] = w as u32;
            self.c2[w] = v as u32;
            self.touched[cv] += 1;
            self.touched[cw] += 1;
            if !self.prune || self.viable(placed + 1) {
                self.run(placed + 1);
            }
            self.touched[cv] -= 1;
            self.touched[cw] -= 1;
            self.c2[v] = NONE;
            self.c2[w] = NONE;
        }
    }

    fn viable(&mut self, placed: usize) -> bool {
        let s = partial_surface(self.c0, self.c1, &self.c2, self.closed01, placed, &mut self.scratch);
        if !(s.twice_genus == 0 && s.closed_ax <= self.max_closed && s.closed_bx <= self.max_closed) {
            return false;
        }
        self.no_closed_rho_pair()
    }

    /// Rejects two edges of one colour already sharing both of their (closed) cycles.
    fn no_closed_rho_pair(&mut self) -> bool {
        let n = self.c0.len() as u64;
        closed_labels(self.c0, &self.c2, &mut self.lab02);
        closed_labels(self.c1, &self.c2, &mut self.lab12);
        for (col, lab) in [(self.c0, &self.lab02), (self.c1, &self.lab12)] {
            self.keys.clear();
            for v in 0..col.len() {
                if (col[v] as usize) > v && lab[v] != NONE {
                    self.keys.push(lab[v] as u64 * n + self.cycle_of[v] as u64);
                }
            }
            if has_repeat(&mut self.keys) {
                return false;
            }
        }
        self.keys.clear();
        for v in 0..self.c2.len() {
            let w = self.c2[v];
            if w != NONE && (w as usize) > v && self.lab02[v] != NONE && self.lab12[v] != NONE {
                self.keys.push(self.lab02[v] as u64 * n + self.lab12[v] as u64);
            }
        }
        !has_repeat(&mut self.keys)
    }

    fn leaf(&mut self) {
        let rows: Vec<[u32; 3]> = (0..self.c0.len()).map(|v| [self.c0[v], self.c1[v], self.c2[v]]).collect();
        let Some(seed) = SphereSeed::from_rows(rows) else { return };
        if let Some(g) = self.genus_filter {
            if !seed.admits_genus(g) {
                return;
            }
        }
        self.found.entry(seed.code()).or_insert(seed);
    }
}

fn seeds_with(p: usize, genus_filter: Option<usize>, prune: bool) -> Vec<SphereSeed> {
    if p == 0 {
        return Vec::new();
    }
    let part_counts: Vec<usize> = match genus_filter {
        Some(g) => vec![g + 1],
        None => (1..=p).collect(),
    };
    let mut lists: Vec<Vec<usize>> = Vec::new();
    for k in part_counts {
        lists.extend(partitions(p, k));
    }
    let per: Vec<BTreeMap<String, SphereSeed>> = lists
        .par_iter()
        .map(|lens| {
            let (c0, c1) = cycle_layout(lens);
            let max_closed = match genus_filter {
                // g02 + g12 = p + 2 - k and both are at least g + 1
                Some(g) => (p + 2 - lens.len()).saturating_sub(g + 1),
                None => p,
            };
            let mut cycle_of = Vec::with_capacity(2 * p);
            let mut cycle_start = Vec::with_capacity(lens.len());
            for (c, &l) in lens.iter().enumerate() {
                cycle_start.push(cycle_of.len());
                cycle_of.extend(std::iter::repeat(c).take(2 * l));
            }
            let mut s = SeedSearch {
                c0: &c0,
                c1: &c1,
                c2: vec![NONE; 2 * p],
                cycle_of,
                cycle_start,
                lens,
                touched: vec![0; lens.len()],
                lab02: vec![NONE; 2 * p],
                lab12: vec![NONE; 2 * p],
                keys: Vec::new(),
                closed01: lens.len(),
                max_closed,
                prune,
                scratch: Scratch::new(2 * p),
                found: BTreeMap::new(),
                genus_filter,
            };
            s.run(0);
            s.found
        })
        .collect();
    let mut all = BTreeMap::new();
    for m in per {
        all.extend(m);
    }
    all.into_values().collect()
}

struct CompletionSearch<'a> {
    seed: &'a SphereSeed,
    /// colours 0,1,2 as separate arrays
    cols: [Vec<u32>; 3],
    c3: Vec<u32>,
    /// closed {i,j}-cycle counts of the seed, indexed [i][j]
    seed_cycles: [[usize; 3]; 3],
    /// required number of {c,3}-cycles, c in 0..3
    target: [usize; 3],
    prune: bool,
    scratch: Scratch,
    /// cycle labels per colour pair, indexed by pair bitmask; pairs with colour 3 are
    /// recomputed at every node and only cover closed cycles
    labels: Vec<Vec<u32>>,
    keys: Vec<u64>,
    found: BTreeMap<Code, ColouredGraph>,
}

impl CompletionSearch<'_> {
    fn run(&mut self, placed: usize) {
        let n = self.c3.len();
        let Some(v) = (0..n).find(|&v| self.c3[v] == NONE) else {
            self.leaf();
            return;
        };
        for w in v + 1..n {
            if self.c3[w] != NONE {
                continue;
            }
            self.c3[v] = w as u32;
            self.c3[w] = v as u32;
            if !self.prune || self.viable(placed + 1) {
                self.run(placed + 1);
            }
            self.c3[v] = NONE;
            self.c3[w] = NONE;
        }
    }

    /// Every residue `{a,b,3}` must stay planar, and no `{c,3}`-cycle count may pass its target.
    fn viable(&mut self, placed: usize) -> bool {
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let s = partial_surface(
                &self.cols[a],
                &self.cols[b],
                &self.c3,
                self.seed_cycles[a][b],
                placed,
                &mut self.scratch,
            );
            if s.twice_genus != 0 || s.closed_ax > self.target[a] || s.closed_bx > self.target[b] {
                return false;
            }
        }
        self.no_closed_rho_pair()
    }

    /// Rejects two edges of one colour already sharing two closed bicoloured cycles.
    fn no_closed_rho_pair(&mut self) -> bool {
        let n = self.c3.len();
        for h in 0..3 {
            let mut lab = std::mem::take(&mut self.labels[(1 << h) | 8]);
            closed_labels(&self.cols[h], &self.c3, &mut lab);
            self.labels[(1 << h) | 8] = lab;
        }
        for i in 0..NUM_COLOURS {
            let others: Vec<usize> = (0..NUM_COLOURS).filter(|&h| h != i).collect();
            for (x, y) in [(others[0], others[1]), (others[0], others[2]), (others[1], others[2])] {
                if i != 3 && x != 3 && y != 3 {
                    continue; // fixed by the seed, which is rigid
                }
                let lx = &self.labels[(1 << i) | (1 << x)];
                let ly = &self.labels[(1 << i) | (1 << y)];
                self.keys.clear();
                for v in 0..n {
                    let w = if i == 3 { self.c3[v] } else { self.cols[i][v] };
                    if w != NONE && (w as usize) > v && lx[v] != NONE && ly[v] != NONE {
                        self.keys.push(lx[v] as u64 * n as u64 + ly[v] as u64);
                    }
                }
                if has_repeat(&mut self.keys) {
                    return false;
                }
            }
        }
        true
    }

    fn leaf(&mut self) {
        let rows: Vec<[u32; NUM_COLOURS]> = self
            .seed
            .rows()
            .iter()
            .zip(&self.c3)
            .map(|(r, &x)| [r[0], r[1], r[2], x])
            .collect();
        let Ok(g) = ColouredGraph::from_rows(rows) else { return };
        if !(g.is_contracted() && g.is_manifold_gem() && find_rho_pairs(&g).is_empty()) {
            return;
        }
        self.found.entry(canonical_code(&g)).or_insert(g);
    }
}

fn complete_with(seed: &SphereSeed, prune: bool) -> Vec<ColouredGraph> {
    let n = seed.order();
    let cols: [Vec<u32>; 3] = std::array::from_fn(|c| seed.rows().iter().map(|r| r[c]).collect());
    let mut seed_cycles = [[0usize; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                seed_cycles[i][j] = seed.cycles(i, j);
            }
        }
    }
    // a crystallization has g_ij = g_hk for complementary pairs
    let target = [seed_cycles[1][2], seed_cycles[0][2], seed_cycles[0][1]];
    let mut s = CompletionSearch {
        seed,
        cols,
        c3: vec![NONE; n],
        seed_cycles,
        target,
        prune,
        scratch: Scratch::new(n),
        labels: (0..16u8)
            .map(|m| {
                if m.count_ones() == 2 && m & 8 == 0 {
                    component_labels(seed.rows(), m).0
                } else {
                    vec![NONE; n]
                }
            })
            .collect(),
        keys: Vec::new(),
        found: BTreeMap::new(),
    };
    s.run(0);
    s.found.into_values().collect()
}

impl GenerationStrategy for Pruned {
    fn name(&self) -> &'static str {
        "pruned"
    }

    fn sphere_seeds(&self, p: usize, genus_filter: Option<usize>) -> Vec<SphereSeed> {
        seeds_with(p, genus_filter, true)
    }

    fn complete(&self, seed: &SphereSeed) -> Vec<ColouredGraph> {
        complete_with(seed, true)
    }
}

impl GenerationStrategy for Plain {
    fn name(&self) -> &'static str {
        "plain"
    }

    fn sphere_seeds(&self, p: usize, genus_filter: Option<usize>) -> Vec<SphereSeed> {
        seeds_with(p, genus_filter, false)
    }

    fn complete(&self, seed: &SphereSeed) -> Vec<ColouredGraph> {
        complete_with(seed, false)
    }
}

/// Registered generation strategies, looked up by name.
pub fn strategies() -> Vec<Box<dyn GenerationStrategy>> {
    vec![Box::new(Pruned), Box::new(Plain)]
}

pub fn strategy(name: &str) -> Option<Box<dyn GenerationStrategy>> {
    strategies().into_iter().find(|s| s.name() == name)
}

pub const DEFAULT_STRATEGY: &str = "pruned";

/// [`Pruned`] seeds.
pub fn generate_sphere_seeds(p: usize, genus_filter: Option<usize>) -> Vec<SphereSeed> {
    Pruned.sphere_seeds(p, genus_filter)
}

/// [`Pruned`] completion.
pub fn complete_with_colour3(seed: &SphereSeed) -> Vec<ColouredGraph> {
    Pruned.complete(seed)
}

/// Generated graphs of one order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderResult {
    pub order: usize,
    pub seeds: usize,
    pub bipartite: Vec<Code>,
    pub non_bipartite: Vec<Code>,
}

/// All rigid crystallizations of regular genus `genus` on exactly `2p` vertices, sorted by code.
pub fn generate_order(
    strategy: &dyn GenerationStrategy,
    p: usize,
    genus: usize,
    progress: Option<&(dyn Fn(String) + Sync)>,
) -> OrderResult {
    let seeds = strategy.sphere_seeds(p, Some(genus));
    let done = AtomicUsize::new(0);
    let total = seeds.len();
    let codes: BTreeSet<(Code, bool)> = seeds
        .par_iter()
        .map(|seed| {
            let out: Vec<(Code, bool)> = strategy
                .complete(seed)
                .into_iter()
                .filter(|g| g.regular_genus() == Ok(genus))
                .map(|g| (canonical_code(&g), g.is_bipartite()))
                .collect();
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                if k == total || k % 64 == 0 {
                    cb(format!("order {}: {k}/{total} seeds", 2 * p));
                }
            }
            out
        })
        .flatten()
        .collect();
    let mut r = OrderResult { order: 2 * p, seeds: total, ..Default::default() };
    for (c, bip) in codes {
        if bip {
            r.bipartite.push(c);
        } else {
            r.non_bipartite.push(c);
        }
    }
    r
}
