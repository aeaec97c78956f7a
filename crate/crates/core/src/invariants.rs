//! Homology and fundamental group of the manifold encoded by a gem.
//!
//! The pseudo-complex `K(Γ)` has one vertex per ĉ-residue (labelled `c`), one edge per
//! bicoloured `{x,y}`-cycle (joining the labels of the complementary colours) and one
//! triangle per Γ-edge. Both invariants are read off its 2-skeleton.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;

use crate::graph::{ColourSet, ColouredGraph, NUM_COLOURS};
use crate::snf::{smith_form, SparseRow};

/// `Z^free ⊕ Z/t1 ⊕ ... ⊕ Z/tk` with each `ti > 1` dividing the next.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomologyResult {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl HomologyResult {
    pub fn new(free_rank: usize, torsion: &[u64]) -> Self {
        HomologyResult { free_rank, torsion: torsion.iter().map(|&t| BigUint::from(t)).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigUint> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

/// Counts of residues by number of colours: `[vertices, edges, triangles, tetrahedra]` of `K(Γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceVector(pub [usize; 4]);

impl fmt::Display for FaceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

pub fn face_vector(g: &ColouredGraph) -> FaceVector {
    let three: usize = (0..NUM_COLOURS).map(|c| g.residue_count(ColourSet::hat(c))).sum();
    let mut two = 0;
    for i in 0..NUM_COLOURS {
        for j in i + 1..NUM_COLOURS {
            two += g.bicoloured_cycles(i, j);
        }
    }
    FaceVector([three, two, g.order() * NUM_COLOURS / 2, g.order()])
}

/// 2-skeleton of `K(Γ)`.
struct Skeleton {
    vertex_count: usize,
    /// `(tail, head)` per edge, edge labelled `{a<b}` runs from the `a`-vertex to the `b`-vertex.
    edges: Vec<(usize, usize)>,
    /// `[E_ab, E_bd, E_ad]` per triangle, boundary `E_ab + E_bd - E_ad`.
    triangles: Vec<[usize; 3]>,
}

fn skeleton(g: &ColouredGraph) -> Skeleton {
    let n = g.order();
    let mut vlabel: Vec<Vec<u32>> = Vec::new();
    let mut voffset = [0usize; NUM_COLOURS];
    let mut vertex_count = 0;
    for c in 0..NUM_COLOURS {
        let (l, k) = g.residue_labels(ColourSet::hat(c));
        voffset[c] = vertex_count;
        vertex_count += k;
        vlabel.push(l);
    }
    let vid = |c: usize, v: usize| voffset[c] + vlabel[c][v] as usize;
    // edge labelled {a,b} = cycle of the complementary two colours
    let mut elabel = vec![vec![0usize; n]; 16];
    let mut edges = Vec::new();
    for a in 0..NUM_COLOURS {
        for b in a + 1..NUM_COLOURS {
            let set = ColourSet::pair(a, b);
            let (l, k) = g.residue_labels(set.complement());
            let base = edges.len();
            let mut rep = vec![usize::MAX; k];
            for v in 0..n {
                if rep[l[v] as usize] == usize::MAX {
                    rep[l[v] as usize] = v;
                }
                elabel[set.bits() as usize][v] = base + l[v] as usize;
            }
            for &v in &rep {
                edges.push((vid(a, v), vid(b, v)));
            }
        }
    }
    let mut triangles = Vec::new();
    for c in 0..NUM_COLOURS {
        let [a, b, d] = {
            let mut it = ColourSet::hat(c).iter();
            [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
        };
        let e = |x: usize, y: usize, v: usize| elabel[ColourSet::pair(x, y).bits() as usize][v];
        for (u, _) in g.edges(c) {
            triangles.push([e(a, b, u), e(b, d, u), e(a, d, u)]);
        }
    }
    Skeleton { vertex_count, edges, triangles }
}

/// First integral homology of the manifold encoded by the gem `g`.
pub fn first_homology(g: &ColouredGraph) -> HomologyResult {
    let k = skeleton(g);
    let d2: Vec<SparseRow> =
        k.triangles.iter().map(|t| vec![(t[0], 1), (t[1], 1), (t[2], -1)]).collect();
    let s = smith_form(&d2, k.edges.len());
    // the 1-skeleton is connected, so rank ∂1 = vertices - 1
    let cycles = k.edges.len() - (k.vertex_count - 1);
    HomologyResult { free_rank: cycles - s.rank, torsion: s.torsion() }
}

/// A finite group presentation; letter `±(g+1)` is generator `g` or its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Self {
        let mut p = GroupPresentation { generators, relators };
        for r in &mut p.relators {
            *r = cyclic_reduce(free_reduce(r));
        }
        p.relators.retain(|r| !r.is_empty());
        p
    }

    /// Abelianization via Smith normal form of the exponent-sum matrix.
    pub fn abelianization(&self) -> HomologyResult {
        let rows: Vec<SparseRow> = self
            .relators
            .iter()
            .map(|r| {
                let mut sums = vec![0i64; self.generators];
                for &x in r {
                    sums[x.unsigned_abs() as usize - 1] += x.signum() as i64;
                }
                sums.into_iter().enumerate().filter(|e| e.1 != 0).collect()
            })
            .collect();
        let s = smith_form(&rows, self.generators);
        HomologyResult { free_rank: self.generators - s.rank, torsion: s.torsion() }
    }

    /// Total relator length.
    pub fn length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }
}

fn letter(x: i32) -> String {
    let g = (x.unsigned_abs() - 1) as usize;
    let name = if g < 26 { ((b'a' + g as u8) as char).to_string() } else { format!("x{g}") };
    if x < 0 {
        format!("{name}^-1")
    } else {
        name
    }
}

impl fmt::Display for GroupPresentation {
    /// `<a,b | r1, r2>` with inverses written `a^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.generators as i32).map(letter).collect();
        let rels: Vec<String> = self
            .relators
            .iter()
            .map(|r| r.iter().map(|&x| letter(x)).collect::<Vec<_>>().join(""))
            .collect();
        write!(f, "<{} | {}>", gens.join(","), rels.join(", "))
    }
}

pub fn free_reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn cyclic_reduce(mut w: Vec<i32>) -> Vec<i32> {
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

/// Edge-path presentation of `π₁` of the manifold encoded by `g`: generators are the
/// edges of `K(Γ)` outside a breadth-first spanning tree, relators the triangle boundaries.
pub fn fundamental_group(g: &ColouredGraph) -> GroupPresentation {
    let k = skeleton(g);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k.vertex_count];
    for (e, &(a, b)) in k.edges.iter().enumerate() {
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut in_tree = vec![false; k.edges.len()];
    let mut seen = vec![false; k.vertex_count];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &e in &incident[v] {
            let (a, b) = k.edges[e];
            let w = if a == v { b } else { a };
            if !seen[w] {
                seen[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    let mut gen_of = vec![0i32; k.edges.len()];
    let mut count = 0;
    for e in 0..k.edges.len() {
        if !in_tree[e] {
            count += 1;
            gen_of[e] = count;
        }
    }
    let relators = k
        .triangles
        .iter()
        .map(|t| {
            let mut w = Vec::new();
            for (e, s) in [(t[0], 1), (t[1], 1), (t[2], -1)] {
                if gen_of[e] != 0 {
                    w.push(s * gen_of[e]);
                }
            }
            w
        })
        .collect();
    GroupPresentation::new(count as usize, relators)
}

/// Where `x` (or `x⁻¹`) occurs exactly once in `r`, the word `x = rest` it solves to.
fn solve_for(r: &[i32], g: i32) -> Option<Vec<i32>> {
    let positions: Vec<usize> = (0..r.len()).filter(|&i| r[i].abs() == g).collect();
    if positions.len() != 1 {
        return None;
    }
    let p = positions[0];
    // r = u x^s v  =>  x^s = u⁻¹ v⁻¹  (cyclically: x^s = (v u)⁻¹)
    let mut vu: Vec<i32> = r[p + 1..].to_vec();
    vu.extend_from_slice(&r[..p]);
    let inv: Vec<i32> = vu.iter().rev().map(|&x| -x).collect();
    Some(if r[p] > 0 { inv } else { vu })
}

/// Least cyclic rotation of `r` or of its inverse.
fn canonical_relator(r: &[i32]) -> Vec<i32> {
    let inv: Vec<i32> = r.iter().rev().map(|&x| -x).collect();
    let mut best = r.to_vec();
    for w in [r, &inv[..]] {
        for k in 0..w.len() {
            let mut c = w[k..].to_vec();
            c.extend_from_slice(&w[..k]);
            if c < best {
                best = c;
            }
        }
    }
    best
}

/// Deterministic greedy Tietze simplification: repeatedly eliminates a generator occurring
/// exactly once in some relator (shortest such relator first), then drops duplicate and
/// trivial relators. Stops when nothing applies or `budget` eliminations were made.
pub fn tietze_simplify(p: &GroupPresentation, budget: usize) -> GroupPresentation {
    let mut gens = p.generators;
    let mut rels: Vec<Vec<i32>> = p.relators.clone();
    for _ in 0..budget {
        let mut choice: Option<(usize, i32, Vec<i32>)> = None;
        for (ri, r) in rels.iter().enumerate() {
            if choice.as_ref().map_or(false, |c| rels[c.0].len() <= r.len()) {
                continue;
            }
            for g in 1..=gens as i32 {
                if let Some(sub) = solve_for(r, g) {
                    choice = Some((ri, g, sub));
                    break;
                }
            }
        }
        let Some((ri, g, sub)) = choice else { break };
        rels.remove(ri);
        let inv: Vec<i32> = sub.iter().rev().map(|&x| -x).collect();
        let last = gens as i32;
        for r in &mut rels {
            let mut w = Vec::with_capacity(r.len());
            for &x in r.iter() {
                if x == g {
                    w.extend_from_slice(&sub);
                } else if x == -g {
                    w.extend_from_slice(&inv);
                } else {
                    w.push(x);
                }
            }
            // renumber the last generator into the freed slot
            for x in &mut w {
                if x.abs() == last {
                    *x = x.signum() * g;
                }
            }
            *r = cyclic_reduce(free_reduce(&w));
        }
        gens -= 1;
        rels.retain(|r| !r.is_empty());
        for r in &mut rels {
            *r = canonical_relator(r);
        }
        let mut seen = std::collections::HashSet::new();
        rels.retain(|r| seen.insert(r.clone()));
    }
    rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    GroupPresentation { generators: gens, relators: rels }
}

/// Simplified `π₁` presentation with the default elimination budget.
pub fn fundamental_group_simplified(g: &ColouredGraph) -> GroupPresentation {
    let p = fundamental_group(g);
    tietze_simplify(&p, p.generators)
}

fn power(x: i32, k: i64) -> Vec<i32> {
    let l = if k < 0 { -x } else { x };
    vec![l; k.unsigned_abs() as usize]
}

fn equate(x: &[i32], y: &[i32]) -> Vec<i32> {
    let mut w = x.to_vec();
    w.extend(y.iter().rev().map(|&l| -l));
    w
}

/// `⟨a,b | a^α1 = b^α2 = (ab)^α3⟩`, `α1, α2 > 0`, `α3` of either sign; `a = 1`, `b = 2`.
pub fn seifert_group_first(a1: i64, a2: i64, a3: i64) -> GroupPresentation {
    let ab: Vec<i32> = (0..a3.unsigned_abs()).flat_map(|_| if a3 > 0 { [1, 2] } else { [-2, -1] }).collect();
    let a = power(1, a1);
    GroupPresentation::new(2, vec![equate(&a, &power(2, a2)), equate(&a, &ab)])
}

/// `⟨a,b | a^α3 = b^α2 = (a^{-ε} b^ε)^α1⟩`, all `α > 0`, `ε = ±1`.
pub fn seifert_group_second(a1: i64, a2: i64, a3: i64, eps: i32) -> GroupPresentation {
    let w: Vec<i32> = (0..a1.unsigned_abs()).flat_map(|_| [-eps, 2 * eps]).collect();
    let a = power(1, a3);
    GroupPresentation::new(2, vec![equate(&a, &power(2, a2)), equate(&a, &w)])
}

/// The group `⟨a,b | a⁵ = b³ = (ab⁻²)⁻³⟩`.
pub fn seifert_group_exceptional() -> GroupPresentation {
    // (ab⁻²)⁻³ = (b²a⁻¹)³
    let w: Vec<i32> = (0..3).flat_map(|_| [2, 2, -1]).collect();
    let a5 = power(1, 5);
    GroupPresentation::new(2, vec![equate(&a5, &power(2, 3)), equate(&a5, &w)])
}

/// `H₁` of the Seifert manifold `(S², (α1,β1), ..., (αk,βk))` from its standard presentation
/// `⟨q_i, h | q_i^{α_i} h^{β_i}, q_1 ⋯ q_k⟩` (abelian part).
pub fn seifert_space_homology(fibres: &[(i64, i64)]) -> HomologyResult {
    let k = fibres.len();
    let h = k; // column of the fibre class
    let mut rows: Vec<SparseRow> = fibres
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let mut r: SparseRow = vec![(i, a)];
            if b != 0 {
                r.push((h, b));
            }
            r
        })
        .collect();
    rows.push((0..k).map(|i| (i, 1)).collect());
    let s = smith_form(&rows, k + 1);
    HomologyResult { free_rank: k + 1 - s.rank, torsion: s.torsion() }
}
