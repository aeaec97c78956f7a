//! Independent reference computations used by the integration and acceptance tests.
//! Nothing here calls into the library's generation, move or homology code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gemcensus::catalog::CatalogueEntry;
use gemcensus::generation::{generate_order, Pruned};
use gemcensus::{canonical_code, Code, ColouredGraph};

pub type Rows = Vec<[usize; 4]>;

pub fn rows_of(g: &ColouredGraph) -> Rows {
    g.rows().iter().map(|r| r.map(|x| x as usize)).collect()
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

/// Component label per vertex (labels `0..k`) of the subgraph with the given colours.
pub fn components(rows: &[[usize; 4]], colours: &[usize]) -> (Vec<usize>, usize) {
    let n = rows.len();
    let mut p: Vec<usize> = (0..n).collect();
    for v in 0..n {
        for &c in colours {
            let (a, b) = (find(&mut p, v), find(&mut p, rows[v][c]));
            if a != b {
                p[a] = b;
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = vec![0; n];
    let mut k = 0;
    for v in 0..n {
        let r = find(&mut p, v);
        if label[r] == usize::MAX {
            label[r] = k;
            k += 1;
        }
        out[v] = label[r];
    }
    (out, k)
}

fn others(skip: &[usize]) -> Vec<usize> {
    (0..4).filter(|c| !skip.contains(c)).collect()
}

pub fn is_contracted(rows: &[[usize; 4]]) -> bool {
    (0..4).all(|c| components(rows, &others(&[c])).1 == 1)
}

/// Every 3-residue is a sphere: `V - E + F = 2` per component.
pub fn is_gem(rows: &[[usize; 4]]) -> bool {
    (0..4).all(|c| {
        let cols = others(&[c]);
        let (comp, k) = components(rows, &cols);
        let mut v_count = vec![0i64; k];
        for v in 0..rows.len() {
            v_count[comp[v]] += 1;
        }
        let mut faces = vec![0i64; k];
        for i in 0..3 {
            for j in i + 1..3 {
                let (lab, m) = components(rows, &[cols[i], cols[j]]);
                let mut seen = vec![false; m];
                for v in 0..rows.len() {
                    if !seen[lab[v]] {
                        seen[lab[v]] = true;
                        faces[comp[v]] += 1;
                    }
                }
            }
        }
        (0..k).all(|r| v_count[r] - 3 * v_count[r] / 2 + faces[r] == 2)
    })
}

pub fn cycles(rows: &[[usize; 4]], i: usize, j: usize) -> usize {
    components(rows, &[i, j]).1
}

/// `min g_{0i} - 1`, valid for crystallizations.
pub fn genus(rows: &[[usize; 4]]) -> usize {
    (1..4).map(|i| cycles(rows, 0, i)).min().unwrap() - 1
}

/// No two distinct equally-coloured edges lie on common bicoloured cycles for two or more
/// of the other colours.
pub fn is_rigid(rows: &[[usize; 4]]) -> bool {
    let n = rows.len();
    for c in 0..4 {
        let labels: Vec<(usize, Vec<usize>)> =
            others(&[c]).into_iter().map(|j| (j, components(rows, &[c, j]).0)).collect();
        let edges: Vec<usize> = (0..n).filter(|&v| v < rows[v][c]).collect();
        for (a, &e) in edges.iter().enumerate() {
            for &f in &edges[a + 1..] {
                let shared = labels.iter().filter(|(_, l)| l[e] == l[f]).count();
                if shared >= 2 {
                    return false;
                }
            }
        }
    }
    true
}

fn seed_is_rigid(rows: &[[usize; 4]]) -> bool {
    (0..3).all(|c| {
        let others: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let labels: Vec<Vec<usize>> = others.iter().map(|&j| components(rows, &[c, j]).0).collect();
        let edges: Vec<usize> = (0..rows.len()).filter(|&v| v < rows[v][c]).collect();
        edges.iter().enumerate().all(|(a, &e)| edges[a + 1..].iter().all(|&f| labels.iter().any(|l| l[e] != l[f])))
    })
}

pub fn is_bipartite(rows: &[[usize; 4]]) -> bool {
    let n = rows.len();
    let mut side = vec![u8::MAX; n];
    side[0] = 0;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for c in 0..4 {
            let w = rows[v][c];
            if side[w] == u8::MAX {
                side[w] = 1 - side[v];
                stack.push(w);
            } else if side[w] == side[v] {
                return false;
            }
        }
    }
    true
}

/// Connected 3-coloured cubic graphs on `n` vertices, generated with breadth-first labels
/// (each graph appears at least once per root) and reduced to one per isomorphism class.
pub fn three_coloured_graphs(n: usize) -> Vec<Vec<[usize; 3]>> {
    fn rec(rows: &mut Vec<[usize; 3]>, n: usize, out: &mut BTreeSet<Vec<[usize; 3]>>) {
        let slot = (0..rows.len()).flat_map(|v| (0..3).map(move |c| (v, c))).find(|&(v, c)| rows[v][c] == usize::MAX);
        let Some((v, c)) = slot else {
            if rows.len() == n {
                out.insert(canonical3(rows));
            }
            return;
        };
        for w in v + 1..rows.len() {
            if rows[w][c] == usize::MAX {
                rows[v][c] = w;
                rows[w][c] = v;
                rec(rows, n, out);
                rows[v][c] = usize::MAX;
                rows[w][c] = usize::MAX;
            }
        }
        if rows.len() < n {
            let w = rows.len();
            rows.push([usize::MAX; 3]);
            rows[v][c] = w;
            rows[w][c] = v;
            rec(rows, n, out);
            rows.pop();
            rows[v][c] = usize::MAX;
        }
    }
    let mut out = BTreeSet::new();
    if n >= 2 {
        rec(&mut vec![[usize::MAX; 3]], n, &mut out);
    }
    out.into_iter().collect()
}

/// Minimal breadth-first relabelling over all roots and colour permutations.
fn canonical3(rows: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let n = rows.len();
    let mut best: Option<Vec<[usize; 3]>> = None;
    for root in 0..n {
        for p in &perms {
            let mut label = vec![usize::MAX; n];
            let mut order = vec![root];
            label[root] = 0;
            let mut i = 0;
            while i < order.len() {
                let v = order[i];
                for &c in p {
                    let w = rows[v][c];
                    if label[w] == usize::MAX {
                        label[w] = order.len();
                        order.push(w);
                    }
                }
                i += 1;
            }
            let cand: Vec<[usize; 3]> = order.iter().map(|&v| [label[rows[v][p[0]]], label[rows[v][p[1]]], label[rows[v][p[2]]]]).collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// Rigid genus-`genus` crystallizations of order `n` by trying every colour-3 matching on
/// every planar 3-coloured graph. Returns `(bipartite codes, non-bipartite codes)`.
pub fn brute_force_census(n: usize, genus_target: usize) -> (BTreeSet<Code>, BTreeSet<Code>) {
    let mut bip = BTreeSet::new();
    let mut non = BTreeSet::new();
    for seed in three_coloured_graphs(n) {
        let rows: Rows = seed.iter().map(|r| [r[0], r[1], r[2], usize::MAX]).collect();
        let faces: usize = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| cycles(&rows, i, j)).sum();
        if faces != n / 2 + 2 {
            continue;
        }
        // in a crystallization g_ij = g_kl for complementary pairs, so the genus is already
        // min g_ij - 1 over the seed's pairs; a ρ-pair inside the seed stays one in the graph
        let min_cycles = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| cycles(&rows, i, j)).min().unwrap();
        if min_cycles != genus_target + 1 || !seed_is_rigid(&rows) {
            continue;
        }
        let mut rows = rows;
        matchings(&mut rows, &mut |r| {
            if is_contracted(r) && is_gem(r) && genus(r) == genus_target && is_rigid(r) {
                let g = ColouredGraph::from_rows(r.iter().map(|x| x.map(|y| y as u32)).collect()).unwrap();
                if is_bipartite(r) {
                    bip.insert(canonical_code(&g));
                } else {
                    non.insert(canonical_code(&g));
                }
            }
        });
    }
    (bip, non)
}

fn matchings(rows: &mut Rows, f: &mut dyn FnMut(&Rows)) {
    let Some(v) = (0..rows.len()).find(|&v| rows[v][3] == usize::MAX) else {
        f(rows);
        return;
    };
    for w in v + 1..rows.len() {
        if rows[w][3] == usize::MAX {
            rows[v][3] = w;
            rows[w][3] = v;
            matchings(rows, f);
            rows[v][3] = usize::MAX;
            rows[w][3] = usize::MAX;
        }
    }
}

/// `H₁(K(Γ))` as `(free rank, torsion factors > 1)`, from the simplicial chain complex whose
/// simplices are residues and whose vertex order is the colour order.
pub fn homology_oracle(rows: &[[usize; 4]]) -> (usize, Vec<u64>) {
    let n = rows.len();
    // vertices of K: c-vertices are the components of the other three colours
    let vert: Vec<(Vec<usize>, usize)> = (0..4).map(|c| components(rows, &others(&[c]))).collect();
    let mut vbase = [0usize; 4];
    let mut nv = 0;
    for c in 0..4 {
        vbase[c] = nv;
        nv += vert[c].1;
    }
    // edges of K: {a,b}-cycles, spanning the vertices coloured by the complement
    let mut pairs = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            pairs.push((a, b));
        }
    }
    let cyc: Vec<(Vec<usize>, usize)> = pairs.iter().map(|&(a, b)| components(rows, &[a, b])).collect();
    let mut ebase = vec![0usize; pairs.len()];
    let mut ne = 0;
    for k in 0..pairs.len() {
        ebase[k] = ne;
        ne += cyc[k].1;
    }
    let pair_index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut d1 = vec![vec![0i128; ne]; nv];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let comp = others(&[a, b]);
        let (lo, hi) = (comp[0], comp[1]);
        let mut done = vec![false; cyc[k].1];
        for v in 0..n {
            let e = cyc[k].0[v];
            if !done[e] {
                done[e] = true;
                d1[vbase[hi] + vert[hi].0[v]][ebase[k] + e] += 1;
                d1[vbase[lo] + vert[lo].0[v]][ebase[k] + e] -= 1;
            }
        }
    }
    // triangles of K: graph edges; an a-edge spans the three other colours
    let mut d2 = vec![Vec::new(); ne];
    let mut nt = 0;
    for a in 0..4 {
        let verts = others(&[a]);
        for v in 0..n {
            if v > rows[v][a] {
                continue;
            }
            for col in d2.iter_mut() {
                col.push(0i128);
            }
            for (i, &drop) in verts.iter().enumerate() {
                let k = pair_index(a, drop);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                d2[ebase[k] + cyc[k].0[v]][nt] += sign;
            }
            nt += 1;
        }
    }
    let (rank1, _) = diagonal(d1);
    let (rank2, torsion) = diagonal(d2);
    let free = ne - rank1 - rank2;
    (free, torsion.into_iter().filter(|&t| t > 1).collect())
}

/// Rank and invariant factors of an integer matrix by plain Smith reduction.
fn diagonal(mut m: Vec<Vec<i128>>) -> (usize, Vec<u64>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest non-zero entry in the remaining block becomes the pivot
        let mut pivot = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && pivot.map_or(true, |(pi, pj): (usize, usize)| m[i][j].abs() < m[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for i in t..rows {
                        m[i][j] -= q * m[i][t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // the pivot must divide the rest of the block
                let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row t / column t into the pivot
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].unsigned_abs() as u64);
        t += 1;
    }
    let rank = diag.len();
    (rank, diag)
}

/// The genus-two census from the library generator, orders `14..=max_order`.
pub fn census(max_order: usize) -> Vec<CatalogueEntry> {
    let mut out = Vec::new();
    for p in 7..=max_order / 2 {
        let r = generate_order(&Pruned, p, 2, None);
        for (codes, bipartite) in [(&r.bipartite, true), (&r.non_bipartite, false)] {
            out.extend(codes.iter().map(|c| CatalogueEntry { code: c.clone(), bipartite, genus: 2 }));
        }
    }
    out
}
