//! Graph connected sums and their inverse via condition (#).

use crate::graph::{component_labels, ColouredGraph, NUM_COLOURS};

/// `g1 # g2`: removes `v1` from `g1` and `v2` from `g2` and glues the hanging edges by colour.
///
/// Vertices of `g1` (except `v1`) come first in their original order, then those of `g2`.
pub fn connected_sum(g1: &ColouredGraph, v1: usize, g2: &ColouredGraph, v2: usize) -> ColouredGraph {
    let n1 = g1.order();
    let n2 = g2.order();
    assert!(v1 < n1 && v2 < n2, "vertex out of range");
    let idx1 = |v: usize| if v < v1 { v } else { v - 1 };
    let idx2 = |v: usize| n1 - 1 + if v < v2 { v } else { v - 1 };
    let mut rows = vec![[0u32; NUM_COLOURS]; n1 + n2 - 2];
    for v in (0..n1).filter(|&v| v != v1) {
        for c in 0..NUM_COLOURS {
            let w = g1.neighbour(v, c);
            rows[idx1(v)][c] =
                if w == v1 { idx2(g2.neighbour(v2, c)) } else { idx1(w) } as u32;
        }
    }
    for v in (0..n2).filter(|&v| v != v2) {
        for c in 0..NUM_COLOURS {
            let w = g2.neighbour(v, c);
            rows[idx2(v)][c] =
                if w == v2 { idx1(g1.neighbour(v1, c)) } else { idx2(w) } as u32;
        }
    }
    ColouredGraph::from_rows_unchecked(rows)
}

/// Smallest component size accepted on either side of a condition-(#) cut.
///
/// A single vertex cut off by its own four edges is the trivial decomposition `g = g # S³`
/// and is never reported.
pub const MIN_SPLIT_SIDE: usize = 3;

/// Looks for four edges, one per colour, whose removal leaves two components, scanning
/// colour-0 edges outermost and each colour's edges in `(min, max)` order. Returns the two
/// summands, each capped by one new vertex (the last vertex) that absorbs the hanging edges;
/// the summand containing vertex 0 comes first.
pub fn split_condition_sharp(g: &ColouredGraph) -> Option<(ColouredGraph, ColouredGraph)> {
    let cut = find_sharp_cut(g)?;
    Some(split_along(g, &cut))
}

/// The first qualifying cut as `(u, w)` edges indexed by colour.
pub fn find_sharp_cut(g: &ColouredGraph) -> Option<[(usize, usize); NUM_COLOURS]> {
    let mut found = None;
    scan_cuts(g, &mut |cut| {
        found = Some(cut);
        false
    });
    found
}

/// Every qualifying cut, in scan order. A graph with several prime summands has several.
pub fn sharp_cuts(g: &ColouredGraph) -> Vec<[(usize, usize); NUM_COLOURS]> {
    let mut out = Vec::new();
    scan_cuts(g, &mut |cut| {
        out.push(cut);
        true
    });
    out
}

/// Calls `visit` on each qualifying cut until it returns false.
fn scan_cuts(g: &ColouredGraph, visit: &mut dyn FnMut([(usize, usize); NUM_COLOURS]) -> bool) {
    let n = g.order();
    if n < 2 * MIN_SPLIT_SIDE {
        return;
    }
    let edges: Vec<Vec<(usize, usize)>> = (0..NUM_COLOURS).map(|c| g.edges(c)).collect();
    let mut rows: Vec<[u32; NUM_COLOURS]> = g.rows().to_vec();
    // Removed edges become self-loops, which component_labels ignores harmlessly.
    let set = |rows: &mut Vec<[u32; NUM_COLOURS]>, c: usize, (a, b): (usize, usize), cut: bool| {
        rows[a][c] = if cut { a } else { b } as u32;
        rows[b][c] = if cut { b } else { a } as u32;
    };
    for &e0 in &edges[0] {
        set(&mut rows, 0, e0, true);
        for &e1 in &edges[1] {
            set(&mut rows, 1, e1, true);
            for &e2 in &edges[2] {
                set(&mut rows, 2, e2, true);
                for &e3 in &edges[3] {
                    set(&mut rows, 3, e3, true);
                    let (label, count) = component_labels(&rows, 0b1111);
                    let ok = count == 2 && {
                        let side0 = label.iter().filter(|&&l| l == 0).count();
                        let crossing = [e0, e1, e2, e3].iter().all(|&(a, b)| label[a] != label[b]);
                        crossing && side0 >= MIN_SPLIT_SIDE && n - side0 >= MIN_SPLIT_SIDE
                    };
                    set(&mut rows, 3, e3, false);
                    if ok && !visit([e0, e1, e2, e3]) {
                        return;
                    }
                }
                set(&mut rows, 2, e2, false);
            }
            set(&mut rows, 1, e1, false);
        }
        set(&mut rows, 0, e0, false);
    }
}

/// Splits `g` along a 4-edge cut (one edge per colour, each crossing the cut).
pub fn split_along(g: &ColouredGraph, cut: &[(usize, usize); NUM_COLOURS]) -> (ColouredGraph, ColouredGraph) {
    let n = g.order();
    let mut rows: Vec<[u32; NUM_COLOURS]> = g.rows().to_vec();
    for (c, &(a, b)) in cut.iter().enumerate() {
        rows[a][c] = a as u32;
        rows[b][c] = b as u32;
    }
    let (label, count) = component_labels(&rows, 0b1111);
    assert_eq!(count, 2, "cut does not separate the graph");
    let side = |l: u32| -> ColouredGraph {
        let keep: Vec<usize> = (0..n).filter(|&v| label[v] == l).collect();
        let cap = keep.len() as u32;
        let mut out = ColouredGraph::renumber_with_loops(&rows, &keep);
        let mut cap_row = [0u32; NUM_COLOURS];
        for (c, &(a, b)) in cut.iter().enumerate() {
            let inside = if label[a] == l { a } else { b };
            let k = keep.binary_search(&inside).unwrap();
            out[k][c] = cap;
            cap_row[c] = k as u32;
        }
        out.push(cap_row);
        ColouredGraph::from_rows_unchecked(out)
    };
    (side(0), side(1))
}

impl ColouredGraph {
    /// Like `renumber` but tolerates self-loops (cut edges) in `rows`.
    fn renumber_with_loops(rows: &[[u32; NUM_COLOURS]], keep: &[usize]) -> Vec<[u32; NUM_COLOURS]> {
        let mut index = vec![u32::MAX; rows.len()];
        for (k, &v) in keep.iter().enumerate() {
            index[v] = k as u32;
        }
        keep.iter()
            .map(|&v| {
                let mut r = [0u32; NUM_COLOURS];
                for c in 0..NUM_COLOURS {
                    r[c] = index[rows[v][c] as usize];
                }
                r
            })
            .collect()
    }
}

/// Recursively splits along condition (#) until no piece splits further.
pub fn prime_pieces(g: &ColouredGraph) -> Vec<ColouredGraph> {
    let mut out = Vec::new();
    let mut stack = vec![g.clone()];
    while let Some(h) = stack.pop() {
        match split_condition_sharp(&h) {
            Some((a, b)) => {
                stack.push(b);
                stack.push(a);
            }
            None => out.push(h),
        }
    }
    out
}
