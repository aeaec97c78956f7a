//! Small standard crystallizations used as fixtures and as starting points.

use crate::graph::{ColouredGraph, NUM_COLOURS};

/// Colours 0 and 1 form alternating cycles of lengths `2·lens[k]` laid out consecutively
/// (`0–1` by colour 0, `1–2` by colour 1, ...); colours 2 and 3 join the `i`-th even vertex
/// to the odd vertices `2·s2[i] + 1` and `2·s3[i] + 1`.
pub fn from_cycle_data(lens: &[usize], s2: &[usize], s3: &[usize]) -> Option<ColouredGraph> {
    let p: usize = lens.iter().sum();
    if s2.len() != p || s3.len() != p {
        return None;
    }
    let n = 2 * p;
    let mut rows = vec![[u32::MAX; NUM_COLOURS]; n];
    let mut base = 0;
    for &l in lens {
        for t in 0..l {
            let a = base + 2 * t;
            let b = a + 1;
            let c = base + (2 * t + 2) % (2 * l);
            rows[a][0] = b as u32;
            rows[b][0] = a as u32;
            rows[b][1] = c as u32;
            rows[c][1] = b as u32;
        }
        base += 2 * l;
    }
    for i in 0..p {
        for (c, s) in [(2, s2), (3, s3)] {
            let o = 2 * *s.get(i)? + 1;
            if o >= n {
                return None;
            }
            rows[2 * i][c] = o as u32;
            rows[o][c] = (2 * i) as u32;
        }
    }
    ColouredGraph::from_rows(rows).ok()
}

/// Real projective space `L(2,1)`, order 8.
pub fn rp3() -> ColouredGraph {
    from_cycle_data(&[2, 2], &[2, 3, 0, 1], &[3, 2, 1, 0]).unwrap()
}

/// `L(3,1)`, order 12.
pub fn lens_3_1() -> ColouredGraph {
    from_cycle_data(&[3, 3], &[3, 5, 4, 0, 2, 1], &[4, 3, 5, 1, 0, 2]).unwrap()
}

/// `S² × S¹`, order 8.
pub fn s2_x_s1() -> ColouredGraph {
    from_cycle_data(&[1, 3], &[1, 0, 3, 2], &[2, 1, 3, 0]).unwrap()
}

/// The twisted bundle `S¹ ×~ S²`, order 8 (the genus-one non-orientable crystallization).
pub fn twisted_s2_bundle() -> ColouredGraph {
    ColouredGraph::from_rows(vec![
        [1, 1, 2, 5],
        [0, 0, 3, 6],
        [3, 7, 0, 3],
        [2, 4, 1, 2],
        [5, 3, 7, 7],
        [4, 6, 6, 0],
        [7, 5, 5, 1],
        [6, 2, 4, 4],
    ])
    .unwrap()
}
