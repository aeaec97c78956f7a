//! Canonical codes for coloured graphs.
//!
//! For every root vertex and every permutation of the colours, the graph is numbered
//! breadth-first, visiting neighbours in permuted-colour order; the neighbour numbers are
//! emitted vertex by vertex. The code is the lexicographically smallest emission. Two
//! connected graphs get equal codes exactly when they are colour-isomorphic.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{ColouredGraph, GraphError, NUM_COLOURS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("malformed code: {0}")]
    MalformedCode(String),
}

/// Canonical string identifying a colour-isomorphism class.
///
/// Text form: `<order>;<w1>,<w2>,...` where the `w` are neighbour numbers in
/// emission order (four per vertex). Ordering is by `(order, words)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    order: u32,
    words: Vec<u32>,
}

impl Code {
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.order)?;
        for (k, w) in self.words.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code({self})")
    }
}

impl FromStr for Code {
    type Err = CodeError;

    /// Syntactic parse only; use [`from_code`] to also check canonicity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| CodeError::MalformedCode(format!("{why}: {s:?}"));
        let (order, rest) = s.trim().split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let order: u32 = order.trim().parse().map_err(|_| bad("bad order"))?;
        if order == 0 || order % 2 != 0 {
            return Err(bad("order must be even and positive"));
        }
        let words = rest
            .split(',')
            .map(|w| w.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad neighbour number"))?;
        if words.len() != NUM_COLOURS * order as usize {
            return Err(bad("wrong number of neighbour numbers"));
        }
        if words.iter().any(|&w| w >= order) {
            return Err(bad("neighbour number out of range"));
        }
        Ok(Code { order, words })
    }
}

/// All permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                rec(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Minimal emission over all roots and colour permutations of a connected `K`-coloured graph.
pub(crate) fn canonical_words<const K: usize>(rows: &[[u32; K]]) -> Vec<u32> {
    let n = rows.len();
    let perms = permutations(K);
    let mut best: Vec<u32> = Vec::new();
    let mut cand = vec![0u32; K * n];
    let mut number = vec![u32::MAX; n];
    let mut order = vec![0usize; n];
    for perm in &perms {
        for root in 0..n {
            number.iter_mut().for_each(|x| *x = u32::MAX);
            number[root] = 0;
            order[0] = root;
            let mut next = 1usize;
            let mut pos = 0usize;
            // `less` becomes true once the candidate is strictly below `best`.
            let mut less = best.is_empty();
            let mut aborted = false;
            'emit: for k in 0..n {
                let v = order[k];
                for &c in perm {
                    let w = rows[v][c] as usize;
                    if number[w] == u32::MAX {
                        number[w] = next as u32;
                        order[next] = w;
                        next += 1;
                    }
                    let x = number[w];
                    if !less {
                        if x > best[pos] {
                            aborted = true;
                            break 'emit;
                        }
                        if x < best[pos] {
                            less = true;
                        }
                    }
                    cand[pos] = x;
                    pos += 1;
                }
            }
            if !aborted && less && next == n {
                best.clear();
                best.extend_from_slice(&cand);
            }
        }
    }
    best
}

/// Canonical code of a connected 4-coloured graph.
pub fn canonical_code(g: &ColouredGraph) -> Code {
    Code { order: g.order() as u32, words: canonical_words(g.rows()) }
}

/// Graph described by a code. Rejects strings that are not the canonical code of their graph.
pub fn from_code(code: &Code) -> Result<ColouredGraph, CodeError> {
    let n = code.order();
    let rows = (0..n)
        .map(|k| {
            let mut r = [0u32; NUM_COLOURS];
            r.copy_from_slice(&code.words[NUM_COLOURS * k..NUM_COLOURS * (k + 1)]);
            r
        })
        .collect();
    let g = ColouredGraph::from_rows(rows).map_err(|e: GraphError| {
        CodeError::MalformedCode(format!("{code}: {e}"))
    })?;
    if &canonical_code(&g) != code {
        return Err(CodeError::MalformedCode(format!("{code}: not canonical")));
    }
    Ok(g)
}

/// Parses and decodes a code string in one step.
pub fn graph_from_code_str(s: &str) -> Result<ColouredGraph, CodeError> {
    from_code(&s.parse()?)
}
