//! Smith normal form of sparse integer matrices.
//!
//! Unit pivots are eliminated sparsely first; whatever remains is diagonalised densely
//! and the diagonal turned into invariant factors. Arithmetic runs in `i64` with
//! overflow checks and is redone in arbitrary precision when a check fails.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// A sparse row: `(column, value)` pairs with strictly increasing columns and nonzero values.
pub type SparseRow = Vec<(usize, i64)>;

/// Rank and invariant factors (all `> 0`, each dividing the next) of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub rank: usize,
    pub factors: Vec<BigUint>,
}

impl SmithForm {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigUint> {
        self.factors.iter().filter(|f| !f.is_one()).cloned().collect()
    }
}

trait Ring: Clone + Zero + One + PartialEq + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul {}
impl<T> Ring for T where T: Clone + Zero + One + PartialEq + PartialOrd + Signed + CheckedAdd + CheckedSub + CheckedMul {}

struct Overflow;

fn axpy<T: Ring>(row: &[(usize, T)], factor: &T, pivot: &[(usize, T)]) -> Result<Vec<(usize, T)>, Overflow> {
    // row - factor * pivot
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let ca = row.get(a).map_or(usize::MAX, |e| e.0);
        let cb = pivot.get(b).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(row[a].clone());
            a += 1;
        } else {
            let prod = factor.checked_mul(&pivot[b].1).ok_or(Overflow)?;
            let v = if ca == cb {
                let v = row[a].1.checked_sub(&prod).ok_or(Overflow)?;
                a += 1;
                v
            } else {
                T::zero().checked_sub(&prod).ok_or(Overflow)?
            };
            b += 1;
            if !v.is_zero() {
                out.push((cb, v));
            }
        }
    }
    Ok(out)
}

/// Sparse elimination of unit pivots; returns the number of pivots and the leftover rows.
fn eliminate_units<T: Ring>(mut rows: Vec<Vec<(usize, T)>>, ncols: usize) -> Result<(usize, Vec<Vec<(usize, T)>>), Overflow> {
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c].push(r);
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut rank = 0;
    loop {
        // pivot: unit entry minimising (row length) * (column length)
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if !alive[r] || row.is_empty() {
                continue;
            }
            for (c, v) in row {
                if v.abs().is_one() {
                    let cost = row.len() * col_rows[*c].len();
                    if best.map_or(true, |b| cost < b.2) {
                        best = Some((r, *c, cost));
                    }
                }
            }
            if best.map_or(false, |b| b.2 <= 2) {
                break;
            }
        }
        let Some((pr, pc, _)) = best else { break };
        alive[pr] = false;
        rank += 1;
        let pivot = std::mem::take(&mut rows[pr]);
        let pv = pivot.iter().find(|e| e.0 == pc).unwrap().1.clone();
        let others = std::mem::take(&mut col_rows[pc]);
        for r in others {
            if !alive[r] {
                continue;
            }
            let Ok(pos) = rows[r].binary_search_by_key(&pc, |e| e.0) else { continue };
            // pv is a unit, so pv⁻¹ = pv
            let factor = rows[r][pos].1.checked_mul(&pv).ok_or(Overflow)?;
            let new = axpy(&rows[r], &factor, &pivot)?;
            for &(c, _) in &new {
                if c != pc && rows[r].binary_search_by_key(&c, |e| e.0).is_err() {
                    col_rows[c].push(r);
                }
            }
            rows[r] = new;
        }
        // column pc is now zero outside the pivot row; the pivot row itself is dropped,
        // which is a column operation against the unit.
    }
    let rest = rows.into_iter().zip(alive).filter(|(r, a)| *a && !r.is_empty()).map(|(r, _)| r).collect();
    Ok((rank, rest))
}

/// Diagonal of a dense matrix after unimodular row and column operations.
fn dense_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        let p = m[t][t].clone();
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = m[i][t].div_floor(&p);
            for j in t..cols {
                let d = &q * &m[t][j];
                m[i][j] -= d;
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = m[t][j].div_floor(&p);
            for i in t..rows {
                let d = &q * &m[i][t];
                m[i][j] -= d;
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if clean {
            diag.push(m[t][t].abs());
            t += 1;
        }
    }
    diag
}

/// Turns a diagonal into invariant factors by repeated gcd/lcm exchange.
fn normalise(mut d: Vec<BigInt>) -> Vec<BigUint> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.into_iter().map(|x| x.magnitude().clone()).collect()
}

fn smith_generic<T: Ring + Into<BigInt>>(rows: Vec<Vec<(usize, T)>>, ncols: usize) -> Result<SmithForm, Overflow> {
    let (units, rest) = eliminate_units(rows, ncols)?;
    let mut used: Vec<usize> = rest.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
    used.sort_unstable();
    used.dedup();
    let dense: Vec<Vec<BigInt>> = rest
        .into_iter()
        .map(|r| {
            let mut d = vec![BigInt::zero(); used.len()];
            for (c, v) in r {
                d[used.binary_search(&c).unwrap()] = v.into();
            }
            d
        })
        .collect();
    let diag = dense_diagonal(dense);
    let mut factors: Vec<BigUint> = vec![BigUint::one(); units];
    factors.extend(normalise(diag));
    Ok(SmithForm { rank: factors.len(), factors })
}

/// Smith normal form of the `rows × ncols` matrix given by sparse rows.
pub fn smith_form(rows: &[SparseRow], ncols: usize) -> SmithForm {
    let clean = |r: &SparseRow| -> SparseRow {
        let mut r: SparseRow = r.iter().copied().filter(|e| e.1 != 0).collect();
        r.sort_unstable_by_key(|e| e.0);
        // merge duplicate columns
        let mut out: SparseRow = Vec::with_capacity(r.len());
        for (c, v) in r {
            match out.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|e| e.1 != 0);
        out
    };
    let rows: Vec<SparseRow> = rows.iter().map(clean).collect();
    if let Ok(s) = smith_generic(rows.clone(), ncols) {
        return s;
    }
    let big: Vec<Vec<(usize, BigInt)>> =
        rows.into_iter().map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect()).collect();
    smith_generic(big, ncols).unwrap_or_else(|_| unreachable!("arbitrary precision cannot overflow"))
}

/// Small helper for tests and callers that expect machine-size torsion.
pub fn to_u64(v: &[BigUint]) -> Option<Vec<u64>> {
    v.iter().map(|x| x.to_u64()).collect()
}
