//! Exact sparse linear algebra over ℚ, and solvability of systems whose unknowns are
//! partly rational and partly integral.

use crate::rational::Q;
use crate::smith::SparseIntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub type SparseRow = BTreeMap<usize, Q>;

/// `rows · x = rhs` with unknowns `0..n_rational` in ℚ and `n_rational..n_rational+n_integer`
/// in ℤ. Returns true iff a solution exists.
pub fn mixed_solvable(rows: &[SparseRow], rhs: &[Q], n_rational: usize) -> bool {
    let mut rows: Vec<(SparseRow, Q)> =
        rows.iter().cloned().zip(rhs.iter().cloned()).filter(|(r, b)| !r.is_empty() || !b.is_zero()).collect();
    let mut col_rows: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, (r, _)) in rows.iter().enumerate() {
        for &c in r.keys() {
            col_rows.entry(c).or_default().insert(i);
        }
    }
    let mut alive: BTreeSet<usize> = (0..rows.len()).collect();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &alive {
            let r = &rows[i].0;
            for &c in r.keys().take_while(|&&c| c < n_rational) {
                let cost = (r.len() - 1) * (col_rows[&c].len() - 1);
                if best.is_none_or(|b| cost < b.2) {
                    best = Some((i, c, cost));
                }
            }
        }
        let Some((p, c, _)) = best else { break };
        alive.remove(&p);
        let (prow, pb) = std::mem::take(&mut rows[p]);
        for &cc in prow.keys() {
            col_rows.get_mut(&cc).unwrap().remove(&p);
        }
        let pv = prow[&c].clone();
        let targets: Vec<usize> = col_rows[&c].iter().copied().collect();
        for t in targets {
            let factor = &rows[t].0[&c] / &pv;
            for (&cc, v) in &prow {
                let e = rows[t].0.entry(cc).or_insert_with(Q::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    rows[t].0.remove(&cc);
                    col_rows.get_mut(&cc).unwrap().remove(&t);
                } else {
                    col_rows.entry(cc).or_default().insert(t);
                }
            }
            rows[t].1 -= &factor * &pb;
        }
    }
    let remaining: Vec<&(SparseRow, Q)> = alive.iter().map(|&i| &rows[i]).collect();
    if remaining.iter().any(|(r, b)| r.is_empty() && !b.is_zero()) {
        return false;
    }
    let constraints: Vec<&(SparseRow, Q)> = remaining.into_iter().filter(|(r, _)| !r.is_empty()).collect();
    if constraints.is_empty() {
        return true;
    }
    let int_cols: BTreeSet<usize> = constraints.iter().flat_map(|(r, _)| r.keys().copied()).collect();
    let col_pos: BTreeMap<usize, usize> = int_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let n = int_cols.len();
    let mut a = SparseIntMatrix::zeros(constraints.len(), n);
    let mut ab = SparseIntMatrix::zeros(constraints.len(), n + 1);
    for (i, (r, b)) in constraints.iter().enumerate() {
        let scale = r.values().chain(std::iter::once(b)).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        for (c, v) in r.iter() {
            let x = (v * Q::from_integer(scale.clone())).to_integer();
            a.add(i, col_pos[c], &x);
            ab.add(i, col_pos[c], &x);
        }
        ab.add(i, n, &(b * Q::from_integer(scale)).to_integer());
    }
    integer_image_contains(&a, &ab)
}

/// With `ab = [a | b]`, whether `b` lies in the ℤ-span of the columns of `a`: the column
/// lattices agree iff ranks and products of invariant factors agree.
fn integer_image_contains(a: &SparseIntMatrix, ab: &SparseIntMatrix) -> bool {
    let fa = a.invariant_factors();
    let fab = ab.invariant_factors();
    fa.len() == fab.len() && fa.iter().product::<BigInt>() == fab.iter().product::<BigInt>()
}

/// Rank of a rational matrix given by sparse rows.
pub fn rank(rows: &[SparseRow]) -> usize {
    let mut rows: Vec<SparseRow> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    let mut rank = 0;
    while let Some(p) = rows.iter().position(|r| !r.is_empty()) {
        let prow = rows.swap_remove(p);
        let (&c, pv) = prow.iter().next().unwrap();
        for r in rows.iter_mut() {
            if let Some(v) = r.get(&c) {
                let factor = v / pv;
                for (&cc, w) in &prow {
                    let e = r.entry(cc).or_insert_with(Q::zero);
                    *e -= &factor * w;
                    if e.is_zero() {
                        r.remove(&cc);
                    }
                }
            }
        }
        rows.retain(|r| !r.is_empty());
        rank += 1;
    }
    rank
}

/// Least-squares solution of a small dense real system by normal equations with
/// Cholesky; returns `(x, residual 2-norm)`.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let n = a.first().map_or(0, Vec::len);
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (row, &bi) in a.iter().zip(b) {
        for i in 0..n {
            atb[i] += row[i] * bi;
            for j in 0..n {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let scale = (0..n).map(|i| ata[i][i]).fold(0.0, f64::max).max(1.0);
    for (i, r) in ata.iter_mut().enumerate() {
        r[i] += 1e-14 * scale;
    }
    let x = solve_spd(ata, atb);
    let res = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let r: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    (x, res)
}

fn solve_spd(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for j in 0..n {
        let mut d = m[j][j];
        for k in 0..j {
            d -= m[j][k] * m[j][k];
        }
        let d = d.max(1e-300).sqrt();
        m[j][j] = d;
        for i in j + 1..n {
            let mut s = m[i][j];
            for k in 0..j {
                s -= m[i][k] * m[j][k];
            }
            m[i][j] = s / d;
        }
    }
    for i in 0..n {
        for k in 0..i {
            b[i] -= m[i][k] * b[k];
        }
        b[i] /= m[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            b[i] -= m[k][i] * b[k];
        }
        b[i] /= m[i][i];
    }
    b
}
