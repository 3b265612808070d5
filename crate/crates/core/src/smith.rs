//! Sparse integer matrices, invariant factors, and integer cohomology of complexes.

use crate::simplicial::SimplicialComplex;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Row-major sparse matrix over ℤ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, BigInt>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.add(i, j, &BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.data[i].get(&j).cloned().unwrap_or_default()
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, BigInt> {
        &self.data[i]
    }

    pub fn add(&mut self, i: usize, j: usize, v: &BigInt) {
        assert!(i < self.rows && j < self.cols);
        if v.is_zero() {
            return;
        }
        let e = self.data[i].entry(j).or_default();
        *e += v;
        if e.is_zero() {
            self.data[i].remove(&j);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (&j, v) in r {
                t.data[j].insert(i, v.clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for (&k, a) in r {
                for (&j, b) in &other.data[k] {
                    out.add(i, j, &(a * b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.data
            .iter()
            .map(|r| r.iter().map(|(&j, a)| a * &x[j]).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    /// Nonzero invariant factors `d_1 | d_2 | …` of the Smith normal form (positive).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut diag = Elimination::new(self).run();
        normalize_diagonal(&mut diag);
        diag
    }

    pub fn rank(&self) -> usize {
        Elimination::new(self).run().len()
    }
}

/// Sparse elimination with unit pivots of least Markowitz cost, then a dense Smith
/// reduction of whatever is left. Row and column operations are unimodular, so the
/// collected diagonal has the same invariant factors as the input.
struct Elimination {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    live_rows: BTreeSet<usize>,
}

impl Elimination {
    fn new(m: &SparseIntMatrix) -> Self {
        let mut cols = vec![BTreeSet::new(); m.cols];
        for (i, r) in m.data.iter().enumerate() {
            for &j in r.keys() {
                cols[j].insert(i);
            }
        }
        let live_rows = (0..m.rows).filter(|&i| !m.data[i].is_empty()).collect();
        Self { rows: m.data.clone(), cols, live_rows }
    }

    fn best_unit_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &self.live_rows {
            let rl = self.rows[i].len() - 1;
            for (&j, v) in &self.rows[i] {
                if v.abs().is_one() {
                    let cost = rl * (self.cols[j].len() - 1);
                    if best.is_none_or(|b| cost < b.2) {
                        best = Some((i, j, cost));
                        if cost == 0 {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(mut self) -> Vec<BigInt> {
        let mut diag = Vec::new();
        while let Some((p, c)) = self.best_unit_pivot() {
            let pivot_row = std::mem::take(&mut self.rows[p]);
            self.live_rows.remove(&p);
            let pv = pivot_row[&c].clone();
            for &j in pivot_row.keys() {
                self.cols[j].remove(&p);
            }
            let targets: Vec<usize> = self.cols[c].iter().copied().collect();
            for r in targets {
                let factor = &self.rows[r][&c] * &pv;
                for (&j, v) in &pivot_row {
                    let e = self.rows[r].entry(j).or_default();
                    *e -= &factor * v;
                    if e.is_zero() {
                        self.rows[r].remove(&j);
                        self.cols[j].remove(&r);
                    } else {
                        self.cols[j].insert(r);
                    }
                }
                if self.rows[r].is_empty() {
                    self.live_rows.remove(&r);
                }
            }
            debug_assert!(self.cols[c].is_empty());
            diag.push(BigInt::one());
        }
        let live: Vec<usize> = self.live_rows.iter().copied().collect();
        if live.is_empty() {
            return diag;
        }
        let used: BTreeSet<usize> = live.iter().flat_map(|&i| self.rows[i].keys().copied()).collect();
        let col_pos: BTreeMap<usize, usize> = used.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut dense = vec![vec![BigInt::zero(); used.len()]; live.len()];
        for (a, &i) in live.iter().enumerate() {
            for (j, v) in &self.rows[i] {
                dense[a][col_pos[j]] = v.clone();
            }
        }
        diag.extend(dense_smith_diagonal(dense));
        diag
    }
}

/// Diagonal of a dense Smith reduction (not yet normalized to divisibility order).
fn dense_smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().take(m).skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rewrites a diagonal into invariant-factor form via `(a, b) → (gcd, lcm)`.
fn normalize_diagonal(d: &mut Vec<BigInt>) {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.retain(|x| !x.is_zero());
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            if d[i].is_one() {
                break;
            }
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.sort();
}

/// A finitely generated abelian group `ℤ^free ⊕ ⊕ ℤ/t`, optionally with circle factors
/// `(ℝ/ℤ)^circle` and a real vector space summand `ℝ^vector` for Deligne groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    #[serde(default)]
    pub circle_rank: usize,
    #[serde(default)]
    pub vector_dim: usize,
}

impl AbelianGroupPresentation {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(n: usize) -> Self {
        Self { free_rank: n, ..Self::default() }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// True when each torsion coefficient divides the next.
    pub fn is_normalized(&self) -> bool {
        self.torsion.iter().all(|&t| t > 1) && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for AbelianGroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pow = |s: &str, n: usize| if n == 1 { s.to_string() } else { format!("{s}^{n}") };
        if self.free_rank > 0 {
            parts.push(pow("Z", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if self.circle_rank > 0 {
            parts.push(pow("T", self.circle_rank));
        }
        if self.vector_dim > 0 {
            parts.push(pow("R", self.vector_dim));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `H^n(K; ℤ)` from the coboundary maps: free rank `dim C^n − rk δ^n − rk δ^{n−1}` and
/// torsion the nonunit invariant factors of `δ^{n−1}`.
pub fn integer_cohomology(k: &SimplicialComplex, n: usize) -> AbelianGroupPresentation {
    if n > k.dim() {
        return AbelianGroupPresentation::zero();
    }
    let rank_out = if n < k.dim() { k.boundary_matrix(n + 1).rank() } else { 0 };
    let (rank_in, torsion) = if n == 0 {
        (0, Vec::new())
    } else {
        let f = k.boundary_matrix(n).invariant_factors();
        let tors = f.iter().filter(|x| !x.is_one()).map(|x| x.to_u64().expect("torsion fits in u64")).collect();
        (f.len(), tors)
    };
    AbelianGroupPresentation {
        free_rank: k.count(n) - rank_out - rank_in,
        torsion,
        ..Default::default()
    }
}

/// Betti numbers over ℚ (equal to free ranks of integer cohomology).
pub fn betti_numbers(k: &SimplicialComplex) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=k.dim() + 1).map(|d| if d == 0 { 0 } else { k.boundary_matrix(d).rank() }).collect();
    (0..=k.dim()).map(|n| k.count(n) - ranks[n] - ranks[n + 1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{circle, icosahedron, sphere_boundary_of_simplex};

    #[test]
    fn invariant_factors_of_small_matrices() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(m.invariant_factors(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let z = SparseIntMatrix::zeros(3, 2);
        assert!(z.invariant_factors().is_empty());
        let d = SparseIntMatrix::from_dense(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(d.invariant_factors(), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn sphere_and_circle_cohomology() {
        let s2 = icosahedron().0;
        assert_eq!(integer_cohomology(&s2, 0), AbelianGroupPresentation::free(1));
        assert_eq!(integer_cohomology(&s2, 1), AbelianGroupPresentation::zero());
        assert_eq!(integer_cohomology(&s2, 2), AbelianGroupPresentation::free(1));
        assert_eq!(integer_cohomology(&s2, 5), AbelianGroupPresentation::zero());
        assert_eq!(integer_cohomology(&circle(5), 1), AbelianGroupPresentation::free(1));
        assert_eq!(betti_numbers(&sphere_boundary_of_simplex(4)), vec![1, 0, 0, 1]);
    }

    #[test]
    fn lens_space_cohomology() {
        use crate::simplicial::{lens_join, quotient_complex, SimplicialGroupAction};
        let (k, g) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[g], Some(3)).unwrap();
        let l = quotient_complex(&k, &act).unwrap().complex;
        let h: Vec<String> = (0..=3).map(|n| integer_cohomology(&l, n).to_string()).collect();
        assert_eq!(h, ["Z", "0", "Z/3", "Z"]);
    }

    #[test]
    fn display() {
        let g = AbelianGroupPresentation { free_rank: 2, torsion: vec![3], circle_rank: 1, vector_dim: 0 };
        assert_eq!(g.to_string(), "Z^2 + Z/3 + T");
        assert_eq!(AbelianGroupPresentation::zero().to_string(), "0");
    }
}
