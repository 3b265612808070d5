//! Finite simplicial complexes with ascending-vertex orientation.
//!
//! Every simplex is stored as a strictly increasing vertex list; the sign of a face
//! in a boundary is the parity of the removed position.

mod action;
mod builders;
mod io;
mod nerve;

pub use action::{quotient_complex, GroupTable, Quotient, SimplicialGroupAction};
pub use builders::*;
pub use io::{ComplexFile, ActionFile};
pub use nerve::{nerve, refinement_map};

use crate::error::{Error, Result};
use crate::smith::SparseIntMatrix;
use num_bigint::BigInt;
use std::collections::{BTreeSet, HashMap};

pub type Simplex = Vec<usize>;

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices && self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

fn normalize(s: &[usize]) -> Result<Simplex> {
    let mut v = s.to_vec();
    v.sort_unstable();
    let before = v.len();
    v.dedup();
    if v.len() != before {
        return Err(Error::InvalidComplex(format!("repeated vertex in {s:?}")));
    }
    if v.is_empty() {
        return Err(Error::InvalidComplex("empty simplex".into()));
    }
    Ok(v)
}

impl SimplicialComplex {
    /// Closure of a family of simplices.
    pub fn from_facets(n_vertices: usize, facets: &[Simplex]) -> Result<Self> {
        let mut all: Vec<BTreeSet<Simplex>> = Vec::new();
        for f in facets {
            let f = normalize(f)?;
            if let Some(&v) = f.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::InvalidComplex(format!("vertex {v} out of range")));
            }
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                let face: Simplex = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                let d = face.len() - 1;
                if all.len() <= d {
                    all.resize_with(d + 1, BTreeSet::new);
                }
                all[d].insert(face);
            }
        }
        if all.is_empty() {
            all.push(BTreeSet::new());
        }
        for v in 0..n_vertices {
            all[0].insert(vec![v]);
        }
        Ok(Self::from_sets(n_vertices, all))
    }

    /// Builds a complex from an explicit list that must already be closed under faces.
    pub fn from_closed(n_vertices: usize, simplices: &[Simplex]) -> Result<Self> {
        let c = Self::from_facets(n_vertices, simplices)?;
        let given: BTreeSet<Simplex> = simplices.iter().map(|s| normalize(s)).collect::<Result<_>>()?;
        for s in &given {
            if s.len() > 1 {
                if let Some((_, f)) = faces_with_sign(s).find(|(_, f)| !given.contains(f)) {
                    return Err(Error::InvalidComplex(format!("face {f:?} missing from simplex list")));
                }
            }
        }
        Ok(c)
    }

    fn from_sets(n_vertices: usize, all: Vec<BTreeSet<Simplex>>) -> Self {
        let by_dim: Vec<Vec<Simplex>> = all.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = by_dim
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Self { n_vertices, by_dim, index }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn dim(&self) -> usize {
        self.by_dim.iter().rposition(|l| !l.is_empty()).unwrap_or(0)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.n_vertices == 0
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.index.get(s.len() - 1)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        self.index_of(&v).is_some()
    }

    pub fn facets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for k in 0..self.by_dim.len() {
            let mut covered = vec![false; self.by_dim[k].len()];
            for t in self.simplices(k + 1) {
                for (_, f) in faces_with_sign(t) {
                    covered[self.index[k][&f]] = true;
                }
            }
            out.extend(self.by_dim[k].iter().zip(covered).filter(|(_, c)| !c).map(|(s, _)| s.clone()));
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Boundary matrix ∂_k : C_k → C_{k-1}; rows are (k-1)-simplices, columns k-simplices.
    pub fn boundary_matrix(&self, k: usize) -> SparseIntMatrix {
        let rows = if k == 0 { 0 } else { self.count(k - 1) };
        let mut m = SparseIntMatrix::zeros(rows, self.count(k));
        if k == 0 {
            return m;
        }
        for (j, s) in self.simplices(k).iter().enumerate() {
            for (pos, face) in faces_with_sign(s) {
                let i = self.index_of(&face).expect("complex closed under faces");
                m.add(i, j, &BigInt::from(pos));
            }
        }
        m
    }

    /// Coboundary matrix δ^k : C^k → C^{k+1}, the transpose of ∂_{k+1}.
    pub fn coboundary_matrix(&self, k: usize) -> SparseIntMatrix {
        self.boundary_matrix(k + 1).transpose()
    }

    /// Vertex adjacency lists of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in self.simplices(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Barycentric subdivision. New vertices are the simplices of `self`, numbered by
    /// dimension first and then lexicographically, so every flag is listed in ascending order.
    pub fn barycentric_subdivision(&self) -> Subdivision {
        let mut offset = Vec::with_capacity(self.by_dim.len());
        let mut acc = 0;
        for l in &self.by_dim {
            offset.push(acc);
            acc += l.len();
        }
        let vertex_of = |s: &Simplex| offset[s.len() - 1] + self.index_of(s).unwrap();
        let mut carrier: Vec<Simplex> = Vec::with_capacity(acc);
        for l in &self.by_dim {
            carrier.extend(l.iter().cloned());
        }
        let mut flags: Vec<Simplex> = Vec::new();
        for s in &self.facets() {
            for chain in maximal_flags(s) {
                flags.push(chain.iter().map(vertex_of).collect());
            }
        }
        let complex = SimplicialComplex::from_facets(acc, &flags).expect("flags are valid simplices");
        Subdivision { complex, carrier }
    }
}

/// Result of a barycentric subdivision; `carrier[v]` is the simplex whose barycenter is `v`.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    pub carrier: Vec<Simplex>,
}

/// Faces of an ascending simplex paired with the sign `(-1)^position`.
pub fn faces_with_sign(s: &[usize]) -> impl Iterator<Item = (i64, Simplex)> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (if i % 2 == 0 { 1 } else { -1 }, f)
    })
}

/// All maximal chains of faces σ_0 ⊂ … ⊂ σ_n = s, listed from the vertex up.
fn maximal_flags(s: &[usize]) -> Vec<Vec<Simplex>> {
    if s.len() == 1 {
        return vec![vec![s.to_vec()]];
    }
    let mut out = Vec::new();
    for i in 0..s.len() {
        let mut f = s.to_vec();
        f.remove(i);
        for mut chain in maximal_flags(&f) {
            chain.push(s.to_vec());
            out.push(chain);
        }
    }
    out
}

/// Sign of the permutation sorting `v` ascending, together with the sorted vector.
/// Returns `None` if `v` has repeated entries.
pub fn sort_with_sign(v: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut w = v.to_vec();
    let mut sign = 1i64;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        None
    } else {
        Some((sign, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_of_boundary_vanishes() {
        let k = sphere_boundary_of_simplex(4);
        for d in 1..k.dim() {
            let prod = k.boundary_matrix(d).mul(&k.boundary_matrix(d + 1));
            assert!(prod.is_zero(), "∂∂ ≠ 0 in degree {d}");
        }
    }

    #[test]
    fn subdivision_preserves_euler_characteristic() {
        let k = icosahedron().0;
        let sd = k.barycentric_subdivision();
        assert_eq!(k.euler_characteristic(), 2);
        assert_eq!(sd.complex.euler_characteristic(), 2);
        assert_eq!(sd.complex.count(2), 20 * 6);
    }

    #[test]
    fn sort_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((1, vec![0, 1, 2])));
        assert_eq!(sort_with_sign(&[1, 0]), Some((-1, vec![0, 1])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn closed_list_validation() {
        assert!(SimplicialComplex::from_closed(3, &[vec![0, 1], vec![0], vec![1], vec![2]]).is_ok());
        assert!(SimplicialComplex::from_closed(2, &[vec![0, 1]]).is_err());
    }
}
