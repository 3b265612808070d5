//! Finite groups acting by vertex permutations, and free quotients.

use super::{sort_with_sign, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// A finite permutation group; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    elements: Vec<Vec<usize>>,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    generators: Vec<usize>,
}

const MAX_ORDER: usize = 4096;

impl GroupTable {
    /// Closure of the given permutations of `0..degree` under composition.
    pub fn generated_by(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&v| v >= degree || std::mem::replace(&mut seen[v], true)) {
                return Err(Error::InvalidAction(format!("not a permutation of 0..{degree}: {g:?}")));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elements = vec![id.clone()];
        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = compose(g, &elements[i]);
                if !lookup.contains_key(&p) {
                    if elements.len() >= MAX_ORDER {
                        return Err(Error::InvalidAction("group too large".into()));
                    }
                    lookup.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let n = elements.len();
        let mult: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| lookup[&compose(&elements[a], &elements[b])]).collect())
            .collect();
        let inv = (0..n).map(|a| (0..n).find(|&b| mult[a][b] == 0).unwrap()).collect();
        let generators = gens.iter().map(|g| lookup[g]).collect();
        Ok(Self { elements, mult, inv, generators })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::generated_by(degree, &[]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `a·b`, acting as `b` first and then `a`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn perm(&self, a: usize) -> &[usize] {
        &self.elements[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn act(&self, a: usize, v: usize) -> usize {
        self.elements[a][v]
    }

    /// Image of an ascending simplex with the sign of the sorting permutation.
    pub fn act_simplex(&self, a: usize, s: &[usize]) -> (i64, Simplex) {
        let img: Vec<usize> = s.iter().map(|&v| self.elements[a][v]).collect();
        sort_with_sign(&img).expect("permutation is injective")
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&v| a[v]).collect()
}

/// A finite group acting on a simplicial complex by simplicial automorphisms.
#[derive(Clone, Debug)]
pub struct SimplicialGroupAction {
    pub group: GroupTable,
}

impl SimplicialGroupAction {
    /// Validates that each generator maps simplices to simplices and, when `order` is
    /// given, that the generated group has exactly that order (so `g^order = e` for a
    /// single generator).
    pub fn new(complex: &SimplicialComplex, gens: &[Vec<usize>], order: Option<usize>) -> Result<Self> {
        let group = GroupTable::generated_by(complex.n_vertices(), gens)?;
        for &g in group.generators() {
            for k in 0..=complex.dim() {
                for s in complex.simplices(k) {
                    let (_, img) = group.act_simplex(g, s);
                    if complex.index_of(&img).is_none() {
                        return Err(Error::InvalidAction(format!(
                            "generator maps simplex {s:?} outside the complex"
                        )));
                    }
                }
            }
        }
        if let Some(n) = order {
            if group.order() != n {
                return Err(Error::InvalidAction(format!(
                    "generators produce a group of order {}, expected {n}",
                    group.order()
                )));
            }
        }
        Ok(Self { group })
    }

    pub fn trivial(complex: &SimplicialComplex) -> Self {
        Self { group: GroupTable::trivial(complex.n_vertices()) }
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// No nonidentity element fixes a simplex setwise.
    pub fn is_free(&self, complex: &SimplicialComplex) -> bool {
        (1..self.order()).all(|g| {
            (0..=complex.dim()).all(|k| {
                complex.simplices(k).iter().all(|s| self.group.act_simplex(g, s).1 != *s)
            })
        })
    }

    /// Every vertex is at edge distance at least 3 from each of its other translates, so
    /// the orbit space is again a simplicial complex.
    pub fn is_regular(&self, complex: &SimplicialComplex) -> bool {
        let adj = complex.adjacency();
        for v in 0..complex.n_vertices() {
            let mut near: BTreeSet<usize> = BTreeSet::from([v]);
            for &w in &adj[v] {
                near.insert(w);
                near.extend(adj[w].iter().copied());
            }
            if (1..self.order()).any(|g| near.contains(&self.group.act(g, v))) {
                return false;
            }
        }
        true
    }

    /// Induced action on the barycentric subdivision.
    pub fn subdivide(&self, complex: &SimplicialComplex) -> (SimplicialComplex, Vec<Simplex>, Self) {
        let sd = complex.barycentric_subdivision();
        let pos: HashMap<&Simplex, usize> = sd.carrier.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let gens: Vec<Vec<usize>> = self
            .group
            .generators()
            .iter()
            .map(|&g| sd.carrier.iter().map(|s| pos[&self.group.act_simplex(g, s).1]).collect())
            .collect();
        let group = GroupTable::generated_by(sd.complex.n_vertices(), &gens).expect("induced permutations");
        (sd.complex, sd.carrier, Self { group })
    }
}

/// Orbit space of a free action together with the data it was computed from.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub complex: SimplicialComplex,
    /// Vertex map from `upstairs` to `complex`.
    pub projection: Vec<usize>,
    pub upstairs: SimplicialComplex,
    pub action: SimplicialGroupAction,
    pub subdivisions: usize,
}

const MAX_SUBDIVISIONS: usize = 3;

/// Quotient by a free action, subdividing until the action is regular.
pub fn quotient_complex(complex: &SimplicialComplex, action: &SimplicialGroupAction) -> Result<Quotient> {
    if !action.is_free(complex) {
        return Err(Error::NotFreeAction);
    }
    let mut up = complex.clone();
    let mut act = action.clone();
    let mut rounds = 0;
    while !act.is_regular(&up) {
        if rounds == MAX_SUBDIVISIONS {
            return Err(Error::NotFreeAction);
        }
        let (c, _, a) = act.subdivide(&up);
        up = c;
        act = a;
        rounds += 1;
    }
    let n = up.n_vertices();
    let mut projection = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if projection[v] == usize::MAX {
            for g in 0..act.order() {
                projection[act.group.act(g, v)] = next;
            }
            next += 1;
        }
    }
    let mut images: Vec<Simplex> = Vec::new();
    for k in 0..=up.dim() {
        for s in up.simplices(k) {
            let mut img: Vec<usize> = s.iter().map(|&v| projection[v]).collect();
            img.sort_unstable();
            img.dedup();
            if img.len() != s.len() {
                return Err(Error::NotFreeAction);
            }
            images.push(img);
        }
    }
    let quot = SimplicialComplex::from_facets(next, &images)?;
    for k in 0..=up.dim() {
        if quot.count(k) * act.order() != up.count(k) {
            return Err(Error::NotFreeAction);
        }
    }
    Ok(Quotient { complex: quot, projection, upstairs: up, action: act, subdivisions: rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{icosahedron, lens_join};

    #[test]
    fn antipodal_quotient_is_projective_plane() {
        let (k, a) = icosahedron();
        let act = SimplicialGroupAction::new(&k, &[a], Some(2)).unwrap();
        let q = quotient_complex(&k, &act).unwrap();
        assert_eq!(q.complex.euler_characteristic(), 1);
        assert_eq!(q.upstairs.euler_characteristic(), 2 * q.complex.euler_characteristic());
    }

    #[test]
    fn trivial_group_gives_identity_projection() {
        let (k, _) = icosahedron();
        let q = quotient_complex(&k, &SimplicialGroupAction::trivial(&k)).unwrap();
        assert_eq!(q.complex, k);
        assert_eq!(q.projection, (0..12).collect::<Vec<_>>());
        assert_eq!(q.subdivisions, 0);
    }

    #[test]
    fn non_free_action_is_rejected() {
        let k = crate::simplicial::circle(4);
        let reflect = vec![0, 3, 2, 1];
        let act = SimplicialGroupAction::new(&k, &[reflect], Some(2)).unwrap();
        assert!(matches!(quotient_complex(&k, &act), Err(Error::NotFreeAction)));
    }

    #[test]
    fn lens_action_needs_one_subdivision() {
        let (k, g) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[g], Some(3)).unwrap();
        assert!(act.is_free(&k));
        let q = quotient_complex(&k, &act).unwrap();
        assert_eq!(q.subdivisions, 1);
        assert_eq!(q.complex.euler_characteristic(), 0);
    }
}
