//! Covers of a simplicial carrier by full subcomplexes, with a compatible finite group
//! action, and the cochain operations on cover intersections used by the exact backend.
//!
//! A cover set is the full subcomplex on a vertex set of the carrier `S`. For a nerve
//! simplex `τ = {α_0 < … < α_j}` the intersection `U_τ` is the full subcomplex on the
//! common vertices. Forms of degree `k` on `U_τ` are rational `k`-cochains on it; a
//! circle-valued function is a rational 0-cochain read modulo integer constants on each
//! connected component.

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::simplicial::{faces_with_sign, nerve, GroupTable, SimplicialComplex, SimplicialGroupAction};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;

/// A cover intersection: the full subcomplex of the carrier on `vertices`.
#[derive(Clone, Debug)]
pub struct Domain {
    /// Carrier simplex indices per degree, ascending.
    pub simplices: Vec<Vec<usize>>,
    /// For each local vertex, the local index of the least vertex of its component.
    pub root: Vec<usize>,
}

impl Domain {
    fn new(space: &SimplicialComplex, verts: &BTreeSet<usize>) -> Self {
        let mut simplices = Vec::new();
        for k in 0..=space.dim() {
            let list: Vec<usize> = space
                .simplices(k)
                .iter()
                .enumerate()
                .filter(|(_, s)| s.iter().all(|v| verts.contains(v)))
                .map(|(i, _)| i)
                .collect();
            if list.is_empty() {
                break;
            }
            simplices.push(list);
        }
        let nv = simplices.first().map_or(0, Vec::len);
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let vertex_pos = |v: usize| simplices[0].binary_search(&v).unwrap();
        if let Some(edges) = simplices.get(1) {
            for &e in edges {
                let s = &space.simplices(1)[e];
                let (a, b) = (find(&mut parent, vertex_pos(s[0])), find(&mut parent, vertex_pos(s[1])));
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
        let root = (0..nv).map(|x| find(&mut parent, x)).collect();
        Self { simplices, root }
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn pos(&self, k: usize, global: usize) -> Option<usize> {
        self.simplices.get(k)?.binary_search(&global).ok()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Carrier complex, cover, nerve and a group acting compatibly on carrier and indices.
#[derive(Clone, Debug)]
pub struct CoverModel {
    pub space: SimplicialComplex,
    pub group: GroupTable,
    pub sets: Vec<BTreeSet<usize>>,
    /// `index_perm[g][α]` is the index of `g·U_α`.
    pub index_perm: Vec<Vec<usize>>,
    pub nerve: SimplicialComplex,
    /// `domains[j][t]` is the intersection over the `t`-th `j`-simplex of the nerve.
    pub domains: Vec<Vec<Domain>>,
    /// `simplex_image[g][k][x] = (sign, y)` with `g·x = sign·y` as oriented simplices.
    simplex_image: Vec<Vec<Vec<(i64, usize)>>>,
}

impl CoverModel {
    /// The group acts on the carrier and must permute the cover sets.
    pub fn new(space: SimplicialComplex, group: GroupTable, sets: Vec<Vec<usize>>) -> Result<Self> {
        if group.perm(0).len() != space.n_vertices() {
            return Err(Error::InvalidCover("group degree differs from carrier vertex count".into()));
        }
        let sets: Vec<BTreeSet<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        if let Some(&v) = sets.iter().flatten().find(|&&v| v >= space.n_vertices()) {
            return Err(Error::InvalidCover(format!("vertex {v} out of range")));
        }
        let covered: BTreeSet<usize> = sets.iter().flatten().copied().collect();
        if covered.len() != space.n_vertices() {
            return Err(Error::InvalidCover("cover sets miss some vertex".into()));
        }
        let nerve = nerve(&sets.iter().map(|s| s.iter().copied().collect()).collect::<Vec<Vec<usize>>>())?;
        let mut index_perm = Vec::with_capacity(group.order());
        for g in 0..group.order() {
            let perm: Vec<usize> = sets
                .iter()
                .map(|s| {
                    let img: BTreeSet<usize> = s.iter().map(|&v| group.act(g, v)).collect();
                    sets.iter().position(|t| *t == img).ok_or_else(|| {
                        Error::InvalidCover("group does not permute the cover sets".into())
                    })
                })
                .collect::<Result<_>>()?;
            index_perm.push(perm);
        }
        let domains = (0..=nerve.dim())
            .map(|j| {
                nerve
                    .simplices(j)
                    .iter()
                    .map(|t| {
                        let common = t.iter().skip(1).fold(sets[t[0]].clone(), |acc, &a| {
                            acc.intersection(&sets[a]).copied().collect()
                        });
                        Domain::new(&space, &common)
                    })
                    .collect()
            })
            .collect();
        let simplex_image = (0..group.order())
            .map(|g| {
                (0..=space.dim())
                    .map(|k| {
                        space
                            .simplices(k)
                            .iter()
                            .map(|s| {
                                let (sign, img) = group.act_simplex(g, s);
                                (sign, space.index_of(&img).expect("group acts simplicially"))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { space, group, sets, index_perm, nerve, domains, simplex_image })
    }

    /// Cover of a complex `K` by closed vertex stars taken in the barycentric subdivision.
    /// `U_v` is the set of flags all of whose members contain `v`; `U_τ` is a cone on the
    /// barycenter of `τ`, and the nerve is `K` itself.
    pub fn star_cover(k: &SimplicialComplex, action: &SimplicialGroupAction) -> Result<Self> {
        let (sd, carrier, sd_action) = action.subdivide(k);
        let sets: Vec<Vec<usize>> = (0..k.n_vertices())
            .map(|v| (0..carrier.len()).filter(|&x| carrier[x].contains(&v)).collect())
            .collect();
        let model = Self::new(sd, sd_action.group, sets)?;
        debug_assert_eq!(model.nerve, *k);
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn domain(&self, j: usize, t: usize) -> &Domain {
        &self.domains[j][t]
    }

    /// Domain of an arbitrary set of cover indices, with its nerve position.
    pub fn domain_of(&self, indices: &[usize]) -> Option<(usize, usize)> {
        let mut s = indices.to_vec();
        s.sort_unstable();
        s.dedup();
        let t = self.nerve.index_of(&s)?;
        Some((s.len() - 1, t))
    }

    pub fn image(&self, g: usize, k: usize, x: usize) -> (i64, usize) {
        self.simplex_image[g][k][x]
    }

    /// Restriction of a `k`-cochain from `from` to a smaller domain `to`.
    pub fn restrict(&self, k: usize, from: &Domain, to: &Domain, c: &[Q]) -> Vec<Q> {
        if c.is_empty() {
            return Vec::new();
        }
        to.simplices.get(k).map_or_else(Vec::new, |l| {
            l.iter().map(|&x| c[from.pos(k, x).expect("restriction to a subdomain")].clone()).collect()
        })
    }

    /// `(g*c)(x) = c(g·x)`, from a cochain on `g·U` to one on `U`.
    pub fn pullback(&self, g: usize, k: usize, src: &Domain, dst: &Domain, c: &[Q]) -> Vec<Q> {
        if c.is_empty() {
            return Vec::new();
        }
        dst.simplices.get(k).map_or_else(Vec::new, |l| {
            l.iter()
                .map(|&x| {
                    let (sign, y) = self.image(g, k, x);
                    let v = &c[src.pos(k, y).expect("group maps the domain onto its image")];
                    if sign > 0 { v.clone() } else { -v }
                })
                .collect()
        })
    }

    /// Simplicial coboundary inside a domain.
    pub fn d(&self, k: usize, dom: &Domain, c: &[Q]) -> Vec<Q> {
        if c.is_empty() {
            return Vec::new();
        }
        dom.simplices.get(k + 1).map_or_else(Vec::new, |l| {
            l.iter()
                .map(|&x| {
                    let s = &self.space.simplices(k + 1)[x];
                    faces_with_sign(s).fold(Q::zero(), |acc, (sign, f)| {
                        let i = dom.pos(k, self.space.index_of(&f).unwrap()).unwrap();
                        if sign > 0 { acc + &c[i] } else { acc - &c[i] }
                    })
                })
                .collect()
        })
    }

    /// Canonical lift of a circle-valued function: each component's least vertex in `[0, 1)`.
    pub fn canonical_circle(&self, dom: &Domain, c: &mut [Q]) {
        if c.is_empty() {
            return;
        }
        let shifts: Vec<BigInt> = dom.root.iter().map(|&r| c[r].numer().div_floor(c[r].denom())).collect();
        for (x, v) in c.iter_mut().enumerate() {
            let s = &shifts[dom.root[x]];
            if !s.is_zero() {
                *v -= Q::from_integer(s.clone());
            }
        }
    }

    /// Whether a lifted circle function is an integer constant on every component.
    pub fn is_zero_circle(&self, dom: &Domain, c: &[Q]) -> bool {
        c.iter().enumerate().all(|(x, v)| v.is_integer() && *v == c[dom.root[x]])
    }
}

/// Tuples in `G^i`, encoded in base `|G|` with the first coordinate most significant.
pub fn tuple_of(order: usize, i: usize, mut code: usize) -> Vec<usize> {
    let mut t = vec![0; i];
    for slot in t.iter_mut().rev() {
        *slot = code % order;
        code /= order;
    }
    t
}

pub fn code_of(order: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &g| acc * order + g)
}
