//! Reduction of a finite-group equivariant sheet gerbe to the quotient.
//!
//! The quotient cover has one set per orbit of cover indices. A component of a quotient
//! intersection is lifted by continuation from the least preimage of its root vertex, and
//! `P̄` is trivialized through `P` on that lift. On a triple component whose pair faces
//! were lifted through translates `h·L`, the section picks up the lifts of the group
//! action: `s̄ = s + χ_{h₀}(y₂, y₃) − χ_{h₁}(y₁, y₃) + χ_{h₂}(y₁, y₂)`.

use crate::cover::{CoverModel, Domain};
use crate::equivariant::StrongEquivariantGerbe;
use crate::error::{Error, Result};
use crate::gerbe::{SheetGerbe, Sheets, YForm};
use crate::rational::Q;
use crate::simplicial::{quotient_complex, sort_with_sign, GroupTable, Quotient, SimplicialGroupAction};
use num_traits::Zero;
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct DiscreteReduction {
    pub quotient: Quotient,
    /// Quotient cover index of each upstairs cover index.
    pub index_orbit: Vec<usize>,
    pub gerbe_bar: SheetGerbe,
}

struct Lifter<'a> {
    up: &'a CoverModel,
    down: &'a CoverModel,
    projection: &'a [usize],
    adjacency: Vec<Vec<usize>>,
    fiber_min: Vec<usize>,
    index_orbit: &'a [usize],
}

/// A lifted component: quotient vertex to upstairs vertex, and the upstairs cover indices.
struct Lift {
    vertices: BTreeMap<usize, usize>,
    indices: Vec<usize>,
}

impl Lifter<'_> {
    fn lift(&self, dom: &Domain, root: usize, orbit_indices: &[usize]) -> Result<Lift> {
        let verts: BTreeMap<usize, usize> =
            dom.simplices[0].iter().enumerate().filter(|&(i, _)| dom.root[i] == root).map(|(i, &v)| (v, i)).collect();
        let r = dom.simplices[0][root];
        let mut vertices = BTreeMap::from([(r, self.fiber_min[r])]);
        let mut queue = VecDeque::from([self.fiber_min[r]]);
        while let Some(u) = queue.pop_front() {
            for &n in &self.adjacency[u] {
                let nb = self.projection[n];
                if verts.contains_key(&nb) && !vertices.contains_key(&nb) {
                    vertices.insert(nb, n);
                    queue.push_back(n);
                }
            }
        }
        if vertices.len() != verts.len() {
            return Err(Error::InvalidCover("quotient component does not lift".into()));
        }
        let x0 = vertices[&r];
        let indices = orbit_indices
            .iter()
            .map(|&ob| {
                let mut hits = (0..self.up.sets.len()).filter(|&a| self.index_orbit[a] == ob && self.up.sets[a].contains(&x0));
                let a = hits.next().ok_or_else(|| Error::InvalidCover("lifted root outside every translate".into()))?;
                if hits.next().is_some() {
                    return Err(Error::InvalidCover("translates of a cover set meet".into()));
                }
                Ok(a)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Lift { vertices, indices })
    }

    /// The upstairs `k`-simplex over a quotient simplex, with orientation sign.
    fn lift_simplex(&self, lift: &Lift, k: usize, x: usize) -> (i64, usize) {
        let s = &self.down.space.simplices(k)[x];
        let img: Vec<usize> = s.iter().map(|v| lift.vertices[v]).collect();
        let (sign, sorted) = sort_with_sign(&img).unwrap();
        (sign, self.up.space.index_of(&sorted).expect("lift of a simplex"))
    }
}

/// Descends `(Y, P, s, A, F)` along the free group action.
pub fn reduce_topological(eg: &StrongEquivariantGerbe) -> Result<DiscreteReduction> {
    let y = eg.sheets();
    let up = &*y.model;
    let gens: Vec<Vec<usize>> = up.group.generators().iter().map(|&g| up.group.perm(g).to_vec()).collect();
    let act = SimplicialGroupAction::new(&up.space, &gens, Some(up.order()))?;
    let quotient = quotient_complex(&up.space, &act)?;
    if quotient.subdivisions > 0 {
        return Err(Error::InvalidCover("the carrier action is not regular; subdivide before reducing".into()));
    }
    let mut index_orbit = vec![usize::MAX; up.sets.len()];
    let mut n_orbits = 0;
    for a in 0..up.sets.len() {
        if index_orbit[a] == usize::MAX {
            for g in 0..up.order() {
                index_orbit[up.index_perm[g][a]] = n_orbits;
            }
            n_orbits += 1;
        }
    }
    let adjacency = up.space.adjacency();
    for a in 0..up.sets.len() {
        for g in 1..up.order() {
            let b = up.index_perm[g][a];
            let touching = up.sets[a].iter().any(|&x| up.sets[b].contains(&x) || adjacency[x].iter().any(|n| up.sets[b].contains(n)));
            if b == a || touching {
                return Err(Error::InvalidCover(format!("cover set {a} meets or touches its translate {b}")));
            }
        }
    }
    let sets_bar: Vec<Vec<usize>> = (0..n_orbits)
        .map(|ob| {
            let a = index_orbit.iter().position(|&o| o == ob).unwrap();
            let mut s: Vec<usize> = up.sets[a].iter().map(|&x| quotient.projection[x]).collect();
            s.sort_unstable();
            s
        })
        .collect();
    let nq = quotient.complex.n_vertices();
    let down = CoverModel::new(quotient.complex.clone(), GroupTable::trivial(nq), sets_bar)?;
    let mut fiber_min = vec![usize::MAX; nq];
    for (x, &p) in quotient.projection.iter().enumerate() {
        fiber_min[p] = fiber_min[p].min(x);
    }
    let lifter = Lifter { up, down: &down, projection: &quotient.projection, adjacency, fiber_min, index_orbit: &index_orbit };
    let ybar = Sheets::new(Arc::new(down.clone()), y.copies);
    let copy = |t: &[usize]| -> Vec<usize> { t.iter().map(|&s| s % y.copies).collect() };
    let up_tuple = |indices: &[usize], copies: &[usize]| -> Vec<usize> {
        indices.iter().zip(copies).map(|(&a, &c)| y.sheet(a, c)).collect()
    };
    let g = &eg.gerbe;
    let roots = |d: &Domain| -> Vec<usize> {
        let mut r: Vec<usize> = d.root.clone();
        r.sort_unstable();
        r.dedup();
        r
    };

    let descend_form = |p: usize, k: usize, form: &YForm| -> Result<YForm> {
        let mut out = YForm::zero(p, k, false);
        for t in ybar.tuples(p) {
            let dom = ybar.domain(&t).unwrap();
            let mut vals = vec![Q::zero(); dom.count(k)];
            for root in roots(dom) {
                let lift = lifter.lift(dom, root, &ybar.bases(&t))?;
                let ut = up_tuple(&lift.indices, &copy(&t));
                let udom = y.domain(&ut).unwrap();
                let uvals = y.get(form, &ut);
                for (pos, &x) in dom.simplices.get(k).into_iter().flatten().enumerate() {
                    let first = down.space.simplices(k)[x][0];
                    if dom.root[dom.pos(0, first).unwrap()] != root {
                        continue;
                    }
                    let (sign, ux) = lifter.lift_simplex(&lift, k, x);
                    let v = &uvals[udom.pos(k, ux).expect("lifted simplex in the lifted domain")];
                    vals[pos] = if sign > 0 { v.clone() } else { -v };
                }
            }
            if vals.iter().any(|v| !v.is_zero()) {
                out.data.insert(t, vals);
            }
        }
        Ok(out)
    };
    let f_bar = descend_form(1, 2, &g.f)?;
    let a_bar = descend_form(2, 1, &g.a)?;

    let mut s_bar = YForm::zero(3, 0, true);
    for t in ybar.tuples(3) {
        let dom = ybar.domain(&t).unwrap();
        let mut vals = vec![Q::zero(); dom.count(0)];
        for root in roots(dom) {
            let lift = lifter.lift(dom, root, &ybar.bases(&t))?;
            let ut = up_tuple(&lift.indices, &copy(&t));
            let udom = y.domain(&ut).unwrap();
            let svals = y.get(&g.s, &ut);
            let r = dom.simplices[0][root];
            let x_r = lift.vertices[&r];
            let mut corrections = Vec::new();
            for i in 0..3 {
                let mut pair = t.clone();
                pair.remove(i);
                let pdom = ybar.domain(&pair).unwrap();
                let proot = pdom.root[pdom.pos(0, r).unwrap()];
                let plift = lifter.lift(pdom, proot, &ybar.bases(&pair))?;
                let x_p = plift.vertices[&r];
                let h = (0..up.order()).find(|&h| up.group.act(h, x_r) == x_p).expect("lifts differ by the group");
                let mut upair = ut.clone();
                upair.remove(i);
                let expect = up_tuple(&plift.indices, &copy(&pair));
                if upair.iter().map(|&s| y.act(h, s)).collect::<Vec<_>>() != expect {
                    return Err(Error::InvalidCover("pair lift is not a translate of the triple lift".into()));
                }
                let sign = if i % 2 == 0 { 1 } else { -1 };
                corrections.push((sign, upair.clone(), y.domain(&upair).unwrap(), y.get(&eg.chi[h], &upair)));
            }
            for (pos, &xb) in dom.simplices[0].iter().enumerate() {
                if dom.root[pos] != root {
                    continue;
                }
                let ux = lift.vertices[&xb];
                let mut v = svals[udom.pos(0, ux).unwrap()].clone();
                for (sign, _, cdom, cvals) in &corrections {
                    let c = &cvals[cdom.pos(0, ux).unwrap()];
                    if *sign > 0 {
                        v += c;
                    } else {
                        v -= c;
                    }
                }
                vals[pos] = v;
            }
        }
        down.canonical_circle(dom, &mut vals);
        if vals.iter().any(|v| !v.is_zero()) {
            s_bar.data.insert(t, vals);
        }
    }
    let gerbe_bar = SheetGerbe { sheets: ybar, s: s_bar, a: a_bar, f: f_bar };
    gerbe_bar.validate()?;
    Ok(DiscreteReduction { quotient, index_orbit, gerbe_bar })
}

impl DiscreteReduction {
    /// `q*` of the reduced gerbe, presented on the upstairs sheets.
    pub fn pull_back(&self, target: &Sheets) -> SheetGerbe {
        let down = &*self.gerbe_bar.sheets.model;
        let up = &*target.model;
        let ybar = &self.gerbe_bar.sheets;
        let pull = |form: &YForm| -> YForm {
            let mut out = YForm::zero(form.p, form.k, form.circle);
            for t in target.tuples(form.p) {
                let tb: Vec<usize> = t.iter().map(|&s| ybar.sheet(self.index_orbit[target.base(s)], s % target.copies)).collect();
                let Some(src) = form.data.get(&tb) else { continue };
                let bdom = ybar.domain(&tb).unwrap();
                let dom = target.domain(&t).unwrap();
                let vals: Vec<Q> = dom
                    .simplices
                    .get(form.k)
                    .into_iter()
                    .flatten()
                    .map(|&x| {
                        let img: Vec<usize> = up.space.simplices(form.k)[x].iter().map(|&v| self.quotient.projection[v]).collect();
                        let (sign, sorted) = sort_with_sign(&img).unwrap();
                        let xb = down.space.index_of(&sorted).unwrap();
                        let v = &src[bdom.pos(form.k, xb).unwrap()];
                        if sign > 0 { v.clone() } else { -v }
                    })
                    .collect();
                out.data.insert(t, vals);
            }
            out
        };
        let g = &self.gerbe_bar;
        SheetGerbe { sheets: target.clone(), s: pull(&g.s), a: pull(&g.a), f: pull(&g.f) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gerbe::local_data::{dd_cocycle, LocalDataChoices};
    use crate::gerbe::{evaluate_on_fundamental_class, integer_cohomologous};
    use crate::simplicial::lens_join;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lens_sheets() -> Sheets {
        let (k, gen) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[gen], Some(3)).unwrap();
        Sheets::new(Arc::new(CoverModel::star_cover(&k, &act).unwrap()), 1)
    }

    #[test]
    fn trivial_equivariant_gerbe_descends_trivially() {
        let y = lens_sheets();
        let red = reduce_topological(&StrongEquivariantGerbe::trivial(y)).unwrap();
        let g = &red.gerbe_bar;
        assert!(g.s.data.is_empty() && g.a.data.is_empty() && g.f.data.is_empty());
        assert_eq!(red.gerbe_bar.sheets.model.sets.len(), 4);
    }

    #[test]
    fn generator_class_descends_to_a_generator() {
        let y = lens_sheets();
        let mut e = vec![BigInt::zero(); y.model.nerve.count(3)];
        e[0] = BigInt::from(1);
        let eg = StrongEquivariantGerbe::from_averaged_cocycle(y.clone(), &e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let eg = eg.gauge(&y.to_circle(&y.random(2, 0, false, &mut rng)));
        let red = reduce_topological(&eg).unwrap();
        let back = red.pull_back(&y);
        assert!(back.check().ok());
        let dd_in = dd_cocycle(&eg.gerbe, LocalDataChoices::canonical(&y)).unwrap();
        let dd_back = dd_cocycle(&back, LocalDataChoices::canonical(&y)).unwrap();
        assert!(integer_cohomologous(&y.model.nerve, 3, &dd_in, &dd_back));
        let deg = evaluate_on_fundamental_class(&y.model.nerve, &dd_back).unwrap();
        assert_eq!(deg.magnitude(), BigInt::from(3).magnitude());
    }
}
