//! The triple complex `K^{i,j,k}` over `G^•×M` on the exact backend, its total
//! coboundary `D = ∂ + (−1)^i δ̌ + (−1)^{i+j} d̃`, Deligne cocycles, and Deligne
//! cohomology groups of a carrier.
//!
//! A block `(i, j, k)` has one cell per pair `(g⃗, τ)` with `g⃗ ∈ G^i` and `τ` a `j`-simplex
//! of the nerve; the cell holds a rational `k`-cochain on `U_τ`. For `k = 0` the cochain is
//! the lift of a circle-valued function and `d̃` is `d` of the lift.

pub mod analytic;

use crate::cover::{code_of, tuple_of, CoverModel};
use crate::error::{Error, Result};
use crate::linalg::{mixed_solvable, SparseRow};
use crate::rational::{centered_frac, format_q, to_f64, Q};
use crate::simplicial::{faces_with_sign, quotient_complex, sort_with_sign, SimplicialGroupAction};
use crate::smith::{integer_cohomology, AbelianGroupPresentation};
use num_traits::{Signed, Zero};
use rand::Rng;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub type BlockKey = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct TriGradedCochain {
    pub level: usize,
    pub degree: usize,
    /// Per block, per cell, local values; an empty cell vector means zero.
    pub blocks: BTreeMap<BlockKey, Vec<Vec<Q>>>,
}

/// A coordinate of the total complex: block, cell, local simplex.
type Coord = (BlockKey, usize, usize);

/// One nonzero entry of `D(c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub block: BlockKey,
    pub group_tuple: Vec<usize>,
    pub nerve_simplex: Vec<usize>,
    pub max_abs: f64,
}

/// Which summands of `D` to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parts {
    pub group: bool,
    pub cech: bool,
    pub form: bool,
}

impl Parts {
    pub const ALL: Parts = Parts { group: true, cech: true, form: true };
    pub const GROUP: Parts = Parts { group: true, cech: false, form: false };
    pub const CECH: Parts = Parts { group: false, cech: true, form: false };
    pub const FORM: Parts = Parts { group: false, cech: false, form: true };
}

/// The total complex of a cover model truncated at level `N`.
#[derive(Clone, Copy)]
pub struct DeligneComplex<'a> {
    pub model: &'a CoverModel,
    pub level: usize,
}

impl<'a> DeligneComplex<'a> {
    pub fn new(model: &'a CoverModel, level: usize) -> Self {
        Self { model, level }
    }

    /// Blocks of total degree `m` present in this complex.
    pub fn blocks(&self, m: usize) -> Vec<BlockKey> {
        let jmax = self.model.nerve.dim();
        let kmax = self.level.min(self.model.space.dim());
        let mut out = Vec::new();
        for i in 0..=m {
            for j in 0..=jmax.min(m - i) {
                let k = m - i - j;
                if k <= kmax {
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    pub fn cells(&self, (i, j, _): BlockKey) -> usize {
        self.model.order().pow(i as u32) * self.model.nerve.count(j)
    }

    fn cell_len(&self, (_, j, k): BlockKey, cell: usize) -> usize {
        self.model.domain(j, cell % self.model.nerve.count(j)).count(k)
    }

    pub fn zero(&self, m: usize) -> TriGradedCochain {
        let blocks = self.blocks(m).into_iter().map(|b| (b, vec![Vec::new(); self.cells(b)])).collect();
        TriGradedCochain { level: self.level, degree: m, blocks }
    }

    pub fn random(&self, m: usize, rng: &mut impl Rng) -> TriGradedCochain {
        let mut c = self.zero(m);
        for (&key, cells) in c.blocks.iter_mut() {
            for (cell, v) in cells.iter_mut().enumerate() {
                *v = (0..self.cell_len(key, cell))
                    .map(|_| Q::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=6).into()))
                    .collect();
            }
        }
        self.normalize(&mut c);
        c
    }

    pub fn validate(&self, c: &TriGradedCochain) -> Result<()> {
        if c.level != self.level {
            return Err(Error::GradingError(format!("cochain level {} vs complex level {}", c.level, self.level)));
        }
        for (&key, cells) in &c.blocks {
            let (i, j, k) = key;
            if i + j + k != c.degree || k > self.level || j > self.model.nerve.dim() {
                return Err(Error::GradingError(format!("block {key:?} in degree {}", c.degree)));
            }
            if cells.len() != self.cells(key) {
                return Err(Error::GradingError(format!("block {key:?} has {} cells", cells.len())));
            }
            for (cell, v) in cells.iter().enumerate() {
                if !v.is_empty() && v.len() != self.cell_len(key, cell) {
                    return Err(Error::GradingError(format!("block {key:?} cell {cell} has wrong length")));
                }
            }
        }
        Ok(())
    }

    /// Replaces circle-valued lifts by their canonical representatives.
    pub fn normalize(&self, c: &mut TriGradedCochain) {
        for (&(_, j, k), cells) in c.blocks.iter_mut() {
            if k == 0 {
                let nj = self.model.nerve.count(j);
                for (cell, v) in cells.iter_mut().enumerate() {
                    self.model.canonical_circle(self.model.domain(j, cell % nj), v);
                }
            }
        }
    }

    /// Group element tuple and nerve simplex of a cell.
    pub fn cell_label(&self, (i, j, _): BlockKey, cell: usize) -> (Vec<usize>, Vec<usize>) {
        let nj = self.model.nerve.count(j);
        (tuple_of(self.model.order(), i, cell / nj), self.model.nerve.simplices(j)[cell % nj].clone())
    }

    /// Source coordinates and signs of the target coordinate `(key, cell, x)` of `D`.
    fn stencil(&self, key: BlockKey, cell: usize, x: usize, parts: Parts) -> Vec<(Coord, i64)> {
        let (i, j, k) = key;
        let m = self.model;
        let g = &m.group;
        let nj = m.nerve.count(j);
        let (gcode, t) = (cell / nj, cell % nj);
        let dom = m.domain(j, t);
        let gx = dom.simplices[k][x];
        let tau = &m.nerve.simplices(j)[t];
        let mut out = Vec::new();
        let sgn = |e: usize| if e.is_multiple_of(2) { 1 } else { -1 };
        if i >= 1 && parts.group {
            let gv = tuple_of(m.order(), i, gcode);
            for l in 0..i {
                let h: Vec<usize> = match l {
                    0 => gv[1..].to_vec(),
                    _ => {
                        let mut h = gv[..l - 1].to_vec();
                        h.push(g.mul(gv[l - 1], gv[l]));
                        h.extend_from_slice(&gv[l + 1..]);
                        h
                    }
                };
                let src = (code_of(m.order(), &h) * nj + t, x);
                out.push((((i - 1, j, k), src.0, src.1), sgn(l)));
            }
            let last = gv[i - 1];
            let img: Vec<usize> = tau.iter().map(|&a| m.index_perm[last][a]).collect();
            let (perm_sign, sorted) = sort_with_sign(&img).expect("group permutes cover indices");
            let t2 = m.nerve.index_of(&sorted).expect("nerve is invariant");
            let (orient, y) = m.image(last, k, gx);
            let pos = m.domain(j, t2).pos(k, y).expect("group maps domains onto domains");
            let cell2 = code_of(m.order(), &gv[..i - 1]) * nj + t2;
            out.push((((i - 1, j, k), cell2, pos), sgn(i) * perm_sign * orient));
        }
        if j >= 1 && parts.cech {
            let nj1 = m.nerve.count(j - 1);
            for (pos_sign, face) in faces_with_sign(tau) {
                let t2 = m.nerve.index_of(&face).unwrap();
                let pos = m.domain(j - 1, t2).pos(k, gx).expect("restriction to a subdomain");
                out.push((((i, j - 1, k), gcode * nj1 + t2, pos), sgn(i) * pos_sign));
            }
        }
        if k >= 1 && parts.form {
            let s = &m.space.simplices(k)[gx];
            for (fs, f) in faces_with_sign(s) {
                let pos = dom.pos(k - 1, m.space.index_of(&f).unwrap()).unwrap();
                out.push((((i, j, k - 1), cell, pos), sgn(i + j) * fs));
            }
        }
        out
    }

    /// The total coboundary `D`, landing in degree `c.degree + 1`.
    pub fn d(&self, c: &TriGradedCochain) -> Result<TriGradedCochain> {
        self.d_parts(c, Parts::ALL)
    }

    /// The signed summands of `D` selected by `parts`; `Parts::GROUP` is `∂`.
    pub fn d_parts(&self, c: &TriGradedCochain, parts: Parts) -> Result<TriGradedCochain> {
        self.validate(c)?;
        let mut out = self.zero(c.degree + 1);
        for (&key, cells) in out.blocks.iter_mut() {
            for (cell, v) in cells.iter_mut().enumerate() {
                let len = self.cell_len(key, cell);
                let mut acc = vec![Q::zero(); len];
                let mut any = false;
                for (x, slot) in acc.iter_mut().enumerate() {
                    for ((sk, sc, sx), sign) in self.stencil(key, cell, x, parts) {
                        if let Some(val) = c.blocks.get(&sk).and_then(|b| b[sc].get(sx)) {
                            any = true;
                            if sign > 0 {
                                *slot += val;
                            } else {
                                *slot -= val;
                            }
                        }
                    }
                }
                if any && acc.iter().any(|q| !q.is_zero()) {
                    *v = acc;
                }
            }
        }
        self.normalize(&mut out);
        for cells in out.blocks.values_mut() {
            for v in cells.iter_mut() {
                if v.iter().all(Zero::is_zero) {
                    v.clear();
                }
            }
        }
        Ok(out)
    }

    /// Nonzero cells of a cochain (circle cells read modulo integer constants).
    pub fn support(&self, c: &TriGradedCochain) -> Vec<Residual> {
        let mut out = Vec::new();
        for (&key, cells) in &c.blocks {
            let nj = self.model.nerve.count(key.1);
            for (cell, v) in cells.iter().enumerate() {
                let dom = self.model.domain(key.1, cell % nj);
                let zero = if key.2 == 0 { self.model.is_zero_circle(dom, v) } else { v.iter().all(Zero::is_zero) };
                if !zero {
                    let max_abs = v
                        .iter()
                        .map(|q| to_f64(&if key.2 == 0 { centered_frac(q) } else { q.clone() }).abs())
                        .fold(0.0, f64::max);
                    let (group_tuple, nerve_simplex) = self.cell_label(key, cell);
                    out.push(Residual { block: key, group_tuple, nerve_simplex, max_abs });
                }
            }
        }
        out
    }

    /// `D(c) = 0`, with the nonzero cells of `D(c)` as the residual report.
    pub fn is_cocycle(&self, c: &TriGradedCochain) -> Result<(bool, Vec<Residual>)> {
        let r = self.support(&self.d(c)?);
        Ok((r.is_empty(), r))
    }

    pub fn add(&self, a: &TriGradedCochain, b: &TriGradedCochain) -> TriGradedCochain {
        self.combine(a, b, 1)
    }

    pub fn sub(&self, a: &TriGradedCochain, b: &TriGradedCochain) -> TriGradedCochain {
        self.combine(a, b, -1)
    }

    pub fn neg(&self, a: &TriGradedCochain) -> TriGradedCochain {
        self.combine(&self.zero(a.degree), a, -1)
    }

    fn combine(&self, a: &TriGradedCochain, b: &TriGradedCochain, sign: i64) -> TriGradedCochain {
        assert_eq!(a.degree, b.degree);
        let mut out = self.zero(a.degree);
        for (&key, cells) in out.blocks.iter_mut() {
            for (cell, v) in cells.iter_mut().enumerate() {
                let x = a.blocks.get(&key).map(|c| c[cell].as_slice()).unwrap_or(&[]);
                let y = b.blocks.get(&key).map(|c| c[cell].as_slice()).unwrap_or(&[]);
                if x.is_empty() && y.is_empty() {
                    continue;
                }
                let len = self.cell_len(key, cell);
                *v = (0..len)
                    .map(|p| {
                        let xv = x.get(p).cloned().unwrap_or_else(Q::zero);
                        let yv = y.get(p).cloned().unwrap_or_else(Q::zero);
                        if sign > 0 { xv + yv } else { xv - yv }
                    })
                    .collect();
            }
        }
        self.normalize(&mut out);
        out
    }

    pub fn equal(&self, a: &TriGradedCochain, b: &TriGradedCochain) -> bool {
        self.support(&self.sub(a, b)).is_empty()
    }

    /// Whether a cocycle is `D` of some cochain, deciding the integer constants hidden in
    /// circle-valued cells exactly. Unknowns: rational lifts of a degree `m−1` cochain and one
    /// integer per component of every circle cell in degree `m`.
    pub fn is_coboundary(&self, c: &TriGradedCochain) -> Result<bool> {
        self.validate(c)?;
        if c.degree == 0 {
            return Ok(self.support(c).is_empty());
        }
        let src_blocks = self.blocks(c.degree - 1);
        let mut offset: BTreeMap<(BlockKey, usize), usize> = BTreeMap::new();
        let mut n = 0;
        for &key in &src_blocks {
            for cell in 0..self.cells(key) {
                offset.insert((key, cell), n);
                n += self.cell_len(key, cell);
            }
        }
        let n_rational = n;
        let mut rows: Vec<SparseRow> = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        for key in self.blocks(c.degree) {
            let nj = self.model.nerve.count(key.1);
            for cell in 0..self.cells(key) {
                let dom = self.model.domain(key.1, cell % nj);
                let mut int_col = BTreeMap::new();
                for x in 0..self.cell_len(key, cell) {
                    let mut row = SparseRow::new();
                    for ((sk, sc, sx), sign) in self.stencil(key, cell, x, Parts::ALL) {
                        if let Some(&o) = offset.get(&(sk, sc)) {
                            *row.entry(o + sx).or_insert_with(Q::zero) += Q::from_integer(sign.into());
                        }
                    }
                    if key.2 == 0 {
                        let col = *int_col.entry(dom.root[x]).or_insert_with(|| {
                            n += 1;
                            n - 1
                        });
                        row.insert(col, Q::from_integer(1.into()));
                    }
                    row.retain(|_, v| !v.is_zero());
                    rows.push(row);
                    rhs.push(c.blocks.get(&key).and_then(|b| b[cell].get(x).cloned()).unwrap_or_else(Q::zero));
                }
            }
        }
        Ok(mixed_solvable(&rows, &rhs, n_rational))
    }

    /// JSON with `"i,j,k"` keys, each listing nonzero cells with their labels.
    pub fn to_json(&self, c: &TriGradedCochain) -> Value {
        let mut blocks = Map::new();
        for (&key, cells) in &c.blocks {
            let entries: Vec<Value> = cells
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_empty())
                .map(|(cell, v)| {
                    let (g, t) = self.cell_label(key, cell);
                    json!({"group": g, "simplex": t, "values": v.iter().map(format_q).collect::<Vec<_>>()})
                })
                .collect();
            blocks.insert(format!("{},{},{}", key.0, key.1, key.2), Value::Array(entries));
        }
        json!({"level": c.level, "degree": c.degree, "blocks": blocks})
    }
}

/// Largest absolute entry of a cochain, circle cells centered.
pub fn max_abs(c: &TriGradedCochain) -> Q {
    c.blocks
        .iter()
        .flat_map(|(&(_, _, k), cells)| cells.iter().flatten().map(move |q| if k == 0 { centered_frac(q) } else { q.clone() }))
        .map(|q| q.abs())
        .max()
        .unwrap_or_else(Q::zero)
}

/// Deligne cohomology `H^m(M, F(N))` of the carrier of a cover model, read off from integer
/// and rational ranks through the exact sequences relating it to `H^m(M, 𝕋)`, closed forms
/// and `H^{m+1}(M, ℤ)`. For a nontrivial free group action the carrier is replaced by its
/// quotient, since the simplicial space `G^•×M` then computes the cohomology of `M/G`.
///
/// Returns the group and whether `H^{m+1}(ℤ)` computed on the nerve agrees with the carrier,
/// which holds for good covers.
pub fn deligne_cohomology_discrete(
    model: &CoverModel,
    level: usize,
    m: usize,
) -> Result<(AbelianGroupPresentation, bool)> {
    let (space, nerve_agrees) = if model.order() > 1 {
        let perms: Vec<Vec<usize>> = model.group.generators().iter().map(|&g| model.group.perm(g).to_vec()).collect();
        let act = SimplicialGroupAction::new(&model.space, &perms, Some(model.order()))?;
        let quot = quotient_complex(&model.space, &act)?;
        (quot.complex, None)
    } else {
        (model.space.clone(), Some(&model.nerve))
    };
    let h_next = integer_cohomology(&space, m + 1);
    let agrees = nerve_agrees.is_none_or(|nv| integer_cohomology(nv, m + 1) == h_next);
    let betti = |d: usize| integer_cohomology(&space, d).free_rank;
    let out = if m < level {
        AbelianGroupPresentation { circle_rank: betti(m), torsion: h_next.torsion, ..Default::default() }
    } else if m == level {
        let coboundary_rank = if level < space.dim() { space.boundary_matrix(level + 1).rank() } else { 0 };
        AbelianGroupPresentation {
            free_rank: h_next.free_rank,
            torsion: h_next.torsion,
            circle_rank: betti(m),
            vector_dim: coboundary_rank,
        }
    } else {
        h_next
    };
    Ok((out, agrees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::simplicial::{hexagon_arc_cover, GroupTable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hexagon_model(rotate: bool) -> CoverModel {
        let (k, sets) = hexagon_arc_cover();
        let gens = if rotate { vec![(0..6).map(|i| (i + 2) % 6).collect()] } else { vec![] };
        CoverModel::new(k, GroupTable::generated_by(6, &gens).unwrap(), sets).unwrap()
    }

    #[test]
    fn d_squared_vanishes_on_hexagon() {
        let m = hexagon_model(true);
        let dc = DeligneComplex::new(&m, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for deg in 0..3 {
            let c = dc.random(deg, &mut rng);
            let dd = dc.d(&dc.d(&c).unwrap()).unwrap();
            assert!(dc.support(&dd).is_empty(), "degree {deg}");
        }
    }

    #[test]
    fn circle_function_coboundary_components() {
        let m = hexagon_model(false);
        let dc = DeligneComplex::new(&m, 1);
        let mut c = dc.zero(0);
        c.blocks.get_mut(&(0, 0, 0)).unwrap()[0] = vec![q(1, 3), q(5, 6), q(1, 2)];
        let d = dc.d(&c).unwrap();
        // d̃ of the lift on arc {0,1,2}.
        assert_eq!(d.blocks[&(0, 0, 1)][0], vec![q(1, 2), q(-1, 3)]);
        // δ̌ on U_{01} = {2}: f_1 − f_0 = −1/2 ≡ 1/2.
        assert_eq!(d.blocks[&(0, 1, 0)][0], vec![q(1, 2)]);
    }

    #[test]
    fn holonomy_classifies_degree_one_on_circle() {
        let m = hexagon_model(false);
        let dc = DeligneComplex::new(&m, 1);
        let cocycle = |h: Q| {
            let mut c = dc.zero(1);
            c.blocks.get_mut(&(0, 1, 0)).unwrap()[0] = vec![h];
            dc.normalize(&mut c);
            c
        };
        for h in [q(1, 5), q(2, 5), q(1, 2)] {
            assert!(dc.is_cocycle(&cocycle(h.clone())).unwrap().0);
            assert!(!dc.is_coboundary(&cocycle(h)).unwrap());
        }
        assert!(dc.is_coboundary(&cocycle(qi(0))).unwrap());
        assert!(dc.is_coboundary(&dc.sub(&cocycle(q(7, 5)), &cocycle(q(2, 5)))).unwrap());
        assert!(!dc.is_coboundary(&dc.sub(&cocycle(q(3, 5)), &cocycle(q(2, 5)))).unwrap());
    }

    #[test]
    fn perturbed_cocycle_residual_is_local() {
        let (k, _) = crate::simplicial::icosahedron();
        let m = CoverModel::star_cover(&k, &SimplicialGroupAction::trivial(&k)).unwrap();
        let dc = DeligneComplex::new(&m, 1);
        let mut c = dc.zero(1);
        let cell = 5;
        let len = m.domain(1, cell).count(0);
        let mut v = vec![qi(0); len];
        v[len - 1] = q(1, 7);
        c.blocks.get_mut(&(0, 1, 0)).unwrap()[cell] = v;
        let (ok, res) = dc.is_cocycle(&c).unwrap();
        assert!(!ok);
        let tri = &m.nerve.simplices(1)[cell];
        assert!(res.iter().all(|r| tri.iter().all(|a| r.nerve_simplex.contains(a))));
        assert!(res.iter().any(|r| (r.max_abs - 1.0 / 7.0).abs() < 1e-15));
    }

    #[test]
    fn deligne_groups_of_circle() {
        let m = hexagon_model(false);
        let (h1, ok) = deligne_cohomology_discrete(&m, 1, 1).unwrap();
        assert!(ok);
        assert_eq!((h1.free_rank, h1.circle_rank), (0, 1));
        let (h0, _) = deligne_cohomology_discrete(&m, 1, 0).unwrap();
        assert_eq!(h0.to_string(), "T");
    }

    #[test]
    fn deligne_groups_of_spheres_in_degree_two() {
        use crate::simplicial::{sphere_boundary_of_simplex, SimplicialGroupAction};
        let star = |d: usize| {
            let k = sphere_boundary_of_simplex(d);
            CoverModel::star_cover(&k, &SimplicialGroupAction::trivial(&k)).unwrap()
        };
        let (s2, ok) = deligne_cohomology_discrete(&star(3), 2, 2).unwrap();
        assert!(ok);
        assert_eq!((s2.free_rank, s2.circle_rank, s2.torsion.len()), (0, 1, 0));
        let (s3, ok) = deligne_cohomology_discrete(&star(4), 2, 2).unwrap();
        assert!(ok);
        assert_eq!((s3.free_rank, s3.circle_rank), (1, 0));
    }
}
