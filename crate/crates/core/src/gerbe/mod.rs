//! Bundle gerbes on the exact backend.
//!
//! The submersion is a disjoint union of sheets `Y = ⊔ (α, c)`, one sheet per cover index
//! `α` and copy `c`, each sheet being the cover set `U_α`. The fiber product `Y^[p]` has one
//! component per ordered tuple of sheets whose indices span a nerve simplex. Every component
//! is presented by cochains on the corresponding cover intersection, so the circle bundle
//! `P` over `Y^[2]` is trivialized: the connection is `∇ = d + 2πi A` with `A` a real
//! 1-form, the section `s` of `δP` is a circle-valued function, and the curving is
//! `f = 2πi F`. In these units the gerbe conditions read
//! `δs ≡ 0`, `δA + ds = 0` and `δF = dA`.
//!
//! Forms on fiber products carry `δ = Σ (−1)^{i−1} π_i*`. When the cover is a star cover
//! the partition of unity `ρ_(α,c)(x) = 1 / (#{β : x ∈ U_β} · copies)` gives a homotopy
//! `(Kξ)_{y⃗} = Σ_z ρ_z ∪ ξ_{z y⃗}` with `δK + Kδ = 1`, which splits `δ` constructively.

pub mod local_data;

use crate::cover::{CoverModel, Domain};
use crate::error::{Error, Result};
use crate::rational::{centered_frac, to_f64, Q};
use crate::simplicial::sort_with_sign;
use crate::smith::SparseIntMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Tuple = Vec<usize>;

/// A degree-`k` form (or, when `circle`, a circle-valued function) on `Y^[p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct YForm {
    pub p: usize,
    pub k: usize,
    pub circle: bool,
    /// Missing tuples are zero.
    pub data: BTreeMap<Tuple, Vec<Q>>,
}

impl YForm {
    pub fn zero(p: usize, k: usize, circle: bool) -> Self {
        Self { p, k, circle, data: BTreeMap::new() }
    }
}

/// The sheet submersion over a cover model.
#[derive(Clone, Debug)]
pub struct Sheets {
    pub model: Arc<CoverModel>,
    pub copies: usize,
}

impl Sheets {
    pub fn new(model: Arc<CoverModel>, copies: usize) -> Self {
        assert!(copies >= 1);
        Self { model, copies }
    }

    pub fn count(&self) -> usize {
        self.model.sets.len() * self.copies
    }

    pub fn base(&self, y: usize) -> usize {
        y / self.copies
    }

    pub fn sheet(&self, alpha: usize, copy: usize) -> usize {
        alpha * self.copies + copy
    }

    /// Group action on sheets, `g·(α, c) = (gα, c)`.
    pub fn act(&self, g: usize, y: usize) -> usize {
        self.sheet(self.model.index_perm[g][self.base(y)], y % self.copies)
    }

    pub fn bases(&self, t: &[usize]) -> Vec<usize> {
        t.iter().map(|&y| self.base(y)).collect()
    }

    pub fn domain(&self, t: &[usize]) -> Option<&Domain> {
        let (j, i) = self.model.domain_of(&self.bases(t))?;
        Some(self.model.domain(j, i))
    }

    /// All components of `Y^[p]`, in lexicographic order.
    pub fn tuples(&self, p: usize) -> Vec<Tuple> {
        let mut out: Vec<Tuple> = vec![Vec::new()];
        for _ in 0..p {
            let mut next = Vec::new();
            for t in &out {
                for y in 0..self.count() {
                    let mut u = t.clone();
                    u.push(y);
                    if self.model.domain_of(&self.bases(&u)).is_some() {
                        next.push(u);
                    }
                }
            }
            out = next;
        }
        out
    }

    fn len(&self, f: &YForm, t: &[usize]) -> usize {
        self.domain(t).map_or(0, |d| d.count(f.k))
    }

    pub fn get(&self, f: &YForm, t: &[usize]) -> Vec<Q> {
        f.data.get(t).cloned().unwrap_or_else(|| vec![Q::zero(); self.len(f, t)])
    }

    fn set(&self, f: &mut YForm, t: Tuple, mut v: Vec<Q>) {
        if f.circle {
            self.model.canonical_circle(self.domain(&t).unwrap(), &mut v);
        }
        if v.iter().all(Zero::is_zero) {
            f.data.remove(&t);
        } else {
            f.data.insert(t, v);
        }
    }

    pub fn random(&self, p: usize, k: usize, circle: bool, rng: &mut impl Rng) -> YForm {
        let mut f = YForm::zero(p, k, circle);
        for t in self.tuples(p) {
            let v = (0..self.len(&f, &t))
                .map(|_| Q::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
                .collect();
            self.set(&mut f, t, v);
        }
        f
    }

    /// `δ = Σ (−1)^{i−1} π_i*`, where `π_i` forgets the `i`-th point.
    pub fn delta(&self, f: &YForm) -> YForm {
        let mut out = YForm::zero(f.p + 1, f.k, f.circle);
        for t in self.tuples(f.p + 1) {
            let dom = self.domain(&t).unwrap();
            let mut acc = vec![Q::zero(); dom.count(f.k)];
            for i in 0..t.len() {
                let mut u = t.clone();
                u.remove(i);
                if let Some(src) = f.data.get(&u) {
                    let r = self.model.restrict(f.k, self.domain(&u).unwrap(), dom, src);
                    add_scaled(&mut acc, &r, if i % 2 == 0 { 1 } else { -1 });
                }
            }
            self.set(&mut out, t, acc);
        }
        out
    }

    pub fn d(&self, f: &YForm) -> YForm {
        let mut out = YForm::zero(f.p, f.k + 1, false);
        for (t, v) in &f.data {
            let dv = self.model.d(f.k, self.domain(t).unwrap(), v);
            self.set(&mut out, t.clone(), dv);
        }
        out
    }

    pub fn add(&self, a: &YForm, b: &YForm) -> YForm {
        self.lin(a, b, 1)
    }

    pub fn sub(&self, a: &YForm, b: &YForm) -> YForm {
        self.lin(a, b, -1)
    }

    pub fn neg(&self, a: &YForm) -> YForm {
        self.lin(&YForm::zero(a.p, a.k, a.circle), a, -1)
    }

    fn lin(&self, a: &YForm, b: &YForm, sign: i64) -> YForm {
        assert_eq!((a.p, a.k), (b.p, b.k));
        let mut out = YForm::zero(a.p, a.k, a.circle || b.circle);
        let keys: std::collections::BTreeSet<&Tuple> = a.data.keys().chain(b.data.keys()).collect();
        for t in keys {
            let mut v = self.get(a, t);
            add_scaled(&mut v, &self.get(b, t), sign);
            self.set(&mut out, t.clone(), v);
        }
        out
    }

    /// Reinterprets a real function as circle-valued.
    pub fn to_circle(&self, f: &YForm) -> YForm {
        assert_eq!(f.k, 0);
        let mut out = YForm::zero(f.p, 0, true);
        for (t, v) in &f.data {
            self.set(&mut out, t.clone(), v.clone());
        }
        out
    }

    /// `(g*f)_{y⃗} = g*(f_{g y⃗})`.
    pub fn pullback(&self, g: usize, f: &YForm) -> YForm {
        let mut out = YForm::zero(f.p, f.k, f.circle);
        for t in self.tuples(f.p) {
            let gt: Tuple = t.iter().map(|&y| self.act(g, y)).collect();
            if let Some(v) = f.data.get(&gt) {
                let w = self.model.pullback(g, f.k, self.domain(&gt).unwrap(), self.domain(&t).unwrap(), v);
                self.set(&mut out, t, w);
            }
        }
        out
    }

    /// Pull-back of a form on the carrier (a global cochain) to `Y^[p]`.
    pub fn pull_from_base(&self, p: usize, k: usize, circle: bool, omega: &[Q]) -> YForm {
        let mut out = YForm::zero(p, k, circle);
        for t in self.tuples(p) {
            let dom = self.domain(&t).unwrap();
            let v = dom.simplices.get(k).map_or_else(Vec::new, |l| l.iter().map(|&x| omega[x].clone()).collect());
            self.set(&mut out, t, v);
        }
        out
    }

    /// A form on `Y` with `δω = 0` is the pull-back of a unique form on the base.
    pub fn descend(&self, f: &YForm) -> Result<Vec<Q>> {
        assert_eq!(f.p, 1);
        if !self.is_zero(&self.delta(f)) {
            return Err(Error::NotBasic(format!("{}-form on Y has nonzero δ", f.k)));
        }
        let space = &self.model.space;
        let mut out = vec![Q::zero(); space.count(f.k)];
        for y in 0..self.count() {
            let dom = self.domain(&[y]).unwrap();
            let v = self.get(f, &[y]);
            for (pos, &x) in dom.simplices.get(f.k).into_iter().flatten().enumerate() {
                out[x] = v[pos].clone();
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self, f: &YForm) -> bool {
        f.data.iter().all(|(t, v)| {
            if f.circle {
                self.model.is_zero_circle(self.domain(t).unwrap(), v)
            } else {
                v.iter().all(Zero::is_zero)
            }
        })
    }

    /// Largest entry, circle values centered.
    pub fn max_abs(&self, f: &YForm) -> f64 {
        f.data
            .values()
            .flatten()
            .map(|q| to_f64(&if f.circle { centered_frac(q) } else { q.clone() }).abs())
            .fold(0.0, f64::max)
    }

    /// Partition of unity value of sheet `z` on the carrier vertex `x`.
    fn rho(&self, z: usize, x: usize) -> Q {
        let alpha = self.base(z);
        if !self.model.sets[alpha].contains(&x) {
            return Q::zero();
        }
        let n = self.model.sets.iter().filter(|s| s.contains(&x)).count() * self.copies;
        Q::new(BigInt::one(), BigInt::from(n))
    }

    /// The homotopy `K: Ω(Y^[p]) → Ω(Y^[p−1])`, `p ≥ 2`, on a star cover.
    pub fn homotopy(&self, f: &YForm) -> Result<YForm> {
        if f.p < 2 {
            return Err(Error::LevelError(format!("homotopy needs p ≥ 2, got {}", f.p)));
        }
        let space = &self.model.space;
        let mut out = YForm::zero(f.p - 1, f.k, false);
        for t in self.tuples(f.p - 1) {
            let dom = self.domain(&t).unwrap();
            let mut acc = vec![Q::zero(); dom.count(f.k)];
            for z in 0..self.count() {
                let mut zt = vec![z];
                zt.extend_from_slice(&t);
                let Some(src) = f.data.get(&zt) else { continue };
                let zdom = self.domain(&zt).unwrap();
                for (pos, &x) in dom.simplices.get(f.k).into_iter().flatten().enumerate() {
                    let first = space.simplices(f.k)[x][0];
                    let r = self.rho(z, first);
                    if r.is_zero() {
                        continue;
                    }
                    let zp = zdom.pos(f.k, x).ok_or_else(|| {
                        Error::InvalidCover("partition of unity needs a star cover".into())
                    })?;
                    acc[pos] += r * &src[zp];
                }
            }
            self.set(&mut out, t, acc);
        }
        Ok(out)
    }

    /// Constructive splitting of `δ`: for `δξ = 0` on `Y^[p]`, `p ≥ 2`, returns `η` on
    /// `Y^[p−1]` with `δη = ξ`.
    pub fn solve_delta(&self, xi: &YForm) -> Result<YForm> {
        if xi.circle {
            return Err(Error::LevelError("solve_delta acts on real forms".into()));
        }
        if !self.is_zero(&self.delta(xi)) {
            return Err(Error::NotClosed(format!("δξ ≠ 0 on Y^[{}]", xi.p + 1)));
        }
        let eta = self.homotopy(xi)?;
        debug_assert!(self.is_zero(&self.sub(&self.delta(&eta), xi)));
        Ok(eta)
    }

    /// Pull-back of an alternating integer Čech cochain on the nerve to constant functions on
    /// `Y^[p]`.
    pub fn pull_cech(&self, p: usize, values: &[BigInt]) -> YForm {
        let j = p - 1;
        let mut out = YForm::zero(p, 0, false);
        for t in self.tuples(p) {
            let Some((sign, sorted)) = sort_with_sign(&self.bases(&t)) else { continue };
            if sorted.len() != j + 1 {
                continue;
            }
            let idx = self.model.nerve.index_of(&sorted).unwrap();
            let c = Q::from_integer(&values[idx] * sign);
            let n = self.len(&out, &t);
            self.set(&mut out, t, vec![c; n]);
        }
        out
    }
}

fn add_scaled(acc: &mut [Q], v: &[Q], sign: i64) {
    for (a, b) in acc.iter_mut().zip(v) {
        if sign > 0 {
            *a += b;
        } else {
            *a -= b;
        }
    }
}

/// `(Y, P, s)` with connection `A` and curving `F`, in real units.
#[derive(Clone, Debug)]
pub struct SheetGerbe {
    pub sheets: Sheets,
    pub s: YForm,
    pub a: YForm,
    pub f: YForm,
}

/// Residuals of the gerbe conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct GerbeCheck {
    pub delta_s: f64,
    pub connection: f64,
    pub curving: f64,
}

impl GerbeCheck {
    pub fn ok(&self) -> bool {
        self.delta_s == 0.0 && self.connection == 0.0 && self.curving == 0.0
    }
}

impl SheetGerbe {
    pub fn trivial(sheets: Sheets) -> Self {
        Self { sheets, s: YForm::zero(3, 0, true), a: YForm::zero(2, 1, false), f: YForm::zero(1, 2, false) }
    }

    /// The gerbe whose Dixmier–Douady cocycle is the integer Čech 3-cocycle `n` on the
    /// nerve: `s = −K(π*n)`, `A = −K(ds)`, `F = K(dA)`.
    pub fn from_integer_cocycle(sheets: Sheets, n: &[BigInt]) -> Result<Self> {
        let nerve = &sheets.model.nerve;
        if n.len() != nerve.count(3) {
            return Err(Error::GradingError("cocycle length differs from the number of nerve 3-simplices".into()));
        }
        if nerve.dim() >= 4 && !nerve.coboundary_matrix(3).mul_vec(n).iter().all(Zero::is_zero) {
            return Err(Error::NotClosed("integer cochain is not a cocycle".into()));
        }
        let pn = sheets.pull_cech(4, n);
        let s_lift = sheets.neg(&sheets.homotopy(&pn)?);
        let a = sheets.neg(&sheets.homotopy(&sheets.d(&s_lift))?);
        let f = sheets.homotopy(&sheets.d(&a))?;
        let s = sheets.to_circle(&s_lift);
        Ok(Self { sheets, s, a, f })
    }

    pub fn check(&self) -> GerbeCheck {
        let y = &self.sheets;
        GerbeCheck {
            delta_s: y.max_abs(&y.delta(&self.s)),
            connection: y.max_abs(&y.add(&y.delta(&self.a), &y.d(&self.s))),
            curving: y.max_abs(&y.sub(&y.delta(&self.f), &y.d(&self.a))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.check();
        if c.ok() {
            Ok(())
        } else {
            Err(Error::NotCocycle { residual: c.delta_s.max(c.connection).max(c.curving) })
        }
    }

    /// Tensor product over a common submersion.
    pub fn tensor(&self, other: &Self) -> Self {
        let y = &self.sheets;
        Self { sheets: y.clone(), s: y.add(&self.s, &other.s), a: y.add(&self.a, &other.a), f: y.add(&self.f, &other.f) }
    }

    pub fn inverse(&self) -> Self {
        let y = &self.sheets;
        Self { sheets: y.clone(), s: y.neg(&self.s), a: y.neg(&self.a), f: y.neg(&self.f) }
    }

    /// Gauge change by a circle function `φ` on `Y^[2]`: `s + δφ`, `A − dφ`.
    pub fn gauge(&self, phi: &YForm) -> Self {
        let y = &self.sheets;
        Self {
            sheets: y.clone(),
            s: y.add(&self.s, &y.delta(phi)),
            a: y.sub(&self.a, &y.d(phi)),
            f: self.f.clone(),
        }
    }

    /// The 3-form `Ω` on the base with `π*Ω = dF` (real units; the 3-curvature is `2πi Ω`).
    pub fn three_curvature(&self) -> Result<Vec<Q>> {
        self.sheets.descend(&self.sheets.d(&self.f))
    }
}

/// Whether two integer cochains of degree `n` on a complex are cohomologous over ℤ.
pub fn integer_cohomologous(
    complex: &crate::simplicial::SimplicialComplex,
    n: usize,
    a: &[BigInt],
    b: &[BigInt],
) -> bool {
    let diff: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diff.iter().all(Zero::is_zero) {
        return true;
    }
    if n == 0 {
        return false;
    }
    let delta = complex.coboundary_matrix(n - 1);
    let mut aug = SparseIntMatrix::zeros(delta.rows(), delta.cols() + 1);
    for i in 0..delta.rows() {
        for (&j, v) in delta.row(i) {
            aug.add(i, j, v);
        }
        aug.add(i, delta.cols(), &diff[i]);
    }
    let fa = delta.invariant_factors();
    let fb = aug.invariant_factors();
    fa.len() == fb.len() && fa.iter().product::<BigInt>() == fb.iter().product::<BigInt>()
}

/// Sum of an integer cochain over a fundamental cycle of an oriented pseudomanifold, or
/// `None` when the top homology is not ℤ.
pub fn evaluate_on_fundamental_class(complex: &crate::simplicial::SimplicialComplex, n: &[BigInt]) -> Option<BigInt> {
    let top = complex.dim();
    let z = fundamental_cycle(complex)?;
    assert_eq!(n.len(), complex.count(top));
    Some(z.iter().zip(n).map(|(a, b)| BigInt::from(*a) * b).sum())
}

/// A generator of the top integral cycles, by propagating orientations across facets.
pub fn fundamental_cycle(complex: &crate::simplicial::SimplicialComplex) -> Option<Vec<i64>> {
    let top = complex.dim();
    let facets = complex.simplices(top);
    let mut orient = vec![0i64; facets.len()];
    let mut cofaces: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    for (i, s) in facets.iter().enumerate() {
        for (sign, f) in crate::simplicial::faces_with_sign(s) {
            cofaces.entry(complex.index_of(&f).unwrap()).or_default().push((i, sign));
        }
    }
    if facets.is_empty() || cofaces.values().any(|c| c.len() != 2) {
        return None;
    }
    orient[0] = 1;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for (sign, f) in crate::simplicial::faces_with_sign(&facets[i]) {
            for &(j, sj) in &cofaces[&complex.index_of(&f).unwrap()] {
                if j != i {
                    let want = -orient[i] * sign * sj;
                    if orient[j] == 0 {
                        orient[j] = want;
                        stack.push(j);
                    } else if orient[j] != want {
                        return None;
                    }
                }
            }
        }
    }
    orient.iter().all(|&o| o != 0).then_some(orient)
}

/// Signed sum of a real top cochain over the fundamental cycle.
pub fn integrate_top(complex: &crate::simplicial::SimplicialComplex, omega: &[Q]) -> Option<Q> {
    let z = fundamental_cycle(complex)?;
    Some(z.iter().zip(omega).map(|(a, b)| Q::from_integer(BigInt::from(*a)) * b).sum())
}
