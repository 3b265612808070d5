//! Local data of an equivariant sheet gerbe and the Čech–Deligne cocycles it defines.
//!
//! Over `U_α` the gerbe is trivialized by the section `ψ_α = (α, c_α)` of `Y`: the bundle
//! `R_α` restricted to sheet `b` is `P_{b ψ_α}^{-1}`, so in the trivializations
//!
//! - `v_α(b₁, b₂) = s(b₁, b₂, ψ_α)`,
//! - `η_α(b) = −A(b, ψ_α)`,
//! - `w_αβ(b) = σ_αβ − s(b, ψ_α, ψ_β)` with free circle functions `σ_αβ` on `U_αβ`,
//! - `r_(g,v)(b) = χ_g(b, ψ¹) − s(b, ψ_v, ψ¹) + g*s(gb, ψ_{gv}, gψ¹) + τ_(g,v)` with a second
//!   section `ψ¹ = ψ¹_(g,v)` over `U_v` and free circle functions `τ`.
//!
//! The degree-2 cocycle has components `f = δ̌w`, `θ¹ = δ̌η − dw`, `θ² = dη − F`,
//! `g = ∂w + δ̌r`, `ω¹ = ∂η + dr` and `h = −∂r`, each computed on every sheet and checked
//! to be basic before it is descended.

use super::{SheetGerbe, Sheets};
use crate::cover::{code_of, Domain};
use crate::deligne::{DeligneComplex, TriGradedCochain};
use crate::equivariant::StrongEquivariantGerbe;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::simplicial::faces_with_sign;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use std::collections::BTreeMap;

/// The free choices entering local data.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDataChoices {
    /// Copy index of `ψ_α` for each cover index.
    pub psi0: Vec<usize>,
    /// Copy index of `ψ¹_(g,v)`, indexed `[g][v]`.
    pub psi1: Vec<Vec<usize>>,
    /// Circle functions on `U_αβ`, one per nerve edge.
    pub sigma: Vec<Vec<Q>>,
    /// Circle functions on `U_v`, indexed `[g][v]`.
    pub tau: Vec<Vec<Vec<Q>>>,
}

impl LocalDataChoices {
    /// First copies everywhere and zero functions.
    pub fn canonical(sheets: &Sheets) -> Self {
        let m = &sheets.model;
        let nv = m.sets.len();
        Self {
            psi0: vec![0; nv],
            psi1: vec![vec![0; nv]; m.order()],
            sigma: (0..m.nerve.count(1)).map(|e| vec![Q::zero(); m.domain(1, e).count(0)]).collect(),
            tau: vec![(0..nv).map(|v| vec![Q::zero(); m.domain(0, v).count(0)]).collect(); m.order()],
        }
    }

    pub fn random(sheets: &Sheets, rng: &mut impl Rng) -> Self {
        let mut c = Self::canonical(sheets);
        let rq = |rng: &mut _| -> Q { Q::new(Rng::gen_range(rng, 0i64..12).into(), 12.into()) };
        for p in c.psi0.iter_mut().chain(c.psi1.iter_mut().flatten()) {
            *p = rng.gen_range(0..sheets.copies);
        }
        for x in c.sigma.iter_mut().flatten().chain(c.tau.iter_mut().flatten().flatten()) {
            *x = rq(rng);
        }
        c
    }
}

/// Pseudo 𝕋-bundle data `(R_α, v_α, η_α)`, `w_αβ` and `r_α`, stored per sheet.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub choices: LocalDataChoices,
    /// `(α, b₁, b₂) ↦ v_α` on `U_{α b₁ b₂}`.
    pub v: BTreeMap<(usize, usize, usize), Vec<Q>>,
    /// `(α, b) ↦ η_α` on `U_{α b}`.
    pub eta: BTreeMap<(usize, usize), Vec<Q>>,
    /// `(edge, b) ↦ w_αβ` on `U_{αβ b}`, for `α < β`.
    pub w: BTreeMap<(usize, usize), Vec<Q>>,
    /// `(g, v, b) ↦ r_(g,v)` on `U_{v b}`.
    pub r: BTreeMap<(usize, usize, usize), Vec<Q>>,
}

/// Residuals of the defining identities of local data.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDataCheck {
    pub v_section: f64,
    pub eta_connection: f64,
    pub w_transition: f64,
    pub r_transition: f64,
}

impl LocalDataCheck {
    pub fn ok(&self) -> bool {
        self.v_section == 0.0 && self.eta_connection == 0.0 && self.w_transition == 0.0 && self.r_transition == 0.0
    }
}

/// Helper binding the gerbe data for evaluation on cover intersections.
struct Eval<'a> {
    eg: &'a StrongEquivariantGerbe,
    y: &'a Sheets,
}

impl<'a> Eval<'a> {
    fn new(eg: &'a StrongEquivariantGerbe) -> Self {
        Self { eg, y: &eg.gerbe.sheets }
    }

    fn gerbe(&self) -> &SheetGerbe {
        &self.eg.gerbe
    }

    fn dom(&self, indices: &[usize]) -> Option<&'a Domain> {
        let (j, t) = self.y.model.domain_of(indices)?;
        Some(self.y.model.domain(j, t))
    }

    /// Component `t` of a form restricted to `target`.
    fn at(&self, f: &super::YForm, t: &[usize], target: &Domain) -> Vec<Q> {
        let src = self.y.domain(t).expect("tuple over a nerve simplex");
        self.y.model.restrict(f.k, src, target, &self.y.get(f, t))
    }

    /// `g*` of component `t` (a tuple over `g·target`), landing on `target`.
    fn pulled(&self, g: usize, f: &super::YForm, t: &[usize], target: &Domain) -> Vec<Q> {
        let src = self.y.domain(t).expect("tuple over a nerve simplex");
        self.y.model.pullback(g, f.k, src, target, &self.y.get(f, t))
    }

    fn restrict(&self, k: usize, from: &[usize], to: &Domain, c: &[Q]) -> Vec<Q> {
        self.y.model.restrict(k, self.dom(from).unwrap(), to, c)
    }
}

fn lin(terms: &[(i64, &[Q])]) -> Vec<Q> {
    let n = terms.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut out = vec![Q::zero(); n];
    for (s, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if *s > 0 {
                *o += x;
            } else {
                *o -= x;
            }
        }
    }
    out
}

impl LocalData {
    pub fn build(eg: &StrongEquivariantGerbe, choices: LocalDataChoices) -> Result<Self> {
        let ev = Eval::new(eg);
        let y = ev.y;
        let m = &y.model;
        let nv = m.sets.len();
        if choices.psi0.len() != nv || choices.psi1.len() != m.order() || choices.psi1.iter().any(|p| p.len() != nv) {
            return Err(Error::NoSection("a section is missing for some cover index".into()));
        }
        if choices.psi0.iter().chain(choices.psi1.iter().flatten()).any(|&c| c >= y.copies) {
            return Err(Error::NoSection("section copy index out of range".into()));
        }
        let psi = |a: usize| y.sheet(a, choices.psi0[a]);
        let g = ev.gerbe();
        let mut ld = Self { choices: choices.clone(), v: BTreeMap::new(), eta: BTreeMap::new(), w: BTreeMap::new(), r: BTreeMap::new() };
        for a in 0..nv {
            for b in 0..y.count() {
                let Some(d) = ev.dom(&[a, y.base(b)]) else { continue };
                ld.eta.insert((a, b), lin(&[(-1, &ev.at(&g.a, &[b, psi(a)], d))]));
                for b2 in 0..y.count() {
                    if let Some(d2) = ev.dom(&[a, y.base(b), y.base(b2)]) {
                        ld.v.insert((a, b, b2), ev.at(&g.s, &[b, b2, psi(a)], d2));
                    }
                }
            }
        }
        for (e, edge) in m.nerve.simplices(1).iter().enumerate() {
            let (a, c) = (edge[0], edge[1]);
            for b in 0..y.count() {
                let Some(d) = ev.dom(&[a, c, y.base(b)]) else { continue };
                let sigma = ev.restrict(0, &[a, c], d, &choices.sigma[e]);
                let s = ev.at(&g.s, &[b, psi(a), psi(c)], d);
                ld.w.insert((e, b), lin(&[(1, &sigma), (-1, &s)]));
            }
        }
        for gg in 0..m.order() {
            for v in 0..nv {
                let p1 = y.sheet(v, choices.psi1[gg][v]);
                let gv = m.index_perm[gg][v];
                for b in 0..y.count() {
                    let Some(d) = ev.dom(&[v, y.base(b)]) else { continue };
                    let gb = y.act(gg, b);
                    let chi = ev.at(&eg.chi[gg], &[b, p1], d);
                    let s1 = ev.at(&g.s, &[b, psi(v), p1], d);
                    let s2 = ev.pulled(gg, &g.s, &[gb, psi(gv), y.act(gg, p1)], d);
                    let tau = ev.restrict(0, &[v], d, &choices.tau[gg][v]);
                    ld.r.insert((gg, v, b), lin(&[(1, &chi), (-1, &s1), (1, &s2), (1, &tau)]));
                }
            }
        }
        Ok(ld)
    }

    /// `w_αβ` on sheet `b` for any ordered pair, alternating.
    fn w_of(&self, y: &Sheets, a: usize, c: usize, b: usize) -> Vec<Q> {
        let (lo, hi) = (a.min(c), a.max(c));
        let e = y.model.nerve.index_of(&[lo, hi]).expect("nerve edge");
        let w = &self.w[&(e, b)];
        if a < c { w.clone() } else { w.iter().map(|x| -x).collect() }
    }

    /// Exact residuals of `δv_α = s`, `δη_α = A + dv_α`, `δw_αβ = v_β − v_α` and
    /// `δr_(g,v) = g*v_{gv} − v_v − χ_g`.
    pub fn check(&self, eg: &StrongEquivariantGerbe) -> LocalDataCheck {
        let ev = Eval::new(eg);
        let y = ev.y;
        let m = &y.model;
        let g = ev.gerbe();
        let mut out = LocalDataCheck { v_section: 0.0, eta_connection: 0.0, w_transition: 0.0, r_transition: 0.0 };
        let circle_res = |dom: &Domain, v: Vec<Q>| -> f64 {
            let mut v = v;
            m.canonical_circle(dom, &mut v);
            if m.is_zero_circle(dom, &v) {
                0.0
            } else {
                v.iter().map(|q| crate::rational::to_f64(&crate::rational::centered_frac(q)).abs()).fold(0.0, f64::max)
            }
        };
        let real_res = |v: Vec<Q>| v.iter().map(|q| crate::rational::to_f64(q).abs()).fold(0.0, f64::max);
        for t in y.tuples(2) {
            let (b1, b2) = (t[0], t[1]);
            for a in 0..m.sets.len() {
                let Some(d) = ev.dom(&[a, y.base(b1), y.base(b2)]) else { continue };
                let e1 = ev.restrict(1, &[a, y.base(b1)], d, &self.eta[&(a, b1)]);
                let e2 = ev.restrict(1, &[a, y.base(b2)], d, &self.eta[&(a, b2)]);
                let av = ev.at(&g.a, &[b1, b2], d);
                let dv = m.d(0, d, &self.v[&(a, b1, b2)]);
                out.eta_connection = out.eta_connection.max(real_res(lin(&[(1, &e2), (-1, &e1), (-1, &av), (-1, &dv)])));
                for c in m.nerve.simplices(1).iter().filter(|e| e[0] == a).map(|e| e[1]) {
                    let Some(d3) = ev.dom(&[a, c, y.base(b1), y.base(b2)]) else { continue };
                    let w1 = ev.restrict(0, &[a, c, y.base(b1)], d3, &self.w_of(y, a, c, b1));
                    let w2 = ev.restrict(0, &[a, c, y.base(b2)], d3, &self.w_of(y, a, c, b2));
                    let va = ev.restrict(0, &[a, y.base(b1), y.base(b2)], d3, &self.v[&(a, b1, b2)]);
                    let vc = ev.restrict(0, &[c, y.base(b1), y.base(b2)], d3, &self.v[&(c, b1, b2)]);
                    out.w_transition = out.w_transition.max(circle_res(d3, lin(&[(1, &w2), (-1, &w1), (1, &va), (-1, &vc)])));
                }
            }
            for gg in 0..m.order() {
                let gb1 = y.act(gg, b1);
                let gb2 = y.act(gg, b2);
                for v in 0..m.sets.len() {
                    let Some(d) = ev.dom(&[v, y.base(b1), y.base(b2)]) else { continue };
                    let gv = m.index_perm[gg][v];
                    let r1 = ev.restrict(0, &[v, y.base(b1)], d, &self.r[&(gg, v, b1)]);
                    let r2 = ev.restrict(0, &[v, y.base(b2)], d, &self.r[&(gg, v, b2)]);
                    let vv = ev.restrict(0, &[v, y.base(b1), y.base(b2)], d, &self.v[&(v, b1, b2)]);
                    let gdom = ev.dom(&[gv, y.base(gb1), y.base(gb2)]).unwrap();
                    let vg = m.pullback(gg, 0, gdom, d, &self.v[&(gv, gb1, gb2)]);
                    let chi = ev.at(&eg.chi[gg], &[b1, b2], d);
                    out.r_transition =
                        out.r_transition.max(circle_res(d, lin(&[(1, &r2), (-1, &r1), (-1, &vg), (1, &vv), (1, &chi)])));
                }
            }
        }
        for t in y.tuples(3) {
            for a in 0..m.sets.len() {
                let bases: Vec<usize> = std::iter::once(a).chain(y.bases(&t)).collect();
                let Some(d) = ev.dom(&bases) else { continue };
                let mut terms = Vec::new();
                for i in 0..3 {
                    let mut u = t.clone();
                    u.remove(i);
                    let key = [a, y.base(u[0]), y.base(u[1])];
                    terms.push((if i % 2 == 0 { 1 } else { -1 }, ev.restrict(0, &key, d, &self.v[&(a, u[0], u[1])])));
                }
                let s = ev.at(&g.s, &t, d);
                terms.push((-1, s));
                let refs: Vec<(i64, &[Q])> = terms.iter().map(|(s, v)| (*s, v.as_slice())).collect();
                out.v_section = out.v_section.max(circle_res(d, lin(&refs)));
            }
        }
        out
    }

    /// The equivariant degree-2 cocycle at level 2.
    pub fn class_cocycle(&self, eg: &StrongEquivariantGerbe) -> Result<TriGradedCochain> {
        self.assemble(eg, true)
    }

    fn assemble(&self, eg: &StrongEquivariantGerbe, equivariant: bool) -> Result<TriGradedCochain> {
        let ev = Eval::new(eg);
        let y = ev.y;
        let m = &y.model;
        let order = m.order();
        let cx = DeligneComplex::new(m, 2);
        let mut c = cx.zero(2);
        let f = &eg.gerbe.f;
        let dr = |gg: usize, v: usize, b: usize, d: &Domain| ev.restrict(0, &[v, y.base(b)], d, &self.r[&(gg, v, b)]);
        let mut fill = |key: (usize, usize, usize),
                        gv: &[usize],
                        tau_idx: usize,
                        value: &dyn Fn(usize, &Domain) -> Vec<Q>|
         -> Result<()> {
            let (_, j, k) = key;
            let tau = m.nerve.simplices(j)[tau_idx].clone();
            let val = descend(y, &tau, k, k == 0, value, key)?;
            if let Some(cells) = c.blocks.get_mut(&key) {
                cells[code_of(order, gv) * m.nerve.count(j) + tau_idx] = val;
            }
            Ok(())
        };
        for (t, tau) in m.nerve.simplices(2).iter().enumerate() {
            let (a, b_, cc) = (tau[0], tau[1], tau[2]);
            fill((0, 2, 0), &[], t, &|b, d| {
                let w = |p: usize, q: usize| ev.restrict(0, &[p, q, y.base(b)], d, &self.w_of(y, p, q, b));
                lin(&[(1, &w(b_, cc)), (-1, &w(a, cc)), (1, &w(a, b_))])
            })?;
        }
        for (t, e) in m.nerve.simplices(1).iter().enumerate() {
            let (a, c2) = (e[0], e[1]);
            fill((0, 1, 1), &[], t, &|b, d| {
                let ea = ev.restrict(1, &[a, y.base(b)], d, &self.eta[&(a, b)]);
                let ec = ev.restrict(1, &[c2, y.base(b)], d, &self.eta[&(c2, b)]);
                let wd = m.d(0, d, &ev.restrict(0, &[a, c2, y.base(b)], d, &self.w_of(y, a, c2, b)));
                lin(&[(1, &ec), (-1, &ea), (-1, &wd)])
            })?;
        }
        for a in 0..m.sets.len() {
            fill((0, 0, 2), &[], a, &|b, d| {
                let de = m.d(1, d, &ev.restrict(1, &[a, y.base(b)], d, &self.eta[&(a, b)]));
                lin(&[(1, &de), (-1, &ev.at(f, &[b], d))])
            })?;
        }
        for gg in (0..order).filter(|_| equivariant) {
            for (t, e) in m.nerve.simplices(1).iter().enumerate() {
                let (a, c2) = (e[0], e[1]);
                let (ga, gc) = (m.index_perm[gg][a], m.index_perm[gg][c2]);
                fill((1, 1, 0), &[gg], t, &|b, d| {
                    let gb = y.act(gg, b);
                    let w = ev.restrict(0, &[a, c2, y.base(b)], d, &self.w_of(y, a, c2, b));
                    let gdom = ev.dom(&[ga, gc, y.base(gb)]).unwrap();
                    let gw = m.pullback(gg, 0, gdom, d, &self.w_of(y, ga, gc, gb));
                    lin(&[(1, &w), (-1, &gw), (-1, &dr(gg, a, b, d)), (1, &dr(gg, c2, b, d))])
                })?;
            }
            for v in 0..m.sets.len() {
                let gv = m.index_perm[gg][v];
                fill((1, 0, 1), &[gg], v, &|b, d| {
                    let gb = y.act(gg, b);
                    let e = ev.restrict(1, &[v, y.base(b)], d, &self.eta[&(v, b)]);
                    let gdom = ev.dom(&[gv, y.base(gb)]).unwrap();
                    let ge = m.pullback(gg, 1, gdom, d, &self.eta[&(gv, gb)]);
                    let drr = m.d(0, d, &dr(gg, v, b, d));
                    lin(&[(1, &e), (-1, &ge), (1, &drr)])
                })?;
            }
        }
        for g1 in (0..order).filter(|_| equivariant) {
            for g2 in 0..order {
                let g12 = m.group.mul(g1, g2);
                for v in 0..m.sets.len() {
                    let g2v = m.index_perm[g2][v];
                    fill((2, 0, 0), &[g1, g2], v, &|b, d| {
                        let g2b = y.act(g2, b);
                        let gdom = ev.dom(&[g2v, y.base(g2b)]).unwrap();
                        let pulled = m.pullback(g2, 0, gdom, d, &self.r[&(g1, g2v, g2b)]);
                        lin(&[(-1, &dr(g2, v, b, d)), (1, &dr(g12, v, b, d)), (-1, &pulled)])
                    })?;
                }
            }
        }
        cx.normalize(&mut c);
        Ok(c)
    }

    /// The Dixmier–Douady cocycle: the integer Čech 3-cocycle `δ̌f̃` of the lifted
    /// level-0 component `f`, on the nerve.
    pub fn dd_cocycle(&self, eg: &StrongEquivariantGerbe) -> Result<Vec<BigInt>> {
        dd_from_cocycle(&eg.gerbe.sheets, &self.assemble(eg, false)?)
    }
}

/// The Deligne class cocycle `(f, θ¹, θ²)` of a gerbe without group data; only the
/// blocks over `G^0` are populated.
pub fn deligne_class_cocycle(g: &SheetGerbe, choices: LocalDataChoices) -> Result<TriGradedCochain> {
    let eg = StrongEquivariantGerbe { gerbe: g.clone(), chi: vec![super::YForm::zero(2, 0, true); g.sheets.model.order()] };
    LocalData::build(&eg, choices)?.assemble(&eg, false)
}

/// The integer Čech 3-cocycle representing the Dixmier–Douady class.
pub fn dd_cocycle(g: &SheetGerbe, choices: LocalDataChoices) -> Result<Vec<BigInt>> {
    dd_from_cocycle(&g.sheets, &deligne_class_cocycle(g, choices)?)
}

/// Computes a sheet-wise value on every sheet over `τ`, checks it is basic, and returns it
/// on `U_τ`.
fn descend(
    y: &Sheets,
    tau: &[usize],
    k: usize,
    circle: bool,
    value: &dyn Fn(usize, &Domain) -> Vec<Q>,
    key: (usize, usize, usize),
) -> Result<Vec<Q>> {
    let m = &y.model;
    let (j, t) = m.domain_of(tau).unwrap();
    let home = m.domain(j, t);
    let base = value(y.sheet(tau[0], 0), home);
    for b in 0..y.count() {
        let mut idx = tau.to_vec();
        idx.push(y.base(b));
        let Some((j2, t2)) = m.domain_of(&idx) else { continue };
        let d = m.domain(j2, t2);
        let mut diff = lin(&[(1, &value(b, d)), (-1, &m.restrict(k, home, d, &base))]);
        let ok = if circle {
            m.canonical_circle(d, &mut diff);
            m.is_zero_circle(d, &diff)
        } else {
            diff.iter().all(Zero::is_zero)
        };
        if !ok {
            return Err(Error::NotBasic(format!("component {key:?} over {tau:?} depends on the sheet")));
        }
    }
    Ok(base)
}

/// `δ̌` of the lifted `(0,2,0)` component of a degree-2 cocycle; the values are integers.
pub fn dd_from_cocycle(y: &Sheets, c: &TriGradedCochain) -> Result<Vec<BigInt>> {
    let m = &y.model;
    let f = &c.blocks[&(0, 2, 0)];
    let mut out = Vec::with_capacity(m.nerve.count(3));
    for (t, tau) in m.nerve.simplices(3).iter().enumerate() {
        let dom = m.domain(3, t);
        let mut acc = vec![Q::zero(); dom.count(0)];
        for (sign, face) in faces_with_sign(tau) {
            let i = m.nerve.index_of(&face).unwrap();
            let cell = &f[i];
            if cell.is_empty() {
                continue;
            }
            let r = m.restrict(0, m.domain(2, i), dom, cell);
            acc = lin(&[(1, &acc), (sign, &r)]);
        }
        let first = acc.first().cloned().unwrap_or_else(Q::zero);
        if !acc.iter().all(|x| x.is_integer() && *x == first) {
            return Err(Error::NotCocycle { residual: 1.0 });
        }
        out.push(first.to_integer());
    }
    Ok(out)
}

/// The coboundary witness `(k, ε, ℓ)` relating the cocycles of two local-data choices:
/// with `ρ_α(b) = ϱ_α + s(b, ψ_α, ψ_α) − s(b, ψ_α, ψ'_α)`,
/// `k = Δw − δ̌ρ`, `ε = Δη − dρ` and `ℓ = −Δr − ∂ρ`, where `Δ` is primed minus unprimed.
/// Then `c' = c + D(k, ε, ℓ)`.
pub fn change_of_choices_witness(
    eg: &StrongEquivariantGerbe,
    ld: &LocalData,
    ld2: &LocalData,
    varrho: &[Vec<Q>],
) -> Result<TriGradedCochain> {
    let ev = Eval::new(eg);
    let y = ev.y;
    let m = &y.model;
    let order = m.order();
    let s = &eg.gerbe.s;
    let psi = |a: usize| y.sheet(a, ld.choices.psi0[a]);
    let psi2 = |a: usize| y.sheet(a, ld2.choices.psi0[a]);
    let rho = |a: usize, b: usize, d: &Domain| -> Vec<Q> {
        let base = ev.restrict(0, &[a], d, &varrho[a]);
        lin(&[(1, &base), (1, &ev.at(s, &[b, psi(a), psi(a)], d)), (-1, &ev.at(s, &[b, psi(a), psi2(a)], d))])
    };
    let cx = DeligneComplex::new(m, 2);
    let mut c = cx.zero(1);
    let mut put = |key: (usize, usize, usize), gv: &[usize], tau_idx: usize, value: &dyn Fn(usize, &Domain) -> Vec<Q>| -> Result<()> {
        let (_, j, k) = key;
        let tau = m.nerve.simplices(j)[tau_idx].clone();
        let val = descend(y, &tau, k, k == 0, value, key)?;
        c.blocks.get_mut(&key).unwrap()[code_of(order, gv) * m.nerve.count(j) + tau_idx] = val;
        Ok(())
    };
    for (t, e) in m.nerve.simplices(1).iter().enumerate() {
        let (a, c2) = (e[0], e[1]);
        put((0, 1, 0), &[], t, &|b, d| {
            let w = |l: &LocalData| ev.restrict(0, &[a, c2, y.base(b)], d, &l.w_of(y, a, c2, b));
            lin(&[(1, &w(ld2)), (-1, &w(ld)), (-1, &rho(c2, b, d)), (1, &rho(a, b, d))])
        })?;
    }
    for a in 0..m.sets.len() {
        put((0, 0, 1), &[], a, &|b, d| {
            let e = |l: &LocalData| ev.restrict(1, &[a, y.base(b)], d, &l.eta[&(a, b)]);
            lin(&[(1, &e(ld2)), (-1, &e(ld)), (-1, &m.d(0, d, &rho(a, b, d)))])
        })?;
    }
    for gg in 0..order {
        for v in 0..m.sets.len() {
            let gv = m.index_perm[gg][v];
            put((1, 0, 0), &[gg], v, &|b, d| {
                let gb = y.act(gg, b);
                let r = |l: &LocalData| ev.restrict(0, &[v, y.base(b)], d, &l.r[&(gg, v, b)]);
                let gdom = ev.dom(&[gv, y.base(gb)]).unwrap();
                let grho = m.pullback(gg, 0, gdom, d, &rho(gv, gb, gdom));
                lin(&[(-1, &r(ld2)), (1, &r(ld)), (-1, &rho(v, b, d)), (1, &grho)])
            })?;
        }
    }
    cx.normalize(&mut c);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CoverModel;
    use crate::gerbe::fundamental_cycle;
    use crate::simplicial::{lens_join, SimplicialGroupAction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn lens_gerbe(copies: usize, gauge_seed: Option<u64>) -> StrongEquivariantGerbe {
        let (k, gen) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[gen], Some(3)).unwrap();
        let y = Sheets::new(Arc::new(CoverModel::star_cover(&k, &act).unwrap()), copies);
        let mut e = vec![BigInt::zero(); k.count(3)];
        e[0] = BigInt::from(1);
        let eg = StrongEquivariantGerbe::from_averaged_cocycle(y.clone(), &e).unwrap();
        match gauge_seed {
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                eg.gauge(&y.to_circle(&y.random(2, 0, false, &mut rng)))
            }
            None => eg,
        }
    }

    #[test]
    fn trivial_gerbe_canonical_choices_give_zero() {
        let (k, gen) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[gen], Some(3)).unwrap();
        let y = Sheets::new(Arc::new(CoverModel::star_cover(&k, &act).unwrap()), 1);
        let eg = StrongEquivariantGerbe::trivial(y.clone());
        let ld = LocalData::build(&eg, LocalDataChoices::canonical(&y)).unwrap();
        assert!(ld.check(&eg).ok());
        let c = ld.class_cocycle(&eg).unwrap();
        assert!(crate::deligne::max_abs(&c).is_zero());
    }

    #[test]
    fn lens_local_data_is_exact_and_closed() {
        let eg = lens_gerbe(2, Some(5));
        let y = eg.gerbe.sheets.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ld = LocalData::build(&eg, LocalDataChoices::random(&y, &mut rng)).unwrap();
        assert!(ld.check(&eg).ok(), "{:?}", ld.check(&eg));
        let c = ld.class_cocycle(&eg).unwrap();
        let cx = DeligneComplex::new(&y.model, 2);
        let (closed, res) = cx.is_cocycle(&c).unwrap();
        assert!(closed, "{:?}", &res[..res.len().min(3)]);
        let n = dd_from_cocycle(&y, &c).unwrap();
        let z = fundamental_cycle(&y.model.nerve).unwrap();
        let total: BigInt = z.iter().zip(&n).map(|(a, b)| BigInt::from(*a) * b).sum();
        assert_eq!(total.magnitude(), &BigInt::from(3).magnitude().clone());
    }

    #[test]
    fn change_of_choices_is_an_explicit_coboundary() {
        let eg = lens_gerbe(2, Some(8));
        let y = eg.gerbe.sheets.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ld = LocalData::build(&eg, LocalDataChoices::random(&y, &mut rng)).unwrap();
        let ld2 = LocalData::build(&eg, LocalDataChoices::random(&y, &mut rng)).unwrap();
        assert_ne!(ld.choices, ld2.choices);
        let c = ld.class_cocycle(&eg).unwrap();
        let c2 = ld2.class_cocycle(&eg).unwrap();
        let varrho: Vec<Vec<Q>> = (0..y.model.sets.len())
            .map(|a| (0..y.model.domain(0, a).count(0)).map(|i| Q::new((i as i64 % 5).into(), 7.into())).collect())
            .collect();
        let wit = change_of_choices_witness(&eg, &ld, &ld2, &varrho).unwrap();
        let cx = DeligneComplex::new(&y.model, 2);
        assert!(cx.equal(&c2, &cx.add(&c, &cx.d(&wit).unwrap())));
    }

    fn s3_sheets() -> (crate::simplicial::SimplicialComplex, Sheets) {
        let k = crate::simplicial::sphere_boundary_of_simplex(4);
        let m = CoverModel::star_cover(&k, &SimplicialGroupAction::trivial(&k)).unwrap();
        (k, Sheets::new(Arc::new(m), 2))
    }

    #[test]
    fn dd_cocycle_round_trips_and_is_additive() {
        use crate::gerbe::integer_cohomologous;
        let (k, y) = s3_sheets();
        let mut n = vec![BigInt::zero(); k.count(3)];
        n[2] = BigInt::from(1);
        let mut n2 = vec![BigInt::zero(); k.count(3)];
        n2[4] = BigInt::from(-2);
        let g = SheetGerbe::from_integer_cocycle(y.clone(), &n).unwrap();
        let g2 = SheetGerbe::from_integer_cocycle(y.clone(), &n2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let dd = dd_cocycle(&g, LocalDataChoices::random(&y, &mut rng)).unwrap();
        assert!(integer_cohomologous(&k, 3, &dd, &n));
        assert!(!integer_cohomologous(&k, 3, &dd, &vec![BigInt::zero(); k.count(3)]));
        let dd_prod = dd_cocycle(&g.tensor(&g2), LocalDataChoices::random(&y, &mut rng)).unwrap();
        let sum: Vec<BigInt> = n.iter().zip(&n2).map(|(a, b)| a + b).collect();
        assert!(integer_cohomologous(&k, 3, &dd_prod, &sum));
        let dd_inv = dd_cocycle(&g.inverse(), LocalDataChoices::canonical(&y)).unwrap();
        let neg: Vec<BigInt> = n.iter().map(|a| -a).collect();
        assert!(integer_cohomologous(&k, 3, &dd_inv, &neg));
    }

    #[test]
    fn trivial_gerbe_has_zero_deligne_cocycle_and_trivial_dd() {
        let (k, y) = s3_sheets();
        let g = SheetGerbe::trivial(y.clone());
        let c = deligne_class_cocycle(&g, LocalDataChoices::canonical(&y)).unwrap();
        assert!(crate::deligne::max_abs(&c).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dd = dd_cocycle(&g, LocalDataChoices::random(&y, &mut rng)).unwrap();
        assert!(crate::gerbe::integer_cohomologous(&k, 3, &dd, &vec![BigInt::zero(); k.count(3)]));
    }

    #[test]
    fn equivariant_cocycle_is_additive() {
        let eg = lens_gerbe(1, Some(3));
        let eg2 = lens_gerbe(1, Some(4));
        let y = eg.gerbe.sheets.clone();
        let ch = LocalDataChoices::canonical(&y);
        let cx = DeligneComplex::new(&y.model, 2);
        let c = |e: &StrongEquivariantGerbe| LocalData::build(e, ch.clone()).unwrap().class_cocycle(e).unwrap();
        let prod = eg.tensor(&eg2);
        assert!(cx.equal(&c(&prod), &cx.add(&c(&eg), &c(&eg2))));
        assert!(cx.equal(&c(&eg.inverse()), &cx.neg(&c(&eg))));
    }

    #[test]
    fn missing_section_is_reported() {
        let eg = lens_gerbe(1, None);
        let mut ch = LocalDataChoices::canonical(&eg.gerbe.sheets);
        ch.psi0.pop();
        assert!(matches!(LocalData::build(&eg, ch), Err(Error::NoSection(_))));
    }
}
