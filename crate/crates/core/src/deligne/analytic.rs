//! The analytic side of degree 3 with coefficients in `F¹F(2)`: forms on `G^i × M` in
//! left-trivialized frames, the pair `(E, ζ)` and the maps Φ, Ψ between cocycles
//! `(α, β)` of the double complex `F¹A^j(G^i × M)` and `𝒵`.
//!
//! The total differential on the double complex is `∂ + (−1)^i d`, so `(α, β)` with
//! `α ∈ F¹A²(G × M)` and `β ∈ F¹A¹(G² × M)` is a cocycle when `∂α + dβ = 0` and `∂β = 0`,
//! and `γ ∈ F¹A¹(G × M)` has coboundary `(−dγ, ∂γ)`.
//!
//! Forms are evaluators. Exterior derivatives use a fourth-order central difference along
//! left-invariant fields on the group factors and constant fields on `M`.

use crate::error::{Error, Result};
use crate::group::{dot, unit, Action};
use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use std::sync::Arc;

pub const FD_STEP: f64 = 1e-4;
/// Tolerance for identities that involve one numerical derivative.
pub const DIFF_TOL: f64 = 1e-6;
/// Tolerance for `𝒵` membership.
pub const Z_TOL: f64 = 1e-9;
/// Acceptance threshold for the `ℬ` least-squares fit.
pub const B_TOL: f64 = 1e-8;

/// `f′(0)` by the five-point stencil.
pub fn derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// A point `(g₁, …, g_i, x)` of `G^i × M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub g: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

/// A tangent vector `g₁X₁ ⊕ … ⊕ g_iX_i ⊕ V`, stored as `(X₁, …, X_i, V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    pub xs: Vec<Vec<f64>>,
    pub v: Vec<f64>,
}

impl Tangent {
    pub fn zero(level: usize, dim_g: usize, dim_m: usize) -> Self {
        Self { xs: vec![vec![0.0; dim_g]; level], v: vec![0.0; dim_m] }
    }
}

pub type FormFn = Arc<dyn Fn(&Point, &[Tangent]) -> f64 + Send + Sync>;

/// A real differential form of the given degree on `G^level × M`.
#[derive(Clone)]
pub struct GForm {
    pub level: usize,
    pub degree: usize,
    pub eval: FormFn,
}

impl std::fmt::Debug for GForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GForm(level {}, degree {})", self.level, self.degree)
    }
}

impl GForm {
    pub fn new(level: usize, degree: usize, eval: impl Fn(&Point, &[Tangent]) -> f64 + Send + Sync + 'static) -> Self {
        Self { level, degree, eval: Arc::new(eval) }
    }

    pub fn zero(level: usize, degree: usize) -> Self {
        Self::new(level, degree, |_, _| 0.0)
    }

    pub fn at(&self, p: &Point, us: &[Tangent]) -> f64 {
        (self.eval)(p, us)
    }

    pub fn add(&self, other: &GForm) -> GForm {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        GForm::new(self.level, self.degree, move |p, us| a(p, us) + b(p, us))
    }

    pub fn scale(&self, c: f64) -> GForm {
        let a = self.eval.clone();
        GForm::new(self.level, self.degree, move |p, us| c * a(p, us))
    }

    pub fn neg(&self) -> GForm {
        self.scale(-1.0)
    }
}

/// Moves `p` along the left-invariant / constant field `u` for time `t`.
pub fn flow(action: &dyn Action, p: &Point, u: &Tangent, t: f64) -> Point {
    let g = action.group();
    Point {
        g: p.g.iter().zip(&u.xs).map(|(gk, xk)| g.mul(gk, &g.exp(&scaled(xk, t)))).collect(),
        x: p.x.iter().zip(&u.v).map(|(a, b)| a + t * b).collect(),
    }
}

fn scaled(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|a| a * t).collect()
}

fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// Exterior derivative. For left-invariant fields `[X̃, Ỹ] = [X, Y]~` and the constant
/// fields on `M` commute with everything.
pub fn exterior_d(action: &Arc<dyn Action>, w: &GForm) -> GForm {
    let act = action.clone();
    let inner = w.eval.clone();
    GForm::new(w.level, w.degree + 1, move |p, us| {
        let k = us.len();
        let mut total = 0.0;
        for i in 0..k {
            let rest: Vec<Tangent> = (0..k).filter(|&j| j != i).map(|j| us[j].clone()).collect();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * derivative(|t| inner(&flow(act.as_ref(), p, &us[i], t), &rest), FD_STEP);
        }
        let g = act.group();
        for i in 0..k {
            for j in i + 1..k {
                let br = Tangent {
                    xs: us[i].xs.iter().zip(&us[j].xs).map(|(a, b)| g.bracket(a, b)).collect(),
                    v: vec![0.0; us[i].v.len()],
                };
                let mut args = vec![br];
                args.extend((0..k).filter(|&l| l != i && l != j).map(|l| us[l].clone()));
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * inner(p, &args);
            }
        }
        total
    })
}

/// The face map `∂_l : G^{i+1} × M → G^i × M`.
pub fn face_point(action: &dyn Action, l: usize, p: &Point) -> Point {
    let n = p.g.len();
    let g = action.group();
    if l == 0 {
        Point { g: p.g[1..].to_vec(), x: p.x.clone() }
    } else if l < n {
        let mut gs = p.g[..l - 1].to_vec();
        gs.push(g.mul(&p.g[l - 1], &p.g[l]));
        gs.extend_from_slice(&p.g[l + 1..]);
        Point { g: gs, x: p.x.clone() }
    } else {
        Point { g: p.g[..n - 1].to_vec(), x: action.act(&p.g[n - 1], &p.x) }
    }
}

/// The differential of `∂_l` at `p` in left-trivialized frames.
pub fn face_tangent(action: &dyn Action, l: usize, p: &Point, u: &Tangent) -> Tangent {
    let n = p.g.len();
    let g = action.group();
    if l == 0 {
        Tangent { xs: u.xs[1..].to_vec(), v: u.v.clone() }
    } else if l < n {
        let mut xs = u.xs[..l - 1].to_vec();
        let moved = g.adjoint(&g.inv(&p.g[l]), &u.xs[l - 1]);
        xs.push(moved.iter().zip(&u.xs[l]).map(|(a, b)| a + b).collect());
        xs.extend_from_slice(&u.xs[l + 1..]);
        Tangent { xs, v: u.v.clone() }
    } else {
        let last = &p.g[n - 1];
        let gen = action.generator(&u.xs[n - 1], &p.x);
        let v: Vec<f64> = gen.iter().zip(&u.v).map(|(a, b)| a + b).collect();
        Tangent { xs: u.xs[..n - 1].to_vec(), v: action.push(last, &p.x, &v) }
    }
}

/// `∂ = Σ_l (−1)^l ∂_l*`, raising the level by one.
pub fn coboundary(action: &Arc<dyn Action>, w: &GForm) -> GForm {
    let act = action.clone();
    let inner = w.eval.clone();
    let level = w.level + 1;
    GForm::new(level, w.degree, move |p, us| {
        let mut total = 0.0;
        for l in 0..=level {
            let q = face_point(act.as_ref(), l, p);
            let vs: Vec<Tangent> = us.iter().map(|u| face_tangent(act.as_ref(), l, p, u)).collect();
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * inner(&q, &vs);
        }
        total
    })
}

/// Evaluation grids: base points, group elements and a seed for tangent vectors.
#[derive(Clone, Debug)]
pub struct Samples {
    pub points: Vec<Vec<f64>>,
    pub groups: Vec<Vec<f64>>,
}

impl Samples {
    pub fn random(action: &dyn Action, points: usize, groups: usize, rng: &mut dyn RngCore) -> Self {
        Self {
            points: (0..points).map(|_| action.random_point(rng)).collect(),
            groups: (0..groups).map(|_| action.group().random(rng)).collect(),
        }
    }

    /// Points of `G^level × M` built cyclically from the grids.
    pub fn level_points(&self, level: usize) -> Vec<Point> {
        let ng = self.groups.len().max(1);
        self.points
            .iter()
            .enumerate()
            .map(|(i, x)| Point { g: (0..level).map(|k| self.groups[(i + 3 * k + 1) % ng].clone()).collect(), x: x.clone() })
            .collect()
    }
}

fn random_tangent(action: &dyn Action, p: &Point, rng: &mut dyn RngCore) -> Tangent {
    Tangent {
        xs: p.g.iter().map(|_| crate::group::gaussian(action.group().dim(), rng)).collect(),
        v: action.random_tangent(&p.x, rng),
    }
}

pub type EFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type ZetaFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type MuFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// An element of `𝒞 = A¹(M, g*) ⊕ C^∞(G, A⁰(M, g*))`: `e(x, V) = E(x; V)` and
/// `zeta(g, x) = ζ(g)(x)`, both in dual-basis coordinates.
#[derive(Clone)]
pub struct EZPair {
    pub e: EFn,
    pub zeta: ZetaFn,
}

impl std::fmt::Debug for EZPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EZPair")
    }
}

/// `dμ(x; V)` by the five-point stencil.
pub fn d_mu(mu: &MuFn, x: &[f64], v: &[f64]) -> Vec<f64> {
    let (p2, p1, m1, m2) = (
        mu(&axpy(x, 2.0 * FD_STEP, v)),
        mu(&axpy(x, FD_STEP, v)),
        mu(&axpy(x, -FD_STEP, v)),
        mu(&axpy(x, -2.0 * FD_STEP, v)),
    );
    (0..p1.len()).map(|a| (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]) / (12.0 * FD_STEP)).collect()
}

impl EZPair {
    pub fn new(
        e: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        zeta: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { e: Arc::new(e), zeta: Arc::new(zeta) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(move |_, _| vec![0.0; dim], move |_, _| vec![0.0; dim])
    }

    /// The `ℬ` element `(dμ, g*μ − Ad_g μ)`.
    pub fn coboundary_of(action: &Arc<dyn Action>, mu: MuFn) -> Self {
        let (m1, m2, act) = (mu.clone(), mu, action.clone());
        Self::new(
            move |x, v| d_mu(&m1, x, v),
            move |g, x| {
                let (a, b) = (m2(&act.act(g, x)), act.group().coadjoint(g, &m2(x)));
                a.iter().zip(&b).map(|(p, q)| p - q).collect()
            },
        )
    }

    pub fn add(&self, other: &EZPair) -> EZPair {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &EZPair) -> EZPair {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &EZPair, c: f64) -> EZPair {
        let (e1, e2, z1, z2) = (self.e.clone(), other.e.clone(), self.zeta.clone(), other.zeta.clone());
        EZPair::new(
            move |x, v| e1(x, v).iter().zip(e2(x, v)).map(|(a, b)| a + c * b).collect(),
            move |g, x| z1(g, x).iter().zip(z2(g, x)).map(|(a, b)| a + c * b).collect(),
        )
    }

    /// `dζ(g)(x; V)` along `M`.
    pub fn d_zeta(&self, g: &[f64], x: &[f64], v: &[f64]) -> Vec<f64> {
        let z = self.zeta.clone();
        let g = g.to_vec();
        let f: MuFn = Arc::new(move |y| z(&g, y));
        d_mu(&f, x, v)
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Residuals of the `𝒵` conditions on the sample grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZResidual {
    /// `g*E − Ad_g E − dζ(g)`.
    pub equivariance: f64,
    /// `Ad_g ζ(h) − ζ(gh) + h*ζ(g)`.
    pub cocycle: f64,
    /// Symmetric part of [`vertical_term`]; it must vanish for `Ψ(E, ζ)` to be a cocycle.
    pub infinitesimal: f64,
}

impl ZResidual {
    pub fn max(&self) -> f64 {
        self.equivariance.max(self.cocycle).max(self.infinitesimal)
    }
}

/// `T(X, X′) = ⟨X|E(x; X′*)⟩ − ⟨X|dζ((e, x); X′ ⊕ 0)⟩`, as a matrix over the basis of `g`.
pub fn vertical_term(action: &dyn Action, ez: &EZPair, x: &[f64]) -> Vec<Vec<f64>> {
    let g = action.group();
    let n = g.dim();
    let mut t = vec![vec![0.0; n]; n];
    for b in 0..n {
        let xb = unit(n, b);
        let ex = (ez.e)(x, &action.generator(&xb, x));
        let z = ez.zeta.clone();
        let dz: Vec<f64> = (0..n).map(|a| derivative(|s| z(&g.exp(&scaled(&xb, s)), x)[a], FD_STEP)).collect();
        for a in 0..n {
            t[a][b] = ex[a] - dz[a];
        }
    }
    t
}

pub fn z_residual(action: &dyn Action, ez: &EZPair, samples: &Samples) -> ZResidual {
    let g = action.group();
    let mut out = ZResidual { equivariance: 0.0, cocycle: 0.0, infinitesimal: 0.0 };
    for (i, x) in samples.points.iter().enumerate() {
        let a = &samples.groups[i % samples.groups.len()];
        let b = &samples.groups[(i + 1) % samples.groups.len()];
        for v in action.tangent_basis(x) {
            let lhs = (ez.e)(&action.act(a, x), &action.push(a, x, &v));
            let ad = g.coadjoint(a, &(ez.e)(x, &v));
            let dz = ez.d_zeta(a, x, &v);
            let rhs: Vec<f64> = ad.iter().zip(&dz).map(|(p, q)| p + q).collect();
            out.equivariance = out.equivariance.max(max_diff(&lhs, &rhs));
        }
        let lhs = g.coadjoint(a, &(ez.zeta)(b, x));
        let mid = (ez.zeta)(&g.mul(a, b), x);
        let last = (ez.zeta)(a, &action.act(b, x));
        let r: Vec<f64> = (0..lhs.len()).map(|k| lhs[k] - mid[k] + last[k]).collect();
        out.cocycle = out.cocycle.max(r.iter().fold(0.0, |m, v| m.max(v.abs())));
        let t = vertical_term(action, ez, x);
        for p in 0..t.len() {
            for q in 0..=p {
                out.infinitesimal = out.infinitesimal.max((t[p][q] + t[q][p]).abs());
            }
        }
    }
    out
}

/// Residual of `⟨[X, X′] | ζ(e)⟩ = T(X, X′)` over basis pairs, with `T` from
/// [`vertical_term`]. The cocycle condition forces `ζ(e) = 0`, so this holds exactly when
/// `T` vanishes, which is the case for abelian `G` but not in general.
pub fn derived_identity_residual(action: &dyn Action, ez: &EZPair, samples: &Samples) -> f64 {
    let g = action.group();
    let n = g.dim();
    let mut worst: f64 = 0.0;
    for x in &samples.points {
        let z0 = (ez.zeta)(&g.identity(), x);
        let t = vertical_term(action, ez, x);
        for a in 0..n {
            for b in 0..n {
                let lhs = dot(&g.bracket(&unit(n, a), &unit(n, b)), &z0);
                worst = worst.max((lhs - t[a][b]).abs());
            }
        }
    }
    worst
}

/// Residual of `∂α + dβ = 0`, `∂β = 0`, and of the `F¹` condition, on random tangents at
/// the sample points.
pub fn cocycle_residual(action: &Arc<dyn Action>, alpha: &GForm, beta: &GForm, samples: &Samples, rng: &mut dyn RngCore) -> f64 {
    let act = action.as_ref();
    let lhs = coboundary(action, alpha).add(&exterior_d(action, beta));
    let db = coboundary(action, beta);
    let (dg, dm) = (act.group().dim(), act.dim_m());
    let mut worst: f64 = 0.0;
    for p in samples.level_points(2) {
        let us: Vec<Tangent> = (0..2).map(|_| random_tangent(act, &p, rng)).collect();
        worst = worst.max(lhs.at(&p, &us).abs());
    }
    for p in samples.level_points(3) {
        let u = random_tangent(act, &p, rng);
        worst = worst.max(db.at(&p, &[u]).abs());
    }
    for p in samples.level_points(1) {
        let mut u = Tangent::zero(1, dg, dm);
        let mut w = Tangent::zero(1, dg, dm);
        u.v = act.random_tangent(&p.x, rng);
        w.v = act.random_tangent(&p.x, rng);
        worst = worst.max(alpha.at(&p, &[u, w]).abs());
    }
    for p in samples.level_points(2) {
        let mut u = Tangent::zero(2, dg, dm);
        u.v = act.random_tangent(&p.x, rng);
        worst = worst.max(beta.at(&p, &[u]).abs());
    }
    worst
}

/// Ψ: `α((g,x); gX ⊕ V, gX′ ⊕ V′) = ⟨X|E(x;V′)⟩ − ⟨X′|E(x;V)⟩ + T_x(X, X′)` with `T` from
/// [`vertical_term`], and `β((g₁,g₂,x); g₁X₁ ⊕ g₂X₂ ⊕ V) = ⟨X₁|ζ(g₂)(x)⟩`.
pub fn psi_map(action: &Arc<dyn Action>, ez: &EZPair, samples: &Samples) -> Result<(GForm, GForm)> {
    let r = z_residual(action.as_ref(), ez, samples);
    if r.max() > Z_TOL {
        return Err(Error::NotInZ { residual: r.max() });
    }
    Ok(psi_unchecked(action, ez))
}

pub fn psi_unchecked(action: &Arc<dyn Action>, ez: &EZPair) -> (GForm, GForm) {
    let (e, z2, act, whole) = (ez.e.clone(), ez.zeta.clone(), action.clone(), ez.clone());
    let alpha = GForm::new(1, 2, move |p, us| {
        let (x, x2) = (&us[0].xs[0], &us[1].xs[0]);
        let t = vertical_term(act.as_ref(), &whole, &p.x);
        let tv: f64 = (0..x.len()).map(|a| x[a] * dot(&t[a], x2)).sum();
        dot(x, &e(&p.x, &us[1].v)) - dot(x2, &e(&p.x, &us[0].v)) + tv
    });
    let beta = GForm::new(2, 1, move |p, us| dot(&us[0].xs[0], &z2(&p.g[1], &p.x)));
    (alpha, beta)
}

/// `Hβ((g,x); gX ⊕ V) = β((g,e,x); 0 ⊕ X ⊕ 0)`.
pub fn h_beta(action: &Arc<dyn Action>, beta: &GForm) -> GForm {
    let (b, act) = (beta.eval.clone(), action.clone());
    GForm::new(1, 1, move |p, us| {
        let g = act.group();
        let q = Point { g: vec![p.g[0].clone(), g.identity()], x: p.x.clone() };
        let u = Tangent { xs: vec![vec![0.0; g.dim()], us[0].xs[0].clone()], v: vec![0.0; p.x.len()] };
        b(&q, &[u])
    })
}

/// Φ: `⟨X|E(x;V)⟩ = (α − dHβ)((e,x); X ⊕ 0, 0 ⊕ V)` and
/// `⟨X|ζ(g)(x)⟩ = (β + ∂Hβ)((e,g,x); X ⊕ 0 ⊕ 0)`.
pub fn phi_map(action: &Arc<dyn Action>, alpha: &GForm, beta: &GForm, samples: &Samples, rng: &mut dyn RngCore) -> Result<EZPair> {
    let r = cocycle_residual(action, alpha, beta, samples, rng);
    if r > DIFF_TOL {
        return Err(Error::NotCocycle { residual: r });
    }
    Ok(phi_unchecked(action, alpha, beta))
}

pub fn phi_unchecked(action: &Arc<dyn Action>, alpha: &GForm, beta: &GForm) -> EZPair {
    let h = h_beta(action, beta);
    let e_form = alpha.add(&exterior_d(action, &h).neg());
    let z_form = beta.add(&coboundary(action, &h));
    let (a1, a2) = (action.clone(), action.clone());
    EZPair::new(
        move |x, v| {
            let g = a1.group();
            let p = Point { g: vec![g.identity()], x: x.to_vec() };
            (0..g.dim())
                .map(|a| {
                    let u = Tangent { xs: vec![unit(g.dim(), a)], v: vec![0.0; x.len()] };
                    let w = Tangent { xs: vec![vec![0.0; g.dim()]], v: v.to_vec() };
                    e_form.at(&p, &[u, w])
                })
                .collect()
        },
        move |gg, x| {
            let g = a2.group();
            let p = Point { g: vec![g.identity(), gg.to_vec()], x: x.to_vec() };
            (0..g.dim())
                .map(|a| {
                    let u = Tangent { xs: vec![unit(g.dim(), a), vec![0.0; g.dim()]], v: vec![0.0; x.len()] };
                    z_form.at(&p, &[u])
                })
                .collect()
        },
    )
}

/// `μ` with `⟨X|μ(x)⟩ = γ((e,x); X ⊕ 0)` for `γ ∈ F¹A¹(G × M)`.
pub fn mu_of_gamma(action: &Arc<dyn Action>, gamma: &GForm) -> MuFn {
    let (c, act) = (gamma.eval.clone(), action.clone());
    Arc::new(move |x| {
        let g = act.group();
        let p = Point { g: vec![g.identity()], x: x.to_vec() };
        (0..g.dim())
            .map(|a| c(&p, &[Tangent { xs: vec![unit(g.dim(), a)], v: vec![0.0; x.len()] }]))
            .collect()
    })
}

/// `γ((g,x); gX ⊕ V) = ⟨X|μ(x)⟩`.
pub fn gamma_of_mu(mu: MuFn) -> GForm {
    GForm::new(1, 1, move |p, us| dot(&us[0].xs[0], &mu(&p.x)))
}

/// Real functions on `M` used to search for `μ` in the `ℬ` test.
#[derive(Clone)]
pub struct FunctionBasis {
    pub functions: Vec<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
}

impl FunctionBasis {
    /// Monomials of total degree at most `degree` in `n` variables.
    pub fn polynomial(n: usize, degree: usize) -> Self {
        let mut exps: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n {
            exps = exps
                .into_iter()
                .flat_map(|e| {
                    let used: usize = e.iter().sum();
                    (0..=degree - used).map(move |k| {
                        let mut f = e.clone();
                        f.push(k);
                        f
                    })
                })
                .collect();
        }
        let functions = exps
            .into_iter()
            .map(|e| Arc::new(move |x: &[f64]| e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product()) as _)
            .collect();
        Self { functions }
    }

    /// `cos` and `sin` of `2π(m₁x₁ + m₂x₂)` for `|m_i| ≤ order`, on the torus.
    pub fn trigonometric(order: i64) -> Self {
        let mut functions: Vec<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>> = Vec::new();
        for m1 in -order..=order {
            for m2 in -order..=order {
                if (m1, m2) < (0, 0) {
                    continue;
                }
                let k = [m1 as f64, m2 as f64];
                functions.push(Arc::new(move |x: &[f64]| (2.0 * std::f64::consts::PI * (k[0] * x[0] + k[1] * x[1])).cos()));
                if (m1, m2) != (0, 0) {
                    functions.push(Arc::new(move |x: &[f64]| (2.0 * std::f64::consts::PI * (k[0] * x[0] + k[1] * x[1])).sin()));
                }
            }
        }
        Self { functions }
    }
}

/// Result of the `ℬ` least-squares fit.
#[derive(Clone)]
pub struct BFit {
    /// Largest absolute equation residual.
    pub residual: f64,
    pub mu: MuFn,
}

impl BFit {
    pub fn accepted(&self) -> bool {
        self.residual < B_TOL
    }
}

/// Searches for `μ = Σ_j c_j φ_j` with `E = dμ` and `ζ(g) = g*μ − Ad_g μ` on the samples.
pub fn fit_b(action: &dyn Action, ez: &EZPair, basis: &FunctionBasis, samples: &Samples) -> BFit {
    let g = action.group();
    let (n, nb) = (g.dim(), basis.functions.len());
    let unknowns = n * nb;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for x in &samples.points {
        for v in action.tangent_basis(x) {
            let grads: Vec<f64> = basis
                .functions
                .iter()
                .map(|f| {
                    let f = f.clone();
                    derivative(|t| f(&axpy(x, t, &v)), FD_STEP)
                })
                .collect();
            let e = (ez.e)(x, &v);
            for a in 0..n {
                let mut row = vec![0.0; unknowns];
                for j in 0..nb {
                    row[j * n + a] = grads[j];
                }
                rows.push(row);
                rhs.push(e[a]);
            }
        }
        for gg in &samples.groups {
            let gx = action.act(gg, x);
            let ad = g.coadjoint_matrix(gg);
            let z = (ez.zeta)(gg, x);
            let (fg, fx): (Vec<f64>, Vec<f64>) = basis.functions.iter().map(|f| (f(&gx), f(x))).unzip();
            for a in 0..n {
                let mut row = vec![0.0; unknowns];
                for j in 0..nb {
                    row[j * n + a] += fg[j];
                    for b in 0..n {
                        row[j * n + b] -= ad[a][b] * fx[j];
                    }
                }
                rows.push(row);
                rhs.push(z[a]);
            }
        }
    }
    let coeffs = if unknowns == 0 || rows.is_empty() {
        vec![0.0; unknowns]
    } else {
        let a = DMatrix::from_fn(rows.len(), unknowns, |i, j| rows[i][j]);
        let b = DVector::from_vec(rhs.clone());
        let svd = a.svd(true, true);
        svd.solve(&b, 1e-12).map(|s| s.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; unknowns])
    };
    let residual = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| (dot(r, &coeffs) - b).abs())
        .fold(0.0, f64::max);
    let funcs = basis.functions.clone();
    let mu: MuFn = Arc::new(move |x| {
        let mut out = vec![0.0; n];
        for (j, f) in funcs.iter().enumerate() {
            let fx = f(x);
            for (a, o) in out.iter_mut().enumerate() {
                *o += coeffs[j * n + a] * fx;
            }
        }
        out
    });
    BFit { residual, mu }
}

/// A representative of a class in `𝒵/ℬ` with the `μ` used to normalize it.
#[derive(Clone, Debug)]
pub struct ZBRep {
    pub representative: EZPair,
    pub gauge_mu: Option<GaugeMu>,
    pub gauge_note: String,
}

#[derive(Clone)]
pub struct GaugeMu(pub MuFn);

impl std::fmt::Debug for GaugeMu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GaugeMu")
    }
}

/// For compact `G`, replaces `(E, ζ)` by `(E + dμ, 0)` with `μ = ∫ Ad_{g⁻¹} ζ(g) dg`, which
/// differs from it by the `ℬ` element of `−μ`. Otherwise returns the raw pair.
pub fn zb_normalize(action: &Arc<dyn Action>, ez: &EZPair, compact: bool) -> Result<ZBRep> {
    if !compact {
        return Ok(ZBRep {
            representative: ez.clone(),
            gauge_mu: None,
            gauge_note: "raw pair; no canonical representative for a noncompact group".into(),
        });
    }
    let rule = action.group().haar().ok_or(Error::MissingMeasure)?;
    let (z, act) = (ez.zeta.clone(), action.clone());
    let mu: MuFn = Arc::new(move |x| {
        let g = act.group();
        let mut out = vec![0.0; g.dim()];
        for (gg, w) in &rule {
            let v = g.coadjoint(&g.inv(gg), &z(gg, x));
            for (o, a) in out.iter_mut().zip(&v) {
                *o += w * a;
            }
        }
        out
    });
    let (e, m, n) = (ez.e.clone(), mu.clone(), action.group().dim());
    let representative = EZPair::new(
        move |x, v| e(x, v).iter().zip(d_mu(&m, x, v)).map(|(a, b)| a + b).collect(),
        move |_, _| vec![0.0; n],
    );
    Ok(ZBRep { representative, gauge_mu: Some(GaugeMu(mu)), gauge_note: "averaged over the invariant measure".into() })
}

/// Whether two pairs define the same class: the difference must fit `ℬ`.
pub fn same_class(action: &dyn Action, a: &EZPair, b: &EZPair, basis: &FunctionBasis, samples: &Samples) -> (bool, f64) {
    let fit = fit_b(action, &a.sub(b), basis, samples);
    (fit.accepted(), fit.residual)
}

/// A random element of `𝒵` on `S¹ ↷ T²`: `(dμ + e dx₂, g*μ − μ)` with a trigonometric `μ`.
pub fn random_torus_z(rng: &mut dyn RngCore) -> (EZPair, MuFn) {
    let c = crate::group::gaussian(8, rng);
    let mu: MuFn = Arc::new(move |x| {
        let (a, b) = (2.0 * std::f64::consts::PI * x[0], 2.0 * std::f64::consts::PI * x[1]);
        vec![c[0] * a.cos() + c[1] * a.sin() + c[2] * (a + b).cos() + c[3] * (2.0 * a - b).sin() + c[4] * b.cos()]
    });
    let e0 = crate::group::gaussian(1, rng)[0];
    let act: Arc<dyn Action> = Arc::new(crate::group::CircleOnTorus::default());
    let base = EZPair::coboundary_of(&act, mu.clone());
    let ez = base.add(&EZPair::new(move |_, v| vec![e0 * v[1]], |_, _| vec![0.0]));
    (ez, mu)
}

/// A random element of `𝒵` on `SU(2) ↷ su(2)`: `ℬ` part from a quadratic `μ` plus an
/// equivariant `E₀ = a V + b (x·V) x`.
pub fn random_su2_z(rng: &mut dyn RngCore) -> EZPair {
    let c = crate::group::gaussian(12, rng);
    let k = [c[7], c[8]];
    let mu: MuFn = Arc::new(move |x| {
        let r2 = crate::group::dot(x, x);
        vec![c[0] * x[0] + c[1] * x[1] * x[2] + c[2] * r2, c[3] * x[1] + c[4] * x[0] * x[0], c[5] + c[6] * x[2] * x[0]]
    });
    let act: Arc<dyn Action> = Arc::new(crate::group::Su2Adjoint::default());
    EZPair::coboundary_of(&act, mu).add(&EZPair::new(
        move |x, v| {
            let xv = crate::group::dot(x, v);
            (0..3).map(|i| k[0] * v[i] + k[1] * xv * x[i]).collect()
        },
        |_, _| vec![0.0; 3],
    ))
}

/// `max |Φ(Ψ(E, ζ)) − (E, ζ)|` on the samples, with `Ψ` checked to land in cocycles.
pub fn phi_psi_residual(action: &Arc<dyn Action>, ez: &EZPair, samples: &Samples, rng: &mut dyn RngCore) -> Result<f64> {
    let (alpha, beta) = psi_map(action, ez, samples)?;
    let back = phi_map(action, &alpha, &beta, samples, rng)?;
    let mut worst: f64 = 0.0;
    for x in &samples.points {
        let v = action.random_tangent(x, rng);
        worst = (back.e)(x, &v).iter().zip((ez.e)(x, &v)).fold(worst, |m, (a, b)| m.max((a - b).abs()));
        for g in &samples.groups {
            worst = (back.zeta)(g, x).iter().zip((ez.zeta)(g, x)).fold(worst, |m, (a, b)| m.max((a - b).abs()));
        }
    }
    Ok(worst)
}
