//! Strongly equivariant gerbes under a Lie group: moments, the λ-solver, the pair `(E, ζ)`
//! and the obstruction class.
//!
//! The analytic gerbes here have `Y = M × {0, …, s−1}` (each sheet a global section) and
//! `P` trivial on every component of `Y^[2]`, with `G` acting diagonally on `Y` and
//! trivially on the circle factor. The connection on the component `(i, j)` is `d + A_ij`
//! and the curving on sheet `i` is `f_i`; all are stored by imaginary part.
//!
//! Elements of `g† = Hom(g, iℝ)` are stored by the real coefficients of `λ(X_a)/i` on the
//! basis of `g`, so `g†` and `g*` share coordinates and the identification
//! `z ↦ −z/2πi` is multiplication by `1/2π`.

use crate::deligne::analytic::{
    d_mu, fit_b, zb_normalize, EZPair, FunctionBasis, MuFn, Samples, ZBRep, B_TOL, DIFF_TOL, Z_TOL,
};
use crate::error::{Error, Result};
use crate::equivariant::StrongEquivariantGerbe;
use crate::forms::{d1, d2, Form1, Form2};
use crate::gerbe::{Sheets, YForm};
use crate::group::{unit, Action};
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// The obstruction threshold: a `ℬ`-fit residual above this certifies nonvanishing.
pub const NONVANISHING_TOL: f64 = 1e-4;

#[derive(Clone)]
pub struct AnalyticGerbe {
    pub action: Arc<dyn Action>,
    /// `connection[i][j]` is `Im A_ij`; `A_ii = 0` and `A_ji = −A_ij`.
    pub connection: Vec<Vec<Form1>>,
    /// `Im f_i`.
    pub curving: Vec<Form2>,
}

/// Residuals of the gerbe and invariance conditions on a sample grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticCheck {
    /// `A_ij − A_ik + A_jk` (the section `s = 1` is parallel).
    pub section: f64,
    /// `f_j − f_i − dA_ij`.
    pub curving: f64,
    /// `g*A − A` and `g*f − f`.
    pub invariance: f64,
}

impl AnalyticCheck {
    pub fn ok(&self) -> bool {
        self.section < Z_TOL && self.curving < DIFF_TOL && self.invariance < Z_TOL
    }
}

impl AnalyticGerbe {
    /// One sheet, `∇ = d`, curving `f`.
    pub fn single_sheet(action: Arc<dyn Action>, curving: Form2) -> Self {
        Self { action, connection: vec![vec![crate::forms::zero1()]], curving: vec![curving] }
    }

    pub fn trivial(action: Arc<dyn Action>) -> Self {
        Self::single_sheet(action, crate::forms::zero2())
    }

    /// `s` sheets with `A_ij = κ_j − κ_i` and `f_i = f + dκ_i`.
    pub fn from_potentials(action: Arc<dyn Action>, kappa: Vec<Form1>, f: Form2) -> Self {
        let s = kappa.len();
        let connection = (0..s)
            .map(|i| (0..s).map(|j| crate::forms::add1(&kappa[j], &kappa[i], -1.0)).collect())
            .collect();
        let curving = kappa.iter().map(|k| crate::forms::add2(&f, &d1(k), 1.0)).collect();
        Self { action, connection, curving }
    }

    pub fn sheets(&self) -> usize {
        self.curving.len()
    }

    pub fn check(&self, samples: &Samples) -> AnalyticCheck {
        let act = self.action.as_ref();
        let s = self.sheets();
        let mut out = AnalyticCheck { section: 0.0, curving: 0.0, invariance: 0.0 };
        for (n, x) in samples.points.iter().enumerate() {
            let basis = act.tangent_basis(x);
            let g = &samples.groups[n % samples.groups.len()];
            let gx = act.act(g, x);
            for u in &basis {
                let gu = act.push(g, x, u);
                for i in 0..s {
                    for j in 0..s {
                        let a = &self.connection[i][j];
                        out.invariance = out.invariance.max((a(&gx, &gu) - a(x, u)).abs());
                        for k in 0..s {
                            let r = a(x, u) - self.connection[i][k](x, u) + self.connection[j][k](x, u);
                            out.section = out.section.max(r.abs());
                        }
                    }
                }
                for v in &basis {
                    let gv = act.push(g, x, v);
                    for i in 0..s {
                        let f = &self.curving[i];
                        out.invariance = out.invariance.max((f(&gx, &gu, &gv) - f(x, u, v)).abs());
                        for j in 0..s {
                            let da = d1(&self.connection[i][j]);
                            let r = self.curving[j](x, u, v) - f(x, u, v) - da(x, u, v);
                            out.curving = out.curving.max(r.abs());
                        }
                    }
                }
            }
        }
        out
    }

    /// `Im Ω` on `M`, from `df` on sheet 0.
    pub fn three_curvature(&self) -> crate::forms::Form3 {
        d2(&self.curving[0])
    }

    /// The connection form `Im(A_ij + du/u)` on the component `(i, j)` of `P`, evaluated at the
    /// fibre coordinate `u` on the tangent vector `(v, w)` with `w` the angular velocity.
    pub fn total_connection(&self, i: usize, j: usize, x: &[f64], _u: f64, v: &[f64], w: f64) -> f64 {
        self.connection[i][j](x, v) + w
    }
}

/// `λ̃` on each component of `Y^[2]`, and optionally `λ` on each sheet.
#[derive(Clone)]
pub struct MomentField {
    pub lambda_tilde: Vec<Vec<MuFn>>,
    pub lambda: Option<Vec<MuFn>>,
}

/// `⟨X|λ̃(y_i, y_j)⟩ = ∇(p; X*)`, computed at two fibre points `p` over each sample.
pub fn moment(eg: &AnalyticGerbe, samples: &Samples) -> Result<MomentField> {
    let s = eg.sheets();
    let n = eg.action.group().dim();
    for x in &samples.points {
        for i in 0..s {
            for j in 0..s {
                for a in 0..n {
                    let gen = eg.action.generator(&unit(n, a), x);
                    // The lifted generator has no fibre component since `G` acts trivially on 𝕋.
                    let (p0, p1) = (eg.total_connection(i, j, x, 0.0, &gen, 0.0), eg.total_connection(i, j, x, 2.1, &gen, 0.0));
                    if (p0 - p1).abs() > Z_TOL {
                        return Err(Error::NotEquivariant(format!("moment depends on the fibre point by {:e}", (p0 - p1).abs())));
                    }
                }
            }
        }
    }
    let lambda_tilde = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let (a, act) = (eg.connection[i][j].clone(), eg.action.clone());
                    Arc::new(move |x: &[f64]| (0..n).map(|k| a(x, &act.generator(&unit(n, k), x))).collect::<Vec<f64>>()) as MuFn
                })
                .collect()
        })
        .collect();
    Ok(MomentField { lambda_tilde, lambda: None })
}

/// Largest `|δλ̃|` on `Y^[3]` over the samples.
pub fn moment_delta_residual(mf: &MomentField, samples: &Samples) -> f64 {
    let s = mf.lambda_tilde.len();
    let mut worst: f64 = 0.0;
    for x in &samples.points {
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let (a, b, c) = ((mf.lambda_tilde[j][k])(x), (mf.lambda_tilde[i][k])(x), (mf.lambda_tilde[i][j])(x));
                    for m in 0..a.len() {
                        worst = worst.max((a[m] - b[m] + c[m]).abs());
                    }
                }
            }
        }
    }
    worst
}

/// A solution of `δλ = λ̃`, `λ(y_i) = base + λ̃(y_0, y_i)`. Other solutions differ by
/// `A⁰(M, g†)`, which `base` parametrizes.
pub fn solve_lambda(mf: &MomentField, base: MuFn, samples: &Samples) -> Result<MomentField> {
    let r = moment_delta_residual(mf, samples);
    if r > Z_TOL {
        return Err(Error::NotClosed(format!("δλ̃ = {r:e} on Y^[3]")));
    }
    let lambda = mf.lambda_tilde[0]
        .iter()
        .map(|l| {
            let (l, b) = (l.clone(), base.clone());
            Arc::new(move |x: &[f64]| b(x).iter().zip(l(x)).map(|(p, q)| p + q).collect::<Vec<f64>>()) as MuFn
        })
        .collect();
    Ok(MomentField { lambda_tilde: mf.lambda_tilde.clone(), lambda: Some(lambda) })
}

/// The constant map `λ ≡ c` on every sheet.
pub fn constant_lambda(sheets: usize, c: Vec<f64>) -> Vec<MuFn> {
    (0..sheets)
        .map(|_| {
            let c = c.clone();
            Arc::new(move |_: &[f64]| c.clone()) as MuFn
        })
        .collect()
}

/// Finite groups: `λ̃ = δλ₀` on the exact backend; returns some `λ` with `δλ = λ̃`.
pub fn solve_lambda_discrete(sheets: &Sheets, lambda_tilde: &YForm) -> Result<YForm> {
    sheets.solve_delta(lambda_tilde)
}

/// `⟨X|E⟩ = (⟨X|dλ⟩ + ι_{X*}f)/2πi` and `⟨X|ζ(g)⟩ = ⟨X|g*λ − Ad_g λ⟩/2πi`, read off on
/// `sheet`.
pub fn ez_pair_on_sheet(eg: &AnalyticGerbe, lambda: &[MuFn], sheet: usize) -> EZPair {
    let (l1, l2, f, a1, a2) = (
        lambda[sheet].clone(),
        lambda[sheet].clone(),
        eg.curving[sheet].clone(),
        eg.action.clone(),
        eg.action.clone(),
    );
    EZPair::new(
        move |x, v| {
            let n = a1.group().dim();
            let dl = d_mu(&l1, x, v);
            (0..n).map(|a| (dl[a] + f(x, &a1.generator(&unit(n, a), x), v)) / (2.0 * PI)).collect()
        },
        move |g, x| {
            let (p, q) = (l2(&a2.act(g, x)), a2.group().coadjoint(g, &l2(x)));
            p.iter().zip(&q).map(|(p, q)| (p - q) / (2.0 * PI)).collect()
        },
    )
}

/// Diagnostics of [`ez_pair`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EZDiagnostics {
    pub delta_lambda: f64,
    pub sheet_dependence: f64,
    pub z_membership: f64,
    pub de_relation: f64,
}

pub fn ez_pair(eg: &AnalyticGerbe, lambda: &[MuFn], samples: &Samples) -> Result<(EZPair, EZDiagnostics)> {
    let act = eg.action.as_ref();
    let s = eg.sheets();
    let mf = moment(eg, samples)?;
    let mut delta_lambda: f64 = 0.0;
    for x in &samples.points {
        for i in 0..s {
            for j in 0..s {
                let (li, lj, lt) = (lambda[i](x), lambda[j](x), (mf.lambda_tilde[i][j])(x));
                for m in 0..li.len() {
                    delta_lambda = delta_lambda.max((lj[m] - li[m] - lt[m]).abs());
                }
            }
        }
    }
    if delta_lambda > Z_TOL {
        return Err(Error::NotClosed(format!("δλ − λ̃ = {delta_lambda:e}")));
    }
    let ez = ez_pair_on_sheet(eg, lambda, 0);
    let mut sheet_dependence: f64 = 0.0;
    for i in 1..s {
        let other = ez_pair_on_sheet(eg, lambda, i);
        for x in &samples.points {
            for v in act.tangent_basis(x) {
                let (p, q) = ((ez.e)(x, &v), (other.e)(x, &v));
                sheet_dependence = sheet_dependence.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            }
        }
    }
    let z = crate::deligne::analytic::z_residual(act, &ez, samples).max();
    let diag = EZDiagnostics { delta_lambda, sheet_dependence, z_membership: z, de_relation: de_relation_residual(eg, &ez, samples) };
    if z > DIFF_TOL || sheet_dependence > DIFF_TOL {
        return Err(Error::NotInZ { residual: z.max(sheet_dependence) });
    }
    Ok((ez, diag))
}

/// Largest `|−(1/2π) ι_{X*}Ω − ⟨X|dE⟩|` over basis `X` and tangent pairs at the samples.
pub fn de_relation_residual(eg: &AnalyticGerbe, ez: &EZPair, samples: &Samples) -> f64 {
    let act = eg.action.as_ref();
    let n = act.group().dim();
    let omega = eg.three_curvature();
    let mut worst: f64 = 0.0;
    for x in &samples.points {
        let basis = act.tangent_basis(x);
        for a in 0..n {
            let gen = act.generator(&unit(n, a), x);
            let e = ez.e.clone();
            let ea: Form1 = Arc::new(move |y, v| e(y, v)[a]);
            let de = d1(&ea);
            for (p, u) in basis.iter().enumerate() {
                for v in &basis[p + 1..] {
                    let lhs = -omega(x, &gen, u, v) / (2.0 * PI);
                    worst = worst.max((lhs - de(x, u, v)).abs());
                }
            }
        }
    }
    worst
}

/// Verdict of the obstruction computation.
#[derive(Clone)]
pub enum Verdict {
    /// `β_G = 0`, witnessed by `λ` with `(E, ζ) = 0` to tolerance.
    Vanishing { witness: Vec<MuFn>, residual: f64 },
    /// No `μ` on the search basis solves the `ℬ` equations; `residual` is the best fit.
    Nonvanishing { residual: f64 },
    Indeterminate { residual: f64 },
}

impl std::fmt::Debug for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Vanishing { residual, .. } => write!(f, "Vanishing {{ residual: {residual:e} }}"),
            Verdict::Nonvanishing { residual } => write!(f, "Nonvanishing {{ residual: {residual:e} }}"),
            Verdict::Indeterminate { residual } => write!(f, "Indeterminate {{ residual: {residual:e} }}"),
        }
    }
}

#[derive(Clone)]
pub struct ObstructionClass {
    pub ez: EZPair,
    pub zb: ZBRep,
    pub verdict: Verdict,
    /// `dim {μ ∈ g† : Ad_g μ = μ}`, the dimension of the space of witnesses on connected `M`.
    pub gauge_dimension: usize,
}

/// Serializable summary for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionSummary {
    pub verdict: String,
    pub fit_residual: f64,
    pub witness_at_sample: Option<Vec<f64>>,
    pub gauge_dimension: usize,
    pub unique_witness: bool,
}

impl ObstructionClass {
    pub fn vanishes(&self) -> bool {
        matches!(self.verdict, Verdict::Vanishing { .. })
    }

    pub fn summary(&self, x: &[f64]) -> ObstructionSummary {
        let (verdict, fit_residual, witness) = match &self.verdict {
            Verdict::Vanishing { witness, residual } => ("vanishing", *residual, Some(witness[0](x))),
            Verdict::Nonvanishing { residual } => ("nonvanishing", *residual, None),
            Verdict::Indeterminate { residual } => ("indeterminate", *residual, None),
        };
        ObstructionSummary {
            verdict: verdict.into(),
            fit_residual,
            witness_at_sample: witness,
            gauge_dimension: self.gauge_dimension,
            unique_witness: self.gauge_dimension == 0,
        }
    }
}

/// Dimension of the `Ad`-fixed subspace of `g*`, from the null space of the stacked
/// `coAd_g − 1` over the sample group elements.
pub fn gauge_dimension(action: &dyn Action, samples: &Samples) -> usize {
    let g = action.group();
    let n = g.dim();
    if n == 0 {
        return 0;
    }
    let rows = samples.groups.len() * n;
    let mut m = DMatrix::<f64>::zeros(rows.max(n), n);
    for (k, gg) in samples.groups.iter().enumerate() {
        let c = g.coadjoint_matrix(gg);
        for a in 0..n {
            for b in 0..n {
                m[(k * n + a, b)] = c[a][b] - if a == b { 1.0 } else { 0.0 };
            }
        }
    }
    let sv = m.singular_values();
    n - sv.iter().filter(|&&s| s > 1e-9).count()
}

/// `β_G(𝒢, ∇, f)` with a vanishing witness or a nonvanishing certificate.
pub fn obstruction(eg: &AnalyticGerbe, basis: &FunctionBasis, samples: &Samples, compact: bool) -> Result<ObstructionClass> {
    let act = eg.action.as_ref();
    let n = act.group().dim();
    let mf = moment(eg, samples)?;
    let base: MuFn = Arc::new(move |_| vec![0.0; n]);
    let lambda0 = solve_lambda(&mf, base, samples)?.lambda.unwrap();
    let (ez, _) = ez_pair(eg, &lambda0, samples)?;
    let zb = zb_normalize(&eg.action, &ez, compact && act.group().haar().is_some())?;
    let fit = fit_b(act, &ez, basis, samples);
    let verdict = if fit.residual < B_TOL {
        // ez(λ₀ + ν) = ez(λ₀) + ℬ(ν/2π), so ν = −2πμ.
        let witness: Vec<MuFn> = lambda0
            .iter()
            .map(|l| {
                let (l, m) = (l.clone(), fit.mu.clone());
                Arc::new(move |x: &[f64]| l(x).iter().zip(m(x)).map(|(a, b)| a - 2.0 * PI * b).collect::<Vec<f64>>()) as MuFn
            })
            .collect();
        let (w, _) = ez_pair(eg, &witness, samples)?;
        let residual = pair_size(act, &w, samples);
        if residual > DIFF_TOL {
            Verdict::Indeterminate { residual }
        } else {
            Verdict::Vanishing { witness, residual }
        }
    } else if fit.residual > NONVANISHING_TOL {
        Verdict::Nonvanishing { residual: fit.residual }
    } else {
        Verdict::Indeterminate { residual: fit.residual }
    };
    Ok(ObstructionClass { ez, zb, verdict, gauge_dimension: gauge_dimension(act, samples) })
}

/// `max |E|, |ζ|` on the samples.
pub fn pair_size(action: &dyn Action, ez: &EZPair, samples: &Samples) -> f64 {
    let mut worst: f64 = 0.0;
    for x in &samples.points {
        for v in action.tangent_basis(x) {
            worst = (ez.e)(x, &v).iter().fold(worst, |m, a| m.max(a.abs()));
        }
        for g in &samples.groups {
            worst = (ez.zeta)(g, x).iter().fold(worst, |m, a| m.max(a.abs()));
        }
    }
    worst
}

/// Finite groups have `g = 0`: the moment, `(E, ζ)` and the obstruction all vanish, and the
/// witness `λ = 0` is unique. Returns an error only if the input is not equivariant.
pub fn obstruction_finite(eg: &StrongEquivariantGerbe) -> Result<ObstructionSummary> {
    let c = eg.check();
    if !c.ok() {
        return Err(Error::NotEquivariant(format!("{c:?}")));
    }
    Ok(ObstructionSummary {
        verdict: "vanishing".into(),
        fit_residual: 0.0,
        witness_at_sample: Some(vec![]),
        gauge_dimension: 0,
        unique_witness: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::analytic::{same_class, z_residual};
    use crate::group::{cross, dot, CircleOnTorus, HopfAction, Su2Adjoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn su2() -> Arc<dyn Action> {
        Arc::new(Su2Adjoint::default())
    }

    /// An invariant gerbe on `su(2) ≅ ℝ³`: two sheets with `κ₀ = 0`, `κ₁ = |x|² x·dx`
    /// (invariant), and `f = (1 + |x|²) x·(u × v)`.
    fn su2_gerbe() -> AnalyticGerbe {
        let k0: Form1 = Arc::new(|_, _| 0.0);
        let k1: Form1 = Arc::new(|x, v| dot(x, x) * dot(x, v));
        let f: Form2 = Arc::new(|x, u, v| (1.0 + dot(x, x)) * dot(x, &cross(u, v)));
        AnalyticGerbe::from_potentials(su2(), vec![k0, k1], f)
    }

    /// Two sheets over `S³ ⊂ ℝ⁴` with `κ₁ = (1 + |z₁|²)Ξ`, `f = 0`; the moment is
    /// `λ̃₀₁ = (1 + |z₁|²)|z|²`.
    fn hopf_two_sheets() -> AnalyticGerbe {
        let k1: Form1 = Arc::new(|x, v| (1.0 + x[0] * x[0] + x[1] * x[1]) * (x[0] * v[1] - x[1] * v[0] + x[2] * v[3] - x[3] * v[2]));
        AnalyticGerbe::from_potentials(Arc::new(HopfAction::default()), vec![crate::forms::zero1(), k1], crate::forms::zero2())
    }

    fn samples(act: &dyn Action, seed: u64) -> Samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Samples::random(act, 10, 4, &mut rng)
    }

    #[test]
    fn hopf_trivial_gerbe_has_zero_moment_and_any_lambda_r_is_a_witness() {
        let eg = AnalyticGerbe::trivial(Arc::new(HopfAction::default()));
        let s = samples(eg.action.as_ref(), 1);
        assert!(eg.check(&s).ok());
        let mf = moment(&eg, &s).unwrap();
        assert_eq!((mf.lambda_tilde[0][0])(&s.points[0]), vec![0.0]);
        for r in [0.0, 1.0, -2.5] {
            let (ez, d) = ez_pair(&eg, &constant_lambda(1, vec![r]), &s).unwrap();
            assert_eq!(pair_size(eg.action.as_ref(), &ez, &s), 0.0);
            assert!(d.de_relation < DIFF_TOL);
        }
        let ob = obstruction(&eg, &FunctionBasis::polynomial(4, 1), &s, true).unwrap();
        assert!(ob.vanishes());
        assert_eq!(ob.gauge_dimension, 1);
        assert_eq!(ob.summary(&s.points[0]).witness_at_sample, Some(vec![0.0]));
    }

    #[test]
    fn moment_is_closed_and_shifts_with_the_connection() {
        let eg = hopf_two_sheets();
        let s = samples(eg.action.as_ref(), 2);
        assert!(eg.check(&s).ok(), "{:?}", eg.check(&s));
        let mf = moment(&eg, &s).unwrap();
        assert!(moment_delta_residual(&mf, &s) < 1e-12);
        // λ̃₀₁ = ι_{X*}κ₁ by a difference-quotient oracle on the flow.
        let x = &s.points[0];
        let l = (mf.lambda_tilde[0][1])(x);
        assert!((l[0] - (1.0 + x[0] * x[0] + x[1] * x[1]) * dot(x, x)).abs() < 1e-12);
        for a in 0..1 {
            let xa = unit(1, a);
            let h = 1e-6;
            let g = eg.action.group();
            let flow = |t: f64| eg.action.act(&g.exp(&xa.iter().map(|c| c * t).collect::<Vec<_>>()), x);
            let gen: Vec<f64> = flow(h).iter().zip(flow(-h)).map(|(p, q)| (p - q) / (2.0 * h)).collect();
            let k1 = (1.0 + x[0] * x[0] + x[1] * x[1]) * (x[0] * gen[1] - x[1] * gen[0] + x[2] * gen[3] - x[3] * gen[2]);
            assert!((l[a] - k1).abs() < 1e-7);
        }
    }

    #[test]
    fn solve_lambda_and_the_pair_satisfy_z_and_the_de_relation() {
        let eg = su2_gerbe();
        let s = samples(eg.action.as_ref(), 3);
        let mf = moment(&eg, &s).unwrap();
        let base: MuFn = Arc::new(|x| vec![x[0] * x[1], x[2], 1.0]);
        let lam = solve_lambda(&mf, base, &s).unwrap().lambda.unwrap();
        let (ez, d) = ez_pair(&eg, &lam, &s).unwrap();
        assert!(d.z_membership < Z_TOL && d.delta_lambda < 1e-12 && d.sheet_dependence < DIFF_TOL);
        assert!(d.de_relation < DIFF_TOL, "{d:?}");
        assert!(z_residual(eg.action.as_ref(), &ez, &s).max() < Z_TOL);
    }

    #[test]
    fn changing_lambda_by_a_base_function_keeps_the_class() {
        let eg = su2_gerbe();
        let s = samples(eg.action.as_ref(), 4);
        let mf = moment(&eg, &s).unwrap();
        let lam0 = solve_lambda(&mf, Arc::new(|x| x.to_vec()), &s).unwrap().lambda.unwrap();
        let mu: MuFn = Arc::new(|x| vec![x[1] * x[1], x[0] - x[2], 0.5]);
        let m2 = mu.clone();
        let lam1 = solve_lambda(&mf, Arc::new(move |x| x.iter().zip(m2(x)).map(|(a, b)| a + b).collect()), &s)
            .unwrap()
            .lambda
            .unwrap();
        let (e0, _) = ez_pair(&eg, &lam0, &s).unwrap();
        let (e1, _) = ez_pair(&eg, &lam1, &s).unwrap();
        // E shifts by dμ/2π and ζ by (g*μ − Ad_g μ)/2π.
        let scaled: MuFn = Arc::new(move |x| mu(x).iter().map(|v| v / (2.0 * PI)).collect());
        let shift = EZPair::coboundary_of(&eg.action, scaled);
        let diff = e1.sub(&e0).sub(&shift);
        assert!(pair_size(eg.action.as_ref(), &diff, &s) < DIFF_TOL);
        let (same, _) = same_class(eg.action.as_ref(), &e0, &e1, &FunctionBasis::polynomial(3, 2), &s);
        assert!(same);
        let n0 = zb_normalize(&eg.action, &e0, true).unwrap().representative;
        let n1 = zb_normalize(&eg.action, &e1, true).unwrap().representative;
        let (same, r) = same_class(eg.action.as_ref(), &n0, &n1, &FunctionBasis::polynomial(3, 2), &s);
        assert!(same, "{r}");
    }

    #[test]
    fn adding_an_invariant_two_form_shifts_e_by_its_contraction() {
        let eg = su2_gerbe();
        let s = samples(eg.action.as_ref(), 5);
        let ups: Form2 = Arc::new(|x, u, v| dot(x, x) * dot(x, &cross(u, v)));
        let mut eg2 = eg.clone();
        eg2.curving = eg.curving.iter().map(|f| crate::forms::add2(f, &ups, 1.0)).collect();
        let mf = moment(&eg, &s).unwrap();
        let lam = solve_lambda(&mf, Arc::new(|_| vec![0.0; 3]), &s).unwrap().lambda.unwrap();
        let (e1, _) = ez_pair(&eg, &lam, &s).unwrap();
        let (e2, _) = ez_pair(&eg2, &lam, &s).unwrap();
        for x in &s.points {
            for v in eg.action.tangent_basis(x) {
                let (p, q) = ((e1.e)(x, &v), (e2.e)(x, &v));
                for a in 0..3 {
                    let contraction = ups(x, &eg.action.generator(&unit(3, a), x), &v) / (2.0 * PI);
                    assert!((q[a] - p[a] - contraction).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn su2_obstruction_vanishes_with_a_unique_witness_when_flat() {
        let eg = AnalyticGerbe::from_potentials(su2(), vec![crate::forms::zero1(), Arc::new(|x, v| dot(x, x) * dot(x, v))], crate::forms::zero2());
        let s = samples(eg.action.as_ref(), 6);
        let ob = obstruction(&eg, &FunctionBasis::polynomial(3, 3), &s, true).unwrap();
        assert_eq!(ob.gauge_dimension, 0);
        match &ob.verdict {
            Verdict::Vanishing { residual, .. } => assert!(*residual < DIFF_TOL),
            _ => panic!("expected a witness"),
        }
        assert!(ob.summary(&s.points[0]).unique_witness);
    }

    #[test]
    fn su2_obstruction_with_nonzero_three_curvature_does_not_vanish() {
        // ⟨X|dE⟩ = −ι_{X*}Ω/2π ≠ 0, so E is not dμ.
        let eg = su2_gerbe();
        let s = samples(eg.action.as_ref(), 6);
        let ob = obstruction(&eg, &FunctionBasis::polynomial(3, 3), &s, true).unwrap();
        assert!(matches!(ob.verdict, Verdict::Nonvanishing { .. }));
    }

    #[test]
    fn hopf_two_sheet_obstruction_vanishes_with_lambda_from_the_moment() {
        let eg = hopf_two_sheets();
        let s = samples(eg.action.as_ref(), 10);
        assert!(eg.check(&s).ok());
        let ob = obstruction(&eg, &FunctionBasis::polynomial(4, 1), &s, true).unwrap();
        let Verdict::Vanishing { witness, .. } = &ob.verdict else { panic!("expected a witness") };
        let x = &s.points[0];
        assert!((witness[1](x)[0] - witness[0](x)[0] - (1.0 + x[0] * x[0] + x[1] * x[1])).abs() < 1e-9);
    }

    #[test]
    fn closed_non_exact_form_along_orbits_gives_a_nonvanishing_certificate() {
        // S¹ ↷ T², f = dx₁ ∧ dx₂: E = ι_{∂₁/2π} f/2π is constant; no periodic μ has dμ = E.
        let act: Arc<dyn Action> = Arc::new(CircleOnTorus::default());
        let f: Form2 = Arc::new(|_, u, v| u[0] * v[1] - u[1] * v[0]);
        let eg = AnalyticGerbe::single_sheet(act, f);
        let s = samples(eg.action.as_ref(), 7);
        let ob = obstruction(&eg, &FunctionBasis::trigonometric(2), &s, true).unwrap();
        assert!(matches!(ob.verdict, Verdict::Nonvanishing { residual } if residual > NONVANISHING_TOL));
    }

    #[test]
    fn inconsistent_moment_is_rejected() {
        let eg = hopf_two_sheets();
        let s = samples(eg.action.as_ref(), 8);
        let mut mf = moment(&eg, &s).unwrap();
        mf.lambda_tilde[0][1] = Arc::new(|_| vec![1.0]);
        assert!(matches!(solve_lambda(&mf, Arc::new(|_| vec![0.0]), &s), Err(Error::NotClosed(_))));
        let bad = constant_lambda(2, vec![0.0]);
        assert!(matches!(ez_pair(&eg, &bad, &s), Err(Error::NotClosed(_))));
    }

    #[test]
    fn discrete_lambda_differs_from_the_preimage_by_a_base_function() {
        use crate::cover::CoverModel;
        use crate::simplicial::{sphere_boundary_of_simplex, SimplicialGroupAction};
        let k = sphere_boundary_of_simplex(3);
        let m = CoverModel::star_cover(&k, &SimplicialGroupAction::trivial(&k)).unwrap();
        let y = Sheets::new(Arc::new(m), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l0 = y.random(1, 0, false, &mut rng);
        let lt = y.delta(&l0);
        let l = solve_lambda_discrete(&y, &lt).unwrap();
        assert!(y.descend(&y.sub(&l, &l0)).is_ok());
        let eg = StrongEquivariantGerbe::trivial(y);
        assert_eq!(obstruction_finite(&eg).unwrap().verdict, "vanishing");
    }
}
