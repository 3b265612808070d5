//! Reduction of analytic strongly equivariant gerbes along a principal bundle `q : M → M/G`
//! with connection `Ξ`: the 1-form `κ = ⟨π*Ξ|λ⟩`, descent of `∇ − δκ` and `f − dκ`,
//! comparison of two witnesses `λ`, independence of `Ξ`, and reduction of pseudo
//! 𝕋-bundles.
//!
//! Descent evaluates a basic form through recorded local sections of `q`; agreement on chart
//! overlaps is checked rather than assumed.

use crate::deligne::analytic::{MuFn, Samples, DIFF_TOL, Z_TOL};
use crate::equivariant::lie::{ez_pair, moment, pair_size, AnalyticGerbe};
use crate::error::{Error, Result};
use crate::forms::{d1, d2, Form1, Form2};
use crate::group::{dot, unit, Action};
use rand::RngCore;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Distance to the nearest integer below which a period counts as integral.
pub const INTEGRAL_TOL: f64 = 1e-3;
/// Distance above which a period counts as non-integral.
pub const NONINTEGRAL_TOL: f64 = 1e-2;

/// Local sections of `q : M → B` and the generating 2-cycles of `B`.
pub trait BaseCharts: Send + Sync {
    fn chart_count(&self) -> usize;
    /// Whether `p` lies in the domain of chart `c` (with some margin).
    fn in_chart(&self, c: usize, p: &[f64]) -> bool;
    fn section(&self, c: usize, p: &[f64]) -> Vec<f64>;
    /// `(σ_c)_* u` at `p`.
    fn section_push(&self, c: usize, p: &[f64], u: &[f64]) -> Vec<f64>;
    fn project(&self, x: &[f64]) -> Vec<f64>;
    fn random_base_point(&self, rng: &mut dyn RngCore) -> Vec<f64>;
    fn base_tangent_basis(&self, p: &[f64]) -> Vec<Vec<f64>>;
    /// Periods of a 2-form over generating 2-cycles of `B`.
    fn periods(&self, omega: &Form2) -> Vec<f64>;

    fn chart_at(&self, p: &[f64]) -> usize {
        (0..self.chart_count()).find(|&c| self.in_chart(c, p)).unwrap_or(0)
    }
}

/// `ω̄(p; u) = ω(σ(p); σ_* u)` for a basic 1-form.
pub fn descend1(charts: &Arc<dyn BaseCharts>, w: &Form1) -> Form1 {
    let (c, w) = (charts.clone(), w.clone());
    Arc::new(move |p, u| {
        let k = c.chart_at(p);
        w(&c.section(k, p), &c.section_push(k, p, u))
    })
}

/// `ω̄(p; u, v) = ω(σ(p); σ_* u, σ_* v)` for a basic 2-form.
pub fn descend2(charts: &Arc<dyn BaseCharts>, w: &Form2) -> Form2 {
    let (c, w) = (charts.clone(), w.clone());
    Arc::new(move |p, u, v| {
        let k = c.chart_at(p);
        w(&c.section(k, p), &c.section_push(k, p, u), &c.section_push(k, p, v))
    })
}

/// Largest disagreement of the chart-wise descents of `w` at base points lying in several
/// charts.
pub fn chart_mismatch2(charts: &dyn BaseCharts, w: &Form2, points: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in points {
        let cs: Vec<usize> = (0..charts.chart_count()).filter(|&c| charts.in_chart(c, p)).collect();
        let basis = charts.base_tangent_basis(p);
        for (i, u) in basis.iter().enumerate() {
            for v in &basis[i + 1..] {
                let vals: Vec<f64> = cs
                    .iter()
                    .map(|&c| w(&charts.section(c, p), &charts.section_push(c, p, u), &charts.section_push(c, p, v)))
                    .collect();
                for a in &vals {
                    worst = worst.max((a - vals[0]).abs());
                }
            }
        }
    }
    worst
}

pub fn chart_mismatch1(charts: &dyn BaseCharts, w: &Form1, points: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in points {
        let cs: Vec<usize> = (0..charts.chart_count()).filter(|&c| charts.in_chart(c, p)).collect();
        for u in charts.base_tangent_basis(p) {
            let vals: Vec<f64> = cs.iter().map(|&c| w(&charts.section(c, p), &charts.section_push(c, p, &u))).collect();
            for a in &vals {
                worst = worst.max((a - vals[0]).abs());
            }
        }
    }
    worst
}

/// A `g`-valued connection 1-form on `M`, one real 1-form per basis element of `g`
/// (`Ξ = Σ_a Ξ_a X_a`).
#[derive(Clone)]
pub struct QuotientConnection {
    pub name: String,
    pub components: Vec<Form1>,
}

impl QuotientConnection {
    /// Residuals of `ι_{X*}Ξ = X` and `g*Ξ = Ad_g Ξ`.
    pub fn check(&self, action: &dyn Action, samples: &Samples) -> (f64, f64) {
        let g = action.group();
        let n = g.dim();
        let (mut vertical, mut equivariance): (f64, f64) = (0.0, 0.0);
        for (k, x) in samples.points.iter().enumerate() {
            for a in 0..n {
                let gen = action.generator(&unit(n, a), x);
                for b in 0..n {
                    let target = if a == b { 1.0 } else { 0.0 };
                    vertical = vertical.max((self.components[b](x, &gen) - target).abs());
                }
            }
            let gg = &samples.groups[k % samples.groups.len()];
            for v in action.tangent_basis(x) {
                let lhs: Vec<f64> = self.components.iter().map(|c| c(&action.act(gg, x), &action.push(gg, x, &v))).collect();
                let here: Vec<f64> = self.components.iter().map(|c| c(x, &v)).collect();
                let rhs = g.adjoint(gg, &here);
                equivariance = lhs.iter().zip(&rhs).fold(equivariance, |m, (p, q)| m.max((p - q).abs()));
            }
        }
        (vertical, equivariance)
    }

    /// `Ξ + ε q*β`-style perturbation by horizontal `g`-valued 1-forms.
    pub fn perturbed(&self, name: &str, extra: Vec<Form1>) -> Self {
        let components = self.components.iter().zip(extra).map(|(a, b)| crate::forms::add1(a, &b, 1.0)).collect();
        Self { name: name.into(), components }
    }
}

/// `κ_i = ⟨π*Ξ|λ_i⟩` on each sheet. Requires `ζ = 0` for the given witness.
pub fn kappa_form(eg: &AnalyticGerbe, lambda: &[MuFn], xi: &QuotientConnection, samples: &Samples) -> Result<Vec<Form1>> {
    let (ez, _) = ez_pair(eg, lambda, samples)?;
    let mut zeta: f64 = 0.0;
    for x in &samples.points {
        for g in &samples.groups {
            zeta = (ez.zeta)(g, x).iter().fold(zeta, |m, a| m.max(a.abs()));
        }
    }
    if zeta > Z_TOL {
        return Err(Error::NotInvariantizable(zeta));
    }
    Ok(kappa_unchecked(lambda, xi))
}

pub fn kappa_unchecked(lambda: &[MuFn], xi: &QuotientConnection) -> Vec<Form1> {
    lambda
        .iter()
        .map(|l| {
            let (l, c) = (l.clone(), xi.components.clone());
            Arc::new(move |x: &[f64], v: &[f64]| {
                let lx = l(x);
                c.iter().zip(&lx).map(|(ca, la)| ca(x, v) * la).sum::<f64>()
            }) as Form1
        })
        .collect()
}

/// Three-valued integrality verdict for a numerically computed period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrality {
    Integral,
    NonIntegral,
    Indeterminate,
}

pub fn integrality(period: f64) -> (Integrality, f64) {
    let dist = (period - period.round()).abs();
    let verdict = if dist < INTEGRAL_TOL {
        Integrality::Integral
    } else if dist > NONINTEGRAL_TOL {
        Integrality::NonIntegral
    } else {
        Integrality::Indeterminate
    };
    (verdict, dist)
}

/// The reduction `(Ḡ, ∇̄, f̄)` over `M/G`, with `Ȳ` the sheets over `B`.
#[derive(Clone)]
pub struct ReducedGerbe {
    pub kappa: Vec<Form1>,
    /// `Im ∇̄` on the component `(i, j)` of `Ȳ^[2]`.
    pub connection: Vec<Vec<Form1>>,
    /// `Im f̄_i`.
    pub curving: Vec<Form2>,
    pub residuals: DescentResiduals,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentResiduals {
    /// `max |ι_{X*}(∇ − δκ)|`.
    pub connection: f64,
    /// `max |ι_{X*}(f − dκ)|`.
    pub curving: f64,
    /// `max |f̄_j − f̄_i − dĀ_ij|` downstairs.
    pub downstairs: f64,
    /// Disagreement of descents across chart overlaps.
    pub charts: f64,
}

impl ReducedGerbe {
    /// Periods of `(−1/2πi) f̄₀` over the generating 2-cycles of `B`.
    pub fn periods(&self, charts: &dyn BaseCharts) -> Vec<f64> {
        let f = self.curving[0].clone();
        charts.periods(&(Arc::new(move |p: &[f64], u: &[f64], v: &[f64]| -f(p, u, v) / (2.0 * PI)) as Form2))
    }
}

/// Residuals of `ι_{X*}(∇ − δκ)` and `ι_{X*}(f − dκ)` over `samples`.
pub fn descent_residuals(eg: &AnalyticGerbe, kappa: &[Form1], samples: &Samples) -> (f64, f64) {
    let act = eg.action.as_ref();
    let n = act.group().dim();
    let s = eg.sheets();
    let dk: Vec<_> = kappa.iter().map(d1).collect();
    let (mut conn, mut curv): (f64, f64) = (0.0, 0.0);
    for x in &samples.points {
        let basis = act.tangent_basis(x);
        for a in 0..n {
            let gen = act.generator(&unit(n, a), x);
            for i in 0..s {
                for j in 0..s {
                    let r = eg.connection[i][j](x, &gen) - (kappa[j](x, &gen) - kappa[i](x, &gen));
                    conn = conn.max(r.abs());
                }
                for v in &basis {
                    let r = eg.curving[i](x, &gen, v) - dk[i](x, &gen, v);
                    curv = curv.max(r.abs());
                }
            }
        }
    }
    (conn, curv)
}

/// Reduction with respect to a witness `λ` (with `(E, ζ) = 0`) and a connection `Ξ`.
pub fn reduce_with_connection(
    eg: &AnalyticGerbe,
    lambda: &[MuFn],
    xi: &QuotientConnection,
    charts: &Arc<dyn BaseCharts>,
    samples: &Samples,
    base_points: &[Vec<f64>],
) -> Result<ReducedGerbe> {
    let (ez, _) = ez_pair(eg, lambda, samples)?;
    let size = pair_size(eg.action.as_ref(), &ez, samples);
    if size > DIFF_TOL {
        return Err(Error::ObstructionNonzero(format!("(E, ζ) has size {size:e} for this λ")));
    }
    let kappa = kappa_form(eg, lambda, xi, samples)?;
    let (connection_res, curving_res) = descent_residuals(eg, &kappa, samples);
    let s = eg.sheets();
    let up_conn: Vec<Vec<Form1>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let dk = crate::forms::add1(&kappa[j], &kappa[i], -1.0);
                    crate::forms::add1(&eg.connection[i][j], &dk, -1.0)
                })
                .collect()
        })
        .collect();
    let up_curv: Vec<Form2> = (0..s).map(|i| crate::forms::add2(&eg.curving[i], &d1(&kappa[i]), -1.0)).collect();
    let mut chart_res: f64 = 0.0;
    for w in &up_curv {
        chart_res = chart_res.max(chart_mismatch2(charts.as_ref(), w, base_points));
    }
    for row in &up_conn {
        for w in row {
            chart_res = chart_res.max(chart_mismatch1(charts.as_ref(), w, base_points));
        }
    }
    let connection: Vec<Vec<Form1>> = up_conn.iter().map(|r| r.iter().map(|w| descend1(charts, w)).collect()).collect();
    let curving: Vec<Form2> = up_curv.iter().map(|w| descend2(charts, w)).collect();
    let mut downstairs: f64 = 0.0;
    for p in base_points {
        let basis = charts.base_tangent_basis(p);
        for i in 0..s {
            for j in 0..s {
                let da = d1(&connection[i][j]);
                for (k, u) in basis.iter().enumerate() {
                    for v in &basis[k + 1..] {
                        downstairs = downstairs.max((curving[j](p, u, v) - curving[i](p, u, v) - da(p, u, v)).abs());
                    }
                }
            }
        }
    }
    Ok(ReducedGerbe {
        kappa,
        connection,
        curving,
        residuals: DescentResiduals { connection: connection_res, curving: curving_res, downstairs, charts: chart_res },
    })
}

/// Outcome of comparing the reductions for two witnesses.
#[derive(Clone)]
pub struct LambdaComparison {
    /// `μ` with `π*μ = λ′ − λ`.
    pub mu: MuFn,
    /// `Im σ̄` with `q*σ̄ = d⟨Ξ|μ⟩`.
    pub sigma_bar: Form2,
    /// Periods of `(−1/2πi)σ̄`.
    pub periods: Vec<f64>,
    pub verdict: Integrality,
    pub distance: f64,
}

impl LambdaComparison {
    pub fn stably_isomorphic(&self) -> Option<bool> {
        match self.verdict {
            Integrality::Integral => Some(true),
            Integrality::NonIntegral => Some(false),
            Integrality::Indeterminate => None,
        }
    }
}

/// The reductions for `λ` and `λ′` are stably isomorphic iff `λ′ − λ` is the moment of an
/// equivariant flat 𝕋-bundle, iff `−σ̄` is the curvature of a 𝕋-bundle on `M/G`, which is
/// decided by the integrality of the periods.
pub fn compare_lambda_choices(
    eg: &AnalyticGerbe,
    lambda: &[MuFn],
    lambda_prime: &[MuFn],
    xi: &QuotientConnection,
    charts: &Arc<dyn BaseCharts>,
    samples: &Samples,
) -> Result<LambdaComparison> {
    for l in [lambda, lambda_prime] {
        let (ez, _) = ez_pair(eg, l, samples)?;
        let size = pair_size(eg.action.as_ref(), &ez, samples);
        if size > DIFF_TOL {
            return Err(Error::ObstructionNonzero(format!("(E, ζ) has size {size:e}")));
        }
    }
    let (l0, l1) = (lambda[0].clone(), lambda_prime[0].clone());
    let mu: MuFn = Arc::new(move |x| l1(x).iter().zip(l0(x)).map(|(a, b)| a - b).collect());
    let pairing = kappa_unchecked(std::slice::from_ref(&mu), xi).remove(0);
    let sigma_bar = descend2(charts, &d1(&pairing));
    let sb = sigma_bar.clone();
    let periods = charts.periods(&(Arc::new(move |p: &[f64], u: &[f64], v: &[f64]| -sb(p, u, v) / (2.0 * PI)) as Form2));
    let (verdict, distance) = periods.iter().map(|&p| integrality(p)).fold((Integrality::Integral, 0.0f64), |acc, (v, d)| {
        let v = match (acc.0, v) {
            (Integrality::NonIntegral, _) | (_, Integrality::NonIntegral) => Integrality::NonIntegral,
            (Integrality::Indeterminate, _) | (_, Integrality::Indeterminate) => Integrality::Indeterminate,
            _ => Integrality::Integral,
        };
        (v, acc.1.max(d))
    });
    Ok(LambdaComparison { mu, sigma_bar, periods, verdict, distance })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiIndependence {
    /// `max |∇̄ − ∇̄′|`.
    pub connection_difference: f64,
    /// `max |f̄′ − f̄ + dᾱ|` with `q*ᾱ = ⟨ξ|λ⟩`.
    pub curving_residual: f64,
    /// The reductions are stably isomorphic, witnessed by the connection `−ᾱ` on the trivial
    /// bundle.
    pub stably_isomorphic: bool,
}

pub fn check_xi_independence(
    eg: &AnalyticGerbe,
    lambda: &[MuFn],
    xi: &QuotientConnection,
    xi_prime: &QuotientConnection,
    charts: &Arc<dyn BaseCharts>,
    samples: &Samples,
    base_points: &[Vec<f64>],
) -> Result<XiIndependence> {
    let r = reduce_with_connection(eg, lambda, xi, charts, samples, base_points)?;
    let r2 = reduce_with_connection(eg, lambda, xi_prime, charts, samples, base_points)?;
    let diff: Vec<Form1> = xi_prime.components.iter().zip(&xi.components).map(|(a, b)| crate::forms::add1(a, b, -1.0)).collect();
    let alpha = kappa_unchecked(&lambda[..1], &QuotientConnection { name: "ξ".into(), components: diff }).remove(0);
    let d_alpha_bar = d1(&descend1(charts, &alpha));
    let s = eg.sheets();
    let (mut conn, mut curv): (f64, f64) = (0.0, 0.0);
    for p in base_points {
        let basis = charts.base_tangent_basis(p);
        for (k, u) in basis.iter().enumerate() {
            for i in 0..s {
                for j in 0..s {
                    conn = conn.max((r.connection[i][j](p, u) - r2.connection[i][j](p, u)).abs());
                }
            }
            for v in &basis[k + 1..] {
                let res = r2.curving[0](p, u, v) - r.curving[0](p, u, v) + d_alpha_bar(p, u, v);
                curv = curv.max(res.abs());
            }
        }
    }
    Ok(XiIndependence {
        connection_difference: conn,
        curving_residual: curv,
        stably_isomorphic: conn < Z_TOL && curv < DIFF_TOL,
    })
}

/// A pseudo 𝕋-bundle `(R, v)` with `R` trivial on each sheet, with connection `d + η_i`.
#[derive(Clone)]
pub struct PseudoBundle {
    pub eta: Vec<Form1>,
}

#[derive(Clone)]
pub struct ReducedPseudoBundle {
    /// `Im η̄_i` on the sheets of `Ȳ`.
    pub eta_bar: Vec<Form1>,
    /// `Im F(η̄₀)`.
    pub curvature: Form2,
    /// `Im ω̄` with `q*ω̄ = ω`, `π*ω = F(η) − f`.
    pub omega_bar: Form2,
    /// `max |dω̄ + Ω̄|` on the base samples.
    pub omega_residual: f64,
}

/// `ρ` and `μ = ρ − λ` at a point; `μ` must be independent of the sheet.
pub fn pseudo_moment(eg: &AnalyticGerbe, pb: &PseudoBundle, lambda: &[MuFn], x: &[f64]) -> Vec<Vec<f64>> {
    let act = eg.action.as_ref();
    let n = act.group().dim();
    (0..eg.sheets())
        .map(|i| {
            let l = lambda[i](x);
            (0..n).map(|a| pb.eta[i](x, &act.generator(&unit(n, a), x)) - l[a]).collect()
        })
        .collect()
}

pub fn reduce_pseudo_bundle(
    eg: &AnalyticGerbe,
    pb: &PseudoBundle,
    lambda: &[MuFn],
    xi: &QuotientConnection,
    charts: &Arc<dyn BaseCharts>,
    samples: &Samples,
    base_points: &[Vec<f64>],
) -> Result<ReducedPseudoBundle> {
    moment(eg, samples)?;
    for x in &samples.points {
        let mu = pseudo_moment(eg, pb, lambda, x);
        let worst = mu.iter().flatten().fold(0.0f64, |m, a| m.max(a.abs()));
        if worst > Z_TOL {
            let reported = mu.into_iter().max_by(|a, b| dot(a, a).total_cmp(&dot(b, b))).unwrap_or_default();
            return Err(Error::MomentMismatch { mu: reported });
        }
    }
    let reduced = reduce_with_connection(eg, lambda, xi, charts, samples, base_points)?;
    let eta_bar: Vec<Form1> = pb
        .eta
        .iter()
        .zip(&reduced.kappa)
        .map(|(e, k)| descend1(charts, &crate::forms::add1(e, k, -1.0)))
        .collect();
    let curvature = d1(&eta_bar[0]);
    let omega = crate::forms::add2(&d1(&pb.eta[0]), &eg.curving[0], -1.0);
    let omega_bar = descend2(charts, &omega);
    let (d_omega, big_omega) = (d2(&omega_bar), d2(&reduced.curving[0]));
    let mut omega_residual: f64 = 0.0;
    for p in base_points {
        let b = charts.base_tangent_basis(p);
        if b.len() >= 3 {
            omega_residual = omega_residual.max((d_omega(p, &b[0], &b[1], &b[2]) + big_omega(p, &b[0], &b[1], &b[2])).abs());
        }
    }
    Ok(ReducedPseudoBundle { eta_bar, curvature, omega_bar, omega_residual })
}
