//! The Hopf fibration `q : S³ → S²` with the circle acting diagonally, its standard
//! connection `Ξ` and the reduction of the trivial gerbe on `S³` for the witnesses
//! `λ_r(z) = r z`.

use crate::deligne::analytic::{MuFn, Samples};
use crate::equivariant::lie::{constant_lambda, AnalyticGerbe};
use crate::error::Result;
use crate::forms::{Form1, Form2};
use crate::group::{cross, dot, gaussian, Action, HopfAction};
use crate::quadrature::{gauss_legendre, Icosphere, Orientation};
use crate::reduction::analytic::{
    integrality, reduce_with_connection, BaseCharts, DescentResiduals, Integrality, QuotientConnection,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// `Im Ξ = x₁dy₁ − y₁dx₁ + x₂dy₂ − y₂dx₂`.
pub fn xi(x: &[f64], v: &[f64]) -> f64 {
    x[0] * v[1] - x[1] * v[0] + x[2] * v[3] - x[3] * v[2]
}

/// `Im dΞ = 2(dx₁∧dy₁ + dx₂∧dy₂)`.
pub fn d_xi(_x: &[f64], u: &[f64], v: &[f64]) -> f64 {
    2.0 * (u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2])
}

/// `h(z) = (2 z₁ z̄₂, |z₁|² − |z₂|²) ∈ ℂ × ℝ`.
pub fn hopf_map(x: &[f64]) -> Vec<f64> {
    vec![
        2.0 * (x[0] * x[2] + x[1] * x[3]),
        2.0 * (x[1] * x[2] - x[0] * x[3]),
        x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3],
    ]
}

pub fn hopf_push(x: &[f64], v: &[f64]) -> Vec<f64> {
    vec![
        2.0 * (v[0] * x[2] + x[0] * v[2] + v[1] * x[3] + x[1] * v[3]),
        2.0 * (v[1] * x[2] + x[1] * v[2] - v[0] * x[3] - x[0] * v[3]),
        2.0 * (x[0] * v[0] + x[1] * v[1] - x[2] * v[2] - x[3] * v[3]),
    ]
}

/// Sections over the caps `p₃ > −½` (`z₁ > 0` real) and `p₃ < ½` (`z₂ > 0` real), with
/// periods over `S²` computed on an icosphere.
#[derive(Clone, Debug)]
pub struct HopfCharts {
    pub level: usize,
    sphere: Arc<Icosphere>,
}

impl HopfCharts {
    pub fn new(level: usize) -> Self {
        Self { level, sphere: Arc::new(Icosphere::new(level)) }
    }
}

impl BaseCharts for HopfCharts {
    fn chart_count(&self) -> usize {
        2
    }
    fn in_chart(&self, c: usize, p: &[f64]) -> bool {
        if c == 0 {
            p[2] > -0.5
        } else {
            p[2] < 0.5
        }
    }
    fn section(&self, c: usize, p: &[f64]) -> Vec<f64> {
        if c == 0 {
            let a = ((1.0 + p[2]) / 2.0).sqrt();
            vec![a, 0.0, p[0] / (2.0 * a), -p[1] / (2.0 * a)]
        } else {
            let s = ((1.0 - p[2]) / 2.0).sqrt();
            vec![p[0] / (2.0 * s), p[1] / (2.0 * s), s, 0.0]
        }
    }
    fn section_push(&self, c: usize, p: &[f64], u: &[f64]) -> Vec<f64> {
        if c == 0 {
            let a = ((1.0 + p[2]) / 2.0).sqrt();
            let da = u[2] / (4.0 * a);
            vec![
                da,
                0.0,
                u[0] / (2.0 * a) - p[0] * da / (2.0 * a * a),
                -u[1] / (2.0 * a) + p[1] * da / (2.0 * a * a),
            ]
        } else {
            let s = ((1.0 - p[2]) / 2.0).sqrt();
            let ds = -u[2] / (4.0 * s);
            vec![
                u[0] / (2.0 * s) - p[0] * ds / (2.0 * s * s),
                u[1] / (2.0 * s) - p[1] * ds / (2.0 * s * s),
                ds,
                0.0,
            ]
        }
    }
    fn project(&self, x: &[f64]) -> Vec<f64> {
        hopf_map(x)
    }
    fn random_base_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let v = gaussian(3, rng);
        let n = dot(&v, &v).sqrt();
        v.iter().map(|a| a / n).collect()
    }
    fn base_tangent_basis(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let axis = if p[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let a = cross(p, &axis);
        let n = dot(&a, &a).sqrt();
        let a: Vec<f64> = a.iter().map(|t| t / n).collect();
        let b = cross(p, &a).to_vec();
        vec![a, b]
    }
    fn periods(&self, omega: &Form2) -> Vec<f64> {
        vec![self.sphere.integrate_2form(Orientation::Outward, |p, u, v| omega(p, u, v))]
    }
}

/// The circle action on `S³`, the connection `Ξ` and the charts of `q`.
#[derive(Clone)]
pub struct HopfModel {
    pub action: Arc<dyn Action>,
    pub charts: Arc<dyn BaseCharts>,
    pub xi: QuotientConnection,
}

impl HopfModel {
    pub fn new(level: usize) -> Self {
        Self {
            action: Arc::new(HopfAction::default()),
            charts: Arc::new(HopfCharts::new(level)),
            xi: QuotientConnection { name: "standard".into(), components: vec![Arc::new(xi) as Form1] },
        }
    }

    /// `Ξ′ = Ξ + ε q*β` with `β = p₁ dp₂ − p₂ dp₁ + p₃² dp₁`.
    pub fn perturbed_xi(&self, eps: f64) -> QuotientConnection {
        let beta: Form1 = Arc::new(move |x: &[f64], v: &[f64]| {
            let (p, u) = (hopf_map(x), hopf_push(x, v));
            eps * (p[0] * u[1] - p[1] * u[0] + p[2] * p[2] * u[0])
        });
        self.xi.perturbed("perturbed", vec![beta])
    }

    pub fn trivial_gerbe(&self) -> AnalyticGerbe {
        AnalyticGerbe::trivial(self.action.clone())
    }

    pub fn lambda(r: f64) -> Vec<MuFn> {
        constant_lambda(1, vec![r])
    }

    pub fn samples(&self, points: usize, seed: u64) -> (Samples, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = Samples::random(self.action.as_ref(), points, 4, &mut rng);
        let base = (0..points).map(|_| self.charts.random_base_point(&mut rng)).collect();
        (samples, base)
    }
}

/// The sign of `∫_{S²} (−1/2πi) F(Ξ)` for the outward orientation.
pub const EULER_SIGN: f64 = 1.0;

/// `Im F(Ξ)` on `S²`, descended through the charts.
pub fn curvature_bar(charts: &Arc<dyn BaseCharts>) -> Form2 {
    crate::reduction::analytic::descend2(charts, &(Arc::new(d_xi) as Form2))
}

/// `∫_{S²} (−1/2πi) F(Ξ)` on an icosphere of the given level.
pub fn euler_period(level: usize, orientation: Orientation) -> f64 {
    let charts: Arc<dyn BaseCharts> = Arc::new(HopfCharts::new(level));
    let f = curvature_bar(&charts);
    -Icosphere::new(level).integrate_2form(orientation, |p, u, v| f(p, u, v)) / (2.0 * PI)
}

/// The same period by a latitude-longitude product rule (Gauss–Legendre in the polar angle,
/// trapezoid in the azimuth).
pub fn euler_period_latlong(n_theta: usize, n_phi: usize) -> f64 {
    let charts: Arc<dyn BaseCharts> = Arc::new(HopfCharts::new(0));
    let f = curvature_bar(&charts);
    let mut total = 0.0;
    for (theta, w) in gauss_legendre(n_theta, 0.0, PI) {
        let (st, ct) = theta.sin_cos();
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            let (sp, cp) = phi.sin_cos();
            let p = [st * cp, st * sp, ct];
            let d_theta = [ct * cp, ct * sp, -st];
            let d_phi = [-st * sp, st * cp, 0.0];
            total += w * (2.0 * PI / n_phi as f64) * f(&p, &d_theta, &d_phi);
        }
    }
    -total / (2.0 * PI)
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfReduction {
    pub r: f64,
    /// `f̄_r = c F(Ξ)`; the fitted `c`.
    pub curving_coefficient: f64,
    /// `∫_{S²} (−1/2πi) f̄_r`.
    pub period: f64,
    pub verdict: Integrality,
    pub distance: f64,
    pub residuals: DescentResiduals,
}

impl HopfReduction {
    pub fn trivial(&self) -> Option<bool> {
        match self.verdict {
            Integrality::Integral => Some(true),
            Integrality::NonIntegral => Some(false),
            Integrality::Indeterminate => None,
        }
    }
}

/// Reduce the trivial gerbe on `S³` along `q` with the witness `λ_r` and connection `xi`.
pub fn hopf_reduction_with(model: &HopfModel, r: f64, xi: &QuotientConnection, seed: u64) -> Result<HopfReduction> {
    let eg = model.trivial_gerbe();
    let (samples, base) = model.samples(40, seed);
    let reduced = reduce_with_connection(&eg, &HopfModel::lambda(r), xi, &model.charts, &samples, &base)?;
    let period = reduced.periods(model.charts.as_ref())[0];
    let (verdict, distance) = integrality(period);
    let f_bar = curvature_bar(&model.charts);
    let p = &base[0];
    let b = model.charts.base_tangent_basis(p);
    let curving_coefficient = reduced.curving[0](p, &b[0], &b[1]) / f_bar(p, &b[0], &b[1]);
    Ok(HopfReduction { r, curving_coefficient, period, verdict, distance, residuals: reduced.residuals })
}

pub fn hopf_reduction(r: f64, level: usize, seed: u64) -> Result<HopfReduction> {
    let model = HopfModel::new(level);
    hopf_reduction_with(&model, r, &model.xi.clone(), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_are_sections() {
        let charts = HopfCharts::new(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = charts.random_base_point(&mut rng);
            for c in 0..2 {
                if charts.in_chart(c, &p) {
                    let x = charts.section(c, &p);
                    let hp = hopf_map(&x);
                    assert!((dot(&x, &x) - 1.0).abs() < 1e-12);
                    assert!(hp.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12));
                    for u in charts.base_tangent_basis(&p) {
                        let pushed = hopf_push(&x, &charts.section_push(c, &p, &u));
                        assert!(pushed.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn xi_is_a_connection() {
        let model = HopfModel::new(0);
        let (samples, _) = model.samples(30, 1);
        let (vertical, equivariance) = model.xi.check(model.action.as_ref(), &samples);
        assert!(vertical < 1e-12 && equivariance < 1e-12);
        let (v2, e2) = model.perturbed_xi(0.3).check(model.action.as_ref(), &samples);
        assert!(v2 < 1e-12 && e2 < 1e-12);
    }

    #[test]
    fn curvature_is_half_the_area_form() {
        // Independent of the charts: F(Ξ) pulled back along q is dΞ, and on S² it is a
        // constant multiple of the area form, the constant fixed by a single point.
        let charts: Arc<dyn BaseCharts> = Arc::new(HopfCharts::new(0));
        let f = curvature_bar(&charts);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p0 = charts.random_base_point(&mut rng);
        let b0 = charts.base_tangent_basis(&p0);
        let c = f(&p0, &b0[0], &b0[1]) / dot(&p0, &cross(&b0[0], &b0[1]));
        assert!((c.abs() - 0.5).abs() < 1e-12);
        for _ in 0..100 {
            let p = charts.random_base_point(&mut rng);
            let b = charts.base_tangent_basis(&p);
            let area = dot(&p, &cross(&b[0], &b[1]));
            assert!((f(&p, &b[0], &b[1]) - c * area).abs() < 1e-12);
        }
        let mismatch = crate::reduction::analytic::chart_mismatch2(
            charts.as_ref(),
            &(Arc::new(d_xi) as Form2),
            &(0..50).map(|_| charts.random_base_point(&mut rng)).collect::<Vec<_>>(),
        );
        assert!(mismatch < 1e-12);
    }

    #[test]
    fn euler_period_matches_latlong_oracle() {
        let oracle = euler_period_latlong(64, 128);
        assert!((oracle.abs() - 1.0).abs() < 1e-12);
        assert!((euler_period(4, Orientation::Outward) - oracle).abs() < 1e-3);
        assert!((euler_period(4, Orientation::Inward) + oracle).abs() < 1e-3);
    }

    #[test]
    fn icosphere_converges_at_second_order_or_better() {
        let exact = euler_period_latlong(64, 128);
        let errs: Vec<f64> = (1..=4).map(|l| (euler_period(l, Orientation::Outward) - exact).abs()).collect();
        for w in errs.windows(2) {
            if w[1] > 1e-13 {
                assert!((w[0] / w[1]).log2() >= 1.8, "{errs:?}");
            }
        }
    }

    #[test]
    fn reduction_verdicts() {
        for r in [-3.0, 0.0, 1.0, 2.0] {
            let red = hopf_reduction(r, 4, 0).unwrap();
            assert_eq!(red.trivial(), Some(true), "{red:?}");
        }
        for r in [0.5, 1.25] {
            let red = hopf_reduction(r, 4, 0).unwrap();
            assert_eq!(red.trivial(), Some(false), "{red:?}");
        }
    }

    #[test]
    fn reduced_curving_is_minus_r_times_curvature() {
        let red = hopf_reduction(1.5, 3, 0).unwrap();
        assert!((red.curving_coefficient + 1.5).abs() < 1e-9, "{red:?}");
        assert!(red.residuals.connection < 1e-12 && red.residuals.curving < 1e-9 && red.residuals.charts < 1e-9);
    }

    #[test]
    fn xi_independence() {
        let model = HopfModel::new(2);
        let (samples, base) = model.samples(20, 2);
        let eg = model.trivial_gerbe();
        let rep = crate::reduction::analytic::check_xi_independence(
            &eg,
            &HopfModel::lambda(0.7),
            &model.xi,
            &model.perturbed_xi(0.25),
            &model.charts,
            &samples,
            &base,
        )
        .unwrap();
        assert!(rep.stably_isomorphic, "{rep:?}");
    }

    #[test]
    fn euler_sign_convention() {
        assert!((euler_period(3, Orientation::Outward) - EULER_SIGN).abs() < 1e-2);
    }

    #[test]
    fn lambda_comparison_is_integrality_of_the_difference() {
        let model = HopfModel::new(3);
        let (samples, _) = model.samples(10, 5);
        let eg = model.trivial_gerbe();
        for (r, r2, same) in [(0.0, 1.0, true), (0.5, 2.5, true), (0.2, 0.7, false), (1.0, 1.3, false)] {
            let cmp = crate::reduction::analytic::compare_lambda_choices(
                &eg,
                &HopfModel::lambda(r),
                &HopfModel::lambda(r2),
                &model.xi,
                &model.charts,
                &samples,
            )
            .unwrap();
            assert_eq!(cmp.stably_isomorphic(), Some(same), "{r} {r2} {:?}", cmp.periods);
            assert!((cmp.periods[0] - (r2 - r) * EULER_SIGN).abs() < 1e-6);
        }
    }

    #[test]
    fn pseudo_bundle_reduction() {
        use crate::reduction::analytic::{reduce_pseudo_bundle, PseudoBundle};
        let model = HopfModel::new(0);
        let (samples, base) = model.samples(20, 6);
        let eg = model.trivial_gerbe();
        let r = 0.75;
        let pb = PseudoBundle { eta: vec![crate::forms::add1(&crate::forms::zero1(), &model.xi.components[0], r)] };
        let red = reduce_pseudo_bundle(&eg, &pb, &HopfModel::lambda(r), &model.xi, &model.charts, &samples, &base).unwrap();
        let f = curvature_bar(&model.charts);
        for p in &base {
            let b = model.charts.base_tangent_basis(p);
            assert!(((red.omega_bar)(p, &b[0], &b[1]) - r * f(p, &b[0], &b[1])).abs() < 1e-9);
            assert!((red.curvature)(p, &b[0], &b[1]).abs() < 1e-9);
        }
        let err = reduce_pseudo_bundle(&eg, &pb, &HopfModel::lambda(r + 0.5), &model.xi, &model.charts, &samples, &base);
        match err {
            Err(crate::Error::MomentMismatch { mu }) => assert!((mu[0] + 0.5).abs() < 1e-12),
            other => panic!("{:?}", other.err()),
        }
    }

    #[test]
    fn kappa_rejects_nonzero_zeta() {
        use crate::reduction::analytic::kappa_form;
        // On SU(2) ↷ su(2) a nonzero constant witness has ζ(g) = (λ − Ad_g λ)/2π ≠ 0.
        let action: Arc<dyn Action> = Arc::new(crate::group::Su2Adjoint::default());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = Samples::random(action.as_ref(), 10, 4, &mut rng);
        let eg = AnalyticGerbe::trivial(action);
        let xi3 = QuotientConnection { name: "zero".into(), components: vec![crate::forms::zero1(); 3] };
        let res = kappa_form(&eg, &constant_lambda(1, vec![0.3, 0.0, 0.1]), &xi3, &samples);
        assert!(matches!(res, Err(crate::Error::NotInvariantizable(z)) if z > 1e-3));
        assert!(kappa_form(&eg, &constant_lambda(1, vec![0.0; 3]), &xi3, &samples).is_ok());
    }
}
