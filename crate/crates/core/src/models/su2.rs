//! The 3-form `χ` and the `su(2)*`-valued 1-form `e` on `SU(2)` at level `k`, for the
//! adjoint action of `SU(2)` on itself.
//!
//! `SU(2)` is the unit quaternions in `ℝ⁴` and `su(2)` the imaginary quaternions with
//! coordinates on `i, j, k`; in the defining representation `Tr(xy) = −2⟨x, y⟩`, so
//! `Tr(θ∧θ∧θ)(a, b, c) = −12 det[θa, θb, θc]`. `SU(2)` is oriented by the left-invariant
//! frame `(qi, qj, qk)`.

use crate::group::{euler_quaternion, gaussian, qconj, qexp, qmul, Action, LieGroup, Su2};
use crate::quadrature::gauss_legendre;
use rand::RngCore;
use std::f64::consts::PI;

/// Coefficient of `Tr((θ̄ + θ)X)` in `⟨X|e⟩` for which `⟨X|de⟩ = ι_{X*}χ` holds.
pub fn e_coefficient(k: f64) -> f64 {
    -k / (8.0 * PI * PI)
}

/// `SU(2)` acting on itself by conjugation, in a neighbourhood of `S³ ⊂ ℝ⁴`.
#[derive(Clone, Debug, Default)]
pub struct Su2Conjugation {
    pub group: Su2,
}

fn imag(x: &[f64]) -> [f64; 4] {
    [0.0, x[0], x[1], x[2]]
}

impl Action for Su2Conjugation {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        4
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        qmul(&qmul(g, x), &qconj(g)).to_vec()
    }
    fn push(&self, g: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        qmul(&qmul(g, v), &qconj(g)).to_vec()
    }
    fn generator(&self, xa: &[f64], x: &[f64]) -> Vec<f64> {
        let (a, b) = (qmul(&imag(xa), x), qmul(x, &imag(xa)));
        (0..4).map(|i| a[i] - b[i]).collect()
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.group.random(rng)
    }
    fn tangent_basis(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (0..3).map(|a| qmul(x, &imag(&crate::group::unit(3, a))).to_vec()).collect()
    }
    fn random_tangent(&self, x: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        qmul(x, &imag(&gaussian(3, rng))).to_vec()
    }
}

/// `θ(v) = q⁻¹v`, extended off the sphere by `q⁻¹ = q̄/|q|²`.
pub fn theta(q: &[f64], v: &[f64]) -> [f64; 3] {
    let n2: f64 = q.iter().map(|a| a * a).sum();
    let t = qmul(&qconj(q), v);
    [t[1] / n2, t[2] / n2, t[3] / n2]
}

/// `θ̄(v) = vq⁻¹`.
pub fn theta_bar(q: &[f64], v: &[f64]) -> [f64; 3] {
    let n2: f64 = q.iter().map(|a| a * a).sum();
    let t = qmul(v, &qconj(q));
    [t[1] / n2, t[2] / n2, t[3] / n2]
}

fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// The forms `χ = −(k/24π²) Tr(θ∧θ∧θ)` and `⟨X|e⟩ = c_k Tr((θ̄ + θ)X)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2FormPack {
    pub k: f64,
}

impl Su2FormPack {
    pub fn new(k: i64) -> Self {
        Self { k: k as f64 }
    }

    /// `χ(a, b, c) = (k/2π²) det[θa, θb, θc]`.
    pub fn chi(&self, q: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        self.k / (2.0 * PI * PI) * det3(&theta(q, a), &theta(q, b), &theta(q, c))
    }

    /// `e(v)` in the coordinates of `su(2)*` dual to `i, j, k`.
    pub fn e(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        self.e_with_coefficient(e_coefficient(self.k), q, v)
    }

    pub fn e_with_coefficient(&self, c: f64, q: &[f64], v: &[f64]) -> Vec<f64> {
        let (t, tb) = (theta(q, v), theta_bar(q, v));
        (0..3).map(|a| c * -2.0 * (t[a] + tb[a])).collect()
    }

    /// `∫_{SU(2)} χ` by a Gauss–Legendre × trapezoid rule in the Euler chart with `n` polar
    /// nodes.
    pub fn chi_period(&self, n: usize) -> f64 {
        let m = 2 * n.max(2);
        let mut total = 0.0;
        for (theta_e, w) in gauss_legendre(n, 0.0, PI) {
            for i in 0..m {
                for j in 0..2 * m {
                    let phi = 2.0 * PI * i as f64 / m as f64;
                    let psi = 4.0 * PI * j as f64 / (2 * m) as f64;
                    let q = euler_quaternion(phi, theta_e, psi);
                    let (d_phi, d_theta, d_psi) = euler_frame(phi, theta_e, psi);
                    let cell = w * (2.0 * PI / m as f64) * (4.0 * PI / (2 * m) as f64);
                    total += EULER_CHART_ORIENTATION * cell * self.chi(&q, &d_phi, &d_theta, &d_psi);
                }
            }
        }
        total
    }
}

/// `(∂_φ q, ∂_θ q, ∂_ψ q)` for `q = exp(φk/2) exp(θj/2) exp(ψk/2)`.
pub fn euler_frame(phi: f64, theta: f64, psi: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let half_k = [0.0, 0.0, 0.0, 0.5];
    let q = euler_quaternion(phi, theta, psi);
    let a = qexp(&[0.0, 0.0, phi / 2.0]);
    let b = qexp(&[0.0, theta / 2.0, 0.0]);
    let c = qexp(&[0.0, 0.0, psi / 2.0]);
    let d_theta = qmul(&qmul(&a, &qmul(&[0.0, 0.0, 0.5, 0.0], &b)), &c);
    (qmul(&half_k, &q).to_vec(), d_theta.to_vec(), qmul(&q, &half_k).to_vec())
}

/// Sign of the Euler chart `(φ, θ, ψ)` relative to the orientation of `SU(2)`.
pub const EULER_CHART_ORIENTATION: f64 = -1.0;

/// `∫_{SU(2)} χ` at level `k`.
pub fn su2_chi_period(k: i64) -> f64 {
    Su2FormPack::new(k).chi_period(12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::analytic::derivative;
    use crate::forms::shifted;
    use crate::group::unit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn euler_chart_orientation_is_recorded_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.next_u32() as f64 / u32::MAX as f64).collect();
            let (phi, th, psi) = (2.0 * PI * x[0], 0.1 + 2.9 * x[1], 4.0 * PI * x[2]);
            let q = euler_quaternion(phi, th, psi);
            let (dp, dt, ds) = euler_frame(phi, th, psi);
            let (a, b, c) = (theta(&q, &dp), theta(&q, &dt), theta(&q, &ds));
            let vol = det3(&a, &b, &c);
            assert_eq!(vol.signum(), EULER_CHART_ORIENTATION);
            // density sin θ / 8 of the round metric
            assert!((vol.abs() - th.sin() / 8.0).abs() < 1e-8);
        }
    }

    #[test]
    fn chi_period_is_k() {
        for k in [0, 1, 2, 5, -3] {
            let p = su2_chi_period(k);
            assert!((p - k as f64).abs() < 1e-3, "k = {k}: {p}");
        }
        assert_eq!(su2_chi_period(0), 0.0);
        assert!((su2_chi_period(5) - 5.0 * su2_chi_period(1)).abs() < 1e-9);
    }

    #[test]
    fn chi_period_converges() {
        let f = Su2FormPack::new(1);
        let errs: Vec<f64> = [2, 3, 4, 6].iter().map(|&n| (f.chi_period(n) - 1.0).abs()).collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] / 4.0 || w[1] < 1e-9, "{errs:?}");
        }
    }

    #[test]
    fn de_equals_contraction_of_chi() {
        let forms = Su2FormPack::new(3);
        let act = Su2Conjugation::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let q = act.random_point(&mut rng);
            let (u, v) = (act.random_tangent(&q, &mut rng), act.random_tangent(&q, &mut rng));
            for a in 0..3 {
                let de = derivative(|t| forms.e(&shifted(&q, t, &u), &v)[a], 1e-4)
                    - derivative(|t| forms.e(&shifted(&q, t, &v), &u)[a], 1e-4);
                let x_star = act.generator(&unit(3, a), &q);
                worst = worst.max((de - forms.chi(&q, &x_star, &u, &v)).abs());
            }
        }
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn literal_coefficient_fails_the_de_identity() {
        let forms = Su2FormPack::new(1);
        let act = Su2Conjugation::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = act.random_point(&mut rng);
        let (u, v) = (act.random_tangent(&q, &mut rng), act.random_tangent(&q, &mut rng));
        let c = -1.0 / (24.0 * PI * PI);
        let de = derivative(|t| forms.e_with_coefficient(c, &shifted(&q, t, &u), &v)[0], 1e-4)
            - derivative(|t| forms.e_with_coefficient(c, &shifted(&q, t, &v), &u)[0], 1e-4);
        let chi = forms.chi(&q, &act.generator(&unit(3, 0), &q), &u, &v);
        assert!(chi.abs() > 1e-3);
        assert!((3.0 * de - chi).abs() < 1e-7);
    }

    #[test]
    fn e_is_equivariant_and_chi_is_invariant() {
        let forms = Su2FormPack::new(2);
        let act = Su2Conjugation::default();
        let g = act.group();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (q, h) = (act.random_point(&mut rng), g.random(&mut rng));
            let vs: Vec<Vec<f64>> = (0..3).map(|_| act.random_tangent(&q, &mut rng)).collect();
            let pushed: Vec<Vec<f64>> = vs.iter().map(|v| act.push(&h, &q, v)).collect();
            let hq = act.act(&h, &q);
            let lhs = forms.e(&hq, &pushed[0]);
            let rhs = g.coadjoint(&h, &forms.e(&q, &vs[0]));
            assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).abs() < 1e-9));
            let c1 = forms.chi(&hq, &pushed[0], &pushed[1], &pushed[2]);
            assert!((c1 - forms.chi(&q, &vs[0], &vs[1], &vs[2])).abs() < 1e-9);
        }
    }
}
