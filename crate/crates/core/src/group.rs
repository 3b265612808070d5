//! Finite-dimensional Lie groups and their actions, for the analytic backend.
//!
//! Group elements and Lie algebra vectors are flat coordinate vectors. A tangent vector
//! at `g` is written left-trivialized, so `X ∈ g` stands for `gX`. Elements of `g*` are
//! coordinate vectors in the dual basis, and the coadjoint action is
//! `⟨X | Ad_g f⟩ = ⟨Ad_{g⁻¹} X | f⟩`.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

pub trait LieGroup: Send + Sync {
    fn name(&self) -> String;
    /// Dimension of the Lie algebra.
    fn dim(&self) -> usize;
    fn identity(&self) -> Vec<f64>;
    fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64>;
    fn inv(&self, g: &[f64]) -> Vec<f64>;
    fn exp(&self, x: &[f64]) -> Vec<f64>;
    fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    /// `Ad_g X`.
    fn adjoint(&self, g: &[f64], x: &[f64]) -> Vec<f64>;
    fn random(&self, rng: &mut dyn RngCore) -> Vec<f64>;
    /// A normalized invariant-measure quadrature, when the group is compact.
    fn haar(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        None
    }

    /// `Ad_g` on `g*` in the dual basis.
    fn coadjoint(&self, g: &[f64], f: &[f64]) -> Vec<f64> {
        let gi = self.inv(g);
        (0..self.dim())
            .map(|a| {
                let col = self.adjoint(&gi, &unit(self.dim(), a));
                col.iter().zip(f).map(|(c, v)| c * v).sum()
            })
            .collect()
    }

    /// Matrix of `Ad_g` on `g*`: `coadjoint(g, f) = M f`.
    fn coadjoint_matrix(&self, g: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let cols: Vec<Vec<f64>> = (0..n).map(|b| self.coadjoint(g, &unit(n, b))).collect();
        (0..n).map(|a| (0..n).map(|b| cols[b][a]).collect()).collect()
    }
}

pub fn unit(n: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[a] = 1.0;
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gaussian(n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// `S¹ = ℝ/2πℤ`, with `exp(x) = x`.
#[derive(Clone, Debug)]
pub struct Circle {
    pub haar_points: usize,
}

impl Default for Circle {
    fn default() -> Self {
        Self { haar_points: 256 }
    }
}

impl LieGroup for Circle {
    fn name(&self) -> String {
        "S1".into()
    }
    fn dim(&self) -> usize {
        1
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        vec![g[0] + h[0]]
    }
    fn inv(&self, g: &[f64]) -> Vec<f64> {
        vec![-g[0]]
    }
    fn exp(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0]]
    }
    fn bracket(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
    fn adjoint(&self, _: &[f64], x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn random(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![(rng.next_u64() as f64 / u64::MAX as f64) * 2.0 * PI]
    }
    fn haar(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        let n = self.haar_points;
        Some((0..n).map(|j| (vec![2.0 * PI * j as f64 / n as f64], 1.0 / n as f64)).collect())
    }
}

/// The vector group `ℝⁿ` under addition. Not compact.
#[derive(Clone, Debug)]
pub struct VectorGroup(pub usize);

impl LieGroup for VectorGroup {
    fn name(&self) -> String {
        format!("R^{}", self.0)
    }
    fn dim(&self) -> usize {
        self.0
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0; self.0]
    }
    fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        g.iter().zip(h).map(|(a, b)| a + b).collect()
    }
    fn inv(&self, g: &[f64]) -> Vec<f64> {
        g.iter().map(|a| -a).collect()
    }
    fn exp(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn bracket(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        vec![0.0; self.0]
    }
    fn adjoint(&self, _: &[f64], x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn random(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        gaussian(self.0, rng)
    }
}

/// The cyclic group `ℤ/n` as a zero-dimensional Lie group; elements are `[k]`.
#[derive(Clone, Debug)]
pub struct Cyclic(pub usize);

impl LieGroup for Cyclic {
    fn name(&self) -> String {
        format!("Z/{}", self.0)
    }
    fn dim(&self) -> usize {
        0
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        vec![((g[0] + h[0]) as usize % self.0) as f64]
    }
    fn inv(&self, g: &[f64]) -> Vec<f64> {
        vec![((self.0 - g[0] as usize % self.0) % self.0) as f64]
    }
    fn exp(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
    fn bracket(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        vec![]
    }
    fn adjoint(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        vec![]
    }
    fn random(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![(rng.next_u64() % self.0 as u64) as f64]
    }
    fn haar(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        Some((0..self.0).map(|k| (vec![k as f64], 1.0 / self.0 as f64)).collect())
    }
}

/// `SU(2)` as unit quaternions `[w, x, y, z]`; `su(2)` as imaginary quaternions, so that
/// `[u, v] = 2 u × v` and `exp(v) = cos|v| + sin|v| v/|v|`.
#[derive(Clone, Debug)]
pub struct Su2 {
    pub haar_order: usize,
}

impl Default for Su2 {
    fn default() -> Self {
        Self { haar_order: 12 }
    }
}

pub fn qmul(a: &[f64], b: &[f64]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn qconj(a: &[f64]) -> [f64; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

pub fn qexp(v: &[f64]) -> [f64; 4] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n < 1e-300 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let s = n.sin() / n;
    [n.cos(), s * v[0], s * v[1], s * v[2]]
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Rotation `v ↦ q v q̄` of an imaginary quaternion.
pub fn qrotate(q: &[f64], v: &[f64]) -> Vec<f64> {
    let r = qmul(&qmul(q, &[0.0, v[0], v[1], v[2]]), &qconj(q));
    vec![r[1], r[2], r[3]]
}

/// Euler-angle chart `q = exp(φk/2) exp(θj/2) exp(ψk/2)`.
pub fn euler_quaternion(phi: f64, theta: f64, psi: f64) -> [f64; 4] {
    let a = qexp(&[0.0, 0.0, phi / 2.0]);
    let b = qexp(&[0.0, theta / 2.0, 0.0]);
    let c = qexp(&[0.0, 0.0, psi / 2.0]);
    qmul(&qmul(&a, &b), &c)
}

impl LieGroup for Su2 {
    fn name(&self) -> String {
        "SU(2)".into()
    }
    fn dim(&self) -> usize {
        3
    }
    fn identity(&self) -> Vec<f64> {
        vec![1.0, 0.0, 0.0, 0.0]
    }
    fn mul(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        qmul(g, h).to_vec()
    }
    fn inv(&self, g: &[f64]) -> Vec<f64> {
        qconj(g).to_vec()
    }
    fn exp(&self, x: &[f64]) -> Vec<f64> {
        qexp(x).to_vec()
    }
    fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        cross(x, y).iter().map(|c| 2.0 * c).collect()
    }
    fn adjoint(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        qrotate(g, x)
    }
    fn random(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let v = gaussian(4, rng);
        let n = dot(&v, &v).sqrt();
        v.iter().map(|a| a / n).collect()
    }
    fn haar(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        // Gauss-Legendre in θ, trapezoid in φ and ψ; density sin θ / (16π²).
        let n = self.haar_order;
        let gl = crate::quadrature::gauss_legendre(n, 0.0, PI);
        let m = 2 * n;
        let mut out = Vec::with_capacity(gl.len() * m * m);
        for &(theta, w) in &gl {
            for i in 0..m {
                for j in 0..2 * m {
                    let phi = 2.0 * PI * i as f64 / m as f64;
                    let psi = 4.0 * PI * j as f64 / (2 * m) as f64;
                    let weight = w * theta.sin() / 2.0 / (m * 2 * m) as f64;
                    out.push((euler_quaternion(phi, theta, psi).to_vec(), weight));
                }
            }
        }
        Some(out)
    }
}

/// A left action on an open subset of `ℝⁿ` (or a neighbourhood of an embedded manifold).
pub trait Action: Send + Sync {
    fn group(&self) -> &dyn LieGroup;
    fn dim_m(&self) -> usize;
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64>;
    /// `(g_*)_x v`.
    fn push(&self, g: &[f64], x: &[f64], v: &[f64]) -> Vec<f64>;
    /// The generating vector field `X*(x) = d/dt exp(tX) x`.
    fn generator(&self, xa: &[f64], x: &[f64]) -> Vec<f64>;
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64>;
    /// A basis of `T_x M`.
    fn tangent_basis(&self, _x: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim_m()).map(|k| unit(self.dim_m(), k)).collect()
    }
    fn random_tangent(&self, x: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
        let basis = self.tangent_basis(x);
        let c = gaussian(basis.len(), rng);
        let mut v = vec![0.0; self.dim_m()];
        for (ci, b) in c.iter().zip(&basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += ci * bi;
            }
        }
        v
    }
}

/// `S¹` acting on the torus `ℝ²/ℤ²` by `θ · (x₁, x₂) = (x₁ + θ/2π, x₂)`.
#[derive(Clone, Debug, Default)]
pub struct CircleOnTorus {
    pub group: Circle,
}

impl Action for CircleOnTorus {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        2
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        vec![x[0] + g[0] / (2.0 * PI), x[1]]
    }
    fn push(&self, _: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
    fn generator(&self, xa: &[f64], _: &[f64]) -> Vec<f64> {
        vec![xa[0] / (2.0 * PI), 0.0]
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..2).map(|_| rng.next_u64() as f64 / u64::MAX as f64).collect()
    }
}

/// `SU(2)` acting on `su(2) ≅ ℝ³` by the adjoint representation.
#[derive(Clone, Debug, Default)]
pub struct Su2Adjoint {
    pub group: Su2,
}

impl Action for Su2Adjoint {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        3
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        qrotate(g, x)
    }
    fn push(&self, g: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        qrotate(g, v)
    }
    fn generator(&self, xa: &[f64], x: &[f64]) -> Vec<f64> {
        cross(xa, x).iter().map(|c| 2.0 * c).collect()
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        gaussian(3, rng)
    }
}

/// `ℤ/n` acting on the torus by rotating the first coordinate by `k/n`.
#[derive(Clone, Debug)]
pub struct CyclicOnTorus {
    pub group: Cyclic,
}

impl Action for CyclicOnTorus {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        2
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        vec![x[0] + g[0] / self.group.0 as f64, x[1]]
    }
    fn push(&self, _: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
    fn generator(&self, _: &[f64], _: &[f64]) -> Vec<f64> {
        vec![0.0, 0.0]
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..2).map(|_| rng.next_u64() as f64 / u64::MAX as f64).collect()
    }
}

/// `ℝⁿ` acting on itself by translation.
#[derive(Clone, Debug)]
pub struct Translations {
    pub group: VectorGroup,
}

impl Translations {
    pub fn new(n: usize) -> Self {
        Self { group: VectorGroup(n) }
    }
}

impl Action for Translations {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        self.group.0
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        g.iter().zip(x).map(|(a, b)| a + b).collect()
    }
    fn push(&self, _: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
    fn generator(&self, xa: &[f64], _: &[f64]) -> Vec<f64> {
        xa.to_vec()
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        gaussian(self.group.0, rng)
    }
}

/// The diagonal circle in `SU(2)` acting on `S³ ⊂ ℂ² = ℝ⁴` by `(z₁, z₂) ↦ (e^{iθ}z₁, e^{iθ}z₂)`.
/// Coordinates are `(x₁, y₁, x₂, y₂)` with `z_k = x_k + i y_k`.
#[derive(Clone, Debug, Default)]
pub struct HopfAction {
    pub group: Circle,
}

fn rotate_pairs(t: f64, v: &[f64]) -> Vec<f64> {
    let (c, s) = (t.cos(), t.sin());
    vec![c * v[0] - s * v[1], s * v[0] + c * v[1], c * v[2] - s * v[3], s * v[2] + c * v[3]]
}

impl Action for HopfAction {
    fn group(&self) -> &dyn LieGroup {
        &self.group
    }
    fn dim_m(&self) -> usize {
        4
    }
    fn act(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        rotate_pairs(g[0], x)
    }
    fn push(&self, g: &[f64], _: &[f64], v: &[f64]) -> Vec<f64> {
        rotate_pairs(g[0], v)
    }
    fn generator(&self, xa: &[f64], x: &[f64]) -> Vec<f64> {
        let a = xa[0];
        vec![-a * x[1], a * x[0], -a * x[3], a * x[2]]
    }
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let v = gaussian(4, rng);
        let n = dot(&v, &v).sqrt();
        v.iter().map(|a| a / n).collect()
    }
    /// `iz, jz, kz` in quaternion notation with `z = x₁ + y₁ i + x₂ j + y₂ k`.
    fn tangent_basis(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let q = [x[0], x[1], x[2], x[3]];
        [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
            .iter()
            .map(|u| qmul(u, &q).to_vec())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn su2_adjoint_is_a_homomorphism_and_exp_matches_bracket() {
        let g = Su2::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (a, b) = (g.random(&mut rng), g.random(&mut rng));
            let x = gaussian(3, &mut rng);
            let lhs = g.adjoint(&g.mul(&a, &b), &x);
            let rhs = g.adjoint(&a, &g.adjoint(&b, &x));
            assert!(close(&lhs, &rhs) < 1e-12);
            // d/dt Ad_{exp tX} Y = [X, Y]
            let y = gaussian(3, &mut rng);
            let h = 1e-5;
            let p = g.adjoint(&g.exp(&x.iter().map(|v| v * h).collect::<Vec<_>>()), &y);
            let m = g.adjoint(&g.exp(&x.iter().map(|v| -v * h).collect::<Vec<_>>()), &y);
            let fd: Vec<f64> = p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            assert!(close(&fd, &g.bracket(&x, &y)) < 1e-8);
        }
    }

    #[test]
    fn coadjoint_is_dual_to_adjoint() {
        let g = Su2::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = g.random(&mut rng);
        let (x, f) = (gaussian(3, &mut rng), gaussian(3, &mut rng));
        let lhs = dot(&x, &g.coadjoint(&a, &f));
        let rhs = dot(&g.adjoint(&g.inv(&a), &x), &f);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn su2_haar_rule_has_unit_mass_and_averages_characters_to_zero() {
        let rule = Su2::default().haar().unwrap();
        let mass: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        // ∫ Re tr(g) dg = ∫ 2w dg = 0, and ∫ w² dg = 1/4.
        let tr: f64 = rule.iter().map(|(q, w)| w * q[0]).sum();
        let sq: f64 = rule.iter().map(|(q, w)| w * q[0] * q[0]).sum();
        assert!(tr.abs() < 1e-12 && (sq - 0.25).abs() < 1e-12);
    }

    #[test]
    fn generators_match_the_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let acts: Vec<Box<dyn Action>> =
            vec![Box::new(HopfAction::default()), Box::new(Su2Adjoint::default()), Box::new(CircleOnTorus::default())];
        for a in &acts {
            let x = a.random_point(&mut rng);
            let xa = gaussian(a.group().dim(), &mut rng);
            let h = 1e-6;
            let plus = a.act(&a.group().exp(&xa.iter().map(|v| v * h).collect::<Vec<_>>()), &x);
            let minus = a.act(&a.group().exp(&xa.iter().map(|v| -v * h).collect::<Vec<_>>()), &x);
            let fd: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect();
            assert!(close(&fd, &a.generator(&xa, &x)) < 1e-8);
        }
    }

    #[test]
    fn hopf_tangent_frame_is_orthonormal_and_tangent() {
        let a = HopfAction::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = a.random_point(&mut rng);
        let b = a.tangent_basis(&x);
        for i in 0..3 {
            assert!(dot(&b[i], &x).abs() < 1e-14);
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&b[i], &b[j]) - e).abs() < 1e-14);
            }
        }
    }
}
