//! Truncated loop algebra `Lsu(2)`: the level-`k` cocycle `c`, the map `Z` on sampled loops
//! in `SU(2)`, the relation between them under `Ad_γ`, and a toy strongly equivariant
//! gerbe whose obstruction is carried by `c`.
//!
//! A loop `X(t) = Σ_{|m| ≤ M} X̂_m e^{imt}` is stored by its Fourier coefficients in
//! `sl(2, ℂ)`; reality is `X̂_{−m} = −X̂_m^†`. Pairings over `S¹` are evaluated exactly from the
//! coefficients, `∫_{S¹} Tr(X₁ X₂) dt = 2π Σ_m Tr(X̂₁_m X̂₂_{−m})`.

use crate::deligne::analytic::{FunctionBasis, Samples};
use crate::equivariant::lie::{obstruction, AnalyticGerbe, ObstructionClass};
use crate::error::{Error, Result};
use crate::forms::Form2;
use crate::group::{qexp, Translations};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

pub type Mat = Matrix2<Complex64>;

/// Ad-relation residual above which the grid is reported as too coarse.
pub const RESOLUTION_TOL: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `a + bi + cj + dk ↦ [[a + ib, c + id], [−c + id, a − ib]]`.
pub fn quaternion_matrix(q: &[f64]) -> Mat {
    Mat::new(
        Complex64::new(q[0], q[1]),
        Complex64::new(q[2], q[3]),
        Complex64::new(-q[2], q[3]),
        Complex64::new(q[0], -q[1]),
    )
}

/// The element `xᵢ i + x_j j + x_k k` of `su(2)`.
pub fn su2_matrix(x: &[f64]) -> Mat {
    quaternion_matrix(&[0.0, x[0], x[1], x[2]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopAlgebraElement {
    pub level: i64,
    /// `fourier[m + M]` is `X̂_m`.
    pub fourier: Vec<Mat>,
}

impl LoopAlgebraElement {
    pub fn truncation(&self) -> i64 {
        (self.fourier.len() as i64 - 1) / 2
    }

    pub fn mode(&self, m: i64) -> Mat {
        let big_m = self.truncation();
        if m.abs() > big_m {
            Mat::zeros()
        } else {
            self.fourier[(m + big_m) as usize]
        }
    }

    pub fn constant(level: i64, x: &[f64]) -> Self {
        Self { level, fourier: vec![su2_matrix(x)] }
    }

    /// `X(t) = a₀ + Σ_m (C_m cos mt + S_m sin mt)` with `a₀, C_m, S_m ∈ su(2)`.
    pub fn trig(level: i64, a0: &[f64], cos: &[[f64; 3]], sin: &[[f64; 3]]) -> Self {
        let big_m = cos.len().max(sin.len());
        let mut fourier = vec![Mat::zeros(); 2 * big_m + 1];
        fourier[big_m] = su2_matrix(a0);
        for m in 1..=big_m {
            let c = cos.get(m - 1).map(|v| su2_matrix(v)).unwrap_or_else(Mat::zeros);
            let s = sin.get(m - 1).map(|v| su2_matrix(v)).unwrap_or_else(Mat::zeros);
            fourier[big_m + m] = (c - s * I) * Complex64::new(0.5, 0.0);
            fourier[big_m - m] = (c + s * I) * Complex64::new(0.5, 0.0);
        }
        Self { level, fourier }
    }

    pub fn random(level: i64, big_m: usize, rng: &mut dyn RngCore) -> Self {
        let mut draw = || -> [f64; 3] { std::array::from_fn(|_| rng.gen_range(-1.0..1.0)) };
        let a0 = draw();
        let cos: Vec<[f64; 3]> = (0..big_m).map(|_| draw()).collect();
        let sin: Vec<[f64; 3]> = (0..big_m).map(|_| draw()).collect();
        Self::trig(level, &a0, &cos, &sin)
    }

    /// `max ‖X̂_{−m} + X̂_m^†‖` and `max |Tr X̂_m|`.
    pub fn reality_residual(&self) -> f64 {
        let big_m = self.truncation();
        (-big_m..=big_m)
            .map(|m| {
                let a = self.mode(m);
                (self.mode(-m) + a.adjoint()).norm().max(a.trace().norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn value_at(&self, t: f64) -> Mat {
        let big_m = self.truncation();
        (-big_m..=big_m).map(|m| self.mode(m) * Complex64::from_polar(1.0, m as f64 * t)).sum()
    }

    /// The pointwise bracket, by convolution of coefficients.
    pub fn bracket(&self, other: &Self) -> Self {
        let (a, b) = (self.truncation(), other.truncation());
        let big_m = a + b;
        let mut fourier = vec![Mat::zeros(); (2 * big_m + 1) as usize];
        for m in -a..=a {
            for n in -b..=b {
                let (x, y) = (self.mode(m), other.mode(n));
                fourier[(m + n + big_m) as usize] += x * y - y * x;
            }
        }
        Self { level: self.level, fourier }
    }

    pub fn add(&self, other: &Self) -> Self {
        let big_m = self.truncation().max(other.truncation());
        let fourier = (-big_m..=big_m).map(|m| self.mode(m) + other.mode(m)).collect();
        Self { level: self.level, fourier }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { level: self.level, fourier: self.fourier.iter().map(|a| a * Complex64::new(s, 0.0)).collect() }
    }

    /// Real coordinates on `a₀, (C_m, S_m)_{m ≤ M}`, three per `su(2)` element.
    pub fn coordinates(&self) -> Vec<f64> {
        let big_m = self.truncation();
        let su2 = |a: Mat| [a[(0, 0)].im, a[(0, 1)].re, a[(0, 1)].im];
        let mut out = su2(self.mode(0)).to_vec();
        for m in 1..=big_m {
            let (p, n) = (self.mode(m), self.mode(-m));
            out.extend(su2(p + n));
            out.extend(su2((n - p) * (-I)));
        }
        out
    }

    pub fn from_coordinates(level: i64, x: &[f64]) -> Self {
        let chunks: Vec<[f64; 3]> = x.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let cos: Vec<[f64; 3]> = chunks.iter().skip(1).step_by(2).copied().collect();
        let sin: Vec<[f64; 3]> = chunks.iter().skip(2).step_by(2).copied().collect();
        Self::trig(level, &chunks[0], &cos, &sin)
    }
}

/// `c(X₁, X₂) = −(k√−1/2π) ∫ Tr(X₁ dX₂) = −k Σ_m m Tr(X̂₁_m X̂₂_{−m})`, returned as `c/√−1`.
pub fn loop_cocycle_c(x1: &LoopAlgebraElement, x2: &LoopAlgebraElement) -> Result<f64> {
    if x1.level != x2.level {
        return Err(Error::LevelMismatch(x1.level, x2.level));
    }
    let big_m = x1.truncation().max(x2.truncation());
    let s: Complex64 = (-big_m..=big_m).map(|m| (x1.mode(m) * x2.mode(-m)).trace() * m as f64).sum();
    Ok((-(x1.level as f64) * s / I).re)
}

/// A loop in `SU(2)` sampled at `t_j = 2πj/N`.
#[derive(Clone, Debug)]
pub struct SampledLoop {
    pub values: Vec<Mat>,
}

fn fft_entries(values: &[Mat], inverse: bool) -> Vec<Mat> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut out = vec![Mat::zeros(); n];
    for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let mut buf: Vec<Complex64> = values.iter().map(|m| m[(r, c)]).collect();
        fft.process(&mut buf);
        for (o, b) in out.iter_mut().zip(buf) {
            o[(r, c)] = b;
        }
    }
    out
}

fn signed_mode(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl SampledLoop {
    /// Samples a loop given as a unit quaternion of `t`.
    pub fn from_quaternions(n: usize, f: impl Fn(f64) -> [f64; 4]) -> Self {
        Self { values: (0..n).map(|j| quaternion_matrix(&f(2.0 * PI * j as f64 / n as f64))).collect() }
    }

    /// `γ(t) = exp(t w·i) exp(Y(t))` with integer winding `w` and a trigonometric `Y`.
    pub fn random(n: usize, degree: usize, winding: i64, rng: &mut dyn RngCore) -> Self {
        let y = LoopAlgebraElement::random(0, degree, rng).scale(0.6);
        Self::from_quaternions(n, move |t| {
            let v = y.value_at(t);
            let x = [v[(0, 0)].im, v[(0, 1)].re, v[(0, 1)].im];
            crate::group::qmul(&qexp(&[winding as f64 * t, 0.0, 0.0]), &qexp(&x))
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fourier coefficients `(1/N) Σ_j v_j e^{−imt_j}` of pointwise values, indexed by signed mode.
    fn coefficients(values: &[Mat]) -> Vec<(i64, Mat)> {
        let n = values.len();
        let scale = Complex64::new(1.0 / n as f64, 0.0);
        fft_entries(values, false).into_iter().enumerate().map(|(j, a)| (signed_mode(j, n), a * scale)).collect()
    }

    /// `γ⁻¹ dγ/dt` by spectral differentiation.
    pub fn maurer_cartan(&self) -> Vec<Mat> {
        let n = self.len();
        let mut spec = fft_entries(&self.values, false);
        for (j, s) in spec.iter_mut().enumerate() {
            let m = signed_mode(j, n);
            let factor = if 2 * m.unsigned_abs() as usize == n { Complex64::new(0.0, 0.0) } else { I * m as f64 };
            *s *= factor / n as f64;
        }
        let d = fft_entries(&spec, true);
        self.values.iter().zip(d).map(|(g, dg)| g.adjoint() * dg).collect()
    }

    /// `Ad_γ X` as a loop-algebra element with all resolved modes.
    pub fn adjoint(&self, x: &LoopAlgebraElement) -> LoopAlgebraElement {
        let n = self.len();
        let pointwise: Vec<Mat> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, g)| g * x.value_at(2.0 * PI * j as f64 / n as f64) * g.adjoint())
            .collect();
        let big_m = (n / 2 - 1) as i64;
        let mut fourier = vec![Mat::zeros(); (2 * big_m + 1) as usize];
        for (m, a) in Self::coefficients(&pointwise) {
            if m.abs() <= big_m {
                fourier[(m + big_m) as usize] = a;
            }
        }
        LoopAlgebraElement { level: x.level, fourier }
    }
}

/// `Z(γ)(X) = (k√−1/2π) ∫ Tr(γ⁻¹dγ X)`, returned as `Z/√−1`.
pub fn loop_z(gamma: &SampledLoop, x: &LoopAlgebraElement) -> f64 {
    let coeffs = SampledLoop::coefficients(&gamma.maurer_cartan());
    let s: Complex64 = coeffs.iter().map(|(m, a)| (a * x.mode(-m)).trace()).sum();
    x.level as f64 * s.re
}

/// `|c(Ad_γX₁, Ad_γX₂) − c(X₁, X₂) − Z(γ)([X₁, X₂])|`.
pub fn ad_relation_residual(gamma: &SampledLoop, x1: &LoopAlgebraElement, x2: &LoopAlgebraElement) -> Result<f64> {
    let lhs = loop_cocycle_c(&gamma.adjoint(x1), &gamma.adjoint(x2))?;
    let rhs = loop_cocycle_c(x1, x2)? + loop_z(gamma, &x1.bracket(x2));
    let r = (lhs - rhs).abs();
    if r > RESOLUTION_TOL {
        return Err(Error::ResolutionError(r));
    }
    Ok(r)
}

/// `c(X₁, X₂) + c(X₂, X₁)` and `c([X₁,X₂],X₃) + c([X₂,X₃],X₁) + c([X₃,X₁],X₂)`.
pub fn cocycle_residuals(x: &[LoopAlgebraElement; 3]) -> Result<(f64, f64)> {
    let anti = (loop_cocycle_c(&x[0], &x[1])? + loop_cocycle_c(&x[1], &x[0])?).abs();
    let cyc = loop_cocycle_c(&x[0].bracket(&x[1]), &x[2])?
        + loop_cocycle_c(&x[1].bracket(&x[2]), &x[0])?
        + loop_cocycle_c(&x[2].bracket(&x[0]), &x[1])?;
    Ok((anti, cyc.abs()))
}

/// The matrix of `c` on the real coordinates of the level-`k`, truncation-`M` loop algebra.
pub fn cocycle_matrix(big_m: usize, level: i64) -> Vec<Vec<f64>> {
    let n = 3 * (2 * big_m + 1);
    let basis: Vec<LoopAlgebraElement> =
        (0..n).map(|a| LoopAlgebraElement::from_coordinates(level, &crate::group::unit(n, a))).collect();
    basis.iter().map(|x| basis.iter().map(|y| loop_cocycle_c(x, y).unwrap()).collect()).collect()
}

/// The truncated loop algebra acting on itself by translations, with the single-sheet
/// gerbe of curving `Im f = 2π c`; its pair is `E = c(X, ·)`, `ζ = 0`.
pub fn toy_loop_gerbe(big_m: usize, level: i64) -> AnalyticGerbe {
    let n = 3 * (2 * big_m + 1);
    let c = Arc::new(cocycle_matrix(big_m, level));
    let f: Form2 = Arc::new(move |_x, u, v| {
        2.0 * PI * (0..n).map(|a| (0..n).map(|b| u[a] * c[a][b] * v[b]).sum::<f64>()).sum::<f64>()
    });
    AnalyticGerbe::single_sheet(Arc::new(Translations::new(n)), f)
}

/// The obstruction of [`toy_loop_gerbe`] against affine `μ`.
pub fn toy_loop_obstruction(big_m: usize, level: i64, seed: u64) -> Result<ObstructionClass> {
    let eg = toy_loop_gerbe(big_m, level);
    let n = 3 * (2 * big_m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = Samples::random(eg.action.as_ref(), 24, 6, &mut rng);
    obstruction(&eg, &FunctionBasis::polynomial(n, 1), &samples, false)
}
