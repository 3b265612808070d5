//! Real differential forms on an open subset of `ℝⁿ` as pointwise evaluators, with the
//! exterior derivative by central differences along constant fields.
//!
//! Imaginary-valued forms (connections, curvings) are stored by their imaginary part.

use crate::deligne::analytic::{derivative, FD_STEP};
use std::sync::Arc;

pub type Function = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type Form1 = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type Form2 = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync>;
pub type Form3 = Arc<dyn Fn(&[f64], &[f64], &[f64], &[f64]) -> f64 + Send + Sync>;

pub(crate) fn shifted(x: &[f64], t: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

pub fn zero1() -> Form1 {
    Arc::new(|_, _| 0.0)
}

pub fn zero2() -> Form2 {
    Arc::new(|_, _, _| 0.0)
}

pub fn d0(f: &Function) -> Form1 {
    let f = f.clone();
    Arc::new(move |x, v| derivative(|t| f(&shifted(x, t, v)), FD_STEP))
}

/// `dα(u, v) = D_u α(v) − D_v α(u)`.
pub fn d1(a: &Form1) -> Form2 {
    let a = a.clone();
    Arc::new(move |x, u, v| {
        derivative(|t| a(&shifted(x, t, u), v), FD_STEP) - derivative(|t| a(&shifted(x, t, v), u), FD_STEP)
    })
}

/// `dω(u, v, w) = D_u ω(v, w) − D_v ω(u, w) + D_w ω(u, v)`.
pub fn d2(w: &Form2) -> Form3 {
    let w = w.clone();
    Arc::new(move |x, a, b, c| {
        derivative(|t| w(&shifted(x, t, a), b, c), FD_STEP) - derivative(|t| w(&shifted(x, t, b), a, c), FD_STEP)
            + derivative(|t| w(&shifted(x, t, c), a, b), FD_STEP)
    })
}

pub fn add1(a: &Form1, b: &Form1, c: f64) -> Form1 {
    let (a, b) = (a.clone(), b.clone());
    Arc::new(move |x, v| a(x, v) + c * b(x, v))
}

pub fn add2(a: &Form2, b: &Form2, c: f64) -> Form2 {
    let (a, b) = (a.clone(), b.clone());
    Arc::new(move |x, u, v| a(x, u, v) + c * b(x, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_of_d_vanishes_numerically() {
        let f: Function = Arc::new(|x| (x[0] * x[1]).sin() + x[2].powi(3) * x[0]);
        let ddf = d1(&d0(&f));
        let a: Form1 = Arc::new(|x, v| x[1] * x[2] * v[0] + (x[0] * x[1]).cos() * v[2]);
        let dda = d2(&d1(&a));
        let (x, u, v, w) = ([0.3, -0.7, 1.1], [1.0, 0.2, -0.5], [0.0, 1.0, 0.4], [0.3, 0.3, 1.0]);
        assert!(ddf(&x, &u, &v).abs() < 1e-6);
        assert!(dda(&x, &u, &v, &w).abs() < 1e-6);
    }

    #[test]
    fn d_of_a_linear_form() {
        // α = x dy has dα = dx ∧ dy.
        let a: Form1 = Arc::new(|x, v| x[0] * v[1]);
        let da = d1(&a);
        assert!((da(&[0.4, 2.0], &[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-10);
        assert!((da(&[0.4, 2.0], &[0.0, 1.0], &[1.0, 0.0]) + 1.0).abs() < 1e-10);
    }
}
