//! Quadrature rules: Gauss–Legendre on intervals and radially projected icospheres for
//! 2-forms on `S²`.

use gauss_quad::legendre::GaussLegendre;
use std::collections::HashMap;
use std::num::NonZeroUsize;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (m + h * x, h * w)).collect()
}

/// Orientation of `S²` used when integrating 2-forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `(u, v)` is positive when `u × v` points away from the origin.
    Outward,
    Inward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

/// An icosphere: vertices on the unit sphere, faces ordered counterclockwise seen from outside.
#[derive(Clone, Debug)]
pub struct Icosphere {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl Icosphere {
    pub fn new(level: usize) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let mut vertices: Vec<[f64; 3]> = raw.iter().map(|&p| normalize(p)).collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            let mut midpoint = |a: usize, b: usize, vs: &mut Vec<[f64; 3]>| -> usize {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let (p, q) = (vs[a], vs[b]);
                    vs.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    vs.len() - 1
                })
            };
            for &[a, b, c] in &faces {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        for f in &mut faces {
            let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
            let n = crate::group::cross(&sub(b, a), &sub(c, a));
            if n[0] * (a[0] + b[0] + c[0]) + n[1] * (a[1] + b[1] + c[1]) + n[2] * (a[2] + b[2] + c[2]) < 0.0 {
                f.swap(1, 2);
            }
        }
        Self { vertices, faces }
    }

    /// `∫_{S²} ω` for a 2-form given pointwise as `ω(p; u, v)` with `p` on the unit sphere
    /// and `u, v ∈ T_pS²`. Each flat face is projected radially and integrated with the
    /// 7-point degree-5 rule in the face parameters.
    pub fn integrate_2form<F>(&self, orientation: Orientation, omega: F) -> f64
    where
        F: Fn(&[f64; 3], &[f64; 3], &[f64; 3]) -> f64,
    {
        const A1: f64 = 0.059_715_871_789_770;
        const B1: f64 = 0.470_142_064_105_115;
        const W1: f64 = 0.132_394_152_788_506;
        const A2: f64 = 0.797_426_985_353_087;
        const B2: f64 = 0.101_286_507_323_456;
        const W2: f64 = 0.125_939_180_544_827;
        let rule: [(f64, f64, f64); 7] = [
            (1.0 / 3.0, 1.0 / 3.0, 0.225),
            (B1, B1, W1),
            (A1, B1, W1),
            (B1, A1, W1),
            (B2, B2, W2),
            (A2, B2, W2),
            (B2, A2, W2),
        ];
        let mut total = 0.0;
        for f in &self.faces {
            let (a, b, c) = (self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]);
            let (eb, ec) = (sub(b, a), sub(c, a));
            let mut face = 0.0;
            for &(s, t, w) in &rule {
                let x = [a[0] + s * eb[0] + t * ec[0], a[1] + s * eb[1] + t * ec[1], a[2] + s * eb[2] + t * ec[2]];
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let p = [x[0] / r, x[1] / r, x[2] / r];
                let tangent = |e: [f64; 3]| {
                    let pe = p[0] * e[0] + p[1] * e[1] + p[2] * e[2];
                    [(e[0] - pe * p[0]) / r, (e[1] - pe * p[1]) / r, (e[2] - pe * p[2]) / r]
                };
                face += w * omega(&p, &tangent(eb), &tangent(ec));
            }
            total += 0.5 * face;
        }
        orientation.sign() * total
    }
}
