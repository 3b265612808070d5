//! Small explicit triangulations used by tests, the CLI and the model registry.

use super::{Simplex, SimplicialComplex};

/// Boundary of an `n`-gon, a triangulated circle.
pub fn circle(n: usize) -> SimplicialComplex {
    assert!(n >= 3);
    let edges: Vec<Simplex> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    SimplicialComplex::from_facets(n, &edges).unwrap()
}

/// Boundary of the standard `d`-simplex, a triangulated `(d-1)`-sphere.
pub fn sphere_boundary_of_simplex(d: usize) -> SimplicialComplex {
    let facets: Vec<Simplex> = (0..=d)
        .map(|skip| (0..=d).filter(|&v| v != skip).collect())
        .collect();
    SimplicialComplex::from_facets(d + 1, &facets).unwrap()
}

/// Icosahedral 2-sphere together with the antipodal vertex permutation.
pub fn icosahedron() -> (SimplicialComplex, Vec<usize>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for &a in &[1.0, -1.0] {
        for &b in &[phi, -phi] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    let d2 = |p: &[f64; 3], q: &[f64; 3]| (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>();
    let adjacent = |i: usize, j: usize| (d2(&pts[i], &pts[j]) - 4.0).abs() < 1e-9;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    faces.push(vec![i, j, k]);
                }
            }
        }
    }
    let antipode: Vec<usize> = (0..12)
        .map(|i| {
            let neg = [-pts[i][0], -pts[i][1], -pts[i][2]];
            (0..12).find(|&j| d2(&pts[j], &neg) < 1e-9).unwrap()
        })
        .collect();
    (SimplicialComplex::from_facets(12, &faces).unwrap(), antipode)
}

/// Simplicial join; vertices of `b` are shifted by `a.n_vertices()`.
pub fn join(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    let off = a.n_vertices();
    let mut facets: Vec<Simplex> = Vec::new();
    for s in a.facets() {
        for t in b.facets() {
            let mut u = s.clone();
            u.extend(t.iter().map(|v| v + off));
            facets.push(u);
        }
    }
    SimplicialComplex::from_facets(off + b.n_vertices(), &facets).unwrap()
}

/// The 3-sphere as the join of two `2n`-gons, with the vertex permutation generating the
/// ℤ/n action `(z, w) ↦ (ζz, ζ^q w)`. The quotient is the lens space L(n, q).
pub fn lens_join(n: usize, q: usize) -> (SimplicialComplex, Vec<usize>) {
    assert!(n >= 2);
    let m = 2 * n;
    let c = circle(m);
    let k = join(&c, &c);
    let gen: Vec<usize> = (0..m)
        .map(|i| (i + 2) % m)
        .chain((0..m).map(|i| m + (i + 2 * q) % m))
        .collect();
    (k, gen)
}

/// Three arcs covering the hexagon, the standard example of a cover with circular nerve.
pub fn hexagon_arc_cover() -> (SimplicialComplex, Vec<Vec<usize>>) {
    (circle(6), vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]])
}
