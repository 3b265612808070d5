//! The ten acceptance criteria. Each prints one PASS/FAIL line; the binary exits nonzero
//! if any criterion fails.

use gerbekit::deligne::analytic::{phi_psi_residual, random_su2_z, random_torus_z, Samples};
use gerbekit::deligne::{DeligneComplex, Parts};
use gerbekit::error::Error;
use gerbekit::group::{Action, CircleOnTorus, Su2Adjoint};
use gerbekit::models::hopf::{curvature_bar, euler_period, hopf_reduction, HopfModel};
use gerbekit::models::lens::{compare_local_data_choices, LensModel};
use gerbekit::models::loops::{ad_relation_residual, loop_cocycle_c, LoopAlgebraElement, SampledLoop};
use gerbekit::models::su2::su2_chi_period;
use gerbekit::quadrature::Orientation;
use gerbekit::reduction::analytic::{compare_lambda_choices, descent_residuals, kappa_form, reduce_pseudo_bundle, PseudoBundle};
use gerbekit::simplicial::{hexagon_arc_cover, icosahedron, sphere_boundary_of_simplex, GroupTable};
use gerbekit::cover::CoverModel;
use gerbekit::smith::integer_cohomology;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hopf_triviality() -> Outcome {
    let start = Instant::now();
    let mut report = Vec::new();
    let mut ok = true;
    for (r, trivial) in [(-3.0, true), (0.0, true), (1.0, true), (2.0, true), (0.5, false), (1.25, false)] {
        let red = hopf_reduction(r, 5, 0).map_err(|e| e.to_string())?;
        let d = (red.period - red.period.round()).abs();
        let verdict_ok = if trivial { d < 1e-3 } else { d > 1e-2 };
        ok &= verdict_ok && red.trivial() == Some(trivial);
        report.push(format!("r={r}: period {:.6}", red.period));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(ok && secs < 10.0, format!("{} in {secs:.2}s", report.join(", ")))
}

fn euler_class_period() -> Outcome {
    let start = Instant::now();
    let p = euler_period(6, Orientation::Outward);
    let secs = start.elapsed().as_secs_f64();
    ensure((p.abs() - 1.0).abs() < 1e-5 && secs < 5.0, format!("period {p:.9} in {secs:.2}s"))
}

fn lambda_choices() -> Outcome {
    let model = HopfModel::new(4);
    let (samples, _) = model.samples(10, 1);
    let eg = model.trivial_gerbe();
    let pairs =
        [(0.0, 1.0), (0.5, -1.5), (0.25, 3.25), (-2.0, 1.0), (0.7, 0.7), (0.0, 0.5), (0.1, 0.4), (1.0, 2.75), (-0.3, 0.3), (2.5, 2.0)];
    let mut wrong = Vec::new();
    for (r, r2) in pairs {
        let expect = ((r2 - r) as f64).fract() == 0.0;
        let cmp = compare_lambda_choices(&eg, &HopfModel::lambda(r), &HopfModel::lambda(r2), &model.xi, &model.charts, &samples)
            .map_err(|e| e.to_string())?;
        if cmp.stably_isomorphic() != Some(expect) {
            wrong.push(format!("({r}, {r2})"));
        }
    }
    ensure(wrong.is_empty(), format!("10 pairs, mismatches: [{}]", wrong.join(", ")))
}

fn descent_contractions() -> Outcome {
    let model = HopfModel::new(0);
    let (samples, _) = model.samples(500, 2);
    let eg = model.trivial_gerbe();
    let kappa = kappa_form(&eg, &HopfModel::lambda(1.5), &model.xi, &samples).map_err(|e| e.to_string())?;
    let (c, f) = descent_residuals(&eg, &kappa, &samples);
    ensure(c < 1e-9 && f < 1e-9, format!("ι(∇−δκ) {c:.2e}, ι(f−dκ) {f:.2e} over 500 points"))
}

fn chi_periods() -> Outcome {
    let got: Vec<f64> = [1, 2, 5].iter().map(|&k| su2_chi_period(k)).collect();
    let ok = got.iter().zip([1.0, 2.0, 5.0]).all(|(p, k)| (p - k).abs() < 1e-3);
    ensure(ok, format!("∫χ for k=1,2,5: {got:.6?}"))
}

fn loop_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut anti, mut cyc): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let x: Vec<LoopAlgebraElement> = (0..3).map(|_| LoopAlgebraElement::random(2, 3, &mut rng)).collect();
        let c = |a: &LoopAlgebraElement, b: &LoopAlgebraElement| loop_cocycle_c(a, b).unwrap();
        anti = anti.max((c(&x[0], &x[1]) + c(&x[1], &x[0])).abs());
        let cyclic = c(&x[0].bracket(&x[1]), &x[2]) + c(&x[1].bracket(&x[2]), &x[0]) + c(&x[2].bracket(&x[0]), &x[1]);
        cyc = cyc.max(cyclic.abs());
    }
    let mut ad: f64 = 0.0;
    for _ in 0..20 {
        let winding = rng.gen_range(-2..=2);
        let g = SampledLoop::random(2048, 2, winding, &mut rng);
        let x1 = LoopAlgebraElement::random(2, 3, &mut rng);
        let x2 = LoopAlgebraElement::random(2, 3, &mut rng);
        ad = ad.max(ad_relation_residual(&g, &x1, &x2).map_err(|e| e.to_string())?);
    }
    ensure(anti < 1e-12 && cyc < 1e-12 && ad < 1e-8, format!("antisymmetry {anti:.1e}, cocycle {cyc:.1e}, Ad relation {ad:.1e}"))
}

fn algebraic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (k, sets) = hexagon_arc_cover();
    let hexagon =
        CoverModel::new(k, GroupTable::generated_by(6, &[(0..6).map(|i| (i + 2) % 6).collect()]).unwrap(), sets).unwrap();
    let y = LensModel::new(3).unwrap().sheets(2).unwrap();
    let small = DeligneComplex::new(&hexagon, 1);
    let big = DeligneComplex::new(&y.model, 2);
    let mut nonzero = [0usize; 4];
    for t in 0..100 {
        let cx = if t % 25 == 0 { &big } else { &small };
        let c = cx.random(t % 3, &mut rng);
        for (slot, parts) in [(0, Parts::ALL), (1, Parts::GROUP), (2, Parts::CECH)] {
            let once = cx.d_parts(&c, parts).unwrap();
            if !cx.support(&cx.d_parts(&once, parts).unwrap()).is_empty() {
                nonzero[slot] += 1;
            }
        }
        let deg = t % 3;
        let f = y.random(t % 2, deg, deg == 0 && t % 4 == 1, &mut rng);
        if !y.is_zero(&y.delta(&y.delta(&f))) {
            nonzero[3] += 1;
        }
    }
    let torus: Arc<dyn Action> = Arc::new(CircleOnTorus::default());
    let su2: Arc<dyn Action> = Arc::new(Su2Adjoint::default());
    let mut phi_psi: f64 = 0.0;
    for t in 0..10 {
        let (act, ez) = if t < 5 { (&torus, random_torus_z(&mut rng).0) } else { (&su2, random_su2_z(&mut rng)) };
        let s = Samples::random(act.as_ref(), 8, 4, &mut rng);
        phi_psi = phi_psi.max(phi_psi_residual(act, &ez, &s, &mut rng).map_err(|e| e.to_string())?);
    }
    ensure(
        nonzero == [0; 4] && phi_psi < 1e-12,
        format!("nonzero D∘D/∂∂/δ̌δ̌/δδ out of 100: {nonzero:?}, Φ∘Ψ residual {phi_psi:.1e}"),
    )
}

fn cohomology_groups() -> Outcome {
    let s2 = integer_cohomology(&icosahedron().0, 2).to_string();
    let s2b = integer_cohomology(&sphere_boundary_of_simplex(3), 2).to_string();
    let lens = LensModel::new(3).unwrap();
    let h2 = lens.cohomology(2).unwrap().to_string();
    let h3 = lens.cohomology(3).unwrap().to_string();
    ensure(
        s2 == "Z" && s2b == "Z" && h2 == "Z/3" && h3 == "Z",
        format!("H²(S²) = {s2} (= {s2b}), H²(L(3,1)) = {h2}, H³(L(3,1)) = {h3}"),
    )
}

fn local_data_choices() -> Outcome {
    let lens = LensModel::new(3).unwrap();
    let eg = lens.gerbe(2, Some(5)).unwrap();
    let cmp = compare_local_data_choices(&eg, 6).map_err(|e| e.to_string())?;
    let cx = DeligneComplex::new(&eg.sheets().model, 2);
    let exact = cx.equal(&cmp.second, &cx.add(&cmp.first, &cx.d(&cmp.witness).unwrap()));
    let distinct = !cx.equal(&cmp.first, &cmp.second);
    ensure(exact && cmp.choices_differ, format!("c′ = c + D(witness) exactly: {exact}; cocycles differ: {distinct}"))
}

fn pseudo_bundle_reduction() -> Outcome {
    let start = Instant::now();
    let model = HopfModel::new(0);
    let (samples, base) = model.samples(30, 7);
    let eg = model.trivial_gerbe();
    let f_xi = curvature_bar(&model.charts);
    let mut worst: f64 = 0.0;
    let mut reduces = true;
    for r in [0.75, 1.5] {
        let xi = model.xi.components[0].clone();
        let pb = PseudoBundle { eta: vec![Arc::new(move |x: &[f64], v: &[f64]| r * xi(x, v))] };
        match reduce_pseudo_bundle(&eg, &pb, &HopfModel::lambda(r), &model.xi, &model.charts, &samples, &base) {
            Ok(red) => {
                for p in &base {
                    let b = model.charts.base_tangent_basis(p);
                    worst = worst.max(((red.curvature)(p, &b[0], &b[1]) - r * f_xi(p, &b[0], &b[1])).abs());
                }
            }
            Err(_) => reduces = false,
        }
    }
    let xi = model.xi.components[0].clone();
    let pb = PseudoBundle { eta: vec![Arc::new(move |x: &[f64], v: &[f64]| 0.75 * xi(x, v))] };
    let rejected = match reduce_pseudo_bundle(&eg, &pb, &HopfModel::lambda(1.25), &model.xi, &model.charts, &samples, &base) {
        Err(Error::MomentMismatch { mu }) => mu.iter().any(|m| m.abs() > 1e-9),
        _ => false,
    };
    let secs = start.elapsed().as_secs_f64();
    ensure(
        reduces && worst < 1e-9 && rejected && secs < 5.0,
        format!("reduces: {reduces}, max |F(η̄) − r·F(Ξ)| = {worst:.3e}, mismatched λ rejected: {rejected}, {secs:.2}s"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Hopf reduction triviality", hopf_triviality),
        ("Euler class period", euler_class_period),
        ("λ choices and stable isomorphism", lambda_choices),
        ("descent contractions vanish", descent_contractions),
        ("SU(2) χ periods", chi_periods),
        ("loop algebra cocycle and Ad relation", loop_algebra),
        ("algebraic identities", algebraic_identities),
        ("integer cohomology", cohomology_groups),
        ("local-data choices are D-cohomologous", local_data_choices),
        ("pseudo-bundle reduction", pseudo_bundle_reduction),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
