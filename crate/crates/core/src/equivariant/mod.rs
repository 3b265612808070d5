//! Strongly equivariant gerbes.
//!
//! On the exact backend the group is finite and acts on the sheets through its action on
//! cover indices. The lift of `g` to `P` maps the fibre over `y⃗` to the fibre over `g y⃗`;
//! in the per-component trivializations it is multiplication by a circle function
//! `χ_g` on `Y^[2]`. Invariance of `s`, `∇` and `f` then reads
//!
//! `g*s_{g·} = s + δχ_g`,  `g*A_{g·} + dχ_g = A`,  `g*F_{g·} = F`,
//!
//! and the lifts compose when `χ_{gh} = χ_h + h*χ_g`.
//!
//! The Lie-group side (moments, the λ-solver and the pair `(E, ζ)`) lives in [`lie`].

pub mod lie;

use crate::cover::CoverModel;
use crate::error::{Error, Result};
use crate::gerbe::{SheetGerbe, Sheets, YForm};
use crate::simplicial::sort_with_sign;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Debug)]
pub struct StrongEquivariantGerbe {
    pub gerbe: SheetGerbe,
    /// `chi[g]`, circle-valued on `Y^[2]`.
    pub chi: Vec<YForm>,
}

/// Residuals of the equivariance conditions, maximized over group elements.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceCheck {
    pub section: f64,
    pub connection: f64,
    pub curving: f64,
    pub composition: f64,
}

impl EquivarianceCheck {
    pub fn ok(&self) -> bool {
        self.section == 0.0 && self.connection == 0.0 && self.curving == 0.0 && self.composition == 0.0
    }
}

impl StrongEquivariantGerbe {
    pub fn new(gerbe: SheetGerbe, chi: Vec<YForm>) -> Result<Self> {
        if chi.len() != gerbe.sheets.model.order() {
            return Err(Error::NotEquivariant(format!("{} lifts for a group of order {}", chi.len(), gerbe.sheets.model.order())));
        }
        let eg = Self { gerbe, chi };
        let c = eg.check();
        if !c.ok() {
            return Err(Error::NotEquivariant(format!("{c:?}")));
        }
        eg.gerbe.validate()?;
        Ok(eg)
    }

    /// Invariant data with the tautological lift `χ = 0`.
    pub fn with_trivial_lift(gerbe: SheetGerbe) -> Result<Self> {
        let chi = vec![YForm::zero(2, 0, true); gerbe.sheets.model.order()];
        Self::new(gerbe, chi)
    }

    pub fn trivial(sheets: Sheets) -> Self {
        let chi = vec![YForm::zero(2, 0, true); sheets.model.order()];
        Self { gerbe: SheetGerbe::trivial(sheets), chi }
    }

    /// The equivariant gerbe of the group average `Σ_g g*e` of an integer Čech 3-cochain.
    pub fn from_averaged_cocycle(sheets: Sheets, e: &[BigInt]) -> Result<Self> {
        let n = average_cech(&sheets.model, 3, e);
        Self::with_trivial_lift(SheetGerbe::from_integer_cocycle(sheets, &n)?)
    }

    pub fn sheets(&self) -> &Sheets {
        &self.gerbe.sheets
    }

    pub fn check(&self) -> EquivarianceCheck {
        let y = self.sheets();
        let g = &self.gerbe;
        let mut out = EquivarianceCheck { section: 0.0, connection: 0.0, curving: 0.0, composition: 0.0 };
        let order = y.model.order();
        for a in 0..order {
            let chi = &self.chi[a];
            let ds = y.sub(&y.pullback(a, &g.s), &y.add(&g.s, &y.delta(chi)));
            out.section = out.section.max(y.max_abs(&ds));
            let da = y.sub(&y.add(&y.pullback(a, &g.a), &y.d(chi)), &g.a);
            out.connection = out.connection.max(y.max_abs(&da));
            out.curving = out.curving.max(y.max_abs(&y.sub(&y.pullback(a, &g.f), &g.f)));
            for b in 0..order {
                let ab = y.model.group.mul(a, b);
                let rhs = y.add(&self.chi[b], &y.pullback(b, chi));
                out.composition = out.composition.max(y.max_abs(&y.sub(&self.chi[ab], &rhs)));
            }
        }
        out
    }

    /// Gauge change by `φ` on `Y^[2]`, transporting the lift: `χ_g + g*φ − φ`.
    pub fn gauge(&self, phi: &YForm) -> Self {
        let y = self.sheets();
        let chi = (0..self.chi.len())
            .map(|g| y.add(&self.chi[g], &y.sub(&y.pullback(g, phi), phi)))
            .collect();
        Self { gerbe: self.gerbe.gauge(phi), chi }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let y = self.sheets();
        Self {
            gerbe: self.gerbe.tensor(&other.gerbe),
            chi: self.chi.iter().zip(&other.chi).map(|(a, b)| y.add(a, b)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let y = self.sheets();
        Self { gerbe: self.gerbe.inverse(), chi: self.chi.iter().map(|c| y.neg(c)).collect() }
    }
}

/// `Σ_g g*e` for an alternating integer cochain on the nerve, `(g*e)(τ) = ±e(gτ)`.
pub fn average_cech(model: &CoverModel, j: usize, e: &[BigInt]) -> Vec<BigInt> {
    let nerve = &model.nerve;
    let mut out = vec![BigInt::zero(); nerve.count(j)];
    for (t, tau) in nerve.simplices(j).iter().enumerate() {
        for g in 0..model.order() {
            let img: Vec<usize> = tau.iter().map(|&a| model.index_perm[g][a]).collect();
            let (sign, sorted) = sort_with_sign(&img).expect("group permutes cover indices");
            out[t] += &e[nerve.index_of(&sorted).unwrap()] * sign;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{lens_join, SimplicialGroupAction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn lens_sheets() -> Sheets {
        let (k, gen) = lens_join(3, 1);
        let act = SimplicialGroupAction::new(&k, &[gen], Some(3)).unwrap();
        Sheets::new(Arc::new(CoverModel::star_cover(&k, &act).unwrap()), 1)
    }

    #[test]
    fn averaged_generator_is_equivariant_and_gauge_keeps_it_so() {
        let y = lens_sheets();
        let mut e = vec![BigInt::zero(); y.model.nerve.count(3)];
        e[0] = BigInt::from(1);
        let eg = StrongEquivariantGerbe::from_averaged_cocycle(y.clone(), &e).unwrap();
        assert!(eg.check().ok());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = y.to_circle(&y.random(2, 0, false, &mut rng));
        let eg2 = eg.gauge(&phi);
        assert!(eg2.check().ok(), "{:?}", eg2.check());
        assert!(eg2.gerbe.check().ok());
        assert!(!y.is_zero(&eg2.chi[1]));
    }

    #[test]
    fn non_invariant_data_is_rejected() {
        let y = lens_sheets();
        let mut e = vec![BigInt::zero(); y.model.nerve.count(3)];
        e[0] = BigInt::from(1);
        let g = SheetGerbe::from_integer_cocycle(y, &e).unwrap();
        assert!(matches!(StrongEquivariantGerbe::with_trivial_lift(g), Err(Error::NotEquivariant(_))));
    }
}
