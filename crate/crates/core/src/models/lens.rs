//! The lens space `L(n, 1) = S³/(ℤ/n)` as a free simplicial action on a join of two
//! polygons, with the averaged strongly equivariant gerbe used throughout the exact backend.

use crate::cover::CoverModel;
use crate::deligne::{DeligneComplex, TriGradedCochain};
use crate::equivariant::StrongEquivariantGerbe;
use crate::error::Result;
use crate::gerbe::local_data::{change_of_choices_witness, LocalData, LocalDataChoices};
use crate::gerbe::Sheets;
use crate::rational::Q;
use crate::simplicial::{lens_join, quotient_complex, ActionFile, ComplexFile, Quotient, SimplicialComplex, SimplicialGroupAction};
use crate::smith::{integer_cohomology, AbelianGroupPresentation};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct LensModel {
    pub n: usize,
    pub sphere: SimplicialComplex,
    pub action: SimplicialGroupAction,
    pub generator: Vec<usize>,
}

impl LensModel {
    pub fn new(n: usize) -> Result<Self> {
        let (sphere, generator) = lens_join(n, 1);
        let action = SimplicialGroupAction::new(&sphere, std::slice::from_ref(&generator), Some(n))?;
        Ok(Self { n, sphere, action, generator })
    }

    pub fn quotient(&self) -> Result<Quotient> {
        quotient_complex(&self.sphere, &self.action)
    }

    pub fn cohomology(&self, degree: usize) -> Result<AbelianGroupPresentation> {
        Ok(integer_cohomology(&self.quotient()?.complex, degree))
    }

    /// The upstairs sphere with its action, as a JSON complex file.
    pub fn complex_file(&self) -> ComplexFile {
        ComplexFile::from_complex(&self.sphere, Some(ActionFile { order: self.n, generator: self.generator.clone() }))
    }

    pub fn sheets(&self, copies: usize) -> Result<Sheets> {
        Ok(Sheets::new(Arc::new(CoverModel::star_cover(&self.sphere, &self.action)?), copies))
    }

    /// The gerbe from the group average of the integer 3-cocycle supported on the first
    /// 3-simplex, optionally gauged by a random circle function.
    pub fn gerbe(&self, copies: usize, gauge_seed: Option<u64>) -> Result<StrongEquivariantGerbe> {
        let y = self.sheets(copies)?;
        let mut e = vec![BigInt::zero(); self.sphere.count(3)];
        e[0] = BigInt::from(1);
        let eg = StrongEquivariantGerbe::from_averaged_cocycle(y.clone(), &e)?;
        Ok(match gauge_seed {
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                eg.gauge(&y.to_circle(&y.random(2, 0, false, &mut rng)))
            }
            None => eg,
        })
    }
}

/// Class cocycles for two local-data choices and the witness relating them.
#[derive(Clone, Debug)]
pub struct ChoiceComparison {
    pub first: TriGradedCochain,
    pub second: TriGradedCochain,
    pub witness: TriGradedCochain,
    /// `c′ = c + D(witness)` holds exactly.
    pub cohomologous: bool,
    pub choices_differ: bool,
}

pub fn compare_local_data_choices(eg: &StrongEquivariantGerbe, seed: u64) -> Result<ChoiceComparison> {
    let y = eg.sheets().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ld = LocalData::build(eg, LocalDataChoices::random(&y, &mut rng))?;
    let ld2 = LocalData::build(eg, LocalDataChoices::random(&y, &mut rng))?;
    let first = ld.class_cocycle(eg)?;
    let second = ld2.class_cocycle(eg)?;
    let varrho: Vec<Vec<Q>> = (0..y.model.sets.len())
        .map(|a| (0..y.model.domain(0, a).count(0)).map(|i| Q::new(((i as i64 * 7 + a as i64) % 11).into(), 13.into())).collect())
        .collect();
    let witness = change_of_choices_witness(eg, &ld, &ld2, &varrho)?;
    let cx = DeligneComplex::new(&y.model, 2);
    let cohomologous = cx.equal(&second, &cx.add(&first, &cx.d(&witness)?));
    Ok(ChoiceComparison { first, second, witness, cohomologous, choices_differ: ld.choices != ld2.choices })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens3_cohomology_and_file_round_trip() {
        let m = LensModel::new(3).unwrap();
        assert_eq!(m.cohomology(2).unwrap().to_string(), "Z/3");
        assert_eq!(m.cohomology(3).unwrap().to_string(), "Z");
        let f = ComplexFile::parse(&m.complex_file().to_json()).unwrap();
        assert_eq!(f.complex().unwrap().facets().len(), m.sphere.facets().len());
    }

    #[test]
    fn local_data_choices_are_cohomologous() {
        let m = LensModel::new(3).unwrap();
        let eg = m.gerbe(2, Some(4)).unwrap();
        let cmp = compare_local_data_choices(&eg, 9).unwrap();
        assert!(cmp.choices_differ && cmp.cohomologous);
    }
}
