use super::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Nerve of a family of vertex sets: a k-simplex for every (k+1) sets with a common vertex.
pub fn nerve(cover: &[Vec<usize>]) -> Result<SimplicialComplex> {
    if let Some(i) = cover.iter().position(|s| s.is_empty()) {
        return Err(Error::InvalidCover(format!("cover set {i} is empty")));
    }
    let sets: Vec<BTreeSet<usize>> = cover.iter().map(|s| s.iter().copied().collect()).collect();
    let mut layer: Vec<(Simplex, BTreeSet<usize>)> =
        sets.iter().enumerate().map(|(i, s)| (vec![i], s.clone())).collect();
    let mut all: Vec<Simplex> = Vec::new();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (s, common) in &layer {
            all.push(s.clone());
            for j in s.last().unwrap() + 1..sets.len() {
                let meet: BTreeSet<usize> = common.intersection(&sets[j]).copied().collect();
                if !meet.is_empty() {
                    let mut t = s.clone();
                    t.push(j);
                    next.push((t, meet));
                }
            }
        }
        layer = next;
    }
    SimplicialComplex::from_closed(cover.len(), &all)
}

/// For a refinement (every fine set inside some coarse set), a vertex map from the fine
/// nerve to the coarse nerve choosing the first containing coarse set.
pub fn refinement_map(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> Result<Vec<usize>> {
    fine.iter()
        .enumerate()
        .map(|(i, f)| {
            coarse
                .iter()
                .position(|c| f.iter().all(|v| c.contains(v)))
                .ok_or_else(|| Error::InvalidCover(format!("fine set {i} lies in no coarse set")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::hexagon_arc_cover;

    #[test]
    fn hexagon_arcs_give_triangle_boundary() {
        let (_, cover) = hexagon_arc_cover();
        let n = nerve(&cover).unwrap();
        assert_eq!(n.simplices(1), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(n.count(2), 0);
    }

    #[test]
    fn single_set_and_disjoint_sets() {
        let one = nerve(&[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!((one.count(0), one.dim()), (1, 0));
        let two = nerve(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!((two.count(0), two.count(1)), (2, 0));
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(nerve(&[vec![0], vec![]]), Err(Error::InvalidCover(_))));
    }
}
