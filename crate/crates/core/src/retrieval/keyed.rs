use std::collections::HashSet;

use super::{ContentRequest, DecodingSolution};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::storage::ReconstructionGroup;

/// Chooses the last member's local decoding vector (the key selector) for
/// `request`: the first vector, in a fixed enumeration of all valid choices,
/// that is non-zero and not in `exclude`.
///
/// A selector `s` is valid when `e_r + V_last s` lies in the span of the
/// other members' columns, i.e. when the rest of the group can finish the
/// decoding. Working modulo that span, validity is the linear system
/// `R s = res(e_r)` where `R` holds the residuals of the last member's columns.
pub fn select_key(group: &ReconstructionGroup, request: &ContentRequest, exclude: &HashSet<BitVec>) -> Result<BitVec> {
    let size = group.size();
    if size < 2 {
        return Err(Error::SingletonGroup(group.group_id));
    }
    let h = group.block_len();
    let m = group.contents();
    let columns = group.stacked.columns();
    let (others, last) = columns.split_at((size - 1) * h);

    let mut basis = EchelonBasis::new(m);
    for c in others {
        basis.insert(c.clone());
    }
    let residuals: Vec<BitVec> = last.iter().map(|c| basis.reduce(c)).collect();
    let system = BitMatrix::from_columns(m, &residuals);
    let particular = system.solve(&basis.reduce(&request.basis))?;

    let (reduced, pivots) = system.rref();
    let kernel: Vec<BitVec> = (0..h)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut k = BitVec::unit(h, free);
            for (row, &p) in pivots.iter().enumerate() {
                if reduced.get(row, free) {
                    k.set(p, true);
                }
            }
            k
        })
        .collect();

    // At most |exclude| + 1 candidates can be rejected (zero plus excluded).
    let budget = exclude.len() as u128 + 2;
    let space = if kernel.len() >= 127 {
        u128::MAX
    } else {
        1u128 << kernel.len()
    };
    for t in 0..budget.min(space) {
        let mut candidate = particular.clone();
        for (i, k) in kernel.iter().enumerate() {
            if t >> i & 1 == 1 {
                candidate.xor_assign(k);
            }
        }
        if !candidate.is_zero() && !exclude.contains(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::KeySelection {
        group: group.group_id,
        index: request.index,
    })
}

/// A full decoding vector whose last slice is the key selector chosen by
/// [`select_key`]; the other members are solved canonically around it.
pub fn plan_keyed_retrieval(
    group: &ReconstructionGroup,
    request: &ContentRequest,
    exclude: &HashSet<BitVec>,
) -> Result<DecodingSolution> {
    let selector = select_key(group, request, exclude)?;
    Ok(complete_plan(group, request, selector))
}

fn complete_plan(group: &ReconstructionGroup, request: &ContentRequest, selector: BitVec) -> DecodingSolution {
    let h = group.block_len();
    let size = group.size();
    let columns = group.stacked.columns();
    let (others, last) = columns.split_at((size - 1) * h);
    let last = BitMatrix::from_columns(group.contents(), last);
    let mut rhs = request.basis.clone();
    rhs.xor_assign(&last.mul_vec(&selector));
    let rest = BitMatrix::from_columns(group.contents(), others)
        .solve(&rhs)
        .expect("selector validity guarantees solvability");
    let mut blocks = DecodingSolution::from_full(rest, h).blocks;
    blocks.push(selector);
    DecodingSolution::from_blocks(blocks)
}

/// Keyed plans for every content of one group, with pairwise distinct
/// non-zero key selectors.
#[derive(Clone, Debug)]
pub struct KeySchedule {
    pub group_id: usize,
    selectors: Vec<BitVec>,
    plans: Vec<DecodingSolution>,
}

impl KeySchedule {
    pub fn build(group: &ReconstructionGroup) -> Result<Self> {
        let m = group.contents();
        let mut used = HashSet::new();
        let mut selectors = Vec::with_capacity(m);
        let mut plans = Vec::with_capacity(m);
        for r in 0..m {
            let request = ContentRequest::new(r, m)?;
            let selector = select_key(group, &request, &used)?;
            used.insert(selector.clone());
            plans.push(complete_plan(group, &request, selector.clone()));
            selectors.push(selector);
        }
        Ok(Self {
            group_id: group.group_id,
            selectors,
            plans,
        })
    }

    pub fn plan(&self, index: usize) -> &DecodingSolution {
        &self.plans[index]
    }

    pub fn selector(&self, index: usize) -> &BitVec {
        &self.selectors[index]
    }

    /// For each content, which library contents the key combines:
    /// `V_last * selector`.
    pub fn key_vectors(&self, group: &ReconstructionGroup) -> Vec<BitVec> {
        let h = group.block_len();
        let columns = group.stacked.columns();
        let last = BitMatrix::from_columns(group.contents(), &columns[(group.size() - 1) * h..]);
        self.selectors.iter().map(|s| last.mul_vec(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{Cluster, GroupingPolicy, SystemParams};

    fn spare_cluster(seed: u64) -> Cluster {
        Cluster::build_with(
            SystemParams::new(10, 6, 24, 64, 0.5).unwrap(),
            seed,
            GroupingPolicy::WithSpare,
        )
        .unwrap()
    }

    #[test]
    fn singleton_group_has_no_key() {
        let c = Cluster::build(SystemParams::new(2, 4, 4, 8, 0.5).unwrap(), 0).unwrap();
        let req = ContentRequest::new(0, 4).unwrap();
        assert!(matches!(
            select_key(c.group(0), &req, &HashSet::new()),
            Err(Error::SingletonGroup(0))
        ));
    }

    #[test]
    fn schedule_solves_and_keys_are_distinct() {
        for seed in 0..10 {
            let c = spare_cluster(seed);
            for g in &c.groups {
                let sched = KeySchedule::build(g).unwrap();
                let keys = sched.key_vectors(g);
                let distinct: HashSet<_> = keys.iter().collect();
                assert_eq!(distinct.len(), 24);
                assert!(keys.iter().all(|k| !k.is_zero()));
                for r in 0..24 {
                    assert_eq!(g.stacked.mul_vec(&sched.plan(r).full), BitVec::unit(24, r));
                    assert_eq!(sched.plan(r).blocks.last().unwrap(), sched.selector(r));
                }
            }
        }
    }

    #[test]
    fn exhausted_selectors_are_reported() {
        // Two one-file servers holding the same single content: the only
        // non-zero selector is [1], so a second distinct one cannot exist.
        let c = Cluster::build_with(
            SystemParams::new(2, 1, 1, 8, 0.5).unwrap(),
            0,
            GroupingPolicy::WithSpare,
        )
        .unwrap();
        let g = c.group(0);
        let req = ContentRequest::new(0, 1).unwrap();
        let first = select_key(g, &req, &HashSet::new()).unwrap();
        let used: HashSet<_> = [first].into_iter().collect();
        assert!(matches!(select_key(g, &req, &used), Err(Error::KeySelection { .. })));
    }
}
