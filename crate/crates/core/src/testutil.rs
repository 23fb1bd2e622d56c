//! Shared fixtures for the unit tests.

use alloc::vec;
use alloc::vec::Vec;

use crate::family::{intersect_count, ReferenceFamily, Region};

/// The nine-member forest on m = 25 used across the module tests: one big
/// tree over 1..=20, a small tree over {21, 22}, and 23..=25 covered by
/// nothing. Budgets are the vacuous `ζ_k = |R_k|`.
pub fn nine_member_family() -> ReferenceFamily {
    let regions = [
        Region::interval(1, 20).unwrap(),
        Region::interval(1, 2).unwrap(),
        Region::interval(3, 10).unwrap(),
        Region::interval(11, 20).unwrap(),
        Region::interval(5, 10).unwrap(),
        Region::interval(11, 16).unwrap(),
        Region::interval(17, 20).unwrap(),
        Region::interval(21, 22).unwrap(),
        Region::interval(22, 22).unwrap(),
    ];
    let members = regions
        .into_iter()
        .map(|r| {
            let z = r.len() as u32;
            (r, z)
        })
        .collect();
    ReferenceFamily::new(25, members).unwrap()
}

/// Three pairwise-overlapping sets on m = 4 with unit budgets; the smallest
/// family where the subset-minimum bound is strictly above the optimum.
pub fn overlapping_triple() -> ReferenceFamily {
    let members = vec![
        (Region::new(vec![1, 2, 4]).unwrap(), 1),
        (Region::new(vec![2, 3, 4]).unwrap(), 1),
        (Region::new(vec![1, 3, 4]).unwrap(), 1),
    ];
    ReferenceFamily::new(4, members).unwrap()
}

/// Maximum pairwise-disjoint subfamily size by exhausting all 2^K subsets.
pub fn brute_force_disjoint_capacity(family: &ReferenceFamily) -> usize {
    let k = family.len();
    assert!(k <= 16);
    let mut best = 0;
    for mask in 0u32..(1 << k) {
        let chosen: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let disjoint = chosen.iter().enumerate().all(|(pos, &a)| {
            chosen[pos + 1..].iter().all(|&b| {
                intersect_count(
                    family.member(a).region().indices(),
                    family.member(b).region().indices(),
                ) == 0
            })
        });
        if disjoint {
            best = best.max(chosen.len());
        }
    }
    best
}

/// Assert the partition representation: atoms partition 1..=m and every
/// member is a union of consecutive atoms in the emitted order.
pub fn assert_atoms_partition_and_members_contiguous(
    family: &ReferenceFamily,
    atoms: &[Region],
) {
    let m = family.m() as usize;
    let mut seen = vec![false; m + 1];
    for atom in atoms {
        for &e in atom.indices() {
            assert!(!seen[e as usize], "atom overlap at {e}");
            seen[e as usize] = true;
        }
    }
    assert!(seen[1..].iter().all(|&b| b), "atoms do not cover 1..=m");

    for member in family.members() {
        let r = member.region().indices();
        let ids: Vec<usize> = (0..atoms.len())
            .filter(|&n| intersect_count(atoms[n].indices(), r) > 0)
            .collect();
        let lo = *ids.first().unwrap();
        let hi = *ids.last().unwrap();
        assert_eq!(ids, (lo..=hi).collect::<Vec<_>>(), "non-consecutive atoms");
        let covered: usize = ids.iter().map(|&n| atoms[n].len()).sum();
        assert_eq!(covered, r.len(), "member not a union of whole atoms");
    }
}
