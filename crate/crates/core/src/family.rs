//! Reference families with forest structure.
//!
//! A reference family is a list of regions `R_k ⊆ {1, …, m}` with integer
//! budgets `ζ_k`. The family has *forest structure* when any two regions are
//! either disjoint or nested. Forest families admit a compact representation:
//! there is a partition of `{1, …, m}` into *atoms* `P_1, …, P_N` such that
//! every region is a union of consecutive atoms. [`ForestIndex`] materializes
//! that representation together with depths, parent/child edges and the
//! disjoint capacity `d`, which is what the bound computations in
//! [`crate::bounds`] operate on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Errors from family construction and indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    /// A region was constructed from an empty index list.
    EmptyRegion,
    /// Hypothesis indices are 1-based; 0 is not a valid index.
    IndexZero,
    /// The same hypothesis index appeared twice in one region.
    DuplicateIndex { index: u32 },
    /// A region mentions an index beyond `m`.
    IndexOutOfRange { index: u32, m: u32 },
    /// Two members of the family are equal as sets (positions in member order).
    DuplicateRegion { first: usize, second: usize },
    /// The family violates the forest condition; the witness pair overlaps
    /// without nesting (positions in member order).
    NotAForest { witness: (usize, usize) },
    /// `level_set` was queried outside `1..=max_depth`.
    HNotInRange { h: u32, max_depth: u32 },
    /// The operation requires a completed family (one containing all atoms).
    NotCompleted,
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyRegion => write!(f, "region must contain at least one hypothesis"),
            Self::IndexZero => write!(f, "hypothesis indices are 1-based; got 0"),
            Self::DuplicateIndex { index } => {
                write!(f, "hypothesis {index} appears twice in one region")
            }
            Self::IndexOutOfRange { index, m } => {
                write!(f, "hypothesis {index} is out of range 1..={m}")
            }
            Self::DuplicateRegion { first, second } => {
                write!(f, "members R{} and R{} are the same region", first + 1, second + 1)
            }
            Self::NotAForest { witness: (a, b) } => {
                write!(f, "regions R{} and R{} overlap without nesting", a + 1, b + 1)
            }
            Self::HNotInRange { h, max_depth } => {
                write!(f, "level {h} is outside 1..={max_depth}")
            }
            Self::NotCompleted => write!(f, "operation requires a completed family"),
        }
    }
}

impl core::error::Error for FamilyError {}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

/// A non-empty set of hypothesis indices, stored sorted and duplicate-free.
///
/// Indices are 1-based. Bounds against `m` are checked when the region is
/// attached to a [`ReferenceFamily`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    indices: Vec<u32>,
}

impl Region {
    /// Build a region from indices in any order; rejects empty input,
    /// zero indices and duplicates.
    pub fn new(mut indices: Vec<u32>) -> Result<Self, FamilyError> {
        if indices.is_empty() {
            return Err(FamilyError::EmptyRegion);
        }
        indices.sort_unstable();
        if indices[0] == 0 {
            return Err(FamilyError::IndexZero);
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(FamilyError::DuplicateIndex { index: w[0] });
        }
        Ok(Self { indices })
    }

    /// Contiguous block `lo..=hi` (1-based, inclusive).
    pub fn interval(lo: u32, hi: u32) -> Result<Self, FamilyError> {
        if lo == 0 {
            return Err(FamilyError::IndexZero);
        }
        if lo > hi {
            return Err(FamilyError::EmptyRegion);
        }
        Ok(Self {
            indices: (lo..=hi).collect(),
        })
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<u32>) -> Self {
        debug_assert!(!indices.is_empty());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    /// Sorted 1-based indices.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: u32) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

// ---------------------------------------------------------------------------
// Sorted-slice set helpers (shared with the bound computations)
// ---------------------------------------------------------------------------

pub(crate) fn intersect_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub(crate) fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.len() <= b.len() && intersect_count(a, b) == a.len()
}

// ---------------------------------------------------------------------------
// ReferenceFamily
// ---------------------------------------------------------------------------

/// One `(region, ζ)` member of a reference family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    region: Region,
    zeta: u32,
}

impl FamilyMember {
    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Budget on the number of true nulls inside the region, clamped to the
    /// region size at construction.
    pub fn zeta(&self) -> u32 {
        self.zeta
    }
}

/// A reference family `(R_k, ζ_k)_{k}` over hypotheses `1..=m`.
///
/// Members are kept in insertion order; regions must be pairwise distinct as
/// sets. Budgets above the region size are clamped down to it. The family may
/// be empty, in which case every bound degenerates to `|S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceFamily {
    m: u32,
    members: Vec<FamilyMember>,
    completed: bool,
}

impl ReferenceFamily {
    /// Build a family from `(region, ζ)` pairs over `1..=m`.
    pub fn new(m: u32, members: Vec<(Region, u32)>) -> Result<Self, FamilyError> {
        for (region, _) in &members {
            let last = *region.indices().last().expect("regions are non-empty");
            if last > m {
                return Err(FamilyError::IndexOutOfRange { index: last, m });
            }
        }
        // Distinct-regions check via a sorted view keyed by index content.
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by(|&a, &b| members[a].0.indices().cmp(members[b].0.indices()));
        for w in order.windows(2) {
            if members[w[0]].0 == members[w[1]].0 {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(FamilyError::DuplicateRegion { first, second });
            }
        }
        let members = members
            .into_iter()
            .map(|(region, zeta)| {
                let cap = region.len() as u32;
                FamilyMember {
                    region,
                    zeta: zeta.min(cap),
                }
            })
            .collect();
        Ok(Self {
            m,
            members,
            completed: false,
        })
    }

    /// Family with no members.
    pub fn empty(m: u32) -> Self {
        Self {
            m,
            members: Vec::new(),
            completed: false,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of members `K`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn member(&self, k: usize) -> &FamilyMember {
        &self.members[k]
    }

    /// True once [`complete_family`] has run on this value.
    pub fn is_completed(&self) -> bool {
        self.completed
    }
}

// ---------------------------------------------------------------------------
// Forest validation
// ---------------------------------------------------------------------------

/// Outcome of [`validate_forest`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestReport {
    pub is_forest: bool,
    /// First member pair (positions in member order, lexicographic scan)
    /// whose regions overlap without nesting.
    pub witness: Option<(usize, usize)>,
}

/// Check the forest condition: every two regions are disjoint or nested.
pub fn validate_forest(family: &ReferenceFamily) -> ForestReport {
    let members = family.members();
    for k in 0..members.len() {
        for k2 in (k + 1)..members.len() {
            let a = members[k].region().indices();
            let b = members[k2].region().indices();
            let c = intersect_count(a, b);
            if c != 0 && c != a.len() && c != b.len() {
                return ForestReport {
                    is_forest: false,
                    witness: Some((k, k2)),
                };
            }
        }
    }
    ForestReport {
        is_forest: true,
        witness: None,
    }
}

// ---------------------------------------------------------------------------
// Depths and atoms
// ---------------------------------------------------------------------------

/// Depth of every member: `φ(k) = 1 + #{k' : R_{k'} ⊋ R_k}`.
fn depths(family: &ReferenceFamily) -> Vec<u32> {
    let members = family.members();
    (0..members.len())
        .map(|k| {
            let rk = members[k].region().indices();
            let supersets = members
                .iter()
                .enumerate()
                .filter(|(k2, other)| {
                    *k2 != k && other.region().len() > rk.len() && is_subset(rk, other.region().indices())
                })
                .count();
            1 + supersets as u32
        })
        .collect()
}

/// Compute the atom partition of a forest family by a level sweep: at each
/// depth, split every current block by the members of that depth it contains
/// (in member order) and keep the uncovered remainder of the block as one
/// trailing atom. Every member ends up being a union of consecutive atoms.
pub fn compute_atoms(family: &ReferenceFamily) -> Result<Vec<Region>, FamilyError> {
    let report = validate_forest(family);
    if let Some(witness) = report.witness {
        return Err(FamilyError::NotAForest { witness });
    }
    Ok(atoms_unchecked(family, &depths(family)))
}

fn atoms_unchecked(family: &ReferenceFamily, depth: &[u32]) -> Vec<Region> {
    let m = family.m();
    let members = family.members();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut atoms: Vec<Vec<u32>> = if m == 0 {
        Vec::new()
    } else {
        vec![(1..=m).collect()]
    };
    let mut block_of: Vec<usize> = vec![0; m as usize + 1];
    let mut covered: Vec<bool> = vec![false; m as usize + 1];

    for h in 1..=max_depth {
        for (n, block) in atoms.iter().enumerate() {
            for &e in block {
                block_of[e as usize] = n;
            }
        }
        let mut by_block: Vec<Vec<usize>> = vec![Vec::new(); atoms.len()];
        for (k, member) in members.iter().enumerate() {
            if depth[k] == h {
                let first = member.region().indices()[0];
                by_block[block_of[first as usize]].push(k);
            }
        }
        let mut next: Vec<Vec<u32>> = Vec::new();
        for (n, block) in atoms.iter().enumerate() {
            for &k in &by_block[n] {
                let r = members[k].region().indices();
                debug_assert!(is_subset(r, block));
                for &e in r {
                    covered[e as usize] = true;
                }
                next.push(r.to_vec());
            }
            let leftover: Vec<u32> = block.iter().copied().filter(|&e| !covered[e as usize]).collect();
            if !leftover.is_empty() {
                next.push(leftover);
            }
            for &k in &by_block[n] {
                for &e in members[k].region().indices() {
                    covered[e as usize] = false;
                }
            }
        }
        atoms = next;
    }
    atoms.into_iter().map(Region::from_sorted_unchecked).collect()
}

// ---------------------------------------------------------------------------
// ForestIndex
// ---------------------------------------------------------------------------

/// Atom/interval representation of a forest family.
///
/// Atoms partition `1..=m`; member `k` covers exactly the consecutive atoms
/// `interval_of(k) = (i, j)`. Depths, parent/child edges, roots and the
/// disjoint capacity `d` (the maximum number of pairwise disjoint members,
/// equal to the number of members containing no other member) are
/// precomputed.
#[derive(Debug, Clone)]
pub struct ForestIndex {
    atoms: Vec<Region>,
    /// Atom id of each hypothesis, indexed by `i - 1`.
    atom_of: Vec<usize>,
    intervals: Vec<(usize, usize)>,
    depth: Vec<u32>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    leaf_count: usize,
    max_depth: u32,
    all_atoms: bool,
}

impl ForestIndex {
    pub fn atoms(&self) -> &[Region] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Atom id containing hypothesis `index` (1-based).
    pub fn atom_of(&self, index: u32) -> usize {
        self.atom_of[index as usize - 1]
    }

    /// Inclusive atom-id interval `(i, j)` with `R_k = P_i ∪ … ∪ P_j`.
    pub fn interval_of(&self, k: usize) -> (usize, usize) {
        self.intervals[k]
    }

    pub fn depth_of(&self, k: usize) -> u32 {
        self.depth[k]
    }

    pub fn parent_of(&self, k: usize) -> Option<usize> {
        self.parent[k]
    }

    /// Immediate sub-regions of member `k` (no intermediate member between).
    pub fn children_of(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    /// Members with no strict superset in the family.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Maximum number of pairwise disjoint members (`d`), obtained by
    /// counting the members that contain no other member.
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// Largest depth `H`; 0 for an empty family.
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// True when every atom is itself a member of the family.
    pub fn is_all_atoms(&self) -> bool {
        self.all_atoms
    }

    fn member_is_atom(&self, k: usize) -> bool {
        let (i, j) = self.intervals[k];
        i == j
    }
}

/// Build the [`ForestIndex`] of a forest family.
pub fn build_index(family: &ReferenceFamily) -> Result<ForestIndex, FamilyError> {
    let report = validate_forest(family);
    if let Some(witness) = report.witness {
        return Err(FamilyError::NotAForest { witness });
    }
    let depth = depths(family);
    let atoms = atoms_unchecked(family, &depth);
    let m = family.m() as usize;
    let members = family.members();

    let mut atom_of = vec![0usize; m];
    for (n, atom) in atoms.iter().enumerate() {
        for &e in atom.indices() {
            atom_of[e as usize - 1] = n;
        }
    }

    let mut intervals = Vec::with_capacity(members.len());
    for member in members {
        let ids = member.region().indices().iter().map(|&e| atom_of[e as usize - 1]);
        let (mut lo, mut hi) = (usize::MAX, 0usize);
        for id in ids {
            lo = lo.min(id);
            hi = hi.max(id);
        }
        let covered: usize = atoms[lo..=hi].iter().map(Region::len).sum();
        debug_assert_eq!(
            covered,
            member.region().len(),
            "member is not a union of consecutive atoms"
        );
        intervals.push((lo, hi));
    }

    // parent = smallest strict superset; in a forest it is the unique
    // superset of depth φ(k) - 1.
    let contains = |outer: (usize, usize), inner: (usize, usize)| -> bool {
        outer.0 <= inner.0 && inner.1 <= outer.1
    };
    let mut parent = vec![None; members.len()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    let mut roots = Vec::new();
    for k in 0..members.len() {
        if depth[k] == 1 {
            roots.push(k);
            continue;
        }
        let p = (0..members.len())
            .find(|&k2| depth[k2] == depth[k] - 1 && contains(intervals[k2], intervals[k]))
            .expect("non-root member has a parent of the previous depth");
        parent[k] = Some(p);
        children[p].push(k);
    }

    let leaf_count = (0..members.len())
        .filter(|&k| {
            !(0..members.len())
                .any(|k2| k2 != k && contains(intervals[k], intervals[k2]))
        })
        .count();

    let mut atom_is_member = vec![false; atoms.len()];
    for &(i, j) in &intervals {
        if i == j {
            atom_is_member[i] = true;
        }
    }
    let all_atoms = atom_is_member.iter().all(|&b| b);
    let max_depth = depth.iter().copied().max().unwrap_or(0);

    Ok(ForestIndex {
        atoms,
        atom_of,
        intervals,
        depth,
        parent,
        children,
        roots,
        leaf_count,
        max_depth,
        all_atoms,
    })
}

// ---------------------------------------------------------------------------
// Completion
// ---------------------------------------------------------------------------

/// Append every atom that is not already a member, with budget `ζ = |P_n|`
/// (a vacuous constraint), so the resulting family contains all atoms.
/// Returns the completed family and its index. Idempotent.
pub fn complete_family(
    family: &ReferenceFamily,
) -> Result<(ReferenceFamily, ForestIndex), FamilyError> {
    let index = build_index(family)?;
    let mut members: Vec<(Region, u32)> = family
        .members()
        .iter()
        .map(|mb| (mb.region().clone(), mb.zeta()))
        .collect();
    let mut atom_is_member = vec![false; index.atom_count()];
    for k in 0..family.len() {
        let (i, j) = index.interval_of(k);
        if i == j {
            atom_is_member[i] = true;
        }
    }
    for (n, atom) in index.atoms().iter().enumerate() {
        if !atom_is_member[n] {
            members.push((atom.clone(), atom.len() as u32));
        }
    }
    let mut completed = ReferenceFamily::new(family.m(), members)?;
    completed.completed = true;
    let completed_index = build_index(&completed)?;
    debug_assert!(completed_index.is_all_atoms());
    Ok((completed, completed_index))
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

/// The member set `𝒦^h`: members of depth exactly `h`, plus atom members of
/// depth at most `h`. On a completed family these regions partition `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub h: u32,
    /// Member positions, ascending.
    pub members: Vec<usize>,
}

/// Level set of a completed family's index.
pub fn level_set(index: &ForestIndex, h: u32) -> Result<LevelSet, FamilyError> {
    if !index.is_all_atoms() {
        return Err(FamilyError::NotCompleted);
    }
    if h < 1 || h > index.max_depth() {
        return Err(FamilyError::HNotInRange {
            h,
            max_depth: index.max_depth(),
        });
    }
    let members = (0..index.intervals.len())
        .filter(|&k| index.depth_of(k) == h || (index.member_is_atom(k) && index.depth_of(k) <= h))
        .collect();
    Ok(LevelSet { h, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{
        assert_atoms_partition_and_members_contiguous, brute_force_disjoint_capacity,
        nine_member_family, overlapping_triple,
    };
    use alloc::vec;

    fn region(indices: &[u32]) -> Region {
        Region::new(indices.to_vec()).unwrap()
    }

    #[test]
    fn region_rejects_bad_input() {
        assert_eq!(Region::new(vec![]), Err(FamilyError::EmptyRegion));
        assert_eq!(Region::new(vec![0, 1]), Err(FamilyError::IndexZero));
        assert_eq!(
            Region::new(vec![3, 1, 3]),
            Err(FamilyError::DuplicateIndex { index: 3 })
        );
        assert_eq!(region(&[4, 1, 2]).indices(), &[1, 2, 4]);
    }

    #[test]
    fn family_clamps_zeta_and_rejects_duplicates() {
        let fam = ReferenceFamily::new(5, vec![(region(&[1, 2]), 99)]).unwrap();
        assert_eq!(fam.member(0).zeta(), 2);

        let dup = ReferenceFamily::new(5, vec![(region(&[1, 2]), 0), (region(&[2, 1]), 1)]);
        assert_eq!(dup, Err(FamilyError::DuplicateRegion { first: 0, second: 1 }));

        let oob = ReferenceFamily::new(3, vec![(region(&[2, 4]), 0)]);
        assert_eq!(oob, Err(FamilyError::IndexOutOfRange { index: 4, m: 3 }));
    }

    #[test]
    fn nine_member_family_is_a_forest() {
        let report = validate_forest(&nine_member_family());
        assert!(report.is_forest);
        assert_eq!(report.witness, None);
    }

    #[test]
    fn overlapping_triple_is_not_a_forest() {
        let report = validate_forest(&overlapping_triple());
        assert!(!report.is_forest);
        assert_eq!(report.witness, Some((0, 1)));
    }

    #[test]
    fn single_member_family_is_a_forest() {
        let fam = ReferenceFamily::new(6, vec![(region(&[2, 4, 6]), 1)]).unwrap();
        assert!(validate_forest(&fam).is_forest);
    }

    #[test]
    fn atoms_of_nine_member_family() {
        let atoms = compute_atoms(&nine_member_family()).unwrap();
        let as_sets: Vec<&[u32]> = atoms.iter().map(Region::indices).collect();
        // Same eight atoms as the hand partition: {1,2}, {3,4}, 5..=10,
        // 11..=16, 17..=20, {21}, {22}, 23..=25 — our sweep emits children
        // before the leftover piece inside each block.
        let expected: Vec<Vec<u32>> = vec![
            vec![1, 2],
            (5..=10).collect(),
            vec![3, 4],
            (11..=16).collect(),
            (17..=20).collect(),
            vec![22],
            vec![21],
            vec![23, 24, 25],
        ];
        assert_eq!(as_sets.len(), 8);
        for e in &expected {
            assert!(as_sets.contains(&e.as_slice()), "missing atom {e:?}");
        }
        assert_eq!(as_sets, expected.iter().map(|e| e.as_slice()).collect::<Vec<_>>());
        assert_atoms_partition_and_members_contiguous(&nine_member_family(), &atoms);
    }

    #[test]
    fn atoms_of_whole_space_member() {
        let fam = ReferenceFamily::new(7, vec![(Region::interval(1, 7).unwrap(), 3)]).unwrap();
        let atoms = compute_atoms(&fam).unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].indices(), Region::interval(1, 7).unwrap().indices());
    }

    #[test]
    fn atoms_of_disjoint_family_keep_leftover_as_one_atom() {
        let fam = ReferenceFamily::new(
            10,
            vec![(Region::interval(1, 3).unwrap(), 1), (Region::interval(7, 9).unwrap(), 1)],
        )
        .unwrap();
        let atoms = compute_atoms(&fam).unwrap();
        let as_sets: Vec<&[u32]> = atoms.iter().map(Region::indices).collect();
        assert_eq!(as_sets, vec![&[1, 2, 3][..], &[7, 8, 9][..], &[4, 5, 6, 10][..]]);
        assert_atoms_partition_and_members_contiguous(&fam, &atoms);
    }

    #[test]
    fn atoms_of_empty_family() {
        let fam = ReferenceFamily::empty(4);
        let atoms = compute_atoms(&fam).unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].indices(), &[1, 2, 3, 4]);
    }

    #[test]
    fn compute_atoms_rejects_non_forest() {
        assert_eq!(
            compute_atoms(&overlapping_triple()),
            Err(FamilyError::NotAForest { witness: (0, 1) })
        );
    }

    #[test]
    fn depths_of_nine_member_family() {
        let index = build_index(&nine_member_family()).unwrap();
        let expected = [1, 2, 2, 2, 3, 3, 3, 1, 2];
        for (k, &d) in expected.iter().enumerate() {
            assert_eq!(index.depth_of(k), d, "depth of member {k}");
        }
        assert_eq!(index.max_depth(), 3);
        assert_eq!(index.roots(), &[0, 7]);
    }

    #[test]
    fn leaf_count_of_nine_member_family_matches_brute_force() {
        let fam = nine_member_family();
        let index = build_index(&fam).unwrap();
        assert_eq!(index.leaf_count(), 5);
        assert_eq!(index.leaf_count(), brute_force_disjoint_capacity(&fam));
    }

    #[test]
    fn nested_chain_has_capacity_one() {
        let fam = ReferenceFamily::new(
            6,
            vec![
                (Region::interval(1, 2).unwrap(), 0),
                (Region::interval(1, 4).unwrap(), 1),
                (Region::interval(1, 6).unwrap(), 2),
            ],
        )
        .unwrap();
        let index = build_index(&fam).unwrap();
        assert_eq!(index.leaf_count(), 1);
        assert_eq!(brute_force_disjoint_capacity(&fam), 1);
    }

    #[test]
    fn completion_adds_missing_atoms_with_vacuous_budgets() {
        let fam = nine_member_family();
        let (completed, index) = complete_family(&fam).unwrap();
        assert!(completed.is_completed());
        assert!(index.is_all_atoms());
        assert_eq!(completed.len(), 12);
        let added: Vec<(&[u32], u32)> = completed.members()[9..]
            .iter()
            .map(|mb| (mb.region().indices(), mb.zeta()))
            .collect();
        assert_eq!(
            added,
            vec![(&[3, 4][..], 2), (&[21][..], 1), (&[23, 24, 25][..], 3)]
        );
    }

    #[test]
    fn completion_is_idempotent() {
        let (once, _) = complete_family(&nine_member_family()).unwrap();
        let (twice, _) = complete_family(&once).unwrap();
        assert_eq!(once.members(), twice.members());
        assert!(twice.is_completed());
    }

    #[test]
    fn completion_of_two_element_member_on_m3() {
        let fam = ReferenceFamily::new(3, vec![(Region::interval(1, 2).unwrap(), 0)]).unwrap();
        let (completed, _) = complete_family(&fam).unwrap();
        assert_eq!(completed.len(), 2);
        assert_eq!(completed.member(1).region().indices(), &[3]);
        assert_eq!(completed.member(1).zeta(), 1);
    }

    #[test]
    fn level_sets_of_completed_nine_member_family() {
        let fam = nine_member_family();
        let (completed, index) = complete_family(&fam).unwrap();
        // Members 0..=8 are the original nine; 9 = {3,4}, 10 = {21}, 11 = {23,24,25}.
        let l1 = level_set(&index, 1).unwrap();
        assert_eq!(l1.members, vec![0, 7, 11]);
        let l3 = level_set(&index, 3).unwrap();
        assert_eq!(l3.members, vec![1, 4, 5, 6, 8, 9, 10, 11]);
        for h in 1..=index.max_depth() {
            let ls = level_set(&index, h).unwrap();
            let mut covered = vec![false; completed.m() as usize + 1];
            for &k in &ls.members {
                for &e in completed.member(k).region().indices() {
                    assert!(!covered[e as usize], "level {h} overlaps at {e}");
                    covered[e as usize] = true;
                }
            }
            assert!(covered[1..].iter().all(|&b| b), "level {h} does not cover");
        }
    }

    #[test]
    fn level_set_rejects_out_of_range_h() {
        let (_, index) = complete_family(&nine_member_family()).unwrap();
        assert_eq!(
            level_set(&index, 0),
            Err(FamilyError::HNotInRange { h: 0, max_depth: 3 })
        );
        assert_eq!(
            level_set(&index, 4),
            Err(FamilyError::HNotInRange { h: 4, max_depth: 3 })
        );
    }

    #[test]
    fn level_set_requires_completion() {
        let index = build_index(&nine_member_family()).unwrap();
        assert_eq!(level_set(&index, 1), Err(FamilyError::NotCompleted));
    }

    #[test]
    fn level_set_of_single_atom_root() {
        let fam = ReferenceFamily::new(2, vec![(Region::interval(1, 2).unwrap(), 1)]).unwrap();
        let (_, index) = complete_family(&fam).unwrap();
        let ls = level_set(&index, 1).unwrap();
        assert_eq!(ls.members, vec![0]);
    }

    #[test]
    fn parent_child_edges_connect_consecutive_depths() {
        let (_, index) = complete_family(&nine_member_family()).unwrap();
        for k in 0..12 {
            if let Some(p) = index.parent_of(k) {
                assert_eq!(index.depth_of(p) + 1, index.depth_of(k));
                assert!(index.children_of(p).contains(&k));
            } else {
                assert_eq!(index.depth_of(k), 1);
            }
        }
    }
}
