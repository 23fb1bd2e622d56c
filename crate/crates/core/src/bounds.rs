//! Post hoc bounds over a reference family.
//!
//! For a selection `S` the family constrains the unknown set of true nulls
//! `A` through `|R_k ∩ A| ≤ ζ_k`, and the tightest consistent bound is
//!
//! ```text
//! V*(S) = max { |S ∩ A| : A ⊆ {1..m}, |R_k ∩ A| ≤ ζ_k for all k }.
//! ```
//!
//! Four computable versions live here, ordered `V* ≤ Ṽ ≤ Ṽ^q ≤ V̄`:
//!
//! * [`v_bar`] — the single-member interpolation `|S| ∧ min_k (ζ_k + |S∖R_k|)`;
//! * [`v_tilde_q`] — the minimum over member subsets `Q` of size at most `q`
//!   of `Σ_{k∈Q} ζ_k ∧ |S∩R_k| + |S ∖ ∪_{k∈Q} R_k|`, by exhaustive subset
//!   search (the general problem is NP-hard, so this is capped at `K ≤ 20`);
//! * [`v_tilde`] — `Ṽ^K`; on forest families this equals `V*` and is computed
//!   by the forest dynamic program instead;
//! * [`v_star_forest`] — `V*` on forest families: complete the family, set
//!   each atom member to `ζ ∧ |S∩P|`, then fold bottom-up with
//!   `min(ζ_k ∧ |S∩R_k|, Σ_children)` and sum over roots. `O(Hm)` per query.
//!
//! [`v_star_bruteforce`] maximizes over all `2^m` candidate sets `A` and
//! serves as the independent oracle for everything above.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::family::{
    build_index, complete_family, intersect_count, validate_forest, FamilyError, ForestIndex,
    ReferenceFamily,
};

/// Largest member count for which `v_tilde_q` enumerates subsets exactly.
pub const ENUMERATION_CAP: usize = 20;

/// Largest `m` accepted by [`v_star_bruteforce`].
pub const BRUTEFORCE_MAX_M: u32 = 20;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundError {
    /// The operation needs a forest family; the witness pair overlaps
    /// without nesting.
    NotAForest { witness: (usize, usize) },
    /// `v_tilde_q` would have to enumerate subsets of more than
    /// [`ENUMERATION_CAP`] members on a family where no forest shortcut
    /// applies.
    FamilyTooLargeForEnumeration { members: usize },
    /// `q` outside `1..=K`.
    QOutOfRange { q: usize, members: usize },
    /// `v_star_bruteforce` refuses `m` above [`BRUTEFORCE_MAX_M`].
    ProblemTooLarge { m: u32 },
    /// A selection index is outside `1..=m`.
    SelectionOutOfRange { index: u32, m: u32 },
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotAForest { witness: (a, b) } => {
                write!(
                    f,
                    "not a forest: regions R{} and R{} overlap without nesting",
                    a + 1,
                    b + 1
                )
            }
            Self::FamilyTooLargeForEnumeration { members } => write!(
                f,
                "subset enumeration over {members} members exceeds the cap of {ENUMERATION_CAP}"
            ),
            Self::QOutOfRange { q, members } => {
                write!(f, "q = {q} is outside 1..={members}")
            }
            Self::ProblemTooLarge { m } => {
                write!(f, "exhaustive search over 2^{m} sets exceeds m = {BRUTEFORCE_MAX_M}")
            }
            Self::SelectionOutOfRange { index, m } => {
                write!(f, "selection index {index} is out of range 1..={m}")
            }
        }
    }
}

impl core::error::Error for BoundError {}

impl From<FamilyError> for BoundError {
    fn from(err: FamilyError) -> Self {
        match err {
            FamilyError::NotAForest { witness } => Self::NotAForest { witness },
            // Other family errors cannot escape here: the inputs were
            // already validated at construction.
            other => panic!("unexpected family error in bound computation: {other}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

/// A possibly-empty subset of `1..=m`, sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    indices: Vec<u32>,
}

impl Selection {
    /// Accepts indices in any order; duplicates collapse.
    pub fn new(mut indices: Vec<u32>) -> Result<Self, BoundError> {
        indices.sort_unstable();
        indices.dedup();
        if indices.first() == Some(&0) {
            return Err(BoundError::SelectionOutOfRange { index: 0, m: 0 });
        }
        Ok(Self { indices })
    }

    /// The full selection `{1, …, m}`.
    pub fn all(m: u32) -> Self {
        Self {
            indices: (1..=m).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Errors when some index exceeds `m`.
    pub fn check_within(&self, m: u32) -> Result<(), BoundError> {
        match self.indices.last() {
            Some(&last) if last > m => Err(BoundError::SelectionOutOfRange { index: last, m }),
            _ => Ok(()),
        }
    }
}

/// Number of certified true discoveries: `|S|` minus the bound.
pub fn true_discoveries(bound: u32, selection: &Selection) -> u32 {
    debug_assert!(bound as usize <= selection.len());
    selection.len() as u32 - bound
}

// ---------------------------------------------------------------------------
// V̄: single-member interpolation
// ---------------------------------------------------------------------------

/// `V̄(S) = |S| ∧ min_k { ζ_k + |S ∖ R_k| }`. Works on any family.
pub fn v_bar(family: &ReferenceFamily, selection: &Selection) -> u32 {
    let s = selection.indices();
    let mut best = s.len() as u32;
    for member in family.members() {
        let hit = intersect_count(s, member.region().indices()) as u32;
        let outside = s.len() as u32 - hit;
        best = best.min(member.zeta().saturating_add(outside));
    }
    best
}

/// `V̄(S_k)` along the nested selections `S_k = {order[0], …, order[k-1]}`,
/// in `O(K)` per step after an `O(Σ|R_k|)` index of which members contain
/// each hypothesis.
pub fn v_bar_envelope(family: &ReferenceFamily, order: &[u32]) -> Vec<u32> {
    let m = family.m() as usize;
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (k, member) in family.members().iter().enumerate() {
        for &i in member.region().indices() {
            containing[i as usize - 1].push(k as u32);
        }
    }
    let mut hit = vec![0u32; family.len()];
    let mut out = Vec::with_capacity(order.len());
    for (step, &i) in order.iter().enumerate() {
        for &k in &containing[i as usize - 1] {
            hit[k as usize] += 1;
        }
        let size = step as u32 + 1;
        let mut best = size;
        for (k, member) in family.members().iter().enumerate() {
            best = best.min(member.zeta().saturating_add(size - hit[k]));
        }
        out.push(best);
    }
    out
}

// ---------------------------------------------------------------------------
// Ṽ^q: subset minimum
// ---------------------------------------------------------------------------

/// `Ṽ^q(S)`: exact minimum over all member subsets `Q` with `|Q| ≤ q` of
/// `Σ_{k∈Q} ζ_k ∧ |S∩R_k| + |S ∖ ∪_{k∈Q} R_k|`.
///
/// Exhaustive over the `K ≤ 20` member subsets; for larger forest families
/// the query is answered by the forest dynamic program when `q` reaches the
/// disjoint capacity `d` (at which point `Ṽ^q = V*`), and refused otherwise.
pub fn v_tilde_q(
    family: &ReferenceFamily,
    selection: &Selection,
    q: usize,
) -> Result<u32, BoundError> {
    let k = family.len();
    if q < 1 || q > k {
        return Err(BoundError::QOutOfRange { q, members: k });
    }
    if k > ENUMERATION_CAP {
        let report = validate_forest(family);
        if report.is_forest {
            let index = build_index(family)?;
            if q >= index.leaf_count() {
                return Ok(v_star_forest(family, &index, selection));
            }
        }
        return Err(BoundError::FamilyTooLargeForEnumeration { members: k });
    }
    Ok(subset_minimum(family, selection, q))
}

fn subset_minimum(family: &ReferenceFamily, selection: &Selection, q: usize) -> u32 {
    let s = selection.indices();
    let words = s.len().div_ceil(64).max(1);
    // Per member: capped hit count and a bitmask of covered selection slots.
    let mut caps = Vec::with_capacity(family.len());
    let mut masks = Vec::with_capacity(family.len());
    for member in family.members() {
        let mut mask = vec![0u64; words];
        let mut hit = 0u32;
        let r = member.region().indices();
        let (mut i, mut j) = (0, 0);
        while i < s.len() && j < r.len() {
            match s[i].cmp(&r[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    mask[i / 64] |= 1 << (i % 64);
                    hit += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        caps.push(member.zeta().min(hit));
        masks.push(mask);
    }

    struct Dfs<'a> {
        caps: &'a [u32],
        masks: &'a [Vec<u64>],
        q: usize,
        s_len: u32,
        best: u32,
    }

    impl Dfs<'_> {
        fn run(&mut self, next: usize, chosen: usize, sum: u32, coverage: &mut [u64]) {
            let uncovered = self.s_len
                - coverage.iter().map(|w| w.count_ones()).sum::<u32>();
            self.best = self.best.min(sum + uncovered);
            if next == self.caps.len() || chosen == self.q || sum >= self.best {
                return;
            }
            // Exclude member `next`.
            self.run(next + 1, chosen, sum, coverage);
            // Include member `next`.
            let mask = &self.masks[next];
            let saved: Vec<u64> = coverage.to_vec();
            for (w, &m) in coverage.iter_mut().zip(mask) {
                *w |= m;
            }
            self.run(next + 1, chosen + 1, sum + self.caps[next], coverage);
            coverage.copy_from_slice(&saved);
        }
    }

    let mut coverage = vec![0u64; words];
    let mut dfs = Dfs {
        caps: &caps,
        masks: &masks,
        q,
        s_len: s.len() as u32,
        best: s.len() as u32,
    };
    dfs.run(0, 0, 0, &mut coverage);
    dfs.best
}

/// `Ṽ(S) = Ṽ^K(S)`. Routed through the forest dynamic program whenever the
/// family is a forest (the two coincide there); otherwise exhaustive.
pub fn v_tilde(family: &ReferenceFamily, selection: &Selection) -> Result<u32, BoundError> {
    if family.is_empty() {
        return Ok(selection.len() as u32);
    }
    if validate_forest(family).is_forest {
        let index = build_index(family)?;
        return Ok(v_star_forest(family, &index, selection));
    }
    v_tilde_q(family, selection, family.len())
}

// ---------------------------------------------------------------------------
// V* on forests
// ---------------------------------------------------------------------------

/// Reusable evaluator for `V*` on one forest family.
///
/// Construction completes the family once; each [`bound`](Self::bound) query
/// costs `O(m + K)` and [`envelope`](Self::envelope) amortizes nested top-k
/// selections to `O(H)` per added hypothesis.
#[derive(Debug, Clone)]
pub struct ForestEvaluator {
    m: u32,
    /// Atom id per hypothesis (0-based by `i - 1`).
    atom_of: Vec<usize>,
    /// Member id of each atom in the completed family.
    atom_member: Vec<usize>,
    zeta: Vec<u32>,
    intervals: Vec<(usize, usize)>,
    parent: Vec<Option<usize>>,
    /// Members ordered by decreasing depth; children always precede parents.
    fold_order: Vec<usize>,
}

impl ForestEvaluator {
    pub fn new(family: &ReferenceFamily) -> Result<Self, BoundError> {
        let (completed, index) = complete_family(family)?;
        Ok(Self::from_completed(&completed, &index))
    }

    /// Reuse an index already built for `family`.
    pub fn with_index(family: &ReferenceFamily, index: &ForestIndex) -> Result<Self, BoundError> {
        if index.is_all_atoms() {
            return Ok(Self::from_completed(family, index));
        }
        Self::new(family)
    }

    fn from_completed(family: &ReferenceFamily, index: &ForestIndex) -> Self {
        debug_assert!(index.is_all_atoms());
        let k = family.len();
        let mut atom_member = vec![usize::MAX; index.atom_count()];
        let mut intervals = Vec::with_capacity(k);
        let mut zeta = Vec::with_capacity(k);
        let mut parent = Vec::with_capacity(k);
        for kk in 0..k {
            let (i, j) = index.interval_of(kk);
            if i == j {
                atom_member[i] = kk;
            }
            intervals.push((i, j));
            zeta.push(family.member(kk).zeta());
            parent.push(index.parent_of(kk));
        }
        let mut atom_of = Vec::with_capacity(family.m() as usize);
        for i in 1..=family.m() {
            atom_of.push(index.atom_of(i));
        }
        let mut fold_order: Vec<usize> = (0..k).collect();
        fold_order.sort_by_key(|&kk| core::cmp::Reverse(index.depth_of(kk)));
        Self {
            m: family.m(),
            atom_of,
            atom_member,
            zeta,
            intervals,
            parent,
            fold_order,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `V*(S)` by one bottom-up pass.
    pub fn bound(&self, selection: &Selection) -> u32 {
        let n_atoms = self.atom_member.len();
        let mut atom_counts = vec![0u32; n_atoms];
        for &i in selection.indices() {
            atom_counts[self.atom_of[i as usize - 1]] += 1;
        }
        let mut prefix = vec![0u32; n_atoms + 1];
        for (n, &c) in atom_counts.iter().enumerate() {
            prefix[n + 1] = prefix[n] + c;
        }

        let k = self.zeta.len();
        let mut value = vec![0u32; k];
        let mut child_sum = vec![0u32; k];
        let mut has_children = vec![false; k];
        let mut total = 0u32;
        for &kk in &self.fold_order {
            let (i, j) = self.intervals[kk];
            let hit = prefix[j + 1] - prefix[i];
            let own = self.zeta[kk].min(hit);
            value[kk] = if has_children[kk] {
                own.min(child_sum[kk])
            } else {
                own
            };
            match self.parent[kk] {
                Some(p) => {
                    child_sum[p] += value[kk];
                    has_children[p] = true;
                }
                None => total += value[kk],
            }
        }
        total
    }

    /// `V*(S_k)` for the nested selections `S_k = {order[0], …, order[k-1]}`,
    /// for all `k = 1..=order.len()`, updating the fold incrementally along
    /// the leaf-to-root path of each added hypothesis.
    ///
    /// An internal node's value is `min(ζ, Σ_children)`: the children
    /// partition the node, so the child sum never exceeds the node's own hit
    /// count and the `|S∩R_k|` term is redundant above the leaves. Once a
    /// node's value stops changing, nothing above it changes either.
    pub fn envelope(&self, order: &[u32]) -> Vec<u32> {
        let k = self.zeta.len();
        let mut leaf_hit = vec![0u32; k];
        let mut child_sum = vec![0u32; k];
        let mut value = vec![0u32; k];
        let mut total = 0u32;
        let mut out = Vec::with_capacity(order.len());
        for &idx in order {
            let atom = self.atom_of[idx as usize - 1];
            let leaf = self.atom_member[atom];
            leaf_hit[leaf] += 1;
            let mut node = leaf;
            let mut new_value = self.zeta[leaf].min(leaf_hit[leaf]);
            loop {
                let delta = new_value - value[node];
                value[node] = new_value;
                if delta == 0 {
                    break;
                }
                match self.parent[node] {
                    Some(p) => {
                        child_sum[p] += delta;
                        new_value = self.zeta[p].min(child_sum[p]);
                        node = p;
                    }
                    None => {
                        total += delta;
                        break;
                    }
                }
            }
            out.push(total);
        }
        out
    }
}

/// `V*(S)` for a forest family with a prebuilt index.
pub fn v_star_forest(family: &ReferenceFamily, index: &ForestIndex, selection: &Selection) -> u32 {
    match ForestEvaluator::with_index(family, index) {
        Ok(eval) => eval.bound(selection),
        Err(_) => unreachable!("index construction implies forest structure"),
    }
}

/// `V*(S)` for a forest family, validating and completing internally.
pub fn v_star(family: &ReferenceFamily, selection: &Selection) -> Result<u32, BoundError> {
    let eval = ForestEvaluator::new(family)?;
    Ok(eval.bound(selection))
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

/// `V*(S)` by maximizing `|S ∩ A|` over all `2^m` candidate sets `A`
/// satisfying the family constraints. Only for `m ≤ 20`.
pub fn v_star_bruteforce(
    family: &ReferenceFamily,
    selection: &Selection,
) -> Result<u32, BoundError> {
    let m = family.m();
    if m > BRUTEFORCE_MAX_M {
        return Err(BoundError::ProblemTooLarge { m });
    }
    let mut region_masks = Vec::with_capacity(family.len());
    for member in family.members() {
        let mut mask = 0u32;
        for &i in member.region().indices() {
            mask |= 1 << (i - 1);
        }
        region_masks.push((mask, member.zeta()));
    }
    let mut s_mask = 0u32;
    for &i in selection.indices() {
        s_mask |= 1 << (i - 1);
    }
    let mut best = 0u32;
    for a in 0u64..(1u64 << m) {
        let a = a as u32;
        if region_masks
            .iter()
            .all(|&(mask, zeta)| (a & mask).count_ones() <= zeta)
        {
            best = best.max((a & s_mask).count_ones());
        }
    }
    Ok(best)
}
