//! Random-instance generators for the acceptance suite, driven by the
//! crate's deterministic `SplitMix64` so every failure reproduces.

use posthoc_core::bounds::Selection;
use posthoc_core::rng::SplitMix64;
use posthoc_core::{ReferenceFamily, Region};

/// The m = 4 family of three pairwise-overlapping triples with unit budgets.
pub fn overlapping_triple() -> ReferenceFamily {
    let members = vec![
        (Region::new(vec![1, 2, 4]).unwrap(), 1),
        (Region::new(vec![2, 3, 4]).unwrap(), 1),
        (Region::new(vec![1, 3, 4]).unwrap(), 1),
    ];
    ReferenceFamily::new(4, members).unwrap()
}

fn shuffled(rng: &mut SplitMix64, m: u32) -> Vec<u32> {
    let mut pool: Vec<u32> = (1..=m).collect();
    for i in (1..pool.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        pool.swap(i, j);
    }
    pool
}

fn carve(rng: &mut SplitMix64, elements: &[u32], depth: u32, out: &mut Vec<Vec<u32>>) {
    if elements.is_empty() || depth > 4 {
        return;
    }
    if rng.below(100) < 70 {
        out.push(elements.to_vec());
    }
    if elements.len() < 2 {
        return;
    }
    let n_chunks = 2 + rng.below(2) as usize;
    let mut chunks: Vec<Vec<u32>> = vec![Vec::new(); n_chunks];
    for &e in elements {
        let slot = rng.below(n_chunks as u64 + 1) as usize;
        if slot < n_chunks {
            chunks[slot].push(e);
        }
    }
    for chunk in chunks {
        if !chunk.is_empty() && chunk.len() < elements.len() {
            carve(rng, &chunk, depth + 1, out);
        }
    }
}

/// Random forest family over arbitrary sets with budgets uniform in
/// `0..=|R|`; at least one member.
pub fn gen_forest_family(rng: &mut SplitMix64, m_max: u32, k_max: usize) -> ReferenceFamily {
    let m = 2 + rng.below(m_max as u64 - 1) as u32;
    let pool = shuffled(rng, m);
    let keep = 1 + rng.below(m as u64) as usize;
    let ground: Vec<u32> = pool[..keep].to_vec();

    let mut regions: Vec<Vec<u32>> = Vec::new();
    carve(rng, &ground, 0, &mut regions);
    if regions.is_empty() {
        regions.push(ground);
    }
    let mut sorted: Vec<Vec<u32>> = regions
        .into_iter()
        .map(|mut r| {
            r.sort_unstable();
            r
        })
        .collect();
    sorted.sort();
    sorted.dedup();
    for i in (1..sorted.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        sorted.swap(i, j);
    }
    sorted.truncate(k_max);

    let members = sorted
        .into_iter()
        .map(|r| {
            let zeta = rng.below(r.len() as u64 + 1) as u32;
            (Region::new(r).unwrap(), zeta)
        })
        .collect();
    ReferenceFamily::new(m, members).unwrap()
}

/// Random family with no structural constraint.
pub fn gen_any_family(rng: &mut SplitMix64, m_max: u32, k_max: usize) -> ReferenceFamily {
    let m = 2 + rng.below(m_max as u64 - 1) as u32;
    let available = ((1u64 << m.min(20)) - 1).min(k_max as u64);
    let k = 1 + rng.below(available) as usize;
    let mut regions: Vec<Vec<u32>> = Vec::new();
    while regions.len() < k {
        let r: Vec<u32> = (1..=m).filter(|_| rng.below(100) < 40).collect();
        if r.is_empty() || regions.contains(&r) {
            continue;
        }
        regions.push(r);
    }
    let members = regions
        .into_iter()
        .map(|r| {
            let zeta = rng.below(r.len() as u64 + 1) as u32;
            (Region::new(r).unwrap(), zeta)
        })
        .collect();
    ReferenceFamily::new(m, members).unwrap()
}

/// Random nested chain.
pub fn gen_nested_family(rng: &mut SplitMix64, m_max: u32, k_max: usize) -> ReferenceFamily {
    let m = 2 + rng.below(m_max as u64 - 1) as u32;
    let pool = shuffled(rng, m);
    let k = 1 + rng.below(k_max.min(m as usize) as u64) as usize;
    let mut sizes: Vec<usize> = (0..k).map(|_| 1 + rng.below(m as u64) as usize).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let members = sizes
        .into_iter()
        .map(|sz| {
            let zeta = rng.below(sz as u64 + 1) as u32;
            (Region::new(pool[..sz].to_vec()).unwrap(), zeta)
        })
        .collect();
    ReferenceFamily::new(m, members).unwrap()
}

/// Random pairwise-disjoint family, not necessarily covering `1..=m`.
pub fn gen_disjoint_family(rng: &mut SplitMix64, m_max: u32, k_max: usize) -> ReferenceFamily {
    let m = 2 + rng.below(m_max as u64 - 1) as u32;
    let pool = shuffled(rng, m);
    let k = 1 + rng.below(k_max as u64) as usize;
    let mut members = Vec::new();
    let mut cursor = 0usize;
    for _ in 0..k {
        if cursor >= pool.len() {
            break;
        }
        let take = 1 + rng.below((pool.len() - cursor).min(5) as u64) as usize;
        let zeta = rng.below(take as u64 + 1) as u32;
        members.push((Region::new(pool[cursor..cursor + take].to_vec()).unwrap(), zeta));
        cursor += take + rng.below(3) as usize;
    }
    if members.is_empty() {
        members.push((Region::new(vec![pool[0]]).unwrap(), 1));
    }
    ReferenceFamily::new(m, members).unwrap()
}

/// Random selection over `1..=m`; occasionally empty or full.
pub fn gen_selection(rng: &mut SplitMix64, m: u32) -> Selection {
    match rng.below(10) {
        0 => Selection::empty(),
        1 => Selection::all(m),
        _ => {
            let p = 10 + rng.below(81);
            Selection::new((1..=m).filter(|_| rng.below(100) < p).collect()).unwrap()
        }
    }
}
