//! Local budgets `ζ_k` from p-values, and the classical post hoc bounds.
//!
//! The budget for a region with p-values `p_1, …, p_s` is the DKW-type
//! deviation bound
//!
//! ```text
//! ζ = s ∧ min_{t ∈ [0,1)} ⌊( C/(2(1-t)) + √( C²/(4(1-t)²) + N_t/(1-t) ) )²⌋,
//! ```
//!
//! with `N_t = #{p_i > t}` and `C = √(log(K/α)/2)`. The minimum over `t` is
//! attained at an order statistic, so the implementation scans
//! `t ∈ {0, p_(1), …, p_(s)}`. A union bound over the `K` regions then gives
//! joint coverage of the whole family at level `α` (for deterministic
//! regions, superuniform independent null p-values).
//!
//! The floor is applied to the *square* of the deviation expression. Applying
//! it inside the square would shrink the bound below the quantity the
//! deviation inequality actually controls and break coverage; the outer floor
//! keeps the bound valid while still returning an integer.
//!
//! [`gw_zeta`] is the older Genovese–Wasserman form `⌊(N_t + √s·C)/(1-t)⌋`,
//! never smaller than [`dkw_zeta`]. [`simes_bound`], [`bonferroni_bound`]
//! and [`hybrid_bound`] are the comparison bounds used in the experiments.

use alloc::vec::Vec;
use core::fmt;

use crate::bounds::{v_star, BoundError, Selection};
use crate::family::{FamilyError, ReferenceFamily, Region};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationError {
    /// A p-value was not a finite number in `[0, 1]`.
    InvalidPValue { index: usize, value: f64 },
    /// `alpha` outside `(0, 1)`.
    InvalidAlpha { alpha: f64 },
    /// The union bound needs `alpha / K < 1/2`.
    AlphaTooLarge { alpha: f64, k: usize },
    /// `config.k` does not match the number of regions supplied.
    KMismatch { config_k: usize, regions: usize },
    /// `gamma` outside `[0, 1]`.
    GammaOutOfRange { gamma: f64 },
    Family(FamilyError),
    Bound(BoundError),
}

impl fmt::Display for CalibrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidPValue { index, value } => {
                write!(f, "p-value {value} at position {index} is not in [0, 1]")
            }
            Self::InvalidAlpha { alpha } => write!(f, "alpha = {alpha} is not in (0, 1)"),
            Self::AlphaTooLarge { alpha, k } => {
                write!(f, "alpha/K = {alpha}/{k} must be below 1/2")
            }
            Self::KMismatch { config_k, regions } => {
                write!(f, "config says K = {config_k} but {regions} regions were given")
            }
            Self::GammaOutOfRange { gamma } => write!(f, "gamma = {gamma} is not in [0, 1]"),
            Self::Family(e) => write!(f, "{e}"),
            Self::Bound(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CalibrationError {}

impl From<FamilyError> for CalibrationError {
    fn from(e: FamilyError) -> Self {
        Self::Family(e)
    }
}

impl From<BoundError> for CalibrationError {
    fn from(e: BoundError) -> Self {
        Self::Bound(e)
    }
}

// ---------------------------------------------------------------------------
// PValueVector and NullMask
// ---------------------------------------------------------------------------

/// The `m` observed p-values, 1-based like hypothesis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector {
    values: Vec<f64>,
}

impl PValueVector {
    pub fn new(values: Vec<f64>) -> Result<Self, CalibrationError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(CalibrationError::InvalidPValue { index: index + 1, value });
            }
        }
        Ok(Self { values })
    }

    pub fn m(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// P-value of hypothesis `index` (1-based).
    pub fn get(&self, index: u32) -> f64 {
        self.values[index as usize - 1]
    }

    /// P-values of the hypotheses in `region`, in region order.
    pub fn restrict(&self, region: &Region) -> Vec<f64> {
        region.indices().iter().map(|&i| self.get(i)).collect()
    }
}

/// Ground-truth labels: `true` means the hypothesis is a true null.
/// Known only in simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullMask {
    is_null: Vec<bool>,
}

impl NullMask {
    pub fn new(is_null: Vec<bool>) -> Self {
        Self { is_null }
    }

    pub fn m(&self) -> u32 {
        self.is_null.len() as u32
    }

    /// Whether hypothesis `index` (1-based) is a true null.
    pub fn is_null(&self, index: u32) -> bool {
        self.is_null[index as usize - 1]
    }

    pub fn null_count(&self) -> u32 {
        self.is_null.iter().filter(|&&b| b).count() as u32
    }

    /// `|R ∩ H₀|` for a region.
    pub fn nulls_in(&self, region: &Region) -> u32 {
        region.indices().iter().filter(|&&i| self.is_null(i)).count() as u32
    }
}

// ---------------------------------------------------------------------------
// Local budgets
// ---------------------------------------------------------------------------

/// Which deviation bound produces the budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMethod {
    /// DKW with Massart's constant, the tighter of the two.
    Dkw,
    /// The Genovese–Wasserman bound.
    Gw,
}

impl CalibrationMethod {
    pub fn zeta(self, region_pvalues: &[f64], c: f64) -> u32 {
        match self {
            Self::Dkw => dkw_zeta(region_pvalues, c),
            Self::Gw => gw_zeta(region_pvalues, c),
        }
    }
}

/// Target level and family size for budget calibration; the deviation
/// constant is `C = √(log(K/α)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    pub alpha: f64,
    pub k: usize,
    pub method: CalibrationMethod,
}

impl CalibrationConfig {
    pub fn new(alpha: f64, k: usize, method: CalibrationMethod) -> Self {
        Self { alpha, k, method }
    }

    /// `C = √(log(K/α)/2)`; the budgets depend on `(K, α)` only through this.
    pub fn deviation_constant(&self) -> f64 {
        libm::sqrt(0.5 * libm::log(self.k as f64 / self.alpha))
    }
}

/// DKW budget for one region's p-values.
///
/// Scans `t ∈ {0, p_(1), …, p_(s)}` (order statistics below 1; `t = 0` is
/// always admissible) and minimizes
/// `⌊( C/(2(1-t)) + √( C²/(4(1-t)²) + (s-ℓ)/(1-t) ) )²⌋`, then caps at `s`.
pub fn dkw_zeta(region_pvalues: &[f64], c: f64) -> u32 {
    let s = region_pvalues.len();
    if s == 0 {
        return 0;
    }
    let mut sorted = region_pvalues.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut best = s as f64;
    for level in 0..=s {
        let t = if level == 0 { 0.0 } else { sorted[level - 1] };
        if t >= 1.0 {
            continue;
        }
        let inv = 1.0 / (1.0 - t);
        let half = 0.5 * c * inv;
        let expr = half + libm::sqrt(half * half + (s - level) as f64 * inv);
        best = best.min(libm::floor(expr * expr));
    }
    best.min(s as f64) as u32
}

/// Genovese–Wasserman budget: `s ∧ min_t ⌊(N_t + √s·C)/(1-t)⌋` over the same
/// candidate `t` values, with `N_t = #{p_i > t}`.
pub fn gw_zeta(region_pvalues: &[f64], c: f64) -> u32 {
    let s = region_pvalues.len();
    if s == 0 {
        return 0;
    }
    let mut sorted = region_pvalues.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let root_s_c = libm::sqrt(s as f64) * c;
    let mut best = s as f64;
    for level in 0..=s {
        let t = if level == 0 { 0.0 } else { sorted[level - 1] };
        if t >= 1.0 {
            continue;
        }
        let n_t = (s - sorted.partition_point(|&p| p <= t)) as f64;
        best = best.min(libm::floor((n_t + root_s_c) / (1.0 - t)));
    }
    best.min(s as f64) as u32
}

/// Attach calibrated budgets to deterministic regions.
///
/// The coverage statement requires the regions to have been chosen without
/// looking at the p-values; that is a usage contract this function cannot
/// check.
pub fn calibrate_family(
    regions: &[Region],
    pvalues: &PValueVector,
    config: &CalibrationConfig,
) -> Result<ReferenceFamily, CalibrationError> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(CalibrationError::InvalidAlpha { alpha: config.alpha });
    }
    if config.k != regions.len() {
        return Err(CalibrationError::KMismatch {
            config_k: config.k,
            regions: regions.len(),
        });
    }
    if regions.is_empty() || config.alpha / config.k as f64 >= 0.5 {
        return Err(CalibrationError::AlphaTooLarge {
            alpha: config.alpha,
            k: config.k,
        });
    }
    let c = config.deviation_constant();
    let members = regions
        .iter()
        .map(|region| {
            let zeta = config.method.zeta(&pvalues.restrict(region), c);
            (region.clone(), zeta)
        })
        .collect();
    Ok(ReferenceFamily::new(pvalues.m(), members)?)
}

// ---------------------------------------------------------------------------
// Classical bounds
// ---------------------------------------------------------------------------

/// Simes post hoc bound:
/// `min_{1≤k≤m} Σ_{i∈S} 1{p_i > αk/m} + k - 1`, clamped to `[0, |S|]`.
pub fn simes_bound(pvalues: &PValueVector, selection: &Selection, alpha: f64) -> u32 {
    let m = pvalues.m() as usize;
    let mut ps: Vec<f64> = selection.indices().iter().map(|&i| pvalues.get(i)).collect();
    ps.sort_unstable_by(f64::total_cmp);
    let n = ps.len();
    let mut best = n as u64;
    let mut below = 0usize;
    for k in 1..=m {
        let threshold = alpha * k as f64 / m as f64;
        while below < n && ps[below] <= threshold {
            below += 1;
        }
        best = best.min((n - below) as u64 + k as u64 - 1);
    }
    best.min(n as u64) as u32
}

/// Bonferroni post hoc bound: `Σ_{i∈S} 1{p_i > α/m}`.
pub fn bonferroni_bound(pvalues: &PValueVector, selection: &Selection, alpha: f64) -> u32 {
    let threshold = alpha / pvalues.m() as f64;
    selection
        .indices()
        .iter()
        .filter(|&&i| pvalues.get(i) > threshold)
        .count() as u32
}

/// Hybrid bound: the minimum of the Simes bound at level `(1-γ)α` and the
/// DKW tree bound at level `γα`; valid at level `α` by a union bound. At
/// `γ = 0` (resp. `γ = 1`) the degenerate tree (resp. Simes) side is taken
/// as the trivial bound `|S|`.
pub fn hybrid_bound(
    pvalues: &PValueVector,
    tree_regions: &[Region],
    selection: &Selection,
    alpha: f64,
    gamma: f64,
) -> Result<u32, CalibrationError> {
    if !(0.0..=1.0).contains(&gamma) || !gamma.is_finite() {
        return Err(CalibrationError::GammaOutOfRange { gamma });
    }
    let simes_side = if gamma == 1.0 {
        selection.len() as u32
    } else {
        simes_bound(pvalues, selection, (1.0 - gamma) * alpha)
    };
    let tree_side = if gamma == 0.0 {
        selection.len() as u32
    } else {
        let config = CalibrationConfig::new(gamma * alpha, tree_regions.len(), CalibrationMethod::Dkw);
        let family = calibrate_family(tree_regions, pvalues, &config)?;
        v_star(&family, selection)?
    };
    Ok(simes_side.min(tree_side))
}
