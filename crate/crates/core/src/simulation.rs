//! Seeded Gaussian test bed and evaluation harness.
//!
//! The generative model: hypotheses `1..=m` split into `2^q` atoms of size
//! `s`; the first `K₁` atoms (or `K₁` evenly scattered ones) carry signal in
//! their leading `⌈r·s⌉` positions. Null test statistics are `N(0,1)`,
//! signal statistics `N(μ̄,1)`, and p-values are the upper tail `Φ̄(Xᵢ)`.
//! Every statistic is a pure function of `(seed, rep, i)`, so replicates are
//! reproducible and order-independent.
//!
//! On top of the model: reference-region builders (regular partition and
//! perfect binary tree), confidence envelopes over the nested top-k
//! selections `S_k`, a Monte Carlo estimate of the joint error rate, and the
//! analytic DKW/Simes comparison curve.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bounds::{BoundError, ForestEvaluator, Selection};
use crate::calibration::{
    calibrate_family, CalibrationConfig, CalibrationError, CalibrationMethod, NullMask,
    PValueVector,
};
use crate::family::ReferenceFamily;
use crate::family::Region;
use crate::normal;
use crate::rng;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationError {
    /// Partition regions need `s` to divide `m`.
    SNotDividingM { m: u32, s: u32 },
    /// Tree regions need `2^q` to divide `m`.
    QNotCompatible { m: u32, q: u32 },
    /// A configuration field is out of its domain.
    InvalidConfig { reason: &'static str },
    /// The joint error rate estimate needs at least 100 replicates.
    RepsTooSmall { reps: u32 },
    /// The oracle envelope needs the ground-truth mask.
    MaskRequiredForOracle,
    /// Two inputs disagree on `m`.
    LengthMismatch { expected: u32, got: u32 },
    /// The comparison-curve denominator vanished.
    DomainError { mu: f64 },
    Calibration(CalibrationError),
    Bound(BoundError),
}

impl fmt::Display for SimulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SNotDividingM { m, s } => write!(f, "block size {s} does not divide m = {m}"),
            Self::QNotCompatible { m, q } => {
                write!(f, "2^{q} leaves are not compatible with m = {m}")
            }
            Self::InvalidConfig { reason } => write!(f, "invalid configuration: {reason}"),
            Self::RepsTooSmall { reps } => {
                write!(f, "coverage estimation needs reps >= 100, got {reps}")
            }
            Self::MaskRequiredForOracle => {
                write!(f, "the oracle envelope needs the true null mask")
            }
            Self::LengthMismatch { expected, got } => {
                write!(f, "inputs disagree on m: {expected} vs {got}")
            }
            Self::DomainError { mu } => {
                write!(f, "comparison denominator is not positive at mu = {mu}")
            }
            Self::Calibration(e) => write!(f, "{e}"),
            Self::Bound(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimulationError {}

impl From<CalibrationError> for SimulationError {
    fn from(e: CalibrationError) -> Self {
        Self::Calibration(e)
    }
}

impl From<BoundError> for SimulationError {
    fn from(e: BoundError) -> Self {
        Self::Bound(e)
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Where the `K₁` signal atoms sit among the `2^q` atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalLayout {
    /// Atoms `1..=K₁`; contiguous signal favors the multiscale tree regions.
    Adjacent,
    /// Evenly spread over the atom range.
    Scattered,
}

/// Parameters of the generative model and of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub m: u32,
    /// Atom size; `m = s · 2^q`.
    pub s: u32,
    /// Tree depth; the partition has `2^q` blocks.
    pub q: u32,
    /// Number of atoms carrying signal.
    pub k1: u32,
    /// Fraction of signal inside each signal atom, in `(0, 1]`.
    pub r: f64,
    /// Effect size of the signal statistics.
    pub mu: f64,
    pub alpha: f64,
    pub seed: u64,
    pub reps: u32,
    pub layout: SignalLayout,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let fail = |reason| Err(SimulationError::InvalidConfig { reason });
        if self.m == 0 || self.s == 0 {
            return fail("m and s must be positive");
        }
        if self.q >= 31 {
            return fail("q must be below 31");
        }
        let atoms = 1u32 << self.q;
        if self.s.checked_mul(atoms) != Some(self.m) {
            return fail("m must equal s * 2^q");
        }
        if self.k1 > atoms {
            return fail("K1 must not exceed 2^q");
        }
        if !(self.r > 0.0 && self.r <= 1.0) {
            return fail("r must be in (0, 1]");
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return fail("mu must be finite and non-negative");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must be in (0, 1)");
        }
        if self.reps == 0 {
            return fail("reps must be positive");
        }
        Ok(())
    }

    /// Non-nulls per signal atom: `⌈r·s⌉`, with a tolerance so that an exact
    /// product like `0.9 · 100` is not pushed to 91 by rounding.
    pub fn signal_per_atom(&self) -> u32 {
        let raw = self.r * self.s as f64;
        (libm::ceil(raw - 1e-9).max(1.0) as u32).min(self.s)
    }

    /// Total number of non-null hypotheses.
    pub fn signal_count(&self) -> u32 {
        self.k1 * self.signal_per_atom()
    }

    fn signal_atoms(&self) -> Vec<u32> {
        let atoms = 1u32 << self.q;
        match self.layout {
            SignalLayout::Adjacent => (0..self.k1).collect(),
            SignalLayout::Scattered => (0..self.k1)
                .map(|j| (j as u64 * atoms as u64 / self.k1.max(1) as u64) as u32)
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

/// Draw one replicate: p-values and the ground-truth null mask.
///
/// Statistic `i` of replicate `rep` is `Φ̄⁻¹(u) + μ̄·1{non-null}` with
/// `u = uniform(seed, rep, i)`, mapped back through `p = Φ̄(X)`. Identical
/// `(config, rep)` always reproduce the same bits.
pub fn generate_instance(
    config: &SimulationConfig,
    rep: u32,
) -> Result<(PValueVector, NullMask), SimulationError> {
    config.validate()?;
    let m = config.m as usize;
    let mut is_null = vec![true; m];
    let per_atom = config.signal_per_atom();
    for atom in config.signal_atoms() {
        let base = atom as usize * config.s as usize;
        for offset in 0..per_atom as usize {
            is_null[base + offset] = false;
        }
    }
    let mut values = Vec::with_capacity(m);
    for (i, &null) in is_null.iter().enumerate() {
        let u = rng::uniform_keyed(config.seed, rep as u64, i as u64);
        let mut x = normal::survival_inv(u);
        if !null {
            x += config.mu;
        }
        values.push(normal::survival(x));
    }
    Ok((PValueVector::new(values)?, NullMask::new(is_null)))
}

// ---------------------------------------------------------------------------
// Reference regions
// ---------------------------------------------------------------------------

/// The regular partition `R_k = {1+(k-1)s, …, ks}`, `k = 1..=m/s`.
pub fn build_partition_regions(m: u32, s: u32) -> Result<Vec<Region>, SimulationError> {
    if s == 0 || m == 0 || !m.is_multiple_of(s) {
        return Err(SimulationError::SNotDividingM { m, s });
    }
    Ok((0..m / s)
        .map(|b| Region::from_sorted_unchecked((b * s + 1..=(b + 1) * s).collect()))
        .collect())
}

/// The perfect binary tree over the regular partition with `2^q` leaves:
/// all `2^(q+1) - 1` dyadic blocks, root first, then level by level.
pub fn build_tree_regions(m: u32, q: u32) -> Result<Vec<Region>, SimulationError> {
    if m == 0 || q >= 31 || !m.is_multiple_of(1u32 << q) {
        return Err(SimulationError::QNotCompatible { m, q });
    }
    let mut regions = Vec::with_capacity((1usize << (q + 1)) - 1);
    for level in 0..=q {
        let blocks = 1u32 << level;
        let width = m / blocks;
        for b in 0..blocks {
            regions.push(Region::from_sorted_unchecked(
                (b * width + 1..=(b + 1) * width).collect(),
            ));
        }
    }
    Ok(regions)
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

/// Hypothesis indices sorted by ascending p-value, ties by index.
pub fn sort_order(pvalues: &PValueVector) -> Vec<u32> {
    let mut order: Vec<u32> = (1..=pvalues.m()).collect();
    order.sort_by(|&a, &b| pvalues.get(a).total_cmp(&pvalues.get(b)).then(a.cmp(&b)));
    order
}

/// A confidence envelope: `values[k-1]` bounds the false positives of the
/// top-k selection `S_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    values: Vec<u32>,
}

impl Envelope {
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(k, V(S_k))` pairs, `k = 1..`.
    pub fn points(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v))
    }

    /// Certified true discoveries `k - V(S_k)` along the envelope.
    pub fn true_discovery_curve(&self) -> Vec<u32> {
        self.points().map(|(k, v)| k - v).collect()
    }

    /// Pointwise minimum of two envelopes of the same length.
    pub fn pointwise_min(&self, other: &Envelope) -> Envelope {
        debug_assert_eq!(self.len(), other.len());
        Envelope {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        }
    }
}

/// Which bound an envelope evaluates.
#[derive(Debug, Clone, Copy)]
pub enum EnvelopeMethod<'a> {
    /// The true count `|S_k ∩ H₀|`; needs the mask.
    Oracle,
    Simes { alpha: f64 },
    Bonferroni { alpha: f64 },
    /// The optimal forest bound of an already calibrated family.
    Forest { family: &'a ReferenceFamily },
}

/// Evaluate a bound along the nested top-k selections of `pvalues`.
pub fn envelope(
    pvalues: &PValueVector,
    method: EnvelopeMethod<'_>,
    mask: Option<&NullMask>,
) -> Result<Envelope, SimulationError> {
    let order = sort_order(pvalues);
    let values = match method {
        EnvelopeMethod::Oracle => {
            let mask = mask.ok_or(SimulationError::MaskRequiredForOracle)?;
            if mask.m() != pvalues.m() {
                return Err(SimulationError::LengthMismatch {
                    expected: pvalues.m(),
                    got: mask.m(),
                });
            }
            oracle_envelope(&order, mask)
        }
        EnvelopeMethod::Simes { alpha } => simes_envelope(pvalues, alpha),
        EnvelopeMethod::Bonferroni { alpha } => bonferroni_envelope(pvalues, &order, alpha),
        EnvelopeMethod::Forest { family } => {
            if family.m() != pvalues.m() {
                return Err(SimulationError::LengthMismatch {
                    expected: pvalues.m(),
                    got: family.m(),
                });
            }
            ForestEvaluator::new(family)?.envelope(&order)
        }
    };
    Ok(Envelope { values })
}

/// Evaluate an arbitrary bound on every prefix of `order`. Quadratic; meant
/// for cross-checks, not production envelopes.
pub fn envelope_with<F: FnMut(&Selection) -> u32>(order: &[u32], mut eval: F) -> Envelope {
    let values = (1..=order.len())
        .map(|k| {
            let sel = Selection::new(order[..k].to_vec()).expect("order indices are valid");
            eval(&sel)
        })
        .collect();
    Envelope { values }
}

fn oracle_envelope(order: &[u32], mask: &NullMask) -> Vec<u32> {
    let mut nulls = 0u32;
    order
        .iter()
        .map(|&i| {
            if mask.is_null(i) {
                nulls += 1;
            }
            nulls
        })
        .collect()
}

fn bonferroni_envelope(pvalues: &PValueVector, order: &[u32], alpha: f64) -> Vec<u32> {
    let threshold = alpha / pvalues.m() as f64;
    let mut above = 0u32;
    order
        .iter()
        .map(|&i| {
            if pvalues.get(i) > threshold {
                above += 1;
            }
            above
        })
        .collect()
}

/// Simes along all top-k selections in `O(m)` after sorting.
///
/// With `cnt_j = #{i : p_i ≤ αj/m}` the Simes value at `S_k` splits into
/// `min_j` over two regimes: `j` with `cnt_j ≥ k` contributes `j - 1`
/// (first such `j` wins) and `j` with `cnt_j < k` contributes
/// `k + (j - 1 - cnt_j)`; both sides advance monotonically with `k`.
fn simes_envelope(pvalues: &PValueVector, alpha: f64) -> Vec<u32> {
    let m = pvalues.m() as usize;
    let mut sorted: Vec<f64> = pvalues.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut cnt = vec![0u32; m + 1];
    let mut below = 0usize;
    for (j, slot) in cnt.iter_mut().enumerate().skip(1) {
        let threshold = alpha * j as f64 / m as f64;
        while below < m && sorted[below] <= threshold {
            below += 1;
        }
        *slot = below as u32;
    }
    let mut out = Vec::with_capacity(m);
    let mut jptr = 1usize;
    let mut running = i64::MAX;
    for k in 1..=m {
        while jptr <= m && cnt[jptr] < k as u32 {
            running = running.min(jptr as i64 - 1 - cnt[jptr] as i64);
            jptr += 1;
        }
        let via_large = if jptr <= m { (jptr - 1) as i64 } else { i64::MAX };
        let via_small = if running == i64::MAX {
            i64::MAX
        } else {
            k as i64 + running
        };
        let v = via_large.min(via_small);
        debug_assert!((0..=k as i64).contains(&v));
        out.push(v as u32);
    }
    out
}

// ---------------------------------------------------------------------------
// Joint error rate
// ---------------------------------------------------------------------------

/// The event controlled by the joint error rate: some region holds more true
/// nulls than its budget.
pub fn jer_violates(family: &ReferenceFamily, mask: &NullMask) -> bool {
    family
        .members()
        .iter()
        .any(|mb| mask.nulls_in(mb.region()) > mb.zeta())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JerEstimate {
    pub violations: u32,
    pub reps: u32,
    pub rate: f64,
}

/// Monte Carlo estimate of the joint error rate of the calibrated family
/// over `config.reps` replicates (at least 100).
pub fn jer_empirical(
    config: &SimulationConfig,
    regions: &[Region],
    method: CalibrationMethod,
) -> Result<JerEstimate, SimulationError> {
    config.validate()?;
    if config.reps < 100 {
        return Err(SimulationError::RepsTooSmall { reps: config.reps });
    }
    let calib = CalibrationConfig::new(config.alpha, regions.len(), method);
    let mut violations = 0u32;
    for rep in 0..config.reps {
        let (pvalues, mask) = generate_instance(config, rep)?;
        let family = calibrate_family(regions, &pvalues, &calib)?;
        if jer_violates(&family, &mask) {
            violations += 1;
        }
    }
    Ok(JerEstimate {
        violations,
        reps: config.reps,
        rate: violations as f64 / config.reps as f64,
    })
}

// ---------------------------------------------------------------------------
// Analytic comparison curve
// ---------------------------------------------------------------------------

/// Parameters of the expected-value comparison between the DKW partition
/// bound and the Simes bound on the signal region. `s` and `K` may be
/// non-integral (the reference setting uses `s = m^(2/3)`).
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurveInput {
    pub m: f64,
    pub s: f64,
    pub k: f64,
    pub r: f64,
    pub alpha: f64,
    pub mu_grid: Vec<f64>,
}

impl RatioCurveInput {
    fn validate(&self) -> Result<(), SimulationError> {
        let fail = |reason| Err(SimulationError::InvalidConfig { reason });
        if !(self.m.is_finite() && self.m > 0.0 && self.s.is_finite() && self.s > 0.0) {
            return fail("m and s must be positive");
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return fail("K must be positive");
        }
        if libm::fabs(self.k * self.s / self.m - 1.0) > 1e-6 {
            return fail("K must equal m/s");
        }
        if !(0.0..=1.0).contains(&self.r) {
            return fail("r must be in [0, 1]");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must be in (0, 1)");
        }
        let tail = self.alpha * self.s / self.m;
        if !(tail > 0.0 && tail < 1.0) {
            return fail("alpha*s/m must be in (0, 1)");
        }
        if self.mu_grid.is_empty() {
            return fail("mu grid must be non-empty");
        }
        if self.mu_grid.iter().any(|mu| !mu.is_finite()) {
            return fail("mu grid must be finite");
        }
        Ok(())
    }
}

/// Upper bound on `E[V_DKW(R₁)] / E[V_Simes(R₁)]` as a function of the
/// effect size:
///
/// ```text
/// numerator   = 1 ∧ (1 - r + 2r·Φ̄(μ) + (4C/√s)(1 + C/√s)),
/// denominator = (1-r)(1 - αs/m) + r·Φ̄(μ - Φ̄⁻¹(αs/m)),
/// ```
///
/// with `C = √(log(K/α)/2)`. Values below 1 are the regime where the
/// partition bound improves on Simes.
pub fn ratio_curve(input: &RatioCurveInput) -> Result<Vec<(f64, f64)>, SimulationError> {
    input.validate()?;
    let c = libm::sqrt(0.5 * libm::log(input.k / input.alpha));
    let root_s = libm::sqrt(input.s);
    let slack = (4.0 * c / root_s) * (1.0 + c / root_s);
    let tail = input.alpha * input.s / input.m;
    let quantile = normal::survival_inv(tail);
    let mut out = Vec::with_capacity(input.mu_grid.len());
    for &mu in &input.mu_grid {
        let numerator =
            (1.0 - input.r + 2.0 * input.r * normal::survival(mu) + slack).min(1.0);
        let denominator = (1.0 - input.r) * (1.0 - tail)
            + input.r * normal::survival(mu - quantile);
        if denominator <= 0.0 {
            return Err(SimulationError::DomainError { mu });
        }
        out.push((mu, numerator / denominator));
    }
    Ok(out)
}
