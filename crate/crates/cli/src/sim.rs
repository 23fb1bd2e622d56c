//! Driver for the simulation experiment: per-replicate envelopes for the
//! oracle, Simes, partition, tree and hybrid bounds, their means, and the
//! joint error rate of the tree family.
//!
//! Replicates are distributed over worker threads in contiguous chunks;
//! every statistic is keyed by `(seed, rep, i)`, so the written bytes do not
//! depend on the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use posthoc_core::calibration::{
    calibrate_family, CalibrationConfig, CalibrationMethod, PValueVector,
};
use posthoc_core::family::Region;
use posthoc_core::simulation::{
    build_partition_regions, build_tree_regions, envelope, generate_instance, jer_violates,
    Envelope, EnvelopeMethod, SimulationConfig,
};

use crate::error::CliError;
use crate::formats::g17;

pub const ENVELOPE_HEADER: &str = "k,oracle,simes,part,tree,hybrid";

#[derive(Debug, Clone)]
pub struct SimulateSpec {
    pub config: SimulationConfig,
    pub gamma: f64,
    pub method: CalibrationMethod,
}

#[derive(Debug, Clone)]
pub struct RepOutput {
    pub oracle: Envelope,
    pub simes: Envelope,
    pub part: Envelope,
    pub tree: Envelope,
    pub hybrid: Envelope,
    pub violated: bool,
}

#[derive(Debug, Serialize)]
pub struct CoverageReport {
    pub alpha: f64,
    pub reps: u32,
    pub violations: u32,
    pub rate: f64,
}

#[derive(Debug)]
pub struct SimulationFiles {
    pub rep_files: Vec<PathBuf>,
    pub mean_file: PathBuf,
    pub coverage_file: PathBuf,
    pub violations: u32,
}

/// Worker count: `POSTHOC_THREADS` when set, machine parallelism otherwise.
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("POSTHOC_THREADS") {
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| CliError::domain(format!("POSTHOC_THREADS = {raw:?} is not a number")))?;
            if n == 0 {
                return Err(CliError::domain("POSTHOC_THREADS must be at least 1"));
            }
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// One replicate: all five envelopes plus the tree-family coverage event.
pub fn run_replicate(
    spec: &SimulateSpec,
    part_regions: &[Region],
    tree_regions: &[Region],
    rep: u32,
) -> Result<RepOutput, CliError> {
    let (pvalues, mask) = generate_instance(&spec.config, rep)?;
    let alpha = spec.config.alpha;

    let oracle = envelope(&pvalues, EnvelopeMethod::Oracle, Some(&mask))?;
    let simes = envelope(&pvalues, EnvelopeMethod::Simes { alpha }, None)?;

    let part_family = calibrate_family(
        part_regions,
        &pvalues,
        &CalibrationConfig::new(alpha, part_regions.len(), spec.method),
    )?;
    let part = envelope(&pvalues, EnvelopeMethod::Forest { family: &part_family }, None)?;

    let tree_family = calibrate_family(
        tree_regions,
        &pvalues,
        &CalibrationConfig::new(alpha, tree_regions.len(), spec.method),
    )?;
    let tree = envelope(&pvalues, EnvelopeMethod::Forest { family: &tree_family }, None)?;

    let hybrid = hybrid_envelope(spec, tree_regions, &pvalues, &simes, &tree)?;
    let violated = jer_violates(&tree_family, &mask);

    Ok(RepOutput {
        oracle,
        simes,
        part,
        tree,
        hybrid,
        violated,
    })
}

fn hybrid_envelope(
    spec: &SimulateSpec,
    tree_regions: &[Region],
    pvalues: &PValueVector,
    simes_at_alpha: &Envelope,
    tree_at_alpha: &Envelope,
) -> Result<Envelope, CliError> {
    let alpha = spec.config.alpha;
    let gamma = spec.gamma;
    if gamma == 0.0 {
        return Ok(simes_at_alpha.clone());
    }
    if gamma == 1.0 {
        return Ok(tree_at_alpha.clone());
    }
    let simes_side = envelope(
        pvalues,
        EnvelopeMethod::Simes { alpha: (1.0 - gamma) * alpha },
        None,
    )?;
    let tree_family = calibrate_family(
        tree_regions,
        pvalues,
        &CalibrationConfig::new(gamma * alpha, tree_regions.len(), spec.method),
    )?;
    let tree_side = envelope(pvalues, EnvelopeMethod::Forest { family: &tree_family }, None)?;
    Ok(simes_side.pointwise_min(&tree_side))
}

/// Run all replicates on `threads` workers, preserving replicate order.
pub fn run_all_replicates(
    spec: &SimulateSpec,
    threads: usize,
) -> Result<Vec<RepOutput>, CliError> {
    spec.config.validate()?;
    if !(0.0..=1.0).contains(&spec.gamma) || !spec.gamma.is_finite() {
        return Err(CliError::domain(format!(
            "gamma = {} is not in [0, 1]",
            spec.gamma
        )));
    }
    let part_regions = build_partition_regions(spec.config.m, spec.config.s)?;
    let tree_regions = build_tree_regions(spec.config.m, spec.config.q)?;

    let reps = spec.config.reps as usize;
    let workers = threads.clamp(1, reps.max(1));
    let chunk = reps.div_ceil(workers);
    let mut slots: Vec<Option<Result<RepOutput, CliError>>> = Vec::new();
    slots.resize_with(reps, || None);

    std::thread::scope(|scope| {
        for (piece_idx, piece) in slots.chunks_mut(chunk).enumerate() {
            let base = piece_idx * chunk;
            let part_regions = &part_regions;
            let tree_regions = &tree_regions;
            scope.spawn(move || {
                for (offset, slot) in piece.iter_mut().enumerate() {
                    let rep = (base + offset) as u32;
                    *slot = Some(run_replicate(spec, part_regions, tree_regions, rep));
                }
            });
        }
    });

    let mut outputs = Vec::with_capacity(reps);
    for slot in slots {
        outputs.push(slot.expect("every replicate slot is filled")?);
    }
    Ok(outputs)
}

fn rep_csv(rep: &RepOutput) -> String {
    let m = rep.oracle.len();
    let mut out = String::with_capacity(16 * m);
    out.push_str(ENVELOPE_HEADER);
    out.push('\n');
    for i in 0..m {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i + 1,
            rep.oracle.values()[i],
            rep.simes.values()[i],
            rep.part.values()[i],
            rep.tree.values()[i],
            rep.hybrid.values()[i],
        ));
    }
    out
}

fn mean_csv(outputs: &[RepOutput]) -> String {
    let m = outputs[0].oracle.len();
    let reps = outputs.len() as f64;
    let mut sums = vec![[0u64; 5]; m];
    for rep in outputs {
        for (i, row) in sums.iter_mut().enumerate() {
            row[0] += rep.oracle.values()[i] as u64;
            row[1] += rep.simes.values()[i] as u64;
            row[2] += rep.part.values()[i] as u64;
            row[3] += rep.tree.values()[i] as u64;
            row[4] += rep.hybrid.values()[i] as u64;
        }
    }
    let mut out = String::with_capacity(48 * m);
    out.push_str(ENVELOPE_HEADER);
    out.push('\n');
    for (i, row) in sums.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i + 1,
            g17(row[0] as f64 / reps),
            g17(row[1] as f64 / reps),
            g17(row[2] as f64 / reps),
            g17(row[3] as f64 / reps),
            g17(row[4] as f64 / reps),
        ));
    }
    out
}

/// Run the experiment and write per-replicate envelopes, the mean envelope
/// and the coverage report into `out_dir`.
pub fn run_simulation(
    spec: &SimulateSpec,
    out_dir: &Path,
    threads: usize,
) -> Result<SimulationFiles, CliError> {
    let outputs = run_all_replicates(spec, threads)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let mut rep_files = Vec::with_capacity(outputs.len());
    for (rep, output) in outputs.iter().enumerate() {
        let path = out_dir.join(format!("envelope_rep_{:04}.csv", rep + 1));
        fs::write(&path, rep_csv(output)).map_err(|e| CliError::io(&path, e))?;
        rep_files.push(path);
    }

    let mean_file = out_dir.join("envelope_mean.csv");
    fs::write(&mean_file, mean_csv(&outputs)).map_err(|e| CliError::io(&mean_file, e))?;

    let violations = outputs.iter().filter(|o| o.violated).count() as u32;
    let report = CoverageReport {
        alpha: spec.config.alpha,
        reps: spec.config.reps,
        violations,
        rate: violations as f64 / spec.config.reps as f64,
    };
    let coverage_file = out_dir.join("coverage.json");
    let mut json = serde_json::to_string(&report).expect("coverage serializes");
    json.push('\n');
    fs::write(&coverage_file, json).map_err(|e| CliError::io(&coverage_file, e))?;

    Ok(SimulationFiles {
        rep_files,
        mean_file,
        coverage_file,
        violations,
    })
}
