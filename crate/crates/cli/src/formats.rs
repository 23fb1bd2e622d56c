//! On-disk formats: the family JSON schema, p-value files and selection
//! files.
//!
//! Family JSON:
//!
//! ```json
//! {"m": 4, "members": [{"indices": [1, 2, 4], "zeta": 1},
//!                      {"indices": [3], "zeta": null}]}
//! ```
//!
//! Indices are 1-based; `zeta` may be `null` before calibration. P-value
//! files carry one decimal per line (line number = hypothesis index);
//! selection files one 1-based index per line.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use posthoc_core::bounds::Selection;
use posthoc_core::calibration::PValueVector;
use posthoc_core::{ReferenceFamily, Region};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub m: u32,
    pub members: Vec<MemberFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberFile {
    pub indices: Vec<i64>,
    pub zeta: Option<i64>,
}

impl FamilyFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))
    }

    pub fn from_family(family: &ReferenceFamily) -> Self {
        Self {
            m: family.m(),
            members: family
                .members()
                .iter()
                .map(|mb| MemberFile {
                    indices: mb.region().indices().iter().map(|&i| i as i64).collect(),
                    zeta: Some(mb.zeta() as i64),
                })
                .collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("family serializes");
        out.push('\n');
        out
    }

    fn region_of(member: &MemberFile) -> Result<Region, CliError> {
        let mut indices = Vec::with_capacity(member.indices.len());
        for &raw in &member.indices {
            if raw < 1 || raw > u32::MAX as i64 {
                return Err(CliError::domain(format!(
                    "hypothesis index {raw} is out of range"
                )));
            }
            indices.push(raw as u32);
        }
        Ok(Region::new(indices)?)
    }

    /// Regions only; budgets are ignored (calibration input).
    pub fn to_regions(&self) -> Result<Vec<Region>, CliError> {
        self.members.iter().map(Self::region_of).collect()
    }

    /// Full family; every member must carry a budget.
    pub fn to_family(&self) -> Result<ReferenceFamily, CliError> {
        let mut members = Vec::with_capacity(self.members.len());
        for (pos, member) in self.members.iter().enumerate() {
            let region = Self::region_of(member)?;
            let zeta = member.zeta.ok_or_else(|| {
                CliError::domain(format!("member {} has no zeta; calibrate first", pos + 1))
            })?;
            if zeta < 0 {
                return Err(CliError::domain(format!(
                    "member {} has negative zeta {zeta}",
                    pos + 1
                )));
            }
            let zeta = zeta.min(u32::MAX as i64) as u32;
            members.push((region, zeta));
        }
        Ok(ReferenceFamily::new(self.m, members)?)
    }

    /// Family for structure-only operations: missing budgets become the
    /// vacuous `ζ = |R|`.
    pub fn to_family_structure(&self) -> Result<ReferenceFamily, CliError> {
        let mut members = Vec::with_capacity(self.members.len());
        for (pos, member) in self.members.iter().enumerate() {
            let region = Self::region_of(member)?;
            let zeta = match member.zeta {
                None => region.len() as u32,
                Some(z) if z < 0 => {
                    return Err(CliError::domain(format!(
                        "member {} has negative zeta {z}",
                        pos + 1
                    )))
                }
                Some(z) => z.min(u32::MAX as i64) as u32,
            };
            members.push((region, zeta));
        }
        Ok(ReferenceFamily::new(self.m, members)?)
    }
}

/// One decimal per line; the line number is the 1-based hypothesis index.
pub fn read_pvalues(path: &Path) -> Result<PValueVector, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Err(CliError::parse(path, format!("empty line {}", lineno + 1)));
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|e| CliError::parse(path, format!("line {}: {e}", lineno + 1)))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::parse(path, "no p-values".to_string()));
    }
    Ok(PValueVector::new(values)?)
}

/// One 1-based hypothesis index per line; duplicates collapse.
pub fn read_selection(path: &Path, m: u32) -> Result<Selection, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut indices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let index: u32 = trimmed
            .parse()
            .map_err(|e| CliError::parse(path, format!("line {}: {e}", lineno + 1)))?;
        indices.push(index);
    }
    let selection = Selection::new(indices)?;
    selection.check_within(m)?;
    Ok(selection)
}

/// Floating-point formatting with 17 significant digits, so output files are
/// byte-stable and full precision is preserved.
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}
