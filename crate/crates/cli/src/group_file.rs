use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use maxaut_core::params::{validate_params, GroupParams, PcPresentation};
use maxaut_core::pcgroup::check_consistency;
use serde::{Deserialize, Serialize};

/// On-disk group: parameters, the presentation they build, and the outcome
/// of the consistency check.
#[derive(Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub params: GroupParams,
    pub presentation: PcPresentation,
    pub consistent: bool,
}

impl GroupFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group file serializes") + "\n"
    }
}

/// A group read back from disk with parameters re-validated and the
/// presentation re-checked, so a hand-edited file cannot slip through.
pub struct LoadedGroup {
    pub params: GroupParams,
    pub pres: PcPresentation,
    pub consistent: bool,
}

pub fn load(path: &Path) -> Result<LoadedGroup> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: GroupFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let p = file.params;
    let params = validate_params(p.family, p.p, p.a, p.b, p.c, p.strict)?;
    let raw = file.presentation;
    let mut pres = PcPresentation::new(raw.p, raw.bounds, raw.tail_x, raw.tail_y, raw.tail_z)?;
    let consistent = check_consistency(&mut pres).consistent;
    Ok(LoadedGroup {
        params,
        pres,
        consistent,
    })
}
