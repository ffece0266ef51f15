//! Machine-readable reports: stable JSON schema with the exact bounds
//! used, so bounded claims are reproducible run to run.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::csm::ExplorationResult;
use crate::restrictions::RestrictionVerdict;

pub const TOOL_NAME: &str = "chanres";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct InputDesc {
    pub source: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

/// Every bound that influenced the run. A null `max_b` means the
/// bound search was not capped.
#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub max_b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub depth: usize,
    pub channel_cap: usize,
    pub max_len: usize,
    pub unroll: u32,
    pub closure_budget: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplorationSummary {
    pub configurations: usize,
    pub finite_traces: usize,
    pub lassos: usize,
    pub depth_hit: bool,
    pub cap_hit_channels: Vec<String>,
}

impl ExplorationSummary {
    pub fn new(r: &ExplorationResult) -> Self {
        ExplorationSummary {
            configurations: r.configurations.len(),
            finite_traces: r.finite_traces.len(),
            lassos: r.lassos.len(),
            depth_hit: r.depth_hit,
            cap_hit_channels: r.cap_hit_channels.iter().map(|c| c.to_string()).collect(),
        }
    }
}

/// The check/classify report. Serialized with stable field order;
/// `timing_ms` stays null unless timing was requested, keeping reports
/// byte-identical for fixed inputs and bounds.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input: InputDesc,
    pub bounds: Bounds,
    pub verdicts: Vec<RestrictionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploration: Option<ExplorationSummary>,
    pub timing_ms: Option<u64>,
}

impl Report {
    /// 0 when every verdict holds definitively, 1 on any violation,
    /// 2 when all hold but some only up to a bound.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|v| !v.holds) {
            1
        } else if self.verdicts.iter().any(|v| v.bounded_claim) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restrictions::Property;

    #[test]
    fn exit_codes() {
        let verdict = |holds, bounded_claim| RestrictionVerdict {
            property: Property::HalfDuplex,
            holds,
            bounded_claim,
            witness: None,
        };
        let report = |verdicts| Report {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "classify".into(),
            input: InputDesc {
                source: "-".into(),
                kind: "word".into(),
                sha256: None,
            },
            bounds: Bounds {
                max_b: Some(4),
                k: None,
                depth: 12,
                channel_cap: 6,
                max_len: 12,
                unroll: 3,
                closure_budget: 1000,
            },
            verdicts,
            exploration: None,
            timing_ms: None,
        };
        assert_eq!(report(vec![verdict(true, false)]).exit_code(), 0);
        assert_eq!(report(vec![verdict(true, true)]).exit_code(), 2);
        assert_eq!(report(vec![verdict(false, false), verdict(true, true)]).exit_code(), 1);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
