//! JSON certificates. Field order is fixed by the struct layout, so equal
//! inputs give byte-identical documents.

use biembed_core::derive::{BiembeddingCertificate, SideCertificate};
use biembed_core::search::SearchStats;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerSide<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub n: u32,
    #[serde(rename = "vA")]
    pub v_a: usize,
    #[serde(rename = "vB")]
    pub v_b: usize,
    #[serde(rename = "E1")]
    pub e1: bool,
    #[serde(rename = "E2")]
    pub e2: bool,
    #[serde(rename = "E3")]
    pub e3: bool,
    #[serde(rename = "E4")]
    pub e4: bool,
    #[serde(rename = "E5")]
    pub e5: bool,
    #[serde(rename = "E6")]
    pub e6: bool,
    /// Logs of circuits `[0]`, `[1]`, `[2]` of each graph.
    pub logs: PerSide<Option<[Vec<u32>; 3]>>,
    pub genera: PerSide<Option<usize>>,
    pub triangular: PerSide<bool>,
    pub connected: PerSide<bool>,
    #[serde(rename = "partitionOK")]
    pub partition_ok: bool,
    pub valid: bool,
    pub failures: Vec<String>,
    /// Per label, residues found in both `[k]` logs.
    #[serde(rename = "duplicatedResidues")]
    pub duplicated_residues: [Vec<u32>; 3],
    /// Per label, residues found in neither `[k]` log.
    #[serde(rename = "missingResidues")]
    pub missing_residues: [Vec<u32>; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub forced: u64,
    pub verified: u64,
    pub rejected: u64,
    pub variants: usize,
    #[serde(rename = "variantsSearched")]
    pub variants_searched: usize,
    #[serde(rename = "elapsedMs")]
    pub elapsed_ms: u128,
}

impl Stats {
    pub fn new(s: &SearchStats, variants: usize, variants_searched: usize, elapsed_ms: u128) -> Self {
        Stats {
            nodes: s.nodes,
            forced: s.forced,
            verified: s.verified,
            rejected: s.rejected,
            variants,
            variants_searched,
            elapsed_ms,
        }
    }
}

fn side<T>(cert: &BiembeddingCertificate, f: impl Fn(&SideCertificate) -> T) -> PerSide<T> {
    PerSide {
        a: f(&cert.a),
        b: f(&cert.b),
    }
}

impl Certificate {
    pub fn from_core(cert: &BiembeddingCertificate) -> Self {
        let coverage = |pick: fn(&biembed_core::current::LabelCoverage) -> &Vec<u32>| {
            [0, 1, 2].map(|k| {
                cert.pair
                    .as_ref()
                    .map(|p| pick(&p.coverage[k]).clone())
                    .unwrap_or_default()
            })
        };
        Certificate {
            n: cert.n,
            v_a: cert.a.vertices,
            v_b: cert.b.vertices,
            e1: cert.e1(),
            e2: cert.e2(),
            e3: cert.e3(),
            e4: cert.e4(),
            e5: cert.e5(),
            e6: cert.e6(),
            logs: side(cert, |s| s.logs.clone()),
            genera: side(cert, SideCertificate::genus),
            triangular: side(cert, SideCertificate::triangular),
            connected: side(cert, SideCertificate::connected),
            partition_ok: cert.partition_ok,
            valid: cert.is_valid(),
            failures: cert.failures.iter().map(ToString::to_string).collect(),
            duplicated_residues: coverage(|c| &c.duplicated),
            missing_residues: coverage(|c| &c.missing),
            stats: None,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}
