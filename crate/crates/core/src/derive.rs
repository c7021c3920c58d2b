//! Derived embeddings on `Z_n` and certificates for biembedding pairs.
//!
//! The rotation at vertex `i` is the log of circuit `[i mod 3]` with `i`
//! added to every entry. KCL at every (cubic) current graph vertex makes all
//! derived faces triangles; the certificate checks this directly by tracing
//! rather than trusting the argument.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::current::{
    check_kcl, check_pair, check_simplicity, label_circuits, label_circuits_with, CurrentError,
    CurrentGraph, Label, LabeledCircuits, Labeling, PairReport,
};
use crate::topology::{
    euler_genus, is_connected, trace_faces, Dart, EmbeddedMultigraph, TopologyError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeriveError {
    ModulusNotMultipleOfThree(u32),
    /// A log contains 0 or repeats a residue.
    InvalidLog { label: Label, residue: u32 },
    /// `j` is listed at `i` but `i` is not listed at `j`, or a rotation
    /// names its own vertex, repeats a neighbor, or leaves `Z_n`.
    BadAdjacency { vertex: u32, neighbor: u32 },
    /// `4` does not divide `(v - 6) m`.
    NotDivisible { vertices: u64, m: u64 },
}

impl fmt::Display for DeriveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeriveError::ModulusNotMultipleOfThree(n) => {
                write!(f, "modulus {n} is not a positive multiple of 3")
            }
            DeriveError::InvalidLog { label, residue } => {
                write!(f, "log of circuit {label} has invalid or repeated entry {residue}")
            }
            DeriveError::BadAdjacency { vertex, neighbor } => {
                write!(f, "rotation at {vertex} lists {neighbor}, which does not list it back once")
            }
            DeriveError::NotDivisible { vertices, m } => {
                write!(f, "4 does not divide ({vertices} - 6) * {m}")
            }
        }
    }
}

/// Rotation system of a simple graph on `0..n`, given as cyclic neighbor
/// lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborRotations {
    rotations: Vec<Vec<u32>>,
}

impl NeighborRotations {
    pub fn new(rotations: Vec<Vec<u32>>) -> Self {
        NeighborRotations { rotations }
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn rotation(&self, vertex: usize) -> &[u32] {
        &self.rotations[vertex]
    }

    pub fn rotations(&self) -> &[Vec<u32>] {
        &self.rotations
    }

    /// Common degree, or `None` if the degrees differ.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.rotations.first()?.len();
        self.rotations.iter().all(|r| r.len() == d).then_some(d)
    }

    /// Sorted list of unordered edges `(i, j)`, `i < j`, one per listing of
    /// `j` at `i` with `i < j`.
    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (i, rot) in self.rotations.iter().enumerate() {
            for &j in rot {
                if (i as u32) < j {
                    edges.push((i as u32, j));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Materializes the rotation system as an embedded graph. Edge ids are
    /// assigned in order of first appearance scanning vertices upward.
    pub fn to_embedded(&self) -> Result<EmbeddedMultigraph, DeriveError> {
        let n = self.rotations.len();
        // per vertex: (neighbor, slot), sorted, to find the reverse slot
        let mut index: Vec<Vec<(u32, u32)>> = Vec::with_capacity(n);
        for (i, rot) in self.rotations.iter().enumerate() {
            let mut pairs: Vec<(u32, u32)> =
                rot.iter().enumerate().map(|(p, &j)| (j, p as u32)).collect();
            pairs.sort_unstable();
            for w in pairs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(DeriveError::BadAdjacency { vertex: i as u32, neighbor: w[0].0 });
                }
            }
            for &(j, _) in &pairs {
                if j as usize >= n || j as usize == i {
                    return Err(DeriveError::BadAdjacency { vertex: i as u32, neighbor: j });
                }
            }
            index.push(pairs);
        }
        let mut darts: Vec<Vec<Option<Dart>>> =
            self.rotations.iter().map(|r| vec![None; r.len()]).collect();
        let mut edges = Vec::new();
        for (i, rot) in self.rotations.iter().enumerate() {
            for (p, &j) in rot.iter().enumerate() {
                if (j as usize) < i {
                    continue;
                }
                let back = index[j as usize]
                    .binary_search_by_key(&(i as u32), |&(k, _)| k)
                    .map_err(|_| DeriveError::BadAdjacency { vertex: i as u32, neighbor: j })?;
                let q = index[j as usize][back].1 as usize;
                let e = edges.len();
                edges.push((i, j as usize));
                darts[i][p] = Some(Dart::plus(e));
                darts[j as usize][q] = Some(Dart::minus(e));
            }
        }
        let mut rotations = Vec::with_capacity(n);
        for (i, slots) in darts.into_iter().enumerate() {
            let mut rot = Vec::with_capacity(slots.len());
            for (p, d) in slots.into_iter().enumerate() {
                match d {
                    Some(d) => rot.push(d),
                    None => {
                        return Err(DeriveError::BadAdjacency {
                            vertex: i as u32,
                            neighbor: self.rotations[i][p],
                        })
                    }
                }
            }
            rotations.push(rot);
        }
        Ok(EmbeddedMultigraph::new(n, edges, rotations)
            .expect("adjacency checked symmetric and loop-free"))
    }
}

/// The derived embedding of a labeled index-3 current graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedEmbedding {
    modulus: u32,
    logs: [Vec<u32>; 3],
}

impl DerivedEmbedding {
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn logs(&self) -> &[Vec<u32>; 3] {
        &self.logs
    }

    /// Neighbors of `vertex` in rotation order.
    pub fn rotation(&self, vertex: u32) -> Vec<u32> {
        let n = self.modulus;
        self.logs[(vertex % 3) as usize]
            .iter()
            .map(|&c| (vertex + c) % n)
            .collect()
    }

    pub fn to_rotations(&self) -> NeighborRotations {
        NeighborRotations::new((0..self.modulus).map(|i| self.rotation(i)).collect())
    }
}

pub fn derive(circuits: &LabeledCircuits, modulus: u32) -> Result<DerivedEmbedding, DeriveError> {
    if modulus == 0 || !modulus.is_multiple_of(3) {
        return Err(DeriveError::ModulusNotMultipleOfThree(modulus));
    }
    let mut logs: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for label in Label::ALL {
        let mut seen = vec![false; modulus as usize];
        for &c in &circuits.logs()[label.index()] {
            let r = c % modulus;
            if r == 0 || core::mem::replace(&mut seen[r as usize], true) {
                return Err(DeriveError::InvalidLog { label, residue: r });
            }
            logs[label.index()].push(r);
        }
    }
    Ok(DerivedEmbedding { modulus, logs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedReport {
    pub vertices: usize,
    /// Edge count, when the adjacency is symmetric.
    pub edges: Option<usize>,
    pub faces: Option<usize>,
    pub triangular: bool,
    /// Omitted when disconnected or not materializable.
    pub genus: Option<usize>,
    pub connected: bool,
    /// Common degree, `-1` if not regular.
    pub regular_degree: i64,
}

pub fn verify_derived(de: &DerivedEmbedding) -> DerivedReport {
    verify_rotations(&de.to_rotations())
}

/// Face-traces an arbitrary neighbor rotation system.
pub fn verify_rotations(rot: &NeighborRotations) -> DerivedReport {
    let regular_degree = rot.regular_degree().map_or(-1, |d| d as i64);
    let vertices = rot.vertex_count();
    match rot.to_embedded() {
        Ok(emb) => {
            let faces = trace_faces(&emb);
            let connected = is_connected(&emb);
            let genus = match euler_genus(&emb) {
                Ok(g) => Some(g),
                Err(TopologyError::Disconnected) => None,
                Err(e) => unreachable!("euler_genus: {e}"),
            };
            DerivedReport {
                vertices,
                edges: Some(emb.edge_count()),
                faces: Some(faces.len()),
                triangular: !faces.is_empty() && faces.iter().all(|f| f.len() == 3),
                genus,
                connected,
                regular_degree,
            }
        }
        Err(_) => DerivedReport {
            vertices,
            edges: None,
            faces: None,
            triangular: false,
            genus: None,
            connected: loose_connected(rot),
            regular_degree,
        },
    }
}

/// Connectivity of the graph underlying possibly asymmetric neighbor lists.
fn loose_connected(rot: &NeighborRotations) -> bool {
    let n = rot.vertex_count();
    if n == 0 {
        return false;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, r) in rot.rotations().iter().enumerate() {
        for &j in r {
            if (j as usize) < n {
                adj[i].push(j as usize);
                adj[j as usize].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Genus `(v - 6) m / 4 + 1` of the derived embedding of an index-3 current
/// graph with `v` vertices over `Z_{3m}`, assuming that embedding is
/// connected.
pub fn genus_formula(vertices: u64, m: u64) -> Result<i64, DeriveError> {
    let num = (vertices as i128 - 6) * m as i128;
    if num % 4 != 0 {
        return Err(DeriveError::NotDivisible { vertices, m });
    }
    Ok((num / 4 + 1) as i64)
}

/// For each edge, the labels of the circuits traversing `e+` and `e-`.
pub fn classify_edges(cg: &CurrentGraph, circuits: &LabeledCircuits) -> Vec<(Label, Label)> {
    (0..cg.embedding().edge_count())
        .map(|e| (circuits.label_of(Dart::plus(e)), circuits.label_of(Dart::minus(e))))
        .collect()
}

/// A property that failed while certifying a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    ModulusMismatch { a: u32, b: u32 },
    Labeling { side: Side, error: CurrentError },
    Kcl { side: Side },
    RepeatedLogEntry { side: Side },
    Pairing,
    Derive { side: Side, error: DeriveError },
    NotTriangular { side: Side },
    Disconnected { side: Side },
    GenusMismatch { side: Side, traced: usize, formula: Option<i64> },
    Partition,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::ModulusMismatch { a, b } => write!(f, "current groups differ: Z_{a} vs Z_{b}"),
            Failure::Labeling { side, error } => write!(f, "{side}: {error}"),
            Failure::Kcl { side } => write!(f, "{side}: not cubic or KCL fails"),
            Failure::RepeatedLogEntry { side } => write!(f, "{side}: a log repeats a residue"),
            Failure::Pairing => write!(f, "logs of the pair do not partition Z_n \\ {{0}}"),
            Failure::Derive { side, error } => write!(f, "{side}: {error}"),
            Failure::NotTriangular { side } => write!(f, "{side}: derived embedding not triangular"),
            Failure::Disconnected { side } => write!(f, "{side}: derived embedding disconnected"),
            Failure::GenusMismatch { side, traced, formula } => match formula {
                Some(g) => write!(f, "{side}: traced genus {traced}, formula gives {g}"),
                None => write!(f, "{side}: traced genus {traced}, formula not integral"),
            },
            Failure::Partition => write!(f, "derived edge sets do not partition K_n"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "graph A"),
            Side::B => write!(f, "graph B"),
        }
    }
}

/// Per-graph part of a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideCertificate {
    pub vertices: usize,
    pub index3: bool,
    pub kcl: bool,
    pub simple_logs: bool,
    pub labeled: bool,
    pub labeling: Option<Labeling>,
    pub alternatives: Vec<Labeling>,
    pub logs: Option<[Vec<u32>; 3]>,
    pub derived: Option<DerivedReport>,
    pub formula_genus: Option<i64>,
}

impl SideCertificate {
    pub fn genus(&self) -> Option<usize> {
        self.derived.as_ref().and_then(|d| d.genus)
    }

    pub fn triangular(&self) -> bool {
        self.derived.as_ref().is_some_and(|d| d.triangular)
    }

    pub fn connected(&self) -> bool {
        self.derived.as_ref().is_some_and(|d| d.connected)
    }

    pub fn genus_agrees(&self) -> bool {
        matches!((self.genus(), self.formula_genus), (Some(g), Some(f)) if g as i64 == f)
    }
}

/// Machine-checkable record that two current graphs generate a triangular
/// biembedding of `K_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiembeddingCertificate {
    pub n: u32,
    pub a: SideCertificate,
    pub b: SideCertificate,
    pub pair: Option<PairReport>,
    pub partition_ok: bool,
    /// Edges present in both derived embeddings.
    pub duplicate_edges: Vec<(u32, u32)>,
    /// Edges of `K_n` present in neither.
    pub missing_edges: Vec<(u32, u32)>,
    pub failures: Vec<Failure>,
}

impl BiembeddingCertificate {
    pub fn e1(&self) -> bool {
        self.a.index3 && self.b.index3
    }
    pub fn e2(&self) -> bool {
        self.a.kcl && self.b.kcl
    }
    pub fn e3(&self) -> bool {
        self.a.simple_logs && self.b.simple_logs
    }
    pub fn e4(&self) -> bool {
        self.a.labeled && self.b.labeled
    }
    pub fn e5(&self) -> bool {
        self.pair.as_ref().is_some_and(|p| p.e5)
    }
    pub fn e6(&self) -> bool {
        self.a.vertices == self.b.vertices
    }

    /// Everything except equal vertex counts holds: the pair is a
    /// triangular `(genus_a, genus_b)`-biembedding of `K_n`.
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    /// Valid and both halves on the same surface.
    pub fn is_equal_genus(&self) -> bool {
        self.is_valid() && self.e6()
    }
}

fn certify_side(
    cg: &CurrentGraph,
    side: Side,
    circuits: Result<LabeledCircuits, CurrentError>,
    failures: &mut Vec<Failure>,
) -> (SideCertificate, Option<DerivedEmbedding>) {
    let n = cg.modulus();
    let kcl = check_kcl(cg);
    if !kcl {
        failures.push(Failure::Kcl { side });
    }
    let mut cert = SideCertificate {
        vertices: cg.vertex_count(),
        index3: !matches!(circuits, Err(CurrentError::WrongIndex { .. })),
        kcl,
        simple_logs: false,
        labeled: circuits.is_ok(),
        labeling: None,
        alternatives: Vec::new(),
        logs: None,
        derived: None,
        formula_genus: genus_formula(cg.vertex_count() as u64, (n / 3) as u64).ok(),
    };
    let lc = match circuits {
        Ok(lc) => lc,
        Err(error) => {
            failures.push(Failure::Labeling { side, error });
            return (cert, None);
        }
    };
    cert.simple_logs = check_simplicity(&lc, n);
    if !cert.simple_logs {
        failures.push(Failure::RepeatedLogEntry { side });
    }
    cert.labeling = Some(lc.labeling());
    cert.alternatives = lc.alternatives().to_vec();
    cert.logs = Some(lc.logs().clone());
    let de = match derive(&lc, n) {
        Ok(de) => de,
        Err(error) => {
            failures.push(Failure::Derive { side, error });
            return (cert, None);
        }
    };
    let report = verify_derived(&de);
    if !report.triangular {
        failures.push(Failure::NotTriangular { side });
    }
    if !report.connected {
        failures.push(Failure::Disconnected { side });
    }
    if let Some(g) = report.genus {
        if cert.formula_genus != Some(g as i64) {
            failures.push(Failure::GenusMismatch {
                side,
                traced: g,
                formula: cert.formula_genus,
            });
        }
    }
    cert.derived = Some(report);
    (cert, Some(de))
}

/// Runs the whole pipeline on both graphs and compares the derived edge
/// sets. Semantic failures are collected in the certificate, never returned
/// as errors.
///
/// Labeling: A gets its lexicographically least valid labeling; B gets the
/// least of its valid labelings under which the logs pair up with A's,
/// falling back to its least one.
pub fn verify_biembedding(a: &CurrentGraph, b: &CurrentGraph) -> BiembeddingCertificate {
    let mut failures = Vec::new();
    let n = a.modulus();
    if a.modulus() != b.modulus() {
        failures.push(Failure::ModulusMismatch { a: a.modulus(), b: b.modulus() });
    }
    let lc_a = label_circuits(a);
    let mut lc_b = label_circuits(b);
    if let (Ok(la), Ok(lb)) = (&lc_a, &lc_b) {
        let better = lb.alternatives().iter().find_map(|&alt| {
            let cand = label_circuits_with(b, alt).ok()?;
            check_pair(la, &cand, n, a.vertex_count(), b.vertex_count())
                .e5
                .then_some(cand)
        });
        if let Some(cand) = better {
            lc_b = Ok(cand);
        }
    }
    let pair = match (&lc_a, &lc_b) {
        (Ok(la), Ok(lb)) if a.modulus() == b.modulus() => {
            Some(check_pair(la, lb, n, a.vertex_count(), b.vertex_count()))
        }
        _ => None,
    };
    let (cert_a, de_a) = certify_side(a, Side::A, lc_a, &mut failures);
    let (cert_b, de_b) = certify_side(b, Side::B, lc_b, &mut failures);
    if pair.as_ref().is_some_and(|p| !p.e5) {
        failures.push(Failure::Pairing);
    }

    let mut partition_ok = false;
    let mut duplicate_edges = Vec::new();
    let mut missing_edges = Vec::new();
    if let (Some(da), Some(db)) = (&de_a, &de_b) {
        if a.modulus() == b.modulus() {
            let ra = da.to_rotations();
            let rb = db.to_rotations();
            let symmetric = ra.to_embedded().is_ok() && rb.to_embedded().is_ok();
            let ea = ra.edge_list();
            let eb = rb.edge_list();
            let (dup, missing) = compare_with_complete(n, &ea, &eb);
            partition_ok = symmetric && dup.is_empty() && missing.is_empty();
            duplicate_edges = dup;
            missing_edges = missing;
        }
    }
    if !partition_ok {
        failures.push(Failure::Partition);
    }
    BiembeddingCertificate {
        n,
        a: cert_a,
        b: cert_b,
        pair,
        partition_ok,
        duplicate_edges,
        missing_edges,
        failures,
    }
}

type Edge = (u32, u32);

/// Edges listed more than once across both lists, and edges of `K_n`
/// listed nowhere. Both lists sorted.
fn compare_with_complete(
    n: u32,
    a: &[(u32, u32)],
    b: &[(u32, u32)],
) -> (Vec<Edge>, Vec<Edge>) {
    let mut all: Vec<(u32, u32)> = a.iter().chain(b.iter()).copied().collect();
    all.sort_unstable();
    let mut dup = Vec::new();
    let mut missing = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut count = 0;
            while k < all.len() && all[k] < (i, j) {
                k += 1;
            }
            while k < all.len() && all[k] == (i, j) {
                count += 1;
                k += 1;
            }
            match count {
                0 => missing.push((i, j)),
                1 => {}
                _ => dup.push((i, j)),
            }
        }
    }
    (dup, missing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_formula_values() {
        assert_eq!(genus_formula(10, 7), Ok(8));
        assert_eq!(genus_formula(6, 7), Ok(1));
        assert_eq!(genus_formula(14, 7), Ok(15));
        assert_eq!(
            genus_formula(11, 7),
            Err(DeriveError::NotDivisible { vertices: 11, m: 7 })
        );
        // (12s + 4) (8s + 7) / 4 + 1 = (3s + 1)(8s + 7) + 1 = 24s^2 + 29s + 8
        for s in 0..=100i64 {
            let v = (12 * s + 10) as u64;
            let m = (8 * s + 7) as u64;
            let expanded = (3 * s + 1) * (8 * s + 7) + 1;
            assert_eq!(genus_formula(v, m), Ok(expanded));
            assert_eq!(expanded, 24 * s * s + 29 * s + 8);
        }
    }

    #[test]
    fn k7_difference_rotation() {
        // classical triangular torus embedding of K_7
        let rot = NeighborRotations::new(
            (0..7u32)
                .map(|i| [1u32, 3, 2, 6, 4, 5].iter().map(|c| (i + c) % 7).collect())
                .collect(),
        );
        let r = verify_rotations(&rot);
        assert_eq!(r.genus, Some(1));
        assert!(r.triangular && r.connected);
        assert_eq!(r.regular_degree, 6);
        assert_eq!((r.edges, r.faces), (Some(21), Some(14)));
    }

    #[test]
    fn asymmetric_rotation_is_rejected() {
        let mut rots: Vec<Vec<u32>> = (0..7u32)
            .map(|i| [1u32, 3, 2, 6, 4, 5].iter().map(|c| (i + c) % 7).collect())
            .collect();
        rots[0].pop();
        let r = verify_rotations(&NeighborRotations::new(rots));
        assert_eq!(r.regular_degree, -1);
        assert!(!r.triangular);
        assert!(r.connected);
        assert_eq!(r.genus, None);
    }

    #[test]
    fn bad_neighbors() {
        let self_loop = NeighborRotations::new(vec![vec![0, 1], vec![0]]);
        assert!(matches!(
            self_loop.to_embedded(),
            Err(DeriveError::BadAdjacency { vertex: 0, neighbor: 0 })
        ));
        let repeat = NeighborRotations::new(vec![vec![1, 1], vec![0]]);
        assert!(repeat.to_embedded().is_err());
        let out_of_range = NeighborRotations::new(vec![vec![5], vec![0]]);
        assert!(out_of_range.to_embedded().is_err());
    }

    #[test]
    fn complete_comparison() {
        let (dup, missing) = compare_with_complete(4, &[(0, 1), (0, 2)], &[(0, 2), (1, 2), (2, 3)]);
        assert_eq!(dup, vec![(0, 2)]);
        assert_eq!(missing, vec![(0, 3), (1, 3)]);
    }
}
