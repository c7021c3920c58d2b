//! Current graphs over `Z_n` with `3 | n`, their circuits and logs, and the
//! per-graph and pairwise checks on them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::topology::{face_of_darts, trace_faces, Dart, EmbeddedMultigraph, FaceWalk};

/// Circuit label `[0]`, `[1]` or `[2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(u8);

impl Label {
    pub const ZERO: Label = Label(0);
    pub const ONE: Label = Label(1);
    pub const TWO: Label = Label(2);
    pub const ALL: [Label; 3] = [Label::ZERO, Label::ONE, Label::TWO];

    pub fn new(k: usize) -> Option<Label> {
        (k < 3).then_some(Label(k as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurrentError {
    ModulusNotMultipleOfThree(u32),
    CurrentCount { expected: usize, found: usize },
    ZeroCurrent { edge: usize },
    CurrentOutOfRange { edge: usize, value: u32 },
    /// The embedding does not have exactly three faces.
    WrongIndex { faces: usize },
    NoConsistentLabeling,
}

impl fmt::Display for CurrentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurrentError::ModulusNotMultipleOfThree(n) => {
                write!(f, "current group Z_{n}: modulus must be a positive multiple of 3")
            }
            CurrentError::CurrentCount { expected, found } => {
                write!(f, "expected {expected} currents, found {found}")
            }
            CurrentError::ZeroCurrent { edge } => write!(f, "edge {edge} carries current 0"),
            CurrentError::CurrentOutOfRange { edge, value } => {
                write!(f, "edge {edge} carries current {value}, outside 1..n-1")
            }
            CurrentError::WrongIndex { faces } => {
                write!(f, "current graph has index {faces}, expected 3")
            }
            CurrentError::NoConsistentLabeling => {
                write!(f, "no labeling of the circuits is consistent with the currents mod 3")
            }
        }
    }
}

/// An embedded multigraph whose darts carry nonzero currents in `Z_n`.
///
/// Only the `e+` current is stored; `current(e-) = n - current(e+)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurrentGraph {
    emb: EmbeddedMultigraph,
    modulus: u32,
    currents: Vec<u32>,
}

impl CurrentGraph {
    /// `currents[e]` is the current on `e+`, in `1..modulus`.
    pub fn new(
        emb: EmbeddedMultigraph,
        modulus: u32,
        currents: Vec<u32>,
    ) -> Result<Self, CurrentError> {
        if modulus == 0 || !modulus.is_multiple_of(3) {
            return Err(CurrentError::ModulusNotMultipleOfThree(modulus));
        }
        if currents.len() != emb.edge_count() {
            return Err(CurrentError::CurrentCount {
                expected: emb.edge_count(),
                found: currents.len(),
            });
        }
        for (edge, &value) in currents.iter().enumerate() {
            if value == 0 {
                return Err(CurrentError::ZeroCurrent { edge });
            }
            if value >= modulus {
                return Err(CurrentError::CurrentOutOfRange { edge, value });
            }
        }
        Ok(CurrentGraph {
            emb,
            modulus,
            currents,
        })
    }

    pub fn embedding(&self) -> &EmbeddedMultigraph {
        &self.emb
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn vertex_count(&self) -> usize {
        self.emb.vertex_count()
    }

    /// Currents of the positive darts, indexed by edge.
    pub fn currents(&self) -> &[u32] {
        &self.currents
    }

    pub fn current(&self, dart: Dart) -> u32 {
        let c = self.currents[dart.edge()];
        if dart.is_plus() {
            c
        } else {
            self.modulus - c
        }
    }
}

/// Degree 3 at every vertex, and outgoing currents sum to 0 mod n.
pub fn check_kcl(cg: &CurrentGraph) -> bool {
    let emb = cg.embedding();
    let n = cg.modulus() as u64;
    (0..emb.vertex_count()).all(|v| {
        let rot = emb.rotation(v);
        rot.len() == 3 && rot.iter().map(|&d| cg.current(d) as u64).sum::<u64>() % n == 0
    })
}

/// Vertices violating the degree-3 or KCL condition.
pub fn kcl_violations(cg: &CurrentGraph) -> Vec<usize> {
    let emb = cg.embedding();
    let n = cg.modulus() as u64;
    (0..emb.vertex_count())
        .filter(|&v| {
            let rot = emb.rotation(v);
            rot.len() != 3 || rot.iter().map(|&d| cg.current(d) as u64).sum::<u64>() % n != 0
        })
        .collect()
}

/// Assignment of labels to faces: `labeling[k]` is the index (in
/// [`trace_faces`] order) of the face labeled `[k]`.
pub type Labeling = [usize; 3];

const PERMUTATIONS: [Labeling; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// The three circuits of an index-3 current graph under a chosen labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCircuits {
    modulus: u32,
    circuits: [FaceWalk; 3],
    logs: [Vec<u32>; 3],
    labeling: Labeling,
    alternatives: Vec<Labeling>,
    dart_labels: Vec<Label>,
}

impl LabeledCircuits {
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn circuit(&self, label: Label) -> &FaceWalk {
        &self.circuits[label.index()]
    }

    pub fn logs(&self) -> &[Vec<u32>; 3] {
        &self.logs
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    /// Every labeling satisfying the mod-3 rule, in lexicographic order.
    /// Contains [`Self::labeling`].
    pub fn alternatives(&self) -> &[Labeling] {
        &self.alternatives
    }

    /// Label of the circuit traversing `dart`.
    pub fn label_of(&self, dart: Dart) -> Label {
        self.dart_labels[dart.index()]
    }
}

fn consistent(cg: &CurrentGraph, face_of: &[usize], labeling: &Labeling) -> bool {
    let mut label_of_face = [0u32; 3];
    for (k, &f) in labeling.iter().enumerate() {
        label_of_face[f] = k as u32;
    }
    (0..cg.embedding().edge_count()).all(|e| {
        let a = label_of_face[face_of[Dart::plus(e).index()]];
        let b = label_of_face[face_of[Dart::minus(e).index()]];
        cg.currents[e] % 3 == (b + 3 - a) % 3
    })
}

fn traced(cg: &CurrentGraph) -> Result<(Vec<FaceWalk>, Vec<usize>), CurrentError> {
    let faces = trace_faces(cg.embedding());
    if faces.len() != 3 {
        return Err(CurrentError::WrongIndex { faces: faces.len() });
    }
    let face_of = face_of_darts(&faces, cg.embedding().dart_count());
    Ok((faces, face_of))
}

fn build(
    cg: &CurrentGraph,
    faces: Vec<FaceWalk>,
    face_of: &[usize],
    labeling: Labeling,
    alternatives: Vec<Labeling>,
) -> LabeledCircuits {
    let mut slots: [Option<FaceWalk>; 3] = [None, None, None];
    let mut faces: Vec<Option<FaceWalk>> = faces.into_iter().map(Some).collect();
    for k in 0..3 {
        slots[k] = faces[labeling[k]].take();
    }
    let circuits = slots.map(|c| c.expect("labeling is a permutation"));
    let logs = [0, 1, 2].map(|k| circuits[k].iter().map(|d| cg.current(d)).collect());
    let mut label_of_face = [Label::ZERO; 3];
    for (k, &f) in labeling.iter().enumerate() {
        label_of_face[f] = Label(k as u8);
    }
    let dart_labels = face_of.iter().map(|&f| label_of_face[f]).collect();
    LabeledCircuits {
        modulus: cg.modulus(),
        circuits,
        logs,
        labeling,
        alternatives,
        dart_labels,
    }
}

/// Labels the three circuits so that a current on a dart whose circuit is
/// `[a]`, and whose reverse lies on `[b]`, is `b - a` mod 3.
///
/// All six permutations are tried; the lexicographically least valid one is
/// returned and the rest are kept as alternatives. Shifting every label by 1
/// preserves the rule, so a consistent graph always has at least three.
pub fn label_circuits(cg: &CurrentGraph) -> Result<LabeledCircuits, CurrentError> {
    let (faces, face_of) = traced(cg)?;
    let valid: Vec<Labeling> = PERMUTATIONS
        .iter()
        .copied()
        .filter(|p| consistent(cg, &face_of, p))
        .collect();
    let Some(&first) = valid.first() else {
        return Err(CurrentError::NoConsistentLabeling);
    };
    Ok(build(cg, faces, &face_of, first, valid))
}

/// Labels the circuits with a specific labeling, which must satisfy the
/// mod-3 rule.
pub fn label_circuits_with(
    cg: &CurrentGraph,
    labeling: Labeling,
) -> Result<LabeledCircuits, CurrentError> {
    let (faces, face_of) = traced(cg)?;
    if !PERMUTATIONS.contains(&labeling) || !consistent(cg, &face_of, &labeling) {
        return Err(CurrentError::NoConsistentLabeling);
    }
    let valid = PERMUTATIONS
        .iter()
        .copied()
        .filter(|p| consistent(cg, &face_of, p))
        .collect();
    Ok(build(cg, faces, &face_of, labeling, valid))
}

/// The sequence of currents along circuit `label`.
pub fn log_of(circuits: &LabeledCircuits, label: Label) -> &[u32] {
    &circuits.logs[label.index()]
}

/// No residue repeats within any single log.
pub fn check_simplicity(circuits: &LabeledCircuits, modulus: u32) -> bool {
    circuits.logs.iter().all(|log| {
        let mut seen = vec![false; modulus as usize];
        log.iter().all(|&c| {
            let c = (c % modulus) as usize;
            !core::mem::replace(&mut seen[c], true)
        })
    })
}

/// Per-label comparison of a pair's combined logs against `Z_n \ {0}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelCoverage {
    pub missing: Vec<u32>,
    pub duplicated: Vec<u32>,
    /// Zero entries, which never belong to a log.
    pub zeros: usize,
}

impl LabelCoverage {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.duplicated.is_empty() && self.zeros == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub coverage: [LabelCoverage; 3],
    /// Every nonzero residue is in exactly one of the two `[k]` logs, for
    /// each `k`.
    pub e5: bool,
    /// Equal vertex counts.
    pub e6: bool,
}

pub fn check_pair(
    a: &LabeledCircuits,
    b: &LabeledCircuits,
    modulus: u32,
    vertices_a: usize,
    vertices_b: usize,
) -> PairReport {
    let coverage = [0, 1, 2].map(|k| {
        let mut count = vec![0u32; modulus as usize];
        for &c in a.logs[k].iter().chain(b.logs[k].iter()) {
            count[(c % modulus) as usize] += 1;
        }
        LabelCoverage {
            missing: (1..modulus).filter(|&r| count[r as usize] == 0).collect(),
            duplicated: (1..modulus).filter(|&r| count[r as usize] > 1).collect(),
            zeros: count[0] as usize,
        }
    });
    let e5 = coverage.iter().all(LabelCoverage::is_exact);
    PairReport {
        coverage,
        e5,
        e6: vertices_a == vertices_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Two vertices joined by three parallel edges, embedded in the plane:
    /// three faces, each a digon.
    fn planar_theta(n: u32, currents: [u32; 3]) -> CurrentGraph {
        let emb = EmbeddedMultigraph::new(
            2,
            vec![(0, 1), (0, 1), (0, 1)],
            vec![
                vec![Dart::plus(0), Dart::plus(2), Dart::plus(1)],
                vec![Dart::minus(0), Dart::minus(1), Dart::minus(2)],
            ],
        )
        .unwrap();
        CurrentGraph::new(emb, n, currents.to_vec()).unwrap()
    }

    #[test]
    fn kcl_arithmetic() {
        assert!(check_kcl(&planar_theta(21, [1, 2, 18])));
        assert!(!check_kcl(&planar_theta(21, [1, 2, 4])));
        assert_eq!(kcl_violations(&planar_theta(21, [1, 2, 4])), vec![0, 1]);
    }

    #[test]
    fn construction_rejects_bad_currents() {
        let emb = planar_theta(21, [1, 2, 18]).embedding().clone();
        assert_eq!(
            CurrentGraph::new(emb.clone(), 21, vec![1, 0, 20]),
            Err(CurrentError::ZeroCurrent { edge: 1 })
        );
        assert_eq!(
            CurrentGraph::new(emb.clone(), 21, vec![1, 21, 20]),
            Err(CurrentError::CurrentOutOfRange { edge: 1, value: 21 })
        );
        assert_eq!(
            CurrentGraph::new(emb.clone(), 20, vec![1, 2, 3]),
            Err(CurrentError::ModulusNotMultipleOfThree(20))
        );
        assert_eq!(
            CurrentGraph::new(emb, 21, vec![1, 2]),
            Err(CurrentError::CurrentCount { expected: 3, found: 2 })
        );
    }

    #[test]
    fn antisymmetry() {
        let g = planar_theta(21, [5, 7, 9]);
        for d in g.embedding().darts() {
            assert_eq!((g.current(d) + g.current(d.reverse())) % 21, 0);
            assert_ne!(g.current(d), 0);
        }
    }

    #[test]
    fn planar_theta_labels() {
        // Faces: (0+, 1-), (0-, 2+), (1+, 2-). Currents all 1 mod 3 admit
        // exactly the three shifts of one labeling.
        let g = planar_theta(21, [1, 4, 16]);
        let lc = label_circuits(&g).unwrap();
        assert_eq!(lc.alternatives().len(), 3);
        assert!(lc.alternatives().contains(&lc.labeling()));
        assert_eq!(lc.labeling(), lc.alternatives()[0]);
        for alt in lc.alternatives() {
            assert!(label_circuits_with(&g, *alt).is_ok());
        }
        // log length equals circuit length
        for k in Label::ALL {
            assert_eq!(log_of(&lc, k).len(), lc.circuit(k).len());
        }
    }

    #[test]
    fn zero_class_edges_on_one_circuit() {
        // Edge 0 is traversed twice by the same face in a one-edge graph;
        // any current that is 0 mod 3 is consistent with any label, but the
        // graph has index 1.
        let emb = EmbeddedMultigraph::new(
            2,
            vec![(0, 1)],
            vec![vec![Dart::plus(0)], vec![Dart::minus(0)]],
        )
        .unwrap();
        let g = CurrentGraph::new(emb, 21, vec![3]).unwrap();
        assert_eq!(label_circuits(&g), Err(CurrentError::WrongIndex { faces: 1 }));
    }

    #[test]
    fn no_consistent_labeling() {
        // Classes (1, 2, 0) force labels [1] and [2] onto the same face.
        let g = planar_theta(21, [1, 2, 18]);
        assert_eq!(label_circuits(&g), Err(CurrentError::NoConsistentLabeling));
    }

    #[test]
    fn log_follows_antisymmetry() {
        // circuit (e1+, e2-) with currents 5, 7 -> log (5, 14)
        let emb = EmbeddedMultigraph::new(
            2,
            vec![(0, 1), (0, 1), (0, 1)],
            vec![
                vec![Dart::plus(0), Dart::plus(2), Dart::plus(1)],
                vec![Dart::minus(0), Dart::minus(1), Dart::minus(2)],
            ],
        )
        .unwrap();
        let g = CurrentGraph::new(emb, 21, vec![5, 7, 9]).unwrap();
        let faces = trace_faces(g.embedding());
        assert_eq!(faces[0].darts(), &[Dart::plus(0), Dart::minus(1)]);
        let log: Vec<u32> = faces[0].iter().map(|d| g.current(d)).collect();
        assert_eq!(log, vec![5, 14]);
    }

    fn circuits_with_logs(logs: [Vec<u32>; 3]) -> LabeledCircuits {
        LabeledCircuits {
            modulus: 21,
            circuits: [0, 1, 2].map(|k| {
                FaceWalk::new((0..logs[k].len()).map(Dart::from_index).collect())
            }),
            logs,
            labeling: [0, 1, 2],
            alternatives: vec![[0, 1, 2]],
            dart_labels: Vec::new(),
        }
    }

    #[test]
    fn simplicity() {
        let repeat = circuits_with_logs([vec![5, 14, 5], vec![1], vec![2]]);
        assert!(!check_simplicity(&repeat, 21));
        let fine = circuits_with_logs([vec![1, 2, 3], vec![1], vec![2]]);
        assert!(check_simplicity(&fine, 21));
    }

    #[test]
    fn pair_with_itself_duplicates_everything() {
        let half: Vec<u32> = (1..=10).collect();
        let other: Vec<u32> = (11..=20).collect();
        let a = circuits_with_logs([half.clone(), half.clone(), half.clone()]);
        let b = circuits_with_logs([other.clone(), other.clone(), other]);
        let ok = check_pair(&a, &b, 21, 10, 10);
        assert!(ok.e5 && ok.e6);
        let same = check_pair(&a, &a, 21, 10, 10);
        assert!(!same.e5);
        for cov in &same.coverage {
            assert_eq!(cov.duplicated, half);
            assert_eq!(cov.missing, (11..=20).collect::<Vec<_>>());
        }
        assert!(!check_pair(&a, &b, 21, 6, 14).e6);
    }
}
