//! Embedded multigraphs given by rotation systems.
//!
//! Every edge `e` has two darts, `e+` (tail to head) and `e-` (head to tail).
//! A rotation system lists, for each vertex, the darts leaving it in cyclic
//! order. Faces are traced with the rule
//!
//! ```text
//! next(d) = successor of reverse(d) in the rotation at head(d)
//! ```
//!
//! which is the convention used throughout the crate. The mirror convention
//! traces the mirror surface and gives the same genus.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Direction of a dart relative to its edge's stored (tail, head) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// One directed traversal of an edge, packed as `2 * edge + (sign == Minus)`.
///
/// The packing orders darts by edge id first, with `e+` before `e-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(u32);

impl Dart {
    pub fn new(edge: usize, sign: Sign) -> Self {
        let bit = match sign {
            Sign::Plus => 0,
            Sign::Minus => 1,
        };
        Dart((edge as u32) << 1 | bit)
    }

    pub fn plus(edge: usize) -> Self {
        Dart::new(edge, Sign::Plus)
    }

    pub fn minus(edge: usize) -> Self {
        Dart::new(edge, Sign::Minus)
    }

    pub fn from_index(index: usize) -> Self {
        Dart(index as u32)
    }

    /// Dense index in `0..2 * edge_count`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn sign(self) -> Sign {
        if self.0 & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn is_plus(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn reverse(self) -> Self {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.is_plus() { '+' } else { '-' };
        write!(f, "{}{}", self.edge(), s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyError {
    NoVertices,
    VertexOutOfRange { edge: usize, vertex: usize },
    SelfLoop { edge: usize },
    RotationCount { expected: usize, found: usize },
    DartOutOfRange { vertex: usize, dart: Dart },
    DartAtWrongVertex { vertex: usize, dart: Dart },
    DuplicateDart { dart: Dart },
    MissingDart { dart: Dart },
    Disconnected,
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::NoVertices => write!(f, "graph has no vertices"),
            TopologyError::VertexOutOfRange { edge, vertex } => {
                write!(f, "edge {edge} refers to vertex {vertex}, which does not exist")
            }
            TopologyError::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            TopologyError::RotationCount { expected, found } => {
                write!(f, "expected {expected} rotations, found {found}")
            }
            TopologyError::DartOutOfRange { vertex, dart } => {
                write!(f, "rotation at vertex {vertex} names unknown dart {dart}")
            }
            TopologyError::DartAtWrongVertex { vertex, dart } => {
                write!(f, "dart {dart} listed at vertex {vertex} but does not leave it")
            }
            TopologyError::DuplicateDart { dart } => {
                write!(f, "dart {dart} appears more than once in the rotation system")
            }
            TopologyError::MissingDart { dart } => {
                write!(f, "dart {dart} is missing from the rotation system")
            }
            TopologyError::Disconnected => write!(f, "graph is disconnected"),
        }
    }
}

/// A multigraph together with a rotation system.
///
/// Vertices are `0..vertex_count`, edges `0..edge_count`. Parallel edges
/// are allowed, self-loops are not. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedMultigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    rotations: Vec<Vec<Dart>>,
    successor: Vec<Dart>,
}

impl EmbeddedMultigraph {
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        rotations: Vec<Vec<Dart>>,
    ) -> Result<Self, TopologyError> {
        if vertex_count == 0 {
            return Err(TopologyError::NoVertices);
        }
        for (edge, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(TopologyError::VertexOutOfRange { edge, vertex: v });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop { edge });
            }
        }
        if rotations.len() != vertex_count {
            return Err(TopologyError::RotationCount {
                expected: vertex_count,
                found: rotations.len(),
            });
        }
        let dart_count = 2 * edges.len();
        let mut seen = vec![false; dart_count];
        let mut successor = vec![Dart(0); dart_count];
        for (vertex, rotation) in rotations.iter().enumerate() {
            for (i, &dart) in rotation.iter().enumerate() {
                if dart.index() >= dart_count {
                    return Err(TopologyError::DartOutOfRange { vertex, dart });
                }
                let (a, b) = edges[dart.edge()];
                let tail = if dart.is_plus() { a } else { b };
                if tail != vertex {
                    return Err(TopologyError::DartAtWrongVertex { vertex, dart });
                }
                if seen[dart.index()] {
                    return Err(TopologyError::DuplicateDart { dart });
                }
                seen[dart.index()] = true;
                successor[dart.index()] = rotation[(i + 1) % rotation.len()];
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(TopologyError::MissingDart { dart: Dart::from_index(i) });
        }
        Ok(EmbeddedMultigraph {
            vertex_count,
            edges,
            rotations,
            successor,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn rotation(&self, vertex: usize) -> &[Dart] {
        &self.rotations[vertex]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.rotations[vertex].len()
    }

    pub fn tail(&self, dart: Dart) -> usize {
        let (a, b) = self.edges[dart.edge()];
        if dart.is_plus() {
            a
        } else {
            b
        }
    }

    pub fn head(&self, dart: Dart) -> usize {
        self.tail(dart.reverse())
    }

    /// Rotation successor of `dart` around its tail.
    pub fn successor(&self, dart: Dart) -> Dart {
        self.successor[dart.index()]
    }

    /// The dart following `dart` on its face boundary walk.
    pub fn face_next(&self, dart: Dart) -> Dart {
        self.successor(dart.reverse())
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.dart_count()).map(Dart::from_index)
    }

    pub fn trace_faces(&self) -> Vec<FaceWalk> {
        trace_faces(self)
    }
}

/// A face boundary walk as a cyclic sequence of darts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FaceWalk {
    darts: Vec<Dart>,
}

impl FaceWalk {
    pub fn new(darts: Vec<Dart>) -> Self {
        FaceWalk { darts }
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn first(&self) -> Dart {
        self.darts[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = Dart> + '_ {
        self.darts.iter().copied()
    }
}

/// Traces every face of `emb`.
///
/// Walks start at their smallest dart and are sorted by that dart. Since the
/// scan below starts each new walk at the smallest unvisited dart, both
/// properties hold without a separate sort.
pub fn trace_faces(emb: &EmbeddedMultigraph) -> Vec<FaceWalk> {
    let mut visited = vec![false; emb.dart_count()];
    let mut faces = Vec::new();
    for start in emb.darts() {
        if visited[start.index()] {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = start;
        while !visited[d.index()] {
            visited[d.index()] = true;
            walk.push(d);
            d = emb.face_next(d);
        }
        faces.push(FaceWalk::new(walk));
    }
    faces
}

/// Face index of every dart, given the output of [`trace_faces`].
pub fn face_of_darts(faces: &[FaceWalk], dart_count: usize) -> Vec<usize> {
    let mut owner = vec![usize::MAX; dart_count];
    for (i, face) in faces.iter().enumerate() {
        for d in face.iter() {
            owner[d.index()] = i;
        }
    }
    owner
}

pub fn is_connected(emb: &EmbeddedMultigraph) -> bool {
    let n = emb.vertex_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &d in emb.rotation(v) {
            let w = emb.head(d);
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

/// `V - E + F` of the embedding. An edgeless single vertex counts one face.
pub fn euler_characteristic(emb: &EmbeddedMultigraph) -> i64 {
    let faces = if emb.edge_count() == 0 {
        1
    } else {
        trace_faces(emb).len()
    };
    emb.vertex_count() as i64 - emb.edge_count() as i64 + faces as i64
}

/// Genus of the orientable surface the embedding is cellular on.
pub fn euler_genus(emb: &EmbeddedMultigraph) -> Result<usize, TopologyError> {
    if !is_connected(emb) {
        return Err(TopologyError::Disconnected);
    }
    let chi = euler_characteristic(emb);
    let twice = 2 - chi;
    assert!(
        twice >= 0 && twice % 2 == 0,
        "connected rotation system gave Euler characteristic {chi}"
    );
    Ok((twice / 2) as usize)
}

pub fn is_triangular(emb: &EmbeddedMultigraph) -> bool {
    emb.edge_count() > 0 && trace_faces(emb).iter().all(|f| f.len() == 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> EmbeddedMultigraph {
        // edges 0:0-1, 1:1-2, 2:2-0
        EmbeddedMultigraph::new(
            3,
            vec![(0, 1), (1, 2), (2, 0)],
            vec![
                vec![Dart::plus(0), Dart::minus(2)],
                vec![Dart::plus(1), Dart::minus(0)],
                vec![Dart::plus(2), Dart::minus(1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn dart_packing() {
        let d = Dart::new(7, Sign::Minus);
        assert_eq!(d.edge(), 7);
        assert_eq!(d.sign(), Sign::Minus);
        assert_eq!(d.reverse(), Dart::plus(7));
        assert_eq!(d.reverse().reverse(), d);
        assert!(Dart::plus(3) < Dart::minus(3));
        assert!(Dart::minus(3) < Dart::plus(4));
    }

    #[test]
    fn triangle_is_planar() {
        let g = k3();
        let faces = trace_faces(&g);
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.len() == 3));
        assert_eq!(euler_genus(&g), Ok(0));
        assert!(is_triangular(&g));
        assert!(is_connected(&g));
    }

    #[test]
    fn single_edge() {
        let g = EmbeddedMultigraph::new(
            2,
            vec![(0, 1)],
            vec![vec![Dart::plus(0)], vec![Dart::minus(0)]],
        )
        .unwrap();
        let faces = trace_faces(&g);
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].darts(), &[Dart::plus(0), Dart::minus(0)]);
        assert!(!is_triangular(&g));
        assert_eq!(euler_genus(&g), Ok(0));
    }

    #[test]
    fn two_disjoint_edges() {
        let g = EmbeddedMultigraph::new(
            4,
            vec![(0, 1), (2, 3)],
            vec![
                vec![Dart::plus(0)],
                vec![Dart::minus(0)],
                vec![Dart::plus(1)],
                vec![Dart::minus(1)],
            ],
        )
        .unwrap();
        assert!(!is_connected(&g));
        assert_eq!(euler_genus(&g), Err(TopologyError::Disconnected));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            EmbeddedMultigraph::new(0, vec![], vec![]),
            Err(TopologyError::NoVertices)
        );
        assert_eq!(
            EmbeddedMultigraph::new(2, vec![(1, 1)], vec![vec![], vec![]]),
            Err(TopologyError::SelfLoop { edge: 0 })
        );
        assert_eq!(
            EmbeddedMultigraph::new(2, vec![(0, 2)], vec![vec![], vec![]]),
            Err(TopologyError::VertexOutOfRange { edge: 0, vertex: 2 })
        );
        assert_eq!(
            EmbeddedMultigraph::new(
                2,
                vec![(0, 1)],
                vec![vec![Dart::minus(0)], vec![Dart::plus(0)]]
            ),
            Err(TopologyError::DartAtWrongVertex { vertex: 0, dart: Dart::minus(0) })
        );
        assert_eq!(
            EmbeddedMultigraph::new(2, vec![(0, 1)], vec![vec![Dart::plus(0)], vec![]]),
            Err(TopologyError::MissingDart { dart: Dart::minus(0) })
        );
        assert_eq!(
            EmbeddedMultigraph::new(
                2,
                vec![(0, 1)],
                vec![vec![Dart::plus(0), Dart::plus(0)], vec![Dart::minus(0)]]
            ),
            Err(TopologyError::DuplicateDart { dart: Dart::plus(0) })
        );
    }

    /// Independent face count: cycles of the permutation "reverse, then step
    /// around the head vertex", computed on (vertex, slot) pairs rather than
    /// on darts.
    fn oracle_face_count(edges: &[(usize, usize)], rot: &[Vec<(usize, bool)>]) -> usize {
        let mut slots = Vec::new();
        for (v, r) in rot.iter().enumerate() {
            for i in 0..r.len() {
                slots.push((v, i));
            }
        }
        let find = |edge: usize, outgoing_from: usize| -> (usize, usize) {
            for (v, r) in rot.iter().enumerate() {
                for (i, &(e, fwd)) in r.iter().enumerate() {
                    let tail = if fwd { edges[e].0 } else { edges[e].1 };
                    if e == edge && tail == outgoing_from && v == outgoing_from {
                        return (v, i);
                    }
                }
            }
            unreachable!()
        };
        let mut done = alloc::collections::BTreeSet::new();
        let mut count = 0;
        for &s in &slots {
            if done.contains(&s) {
                continue;
            }
            count += 1;
            let mut cur = s;
            while done.insert(cur) {
                let (v, i) = cur;
                let (e, fwd) = rot[v][i];
                let head = if fwd { edges[e].1 } else { edges[e].0 };
                let (hv, hi) = find(e, head);
                cur = (hv, (hi + 1) % rot[hv].len());
            }
        }
        count
    }

    #[test]
    fn theta_graph_all_rotations() {
        let edges = vec![(0, 1), (0, 1), (0, 1)];
        let orders = [[0usize, 1, 2], [0, 2, 1]];
        let mut tally = Vec::new();
        for o0 in &orders {
            for o1 in &orders {
                let r0: Vec<Dart> = o0.iter().map(|&e| Dart::plus(e)).collect();
                let r1: Vec<Dart> = o1.iter().map(|&e| Dart::minus(e)).collect();
                let g = EmbeddedMultigraph::new(2, edges.clone(), vec![r0, r1]).unwrap();
                let oracle = oracle_face_count(
                    &edges,
                    &[
                        o0.iter().map(|&e| (e, true)).collect(),
                        o1.iter().map(|&e| (e, false)).collect(),
                    ],
                );
                let faces = trace_faces(&g);
                assert_eq!(faces.len(), oracle);
                let genus = euler_genus(&g).unwrap();
                assert_eq!(2 - 2 * genus as i64, 2 - 3 + oracle as i64);
                tally.push((faces.len(), genus));
            }
        }
        // Frozen from the oracle: opposite cyclic orders give the planar
        // theta graph, equal orders give the one-face torus embedding.
        assert_eq!(tally, vec![(1, 1), (3, 0), (3, 0), (1, 1)]);
    }

    #[test]
    fn k7_cyclic_rotation_is_toroidal() {
        // Rotation at i: i + (1, 3, 2, 6, 4, 5) mod 7.
        let pattern = [1usize, 3, 2, 6, 4, 5];
        let n = 7;
        let mut id = alloc::collections::BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                id.insert((i, j), edges.len());
                edges.push((i, j));
            }
        }
        let rotations = (0..n)
            .map(|i| {
                pattern
                    .iter()
                    .map(|&c| {
                        let j = (i + c) % n;
                        if i < j {
                            Dart::plus(id[&(i, j)])
                        } else {
                            Dart::minus(id[&(j, i)])
                        }
                    })
                    .collect()
            })
            .collect();
        let g = EmbeddedMultigraph::new(n, edges, rotations).unwrap();
        assert!(is_triangular(&g));
        assert_eq!(trace_faces(&g).len(), 14);
        assert_eq!(euler_genus(&g), Ok(1));
    }
}
