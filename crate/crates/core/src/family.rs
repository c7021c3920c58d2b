//! Ladder templates for the current graph pairs over `Z_{24s+21}`, and the
//! rung swap that moves ring-shaped rungs from one graph of a pair to the
//! other.
//!
//! A ladder has `r` rungs; rung `i` joins top vertex `i` to bottom vertex
//! `r + i`. Consecutive rungs are joined by a top and a bottom horizontal
//! edge; a Moebius ladder closes with the two last horizontals crossed. A
//! ring rung replaces the vertical edge by `top -> x`, two parallel arcs
//! `x -> y`, and `y -> bottom`; its two extra vertices are numbered after
//! the ladder vertices in rung order.
//!
//! Circuit incidences the templates are built for:
//!
//! | edge                    | circuits            |
//! |-------------------------|---------------------|
//! | horizontal              | `[0]` and `[1]`/`[2]` |
//! | simple rung             | `[0]` on both sides |
//! | cross rung              | `[1]` and `[2]`     |
//! | ring vertical           | `[1]` or `[2]`, both sides |
//! | ring arc                | `[1]` and `[2]`     |
//!
//! Endpoints of simple rungs rotate (left, right, vertical); endpoints of
//! ring and cross rungs rotate (left, vertical, right). This is the only
//! rotation pattern giving index 3 with those incidences on the ladders
//! used here.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::current::{CurrentError, CurrentGraph, Label};
use crate::derive::verify_biembedding;
use crate::topology::{face_of_darts, trace_faces, Dart, EmbeddedMultigraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RungKind {
    Simple,
    Ring,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RungSpec {
    pub kind: RungKind,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LadderKind {
    Circular,
    Mobius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Row {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeRole {
    /// From rung `position` to rung `position + 1` (cyclically).
    Horizontal { position: usize, row: Row },
    Rung { position: usize },
    RingVertical { position: usize, end: Row },
    RingArc { position: usize, arc: usize },
}

/// A run of consecutive rungs whose currents are, up to sign,
/// `c, c + step, c + 2 step, ...`. The run may wrap around the ladder.
///
/// With `alternating`, the rungs point alternately down and up, so the
/// downward currents are exactly `c, -(c + step), c + 2 step, ...`;
/// otherwise each rung's direction is left open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArithmeticSection {
    pub start: usize,
    pub rungs: usize,
    /// Downward current of the first rung, if fixed.
    pub start_current: Option<u32>,
    /// Residue added per rung; `n - 3` walks the run downward.
    pub step: u32,
    pub alternating: bool,
}

impl ArithmeticSection {
    /// Ladder position of the `k`-th rung of the run on `r` rungs.
    pub fn position(&self, k: usize, r: usize) -> usize {
        (self.start + k) % r
    }

    /// Current of the `k`-th rung up to sign, for first current `c`.
    pub fn magnitude(&self, c: u32, k: usize, modulus: u32) -> u32 {
        ((c as u64 + self.step as u64 * k as u64) % modulus as u64) as u32
    }

    /// Downward current of the `k`-th rung of an alternating section.
    pub fn downward(&self, c: u32, k: usize, modulus: u32) -> u32 {
        let m = self.magnitude(c, k, modulus);
        if k % 2 == 1 && m != 0 {
            modulus - m
        } else {
            m
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateError {
    TooFewRungs(usize),
    CrossRungNotSimple(usize),
    SectionOutOfRange,
    WrongIndex { faces: usize },
    /// No face sees the incidences required of circuit `[0]`.
    Incidence,
}

impl fmt::Display for TemplateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateError::TooFewRungs(r) => write!(f, "ladder needs at least 3 rungs, got {r}"),
            TemplateError::CrossRungNotSimple(p) => write!(f, "cross rung {p} is a ring rung"),
            TemplateError::SectionOutOfRange => write!(f, "arithmetic section exceeds the ladder"),
            TemplateError::WrongIndex { faces } => write!(f, "template has {faces} faces, not 3"),
            TemplateError::Incidence => write!(f, "template faces do not match the circuit roles"),
        }
    }
}

/// Concrete vertices, edges and rotations of a ladder template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderLayout {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub roles: Vec<EdgeRole>,
    pub rotations: Vec<Vec<Dart>>,
}

/// Per-edge circuit incidences and mod-3 classes of a valid template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotModel {
    /// Label of the circuit through each dart, by dart index.
    pub dart_labels: Vec<Label>,
    /// Required residue mod 3 of each edge's positive current.
    pub classes: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LadderSpec {
    pub kind: LadderKind,
    pub rungs: Vec<RungSpec>,
    /// A simple rung whose sides are circuits `[1]` and `[2]`.
    pub cross_rung: Option<usize>,
    pub sections: Vec<ArithmeticSection>,
    /// Fixed positive-dart currents, by edge id.
    pub fixed_currents: BTreeMap<usize, u32>,
    /// Which of the two non-`[0]` circuits is `[1]`: the one with the smaller
    /// first dart unless set.
    pub swap_labels: bool,
}

impl LadderSpec {
    pub fn new(kind: LadderKind, kinds: &[RungKind], cross_rung: Option<usize>) -> Self {
        LadderSpec {
            kind,
            rungs: kinds
                .iter()
                .enumerate()
                .map(|(position, &kind)| RungSpec { kind, position })
                .collect(),
            cross_rung,
            sections: Vec::new(),
            fixed_currents: BTreeMap::new(),
            swap_labels: false,
        }
    }

    pub fn ring_count(&self) -> usize {
        self.rungs.iter().filter(|r| r.kind == RungKind::Ring).count()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.rungs.len() + 2 * self.ring_count()
    }

    pub fn edge_count(&self) -> usize {
        3 * self.vertex_count() / 2
    }

    fn check(&self) -> Result<(), TemplateError> {
        if self.rungs.len() < 3 {
            return Err(TemplateError::TooFewRungs(self.rungs.len()));
        }
        if let Some(p) = self.cross_rung {
            if self.rungs.get(p).map(|r| r.kind) != Some(RungKind::Simple) {
                return Err(TemplateError::CrossRungNotSimple(p));
            }
        }
        if self
            .sections
            .iter()
            .any(|s| s.start >= self.rungs.len() || s.rungs > self.rungs.len())
        {
            return Err(TemplateError::SectionOutOfRange);
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<LadderLayout, TemplateError> {
        self.check()?;
        let r = self.rungs.len();
        let top = |i: usize| i;
        let bottom = |i: usize| r + i;
        let mut edges = Vec::new();
        let mut roles = Vec::new();
        let mut left = vec![Dart::plus(0); 2 * r];
        let mut right = vec![Dart::plus(0); 2 * r];
        let mut down = vec![Dart::plus(0); 2 * r];
        for i in 0..r {
            let j = (i + 1) % r;
            let twist = j == 0 && self.kind == LadderKind::Mobius;
            let (t_next, b_next) = if twist {
                (bottom(0), top(0))
            } else {
                (top(j), bottom(j))
            };
            for (row, from, to) in [(Row::Top, top(i), t_next), (Row::Bottom, bottom(i), b_next)] {
                let e = edges.len();
                edges.push((from, to));
                roles.push(EdgeRole::Horizontal { position: i, row });
                right[from] = Dart::plus(e);
                left[to] = Dart::minus(e);
            }
        }
        let mut vertex_count = 2 * r;
        let mut ring_rotations = Vec::new();
        for rung in &self.rungs {
            let i = rung.position;
            match rung.kind {
                RungKind::Simple => {
                    let e = edges.len();
                    edges.push((top(i), bottom(i)));
                    roles.push(EdgeRole::Rung { position: i });
                    down[top(i)] = Dart::plus(e);
                    down[bottom(i)] = Dart::minus(e);
                }
                RungKind::Ring => {
                    let (x, y) = (vertex_count, vertex_count + 1);
                    vertex_count += 2;
                    let e = edges.len();
                    edges.push((top(i), x));
                    roles.push(EdgeRole::RingVertical { position: i, end: Row::Top });
                    edges.push((x, y));
                    roles.push(EdgeRole::RingArc { position: i, arc: 0 });
                    edges.push((x, y));
                    roles.push(EdgeRole::RingArc { position: i, arc: 1 });
                    edges.push((y, bottom(i)));
                    roles.push(EdgeRole::RingVertical { position: i, end: Row::Bottom });
                    down[top(i)] = Dart::plus(e);
                    down[bottom(i)] = Dart::minus(e + 3);
                    ring_rotations.push(vec![Dart::minus(e), Dart::plus(e + 1), Dart::plus(e + 2)]);
                    ring_rotations.push(vec![Dart::plus(e + 3), Dart::minus(e + 1), Dart::minus(e + 2)]);
                }
            }
        }
        let mut rotations = Vec::with_capacity(vertex_count);
        for v in 0..2 * r {
            let i = v % r;
            let plain = self.rungs[i].kind == RungKind::Simple && self.cross_rung != Some(i);
            rotations.push(if plain {
                vec![left[v], right[v], down[v]]
            } else {
                vec![left[v], down[v], right[v]]
            });
        }
        rotations.extend(ring_rotations);
        Ok(LadderLayout {
            vertex_count,
            edges,
            roles,
            rotations,
        })
    }

    pub fn embedding(&self) -> Result<EmbeddedMultigraph, TemplateError> {
        let l = self.layout()?;
        Ok(EmbeddedMultigraph::new(l.vertex_count, l.edges, l.rotations)
            .expect("ladder layout is a valid rotation system"))
    }

    /// Traces the template and labels its faces by the incidence table in
    /// the module docs.
    pub fn slot_model(&self) -> Result<SlotModel, TemplateError> {
        let layout = self.layout()?;
        let emb = EmbeddedMultigraph::new(
            layout.vertex_count,
            layout.edges.clone(),
            layout.rotations.clone(),
        )
        .expect("ladder layout is a valid rotation system");
        let faces = trace_faces(&emb);
        if faces.len() != 3 {
            return Err(TemplateError::WrongIndex { faces: faces.len() });
        }
        let face_of = face_of_darts(&faces, emb.dart_count());
        let sides = |e: usize| (face_of[Dart::plus(e).index()], face_of[Dart::minus(e).index()]);
        let zero = (0..3)
            .find(|&z| {
                layout.roles.iter().enumerate().all(|(e, role)| {
                    let (p, m) = sides(e);
                    match *role {
                        EdgeRole::Horizontal { .. } => (p == z) != (m == z),
                        EdgeRole::Rung { position } if self.cross_rung == Some(position) => {
                            p != z && m != z && p != m
                        }
                        EdgeRole::Rung { .. } => p == z && m == z,
                        EdgeRole::RingVertical { .. } => p == m && p != z,
                        EdgeRole::RingArc { .. } => p != z && m != z && p != m,
                    }
                })
            })
            .ok_or(TemplateError::Incidence)?;
        let mut others = (0..3).filter(|&f| f != zero);
        let (mut one, mut two) = (others.next().unwrap(), others.next().unwrap());
        if self.swap_labels {
            core::mem::swap(&mut one, &mut two);
        }
        let mut label_of_face = [Label::ZERO; 3];
        label_of_face[one] = Label::ONE;
        label_of_face[two] = Label::TWO;
        let dart_labels: Vec<Label> = face_of.iter().map(|&f| label_of_face[f]).collect();
        let classes = (0..emb.edge_count())
            .map(|e| {
                let a = dart_labels[Dart::plus(e).index()].index() as u32;
                let b = dart_labels[Dart::minus(e).index()].index() as u32;
                (b + 3 - a) % 3
            })
            .collect();
        Ok(SlotModel {
            dart_labels,
            classes,
        })
    }

    /// Edges whose current is not fixed, with their mod-3 class.
    pub fn free_slots(&self) -> Result<Vec<(usize, u32)>, TemplateError> {
        let model = self.slot_model()?;
        Ok(model
            .classes
            .iter()
            .enumerate()
            .filter(|(e, _)| !self.fixed_currents.contains_key(e))
            .map(|(e, &c)| (e, c))
            .collect())
    }

    /// Edge ids of rung `position` read downward: the rung edge, or both
    /// ring verticals.
    pub fn rung_edges(&self, position: usize) -> Result<Vec<usize>, TemplateError> {
        let layout = self.layout()?;
        Ok(layout
            .roles
            .iter()
            .enumerate()
            .filter(|(_, role)| match **role {
                EdgeRole::Rung { position: p } => p == position,
                EdgeRole::RingVertical { position: p, .. } => p == position,
                _ => false,
            })
            .map(|(e, _)| e)
            .collect())
    }
}

/// The two ladder templates for one value of `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyPair {
    pub s: u64,
    pub a: LadderSpec,
    pub b: LadderSpec,
}

impl FamilyPair {
    pub fn modulus(&self) -> u32 {
        (24 * self.s + 21) as u32
    }
}

/// Templates for `Z_{24s+21}`.
///
/// Graph A is a circular ladder of `4s + 3` rungs alternating ring, simple,
/// ..., ring (`2s + 2` rings). Graph B is a Moebius ladder of `4s + 3` rungs
/// alternating simple, ring, ..., simple (`2s + 1` rings) followed by the
/// cross rung. Both graphs have `12s + 10` vertices. In each graph the first
/// `4s + 2` rungs form an alternating arithmetic section with step 3.
pub fn build_family(s: u64) -> FamilyPair {
    let run = (4 * s + 3) as usize;
    let a_kinds: Vec<RungKind> = (0..run)
        .map(|i| if i % 2 == 0 { RungKind::Ring } else { RungKind::Simple })
        .collect();
    let mut b_kinds: Vec<RungKind> = (0..run)
        .map(|i| if i % 2 == 0 { RungKind::Simple } else { RungKind::Ring })
        .collect();
    b_kinds.push(RungKind::Simple);
    let section = ArithmeticSection {
        start: 0,
        rungs: run - 1,
        start_current: None,
        step: 3,
        alternating: true,
    };
    let mut a = LadderSpec::new(LadderKind::Circular, &a_kinds, None);
    a.sections.push(section);
    let mut b = LadderSpec::new(LadderKind::Mobius, &b_kinds, Some(run));
    b.sections.push(section);
    FamilyPair { s, a, b }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    Template(TemplateError),
    IncompleteAssignment { edge: usize },
    ZeroCurrent { edge: usize },
    Current(CurrentError),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::Template(e) => write!(f, "{e}"),
            FamilyError::IncompleteAssignment { edge } => {
                write!(f, "no current assigned to edge {edge}")
            }
            FamilyError::ZeroCurrent { edge } => write!(f, "edge {edge} would carry current 0"),
            FamilyError::Current(e) => write!(f, "{e}"),
        }
    }
}

impl From<TemplateError> for FamilyError {
    fn from(e: TemplateError) -> Self {
        FamilyError::Template(e)
    }
}

/// Builds the current graph of a template, merging the fixed currents with
/// `assignment` (free edge id to positive-dart current).
pub fn materialize(
    spec: &LadderSpec,
    assignment: &BTreeMap<usize, u32>,
    modulus: u32,
) -> Result<CurrentGraph, FamilyError> {
    let layout = spec.layout()?;
    let mut currents = Vec::with_capacity(layout.edges.len());
    for e in 0..layout.edges.len() {
        let value = spec
            .fixed_currents
            .get(&e)
            .or_else(|| assignment.get(&e))
            .ok_or(FamilyError::IncompleteAssignment { edge: e })?;
        let value = value % modulus;
        if value == 0 {
            return Err(FamilyError::ZeroCurrent { edge: e });
        }
        currents.push(value);
    }
    let emb = EmbeddedMultigraph::new(layout.vertex_count, layout.edges, layout.rotations)
        .expect("ladder layout is a valid rotation system");
    CurrentGraph::new(emb, modulus, currents).map_err(FamilyError::Current)
}

// ---------------------------------------------------------------------------
// Rung swap

/// A ring-shaped rung found in a current graph: `top -> x`, two parallel
/// arcs between `x` and `y`, `y -> bottom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingRung {
    pub top: usize,
    pub x: usize,
    pub y: usize,
    pub bottom: usize,
    pub top_edge: usize,
    pub arcs: [usize; 2],
    pub bottom_edge: usize,
}

/// Ring rungs of `cg`, by increasing `x`. The endpoint with the smaller ring
/// vertex is taken as the top.
pub fn find_rings(cg: &CurrentGraph) -> Vec<RingRung> {
    let emb = cg.embedding();
    let mut rings = Vec::new();
    for x in 0..emb.vertex_count() {
        let rot = emb.rotation(x);
        if rot.len() != 3 {
            continue;
        }
        for (i, &d) in rot.iter().enumerate() {
            let y = emb.head(d);
            if y <= x || emb.degree(y) != 3 {
                continue;
            }
            let parallel: Vec<Dart> = rot.iter().copied().filter(|&o| emb.head(o) == y).collect();
            if parallel.len() != 2 || parallel[0] != d {
                continue;
            }
            let up = rot[(0..3).find(|&k| k != i && emb.head(rot[k]) != y).unwrap()];
            let Some(&down) = emb.rotation(y).iter().find(|&&o| emb.head(o) != x) else {
                continue;
            };
            let top = emb.head(up);
            let bottom = emb.head(down);
            if top == y || bottom == x || top == bottom {
                continue;
            }
            rings.push(RingRung {
                top,
                x,
                y,
                bottom,
                top_edge: up.edge(),
                arcs: [parallel[0].edge(), parallel[1].edge()],
                bottom_edge: down.edge(),
            });
        }
    }
    rings
}

fn dart_between(emb: &EmbeddedMultigraph, from: usize, edge: usize) -> Dart {
    if emb.tail(Dart::plus(edge)) == from {
        Dart::plus(edge)
    } else {
        Dart::minus(edge)
    }
}

/// A multiple of 3 carried by a ring rung of A and, up to sign, by a
/// simple rung of B lying on a single circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapSite {
    /// `min(c, n - c)` for the rung current `c`.
    pub residue: u32,
    pub ring: RingRung,
    pub rung_edge: usize,
}

/// Scans for swappable rung pairs, ordered by residue.
pub fn find_swap_sites(a: &CurrentGraph, b: &CurrentGraph) -> Vec<SwapSite> {
    let n = a.modulus();
    if b.modulus() != n {
        return Vec::new();
    }
    let canon = |c: u32| c.min(n - c);
    let rings_b = find_rings(b);
    let in_ring_b = |e: usize| {
        rings_b
            .iter()
            .any(|r| r.top_edge == e || r.bottom_edge == e || r.arcs.contains(&e))
    };
    let faces_b = trace_faces(b.embedding());
    let face_of = face_of_darts(&faces_b, b.embedding().dart_count());
    let mut sites = Vec::new();
    for ring in find_rings(a) {
        let emb = a.embedding();
        let flow = a.current(dart_between(emb, ring.top, ring.top_edge));
        let out = a.current(dart_between(emb, ring.y, ring.bottom_edge));
        if !flow.is_multiple_of(3) || flow != out {
            continue;
        }
        let rung = (0..b.embedding().edge_count()).find(|&e| {
            canon(b.currents()[e]) == canon(flow)
                && face_of[Dart::plus(e).index()] == face_of[Dart::minus(e).index()]
                && !in_ring_b(e)
        });
        if let Some(rung_edge) = rung {
            sites.push(SwapSite {
                residue: canon(flow),
                ring,
                rung_edge,
            });
        }
    }
    sites.sort_by_key(|s| s.residue);
    sites
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SwapError {
    ModulusMismatch,
    /// Rungs must be exchanged two at a time to keep both graphs at index 3.
    OddSiteCount(usize),
    TooManyPairs { requested: usize, max: usize },
    NotSwappable { residue: u32 },
    RepairFailed { residues: [u32; 2] },
    /// Fewer than two ring/simple rung pairs are left to exchange.
    TooFewSites { available: usize },
}

impl fmt::Display for SwapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwapError::ModulusMismatch => write!(f, "current groups differ"),
            SwapError::OddSiteCount(k) => {
                write!(f, "rungs are swapped in pairs; got {k} sites")
            }
            SwapError::TooManyPairs { requested, max } => {
                write!(f, "{requested} swap pairs requested, at most {max} possible")
            }
            SwapError::NotSwappable { residue } => {
                write!(f, "no ring/simple rung pair carries the multiple of 3 {residue}")
            }
            SwapError::RepairFailed { residues } => write!(
                f,
                "no local re-orientation makes the swap at {} and {} valid",
                residues[0], residues[1]
            ),
            SwapError::TooFewSites { available } => {
                write!(f, "only {available} swappable rung pairs remain, need 2")
            }
        }
    }
}

/// Local choices made when moving one ring. The first value of each field
/// is what the ladder rotation rule prescribes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Orientation {
    keep_a_top: bool,
    keep_a_bottom: bool,
    keep_b_top: bool,
    keep_b_bottom: bool,
    flip_x: bool,
    flip_y: bool,
}

impl Orientation {
    fn all() -> impl Iterator<Item = Orientation> {
        (0..64u32).map(|m| Orientation {
            keep_a_top: m & 1 != 0,
            keep_a_bottom: m & 2 != 0,
            keep_b_top: m & 4 != 0,
            keep_b_bottom: m & 8 != 0,
            flip_x: m & 16 != 0,
            flip_y: m & 32 != 0,
        })
    }
}

fn reversed(rot: &[Dart]) -> Vec<Dart> {
    rot.iter().rev().copied().collect()
}

/// Old-to-new vertex and edge ids after a collapse.
struct Renumbering {
    vertices: Vec<Option<usize>>,
    edges: Vec<Option<usize>>,
}

impl Renumbering {
    fn ring(&self, r: &RingRung) -> Option<RingRung> {
        Some(RingRung {
            top: self.vertices[r.top]?,
            x: self.vertices[r.x]?,
            y: self.vertices[r.y]?,
            bottom: self.vertices[r.bottom]?,
            top_edge: self.edges[r.top_edge]?,
            arcs: [self.edges[r.arcs[0]]?, self.edges[r.arcs[1]]?],
            bottom_edge: self.edges[r.bottom_edge]?,
        })
    }
}

/// Replaces `ring` in `a` by a simple rung `top -> bottom` carrying the
/// ring's flow. Removed vertices and edges are compacted.
fn collapse_ring(a: &CurrentGraph, ring: &RingRung, o: Orientation) -> (CurrentGraph, Renumbering) {
    let emb = a.embedding();
    let n = a.modulus();
    let flow = a.current(dart_between(emb, ring.top, ring.top_edge));
    let removed_edges = [ring.arcs[0], ring.arcs[1], ring.bottom_edge];
    let edge_map: Vec<Option<usize>> = {
        let mut next = 0;
        (0..emb.edge_count())
            .map(|e| {
                if removed_edges.contains(&e) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let vertex_map: Vec<Option<usize>> = {
        let mut next = 0;
        (0..emb.vertex_count())
            .map(|v| {
                if v == ring.x || v == ring.y {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let map_dart = |d: Dart| Dart::new(edge_map[d.edge()].unwrap(), d.sign());
    let mut edges = Vec::new();
    let mut currents = Vec::new();
    for (e, kept) in edge_map.iter().enumerate() {
        if kept.is_none() {
            continue;
        }
        if e == ring.top_edge {
            edges.push((vertex_map[ring.top].unwrap(), vertex_map[ring.bottom].unwrap()));
            currents.push(flow);
        } else {
            let (p, q) = emb.edges()[e];
            edges.push((vertex_map[p].unwrap(), vertex_map[q].unwrap()));
            currents.push(a.currents()[e]);
        }
    }
    let rung = edge_map[ring.top_edge].unwrap();
    let mut rotations = Vec::new();
    for (v, kept) in vertex_map.iter().enumerate() {
        if kept.is_none() {
            continue;
        }
        let mut rot: Vec<Dart> = emb
            .rotation(v)
            .iter()
            .map(|&d| {
                if v == ring.top && d.edge() == ring.top_edge {
                    Dart::plus(rung)
                } else if v == ring.bottom && d.edge() == ring.bottom_edge {
                    Dart::minus(rung)
                } else {
                    map_dart(d)
                }
            })
            .collect();
        if (v == ring.top && !o.keep_a_top) || (v == ring.bottom && !o.keep_a_bottom) {
            rot = reversed(&rot);
        }
        rotations.push(rot);
    }
    let emb = EmbeddedMultigraph::new(emb.vertex_count() - 2, edges, rotations)
        .expect("collapsing a ring keeps a valid rotation system");
    let cg = CurrentGraph::new(emb, n, currents).expect("currents copied from a valid graph");
    (
        cg,
        Renumbering {
            vertices: vertex_map,
            edges: edge_map,
        },
    )
}

/// Replaces the simple rung `rung_edge` of `b` by a ring whose arcs carry
/// `arcs` (flow from the new upper ring vertex to the lower one).
fn expand_rung(b: &CurrentGraph, rung_edge: usize, arcs: [u32; 2], o: Orientation) -> CurrentGraph {
    let emb = b.embedding();
    let n = b.modulus();
    let (top, bottom) = emb.edges()[rung_edge];
    let flow = b.currents()[rung_edge];
    let x = emb.vertex_count();
    let y = x + 1;
    let base = emb.edge_count();
    let (arc0, arc1, lower) = (base, base + 1, base + 2);
    let mut edges = emb.edges().to_vec();
    edges[rung_edge] = (top, x);
    edges.push((x, y));
    edges.push((x, y));
    edges.push((y, bottom));
    let mut currents = b.currents().to_vec();
    currents.extend([arcs[0], arcs[1], flow]);
    let mut rotations: Vec<Vec<Dart>> = emb.rotations().to_vec();
    for d in rotations[bottom].iter_mut() {
        if d.edge() == rung_edge {
            *d = Dart::minus(lower);
        }
    }
    if !o.keep_b_top {
        rotations[top] = reversed(&rotations[top]);
    }
    if !o.keep_b_bottom {
        rotations[bottom] = reversed(&rotations[bottom]);
    }
    let mut rx = vec![Dart::minus(rung_edge), Dart::plus(arc0), Dart::plus(arc1)];
    let mut ry = vec![Dart::plus(lower), Dart::minus(arc0), Dart::minus(arc1)];
    if o.flip_x {
        rx = reversed(&rx);
    }
    if o.flip_y {
        ry = reversed(&ry);
    }
    rotations.push(rx);
    rotations.push(ry);
    let emb = EmbeddedMultigraph::new(y + 1, edges, rotations)
        .expect("expanding a rung keeps a valid rotation system");
    CurrentGraph::new(emb, n, currents).expect("currents copied from a valid graph")
}

/// Moves one ring of A onto the matching simple rung of B, and that rung's
/// current onto A in the ring's place. Edge ids of B are kept; A is
/// renumbered.
fn move_one(
    a: &CurrentGraph,
    b: &CurrentGraph,
    site: &SwapSite,
    o: Orientation,
) -> (CurrentGraph, CurrentGraph, Renumbering) {
    let n = a.modulus();
    let emb = a.embedding();
    let ring = &site.ring;
    let flow = a.current(dart_between(emb, ring.top, ring.top_edge));
    let arc_flow = |e: usize| a.current(dart_between(emb, ring.x, e));
    let mut arcs = [arc_flow(ring.arcs[0]), arc_flow(ring.arcs[1])];
    if b.currents()[site.rung_edge] != flow {
        arcs = arcs.map(|c| n - c);
    }
    let new_b = expand_rung(b, site.rung_edge, arcs, o);
    let (new_a, map) = collapse_ring(a, ring, o);
    (new_a, new_b, map)
}

fn remap(site: &SwapSite, map: &Renumbering) -> SwapSite {
    SwapSite {
        ring: map.ring(&site.ring).expect("distinct rings survive a collapse"),
        ..*site
    }
}

fn site_for(a: &CurrentGraph, b: &CurrentGraph, residue: u32) -> Result<SwapSite, SwapError> {
    find_swap_sites(a, b)
        .into_iter()
        .find(|s| s.residue == residue)
        .ok_or(SwapError::NotSwappable { residue })
}

/// Largest number of swap pairs for `Z_n`, `n = 24s + 21`: `s + 1`.
pub fn max_swap_pairs(modulus: u32) -> usize {
    if modulus < 21 || !(modulus - 21).is_multiple_of(24) {
        return 0;
    }
    ((modulus - 21) / 24 + 1) as usize
}

/// Exchanges ring rungs of `a` with simple rungs of `b`, two at a time,
/// identified by the multiples of 3 they carry.
///
/// The rotation rule for the new rung kinds is tried first; with
/// `direction_repair`, every local re-orientation of the affected vertices
/// (rung endpoints and new ring vertices) is tried in a fixed order until the
/// pair certifies again. Currents are forced by KCL. A pair that cannot be
/// repaired is an error, never a silently invalid result.
pub fn swap_rungs(
    a: &CurrentGraph,
    b: &CurrentGraph,
    residues: &[u32],
    direction_repair: bool,
) -> Result<(CurrentGraph, CurrentGraph), SwapError> {
    if a.modulus() != b.modulus() {
        return Err(SwapError::ModulusMismatch);
    }
    if !residues.len().is_multiple_of(2) {
        return Err(SwapError::OddSiteCount(residues.len()));
    }
    let max = max_swap_pairs(a.modulus());
    if residues.len() / 2 > max {
        return Err(SwapError::TooManyPairs {
            requested: residues.len() / 2,
            max,
        });
    }
    // Sites are resolved once, on the input pair: halfway through a pair
    // neither graph has index 3, so face incidences cannot identify rungs.
    let mut sites = Vec::with_capacity(residues.len());
    for (i, &r) in residues.iter().enumerate() {
        if residues[..i].contains(&r) {
            return Err(SwapError::NotSwappable { residue: r });
        }
        sites.push(site_for(a, b, r)?);
    }
    let options: Vec<Orientation> = if direction_repair {
        Orientation::all().collect()
    } else {
        vec![Orientation::default()]
    };
    let mut cur = (a.clone(), b.clone());
    for k in (0..sites.len()).step_by(2) {
        let residues = [sites[k].residue, sites[k + 1].residue];
        let mut done = None;
        'search: for &o1 in &options {
            let (a1, b1, m1) = move_one(&cur.0, &cur.1, &sites[k], o1);
            let second = remap(&sites[k + 1], &m1);
            for &o2 in &options {
                let (a2, b2, m2) = move_one(&a1, &b1, &second, o2);
                if quick_reject(&a2) || quick_reject(&b2) {
                    continue;
                }
                if verify_biembedding(&a2, &b2).is_valid() {
                    done = Some((a2, b2, m1, m2));
                    break 'search;
                }
            }
        }
        let (a2, b2, m1, m2) = done.ok_or(SwapError::RepairFailed { residues })?;
        for later in &mut sites[k + 2..] {
            *later = remap(&remap(later, &m1), &m2);
        }
        cur = (a2, b2);
    }
    Ok(cur)
}

/// Performs `k` swaps one pair at a time. For each, the sites of the current
/// pair are taken in increasing residue order and the first two residues
/// whose swap certifies are used. Returns the new pair and the residues
/// swapped, in order.
pub fn swap_pairs(
    a: &CurrentGraph,
    b: &CurrentGraph,
    k: usize,
    direction_repair: bool,
) -> Result<(CurrentGraph, CurrentGraph, Vec<u32>), SwapError> {
    if a.modulus() != b.modulus() {
        return Err(SwapError::ModulusMismatch);
    }
    let max = max_swap_pairs(a.modulus());
    if k > max {
        return Err(SwapError::TooManyPairs { requested: k, max });
    }
    let mut cur = (a.clone(), b.clone());
    let mut used = Vec::new();
    for _ in 0..k {
        let mut residues: Vec<u32> = find_swap_sites(&cur.0, &cur.1)
            .iter()
            .map(|s| s.residue)
            .collect();
        residues.sort_unstable();
        residues.dedup();
        if residues.len() < 2 {
            return Err(SwapError::TooFewSites {
                available: residues.len(),
            });
        }
        let mut last = None;
        let mut done = None;
        'pairs: for i in 0..residues.len() {
            for j in i + 1..residues.len() {
                let pair = [residues[i], residues[j]];
                match swap_rungs(&cur.0, &cur.1, &pair, direction_repair) {
                    Ok(next) => {
                        done = Some((next, pair));
                        break 'pairs;
                    }
                    Err(e) => last = Some(e),
                }
            }
        }
        let (next, pair) = match done {
            Some(d) => d,
            None => return Err(last.expect("at least one pair was tried")),
        };
        used.extend(pair);
        cur = next;
    }
    Ok((cur.0, cur.1, used))
}

fn quick_reject(cg: &CurrentGraph) -> bool {
    trace_faces(cg.embedding()).len() != 3 || crate::current::label_circuits(cg).is_err()
}
