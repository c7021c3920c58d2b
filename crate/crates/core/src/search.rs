//! Backtracking completion of ladder templates.
//!
//! Both graphs of a pair are searched jointly. Variables are the positive
//! currents of every edge. An arithmetic section is one extra variable, its
//! first current. For an alternating section that fixes every rung's
//! current; otherwise it fixes them up to sign and the signs are branched on
//! like any edge. At every node:
//!
//! - a vertex with two assigned darts forces the third by KCL,
//! - each label keeps one pool of unused residues shared by both graphs, so
//!   a residue enters the log of `[k]` at most once over the pair,
//! - every edge is restricted to the mod-3 class its circuit incidences
//!   require.
//!
//! The variable with the fewest live values is branched on first, ties by
//! graph then edge id, values in increasing order. When some unused residue
//! of a label fits fewer darts than that, the search branches on which dart
//! carries it instead. Completed assignments are
//! materialized and certified by [`verify_biembedding`] before they count.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::current::CurrentGraph;
use crate::derive::verify_biembedding;
use crate::family::{
    build_family, materialize, ArithmeticSection, EdgeRole, FamilyPair, LadderKind, LadderSpec,
    Row, RungKind, TemplateError,
};
use crate::topology::Dart;

/// Largest modulus the bitset pools can hold.
pub const MAX_MODULUS: u32 = 127;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Node budget for one template variant.
    pub max_nodes: u64,
    /// Stop after this many certified solutions.
    pub max_solutions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 100_000_000,
            max_solutions: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Found,
    Exhausted,
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Found => "found",
            Status::Exhausted => "exhausted",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Currents fixed by KCL rather than branching.
    pub forced: u64,
    /// Complete assignments handed to the verifier.
    pub verified: u64,
    /// Complete assignments the verifier rejected.
    pub rejected: u64,
}

impl SearchStats {
    pub fn add(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.forced += o.forced;
        self.verified += o.verified;
        self.rejected += o.rejected;
    }
}

/// A certified completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedPair {
    pub a: CurrentGraph,
    pub b: CurrentGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// `Found` if any solution was certified; otherwise `Timeout` if a limit
    /// cut the search short, else `Exhausted`.
    pub status: Status,
    pub solutions: Vec<SolvedPair>,
    pub stats: SearchStats,
    /// The whole space was explored.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug)]
struct EdgeVar {
    tail: usize,
    head: usize,
    class: u32,
    label_plus: usize,
    label_minus: usize,
}

#[derive(Clone, Debug)]
struct Unit {
    section: ArithmeticSection,
    /// `(var, k)`: the var carries the `k`-th current of the run. Every
    /// member edge points from the top row toward the bottom row.
    members: Vec<(usize, usize)>,
}

impl Unit {
    /// Values member `k` may take when the run starts at `c`.
    fn mask(&self, c: u32, k: usize, n: u32) -> u128 {
        if self.section.alternating {
            1u128 << self.section.downward(c, k, n)
        } else {
            let m = self.section.magnitude(c, k, n);
            (1u128 << m) | (1u128 << (n - m))
        }
    }
}

/// A template pair prepared for search.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    pair: FamilyPair,
    modulus: u32,
    vars: Vec<EdgeVar>,
    /// Number of vars belonging to graph A.
    split: usize,
    /// Darts around each vertex as `(var, outgoing dart is positive)`.
    incidence: Vec<Vec<(usize, bool)>>,
    units: Vec<Unit>,
    fixed: Vec<(usize, u32)>,
    /// Darts carrying each label over both graphs.
    label_sizes: [usize; 3],
    /// The other vertical of a ring; both carry the ring's flow downward.
    twin: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemError {
    Template(TemplateError),
    ModulusTooLarge(u32),
}

impl core::fmt::Display for ProblemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProblemError::Template(e) => write!(f, "{e}"),
            ProblemError::ModulusTooLarge(n) => {
                write!(f, "modulus {n} exceeds the search limit {MAX_MODULUS}")
            }
        }
    }
}

impl SearchProblem {
    pub fn new(pair: &FamilyPair) -> Result<Self, ProblemError> {
        let n = pair.modulus();
        if n > MAX_MODULUS {
            return Err(ProblemError::ModulusTooLarge(n));
        }
        let mut vars = Vec::new();
        let mut incidence = Vec::new();
        let mut units = Vec::new();
        let mut fixed = Vec::new();
        let mut label_sizes = [0; 3];
        let mut split = 0;
        let mut twin = Vec::new();
        for (g, spec) in [&pair.a, &pair.b].into_iter().enumerate() {
            let layout = spec.layout().map_err(ProblemError::Template)?;
            let model = spec.slot_model().map_err(ProblemError::Template)?;
            let var0 = vars.len();
            let vertex0 = incidence.len();
            for (e, &(t, h)) in layout.edges.iter().enumerate() {
                let lp = model.dart_labels[Dart::plus(e).index()].index();
                let lm = model.dart_labels[Dart::minus(e).index()].index();
                label_sizes[lp] += 1;
                label_sizes[lm] += 1;
                vars.push(EdgeVar {
                    tail: vertex0 + t,
                    head: vertex0 + h,
                    class: model.classes[e],
                    label_plus: lp,
                    label_minus: lm,
                });
            }
            let mut upper = BTreeMap::new();
            twin.resize(vars.len(), None);
            for (e, role) in layout.roles.iter().enumerate() {
                if let EdgeRole::RingVertical { position, end } = *role {
                    match end {
                        Row::Top => {
                            upper.insert(position, var0 + e);
                        }
                        Row::Bottom => {
                            let t = upper[&position];
                            twin[t] = Some(var0 + e);
                            twin[var0 + e] = Some(t);
                        }
                    }
                }
            }
            for rot in &layout.rotations {
                incidence.push(rot.iter().map(|d| (var0 + d.edge(), d.is_plus())).collect());
            }
            for (&e, &c) in &spec.fixed_currents {
                fixed.push((var0 + e, c % n));
            }
            let r = spec.rungs.len();
            for section in &spec.sections {
                let mut members = Vec::new();
                for k in 0..section.rungs {
                    for (e, role) in layout.roles.iter().enumerate() {
                        let at = match *role {
                            EdgeRole::Rung { position } => position,
                            EdgeRole::RingVertical { position, .. } => position,
                            _ => continue,
                        };
                        if at == section.position(k, r) {
                            members.push((var0 + e, k));
                        }
                    }
                }
                units.push(Unit {
                    section: *section,
                    members,
                });
            }
            if g == 0 {
                split = vars.len();
            }
        }
        Ok(SearchProblem {
            pair: pair.clone(),
            modulus: n,
            vars,
            split,
            incidence,
            twin,
            units,
            fixed,
            label_sizes,
        })
    }

    pub fn pair(&self) -> &FamilyPair {
        &self.pair
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Each label must collect exactly `n - 1` darts over the pair for the
    /// logs to partition the nonzero residues.
    pub fn sizes_balanced(&self) -> bool {
        self.label_sizes
            .iter()
            .all(|&k| k == self.modulus as usize - 1)
    }

    /// Unused residues per label after the fixed currents, or `None` if the
    /// fixed currents already conflict.
    pub fn residue_pools(&self) -> Option<[Vec<u32>; 3]> {
        let mut st = State::new(self);
        if !st.apply_fixed(self) {
            return None;
        }
        Some([0, 1, 2].map(|k| {
            (1..self.modulus)
                .filter(|&r| st.used[k] & (1u128 << r) == 0)
                .collect()
        }))
    }
}

struct State {
    n: u32,
    value: Vec<u32>,
    /// Residues each var may still take apart from the pools: its mod-3
    /// class, narrowed to `±m` once a section fixes its magnitude `m`.
    allowed: Vec<u128>,
    /// Residues used per label, and the same sets negated.
    used: [u128; 3],
    mirror: [u128; 3],
    trail: Vec<usize>,
    unit_open: Vec<bool>,
    stats: SearchStats,
}

fn class_mask(n: u32, class: u32) -> u128 {
    (1..n)
        .filter(|c| c % 3 == class)
        .fold(0, |m, c| m | 1u128 << c)
}

impl State {
    fn new(p: &SearchProblem) -> Self {
        let masks = [0, 1, 2].map(|k| class_mask(p.modulus, k));
        State {
            n: p.modulus,
            value: vec![0; p.vars.len()],
            allowed: p.vars.iter().map(|v| masks[v.class as usize]).collect(),
            used: [0; 3],
            mirror: [0; 3],
            trail: Vec::new(),
            unit_open: vec![true; p.units.len()],
            stats: SearchStats::default(),
        }
    }

    fn apply_fixed(&mut self, p: &SearchProblem) -> bool {
        p.fixed.iter().all(|&(v, c)| self.assign(p, v, c))
    }

    /// Live values of an unassigned var as a bitset.
    fn domain(&self, p: &SearchProblem, var: usize) -> u128 {
        let ev = &p.vars[var];
        self.allowed[var] & !self.used[ev.label_plus] & !self.mirror[ev.label_minus]
    }

    fn legal(&self, p: &SearchProblem, var: usize, c: u32) -> bool {
        if self.value[var] != 0 {
            return self.value[var] == c;
        }
        c < self.n && self.domain(p, var) & (1u128 << c) != 0
    }

    fn mark(&mut self, ev: EdgeVar, c: u32, on: bool) {
        let n = self.n;
        let bits = [
            (ev.label_plus, c, n - c),
            (ev.label_minus, n - c, c),
        ];
        for (label, x, neg) in bits {
            if on {
                self.used[label] |= 1u128 << x;
                self.mirror[label] |= 1u128 << neg;
            } else {
                self.used[label] &= !(1u128 << x);
                self.mirror[label] &= !(1u128 << neg);
            }
        }
    }

    fn assign(&mut self, p: &SearchProblem, var: usize, c: u32) -> bool {
        if self.value[var] != 0 {
            return self.value[var] == c;
        }
        if !self.legal(p, var, c) {
            return false;
        }
        let ev = p.vars[var];
        self.value[var] = c;
        self.mark(ev, c, true);
        self.trail.push(var);
        if let Some(t) = p.twin[var] {
            if !self.assign(p, t, c) {
                return false;
            }
        }
        self.settle(p, ev.tail) && self.settle(p, ev.head)
    }

    /// KCL at `vertex`: force the last dart or check the full sum.
    fn settle(&mut self, p: &SearchProblem, vertex: usize) -> bool {
        let n = self.n;
        let mut sum = 0;
        let mut open = None;
        let mut open_count = 0;
        for &(var, plus) in &p.incidence[vertex] {
            let c = self.value[var];
            if c == 0 {
                open = Some((var, plus));
                open_count += 1;
            } else {
                sum = (sum + if plus { c } else { n - c }) % n;
            }
        }
        match (open_count, open) {
            (0, _) => sum == 0,
            (1, Some((var, plus))) => {
                let out = (n - sum) % n;
                let c = if plus { out } else { (n - out) % n };
                self.stats.forced += 1;
                self.assign(p, var, c)
            }
            _ => true,
        }
    }

    fn undo(&mut self, p: &SearchProblem, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().unwrap();
            let c = self.value[var];
            self.mark(p.vars[var], c, false);
            self.value[var] = 0;
        }
    }
}

impl State {
    /// Every unused residue of a label must fit some open dart on that
    /// label. Forces a residue with a single candidate dart; `Ok(true)` if
    /// something was forced.
    fn cover(&mut self, p: &SearchProblem) -> Result<bool, ()> {
        let n = self.n;
        let full = ((1u128 << n) - 1) & !1;
        for k in 0..3 {
            let (mut once, mut twice) = (0u128, 0u128);
            for v in 0..p.vars.len() {
                if self.value[v] != 0 {
                    continue;
                }
                let ev = &p.vars[v];
                let d = self.domain(p, v);
                if ev.label_plus == k {
                    twice |= once & d;
                    once |= d;
                }
                if ev.label_minus == k {
                    let m = mirror(d, n);
                    twice |= once & m;
                    once |= m;
                }
            }
            let pool = full & !self.used[k];
            if pool & !once != 0 {
                return Err(());
            }
            let single = pool & once & !twice;
            if single == 0 {
                continue;
            }
            let r = single.trailing_zeros();
            for v in 0..p.vars.len() {
                if self.value[v] != 0 {
                    continue;
                }
                let ev = p.vars[v];
                let d = self.domain(p, v);
                let c = if ev.label_plus == k && d & (1u128 << r) != 0 {
                    r
                } else if ev.label_minus == k && d & (1u128 << (n - r)) != 0 {
                    n - r
                } else {
                    continue;
                };
                self.stats.forced += 1;
                return if self.assign(p, v, c) { Ok(true) } else { Err(()) };
            }
            unreachable!("a single candidate was counted");
        }
        Ok(false)
    }
}

/// `{n - x : x in set}` for residues `1..n`.
fn mirror(set: u128, n: u32) -> u128 {
    bits(set).fold(0, |m, x| m | 1u128 << (n - x))
}

fn bits(mut set: u128) -> impl Iterator<Item = u32> {
    core::iter::from_fn(move || {
        if set == 0 {
            return None;
        }
        let b = set.trailing_zeros();
        set &= set - 1;
        Some(b)
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Choice {
    Unit(usize),
    Single(usize),
    /// Place residue `r` in the log of label `k`.
    Residue(usize, u32),
}

enum Flow {
    Continue,
    Stop,
}

struct Run<'a> {
    p: &'a SearchProblem,
    limits: Limits,
    should_stop: &'a mut dyn FnMut() -> bool,
    st: State,
    solutions: Vec<SolvedPair>,
    cut: bool,
}

impl Run<'_> {
    fn unit_values(&self, u: usize) -> Vec<u32> {
        let n = self.p.modulus;
        let unit = &self.p.units[u];
        let fits = |c: u32| {
            unit.members.iter().all(|&(v, k)| {
                unit.section.magnitude(c, k, n) != 0
                    && bits(unit.mask(c, k, n)).any(|x| self.st.legal(self.p, v, x))
            })
        };
        // a magnitude cannot serve two rungs of one run
        let distinct = |c: u32| {
            let mut seen = 0u128;
            (0..unit.section.rungs).all(|k| {
                let m = unit.section.magnitude(c, k, n);
                let m = m.min(n - m);
                let fresh = seen & (1u128 << m) == 0;
                seen |= 1u128 << m;
                fresh
            })
        };
        let fits = |c: u32| distinct(c) && fits(c);
        match unit.section.start_current {
            Some(c) => [c % n].into_iter().filter(|&c| fits(c)).collect(),
            None => (1..n).filter(|&c| c % 3 == 0 && fits(c)).collect(),
        }
    }

    fn single_values(&self, v: usize) -> Vec<u32> {
        bits(self.st.domain(self.p, v)).collect()
    }

    fn pick(&self) -> Result<Option<Choice>, ()> {
        let mut best: Option<(usize, Choice)> = None;
        for u in 0..self.p.units.len() {
            if !self.st.unit_open[u] {
                continue;
            }
            let size = self.unit_values(u).len();
            if size == 0 {
                return Err(());
            }
            if best.is_none_or(|(b, _)| size < b) {
                best = Some((size, Choice::Unit(u)));
            }
        }
        for v in 0..self.p.vars.len() {
            if self.st.value[v] != 0 {
                continue;
            }
            let size = self.st.domain(self.p, v).count_ones() as usize;
            if size == 0 {
                return Err(());
            }
            if best.is_none_or(|(b, _)| size < b) {
                best = Some((size, Choice::Single(v)));
            }
        }
        if best.is_some_and(|(b, _)| b > 2) {
            if let Some((size, k, r)) = self.scarcest_residue() {
                if best.is_none_or(|(b, _)| size < b) {
                    best = Some((size, Choice::Residue(k, r)));
                }
            }
        }
        Ok(best.map(|(_, c)| c))
    }

    /// Darts that could still carry residue `r` on label `k`, as
    /// `(var, value)`.
    fn carriers(&self, k: usize, r: u32) -> Vec<(usize, u32)> {
        let n = self.p.modulus;
        let mut out = Vec::new();
        for v in 0..self.p.vars.len() {
            if self.st.value[v] != 0 {
                continue;
            }
            let ev = &self.p.vars[v];
            let d = self.st.domain(self.p, v);
            if ev.label_plus == k && d & (1u128 << r) != 0 {
                out.push((v, r));
            }
            if ev.label_minus == k && d & (1u128 << (n - r)) != 0 {
                out.push((v, n - r));
            }
        }
        out
    }

    /// The unused residue with the fewest carriers, first by label then
    /// residue on ties.
    fn scarcest_residue(&self) -> Option<(usize, usize, u32)> {
        let n = self.p.modulus;
        let mut count = [[0u8; 128]; 3];
        for v in 0..self.p.vars.len() {
            if self.st.value[v] != 0 {
                continue;
            }
            let ev = &self.p.vars[v];
            for c in bits(self.st.domain(self.p, v)) {
                count[ev.label_plus][c as usize] += 1;
                count[ev.label_minus][(n - c) as usize] += 1;
            }
        }
        let mut best = None;
        for (k, row) in count.iter().enumerate() {
            for r in 1..n {
                let c = row[r as usize] as usize;
                if c > 0 && best.is_none_or(|(b, _, _)| c < b) {
                    best = Some((c, k, r));
                }
            }
        }
        best
    }

    fn dfs(&mut self) -> Flow {
        self.st.stats.nodes += 1;
        if self.st.stats.nodes > self.limits.max_nodes
            || (self.st.stats.nodes.is_multiple_of(1024) && (self.should_stop)())
        {
            self.cut = true;
            return Flow::Stop;
        }
        let mark = self.st.trail.len();
        let flow = loop {
            match self.st.cover(self.p) {
                Err(()) => break Flow::Continue,
                Ok(true) => continue,
                Ok(false) => break self.branch(),
            }
        };
        self.st.undo(self.p, mark);
        flow
    }

    fn branch(&mut self) -> Flow {
        let choice = match self.pick() {
            Err(()) => return Flow::Continue,
            Ok(None) => return self.leaf(),
            Ok(Some(c)) => c,
        };
        match choice {
            Choice::Unit(u) => {
                let values = self.unit_values(u);
                let unit = &self.p.units[u];
                self.st.unit_open[u] = false;
                let mut flow = Flow::Continue;
                for c in values {
                    let n = self.p.modulus;
                    let saved: Vec<u128> = unit.members.iter().map(|&(v, _)| self.st.allowed[v]).collect();
                    for &(v, k) in &unit.members {
                        self.st.allowed[v] &= unit.mask(c, k, n);
                    }
                    flow = self.dfs();
                    for (&(v, _), &mask) in unit.members.iter().zip(&saved) {
                        self.st.allowed[v] = mask;
                    }
                    if let Flow::Stop = flow {
                        break;
                    }
                }
                self.st.unit_open[u] = true;
                return flow;
            }
            Choice::Residue(k, r) => {
                for (v, c) in self.carriers(k, r) {
                    let mark = self.st.trail.len();
                    let flow = if self.st.assign(self.p, v, c) {
                        self.dfs()
                    } else {
                        Flow::Continue
                    };
                    self.st.undo(self.p, mark);
                    if let Flow::Stop = flow {
                        return Flow::Stop;
                    }
                }
            }
            Choice::Single(v) => {
                let values = self.single_values(v);
                for c in values {
                    let mark = self.st.trail.len();
                    let flow = if self.st.assign(self.p, v, c) {
                        self.dfs()
                    } else {
                        Flow::Continue
                    };
                    self.st.undo(self.p, mark);
                    if let Flow::Stop = flow {
                        return Flow::Stop;
                    }
                }
            }
        }
        Flow::Continue
    }

    fn leaf(&mut self) -> Flow {
        let p = self.p;
        let n = p.modulus;
        let to_map = |range: core::ops::Range<usize>| -> BTreeMap<usize, u32> {
            range
                .clone()
                .map(|v| (v - range.start, self.st.value[v]))
                .collect()
        };
        let ma = to_map(0..p.split);
        let mb = to_map(p.split..p.vars.len());
        self.st.stats.verified += 1;
        let graphs = (
            materialize(&p.pair.a, &ma, n),
            materialize(&p.pair.b, &mb, n),
        );
        let (Ok(a), Ok(b)) = graphs else {
            self.st.stats.rejected += 1;
            return Flow::Continue;
        };
        let cert = verify_biembedding(&a, &b);
        if !(cert.is_valid() && cert.e6()) {
            self.st.stats.rejected += 1;
            return Flow::Continue;
        }
        self.solutions.push(SolvedPair { a, b });
        if self.solutions.len() >= self.limits.max_solutions {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

/// Completes one template pair. Deterministic for a given problem and node
/// budget; `should_stop` is polled every 1024 nodes for wall-clock limits.
pub fn complete(
    problem: &SearchProblem,
    limits: &Limits,
    should_stop: &mut dyn FnMut() -> bool,
) -> SearchResult {
    let mut run = Run {
        p: problem,
        limits: *limits,
        should_stop,
        st: State::new(problem),
        solutions: Vec::new(),
        cut: false,
    };
    let feasible = problem.sizes_balanced() && run.st.apply_fixed(problem);
    if feasible && limits.max_solutions > 0 {
        run.dfs();
    }
    let status = if !run.solutions.is_empty() {
        Status::Found
    } else if run.cut {
        Status::Timeout
    } else {
        Status::Exhausted
    };
    SearchResult {
        status,
        complete: !run.cut && run.solutions.len() < limits.max_solutions.max(1),
        solutions: run.solutions,
        stats: run.st.stats,
    }
}

// ---------------------------------------------------------------------------
// Template variants

fn rung_char(spec: &LadderSpec, i: usize) -> char {
    match spec.rungs[i].kind {
        RungKind::Ring => 'R',
        RungKind::Simple if spec.cross_rung == Some(i) => 'X',
        RungKind::Simple => 'S',
    }
}

/// Rung pattern read along the ladder: `S` simple, `R` ring, `X` cross.
pub fn pattern(spec: &LadderSpec) -> String {
    (0..spec.rungs.len()).map(|i| rung_char(spec, i)).collect()
}

/// Short human-readable name of a variant.
pub fn describe(pair: &FamilyPair) -> String {
    let kind = |k: LadderKind| match k {
        LadderKind::Circular => "circular",
        LadderKind::Mobius => "mobius",
    };
    let mut s = String::new();
    s.push_str("A ");
    s.push_str(kind(pair.a.kind));
    s.push(' ');
    s.push_str(&pattern(&pair.a));
    s.push_str(" / B ");
    s.push_str(kind(pair.b.kind));
    s.push(' ');
    s.push_str(&pattern(&pair.b));
    if pair.b.swap_labels {
        s.push_str(" flipped");
    }
    if !pair.a.sections.is_empty() || !pair.b.sections.is_empty() {
        s.push_str(" arithmetic");
    }
    s
}

/// Least image of a cyclic word under rotation and reversal.
fn dihedral_canonical(word: &[u8]) -> Vec<u8> {
    let r = word.len();
    let mut best = word.to_vec();
    for rev in [false, true] {
        for shift in 0..r {
            let cand: Vec<u8> = (0..r)
                .map(|i| {
                    let j = (i + shift) % r;
                    if rev {
                        word[r - 1 - j]
                    } else {
                        word[j]
                    }
                })
                .collect();
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

/// Canonical cyclic words of length `len` with the given letter counts.
fn canonical_words(counts: &[(u8, usize)]) -> Vec<Vec<u8>> {
    let len: usize = counts.iter().map(|c| c.1).sum();
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(len);
    let mut left: Vec<(u8, usize)> = counts.to_vec();
    left.sort();
    fn rec(word: &mut Vec<u8>, left: &mut [(u8, usize)], len: usize, out: &mut Vec<Vec<u8>>) {
        if word.len() == len {
            if dihedral_canonical(word) == *word {
                out.push(word.clone());
            }
            return;
        }
        for i in 0..left.len() {
            if left[i].1 == 0 {
                continue;
            }
            left[i].1 -= 1;
            word.push(left[i].0);
            rec(word, left, len, out);
            word.pop();
            left[i].1 += 1;
        }
    }
    rec(&mut word, &mut left, len, &mut out);
    out
}

fn spec_from_word(kind: LadderKind, word: &[u8]) -> LadderSpec {
    let kinds: Vec<RungKind> = word
        .iter()
        .map(|&c| if c == b'R' { RungKind::Ring } else { RungKind::Simple })
        .collect();
    let cross = word.iter().position(|&c| c == b'X');
    LadderSpec::new(kind, &kinds, cross)
}

/// Template pairs for `Z_{24s+21}` in search order.
///
/// First the family templates of [`build_family`]: their alternating
/// sections are placed on every window of `4s + 2` rungs that alternate
/// ring and simple, in both directions, in each graph (the family's own
/// placement first). Next graph A carries a run over all its rungs with rung
/// directions left open. Last come every pair of index-3 ladders with the
/// family's rung counts (A: `2s + 2` rings among `4s + 3` rungs; B: `2s + 1`
/// rings and one cross rung among `4s + 4`), over both ladder kinds, without
/// sections. Every template appears with both labelings of B. Rung patterns
/// equal under rotation or reversal of the ladder are listed once; pairs
/// whose circuit lengths cannot partition the residues are dropped.
pub fn enumerate_topologies(s: u64) -> Vec<FamilyPair> {
    let mut out = Vec::new();
    let family = build_family(s);
    let n = family.modulus();
    let default = family.a.sections[0];
    let windows = |spec: &LadderSpec| -> Vec<ArithmeticSection> {
        let r = spec.rungs.len();
        let mut found = vec![default];
        for start in 0..r {
            let fits = (0..default.rungs).all(|k| {
                let at = (start + k) % r;
                let next = (at + 1) % r;
                spec.cross_rung != Some(at)
                    && (k + 1 == default.rungs || spec.rungs[at].kind != spec.rungs[next].kind)
            });
            if !fits {
                continue;
            }
            for step in [3, n - 3] {
                let p = ArithmeticSection {
                    start,
                    step,
                    ..default
                };
                if !found.contains(&p) {
                    found.push(p);
                }
            }
        }
        found
    };
    let push = |out: &mut Vec<FamilyPair>, p: FamilyPair| {
        for flip in [false, true] {
            let mut p = p.clone();
            p.b.swap_labels = flip;
            if !out.contains(&p) {
                out.push(p);
            }
        }
    };
    for sa in windows(&family.a) {
        for sb in windows(&family.b) {
            let mut p = family.clone();
            p.a.sections = vec![sa];
            p.b.sections = vec![sb];
            push(&mut out, p);
        }
    }
    for sa in windows(&family.a) {
        let mut p = family.clone();
        p.a.sections = vec![sa];
        p.b.sections.clear();
        push(&mut out, p);
    }
    for sb in windows(&family.b) {
        let mut p = family.clone();
        p.a.sections.clear();
        p.b.sections = vec![sb];
        push(&mut out, p);
    }
    let r = family.a.rungs.len();
    for start in 0..r {
        for step in [3, n - 3] {
            let mut p = family.clone();
            p.a.sections = vec![ArithmeticSection {
                start,
                rungs: r,
                start_current: None,
                step,
                alternating: false,
            }];
            p.b.sections.clear();
            push(&mut out, p);
        }
    }
    let run = (4 * s + 3) as usize;
    let rings_a = (2 * s + 2) as usize;
    let rings_b = (2 * s + 1) as usize;
    let words_a = canonical_words(&[(b'R', rings_a), (b'S', run - rings_a)]);
    let words_b = canonical_words(&[(b'R', rings_b), (b'S', run - rings_b), (b'X', 1)]);
    let valid = |words: &[Vec<u8>]| -> Vec<LadderSpec> {
        let mut specs = Vec::new();
        for kind in [LadderKind::Circular, LadderKind::Mobius] {
            for w in words {
                let spec = spec_from_word(kind, w);
                if spec.slot_model().is_ok() {
                    specs.push(spec);
                }
            }
        }
        specs
    };
    let specs_a = valid(&words_a);
    let specs_b = valid(&words_b);
    for a in &specs_a {
        for b in &specs_b {
            for flip in [false, true] {
                let mut b = b.clone();
                b.swap_labels = flip;
                let pair = FamilyPair { s, a: a.clone(), b };
                let balanced = SearchProblem::new(&pair).is_ok_and(|p| p.sizes_balanced());
                if balanced && !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
    }
    out
}

/// Outcome of searching a list of variants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySearch {
    pub status: Status,
    /// Certified solutions with the index of their variant.
    pub solutions: Vec<(usize, SolvedPair)>,
    pub variants: usize,
    pub variants_searched: usize,
    pub stats: SearchStats,
}

/// Searches `variants` in order until `limits.max_solutions` solutions are
/// certified. Each variant gets the full node budget.
pub fn search_variants(
    variants: &[FamilyPair],
    limits: &Limits,
    should_stop: &mut dyn FnMut() -> bool,
) -> FamilySearch {
    let mut out = FamilySearch {
        status: Status::Exhausted,
        solutions: Vec::new(),
        variants: variants.len(),
        variants_searched: 0,
        stats: SearchStats::default(),
    };
    let mut cut = false;
    for (i, pair) in variants.iter().enumerate() {
        let want = limits.max_solutions - out.solutions.len();
        if want == 0 {
            break;
        }
        let Ok(problem) = SearchProblem::new(pair) else {
            continue;
        };
        let lim = Limits {
            max_nodes: limits.max_nodes,
            max_solutions: want,
        };
        let r = complete(&problem, &lim, should_stop);
        out.variants_searched += 1;
        out.stats.add(&r.stats);
        cut |= r.status == Status::Timeout || !r.complete && r.solutions.is_empty();
        out.solutions
            .extend(r.solutions.into_iter().map(|sol| (i, sol)));
        if (should_stop)() {
            cut = true;
            break;
        }
    }
    out.status = if !out.solutions.is_empty() {
        Status::Found
    } else if cut {
        Status::Timeout
    } else {
        Status::Exhausted
    };
    out
}

/// [`search_variants`] over [`enumerate_topologies`].
pub fn search_family(
    s: u64,
    limits: &Limits,
    should_stop: &mut dyn FnMut() -> bool,
) -> FamilySearch {
    search_variants(&enumerate_topologies(s), limits, should_stop)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn never() -> impl FnMut() -> bool {
        || false
    }

    #[test]
    fn canonical_words_are_orbit_representatives() {
        let words = canonical_words(&[(b'R', 2), (b'S', 1)]);
        assert_eq!(words, vec![b"RRS".to_vec()]);
        let words = canonical_words(&[(b'R', 1), (b'S', 2), (b'X', 1)]);
        assert_eq!(words.len(), 2);
        // every arrangement maps to exactly one representative
        let words = canonical_words(&[(b'R', 4), (b'S', 3)]);
        for w in &words {
            assert_eq!(&dihedral_canonical(w), w);
        }
        assert_eq!(words.len(), 4);
    }

    #[test]
    fn s0_variants() {
        let vs = enumerate_topologies(0);
        assert!(vs.len() >= 2);
        assert_eq!(vs[0].a.sections.len(), 1);
        for v in &vs {
            assert_eq!(v.a.vertex_count(), 10);
            assert_eq!(v.b.vertex_count(), 10);
            let p = SearchProblem::new(v).unwrap();
            assert!(p.sizes_balanced());
        }
    }

    #[test]
    fn s0_found_and_certified() {
        let r = search_family(0, &Limits::default(), &mut never());
        assert_eq!(r.status, Status::Found);
        let (_, sol) = &r.solutions[0];
        let cert = verify_biembedding(&sol.a, &sol.b);
        assert!(cert.is_valid() && cert.e6());
    }

    #[test]
    fn deterministic() {
        let lim = Limits {
            max_nodes: 1_000_000,
            max_solutions: 3,
        };
        let r1 = search_family(0, &lim, &mut never());
        let r2 = search_family(0, &lim, &mut never());
        assert_eq!(r1, r2);
    }

    #[test]
    fn double_booked_residue_is_exhausted_immediately() {
        let mut pair = build_family(0);
        let p = SearchProblem::new(&pair).unwrap();
        // two simple rungs of B lie on [0] on both sides; give both 3
        let rungs: Vec<usize> = pair
            .b
            .layout()
            .unwrap()
            .roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, EdgeRole::Rung { position } if pair.b.cross_rung != Some(*position)))
            .map(|(e, _)| e)
            .collect();
        assert_eq!(rungs.len(), 2);
        drop(p);
        pair.b.sections.clear();
        pair.b.fixed_currents.insert(rungs[0], 3);
        pair.b.fixed_currents.insert(rungs[1], 3);
        let p = SearchProblem::new(&pair).unwrap();
        assert!(p.residue_pools().is_none());
        let r = complete(&p, &Limits::default(), &mut never());
        assert_eq!(r.status, Status::Exhausted);
        assert_eq!(r.stats.nodes, 0);
    }

    #[test]
    fn pools_conserve_residues() {
        let pair = build_family(0);
        let p = SearchProblem::new(&pair).unwrap();
        let pools = p.residue_pools().unwrap();
        for pool in &pools {
            assert_eq!(pool.len(), 20);
        }
    }

    #[test]
    fn node_budget_times_out() {
        let lim = Limits {
            max_nodes: 1,
            max_solutions: 1,
        };
        let p = SearchProblem::new(&build_family(0)).unwrap();
        let r = complete(&p, &lim, &mut never());
        assert_eq!(r.status, Status::Timeout);
        let mut stop = || true;
        let lim = Limits::default();
        let pair = FamilyPair {
            s: 0,
            ..enumerate_topologies(0).pop().unwrap()
        };
        let r = complete(&SearchProblem::new(&pair).unwrap(), &lim, &mut stop);
        assert!(r.status != Status::Exhausted || r.complete);
    }

    #[test]
    fn fixed_start_current() {
        let mut pair = build_family(0);
        let lim = Limits::default();
        let free = complete(&SearchProblem::new(&pair).unwrap(), &lim, &mut never());
        let first = pair.a.rung_edges(pair.a.sections[0].start).unwrap()[0];
        let c = free.solutions[0].a.currents()[first];
        pair.a.sections[0].start_current = Some(c);
        let lim = Limits {
            max_nodes: 10_000_000,
            max_solutions: usize::MAX,
        };
        let r = complete(&SearchProblem::new(&pair).unwrap(), &lim, &mut never());
        assert!(r.complete);
        assert!(!r.solutions.is_empty());
        for sol in &r.solutions {
            assert!(verify_biembedding(&sol.a, &sol.b).is_valid());
            assert_eq!(sol.a.currents()[first], c);
        }
    }

    #[test]
    fn modulus_limit() {
        let pair = build_family(5);
        assert_eq!(
            SearchProblem::new(&pair).unwrap_err(),
            ProblemError::ModulusTooLarge(141)
        );
    }
}
