//! Variant search over several threads.
//!
//! Variants are handed out in order. A variant's result depends only on the
//! variant and the node budget, and the reported solution is always the one
//! from the lowest-numbered variant that has one, so the answer does not
//! depend on the thread count. A wall-clock deadline is the only source of
//! nondeterminism.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use biembed_core::family::FamilyPair;
use biembed_core::search::{complete, FamilySearch, Limits, SearchProblem, SearchResult, SearchStats, Status};

/// Searches `variants` with `threads` workers. With `limits.max_solutions`
/// equal to 1 the search stops at the first variant that has a solution;
/// otherwise every variant is searched for up to that many solutions and
/// the solutions are reported in variant order.
pub fn search(
    variants: &[FamilyPair],
    limits: &Limits,
    threads: usize,
    deadline: Option<Instant>,
) -> FamilySearch {
    let first_only = limits.max_solutions == 1;
    let next = AtomicUsize::new(0);
    let best = AtomicUsize::new(usize::MAX);
    let expired = AtomicBool::new(false);
    let results: Mutex<Vec<Option<SearchResult>>> = Mutex::new(vec![None; variants.len()]);

    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= variants.len() || (first_only && best.load(Ordering::SeqCst) < i) {
            return;
        }
        if expired.load(Ordering::SeqCst) {
            return;
        }
        let Ok(problem) = SearchProblem::new(&variants[i]) else {
            continue;
        };
        let mut stop = || {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                expired.store(true, Ordering::SeqCst);
                return true;
            }
            first_only && best.load(Ordering::SeqCst) < i
        };
        let r = complete(&problem, limits, &mut stop);
        if r.status == Status::Found {
            best.fetch_min(i, Ordering::SeqCst);
        }
        results.lock().unwrap()[i] = Some(r);
    };
    std::thread::scope(|scope| {
        for _ in 1..threads.max(1) {
            scope.spawn(worker);
        }
        worker();
    });

    let results = results.into_inner().unwrap();
    let mut out = FamilySearch {
        status: Status::Exhausted,
        solutions: Vec::new(),
        variants: variants.len(),
        variants_searched: 0,
        stats: SearchStats::default(),
    };
    let mut cut = false;
    for (i, r) in results.into_iter().enumerate() {
        if first_only && !out.solutions.is_empty() {
            break;
        }
        let Some(r) = r else {
            // never started: the deadline passed or an earlier variant won
            if SearchProblem::new(&variants[i]).is_ok() && out.solutions.is_empty() {
                cut = true;
            }
            continue;
        };
        out.variants_searched += 1;
        out.stats.add(&r.stats);
        cut |= !r.complete && r.solutions.is_empty();
        out.solutions.extend(r.solutions.into_iter().map(|s| (i, s)));
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
