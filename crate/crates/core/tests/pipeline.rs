use biembed_core::bounds::{b_of_s, bigenus_lower};
use biembed_core::derive::{genus_formula, verify_biembedding};
use biembed_core::family::{swap_pairs, swap_rungs, SwapError};
use biembed_core::search::{search_family, Limits, SolvedPair, Status};

fn never() -> impl FnMut() -> bool {
    || false
}

fn s0_pair() -> SolvedPair {
    let r = search_family(0, &Limits::default(), &mut never());
    assert_eq!(r.status, Status::Found);
    r.solutions[0].1.clone()
}

#[test]
fn s0_pair_is_an_equal_genus_biembedding_of_k21() {
    let sol = s0_pair();
    for g in [&sol.a, &sol.b] {
        assert_eq!(g.modulus(), 21);
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.embedding().edge_count(), 15);
    }
    let cert = verify_biembedding(&sol.a, &sol.b);
    assert!(cert.is_equal_genus(), "{:?}", cert.failures);
    assert!(cert.e1() && cert.e2() && cert.e3() && cert.e4() && cert.e5() && cert.e6());
    assert!(cert.partition_ok);
    for side in [&cert.a, &cert.b] {
        let d = side.derived.as_ref().unwrap();
        assert_eq!((d.vertices, d.edges, d.faces), (21, Some(105), Some(70)));
        assert!(d.triangular && d.connected);
        assert_eq!(d.genus, Some(8));
        assert_eq!(d.genus, Some(bigenus_lower(21) as usize));
        assert_eq!(side.formula_genus, Some(b_of_s(0) as i64));
    }
}

#[test]
fn search_is_deterministic() {
    assert_eq!(s0_pair(), s0_pair());
}

#[test]
fn one_swap_gives_genera_1_and_15() {
    let sol = s0_pair();
    let (a, b, residues) = swap_pairs(&sol.a, &sol.b, 1, true).unwrap();
    assert_eq!(residues.len(), 2);
    assert!(residues.iter().all(|r| r % 3 == 0));
    assert_eq!((a.vertex_count(), b.vertex_count()), (6, 14));
    let cert = verify_biembedding(&a, &b);
    assert!(cert.is_valid(), "{:?}", cert.failures);
    assert!(!cert.e6());
    assert_eq!((cert.a.genus(), cert.b.genus()), (Some(1), Some(15)));
    // b(s) -+ (8s + 7) k
    assert_eq!(cert.a.genus(), Some(8 - 7));
    assert_eq!(cert.b.genus(), Some(8 + 7));
    assert_eq!(genus_formula(6, 7), Ok(1));
    assert_eq!(genus_formula(14, 7), Ok(15));
}

#[test]
fn zero_swaps_is_the_identity() {
    let sol = s0_pair();
    let (a, b, residues) = swap_pairs(&sol.a, &sol.b, 0, true).unwrap();
    assert!(residues.is_empty());
    assert_eq!((a, b), (sol.a, sol.b));
}

#[test]
fn swap_preconditions() {
    let sol = s0_pair();
    assert_eq!(
        swap_pairs(&sol.a, &sol.b, 2, true).unwrap_err(),
        SwapError::TooManyPairs { requested: 2, max: 1 }
    );
    assert_eq!(
        swap_rungs(&sol.a, &sol.b, &[3], true).unwrap_err(),
        SwapError::OddSiteCount(1)
    );
    assert_eq!(
        swap_rungs(&sol.a, &sol.b, &[1, 2], true).unwrap_err(),
        SwapError::NotSwappable { residue: 1 }
    );
}

#[test]
fn rotation_rule_alone_swaps_the_s0_pair() {
    let sol = s0_pair();
    let (a, b, _) = swap_pairs(&sol.a, &sol.b, 1, false).unwrap();
    let cert = verify_biembedding(&a, &b);
    assert!(cert.is_valid(), "{:?}", cert.failures);
    assert_eq!((cert.a.genus(), cert.b.genus()), (Some(1), Some(15)));
}
