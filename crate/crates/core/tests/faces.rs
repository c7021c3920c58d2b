use biembed_core::topology::{
    euler_characteristic, euler_genus, face_of_darts, is_connected, trace_faces, Dart,
    EmbeddedMultigraph,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A random multigraph on `v` vertices with random rotations. Vertices left
/// without edges are isolated, which the tracer must tolerate.
fn random_embedding(v: usize, pairs: &[(usize, usize)], seed: u64) -> EmbeddedMultigraph {
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(a, b)| (a % v, b % v))
        .filter(|&(a, b)| a != b)
        .collect();
    let mut rotations = vec![Vec::new(); v];
    for (e, &(a, b)) in edges.iter().enumerate() {
        rotations[a].push(Dart::plus(e));
        rotations[b].push(Dart::minus(e));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in &mut rotations {
        r.shuffle(&mut rng);
    }
    EmbeddedMultigraph::new(v, edges, rotations).unwrap()
}

fn setup() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, u64)> {
    (2usize..=12).prop_flat_map(|v| {
        (
            Just(v),
            prop::collection::vec((0..v, 0..v), 0..30),
            any::<u64>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn faces_partition_the_darts((v, pairs, seed) in setup()) {
        let emb = random_embedding(v, &pairs, seed);
        let faces = trace_faces(&emb);
        let mut seen = vec![0u32; emb.dart_count()];
        for f in &faces {
            prop_assert!(!f.is_empty());
            for d in f.iter() {
                seen[d.index()] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let total: usize = faces.iter().map(|f| f.len()).sum();
        prop_assert_eq!(total, 2 * emb.edge_count());
        let owner = face_of_darts(&faces, emb.dart_count());
        for (i, f) in faces.iter().enumerate() {
            for d in f.iter() {
                prop_assert_eq!(owner[d.index()], i);
                // consecutive darts of a face follow the face permutation
                prop_assert_eq!(owner[emb.face_next(d).index()], i);
            }
        }
    }

    #[test]
    fn euler_characteristic_is_even_when_connected((v, pairs, seed) in setup()) {
        let emb = random_embedding(v, &pairs, seed);
        if is_connected(&emb) {
            let chi = euler_characteristic(&emb);
            prop_assert_eq!(chi.rem_euclid(2), 0);
            prop_assert!(chi <= 2);
            let g = euler_genus(&emb).unwrap();
            prop_assert_eq!(2 - 2 * g as i64, chi);
        } else {
            prop_assert!(euler_genus(&emb).is_err());
        }
    }
}

#[test]
fn k7_difference_rotation_is_toroidal() {
    // rotation at i: i+1, i+3, i+2, i+6, i+4, i+5 (mod 7)
    let n = 7usize;
    let mut edges = Vec::new();
    let mut index = std::collections::HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            index.insert((i, j), edges.len());
            edges.push((i, j));
        }
    }
    let dart = |i: usize, j: usize| {
        if i < j {
            Dart::plus(index[&(i, j)])
        } else {
            Dart::minus(index[&(j, i)])
        }
    };
    let rotations = (0..n)
        .map(|i| [1, 3, 2, 6, 4, 5].iter().map(|&d| dart(i, (i + d) % n)).collect())
        .collect();
    let emb = EmbeddedMultigraph::new(n, edges, rotations).unwrap();
    let faces = trace_faces(&emb);
    assert_eq!(faces.len(), 14);
    assert!(faces.iter().all(|f| f.len() == 3));
    assert_eq!(euler_genus(&emb), Ok(1));
}
