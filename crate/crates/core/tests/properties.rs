mod common;

use std::collections::BTreeSet;

use graphstory::embedding::enumerate_plane_embeddings;
use graphstory::generators::gen_random_story;
use graphstory::render::{random_points, render_story, verify_drawings};
use graphstory::solver::{brute_force_realize, realize, verify_certificate};
use graphstory::story::{is_planar, visible_filter, GraphStory};
use graphstory::weighted::{distribute_weights, remove_vertex};
use proptest::prelude::*;

fn graph(max_v: u32) -> impl Strategy<Value = (Vec<u32>, Vec<(u32, u32)>)> {
    (1..=max_v).prop_flat_map(|v| {
        let pairs: Vec<(u32, u32)> = (1..=v).flat_map(|a| (a + 1..=v).map(move |b| (a, b))).collect();
        let n = pairs.len();
        (Just((1..=v).collect::<Vec<u32>>()), proptest::sample::subsequence(pairs, 0..=n))
    })
}

#[test]
fn oracle_known_counts() {
    let k = |n: u32| common::all_graphs(n).pop().unwrap();
    assert_eq!(common::count_plane_embeddings(&[1, 2, 3], &k(3)), Some(2));
    assert_eq!(common::count_plane_embeddings(&[1, 2, 3, 4], &k(4)), Some(8));
    assert_eq!(common::count_plane_embeddings(&[1, 2, 3, 4, 5], &k(5)), None);
    // Two isolated vertices, and a triangle with an isolated vertex.
    assert_eq!(common::count_plane_embeddings(&[1, 2], &[]), Some(1));
    assert_eq!(common::count_plane_embeddings(&[1, 2, 3, 4], &k(3)), Some(4));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn embedding_count_matches_rotation_oracle((vs, es) in graph(5)) {
        let got = enumerate_plane_embeddings(&vs, &es).ok().map(|e| e.len() as u64);
        prop_assert_eq!(got, common::count_plane_embeddings(&vs, &es));
    }

    #[test]
    fn restriction_order_does_not_matter((vs, es) in graph(7), pick in any::<prop::sample::Index>(), a in 0usize..7, b in 0usize..7) {
        prop_assume!(vs.len() >= 3 && is_planar(&vs, &es));
        let (a, b) = (vs[a % vs.len()], vs[b % vs.len()]);
        prop_assume!(a != b);
        let embs = enumerate_plane_embeddings(&vs, &es).unwrap();
        let e = &embs[pick.index(embs.len())];
        let ab = e.remove_vertex(a).unwrap().embedding.remove_vertex(b).unwrap().embedding;
        let ba = e.remove_vertex(b).unwrap().embedding.remove_vertex(a).unwrap().embedding;
        prop_assert_eq!(&ab, &ba);
        let keep: BTreeSet<u32> = vs.iter().copied().filter(|&v| v != a && v != b).collect();
        prop_assert_eq!(&e.restrict(&keep).unwrap(), &ab);
    }

    #[test]
    fn removal_conserves_weight((vs, es) in graph(6), k in 0u32..3, pick in any::<prop::sample::Index>(), v in 0usize..6) {
        prop_assume!(is_planar(&vs, &es));
        let e = enumerate_plane_embeddings(&vs, &es).unwrap().remove(0);
        let ws = distribute_weights(&e, k);
        let w = &ws[pick.index(ws.len())];
        let r = remove_vertex(w, vs[v % vs.len()]).unwrap();
        prop_assert_eq!(r.total(), k + 1);
        prop_assert_eq!(r.weights.len(), r.embedding.face_count());
    }

    #[test]
    fn visible_filter_is_idempotent(n in 2u32..12, omega in 1u32..6, edges in prop::collection::vec((1u32..12, 1u32..12), 0..30)) {
        let omega = omega.min(n);
        let edges: Vec<(u32, u32)> = edges.into_iter().filter(|&(a, b)| a != b && a <= n && b <= n).collect();
        let s = GraphStory::new(n, omega, 0, edges).unwrap();
        let (once, _) = visible_filter(&s);
        let (twice, dropped) = visible_filter(&once);
        prop_assert_eq!(dropped, 0);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn solver_agrees_with_brute_force(n in 2u32..9, omega in 1u32..5, k in 0u32..2, p in 0.2f64..0.95, seed in any::<u64>()) {
        let omega = omega.min(n);
        prop_assume!(omega + k <= 5);
        let s = gen_random_story(n, omega, p, seed).unwrap().with_k(k);
        let fast = realize(&s);
        let slow = brute_force_realize(&s);
        match (&fast, &slow) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.is_some(), b.is_some()),
            _ => prop_assert_eq!(fast.is_err(), slow.is_err()),
        }
        if let Ok(Some(c)) = &fast {
            prop_assert!(verify_certificate(&s, c).ok);
            prop_assert_eq!(realize(&s).unwrap().unwrap(), c.clone());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rendering_keeps_face_weights(n in 3u32..10, omega in 2u32..5, k in 0u32..3, seed in any::<u64>(), ps in any::<u64>()) {
        let omega = omega.min(n);
        let s = gen_random_story(n, omega, 0.6, seed).unwrap().with_k(k);
        let Ok(Some(cert)) = realize(&s) else { return Ok(()) };
        let pts = random_points((omega + k) as usize, ps);
        let frames = render_story(&s, &cert, &pts).unwrap();
        prop_assert!(verify_drawings(&s, &frames, &[]).is_ok());
        for f in &frames[cert.first as usize - 1..] {
            let w = &cert.entries[(f.index - cert.first) as usize].weights;
            let mut counts = vec![0u32; w.len()];
            for &(_, face) in &f.free {
                counts[face] += 1;
            }
            prop_assert_eq!(&counts, w);
        }
        prop_assert_eq!(render_story(&s, &cert, &pts).unwrap(), frames);
    }
}
