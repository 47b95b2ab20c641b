use graphstory::generators::{no_supporting_fixture, gen_path_story, gen_random_story, gen_sp_unrealizable};
use graphstory::render::{random_points, render_story, verify_drawings, DrawingViolation, Frame, Pt, RenderError};
use graphstory::solver::{min_k_with, realize, SolverConfig};
use graphstory::special::one_reroute_realize;
use graphstory::story::GraphStory;

fn points_for(story: &GraphStory, seed: u64) -> Vec<Pt> {
    random_points((story.omega().min(story.n()) + story.k()) as usize, seed)
}

#[test]
fn path_story_renders_every_frame() {
    let s = gen_path_story(9, 4).unwrap();
    let cert = realize(&s).unwrap().unwrap();
    let frames = render_story(&s, &cert, &points_for(&s, 1)).unwrap();
    assert_eq!(frames.len(), 9);
    assert_eq!(frames.iter().map(|f| f.index).collect::<Vec<_>>(), (1..=9).collect::<Vec<_>>());
    verify_drawings(&s, &frames, &[]).unwrap();
}

#[test]
fn spare_points_follow_weights() {
    for seed in 0..6 {
        let s = gen_random_story(10, 4, 0.6, seed).unwrap().with_k(2);
        let cert = realize(&s).unwrap().unwrap();
        for ps in [3, 4] {
            let frames = render_story(&s, &cert, &points_for(&s, ps)).unwrap();
            verify_drawings(&s, &frames, &[]).unwrap();
            for f in &frames[cert.first as usize - 1..] {
                let w = &cert.entries[(f.index - cert.first) as usize].weights;
                let mut counts = vec![0; w.len()];
                for (_, face) in &f.free {
                    counts[*face] += 1;
                }
                assert_eq!(&counts, w, "seed {seed} frame {}", f.index);
            }
        }
    }
}

#[test]
fn short_story_uses_a_single_window() {
    let s = GraphStory::new(4, 4, 1, [(1, 2), (2, 3), (3, 1), (1, 4)]).unwrap();
    let cert = realize(&s).unwrap().unwrap();
    let frames = render_story(&s, &cert, &points_for(&s, 5)).unwrap();
    assert_eq!(frames.len(), 4);
    verify_drawings(&s, &frames, &[]).unwrap();
}

#[test]
fn threshold_story_renders_with_one_spare_point() {
    let s = gen_sp_unrealizable(5).unwrap();
    let (k, cert) = min_k_with(&s, 2, &SolverConfig::default()).unwrap().unwrap();
    let s = s.with_k(k);
    for seed in [11, 12] {
        let frames = render_story(&s, &cert, &points_for(&s, seed)).unwrap();
        verify_drawings(&s, &frames, &[]).unwrap();
    }
}

#[test]
fn reroutes_change_only_the_logged_edge() {
    let s = gen_sp_unrealizable(5).unwrap();
    let real = one_reroute_realize(&s).unwrap();
    assert!(!real.reroutes.is_empty());
    let cert = real.certificate();
    let frames = render_story(&s, &cert, &points_for(&s, 2)).unwrap();
    verify_drawings(&s, &frames, &cert.reroutes).unwrap();
    let r = &cert.reroutes[0];
    let (prev, next) = (&frames[r.step as usize - 2], &frames[r.step as usize - 1]);
    let e = (r.edge[0].min(r.edge[1]), r.edge[0].max(r.edge[1]));
    assert_ne!(prev.edges[&e], next.edges[&e]);
    assert!(matches!(verify_drawings(&s, &frames, &[]), Err(DrawingViolation::R2 { .. })));
}

#[test]
fn tampering_is_detected() {
    let s = no_supporting_fixture();
    let cert = realize(&s).unwrap().unwrap();
    let mut frames = render_story(&s, &cert, &points_for(&s, 3)).unwrap();
    verify_drawings(&s, &frames, &[]).unwrap();

    let mut nudged = frames.clone();
    let j = nudged.iter().position(|f| f.index == 9).unwrap();
    let line = nudged[j].edges.values_mut().find(|l| l.len() > 2).expect("bent polyline");
    line[1].x += num_rational::BigRational::new(1.into(), 1_000_000.into());
    assert!(verify_drawings(&s, &nudged, &[]).is_err());

    let j = frames.len() - 1;
    let clash = frames[j].vertices[&s.n()].clone();
    frames[j].free.push((clash, 0));
    assert!(matches!(verify_drawings(&s, &frames, &[]), Err(DrawingViolation::R1 { .. })));
}

#[test]
fn crossing_diagonals_are_rejected() {
    let s = GraphStory::new(4, 4, 0, [(1, 3), (2, 4)]).unwrap();
    let p = [Pt::int(0, 0), Pt::int(4, 0), Pt::int(4, 4), Pt::int(0, 4)];
    let frames: Vec<Frame> = (1..=4u32)
        .map(|j| {
            let vertices = (1..=j).map(|v| (v, p[v as usize - 1].clone())).collect();
            let edges = [(1, 3), (2, 4)]
                .into_iter()
                .filter(|&(_, b)| b <= j)
                .map(|(a, b)| ((a, b), vec![p[a as usize - 1].clone(), p[b as usize - 1].clone()]))
                .collect();
            Frame { index: j, vertices, edges, free: Vec::new() }
        })
        .collect();
    assert!(verify_drawings(&s, &frames[..3], &[]).is_err());
    assert_eq!(verify_drawings(&s, &frames, &[]), Err(DrawingViolation::R1 { frame: 4, detail: "edge 1-3 crosses another polyline".into() }));
}

#[test]
fn wrong_point_count_is_rejected() {
    let s = gen_path_story(6, 3).unwrap();
    let cert = realize(&s).unwrap().unwrap();
    let err = render_story(&s, &cert, &random_points(4, 0)).unwrap_err();
    assert!(matches!(err, RenderError::PointCount { expected: 3, got: 4 }));
    let dup = vec![Pt::int(0, 0), Pt::int(1, 5), Pt::int(0, 0)];
    assert!(matches!(render_story(&s, &cert, &dup), Err(RenderError::CoincidentPoints(2))));
}

#[test]
fn rendering_is_deterministic() {
    let s = gen_random_story(9, 5, 0.5, 4).unwrap();
    let cert = realize(&s).unwrap().unwrap();
    let pts = points_for(&s, 9);
    assert_eq!(render_story(&s, &cert, &pts).unwrap(), render_story(&s, &cert, &pts).unwrap());
}
