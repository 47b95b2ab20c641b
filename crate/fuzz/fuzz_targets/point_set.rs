#![no_main]
use graphstory::generators::gen_path_story;
use graphstory::render::{parse_points, render_story, verify_drawings, RenderError};
use graphstory::solver::realize;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(pts) = parse_points(text) else { return };
    if pts.len() != 3 {
        return;
    }
    let story = gen_path_story(5, 3).expect("path story");
    let cert = realize(&story).expect("solves").expect("paths are realizable");
    match render_story(&story, &cert, &pts) {
        Ok(frames) => verify_drawings(&story, &frames, &[]).expect("rendered frames verify"),
        Err(RenderError::CoincidentPoints(_)) => {}
        Err(e) => panic!("unexpected render error: {e}"),
    }
});
