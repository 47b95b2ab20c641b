#![no_main]
use graphstory::story::{parse_story, visible_filter};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(parsed) = parse_story(text) else { return };
    let s = parsed.story;
    let again = parse_story(&s.to_json()).expect("serialized story parses");
    assert_eq!(again.story, s);
    assert_eq!(again.removed_invisible, 0);
    let (once, _) = visible_filter(&s);
    assert_eq!(visible_filter(&once).1, 0);
});
