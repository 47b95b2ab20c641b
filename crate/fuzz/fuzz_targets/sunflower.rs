#![no_main]
use graphstory::generators::{gen_sunflower_reduction, SunflowerInstance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(inst) = SunflowerInstance::from_json(text) else { return };
    if inst.n > 30 {
        return;
    }
    let Ok(r) = gen_sunflower_reduction(&inst, 0) else { return };
    assert_eq!(r.story.n(), inst.n + 10 * r.omega_tilde);
    assert_eq!(r.story.omega(), inst.n + 6 * r.omega_tilde);
});
