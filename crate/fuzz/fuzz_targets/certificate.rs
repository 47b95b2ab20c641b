#![no_main]
use graphstory::solver::{verify_certificate, Certificate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cert) = Certificate::from_json(text) else { return };
    if cert.story.n() > 40 {
        return;
    }
    let report = verify_certificate(&cert.story, &cert);
    assert_eq!(report.ok, report.failure.is_none());
});
