#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = fockwalk_cli::parse_angle(s) {
            assert!(v.is_finite());
        }
    }
});
