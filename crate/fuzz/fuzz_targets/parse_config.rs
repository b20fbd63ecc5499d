#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(pairs) = fockwalk_cli::parse_config(s) {
            let _ = fockwalk_cli::ExperimentConfig::from_pairs(pairs);
        }
    }
});
