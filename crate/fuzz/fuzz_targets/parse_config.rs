#![no_main]
use dualflow_cli::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // either a config or a list of violations, never a panic
        if let Err(e) = parse_config(text) {
            assert!(!e.violations.is_empty());
        }
    }
});
