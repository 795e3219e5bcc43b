#![no_main]
use dualflow::snapshot::{parse_snapshot, surface_from_rows};
use dualflow::SpaceTag;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_snapshot(text) {
        let _ = surface_from_rows(&rows, SpaceTag::DeSitter, 2);
        let _ = surface_from_rows(&rows, SpaceTag::Hyperbolic, 3);
    }
});
