#![no_main]
use dualflow::CurvatureFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let n = 1 + data[0] as usize % 8;
    if let Ok(name) = std::str::from_utf8(&data[1..]) {
        if let Ok(f) = CurvatureFunction::parse(name, n) {
            let _ = f.eval(&vec![1.0; n]);
        }
    }
});
