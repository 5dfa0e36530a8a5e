#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = varlc::parse_sweep_spec(text) {
            if spec.count <= 4096 {
                let v = spec.values();
                assert_eq!(v.len(), spec.count);
                assert!(v.iter().all(|x| x.is_finite()));
            }
        }
    }
});
