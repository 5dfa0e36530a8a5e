#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = varlc::parse_config(text) {
            let (t0, t1) = cfg.horizon();
            assert!(t1 > t0);
            assert!(cfg.steps > 0 && cfg.tol > 0.0);
        }
    }
});
