#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = varlc::parse_trajectory(text) {
            assert_eq!(table.columns[0], "t");
            assert!(table.rows.len() >= 2);
            let t = table.times();
            assert!(t.windows(2).all(|w| w[1] > w[0]));
            assert!(table.rows.iter().all(|r| r.len() == table.columns.len()));
        }
    }
});
