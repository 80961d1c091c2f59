#![no_main]

use libfuzzer_sys::fuzz_target;
use pfbound::io::{bound_from_rows, read_series};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_series(data) {
        if let Ok(bound) = bound_from_rows(&rows, 3600.0) {
            assert!(!bound.is_nan());
        }
    }
});
