#![no_main]

use libfuzzer_sys::fuzz_target;
use pfbound::io::read_counts;

fuzz_target!(|data: &[u8]| {
    let start = "1999-06-01T15:30:00Z".parse().unwrap();
    if let Ok(bins) = read_counts(data, start) {
        assert!(bins.windows(2).all(|w| w[0].t_start < w[1].t_start));
    }
});
