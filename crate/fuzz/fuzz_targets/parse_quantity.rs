#![no_main]

use libfuzzer_sys::fuzz_target;
use pfbound::units;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = units::parse_length(text);
    let _ = units::parse_duration(text);
    let _ = units::parse_speed(text);
    let _ = units::parse_rate(text);
    let _ = units::parse_number(text);
    let _ = units::parse_right_ascension(text);
    if let Ok(lat) = units::parse_latitude(text) {
        assert!(lat.is_finite());
    }
    if let Ok(lon) = units::parse_longitude(text) {
        assert!(lon.is_finite());
    }
    if let Ok(angle) = units::parse_angle(text) {
        assert!(angle.is_finite());
    }
});
