#![no_main]

use libfuzzer_sys::fuzz_target;
use pfbound::config::{parse_config, serialize_record, Document};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = Document::parse(text) {
        let _ = pfbound::config::scan_spec(&doc);
        let _ = pfbound::config::plan_overrides(&doc);
    }
    if let Ok(record) = parse_config(text) {
        let again = parse_config(&serialize_record(&record)).expect("serialized record parses");
        assert_eq!(again, record);
    }
});
