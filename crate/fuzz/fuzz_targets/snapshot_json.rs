#![no_main]

use gravwave::snapshot::Snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Snapshot::from_json(text) {
        assert_eq!(Snapshot::from_json(&s.to_json()).unwrap(), s);
    }
});
