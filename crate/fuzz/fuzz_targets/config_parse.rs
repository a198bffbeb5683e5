#![no_main]

use gravwave::config::{parse_config_str, render_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config_str(text) {
        // an accepted config must survive its own rendering
        let again = parse_config_str(&render_config(&cfg)).expect("rendered config parses");
        assert_eq!(again, cfg);
    }
});
