#![no_main]

use gravwave::diagnostics::{read_diagnostics, DiagnosticsWriter};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(d) = read_diagnostics(data) else {
        return;
    };
    let mut buf = Vec::new();
    {
        let mut w = DiagnosticsWriter::new(&mut buf, d.probes).unwrap();
        for r in &d.records {
            w.write(r).unwrap();
        }
    }
    assert_eq!(read_diagnostics(&buf).unwrap(), d);
});
