#![no_main]

use libfuzzer_sys::fuzz_target;
use saso_metrics::harness::{parse_param, RunConfig};
use saso_metrics::scenario::ScenarioKind;

// one override per line; applying and validating must never panic
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    for kind in ScenarioKind::ALL {
        let mut config = RunConfig::defaults(kind, 1);
        for line in s.lines() {
            if let Ok((key, _)) = parse_param(line) {
                assert!(!key.is_empty());
            }
            let _ = config.apply_param(line);
        }
        let _ = config.validate();
    }
});
