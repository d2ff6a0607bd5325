#![no_main]

use craft_core::experiment::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

// Accepted configs must validate and hash without panicking.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::parse(text) {
            let _ = cfg.validate();
            assert_eq!(cfg.hash().len(), 64);
        }
    }
});
