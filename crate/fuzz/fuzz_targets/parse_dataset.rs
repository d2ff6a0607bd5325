#![no_main]

use craft_core::exbmdp::format::{parse_dataset, render_dataset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ds) = parse_dataset(text) {
        let again = parse_dataset(&render_dataset(&ds)).expect("rendered dataset must parse");
        assert_eq!(again, ds);
    }
});
