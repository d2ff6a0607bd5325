#![no_main]

use craft_core::exbmdp::format::parse_header;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(line) = std::str::from_utf8(data) {
        if let Ok(header) = parse_header(line) {
            assert_eq!(parse_header(&header.render()).unwrap(), header);
        }
    }
});
