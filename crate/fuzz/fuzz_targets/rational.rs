#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::rational::{format_rational, parse_rational};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(q) = parse_rational(s) {
            let printed = format_rational(&q);
            assert_eq!(parse_rational(&printed).unwrap(), q, "{printed}");
        }
    }
});
