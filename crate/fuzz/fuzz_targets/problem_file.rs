#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::problem::Problem;

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = Problem::parse(text) {
        for name in p.divisor_names() {
            let d = p.divisor(name).expect("listed names resolve");
            assert_eq!(d.len(), p.fan().ray_count());
        }
    }
});
