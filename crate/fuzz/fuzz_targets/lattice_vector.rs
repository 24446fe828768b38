#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::geometry::LatticeVector;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = s.parse::<LatticeVector>() {
        let again: LatticeVector = v.to_string().parse().unwrap();
        assert_eq!(again, v);
        let _ = v.is_primitive();
        let _ = v.l1_norm();
    }
});
