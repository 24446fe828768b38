#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::poly::PiecewisePolynomial;

fuzz_target!(|data: &[u8]| {
    if data.len() > 2048 {
        return;
    }
    let Ok(f) = serde_json::from_slice::<PiecewisePolynomial>(data) else {
        return;
    };
    for b in f.breakpoints() {
        assert!(f.eval(b).is_some());
    }
    let _ = f.integral();
    let back: PiecewisePolynomial = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(back, f);
});
