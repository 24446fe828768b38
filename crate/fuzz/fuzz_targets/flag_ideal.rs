#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::filtrations::{flag_curve_value, MonomialIdealData};
use toricstab::geometry::LatticeVector;
use toricstab::rational::{int, ratio};

fuzz_target!(|data: &[u8]| {
    let Ok(ideals) = serde_json::from_slice::<MonomialIdealData>(data) else {
        return;
    };
    if ideals.dim() == 0 || ideals.dim() > 4 || ideals.len() > 16 {
        return;
    }
    let u = LatticeVector((0..ideals.dim() as i64).map(|i| 1 - 2 * (i % 2)).collect());
    let m = ideals.len() as i64;
    for k in 0..=2 * m {
        let tau = -ratio(k, 2);
        let v = flag_curve_value(&ideals, &tau, &u).expect("tau in range");
        let _ = v;
    }
    assert!(flag_curve_value(&ideals, &int(1), &u).is_err());
});
