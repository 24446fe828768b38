#![no_main]

use libfuzzer_sys::fuzz_target;
use toricstab::geometry::LatticeVector;
use toricstab::toric::{Fan, FanData};

// Fans from raw JSON, without the problem-file size limits, so keep them small.
fuzz_target!(|data: &[u8]| {
    let Ok(raw) = serde_json::from_slice::<FanData>(data) else {
        return;
    };
    if raw.rays.len() > 12 || raw.rays.iter().any(|r| r.dim() > 3) || raw.cones.len() > 24 {
        return;
    }
    if let Ok(fan) = Fan::try_from(raw) {
        let json = serde_json::to_string(&fan).unwrap();
        let back: Fan = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rays(), fan.rays());
        let probe = LatticeVector(vec![1; fan.dim()]);
        let _ = fan.locate(&probe);
    }
});
