//! Replays the checked-in fuzz seeds through the same entry points as the
//! fuzz targets, so the stable toolchain exercises them too.

use std::fs;
use std::path::PathBuf;

use toricstab::filtrations::{flag_curve_value, MonomialIdealData};
use toricstab::geometry::LatticeVector;
use toricstab::poly::PiecewisePolynomial;
use toricstab::problem::Problem;
use toricstab::rational::{format_rational, parse_rational, ratio};
use toricstab::toric::{Fan, FanData};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).unwrap()
}

#[test]
fn problem_file_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("problem_file") {
        if let Ok(p) = Problem::parse(text(&data)) {
            accepted += 1;
            for d in p.divisor_names() {
                assert_eq!(p.divisor(d).unwrap().len(), p.fan().ray_count(), "{name}");
            }
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn rational_seeds() {
    for (name, data) in seeds("rational") {
        if let Ok(q) = parse_rational(text(&data)) {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q, "{name}");
        }
    }
}

#[test]
fn lattice_vector_seeds() {
    let mut rejected = 0;
    for (name, data) in seeds("lattice_vector") {
        match text(&data).parse::<LatticeVector>() {
            Ok(v) => assert_eq!(v.to_string().parse::<LatticeVector>().unwrap(), v, "{name}"),
            Err(_) => rejected += 1,
        }
    }
    assert!(rejected >= 3, "oversized and malformed seeds are rejected");
}

#[test]
fn fan_json_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("fan_json") {
        let raw: FanData = serde_json::from_slice(&data).unwrap();
        if let Ok(fan) = Fan::try_from(raw) {
            valid += 1;
            let back: Fan = serde_json::from_str(&serde_json::to_string(&fan).unwrap()).unwrap();
            assert_eq!(back.rays(), fan.rays(), "{name}");
        }
    }
    assert_eq!(valid, 3);
}

#[test]
fn flag_ideal_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("flag_ideal") {
        let Ok(ideals) = serde_json::from_slice::<MonomialIdealData>(&data) else {
            continue;
        };
        valid += 1;
        let u = LatticeVector(vec![1; ideals.dim()]);
        for k in 0..=2 * ideals.len() as i64 {
            flag_curve_value(&ideals, &-ratio(k, 2), &u).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
    assert_eq!(valid, 3);
}

#[test]
fn piecewise_json_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("piecewise_json") {
        let Ok(f) = serde_json::from_slice::<PiecewisePolynomial>(&data) else {
            continue;
        };
        valid += 1;
        for b in f.breakpoints() {
            assert!(f.eval(b).is_some(), "{name}");
        }
        assert!(
            f.pieces()
                .iter()
                .all(|p| p.coeffs().last().is_none_or(|c| *c != ratio(0, 1))),
            "{name}"
        );
    }
    assert_eq!(valid, 3);
}
