#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// Records `re_in im_in re_out im_out`.
pub fn load_erfc_fixture(name: &str) -> Vec<(Complex64, Complex64)> {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture present");
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse().expect("numeric field"))
                .collect();
            assert_eq!(v.len(), 4, "bad record: {line}");
            (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
        })
        .collect()
}
