use std::ffi::{CStr, CString};
use std::ptr;

use polymap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(polymap_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn canonical_map_round_trip() {
    unsafe {
        let xs = [2.5];
        let mut map = ptr::null_mut();
        assert_eq!(polymap_map_new(1, xs.as_ptr(), 1, &mut map), PolymapStatus::Ok);
        let mut deg = 0usize;
        assert_eq!(polymap_map_degree(map, &mut deg), PolymapStatus::Ok);
        assert_eq!(deg, 2);
        let mut v = 0.0;
        assert_eq!(polymap_map_pdf(map, 1, &mut v), PolymapStatus::Ok);
        assert_eq!(v, -2.5);
        assert_eq!(polymap_map_multiplier(map, 0, &mut v), PolymapStatus::Ok);
        assert_eq!(v, 3.5);
        assert_eq!(polymap_map_eval(map, 1.0, &mut v), PolymapStatus::Ok);
        assert_eq!(v, 2.5);
        assert_eq!(polymap_map_fixed_point(map, 1, &mut v), PolymapStatus::Ok);
        assert_eq!(v, 2.5);
        let mut kind = PolymapStability::Indeterminate;
        assert_eq!(polymap_map_classify(map, 1, 1e-8, &mut kind), PolymapStatus::Ok);
        assert_eq!(kind, PolymapStability::Repellor);
        assert_eq!(polymap_map_pdf(map, 5, &mut v), PolymapStatus::IndexOutOfRange);
        assert!(last_error().contains("out of range"));
        polymap_map_free(map);
    }
}

#[test]
fn coefficients_route_through_forms() {
    unsafe {
        // logistic at lambda = 3: f = 3y - 3y^2
        let f = [0.0, 3.0, -3.0];
        let (mut map, mut scale, mut offset) = (ptr::null_mut(), 0.0, 0.0);
        assert_eq!(polymap_map_from_coefficients(f.as_ptr(), 3, &mut map, &mut scale, &mut offset), PolymapStatus::Ok);
        let mut x1 = 0.0;
        assert_eq!(polymap_map_fixed_point(map, 1, &mut x1), PolymapStatus::Ok);
        assert!((x1 - 2.0).abs() < 1e-12);
        assert!((scale - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(offset, 0.0);
        polymap_map_free(map);

        let f = [1.0, 1.0, 1.0];
        assert_eq!(
            polymap_map_from_coefficients(f.as_ptr(), 3, &mut map, ptr::null_mut(), ptr::null_mut()),
            PolymapStatus::ComplexFixedPoints
        );
    }
}

#[test]
fn families() {
    unsafe {
        let name = CString::new("harvest").unwrap();
        let r = CString::new("0.8").unwrap();
        let mut fam = ptr::null_mut();
        assert_eq!(polymap_family_preset(name.as_ptr(), r.as_ptr(), &mut fam), PolymapStatus::Ok);
        let mut map = ptr::null_mut();
        assert_eq!(polymap_family_at(fam, 0.1, &mut map), PolymapStatus::Ok);
        let mut x1 = 0.0;
        assert_eq!(polymap_map_fixed_point(map, 1, &mut x1), PolymapStatus::Ok);
        assert!((x1 - 0.32f64.sqrt()).abs() < 1e-12);
        polymap_map_free(map);
        polymap_family_free(fam);

        let bad = CString::new("nope").unwrap();
        assert_eq!(polymap_family_preset(bad.as_ptr(), ptr::null(), &mut fam), PolymapStatus::UnknownPreset);

        let json = CString::new(r#"{"degree": 2, "s": 1, "fixed_points": ["sqrt(lambda)"], "domain": [-1, 1]}"#).unwrap();
        assert_eq!(polymap_family_from_json(json.as_ptr(), &mut fam), PolymapStatus::Ok);
        assert_eq!(polymap_family_at(fam, -0.5, &mut map), PolymapStatus::Poisoned);
        assert!(last_error().contains("poisoned"));
        polymap_family_free(fam);

        let json = CString::new(r#"{"degree": 2, "s": 1, "fixed_points": ["lambda +"], "domain": [0, 1]}"#).unwrap();
        assert_eq!(polymap_family_from_json(json.as_ptr(), &mut fam), PolymapStatus::Syntax);
    }
}

#[test]
fn bands_and_search() {
    unsafe {
        let (mut v, mut u) = (0.0, 0.0);
        assert_eq!(polymap_band_value(2, 2, &mut v, &mut u), PolymapStatus::Ok);
        assert_eq!(v, 6f64.sqrt());
        assert_eq!(polymap_band_value(4, 1, &mut v, &mut u), PolymapStatus::UnsupportedDegree);
        assert_eq!(polymap_find_bifurcation(2, 3, 1e-6, &mut v, &mut u), PolymapStatus::Ok);
        assert!((v - 2.5440).abs() < 1e-3);
        assert!(u <= 1e-6);
    }
}

#[test]
fn period_detection_and_null_handling() {
    unsafe {
        let tail = [0.2, 0.7, 0.2, 0.7, 0.2, 0.7];
        let mut p = 99usize;
        assert_eq!(polymap_detect_period(tail.as_ptr(), 6, 1e-9, 3, &mut p), PolymapStatus::Ok);
        assert_eq!(p, 2);
        assert_eq!(polymap_detect_period(tail.as_ptr(), 6, 1e-9, 4, &mut p), PolymapStatus::Numerical);
        assert_eq!(polymap_detect_period(ptr::null(), 6, 1e-9, 3, &mut p), PolymapStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(polymap_map_eval(ptr::null(), 1.0, &mut v), PolymapStatus::NullPointer);
        assert_eq!(polymap_map_new(3, ptr::null(), 0, &mut ptr::null_mut()), PolymapStatus::InvalidArgument);
        polymap_map_free(ptr::null_mut());
        polymap_family_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::path::Path::new(dir).join("include/polymap.h");
    let text = std::fs::read_to_string(&header).expect("header generated by the build script");
    for f in ["polymap_map_new", "polymap_family_at", "polymap_last_error", "POLYMAP_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let src = tempfile_path("abi_check.c");
    std::fs::write(
        &src,
        "#include \"polymap.h\"\nint main(void) { PolymapMap *m = 0; double v; \
         return polymap_map_eval(m, 0.0, &v) == POLYMAP_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}

fn tempfile_path(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("polymap-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}
