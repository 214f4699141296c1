use std::ffi::{c_char, CStr, CString};
use std::ptr;

use delone_ffi::*;

const FIB: &str = include_str!("../../../specs/fibonacci.spec");

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe { delone_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn classify_golden_ratio() {
    let p = CString::new("x^2-x-1").unwrap();
    let mut class = DeloneClass::Unclassified;
    let mut m = 0.0;
    let s = unsafe { delone_classify(p.as_ptr(), &mut class, &mut m) };
    assert_eq!(s, DeloneStatus::Ok);
    assert_eq!(class, DeloneClass::Pisot);
    assert!((m - 0.618_033_988_749_895).abs() < 1e-12);
}

#[test]
fn classify_errors() {
    let mut class = DeloneClass::Unclassified;
    let mut m = 0.0;
    let s = unsafe { delone_classify(ptr::null(), &mut class, &mut m) };
    assert_eq!(s, DeloneStatus::NullPointer);
    let p = CString::new("x^2-2x").unwrap();
    let s = unsafe { delone_classify(p.as_ptr(), &mut class, &mut m) };
    assert_ne!(s, DeloneStatus::Ok);
    assert!(!last_error().is_empty());
}

#[test]
fn spec_roundtrip() {
    let src = CString::new(FIB).unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { delone_spec_parse(src.as_ptr(), &mut spec) }, DeloneStatus::Ok);
    let mut d = 0;
    assert_eq!(unsafe { delone_spec_dimension(spec, &mut d) }, DeloneStatus::Ok);
    assert_eq!(d, 1);

    let (mut gap, mut ok) = (1.0, 0);
    assert_eq!(unsafe { delone_spec_validate(spec, -30.0, 30.0, &mut gap, &mut ok) }, DeloneStatus::Ok);
    assert_eq!(ok, 1);
    assert!(gap < 1e-9);

    let mut set = ptr::null_mut();
    assert_eq!(unsafe { delone_spec_generate(spec, -20.0, 20.0, &mut set) }, DeloneStatus::Ok);
    let (mut len, mut dim) = (0, 0);
    assert_eq!(unsafe { delone_pointset_shape(set, &mut len, &mut dim) }, DeloneStatus::Ok);
    assert_eq!(dim, 1);
    assert!(len > 10);

    let mut pos = vec![0.0; len];
    let mut col = vec![0u32; len];
    assert_eq!(
        unsafe { delone_pointset_points(set, pos.as_mut_ptr(), col.as_mut_ptr(), len - 1) },
        DeloneStatus::BufferTooSmall
    );
    assert_eq!(unsafe { delone_pointset_points(set, pos.as_mut_ptr(), col.as_mut_ptr(), len) }, DeloneStatus::Ok);
    assert!(pos.iter().all(|x| (-20.0..=20.0).contains(x)));
    assert!(col.iter().all(|&c| c < 2));

    for (fmt, needle) in [(0, "<svg"), (1, "color,")] {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { delone_pointset_export(set, fmt, &mut s) }, DeloneStatus::Ok);
        assert!(unsafe { CStr::from_ptr(s) }.to_str().unwrap().starts_with(needle));
        unsafe { delone_string_free(s) };
    }
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { delone_pointset_export(set, 7, &mut s) }, DeloneStatus::InvalidArgument);
    assert!(s.is_null());

    unsafe {
        delone_pointset_free(set);
        delone_spec_free(spec);
    }
}

#[test]
fn parse_error_reports_position() {
    let src = CString::new("field x^2-x-1\nframe (1,0\n").unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { delone_spec_parse(src.as_ptr(), &mut spec) }, DeloneStatus::ParseError);
    assert!(spec.is_null());
    assert!(last_error().contains('2'));
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/delone.h")).unwrap();
    for f in
        ["delone_classify", "delone_spec_parse", "delone_pointset_export", "delone_string_free", "DELONE_STATUS_PANIC"]
    {
        assert!(h.contains(f), "{f}");
    }
}
