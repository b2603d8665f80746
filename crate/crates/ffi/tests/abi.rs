use std::ffi::{CStr, CString};
use std::ptr;

use sipkit_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sipkit_last_error()) }.to_string_lossy().into_owned()
}

fn set_values(set: *const SipkitIntSet) -> Vec<i64> {
    let n = unsafe { sipkit_intset_len(set) };
    (0..n)
        .map(|i| {
            let mut v = 0;
            assert_eq!(unsafe { sipkit_intset_get(set, i, &mut v) }, SipkitStatus::Ok);
            v
        })
        .collect()
}

#[test]
fn expansion_functions() {
    let mut z = 0u64;
    assert_eq!(unsafe { sipkit_z_count(c("5").as_ptr(), &mut z) }, SipkitStatus::Ok);
    assert_eq!(z, 1);
    let big = c("123456789012345678901234567890");
    assert_eq!(unsafe { sipkit_z_count(big.as_ptr(), &mut z) }, SipkitStatus::Ok);

    assert_eq!(unsafe { sipkit_z_count(c("0").as_ptr(), &mut z) }, SipkitStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { sipkit_z_count(c("x").as_ptr(), &mut z) }, SipkitStatus::InvalidArgument);
    assert_eq!(unsafe { sipkit_z_count(ptr::null(), &mut z) }, SipkitStatus::NullPointer);
    assert_eq!(
        unsafe { sipkit_z_count(c("5").as_ptr(), ptr::null_mut()) },
        SipkitStatus::NullPointer
    );

    let mut class = 9u32;
    assert_eq!(unsafe { sipkit_color_class(c("7").as_ptr(), 3, &mut class) }, SipkitStatus::Ok);
    assert_eq!(class, 2);
    assert_eq!(unsafe { sipkit_color_class(c("7").as_ptr(), 4, &mut class) }, SipkitStatus::Domain);

    let mut ty = SipkitSignType::Positive;
    assert_eq!(unsafe { sipkit_sign_type(c("5").as_ptr(), &mut ty) }, SipkitStatus::Ok);
    assert_eq!(ty, SipkitSignType::Negative);
    assert_eq!(unsafe { sipkit_sign_type(c("0").as_ptr(), &mut ty) }, SipkitStatus::Domain);

    let mut beyond = false;
    assert_eq!(
        unsafe { sipkit_is_beyond(c("27").as_ptr(), c("3").as_ptr(), &mut beyond) },
        SipkitStatus::Ok
    );
    assert!(beyond);
    assert_eq!(
        unsafe { sipkit_is_beyond(c("0").as_ptr(), c("3").as_ptr(), &mut beyond) },
        SipkitStatus::Domain
    );
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { sipkit_is_beyond(c("9").as_ptr(), c("1").as_ptr(), &mut beyond) }, SipkitStatus::Ok);
    assert!(last_error().is_empty());
}

#[test]
fn set_closures() {
    let mut set = ptr::null_mut();
    let values = [1i64, 3];
    assert_eq!(unsafe { sipkit_intset_new(values.as_ptr(), 2, &mut set) }, SipkitStatus::Ok);

    let mut ip = ptr::null_mut();
    assert_eq!(unsafe { sipkit_ip_closure(set, &mut ip) }, SipkitStatus::Ok);
    assert_eq!(set_values(ip), vec![0, 1, 3, 4]);

    let mut sip = ptr::null_mut();
    assert_eq!(unsafe { sipkit_sip_closure(set, &mut sip) }, SipkitStatus::Ok);
    assert_eq!(set_values(sip), vec![-4, -3, -2, -1, 0, 1, 2, 3, 4]);

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { sipkit_difference_set(set, &mut d) }, SipkitStatus::Ok);
    assert_eq!(set_values(d), vec![-2, 0, 2]);

    let mut holds = false;
    assert_eq!(unsafe { sipkit_verify_symmetrization(set, &mut holds) }, SipkitStatus::Ok);
    assert!(holds);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { sipkit_intset_to_string(ip, &mut text) }, SipkitStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(text) }.to_str().unwrap(), "{0, 1, 3, 4}");

    let mut v = 0;
    assert_eq!(unsafe { sipkit_intset_get(ip, 10, &mut v) }, SipkitStatus::InvalidArgument);

    let mut empty = ptr::null_mut();
    assert_eq!(unsafe { sipkit_intset_new(ptr::null(), 0, &mut empty) }, SipkitStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sipkit_difference_set(empty, &mut out) }, SipkitStatus::Domain);
    assert_eq!(unsafe { sipkit_ip_closure(ptr::null(), &mut out) }, SipkitStatus::NullPointer);

    unsafe {
        sipkit_string_free(text);
        for s in [set, ip, sip, d, empty] {
            sipkit_intset_free(s);
        }
        sipkit_intset_free(ptr::null_mut());
        sipkit_string_free(ptr::null_mut());
    }
}

#[test]
fn hitting_set() {
    let mut out = ptr::null_mut();
    let status = unsafe {
        sipkit_hitting_set(c("610/987").as_ptr(), c("0").as_ptr(), c("-1/8,1/8").as_ptr(), 13, &mut out)
    };
    assert_eq!(status, SipkitStatus::Ok);
    assert_eq!(set_values(out), vec![5, 8, 13]);
    unsafe { sipkit_intset_free(out) };

    let status = unsafe {
        sipkit_hitting_set(c("610/987").as_ptr(), c("0").as_ptr(), c("nope").as_ptr(), 13, &mut out)
    };
    assert_eq!(status, SipkitStatus::InvalidArgument);
}

#[test]
fn families() {
    // P_+ on [1..2]: generated by {1} and {2}.
    let masks = [0b01u32, 0b10];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { sipkit_family_new(2, masks.as_ptr(), 2, &mut f) }, SipkitStatus::Ok);
    assert_eq!(unsafe { sipkit_family_minimal_len(f) }, 2);

    let mut dual = ptr::null_mut();
    assert_eq!(unsafe { sipkit_family_dual(f, &mut dual) }, SipkitStatus::Ok);
    let mut m = 0;
    assert_eq!(unsafe { sipkit_family_minimal_len(dual) }, 1);
    assert_eq!(unsafe { sipkit_family_minimal_get(dual, 0, &mut m) }, SipkitStatus::Ok);
    assert_eq!(m, 0b11);

    let mut class = SipkitClassification::default();
    assert_eq!(unsafe { sipkit_family_classify(f, 5, &mut class) }, SipkitStatus::Ok);
    assert!(class.proper && !class.filter && class.ramsey && class.dual_is_filter);

    let mut sharp = ptr::null_mut();
    assert_eq!(unsafe { sipkit_family_sharp_dual(f, 5, &mut sharp) }, SipkitStatus::Ok);
    let mut inside = false;
    assert_eq!(unsafe { sipkit_family_contains(sharp, 0b01, &mut inside) }, SipkitStatus::Ok);
    assert!(!inside);

    let mut join = ptr::null_mut();
    assert_eq!(unsafe { sipkit_family_join(f, dual, &mut join) }, SipkitStatus::Ok);
    assert_eq!(unsafe { sipkit_family_contains(join, 0, &mut inside) }, SipkitStatus::Ok);
    assert!(!inside);

    let bad = [0b100u32];
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sipkit_family_new(2, bad.as_ptr(), 1, &mut g) }, SipkitStatus::Domain);

    unsafe {
        for h in [f, dual, sharp, join] {
            sipkit_family_free(h);
        }
    }
}

#[test]
fn execute_round_trip() {
    let args: Vec<CString> = ["rotate", "hitting", "--arc=-1/8,1/8", "--horizon", "13"]
        .iter()
        .map(|s| c(s))
        .collect();
    let ptrs: Vec<*const std::ffi::c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut text = ptr::null_mut();
    let mut code = -1;
    assert_eq!(
        unsafe { sipkit_execute(ptrs.len(), ptrs.as_ptr(), &mut text, &mut code) },
        SipkitStatus::Ok
    );
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(text) }.to_str().unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["witnesses"]["hits"], serde_json::json!(["5", "8", "13"]));
    unsafe { sipkit_string_free(text) };

    let bad = [c("bogus")];
    let ptrs: Vec<_> = bad.iter().map(|a| a.as_ptr()).collect();
    assert_eq!(
        unsafe { sipkit_execute(1, ptrs.as_ptr(), &mut text, &mut code) },
        SipkitStatus::Ok
    );
    assert_eq!(code, 64);
    unsafe { sipkit_string_free(text) };
}

#[test]
fn header_lists_every_export() {
    let header = include_str!("../include/sipkit.h");
    let source = include_str!("../src/lib.rs");
    for line in source.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
        }
    }
    for ty in ["typedef struct SipkitIntSet SipkitIntSet;", "typedef struct SipkitFamily SipkitFamily;"] {
        assert!(header.contains(ty), "{ty}");
    }
    let version = unsafe { CStr::from_ptr(sipkit_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
