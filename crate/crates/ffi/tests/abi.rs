use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use papseries_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ps_string_free(s) };
    out
}

fn last_error() -> String {
    let p = ps_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn count_and_read_back() {
    let pat = CString::new("25314").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_count_avoiders(pat.as_ptr(), 7, &mut s) }, PsStatus::Ok);
    assert_eq!(unsafe { ps_series_len(s) }, 8);
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ps_series_coeff(s, 7, &mut c) }, PsStatus::Ok);
    assert_eq!(take(c), "4578");
    let mut v = 0.0;
    assert_eq!(unsafe { ps_series_value(s, 5, &mut v) }, PsStatus::Ok);
    assert_eq!(v, 119.0);
    assert_eq!(unsafe { ps_series_coeff(s, 8, &mut c) }, PsStatus::InvalidArgument);
    assert!(last_error().contains("beyond"));
    unsafe { ps_series_free(s) };
}

#[test]
fn bad_inputs_report_codes() {
    let bad = CString::new("1223").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_count_avoiders(bad.as_ptr(), 4, &mut s) }, PsStatus::InvalidArgument);
    assert!(s.is_null());
    assert_eq!(unsafe { ps_count_avoiders(ptr::null(), 4, &mut s) }, PsStatus::NullPointer);
    let key = CString::new("Av(999)").unwrap();
    assert_eq!(unsafe { ps_dataset_get(key.as_ptr(), &mut s) }, PsStatus::NotFound);
    let text = CString::new("0 1\n2 5\n").unwrap();
    let name = CString::new("gap").unwrap();
    assert_eq!(unsafe { ps_series_import(text.as_ptr(), PsFormat::Bfile, name.as_ptr(), 30, &mut s) }, PsStatus::ParseError);
    // a successful call clears the message
    let key = CString::new("25314").unwrap();
    assert_eq!(unsafe { ps_dataset_get(key.as_ptr(), &mut s) }, PsStatus::Ok);
    assert!(ps_last_error().is_null());
    unsafe { ps_series_free(s) };
    unsafe { ps_series_free(ptr::null_mut()) };
    assert_eq!(unsafe { ps_series_len(ptr::null()) }, 0);
}

#[test]
fn dataset_bounds_and_roundtrip() {
    let key = CString::new("35214").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_dataset_get(key.as_ptr(), &mut s) }, PsStatus::Ok);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ps_series_prefix(s, 27, &mut p) }, PsStatus::Ok);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ps_bounds(p, 60, &mut b) }, PsStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { ps_bounds_value(b, &mut v) }, PsStatus::Ok);
    assert!((v - 13.1159).abs() < 1e-3, "{v}");
    let mut j = ptr::null_mut();
    assert_eq!(unsafe { ps_bounds_to_json(b, 8, &mut j) }, PsStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
    assert_eq!(json["status"], "conjectural");
    unsafe { ps_bounds_free(b) };

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { ps_series_export(p, PsFormat::Json, &mut text) }, PsStatus::Ok);
    let text = CString::new(take(text)).unwrap();
    let name = CString::new("copy").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { ps_series_import(text.as_ptr(), PsFormat::Json, name.as_ptr(), 30, &mut q) }, PsStatus::Ok);
    assert_eq!(unsafe { ps_series_len(q) }, 27);
    for ptr in [s, p, q] {
        unsafe { ps_series_free(ptr) };
    }
}

#[test]
fn extend_and_analyze() {
    let key = CString::new("12453").unwrap();
    let mut full = ptr::null_mut();
    assert_eq!(unsafe { ps_dataset_get(key.as_ptr(), &mut full) }, PsStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_series_prefix(full, 17, &mut s) }, PsStatus::Ok);
    let mut e = ptr::null_mut();
    let st = unsafe { ps_extend(s, 3, 40, &mut e) };
    assert_eq!(st, PsStatus::Ok, "{}", if st == PsStatus::Ok { String::new() } else { last_error() });
    assert_eq!(unsafe { ps_series_predicted_len(e) }, 3);
    for i in 17..20 {
        let (mut got, mut want) = (0.0, 0.0);
        assert_eq!(unsafe { ps_series_value(e, i, &mut got) }, PsStatus::Ok);
        assert_eq!(unsafe { ps_series_value(full, i, &mut want) }, PsStatus::Ok);
        assert!((got / want - 1.0).abs() < 1e-6, "n={i}: {got} vs {want}");
    }
    unsafe { ps_series_free(e) };
    unsafe { ps_series_free(full) };

    let key = CString::new("25314").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ps_dataset_get(key.as_ptr(), &mut c) }, PsStatus::Ok);
    let mut j = ptr::null_mut();
    assert_eq!(unsafe { ps_analyze_powerlaw(c, 40, 8, &mut j) }, PsStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
    assert_eq!(json["mode"], "powerlaw");
    assert!(json["estimates"].as_array().unwrap().iter().any(|e| e["name"] == "mu"));
    assert_eq!(unsafe { ps_extend(ptr::null(), 5, 40, &mut e) }, PsStatus::NullPointer);
    assert_eq!(unsafe { ps_extend(s, 5, 0, &mut e) }, PsStatus::InvalidArgument);
    unsafe { ps_series_free(s) };
    unsafe { ps_series_free(c) };
}

#[test]
fn header_is_current_and_c_program_links() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/papseries.h")).unwrap();
    for f in ["ps_count_avoiders", "ps_dataset_get", "ps_series_import", "ps_series_export", "ps_bounds", "ps_extend", "ps_last_error", "ps_string_free"] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct PsSeries PsSeries;"));

    // The static library sits next to the test binary's deps directory.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpapseries_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let bin = std::env::temp_dir().join(format!("papseries_smoke_{}", std::process::id()));
    let cc = Command::new("cc")
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lmpfr", "-lgmp", "-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&bin).output().unwrap();
    let _ = std::fs::remove_file(&bin);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "4578\n4\nerror set\n");
}
