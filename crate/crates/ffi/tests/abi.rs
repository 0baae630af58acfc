use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use jetbundle_ffi::*;

fn fixture(name: &str) -> *mut JbFixture {
    let name = CString::new(name).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { jb_fixture_new(name.as_ptr(), ptr::null(), &mut f) },
        JbStatus::Ok
    );
    assert!(!f.is_null());
    f
}

fn components(f: *const JbFixture, order: usize) -> *mut JbComponents {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { jb_components_new(f, order, &mut c) }, JbStatus::Ok);
    c
}

fn last_error() -> String {
    let p = jb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

#[test]
fn unknown_fixture_reports_message() {
    let name = CString::new("torus").unwrap();
    let mut f = ptr::null_mut();
    let status = unsafe { jb_fixture_new(name.as_ptr(), ptr::null(), &mut f) };
    assert_eq!(status, JbStatus::UnknownFixture);
    assert!(f.is_null());
    assert!(last_error().contains("torus"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { jb_fixture_new(ptr::null(), ptr::null(), &mut f) },
        JbStatus::NullPointer
    );
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { jb_components_new(ptr::null(), 2, &mut c) },
        JbStatus::NullPointer
    );
    assert_eq!(unsafe { jb_fixture_dim(ptr::null()) }, 0);
    unsafe {
        jb_fixture_free(ptr::null_mut());
        jb_components_free(ptr::null_mut());
        jb_string_free(ptr::null_mut());
    }
}

#[test]
fn natural_transition_of_cubic_chart() {
    let f = fixture("flat_poly");
    assert_eq!(unsafe { jb_fixture_dim(f) }, 1);
    let mut partner = 0u8;
    assert_eq!(
        unsafe { jb_fixture_partner_chart(f, &mut partner) },
        JbStatus::Ok
    );
    assert_eq!(partner, 1);
    let x = [1.0];
    let xi = [1.0, 0.0];
    let (mut ox, mut oxi) = ([0.0], [0.0; 2]);
    let s = unsafe {
        jb_natural_transition(
            f,
            0,
            1,
            x.as_ptr(),
            xi.as_ptr(),
            1,
            2,
            ox.as_mut_ptr(),
            oxi.as_mut_ptr(),
        )
    };
    assert_eq!(s, JbStatus::Ok);
    assert!(max_diff(&ox, &[2.0]) < 1e-15);
    assert!(max_diff(&oxi, &[4.0, 3.0]) < 1e-15);
    unsafe { jb_fixture_free(f) };
}

#[test]
fn single_chart_fixture_has_no_partner() {
    let f = fixture("exp_metric_1d");
    let mut partner = 7u8;
    assert_eq!(
        unsafe { jb_fixture_partner_chart(f, &mut partner) },
        JbStatus::NoOverlap
    );
    assert_eq!(partner, 7);
    unsafe { jb_fixture_free(f) };
}

#[test]
fn trivialization_round_trip_and_transition() {
    let f = fixture("sphere_stereo");
    let c = components(f, 3);
    assert_eq!(unsafe { jb_components_order(c) }, 3);
    let x = [0.4, -0.3];
    let xi = [0.5, 0.2, -0.1, 0.3, 0.25, -0.4];
    let mut z = [0.0; 6];
    assert_eq!(
        unsafe { jb_trivialize(c, 0, x.as_ptr(), xi.as_ptr(), 2, 3, z.as_mut_ptr()) },
        JbStatus::Ok
    );
    assert_eq!(&z[..2], &xi[..2]);
    let mut back = [0.0; 6];
    assert_eq!(
        unsafe { jb_detrivialize(c, 0, x.as_ptr(), z.as_ptr(), 2, 3, back.as_mut_ptr()) },
        JbStatus::Ok
    );
    assert!(max_diff(&back, &xi) < 1e-12);

    // Transition of z agrees with trivializing the transported jet.
    let (mut tx, mut tz) = ([0.0; 2], [0.0; 6]);
    let s = unsafe {
        jb_linear_transition(
            c,
            0,
            1,
            x.as_ptr(),
            z.as_ptr(),
            2,
            3,
            tx.as_mut_ptr(),
            tz.as_mut_ptr(),
        )
    };
    assert_eq!(s, JbStatus::Ok);
    let (mut jx, mut jxi, mut jz) = ([0.0; 2], [0.0; 6], [0.0; 6]);
    unsafe {
        assert_eq!(
            jb_natural_transition(
                f,
                0,
                1,
                x.as_ptr(),
                xi.as_ptr(),
                2,
                3,
                jx.as_mut_ptr(),
                jxi.as_mut_ptr()
            ),
            JbStatus::Ok
        );
        assert_eq!(
            jb_trivialize(c, 1, jx.as_ptr(), jxi.as_ptr(), 2, 3, jz.as_mut_ptr()),
            JbStatus::Ok
        );
    }
    assert!(max_diff(&tx, &jx) < 1e-14);
    assert!(max_diff(&tz, &jz) < 1e-12);
    unsafe {
        jb_components_free(c);
        jb_fixture_free(f);
    }
}

#[test]
fn shape_errors_are_reported() {
    let f = fixture("sphere_stereo");
    let c = components(f, 2);
    let x = [0.4, -0.3];
    let xi = [0.5; 6];
    let mut z = [0.0; 6];
    let s = unsafe { jb_trivialize(c, 0, x.as_ptr(), xi.as_ptr(), 2, 3, z.as_mut_ptr()) };
    assert_eq!(s, JbStatus::OrderUnavailable);
    let s = unsafe { jb_trivialize(c, 0, x.as_ptr(), xi.as_ptr(), 3, 1, z.as_mut_ptr()) };
    assert_eq!(s, JbStatus::DimensionMismatch);
    let s = unsafe { jb_trivialize(c, 0, x.as_ptr(), xi.as_ptr(), 2, 2, ptr::null_mut()) };
    assert_eq!(s, JbStatus::NullPointer);
    assert!(last_error().contains("out_z"));
    // A successful call clears the message.
    assert_eq!(
        unsafe { jb_trivialize(c, 0, x.as_ptr(), xi.as_ptr(), 2, 2, z.as_mut_ptr()) },
        JbStatus::Ok
    );
    assert!(jb_last_error_message().is_null());
    unsafe {
        jb_components_free(c);
        jb_fixture_free(f);
    }
}

#[test]
fn metric_lift_is_symmetric_and_positive() {
    let f = fixture("exp_metric_1d");
    let c = components(f, 3);
    let x = [0.3];
    let a = [1.0, -0.5, 0.25];
    let b = [0.2, 0.7, -1.0];
    let (mut ab, mut ba, mut aa) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            jb_metric_lift(c, 0, x.as_ptr(), a.as_ptr(), b.as_ptr(), 1, 3, &mut ab),
            JbStatus::Ok
        );
        assert_eq!(
            jb_metric_lift(c, 0, x.as_ptr(), b.as_ptr(), a.as_ptr(), 1, 3, &mut ba),
            JbStatus::Ok
        );
        assert_eq!(
            jb_metric_lift(c, 0, x.as_ptr(), a.as_ptr(), a.as_ptr(), 1, 3, &mut aa),
            JbStatus::Ok
        );
        jb_components_free(c);
        jb_fixture_free(f);
    }
    assert!((ab - ba).abs() < 1e-13);
    assert!(aa > 0.0);
}

#[test]
fn config_file_overrides_dimension() {
    let dir = std::env::temp_dir().join(format!("jb-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flat.conf");
    std::fs::write(&path, "dim = 2\n").unwrap();
    let name = CString::new("flat_poly").unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { jb_fixture_new(name.as_ptr(), cpath.as_ptr(), &mut f) },
        JbStatus::Ok
    );
    assert_eq!(unsafe { jb_fixture_dim(f) }, 2);
    unsafe { jb_fixture_free(f) };
    std::fs::write(&path, "dim\n").unwrap();
    assert_eq!(
        unsafe { jb_fixture_new(name.as_ptr(), cpath.as_ptr(), &mut f) },
        JbStatus::Config
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn run_verify_returns_report() {
    let name = CString::new("flat_poly").unwrap();
    let mut report = ptr::null_mut();
    let s = unsafe { jb_run_verify(name.as_ptr(), 2, 3, 9, false, JbFormat::Tree, &mut report) };
    assert_eq!(s, JbStatus::Ok);
    let text = unsafe { CStr::from_ptr(report) }
        .to_str()
        .unwrap()
        .to_owned();
    unsafe { jb_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["fixture"], "flat_poly");

    let mut again = ptr::null_mut();
    unsafe { jb_run_verify(name.as_ptr(), 2, 3, 9, false, JbFormat::Tree, &mut again) };
    assert_eq!(unsafe { CStr::from_ptr(again) }.to_str().unwrap(), text);
    unsafe { jb_string_free(again) };

    let mut failing = ptr::null_mut();
    let s = unsafe { jb_run_verify(name.as_ptr(), 2, 3, 9, true, JbFormat::Table, &mut failing) };
    assert_eq!(s, JbStatus::ChecksFailed);
    let csv = unsafe { CStr::from_ptr(failing) }
        .to_str()
        .unwrap()
        .to_owned();
    unsafe { jb_string_free(failing) };
    assert!(csv.starts_with("id,anchor,samples,max_residual,comparison,tolerance,passed"));
    assert!(csv
        .lines()
        .any(|l| l.starts_with("compatibility,") && l.ends_with(",false")));
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(header_dir().join("jetbundle.h")).unwrap();
    for sym in [
        "jb_last_error_message",
        "jb_fixture_new",
        "jb_fixture_free",
        "jb_fixture_dim",
        "jb_fixture_partner_chart",
        "jb_natural_transition",
        "jb_components_new",
        "jb_components_free",
        "jb_components_order",
        "jb_trivialize",
        "jb_detrivialize",
        "jb_linear_transition",
        "jb_metric_lift",
        "jb_run_verify",
        "jb_string_free",
        "JB_STATUS_CHECKS_FAILED",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let dir = std::env::temp_dir().join(format!("jb-ffi-cc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"jetbundle.h\"\nint main(void) { JbFixture *f = 0; return jb_fixture_new(\"flat_poly\", 0, &f) == JB_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header_dir())
        .arg(&src)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
