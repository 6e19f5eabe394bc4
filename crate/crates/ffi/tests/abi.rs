use std::ffi::{CStr, CString};
use std::ptr;

use gi_ffi::*;

const STAR: &str = "\
gi 5 4 3 0 3
v 1 0
v 2 1
v 3 2
v 4 0 1 2
e 0 1 1
e 0 2 1
e 0 3 1
e 0 4 1
";

fn parse(text: &str) -> *mut GiInstance {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { gi_instance_parse(c.as_ptr(), &mut inst) },
        GiStatus::Ok
    );
    inst
}

#[test]
fn solve_and_read_walk() {
    let inst = parse(STAR);
    unsafe {
        assert_eq!(gi_instance_vertex_count(inst), 5);
        assert_eq!(gi_instance_color_count(inst), 3);
        let mut walk = ptr::null_mut();
        assert_eq!(gi_solve_dp(inst, -1, &mut walk), GiStatus::Ok);
        assert_eq!(gi_walk_weight(walk), 2.0);
        assert_eq!(gi_walk_coverage(walk), 1.0);
        let mut buf = [0usize; 8];
        let n = gi_walk_vertices(walk, buf.as_mut_ptr(), buf.len());
        assert_eq!(&buf[..n], &[0, 4, 0]);
        gi_walk_free(walk);

        let mut ilp = ptr::null_mut();
        assert_eq!(gi_solve_ilp(inst, 3, 0.0, &mut ilp), GiStatus::Ok);
        assert_eq!(gi_walk_weight(ilp), 2.0);
        gi_walk_free(ilp);

        let mut upper = ptr::null_mut();
        assert_eq!(gi_upper_bound_walk(inst, 3, &mut upper), GiStatus::Ok);
        assert_eq!(gi_walk_weight(upper), 6.0);
        gi_walk_free(upper);

        let mut lower = f64::NAN;
        assert_eq!(gi_lower_bound(inst, 3, &mut lower), GiStatus::Ok);
        assert!(lower <= 2.0 + 1e-9);

        let mut text = ptr::null_mut();
        assert_eq!(gi_instance_write(inst, &mut text), GiStatus::Ok);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), STAR);
        gi_string_free(text);
        gi_instance_free(inst);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    unsafe {
        let mut inst = ptr::null_mut();
        let bad = CString::new("gi 2 1 1 0 0\ne 0 x 1\n").unwrap();
        assert_eq!(gi_instance_parse(bad.as_ptr(), &mut inst), GiStatus::Parse);
        let msg = CStr::from_ptr(gi_last_error()).to_str().unwrap();
        assert!(msg.contains("line 2"));
        assert!(inst.is_null());

        assert_eq!(
            gi_instance_parse(ptr::null(), &mut inst),
            GiStatus::NullArgument
        );
        let inst = parse(STAR);
        let mut walk = ptr::null_mut();
        assert_eq!(gi_solve_dp(inst, 4, &mut walk), GiStatus::InvalidInput);
        assert!(!gi_last_error().is_null());
        assert_eq!(gi_solve_dp(inst, 3, &mut walk), GiStatus::Ok);
        assert!(gi_last_error().is_null());
        gi_walk_free(walk);
        gi_instance_free(inst);
        gi_instance_free(ptr::null_mut());
        assert!(gi_walk_weight(ptr::null()).is_nan());
    }
}

#[test]
fn pipeline_report_and_generator() {
    unsafe {
        let mut inst = ptr::null_mut();
        let profile = CString::new("uniform").unwrap();
        assert_eq!(
            gi_instance_generate(profile.as_ptr(), 12, 3, &mut inst),
            GiStatus::Ok
        );
        let cfg = CString::new("k = 3\nW = 2\nmerge = \"greedy\"\n").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(gi_run_pipeline(inst, cfg.as_ptr(), &mut json), GiStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"merged\""));
        gi_string_free(json);
        let unknown = CString::new("nope").unwrap();
        let mut other = ptr::null_mut();
        assert_eq!(
            gi_instance_generate(unknown.as_ptr(), 12, 3, &mut other),
            GiStatus::InvalidInput
        );
        gi_instance_free(inst);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gi_ffi.h"))
        .expect("header generated by the build script");
    for name in [
        "gi_instance_parse",
        "gi_solve_dp",
        "gi_run_pipeline",
        "gi_walk_vertices",
        "GI_STATUS_OK",
        "typedef struct GiInstance GiInstance",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    if let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-"])
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            let mut stdin = child.stdin.take().unwrap();
            writeln!(
                stdin,
                "{header}\nint main(void) {{ return gi_instance_vertex_count(0); }}"
            )?;
            drop(stdin);
            child.wait()
        })
    {
        assert!(status.success(), "header does not compile as C");
    }
}
