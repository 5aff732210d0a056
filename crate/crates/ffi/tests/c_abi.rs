use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use haar_besov_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        hb_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn roundtrip_through_handles() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(hb_function_random(11, 2, 3, 0, &mut f), HB_OK);
        let (mut d, mut m, mut len) = (0u32, 0u32, 0usize);
        assert_eq!(hb_function_shape(f, &mut d, &mut m, &mut len), HB_OK);
        assert_eq!((d, m, len), (2, 3, 64));
        let mut orig = vec![0.0; len];
        assert_eq!(hb_function_values(f, orig.as_mut_ptr(), len), HB_OK);

        let mut c = ptr::null_mut();
        assert_eq!(hb_analyze(f, &mut c), HB_OK);
        let mut k = 0u32;
        assert_eq!(hb_coefficients_max_level(c, &mut k), HB_OK);
        assert_eq!(k, 3);
        let mut n = 0usize;
        assert_eq!(hb_coefficients_level_len(c, 2, &mut n), HB_OK);
        assert_eq!(n, 12);

        let mut g = ptr::null_mut();
        assert_eq!(hb_synthesize(c, 3, &mut g), HB_OK);
        let mut back = vec![0.0; len];
        assert_eq!(hb_function_values(g, back.as_mut_ptr(), len), HB_OK);
        for (a, b) in orig.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        hb_function_free(g);
        hb_coefficients_free(c);
        hb_function_free(f);
    }
}

#[test]
fn norms_of_the_spike() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(hb_function_spike(1, 3, &mut f), HB_OK);
        let mut lp = 0.0;
        assert_eq!(hb_lp_norm(f, 1.0, &mut lp), HB_OK);
        assert!((lp - 1.0).abs() < 1e-14);
        let prm = HbParams { p: 2.0, q: 2.0, s: 0.25, d: 1 };
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(hb_a_norm(f, &prm, &mut a), HB_OK);
        assert_eq!(hb_b_norm_modulus(f, &prm, &mut b), HB_OK);
        assert!(a > 0.0 && b > 0.0);
        let mut c = ptr::null_mut();
        assert_eq!(hb_analyze(f, &mut c), HB_OK);
        let mut seq = 0.0;
        assert_eq!(hb_lqlp_norm(c, &prm, &mut seq), HB_OK);
        assert!(seq > 0.0);
        hb_coefficients_free(c);
        hb_function_free(f);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut f = ptr::null_mut();
        let vals = [1.0, 2.0, 3.0];
        assert_eq!(hb_function_new(1, 1, vals.as_ptr(), 3, &mut f), HB_ERR_PARAMETER);
        assert!(f.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(hb_function_new(1, 1, vals.as_ptr(), 2, ptr::null_mut()), HB_ERR_NULL);
        assert_eq!(hb_function_random(0, 3, 40, 0, &mut f), HB_ERR_CAPACITY);
        assert!(last_error().contains("capacity"));
        let mut x = 0.0;
        assert_eq!(hb_lp_norm(ptr::null(), 1.0, &mut x), HB_ERR_NULL);
        let bad = HbParams { p: 0.5, q: 1.0, s: 5.0, d: 1 };
        assert_eq!(hb_function_spike(1, 2, &mut f), HB_OK);
        assert_eq!(hb_a_norm(f, &bad, &mut x), HB_ERR_PARAMETER);
        hb_function_free(f);
        hb_function_free(ptr::null_mut());
    }
}

#[test]
fn classify_codes() {
    let cases = [
        (HbParams { p: 0.8, q: 0.8, s: 0.25, d: 1 }, HB_SYSTEM_ISOTROPIC, HB_REGIME_CONDITIONAL_BASIS),
        (HbParams { p: 0.5, q: 2.0, s: 2.0, d: 2 }, HB_SYSTEM_ISOTROPIC, HB_REGIME_NOT_BASIS_TRIVIAL_DUAL),
        (HbParams { p: 0.5, q: 1.0, s: 1.0, d: 2 }, HB_SYSTEM_TENSOR, HB_REGIME_NOT_BASIS_TENSOR),
        (HbParams { p: 2.0, q: 0.7, s: 0.3, d: 3 }, HB_SYSTEM_ISOTROPIC, HB_REGIME_UNCONDITIONAL_BASIS),
    ];
    for (prm, sys, want) in cases {
        let mut got = -1;
        assert_eq!(unsafe { hb_classify(&prm, sys, 0, &mut got) }, HB_OK);
        assert_eq!(got, want);
    }
    let mut got = -1;
    assert_eq!(unsafe { hb_classify(&cases[0].0, 9, 0, &mut got) }, HB_ERR_PARAMETER);
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/haar_besov.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let h = header();
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.strip_prefix("pub unsafe extern \"C\" fn ") {
            let name = &rest[..rest.find('(').unwrap()];
            assert!(h.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 15);
}

/// The header must be valid C on its own when a C compiler is available.
#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(&main, "#include \"haar_besov.h\"\nint main(void) { HbParams p = {1.0, 1.0, 0.5, 1}; return (int)p.d - 1; }\n").unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc").arg("-std=c99").arg("-fsyntax-only").arg("-I").arg(&include).arg(&main).status();
    match status {
        Ok(s) => assert!(s.success(), "header failed to compile"),
        Err(_) => eprintln!("no C compiler found; skipped"),
    }
}
