//! Exercises the C ABI from Rust: handle lifecycle, conversions, fitting,
//! reconstruction into caller buffers, and the generated header.

use std::ffi::CString;

use ofdrshape_ffi::{
    ofdr_calibration_free, ofdr_calibration_load, ofdr_calibration_new, ofdr_calibration_reference,
    ofdr_calibration_save, ofdr_fit_power_law, ofdr_radius_from_strain, ofdr_reconstruct,
    ofdr_strain_from_radius, ofdr_version, OfdrStatus,
};

#[test]
fn version_is_a_null_terminated_string() {
    let ptr = ofdr_version();
    assert!(!ptr.is_null());
    let s = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
    assert_eq!(s, env!("CARGO_PKG_VERSION"));
}

#[test]
fn reference_handle_converts_strain_both_ways() {
    let cal = ofdr_calibration_reference();
    assert!(!cal.is_null());
    unsafe {
        let mut radius = 0.0;
        let mut straight = -1;
        let status = ofdr_radius_from_strain(cal, 1000.0, &mut radius, &mut straight);
        assert_eq!(status, OfdrStatus::Ok);
        assert_eq!(straight, 0);
        assert!(
            (radius - 163.42494220375257).abs() < 1e-9,
            "radius {radius}"
        );

        // Dead zone reading.
        let status = ofdr_radius_from_strain(cal, 4.0, &mut radius, &mut straight);
        assert_eq!(status, OfdrStatus::Ok);
        assert_eq!(straight, 1);
        assert!(radius.is_infinite());

        // Negative bend keeps its sign.
        let status = ofdr_radius_from_strain(cal, -1500.0, &mut radius, &mut straight);
        assert_eq!(status, OfdrStatus::Ok);
        assert!(
            (radius + 100.73400272917276).abs() < 1e-9,
            "radius {radius}"
        );

        let mut strain = 0.0;
        let mut dead = -1;
        let status = ofdr_strain_from_radius(cal, 39.0, &mut strain, &mut dead);
        assert_eq!(status, OfdrStatus::Ok);
        assert_eq!(dead, 0);
        assert!(
            (strain - 3_768.433_569_842_585).abs() < 1e-6,
            "strain {strain}"
        );

        let status = ofdr_strain_from_radius(cal, f64::INFINITY, &mut strain, &mut dead);
        assert_eq!(status, OfdrStatus::Ok);
        assert_eq!(dead, 1);
        assert_eq!(strain, 0.0);

        // NaN strain is rejected.
        let status = ofdr_radius_from_strain(cal, f64::NAN, &mut radius, &mut straight);
        assert_eq!(status, OfdrStatus::InvalidArgument);

        ofdr_calibration_free(cal);
    }
}

#[test]
fn null_arguments_are_reported_not_dereferenced() {
    let cal = ofdr_calibration_reference();
    unsafe {
        let mut x = 0.0;
        let mut flag = 0;
        assert_eq!(
            ofdr_radius_from_strain(std::ptr::null(), 1.0, &mut x, &mut flag),
            OfdrStatus::NullArgument
        );
        assert_eq!(
            ofdr_radius_from_strain(cal, 1.0, std::ptr::null_mut(), &mut flag),
            OfdrStatus::NullArgument
        );
        assert_eq!(
            ofdr_calibration_load(std::ptr::null(), std::ptr::null_mut()),
            OfdrStatus::NullArgument
        );
        assert_eq!(
            ofdr_fit_power_law(
                std::ptr::null(),
                std::ptr::null(),
                0,
                std::ptr::null_mut(),
                std::ptr::null_mut()
            ),
            OfdrStatus::NullArgument
        );
        ofdr_calibration_free(cal);
        ofdr_calibration_free(std::ptr::null_mut());
    }
}

#[test]
fn constructor_validates_and_save_load_round_trips() {
    let dir = tempfile::TempDir::new().unwrap();
    let path = CString::new(dir.path().join("model.json").to_str().unwrap()).unwrap();
    unsafe {
        let mut cal = std::ptr::null_mut();
        let status = ofdr_calibration_new(284000.0, -1.08, 150000.0, -0.999, 10.0, &mut cal);
        assert_eq!(status, OfdrStatus::Ok);
        assert_eq!(ofdr_calibration_save(cal, path.as_ptr()), OfdrStatus::Ok);

        let mut loaded = std::ptr::null_mut();
        assert_eq!(
            ofdr_calibration_load(path.as_ptr(), &mut loaded),
            OfdrStatus::Ok
        );
        let mut a = 0.0;
        let mut b = 0.0;
        let mut flag = 0;
        assert_eq!(
            ofdr_radius_from_strain(loaded, 1000.0, &mut a, &mut flag),
            OfdrStatus::Ok
        );
        assert_eq!(
            ofdr_radius_from_strain(cal, 1000.0, &mut b, &mut flag),
            OfdrStatus::Ok
        );
        assert_eq!(a, b);
        ofdr_calibration_free(cal);
        ofdr_calibration_free(loaded);

        // A positive exponent is out of domain.
        let mut bad = std::ptr::null_mut();
        assert_eq!(
            ofdr_calibration_new(284000.0, 1.08, 150000.0, -0.999, 10.0, &mut bad),
            OfdrStatus::InvalidArgument
        );

        // Loading a missing file is an I/O error.
        let missing = CString::new(dir.path().join("nope.json").to_str().unwrap()).unwrap();
        let mut out = std::ptr::null_mut();
        assert_eq!(
            ofdr_calibration_load(missing.as_ptr(), &mut out),
            OfdrStatus::IoError
        );
    }
}

#[test]
fn fitting_exact_samples_recovers_the_law() {
    // Samples generated from radius = 284000 * strain^-1.08.
    let radii: Vec<f64> = (0..14).map(|i| 35.0 + 5.0 * i as f64).collect();
    let strains: Vec<f64> = radii
        .iter()
        .map(|r| (r / 284000.0_f64).powf(1.0 / -1.08))
        .collect();
    let mut a = 0.0;
    let mut b = 0.0;
    let status = unsafe {
        ofdr_fit_power_law(
            strains.as_ptr(),
            radii.as_ptr(),
            radii.len(),
            &mut a,
            &mut b,
        )
    };
    assert_eq!(status, OfdrStatus::Ok);
    assert!((a - 284000.0).abs() / 284000.0 < 1e-9, "coefficient {a}");
    assert!((b + 1.08).abs() < 1e-12, "exponent {b}");

    // One sample is insufficient, identical strains are rank deficient.
    let status = unsafe { ofdr_fit_power_law(strains.as_ptr(), radii.as_ptr(), 1, &mut a, &mut b) };
    assert_eq!(status, OfdrStatus::InsufficientData);
    let same = [100.0, 100.0];
    let two = [40.0, 60.0];
    let status = unsafe { ofdr_fit_power_law(same.as_ptr(), two.as_ptr(), 2, &mut a, &mut b) };
    assert_eq!(status, OfdrStatus::RankDeficient);
}

#[test]
fn reconstruction_fills_caller_buffers_with_the_analytic_arc() {
    let cal = ofdr_calibration_reference();
    // 101 gauges at 0.5 mm pitch span exactly 50 mm of a 50 mm radius arc.
    let n = 101usize;
    let strain_50 = (50.0_f64 / 284000.0).powf(1.0 / -1.08);
    let strains = vec![strain_50; n];
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut thetas = vec![0.0; n];
    let mut arcs = vec![0.0; n];
    let mut len = 0usize;
    let status = unsafe {
        ofdr_reconstruct(
            cal,
            strains.as_ptr(),
            n,
            0.5,
            0.0,
            0.0,
            50.0,
            0.0,
            0.0,
            0.0,
            xs.as_mut_ptr(),
            ys.as_mut_ptr(),
            thetas.as_mut_ptr(),
            arcs.as_mut_ptr(),
            n,
            &mut len,
        )
    };
    assert_eq!(status, OfdrStatus::Ok);
    assert_eq!(len, n);
    let tip_x = 50.0 * 1.0_f64.sin();
    let tip_y = 50.0 * (1.0 - 1.0_f64.cos());
    let err = ((xs[n - 1] - tip_x).powi(2) + (ys[n - 1] - tip_y).powi(2)).sqrt();
    assert!(err < 1e-3, "tip error {err}");
    assert!((arcs[n - 1] - 50.0).abs() < 1e-9);
    assert!((thetas[n - 1] - 1.0).abs() < 1e-3);

    // Too-small capacity reports the required length without writing.
    let mut short = vec![0.0; 4];
    let status = unsafe {
        ofdr_reconstruct(
            cal,
            strains.as_ptr(),
            n,
            0.5,
            0.0,
            0.0,
            50.0,
            0.0,
            0.0,
            0.0,
            short.as_mut_ptr(),
            short.as_mut_ptr(),
            short.as_mut_ptr(),
            short.as_mut_ptr(),
            short.len(),
            &mut len,
        )
    };
    assert_eq!(status, OfdrStatus::InvalidArgument);
    assert_eq!(len, n);

    // Pure size query: null arrays with zero capacity are never touched.
    len = 0;
    let status = unsafe {
        ofdr_reconstruct(
            cal,
            strains.as_ptr(),
            n,
            0.5,
            0.0,
            0.0,
            50.0,
            0.0,
            0.0,
            0.0,
            std::ptr::null_mut(),
            std::ptr::null_mut(),
            std::ptr::null_mut(),
            std::ptr::null_mut(),
            0,
            &mut len,
        )
    };
    assert_eq!(status, OfdrStatus::InvalidArgument);
    assert_eq!(len, n);

    // Invalid grid parameters are rejected.
    let status = unsafe {
        ofdr_reconstruct(
            cal,
            strains.as_ptr(),
            n,
            -0.5,
            0.0,
            0.0,
            50.0,
            0.0,
            0.0,
            0.0,
            xs.as_mut_ptr(),
            ys.as_mut_ptr(),
            thetas.as_mut_ptr(),
            arcs.as_mut_ptr(),
            n,
            &mut len,
        )
    };
    assert_eq!(status, OfdrStatus::InvalidArgument);
    unsafe { ofdr_calibration_free(cal) };
}

#[test]
fn generated_header_exports_the_full_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("ofdrshape.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for symbol in [
        "ofdr_version",
        "ofdr_calibration_reference",
        "ofdr_calibration_new",
        "ofdr_calibration_load",
        "ofdr_calibration_save",
        "ofdr_calibration_free",
        "ofdr_radius_from_strain",
        "ofdr_strain_from_radius",
        "ofdr_fit_power_law",
        "ofdr_reconstruct",
        "OFDRSHAPE_H",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    // Opaque handle: declared but without visible fields.
    assert!(text.contains("OfdrCalibration"));
}
