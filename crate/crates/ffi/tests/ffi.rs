use std::ffi::{CStr, CString};
use std::ptr;

use arwmass_ffi::*;

fn last_error() -> String {
    let p = arw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rw(k: f64) -> *mut ArwSpec {
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { arw_spec_rw_family(3, 1.0, k, -1.0, &mut spec) }, ArwStatus::Ok);
    assert!(!spec.is_null());
    spec
}

#[test]
fn rw_mass_through_the_abi() {
    let spec = rw(2.0);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { arw_mass_limit(spec, 24, 10, &mut report) }, ArwStatus::Ok);
    let (mut m, mut e, mut mono) = (0.0, 0.0, true);
    assert_eq!(unsafe { arw_mass_report_summary(report, &mut m, &mut e, &mut mono) }, ArwStatus::Ok);
    assert!((m - 4.0).abs() < 1e-6);
    assert!(!mono);
    let mut len = 0;
    assert_eq!(unsafe { arw_mass_report_len(report, &mut len) }, ArwStatus::Ok);
    assert_eq!(len, 11);
    let (mut tau, mut integral) = (0.0, 0.0);
    assert_eq!(unsafe { arw_mass_report_sample(report, 0, &mut tau, &mut integral) }, ArwStatus::Ok);
    assert_eq!(tau, -1.0);
    assert_eq!(unsafe { arw_mass_report_sample(report, 11, &mut tau, &mut integral) }, ArwStatus::IndexOutOfRange);
    assert!(last_error().contains("11"));
    unsafe {
        arw_mass_report_free(report);
        arw_spec_free(spec);
    }
}

#[test]
fn slice_integral_and_slab() {
    let spec = rw(1.0);
    let mut v = 0.0;
    assert_eq!(unsafe { arw_slice_mass_integral(spec, -0.1, 24, &mut v) }, ArwStatus::Ok);
    let expected = 6.0 * std::f64::consts::PI.powi(2) * 1.01;
    assert!((v - expected).abs() < 1e-10 * expected);
    let mut b = ArwSlabBalance::default();
    assert_eq!(unsafe { arw_slab_balance(spec, -0.5, -0.25, 16, &mut b) }, ArwStatus::Ok);
    assert!(b.residual <= 1e-6);
    assert_eq!(unsafe { arw_slab_balance(spec, -0.25, -0.5, 16, &mut b) }, ArwStatus::InvalidArgument);
    unsafe { arw_spec_free(spec) };
}

#[test]
fn imcf_through_the_abi() {
    let spec = rw(1.0);
    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { arw_imcf_run(spec, -0.5, 3.0, 1e-10, &mut tr) }, ArwStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { arw_trajectory_len(tr, &mut len) }, ArwStatus::Ok);
    let mut s = ArwFlowState::default();
    assert_eq!(unsafe { arw_trajectory_state(tr, len - 1, &mut s) }, ArwStatus::Ok);
    assert!((s.u + 0.5 * (-1.0f64).exp()).abs() < 1e-8);
    let mut done = true;
    assert_eq!(unsafe { arw_trajectory_reached_singularity(tr, &mut done) }, ArwStatus::Ok);
    assert!(!done);
    unsafe {
        arw_trajectory_free(tr);
        arw_spec_free(spec);
    }
}

#[test]
fn errors_map_to_codes() {
    let mut spec = ptr::null_mut();
    let f = CString::new("log(-tau").unwrap();
    let zero = CString::new("0").unwrap();
    let s = unsafe { arw_spec_custom(3, 1.0, f.as_ptr(), zero.as_ptr(), zero.as_ptr(), -1.0, &mut spec) };
    assert_eq!(s, ArwStatus::Parse);
    assert!(spec.is_null());
    assert!(!last_error().is_empty());

    let s = unsafe { arw_spec_custom(3, 1.0, ptr::null(), zero.as_ptr(), zero.as_ptr(), -1.0, &mut spec) };
    assert_eq!(s, ArwStatus::NullPointer);
    assert_eq!(unsafe { arw_spec_rw_family(4, 1.0, 1.0, -1.0, &mut spec) }, ArwStatus::Unsupported);
    assert_eq!(unsafe { arw_spec_sads(3, 1.0, 1.0, &mut spec) }, ArwStatus::InvalidSpec);
    assert_eq!(unsafe { arw_spec_rw_family(3, 1.0, 1.0, -1.0, ptr::null_mut()) }, ArwStatus::NullPointer);

    let spec = rw(1.0);
    assert!(arw_last_error().is_null());
    let mut a = 0.0;
    assert_eq!(unsafe { arw_spec_domain_start(spec, &mut a) }, ArwStatus::Ok);
    assert_eq!(a, -1.0);
    unsafe { arw_spec_free(spec) };
    unsafe { arw_spec_free(ptr::null_mut()) };
}

#[test]
fn custom_and_sads_specs() {
    let (f, psi, lambda) =
        (CString::new("log(-tau)").unwrap(), CString::new("0.1*tau*cos(theta)").unwrap(), CString::new("0").unwrap());
    let mut spec = ptr::null_mut();
    assert_eq!(
        unsafe { arw_spec_custom(3, 1.0, f.as_ptr(), psi.as_ptr(), lambda.as_ptr(), -1.0, &mut spec) },
        ArwStatus::Ok
    );
    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { arw_imcf_run(spec, -0.5, 1.0, 1e-10, &mut tr) }, ArwStatus::Unsupported);
    unsafe { arw_spec_free(spec) };

    let mut sads = ptr::null_mut();
    assert_eq!(unsafe { arw_spec_sads(3, -1.0, 1.0, &mut sads) }, ArwStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { arw_mass_limit(sads, 24, 10, &mut report) }, ArwStatus::Ok);
    let mut m = 0.0;
    assert_eq!(unsafe { arw_mass_report_summary(report, &mut m, ptr::null_mut(), ptr::null_mut()) }, ArwStatus::Ok);
    assert!((m - 1.0).abs() < 1e-5);
    unsafe {
        arw_mass_report_free(report);
        arw_spec_free(sads);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(arw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
