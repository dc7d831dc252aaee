use std::ffi::{CStr, CString};
use std::ptr;

use tfrotor_ffi::*;

fn grid(n: usize) -> *mut TfrGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tfr_grid_default(n, &mut g) }, TfrStatus::Ok);
    g
}

fn generate(g: *const TfrGrid, spec: &str) -> *mut TfrSignal {
    let spec = CString::new(spec).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tfr_signal_generate(g, spec.as_ptr(), &mut s) }, TfrStatus::Ok);
    s
}

fn last_error() -> String {
    let p = tfr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn gaussian_norms_through_the_abi() {
    let g = grid(1);
    let s = generate(g, "gaussian");
    let mut e = TfrEstimate { value: 0.0, std_error: 0.0 };
    unsafe {
        assert_eq!(tfr_mp_norm(s, TfrMethod::Stft, 2.0, 0, 0, &mut e), TfrStatus::Ok);
        assert!((e.value - 1.0).abs() < 1e-6);
        assert_eq!(tfr_mp_norm(s, TfrMethod::Torus, 2.0, 0, 0, &mut e), TfrStatus::Ok);
        assert!((e.value - 2.0).abs() < 1e-3);
        assert_eq!(tfr_mp_norm(s, TfrMethod::SupTorus, f64::INFINITY, 0, 0, &mut e), TfrStatus::Ok);
        assert!((e.value - 1.0).abs() < 1e-3);
        tfr_signal_free(s);
        tfr_grid_free(g);
    }
}

#[test]
fn frft_roundtrip_and_copy() {
    let g = grid(1);
    let s = generate(g, "hermite(1)");
    let len = unsafe { tfr_signal_len(s) };
    assert_eq!(len, unsafe { tfr_grid_len(g) });
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(tfr_frft(s, [0.7].as_ptr(), 1, &mut a), TfrStatus::Ok);
        assert_eq!(tfr_frft(a, [-0.7].as_ptr(), 1, &mut b), TfrStatus::Ok);
        assert!((tfr_signal_l2_norm(a) - 1.0).abs() < 1e-9);
    }
    let (mut r0, mut i0) = (vec![0.0; len], vec![0.0; len]);
    let (mut r1, mut i1) = (vec![0.0; len], vec![0.0; len]);
    unsafe {
        assert_eq!(tfr_signal_copy_values(s, r0.as_mut_ptr(), i0.as_mut_ptr(), len), TfrStatus::Ok);
        assert_eq!(tfr_signal_copy_values(b, r1.as_mut_ptr(), i1.as_mut_ptr(), len), TfrStatus::Ok);
    }
    let worst = (0..len).map(|k| (r0[k] - r1[k]).hypot(i0[k] - i1[k])).fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");

    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(tfr_signal_from_values(g, r1.as_ptr(), i1.as_ptr(), len, &mut c), TfrStatus::Ok);
        assert!((tfr_signal_l2_norm(c) - 1.0).abs() < 1e-9);
        for p in [s, a, b, c] {
            tfr_signal_free(p);
        }
        tfr_grid_free(g);
    }
}

#[test]
fn psi_eps_torus_closed_form() {
    let mut e = TfrEstimate { value: 0.0, std_error: 0.0 };
    let z = [1.0, 0.0];
    let st = unsafe { tfr_psi_eps(z.as_ptr(), 2, 1e-3, TfrGroup::Torus, TfrPsiMode::Auto, 1, 0, &mut e) };
    assert_eq!(st, TfrStatus::Ok);
    assert!((e.value - 2.0).abs() < 1e-3, "{}", e.value);
    assert_eq!(e.std_error, 0.0);
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tfr_grid_new(3, 64, 8.0, &mut g), TfrStatus::InvalidGrid);
        assert!(g.is_null());
        assert!(last_error().contains("grid"));
        assert_eq!(tfr_grid_default(1, ptr::null_mut()), TfrStatus::NullPointer);
    }
    let g = grid(1);
    let s = generate(g, "gaussian");
    let spec = CString::new("not-a-signal").unwrap();
    let mut out = ptr::null_mut();
    let mut e = TfrEstimate { value: 0.0, std_error: 0.0 };
    unsafe {
        assert_ne!(tfr_signal_generate(g, spec.as_ptr(), &mut out), TfrStatus::Ok);
        assert_eq!(tfr_frft(s, [0.1, 0.2].as_ptr(), 2, &mut out), TfrStatus::InvalidArgument);
        assert_eq!(tfr_frft(s, [f64::NAN].as_ptr(), 1, &mut out), TfrStatus::InvalidArgument);
        assert_eq!(tfr_mp_norm(s, TfrMethod::Stft, 0.5, 0, 0, &mut e), TfrStatus::InvalidArgument);
        assert!(last_error().contains("0.5"));
        assert_eq!(tfr_psi_eps([0.0, 0.0].as_ptr(), 2, -1.0, TfrGroup::Torus, TfrPsiMode::Auto, 0, 0, &mut e), TfrStatus::InvalidArgument);
        let mut buf = [0.0; 3];
        assert_eq!(tfr_signal_copy_values(s, buf.as_mut_ptr(), buf.as_mut_ptr(), 3), TfrStatus::InvalidArgument);
        assert_eq!(tfr_signal_len(ptr::null()), 0);
        tfr_signal_free(s);
        tfr_grid_free(g);
        tfr_grid_free(ptr::null_mut());
    }
}
