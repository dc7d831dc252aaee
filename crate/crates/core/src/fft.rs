//! Thin wrappers over rustfft for centered lattices.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place FFT; `inverse` selects the e^{+2πijk/N} sign.
pub fn fft_inplace(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    plan.process(buf);
}

/// b_k = Σ_j a_j e^{∓2πi(j−N/2)(k−N/2)/N}, N even.
pub fn centered_dft_inplace(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    for (j, v) in buf.iter_mut().enumerate() {
        if j % 2 == 1 {
            *v = -*v;
        }
    }
    fft_inplace(buf, inverse);
    let half = n / 2;
    for (k, v) in buf.iter_mut().enumerate() {
        if (k + half) % 2 == 1 {
            *v = -*v;
        }
    }
}

/// Band-limited (trigonometric) interpolation of N samples onto a grid m times finer
/// whose every m-th point coincides with the input.
pub fn upsample(line: &[Complex64], m: usize) -> Vec<Complex64> {
    if m == 1 {
        return line.to_vec();
    }
    let n = line.len();
    let mut c = line.to_vec();
    fft_inplace(&mut c, false);
    let big = m * n;
    let mut out = vec![Complex64::new(0.0, 0.0); big];
    let half = n / 2;
    out[..half].copy_from_slice(&c[..half]);
    for k in half + 1..n {
        out[big - n + k] = c[k];
    }
    out[half] = c[half] * 0.5;
    out[big - half] = c[half] * 0.5;
    fft_inplace(&mut out, true);
    let scale = 1.0 / n as f64;
    for v in &mut out {
        *v *= scale;
    }
    out
}
