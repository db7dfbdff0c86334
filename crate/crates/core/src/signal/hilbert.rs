use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Returns `(x, H{x})`, the real and imaginary parts of the analytic signal,
/// via the frequency-domain method: DC and Nyquist kept, positive
/// frequencies doubled, negative frequencies zeroed.
pub fn analytic_signal<T: Scalar>(x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if x.len() < 2 {
        return Err(invalid("analytic signal needs at least 2 samples"));
    }
    let n = x.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    fwd.process(&mut buf);
    let two = T::lit(2.0);
    let half = n / 2;
    for (k, v) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            continue;
        }
        if k <= (n - 1) / 2 {
            *v = *v * two;
        } else {
            *v = Complex::default();
        }
    }
    inv.process(&mut buf);
    let scale = T::one() / T::count(n);
    let hilbert = buf.iter().map(|v| v.im * scale).collect();
    Ok((x.to_vec(), hilbert))
}

/// `sqrt(x^2 + H{x}^2)`.
pub fn hilbert_envelope<T: Scalar>(x: &[T]) -> Result<Vec<T>> {
    let (re, im) = analytic_signal(x)?;
    Ok(re.iter().zip(&im).map(|(&a, &b)| a.hypot(b)).collect())
}
