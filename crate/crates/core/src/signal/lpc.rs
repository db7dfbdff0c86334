//! Linear prediction: autocorrelation, Levinson-Durbin and the LPC to
//! cepstrum recursion.
//!
//! Sign convention: `A(z) = 1 + sum_i a_i z^-i`, so the all-pole model is
//! `sigma^2 / |A(e^jw)|^2` and `x[n] ~ -sum_i a_i x[n-i]`.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Zero-lag autocorrelation at or below this value marks a silent frame.
pub const SILENCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<T> {
    /// `a_1..a_p`.
    pub coeffs: Vec<T>,
    /// Final prediction error `E_p`.
    pub residual_energy: T,
}

impl<T: Scalar> LpModel<T> {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `[1, a_1, .., a_p]`.
    pub fn polynomial(&self) -> Vec<T> {
        std::iter::once(T::one()).chain(self.coeffs.iter().copied()).collect()
    }
}

/// Biased autocorrelation `r[l] = sum_n x[n] x[n+l]`, `l = 0..=max_lag`.
pub fn autocorrelation<T: Scalar>(x: &[T], max_lag: usize) -> Vec<T> {
    (0..=max_lag)
        .map(|l| {
            if l >= x.len() {
                T::zero()
            } else {
                x[..x.len() - l]
                    .iter()
                    .zip(&x[l..])
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            }
        })
        .collect()
}

/// Solves the Toeplitz normal equations by the Levinson-Durbin recursion.
///
/// If the prediction error collapses to (numerically) zero before the
/// requested order is reached, the signal is perfectly predictable at the
/// lower order; the recursion stops there and the remaining coefficients are
/// zero, which keeps the residual energy positive.
pub fn levinson_durbin<T: Scalar>(autocorr: &[T], order: usize) -> Result<LpModel<T>> {
    Ok(levinson_durbin_trace(autocorr, order)?.0)
}

/// Like [`levinson_durbin`] but also returns the prediction error after
/// each recursion step (`errors[0] = r[0]`).
pub fn levinson_durbin_trace<T: Scalar>(autocorr: &[T], order: usize) -> Result<(LpModel<T>, Vec<T>)> {
    if autocorr.len() < order + 1 {
        return Err(invalid(format!(
            "order {order} needs {} autocorrelation lags, got {}",
            order + 1,
            autocorr.len()
        )));
    }
    let r0 = autocorr[0];
    if !(r0 > T::zero()) {
        return Err(Error::SilentFrame(r0.as_f64()));
    }
    let floor = r0 * T::lit(1e-12);
    let mut a = vec![T::zero(); order + 1];
    a[0] = T::one();
    let mut prev = a.clone();
    let mut err = r0;
    let mut errors = vec![err];
    for m in 1..=order {
        let acc = (1..m).fold(autocorr[m], |acc, i| acc + a[i] * autocorr[m - i]);
        let k = -acc / err;
        let next_err = err * (T::one() - k * k);
        if !(next_err > floor) || k.abs() >= T::one() {
            // Perfectly predictable at order m-1 (or lost to rounding).
            errors.resize(order + 1, err);
            break;
        }
        prev.copy_from_slice(&a);
        for i in 1..m {
            a[i] = prev[i] + k * prev[m - i];
        }
        a[m] = k;
        err = next_err;
        errors.push(err);
    }
    Ok((
        LpModel {
            coeffs: a[1..].to_vec(),
            residual_energy: err,
        },
        errors,
    ))
}

/// Cepstrum of the all-pole model: `c_0 = ln(E_p)` followed by `c_1..c_n`
/// from `c_n = -a_n - (1/n) sum_{k=1}^{n-1} k c_k a_{n-k}` (with `a_m = 0`
/// beyond the model order). Returns `n_ceps + 1` values.
pub fn lpc_to_cepstrum<T: Scalar>(lp: &LpModel<T>, n_ceps: usize) -> Result<Vec<T>> {
    if n_ceps == 0 {
        return Err(invalid("n_ceps must be at least 1"));
    }
    if !(lp.residual_energy > T::zero()) {
        return Err(invalid("residual energy must be positive"));
    }
    let p = lp.order();
    let a = |m: usize| if m >= 1 && m <= p { lp.coeffs[m - 1] } else { T::zero() };
    let mut c = vec![T::zero(); n_ceps + 1];
    c[0] = lp.residual_energy.ln();
    for n in 1..=n_ceps {
        let sum = (1..n).fold(T::zero(), |acc, k| acc + T::count(k) * c[k] * a(n - k));
        c[n] = -a(n) - sum / T::count(n);
    }
    Ok(c)
}
