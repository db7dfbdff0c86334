use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Orthonormal DCT-II with a cached basis, truncated to the first
/// `n_out` coefficients.
#[derive(Debug, Clone)]
pub struct Dct<T> {
    n_in: usize,
    n_out: usize,
    /// Row-major `n_out x n_in`.
    basis: Vec<T>,
}

impl<T: Scalar> Dct<T> {
    pub fn new(n_in: usize, n_out: usize) -> Result<Self> {
        if n_in == 0 {
            return Err(invalid("DCT input length must be positive"));
        }
        if n_out > n_in {
            return Err(invalid(format!(
                "cannot take {n_out} DCT coefficients from {n_in} inputs"
            )));
        }
        let n = n_in as f64;
        let mut basis = Vec::with_capacity(n_out * n_in);
        for k in 0..n_out {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for t in 0..n_in {
                let arg = std::f64::consts::PI * k as f64 * (t as f64 + 0.5) / n;
                basis.push(T::lit(scale * arg.cos()));
            }
        }
        Ok(Self { n_in, n_out, basis })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Writes `n_out` coefficients of `x` into `out`.
    pub fn apply_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.n_in);
        for (k, o) in out.iter_mut().enumerate().take(self.n_out) {
            let row = &self.basis[k * self.n_in..(k + 1) * self.n_in];
            *o = row.iter().zip(x).fold(T::zero(), |acc, (&b, &v)| acc + b * v);
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_out];
        self.apply_into(x, &mut out);
        out
    }

    /// Inverse transform (DCT-III); missing high-order coefficients are
    /// treated as zero.
    pub fn inverse(&self, coeffs: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n_in];
        for (k, &c) in coeffs.iter().enumerate().take(self.n_out) {
            let row = &self.basis[k * self.n_in..(k + 1) * self.n_in];
            for (xi, &b) in x.iter_mut().zip(row) {
                *xi = *xi + b * c;
            }
        }
        x
    }
}

/// One-shot orthonormal DCT-II of `x`, first `n_out` coefficients.
pub fn dct2<T: Scalar>(x: &[T], n_out: usize) -> Result<Vec<T>> {
    Ok(Dct::new(x.len(), n_out)?.apply(x))
}
