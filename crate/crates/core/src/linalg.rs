//! Singular values of small dense complex matrices (one-sided Jacobi).

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

const MAX_SWEEPS: usize = 60;

/// Singular values of the matrix whose columns are `columns`, in
/// nonincreasing order. All columns must have the same length.
pub fn singular_values(mut columns: Vec<Vec<Complex64>>) -> Vec<f64> {
    let n = columns.len();
    if n == 0 {
        return Vec::new();
    }
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (alpha, beta, gamma) = {
                    let (ci, cj) = (&columns[i], &columns[j]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = Complex64::new(0.0, 0.0);
                    for (x, y) in ci.iter().zip(cj) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate (a_i, e^{-iθ} a_j), which have a real inner product.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let yb = *y * phase.conj();
                    let xi = *x * c - yb * s;
                    let yj = *x * s + yb * c;
                    *x = xi;
                    *y = yj * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Largest singular value (spectral norm); zero for an empty matrix.
pub fn spectral_norm(columns: Vec<Vec<Complex64>>) -> f64 {
    singular_values(columns).first().copied().unwrap_or(0.0)
}
