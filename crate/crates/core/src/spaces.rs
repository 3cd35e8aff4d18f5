//! Norms of H^p, S^p, S_2^p and the disc algebra, and pointwise growth
//! profiles.
//!
//! For functions analytic on a disc of radius > 1 the integral means
//! `M_r(f, p)` increase with `r`, so every Hardy norm here is a single
//! boundary integral evaluated with the trapezoidal rule.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{boundary_sup, BoundaryGrid};
use crate::numeric::pairwise_sum_by;
use crate::series::AnalyticFunction;

/// Function space tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// Hardy space H^p.
    Hp,
    /// First-derivative space S^p.
    Sp,
    /// Second-derivative space S_2^p.
    S2p,
    /// Disc algebra with the sup norm.
    DiscAlgebra,
}

/// Space plus exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub space: Space,
    pub p: f64,
}

impl NormParams {
    pub fn new(space: Space, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(NormParams { space, p })
    }

    pub fn norm(&self, f: &AnalyticFunction, grid: &BoundaryGrid) -> Result<f64> {
        norm(f, self.space, self.p, grid)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

#[inline]
fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        v.norm_sqr()
    } else if p == 1.0 {
        v.norm()
    } else {
        v.norm().powf(p)
    }
}

/// `M_r(f, p) = (1/M) Σ_j |f(r w_j)|^p`.
pub fn integral_mean(f: &AnalyticFunction, p: f64, r: f64, grid: &BoundaryGrid) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidRadius(r));
    }
    check_exponent(p)?;
    let pts = grid.points();
    let total = if r == 1.0 {
        pairwise_sum_by(pts.len(), &|j| abs_pow(f.eval(pts[j]), p))
    } else {
        pairwise_sum_by(pts.len(), &|j| abs_pow(f.eval(pts[j] * r), p))
    };
    Ok(total * grid.weight())
}

/// ‖f‖_{H^p}.
pub fn hp_norm(f: &AnalyticFunction, p: f64, grid: &BoundaryGrid) -> Result<f64> {
    Ok(integral_mean(f, p, 1.0, grid)?.powf(1.0 / p))
}

/// A norm value with the difference against the half-size grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub quadrature_error: f64,
}

/// ‖f‖_{H^p} together with the doubling estimate `|N_M - N_{M/2}|`.
pub fn hp_norm_estimate(f: &AnalyticFunction, p: f64, grid: &BoundaryGrid) -> Result<NormEstimate> {
    check_exponent(p)?;
    let pts = grid.points();
    let vals: Vec<f64> = pts.iter().map(|&w| abs_pow(f.eval(w), p)).collect();
    let fine = pairwise_sum_by(vals.len(), &|j| vals[j]) * grid.weight();
    let value = fine.powf(1.0 / p);
    let quadrature_error = if vals.len() >= 2 {
        let half = vals.len() / 2;
        let coarse = pairwise_sum_by(half, &|j| vals[2 * j]) / half as f64;
        (value - coarse.powf(1.0 / p)).abs()
    } else {
        f64::INFINITY
    };
    Ok(NormEstimate {
        value,
        quadrature_error,
    })
}

/// ‖f‖_{S^p} = |f(0)| + ‖f'‖_{H^p}.
pub fn sp_norm(f: &AnalyticFunction, p: f64, grid: &BoundaryGrid) -> Result<f64> {
    Ok(f.coeff(0).norm() + hp_norm(&f.derivative(), p, grid)?)
}

/// ‖f‖_{S_2^p} = |f(0)| + |f'(0)| + ‖f''‖_{H^p}.
pub fn s2p_norm(f: &AnalyticFunction, p: f64, grid: &BoundaryGrid) -> Result<f64> {
    let second = f.derivative().derivative();
    Ok(f.coeff(0).norm() + f.coeff(1).norm() + hp_norm(&second, p, grid)?)
}

/// ‖f‖_A, the sup over the closed disc.
pub fn disc_algebra_norm(f: &AnalyticFunction, grid: &BoundaryGrid) -> f64 {
    boundary_sup(f, grid)
}

pub fn norm(f: &AnalyticFunction, space: Space, p: f64, grid: &BoundaryGrid) -> Result<f64> {
    match space {
        Space::Hp => hp_norm(f, p, grid),
        Space::Sp => sp_norm(f, p, grid),
        Space::S2p => s2p_norm(f, p, grid),
        Space::DiscAlgebra => Ok(disc_algebra_norm(f, grid)),
    }
}

/// Which pointwise bound a growth profile measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthWeighting {
    /// `|f^(k)(z)| (1-|z|²)^(k-1+1/p)` against ‖f‖_{S_2^p}.
    SecondDerivativeSpace,
    /// `|f(z)| (1-|z|²)^(1/p)` against ‖f‖_{H^p}; the bound holds with
    /// constant one.
    Hardy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub k: usize,
    pub p: f64,
    pub weighting: GrowthWeighting,
    /// `(z, weighted value)` pairs.
    pub samples: Vec<(Complex64, f64)>,
    pub max_value: f64,
    /// Norm the samples are compared against.
    pub reference_norm: f64,
    /// `max_value / reference_norm` (zero for the zero function).
    pub max_ratio: f64,
}

/// Default sample set: 32 radii `1 - 2^(-k/4)` capped at 0.99, 64 angles each.
pub fn default_growth_grid() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(32 * 64);
    for k in 0..32 {
        let r = (1.0 - 2f64.powf(-(k as f64) / 4.0)).min(0.99);
        for m in 0..64 {
            out.push(Complex64::from_polar(r, 2.0 * PI * m as f64 / 64.0));
        }
    }
    out
}

fn check_open_disc(z_grid: &[Complex64]) -> Result<()> {
    match z_grid.iter().find(|z| !(z.norm() < 1.0)) {
        Some(z) => Err(Error::PointOutsideOpenDisc { modulus: z.norm() }),
        None => Ok(()),
    }
}

fn finish_profile(
    k: usize,
    p: f64,
    weighting: GrowthWeighting,
    samples: Vec<(Complex64, f64)>,
    reference_norm: f64,
) -> GrowthProfile {
    let max_value = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let max_ratio = if max_value == 0.0 {
        0.0
    } else {
        max_value / reference_norm
    };
    GrowthProfile {
        k,
        p,
        weighting,
        samples,
        max_value,
        reference_norm,
        max_ratio,
    }
}

/// Samples of `|f^(k)(z)| (1-|z|²)^(k-1+1/p)`, compared against ‖f‖_{S_2^p}.
pub fn growth_profile(
    f: &AnalyticFunction,
    p: f64,
    k: usize,
    z_grid: &[Complex64],
    grid: &BoundaryGrid,
) -> Result<GrowthProfile> {
    check_exponent(p)?;
    if k > 2 {
        return Err(Error::InvalidDerivativeOrder(k));
    }
    check_open_disc(z_grid)?;
    let mut g = f.clone();
    for _ in 0..k {
        g = g.derivative();
    }
    let exponent = k as f64 - 1.0 + 1.0 / p;
    let samples = z_grid
        .iter()
        .map(|&z| (z, g.eval(z).norm() * (1.0 - z.norm_sqr()).powf(exponent)))
        .collect();
    let reference = s2p_norm(f, p, grid)?;
    Ok(finish_profile(
        k,
        p,
        GrowthWeighting::SecondDerivativeSpace,
        samples,
        reference,
    ))
}

/// Samples of `|f(z)| (1-|z|²)^(1/p)`, compared against ‖f‖_{H^p}.
pub fn hardy_growth_profile(
    f: &AnalyticFunction,
    p: f64,
    z_grid: &[Complex64],
    grid: &BoundaryGrid,
) -> Result<GrowthProfile> {
    check_exponent(p)?;
    check_open_disc(z_grid)?;
    let samples = z_grid
        .iter()
        .map(|&z| (z, f.eval(z).norm() * (1.0 - z.norm_sqr()).powf(1.0 / p)))
        .collect();
    let reference = hp_norm(f, p, grid)?;
    Ok(finish_profile(0, p, GrowthWeighting::Hardy, samples, reference))
}
