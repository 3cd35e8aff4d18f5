//! Truncated Taylor series for functions analytic on a disc of radius > 1.
//!
//! Every [`AnalyticFunction`] carries a `tail_bound`: a bound on the sup over
//! the closed unit disc of the difference between the stored polynomial and
//! the function it was built from. Exact polynomials have a zero tail.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Default truncation degree of expanded series.
pub const DEFAULT_MAX_DEGREE: usize = 512;
/// Largest admissible kernel center modulus.
pub const MAX_KERNEL_CENTER: f64 = 0.99;
/// Slack allowed above the unit circle when evaluating.
pub const CLOSED_DISC_SLACK: f64 = 1e-12;
/// Relative ℓ¹ mass below which trailing coefficients are folded into the
/// tail before multiplication and composition.
const NEGLIGIBLE_TAIL: f64 = 1e-18;

/// Compositional description of a test function.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// Polynomial with the given Taylor coefficients.
    Poly(Vec<Complex64>),
    /// Reproducing-type kernel `(1 - conj(center) z)^(-exponent)`.
    Kernel {
        center: Complex64,
        exponent: f64,
    },
    Sum(Vec<FunctionSpec>),
    Product(Vec<FunctionSpec>),
    Scale(Complex64, Box<FunctionSpec>),
}

impl FunctionSpec {
    pub fn poly<I: IntoIterator<Item = f64>>(coeffs: I) -> Self {
        FunctionSpec::Poly(coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
    }

    pub fn kernel(center: Complex64, exponent: f64) -> Self {
        FunctionSpec::Kernel { center, exponent }
    }

    pub fn scale(c: Complex64, inner: FunctionSpec) -> Self {
        FunctionSpec::Scale(c, Box::new(inner))
    }

    /// Checks the structural invariants without expanding.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Poly(_) => Ok(()),
            FunctionSpec::Kernel { center, exponent } => {
                let modulus = center.norm();
                if !(modulus <= MAX_KERNEL_CENTER + 1e-15) {
                    return Err(Error::KernelCenterTooLarge {
                        modulus,
                        max: MAX_KERNEL_CENTER,
                    });
                }
                if !(exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::InvalidKernelExponent(*exponent));
                }
                Ok(())
            }
            FunctionSpec::Sum(terms) | FunctionSpec::Product(terms) => {
                terms.iter().try_for_each(FunctionSpec::validate)
            }
            FunctionSpec::Scale(_, inner) => inner.validate(),
        }
    }

    /// Expands the spec into Taylor coefficients up to degree `degree`.
    pub fn expand(&self, degree: usize) -> Result<AnalyticFunction> {
        self.validate()?;
        self.expand_validated(degree)
    }

    fn expand_validated(&self, degree: usize) -> Result<AnalyticFunction> {
        match self {
            FunctionSpec::Poly(coeffs) => {
                let required = effective_len(coeffs).saturating_sub(1);
                if degree < required {
                    return Err(Error::DegreeTooSmall { degree, required });
                }
                let mut c = coeffs.clone();
                c.resize(degree + 1, Complex64::zero());
                Ok(AnalyticFunction::from_parts(c, f64::INFINITY, 0.0, None, degree))
            }
            FunctionSpec::Kernel { center, exponent } => Ok(expand_kernel(*center, *exponent, degree)),
            FunctionSpec::Sum(terms) => {
                let mut acc = AnalyticFunction::zero_with_degree(degree);
                for t in terms {
                    acc = acc.add(&t.expand_validated(degree)?);
                }
                Ok(acc)
            }
            FunctionSpec::Product(factors) => {
                let mut acc = AnalyticFunction::constant_with_degree(Complex64::new(1.0, 0.0), degree);
                for f in factors {
                    acc = acc.multiply(&f.expand_validated(degree)?);
                }
                Ok(acc)
            }
            FunctionSpec::Scale(c, inner) => Ok(inner.expand_validated(degree)?.scale(*c)),
        }
    }
}

/// Coefficients of `(1 - conj(a) z)^(-s)`: c_n = binom(s+n-1, n) conj(a)^n.
fn expand_kernel(a: Complex64, s: f64, degree: usize) -> AnalyticFunction {
    let abar = a.conj();
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut c = Complex64::new(1.0, 0.0);
    coeffs.push(c);
    for n in 1..=degree {
        c = c * abar * ((s + n as f64 - 1.0) / n as f64);
        coeffs.push(c);
    }
    let modulus = a.norm();
    let decl_radius = if modulus == 0.0 { f64::INFINITY } else { 1.0 / modulus };
    if modulus == 0.0 {
        return AnalyticFunction::from_parts(coeffs, decl_radius, 0.0, Some(0.0), degree);
    }
    // |c_{n+1}| / |c_n| = |a| (s + n) / (n + 1); decreasing in n for s >= 1,
    // increasing towards |a| for s < 1.
    let ratio_at = |n: usize| modulus * (s + n as f64) / (n as f64 + 1.0);
    let mut first = coeffs[degree].norm() * ratio_at(degree);
    let mut n = degree + 1;
    let mut explicit = 0.0;
    let mut ratio = if s <= 1.0 { modulus } else { ratio_at(n) };
    let decay_valid = ratio < 1.0;
    while ratio >= 1.0 {
        explicit += first;
        first *= ratio_at(n);
        n += 1;
        ratio = ratio_at(n);
    }
    let tail = explicit + first / (1.0 - ratio);
    let decay = if decay_valid { Some(ratio) } else { None };
    AnalyticFunction::from_parts(coeffs, decl_radius, tail, decay, degree)
}

fn effective_len(c: &[Complex64]) -> usize {
    c.iter().rposition(|z| !z.is_zero()).map_or(0, |i| i + 1)
}

fn l1(c: &[Complex64]) -> f64 {
    crate::numeric::pairwise_sum_by(c.len(), &|i| c[i].norm())
}

/// Truncated Taylor series `Σ c_k z^k` with a certified (or, for derived
/// quantities, estimated) truncation tail on the closed unit disc.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    coeffs: Vec<Complex64>,
    decl_radius: f64,
    tail_bound: f64,
    /// Geometric ratio `r` of a majorant for the neglected coefficients:
    /// `|c_{len+m}| <= tail_bound (1 - r) r^m`.
    tail_decay: Option<f64>,
    max_degree: usize,
}

impl AnalyticFunction {
    fn from_parts(
        mut coeffs: Vec<Complex64>,
        decl_radius: f64,
        tail_bound: f64,
        tail_decay: Option<f64>,
        max_degree: usize,
    ) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::zero());
        }
        AnalyticFunction {
            coeffs,
            decl_radius,
            tail_bound,
            tail_decay,
            max_degree,
        }
    }

    /// Exact polynomial with the default maximum degree (raised to fit).
    pub fn polynomial<I: IntoIterator<Item = Complex64>>(coeffs: I) -> Self {
        let c: Vec<Complex64> = coeffs.into_iter().collect();
        let max = DEFAULT_MAX_DEGREE.max(c.len().saturating_sub(1));
        AnalyticFunction::from_parts(c, f64::INFINITY, 0.0, Some(0.0), max)
    }

    /// Exact polynomial with real coefficients.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        AnalyticFunction::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)))
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticFunction::polynomial([c])
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        AnalyticFunction::real_polynomial(&[0.0, 1.0])
    }

    /// The monomial `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::zero(); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        AnalyticFunction::polynomial(c)
    }

    fn zero_with_degree(max_degree: usize) -> Self {
        AnalyticFunction::from_parts(vec![Complex64::zero()], f64::INFINITY, 0.0, Some(0.0), max_degree)
    }

    fn constant_with_degree(c: Complex64, max_degree: usize) -> Self {
        AnalyticFunction::from_parts(vec![c], f64::INFINITY, 0.0, Some(0.0), max_degree)
    }

    /// Replaces the maximum degree used to truncate products and compositions.
    pub fn with_max_degree(mut self, max_degree: usize) -> Self {
        self.max_degree = max_degree;
        if self.coeffs.len() > max_degree + 1 {
            self = self.truncated(max_degree);
        }
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_k`, zero beyond the stored range.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    /// Degree of the highest nonzero stored coefficient.
    pub fn degree(&self) -> usize {
        effective_len(&self.coeffs).saturating_sub(1)
    }

    pub fn decl_radius(&self) -> f64 {
        self.decl_radius
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_zero(&self) -> bool {
        self.tail_bound == 0.0 && self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Sum of coefficient moduli; bounds the sup of the stored polynomial on
    /// the closed disc.
    pub fn l1_norm(&self) -> f64 {
        l1(&self.coeffs)
    }

    /// `Σ |c_k|²`, the squared H² norm of the stored polynomial.
    pub fn l2_norm_sq(&self) -> f64 {
        crate::numeric::pairwise_sum_by(self.coeffs.len(), &|i| self.coeffs[i].norm_sqr())
    }

    /// Horner evaluation for `|z| <= 1`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let modulus = z.norm();
        if modulus > 1.0 + CLOSED_DISC_SLACK {
            return Err(Error::PointOutsideClosedDisc { modulus });
        }
        Ok(self.eval(z))
    }

    /// Horner evaluation without the disc check.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and first derivative in a single Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// [`eval`](Self::eval) at `N` points at once. The independent Horner
    /// chains vectorize; results are bitwise identical to the scalar path.
    pub fn eval_many<const N: usize>(&self, z: &[Complex64; N]) -> [Complex64; N] {
        let zr: [f64; N] = core::array::from_fn(|l| z[l].re);
        let zi: [f64; N] = core::array::from_fn(|l| z[l].im);
        let mut pr = [0.0f64; N];
        let mut pi = [0.0f64; N];
        for c in self.coeffs.iter().rev() {
            for l in 0..N {
                let re = pr[l] * zr[l] - pi[l] * zi[l];
                let im = pr[l] * zi[l] + pi[l] * zr[l];
                pr[l] = re + c.re;
                pi[l] = im + c.im;
            }
        }
        core::array::from_fn(|l| Complex64::new(pr[l], pi[l]))
    }

    /// [`eval_with_derivative`](Self::eval_with_derivative) at `N` points at once.
    pub fn eval_with_derivative_many<const N: usize>(&self, z: &[Complex64; N]) -> ([Complex64; N], [Complex64; N]) {
        let zr: [f64; N] = core::array::from_fn(|l| z[l].re);
        let zi: [f64; N] = core::array::from_fn(|l| z[l].im);
        let (mut pr, mut pi) = ([0.0f64; N], [0.0f64; N]);
        let (mut dr, mut di) = ([0.0f64; N], [0.0f64; N]);
        for c in self.coeffs.iter().rev() {
            for l in 0..N {
                let re = dr[l] * zr[l] - di[l] * zi[l];
                let im = dr[l] * zi[l] + di[l] * zr[l];
                dr[l] = re + pr[l];
                di[l] = im + pi[l];
                let re = pr[l] * zr[l] - pi[l] * zi[l];
                let im = pr[l] * zi[l] + pi[l] * zr[l];
                pr[l] = re + c.re;
                pi[l] = im + c.im;
            }
        }
        (
            core::array::from_fn(|l| Complex64::new(pr[l], pi[l])),
            core::array::from_fn(|l| Complex64::new(dr[l], di[l])),
        )
    }

    pub fn derivative(&self) -> AnalyticFunction {
        let len = self.coeffs.len();
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        let (tail_bound, tail_decay) = if self.tail_bound == 0.0 {
            (0.0, Some(0.0))
        } else {
            // Neglected coefficients of f are c_n, n >= len; those of f' are
            // n c_n with majorant lead·n·r^(n-len).
            let (r, exact) = match self.tail_decay {
                Some(r) => (r, true),
                None => (1.0 / self.decl_radius.max(1.0 + 1e-9), false),
            };
            let lead = self.tail_bound * (1.0 - r);
            let n0 = len as f64;
            let bound = lead * (n0 / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
            let next = r * (n0 + 1.0) / n0;
            let decay = if exact && next < 1.0 { Some(next) } else { None };
            (bound, decay)
        };
        AnalyticFunction::from_parts(coeffs, self.decl_radius, tail_bound, tail_decay, self.max_degree)
    }

    /// `∫_0^z f(w) dw`.
    pub fn antiderivative(&self) -> Result<AnalyticFunction> {
        let stored = if self.tail_bound == 0.0 {
            effective_len(&self.coeffs).max(1)
        } else {
            self.coeffs.len()
        };
        if stored > self.max_degree {
            return Err(Error::MaxDegreeExceeded {
                degree: stored,
                max: self.max_degree,
            });
        }
        let mut coeffs = Vec::with_capacity(stored + 1);
        coeffs.push(Complex64::zero());
        coeffs.extend(
            self.coeffs[..stored]
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k as f64 + 1.0)),
        );
        let tail_bound = self.tail_bound / (stored as f64 + 1.0);
        Ok(AnalyticFunction::from_parts(
            coeffs,
            self.decl_radius,
            tail_bound,
            self.tail_decay,
            self.max_degree,
        ))
    }

    pub fn add(&self, other: &AnalyticFunction) -> AnalyticFunction {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &AnalyticFunction) -> AnalyticFunction {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &AnalyticFunction, sign: Complex64) -> AnalyticFunction {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs: Vec<Complex64> = (0..len).map(|k| self.coeff(k) + sign * other.coeff(k)).collect();
        let tail_decay = match (self.tail_decay, other.tail_decay) {
            _ if self.tail_bound == 0.0 && other.tail_bound == 0.0 => Some(0.0),
            (Some(r), _) if other.tail_bound == 0.0 && self.coeffs.len() == len => Some(r),
            (_, Some(r)) if self.tail_bound == 0.0 && other.coeffs.len() == len => Some(r),
            (Some(r1), Some(r2)) if self.coeffs.len() == other.coeffs.len() => Some(r1.max(r2)),
            _ => None,
        };
        AnalyticFunction::from_parts(
            coeffs,
            self.decl_radius.min(other.decl_radius),
            self.tail_bound + other.tail_bound,
            tail_decay,
            self.max_degree.max(other.max_degree),
        )
    }

    pub fn scale(&self, c: Complex64) -> AnalyticFunction {
        AnalyticFunction::from_parts(
            self.coeffs.iter().map(|x| x * c).collect(),
            self.decl_radius,
            self.tail_bound * c.norm(),
            self.tail_decay,
            self.max_degree,
        )
    }

    /// Drops coefficients beyond `degree`, folding their ℓ¹ mass into the tail.
    pub fn truncated(&self, degree: usize) -> AnalyticFunction {
        if self.coeffs.len() <= degree + 1 {
            return self.clone();
        }
        let dropped = l1(&self.coeffs[degree + 1..]);
        let decay = if dropped == 0.0 && self.tail_bound == 0.0 {
            Some(0.0)
        } else {
            None
        };
        AnalyticFunction::from_parts(
            self.coeffs[..=degree].to_vec(),
            self.decl_radius,
            self.tail_bound + dropped,
            decay,
            self.max_degree,
        )
    }

    /// Effective coefficient slice with negligible trailing mass removed, and
    /// the removed mass.
    fn compacted(&self) -> (&[Complex64], f64) {
        let len = effective_len(&self.coeffs).max(1);
        let total = l1(&self.coeffs[..len]);
        let limit = NEGLIGIBLE_TAIL * total;
        let mut cut = len;
        let mut mass = 0.0;
        while cut > 1 {
            let m = self.coeffs[cut - 1].norm();
            if mass + m > limit {
                break;
            }
            mass += m;
            cut -= 1;
        }
        (&self.coeffs[..cut], mass)
    }

    /// Cauchy product truncated at the larger of the two maximum degrees.
    pub fn multiply(&self, other: &AnalyticFunction) -> AnalyticFunction {
        let max_degree = self.max_degree.max(other.max_degree);
        let (a, ma) = self.compacted();
        let (b, mb) = other.compacted();
        let ta = self.tail_bound + ma;
        let tb = other.tail_bound + mb;
        let (coeffs, dropped) = convolve_truncated(a, b, max_degree);
        let tail = l1(a) * tb + l1(b) * ta + ta * tb + dropped;
        let decay = if tail == 0.0 { Some(0.0) } else { None };
        AnalyticFunction::from_parts(coeffs, self.decl_radius.min(other.decl_radius), tail, decay, max_degree)
    }

    /// Taylor coefficients of `f ∘ φ` by Horner's scheme on series. The
    /// caller guarantees that `phi` maps the disc into itself.
    pub(crate) fn compose_series(&self, phi: &AnalyticFunction) -> AnalyticFunction {
        let max_degree = self.max_degree.max(phi.max_degree);
        let (f, mf) = self.compacted();
        let (p, mp) = phi.compacted();
        let mut acc: Vec<Complex64> = vec![f[f.len() - 1]];
        let mut dropped_total = 0.0;
        for c in f[..f.len() - 1].iter().rev() {
            let (mut next, dropped) = convolve_truncated(&acc, p, max_degree);
            next[0] += c;
            dropped_total += dropped;
            acc = next;
        }
        let t_phi = phi.tail_bound + mp;
        let lipschitz = if t_phi > 0.0 {
            let grow = 1.0 + t_phi;
            f.iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c.norm() * grow.powi(k as i32 - 1))
                .sum::<f64>()
        } else {
            0.0
        };
        let tail = self.tail_bound + mf + lipschitz * t_phi + dropped_total;
        let decay = if tail == 0.0 { Some(0.0) } else { None };
        AnalyticFunction::from_parts(acc, self.decl_radius.min(phi.decl_radius), tail, decay, max_degree)
    }

    /// Largest coefficientwise difference, comparing up to the longer length.
    pub fn max_coeff_diff(&self, other: &AnalyticFunction) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Full Cauchy product of `a` and `b`, truncated at `max_degree`. Returns the
/// kept coefficients and the ℓ¹ mass of the discarded ones.
fn convolve_truncated(a: &[Complex64], b: &[Complex64], max_degree: usize) -> (Vec<Complex64>, f64) {
    let full = a.len() + b.len() - 1;
    let mut out = vec![Complex64::zero(); full];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out[i..i + b.len()].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    if full > max_degree + 1 {
        let dropped = l1(&out[max_degree + 1..]);
        out.truncate(max_degree + 1);
        (out, dropped)
    } else {
        (out, 0.0)
    }
}
