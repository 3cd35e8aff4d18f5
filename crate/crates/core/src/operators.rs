//! Weighted composition, composition, multiplication, Volterra and integral
//! operators; the second-derivative expansion of a weighted composition;
//! operator norm lower bounds.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, SelfMap};
use crate::linalg::spectral_norm;
use crate::series::{AnalyticFunction, FunctionSpec};
use crate::spaces::NormParams;

/// Largest basis accepted by [`opnorm_matrix_p2`].
pub const MAX_BASIS: usize = 128;

/// Ratio between the additive S_2^p norm at p = 2 and the Hilbert norm
/// `(|f(0)|² + |f'(0)|² + ‖f''‖²)^(1/2)`: Hilbert ≤ sum ≤ √3 · Hilbert.
pub const S2_HILBERT_EQUIVALENCE: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `f ↦ ψ · (f ∘ φ)`.
    WeightedComposition { phi: SelfMap, psi: AnalyticFunction },
    /// `f ↦ f ∘ φ`.
    Composition(SelfMap),
    /// `f ↦ ψ f`.
    Multiplication(AnalyticFunction),
    /// `f ↦ ∫_0^z f g'`.
    Volterra(AnalyticFunction),
    /// `f ↦ ∫_0^z f' g`.
    Integral(AnalyticFunction),
}

impl OperatorSpec {
    pub fn apply(&self, f: &AnalyticFunction) -> Result<AnalyticFunction> {
        match self {
            OperatorSpec::WeightedComposition { phi, psi } => Ok(psi.multiply(&f.compose(phi))),
            OperatorSpec::Composition(phi) => Ok(f.compose(phi)),
            OperatorSpec::Multiplication(psi) => Ok(psi.multiply(f)),
            OperatorSpec::Volterra(g) => integrate(&f.multiply(&g.derivative())),
            OperatorSpec::Integral(g) => integrate(&f.derivative().multiply(g)),
        }
    }

    /// The weighted composition form `(φ, ψ)` of composition and
    /// multiplication operators.
    pub fn as_weighted_composition(&self) -> Option<(SelfMap, AnalyticFunction)> {
        match self {
            OperatorSpec::WeightedComposition { phi, psi } => Some((phi.clone(), psi.clone())),
            OperatorSpec::Composition(phi) => Some((phi.clone(), AnalyticFunction::constant(Complex64::new(1.0, 0.0)))),
            OperatorSpec::Multiplication(psi) => Some((SelfMap::identity(), psi.clone())),
            _ => None,
        }
    }

    /// Images of `1, z, ..., z^(n-1)`.
    fn monomial_images(&self, n: usize) -> Result<Vec<AnalyticFunction>> {
        match self.as_weighted_composition() {
            Some((phi, psi)) => {
                let mut out = Vec::with_capacity(n);
                let mut power = AnalyticFunction::constant(Complex64::new(1.0, 0.0));
                for j in 0..n {
                    if j > 0 {
                        power = power.multiply(phi.function());
                    }
                    out.push(psi.multiply(&power));
                }
                Ok(out)
            }
            None => (0..n).map(|j| self.apply(&AnalyticFunction::monomial(j))).collect(),
        }
    }
}

/// Antiderivative after folding a full-length series into the tail so the
/// result stays within the maximum degree.
fn integrate(h: &AnalyticFunction) -> Result<AnalyticFunction> {
    let max = h.max_degree();
    if max == 0 {
        return Err(Error::MaxDegreeExceeded { degree: 1, max });
    }
    h.truncated(max - 1).antiderivative()
}

/// The three terms of `(ψ · f∘φ)''`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTriple {
    /// `ψ'' · (f ∘ φ)`.
    pub t0: AnalyticFunction,
    /// `(2ψ'φ' + ψφ'') · (f' ∘ φ)`.
    pub t1: AnalyticFunction,
    /// `ψ φ'² · (f'' ∘ φ)`.
    pub t2: AnalyticFunction,
}

impl ExpansionTriple {
    pub fn sum(&self) -> AnalyticFunction {
        self.t0.add(&self.t1).add(&self.t2)
    }
}

/// `2ψ'φ' + ψφ''`, the weight multiplying `f' ∘ φ`.
pub fn first_order_weight(phi: &AnalyticFunction, psi: &AnalyticFunction) -> AnalyticFunction {
    let dphi = phi.derivative();
    let ddphi = dphi.derivative();
    psi.derivative()
        .multiply(&dphi)
        .scale(Complex64::new(2.0, 0.0))
        .add(&psi.multiply(&ddphi))
}

/// `ψ φ'²`, the weight multiplying `f'' ∘ φ`.
pub fn second_order_weight(phi: &AnalyticFunction, psi: &AnalyticFunction) -> AnalyticFunction {
    let dphi = phi.derivative();
    psi.multiply(&dphi.multiply(&dphi))
}

pub fn second_derivative_expansion(phi: &SelfMap, psi: &AnalyticFunction, f: &AnalyticFunction) -> ExpansionTriple {
    let df = f.derivative();
    let ddf = df.derivative();
    let t0 = psi.derivative().derivative().multiply(&f.compose(phi));
    let t1 = first_order_weight(phi.function(), psi).multiply(&df.compose(phi));
    let t2 = second_order_weight(phi.function(), psi).multiply(&ddf.compose(phi));
    ExpansionTriple { t0, t1, t2 }
}

/// Best ratio found over a test family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Index of the family member attaining `value`.
    pub best_member: usize,
}

/// `max_f ‖op f‖_out / ‖f‖_in` over `family`.
pub fn opnorm_lower_bound(
    op: &OperatorSpec,
    input: NormParams,
    output: NormParams,
    family: &[AnalyticFunction],
    grid: &BoundaryGrid,
) -> Result<LowerBound> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut best = LowerBound {
        value: f64::NEG_INFINITY,
        best_member: 0,
    };
    for (index, f) in family.iter().enumerate() {
        let n_in = input.norm(f, grid)?;
        if !(n_in > 0.0) {
            return Err(Error::ZeroNormMember { index });
        }
        let ratio = output.norm(&op.apply(f)?, grid)? / n_in;
        if ratio > best.value {
            best = LowerBound {
                value: ratio,
                best_member: index,
            };
        }
    }
    Ok(best)
}

/// Kernel centers used by [`default_test_family`].
pub const FAMILY_KERNEL_CENTERS: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 0.9, 0.95];

/// Monomials `z^n` for `n <= max_power` (this includes 1, z, z²) followed by
/// the kernels `(1 - a z)^(-2/p)` for `a` in [`FAMILY_KERNEL_CENTERS`].
pub fn default_test_family(p: f64, max_power: usize, degree: usize) -> Result<Vec<AnalyticFunction>> {
    let mut out: Vec<AnalyticFunction> = (0..=max_power)
        .map(|n| AnalyticFunction::monomial(n).with_max_degree(degree.max(max_power)))
        .collect();
    for a in FAMILY_KERNEL_CENTERS {
        out.push(FunctionSpec::kernel(Complex64::new(a, 0.0), 2.0 / p).expand(degree)?);
    }
    Ok(out)
}

/// Hilbert norm used for the finite-section matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HilbertNorm {
    /// H² with orthonormal basis `z^j`.
    H2,
    /// `(|f(0)|² + |f'(0)|² + ‖f''‖²_{H²})^(1/2)`, orthonormal basis
    /// `1, z, z^j / (j(j-1))`.
    S2Hilbert,
}

fn basis_scale(norm: HilbertNorm, j: usize) -> f64 {
    match norm {
        HilbertNorm::H2 => 1.0,
        HilbertNorm::S2Hilbert if j < 2 => 1.0,
        HilbertNorm::S2Hilbert => (j * (j - 1)) as f64,
    }
}

/// Largest singular value of the `n_basis × n_basis` finite section of `op`
/// in the orthonormal monomial basis of `norm`. This is a lower bound for
/// the operator norm in that Hilbert norm.
pub fn opnorm_matrix_p2(op: &OperatorSpec, norm: HilbertNorm, n_basis: usize) -> Result<f64> {
    if n_basis == 0 || n_basis > MAX_BASIS {
        return Err(Error::BasisTooLarge {
            size: n_basis,
            max: MAX_BASIS,
        });
    }
    let images = op.monomial_images(n_basis)?;
    let columns: Vec<Vec<Complex64>> = images
        .iter()
        .enumerate()
        .map(|(j, img)| {
            let dj = basis_scale(norm, j);
            (0..n_basis)
                .map(|i| img.coeff(i) * (basis_scale(norm, i) / dj))
                .collect()
        })
        .collect();
    Ok(spectral_norm(columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{s2p_norm, sp_norm, Space};
    use approx::assert_relative_eq;

    fn poly(c: &[f64]) -> AnalyticFunction {
        AnalyticFunction::real_polynomial(c)
    }

    fn self_map(c: &[f64]) -> SelfMap {
        SelfMap::new(poly(c), &BoundaryGrid::default()).unwrap()
    }

    #[test]
    fn volterra_of_one_is_g_minus_g0() {
        let g = poly(&[2.0, -1.0, 0.5, 0.25]);
        let out = OperatorSpec::Volterra(g.clone()).apply(&poly(&[1.0])).unwrap();
        let expect = g.sub(&poly(&[2.0]));
        assert!(out.max_coeff_diff(&expect) < 1e-15);
        assert_eq!(out.coeff(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integral_of_z_is_antiderivative_of_g() {
        let grid = BoundaryGrid::default();
        let g = poly(&[1.0, 1.0]);
        let out = OperatorSpec::Integral(g.clone())
            .apply(&AnalyticFunction::identity())
            .unwrap();
        assert!(out.max_coeff_diff(&poly(&[0.0, 1.0, 0.5])) < 1e-15);
        assert_relative_eq!(
            s2p_norm(&out, 2.0, &grid).unwrap(),
            sp_norm(&g, 2.0, &grid).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn weighted_composition_of_one_is_psi() {
        let psi = poly(&[0.3, 0.0, -1.2]);
        let op = OperatorSpec::WeightedComposition {
            phi: self_map(&[0.1, 0.5]),
            psi: psi.clone(),
        };
        assert!(op.apply(&poly(&[1.0])).unwrap().max_coeff_diff(&psi) < 1e-16);
    }

    #[test]
    fn expansion_examples() {
        let f = poly(&[0.2, -0.4, 0.3, 0.7, 0.1]);
        let id = triple_terms(&SelfMap::identity(), &poly(&[1.0]), &f);
        assert!(id.t0.is_zero_within(1e-16));
        assert!(id.t1.is_zero_within(1e-16));
        assert!(id.t2.max_coeff_diff(&f.derivative().derivative()) < 1e-14);

        // ψ = z, φ = z²: (0, 6z f'(z²), 4z³ f''(z²))
        let sq = self_map(&[0.0, 0.0, 1.0]);
        let t = triple_terms(&sq, &poly(&[0.0, 1.0]), &f);
        assert!(t.t0.is_zero_within(1e-16));
        let df = f.derivative();
        let ddf = df.derivative();
        let t1 = poly(&[0.0, 6.0]).multiply(&df.compose(&sq));
        let t2 = poly(&[0.0, 0.0, 0.0, 4.0]).multiply(&ddf.compose(&sq));
        assert!(t.t1.max_coeff_diff(&t1) < 1e-14);
        assert!(t.t2.max_coeff_diff(&t2) < 1e-14);

        let psi = poly(&[1.0, 2.0, 3.0, 4.0]);
        let c = triple_terms(&self_map(&[0.2, 0.3]), &psi, &poly(&[1.0]));
        assert!(c.t0.max_coeff_diff(&psi.derivative().derivative()) < 1e-14);
        assert!(c.t1.is_zero_within(1e-16));
        assert!(c.t2.is_zero_within(1e-16));
    }

    fn triple_terms(phi: &SelfMap, psi: &AnalyticFunction, f: &AnalyticFunction) -> ExpansionTriple {
        second_derivative_expansion(phi, psi, f)
    }

    impl AnalyticFunction {
        fn is_zero_within(&self, tol: f64) -> bool {
            self.max_coeff_abs() <= tol
        }
    }

    #[test]
    fn lower_bound_examples() {
        let grid = BoundaryGrid::default();
        let h2 = NormParams::new(Space::Hp, 2.0).unwrap();
        let s2 = NormParams::new(Space::S2p, 2.0).unwrap();
        let mult = OperatorSpec::Multiplication(poly(&[2.0]));
        let lb = opnorm_lower_bound(&mult, h2, h2, &[poly(&[1.0])], &grid).unwrap();
        assert_relative_eq!(lb.value, 2.0, max_relative = 1e-14);

        let psi = poly(&[0.5, -0.25, 0.75]);
        let w = OperatorSpec::WeightedComposition {
            phi: self_map(&[0.0, 0.5]),
            psi: psi.clone(),
        };
        let lb = opnorm_lower_bound(&w, s2, s2, &[poly(&[1.0])], &grid).unwrap();
        assert_relative_eq!(lb.value, s2p_norm(&psi, 2.0, &grid).unwrap(), max_relative = 1e-14);

        let g = poly(&[0.5, 1.0, 1.0]);
        let lb = opnorm_lower_bound(&OperatorSpec::Volterra(g.clone()), s2, s2, &[poly(&[1.0])], &grid).unwrap();
        assert_relative_eq!(lb.value, s2p_norm(&g, 2.0, &grid).unwrap() - 0.5, max_relative = 1e-14);

        assert!(matches!(
            opnorm_lower_bound(&mult, h2, h2, &[], &grid),
            Err(Error::EmptyFamily)
        ));
        assert!(matches!(
            opnorm_lower_bound(&mult, s2, s2, &[poly(&[1.0]), poly(&[0.0])], &grid),
            Err(Error::ZeroNormMember { index: 1 })
        ));
    }

    #[test]
    fn matrix_examples() {
        let scalar = OperatorSpec::Multiplication(AnalyticFunction::constant(Complex64::new(0.0, -3.0)));
        assert_relative_eq!(
            opnorm_matrix_p2(&scalar, HilbertNorm::H2, 12).unwrap(),
            3.0,
            max_relative = 1e-14
        );
        let half = OperatorSpec::Composition(self_map(&[0.0, 0.5]));
        assert_relative_eq!(
            opnorm_matrix_p2(&half, HilbertNorm::H2, 16).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        let rot = SelfMap::new(
            AnalyticFunction::polynomial([Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, 0.7)]),
            &BoundaryGrid::default(),
        )
        .unwrap();
        let rot = OperatorSpec::Composition(rot);
        assert_relative_eq!(
            opnorm_matrix_p2(&rot, HilbertNorm::H2, 32).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        assert!(matches!(
            opnorm_matrix_p2(&rot, HilbertNorm::H2, 129),
            Err(Error::BasisTooLarge { .. })
        ));
    }

    #[test]
    fn default_family_contains_witness_functions() {
        let fam = default_test_family(2.0, 32, 512).unwrap();
        assert_eq!(fam.len(), 33 + FAMILY_KERNEL_CENTERS.len());
        assert!(fam[0].max_coeff_diff(&poly(&[1.0])) == 0.0);
        assert!(fam[1].max_coeff_diff(&poly(&[0.0, 1.0])) == 0.0);
        assert!(fam[2].max_coeff_diff(&poly(&[0.0, 0.0, 1.0])) == 0.0);
    }
}
