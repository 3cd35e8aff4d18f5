use hardylab_core::operators::{opnorm_lower_bound, opnorm_matrix_p2, HilbertNorm};
use hardylab_core::spaces::{hp_norm, integral_mean, s2p_norm, sp_norm};
use hardylab_core::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = AnalyticFunction> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_degree + 1)
        .prop_map(|v| AnalyticFunction::polynomial(v.into_iter().map(|(a, b)| c(a, b))))
}

/// Polynomial rescaled so that its coefficient ℓ¹ norm is `scale`.
fn self_map_strategy(max_degree: usize, scale: f64) -> impl Strategy<Value = AnalyticFunction> {
    poly_strategy(max_degree).prop_map(move |f| {
        let l1 = f.l1_norm();
        if l1 == 0.0 {
            f
        } else {
            f.scale(c(scale / l1, 0.0))
        }
    })
}

fn point_strategy(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn grid() -> BoundaryGrid {
    BoundaryGrid::new(1024).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antiderivative_round_trip(f in poly_strategy(40)) {
        let back = f.antiderivative().unwrap().derivative();
        for k in 0..f.coeffs().len() {
            let d = (back.coeff(k) - f.coeff(k)).norm();
            prop_assert!(d <= f64::EPSILON * f.coeff(k).norm(), "k={} d={}", k, d);
        }
    }

    #[test]
    fn batched_evaluation_is_bitwise_scalar(f in poly_strategy(60), zs in prop::array::uniform8(point_strategy(1.0))) {
        let many = f.eval_many(&zs);
        let (v, dv) = f.eval_with_derivative_many(&zs);
        for l in 0..8 {
            prop_assert_eq!(many[l], f.eval(zs[l]));
            prop_assert_eq!((v[l], dv[l]), f.eval_with_derivative(zs[l]));
        }
    }

    #[test]
    fn compose_with_identity_and_constant(f in poly_strategy(12), phi in self_map_strategy(6, 0.9), k in (-2.0..2.0f64, -2.0..2.0f64)) {
        let id = SelfMap::identity();
        prop_assert!(f.compose(&id).max_coeff_diff(&f) == 0.0);
        let konst = AnalyticFunction::constant(c(k.0, k.1));
        let phi = SelfMap::new(phi, &grid()).unwrap();
        prop_assert!(konst.compose(&phi).max_coeff_diff(&konst) == 0.0);
    }

    #[test]
    fn compose_matches_pointwise_evaluation(
        f in poly_strategy(10),
        phi in self_map_strategy(6, 0.95),
        zs in prop::collection::vec(point_strategy(0.9), 100),
    ) {
        let phi = SelfMap::new(phi, &grid()).unwrap();
        let h = f.compose(&phi);
        for z in zs {
            let expected = f.eval(phi.function().eval(z));
            prop_assert!((h.eval(z) - expected).norm() <= 1e-10, "z={}", z);
        }
    }

    #[test]
    fn multiply_commutative_associative(f in poly_strategy(64), g in poly_strategy(64), h in poly_strategy(64)) {
        prop_assert!(f.multiply(&g).max_coeff_diff(&g.multiply(&f)) <= 1e-12);
        let left = f.multiply(&g).multiply(&h);
        let right = f.multiply(&g.multiply(&h));
        let scale = left.max_coeff_abs().max(1.0);
        prop_assert!(left.max_coeff_diff(&right) <= 1e-12 * scale);
    }

    #[test]
    fn kernel_expansion_within_tail_bound(
        r in 0.0..0.99f64,
        t in 0.0..std::f64::consts::TAU,
        s in 0.1..4.0f64,
        zs in prop::collection::vec(point_strategy(1.0), 100),
    ) {
        let a = Complex64::from_polar(r, t);
        let f = FunctionSpec::kernel(a, s).expand(512).unwrap();
        for z in zs {
            let exact = (c(1.0, 0.0) - a.conj() * z).powf(-s);
            let err = (f.eval(z) - exact).norm();
            prop_assert!(err <= f.tail_bound() + 1e-12 * exact.norm(), "err={} tail={}", err, f.tail_bound());
        }
    }

    #[test]
    fn integral_means_increase_with_radius(f in poly_strategy(16), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 4.0]), r1 in 0.0..1.0f64, r2 in 0.0..1.0f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let g = grid();
        prop_assert!(integral_mean(&f, p, lo, &g).unwrap() <= integral_mean(&f, p, hi, &g).unwrap() + 1e-12);
    }

    #[test]
    fn parseval(f in poly_strategy(256)) {
        let n = hp_norm(&f, 2.0, &BoundaryGrid::default()).unwrap();
        let direct: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((n * n - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn norms_homogeneous_and_subadditive(f in poly_strategy(16), g in poly_strategy(16), k in (-3.0..3.0f64, -3.0..3.0f64), p in prop::sample::select(vec![1.0, 2.0, 3.0, 4.0])) {
        let gr = grid();
        let lambda = c(k.0, k.1);
        type NormFn = fn(&AnalyticFunction, f64, &BoundaryGrid) -> Result<f64>;
        let norms: [NormFn; 3] = [hp_norm, sp_norm, s2p_norm];
        for norm in norms {
            let nf = norm(&f, p, &gr).unwrap();
            let ng = norm(&g, p, &gr).unwrap();
            let scaled = norm(&f.scale(lambda), p, &gr).unwrap();
            prop_assert!((scaled - lambda.norm() * nf).abs() <= 1e-10 * (1.0 + lambda.norm() * nf));
            let sum = norm(&f.add(&g), p, &gr).unwrap();
            prop_assert!(sum <= nf + ng + 1e-10 * (1.0 + nf + ng));
        }
    }

    #[test]
    fn hardy_growth_bound(f in poly_strategy(16), p in prop::sample::select(vec![1.0, 2.0, 4.0])) {
        let prof = spaces::hardy_growth_profile(&f, p, &spaces::default_growth_grid(), &BoundaryGrid::default()).unwrap();
        prop_assert!(prof.max_value <= prof.reference_norm * (1.0 + 1e-9));
    }

    #[test]
    fn quadrature_converged_for_polynomials(f in poly_strategy(16), p in prop::sample::select(vec![2.0, 4.0])) {
        let a = hp_norm(&f, p, &BoundaryGrid::new(4096).unwrap()).unwrap();
        let b = hp_norm(&f, p, &BoundaryGrid::new(8192).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn operators_are_linear(
        phi in self_map_strategy(4, 0.9),
        psi in poly_strategy(4),
        f in poly_strategy(8),
        g in poly_strategy(8),
        al in (-2.0..2.0f64, -2.0..2.0f64),
        be in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let phi = SelfMap::new(phi, &grid()).unwrap();
        let (al, be) = (c(al.0, al.1), c(be.0, be.1));
        let ops = [
            OperatorSpec::WeightedComposition { phi: phi.clone(), psi: psi.clone() },
            OperatorSpec::Composition(phi.clone()),
            OperatorSpec::Multiplication(psi.clone()),
            OperatorSpec::Volterra(psi.clone()),
            OperatorSpec::Integral(psi.clone()),
        ];
        for op in &ops {
            let lhs = op.apply(&f.scale(al).add(&g.scale(be))).unwrap();
            let rhs = op.apply(&f).unwrap().scale(al).add(&op.apply(&g).unwrap().scale(be));
            prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-11 * rhs.max_coeff_abs().max(1.0));
        }
    }

    #[test]
    fn volterra_and_integral_exchange(f in poly_strategy(12), g in poly_strategy(12)) {
        let t = OperatorSpec::Volterra(g.clone()).apply(&f).unwrap();
        let i = OperatorSpec::Integral(g.clone()).apply(&f).unwrap();
        prop_assert_eq!(t.coeff(0), c(0.0, 0.0));
        prop_assert_eq!(i.coeff(0), c(0.0, 0.0));
        let fg = f.multiply(&g);
        let expected = fg.sub(&AnalyticFunction::constant(f.coeff(0) * g.coeff(0)));
        prop_assert!(t.add(&i).max_coeff_diff(&expected) <= 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn finite_section_norm_monotone_in_basis(phi in self_map_strategy(3, 0.95), psi in poly_strategy(3)) {
        let phi = SelfMap::new(phi, &grid()).unwrap();
        let op = OperatorSpec::WeightedComposition { phi, psi };
        for norm in [HilbertNorm::H2, HilbertNorm::S2Hilbert] {
            let mut prev = 0.0;
            for n in [2, 4, 8, 16, 32] {
                let v = opnorm_matrix_p2(&op, norm, n).unwrap();
                prop_assert!(v >= prev * (1.0 - 1e-12), "{:?} n={} {} < {}", norm, n, v, prev);
                prev = v;
            }
        }
    }

    #[test]
    fn lower_bound_below_finite_section(phi in self_map_strategy(2, 0.9), psi in poly_strategy(2)) {
        // z^n with n < 8 composed with a quadratic and multiplied by a
        // quadratic stays below degree 32, so the family lies in the section.
        let phi = SelfMap::new(phi, &grid()).unwrap();
        let op = OperatorSpec::WeightedComposition { phi, psi };
        let family: Vec<_> = (0..8).map(AnalyticFunction::monomial).collect();
        let h2 = NormParams::new(Space::Hp, 2.0).unwrap();
        let lb = opnorm_lower_bound(&op, h2, h2, &family, &BoundaryGrid::default()).unwrap();
        let m = opnorm_matrix_p2(&op, HilbertNorm::H2, 32).unwrap();
        prop_assert!(lb.value <= m + 1e-8);
    }

    #[test]
    fn criterion_rotation_invariant(
        alpha in 0.0..std::f64::consts::TAU,
        beta in 0.0..std::f64::consts::TAU,
        n in 1usize..5,
        r in 0.0..0.97f64,
        t in 0.0..std::f64::consts::TAU,
    ) {
        // Λ for (φ, u) at a equals Λ for (e^{iα} φ(e^{iβ}·), u(e^{iβ}·)) at e^{iα} a.
        let g = BoundaryGrid::default();
        let a = Complex64::from_polar(r, t);
        let mut w = vec![c(0.0, 0.0); n + 1];
        w[0] = c(1.0, 0.0);
        w[n] = c(0.5, 0.0);
        let base = CriterionSpec::new(SelfMap::identity(), AnalyticFunction::polynomial(w.clone()), 2.0, 2.0).unwrap();
        let phi = SelfMap::new(
            AnalyticFunction::polynomial([c(0.0, 0.0), Complex64::from_polar(1.0, alpha + beta)]),
            &g,
        )
        .unwrap();
        w[n] *= Complex64::from_polar(1.0, n as f64 * beta);
        let rotated = CriterionSpec::new(phi, AnalyticFunction::polynomial(w), 2.0, 2.0).unwrap();
        let v0 = criterion_value(&base, a, &g).unwrap();
        let v1 = criterion_value(&rotated, a * Complex64::from_polar(1.0, alpha), &g).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-10 * v0.max(1.0), "{} vs {}", v0, v1);
    }
}
