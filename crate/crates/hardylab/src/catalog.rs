//! Named operator cases with their expected classification.

use std::f64::consts::PI;

use hardylab_core::{BoundaryGrid, Complex64, FunctionSpec, SelfMap};
use serde::Serialize;

use crate::formats::FunctionSpecJson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    BoundedConsistent,
    UnboundedConsistent,
    CompactConsistent,
    NotCompactConsistent,
}

impl Expectation {
    pub fn bounded(self) -> bool {
        self != Expectation::UnboundedConsistent
    }
}

/// Statements exercised by the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// `W: S_2^p → H^p` bounded iff `ψ ∈ H^p`.
    HpTarget,
    /// `W: S_2^p → S_2^p` bounded iff `ψ ∈ S_2^p` and both weight criteria are finite.
    S2pBoundedness,
    /// The composition specialization (`ψ = 1`).
    Composition,
    /// The multiplication specialization (`φ = z`).
    Multiplication,
    /// Compact iff the three limsup conditions vanish.
    Compactness,
    /// `T_g` bounded iff `g ∈ S_2^p`.
    Volterra,
    /// `I_g` bounded iff `g ∈ S^p`.
    Integral,
}

pub const CLAIMS: [Claim; 7] = [
    Claim::HpTarget,
    Claim::S2pBoundedness,
    Claim::Composition,
    Claim::Multiplication,
    Claim::Compactness,
    Claim::Volterra,
    Claim::Integral,
];

#[derive(Debug, Clone, PartialEq)]
pub enum Symbols {
    Weighted { phi: FunctionSpec, psi: FunctionSpec },
    Volterra(FunctionSpec),
    Integral(FunctionSpec),
}

impl Symbols {
    pub fn phi(&self) -> Option<&FunctionSpec> {
        match self {
            Symbols::Weighted { phi, .. } => Some(phi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub name: &'static str,
    pub p: f64,
    /// A single operator, or for unbounded-consistent cases the witness
    /// sequence whose limit symbol leaves the required space.
    pub members: Vec<Symbols>,
    pub expected: Expectation,
    /// Oracle behind the expected tag.
    pub oracle: &'static str,
}

fn poly(c: &[f64]) -> FunctionSpec {
    FunctionSpec::poly(c.iter().copied())
}

fn kernel(a: f64, s: f64) -> FunctionSpec {
    FunctionSpec::kernel(Complex64::new(a, 0.0), s)
}

fn one() -> FunctionSpec {
    poly(&[1.0])
}

fn z() -> FunctionSpec {
    poly(&[0.0, 1.0])
}

fn wcomp(phi: FunctionSpec, psi: FunctionSpec) -> Vec<Symbols> {
    vec![Symbols::Weighted { phi, psi }]
}

/// Centers `1 - 2^(-k)`, k = 1..=6, of the degenerating witness families.
pub fn family_centers() -> Vec<f64> {
    (1..=6).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

impl Case {
    pub fn is_family(&self) -> bool {
        self.members.len() > 1
    }

    pub fn single(&self) -> Option<&Symbols> {
        (!self.is_family()).then(|| &self.members[0])
    }

    pub fn claims(&self) -> Vec<Claim> {
        let mut out = Vec::new();
        match &self.members[0] {
            Symbols::Weighted { phi, psi } => {
                if !self.is_family() {
                    out.push(Claim::HpTarget);
                }
                out.push(Claim::S2pBoundedness);
                if *psi == one() {
                    out.push(Claim::Composition);
                }
                if *phi == z() {
                    out.push(Claim::Multiplication);
                }
                if matches!(
                    self.expected,
                    Expectation::CompactConsistent | Expectation::NotCompactConsistent
                ) {
                    out.push(Claim::Compactness);
                }
            }
            Symbols::Volterra(_) => out.push(Claim::Volterra),
            Symbols::Integral(_) => out.push(Claim::Integral),
        }
        out
    }

    /// Whether some member's self-map reaches the unit circle.
    pub fn touches_boundary(&self, degree: usize, grid: &BoundaryGrid) -> bool {
        self.members.iter().any(|m| {
            m.phi()
                .and_then(|phi| phi.expand(degree).ok())
                .and_then(|f| SelfMap::new(f, grid).ok())
                .is_some_and(|map| map.touches_boundary(1e-9))
        })
    }
}

/// The shipped catalog, sorted by name.
pub fn catalog() -> Vec<Case> {
    use Expectation::*;
    let half_kernel = FunctionSpec::scale(Complex64::new(0.5, 0.0), kernel(0.5, 1.0));
    let rotation = FunctionSpec::Poly(vec![Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)]);
    let mut cases = vec![
        Case {
            name: "identity",
            p: 2.0,
            members: wcomp(z(), one()),
            expected: NotCompactConsistent,
            oracle: "identity operator; Poisson identity gives a constant third trace",
        },
        Case {
            name: "identity_p1",
            p: 1.0,
            members: wcomp(z(), one()),
            expected: BoundedConsistent,
            oracle: "identity operator",
        },
        Case {
            name: "half_disc",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.5]), one()),
            expected: CompactConsistent,
            oracle: "closed form: |1 - conj(a) φ| >= 1/2 gives Λ(a) <= 4(1 - |a|²)",
        },
        Case {
            name: "half_disc_weighted",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.5]), poly(&[1.0, 1.0])),
            expected: CompactConsistent,
            oracle: "Λ bound: |φ| <= 1/2 and bounded weights give Λ(a) <= C (1 - |a|²)",
        },
        Case {
            name: "contraction",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.9]), one()),
            expected: CompactConsistent,
            oracle: "Λ bound: |φ| <= 0.9 gives Λ(a) <= 100 (1 - |a|²) |φ'|^(2p)",
        },
        Case {
            name: "inner_quadratic",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.5, 0.3]), poly(&[1.0, 1.0])),
            expected: CompactConsistent,
            oracle: "Λ bound: |φ| <= 0.8 on the closed disc",
        },
        Case {
            name: "constant_map",
            p: 2.0,
            members: wcomp(poly(&[0.6]), z()),
            expected: CompactConsistent,
            oracle: "closed form: rank-one operator f -> f(0.6) z, all weights vanish",
        },
        Case {
            name: "zero_map",
            p: 2.0,
            members: wcomp(poly(&[0.0]), poly(&[1.0, 1.0])),
            expected: CompactConsistent,
            oracle: "closed form: rank-one operator f -> f(0) (1 + z)",
        },
        Case {
            name: "rotation",
            p: 2.0,
            members: wcomp(rotation, one()),
            expected: NotCompactConsistent,
            oracle: "closed form: rotation is an isometry of every space here",
        },
        Case {
            name: "square",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.0, 1.0]), one()),
            expected: NotCompactConsistent,
            oracle: "inner map: the φ'² trace is 2^(2p) times a Poisson mass",
        },
        Case {
            name: "square_weighted_p4",
            p: 4.0,
            members: wcomp(poly(&[0.0, 0.0, 1.0]), poly(&[1.0, -0.5])),
            expected: BoundedConsistent,
            oracle: "Λ bound: polynomial symbols, weights bounded on the circle",
        },
        Case {
            name: "touching_affine",
            p: 2.0,
            members: wcomp(poly(&[0.5, 0.5]), one()),
            expected: BoundedConsistent,
            oracle: "Λ bound: φ'' = 0 and |φ'|² = 1/4",
        },
        Case {
            name: "touching_affine_p1",
            p: 1.0,
            members: wcomp(poly(&[0.5, 0.5]), poly(&[0.0, 0.0, 1.0])),
            expected: BoundedConsistent,
            oracle: "Λ bound: polynomial symbols, weights bounded on the circle",
        },
        Case {
            name: "touching_affine_p4",
            p: 4.0,
            members: wcomp(poly(&[0.5, 0.5]), one()),
            expected: BoundedConsistent,
            oracle: "Λ bound: φ'' = 0 and |φ'|² = 1/4",
        },
        Case {
            name: "touching_kernel",
            p: 2.0,
            members: wcomp(half_kernel.clone(), one()),
            expected: BoundedConsistent,
            oracle: "Λ bound: φ = 1/(2 - z) is analytic across the circle",
        },
        Case {
            name: "touching_kernel_p1",
            p: 1.0,
            members: wcomp(half_kernel, poly(&[1.0, 1.0])),
            expected: BoundedConsistent,
            oracle: "Λ bound: φ = 1/(2 - z) is analytic across the circle",
        },
        Case {
            name: "odd_cubic",
            p: 2.0,
            members: wcomp(poly(&[0.0, 0.5, 0.0, 0.5]), one()),
            expected: BoundedConsistent,
            oracle: "Λ bound: polynomial symbols, weights bounded on the circle",
        },
        Case {
            name: "odd_cubic_weighted_p4",
            p: 4.0,
            members: wcomp(poly(&[0.0, 0.5, 0.0, 0.5]), z()),
            expected: BoundedConsistent,
            oracle: "Λ bound: polynomial symbols, weights bounded on the circle",
        },
        Case {
            name: "mult_affine_p1",
            p: 1.0,
            members: wcomp(z(), poly(&[1.0, 1.0])),
            expected: BoundedConsistent,
            oracle: "Λ bound: weights 2ψ' and ψ bounded, ψ a polynomial",
        },
        Case {
            name: "mult_kernel",
            p: 2.0,
            members: wcomp(z(), kernel(0.95, 2.0)),
            expected: BoundedConsistent,
            oracle: "Λ bound: ψ analytic on |z| < 1/0.95, weights bounded on the circle",
        },
        Case {
            name: "mult_kernel_simple",
            p: 2.0,
            members: wcomp(z(), kernel(0.5, 1.0)),
            expected: BoundedConsistent,
            oracle: "Λ bound: ψ = 1/(1 - z/2) bounded with bounded derivative",
        },
        Case {
            name: "mult_square_p4",
            p: 4.0,
            members: wcomp(z(), poly(&[0.0, 0.0, 1.0])),
            expected: NotCompactConsistent,
            oracle: "closed form: |ψ| = 1 on the circle, so the ψ trace is a Poisson mass",
        },
        Case {
            name: "mult_kernel_family",
            p: 2.0,
            members: family_centers()
                .into_iter()
                .map(|a| Symbols::Weighted {
                    phi: z(),
                    psi: kernel(a, 1.0),
                })
                .collect(),
            expected: UnboundedConsistent,
            oracle: "norm identity: ‖W(1)‖ = ‖ψ‖, and 1/(1 - z) has no S_2^p norm",
        },
        Case {
            name: "volterra_square",
            p: 2.0,
            members: vec![Symbols::Volterra(poly(&[0.0, 0.0, 1.0]))],
            expected: BoundedConsistent,
            oracle: "g a polynomial, hence in S_2^p",
        },
        Case {
            name: "volterra_affine_p1",
            p: 1.0,
            members: vec![Symbols::Volterra(poly(&[1.0, 1.0]))],
            expected: BoundedConsistent,
            oracle: "g a polynomial, hence in S_2^p",
        },
        Case {
            name: "volterra_constant",
            p: 2.0,
            members: vec![Symbols::Volterra(poly(&[3.0]))],
            expected: BoundedConsistent,
            oracle: "closed form: T_g = 0 for constant g",
        },
        Case {
            name: "volterra_kernel_p4",
            p: 4.0,
            members: vec![Symbols::Volterra(kernel(0.9, 1.0))],
            expected: BoundedConsistent,
            oracle: "g analytic on |z| < 1/0.9, hence in S_2^p",
        },
        Case {
            name: "volterra_kernel_family",
            p: 2.0,
            members: family_centers()
                .into_iter()
                .map(|a| Symbols::Volterra(kernel(a, 1.0)))
                .collect(),
            expected: UnboundedConsistent,
            oracle: "norm identity: ‖T_g 1‖ = ‖g‖ - |g(0)|, and 1/(1 - z) has no S_2^p norm",
        },
        Case {
            name: "integral_affine",
            p: 2.0,
            members: vec![Symbols::Integral(poly(&[1.0, 1.0]))],
            expected: BoundedConsistent,
            oracle: "g a polynomial, hence in S^p",
        },
        Case {
            name: "integral_square_p1",
            p: 1.0,
            members: vec![Symbols::Integral(poly(&[0.0, 0.0, 1.0]))],
            expected: BoundedConsistent,
            oracle: "g a polynomial, hence in S^p",
        },
        Case {
            name: "integral_constant",
            p: 2.0,
            members: vec![Symbols::Integral(poly(&[2.0]))],
            expected: BoundedConsistent,
            oracle: "closed form: I_g f = 2 (f - f(0))",
        },
        Case {
            name: "integral_kernel",
            p: 2.0,
            members: vec![Symbols::Integral(kernel(0.9, 1.0))],
            expected: BoundedConsistent,
            oracle: "g analytic on |z| < 1/0.9, hence in S^p",
        },
        Case {
            name: "integral_kernel_family",
            p: 2.0,
            members: family_centers()
                .into_iter()
                .map(|a| Symbols::Integral(kernel(a, 1.0)))
                .collect(),
            expected: UnboundedConsistent,
            oracle: "norm identity: ‖I_g z‖ = ‖g‖_{S^p}, and 1/(1 - z) has no S^p norm",
        },
    ];
    cases.sort_by_key(|c| c.name);
    cases
}

/// Catalog entry in JSON form.
#[derive(Debug, Clone, Serialize)]
pub struct CaseJson {
    pub name: &'static str,
    pub p: f64,
    pub expected: Expectation,
    pub oracle: &'static str,
    pub claims: Vec<Claim>,
    pub members: Vec<SymbolsJson>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SymbolsJson {
    #[serde(rename = "wcomp")]
    Weighted {
        phi: FunctionSpecJson,
        psi: FunctionSpecJson,
    },
    Volterra {
        g: FunctionSpecJson,
    },
    Integral {
        g: FunctionSpecJson,
    },
}

impl From<&Case> for CaseJson {
    fn from(c: &Case) -> Self {
        CaseJson {
            name: c.name,
            p: c.p,
            expected: c.expected,
            oracle: c.oracle,
            claims: c.claims(),
            members: c
                .members
                .iter()
                .map(|m| match m {
                    Symbols::Weighted { phi, psi } => SymbolsJson::Weighted {
                        phi: phi.into(),
                        psi: psi.into(),
                    },
                    Symbols::Volterra(g) => SymbolsJson::Volterra { g: g.into() },
                    Symbols::Integral(g) => SymbolsJson::Integral { g: g.into() },
                })
                .collect(),
        }
    }
}
