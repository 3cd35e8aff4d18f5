//! JSON and CSV formats.
//!
//! Complex numbers are written as `[re, im]`; on input a bare number is also
//! accepted as a real value.

use std::fmt::Write as _;

use hardylab_core::carleson::{CompactnessReport, CriterionReport, S2pBoundednessReport};
use hardylab_core::{AnalyticFunction, BoundaryGrid, Complex64, FunctionSpec, OperatorSpec, SelfMap};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        match c {
            ComplexJson::Real(re) => Complex64::new(re, 0.0),
            ComplexJson::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson::Pair([c.re, c.im])
    }
}

pub fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// `{"kind": "poly" | "kernel" | "sum" | "product" | "scale", ...}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpecJson {
    Poly {
        coeffs: Vec<ComplexJson>,
    },
    Kernel {
        center: ComplexJson,
        exponent: f64,
    },
    Sum {
        terms: Vec<FunctionSpecJson>,
    },
    Product {
        factors: Vec<FunctionSpecJson>,
    },
    Scale {
        factor: ComplexJson,
        inner: Box<FunctionSpecJson>,
    },
}

impl From<&FunctionSpecJson> for FunctionSpec {
    fn from(s: &FunctionSpecJson) -> Self {
        match s {
            FunctionSpecJson::Poly { coeffs } => FunctionSpec::Poly(coeffs.iter().map(|&c| c.into()).collect()),
            FunctionSpecJson::Kernel { center, exponent } => FunctionSpec::Kernel {
                center: (*center).into(),
                exponent: *exponent,
            },
            FunctionSpecJson::Sum { terms } => FunctionSpec::Sum(terms.iter().map(Into::into).collect()),
            FunctionSpecJson::Product { factors } => FunctionSpec::Product(factors.iter().map(Into::into).collect()),
            FunctionSpecJson::Scale { factor, inner } => {
                FunctionSpec::Scale((*factor).into(), Box::new(inner.as_ref().into()))
            }
        }
    }
}

impl From<&FunctionSpec> for FunctionSpecJson {
    fn from(s: &FunctionSpec) -> Self {
        match s {
            FunctionSpec::Poly(c) => FunctionSpecJson::Poly {
                coeffs: c.iter().map(|&z| z.into()).collect(),
            },
            FunctionSpec::Kernel { center, exponent } => FunctionSpecJson::Kernel {
                center: (*center).into(),
                exponent: *exponent,
            },
            FunctionSpec::Sum(t) => FunctionSpecJson::Sum {
                terms: t.iter().map(Into::into).collect(),
            },
            FunctionSpec::Product(f) => FunctionSpecJson::Product {
                factors: f.iter().map(Into::into).collect(),
            },
            FunctionSpec::Scale(c, inner) => FunctionSpecJson::Scale {
                factor: (*c).into(),
                inner: Box::new(inner.as_ref().into()),
            },
        }
    }
}

impl FunctionSpecJson {
    pub fn expand(&self, degree: usize) -> hardylab_core::Result<AnalyticFunction> {
        FunctionSpec::from(self).expand(degree)
    }
}

/// `{"kind": "wcomp" | "comp" | "mult" | "volterra" | "integral", ...}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorSpecJson {
    #[serde(rename = "wcomp")]
    WeightedComposition {
        phi: FunctionSpecJson,
        psi: FunctionSpecJson,
    },
    #[serde(rename = "comp")]
    Composition {
        phi: FunctionSpecJson,
    },
    #[serde(rename = "mult")]
    Multiplication {
        psi: FunctionSpecJson,
    },
    Volterra {
        g: FunctionSpecJson,
    },
    Integral {
        g: FunctionSpecJson,
    },
}

impl OperatorSpecJson {
    /// Expands the symbols and validates self-maps on `grid`.
    pub fn build(&self, degree: usize, grid: &BoundaryGrid) -> hardylab_core::Result<OperatorSpec> {
        let map = |s: &FunctionSpecJson| SelfMap::new(s.expand(degree)?, grid);
        Ok(match self {
            OperatorSpecJson::WeightedComposition { phi, psi } => OperatorSpec::WeightedComposition {
                phi: map(phi)?,
                psi: psi.expand(degree)?,
            },
            OperatorSpecJson::Composition { phi } => OperatorSpec::Composition(map(phi)?),
            OperatorSpecJson::Multiplication { psi } => OperatorSpec::Multiplication(psi.expand(degree)?),
            OperatorSpecJson::Volterra { g } => OperatorSpec::Volterra(g.expand(degree)?),
            OperatorSpecJson::Integral { g } => OperatorSpec::Integral(g.expand(degree)?),
        })
    }
}

/// Output form of an expanded function. It is also a valid `poly` input;
/// `tail_bound` and `decl_radius` are then ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionJson {
    pub kind: &'static str,
    pub coeffs: Vec<[f64; 2]>,
    pub tail_bound: f64,
    /// `null` for polynomials (infinite radius).
    pub decl_radius: Option<f64>,
}

impl From<&AnalyticFunction> for FunctionJson {
    fn from(f: &AnalyticFunction) -> Self {
        let n = f.degree() + 1;
        FunctionJson {
            kind: "poly",
            coeffs: f.coeffs().iter().take(n).map(|&c| pair(c)).collect(),
            tail_bound: f.tail_bound(),
            decl_radius: f.decl_radius().is_finite().then(|| f.decl_radius()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelJson {
    pub eps: f64,
    pub kappa: f64,
    pub argmax: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlagsJson {
    pub sup_finite_consistent: bool,
    pub limsup_zero_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReportJson {
    pub sup_estimate: f64,
    pub argmax_a: [f64; 2],
    pub levels: Vec<LevelJson>,
    pub flags: FlagsJson,
    pub evaluations: usize,
}

impl From<&CriterionReport> for CriterionReportJson {
    fn from(r: &CriterionReport) -> Self {
        CriterionReportJson {
            sup_estimate: r.sup_estimate,
            argmax_a: pair(r.argmax_a),
            levels: r
                .levels
                .iter()
                .map(|l| LevelJson {
                    eps: l.eps,
                    kappa: l.kappa,
                    argmax: pair(l.argmax),
                })
                .collect(),
            flags: FlagsJson {
                sup_finite_consistent: r.flags.sup_finite_consistent,
                limsup_zero_consistent: r.flags.limsup_zero_consistent,
            },
            evaluations: r.evaluations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2pReportJson {
    pub p: f64,
    pub psi_s2p_norm: f64,
    pub first_order: CriterionReportJson,
    pub second_order: CriterionReportJson,
    pub bounded_consistent: bool,
}

impl From<&S2pBoundednessReport> for S2pReportJson {
    fn from(r: &S2pBoundednessReport) -> Self {
        S2pReportJson {
            p: r.p,
            psi_s2p_norm: r.psi_s2p_norm,
            first_order: (&r.first_order).into(),
            second_order: (&r.second_order).into(),
            bounded_consistent: r.bounded_consistent,
        }
    }
}

pub const TRACE_WEIGHTS: [&str; 3] = ["psi''", "2psi'phi' + psi phi''", "psi phi'^2"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceJson {
    pub weight: &'static str,
    #[serde(flatten)]
    pub report: CriterionReportJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReportJson {
    pub p: f64,
    pub traces: Vec<TraceJson>,
    pub compact_consistent: bool,
    pub p_caveat: bool,
}

impl From<&CompactnessReport> for CompactnessReportJson {
    fn from(r: &CompactnessReport) -> Self {
        CompactnessReportJson {
            p: r.p,
            traces: r
                .traces
                .iter()
                .zip(TRACE_WEIGHTS)
                .map(|(t, weight)| TraceJson {
                    weight,
                    report: t.into(),
                })
                .collect(),
            compact_consistent: r.compact_consistent,
            p_caveat: r.p_caveat,
        }
    }
}

/// `a_re,a_im,lambda` rows for every evaluated center.
pub fn samples_csv(samples: &[(Complex64, f64)]) -> String {
    let mut out = String::from("a_re,a_im,lambda\n");
    for (a, v) in samples {
        let _ = writeln!(out, "{},{},{}", a.re, a.im, v);
    }
    out
}

/// `weight,eps,kappa` rows for the three compactness traces.
pub fn traces_csv(report: &CompactnessReport) -> String {
    let mut out = String::from("weight,eps,kappa\n");
    for (t, name) in report.traces.iter().zip(TRACE_WEIGHTS) {
        for l in &t.levels {
            let _ = writeln!(out, "\"{}\",{},{}", name, l.eps, l.kappa);
        }
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
