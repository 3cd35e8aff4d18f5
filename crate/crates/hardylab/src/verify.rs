//! Verification suite over the case catalog and the seeded corpus.

use std::collections::BTreeMap;

use hardylab_core::carleson::{
    compactness_from_report, compactness_trace, composition_report, multiplication_report, s2p_boundedness_report,
    CompactnessReport, CriterionReport, S2pBoundednessReport,
};
use hardylab_core::operators::{default_test_family, second_derivative_expansion};
use hardylab_core::spaces::{default_growth_grid, growth_profile, hardy_growth_profile, hp_norm, s2p_norm, sp_norm};
use hardylab_core::{boundary_sup, AnalyticFunction, BoundaryGrid, NormParams, OperatorSpec, SelfMap, Space};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::catalog::{catalog, Case, Claim, Expectation, Symbols};
use crate::corpus::{full_corpus, parseval_corpus, random_corpus, CORPUS_SIZE};
use crate::golden::Golden;

pub type Result<T> = std::result::Result<T, hardylab_core::Error>;

/// Exponents used for the corpus-wide checks.
pub const CORPUS_EXPONENTS: [f64; 3] = [1.0, 2.0, 4.0];
/// Largest monomial power of the small and large test families.
const SMALL_FAMILY_POWER: usize = 8;
const LARGE_FAMILY_POWER: usize = 16;
/// Lower bounds may grow by at most this factor from the small to the large
/// test family for a bounded-consistent case.
const STABLE_GROWTH: f64 = 1.25;
/// Unbounded-consistent witness sequences must grow at least this much.
const WITNESS_GROWTH: f64 = 2.0;
/// Monomial probe length and decay threshold for compactness.
const PROBE_LENGTH: usize = 64;
const PROBE_DECAY: f64 = 0.05;
/// Level count for the specialization agreement checks.
const SPECIALIZATION_LEVELS: usize = 6;
/// Sufficiency ratios use the first few corpus functions on both sides.
const SUFFICIENCY_PAIRS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub samples: usize,
    pub degree: usize,
    pub levels: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            samples: hardylab_core::grid::DEFAULT_SAMPLES,
            degree: hardylab_core::series::DEFAULT_MAX_DEGREE,
            levels: hardylab_core::carleson::DEFAULT_LEVELS,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<&'static str>,
    pub claim: &'static str,
    pub measured: Map<String, Value>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl Section {
    fn new(name: &'static str, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        Section {
            name,
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    #[serde(flatten)]
    pub settings: Settings,
    pub corpus_size: usize,
    pub catalog_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub environment: Environment,
    pub summary: Summary,
    pub sections: Vec<Section>,
    pub unresolved: Vec<&'static str>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| s.checks.iter())
    }
}

pub const UNRESOLVED: [&str; 2] = [
    "Whether g ∈ S^p may be relaxed to g ∈ S_2^p for I_g is left open; only the g ∈ S^p characterization is tested.",
    "Compactness traces for p = 1 are reported with p_caveat = true; the characterization is only established for p > 1.",
];

const HP_TARGET: &str = "W: S_2^p → H^p is bounded iff ψ ∈ H^p";
const S2P_BOUNDED: &str =
    "W: S_2^p → S_2^p is bounded iff ψ ∈ S_2^p and the 2ψ'φ' + ψφ'' and ψφ'² Carleson sups are finite";
const COMPOSITION: &str = "C_φ on S_2^p is bounded iff the φ'' and φ'² Carleson sups are finite";
const MULTIPLICATION: &str = "M_ψ on S_2^p is bounded iff ψ ∈ S_2^p and the 2ψ' and ψ Carleson sups are finite";
const COMPACTNESS: &str =
    "W on S_2^p (p > 1) is compact iff the ψ'', 2ψ'φ' + ψφ'' and ψφ'² Carleson integrals vanish as |a| → 1";
const VOLTERRA: &str = "T_g on S_2^p is bounded iff g ∈ S_2^p, with ‖T_g 1‖ = ‖g‖ - |g(0)|";
const INTEGRAL: &str = "I_g on S_2^p is bounded iff g ∈ S^p, with ‖I_g z‖ = ‖g‖_{S^p}";
const SPACES: &str = "|f(z)|(1 - |z|²)^(1/p) <= ‖f‖_{H^p}; Parseval at p = 2; S_2^p ⊂ S^p ⊂ H^p";

fn measured(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn check(
    name: impl Into<String>,
    case: Option<&'static str>,
    claim: &'static str,
    tolerance: f64,
    passed: bool,
    values: Value,
) -> Check {
    Check {
        name: name.into(),
        case,
        claim,
        measured: measured(values),
        tolerance,
        passed,
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Expanded symbols of one catalog member.
pub enum Built {
    Weighted { phi: SelfMap, psi: AnalyticFunction },
    Volterra(AnalyticFunction),
    Integral(AnalyticFunction),
}

impl Built {
    pub fn new(sym: &Symbols, degree: usize, grid: &BoundaryGrid) -> Result<Self> {
        Ok(match sym {
            Symbols::Weighted { phi, psi } => Built::Weighted {
                phi: SelfMap::new(phi.expand(degree)?, grid)?,
                psi: psi.expand(degree)?,
            },
            Symbols::Volterra(g) => Built::Volterra(g.expand(degree)?),
            Symbols::Integral(g) => Built::Integral(g.expand(degree)?),
        })
    }

    pub fn operator(&self) -> OperatorSpec {
        match self {
            Built::Weighted { phi, psi } => OperatorSpec::WeightedComposition {
                phi: phi.clone(),
                psi: psi.clone(),
            },
            Built::Volterra(g) => OperatorSpec::Volterra(g.clone()),
            Built::Integral(g) => OperatorSpec::Integral(g.clone()),
        }
    }
}

/// `‖op f‖ / ‖f‖` in S_2^p for each member of the large test family, and
/// the maxima over the small and the large family.
pub struct LowerBounds {
    pub small: f64,
    pub large: f64,
}

pub fn s2p_lower_bounds(op: &OperatorSpec, p: f64, degree: usize, grid: &BoundaryGrid) -> Result<LowerBounds> {
    let family = default_test_family(p, LARGE_FAMILY_POWER, degree)?;
    let norm = NormParams::new(Space::S2p, p)?;
    let mut small = 0.0f64;
    let mut large = 0.0f64;
    for (i, f) in family.iter().enumerate() {
        let ratio = norm.norm(&op.apply(f)?, grid)? / norm.norm(f, grid)?;
        large = large.max(ratio);
        if i <= SMALL_FAMILY_POWER || i > LARGE_FAMILY_POWER {
            small = small.max(ratio);
        }
    }
    Ok(LowerBounds { small, large })
}

/// `‖W z^n‖_{S_2^p} / ‖z^n‖_{S_2^p}` for n = 1..=len.
pub fn monomial_probe(
    phi: &SelfMap,
    psi: &AnalyticFunction,
    p: f64,
    len: usize,
    grid: &BoundaryGrid,
) -> Result<Vec<f64>> {
    let mut power = phi.function().clone();
    let mut out = Vec::with_capacity(len);
    for n in 1..=len {
        let image = psi.multiply(&power);
        let norm_in = if n == 1 { 1.0 } else { (n * (n - 1)) as f64 };
        out.push(s2p_norm(&image, p, grid)? / norm_in);
        power = power.multiply(phi.function());
    }
    Ok(out)
}

fn report_json(r: &CriterionReport) -> Value {
    json!({
        "sup": r.sup_estimate,
        "final_kappa": r.final_kappa(),
        "sup_finite_consistent": r.flags.sup_finite_consistent,
        "limsup_zero_consistent": r.flags.limsup_zero_consistent,
    })
}

/// Fieldwise agreement of two reports and the largest numeric difference.
pub fn reports_agree(a: &S2pBoundednessReport, b: &S2pBoundednessReport, tol: f64) -> (bool, f64) {
    let mut worst = (a.psi_s2p_norm - b.psi_s2p_norm).abs();
    let mut same_flags = a.bounded_consistent == b.bounded_consistent;
    for (x, y) in [(&a.first_order, &b.first_order), (&a.second_order, &b.second_order)] {
        worst = worst.max((x.sup_estimate - y.sup_estimate).abs());
        worst = worst.max((x.argmax_a - y.argmax_a).norm());
        same_flags &= x.flags == y.flags && x.levels.len() == y.levels.len();
        for (l, m) in x.levels.iter().zip(&y.levels) {
            worst = worst.max((l.kappa - m.kappa).abs()).max((l.eps - m.eps).abs());
        }
    }
    (same_flags && worst <= tol, worst)
}

struct Context {
    settings: Settings,
    grid: BoundaryGrid,
    cases: Vec<Case>,
    random: Vec<AnalyticFunction>,
    random_sups: Vec<f64>,
}

impl Context {
    fn weighted_singles(&self) -> Vec<&Case> {
        self.cases
            .iter()
            .filter(|c| c.single().is_some_and(|s| matches!(s, Symbols::Weighted { .. })))
            .collect()
    }
}

/// Per-case results shared by several sections.
struct WeightedResult {
    name: &'static str,
    report: S2pBoundednessReport,
}

pub fn run(settings: Settings, golden: Option<&Golden>) -> Result<VerificationReport> {
    let grid = BoundaryGrid::new(settings.samples)?;
    let random = random_corpus(settings.seed);
    let random_sups = random.iter().map(|f| boundary_sup(f, &grid)).collect();
    let ctx = Context {
        settings,
        grid,
        cases: catalog(),
        random,
        random_sups,
    };

    let singles = ctx.weighted_singles();
    let reports: Vec<WeightedResult> = singles
        .par_iter()
        .map(|case| {
            let Built::Weighted { phi, psi } = Built::new(&case.members[0], ctx.settings.degree, &ctx.grid)? else {
                unreachable!("weighted singles only")
            };
            let report = s2p_boundedness_report(&phi, &psi, case.p, &ctx.grid, ctx.settings.levels)?;
            Ok(WeightedResult {
                name: case.name,
                report,
            })
        })
        .collect::<Result<_>>()?;
    let reports: BTreeMap<&str, &S2pBoundednessReport> = reports.iter().map(|r| (r.name, &r.report)).collect();

    let mut sections = vec![
        Section::new("hp_target", hp_target(&ctx)?),
        Section::new("s2p_boundedness", s2p_boundedness(&ctx, &reports)?),
        Section::new("composition", specialization(&ctx, &reports, Claim::Composition)?),
        Section::new("multiplication", specialization(&ctx, &reports, Claim::Multiplication)?),
        Section::new("compactness", compactness(&ctx, &reports)?),
        Section::new("integral_operators", integral_operators(&ctx)?),
        Section::new("spaces", spaces(&ctx)?),
    ];
    if let Some(g) = golden {
        sections.push(Section::new("regression", regression(&ctx, g)?));
    }
    let total: usize = sections.iter().map(|s| s.checks.len()).sum();
    let passed: usize = sections.iter().map(|s| s.passed).sum();
    Ok(VerificationReport {
        environment: Environment {
            settings,
            corpus_size: CORPUS_SIZE,
            catalog_size: ctx.cases.len(),
        },
        summary: Summary {
            checks: total,
            passed,
            failed: total - passed,
        },
        sections,
        unresolved: UNRESOLVED.to_vec(),
    })
}

fn hp_target(ctx: &Context) -> Result<Vec<Check>> {
    let per_case: Vec<Vec<Check>> = ctx
        .weighted_singles()
        .par_iter()
        .map(|case| {
            let built = Built::new(&case.members[0], ctx.settings.degree, &ctx.grid)?;
            let Built::Weighted { psi, .. } = &built else {
                unreachable!()
            };
            let op = built.operator();
            let p = case.p;
            let one = AnalyticFunction::monomial(0);
            let image = hp_norm(&op.apply(&one)?, p, &ctx.grid)?;
            let psi_norm = hp_norm(psi, p, &ctx.grid)?;
            let mut out = vec![check(
                "necessity_witness",
                Some(case.name),
                HP_TARGET,
                1e-9,
                close(image, psi_norm, 1e-9),
                json!({ "norm_w1": image, "norm_psi": psi_norm }),
            )];
            let mut worst = 0.0f64;
            for (f, sup) in ctx.random.iter().zip(&ctx.random_sups) {
                let lhs = hp_norm(&op.apply(f)?, p, &ctx.grid)?;
                let rhs = sup * psi_norm;
                if lhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                }
            }
            out.push(check(
                "sufficiency_over_corpus",
                Some(case.name),
                HP_TARGET,
                1e-9,
                worst <= 1.0 + 1e-9,
                json!({ "max_ratio": worst }),
            ));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

fn s2p_boundedness(ctx: &Context, reports: &BTreeMap<&str, &S2pBoundednessReport>) -> Result<Vec<Check>> {
    let cases: Vec<&Case> = ctx
        .cases
        .iter()
        .filter(|c| c.claims().contains(&Claim::S2pBoundedness))
        .collect();
    let per_case: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|case| match reports.get(case.name) {
            Some(report) => weighted_single_checks(ctx, case, report),
            None => weighted_family_checks(ctx, case),
        })
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

fn weighted_single_checks(ctx: &Context, case: &Case, report: &S2pBoundednessReport) -> Result<Vec<Check>> {
    let built = Built::new(&case.members[0], ctx.settings.degree, &ctx.grid)?;
    let Built::Weighted { phi, psi } = &built else {
        unreachable!()
    };
    let op = built.operator();
    let (p, grid, name) = (case.p, &ctx.grid, Some(case.name));
    let mut out = Vec::new();

    let w1 = s2p_norm(&op.apply(&AnalyticFunction::monomial(0))?, p, grid)?;
    let psi_norm = s2p_norm(psi, p, grid)?;
    out.push(check(
        "necessity_f1",
        name,
        S2P_BOUNDED,
        1e-9,
        close(w1, psi_norm, 1e-9),
        json!({ "norm_w1": w1, "norm_psi": psi_norm }),
    ));

    let wz = op.apply(&AnalyticFunction::monomial(1))?;
    let wz_norm = s2p_norm(&wz, p, grid)?;
    let direct = wz.derivative().derivative();
    let expanded = second_derivative_expansion(phi, psi, &AnalyticFunction::monomial(1)).sum();
    // The top coefficients of ψφ are lost to truncation before differentiating.
    let exact = ctx.settings.degree.saturating_sub(3);
    let (direct, expanded) = (direct.truncated(exact), expanded.truncated(exact));
    let scale = direct.max_coeff_abs().max(1.0);
    let residual = direct.max_coeff_diff(&expanded) / scale;
    out.push(check(
        "necessity_fz",
        name,
        S2P_BOUNDED,
        1e-10,
        wz_norm.is_finite() && residual <= 1e-10,
        json!({ "norm_psi_phi": wz_norm, "expansion_residual": residual }),
    ));

    let weight2 = psi.multiply(&phi.function().derivative().multiply(&phi.function().derivative()));
    let w2_norm = hp_norm(&weight2, p, grid)?;
    out.push(check(
        "necessity_fz2",
        name,
        S2P_BOUNDED,
        0.0,
        w2_norm.is_finite(),
        json!({ "hp_norm_psi_phi_prime_sq": w2_norm }),
    ));

    out.push(check(
        "criterion_flags",
        name,
        S2P_BOUNDED,
        0.0,
        report.bounded_consistent == case.expected.bounded(),
        json!({
            "psi_s2p_norm": report.psi_s2p_norm,
            "first_order": report_json(&report.first_order),
            "second_order": report_json(&report.second_order),
            "bounded_consistent": report.bounded_consistent,
            "expected": case.expected,
        }),
    ));

    let lb = s2p_lower_bounds(&op, p, ctx.settings.degree, grid)?;
    out.push(check(
        "lower_bound_stability",
        name,
        S2P_BOUNDED,
        STABLE_GROWTH,
        lb.large <= STABLE_GROWTH * lb.small,
        json!({ "small_family": lb.small, "large_family": lb.large }),
    ));
    Ok(out)
}

/// Witness growth for a degenerating family.
fn weighted_family_checks(ctx: &Context, case: &Case) -> Result<Vec<Check>> {
    let (p, grid, name) = (case.p, &ctx.grid, Some(case.name));
    let mut bounds = Vec::new();
    let mut psi_norms = Vec::new();
    for member in &case.members {
        let built = Built::new(member, ctx.settings.degree, grid)?;
        let Built::Weighted { psi, .. } = &built else {
            unreachable!()
        };
        bounds.push(s2p_lower_bounds(&built.operator(), p, ctx.settings.degree, grid)?.large);
        psi_norms.push(s2p_norm(psi, p, grid)?);
    }
    Ok(family_growth_checks(
        name,
        S2P_BOUNDED,
        case.expected,
        &bounds,
        vec![("psi_s2p_norm", psi_norms)],
    ))
}

fn family_growth_checks(
    name: Option<&'static str>,
    claim: &'static str,
    expected: Expectation,
    bounds: &[f64],
    diverging: Vec<(&'static str, Vec<f64>)>,
) -> Vec<Check> {
    let growth = bounds[bounds.len() - 1] / bounds[0];
    let growing = strictly_increasing(bounds) && growth >= WITNESS_GROWTH;
    let mut out = vec![check(
        "witness_growth",
        name,
        claim,
        WITNESS_GROWTH,
        growing == (expected == Expectation::UnboundedConsistent),
        json!({ "lower_bounds": bounds, "growth": growth }),
    )];
    let mut values = Map::new();
    let mut consistent = true;
    for (label, v) in diverging {
        consistent &= strictly_increasing(&v);
        values.insert(label.into(), json!(v));
    }
    out.push(check(
        "criteria_follow_witness",
        name,
        claim,
        0.0,
        consistent,
        Value::Object(values),
    ));
    out
}

fn specialization(ctx: &Context, reports: &BTreeMap<&str, &S2pBoundednessReport>, claim: Claim) -> Result<Vec<Check>> {
    let text = if claim == Claim::Composition {
        COMPOSITION
    } else {
        MULTIPLICATION
    };
    let cases: Vec<&Case> = ctx.cases.iter().filter(|c| c.claims().contains(&claim)).collect();
    let levels = ctx.settings.levels.min(SPECIALIZATION_LEVELS);
    let per_case: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|case| {
            let name = Some(case.name);
            let Some(report) = reports.get(case.name) else {
                // Degenerating family: the S_2^p norm of the symbol must diverge.
                let mut norms = Vec::new();
                for m in &case.members {
                    let Built::Weighted { psi, .. } = Built::new(m, ctx.settings.degree, &ctx.grid)? else {
                        unreachable!()
                    };
                    norms.push(s2p_norm(&psi, case.p, &ctx.grid)?);
                }
                let growth = norms[norms.len() - 1] / norms[0];
                return Ok(vec![check(
                    "symbol_norm_growth",
                    name,
                    text,
                    WITNESS_GROWTH,
                    strictly_increasing(&norms) && growth >= WITNESS_GROWTH,
                    json!({ "psi_s2p_norms": norms, "growth": growth }),
                )]);
            };
            let Built::Weighted { phi, psi } = Built::new(&case.members[0], ctx.settings.degree, &ctx.grid)? else {
                unreachable!()
            };
            let general = s2p_boundedness_report(&phi, &psi, case.p, &ctx.grid, levels)?;
            let special = if claim == Claim::Composition {
                composition_report(&phi, case.p, &ctx.grid, levels)?
            } else {
                multiplication_report(&psi, case.p, &ctx.grid, levels)?
            };
            let (agree, worst) = reports_agree(&general, &special, 1e-12);
            Ok(vec![
                check(
                    "specialization_agreement",
                    name,
                    text,
                    1e-12,
                    agree,
                    json!({ "max_difference": worst, "levels": levels }),
                ),
                check(
                    "specialized_conditions",
                    name,
                    text,
                    0.0,
                    report.bounded_consistent == case.expected.bounded(),
                    json!({
                        "first_weight": report_json(&report.first_order),
                        "second_weight": report_json(&report.second_order),
                        "psi_s2p_norm": report.psi_s2p_norm,
                    }),
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// Compactness trace and monomial probe for one weighted operator.
pub struct CompactnessEvidence {
    pub trace: CompactnessReport,
    pub probe: Vec<f64>,
}

impl CompactnessEvidence {
    pub fn compute(phi: &SelfMap, psi: &AnalyticFunction, p: f64, grid: &BoundaryGrid, levels: usize) -> Result<Self> {
        Ok(CompactnessEvidence {
            trace: compactness_trace(phi, psi, p, grid, levels)?,
            probe: monomial_probe(phi, psi, p, PROBE_LENGTH, grid)?,
        })
    }

    /// As [`compute`](Self::compute), reusing the sups of an existing report.
    pub fn from_report(
        phi: &SelfMap,
        psi: &AnalyticFunction,
        report: &S2pBoundednessReport,
        grid: &BoundaryGrid,
        levels: usize,
    ) -> Result<Self> {
        Ok(CompactnessEvidence {
            trace: compactness_from_report(phi, psi, report, grid, levels)?,
            probe: monomial_probe(phi, psi, report.p, PROBE_LENGTH, grid)?,
        })
    }

    /// Final probe ratio below `PROBE_DECAY` times the first one.
    pub fn probe_decays(&self) -> bool {
        let (first, last) = (self.probe[0], self.probe[self.probe.len() - 1]);
        last == 0.0 || last < PROBE_DECAY * first
    }
}

fn compactness(ctx: &Context, reports: &BTreeMap<&str, &S2pBoundednessReport>) -> Result<Vec<Check>> {
    let cases: Vec<&Case> = ctx
        .cases
        .iter()
        .filter(|c| c.claims().contains(&Claim::Compactness))
        .collect();
    let per_case: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|case| {
            let Built::Weighted { phi, psi } = Built::new(&case.members[0], ctx.settings.degree, &ctx.grid)? else {
                unreachable!()
            };
            let ev = CompactnessEvidence::from_report(&phi, &psi, reports[case.name], &ctx.grid, ctx.settings.levels)?;
            let compact = case.expected == Expectation::CompactConsistent;
            let finals: Vec<f64> = ev.trace.traces.iter().map(|t| t.final_kappa()).collect();
            let peaks: Vec<f64> = ev.trace.traces.iter().map(|t| t.kappas().fold(0.0, f64::max)).collect();
            let name = Some(case.name);
            Ok(vec![
                check(
                    "limsup_traces",
                    name,
                    COMPACTNESS,
                    0.0,
                    ev.trace.compact_consistent == compact,
                    json!({
                        "final_kappas": finals,
                        "peak_kappas": peaks,
                        "compact_consistent": ev.trace.compact_consistent,
                        "p_caveat": ev.trace.p_caveat,
                        "expected": case.expected,
                    }),
                ),
                check(
                    "monomial_probe",
                    name,
                    COMPACTNESS,
                    PROBE_DECAY,
                    ev.probe_decays() == compact,
                    json!({ "first_ratio": ev.probe[0], "last_ratio": ev.probe[ev.probe.len() - 1] }),
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// Worst deviations of the exact identities over the random corpus.
pub struct IdentityDeviation {
    pub volterra: f64,
    pub integral: f64,
}

pub fn integral_identity_deviation(
    corpus: &[AnalyticFunction],
    p: f64,
    grid: &BoundaryGrid,
) -> Result<IdentityDeviation> {
    let one = AnalyticFunction::monomial(0);
    let z = AnalyticFunction::monomial(1);
    let mut dev = IdentityDeviation {
        volterra: 0.0,
        integral: 0.0,
    };
    for g in corpus {
        let t = s2p_norm(&OperatorSpec::Volterra(g.clone()).apply(&one)?, p, grid)?;
        dev.volterra = dev
            .volterra
            .max((t - (s2p_norm(g, p, grid)? - g.coeff(0).norm())).abs());
        let i = s2p_norm(&OperatorSpec::Integral(g.clone()).apply(&z)?, p, grid)?;
        dev.integral = dev.integral.max((i - sp_norm(g, p, grid)?).abs());
    }
    Ok(dev)
}

/// `max ‖T_g f‖_{S_2^p} / (‖g‖_{S_2^p} ‖f‖_{S_2^p})` over pairs of corpus functions.
pub fn volterra_sufficiency_ratio(corpus: &[AnalyticFunction], p: f64, grid: &BoundaryGrid) -> Result<f64> {
    let n = corpus.len().min(SUFFICIENCY_PAIRS);
    let norms: Vec<f64> = corpus[..n]
        .iter()
        .map(|f| s2p_norm(f, p, grid))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (g, ng) in corpus[..n].iter().zip(&norms) {
        let op = OperatorSpec::Volterra(g.clone());
        for (f, nf) in corpus[..n].iter().zip(&norms) {
            worst = worst.max(s2p_norm(&op.apply(f)?, p, grid)? / (ng * nf));
        }
    }
    Ok(worst)
}

fn integral_operators(ctx: &Context) -> Result<Vec<Check>> {
    let grid = &ctx.grid;
    let mut out = Vec::new();
    for p in CORPUS_EXPONENTS {
        let dev = integral_identity_deviation(&ctx.random, p, grid)?;
        out.push(check(
            format!("volterra_identity_p{p}"),
            None,
            VOLTERRA,
            1e-9,
            dev.volterra <= 1e-9,
            json!({ "max_deviation": dev.volterra }),
        ));
        out.push(check(
            format!("integral_identity_p{p}"),
            None,
            INTEGRAL,
            1e-9,
            dev.integral <= 1e-9,
            json!({ "max_deviation": dev.integral }),
        ));
    }

    let cases: Vec<&Case> = ctx
        .cases
        .iter()
        .filter(|c| {
            c.claims()
                .iter()
                .any(|k| matches!(k, Claim::Volterra | Claim::Integral))
        })
        .collect();
    let per_case: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|case| {
            let claim = if case.claims().contains(&Claim::Volterra) {
                VOLTERRA
            } else {
                INTEGRAL
            };
            let name = Some(case.name);
            if case.is_family() {
                let mut bounds = Vec::new();
                let mut symbol = Vec::new();
                for m in &case.members {
                    let built = Built::new(m, ctx.settings.degree, grid)?;
                    bounds.push(s2p_lower_bounds(&built.operator(), case.p, ctx.settings.degree, grid)?.large);
                    symbol.push(match &built {
                        Built::Volterra(g) => s2p_norm(g, case.p, grid)?,
                        Built::Integral(g) => sp_norm(g, case.p, grid)?,
                        Built::Weighted { .. } => unreachable!(),
                    });
                }
                let label = if claim == VOLTERRA { "g_s2p_norm" } else { "g_sp_norm" };
                return Ok(family_growth_checks(
                    name,
                    claim,
                    case.expected,
                    &bounds,
                    vec![(label, symbol)],
                ));
            }
            let built = Built::new(&case.members[0], ctx.settings.degree, grid)?;
            let lb = s2p_lower_bounds(&built.operator(), case.p, ctx.settings.degree, grid)?;
            Ok(vec![check(
                "lower_bound_stability",
                name,
                claim,
                STABLE_GROWTH,
                lb.large <= STABLE_GROWTH * lb.small,
                json!({ "small_family": lb.small, "large_family": lb.large }),
            )])
        })
        .collect::<Result<_>>()?;
    out.extend(per_case.into_iter().flatten());

    for p in CORPUS_EXPONENTS {
        let ratio = volterra_sufficiency_ratio(&ctx.random, p, grid)?;
        out.push(check(
            format!("volterra_sufficiency_ratio_p{p}"),
            None,
            VOLTERRA,
            0.0,
            ratio.is_finite(),
            json!({ "max_ratio": ratio }),
        ));
    }
    Ok(out)
}

/// Corpus maxima reported as measured constants, keyed by name.
pub fn corpus_constants(settings: &Settings) -> Result<BTreeMap<String, f64>> {
    let grid = BoundaryGrid::new(settings.samples)?;
    // The random polynomials come first in the full corpus.
    let corpus = full_corpus(settings.seed, settings.degree);
    let z_grid = default_growth_grid();
    let per_p: Vec<Vec<(String, f64)>> = CORPUS_EXPONENTS
        .par_iter()
        .map(|&p| {
            // [sp/s2p, hp/sp, growth k = 1, growth k = 2] over the full and the random corpus.
            let mut full = [0.0f64; 4];
            let mut random = [0.0f64; 4];
            for (i, f) in corpus.iter().enumerate() {
                let (h, s, s2) = (hp_norm(f, p, &grid)?, sp_norm(f, p, &grid)?, s2p_norm(f, p, &grid)?);
                let ratios = [
                    s / s2,
                    h / s,
                    growth_profile(f, p, 1, &z_grid, &grid)?.max_ratio,
                    growth_profile(f, p, 2, &z_grid, &grid)?.max_ratio,
                ];
                for j in 0..4 {
                    full[j] = full[j].max(ratios[j]);
                    if i < CORPUS_SIZE {
                        random[j] = random[j].max(ratios[j]);
                    }
                }
            }
            let t = volterra_sufficiency_ratio(&corpus[..CORPUS_SIZE], p, &grid)?;
            let mut out = vec![(format!("volterra.sufficiency.p{p}"), t)];
            for (label, m) in [("full", full), ("random", random)] {
                out.push((format!("growth.k1.{label}.p{p}"), m[2]));
                out.push((format!("growth.k2.{label}.p{p}"), m[3]));
                out.push((format!("inclusion.hp_over_sp.{label}.p{p}"), m[1]));
                out.push((format!("inclusion.sp_over_s2p.{label}.p{p}"), m[0]));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_p.into_iter().flatten().collect())
}

/// Relative tolerance for a corpus constant.
pub fn constant_tolerance(key: &str) -> f64 {
    if key.starts_with("growth.") {
        1e-6
    } else {
        1e-8
    }
}

fn spaces(ctx: &Context) -> Result<Vec<Check>> {
    let grid = &ctx.grid;
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for f in parseval_corpus(ctx.settings.seed) {
        let n = hp_norm(&f, 2.0, grid)?;
        let direct: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        worst = worst.max((n * n - direct).abs() / direct);
    }
    out.push(check(
        "parseval",
        None,
        SPACES,
        1e-10,
        worst <= 1e-10,
        json!({ "max_relative_deviation": worst }),
    ));

    let corpus = full_corpus(ctx.settings.seed, ctx.settings.degree);
    let z_grid = default_growth_grid();
    for p in CORPUS_EXPONENTS {
        let mut ratio = 0.0f64;
        for f in &corpus {
            ratio = ratio.max(hardy_growth_profile(f, p, &z_grid, grid)?.max_ratio);
        }
        out.push(check(
            format!("hardy_growth_bound_p{p}"),
            None,
            SPACES,
            1e-9,
            ratio <= 1.0 + 1e-9,
            json!({ "max_ratio": ratio }),
        ));
    }

    for (key, value) in corpus_constants(&ctx.settings)? {
        if key.starts_with("volterra.") {
            continue;
        }
        out.push(check(
            format!("corpus_constant.{key}"),
            None,
            SPACES,
            0.0,
            value.is_finite(),
            json!({ "value": value }),
        ));
    }
    Ok(out)
}

fn regression(ctx: &Context, golden: &Golden) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let settings_match = golden.seed == ctx.settings.seed
        && golden.samples == ctx.settings.samples
        && golden.degree == ctx.settings.degree;
    out.push(check(
        "baseline_settings",
        None,
        SPACES,
        0.0,
        settings_match,
        json!({ "seed": golden.seed, "samples": golden.samples, "degree": golden.degree }),
    ));
    let current = corpus_constants(&ctx.settings)?;
    for (key, entry) in &golden.values {
        let value = current.get(key).copied();
        let passed = value.is_some_and(|v| close(v, entry.value, entry.tolerance));
        out.push(check(
            format!("baseline.{key}"),
            None,
            SPACES,
            entry.tolerance,
            passed,
            json!({ "value": value, "baseline": entry.value }),
        ));
    }
    Ok(out)
}
