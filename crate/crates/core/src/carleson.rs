//! Carleson-type criterion functionals
//!
//! ```text
//! Λ(a) = ∫_{∂D} ((1-|a|²) / |1 - conj(a) φ(w)|²)^(q/p) |u(w)|^q dσ(w)
//! ```
//!
//! for a self-map `φ` and a weight `u`, plus searches for their sup over the
//! disc and their radial decay towards the boundary.
//!
//! The integrand has a peak of angular width about `dist(a, φ(∂D)) / |φ'|`.
//! While that width is resolved by the boundary grid the trapezoidal rule is
//! used (spectrally accurate for smooth periodic integrands). Otherwise the
//! circle is split into Gauss–Legendre panels that are bisected near the peak
//! until every panel is shorter than the local distance to the nearest
//! complex singularity of the kernel.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, SelfMap};
use crate::numeric::{gauss_legendre, golden_section_max, pairwise_sum};
use crate::operators::{first_order_weight, second_order_weight};
use crate::series::AnalyticFunction;
use crate::spaces::{check_exponent, s2p_norm};

/// Default number of radial levels `|a| = 1 - 2^(-k)`.
pub const DEFAULT_LEVELS: usize = 12;
/// Angular samples per level are `ceil(BASE / ε)` ...
pub const BASE_ANGULAR_SAMPLES: usize = 64;
/// ... capped at this count.
pub const MAX_ANGULAR_SAMPLES: usize = 8192;
/// Peak half-widths (in nodes, times 2π) below which the trapezoidal rule
/// is abandoned: the rule error behaves like `exp(-M · width)`.
const RESOLVED_WIDTH: f64 = 40.0;
const GL_ORDER: usize = 16;
const COARSE_STRIDE: usize = 8;
const MAX_PANEL_DEPTH: usize = 48;
const MAX_CACHED_DEPTH: usize = 12;
/// Decay factor per halving of ε accepted as evidence of a vanishing limsup.
const LIMSUP_STEP_RATIO: f64 = 0.6;
const LIMSUP_RELATIVE_FLOOR: f64 = 1e-3;

/// Self-map, weight and exponents of a criterion functional.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSpec {
    phi: SelfMap,
    weight: AnalyticFunction,
    p: f64,
    q: f64,
}

impl CriterionSpec {
    pub fn new(phi: SelfMap, weight: AnalyticFunction, p: f64, q: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(q.is_finite() && q >= p) {
            return Err(Error::ExponentOrder { p, q });
        }
        Ok(CriterionSpec { phi, weight, p, q })
    }

    pub fn phi(&self) -> &SelfMap {
        &self.phi
    }

    pub fn weight(&self) -> &AnalyticFunction {
        &self.weight
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Samples of `φ`, `|φ'|²` and `c |u|^q` at a set of boundary angles, where
/// `c` is the quadrature weight of the node.
#[derive(Debug, Clone, Default)]
struct NodeData {
    phi_re: Vec<f64>,
    phi_im: Vec<f64>,
    dphi_sq: Vec<f64>,
    weight_q: Vec<f64>,
}

impl NodeData {
    fn with_capacity(n: usize) -> Self {
        NodeData {
            phi_re: Vec::with_capacity(n),
            phi_im: Vec::with_capacity(n),
            dphi_sq: Vec::with_capacity(n),
            weight_q: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, spec: &CriterionSpec, theta: f64, quad_weight: f64) {
        let w = Complex64::from_polar(1.0, theta);
        let (v, dv) = spec.phi.function().eval_with_derivative(w);
        let u = spec.weight.eval(w).norm();
        self.phi_re.push(v.re);
        self.phi_im.push(v.im);
        self.dphi_sq.push(dv.norm_sqr());
        self.weight_q.push(quad_weight * pow_q(u, spec.q));
    }

    /// One Gauss–Legendre panel.
    fn push_panel(&mut self, spec: &CriterionSpec, theta: &[f64; GL_ORDER], quad_weight: &[f64; GL_ORDER]) {
        let w: [Complex64; GL_ORDER] = core::array::from_fn(|l| Complex64::from_polar(1.0, theta[l]));
        let (v, dv) = spec.phi.function().eval_with_derivative_many(&w);
        let u = spec.weight.eval_many(&w);
        for l in 0..GL_ORDER {
            self.phi_re.push(v[l].re);
            self.phi_im.push(v[l].im);
            self.dphi_sq.push(dv[l].norm_sqr());
            self.weight_q.push(quad_weight[l] * pow_q(u[l].norm(), spec.q));
        }
    }

    fn clear(&mut self) {
        self.phi_re.clear();
        self.phi_im.clear();
        self.dphi_sq.clear();
        self.weight_q.clear();
    }

    fn len(&self) -> usize {
        self.phi_re.len()
    }
}

#[inline]
fn pow_q(u: f64, q: f64) -> f64 {
    if q == 2.0 {
        u * u
    } else if q == 1.0 {
        u
    } else {
        u.powf(q)
    }
}

/// `Σ_j K(a, φ_j)^ratio c_j |u_j|^q` over `range`, or `None` if some node has
/// `|1 - ā φ_j|² < threshold |φ'_j|²`.
#[inline(always)]
fn node_sum<K: Fn(f64) -> f64>(
    d: &NodeData,
    range: core::ops::Range<usize>,
    a: Complex64,
    threshold: f64,
    kernel: K,
) -> Option<f64> {
    let num = 1.0 - a.norm_sqr();
    let re = &d.phi_re[range.clone()];
    let im = &d.phi_im[range.clone()];
    let dp = &d.dphi_sq[range.clone()];
    let wq = &d.weight_q[range];
    let term = |x: f64, y: f64, p: f64, w: f64, bad: &mut bool| {
        let d_re = 1.0 - (a.re * x + a.im * y);
        let d_im = a.im * x - a.re * y;
        let gap = d_re * d_re + d_im * d_im;
        *bad |= gap < threshold * p;
        kernel(num / gap) * w
    };
    let mut acc = [0.0f64; 4];
    let mut bad = [false; 4];
    let chunks = re
        .chunks_exact(4)
        .zip(im.chunks_exact(4))
        .zip(dp.chunks_exact(4))
        .zip(wq.chunks_exact(4));
    for (((x, y), p), w) in chunks {
        for l in 0..4 {
            acc[l] += term(x[l], y[l], p[l], w[l], &mut bad[l]);
        }
    }
    let full = re.len() - re.len() % 4;
    for j in full..re.len() {
        acc[0] += term(re[j], im[j], dp[j], wq[j], &mut bad[0]);
    }
    if bad.iter().any(|&b| b) {
        None
    } else {
        Some((acc[0] + acc[1]) + (acc[2] + acc[3]))
    }
}

/// Precomputed boundary data for repeated evaluation of `Λ(a)` on one grid.
#[derive(Debug, Clone)]
pub struct CriterionEvaluator<'a> {
    spec: &'a CriterionSpec,
    ratio: f64,
    zero_weight: bool,
    trapezoid: NodeData,
    panel_len: f64,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
    panels: NodeData,
    refined: RefCell<PanelCache>,
}

impl<'a> CriterionEvaluator<'a> {
    pub fn new(spec: &'a CriterionSpec, grid: &BoundaryGrid) -> Self {
        let m = grid.len();
        let zero_weight = spec.weight.is_zero();
        let mut trapezoid = NodeData::with_capacity(m);
        let (gl_nodes, gl_weights) = gauss_legendre(GL_ORDER);
        let n_panels = (m / GL_ORDER).max(1);
        let panel_len = 2.0 * PI / n_panels as f64;
        let mut panels = NodeData::with_capacity(n_panels * GL_ORDER);
        if !zero_weight {
            for j in 0..m {
                trapezoid.push(spec, grid.angle(j), grid.weight());
            }
            for k in 0..n_panels {
                let (theta, quad) = panel_nodes(&gl_nodes, &gl_weights, k as f64 * panel_len, panel_len);
                panels.push_panel(spec, &theta, &quad);
            }
        }
        CriterionEvaluator {
            spec,
            ratio: spec.q / spec.p,
            zero_weight,
            trapezoid,
            panel_len,
            gl_nodes,
            gl_weights,
            panels,
            refined: RefCell::new(PanelCache::default()),
        }
    }

    pub fn spec(&self) -> &CriterionSpec {
        self.spec
    }

    /// `Λ(a)` for `|a| < 1`.
    pub fn value(&self, a: Complex64) -> Result<f64> {
        let modulus = a.norm();
        if !(modulus < 1.0) {
            return Err(Error::CenterOutsideOpenDisc { modulus });
        }
        Ok(self.value_unchecked(a))
    }

    fn value_unchecked(&self, a: Complex64) -> f64 {
        if self.zero_weight {
            return 0.0;
        }
        let m = self.trapezoid.len();
        let threshold = (RESOLVED_WIDTH / m as f64).powi(2) * a.norm_sqr();
        if !self.coarse_resolved(a, threshold) {
            return self.panel_rule(a);
        }
        match self.trapezoid_rule(a, threshold) {
            Some(v) => v,
            None => self.panel_rule(a),
        }
    }

    fn sum(&self, d: &NodeData, range: core::ops::Range<usize>, a: Complex64, threshold: f64) -> Option<f64> {
        if self.ratio == 1.0 {
            node_sum(d, range, a, threshold, |k| k)
        } else {
            let r = self.ratio;
            node_sum(d, range, a, threshold, |k| k.powf(r))
        }
    }

    /// Resolution test on every `COARSE_STRIDE`-th node only.
    fn coarse_resolved(&self, a: Complex64, threshold: f64) -> bool {
        let d = &self.trapezoid;
        (0..d.len()).step_by(COARSE_STRIDE).all(|j| {
            let (re, im) = (d.phi_re[j], d.phi_im[j]);
            let d_re = 1.0 - (a.re * re + a.im * im);
            let d_im = a.im * re - a.re * im;
            d_re * d_re + d_im * d_im >= threshold * d.dphi_sq[j]
        })
    }

    /// Trapezoidal rule on the uniform nodes, or `None` when some node lies
    /// within `sqrt(threshold / |φ'|²)` of a kernel singularity.
    fn trapezoid_rule(&self, a: Complex64, threshold: f64) -> Option<f64> {
        const BLOCK: usize = 256;
        let m = self.trapezoid.len();
        let mut blocks = Vec::with_capacity(m / BLOCK + 1);
        for start in (0..m).step_by(BLOCK) {
            blocks.push(self.sum(&self.trapezoid, start..(start + BLOCK).min(m), a, threshold)?);
        }
        Some(pairwise_sum(&blocks))
    }

    /// Composite Gauss–Legendre rule, bisecting every panel that is longer
    /// than the distance from its nodes to the nearest kernel singularity.
    /// Panel `(depth, i)` covers `[i, i + 1] · panel_len / 2^depth`.
    fn panel_rule(&self, a: Complex64) -> f64 {
        let a2 = a.norm_sqr();
        let n_panels = self.panels.len() / GL_ORDER;
        let mut contributions = Vec::with_capacity(n_panels + 4 * MAX_PANEL_DEPTH);
        let mut stack: Vec<(usize, u64)> = Vec::new();
        let base = self.panel_len * self.panel_len * a2;
        for k in 0..n_panels {
            match self.sum(&self.panels, k * GL_ORDER..(k + 1) * GL_ORDER, a, base) {
                Some(v) => contributions.push(v),
                None => {
                    stack.push((1, 2 * k as u64 + 1));
                    stack.push((1, 2 * k as u64));
                }
            }
        }
        let mut scratch = NodeData::with_capacity(GL_ORDER);
        let mut cache = self.refined.borrow_mut();
        while let Some((depth, index)) = stack.pop() {
            let len = self.panel_len / (1u64 << depth) as f64;
            let threshold = if depth >= MAX_PANEL_DEPTH { 0.0 } else { len * len * a2 };
            let value = if depth <= MAX_CACHED_DEPTH {
                let slot = match cache.offsets.get(&(depth, index)) {
                    Some(&slot) => slot,
                    None => {
                        let slot = cache.nodes.len();
                        self.fill_panel(&mut cache.nodes, index as f64 * len, len);
                        cache.offsets.insert((depth, index), slot);
                        slot
                    }
                };
                self.sum(&cache.nodes, slot..slot + GL_ORDER, a, threshold)
            } else {
                scratch.clear();
                self.fill_panel(&mut scratch, index as f64 * len, len);
                self.sum(&scratch, 0..GL_ORDER, a, threshold)
            };
            match value {
                Some(v) => contributions.push(v),
                None => {
                    stack.push((depth + 1, 2 * index + 1));
                    stack.push((depth + 1, 2 * index));
                }
            }
        }
        pairwise_sum(&contributions)
    }

    fn fill_panel(&self, out: &mut NodeData, lo: f64, len: f64) {
        let (theta, quad) = panel_nodes(&self.gl_nodes, &self.gl_weights, lo, len);
        out.push_panel(self.spec, &theta, &quad);
    }
}

/// Angles and normalized quadrature weights of the panel `[lo, lo + len]`.
fn panel_nodes(nodes: &[f64], weights: &[f64], lo: f64, len: f64) -> ([f64; GL_ORDER], [f64; GL_ORDER]) {
    (
        core::array::from_fn(|l| lo + 0.5 * len * (1.0 + nodes[l])),
        core::array::from_fn(|l| weights[l] * len / (4.0 * PI)),
    )
}

/// Node data of refined panels, shared between evaluations.
#[derive(Debug, Clone, Default)]
struct PanelCache {
    offsets: BTreeMap<(usize, u64), usize>,
    nodes: NodeData,
}

/// `Λ(a)` for a single center.
pub fn criterion_value(spec: &CriterionSpec, a: Complex64, grid: &BoundaryGrid) -> Result<f64> {
    CriterionEvaluator::new(spec, grid).value(a)
}

/// Maximum of `Λ` over one radial level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelMax {
    /// `1 - |a|` for this level.
    pub eps: f64,
    pub kappa: f64,
    pub argmax: Complex64,
}

/// Heuristic readings of a finite set of samples; never a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriterionFlags {
    /// The last three level maxima are non-increasing, or stay within twice
    /// the maximum over the earlier levels.
    pub sup_finite_consistent: bool,
    /// The level maxima strictly decrease over the last four levels and
    /// either end below 1e-3 of the peak or shrink by a factor of at least
    /// 0.6 per halving of ε (or the trace is identically zero).
    pub limsup_zero_consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub sup_estimate: f64,
    pub argmax_a: Complex64,
    /// Level maxima with strictly decreasing `eps`.
    pub levels: Vec<LevelMax>,
    /// Every evaluated `(a, Λ(a))` when requested.
    pub samples: Option<Vec<(Complex64, f64)>>,
    pub flags: CriterionFlags,
    pub evaluations: usize,
}

impl CriterionReport {
    pub fn kappas(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.kappa)
    }

    pub fn final_kappa(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.kappa)
    }
}

/// Number of angular samples on the level `|a| = 1 - eps`.
pub fn angular_samples(eps: f64) -> usize {
    let n = (BASE_ANGULAR_SAMPLES as f64 / eps).ceil() as usize;
    n.min(MAX_ANGULAR_SAMPLES)
}

/// Radial level search for `sup_a Λ(a)` with golden-section polish around the
/// best point.
pub fn criterion_sup(
    spec: &CriterionSpec,
    levels: usize,
    grid: &BoundaryGrid,
    keep_samples: bool,
) -> Result<CriterionReport> {
    if levels == 0 {
        return Err(Error::NoLevels);
    }
    let eval = CriterionEvaluator::new(spec, grid);
    let mut samples = if keep_samples { Some(Vec::new()) } else { None };
    let mut level_max = Vec::with_capacity(levels);
    let mut counts = Vec::with_capacity(levels);
    let mut evaluations = 0usize;
    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0), 0usize);
    for k in 0..levels {
        let eps = 0.5f64.powi(k as i32);
        let r = 1.0 - eps;
        let n = if r == 0.0 { 1 } else { angular_samples(eps) };
        counts.push(n);
        let mut lm = LevelMax {
            eps,
            kappa: f64::NEG_INFINITY,
            argmax: Complex64::new(0.0, 0.0),
        };
        for m in 0..n {
            let a = Complex64::from_polar(r, 2.0 * PI * m as f64 / n as f64);
            let v = eval.value_unchecked(a);
            evaluations += 1;
            if let Some(s) = samples.as_mut() {
                s.push((a, v));
            }
            if v > lm.kappa {
                lm.kappa = v;
                lm.argmax = a;
            }
        }
        if lm.kappa > best.0 {
            best = (lm.kappa, lm.argmax, k);
        }
        level_max.push(lm);
    }

    // Angular polish on the best level.
    let (_, best_a, best_k) = best;
    let r = 1.0 - level_max[best_k].eps;
    if r > 0.0 {
        let theta = best_a.arg();
        let h = 2.0 * PI / counts[best_k] as f64;
        let mut record = |a: Complex64, v: f64| {
            if let Some(s) = samples.as_mut() {
                s.push((a, v));
            }
        };
        let (t, v) = golden_section_max(
            |t| {
                let a = Complex64::from_polar(r, t);
                let v = eval.value_unchecked(a);
                evaluations += 1;
                record(a, v);
                v
            },
            theta - h,
            theta + h,
            1e-10 * (1.0 - r).max(1e-6),
            80,
        );
        if v > level_max[best_k].kappa {
            level_max[best_k].kappa = v;
            level_max[best_k].argmax = Complex64::from_polar(r, t);
        }
        if v > best.0 {
            best = (v, Complex64::from_polar(r, t), best_k);
        }
    }

    // Radial polish between the neighbouring levels.
    let r_max = 1.0 - level_max[levels - 1].eps;
    let r_lo = if best.2 == 0 {
        0.0
    } else {
        1.0 - level_max[best.2 - 1].eps
    };
    let r_hi = if best.2 + 1 < levels {
        1.0 - level_max[best.2 + 1].eps
    } else {
        r_max
    };
    if r_hi > r_lo {
        let theta = best.1.arg();
        let mut record = |a: Complex64, v: f64| {
            if let Some(s) = samples.as_mut() {
                s.push((a, v));
            }
        };
        let (rr, v) = golden_section_max(
            |rr| {
                let a = Complex64::from_polar(rr, theta);
                let v = eval.value_unchecked(a);
                evaluations += 1;
                record(a, v);
                v
            },
            r_lo,
            r_hi,
            1e-10,
            80,
        );
        if v > best.0 {
            best = (v, Complex64::from_polar(rr, theta), best.2);
        }
    }

    let kappas: Vec<f64> = level_max.iter().map(|l| l.kappa).collect();
    let flags = CriterionFlags {
        sup_finite_consistent: sup_finite_consistent(&kappas),
        limsup_zero_consistent: limsup_zero_consistent(&kappas),
    };
    Ok(CriterionReport {
        sup_estimate: best.0,
        argmax_a: best.1,
        levels: level_max,
        samples,
        flags,
        evaluations,
    })
}

fn sup_finite_consistent(kappas: &[f64]) -> bool {
    if kappas.iter().any(|k| !k.is_finite()) {
        return false;
    }
    let tail_start = kappas.len().saturating_sub(3);
    let tail = &kappas[tail_start..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0]);
    if non_increasing {
        return true;
    }
    let earlier = &kappas[..tail_start];
    if earlier.is_empty() {
        return false;
    }
    let earlier_max = earlier.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    tail.iter().all(|&k| k <= 2.0 * earlier_max)
}

fn limsup_zero_consistent(kappas: &[f64]) -> bool {
    let peak = kappas.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return true;
    }
    if kappas.len() < 2 {
        return false;
    }
    let tail = &kappas[kappas.len().saturating_sub(4)..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let last = tail[tail.len() - 1];
    let small = last <= LIMSUP_RELATIVE_FLOOR * peak;
    let geometric = tail.windows(2).all(|w| w[1] <= LIMSUP_STEP_RATIO * w[0]);
    decreasing && (small || geometric)
}

/// Norm of `ψ` in S_2^p plus the two criterion searches that together
/// characterize boundedness of `f ↦ ψ (f ∘ φ)` on S_2^p.
#[derive(Debug, Clone, PartialEq)]
pub struct S2pBoundednessReport {
    pub p: f64,
    pub psi_s2p_norm: f64,
    /// Weight `2ψ'φ' + ψφ''`.
    pub first_order: CriterionReport,
    /// Weight `ψ φ'²`.
    pub second_order: CriterionReport,
    pub bounded_consistent: bool,
}

pub fn s2p_boundedness_report(
    phi: &SelfMap,
    psi: &AnalyticFunction,
    p: f64,
    grid: &BoundaryGrid,
    levels: usize,
) -> Result<S2pBoundednessReport> {
    check_exponent(p)?;
    let psi_s2p_norm = s2p_norm(psi, p, grid)?;
    let w1 = first_order_weight(phi.function(), psi);
    let w2 = second_order_weight(phi.function(), psi);
    let first_order = criterion_sup(&CriterionSpec::new(phi.clone(), w1, p, p)?, levels, grid, false)?;
    let second_order = criterion_sup(&CriterionSpec::new(phi.clone(), w2, p, p)?, levels, grid, false)?;
    let bounded_consistent =
        psi_s2p_norm.is_finite() && first_order.flags.sup_finite_consistent && second_order.flags.sup_finite_consistent;
    Ok(S2pBoundednessReport {
        p,
        psi_s2p_norm,
        first_order,
        second_order,
        bounded_consistent,
    })
}

/// Composition operators: `ψ = 1`, weights `φ''` and `φ'²`.
pub fn composition_report(phi: &SelfMap, p: f64, grid: &BoundaryGrid, levels: usize) -> Result<S2pBoundednessReport> {
    let one = AnalyticFunction::constant(Complex64::new(1.0, 0.0));
    s2p_boundedness_report(phi, &one, p, grid, levels)
}

/// Multiplication operators: `φ = z`, weights `2ψ'` and `ψ`.
pub fn multiplication_report(
    psi: &AnalyticFunction,
    p: f64,
    grid: &BoundaryGrid,
    levels: usize,
) -> Result<S2pBoundednessReport> {
    s2p_boundedness_report(&SelfMap::identity(), psi, p, grid, levels)
}

/// Radial traces for the three weights `ψ''`, `2ψ'φ' + ψφ''`, `ψφ'²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport {
    pub p: f64,
    pub traces: [CriterionReport; 3],
    pub compact_consistent: bool,
    /// Set for p = 1, where the vanishing-limsup characterization is only
    /// established for p > 1.
    pub p_caveat: bool,
}

pub fn compactness_trace(
    phi: &SelfMap,
    psi: &AnalyticFunction,
    p: f64,
    grid: &BoundaryGrid,
    levels: usize,
) -> Result<CompactnessReport> {
    let report = s2p_boundedness_report(phi, psi, p, grid, levels)?;
    compactness_from_report(phi, psi, &report, grid, levels)
}

/// Compactness trace reusing the two sups of an existing S_2^p report for
/// the same `(φ, ψ, p)`; only the `ψ''` sup is computed.
pub fn compactness_from_report(
    phi: &SelfMap,
    psi: &AnalyticFunction,
    report: &S2pBoundednessReport,
    grid: &BoundaryGrid,
    levels: usize,
) -> Result<CompactnessReport> {
    let p = report.p;
    let spec = CriterionSpec::new(phi.clone(), psi.derivative().derivative(), p, p)?;
    let traces = [
        criterion_sup(&spec, levels, grid, false)?,
        report.first_order.clone(),
        report.second_order.clone(),
    ];
    let compact_consistent = traces.iter().all(|t| t.flags.limsup_zero_consistent);
    Ok(CompactnessReport {
        p,
        traces,
        compact_consistent,
        p_caveat: p <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::pairwise_sum_by;
    use approx::assert_relative_eq;

    fn poly(c: &[f64]) -> AnalyticFunction {
        AnalyticFunction::real_polynomial(c)
    }

    fn self_map(c: &[f64]) -> SelfMap {
        SelfMap::new(poly(c), &BoundaryGrid::default()).unwrap()
    }

    fn spec(phi: SelfMap, weight: &[f64], p: f64) -> CriterionSpec {
        CriterionSpec::new(phi, poly(weight), p, p).unwrap()
    }

    #[test]
    fn origin_gives_weight_mean() {
        let g = BoundaryGrid::default();
        let s = spec(self_map(&[0.1, 0.4, 0.2]), &[1.0, 1.0], 2.0);
        assert_relative_eq!(
            criterion_value(&s, Complex64::new(0.0, 0.0), &g).unwrap(),
            2.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn constant_map_closed_form() {
        let g = BoundaryGrid::default();
        let s = spec(self_map(&[0.0]), &[1.0], 2.0);
        assert_relative_eq!(
            criterion_value(&s, Complex64::new(0.6, 0.0), &g).unwrap(),
            0.64,
            max_relative = 1e-13
        );
    }

    #[test]
    fn poisson_normalization() {
        let g = BoundaryGrid::default();
        let s = spec(SelfMap::identity(), &[1.0], 2.0);
        let ev = CriterionEvaluator::new(&s, &g);
        for r in [
            0.0,
            0.3,
            0.9,
            0.95,
            0.99,
            0.999,
            1.0 - 2f64.powi(-11),
            1.0 - 2f64.powi(-16),
        ] {
            for t in [0.0, 0.123, 2.0, 4.5] {
                let v = ev.value(Complex64::from_polar(r, t)).unwrap();
                assert!((v - 1.0).abs() < 1e-10, "r={r} t={t} v={v}");
            }
        }
        assert!(matches!(
            ev.value(Complex64::new(1.0, 0.0)),
            Err(Error::CenterOutsideOpenDisc { .. })
        ));
    }

    #[test]
    fn exponent_ratio_matches_closed_form_for_constant_map() {
        let g = BoundaryGrid::default();
        let s = CriterionSpec::new(self_map(&[0.0]), poly(&[2.0]), 1.0, 3.0).unwrap();
        let v = criterion_value(&s, Complex64::new(0.5, 0.0), &g).unwrap();
        assert_relative_eq!(v, 0.75f64.powi(3) * 8.0, max_relative = 1e-13);
        assert!(matches!(
            CriterionSpec::new(self_map(&[0.0]), poly(&[1.0]), 2.0, 1.0),
            Err(Error::ExponentOrder { .. })
        ));
    }

    #[test]
    fn boundary_touching_map_against_refined_trapezoid() {
        // (1 + z)/2 touches the circle at 1; compare against a much finer grid
        let phi = self_map(&[0.5, 0.5]);
        let s = spec(phi, &[0.3, 1.0], 2.0);
        let g = BoundaryGrid::default();
        let fine = BoundaryGrid::new(1 << 20).unwrap();
        let a = Complex64::new(0.995, 0.0);
        let v = criterion_value(&s, a, &g).unwrap();
        let reference = {
            let pts = fine.points();
            let num = 1.0 - a.norm_sqr();
            let f = |j: usize| {
                let w = pts[j];
                let ph = (w + 1.0) * 0.5;
                let u = (w + 0.3).norm_sqr();
                num / (Complex64::new(1.0, 0.0) - a.conj() * ph).norm_sqr() * u
            };
            pairwise_sum_by(pts.len(), &f) / pts.len() as f64
        };
        assert_relative_eq!(v, reference, max_relative = 1e-9);
    }

    #[test]
    fn sup_search_examples() {
        let g = BoundaryGrid::default();
        let id = criterion_sup(&spec(SelfMap::identity(), &[1.0], 2.0), 8, &g, false).unwrap();
        assert!((id.sup_estimate - 1.0).abs() < 1e-9);
        assert!(id.kappas().all(|k| (k - 1.0).abs() < 1e-9));
        assert!(id.flags.sup_finite_consistent);
        assert!(!id.flags.limsup_zero_consistent);

        let zero = criterion_sup(&spec(self_map(&[0.0]), &[1.0], 2.0), 8, &g, false).unwrap();
        assert_relative_eq!(zero.sup_estimate, 1.0, max_relative = 1e-12);
        assert_eq!(zero.argmax_a, Complex64::new(0.0, 0.0));
        for l in &zero.levels {
            let r = 1.0 - l.eps;
            assert_relative_eq!(l.kappa, 1.0 - r * r, max_relative = 1e-12);
        }

        let half = criterion_sup(&spec(self_map(&[0.0, 0.5]), &[1.0], 2.0), 12, &g, false).unwrap();
        for l in &half.levels {
            assert!(l.kappa <= 4.0 * l.eps * (2.0 - l.eps) + 1e-12);
        }
        assert!(half.flags.limsup_zero_consistent);
        for w in half.levels.windows(2) {
            assert!(w[1].eps < w[0].eps);
        }
    }

    #[test]
    fn zero_weight_is_identically_zero() {
        let g = BoundaryGrid::default();
        let r = criterion_sup(&spec(SelfMap::identity(), &[0.0], 1.0), 6, &g, true).unwrap();
        assert_eq!(r.sup_estimate, 0.0);
        assert!(r.flags.limsup_zero_consistent && r.flags.sup_finite_consistent);
        assert_eq!(r.samples.unwrap().len(), r.evaluations);
    }

    #[test]
    fn report_examples() {
        let g = BoundaryGrid::default();
        let one = poly(&[1.0]);
        let rep = s2p_boundedness_report(&SelfMap::identity(), &one, 2.0, &g, 6).unwrap();
        assert_eq!(rep.first_order.sup_estimate, 0.0);
        assert!((rep.second_order.sup_estimate - 1.0).abs() < 1e-9);
        assert_relative_eq!(rep.psi_s2p_norm, 1.0);
        assert!(rep.bounded_consistent);

        let zero = s2p_boundedness_report(&self_map(&[0.0, 0.5]), &poly(&[0.0]), 2.0, &g, 6).unwrap();
        assert_eq!(zero.psi_s2p_norm, 0.0);
        assert_eq!(zero.first_order.sup_estimate, 0.0);
        assert_eq!(zero.second_order.sup_estimate, 0.0);
        assert!(zero.bounded_consistent);

        let half = composition_report(&self_map(&[0.0, 0.5]), 2.0, &g, 6).unwrap();
        assert_eq!(half.first_order.sup_estimate, 0.0);
        assert!(half.second_order.sup_estimate <= 0.25f64.powi(2) * 1.0 + 1e-12);
        assert!(half.bounded_consistent);

        let c = multiplication_report(&poly(&[-3.0]), 2.0, &g, 6).unwrap();
        assert_eq!(c.first_order.sup_estimate, 0.0);
        assert!((c.second_order.sup_estimate - 9.0).abs() < 1e-8);
    }

    #[test]
    fn compactness_examples() {
        let g = BoundaryGrid::default();
        let one = poly(&[1.0]);
        let half = compactness_trace(&self_map(&[0.0, 0.5]), &one, 2.0, &g, 12).unwrap();
        assert!(half.compact_consistent);
        assert!(!half.p_caveat);
        let id = compactness_trace(&SelfMap::identity(), &one, 2.0, &g, 12).unwrap();
        assert!(!id.compact_consistent);
        assert!(id.traces[2].kappas().all(|k| (k - 1.0).abs() < 1e-8));
        let zero = compactness_trace(&SelfMap::identity(), &poly(&[0.0]), 1.0, &g, 4).unwrap();
        assert!(zero.compact_consistent);
        assert!(zero.p_caveat);
    }
}
