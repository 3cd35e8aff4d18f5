//! Uniform boundary grids on the unit circle, boundary sup norms and
//! self-map validation.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::series::AnalyticFunction;

/// Default number of boundary samples.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Slack above 1 allowed for the boundary sup of a self-map.
pub const SELF_MAP_TOLERANCE: f64 = 1e-12;

/// `M` equally spaced points `exp(2πij/M)` carrying weight `1/M` each; the
/// quadrature form of normalized arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    points: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(samples: usize) -> Result<Self> {
        if samples == 0 || !samples.is_power_of_two() {
            return Err(Error::InvalidGridSize(samples));
        }
        let points = (0..samples)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / samples as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        Ok(BoundaryGrid { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Quadrature weight of every node.
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.points.len() as f64
    }

    /// Angular spacing `2π/M`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points.len() as f64
    }

    /// The grid with every other node, used for doubling error estimates.
    pub fn coarsened(&self) -> Option<BoundaryGrid> {
        if self.points.len() < 2 {
            return None;
        }
        Some(BoundaryGrid {
            points: self.points.iter().step_by(2).copied().collect(),
        })
    }
}

impl Default for BoundaryGrid {
    fn default() -> Self {
        BoundaryGrid::new(DEFAULT_SAMPLES).expect("default grid size is a power of two")
    }
}

/// Values `f(w_j)` at every grid node.
pub fn boundary_samples(f: &AnalyticFunction, grid: &BoundaryGrid) -> Vec<Complex64> {
    grid.points.iter().map(|&w| f.eval(w)).collect()
}

/// `max_j |f(w_j)|`, polished by golden-section search on the arc around the
/// best node. By the maximum principle this is the sup over the closed disc.
pub fn boundary_sup(f: &AnalyticFunction, grid: &BoundaryGrid) -> f64 {
    let samples = boundary_samples(f, grid);
    let (best_j, best) = samples
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if f.degree() == 0 {
        return best;
    }
    let theta = grid.angle(best_j);
    let h = grid.spacing();
    let (_, polished) = golden_section_max(
        |t| f.eval(Complex64::from_polar(1.0, t)).norm(),
        theta - h,
        theta + h,
        1e-13,
        200,
    );
    best.max(polished)
}

/// An analytic function validated to map the closed disc into itself (up to
/// [`SELF_MAP_TOLERANCE`] on the boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMap {
    map: AnalyticFunction,
    boundary_sup: f64,
}

impl SelfMap {
    pub fn new(map: AnalyticFunction, grid: &BoundaryGrid) -> Result<Self> {
        let sup = boundary_sup(&map, grid);
        if !(sup <= 1.0 + SELF_MAP_TOLERANCE) {
            return Err(Error::NotSelfMap {
                boundary_sup: sup,
                tolerance: SELF_MAP_TOLERANCE,
            });
        }
        Ok(SelfMap { map, boundary_sup: sup })
    }

    pub fn identity() -> Self {
        SelfMap {
            map: AnalyticFunction::identity(),
            boundary_sup: 1.0,
        }
    }

    pub fn function(&self) -> &AnalyticFunction {
        &self.map
    }

    pub fn boundary_sup(&self) -> f64 {
        self.boundary_sup
    }

    /// Whether the image touches the unit circle within `tol`.
    pub fn touches_boundary(&self, tol: f64) -> bool {
        self.boundary_sup >= 1.0 - tol
    }
}

impl AnalyticFunction {
    /// `f ∘ φ` for a validated self-map.
    pub fn compose(&self, phi: &SelfMap) -> AnalyticFunction {
        self.compose_series(phi.function())
    }

    /// `f ∘ φ`, validating `φ` on the default boundary grid first.
    pub fn compose_checked(&self, phi: &AnalyticFunction) -> Result<AnalyticFunction> {
        let phi = SelfMap::new(phi.clone(), &BoundaryGrid::default())?;
        Ok(self.compose(&phi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(c: &[f64]) -> AnalyticFunction {
        AnalyticFunction::real_polynomial(c)
    }

    #[test]
    fn grid_requires_power_of_two() {
        assert!(BoundaryGrid::new(0).is_err());
        assert!(BoundaryGrid::new(12).is_err());
        let g = BoundaryGrid::new(8).unwrap();
        assert_eq!(g.weight() * g.len() as f64, 1.0);
    }

    #[test]
    fn boundary_samples_examples() {
        let g4 = BoundaryGrid::new(4).unwrap();
        let ones = boundary_samples(&poly(&[1.0]), &g4);
        assert!(ones.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let roots = boundary_samples(&poly(&[0.0, 1.0]), &g4);
        let expect = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).norm() < 1e-15);
        }
        let g2 = BoundaryGrid::new(2).unwrap();
        let s = boundary_samples(&poly(&[1.0, 1.0]), &g2);
        assert!((s[0] - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(s[1].norm() < 1e-15);
    }

    #[test]
    fn boundary_sup_examples() {
        let g = BoundaryGrid::default();
        assert_relative_eq!(boundary_sup(&poly(&[-3.0]), &g), 3.0);
        assert_relative_eq!(boundary_sup(&poly(&[0.0, 1.0]), &g), 1.0, max_relative = 1e-15);
        assert_relative_eq!(boundary_sup(&poly(&[0.5, 0.5]), &g), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn boundary_sup_polishes_between_nodes() {
        // peak of |1 + e^{i(θ - θ0)}| at θ0 placed between nodes of a coarse grid
        let g = BoundaryGrid::new(16).unwrap();
        let t0 = 0.3 * g.spacing();
        let f = AnalyticFunction::polynomial([Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -t0)]);
        assert_relative_eq!(boundary_sup(&f, &g), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn self_map_validation() {
        let g = BoundaryGrid::default();
        assert!(SelfMap::new(poly(&[0.5, 0.5]), &g).is_ok());
        assert!(matches!(
            SelfMap::new(poly(&[0.5, 0.6]), &g),
            Err(Error::NotSelfMap { .. })
        ));
        assert!(poly(&[1.0, 1.0]).compose_checked(&poly(&[0.0, 1.1])).is_err());
    }
}
