//! Conformally flat surfaces `g = e^{2u}(dx² + dy²)`.

use std::fmt;
use std::sync::Arc;

use super::curve::Point;
use crate::error::{Error, Result};

/// Analytic conformal exponent `u` with its gradient and Laplacian.
pub trait ConformalFactor: Send + Sync {
    fn u(&self, p: Point) -> f64;
    fn grad(&self, p: Point) -> Point;
    fn laplacian(&self, p: Point) -> f64;
    /// Whether `p` lies in the domain of definition.
    fn contains(&self, _p: Point) -> bool {
        true
    }
    fn name(&self) -> String;
}

#[derive(Debug, Clone, Copy)]
struct Flat;

impl ConformalFactor for Flat {
    fn u(&self, _p: Point) -> f64 {
        0.0
    }
    fn grad(&self, _p: Point) -> Point {
        [0.0, 0.0]
    }
    fn laplacian(&self, _p: Point) -> f64 {
        0.0
    }
    fn name(&self) -> String {
        "euclidean".into()
    }
}

/// `u = log(2/(κ(1 − |z|²)))` on the open unit disk; Gauss curvature `−κ²`.
#[derive(Debug, Clone, Copy)]
pub struct PoincareDisk {
    pub kappa: f64,
}

impl ConformalFactor for PoincareDisk {
    fn u(&self, p: Point) -> f64 {
        let s = 1.0 - p[0] * p[0] - p[1] * p[1];
        (2.0 / (self.kappa * s)).ln()
    }
    fn grad(&self, p: Point) -> Point {
        let s = 1.0 - p[0] * p[0] - p[1] * p[1];
        [2.0 * p[0] / s, 2.0 * p[1] / s]
    }
    fn laplacian(&self, p: Point) -> f64 {
        let s = 1.0 - p[0] * p[0] - p[1] * p[1];
        4.0 / (s * s)
    }
    fn contains(&self, p: Point) -> bool {
        p[0] * p[0] + p[1] * p[1] < 1.0
    }
    fn name(&self) -> String {
        format!("hyperbolic({})", self.kappa)
    }
}

/// A factor given by closures, for experiments with other metrics.
pub struct FnFactor {
    pub label: String,
    pub u: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    pub grad: Box<dyn Fn(Point) -> Point + Send + Sync>,
    pub laplacian: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    pub contains: Box<dyn Fn(Point) -> bool + Send + Sync>,
}

impl ConformalFactor for FnFactor {
    fn u(&self, p: Point) -> f64 {
        (self.u)(p)
    }
    fn grad(&self, p: Point) -> Point {
        (self.grad)(p)
    }
    fn laplacian(&self, p: Point) -> f64 {
        (self.laplacian)(p)
    }
    fn contains(&self, p: Point) -> bool {
        (self.contains)(p)
    }
    fn name(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureTag {
    Euclidean,
    Hyperbolic(f64),
    Custom,
}

/// Tolerance for the sampled curvature sign check.
pub const CURVATURE_TOL: f64 = 1e-9;

#[derive(Clone)]
pub struct ConformalSurface {
    factor: Arc<dyn ConformalFactor>,
    tag: CurvatureTag,
}

impl fmt::Debug for ConformalSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConformalSurface({})", self.factor.name())
    }
}

impl ConformalSurface {
    pub fn euclidean() -> Self {
        ConformalSurface { factor: Arc::new(Flat), tag: CurvatureTag::Euclidean }
    }

    /// Poincaré disk model of curvature `−κ²`.
    pub fn poincare(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("hyperbolic surface needs κ > 0, got {kappa}")));
        }
        Ok(ConformalSurface { factor: Arc::new(PoincareDisk { kappa }), tag: CurvatureTag::Hyperbolic(kappa) })
    }

    pub fn custom(factor: impl ConformalFactor + 'static) -> Self {
        ConformalSurface { factor: Arc::new(factor), tag: CurvatureTag::Custom }
    }

    pub fn tag(&self) -> CurvatureTag {
        self.tag
    }

    pub fn name(&self) -> String {
        self.factor.name()
    }

    pub fn is_euclidean(&self) -> bool {
        self.tag == CurvatureTag::Euclidean
    }

    /// Largest `κ` for which the surface is known to satisfy `K ≤ −κ²`.
    pub fn kappa_bound(&self) -> f64 {
        match self.tag {
            CurvatureTag::Hyperbolic(k) => k,
            _ => 0.0,
        }
    }

    pub fn u(&self, p: Point) -> f64 {
        self.factor.u(p)
    }

    pub fn grad_u(&self, p: Point) -> Point {
        self.factor.grad(p)
    }

    pub fn laplacian_u(&self, p: Point) -> f64 {
        self.factor.laplacian(p)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.factor.contains(p)
    }

    /// Area density `e^{2u}`.
    pub fn area_weight(&self, p: Point) -> f64 {
        (2.0 * self.factor.u(p)).exp()
    }

    /// Length density `e^{u}`.
    pub fn length_weight(&self, p: Point) -> f64 {
        self.factor.u(p).exp()
    }

    /// `K = −e^{−2u} Δu`.
    pub fn gauss_curvature(&self, p: Point) -> f64 {
        -(-2.0 * self.factor.u(p)).exp() * self.factor.laplacian(p)
    }

    /// Checks `K ≤ CURVATURE_TOL` at every sample point.
    pub fn check_curvature<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
        for p in points {
            if !self.contains(*p) {
                return Err(Error::Domain(format!("point ({}, {}) lies outside {}", p[0], p[1], self.name())));
            }
            let k = self.gauss_curvature(*p);
            if !(k <= CURVATURE_TOL) {
                return Err(Error::Domain(format!(
                    "Gauss curvature {k:e} > 0 at ({}, {}) on {}",
                    p[0],
                    p[1],
                    self.name()
                )));
            }
        }
        Ok(())
    }

    pub fn check_contains<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
        for p in points {
            if !self.contains(*p) {
                return Err(Error::Domain(format!("point ({}, {}) lies outside {}", p[0], p[1], self.name())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poincare_curvature_is_constant() {
        for kappa in [0.5, 1.0, 2.0] {
            let s = ConformalSurface::poincare(kappa).unwrap();
            for p in [[0.0, 0.0], [0.3, -0.4], [0.9, 0.1], [-0.2, 0.94]] {
                assert!((s.gauss_curvature(p) + kappa * kappa).abs() < 1e-12 * kappa * kappa);
            }
        }
    }

    #[test]
    fn poincare_gradient_matches_difference_quotient() {
        let s = ConformalSurface::poincare(1.0).unwrap();
        let p = [0.31, -0.52];
        let e = 1e-6;
        let g = s.grad_u(p);
        let gx = (s.u([p[0] + e, p[1]]) - s.u([p[0] - e, p[1]])) / (2.0 * e);
        let gy = (s.u([p[0], p[1] + e]) - s.u([p[0], p[1] - e])) / (2.0 * e);
        assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);
    }

    #[test]
    fn positive_curvature_is_rejected() {
        // the round sphere factor u = log(2/(1+|z|²)) has K = +1
        let sphere = ConformalSurface::custom(FnFactor {
            label: "sphere".into(),
            u: Box::new(|p| (2.0 / (1.0 + p[0] * p[0] + p[1] * p[1])).ln()),
            grad: Box::new(|p| {
                let s = 1.0 + p[0] * p[0] + p[1] * p[1];
                [-2.0 * p[0] / s, -2.0 * p[1] / s]
            }),
            laplacian: Box::new(|p| {
                let s = 1.0 + p[0] * p[0] + p[1] * p[1];
                -4.0 / (s * s)
            }),
            contains: Box::new(|_| true),
        });
        assert!((sphere.gauss_curvature([0.2, 0.1]) - 1.0).abs() < 1e-12);
        assert!(sphere.check_curvature(&[[0.0, 0.0]]).is_err());
        let hyp = ConformalSurface::poincare(1.0).unwrap();
        assert!(hyp.check_curvature(&[[0.0, 0.0], [0.5, 0.5]]).is_ok());
        assert!(hyp.check_curvature(&[[1.0, 0.5]]).is_err());
    }

    #[test]
    fn tags() {
        assert!(ConformalSurface::euclidean().is_euclidean());
        assert_eq!(ConformalSurface::poincare(2.0).unwrap().kappa_bound(), 2.0);
        assert!(ConformalSurface::poincare(0.0).is_err());
    }
}
