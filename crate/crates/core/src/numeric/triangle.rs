//! Quadrature rules on triangles in barycentric form.

use super::quadrature::GaussLegendre;

/// A rule on the reference triangle: barycentric points and weights that
/// sum to one (multiply by the triangle area).
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Symmetric six-point rule, exact for degree 4.
    pub fn degree4() -> Self {
        let a1 = 0.445_948_490_915_965;
        let b1 = 1.0 - 2.0 * a1;
        let w1 = 0.223_381_589_678_011;
        let a2 = 0.091_576_213_509_771;
        let b2 = 1.0 - 2.0 * a2;
        let w2 = 0.109_951_743_655_322;
        TriangleRule {
            points: vec![
                [a1, a1, b1],
                [a1, b1, a1],
                [b1, a1, a1],
                [a2, a2, b2],
                [a2, b2, a2],
                [b2, a2, a2],
            ],
            weights: vec![w1, w1, w1, w2, w2, w2],
            degree: 4,
        }
    }

    /// Collapsed Gauss–Legendre product rule exact for polynomials of the
    /// given degree. Degree 4 returns the symmetric six-point rule.
    pub fn of_degree(degree: usize) -> Self {
        if degree <= 4 {
            return Self::degree4();
        }
        // the collapse adds one to the degree in the first coordinate
        let m = (degree + 2).div_ceil(2);
        let gl = GaussLegendre::new(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for (xi, wi) in gl.nodes.iter().zip(&gl.weights) {
            let s = 0.5 * (xi + 1.0);
            for (xj, wj) in gl.nodes.iter().zip(&gl.weights) {
                let r = 0.5 * (xj + 1.0);
                // (s, r) in the unit square -> (s, r(1-s)) in the triangle
                let l1 = s;
                let l2 = r * (1.0 - s);
                points.push([1.0 - l1 - l2, l1, l2]);
                // area of reference triangle is 1/2; weights normalised to 1
                weights.push(0.25 * wi * wj * (1.0 - s) * 2.0);
            }
        }
        TriangleRule { points, weights, degree }
    }

    /// Integrates `f` over the triangle with vertices `a, b, c`.
    pub fn integrate<F: FnMut([f64; 2]) -> f64>(
        &self,
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        mut f: F,
    ) -> f64 {
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
        let mut s = 0.0;
        for (l, w) in self.points.iter().zip(&self.weights) {
            let p = [
                l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
            ];
            s += w * f(p);
        }
        s * area
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // ∫_T x^i y^j over the unit reference triangle = i! j! / (i + j + 2)!
    fn monomial_exact(i: u32, j: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        fact(i) * fact(j) / fact(i + j + 2)
    }

    fn check_rule(rule: &TriangleRule) {
        for i in 0..=rule.degree as u32 {
            for j in 0..=(rule.degree as u32 - i) {
                let v = rule.integrate([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], |p| {
                    p[0].powi(i as i32) * p[1].powi(j as i32)
                });
                let e = monomial_exact(i, j);
                assert!((v - e).abs() < 1e-13, "deg {} x^{i} y^{j}: {v} vs {e}", rule.degree);
            }
        }
    }

    #[test]
    fn six_point_rule_is_degree_four() {
        check_rule(&TriangleRule::degree4());
    }

    #[test]
    fn collapsed_rules_reach_requested_degree() {
        for d in [5, 8, 12] {
            check_rule(&TriangleRule::of_degree(d));
        }
    }
}
