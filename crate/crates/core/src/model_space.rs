//! Constant-curvature model spaces `(M_κ, g_κ)` of sectional curvature
//! `−κ²`: ball volumes, the volume radius, and the first Dirichlet
//! eigenpair of geodesic balls.
//!
//! In geodesic polar coordinates the metric is `dr² + S(r)² dθ²` with
//! `S(r) = sinh(κr)/κ` (and `S(r) = r` for `κ = 0`), so the boundary area of
//! a ball is `nω_n S(r)^{n−1}` and radial functions satisfy
//! `Δψ = ψ'' + (n−1)(S'/S) ψ'`.

use crate::error::{Error, Result};
use crate::numeric::ode::{DormandPrince, Tolerance};
use crate::numeric::quadrature::{gl16, integrate};
use crate::numeric::roots::{brent, expand_bracket};

/// Relative tolerance used for every radial quadrature.
pub const QUAD_TOL: f64 = 1e-13;

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    // ω_0 = 1, ω_1 = 2, ω_n = 2π/n · ω_{n−2}
    let mut w = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    Ok(w)
}

/// `sinh(κr)/κ`, continuous at `κ = 0`.
pub fn sinh_scaled(kappa: f64, r: f64) -> f64 {
    let x = kappa * r;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        r * (1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0)))
    } else {
        x.sinh() / kappa
    }
}

/// `S'(r)/S(r)`, i.e. `κ coth(κr)` or `1/r`.
fn log_derivative(kappa: f64, r: f64) -> f64 {
    let x = kappa * r;
    if x.abs() < 1e-3 {
        // x coth x = 1 + x²/3 − x⁴/45 + …
        let x2 = x * x;
        (1.0 + x2 / 3.0 - x2 * x2 / 45.0) / r
    } else {
        kappa / x.tanh()
    }
}

/// Simply connected space form of dimension `n` and curvature `−κ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    n: usize,
    kappa: f64,
    omega: f64,
}

/// Radial first eigenfunction of a model ball, sampled on a uniform grid in
/// `r` with `ψ(0) = 1`.
#[derive(Debug, Clone)]
pub struct RadialEigenSolution {
    pub space: ModelSpace,
    pub lambda: f64,
    pub r_max: f64,
    /// `(r, ψ(r), ψ'(r))`
    pub radial_grid: Vec<(f64, f64, f64)>,
    /// `(v, ψ*(v))` with `v = v_κ(r)` at the grid radii
    pub volume_profile: Vec<(f64, f64)>,
    /// `∫_{B_r} ψ dm` at the grid radii
    cumulative_mass: Vec<f64>,
    pub sup_norm: f64,
}

impl ModelSpace {
    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("curvature parameter must be ≥ 0, got {kappa}")));
        }
        Ok(ModelSpace { n, kappa, omega: unit_ball_volume(n)? })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Bottom of the spectrum, `(n−1)²κ²/4`.
    pub fn spectral_floor(&self) -> f64 {
        let m = (self.n - 1) as f64;
        0.25 * m * m * self.kappa * self.kappa
    }

    fn area_density(&self, r: f64) -> f64 {
        self.n as f64 * self.omega * sinh_scaled(self.kappa, r).powi(self.n as i32 - 1)
    }

    /// `|∂B_r|_κ`.
    pub fn boundary_volume(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be ≥ 0, got {r}")));
        }
        Ok(self.area_density(r))
    }

    /// `v_κ(r) = |B_r|_κ`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be ≥ 0, got {r}")));
        }
        if self.kappa == 0.0 {
            return Ok(self.omega * r.powi(self.n as i32));
        }
        Ok(integrate(0.0, r, QUAD_TOL, |t| self.area_density(t)))
    }

    /// The volume radius `r_κ(v)`, inverse of [`ball_volume`](Self::ball_volume).
    pub fn volume_radius(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("volume must be ≥ 0, got {v}")));
        }
        let euclid = (v / self.omega).powf(1.0 / self.n as f64);
        if self.kappa == 0.0 || v == 0.0 {
            return Ok(euclid);
        }
        // v_κ(r) ≥ ω_n rⁿ, so the Euclidean radius is an upper bound
        let mut lo = 0.0;
        let mut hi = euclid;
        let mut r = euclid;
        for _ in 0..200 {
            let f = self.ball_volume(r)? - v;
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let step = f / self.area_density(r);
            let mut next = r - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - r).abs() <= 1e-15 * r.max(1e-300) {
                return Ok(next);
            }
            r = next;
        }
        Ok(r)
    }

    fn ode_tolerance() -> Tolerance {
        Tolerance { rel: 1e-12, abs: 1e-15 }
    }

    /// Series start for the radial problem: `ψ ≈ 1 − λr²/(2n)` near `0`.
    fn series_start(&self, lambda: f64, r0: f64) -> [f64; 2] {
        let n = self.n as f64;
        let k2 = self.kappa * self.kappa;
        // fourth-order term of the regular solution
        let c4 = lambda * (lambda + 2.0 * (n - 1.0) * k2 / 3.0) / (8.0 * n * (n + 2.0));
        let psi = 1.0 - lambda * r0 * r0 / (2.0 * n) + c4 * r0.powi(4);
        let dpsi = -lambda * r0 / n + 4.0 * c4 * r0.powi(3);
        [psi, dpsi]
    }

    fn radial_stepper(&self, lambda: f64) -> DormandPrince<impl Fn(f64, &[f64; 2]) -> [f64; 2], 2> {
        let kappa = self.kappa;
        let m = (self.n - 1) as f64;
        DormandPrince::new(
            move |r: f64, y: &[f64; 2]| [y[1], -lambda * y[0] - m * log_derivative(kappa, r) * y[1]],
            Self::ode_tolerance(),
        )
    }

    /// First positive zero of the regular radial solution with eigenvalue
    /// `lambda`, searched up to `r_limit`. `scale` sets the series start
    /// radius `1e-4·scale`.
    fn first_zero(&self, lambda: f64, r_limit: f64, scale: f64) -> Result<Option<f64>> {
        let r0 = 1e-4 * scale;
        let y0 = self.series_start(lambda, r0);
        let dp = self.radial_stepper(lambda);
        let mut bracket = None;
        dp.solve_with(r0, y0, r_limit, r0, |r_a, y_a, r_b, y_b| {
            if y_b[0] <= 0.0 {
                bracket = Some((r_a, *y_a, r_b));
                false
            } else {
                true
            }
        })
        .map_err(|d| Error::Solver { what: "radial shooting", diagnostics: d })?;
        let Some((r_a, y_a, r_b)) = bracket else {
            return Ok(None);
        };
        // locate the crossing inside the accepted step with single steps
        let root = brent(|s| if s == 0.0 { y_a[0] } else { dp.step(r_a, &y_a, s).0[0] }, 0.0, r_b - r_a, 1e-16 * r_b, 200)
            .map_err(|d| Error::Solver { what: "radial zero location", diagnostics: d })?;
        Ok(Some(r_a + root))
    }

    /// Radius of the first zero for eigenvalue `lambda` (the ball with that
    /// fundamental frequency).
    pub fn ball_radius_for_eigenvalue(&self, lambda: f64) -> Result<f64> {
        let floor = self.spectral_floor();
        if !(lambda > floor) || !lambda.is_finite() {
            return Err(Error::NoFiniteBall { lambda, floor });
        }
        let euclid_unit = euclidean_unit_eigenvalue(self.n)?;
        let scale = (euclid_unit / lambda).sqrt();
        // hyperbolic balls are larger; stop well before sinh overflows
        let limit = if self.kappa > 0.0 { (600.0 / self.kappa).max(4.0 * scale) } else { 4.0 * scale };
        match self.first_zero(lambda, limit, scale)? {
            Some(r) => Ok(r),
            None => Err(Error::NoFiniteBall { lambda, floor }),
        }
    }

    /// First Dirichlet eigenvalue of the geodesic ball of radius `r`.
    pub fn ball_eigenvalue(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be > 0, got {r}")));
        }
        let floor = self.spectral_floor();
        let estimate = euclidean_unit_eigenvalue(self.n)? / (r * r) + floor;
        // g(λ) = r_zero(λ) − r is strictly decreasing in λ
        let g = |lambda: f64| -> f64 {
            if lambda <= floor {
                return 3.0 * r;
            }
            match self.first_zero(lambda, 4.0 * r, r) {
                Ok(Some(z)) => z - r,
                Ok(None) => 3.0 * r,
                Err(_) => f64::NAN,
            }
        };
        let (lo, hi) = expand_bracket(g, 0.9 * estimate, 1.1 * estimate, floor, 80)
            .map_err(|d| Error::Solver { what: "eigenvalue bracketing", diagnostics: d })?;
        brent(g, lo, hi, 1e-14 * estimate, 200)
            .map_err(|d| Error::Solver { what: "eigenvalue bisection", diagnostics: d })
    }

    /// Grid solution of the radial eigenproblem on the ball of radius `r`.
    pub fn radial_eigenfunction(&self, r: f64) -> Result<RadialEigenSolution> {
        let lambda = self.ball_eigenvalue(r)?;
        self.radial_solution(lambda, r)
    }

    /// Grid solution for a known eigenvalue/radius pair.
    fn radial_solution(&self, lambda: f64, r_max: f64) -> Result<RadialEigenSolution> {
        const CELLS: usize = 2000;
        let r0 = 1e-4 * r_max;
        let dr = r_max / CELLS as f64;
        let dp = self.radial_stepper(lambda);
        let mut grid = Vec::with_capacity(CELLS + 1);
        grid.push((0.0, 1.0, 0.0));
        let mut r = r0;
        let mut y = self.series_start(lambda, r0);
        let mut h = r0;
        for i in 1..=CELLS {
            let target = i as f64 * dr;
            let (_, y_new, h_new) = dp
                .solve_with(r, y, target, h, |_, _, _, _| true)
                .map_err(|d| Error::Solver { what: "radial profile", diagnostics: d })?;
            r = target;
            y = y_new;
            h = h_new;
            grid.push((target, y[0], y[1]));
        }
        // the shooting residual at r_max is below the ODE tolerance
        grid.last_mut().unwrap().1 = 0.0;

        let mut volume_profile = Vec::with_capacity(CELLS + 1);
        let mut cumulative_mass = Vec::with_capacity(CELLS + 1);
        let (mut v, mut mass) = (0.0, 0.0);
        volume_profile.push((0.0, 1.0));
        cumulative_mass.push(0.0);
        let rule = gl16();
        for w in grid.windows(2) {
            let (a, b) = (w[0].0, w[1].0);
            v += rule.integrate(a, b, |t| self.area_density(t));
            mass += rule.integrate(a, b, |t| hermite(w[0], w[1], t).0 * self.area_density(t));
            volume_profile.push((v, w[1].1));
            cumulative_mass.push(mass);
        }
        Ok(RadialEigenSolution {
            space: *self,
            lambda,
            r_max,
            radial_grid: grid,
            volume_profile,
            cumulative_mass,
            sup_norm: 1.0,
        })
    }

    /// Eigenfunction of the ball `B*` whose eigenvalue equals `lambda`.
    pub fn eigenfunction_for_eigenvalue(&self, lambda: f64) -> Result<RadialEigenSolution> {
        let r = self.ball_radius_for_eigenvalue(lambda)?;
        self.radial_solution(lambda, r)
    }

    /// `C = (∫_{B*} ψ^p)^q / (∫_{B*} ψ^q)^p` on the model ball with
    /// eigenvalue `lambda`.
    pub fn reverse_holder_constant(&self, lambda: f64, p: f64, q: f64) -> Result<f64> {
        check_exponents(p, q)?;
        let sol = self.eigenfunction_for_eigenvalue(lambda)?;
        let ip = sol.power_integral(p);
        let iq = sol.power_integral(q);
        Ok((q * ip.ln() - p * iq.ln()).exp())
    }
}

pub(crate) fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && q > p && q.is_finite()) {
        return Err(Error::ExponentOrder { p, q });
    }
    Ok(())
}

/// `λ(B_1)` in `R^n`, from the first zero of the `λ = 1` radial solution.
pub fn euclidean_unit_eigenvalue(n: usize) -> Result<f64> {
    use std::sync::Mutex;
    static CACHE: Mutex<Vec<(usize, f64)>> = Mutex::new(Vec::new());
    if let Some(&(_, v)) = CACHE.lock().unwrap().iter().find(|(k, _)| *k == n) {
        return Ok(v);
    }
    let ms = ModelSpace::euclidean(n)?;
    // the first zero for λ = 1 lies below n + 2 for every n
    let z = ms
        .first_zero(1.0, 4.0 * (n as f64 + 2.0), 1.0)?
        .ok_or(Error::Solver { what: "unit ball eigenvalue", diagnostics: format!("no zero for n = {n}") })?;
    let v = z * z;
    CACHE.lock().unwrap().push((n, v));
    Ok(v)
}

/// `K(n,p,q) = λ(B₁)^{n(q−p)/2} (∫ψ̃^p)^q / (∫ψ̃^q)^p` on the Euclidean unit ball.
pub fn euclidean_k(n: usize, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    let ms = ModelSpace::euclidean(n)?;
    let sol = ms.radial_eigenfunction(1.0)?;
    let log_c = q * sol.power_integral(p).ln() - p * sol.power_integral(q).ln();
    Ok((0.5 * n as f64 * (q - p) * sol.lambda.ln() + log_c).exp())
}

/// Cubic Hermite interpolation of `(r, ψ, ψ')` samples: returns `(ψ, ψ')`.
fn hermite(a: (f64, f64, f64), b: (f64, f64, f64), r: f64) -> (f64, f64) {
    let h = b.0 - a.0;
    let s = (r - a.0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let val = h00 * a.1 + h10 * h * a.2 + h01 * b.1 + h11 * h * b.2;
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    let der = d00 * a.1 + d10 * a.2 + d01 * b.1 + d11 * b.2;
    (val, der)
}

impl RadialEigenSolution {
    fn cell(&self, r: f64) -> usize {
        let cells = self.radial_grid.len() - 1;
        ((r / self.r_max * cells as f64).floor() as usize).min(cells - 1)
    }

    /// `ψ(r)` by Hermite interpolation; zero outside the ball.
    pub fn psi(&self, r: f64) -> f64 {
        if r >= self.r_max {
            return 0.0;
        }
        let i = self.cell(r.max(0.0));
        hermite(self.radial_grid[i], self.radial_grid[i + 1], r.max(0.0)).0.max(0.0) * self.sup_norm
    }

    /// `ψ'(r)`.
    pub fn dpsi(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.r_max);
        let i = self.cell(r);
        hermite(self.radial_grid[i], self.radial_grid[i + 1], r).1 * self.sup_norm
    }

    /// `ψ*(v) = ψ(r_κ(v))`, extended by zero beyond the ball volume.
    pub fn psi_star(&self, v: f64) -> f64 {
        if v >= self.ball_volume() {
            return 0.0;
        }
        match self.space.volume_radius(v) {
            Ok(r) => self.psi(r),
            Err(_) => 0.0,
        }
    }

    pub fn ball_volume(&self) -> f64 {
        self.volume_profile.last().unwrap().0
    }

    /// Rescales so that `sup ψ = m`.
    pub fn with_sup_norm(mut self, m: f64) -> Self {
        self.sup_norm = m;
        self
    }

    /// `∫_{B} ψ^p dm` by composite Gauss–Legendre over the grid cells.
    pub fn power_integral(&self, p: f64) -> f64 {
        let rule = gl16();
        let space = self.space;
        let mut s = 0.0;
        for w in self.radial_grid.windows(2) {
            s += rule.integrate(w[0].0, w[1].0, |t| {
                let v = hermite(w[0], w[1], t).0.max(0.0) * self.sup_norm;
                v.powf(p) * space.area_density(t)
            });
        }
        s
    }

    /// `∫_0^v ψ* = ∫_{B_r} ψ dm` at each grid radius.
    pub fn cumulative_mass(&self) -> &[f64] {
        &self.cumulative_mass
    }

    /// Largest residual of the once-integrated volume-coordinate equation
    /// `−(ψ*)'(v) = λ [nω_n S(r)^{n−1}]^{−2} ∫_0^v ψ*` over grid radii in
    /// `[r_lo, r_max)`, in units of `sup ψ`.
    pub fn integrated_equation_residual(&self, r_lo: f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, &(r, _, dpsi)) in self.radial_grid.iter().enumerate() {
            if r < r_lo || i + 1 == self.radial_grid.len() {
                continue;
            }
            let area = self.space.area_density(r);
            let lhs = -dpsi / area;
            let rhs = self.lambda * self.cumulative_mass[i] / (area * area);
            worst = worst.max((lhs - rhs).abs());
        }
        worst * self.sup_norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(unit_ball_volume(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn constructor_validates() {
        assert!(ModelSpace::new(1, 0.0).is_err());
        assert!(ModelSpace::new(2, -1.0).is_err());
        assert!(ModelSpace::new(2, f64::NAN).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let e = ModelSpace::euclidean(2).unwrap();
        assert!((e.ball_volume(2.0).unwrap() - 4.0 * PI).abs() < 1e-13);
        let h2 = ModelSpace::new(2, 1.0).unwrap();
        // closed form 2π(cosh r − 1)
        let v = h2.ball_volume(1.0).unwrap();
        assert!((v - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-13);
        assert!((v - 3.41227).abs() < 1e-5);
        let h3 = ModelSpace::new(3, 1.0).unwrap();
        let v3 = h3.ball_volume(1.0).unwrap();
        assert!((v3 - PI * (2f64.sinh() - 2.0)).abs() < 1e-13);
        assert!(e.ball_volume(-1.0).is_err());
    }

    #[test]
    fn boundary_volume_examples() {
        let e = ModelSpace::euclidean(2).unwrap();
        assert!((e.boundary_volume(3.0).unwrap() - 6.0 * PI).abs() < 1e-13);
        let h = ModelSpace::new(2, 1.0).unwrap();
        assert!((h.boundary_volume(1.0).unwrap() - 2.0 * PI * 1f64.sinh()).abs() < 1e-13);
        for r in [0.1, 1.0, 3.0] {
            assert!(h.boundary_volume(r).unwrap() > e.boundary_volume(r).unwrap());
        }
        assert!(h.boundary_volume(-0.5).is_err());
    }

    #[test]
    fn volume_radius_round_trip() {
        let e = ModelSpace::euclidean(2).unwrap();
        assert!((e.volume_radius(PI).unwrap() - 1.0).abs() < 1e-15);
        let h = ModelSpace::new(2, 1.0).unwrap();
        assert!((h.volume_radius(3.41227).unwrap() - 1.0).abs() < 1e-6);
        for n in [2, 3, 4] {
            let ms = ModelSpace::new(n, 1.0).unwrap();
            for k in 1..=50 {
                let r = 0.1 * k as f64;
                let back = ms.volume_radius(ms.ball_volume(r).unwrap()).unwrap();
                assert!((back - r).abs() <= 1e-12 * r, "n={n} r={r} back={back}");
            }
        }
        assert!(h.volume_radius(-1.0).is_err());
    }

    #[test]
    fn unit_eigenvalues() {
        let l2 = euclidean_unit_eigenvalue(2).unwrap();
        assert!((l2 - 5.783_185_962_946_784).abs() < 1e-9, "{l2}");
        let l3 = euclidean_unit_eigenvalue(3).unwrap();
        assert!((l3 - PI * PI).abs() < 1e-9, "{l3}");
    }

    #[test]
    fn hyperbolic_floor_and_monotonicity() {
        let h = ModelSpace::new(2, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for r in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let l = h.ball_eigenvalue(r).unwrap();
            assert!(l > 0.25, "r={r} λ={l}");
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn radius_for_eigenvalue_errors_below_floor() {
        let h = ModelSpace::new(3, 1.0).unwrap();
        assert!(matches!(h.ball_radius_for_eigenvalue(1.0), Err(Error::NoFiniteBall { .. })));
        assert!(matches!(h.ball_radius_for_eigenvalue(0.5), Err(Error::NoFiniteBall { .. })));
    }

    #[test]
    fn exponent_order_is_checked() {
        assert!(matches!(euclidean_k(2, 2.0, 2.0), Err(Error::ExponentOrder { .. })));
        let e = ModelSpace::euclidean(2).unwrap();
        assert!(matches!(e.reverse_holder_constant(5.0, 2.0, 1.0), Err(Error::ExponentOrder { .. })));
    }

    #[test]
    fn radius_for_eigenvalue_examples() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        assert!((e3.ball_radius_for_eigenvalue(PI * PI).unwrap() - 1.0).abs() < 1e-10);
        let e2 = ModelSpace::euclidean(2).unwrap();
        let r = e2.ball_radius_for_eigenvalue(4.0 * 5.783_185_962_9).unwrap();
        assert!((r - 0.5).abs() < 1e-8);
        let h = ModelSpace::new(2, 1.0).unwrap();
        for r in [0.3, 1.0, 2.5] {
            let back = h.ball_radius_for_eigenvalue(h.ball_eigenvalue(r).unwrap()).unwrap();
            assert!((back - r).abs() < 1e-8 * r);
        }
    }

    #[test]
    fn three_dimensional_profile_is_sinc() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        let sol = e3.radial_eigenfunction(1.0).unwrap();
        for k in 1..100 {
            let r = k as f64 / 100.0;
            let exact = (PI * r).sin() / (PI * r);
            assert!((sol.psi(r) - exact).abs() < 1e-8, "r={r}");
        }
        // ∫ψ dm = 4/π, ∫ψ² dm = 2/π for the sup-normalised profile
        assert!((sol.power_integral(1.0) - 4.0 / PI).abs() < 1e-10);
        assert!((sol.power_integral(2.0) - 2.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn profile_decreases_and_matches_volume_coordinate() {
        let h = ModelSpace::new(2, 1.0).unwrap();
        let sol = h.radial_eigenfunction(1.0).unwrap();
        assert_eq!(sol.radial_grid[0].1, 1.0);
        assert_eq!(sol.radial_grid.last().unwrap().1, 0.0);
        for w in sol.radial_grid.windows(2) {
            assert!(w[1].1 < w[0].1);
            assert!(w[1].2 < 0.0);
        }
        for w in sol.volume_profile.windows(2) {
            assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1);
        }
        for (i, &(r, psi, _)) in sol.radial_grid.iter().enumerate().step_by(97) {
            let v = sol.volume_profile[i].0;
            assert!((v - h.ball_volume(r).unwrap()).abs() < 1e-11 * v.max(1e-12));
            assert!((sol.psi_star(v) - psi).abs() < 1e-9);
        }
        let res = sol.integrated_equation_residual(0.01 * sol.r_max);
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn euclidean_profile_satisfies_integrated_equation() {
        for n in [2, 3] {
            let sol = ModelSpace::euclidean(n).unwrap().radial_eigenfunction(1.0).unwrap();
            assert!(sol.integrated_equation_residual(0.01) < 1e-8);
        }
    }

    #[test]
    fn k_constants() {
        let k2 = euclidean_k(2, 1.0, 2.0).unwrap();
        assert!((k2 - 4.0 * PI).abs() < 1e-8, "{k2}");
        let k3 = euclidean_k(3, 1.0, 2.0).unwrap();
        assert!((k3 - 8.0 * PI * PI).abs() < 1e-8, "{k3}");
    }

    #[test]
    fn reverse_holder_constant_scales_with_k() {
        let e2 = ModelSpace::euclidean(2).unwrap();
        for (p, q) in [(1.0, 2.0), (0.5, 3.0)] {
            let k = euclidean_k(2, p, q).unwrap();
            for lambda in [1.0, 5.78, 100.0] {
                let c = e2.reverse_holder_constant(lambda, p, q).unwrap();
                let expect = k * lambda.powf(2.0 * (p - q) / 2.0);
                assert!((c - expect).abs() < 1e-9 * expect, "p={p} q={q} λ={lambda}");
            }
        }
        // Payne–Rayner equality on the disk: λ(∫ψ)²/∫ψ² = 4π
        let l = euclidean_unit_eigenvalue(2).unwrap();
        let c = e2.reverse_holder_constant(l, 1.0, 2.0).unwrap();
        assert!((l * c - 4.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn euclidean_limit_is_second_order() {
        for n in [2, 3] {
            let r = 1.3;
            let flat = ModelSpace::euclidean(n).unwrap().ball_volume(r).unwrap();
            let d3 = ModelSpace::new(n, 1e-3).unwrap().ball_volume(r).unwrap() - flat;
            let d4 = ModelSpace::new(n, 1e-4).unwrap().ball_volume(r).unwrap() - flat;
            let ratio = d3 / d4;
            assert!((ratio - 100.0).abs() < 20.0, "n={n} ratio={ratio}");
        }
        let l0 = ModelSpace::euclidean(2).unwrap().ball_eigenvalue(1.0).unwrap();
        let l1 = ModelSpace::new(2, 1e-4).unwrap().ball_eigenvalue(1.0).unwrap();
        assert!((l1 - l0).abs() < 1e-6);
    }

    #[test]
    fn monotone_in_radius() {
        for kappa in [0.0, 1.0] {
            let ms = ModelSpace::new(3, kappa).unwrap();
            let mut prev = (0.0, 0.0, f64::INFINITY);
            for k in 1..=12 {
                let r = 0.25 * k as f64;
                let cur = (ms.ball_volume(r).unwrap(), ms.boundary_volume(r).unwrap(), ms.ball_eigenvalue(r).unwrap());
                assert!(cur.0 > prev.0 && cur.1 > prev.1 && cur.2 < prev.2);
                if kappa > 0.0 {
                    assert!(cur.2 > ms.spectral_floor());
                }
                prev = cur;
            }
        }
    }
}
