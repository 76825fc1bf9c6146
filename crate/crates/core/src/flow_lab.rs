//! Boundary flows with normal speed `e^w`, the Hadamard variation of `λ`,
//! and the monotonicity bounds `d/dt log λ ≤ −4π / ∫e^{−w} dσ` (surfaces)
//! and `d/dt λ^{(n−2)/2} ≤ −((n−2)/2) K / ∫e^{−w} dσ` (balls, n ≥ 3).

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use crate::domain::curve::{sub, BoundaryCurve, Point};
use crate::domain::mesh::MIN_ANGLE_DEG;
use crate::domain::{boundary_geodesic_curvature, triangulate, ConformalSurface, TriMesh};
use crate::eigensolver::{first_eigen_shared, EigenResult};
use crate::error::{Error, Result};
use crate::model_space::{euclidean_k, euclidean_unit_eigenvalue, ModelSpace};
use crate::numeric::quadrature::gl16;
use crate::report::{fmt12, CheckRecord};

/// Floor on `k_g` under the curvature law; reaching it aborts the flow.
pub const CURVATURE_FLOOR: f64 = 1e-6;
/// Convex corners turning more than this are replaced by circular arcs.
pub const CORNER_ANGLE: f64 = PI / 6.0;
const ARC_STEP: f64 = PI / 18.0;

#[derive(Clone)]
pub enum VelocityLaw {
    /// `w ≡ 0`
    UnitNormal,
    /// `w = log k_g`
    Curvature,
    /// Bounded `w` given as a function of position.
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl fmt::Debug for VelocityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl VelocityLaw {
    pub fn name(&self) -> &'static str {
        match self {
            VelocityLaw::UnitNormal => "unit_normal",
            VelocityLaw::Curvature => "curvature",
            VelocityLaw::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub law: VelocityLaw,
    pub dt: f64,
    pub steps: usize,
    pub remesh_h: f64,
    pub eigen_tol: f64,
    /// Fourier modes kept when smoothing `w` along the curve (curvature law).
    pub filter_modes: usize,
}

impl FlowConfig {
    pub fn new(law: VelocityLaw, dt: f64, steps: usize, remesh_h: f64) -> Self {
        FlowConfig { law, dt, steps, remesh_h, eigen_tol: 1e-10, filter_modes: 12 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("a flow needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.remesh_h > 0.0) {
            return Err(Error::Config(format!("remesh_h must be positive, got {}", self.remesh_h)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowStep {
    pub t: f64,
    pub lambda: f64,
    /// `|∂Ω|_g`
    pub perimeter: f64,
    /// `∫_{∂Ω} e^{−w} dσ`
    pub weighted_perimeter: f64,
    pub dlambda_hadamard: f64,
    pub dlambda_fd: f64,
    /// Finite-difference `d/dt log λ`.
    pub dlog_fd: f64,
    /// `−4π / ∫e^{−w} dσ`
    pub bound: f64,
    /// `(−d/dt log λ − 4π/∫e^{−w})/(4π/∫e^{−w})`
    pub margin: f64,
    /// `∫e^w (∂φ/∂η)² dσ · ∫e^{−w} dσ` and `(∫|∂φ/∂η| dσ)²`
    pub cauchy_schwarz: (f64, f64),
    /// `(∫∂φ/∂η dσ)²` and `4πλ`
    pub flux_bound: (f64, f64),
    pub n_boundary: usize,
    pub remeshed: bool,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub law: String,
    pub dt: f64,
    pub steps: Vec<FlowStep>,
}

/// Interpolates per-curve-vertex values to the mesh boundary vertices.
pub fn curve_to_mesh_boundary(mesh: &TriMesh, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != mesh.curve_len {
        return Err(Error::Input(format!("expected {} curve values, got {}", mesh.curve_len, values.len())));
    }
    let n = mesh.curve_len;
    Ok(mesh.boundary_param.iter().map(|&(e, s)| (1.0 - s) * values[e] + s * values[(e + 1) % n]).collect())
}

/// `dλ/dt = −∫ V (∂φ/∂η)² dσ` for a metric normal speed `V` given at each
/// mesh boundary vertex and interpolated linearly along edges.
pub fn hadamard_derivative(result: &EigenResult, velocity: &[f64]) -> Result<f64> {
    let mesh = &result.mesh;
    if velocity.len() != mesh.n_boundary {
        return Err(Error::Input(format!("expected {} boundary speeds, got {}", mesh.n_boundary, velocity.len())));
    }
    let rule = gl16();
    let mut s = 0.0;
    for i in 0..mesh.n_boundary {
        let (a, b) = mesh.boundary_edge(i);
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (x + 1.0);
            let p = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let q = (1.0 - t) * result.nodal_flux[a] + t * result.nodal_flux[b];
            let v = (1.0 - t) * velocity[a] + t * velocity[b];
            s += 0.5 * w * len * result.surface.length_weight(p) * v * q * q;
        }
    }
    Ok(-s)
}

/// Hadamard derivative for a deformation field `χ` in coordinates: the
/// metric normal speed is `e^u χ·n` on each edge.
pub fn hadamard_derivative_field(result: &EigenResult, field: impl Fn(Point) -> Point) -> f64 {
    let mesh = &result.mesh;
    let rule = gl16();
    let mut s = 0.0;
    for i in 0..mesh.n_boundary {
        let (a, b) = mesh.boundary_edge(i);
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let d = sub(pb, pa);
        let len = d[0].hypot(d[1]);
        let nrm = [d[1] / len, -d[0] / len];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (x + 1.0);
            let p = [pa[0] + t * d[0], pa[1] + t * d[1]];
            let q = (1.0 - t) * result.nodal_flux[a] + t * result.nodal_flux[b];
            let chi = field(p);
            let e_u = result.surface.length_weight(p);
            // e^u χ·n is the g-normal speed, e^u ds the g-length element
            s += 0.5 * w * len * e_u * e_u * (chi[0] * nrm[0] + chi[1] * nrm[1]) * q * q;
        }
    }
    -s
}

/// Low-pass filter of a periodic sequence keeping modes `|k| ≤ modes`.
pub fn fourier_lowpass(values: &[f64], modes: usize) -> Vec<f64> {
    let n = values.len();
    let kmax = modes.min((n - 1) / 2);
    let mut out = vec![0.0; n];
    for k in 0..=kmax {
        let (mut c, mut s) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let a = 2.0 * PI * (k * j) as f64 / n as f64;
            c += v * a.cos();
            s += v * a.sin();
        }
        let scale = if k == 0 { 1.0 } else { 2.0 } / n as f64;
        for (j, o) in out.iter_mut().enumerate() {
            let a = 2.0 * PI * (k * j) as f64 / n as f64;
            *o += scale * (c * a.cos() + s * a.sin());
        }
    }
    out
}

/// `w` at each curve vertex for the given law.
fn law_exponent(curve: &BoundaryCurve, surface: &ConformalSurface, cfg: &FlowConfig) -> Result<Vec<f64>> {
    match &cfg.law {
        VelocityLaw::UnitNormal => Ok(vec![0.0; curve.len()]),
        VelocityLaw::Custom(w) => {
            let v: Vec<f64> = curve.vertices().iter().map(|&p| w(p)).collect();
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Flow("custom exponent w is not finite on the boundary".into()));
            }
            Ok(v)
        }
        VelocityLaw::Curvature => {
            let k = boundary_geodesic_curvature(curve, surface)?;
            if let Some((i, kv)) = k.iter().enumerate().find(|(_, &kv)| kv < CURVATURE_FLOOR) {
                return Err(Error::Flow(format!(
                    "geodesic curvature {kv:e} at vertex {i} is below the floor {CURVATURE_FLOOR:e}; the boundary is not strictly convex"
                )));
            }
            let logs: Vec<f64> = k.iter().map(|x| x.ln()).collect();
            Ok(fourier_lowpass(&logs, cfg.filter_modes))
        }
    }
}

/// Euler step of the curve: each vertex moves by `d_i = dt e^{w_i} e^{−u}`
/// along its miter vector, so each edge is offset by the interpolated
/// distance. Sharp convex corners open into circular arcs.
fn advance_curve(curve: &BoundaryCurve, surface: &ConformalSurface, w: &[f64], dt: f64, max_disp: f64) -> Result<BoundaryCurve> {
    let n = curve.len();
    let mut out = Vec::with_capacity(n + 16);
    for i in 0..n {
        let p = curve.vertex(i);
        let d = dt * w[i].exp() / surface.length_weight(p);
        if d > max_disp {
            return Err(Error::StepSize(format!(
                "vertex {i} would move {d:.3e} > {max_disp:.3e}; reduce dt below {:.3e}",
                dt * max_disp / d
            )));
        }
        let na = curve.edge_normal((i + n - 1) % n);
        let nb = curve.edge_normal(i);
        let turn = curve.turning_angle(i);
        if turn > CORNER_ANGLE {
            let a0 = na[1].atan2(na[0]);
            let k = (turn / ARC_STEP).ceil() as usize;
            for j in 0..=k {
                let a = a0 + turn * j as f64 / k as f64;
                out.push([p[0] + d * a.cos(), p[1] + d * a.sin()]);
            }
        } else {
            let c = 1.0 + na[0] * nb[0] + na[1] * nb[1];
            let m = [(na[0] + nb[0]) / c, (na[1] + nb[1]) / c];
            out.push([p[0] + d * m[0], p[1] + d * m[1]]);
        }
    }
    if !out.iter().all(|&p| surface.contains(p)) {
        return Err(Error::Flow("the boundary left the surface".into()));
    }
    BoundaryCurve::new(out).map_err(|e| Error::StepSize(format!("curve became invalid after the step ({e}); reduce dt")))
}

/// Per-state quantities before differencing.
struct Sample {
    t: f64,
    result: EigenResult,
    w_mesh: Vec<f64>,
    remeshed: bool,
}

fn boundary_quantities(s: &Sample) -> Result<(f64, f64, (f64, f64), (f64, f64))> {
    let r = &s.result;
    let speed: Vec<f64> = s.w_mesh.iter().map(|w| w.exp()).collect();
    let dlam = hadamard_derivative(r, &speed)?;
    // ∫e^{−w} dσ with w interpolated linearly along each edge
    let mesh = &r.mesh;
    let rule = gl16();
    let mut weighted = 0.0;
    for i in 0..mesh.n_boundary {
        let (a, b) = mesh.boundary_edge(i);
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        for (x, wq) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (x + 1.0);
            let p = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let w = (1.0 - t) * s.w_mesh[a] + t * s.w_mesh[b];
            weighted += 0.5 * wq * len * r.surface.length_weight(p) * (-w).exp();
        }
    }
    let l1 = r.flux_l1();
    let total = r.total_flux();
    Ok((dlam, weighted, (-dlam * weighted, l1 * l1), (total * total, 4.0 * PI * r.lambda_h)))
}

/// Three-point derivative on a uniform grid: central inside, one-sided at
/// the ends.
pub fn uniform_derivative(y: &[f64], dt: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 3, "need three samples to differentiate");
    (0..n)
        .map(|k| {
            if k == 0 {
                (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt)
            } else if k == n - 1 {
                (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dt)
            } else {
                (y[k + 1] - y[k - 1]) / (2.0 * dt)
            }
        })
        .collect()
}

/// Runs the flow for `cfg.steps` Euler steps and records `cfg.steps + 1`
/// states. The mesh follows the boundary by harmonic transport and is
/// rebuilt when the curve gains vertices or its quality degrades.
pub fn evolve(curve: &BoundaryCurve, surface: &ConformalSurface, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    let h = cfg.remesh_h;
    let mut curve = curve.clone();
    let mut mesh = Arc::new(triangulate(&curve, h)?);
    let mut remeshed = true;
    let mut samples: Vec<Sample> = Vec::with_capacity(cfg.steps + 1);
    for k in 0..=cfg.steps {
        let t = k as f64 * cfg.dt;
        let result = first_eigen_shared(mesh.clone(), surface, cfg.eigen_tol)?;
        let w = law_exponent(&curve, surface, cfg)?;
        let w_mesh = curve_to_mesh_boundary(&mesh, &w)?;
        samples.push(Sample { t, result, w_mesh, remeshed });
        if k == cfg.steps {
            break;
        }
        let next = advance_curve(&curve, surface, &w, cfg.dt, 0.25 * h)?;
        remeshed = next.len() != curve.len();
        let moved = if remeshed { None } else { mesh.transported(&next).ok().filter(|m| m.min_angle_deg() >= MIN_ANGLE_DEG) };
        mesh = Arc::new(match moved {
            Some(m) => m,
            None => {
                remeshed = true;
                triangulate(&next, h)?
            }
        });
        curve = next;
    }

    let lambdas: Vec<f64> = samples.iter().map(|s| s.result.lambda_h).collect();
    let logs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let dl = uniform_derivative(&lambdas, cfg.dt);
    let dlog = uniform_derivative(&logs, cfg.dt);
    let mut steps = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        let (dlam, weighted, cs, fb) = boundary_quantities(s)?;
        let rate = 4.0 * PI / weighted;
        steps.push(FlowStep {
            t: s.t,
            lambda: lambdas[k],
            perimeter: s.result.perimeter(),
            weighted_perimeter: weighted,
            dlambda_hadamard: dlam,
            dlambda_fd: dl[k],
            dlog_fd: dlog[k],
            bound: -rate,
            margin: (-dlog[k] - rate) / rate,
            cauchy_schwarz: cs,
            flux_bound: fb,
            n_boundary: s.result.mesh.n_boundary,
            remeshed: s.remeshed,
        });
    }
    Ok(FlowTrace { law: cfg.law.name().to_string(), dt: cfg.dt, steps })
}

impl FlowTrace {
    /// CSV `t,lambda,perimeter,weighted_perimeter,dlambda_hadamard,dlambda_fd,bound,margin`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "lambda", "perimeter", "weighted_perimeter", "dlambda_hadamard", "dlambda_fd", "bound", "margin"])?;
        for s in &self.steps {
            wtr.write_record(
                [s.t, s.lambda, s.perimeter, s.weighted_perimeter, s.dlambda_hadamard, s.dlambda_fd, s.bound, s.margin].map(fmt12),
            )?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Relative gap between the Hadamard and finite-difference derivatives.
    pub fn derivative_gaps(&self) -> Vec<f64> {
        self.steps.iter().map(|s| (s.dlambda_hadamard - s.dlambda_fd).abs() / s.dlambda_fd.abs()).collect()
    }
}

/// One record per step for `d/dt log λ ≤ −4π/∫e^{−w} dσ`.
pub fn monotonicity_check(trace: &FlowTrace, n: usize, tol: f64) -> Result<Vec<CheckRecord>> {
    if n != 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(trace
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| CheckRecord::inequality(format!("flow/{}/monotonicity/step={k}", trace.law), "eigenvalue-monotonicity", -s.dlog_fd, -s.bound, s.margin, tol))
        .collect())
}

/// Per-step Cauchy–Schwarz and `(∫∂φ/∂η)² ≥ 4πλ` records, plus the
/// requirement that `λ` decreases strictly along the trace.
pub fn step_identity_checks(trace: &FlowTrace, tol: f64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (k, s) in trace.steps.iter().enumerate() {
        out.push(CheckRecord::at_least(format!("flow/{}/cauchy-schwarz/step={k}", trace.law), "cauchy-schwarz", s.cauchy_schwarz.0, s.cauchy_schwarz.1, 1e-9));
        out.push(CheckRecord::at_least(format!("flow/{}/flux-square/step={k}", trace.law), "boundary-flux-bound", s.flux_bound.0, s.flux_bound.1, tol));
        if k > 0 {
            let prev = trace.steps[k - 1].lambda;
            out.push(CheckRecord::inequality(format!("flow/{}/decreasing/step={k}", trace.law), "domain-monotonicity", prev, s.lambda, (prev - s.lambda) / prev, 0.0));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialLaw {
    UnitNormal,
    /// Speed `H = (n−1)/R`, the sum of principal curvatures.
    MeanCurvature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialFlowPoint {
    pub t: f64,
    pub radius: f64,
    /// `d/dt λ^{(n−2)/2}` (for n = 2, `d/dt log λ`)
    pub lhs: f64,
    pub bound: f64,
}

/// Both sides of the monotonicity bound for Euclidean balls `B_{R(t)}` in
/// closed form, with `K = K(n,1,2)` from radial quadrature.
pub fn radial_flow_check(n: usize, law: RadialLaw, r0: f64, t_grid: &[f64], tol: f64) -> Result<(Vec<RadialFlowPoint>, Vec<CheckRecord>)> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    radial_sides(n, law, r0, t_grid, tol)
}

/// The `n = 2` log form on disks: `d/dt log λ = −2Ṙ/R` against `−4π Ṙ/|∂B_R|`.
pub fn radial_flow_check_planar(law: RadialLaw, r0: f64, t_grid: &[f64], tol: f64) -> Result<(Vec<RadialFlowPoint>, Vec<CheckRecord>)> {
    radial_sides(2, law, r0, t_grid, tol)
}

fn radial_sides(n: usize, law: RadialLaw, r0: f64, t_grid: &[f64], tol: f64) -> Result<(Vec<RadialFlowPoint>, Vec<CheckRecord>)> {
    if !(r0 > 0.0) {
        return Err(Error::Input(format!("initial radius must be positive, got {r0}")));
    }
    let ms = ModelSpace::euclidean(n)?;
    let nf = n as f64;
    let lambda1 = euclidean_unit_eigenvalue(n)?;
    let k = if n >= 3 { euclidean_k(n, 1.0, 2.0)? } else { 4.0 * PI };
    let mut pts = Vec::new();
    let mut recs = Vec::new();
    for &t in t_grid {
        let (r, speed) = match law {
            RadialLaw::UnitNormal => (r0 + t, 1.0),
            RadialLaw::MeanCurvature => {
                let r = (r0 * r0 + 2.0 * (nf - 1.0) * t).sqrt();
                (r, (nf - 1.0) / r)
            }
        };
        // ∫e^{−w} dσ with e^w = speed
        let weighted = ms.boundary_volume(r)? / speed;
        let (lhs, bound) = if n == 2 {
            (-2.0 * speed / r, -4.0 * PI / weighted)
        } else {
            let e = 0.5 * (nf - 2.0);
            // λ^{(n−2)/2} = λ₁^{(n−2)/2} R^{2−n}
            (-(nf - 2.0) * lambda1.powf(e) * r.powf(1.0 - nf) * speed, -e * k / weighted)
        };
        let margin = (bound - lhs) / bound.abs();
        recs.push(CheckRecord::equality(format!("radial-flow/n={n}/{law:?}/t={t}"), "ball-equality", lhs, bound, margin, tol));
        pts.push(RadialFlowPoint { t, radius: r, lhs, bound });
    }
    Ok((pts, recs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::curve::{disk, square};

    #[test]
    fn lowpass_keeps_smooth_and_removes_noise() {
        let n = 128;
        let smooth: Vec<f64> = (0..n).map(|j| 1.0 + 0.3 * (2.0 * PI * 3.0 * j as f64 / n as f64).cos()).collect();
        let noisy: Vec<f64> = smooth.iter().enumerate().map(|(j, v)| v + if j % 2 == 0 { 0.01 } else { -0.01 }).collect();
        let f = fourier_lowpass(&noisy, 12);
        for (a, b) in f.iter().zip(&smooth) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_derivative_is_exact_for_quadratics() {
        let y: Vec<f64> = (0..6).map(|k| {
            let t = 0.1 * k as f64;
            2.0 * t * t - t + 3.0
        }).collect();
        let d = uniform_derivative(&y, 0.1);
        for (k, dv) in d.iter().enumerate() {
            assert!((dv - (4.0 * 0.1 * k as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn square_corners_open_into_arcs() {
        let c = square([0.0, 0.0], 1.0, 4).unwrap();
        let e = ConformalSurface::euclidean();
        let next = advance_curve(&c, &e, &vec![0.0; c.len()], 0.01, 0.1).unwrap();
        assert_eq!(next.len(), c.len() - 4 + 4 * 10);
        // offset polygon area 1 + 4d + (area of four arc polygons ≈ πd²)
        let a = next.signed_area();
        assert!((a - (1.0 + 0.04 + PI * 1e-4)).abs() < 2e-6, "{a}");
        assert!(next.is_convex());
    }

    #[test]
    fn step_size_is_enforced() {
        let c = disk([0.0, 0.0], 1.0, 64).unwrap();
        let e = ConformalSurface::euclidean();
        assert!(matches!(advance_curve(&c, &e, &vec![0.0; 64], 0.1, 0.01), Err(Error::StepSize(_))));
    }

    #[test]
    fn curvature_law_needs_strict_convexity() {
        let c = square([0.0, 0.0], 1.0, 4).unwrap();
        let cfg = FlowConfig::new(VelocityLaw::Curvature, 0.001, 2, 0.1);
        assert!(matches!(evolve(&c, &ConformalSurface::euclidean(), &cfg), Err(Error::Flow(_))));
    }

    #[test]
    fn config_validation() {
        let c = disk([0.0, 0.0], 1.0, 64).unwrap();
        let e = ConformalSurface::euclidean();
        assert!(matches!(evolve(&c, &e, &FlowConfig::new(VelocityLaw::UnitNormal, 0.01, 1, 0.1)), Err(Error::Config(_))));
        assert!(matches!(evolve(&c, &e, &FlowConfig::new(VelocityLaw::UnitNormal, -0.01, 4, 0.1)), Err(Error::Config(_))));
    }

    #[test]
    fn radial_equalities() {
        let grid = [0.0, 0.1, 0.5, 1.0];
        let (pts, recs) = radial_flow_check(3, RadialLaw::UnitNormal, 1.0, &grid, 1e-10).unwrap();
        for (p, r) in pts.iter().zip(&recs) {
            assert!((p.lhs + PI / (p.radius * p.radius)).abs() < 1e-10);
            assert!(r.pass, "{r:?}");
        }
        let (pts, recs) = radial_flow_check(3, RadialLaw::MeanCurvature, 1.0, &grid, 1e-10).unwrap();
        for (p, r) in pts.iter().zip(&recs) {
            assert!((p.bound + 2.0 * PI / p.radius.powi(3)).abs() < 1e-10);
            assert!(r.pass, "{r:?}");
        }
        let (pts, recs) = radial_flow_check_planar(RadialLaw::UnitNormal, 1.0, &grid, 1e-12).unwrap();
        for (p, r) in pts.iter().zip(&recs) {
            assert!((p.lhs + 2.0 / p.radius).abs() < 1e-14 && r.pass);
        }
        assert!(matches!(radial_flow_check(2, RadialLaw::UnitNormal, 1.0, &grid, 1e-10), Err(Error::InvalidDimension(2))));
    }
}
