//! First Dirichlet eigenpair of `−Δ_g` on a triangulated conformal domain.
//!
//! Linear elements: the stiffness matrix uses Euclidean gradients (the
//! Dirichlet energy is conformally invariant in two dimensions) and the mass
//! matrix carries the weight `e^{2u}`. The smallest eigenpair is found by
//! inverse iteration on the Cholesky-factored interior stiffness.
//!
//! Boundary normal derivatives come from the residual of the discrete
//! equation on boundary rows, `r_b = (Kφ − λMφ)_b = ∫ ∂_η φ N_b dσ`,
//! which makes `Σ flux·length = −λ∫φ dm` hold to solver precision.

use std::io::Write;
use std::sync::Arc;

use crate::domain::geometry::check_model_compat;
use crate::domain::{measure, ConformalSurface, TriMesh};
use crate::error::{Error, Result};
use crate::model_space::ModelSpace;
use crate::numeric::quadrature::gl16;
use crate::numeric::sparse::{conjugate_gradient, CsrMatrix};
use crate::numeric::triangle::TriangleRule;
use crate::report::{fmt12, CheckRecord};

pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// `∫φ² dm`, equal to 1 after normalisation
    pub l2_squared: f64,
    /// `∫φ dm`
    pub l1: f64,
    /// `∫|∇φ|² dm`
    pub dirichlet: f64,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda_h: f64,
    /// Nodal values, zero on the boundary, `∫φ² dm = 1`.
    pub phi: Vec<f64>,
    /// Outward metric normal derivative averaged over each boundary edge
    /// (negative for a positive eigenfunction).
    pub boundary_flux: Vec<f64>,
    /// Outward metric normal derivative at each boundary vertex.
    pub nodal_flux: Vec<f64>,
    /// Metric length of each boundary edge.
    pub edge_length: Vec<f64>,
    pub norm_report: NormReport,
    /// `|Ω|_g` by the mass-matrix quadrature.
    pub metric_area: f64,
    pub mesh_ref: String,
    pub mesh: Arc<TriMesh>,
    pub surface: ConformalSurface,
    pub iterations: usize,
    pub residual: f64,
}

/// Assembled linear-element system.
pub struct Assembly {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub metric_area: f64,
}

/// Assembles stiffness and `e^{2u}`-weighted mass matrices, checking that the
/// curvature is nonpositive at every quadrature point.
pub fn assemble(mesh: &TriMesh, surface: &ConformalSurface) -> Result<Assembly> {
    surface.check_contains(&mesh.vertices)?;
    let rule = TriangleRule::degree4();
    let mut mass = Vec::with_capacity(9 * mesh.triangles.len());
    let mut metric_area = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.triangle_points(t);
        let area = mesh.signed_area(t);
        if !(area > 0.0) {
            return Err(Error::Assembly(format!("triangle {t} has non-positive area {area:e}")));
        }
        let mut local = [[0.0; 3]; 3];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
            ];
            if !surface.is_euclidean() {
                surface.check_curvature(&[x])?;
            }
            let wt = w * area * surface.area_weight(x);
            metric_area += wt;
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] += wt * l[i] * l[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                mass.push((tri[i], tri[j], local[i][j]));
            }
        }
    }
    Ok(Assembly {
        stiffness: mesh.stiffness(),
        mass: CsrMatrix::from_triplets(mesh.n_vertices(), mass),
        metric_area,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Smallest eigenpair of the generalized problem `Kφ = λMφ` with Dirichlet
/// conditions; `tol` bounds the relative eigenvalue change and residual.
pub fn first_eigen(mesh: &TriMesh, surface: &ConformalSurface, tol: f64) -> Result<EigenResult> {
    first_eigen_shared(Arc::new(mesh.clone()), surface, tol)
}

pub fn first_eigen_shared(mesh: Arc<TriMesh>, surface: &ConformalSurface, tol: f64) -> Result<EigenResult> {
    if !(1e-12..=1e-2).contains(&tol) {
        return Err(Error::Config(format!("eigen tolerance must lie in [1e-12, 1e-2], got {tol}")));
    }
    let asm = assemble(&mesh, surface)?;
    let nb = mesh.n_boundary;
    let nv = mesh.n_vertices();
    let ni = nv - nb;
    if ni == 0 {
        return Err(Error::Assembly("mesh has no interior vertices".into()));
    }
    let map_i: Vec<usize> = (0..nv).map(|v| if v >= nb { v - nb } else { usize::MAX }).collect();
    let kii = asm.stiffness.submatrix(&map_i, ni, &map_i, ni).into_square();
    let mii = asm.mass.submatrix(&map_i, ni, &map_i, ni).into_square();
    let (perm, chol) = crate::domain::mesh::factor_reordered(&kii)?;

    let mut x = vec![1.0; ni];
    let mut rho_prev = f64::INFINITY;
    let mut res_hist: Vec<f64> = Vec::new();
    let mut converged = None;
    for it in 1..=MAX_ITERATIONS {
        let mx = mii.mul_vec(&x);
        let mut y = crate::domain::mesh::solve_reordered(&perm, &chol, &mx);
        let my = mii.mul_vec(&y);
        let ym = dot(&y, &my).sqrt();
        for v in y.iter_mut() {
            *v /= ym;
        }
        let ky = kii.mul_vec(&y);
        let my: Vec<f64> = my.iter().map(|v| v / ym).collect();
        let rho = dot(&y, &ky);
        let r: Vec<f64> = ky.iter().zip(&my).map(|(k, m)| k - rho * m).collect();
        let res = norm(&r) / (rho * norm(&my));
        x = y;
        let drho = (rho - rho_prev).abs() / rho;
        rho_prev = rho;
        res_hist.push(res);
        // accept once the residual stops improving near round-off level
        let stalled = res_hist.len() > 8 && res < 1e-8 && res > 0.9 * res_hist[res_hist.len() - 6];
        if drho < tol && (res < tol || stalled) {
            converged = Some((it, res));
            break;
        }
    }
    let Some((iterations, residual)) = converged else {
        return Err(Error::Solver {
            what: "inverse iteration",
            diagnostics: format!(
                "no convergence in {MAX_ITERATIONS} iterations, last relative residual {:e}",
                res_hist.last().copied().unwrap_or(f64::NAN)
            ),
        });
    };
    let mut phi = vec![0.0; nv];
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    for (k, v) in x.iter().enumerate() {
        phi[nb + k] = sign * v;
    }
    let mphi = asm.mass.mul_vec(&phi);
    let l2 = dot(&phi, &mphi);
    let s = 1.0 / l2.sqrt();
    for v in phi.iter_mut() {
        *v *= s;
    }
    let mphi: Vec<f64> = mphi.iter().map(|v| v * s).collect();
    let kphi = asm.stiffness.mul_vec(&phi);
    let dirichlet = dot(&phi, &kphi);
    let l2_squared = dot(&phi, &mphi);
    let lambda = dirichlet / l2_squared;
    let l1 = mphi.iter().sum();

    let residual_rows: Vec<f64> = (0..nb).map(|b| kphi[b] - lambda * mphi[b]).collect();
    let flux = recover_flux(&mesh, surface, &residual_rows)?;
    Ok(EigenResult {
        lambda_h: lambda,
        phi,
        boundary_flux: flux.edge_flux,
        nodal_flux: flux.nodal,
        edge_length: flux.edge_length,
        norm_report: NormReport { l2_squared, l1, dirichlet },
        metric_area: asm.metric_area,
        mesh_ref: mesh.mesh_ref(),
        mesh,
        surface: surface.clone(),
        iterations,
        residual,
    })
}

pub(crate) struct Flux {
    pub nodal: Vec<f64>,
    pub edge_flux: Vec<f64>,
    pub edge_length: Vec<f64>,
}

/// Solves `M_∂ q = r` with the `e^u`-weighted boundary mass matrix and
/// averages `q` over edges.
pub(crate) fn recover_flux(mesh: &TriMesh, surface: &ConformalSurface, residual_rows: &[f64]) -> Result<Flux> {
    let nb = mesh.n_boundary;
    let rule = gl16();
    let mut trip = Vec::with_capacity(4 * nb);
    let mut edge_length = Vec::with_capacity(nb);
    // ∫_e e^u N_a N_b, ∫_e e^u N_a, ∫_e e^u N_b per edge
    let mut edge_moments = Vec::with_capacity(nb);
    for i in 0..nb {
        let (a, b) = mesh.boundary_edge(i);
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        let (mut maa, mut mab, mut mbb) = (0.0, 0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = 0.5 * (x + 1.0);
            let p = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let wt = 0.5 * w * len * surface.length_weight(p);
            maa += wt * (1.0 - s) * (1.0 - s);
            mab += wt * (1.0 - s) * s;
            mbb += wt * s * s;
        }
        trip.push((a, a, maa));
        trip.push((a, b, mab));
        trip.push((b, a, mab));
        trip.push((b, b, mbb));
        edge_length.push(maa + 2.0 * mab + mbb);
        edge_moments.push((maa + mab, mab + mbb));
    }
    let mb = CsrMatrix::from_triplets(nb, trip);
    let q = conjugate_gradient(&mb, residual_rows, 1e-15, 10 * nb + 100);
    let edge_flux = (0..nb)
        .map(|i| {
            let (a, b) = mesh.boundary_edge(i);
            (edge_moments[i].0 * q[a] + edge_moments[i].1 * q[b]) / edge_length[i]
        })
        .collect();
    Ok(Flux { nodal: q, edge_flux, edge_length })
}

/// Per-edge outward normal derivative, recomputed from the eigenpair.
pub fn boundary_flux(result: &EigenResult) -> Result<Vec<f64>> {
    let asm = assemble(&result.mesh, &result.surface)?;
    let kphi = asm.stiffness.mul_vec(&result.phi);
    let mphi = asm.mass.mul_vec(&result.phi);
    let rows: Vec<f64> = (0..result.mesh.n_boundary).map(|b| kphi[b] - result.lambda_h * mphi[b]).collect();
    Ok(recover_flux(&result.mesh, &result.surface, &rows)?.edge_flux)
}

impl EigenResult {
    pub fn sup_norm(&self) -> f64 {
        self.phi.iter().copied().fold(0.0, f64::max)
    }

    /// `∫_Ω φ^p dm` with a degree-8 triangle rule.
    pub fn power_integral(&self, p: f64) -> f64 {
        let rule = TriangleRule::of_degree(8);
        let mesh = &self.mesh;
        let mut s = 0.0;
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let pts = mesh.triangle_points(t);
            let area = mesh.signed_area(t);
            let f = [self.phi[tri[0]], self.phi[tri[1]], self.phi[tri[2]]];
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let x = [
                    l[0] * pts[0][0] + l[1] * pts[1][0] + l[2] * pts[2][0],
                    l[0] * pts[0][1] + l[1] * pts[1][1] + l[2] * pts[2][1],
                ];
                let v = (l[0] * f[0] + l[1] * f[1] + l[2] * f[2]).max(0.0);
                s += w * area * self.surface.area_weight(x) * v.powf(p);
            }
        }
        s
    }

    /// `Σ_e flux_e · |e|_g = ∫_{∂Ω} ∂φ/∂η dσ`.
    pub fn total_flux(&self) -> f64 {
        self.boundary_flux.iter().zip(&self.edge_length).map(|(f, l)| f * l).sum()
    }

    /// `∫_{∂Ω} |∂φ/∂η| dσ` from the nodal flux.
    pub fn flux_l1(&self) -> f64 {
        self.boundary_integral(|q, _| q.abs())
    }

    /// `∫_{∂Ω} (∂φ/∂η)² dσ`.
    pub fn flux_l2_squared(&self) -> f64 {
        self.boundary_integral(|q, _| q * q)
    }

    /// `∫_{∂Ω} f(q, x) dσ_g` with `q` the linear interpolant of the nodal
    /// flux, by 16-point Gauss rules on each edge.
    pub fn boundary_integral(&self, f: impl Fn(f64, [f64; 2]) -> f64) -> f64 {
        let mesh = &self.mesh;
        let rule = gl16();
        let mut s = 0.0;
        for i in 0..mesh.n_boundary {
            let (a, b) = mesh.boundary_edge(i);
            let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = 0.5 * (x + 1.0);
                let p = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
                let q = (1.0 - t) * self.nodal_flux[a] + t * self.nodal_flux[b];
                s += 0.5 * w * len * self.surface.length_weight(p) * f(q, p);
            }
        }
        s
    }

    /// Metric perimeter of the mesh boundary.
    pub fn perimeter(&self) -> f64 {
        self.edge_length.iter().sum()
    }

    /// Discrete divergence identity `−Σ flux·len = λ∫φ dm`.
    pub fn flux_compatibility(&self) -> CheckRecord {
        let lhs = -self.total_flux();
        let rhs = self.lambda_h * self.norm_report.l1;
        CheckRecord::close_to("eigen/flux-compatibility", "divergence-theorem", lhs, rhs, 1e-8)
    }

    /// CSV `vertex_id,x,y,phi`.
    pub fn write_eigenfunction_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["vertex_id", "x", "y", "phi"])?;
        for (i, (p, f)) in self.mesh.vertices.iter().zip(&self.phi).enumerate() {
            wtr.write_record([i.to_string(), fmt12(p[0]), fmt12(p[1]), fmt12(*f)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// CSV `edge_id,length,flux`.
    pub fn write_flux_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["edge_id", "length", "flux"])?;
        for (i, (l, f)) in self.edge_length.iter().zip(&self.boundary_flux).enumerate() {
            wtr.write_record([i.to_string(), fmt12(*l), fmt12(*f)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Eigenvalues on a mesh and its uniform refinement, with the Richardson
/// estimate of the relative error of the coarse value.
#[derive(Debug, Clone, Copy)]
pub struct ErrorEstimate {
    pub coarse: f64,
    pub fine: f64,
    pub relative_error: f64,
}

pub fn fem_error_estimate(mesh: &TriMesh, surface: &ConformalSurface, tol: f64) -> Result<ErrorEstimate> {
    let coarse = first_eigen(mesh, surface, tol)?.lambda_h;
    let fine = first_eigen(&mesh.refine_uniform(None)?, surface, tol)?.lambda_h;
    Ok(ErrorEstimate { coarse, fine, relative_error: (coarse - fine).abs() * 4.0 / 3.0 / fine })
}

/// Inequality tolerance: the larger of twice the FEM error estimate and 0.5%.
pub fn check_tolerance(estimate: &ErrorEstimate) -> f64 {
    (2.0 * estimate.relative_error).max(0.005)
}

/// `(λ(Ω) − λ(B*))/λ(B*)` with `B*` the model ball of equal metric area.
/// Passes when the margin exceeds `−tol`.
pub fn faber_krahn_check(result: &EigenResult, surface: &ConformalSurface, ms: &ModelSpace, tol: f64) -> Result<CheckRecord> {
    check_model_compat(surface, ms)?;
    let curve = result.mesh.boundary_curve()?;
    let (area, _) = measure(&curve, surface)?;
    let ball = ms.ball_eigenvalue(ms.volume_radius(area)?)?;
    Ok(CheckRecord::at_least("faber-krahn", "faber-krahn", result.lambda_h, ball, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::curve::{disk, square};
    use crate::domain::triangulate;
    use std::f64::consts::PI;

    const J01_SQ: f64 = 5.783_185_962_946_784;

    #[test]
    fn disk_eigenvalue_and_invariants() {
        let m = triangulate(&disk([0.0, 0.0], 1.0, 256).unwrap(), 0.05).unwrap();
        let r = first_eigen(&m, &ConformalSurface::euclidean(), 1e-10).unwrap();
        assert!((r.lambda_h - J01_SQ).abs() < 0.01 * J01_SQ, "{}", r.lambda_h);
        assert!((r.norm_report.l2_squared - 1.0).abs() < 1e-12);
        assert!((r.norm_report.dirichlet - r.lambda_h).abs() <= 1e-10 * r.lambda_h);
        assert!(r.phi[..m.n_boundary].iter().all(|&v| v == 0.0));
        assert!(r.phi[m.n_boundary..].iter().all(|&v| v > 0.0));
        let rec = r.flux_compatibility();
        assert!(rec.pass, "{rec:?}");
        // radial symmetry: nearly constant flux
        let mean = r.boundary_flux.iter().sum::<f64>() / r.boundary_flux.len() as f64;
        let var = r.boundary_flux.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / r.boundary_flux.len() as f64;
        assert!(var.sqrt() / mean.abs() < 0.02);
    }

    #[test]
    fn square_eigenvalue() {
        let m = triangulate(&square([0.5, 0.5], 1.0, 4).unwrap(), 0.04).unwrap();
        let r = first_eigen(&m, &ConformalSurface::euclidean(), 1e-10).unwrap();
        assert!((r.lambda_h - 2.0 * PI * PI).abs() < 0.01 * 2.0 * PI * PI);
    }

    #[test]
    fn scaling_identity() {
        let m = triangulate(&square([0.0, 0.0], 1.0, 4).unwrap(), 0.1).unwrap();
        let e = ConformalSurface::euclidean();
        let l1 = first_eigen(&m, &e, 1e-11).unwrap().lambda_h;
        let l2 = first_eigen(&m.scaled(2.5).unwrap(), &e, 1e-11).unwrap().lambda_h;
        assert!((l2 * 6.25 - l1).abs() < 1e-9 * l1);
    }

    #[test]
    fn stiffness_is_metric_independent() {
        let m = triangulate(&disk([0.0, 0.0], 0.5, 64).unwrap(), 0.08).unwrap();
        let a = assemble(&m, &ConformalSurface::euclidean()).unwrap();
        let b = assemble(&m, &ConformalSurface::poincare(1.0).unwrap()).unwrap();
        assert_eq!(a.stiffness, b.stiffness);
        assert!(b.metric_area > a.metric_area);
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let m = triangulate(&square([0.0, 0.0], 1.0, 4).unwrap(), 0.2).unwrap();
        assert!(matches!(first_eigen(&m, &ConformalSurface::euclidean(), 0.1), Err(Error::Config(_))));
        assert!(matches!(first_eigen(&m, &ConformalSurface::euclidean(), 1e-13), Err(Error::Config(_))));
    }

    #[test]
    fn recomputed_flux_matches_stored() {
        let m = triangulate(&square([0.0, 0.0], 1.0, 4).unwrap(), 0.1).unwrap();
        let r = first_eigen(&m, &ConformalSurface::euclidean(), 1e-10).unwrap();
        let f = boundary_flux(&r).unwrap();
        for (a, b) in f.iter().zip(&r.boundary_flux) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_exports() {
        let m = triangulate(&square([0.0, 0.0], 1.0, 4).unwrap(), 0.2).unwrap();
        let r = first_eigen(&m, &ConformalSurface::euclidean(), 1e-10).unwrap();
        let mut buf = Vec::new();
        r.write_eigenfunction_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("vertex_id,x,y,phi\n"));
        assert_eq!(s.lines().count(), m.n_vertices() + 1);
        let mut buf = Vec::new();
        r.write_flux_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("edge_id,length,flux\n"));
        assert_eq!(s.lines().count(), m.n_boundary + 1);
    }
}
