//! Distribution function, decreasing rearrangement and the comparison
//! inequalities built on them: Talenti's pointwise bound, the Chiti
//! majorization, `L^p` ratios, reverse-Hölder and Payne–Rayner.

use std::f64::consts::PI;
use std::io::Write;

use crate::domain::geometry::check_model_compat;
use crate::eigensolver::EigenResult;
use crate::error::{Error, Result};
use crate::model_space::{check_exponents, euclidean_k, ModelSpace, RadialEigenSolution};
use crate::numeric::quadrature::GaussLegendre;
use crate::numeric::triangle::TriangleRule;
use crate::report::{fmt12, CheckRecord};

/// Talenti margins are asserted on `v ∈ [0.05, 0.95]·|Ω|`.
pub const INTERIOR_WINDOW: (f64, f64) = (0.05, 0.95);
pub const MIN_LEVELS: usize = 64;

/// `μ(t) = |{φ ≥ t}|_g` on a level grid and its inverse `φ*(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionProfile {
    pub sup_norm: f64,
    /// Ascending levels in `[0, m]`.
    pub levels: Vec<f64>,
    /// `μ` at each level, descending.
    pub mu_values: Vec<f64>,
    /// Ascending volumes `μ(t)` in reverse level order.
    pub volumes: Vec<f64>,
    /// `φ*` at each volume, descending.
    pub phi_star: Vec<f64>,
    pub total_volume: f64,
    pub dim: usize,
    /// Largest `κ` with `K ≤ −κ²` on the source surface.
    pub kappa_bound: f64,
}

/// Uniform levels on `[0, m]` with the top eight intervals split four ways.
pub fn level_grid(m: f64, n_levels: usize) -> Vec<f64> {
    let n = n_levels;
    let top = 8.min(n);
    let mut t: Vec<f64> = (0..=n - top).map(|i| m * i as f64 / n as f64).collect();
    for i in (4 * (n - top) + 1)..=(4 * n) {
        t.push(m * i as f64 / (4 * n) as f64);
    }
    *t.last_mut().unwrap() = m;
    t
}

fn clip_triangle(p: [[f64; 2]; 3], f: [f64; 3], t: f64, out: &mut Vec<[f64; 2]>) {
    out.clear();
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (da, db) = (f[i] - t, f[j] - t);
        if da >= 0.0 {
            out.push(p[i]);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let s = da / (da - db);
            out.push([p[i][0] + s * (p[j][0] - p[i][0]), p[i][1] + s * (p[j][1] - p[i][1])]);
        }
    }
}

fn weighted_area(a: [f64; 2], b: [f64; 2], c: [f64; 2], rule: &TriangleRule, weight: &dyn Fn([f64; 2]) -> f64) -> f64 {
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    let mut s = 0.0;
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        let x = [l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]];
        s += w * weight(x);
    }
    s * area
}

/// Distribution function of the piecewise-linear eigenfunction, exact per
/// triangle up to the quadrature of `e^{2u}` on the clipped polygons.
pub fn distribution_function(result: &EigenResult, n_levels: usize) -> Result<DistributionProfile> {
    if n_levels < MIN_LEVELS {
        return Err(Error::Config(format!("need at least {MIN_LEVELS} levels, got {n_levels}")));
    }
    let mesh = &result.mesh;
    let surface = &result.surface;
    let rule = TriangleRule::degree4();
    let euclid = surface.is_euclidean();
    let weight = |x: [f64; 2]| if euclid { 1.0 } else { surface.area_weight(x) };
    let m = result.sup_norm();
    let levels = level_grid(m, n_levels);

    struct Tri {
        p: [[f64; 2]; 3],
        f: [f64; 3],
        lo: f64,
        hi: f64,
        full: f64,
    }
    let tris: Vec<Tri> = (0..mesh.triangles.len())
        .map(|k| {
            let idx = mesh.triangles[k];
            let p = mesh.triangle_points(k);
            let f = [result.phi[idx[0]], result.phi[idx[1]], result.phi[idx[2]]];
            Tri { p, f, lo: f[0].min(f[1]).min(f[2]), hi: f[0].max(f[1]).max(f[2]), full: weighted_area(p[0], p[1], p[2], &rule, &weight) }
        })
        .collect();
    let total_volume: f64 = tris.iter().map(|t| t.full).sum();

    let mut poly = Vec::with_capacity(4);
    let mut mu_values = Vec::with_capacity(levels.len());
    for (i, &t) in levels.iter().enumerate() {
        if i == 0 {
            mu_values.push(total_volume);
            continue;
        }
        let mut mu = 0.0;
        for tri in &tris {
            if tri.lo >= t {
                mu += tri.full;
            } else if tri.hi > t {
                clip_triangle(tri.p, tri.f, t, &mut poly);
                for k in 1..poly.len().saturating_sub(1) {
                    mu += weighted_area(poly[0], poly[k], poly[k + 1], &rule, &weight);
                }
            }
        }
        mu_values.push(mu);
    }
    Ok(assemble_profile(m, levels, mu_values, 2, surface.kappa_bound()))
}

fn assemble_profile(m: f64, levels: Vec<f64>, mu_values: Vec<f64>, dim: usize, kappa_bound: f64) -> DistributionProfile {
    let total_volume = mu_values[0];
    let mut volumes: Vec<f64> = mu_values.iter().rev().copied().collect();
    let phi_star: Vec<f64> = levels.iter().rev().copied().collect();
    // the top level is attained on a null set
    volumes[0] = 0.0;
    DistributionProfile { sup_norm: m, levels, mu_values, volumes, phi_star, total_volume, dim, kappa_bound }
}

/// Decreasing rearrangement of a piecewise-linear function of one variable
/// with respect to `dx`, on `n_levels` levels.
pub fn rearrange_1d(x: &[f64], f: &[f64], n_levels: usize) -> DistributionProfile {
    let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let levels = level_grid(m, n_levels);
    let mu_values = levels
        .iter()
        .map(|&t| {
            let mut mu = 0.0;
            for k in 0..x.len() - 1 {
                let (fa, fb, len) = (f[k] - t, f[k + 1] - t, x[k + 1] - x[k]);
                mu += match (fa >= 0.0, fb >= 0.0) {
                    (true, true) => len,
                    (false, false) => 0.0,
                    (true, false) => len * fa / (fa - fb),
                    (false, true) => len * fb / (fb - fa),
                };
            }
            mu
        })
        .collect();
    let mut p = assemble_profile(m, levels, mu_values, 1, 0.0);
    p.total_volume = x[x.len() - 1] - x[0];
    p
}

impl DistributionProfile {
    /// Profile of a model-ball eigenfunction, sampled on its radial grid.
    pub fn from_radial(sol: &RadialEigenSolution) -> Self {
        let m = sol.sup_norm;
        let volumes: Vec<f64> = sol.volume_profile.iter().map(|&(v, _)| v).collect();
        let phi_star: Vec<f64> = sol.volume_profile.iter().map(|&(_, s)| s * m).collect();
        let total_volume = *volumes.last().unwrap();
        DistributionProfile {
            sup_norm: m,
            levels: phi_star.iter().rev().copied().collect(),
            mu_values: volumes.iter().rev().copied().collect(),
            volumes,
            phi_star,
            total_volume,
            dim: sol.space.dim(),
            kappa_bound: sol.space.kappa(),
        }
    }

    /// `φ*(v)` by linear interpolation; zero beyond the total volume.
    pub fn phi_star_at(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return self.sup_norm;
        }
        if v >= self.total_volume {
            return 0.0;
        }
        let k = self.volumes.partition_point(|&x| x <= v);
        if k >= self.volumes.len() {
            return *self.phi_star.last().unwrap();
        }
        let (v0, v1) = (self.volumes[k - 1], self.volumes[k]);
        let s = if v1 > v0 { (v - v0) / (v1 - v0) } else { 0.0 };
        self.phi_star[k - 1] + s * (self.phi_star[k] - self.phi_star[k - 1])
    }

    /// `∫_0^{|Ω|} (φ*)^p dv`.
    pub fn power_integral(&self, p: f64) -> f64 {
        *self.cumulative_power(p).last().unwrap()
    }

    /// `∫_0^{v_j} (φ*)^p dv` at each grid volume.
    pub fn cumulative_power(&self, p: f64) -> Vec<f64> {
        let rule = GaussLegendre::new(6);
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for k in 1..self.volumes.len() {
            let (v0, v1) = (self.volumes[k - 1], self.volumes[k]);
            let (a, b) = (self.phi_star[k - 1], self.phi_star[k]);
            if v1 > v0 {
                acc += rule.integrate(0.0, 1.0, |s| (a + s * (b - a)).max(0.0).powf(p)) * (v1 - v0);
            }
            out.push(acc);
        }
        out
    }

    /// `−(φ*)'` at each grid volume by a monotone three-point stencil
    /// (weighted harmonic mean of the adjacent secants).
    pub fn derivative(&self) -> Vec<f64> {
        let v = &self.volumes;
        let f = &self.phi_star;
        let n = v.len();
        let secant = |k: usize| -> Option<(f64, f64)> {
            let h = v[k + 1] - v[k];
            (h > 0.0).then(|| (h, -(f[k + 1] - f[k]) / h))
        };
        (0..n)
            .map(|k| {
                let left = if k > 0 { secant(k - 1) } else { None };
                let right = if k + 1 < n { secant(k) } else { None };
                match (left, right) {
                    (Some((hl, dl)), Some((hr, dr))) => {
                        if dl <= 0.0 || dr <= 0.0 {
                            0.0
                        } else {
                            let w1 = 2.0 * hr + hl;
                            let w2 = hr + 2.0 * hl;
                            (w1 + w2) / (w1 / dl + w2 / dr)
                        }
                    }
                    (Some((_, d)), None) | (None, Some((_, d))) => d,
                    (None, None) => 0.0,
                }
            })
            .collect()
    }

    fn check_space(&self, ms: &ModelSpace) -> Result<()> {
        if ms.dim() != self.dim {
            return Err(Error::Config(format!("profile is {}-dimensional, model space has n = {}", self.dim, ms.dim())));
        }
        if ms.kappa() > self.kappa_bound + 1e-12 {
            return Err(Error::Config(format!(
                "model curvature −{}² exceeds the curvature bound −{}² of the profile's surface",
                ms.kappa(),
                self.kappa_bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TalentiReport {
    pub volumes: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `(rhs − lhs)/rhs` at each volume in the interior window.
    pub margins: Vec<f64>,
    pub record: CheckRecord,
}

/// Pointwise `−(φ*)'(v) ≤ λ |∂B(v)|^{−2} ∫_0^v φ*`, with `B(v)` the model ball
/// of volume `v`.
pub fn talenti_check(profile: &DistributionProfile, lambda: f64, ms: &ModelSpace, tol: f64) -> Result<TalentiReport> {
    profile.check_space(ms)?;
    let n = profile.dim as f64;
    let cum = profile.cumulative_power(1.0);
    let deriv = profile.derivative();
    let (lo, hi) = (INTERIOR_WINDOW.0 * profile.total_volume, INTERIOR_WINDOW.1 * profile.total_volume);
    let mut rep = TalentiReport { volumes: vec![], lhs: vec![], rhs: vec![], margins: vec![], record: CheckRecord::inequality("", "", 0.0, 0.0, 0.0, 0.0) };
    for (k, &v) in profile.volumes.iter().enumerate() {
        if v < lo || v > hi {
            continue;
        }
        let rhs = if ms.kappa() == 0.0 {
            // closed Euclidean form n^{-2} ω^{-2/n} λ v^{-2+2/n} ∫φ*
            lambda * cum[k] / (n * n * ms.omega().powf(2.0 / n) * v.powf(2.0 - 2.0 / n))
        } else {
            let area = ms.boundary_volume(ms.volume_radius(v)?)?;
            lambda * cum[k] / (area * area)
        };
        rep.volumes.push(v);
        rep.lhs.push(deriv[k]);
        rep.rhs.push(rhs);
        rep.margins.push((rhs - deriv[k]) / rhs);
    }
    if rep.margins.is_empty() {
        return Err(Error::Input("profile has no volumes in the interior window".into()));
    }
    let worst = (0..rep.margins.len()).min_by(|&a, &b| rep.margins[a].total_cmp(&rep.margins[b])).unwrap();
    rep.record = CheckRecord::inequality("talenti", "talenti", rep.rhs[worst], rep.lhs[worst], rep.margins[worst], tol);
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct ChitiReport {
    pub ball: RadialEigenSolution,
    pub volumes: Vec<f64>,
    pub phi_star: Vec<f64>,
    pub psi_star: Vec<f64>,
    /// `(φ* − ψ*)/m` on `[0, |B*|]`.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub record: CheckRecord,
}

/// `φ*(v) ≥ ψ*(v)` on `[0, |B*|]` for the sup-normalised eigenfunction of the
/// model ball with the same eigenvalue.
pub fn chiti_compare(profile: &DistributionProfile, ms: &ModelSpace, lambda: f64, tol: f64) -> Result<ChitiReport> {
    profile.check_space(ms)?;
    let m = profile.sup_norm;
    let ball = ms.eigenfunction_for_eigenvalue(lambda)?.with_sup_norm(m);
    let vb = ball.ball_volume();
    let mut rep = ChitiReport {
        volumes: vec![],
        phi_star: vec![],
        psi_star: vec![],
        margins: vec![],
        min_margin: f64::INFINITY,
        record: CheckRecord::inequality("", "", 0.0, 0.0, 0.0, 0.0),
        ball,
    };
    let mut worst = 0;
    for (k, &v) in profile.volumes.iter().enumerate() {
        if v > vb {
            break;
        }
        let psi = rep.ball.psi_star(v);
        let margin = (profile.phi_star[k] - psi) / m;
        if margin < rep.min_margin {
            rep.min_margin = margin;
            worst = rep.margins.len();
        }
        rep.volumes.push(v);
        rep.phi_star.push(profile.phi_star[k]);
        rep.psi_star.push(psi);
        rep.margins.push(margin);
    }
    rep.record = CheckRecord::inequality("chiti", "chiti", rep.phi_star[worst], rep.psi_star[worst], rep.min_margin, tol);
    Ok(rep)
}

/// Profile CSV `v,phi_star,psi_star,margin` on the Chiti volume grid.
pub fn write_profile_csv<W: Write>(rep: &ChitiReport, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["v", "phi_star", "psi_star", "margin"])?;
    for k in 0..rep.volumes.len() {
        wtr.write_record([fmt12(rep.volumes[k]), fmt12(rep.phi_star[k]), fmt12(rep.psi_star[k]), fmt12(rep.margins[k])])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `‖φ‖_p/‖φ‖_∞ ≥ ‖ψ‖_p/‖ψ‖_∞` against the model ball with the same
/// eigenvalue. Returns `(lhs, rhs, relative margin)` and the record.
pub fn lp_ratio_check(result: &EigenResult, ms: &ModelSpace, p: f64, tol: f64) -> Result<(f64, f64, f64, CheckRecord)> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::ExponentOrder { p, q: f64::NAN });
    }
    check_model_compat(&result.surface, ms)?;
    let lhs = result.power_integral(p).powf(1.0 / p) / result.sup_norm();
    let ball = ms.eigenfunction_for_eigenvalue(result.lambda_h)?;
    let rhs = ball.power_integral(p).powf(1.0 / p) / ball.sup_norm;
    let rec = CheckRecord::at_least(format!("lp-ratio/p={p}"), "lp-ratio", lhs, rhs, tol);
    Ok((lhs, rhs, rec.margin, rec))
}

#[derive(Debug, Clone)]
pub struct ReverseHolderReport {
    /// `(∫φ^p)^q / (∫φ^q)^p`
    pub ratio: f64,
    pub constant: f64,
    /// `ratio/C − 1`
    pub margin: f64,
    pub records: Vec<CheckRecord>,
}

/// `(∫φ^p)^q ≥ C (∫φ^q)^p` with `C` from the model ball. On flat surfaces
/// also the scale-free form with `K(n,p,q)`, and for `(p,q) = (1,2)` the
/// Payne–Rayner bound `λ(∫φ)² ≥ 4π∫φ²`.
pub fn reverse_holder_check(result: &EigenResult, ms: &ModelSpace, p: f64, q: f64, tol: f64) -> Result<ReverseHolderReport> {
    check_exponents(p, q)?;
    check_model_compat(&result.surface, ms)?;
    let lambda = result.lambda_h;
    let ip = result.power_integral(p);
    let iq = result.power_integral(q);
    let log_ratio = q * ip.ln() - p * iq.ln();
    let ratio = log_ratio.exp();
    let constant = ms.reverse_holder_constant(lambda, p, q)?;
    let margin = (log_ratio - constant.ln()).exp() - 1.0;
    let mut records = vec![CheckRecord::inequality(format!("reverse-holder/p={p},q={q}"), "reverse-holder", ratio, constant, margin, tol)];
    if ms.kappa() == 0.0 {
        let n = ms.dim() as f64;
        let k = euclidean_k(ms.dim(), p, q)?;
        let scaled = (0.5 * n * (q - p) * lambda.ln() + log_ratio).exp();
        records.push(CheckRecord::at_least(format!("reverse-holder-k/p={p},q={q}"), "reverse-holder-scaled", scaled, k, tol));
        if p == 1.0 && q == 2.0 {
            let lhs = lambda * ip * ip / iq;
            records.push(CheckRecord::at_least("payne-rayner", "payne-rayner", lhs, 4.0 * PI, tol));
        }
    }
    Ok(ReverseHolderReport { ratio, constant, margin, records })
}

/// `L̃² ≥ 4πÃ` for the metric `|∇φ|² g`: `L̃ = ∫_{∂Ω}|∇φ| dσ`,
/// `Ã = ∫_Ω |∇φ|² dm`.
pub fn conformal_isoperimetric_check(result: &EigenResult, tol: f64) -> (f64, f64, CheckRecord) {
    let l = result.flux_l1();
    let a = result.norm_report.dirichlet;
    let rec = CheckRecord::at_least("conformal-isoperimetric", "eigenfunction-metric-isoperimetric", l * l, 4.0 * PI * a, tol);
    (l * l, 4.0 * PI * a, rec)
}

/// Partial-integral majorization `∫_0^v (ψ*)^p ≥ ∫_0^v (φ*)^p` on
/// `[0, |Ω|]`, with `ψ` scaled so that both total integrals agree and
/// extended by zero beyond `B*`. The margin is the minimum difference in
/// units of `∫(φ*)^p`.
pub fn partial_majorization_check(profile: &DistributionProfile, ms: &ModelSpace, lambda: f64, p: f64, tol: f64) -> Result<CheckRecord> {
    profile.check_space(ms)?;
    let ball = ms.eigenfunction_for_eigenvalue(lambda)?;
    let vb = ball.ball_volume();
    let rule = GaussLegendre::new(6);
    let phi_cum = profile.cumulative_power(p);
    let total_phi = *phi_cum.last().unwrap();
    // ∫(ψ*)^p over the same volume cells, split at |B*|
    let mut psi_cum = vec![0.0];
    let mut acc = 0.0;
    for k in 1..profile.volumes.len() {
        let (a, b) = (profile.volumes[k - 1], profile.volumes[k].min(vb));
        if b > a {
            acc += rule.integrate(a, b, |v| ball.psi_star(v).powf(p));
        }
        psi_cum.push(acc);
    }
    let scale = total_phi / acc;
    let mut worst = f64::INFINITY;
    let mut at = 0;
    for k in 0..phi_cum.len() {
        let d = (scale * psi_cum[k] - phi_cum[k]) / total_phi;
        if d < worst {
            worst = d;
            at = k;
        }
    }
    Ok(CheckRecord::inequality(format!("partial-majorization/p={p}"), "hardy-littlewood-polya", scale * psi_cum[at], phi_cum[at], worst, tol))
}

/// Reverse-Hölder in root form for several `q` with `p` fixed:
/// `‖φ‖_p/‖φ‖_q ≥ ‖ψ‖_p/‖ψ‖_q` at each `q`, and the power-mean ratios
/// `(⨍φ^p)^{1/p}/(⨍φ^q)^{1/q}` nonincreasing in `q` on both domain and ball.
pub fn chain_consistency_check(result: &EigenResult, ms: &ModelSpace, p: f64, qs: &[f64], tol: f64) -> Result<Vec<CheckRecord>> {
    check_model_compat(&result.surface, ms)?;
    let ball = ms.eigenfunction_for_eigenvalue(result.lambda_h)?;
    let area = result.metric_area;
    let vb = ball.ball_volume();
    let mean_ratio = |ip: f64, iq: f64, q: f64, vol: f64| (ip / vol).powf(1.0 / p) / (iq / vol).powf(1.0 / q);
    let ip = result.power_integral(p);
    let bp = ball.power_integral(p);
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &q in qs {
        check_exponents(p, q)?;
        let iq = result.power_integral(q);
        let bq = ball.power_integral(q);
        let dom = ip.powf(1.0 / p) / iq.powf(1.0 / q);
        let bal = bp.powf(1.0 / p) / bq.powf(1.0 / q);
        out.push(CheckRecord::at_least(format!("chain/root-form/p={p},q={q}"), "reverse-holder", dom, bal, tol));
        let md = mean_ratio(ip, iq, q, area);
        let mb = mean_ratio(bp, bq, q, vb);
        if let Some((pd, pb)) = prev {
            out.push(CheckRecord::at_least(format!("chain/monotone-domain/q={q}"), "power-mean", pd, md, 1e-9));
            out.push(CheckRecord::at_least(format!("chain/monotone-ball/q={q}"), "power-mean", pb, mb, 1e-9));
        }
        prev = Some((md, mb));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_grid_refines_the_top() {
        let t = level_grid(1.0, 64);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert_eq!(t.len(), 57 + 32);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!((t[t.len() - 1] - t[t.len() - 2] - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn clipping_a_triangle() {
        let p = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut poly = Vec::new();
        clip_triangle(p, [0.0, 1.0, 0.0], 0.5, &mut poly);
        let one = |_: [f64; 2]| 1.0;
        let rule = TriangleRule::degree4();
        let a: f64 = (1..poly.len() - 1).map(|k| weighted_area(poly[0], poly[k], poly[k + 1], &rule, &one)).sum();
        assert!((a - 0.125).abs() < 1e-15);
        clip_triangle(p, [1.0, 0.0, 0.0], 0.5, &mut poly);
        assert_eq!(poly.len(), 3);
        clip_triangle(p, [0.0, 1.0, 1.0], 0.5, &mut poly);
        assert_eq!(poly.len(), 4);
    }

    #[test]
    fn rearrangement_of_a_tent() {
        // f = 1 − |x| on [−1, 1] rearranges to 1 − v/2 on [0, 2]
        let x: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 / 20.0).collect();
        let f: Vec<f64> = x.iter().map(|x| 1.0 - x.abs()).collect();
        let p = rearrange_1d(&x, &f, 64);
        for (v, s) in p.volumes.iter().zip(&p.phi_star) {
            assert!((s - (1.0 - v / 2.0)).abs() < 1e-12);
        }
        assert!((p.power_integral(2.0) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rearranging_a_decreasing_profile_is_identity() {
        let ms = ModelSpace::euclidean(2).unwrap();
        let prof = DistributionProfile::from_radial(&ms.radial_eigenfunction(1.0).unwrap());
        let again = rearrange_1d(&prof.volumes, &prof.phi_star, 256);
        let mut dist = 0.0f64;
        for (v, s) in again.volumes.iter().zip(&again.phi_star) {
            dist = dist.max((prof.phi_star_at(*v) - s).abs());
        }
        assert!(dist < 1e-10, "{dist}");
    }

    #[test]
    fn ball_profiles_are_talenti_equality_cases() {
        for (n, kappa) in [(2, 0.0), (2, 1.0), (3, 0.0), (3, 0.7)] {
            let ms = ModelSpace::new(n, kappa).unwrap();
            let sol = ms.radial_eigenfunction(1.3).unwrap();
            let prof = DistributionProfile::from_radial(&sol);
            let rep = talenti_check(&prof, sol.lambda, &ms, 1e-3).unwrap();
            let worst = rep.margins.iter().fold(0.0f64, |a, m| a.max(m.abs()));
            assert!(worst < 1e-3, "n={n} kappa={kappa}: {worst}");
        }
    }

    #[test]
    fn euclidean_closed_form_matches_model_area() {
        // the κ = 0 branch uses v^{-2+2/n}; a tiny κ goes through the model ball
        let sol = ModelSpace::euclidean(3).unwrap().radial_eigenfunction(1.0).unwrap();
        let prof = DistributionProfile::from_radial(&sol);
        let a = talenti_check(&prof, sol.lambda, &ModelSpace::euclidean(3).unwrap(), 1e-3).unwrap();
        let b = talenti_check(&DistributionProfile { kappa_bound: 1e-6, ..prof }, sol.lambda, &ModelSpace::new(3, 1e-6).unwrap(), 1e-3).unwrap();
        for (x, y) in a.rhs.iter().zip(&b.rhs) {
            assert!((x - y).abs() < 1e-8 * x);
        }
    }

    #[test]
    fn curvature_mismatch_is_a_config_error() {
        let sol = ModelSpace::euclidean(2).unwrap().radial_eigenfunction(1.0).unwrap();
        let prof = DistributionProfile::from_radial(&sol);
        let h = ModelSpace::new(2, 1.0).unwrap();
        assert!(matches!(talenti_check(&prof, sol.lambda, &h, 1e-3), Err(Error::Config(_))));
        let e3 = ModelSpace::euclidean(3).unwrap();
        assert!(matches!(chiti_compare(&prof, &e3, sol.lambda, 1e-3), Err(Error::Config(_))));
    }

    #[test]
    fn chiti_ball_against_itself() {
        let ms = ModelSpace::new(2, 1.0).unwrap();
        let sol = ms.radial_eigenfunction(0.8).unwrap().with_sup_norm(2.0);
        let prof = DistributionProfile::from_radial(&sol);
        let rep = chiti_compare(&prof, &ms, sol.lambda, 1e-6).unwrap();
        assert!(rep.min_margin.abs() < 1e-6, "{}", rep.min_margin);
        let mut buf = Vec::new();
        write_profile_csv(&rep, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("v,phi_star,psi_star,margin\n"));
    }

    #[test]
    fn chiti_below_hyperbolic_floor() {
        // λ(B₁) ≈ 5.78 lies below the floor κ²/4 = 9 for κ = 6
        let sol = ModelSpace::euclidean(2).unwrap().radial_eigenfunction(1.0).unwrap();
        let prof = DistributionProfile { kappa_bound: 6.0, ..DistributionProfile::from_radial(&sol) };
        let ms = ModelSpace::new(2, 6.0).unwrap();
        assert!(matches!(chiti_compare(&prof, &ms, sol.lambda, 1e-3), Err(Error::NoFiniteBall { .. })));
    }
}
