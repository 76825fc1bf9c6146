//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirichlet_lab::conformal_lab::{schwarz_check_2d, ConformalMap, SchwarzOptions};
use dirichlet_lab::domain::curve::{disk, ellipse, poincare_geodesic_disk, random_convex, regular_polygon, square};
use dirichlet_lab::domain::{isoperimetric_check, triangulate, BoundaryCurve, ConformalSurface};
use dirichlet_lab::eigensolver::{check_tolerance, faber_krahn_check, fem_error_estimate, first_eigen, EigenResult};
use dirichlet_lab::flow_lab::{evolve, hadamard_derivative_field, monotonicity_check, radial_flow_check, FlowConfig, RadialLaw, VelocityLaw};
use dirichlet_lab::model_space::{euclidean_k, ModelSpace};
use dirichlet_lab::rearrangement::{
    chiti_compare, conformal_isoperimetric_check, distribution_function, lp_ratio_check, partial_majorization_check, talenti_check,
    DistributionProfile,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// `J₀` by its power series, accurate to round-off for `x ≤ 4`.
fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..40 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First zero of `J₀` by bisection on `[2, 3]`.
fn j0_first_zero() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if bessel_j0(a) * bessel_j0(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn solve(curve: &BoundaryCurve, surface: &ConformalSurface, h: f64) -> EigenResult {
    first_eigen(&triangulate(curve, h).unwrap(), surface, 1e-10).unwrap()
}

fn policy_tol(res: &EigenResult) -> f64 {
    check_tolerance(&fem_error_estimate(&res.mesh, &res.surface, 1e-10).unwrap())
}

fn timed(limit: Duration, start: Instant, pass: bool) -> (bool, String) {
    let t = start.elapsed();
    (pass && t <= limit, format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn model_ball_eigenvalues() -> Outcome {
    let oracle = j0_first_zero().powi(2);
    let s2 = Instant::now();
    let l2 = ModelSpace::euclidean(2).unwrap().ball_eigenvalue(1.0).unwrap();
    let (ok2, t2) = timed(Duration::from_secs(1), s2, (l2 - oracle).abs() <= 1e-6);
    let s3 = Instant::now();
    let l3 = ModelSpace::euclidean(3).unwrap().ball_eigenvalue(1.0).unwrap();
    let (ok3, t3) = timed(Duration::from_secs(1), s3, (l3 - PI * PI).abs() <= 1e-8);
    outcome(ok2 && ok3, format!("n=2 err {:.1e} ({t2}), n=3 err {:.1e} ({t3})", (l2 - oracle).abs(), (l3 - PI * PI).abs()))
}

fn reverse_holder_constants() -> Outcome {
    let start = Instant::now();
    let k2 = euclidean_k(2, 1.0, 2.0).unwrap();
    let k3 = euclidean_k(3, 1.0, 2.0).unwrap();
    let (e2, e3) = ((k2 - 4.0 * PI).abs(), (k3 - 8.0 * PI * PI).abs());
    let (ok, t) = timed(Duration::from_secs(1), start, e2 <= 1e-8 && e3 <= 1e-8);
    outcome(ok, format!("K(2,1,2) err {e2:.1e}, K(3,1,2) err {e3:.1e} ({t})"))
}

fn fem_convergence() -> Outcome {
    let start = Instant::now();
    let oracle = j0_first_zero().powi(2);
    let e = ConformalSurface::euclidean();
    let at_h = solve(&disk([0.0, 0.0], 1.0, 315).unwrap(), &e, 0.02).lambda_h;
    let rel = (at_h / oracle - 1.0).abs();

    let onto_circle = |p: [f64; 2]| {
        let r = p[0].hypot(p[1]);
        [p[0] / r, p[1] / r]
    };
    let mut mesh = triangulate(&disk([0.0, 0.0], 1.0, 64).unwrap(), 0.1).unwrap();
    let mut errors = vec![];
    for level in 0..4 {
        if level > 0 {
            mesh = mesh.refine_uniform(Some(&onto_circle)).unwrap();
        }
        errors.push((first_eigen(&mesh, &e, 1e-11).unwrap().lambda_h - oracle).abs());
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = orders.iter().all(|o| (1.7..=2.3).contains(o));
    let (ok, t) = timed(Duration::from_secs(60), start, rel <= 1e-2 && orders_ok);
    outcome(ok, format!("h=0.02 rel err {rel:.2e}, orders {orders:.2?} ({t})"))
}

fn faber_krahn_suite() -> Outcome {
    let start = Instant::now();
    let e = ConformalSurface::euclidean();
    let ms = ModelSpace::euclidean(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let res = solve(&random_convex(&mut rng, 1.0).unwrap(), &e, 0.03);
        worst = worst.min(faber_krahn_check(&res, &e, &ms, 0.005).unwrap().margin);
    }
    let res = solve(&disk([0.0, 0.0], 1.0, 256).unwrap(), &e, 0.03);
    let disk_margin = faber_krahn_check(&res, &e, &ms, 0.005).unwrap().margin;
    let (ok, t) = timed(Duration::from_secs(300), start, worst > -0.005 && disk_margin.abs() <= 0.005);
    outcome(ok, format!("worst polygon margin {worst:.4}, disk margin {disk_margin:.1e} ({t})"))
}

fn talenti_margins(res: &EigenResult, ms: &ModelSpace) -> (Vec<f64>, f64) {
    let tol = policy_tol(res);
    let profile = distribution_function(res, 256).unwrap();
    (talenti_check(&profile, res.lambda_h, ms, tol).unwrap().margins, tol)
}

fn talenti() -> Outcome {
    // pointwise derivatives of the profile converge at first order in h, so
    // this criterion meshes at h = 0.01
    let h = 0.01;
    let e = ConformalSurface::euclidean();
    let hyp = ConformalSurface::poincare(1.0).unwrap();
    let (flat, hyper) = (ModelSpace::euclidean(2).unwrap(), ModelSpace::new(2, 1.0).unwrap());

    let (sq, sq_tol) = talenti_margins(&solve(&square([0.0, 0.0], 1.0, 16).unwrap(), &e, h), &flat);
    let (hx, hx_tol) = talenti_margins(&solve(&regular_polygon([0.0, 0.0], 0.5, 6, 8).unwrap(), &hyp, h), &hyper);
    let (dk, dk_tol) = talenti_margins(&solve(&disk([0.0, 0.0], 1.0, 512).unwrap(), &e, h), &flat);
    let min = |m: &[f64]| m.iter().cloned().fold(f64::INFINITY, f64::min);
    let absmax = |m: &[f64]| m.iter().fold(0f64, |a, b| a.max(b.abs()));

    // exact radial profiles are equality cases
    let mut radial = 0f64;
    for ms in [flat, hyper] {
        let sol = ms.radial_eigenfunction(1.0).unwrap();
        let rep = talenti_check(&DistributionProfile::from_radial(&sol), sol.lambda, &ms, 0.005).unwrap();
        radial = radial.max(absmax(&rep.margins));
    }
    let pass = min(&sq) >= -sq_tol && min(&hx) >= -hx_tol && absmax(&dk) <= dk_tol && radial <= 0.005;
    outcome(
        pass,
        format!(
            "square min {:.2e} (tol {sq_tol:.1e}), poincare hexagon min {:.2e} (tol {hx_tol:.1e}), disk max|m| {:.2e}, radial balls max|m| {radial:.1e}",
            min(&sq),
            min(&hx),
            absmax(&dk)
        ),
    )
}

fn chiti_and_lp() -> Outcome {
    let e = ConformalSurface::euclidean();
    let ms = ModelSpace::euclidean(2).unwrap();
    let sq = solve(&square([0.0, 0.0], 1.0, 16).unwrap(), &e, 0.02);
    let dk = solve(&disk([0.0, 0.0], 1.0, 315).unwrap(), &e, 0.02);
    let (sq_tol, dk_tol) = (policy_tol(&sq), policy_tol(&dk));
    let sq_prof = distribution_function(&sq, 256).unwrap();
    let dk_prof = distribution_function(&dk, 256).unwrap();

    let mut pass = true;
    let mut notes = vec![];
    let chiti_sq = chiti_compare(&sq_prof, &ms, sq.lambda_h, sq_tol).unwrap();
    pass &= chiti_sq.min_margin >= -sq_tol;
    let chiti_dk = chiti_compare(&dk_prof, &ms, dk.lambda_h, dk_tol).unwrap();
    pass &= chiti_dk.min_margin.abs() <= dk_tol;
    notes.push(format!("chiti square {:.1e} disk {:.1e}", chiti_sq.min_margin, chiti_dk.min_margin));
    for p in [1.0, 2.0] {
        let m = partial_majorization_check(&sq_prof, &ms, sq.lambda_h, p, sq_tol).unwrap().margin;
        pass &= m >= -sq_tol;
        notes.push(format!("major p={p} {m:.1e}"));
    }
    for p in [1.0, 2.0, 7.3] {
        let (_, _, ms_sq, _) = lp_ratio_check(&sq, &ms, p, sq_tol).unwrap();
        let (_, _, ms_dk, _) = lp_ratio_check(&dk, &ms, p, dk_tol).unwrap();
        pass &= ms_sq >= -sq_tol && ms_dk.abs() <= dk_tol;
        notes.push(format!("lp p={p} square {ms_sq:.1e} disk {ms_dk:.1e}"));
    }
    outcome(pass, format!("{} (tol {sq_tol:.1e})", notes.join(", ")))
}

fn payne_rayner() -> Outcome {
    let e = ConformalSurface::euclidean();
    let quotient = |r: &EigenResult| r.lambda_h * r.power_integral(1.0).powi(2) / r.power_integral(2.0);
    let dk = solve(&disk([0.0, 0.0], 1.0, 315).unwrap(), &e, 0.02);
    let sq = solve(&square([0.0, 0.0], 1.0, 16).unwrap(), &e, 0.02);
    let (qd, qs) = (quotient(&dk) / (4.0 * PI), quotient(&sq) / (4.0 * PI));
    let (ld, ad, _) = conformal_isoperimetric_check(&dk, 0.005);
    let (ls, as_, _) = conformal_isoperimetric_check(&sq, 0.005);
    let pass = (qd - 1.0).abs() <= 1e-2 && qs > 1.0 && ls >= as_ && (ld / ad - 1.0).abs() <= 1e-2;
    outcome(pass, format!("disk ratio/4pi {qd:.5}, square {qs:.5}; L^2/4piA disk {:.5}, square {:.5}", ld / ad, ls / as_))
}

fn hadamard() -> Outcome {
    let e = ConformalSurface::euclidean();
    let res = solve(&disk([0.0, 0.0], 1.0, 256).unwrap(), &e, 0.03);
    let lam = res.lambda_h;
    let tr = hadamard_derivative_field(&res, |_| [0.6, -0.8]);
    let dil = hadamard_derivative_field(&res, |p| p);

    let bump = |p: [f64; 2]| {
        let g = (-((p[0] - 0.6).powi(2) + (p[1] - 0.2).powi(2)) / 0.3).exp();
        [g * (1.0 + 0.5 * p[1]), g * (0.3 - p[0] * p[1])]
    };
    let mesh = triangulate(&ellipse(1.0, 0.7, 200).unwrap(), 0.02).unwrap();
    let base = first_eigen(&mesh, &e, 1e-11).unwrap();
    let had = hadamard_derivative_field(&base, bump);
    // the oracle moves every mesh vertex, keeping connectivity
    let eps = 1e-3;
    let shifted = |s: f64| {
        let m = mesh.mapped(|p| {
            let v = bump(p);
            [p[0] + s * v[0], p[1] + s * v[1]]
        });
        first_eigen(&m.unwrap(), &e, 1e-11).unwrap().lambda_h
    };
    let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
    let pass = tr.abs() <= 1e-3 * lam && (dil / (-2.0 * lam) - 1.0).abs() <= 1e-2 && (had / fd - 1.0).abs() <= 1e-2;
    outcome(
        pass,
        format!(
            "translation {:.1e} lambda, dilation/(-2 lambda) {:.5}, generic {had:.5} vs difference {fd:.5}",
            tr.abs() / lam,
            dil / (-2.0 * lam)
        ),
    )
}

fn flow_bounds() -> Outcome {
    let start = Instant::now();
    let e = ConformalSurface::euclidean();
    let h = 0.03;
    let tol = 0.005;

    let dk = evolve(&disk([0.0, 0.0], 1.0, 256).unwrap(), &e, &FlowConfig::new(VelocityLaw::UnitNormal, 0.005, 50, h)).unwrap();
    let disk_gap = dk.steps.iter().map(|s| ((s.dlog_fd + 4.0 * PI / s.perimeter) / s.dlog_fd).abs()).fold(0f64, f64::max);

    let mut worst = f64::INFINITY;
    let mut checks_pass = true;
    let traces = [
        evolve(&square([0.0, 0.0], 1.0, 16).unwrap(), &e, &FlowConfig::new(VelocityLaw::UnitNormal, 0.005, 50, h)),
        // outward curvature flow sharpens the tips, so it runs with a short step
        evolve(&ellipse(1.0, 0.7, 256).unwrap(), &e, &FlowConfig::new(VelocityLaw::Curvature, 5e-4, 50, h)),
    ];
    for tr in traces {
        let tr = tr.unwrap();
        worst = tr.steps.iter().map(|s| s.margin).fold(worst, f64::min);
        checks_pass &= monotonicity_check(&tr, 2, tol).unwrap().iter().all(|r| r.pass);
    }
    let (ok, t) = timed(Duration::from_secs(600), start, disk_gap <= 1e-2 && worst >= -tol && checks_pass);
    outcome(ok, format!("disk max rel gap {disk_gap:.1e}, square/ellipse worst margin {worst:.2e} ({t})"))
}

fn radial_flows() -> Outcome {
    let start = Instant::now();
    let grid: Vec<f64> = (0..11).map(|i| 0.1 * i as f64).collect();
    let mut worst = 0f64;
    for law in [RadialLaw::UnitNormal, RadialLaw::MeanCurvature] {
        let (pts, _) = radial_flow_check(3, law, 1.0, &grid, 1e-10).unwrap();
        for p in pts {
            let r = p.radius;
            let want = match law {
                RadialLaw::UnitNormal => -PI / (r * r),
                RadialLaw::MeanCurvature => -2.0 * PI / (r * r * r),
            };
            worst = worst.max((p.lhs - want).abs()).max((p.bound - want).abs());
        }
    }
    let (ok, t) = timed(Duration::from_secs(1), start, worst <= 1e-10);
    outcome(ok, format!("max deviation from closed forms {worst:.1e} ({t})"))
}

fn schwarz_2d() -> Outcome {
    let start = Instant::now();
    let e = ConformalSurface::euclidean();
    let opts = SchwarzOptions::default();
    let grid: Vec<f64> = (0..9).map(|i| 0.6 + 0.1 * i as f64).collect();
    let quad = ConformalMap::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)]).unwrap();
    let (steps, _) = schwarz_check_2d(&quad, &grid, &e, &opts).unwrap();
    let decreasing = steps.iter().all(|s| s.point.dlog_ratio < 0.0 && -s.point.dlog_ratio > s.point.richardson_error);
    let least = steps.iter().map(|s| -s.point.dlog_ratio).fold(f64::INFINITY, f64::min);
    let lin = ConformalMap::linear(Complex64::new(2.0, 0.0)).unwrap();
    let (lsteps, _) = schwarz_check_2d(&lin, &grid, &e, &opts).unwrap();
    let flat = lsteps.iter().map(|s| s.point.dlog_ratio.abs()).fold(0f64, f64::max);
    let (ok, t) = timed(Duration::from_secs(600), start, decreasing && flat <= 2e-3);
    outcome(ok, format!("quadratic min decrease {least:.3e}, linear max |derivative| {flat:.1e} ({t})"))
}

fn hyperbolic_consistency() -> Outcome {
    let hyp = ConformalSurface::poincare(1.0).unwrap();
    let curve = poincare_geodesic_disk(1.0, 1.0, 256).unwrap();
    let lam = solve(&curve, &hyp, 0.03).lambda_h;
    let oracle = ModelSpace::new(2, 1.0).unwrap().ball_eigenvalue(1.0).unwrap();
    let fine = poincare_geodesic_disk(1.0, 1.0, 1024).unwrap();
    let (ratio, _) = isoperimetric_check(&fine, &hyp).unwrap();
    let want = (1f64.cosh() + 1.0) / 2.0;
    let pass = (lam / oracle - 1.0).abs() <= 1e-2 && (ratio - want).abs() <= 1e-3;
    outcome(pass, format!("lambda rel err {:.1e}, isoperimetric ratio {ratio:.6} vs {want:.6}", (lam / oracle - 1.0).abs()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("model ball eigenvalues", model_ball_eigenvalues),
        ("reverse-Holder constants", reverse_holder_constants),
        ("FEM convergence", fem_convergence),
        ("Faber-Krahn suite", faber_krahn_suite),
        ("Talenti inequality", talenti),
        ("Chiti comparison and Lp ratios", chiti_and_lp),
        ("Payne-Rayner and conformal isoperimetry", payne_rayner),
        ("Hadamard formula", hadamard),
        ("flow bounds", flow_bounds),
        ("radial flows in three dimensions", radial_flows),
        ("planar Schwarz lemma", schwarz_2d),
        ("hyperbolic consistency", hyperbolic_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !result.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
