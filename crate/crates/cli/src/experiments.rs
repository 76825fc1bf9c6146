//! The experiment behind each subcommand, and the verification suites that
//! compose them.

use std::f64::consts::PI;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirichlet_lab::conformal_lab::{
    schwarz_check_2d, schwarz_check_mobius, small_radius_ratio, write_schwarz_csv, ConformalMap, Hypothesis, SchwarzOptions, SchwarzPoint,
};
use dirichlet_lab::domain::curve::{disk, ellipse, poincare_geodesic_disk, random_convex, regular_polygon, square};
use dirichlet_lab::domain::{isoperimetric_check, small_volume_isoperimetric_check, triangulate, BoundaryCurve, ConformalSurface};
use dirichlet_lab::eigensolver::{faber_krahn_check, fem_error_estimate, first_eigen, EigenResult};
use dirichlet_lab::flow_lab::{
    evolve, hadamard_derivative_field, monotonicity_check, radial_flow_check, radial_flow_check_planar, step_identity_checks, FlowConfig, RadialLaw,
    VelocityLaw,
};
use dirichlet_lab::model_space::{euclidean_k, ModelSpace};
use dirichlet_lab::rearrangement::{
    chain_consistency_check, chiti_compare, conformal_isoperimetric_check, distribution_function, lp_ratio_check, partial_majorization_check,
    reverse_holder_check, talenti_check, write_profile_csv,
};
use dirichlet_lab::report::{fmt12, CheckRecord, VerificationReport};
use dirichlet_lab::Error;

use crate::config::{parse_grid, ExperimentConfig, ExperimentKind};

/// Square of the first zero of `J₀`: the unit-disk eigenvalue.
const J01_SQUARED: f64 = 5.783185962946784;

/// A module error together with the stage or check it came from.
#[derive(Debug)]
pub struct RunError {
    pub context: String,
    pub source: Error,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.source)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

trait Context<T> {
    fn at(self, context: &str) -> RunResult<T>;
}

impl<T> Context<T> for dirichlet_lab::Result<T> {
    fn at(self, context: &str) -> RunResult<T> {
        self.map_err(|source| RunError { context: context.to_string(), source })
    }
}

/// Output directory plus the report being filled.
struct Sink<'a> {
    dir: PathBuf,
    report: &'a mut VerificationReport,
}

impl Sink<'_> {
    fn sub(&mut self, name: &str) -> Sink<'_> {
        Sink { dir: self.dir.join(name), report: self.report }
    }

    fn file(&self, name: &str) -> RunResult<BufWriter<File>> {
        fs::create_dir_all(&self.dir).map_err(Error::from).at(&format!("creating {}", self.dir.display()))?;
        let path = self.dir.join(name);
        File::create(&path).map(BufWriter::new).map_err(Error::from).at(&format!("creating {}", path.display()))
    }

    fn push(&mut self, prefix: &str, mut rec: CheckRecord) {
        rec.id = format!("{prefix}/{}", rec.id);
        self.report.push(rec);
    }

    fn extend(&mut self, prefix: &str, recs: impl IntoIterator<Item = CheckRecord>) {
        for r in recs {
            self.push(prefix, r);
        }
    }
}

/// `euclidean`, `poincare` (κ = 1) or `poincare:<kappa>`.
pub fn parse_surface(spec: &str) -> dirichlet_lab::Result<ConformalSurface> {
    match spec.trim() {
        "euclidean" => Ok(ConformalSurface::euclidean()),
        "poincare" => ConformalSurface::poincare(1.0),
        s => match s.strip_prefix("poincare:") {
            Some(k) => ConformalSurface::poincare(k.parse().map_err(|_| Error::Config(format!("field `surface`: bad curvature `{k}`")))?),
            None => Err(Error::Config(format!("field `surface`: unknown surface `{s}` (euclidean, poincare, poincare:<kappa>)"))),
        },
    }
}

/// Built-in shapes (square, disk, ellipse, hexagon, geodesic-disk, random)
/// or a path to a curve CSV. Coordinate shapes are halved on the Poincaré
/// disk so they sit well inside it.
pub fn build_shape(name: &str, surface: &ConformalSurface, cfg: &ExperimentConfig) -> dirichlet_lab::Result<BoundaryCurve> {
    let curve = match name {
        "square" => square([0.0, 0.0], 1.0, 16)?,
        "disk" => disk([0.0, 0.0], 1.0, 256)?,
        "ellipse" => ellipse(1.0, 0.7, 256)?,
        "hexagon" => regular_polygon([0.0, 0.0], 1.0, 6, 8)?,
        "random" => random_convex(&mut ChaCha8Rng::seed_from_u64(cfg.seed), 1.0)?,
        "geodesic-disk" => {
            if surface.is_euclidean() {
                return Err(Error::Config("shape `geodesic-disk` needs a poincare surface".into()));
            }
            return poincare_geodesic_disk(cfg.r, surface.kappa_bound(), 256);
        }
        path => {
            let p = Path::new(path);
            if !p.exists() {
                return Err(Error::Input(format!("curve file `{path}` not found (built-in shapes: square, disk, ellipse, hexagon, geodesic-disk, random)")));
            }
            return BoundaryCurve::from_csv_path(p);
        }
    };
    if surface.is_euclidean() {
        Ok(curve)
    } else {
        curve.scaled(0.5)
    }
}

fn parse_map(spec: &str) -> dirichlet_lab::Result<ConformalMap> {
    let coeffs = spec
        .split(',')
        .map(|tok| {
            let mut parts = tok.split(':').map(|s| s.trim().parse::<f64>());
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(re)), None, None) => Ok(Complex64::new(re, 0.0)),
                (Some(Ok(re)), Some(Ok(im)), None) => Ok(Complex64::new(re, im)),
                _ => Err(Error::Config(format!("field `map`: bad coefficient `{tok}` (use re or re:im)"))),
            }
        })
        .collect::<dirichlet_lab::Result<Vec<_>>>()?;
    ConformalMap::polynomial(coeffs)
}

fn parse_mobius(spec: &str, n: usize) -> dirichlet_lab::Result<ConformalMap> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("field `mobius`: bad number `{s}`")));
    match parts.as_slice() {
        ["dilation", c] => ConformalMap::dilation(n, num(c)?),
        ["inversion", s, d] => ConformalMap::inversion(n, num(s)?, num(d)?),
        _ => Err(Error::Config(format!("field `mobius`: expected dilation:<c> or inversion:<scale>:<pole>, got `{spec}`"))),
    }
}

fn model_for(surface: &ConformalSurface) -> dirichlet_lab::Result<ModelSpace> {
    ModelSpace::new(2, surface.kappa_bound())
}

/// Runs one experiment, writing CSV files under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> RunResult<VerificationReport> {
    cfg.validate().at("configuration")?;
    let mut report = VerificationReport::new();
    for (k, v) in cfg.environment() {
        report.set_env(&k, v);
    }
    if cfg.assume_small {
        report.set_env("isoperimetric_small_volume", "assumed");
    }
    let mut sink = Sink { dir: cfg.out.clone(), report: &mut report };
    match cfg.kind {
        ExperimentKind::Model => model_experiment(&mut sink, cfg)?,
        ExperimentKind::Eigen => {
            let surface = parse_surface(&cfg.surface).at("surface")?;
            let curve = build_shape(&cfg.shape, &surface, cfg).at("shape")?;
            eigen_stage(&mut sink, "eigen", &curve, &surface, cfg)?;
        }
        ExperimentKind::Rearrange => {
            let surface = parse_surface(&cfg.surface).at("surface")?;
            let curve = build_shape(&cfg.shape, &surface, cfg).at("shape")?;
            let res = eigen_stage(&mut sink, "rearrange", &curve, &surface, cfg)?;
            rearrange_stage(&mut sink, "rearrange", &res, &surface, cfg)?;
        }
        ExperimentKind::Flow => {
            let surface = parse_surface(&cfg.surface).at("surface")?;
            let curve = build_shape(&cfg.shape, &surface, cfg).at("shape")?;
            let law = match cfg.law.as_str() {
                "unit" => VelocityLaw::UnitNormal,
                "curvature" => VelocityLaw::Curvature,
                other => return Err(Error::Config(format!("field `law`: expected unit or curvature, got `{other}`"))).at("configuration"),
            };
            flow_stage(&mut sink, "flow", &curve, &surface, law, cfg.dt, cfg.steps, cfg)?;
        }
        ExperimentKind::Schwarz => schwarz_experiment(&mut sink, cfg)?,
        ExperimentKind::Verify => verify(&mut sink, cfg)?,
    }
    Ok(report)
}

fn model_experiment(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let ms = ModelSpace::new(cfg.n, cfg.kappa).at("model space")?;
    let lambda = ms.ball_eigenvalue(cfg.r).at("model/eigenvalue")?;
    let volume = ms.ball_volume(cfg.r).at("model/volume")?;
    let area = ms.boundary_volume(cfg.r).at("model/boundary")?;
    println!("lambda       {}", fmt12(lambda));
    println!("volume       {}", fmt12(volume));
    println!("surface_area {}", fmt12(area));
    let sol = ms.radial_eigenfunction(cfg.r).at("model/eigenfunction")?;
    let mut w = sink.file("model.csv")?;
    let rows: Vec<[f64; 3]> = sol.radial_grid.iter().map(|&(r, p, d)| [r, p, d]).collect();
    write_rows(&mut w, &["r", "psi", "dpsi"], &rows).at("model.csv")?;
    let residual = sol.integrated_equation_residual(0.05 * cfg.r);
    sink.push("model", CheckRecord::equality("radial-equation", "volume-coordinate-equation", residual, 0.0, residual, 1e-8));
    if cfg.kappa > 0.0 {
        sink.push("model", CheckRecord::at_least("spectral-floor", "mckean", lambda, ms.spectral_floor(), 0.0));
    }
    Ok(())
}

fn write_rows<const N: usize>(w: &mut impl Write, header: &[&str; N], rows: &[[f64; N]]) -> dirichlet_lab::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.map(fmt12).join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn eigen_stage(sink: &mut Sink, prefix: &str, curve: &BoundaryCurve, surface: &ConformalSurface, cfg: &ExperimentConfig) -> RunResult<EigenResult> {
    let ctx = |s: &str| format!("{prefix}/{s}");
    let mesh = triangulate(curve, cfg.h).at(&ctx("triangulate"))?;
    let res = first_eigen(&mesh, surface, cfg.eigen_tol).at(&ctx("eigen"))?;
    res.write_eigenfunction_csv(sink.file("eigenfunction.csv")?).at(&ctx("eigenfunction.csv"))?;
    res.write_flux_csv(sink.file("flux.csv")?).at(&ctx("flux.csv"))?;
    println!("{prefix}: lambda_h {} ({} triangles, {} iterations)", fmt12(res.lambda_h), res.mesh.triangles.len(), res.iterations);
    let ms = model_for(surface).at(&ctx("model space"))?;
    sink.push(prefix, res.flux_compatibility());
    sink.push(prefix, faber_krahn_check(&res, surface, &ms, cfg.tol).at(&ctx("faber-krahn"))?);
    sink.push(prefix, isoperimetric_check(curve, surface).at(&ctx("isoperimetric"))?.1);
    sink.push(prefix, small_volume_isoperimetric_check(curve, surface, &ms).at(&ctx("isoperimetric/model"))?.1);
    Ok(res)
}

fn rearrange_stage(sink: &mut Sink, prefix: &str, res: &EigenResult, surface: &ConformalSurface, cfg: &ExperimentConfig) -> RunResult<()> {
    let ctx = |s: &str| format!("{prefix}/{s}");
    let est = fem_error_estimate(&res.mesh, surface, cfg.eigen_tol).at(&ctx("error estimate"))?;
    let tol = (2.0 * est.relative_error).max(cfg.tol);
    let ms = model_for(surface).at(&ctx("model space"))?;
    let lambda = res.lambda_h;
    let profile = distribution_function(res, cfg.levels).at(&ctx("distribution"))?;

    let tal = talenti_check(&profile, lambda, &ms, tol).at(&ctx("talenti"))?;
    let rows: Vec<[f64; 4]> = (0..tal.volumes.len()).map(|i| [tal.volumes[i], tal.lhs[i], tal.rhs[i], tal.margins[i]]).collect();
    write_rows(&mut sink.file("talenti.csv")?, &["v", "lhs", "rhs", "margin"], &rows).at(&ctx("talenti.csv"))?;
    sink.push(prefix, tal.record);

    let chiti = chiti_compare(&profile, &ms, lambda, tol).at(&ctx("chiti"))?;
    write_profile_csv(&chiti, sink.file("profile.csv")?).at(&ctx("profile.csv"))?;
    sink.push(prefix, chiti.record);

    for p in [1.0, 2.0, 7.3] {
        sink.push(prefix, lp_ratio_check(res, &ms, p, tol).at(&ctx("lp-ratio"))?.3);
    }
    sink.extend(prefix, reverse_holder_check(res, &ms, 1.0, 2.0, tol).at(&ctx("reverse-holder"))?.records);
    sink.push(prefix, conformal_isoperimetric_check(res, tol).2);
    for p in [1.0, 2.0] {
        sink.push(prefix, partial_majorization_check(&profile, &ms, lambda, p, tol).at(&ctx("majorization"))?);
    }
    sink.extend(prefix, chain_consistency_check(res, &ms, 1.0, &[2.0, 3.0, 4.0], tol).at(&ctx("chain"))?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn flow_stage(
    sink: &mut Sink,
    prefix: &str,
    curve: &BoundaryCurve,
    surface: &ConformalSurface,
    law: VelocityLaw,
    dt: f64,
    steps: usize,
    cfg: &ExperimentConfig,
) -> RunResult<()> {
    let mut fc = FlowConfig::new(law, dt, steps, cfg.h);
    fc.eigen_tol = cfg.eigen_tol;
    let trace = evolve(curve, surface, &fc).at(&format!("{prefix}/evolve"))?;
    trace.write_csv(sink.file("flow.csv")?).at(&format!("{prefix}/flow.csv"))?;
    let last = trace.steps.last().expect("flows record at least three states");
    println!("{prefix}: lambda {} -> {} over {} steps", fmt12(trace.steps[0].lambda), fmt12(last.lambda), trace.steps.len() - 1);
    sink.extend(prefix, monotonicity_check(&trace, 2, cfg.tol).at(&format!("{prefix}/monotonicity"))?);
    sink.extend(prefix, step_identity_checks(&trace, cfg.tol));
    Ok(())
}

fn schwarz_experiment(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let surface = parse_surface(&cfg.surface).at("surface")?;
    let grid = parse_grid(&cfg.t_grid).at("configuration")?;
    let opts = SchwarzOptions { h: cfg.h, eigen_tol: cfg.eigen_tol, tol: cfg.tol, ..SchwarzOptions::default() };
    let map = parse_map(&cfg.map).at("configuration")?;
    planar_schwarz(sink, "schwarz", &map, &grid, &surface, &opts)?;
    if let Some(spec) = &cfg.mobius {
        let map = parse_mobius(spec, cfg.mobius_n).at("configuration")?;
        let hyp = if cfg.hypothesis == "stated" { Hypothesis::Stated } else { Hypothesis::Corrected };
        mobius_schwarz(sink, "schwarz-mobius", cfg.mobius_n, &map, &grid, hyp)?;
    }
    Ok(())
}

fn planar_schwarz(sink: &mut Sink, prefix: &str, map: &ConformalMap, grid: &[f64], surface: &ConformalSurface, opts: &SchwarzOptions) -> RunResult<()> {
    let (steps, recs) = schwarz_check_2d(map, grid, surface, opts).at(&format!("{prefix}/schwarz"))?;
    let rows: Vec<SchwarzPoint> = steps.iter().map(|s| s.point.clone()).collect();
    write_schwarz_csv(&rows, sink.file("schwarz.csv")?).at(&format!("{prefix}/schwarz.csv"))?;
    sink.extend(prefix, recs);
    Ok(())
}

fn mobius_schwarz(sink: &mut Sink, prefix: &str, n: usize, map: &ConformalMap, grid: &[f64], hyp: Hypothesis) -> RunResult<()> {
    let (pts, recs) = schwarz_check_mobius(n, map, grid, hyp, 1e-9).at(&format!("{prefix}/mobius"))?;
    let rows: Vec<SchwarzPoint> = pts.iter().map(|p| p.row()).collect();
    write_schwarz_csv(&rows, sink.file("mobius.csv")?).at(&format!("{prefix}/mobius.csv"))?;
    sink.extend(prefix, recs);
    Ok(())
}

const SUITES: [&str; 5] = ["model", "eigen", "rearrange", "flow", "schwarz"];

fn verify(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let chosen: Vec<&str> = match cfg.suite.as_str() {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(Error::Config(format!("field `suite`: unknown suite `{s}` (all, {})", SUITES.join(", ")))).at("configuration"),
    };
    for s in chosen {
        let mut sub = sink.sub(s);
        match s {
            "model" => verify_model(&mut sub)?,
            "eigen" => verify_eigen(&mut sub, cfg)?,
            "rearrange" => verify_rearrange(&mut sub, cfg)?,
            "flow" => verify_flow(&mut sub, cfg)?,
            _ => verify_schwarz(&mut sub, cfg)?,
        }
    }
    Ok(())
}

fn verify_model(sink: &mut Sink) -> RunResult<()> {
    let e2 = ModelSpace::euclidean(2).at("model")?;
    let e3 = ModelSpace::euclidean(3).at("model")?;
    sink.push("model", CheckRecord::close_to("unit-disk", "ball-eigenvalue", e2.ball_eigenvalue(1.0).at("model/n=2")?, J01_SQUARED, 1e-6));
    sink.push("model", CheckRecord::close_to("unit-ball-3d", "ball-eigenvalue", e3.ball_eigenvalue(1.0).at("model/n=3")?, PI * PI, 1e-8));
    sink.push("model", CheckRecord::close_to("k-2d", "reverse-holder-constant", euclidean_k(2, 1.0, 2.0).at("model/K")?, 4.0 * PI, 1e-8));
    sink.push("model", CheckRecord::close_to("k-3d", "reverse-holder-constant", euclidean_k(3, 1.0, 2.0).at("model/K")?, 8.0 * PI * PI, 1e-8));

    let hyp = ModelSpace::new(2, 1.0).at("model")?;
    let mut prev: Option<f64> = None;
    for r in [0.5, 1.0, 2.0, 4.0] {
        let lam = hyp.ball_eigenvalue(r).at("model/hyperbolic")?;
        sink.push("model", CheckRecord::at_least(format!("hyperbolic/floor/r={r}"), "mckean", lam, hyp.spectral_floor(), 0.0));
        if let Some(p) = prev {
            sink.push("model", CheckRecord::inequality(format!("hyperbolic/decreasing/r={r}"), "domain-monotonicity", lam, p, 1.0 - lam / p, 0.0));
        }
        prev = Some(lam);
    }
    let sol = hyp.radial_eigenfunction(1.0).at("model/hyperbolic")?;
    let residual = sol.integrated_equation_residual(0.05);
    sink.push("model", CheckRecord::equality("hyperbolic/radial-equation", "volume-coordinate-equation", residual, 0.0, residual, 1e-8));

    let poincare = ConformalSurface::poincare(1.0).at("model")?;
    let circle = poincare_geodesic_disk(1.0, 1.0, 512).at("model/geodesic disk")?;
    let (ratio, rec) = isoperimetric_check(&circle, &poincare).at("model/isoperimetric")?;
    sink.push("model", rec);
    sink.push("model", CheckRecord::close_to("hyperbolic/isoperimetric-ratio", "beckenbach-rado", ratio, (1f64.cosh() + 1.0) / 2.0, 1e-3));
    let (_, rec) = small_volume_isoperimetric_check(&circle, &poincare, &hyp).at("model/isoperimetric")?;
    sink.push("model", CheckRecord::equality("hyperbolic/model-isoperimetric-equality", "model-isoperimetric", rec.lhs, rec.rhs, rec.margin, 1e-4));

    let grid: Vec<f64> = (0..11).map(|i| 0.1 * i as f64).collect();
    for law in [RadialLaw::UnitNormal, RadialLaw::MeanCurvature] {
        sink.extend("model", radial_flow_check(3, law, 1.0, &grid, 1e-10).at("model/radial flow")?.1);
        sink.extend("model", radial_flow_check(4, law, 1.0, &grid, 1e-10).at("model/radial flow")?.1);
    }
    sink.extend("model", radial_flow_check_planar(RadialLaw::UnitNormal, 1.0, &grid, 1e-10).at("model/radial flow")?.1);
    Ok(())
}

fn verify_eigen(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let e = ConformalSurface::euclidean();
    let disk_res = eigen_stage(&mut sink.sub("disk"), "eigen/disk", &disk([0.0, 0.0], 1.0, 256).at("eigen/disk")?, &e, cfg)?;
    sink.push("eigen/disk", CheckRecord::close_to("bessel-oracle", "ball-eigenvalue", disk_res.lambda_h, J01_SQUARED, 1e-2));
    let sq = eigen_stage(&mut sink.sub("square"), "eigen/square", &square([0.0, 0.0], 1.0, 16).at("eigen/square")?, &e, cfg)?;
    sink.push("eigen/square", CheckRecord::close_to("separable-oracle", "rectangle-eigenvalue", sq.lambda_h, 2.0 * PI * PI, 1e-2));

    let poincare = ConformalSurface::poincare(1.0).at("eigen")?;
    let gd = eigen_stage(&mut sink.sub("geodesic-disk"), "eigen/geodesic-disk", &poincare_geodesic_disk(1.0, 1.0, 256).at("eigen/geodesic-disk")?, &poincare, cfg)?;
    let oracle = ModelSpace::new(2, 1.0).and_then(|m| m.ball_eigenvalue(1.0)).at("eigen/geodesic-disk")?;
    sink.push("eigen/geodesic-disk", CheckRecord::close_to("shooting-oracle", "ball-eigenvalue", gd.lambda_h, oracle, 1e-2));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.samples {
        let curve = random_convex(&mut rng, 1.0).at("eigen/random")?;
        let name = format!("random-{i}");
        eigen_stage(&mut sink.sub(&name), &format!("eigen/{name}"), &curve, &e, cfg)?;
    }
    Ok(())
}

// Pointwise profile derivatives converge only to first order in h, so the
// rearrangement cases mesh three times finer than the other suites.
fn verify_rearrange(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let cfg = &ExperimentConfig { h: cfg.h / 3.0, ..cfg.clone() };
    let e = ConformalSurface::euclidean();
    let poincare = ConformalSurface::poincare(1.0).at("rearrange")?;
    let cases: [(&str, BoundaryCurve, &ConformalSurface); 3] = [
        ("square", square([0.0, 0.0], 1.0, 16).at("rearrange/square")?, &e),
        ("disk", disk([0.0, 0.0], 1.0, 256).at("rearrange/disk")?, &e),
        ("poincare-hexagon", regular_polygon([0.0, 0.0], 0.6, 6, 8).at("rearrange/hexagon")?, &poincare),
    ];
    for (name, curve, surface) in cases {
        let prefix = format!("rearrange/{name}");
        let mut sub = sink.sub(name);
        let res = eigen_stage(&mut sub, &prefix, &curve, surface, cfg)?;
        rearrange_stage(&mut sub, &prefix, &res, surface, cfg)?;
    }
    Ok(())
}

fn verify_flow(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let e = ConformalSurface::euclidean();
    let poincare = ConformalSurface::poincare(1.0).at("flow")?;
    let steps = cfg.steps;
    flow_stage(&mut sink.sub("disk"), "flow/disk", &disk([0.0, 0.0], 1.0, 256).at("flow/disk")?, &e, VelocityLaw::UnitNormal, 0.005, steps, cfg)?;
    flow_stage(&mut sink.sub("square"), "flow/square", &square([0.0, 0.0], 1.0, 16).at("flow/square")?, &e, VelocityLaw::UnitNormal, 0.005, steps, cfg)?;
    // outward curvature flow sharpens the ellipse tips, so the trace stays short
    flow_stage(&mut sink.sub("ellipse"), "flow/ellipse", &ellipse(1.0, 0.7, 256).at("flow/ellipse")?, &e, VelocityLaw::Curvature, 5e-4, steps, cfg)?;
    let gd = poincare_geodesic_disk(1.0, 1.0, 256).at("flow/geodesic-disk")?;
    flow_stage(&mut sink.sub("geodesic-disk"), "flow/geodesic-disk", &gd, &poincare, VelocityLaw::UnitNormal, 0.004, steps, cfg)?;

    // Hadamard formula for rigid motions, dilation and a generic field
    let prefix = "flow/hadamard";
    let mesh = triangulate(&disk([0.0, 0.0], 1.0, 256).at(prefix)?, cfg.h).at(prefix)?;
    let res = first_eigen(&mesh, &e, cfg.eigen_tol).at(prefix)?;
    let lam = res.lambda_h;
    let tr = hadamard_derivative_field(&res, |_| [0.6, -0.8]);
    sink.push(prefix, CheckRecord::inequality("translation", "hadamard-variation", tr.abs(), 1e-3 * lam, 1e-3 - tr.abs() / lam, 0.0));
    let dil = hadamard_derivative_field(&res, |p| p);
    sink.push(prefix, CheckRecord::close_to("dilation", "hadamard-variation", dil, -2.0 * lam, 1e-2));
    let bump = |p: [f64; 2]| {
        let g = (-((p[0] - 0.6).powi(2) + (p[1] - 0.2).powi(2)) / 0.3).exp();
        [g * (1.0 + 0.5 * p[1]), g * (0.3 - p[0] * p[1])]
    };
    let emesh = triangulate(&ellipse(1.0, 0.7, 200).at(prefix)?, cfg.h.min(0.02)).at(prefix)?;
    let base = first_eigen(&emesh, &e, 1e-11).at(prefix)?;
    let had = hadamard_derivative_field(&base, bump);
    let eps = 1e-3;
    let mut shifted = [0.0; 2];
    for (k, s) in [eps, -eps].into_iter().enumerate() {
        let m = emesh
            .mapped(|p| {
                let v = bump(p);
                [p[0] + s * v[0], p[1] + s * v[1]]
            })
            .at(prefix)?;
        shifted[k] = first_eigen(&m, &e, 1e-11).at(prefix)?.lambda_h;
    }
    sink.push(prefix, CheckRecord::close_to("generic-field", "hadamard-variation", had, (shifted[0] - shifted[1]) / (2.0 * eps), 1e-2));
    Ok(())
}

fn verify_schwarz(sink: &mut Sink, cfg: &ExperimentConfig) -> RunResult<()> {
    let e = ConformalSurface::euclidean();
    let opts = SchwarzOptions { h: cfg.h, eigen_tol: cfg.eigen_tol, tol: cfg.tol, ..SchwarzOptions::default() };
    let quad = ConformalMap::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)]).at("schwarz")?;
    let grid: Vec<f64> = (0..9).map(|i| 0.6 + 0.1 * i as f64).collect();
    planar_schwarz(&mut sink.sub("quadratic"), "schwarz/quadratic", &quad, &grid, &e, &opts)?;
    let lin = ConformalMap::linear(Complex64::new(2.0, 0.0)).at("schwarz")?;
    planar_schwarz(&mut sink.sub("linear"), "schwarz/linear", &lin, &[0.6, 1.0, 1.4], &e, &opts)?;
    let poincare = ConformalSurface::poincare(1.0).at("schwarz")?;
    let id = ConformalMap::linear(Complex64::new(1.0, 0.0)).at("schwarz")?;
    let hgrid: Vec<f64> = (3..9).map(|i| 0.1 * i as f64).collect();
    planar_schwarz(&mut sink.sub("poincare-identity"), "schwarz/poincare-identity", &id, &hgrid, &poincare, &opts)?;
    let ratio = small_radius_ratio(&quad, 0.05, &e, &opts).at("schwarz/small-radius")?;
    sink.push("schwarz/quadratic", CheckRecord::close_to("small-radius", "conformal-blow-up", ratio, 1.0, 1e-2));

    let mgrid: Vec<f64> = (1..10).map(|i| 0.2 * i as f64).collect();
    let maps = [
        ("dilation-0.6", ConformalMap::dilation(3, 0.6).at("schwarz")?),
        ("isometry", ConformalMap::dilation(3, 1.0).at("schwarz")?),
        ("inversion", ConformalMap::inversion(3, 1.0, 2.0).at("schwarz")?),
    ];
    for (name, map) in maps {
        mobius_schwarz(&mut sink.sub(name), &format!("schwarz/mobius-{name}"), 3, &map, &mgrid, Hypothesis::Corrected)?;
    }
    Ok(())
}
