//! Experiment configuration: defaults, then a flat `key = value` file, then
//! command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dirichlet_lab::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Model,
    Eigen,
    Rearrange,
    Flow,
    Schwarz,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Model => "model",
            ExperimentKind::Eigen => "eigen",
            ExperimentKind::Rearrange => "rearrange",
            ExperimentKind::Flow => "flow",
            ExperimentKind::Schwarz => "schwarz",
            ExperimentKind::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub out: PathBuf,
    pub seed: u64,
    /// Target mesh edge length.
    pub h: f64,
    /// Relative tolerance of inequality checks (floor of the FEM-based policy).
    pub tol: f64,
    pub eigen_tol: f64,
    pub assume_small: bool,
    /// Built-in shape name or a curve CSV path.
    pub shape: String,
    /// `euclidean`, `poincare` or `poincare:<kappa>`.
    pub surface: String,
    pub levels: usize,
    pub n: usize,
    pub kappa: f64,
    pub r: f64,
    /// `unit` or `curvature`.
    pub law: String,
    pub dt: f64,
    pub steps: usize,
    /// Polynomial coefficients `a1,a2,...`, each `re` or `re:im`.
    pub map: String,
    /// `start:end:count` or a comma list.
    pub t_grid: String,
    /// Optional `dilation:c` or `inversion:scale:pole`.
    pub mobius: Option<String>,
    pub mobius_n: usize,
    /// `corrected` or `stated`.
    pub hypothesis: String,
    pub suite: String,
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            out: PathBuf::from("out"),
            seed: 0,
            h: 0.03,
            tol: 0.005,
            eigen_tol: 1e-10,
            assume_small: false,
            shape: "square".into(),
            surface: "euclidean".into(),
            levels: 256,
            n: 2,
            kappa: 0.0,
            r: 1.0,
            law: "unit".into(),
            dt: 0.005,
            steps: 50,
            map: "1,0.1".into(),
            t_grid: "0.6:1.4:9".into(),
            mobius: None,
            mobius_n: 3,
            hypothesis: "corrected".into(),
            suite: "all".into(),
            samples: 5,
        }
    }

    /// Sets one field from its textual value. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse(&key, value)?,
            "h" => self.h = parse(&key, value)?,
            "tol" => self.tol = parse(&key, value)?,
            "eigen_tol" => self.eigen_tol = parse(&key, value)?,
            "assume_small" => self.assume_small = parse(&key, value)?,
            "shape" => self.shape = value.to_string(),
            "surface" => self.surface = value.to_string(),
            "levels" => self.levels = parse(&key, value)?,
            "n" => self.n = parse(&key, value)?,
            "kappa" => self.kappa = parse(&key, value)?,
            "r" => self.r = parse(&key, value)?,
            "law" => self.law = value.to_string(),
            "dt" => self.dt = parse(&key, value)?,
            "steps" => self.steps = parse(&key, value)?,
            "map" => self.map = value.to_string(),
            "t_grid" => self.t_grid = value.to_string(),
            "mobius" => self.mobius = Some(value.to_string()),
            "mobius_n" => self.mobius_n = parse(&key, value)?,
            "hypothesis" => self.hypothesis = value.to_string(),
            "suite" => self.suite = value.to_string(),
            "samples" => self.samples = parse(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("{origin}:{}: expected `key = value`, got `{line}`", i + 1)));
            };
            self.set(k, v).map_err(|e| Error::Config(format!("{origin}:{}: {}", i + 1, strip(e))))?;
        }
        Ok(())
    }

    /// Range checks for every numeric field.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Config(format!("field `{field}`: {why}")));
        if !(self.h > 0.0 && self.h <= 0.5) {
            return bad("h", format!("mesh size must lie in (0, 0.5], got {}", self.h));
        }
        if !(self.tol > 0.0 && self.tol <= 0.1) {
            return bad("tol", format!("relative tolerance must lie in (0, 0.1], got {}", self.tol));
        }
        if !(1e-12..=1e-2).contains(&self.eigen_tol) {
            return bad("eigen_tol", format!("must lie in [1e-12, 1e-2], got {}", self.eigen_tol));
        }
        if self.levels < 64 {
            return bad("levels", format!("need at least 64 levels, got {}", self.levels));
        }
        if self.n < 2 {
            return bad("n", format!("dimension must be at least 2, got {}", self.n));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad("kappa", format!("must be finite and nonnegative, got {}", self.kappa));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad("r", format!("radius must be positive, got {}", self.r));
        }
        if !(self.dt > 0.0) {
            return bad("dt", format!("time step must be positive, got {}", self.dt));
        }
        if self.steps < 2 {
            return bad("steps", format!("need at least 2 steps, got {}", self.steps));
        }
        if !matches!(self.hypothesis.as_str(), "corrected" | "stated") {
            return bad("hypothesis", format!("expected `corrected` or `stated`, got `{}`", self.hypothesis));
        }
        Ok(())
    }

    /// Key/value pairs recorded in every report.
    pub fn environment(&self) -> BTreeMap<String, String> {
        let mut env = BTreeMap::new();
        env.insert("experiment".into(), self.kind.to_string());
        env.insert("seed".into(), self.seed.to_string());
        env.insert("h".into(), self.h.to_string());
        env.insert("tol".into(), self.tol.to_string());
        env.insert("eigen_tol".into(), self.eigen_tol.to_string());
        env.insert("assume_small".into(), self.assume_small.to_string());
        match self.kind {
            ExperimentKind::Model => {
                env.insert("n".into(), self.n.to_string());
                env.insert("kappa".into(), self.kappa.to_string());
                env.insert("r".into(), self.r.to_string());
            }
            ExperimentKind::Verify => {
                env.insert("suite".into(), self.suite.clone());
                env.insert("samples".into(), self.samples.to_string());
            }
            _ => {
                env.insert("shape".into(), self.shape.clone());
                env.insert("surface".into(), self.surface.clone());
            }
        }
        match self.kind {
            ExperimentKind::Rearrange => {
                env.insert("levels".into(), self.levels.to_string());
            }
            ExperimentKind::Flow => {
                env.insert("law".into(), self.law.clone());
                env.insert("dt".into(), self.dt.to_string());
                env.insert("steps".into(), self.steps.to_string());
            }
            ExperimentKind::Schwarz => {
                env.insert("map".into(), self.map.clone());
                env.insert("t_grid".into(), self.t_grid.clone());
                if let Some(m) = &self.mobius {
                    env.insert("mobius".into(), m.clone());
                    env.insert("mobius_n".into(), self.mobius_n.to_string());
                    env.insert("hypothesis".into(), self.hypothesis.clone());
                }
            }
            _ => {}
        }
        env
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::Config(format!("field `{key}`: invalid value `{value}` ({e})")))
}

/// `start:end:count` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let err = |m: String| Error::Config(format!("field `t_grid`: {m}"));
    let parts: Vec<&str> = text.split(':').collect();
    let grid: Vec<f64> = if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| err(format!("bad start `{}`", parts[0])))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| err(format!("bad end `{}`", parts[1])))?;
        let k: usize = parts[2].trim().parse().map_err(|_| err(format!("bad count `{}`", parts[2])))?;
        match k {
            0 => return Err(err("count must be positive".into())),
            1 => vec![a],
            _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
        }
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| err(format!("bad value `{s}`"))))
            .collect::<Result<_>>()?
    };
    if grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(err("radii must be positive".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Eigen);
        cfg.apply_text("# run\nh = 0.05\nshape = disk  # comment\nassume-small = true\n", "cfg").unwrap();
        assert_eq!(cfg.h, 0.05);
        assert_eq!(cfg.shape, "disk");
        assert!(cfg.assume_small);
        cfg.set("h", "0.02").unwrap();
        assert_eq!(cfg.h, 0.02);
        cfg.validate().unwrap();
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Eigen);
        let e = cfg.apply_text("h = 0.05\ntol = abc\n", "run.cfg").unwrap_err().to_string();
        assert!(e.contains("run.cfg:2") && e.contains("`tol`"), "{e}");
        let e = cfg.apply_text("colour = red\n", "run.cfg").unwrap_err().to_string();
        assert!(e.contains("run.cfg:1") && e.contains("colour"), "{e}");
        let e = cfg.apply_text("just text\n", "run.cfg").unwrap_err().to_string();
        assert!(e.contains("key = value"), "{e}");
    }

    #[test]
    fn ranges_are_enforced() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Eigen);
        cfg.eigen_tol = 1.0;
        assert!(cfg.validate().unwrap_err().to_string().contains("eigen_tol"));
        let mut cfg = ExperimentConfig::new(ExperimentKind::Flow);
        cfg.steps = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("0.6:1.4:5").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[2] - 1.0).abs() < 1e-15 && (g[4] - 1.4).abs() < 1e-15);
        assert_eq!(parse_grid("0.5, 1").unwrap(), vec![0.5, 1.0]);
        assert!(parse_grid("0:1:3").is_err());
        assert!(parse_grid("a:b").is_err());
    }
}
