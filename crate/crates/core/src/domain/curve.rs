//! Closed polygonal boundary curves and built-in shapes.

use rand::Rng;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Closed, simple, counter-clockwise polygon with at least 8 vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    vertices: Vec<Point>,
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

pub(crate) fn signed_area_of(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

/// Index pairs of non-adjacent edges that intersect, found with a uniform
/// bucket grid.
fn first_crossing(v: &[Point]) -> Option<(usize, usize)> {
    let n = v.len();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in v {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let cells = ((n as f64).sqrt().ceil() as usize).max(1);
    let span = [(hi[0] - lo[0]).max(1e-300), (hi[1] - lo[1]).max(1e-300)];
    let cell_of = |x: f64, k: usize| (((x - lo[k]) / span[k] * cells as f64) as usize).min(cells - 1);
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for cx in cell_of(a[0].min(b[0]), 0)..=cell_of(a[0].max(b[0]), 0) {
            for cy in cell_of(a[1].min(b[1]), 1)..=cell_of(a[1].max(b[1]), 1) {
                grid[cx * cells + cy].push(i);
            }
        }
    }
    for bucket in &grid {
        for (ii, &i) in bucket.iter().enumerate() {
            for &j in &bucket[ii + 1..] {
                let adjacent = (i + 1) % n == j || (j + 1) % n == i;
                if adjacent {
                    continue;
                }
                if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
    }
    None
}

impl BoundaryCurve {
    /// Validates and wraps a vertex list (implicitly closed).
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 8 {
            return Err(Error::Geometry(format!("curve needs at least 8 vertices, got {n}")));
        }
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Geometry("non-finite vertex coordinate".into()));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::Geometry(format!("vertices {i} and {} coincide", (i + 1) % n)));
            }
        }
        // a fold-back at a vertex makes adjacent edges overlap
        for i in 0..n {
            let (a, b, c) = (vertices[(i + n - 1) % n], vertices[i], vertices[(i + 1) % n]);
            let (u, w) = (sub(a, b), sub(c, b));
            if cross(u, w) == 0.0 && u[0] * w[0] + u[1] * w[1] > 0.0 {
                return Err(Error::Geometry(format!("curve folds back at vertex {i}")));
            }
        }
        if let Some((i, j)) = first_crossing(&vertices) {
            return Err(Error::Geometry(format!("curve is not simple: edges {i} and {j} intersect")));
        }
        let area = signed_area_of(&vertices);
        if !(area > 0.0) {
            return Err(Error::Geometry(format!("curve must be counter-clockwise (signed area {area:e})")));
        }
        Ok(BoundaryCurve { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn signed_area(&self) -> f64 {
        signed_area_of(&self.vertices)
    }

    pub fn euclidean_perimeter(&self) -> f64 {
        (0..self.len()).map(|i| {
            let (a, b) = self.edge(i);
            dist(a, b)
        }).sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(dist(*a, *b));
            }
        }
        d
    }

    pub fn max_radius(&self) -> f64 {
        self.vertices.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> Point {
        let a = self.signed_area();
        let n = self.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (p, q) = self.edge(i);
            let c = cross(p, q);
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    /// Outward unit normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> Point {
        let (a, b) = self.edge(i);
        let d = sub(b, a);
        let l = d[0].hypot(d[1]);
        [d[1] / l, -d[0] / l]
    }

    /// Outward unit normal at vertex `i`, bisecting the adjacent edge normals.
    pub fn vertex_normal(&self, i: usize) -> Point {
        let n = self.len();
        let na = self.edge_normal((i + n - 1) % n);
        let nb = self.edge_normal(i);
        let s = [na[0] + nb[0], na[1] + nb[1]];
        let l = s[0].hypot(s[1]);
        if l < 1e-14 {
            return nb;
        }
        [s[0] / l, s[1] / l]
    }

    /// Exterior turning angle at vertex `i` (positive for a convex corner).
    pub fn turning_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let a = sub(self.vertex(i), self.vertex(i + n - 1));
        let b = sub(self.vertex(i + 1), self.vertex(i));
        cross(a, b).atan2(a[0] * b[0] + a[1] * b[1])
    }

    pub fn is_convex(&self) -> bool {
        (0..self.len()).all(|i| self.turning_angle(i) >= 0.0)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        self.map(|p| [t * p[0], t * p[1]])
    }

    pub fn translated(&self, d: Point) -> Result<Self> {
        self.map(|p| [p[0] + d[0], p[1] + d[1]])
    }

    /// Reads a CSV with header `x,y`, one vertex per row.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
            return Err(Error::Input(format!("curve CSV header must be `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut vertices = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Input(format!("curve CSV row {}: bad field {}", line + 2, k + 1)))
            };
            vertices.push([parse(0)?, parse(1)?]);
        }
        Self::new(vertices)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| Error::Input(format!("cannot open curve file {}: {e}", path.display())))?;
        Self::read_csv(f)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "y"])?;
        for p in &self.vertices {
            wtr.write_record([crate::report::fmt12(p[0]), crate::report::fmt12(p[1])])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Axis-aligned square centred at `center` with `per_side` vertices per side.
pub fn square(center: Point, side: f64, per_side: usize) -> Result<BoundaryCurve> {
    let per_side = per_side.max(2);
    let h = 0.5 * side;
    let corners = [[-h, -h], [h, -h], [h, h], [-h, h]];
    let mut v = Vec::with_capacity(4 * per_side);
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        for j in 0..per_side {
            let s = j as f64 / per_side as f64;
            v.push([center[0] + a[0] + s * (b[0] - a[0]), center[1] + a[1] + s * (b[1] - a[1])]);
        }
    }
    BoundaryCurve::new(v)
}

/// Regular `n`-gon inscribed in the circle of the given radius.
pub fn disk(center: Point, radius: f64, n: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new(
        (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect(),
    )
}

/// Regular polygon with `sides` corners on the circle of radius
/// `circumradius`, each side split into `per_side` edges.
pub fn regular_polygon(center: Point, circumradius: f64, sides: usize, per_side: usize) -> Result<BoundaryCurve> {
    if sides < 3 {
        return Err(Error::Geometry(format!("a polygon needs at least 3 sides, got {sides}")));
    }
    let corner = |k: usize| {
        let a = 2.0 * PI * k as f64 / sides as f64;
        [center[0] + circumradius * a.cos(), center[1] + circumradius * a.sin()]
    };
    let per_side = per_side.max(1);
    let mut v = Vec::with_capacity(sides * per_side);
    for k in 0..sides {
        let (a, b) = (corner(k), corner(k + 1));
        for j in 0..per_side {
            let s = j as f64 / per_side as f64;
            v.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    BoundaryCurve::new(v)
}

/// Ellipse with semi-axes `a` (along x) and `b`, sampled at uniform angle.
pub fn ellipse(a: f64, b: f64, n: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new(
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                [a * t.cos(), b * t.sin()]
            })
            .collect(),
    )
}

/// Circle of hyperbolic radius `r` about the origin of the Poincaré disk of
/// curvature `−κ²`: Euclidean radius `tanh(κr/2)`.
pub fn poincare_geodesic_disk(r: f64, kappa: f64, n: usize) -> Result<BoundaryCurve> {
    if !(r > 0.0 && kappa > 0.0) {
        return Err(Error::Domain(format!("need r > 0 and κ > 0, got r = {r}, κ = {kappa}")));
    }
    disk([0.0, 0.0], (0.5 * kappa * r).tanh(), n)
}

/// Random convex polygon (Valtr's construction) with 8 to 14 vertices,
/// centred at its centroid and scaled so its farthest vertex is at `radius`.
/// Shapes with an interior angle below 40° or very thin outlines are
/// redrawn.
pub fn random_convex<R: Rng>(rng: &mut R, radius: f64) -> Result<BoundaryCurve> {
    for _ in 0..1000 {
        let k = rng.gen_range(8..=14);
        let v = valtr(rng, k);
        let Ok(curve) = BoundaryCurve::new(v) else { continue };
        let c = curve.centroid();
        let Ok(curve) = curve.translated([-c[0], -c[1]]) else { continue };
        let rmax = curve.max_radius();
        let Ok(curve) = curve.scaled(radius / rmax) else { continue };
        let min_interior = (0..curve.len()).map(|i| PI - curve.turning_angle(i)).fold(PI, f64::min);
        let fill = curve.signed_area() / (PI * radius * radius);
        if curve.is_convex() && min_interior > 40f64.to_radians() && fill > 0.35 {
            return Ok(curve);
        }
    }
    Err(Error::Geometry("could not draw an acceptable convex polygon".into()))
}

fn valtr<R: Rng>(rng: &mut R, k: usize) -> Vec<Point> {
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    let mut ys: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let chains = |s: &[f64], rng: &mut R| -> Vec<f64> {
        let (min, max) = (s[0], s[k - 1]);
        let (mut last_a, mut last_b) = (min, min);
        let mut out = Vec::with_capacity(k);
        for &x in &s[1..k - 1] {
            if rng.gen::<bool>() {
                out.push(x - last_a);
                last_a = x;
            } else {
                out.push(last_b - x);
                last_b = x;
            }
        }
        out.push(max - last_a);
        out.push(last_b - max);
        out
    };
    let dx = chains(&xs, rng);
    let mut dy = chains(&ys, rng);
    // Fisher-Yates pairing of x and y steps
    for i in (1..dy.len()).rev() {
        let j = rng.gen_range(0..=i);
        dy.swap(i, j);
    }
    let mut steps: Vec<Point> = dx.into_iter().zip(dy).map(|(a, b)| [a, b]).collect();
    steps.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let mut v = Vec::with_capacity(k);
    let mut p = [0.0, 0.0];
    for s in steps {
        v.push(p);
        p = [p[0] + s[0], p[1] + s[1]];
    }
    v
}
