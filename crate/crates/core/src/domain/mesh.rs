//! Triangle meshes of polygonal domains.
//!
//! Meshes are built by constrained Delaunay refinement (spade) with the
//! boundary kept exactly. Vertices `0..n_boundary` are the boundary cycle in
//! counter-clockwise order; the rest are interior.

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::curve::{dist, sub, BoundaryCurve, Point};
use crate::error::{Error, Result};
use crate::numeric::sparse::{CsrMatrix, EnvelopeCholesky};

/// Smallest interior angle accepted for a mesh, in degrees.
pub const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub n_boundary: usize,
    /// For each boundary vertex, the source curve edge and the position
    /// along it in `[0, 1)`.
    pub boundary_param: Vec<(usize, f64)>,
    /// Number of vertices of the source curve.
    pub curve_len: usize,
    pub h: f64,
}

fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn angles(a: Point, b: Point, c: Point) -> [f64; 3] {
    let ang = |p: Point, q: Point, r: Point| {
        let u = sub(q, p);
        let v = sub(r, p);
        (u[0] * v[1] - u[1] * v[0]).abs().atan2(u[0] * v[0] + u[1] * v[1])
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

impl TriMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_interior(&self) -> usize {
        self.vertices.len() - self.n_boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v < self.n_boundary
    }

    /// Boundary edge `i` joins boundary vertices `i` and `i + 1`.
    pub fn boundary_edge(&self, i: usize) -> (usize, usize) {
        (i, (i + 1) % self.n_boundary)
    }

    pub fn boundary_points(&self) -> &[Point] {
        &self.vertices[..self.n_boundary]
    }

    pub fn boundary_curve(&self) -> Result<BoundaryCurve> {
        BoundaryCurve::new(self.boundary_points().to_vec())
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        tri_area(a, b, c)
    }

    pub fn euclidean_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                angles(a, b, c).into_iter().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
            .to_degrees()
    }

    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(i, j)| dist(self.vertices[i], self.vertices[j]))
            .fold(0.0, f64::max)
    }

    /// Checks orientation and the angle bound.
    pub fn validate(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            let a = self.signed_area(t);
            if !(a > 0.0) {
                return Err(Error::Refinement(format!("triangle {t} has signed area {a:e}")));
            }
        }
        let m = self.min_angle_deg();
        if m < MIN_ANGLE_DEG {
            return Err(Error::Refinement(format!("minimum angle {m:.2}° below {MIN_ANGLE_DEG}°")));
        }
        Ok(())
    }

    /// Stable content hash used as a mesh reference.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        };
        for p in &self.vertices {
            eat(p[0].to_bits());
            eat(p[1].to_bits());
        }
        for t in &self.triangles {
            for &i in t {
                eat(i as u64);
            }
        }
        h
    }

    pub fn mesh_ref(&self) -> String {
        format!("{:016x}", self.fingerprint())
    }

    /// Linear-element stiffness matrix of the Euclidean Laplacian.
    pub fn stiffness(&self) -> CsrMatrix {
        let mut trip = Vec::with_capacity(9 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let local = self.local_stiffness(t);
            for i in 0..3 {
                for j in 0..3 {
                    trip.push((tri[i], tri[j], local[i][j]));
                }
            }
        }
        CsrMatrix::from_triplets(self.n_vertices(), trip)
    }

    pub(crate) fn local_stiffness(&self, t: usize) -> [[f64; 3]; 3] {
        let p = self.triangle_points(t);
        let area = tri_area(p[0], p[1], p[2]);
        // gradients of barycentric coordinates times 2·area
        let g = [sub(p[1], p[2]), sub(p[2], p[0]), sub(p[0], p[1])];
        let mut k = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                k[i][j] = (g[i][0] * g[j][0] + g[i][1] * g[j][1]) / (4.0 * area);
            }
        }
        k
    }

    /// Moves the boundary onto `curve` (same vertex count as the source
    /// curve) and extends the displacement harmonically into the interior.
    pub fn transported(&self, curve: &BoundaryCurve) -> Result<TriMesh> {
        if curve.len() != self.curve_len {
            return Err(Error::Geometry(format!(
                "transport needs a curve with {} vertices, got {}",
                self.curve_len,
                curve.len()
            )));
        }
        let nb = self.n_boundary;
        let mut disp_b = vec![[0.0; 2]; nb];
        let mut vertices = self.vertices.clone();
        for (i, &(e, s)) in self.boundary_param.iter().enumerate() {
            let (a, b) = curve.edge(e);
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            disp_b[i] = sub(p, self.vertices[i]);
            vertices[i] = p;
        }
        let ni = self.n_interior();
        if ni > 0 {
            let k = self.stiffness();
            let map_i: Vec<usize> = (0..self.n_vertices()).map(|v| if v >= nb { v - nb } else { usize::MAX }).collect();
            let map_b: Vec<usize> = (0..self.n_vertices()).map(|v| if v < nb { v } else { usize::MAX }).collect();
            let kii = k.submatrix(&map_i, ni, &map_i, ni).into_square();
            let kib = k.submatrix(&map_i, ni, &map_b, nb);
            let (perm, chol) = factor_reordered(&kii)?;
            for c in 0..2 {
                let db: Vec<f64> = disp_b.iter().map(|d| d[c]).collect();
                let rhs: Vec<f64> = kib.mul_vec(&db).into_iter().map(|x| -x).collect();
                let di = solve_reordered(&perm, &chol, &rhs);
                for (k, d) in di.into_iter().enumerate() {
                    vertices[nb + k][c] += d;
                }
            }
        }
        let mesh = TriMesh { vertices, ..self.clone() };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Applies a vertex map. The boundary of the image becomes the source
    /// curve of the new mesh.
    pub fn mapped(&self, f: impl Fn(Point) -> Point) -> Result<TriMesh> {
        let vertices: Vec<Point> = self.vertices.iter().map(|&p| f(p)).collect();
        let nb = self.n_boundary;
        let mesh = TriMesh {
            vertices,
            triangles: self.triangles.clone(),
            n_boundary: nb,
            boundary_param: (0..nb).map(|i| (i, 0.0)).collect(),
            curve_len: nb,
            h: self.h,
        };
        for t in 0..mesh.triangles.len() {
            if !(mesh.signed_area(t) > 0.0) {
                return Err(Error::Injectivity(format!("mapped triangle {t} is inverted")));
            }
        }
        Ok(mesh)
    }

    pub fn scaled(&self, s: f64) -> Result<TriMesh> {
        let mut m = self.mapped(|p| [s * p[0], s * p[1]])?;
        m.boundary_param = self.boundary_param.clone();
        m.curve_len = self.curve_len;
        m.h = self.h * s;
        Ok(m)
    }

    /// Splits every triangle into four. Boundary midpoints may be moved by
    /// `project` (e.g. onto a circle); the boundary stays first in the
    /// vertex order.
    pub fn refine_uniform(&self, project: Option<&dyn Fn(Point) -> Point>) -> Result<TriMesh> {
        let nb = self.n_boundary;
        let nv = self.n_vertices();
        let mut vertices = Vec::with_capacity(4 * nv);
        let mut boundary_param = Vec::with_capacity(2 * nb);
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_index = vec![0usize; nv];
        for i in 0..nb {
            let j = (i + 1) % nb;
            new_index[i] = vertices.len();
            vertices.push(self.vertices[i]);
            boundary_param.push(self.boundary_param[i]);
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let mut m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            if let Some(p) = project {
                m = p(m);
            }
            mid.insert((i.min(j), i.max(j)), vertices.len());
            vertices.push(m);
            let (e, s) = self.boundary_param[i];
            let (e2, s2) = self.boundary_param[j];
            let s_end = if e2 == e { s2 } else { 1.0 };
            boundary_param.push((e, 0.5 * (s + s_end)));
        }
        for v in nb..nv {
            new_index[v] = vertices.len();
            vertices.push(self.vertices[v]);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let mut m = |i: usize, j: usize| -> usize {
                *mid.entry((i.min(j), i.max(j))).or_insert_with(|| {
                    let (p, q) = (self.vertices[i], self.vertices[j]);
                    vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                    vertices.len() - 1
                })
            };
            let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
            let (a, b, c) = (new_index[a], new_index[b], new_index[c]);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mesh = TriMesh {
            vertices,
            triangles,
            n_boundary: 2 * nb,
            boundary_param,
            curve_len: self.curve_len,
            h: 0.5 * self.h,
        };
        for t in 0..mesh.triangles.len() {
            if !(mesh.signed_area(t) > 0.0) {
                return Err(Error::Refinement(format!("refined triangle {t} is inverted")));
            }
        }
        Ok(mesh)
    }

    /// OFF text (z = 0) for external viewers.
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "OFF\n{} {} 0", self.n_vertices(), self.triangles.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{} {} 0", p[0], p[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

pub(crate) fn factor_reordered(a: &CsrMatrix) -> Result<(Vec<usize>, EnvelopeCholesky)> {
    use crate::numeric::sparse::reverse_cuthill_mckee;
    let perm = reverse_cuthill_mckee(a);
    let mut inv = vec![0usize; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let reordered = a.submatrix(&inv, perm.len(), &inv, perm.len()).into_square();
    let chol = EnvelopeCholesky::factor(&reordered).map_err(Error::Assembly)?;
    Ok((perm, chol))
}

pub(crate) fn solve_reordered(perm: &[usize], chol: &EnvelopeCholesky, b: &[f64]) -> Vec<f64> {
    let pb: Vec<f64> = perm.iter().map(|&old| b[old]).collect();
    let px = chol.solve(&pb);
    let mut x = vec![0.0; b.len()];
    for (new, &old) in perm.iter().enumerate() {
        x[old] = px[new];
    }
    x
}

/// Growth rate of boundary segment sizes per unit length.
const SIZE_GRADING: f64 = 0.3;

/// Target boundary segment size at each curve vertex: the shorter adjacent
/// edge, capped at `h` and graded so sizes grow slowly away from short edges.
fn boundary_sizes(curve: &BoundaryCurve, h: f64) -> Vec<f64> {
    let n = curve.len();
    let len: Vec<f64> = (0..n).map(|e| {
        let (a, b) = curve.edge(e);
        dist(a, b)
    }).collect();
    let mut size: Vec<f64> = (0..n).map(|i| h.min(len[i]).min(len[(i + n - 1) % n])).collect();
    // two sweeps in each direction settle the cyclic grading
    for _ in 0..2 {
        for k in 1..=n {
            let (i, j) = (k % n, k - 1);
            size[i] = size[i].min(size[j] + SIZE_GRADING * len[j]);
        }
        for k in (0..n).rev() {
            let j = (k + 1) % n;
            size[k] = size[k].min(size[j] + SIZE_GRADING * len[k]);
        }
    }
    size
}

/// Split positions in `[0, 1)` for an edge of length `l` whose segment size
/// varies linearly from `sa` to `sb` (capped at `h`).
fn edge_split(l: f64, sa: f64, sb: f64, h: f64) -> Vec<f64> {
    let (sa, sb) = (sa.min(h), sb.min(h));
    // number of segments = ∫ dx/σ(x) with σ linear between the end sizes
    let density = |x: f64| -> f64 {
        if (sb - sa).abs() < 1e-12 * sa {
            x / sa
        } else {
            l / (sb - sa) * ((sa + (sb - sa) * x / l) / sa).ln()
        }
    };
    let total = density(l);
    let m = total.round().max((l / h).ceil()).max(1.0) as usize;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        // invert the cumulative density at j·total/m
        let target = total * j as f64 / m as f64;
        let x = if (sb - sa).abs() < 1e-12 * sa {
            target * sa
        } else {
            sa * l / (sb - sa) * ((target * (sb - sa) / l).exp() - 1.0)
        };
        out.push((x / l).clamp(0.0, 1.0));
    }
    out
}

/// Quality triangulation of the curve interior with target edge length `h`.
pub fn triangulate(curve: &BoundaryCurve, h: f64) -> Result<TriMesh> {
    let diam = curve.diameter();
    if !(h > 0.0 && h < 0.25 * diam) {
        return Err(Error::Domain(format!("mesh size must satisfy 0 < h < diameter/4 = {}, got {h}", 0.25 * diam)));
    }
    let mut points = Vec::new();
    let mut boundary_param = Vec::new();
    let size = boundary_sizes(curve, h);
    let n = curve.len();
    for e in 0..n {
        let (a, b) = curve.edge(e);
        for s in edge_split(dist(a, b), size[e], size[(e + 1) % n], h) {
            points.push(Point2::new(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])));
            boundary_param.push((e, s));
        }
    }
    let nb = points.len();
    let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(points, edges)
        .map_err(|e| Error::Geometry(format!("constrained triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != nb {
        return Err(Error::Geometry("boundary has coincident vertices after subdivision".into()));
    }
    // refinement leaves most triangles between half and all of the limit
    let area_limit = 1.4 * 3f64.sqrt() / 4.0 * h * h;
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .keep_constraint_edges()
        .with_angle_limit(AngleLimit::from_deg(25.0))
        .with_max_allowed_area(area_limit)
        .with_max_additional_vertices(50 * nb + (40.0 * curve.signed_area() / area_limit) as usize);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Refinement("vertex budget exhausted during refinement".into()));
    }
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();

    let mut faces = Vec::new();
    for f in cdt.inner_faces() {
        if excluded.contains(&f.fix()) {
            continue;
        }
        let vs = f.vertices();
        faces.push([vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()]);
    }
    // renumber: boundary vertices keep 0..nb, used interior vertices follow
    let positions: Vec<Point> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut index = vec![usize::MAX; positions.len()];
    let mut vertices: Vec<Point> = positions[..nb].to_vec();
    for (i, slot) in index.iter_mut().enumerate().take(nb) {
        *slot = i;
    }
    let mut used = vec![false; positions.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    for v in nb..positions.len() {
        if used[v] {
            index[v] = vertices.len();
            vertices.push(positions[v]);
        }
    }
    if used[..nb].iter().any(|u| !u) {
        return Err(Error::Refinement("a boundary vertex is not covered by any triangle".into()));
    }
    let triangles: Vec<[usize; 3]> = faces
        .into_iter()
        .map(|f| {
            let t = [index[f[0]], index[f[1]], index[f[2]]];
            if tri_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
                [t[0], t[2], t[1]]
            } else {
                t
            }
        })
        .collect();
    let mut mesh = TriMesh { vertices, triangles, n_boundary: nb, boundary_param, curve_len: curve.len(), h };
    if mesh.min_angle_deg() < MIN_ANGLE_DEG {
        smooth_interior(&mut mesh, 10);
    }
    mesh.validate()?;
    Ok(mesh)
}

/// Laplacian smoothing of interior vertices, rejecting moves that invert
/// or worsen an incident triangle.
fn smooth_interior(mesh: &mut TriMesh, passes: usize) {
    let nv = mesh.n_vertices();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        for (i, j) in [(a, b), (b, c), (c, a)] {
            nbrs[i].push(j);
            nbrs[j].push(i);
        }
        for v in [a, b, c] {
            incident[v].push(t);
        }
    }
    let local_min = |m: &TriMesh, v: usize| -> f64 {
        incident[v]
            .iter()
            .map(|&t| {
                let [a, b, c] = m.triangle_points(t);
                if tri_area(a, b, c) <= 0.0 {
                    return -1.0;
                }
                angles(a, b, c).into_iter().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    };
    for _ in 0..passes {
        for v in mesh.n_boundary..nv {
            let k = nbrs[v].len() as f64;
            let c = nbrs[v].iter().fold([0.0, 0.0], |s, &j| [s[0] + mesh.vertices[j][0] / k, s[1] + mesh.vertices[j][1] / k]);
            let before = local_min(mesh, v);
            let old = mesh.vertices[v];
            mesh.vertices[v] = c;
            if local_min(mesh, v) < before {
                mesh.vertices[v] = old;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::curve::{disk, square};

    #[test]
    fn unit_square_mesh() {
        let sq = square([0.5, 0.5], 1.0, 4).unwrap();
        let m = triangulate(&sq, 0.1).unwrap();
        let nt = m.triangles.len();
        assert!((200..=300).contains(&nt), "{nt} triangles");
        assert!(m.min_angle_deg() >= MIN_ANGLE_DEG);
        assert!((m.euclidean_area() - 1.0).abs() < 1e-12);
        assert_eq!(m.n_boundary, 48);
    }

    #[test]
    fn disk_boundary_is_preserved() {
        let c = disk([0.0, 0.0], 1.0, 512).unwrap();
        let m = triangulate(&c, 0.05).unwrap();
        assert_eq!(m.n_boundary, 512);
        for (p, q) in m.boundary_points().iter().zip(c.vertices()) {
            assert_eq!(p, q);
        }
        assert!((m.euclidean_area() - c.signed_area()).abs() < 1e-12);
    }

    #[test]
    fn triangulation_is_deterministic() {
        let c = disk([0.1, 0.0], 0.8, 100).unwrap();
        let a = triangulate(&c, 0.07).unwrap();
        let b = triangulate(&c, 0.07).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn mesh_size_precondition() {
        let sq = square([0.0, 0.0], 1.0, 4).unwrap();
        assert!(triangulate(&sq, 0.0).is_err());
        assert!(triangulate(&sq, 0.5).is_err());
    }

    #[test]
    fn uniform_refinement_keeps_area_and_boundary_order() {
        let sq = square([0.0, 0.0], 2.0, 3).unwrap();
        let m = triangulate(&sq, 0.3).unwrap();
        let r = m.refine_uniform(None).unwrap();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        assert_eq!(r.n_boundary, 2 * m.n_boundary);
        assert!((r.euclidean_area() - 4.0).abs() < 1e-12);
        assert!(r.boundary_curve().is_ok());
        // boundary parameters still reproduce the vertex positions
        for (i, &(e, s)) in r.boundary_param.iter().enumerate() {
            let (a, b) = sq.edge(e);
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            assert!(dist(p, r.vertices[i]) < 1e-14);
        }
    }

    #[test]
    fn transport_reproduces_dilation() {
        let c = disk([0.0, 0.0], 1.0, 64).unwrap();
        let m = triangulate(&c, 0.15).unwrap();
        let moved = m.transported(&c.scaled(1.3).unwrap()).unwrap();
        for (p, q) in m.vertices.iter().zip(&moved.vertices) {
            assert!(dist([1.3 * p[0], 1.3 * p[1]], *q) < 1e-12);
        }
    }

    #[test]
    fn off_export_counts() {
        let sq = square([0.0, 0.0], 1.0, 3).unwrap();
        let m = triangulate(&sq, 0.2).unwrap();
        let off = m.to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next().unwrap(), format!("{} {} 0", m.n_vertices(), m.triangles.len()));
        assert_eq!(off.lines().count(), 2 + m.n_vertices() + m.triangles.len());
    }
}
