//! Uniform finite-difference grids with homogeneous Dirichlet boundaries.
//!
//! Unknowns live on interior nodes only. Every gradient is a face-centred
//! difference between two neighbouring nodes, where a neighbour lying on the
//! Dirichlet boundary contributes the implicit value zero. On a radial grid
//! the face between the origin and the first node is omitted, which is the
//! discrete form of `u'(0) = 0`.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm};

/// Domain description accepted by [`build_grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Open interval `(a, b)` with `n` interior nodes.
    Interval { a: f64, b: f64, n: usize },
    /// Rectangle `(x0, x1) x (y0, y1)`, row-major with `x` fastest.
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        nx: usize,
        ny: usize,
    },
    /// Radial line `[0, r_max)` for radially symmetric functions on `R^dim`.
    Radial { r_max: f64, dim: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Interval,
    Rectangle,
    Radial,
}

/// One face-centred difference `(u[hi] - u[lo]) / h` with its quadrature weight.
/// `None` stands for a Dirichlet boundary node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Face {
    pub lo: Option<usize>,
    pub hi: Option<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Grid {
    kind: GridKind,
    lower: Vec<f64>,
    upper: Vec<f64>,
    nodes: Vec<usize>,
    spacing: Vec<f64>,
    dim: usize,
    quad_weights: Vec<f64>,
    faces: Vec<Vec<Face>>,
}

/// Nodal values on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Returns `c * self`.
    pub fn scaled(&self, c: f64) -> Field {
        Field::new(self.values.iter().map(|v| c * v).collect())
    }

    pub fn abs(&self) -> Field {
        Field::new(self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl From<Vec<f64>> for Field {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

pub fn build_grid(spec: &GridSpec) -> Result<Grid> {
    match *spec {
        GridSpec::Interval { a, b, n } => {
            check_nodes(n)?;
            check_extent(a, b)?;
            let h = (b - a) / (n + 1) as f64;
            let faces = (0..=n)
                .map(|j| Face {
                    lo: j.checked_sub(1),
                    hi: (j < n).then_some(j),
                    weight: h,
                })
                .collect();
            Ok(Grid {
                kind: GridKind::Interval,
                lower: vec![a],
                upper: vec![b],
                nodes: vec![n],
                spacing: vec![h],
                dim: 1,
                quad_weights: vec![h; n],
                faces: vec![faces],
            })
        }
        GridSpec::Rectangle { x0, x1, y0, y1, nx, ny } => {
            check_nodes(nx)?;
            check_nodes(ny)?;
            check_extent(x0, x1)?;
            check_extent(y0, y1)?;
            let hx = (x1 - x0) / (nx + 1) as f64;
            let hy = (y1 - y0) / (ny + 1) as f64;
            let cell = hx * hy;
            let idx = |i: usize, j: usize| j * nx + i;
            let mut fx = Vec::with_capacity((nx + 1) * ny);
            for j in 0..ny {
                for i in 0..=nx {
                    fx.push(Face {
                        lo: i.checked_sub(1).map(|i| idx(i, j)),
                        hi: (i < nx).then(|| idx(i, j)),
                        weight: cell,
                    });
                }
            }
            let mut fy = Vec::with_capacity(nx * (ny + 1));
            for j in 0..=ny {
                for i in 0..nx {
                    fy.push(Face {
                        lo: j.checked_sub(1).map(|j| idx(i, j)),
                        hi: (j < ny).then(|| idx(i, j)),
                        weight: cell,
                    });
                }
            }
            Ok(Grid {
                kind: GridKind::Rectangle,
                lower: vec![x0, y0],
                upper: vec![x1, y1],
                nodes: vec![nx, ny],
                spacing: vec![hx, hy],
                dim: 2,
                quad_weights: vec![cell; nx * ny],
                faces: vec![fx, fy],
            })
        }
        GridSpec::Radial { r_max, dim, n } => {
            check_nodes(n)?;
            if dim < 1 {
                return Err(Error::InvalidGrid("radial dimension must be at least 1".into()));
            }
            check_extent(0.0, r_max)?;
            let h = r_max / (n + 1) as f64;
            let power = (dim - 1) as i32;
            let quad_weights = (1..=n).map(|i| (i as f64 * h).powi(power) * h).collect();
            // node i sits at r = (i + 1) h; face i joins nodes i and i + 1
            let faces = (0..n)
                .map(|i| Face {
                    lo: Some(i),
                    hi: (i + 1 < n).then_some(i + 1),
                    weight: ((i as f64 + 1.5) * h).powi(power) * h,
                })
                .collect();
            Ok(Grid {
                kind: GridKind::Radial,
                lower: vec![0.0],
                upper: vec![r_max],
                nodes: vec![n],
                spacing: vec![h],
                dim,
                quad_weights,
                faces: vec![faces],
            })
        }
    }
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 interior nodes per axis, got {n}"
        )));
    }
    Ok(())
}

fn check_extent(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidGrid(format!("degenerate extent ({a}, {b})")));
    }
    Ok(())
}

impl Grid {
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Number of interior nodes (the length of every [`Field`] on this grid).
    pub fn len(&self) -> usize {
        self.quad_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad_weights.is_empty()
    }

    pub fn axes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Ambient dimension of a radial grid; 1 for intervals and 2 for rectangles.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub(crate) fn faces(&self, axis: usize) -> &[Face] {
        &self.faces[axis]
    }

    /// Coordinates of interior node `k` (one entry per axis; the radius on radial grids).
    pub fn node(&self, k: usize) -> Vec<f64> {
        match self.kind {
            GridKind::Interval | GridKind::Radial => {
                vec![self.lower[0] + (k + 1) as f64 * self.spacing[0]]
            }
            GridKind::Rectangle => {
                let nx = self.nodes[0];
                let (i, j) = (k % nx, k / nx);
                vec![
                    self.lower[0] + (i + 1) as f64 * self.spacing[0],
                    self.lower[1] + (j + 1) as f64 * self.spacing[1],
                ]
            }
        }
    }

    /// Samples `f` at every interior node.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Field {
        Field::new((0..self.len()).map(|k| f(&self.node(k))).collect())
    }

    /// Distance of node `k` from the origin, used for radial potentials.
    pub fn node_radius(&self, k: usize) -> f64 {
        self.node(k).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: u.len(),
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn face_diff(face: &Face, u: &[f64], inv_h: f64) -> f64 {
    let hi = face.hi.map_or(0.0, |k| u[k]);
    let lo = face.lo.map_or(0.0, |k| u[k]);
    (hi - lo) * inv_h
}

/// Discrete `int grad u . grad v (+ weight u v)` with the grid's quadrature.
pub fn h1_inner(grid: &Grid, u: &[f64], v: &[f64], weight: Option<&[f64]>) -> Result<f64> {
    grid.check(u)?;
    grid.check(v)?;
    let mut acc = 0.0;
    for axis in 0..grid.axes() {
        let inv_h = 1.0 / grid.spacing[axis];
        for face in grid.faces(axis) {
            acc += face.weight * face_diff(face, u, inv_h) * face_diff(face, v, inv_h);
        }
    }
    if let Some(w) = weight {
        grid.check(w)?;
        acc += grid
            .quad_weights
            .iter()
            .zip(w)
            .zip(u.iter().zip(v))
            .map(|((q, w), (a, b))| q * w * a * b)
            .sum::<f64>();
    }
    Ok(acc)
}

pub fn quadrature(grid: &Grid, g: &[f64]) -> Result<f64> {
    grid.check(g)?;
    Ok(dot(&grid.quad_weights, g))
}

/// `int |d_axis u|^p`, using the same face stencil as [`h1_inner`].
pub fn axis_deriv_pnorm(grid: &Grid, u: &[f64], axis: usize, p: f64) -> Result<f64> {
    check_axis(grid, axis, p)?;
    grid.check(u)?;
    let inv_h = 1.0 / grid.spacing[axis];
    Ok(grid
        .faces(axis)
        .iter()
        .map(|f| f.weight * face_diff(f, u, inv_h).abs().powf(p))
        .sum())
}

/// Adds `scale * grad_u int |d_axis u|^p` (Euclidean representative) into `out`.
pub(crate) fn add_axis_pnorm_gradient(grid: &Grid, u: &[f64], axis: usize, p: f64, scale: f64, out: &mut [f64]) {
    let inv_h = 1.0 / grid.spacing[axis];
    for face in grid.faces(axis) {
        let d = face_diff(face, u, inv_h);
        let flux = scale * face.weight * p * d.abs().powf(p - 1.0).copysign(d) * inv_h;
        if let Some(k) = face.hi {
            out[k] += flux;
        }
        if let Some(k) = face.lo {
            out[k] -= flux;
        }
    }
}

fn check_axis(grid: &Grid, axis: usize, p: f64) -> Result<()> {
    if axis >= grid.axes() {
        return Err(Error::AxisOutOfRange {
            axis,
            dims: grid.axes(),
        });
    }
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Symmetric positive definite matrix realising [`h1_inner`], stored as a
/// diagonal plus the strictly lower couplings of every row.
#[derive(Debug, Clone)]
pub struct Stiffness {
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    // diagonal of the incomplete factorisation (D + L) D^-1 (D + L)^T
    pivots: Vec<f64>,
}

impl Stiffness {
    pub fn new(grid: &Grid, weight: Option<&[f64]>) -> Result<Self> {
        Self::assemble(grid, weight, None)
    }

    /// The form `sum_axis sum_faces s[axis][face] w_face (d u)(d v)`, one scale per face.
    pub(crate) fn with_face_scales(grid: &Grid, scales: &[Vec<f64>]) -> Result<Self> {
        Self::assemble(grid, None, Some(scales))
    }

    fn assemble(grid: &Grid, weight: Option<&[f64]>, scales: Option<&[Vec<f64>]>) -> Result<Self> {
        let n = grid.len();
        let mut diag = vec![0.0; n];
        let mut lower: Vec<(usize, usize, f64)> = Vec::new();
        for axis in 0..grid.axes() {
            let inv_h2 = 1.0 / (grid.spacing[axis] * grid.spacing[axis]);
            for (i, face) in grid.faces(axis).iter().enumerate() {
                let c = face.weight * inv_h2 * scales.map_or(1.0, |s| s[axis][i]);
                if let Some(k) = face.hi {
                    diag[k] += c;
                }
                if let Some(k) = face.lo {
                    diag[k] += c;
                }
                if let (Some(a), Some(b)) = (face.lo, face.hi) {
                    lower.push((a.max(b), a.min(b), -c));
                }
            }
        }
        if let Some(w) = weight {
            grid.check(w)?;
            for ((d, q), w) in diag.iter_mut().zip(&grid.quad_weights).zip(w) {
                *d += q * w;
            }
        }
        lower.sort_by_key(|&(row, col, _)| (row, col));
        let mut row_ptr = vec![0; n + 1];
        for &(row, _, _) in &lower {
            row_ptr[row + 1] += 1;
        }
        for k in 0..n {
            row_ptr[k + 1] += row_ptr[k];
        }
        let cols = lower.iter().map(|e| e.1).collect();
        let vals = lower.iter().map(|e| e.2).collect();
        let mut op = Stiffness {
            diag,
            row_ptr,
            cols,
            vals,
            pivots: Vec::new(),
        };
        op.factor();
        Ok(op)
    }

    fn factor(&mut self) {
        let n = self.diag.len();
        let mut pivots = vec![0.0; n];
        for k in 0..n {
            let mut d = self.diag[k];
            for e in self.row_ptr[k]..self.row_ptr[k + 1] {
                d -= self.vals[e] * self.vals[e] / pivots[self.cols[e]];
            }
            pivots[k] = d;
        }
        self.pivots = pivots;
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((y, d), x) in y.iter_mut().zip(&self.diag).zip(x) {
            *y = d * x;
        }
        for row in 0..self.diag.len() {
            for e in self.row_ptr[row]..self.row_ptr[row + 1] {
                let (col, a) = (self.cols[e], self.vals[e]);
                y[row] += a * x[col];
                y[col] += a * x[row];
            }
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        y
    }

    fn precondition(&self, r: &[f64], z: &mut [f64]) {
        let n = self.diag.len();
        // forward: (D + L) y = r
        for k in 0..n {
            let mut s = r[k];
            for e in self.row_ptr[k]..self.row_ptr[k + 1] {
                s -= self.vals[e] * z[self.cols[e]];
            }
            z[k] = s / self.pivots[k];
        }
        // backward: (D + L^T) z = D y
        for k in 0..n {
            z[k] *= self.pivots[k];
        }
        for k in (0..n).rev() {
            z[k] /= self.pivots[k];
            let zk = z[k];
            for e in self.row_ptr[k]..self.row_ptr[k + 1] {
                z[self.cols[e]] -= self.vals[e] * zk;
            }
        }
    }

    /// Preconditioned conjugate gradients for `A d = g`.
    pub fn solve(&self, g: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.len();
        let g_norm = norm(g);
        let mut x = vec![0.0; n];
        if g_norm == 0.0 {
            return Ok(x);
        }
        let mut r = g.to_vec();
        let mut z = vec![0.0; n];
        self.precondition(&r, &mut z);
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let mut res = 1.0;
        for it in 0..max_iter {
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            res = norm(&r) / g_norm;
            if res <= rel_tol {
                return Ok(x);
            }
            self.precondition(&r, &mut z);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for (p, z) in p.iter_mut().zip(&z) {
                *p = z + beta * *p;
            }
            if !res.is_finite() {
                return Err(Error::CgNotConverged {
                    iterations: it + 1,
                    residual: res,
                });
            }
        }
        Err(Error::CgNotConverged {
            iterations: max_iter,
            residual: res,
        })
    }

    pub fn default_max_iter(&self) -> usize {
        4 * self.len() + 100
    }
}

pub const RIESZ_TOL: f64 = 1e-10;

/// Solves `h1_inner(d, v, weight) = <g, v>` for all `v`.
pub fn riesz_solve(grid: &Grid, g: &[f64], weight: Option<&[f64]>) -> Result<Field> {
    grid.check(g)?;
    let op = Stiffness::new(grid, weight)?;
    op.solve(g, RIESZ_TOL, op.default_max_iter()).map(Field::new)
}

/// Dual norm `sqrt(<g, A^-1 g>)` of a Euclidean gradient representative.
pub fn dual_norm(grid: &Grid, g: &[f64], weight: Option<&[f64]>) -> Result<f64> {
    let d = riesz_solve(grid, g, weight)?;
    Ok(dot(g, &d).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn interval(n: usize) -> Grid {
        build_grid(&GridSpec::Interval { a: 0.0, b: 1.0, n }).unwrap()
    }

    fn square(n: usize) -> Grid {
        build_grid(&GridSpec::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            nx: n,
            ny: n,
        })
        .unwrap()
    }

    #[test]
    fn interval_layout() {
        let g = interval(3);
        assert_eq!(g.spacing(), &[0.25]);
        let xs: Vec<f64> = (0..3).map(|k| g.node(k)[0]).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn rectangle_layout() {
        let g = square(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g.spacing(), &[0.25, 0.25]);
        assert_eq!(g.node(4), vec![0.5, 0.5]);
    }

    #[test]
    fn radial_weights() {
        let g = build_grid(&GridSpec::Radial {
            r_max: 10.0,
            dim: 3,
            n: 999,
        })
        .unwrap();
        let h = g.spacing()[0];
        assert_relative_eq!(h, 0.01, epsilon = 1e-15);
        for i in [1usize, 17, 999] {
            let r = i as f64 * h;
            assert_relative_eq!(g.quad_weights()[i - 1], r * r * h, max_relative = 1e-14);
        }
        assert!(g.quad_weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(build_grid(&GridSpec::Interval { a: 0.0, b: 1.0, n: 2 }).is_err());
        assert!(build_grid(&GridSpec::Interval { a: 1.0, b: 1.0, n: 5 }).is_err());
        assert!(build_grid(&GridSpec::Radial {
            r_max: 1.0,
            dim: 0,
            n: 5
        })
        .is_err());
        assert!(build_grid(&GridSpec::Radial {
            r_max: -1.0,
            dim: 2,
            n: 5
        })
        .is_err());
    }

    #[test]
    fn spacing_times_cells_is_length() {
        let g = build_grid(&GridSpec::Rectangle {
            x0: -1.0,
            x1: 2.0,
            y0: 0.5,
            y1: 1.0,
            nx: 7,
            ny: 4,
        })
        .unwrap();
        assert_relative_eq!(g.spacing()[0] * 8.0, 3.0, epsilon = 1e-14);
        assert_relative_eq!(g.spacing()[1] * 5.0, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn sine_energy() {
        let g = interval(511);
        let u = g.sample(|x| (PI * x[0]).sin());
        let e = h1_inner(&g, &u, &u, None).unwrap();
        assert_relative_eq!(e, PI * PI / 2.0, max_relative = 1e-3);
        let one = Field::new(vec![1.0; g.len()]);
        let with_mass = h1_inner(&g, &u, &u, Some(&one)).unwrap();
        assert_relative_eq!(with_mass - e, 0.5, max_relative = 1e-3);
        assert_eq!(h1_inner(&g, &Field::zeros(511), &Field::zeros(511), None).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_examples() {
        let g = interval(99);
        assert_relative_eq!(quadrature(&g, &vec![1.0; 99]).unwrap(), 0.99, epsilon = 1e-14);
        let g = interval(511);
        let s = g.sample(|x| (PI * x[0]).sin());
        assert_relative_eq!(quadrature(&g, &s).unwrap(), 2.0 / PI, max_relative = 1e-3);
        assert_eq!(quadrature(&g, &vec![0.0; 511]).unwrap(), 0.0);
        assert!(quadrature(&g, &[1.0]).is_err());
    }

    #[test]
    fn axis_pnorm_examples() {
        let g = square(255);
        let u = g.sample(|x| (PI * x[0]).sin() * (PI * x[1]).sin());
        let ax = axis_deriv_pnorm(&g, &u, 0, 2.0).unwrap();
        assert_relative_eq!(ax, PI * PI / 4.0, max_relative = 5e-3);
        let sum = ax + axis_deriv_pnorm(&g, &u, 1, 2.0).unwrap();
        let e = h1_inner(&g, &u, &u, None).unwrap();
        assert!((sum - e).abs() <= 1e-12 * e);
        assert_eq!(axis_deriv_pnorm(&g, &Field::zeros(g.len()), 1, 3.0).unwrap(), 0.0);
        assert!(matches!(
            axis_deriv_pnorm(&g, &u, 2, 2.0),
            Err(Error::AxisOutOfRange { .. })
        ));
        assert!(matches!(
            axis_deriv_pnorm(&g, &u, 0, 1.0),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn pnorm_gradient_matches_difference_quotient() {
        let g = square(6);
        let u = g.sample(|x| (3.0 * x[0]).sin() * x[1] * (1.0 - x[1]) + 0.1 * x[0]);
        let p = 1.5;
        let mut grad = vec![0.0; g.len()];
        add_axis_pnorm_gradient(&g, &u, 0, p, 1.0, &mut grad);
        let eps = 1e-6;
        for k in [0, 7, 20, 35] {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += eps;
            dn[k] -= eps;
            let fd =
                (axis_deriv_pnorm(&g, &up, 0, p).unwrap() - axis_deriv_pnorm(&g, &dn, 0, p).unwrap()) / (2.0 * eps);
            assert_relative_eq!(grad[k], fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn stiffness_realises_inner_product() {
        let g = square(5);
        let u = g.sample(|x| x[0] * x[0] - x[1]);
        let v = g.sample(|x| (x[0] + 2.0 * x[1]).cos());
        let op = Stiffness::new(&g, None).unwrap();
        let au = op.mul(&u);
        assert_relative_eq!(dot(&au, &v), h1_inner(&g, &u, &v, None).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn riesz_zero() {
        let g = interval(31);
        assert!(riesz_solve(&g, &vec![0.0; 31], None).unwrap().iter().all(|&x| x == 0.0));
    }
}
