//! Uniform grids on an interval or rectangle with a zero-Dirichlet boundary
//! mask, nodal fields, cell-centered gradients, and the quadrature rules the
//! energy and the norms are built on.
//!
//! Nodes carry trapezoid weights, cells carry midpoint weights. Gradients are
//! cell-centered first differences (in 2D the gradient of the bilinear
//! interpolant averaged to the cell center), so the discrete energy has an
//! exactly computable gradient with respect to nodal values.

use std::io::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Spatial point. 1D problems use `[x, 0.0]`.
pub type Point = [f64; 2];

/// Bounded axis-aligned domain (0, extent\[0\]) or (0,e0)×(0,e1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub dim: usize,
    pub extent: [f64; 2],
}

impl Domain {
    pub fn interval(len: f64) -> Self {
        Domain { dim: 1, extent: [len, 0.0] }
    }

    pub fn rectangle(lx: f64, ly: f64) -> Self {
        Domain { dim: 2, extent: [lx, ly] }
    }

    pub fn unit_interval() -> Self {
        Self::interval(1.0)
    }

    pub fn measure(&self) -> f64 {
        if self.dim == 1 { self.extent[0] } else { self.extent[0] * self.extent[1] }
    }

    /// Deterministic interior sample points, roughly uniform per axis.
    pub fn sample_points(&self, count: usize) -> Vec<Point> {
        let mut pts = Vec::with_capacity(count);
        if self.dim == 1 {
            for i in 0..count {
                let x = (i as f64 + 0.5) / count as f64 * self.extent[0];
                pts.push([x, 0.0]);
            }
        } else {
            let side = (count as f64).sqrt().ceil() as usize;
            'outer: for j in 0..side {
                for i in 0..side {
                    if pts.len() == count {
                        break 'outer;
                    }
                    let x = (i as f64 + 0.5) / side as f64 * self.extent[0];
                    let y = (j as f64 + 0.5) / side as f64 * self.extent[1];
                    pts.push([x, y]);
                }
            }
        }
        pts
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        let x = rng.random_range(0.0..self.extent[0]);
        let y = if self.dim == 2 { rng.random_range(0.0..self.extent[1]) } else { 0.0 };
        [x, y]
    }

    pub fn contains(&self, p: Point) -> bool {
        let in_x = p[0] >= 0.0 && p[0] <= self.extent[0];
        if self.dim == 1 {
            in_x
        } else {
            in_x && p[1] >= 0.0 && p[1] <= self.extent[1]
        }
    }
}

/// Uniform tensor grid. Node `(i, j)` sits at `(i*h[0], j*h[1])`; cells are
/// the `h[0]×h[1]` boxes between nodes.
#[derive(Debug)]
pub struct Grid {
    pub dim: usize,
    /// Nodes per axis; `n[1] == 1` in 1D.
    pub n: [usize; 2],
    pub extent: [f64; 2],
    pub h: [f64; 2],
    boundary: Vec<bool>,
    node_pts: Vec<Point>,
    node_w: Vec<f64>,
    cell_pts: Vec<Point>,
    cell_w: Vec<f64>,
}

impl Grid {
    pub fn line(n: usize, len: f64) -> Result<Arc<Grid>> {
        Self::build(1, [n, 1], [len, 0.0])
    }

    pub fn rect(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Grid>> {
        Self::build(2, [nx, ny], [lx, ly])
    }

    fn build(dim: usize, n: [usize; 2], extent: [f64; 2]) -> Result<Arc<Grid>> {
        if n[0] < 3 || (dim == 2 && n[1] < 3) {
            return Err(Error::InvalidInput(format!("grid needs >= 3 nodes per axis, got {n:?}")));
        }
        if extent[0] <= 0.0 || (dim == 2 && extent[1] <= 0.0) {
            return Err(Error::InvalidInput(format!("non-positive extent {extent:?}")));
        }
        let hx = extent[0] / (n[0] - 1) as f64;
        let hy = if dim == 2 { extent[1] / (n[1] - 1) as f64 } else { 0.0 };

        let (nx, ny) = (n[0], if dim == 2 { n[1] } else { 1 });
        let mut boundary = vec![false; nx * ny];
        let mut node_pts = Vec::with_capacity(nx * ny);
        let mut node_w = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let on_bd = i == 0 || i == nx - 1 || (dim == 2 && (j == 0 || j == ny - 1));
                boundary[j * nx + i] = on_bd;
                let x = i as f64 * hx;
                let y = if dim == 2 { j as f64 * hy } else { 0.0 };
                node_pts.push([x, y]);
                let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                let wy = if dim == 2 {
                    if j == 0 || j == ny - 1 { 0.5 } else { 1.0 }
                } else {
                    1.0
                };
                let w = if dim == 2 { wx * wy * hx * hy } else { wx * hx };
                node_w.push(w);
            }
        }

        let (cx, cy) = (nx - 1, if dim == 2 { ny - 1 } else { 1 });
        let mut cell_pts = Vec::with_capacity(cx * cy);
        let mut cell_w = Vec::with_capacity(cx * cy);
        let vol = if dim == 2 { hx * hy } else { hx };
        for j in 0..cy {
            for i in 0..cx {
                let x = (i as f64 + 0.5) * hx;
                let y = if dim == 2 { (j as f64 + 0.5) * hy } else { 0.0 };
                cell_pts.push([x, y]);
                cell_w.push(vol);
            }
        }

        Ok(Arc::new(Grid {
            dim,
            n: [nx, ny],
            extent,
            h: [hx, hy],
            boundary,
            node_pts,
            node_w,
            cell_pts,
            cell_w,
        }))
    }

    pub fn node_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn cell_count(&self) -> usize {
        if self.dim == 1 { self.n[0] - 1 } else { (self.n[0] - 1) * (self.n[1] - 1) }
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.boundary[idx]
    }

    pub fn node_points(&self) -> &[Point] {
        &self.node_pts
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_w
    }

    pub fn cell_points(&self) -> &[Point] {
        &self.cell_pts
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_w
    }

    pub fn domain(&self) -> Domain {
        Domain { dim: self.dim, extent: self.extent }
    }

    /// Midpoint rule over cells; exact for constants.
    pub fn integrate_cells(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.cell_count() {
            return Err(Error::InvalidInput(format!(
                "cell data length {} does not match cell count {}",
                w.len(),
                self.cell_count()
            )));
        }
        Ok(w.iter().zip(&self.cell_w).map(|(v, wt)| v * wt).sum())
    }

    /// Trapezoid weights over nodes; exact for linear nodal data in 1D.
    pub fn integrate_nodes(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.node_count() {
            return Err(Error::InvalidInput(format!(
                "node data length {} does not match node count {}",
                w.len(),
                self.node_count()
            )));
        }
        Ok(w.iter().zip(&self.node_w).map(|(v, wt)| v * wt).sum())
    }
}

/// Nodal real values on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field { grid: grid.clone(), values: vec![0.0; grid.node_count()] }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidInput(format!(
                "field length {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Field { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Point) -> f64) -> Field {
        let values = grid.node_pts.iter().map(|&p| f(p)).collect();
        Field { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Zero all boundary nodes in place.
    pub fn project_dirichlet(&mut self) {
        for (i, v) in self.values.iter_mut().enumerate() {
            if self.grid.boundary[i] {
                *v = 0.0;
            }
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| !self.grid.boundary[i] || *v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    /// self + c * other
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        debug_assert_eq!(self.values.len(), other.values.len());
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Field { grid: self.grid.clone(), values }
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Cell-centered gradient. 1D: forward difference per cell. 2D: gradient
    /// of the bilinear interpolant averaged to the cell center.
    pub fn grad(&self) -> GradField {
        let g = &self.grid;
        let mut comps = Vec::with_capacity(g.cell_count());
        let nx = g.n[0];
        if g.dim == 1 {
            let hx = g.h[0];
            for i in 0..nx - 1 {
                comps.push([(self.values[i + 1] - self.values[i]) / hx, 0.0]);
            }
        } else {
            let (hx, hy) = (g.h[0], g.h[1]);
            for j in 0..g.n[1] - 1 {
                for i in 0..nx - 1 {
                    let u00 = self.values[j * nx + i];
                    let u10 = self.values[j * nx + i + 1];
                    let u01 = self.values[(j + 1) * nx + i];
                    let u11 = self.values[(j + 1) * nx + i + 1];
                    let gx = (u10 + u11 - u00 - u01) / (2.0 * hx);
                    let gy = (u01 + u11 - u00 - u10) / (2.0 * hy);
                    comps.push([gx, gy]);
                }
            }
        }
        GradField { grid: self.grid.clone(), comps }
    }

    /// Write as CSV: node index per axis, coordinates, value; 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        let g = &self.grid;
        if g.dim == 1 {
            writeln!(out, "i,x,value")?;
            for i in 0..g.n[0] {
                let p = g.node_pts[i];
                writeln!(out, "{},{:.16e},{:.16e}", i, p[0], self.values[i])?;
            }
        } else {
            writeln!(out, "i,j,x,y,value")?;
            for j in 0..g.n[1] {
                for i in 0..g.n[0] {
                    let idx = g.node_index(i, j);
                    let p = g.node_pts[idx];
                    writeln!(out, "{},{},{:.16e},{:.16e},{:.16e}", i, j, p[0], p[1], self.values[idx])?;
                }
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// Per-cell gradient vectors produced by [`Field::grad`].
#[derive(Debug, Clone)]
pub struct GradField {
    grid: Arc<Grid>,
    comps: Vec<[f64; 2]>,
}

impl GradField {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> &[[f64; 2]] {
        &self.comps
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.comps.iter().map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt()).collect()
    }
}

/// Seed-deterministic field, uniform in [-amplitude, amplitude] on interior
/// nodes, zero on the boundary.
pub fn random_dirichlet_field(grid: &Arc<Grid>, seed: u64, amplitude: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Field::zeros(grid);
    for i in 0..grid.node_count() {
        if !grid.is_boundary(i) {
            f.values[i] = if amplitude > 0.0 {
                rng.random_range(-amplitude..=amplitude)
            } else {
                0.0
            };
        }
    }
    f
}

/// Smooth compactly supported seed function
/// `amplitude * max(0, 1 - (|x-center|/radius)^2)^2`, zeroed on the boundary.
pub fn bump_field(grid: &Arc<Grid>, center: Point, radius: f64, amplitude: f64) -> Field {
    let mut f = Field::from_fn(grid, |p| {
        let dx = p[0] - center[0];
        let dy = if grid.dim == 2 { p[1] - center[1] } else { 0.0 };
        let r2 = (dx * dx + dy * dy) / (radius * radius);
        let s = (1.0 - r2).max(0.0);
        amplitude * s * s
    });
    f.project_dirichlet();
    f
}
