use std::io::Write;

use serde::{Deserialize, Serialize};

use super::shapes::{point, BoundingBox, Point};
use crate::error::{Error, Result};

/// Uniform node lattice `origin + (i h, j h)`, `0 ≤ i < nx`, `0 ≤ j < ny`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Precondition(format!("grid spacing must be positive, got {h}")));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::Precondition(format!("grid needs at least 2x2 nodes, got {nx}x{ny}")));
        }
        Ok(Self { origin, h, nx, ny })
    }

    /// Smallest lattice centered on the box center that covers the box.
    pub fn covering(bbox: &BoundingBox, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Precondition(format!("grid spacing must be positive, got {h}")));
        }
        let nx = ((bbox.width() / h - 1e-9).ceil() as usize + 1).max(2);
        let ny = ((bbox.height() / h - 1e-9).ceil() as usize + 1).max(2);
        let c = bbox.center();
        let origin = point(
            c.x - (nx - 1) as f64 * h / 2.0,
            c.y - (ny - 1) as f64 * h / 2.0,
        );
        Self::new(origin, h, nx, ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        self.origin + point(i as f64 * self.h, j as f64 * self.h)
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::new(self.origin, self.node(self.nx - 1, self.ny - 1))
    }

    /// Uniform scaling of the lattice about the coordinate origin.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            origin: self.origin * t,
            h: self.h * t,
            ..*self
        }
    }
}

/// Grid samples of a scalar function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    #[serde(flatten)]
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.coords(k);
                f(grid.node(i, j))
            })
            .collect();
        Self { grid, values }
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Bilinear interpolation; `None` outside the lattice.
    pub fn bilinear(&self, p: &Point) -> Option<f64> {
        let g = &self.grid;
        let x = (p.x - g.origin.x) / g.h;
        let y = (p.y - g.origin.y) / g.h;
        if x < 0.0 || y < 0.0 || x > (g.nx - 1) as f64 || y > (g.ny - 1) as f64 {
            return None;
        }
        let i = (x.floor() as usize).min(g.nx - 2);
        let j = (y.floor() as usize).min(g.ny - 2);
        let fx = x - i as f64;
        let fy = y - j as f64;
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        Some(
            v00 * (1.0 - fx) * (1.0 - fy)
                + v10 * fx * (1.0 - fy)
                + v01 * (1.0 - fx) * fy
                + v11 * fx * fy,
        )
    }

    /// CSV dump with header `x,y,u`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "u"])?;
        for k in 0..self.grid.len() {
            let (i, j) = self.grid.coords(k);
            let p = self.grid.node(i, j);
            w.serialize((p.x, p.y, self.values[k]))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn covering_grid_hits_unit_square_corners() {
        let bb = BoundingBox::new(point(0.0, 0.0), point(1.0, 1.0));
        let g = Grid::covering(&bb, 1.0 / 64.0).unwrap();
        assert_eq!((g.nx, g.ny), (65, 65));
        assert_abs_diff_eq!(g.origin, point(0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn bilinear_reproduces_affine_functions() {
        let g = Grid::new(point(-1.0, 0.5), 0.1, 21, 11).unwrap();
        let f = ScalarField::from_fn(g, |p| 2.0 * p.x - 3.0 * p.y + 1.0);
        let p = point(0.123, 0.777);
        assert_abs_diff_eq!(f.bilinear(&p).unwrap(), 2.0 * p.x - 3.0 * p.y + 1.0, epsilon = 1e-12);
        assert!(f.bilinear(&point(5.0, 0.0)).is_none());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Grid::new(point(0.0, 0.0), 0.0, 3, 3).is_err());
        assert!(Grid::new(point(0.0, 0.0), 0.1, 1, 3).is_err());
        let g = Grid::new(point(0.0, 0.0), 0.1, 2, 2).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 3]).is_err());
        assert!(ScalarField::new(g, vec![0.0, 1.0, f64::NAN, 0.0]).is_err());
    }
}
