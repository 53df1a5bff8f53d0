//! Uniform periodic lattice on the centered box `[-L/2, L/2)^D`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Uniform periodic grid: `D` axes (2 or 3), `N` points per axis (a power of
/// two, `N >= 4`), box length `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    d: usize,
    n: usize,
    l: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, l: f64) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {d}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be a power of two >= 4, got {n}"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!("box length must be positive, got {l}")));
        }
        Ok(Grid { d, n, l })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.l
    }

    /// Total node count `N^D`.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Lattice spacing `L / N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Quadrature weight of one cell, `(L/N)^D`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        match self.d {
            2 => h * h,
            _ => h * h * h,
        }
    }

    /// Row-major stride of `axis` (axis 0 is slowest).
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    /// Decompose a flat index into per-axis indices.
    #[inline]
    pub fn indices(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.d).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Flatten per-axis indices (entries beyond `D` ignored).
    #[inline]
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        let mut f = 0usize;
        for axis in 0..self.d {
            f = f * self.n + idx[axis];
        }
        f
    }

    /// Physical coordinate of node index `i` along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing() - 0.5 * self.l
    }

    /// Physical coordinates of a flat node index (unused axes are 0).
    #[inline]
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.indices(flat);
        let mut x = [0.0f64; 3];
        for axis in 0..self.d {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    /// Euclidean distance from the box center to node `flat`.
    #[inline]
    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.position(flat);
        math::hypot3(x[0], x[1], x[2])
    }

    /// Signed integer mode for spectral index `k` in `0..N`:
    /// `k` for `k <= N/2 - 1`, else `k - N` (so modes lie in `[-N/2, N/2-1]`).
    #[inline]
    pub fn signed_mode(&self, k: usize) -> i64 {
        if k <= self.n / 2 - 1 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Angular wavenumber `2 pi k / L` of spectral index `k`.
    #[inline]
    pub fn omega(&self, k: usize) -> f64 {
        2.0 * core::f64::consts::PI * self.signed_mode(k) as f64 / self.l
    }

    /// True if `k` is the unpaired Nyquist index `N/2`.
    #[inline]
    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.n / 2
    }

    /// Per-axis angular wavenumbers with the Nyquist mode zeroed; this is the
    /// derivative multiplier table.
    pub fn omega_axis_deriv(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| if self.is_nyquist(k) { 0.0 } else { self.omega(k) })
            .collect()
    }

    /// `|omega|^2` for every flat spectral index.
    pub fn omega_sq_table(&self) -> Vec<f64> {
        let per_axis: Vec<f64> = (0..self.n).map(|k| self.omega(k)).collect();
        let total = self.node_count();
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let idx = self.indices(flat);
            let mut s = 0.0;
            for axis in 0..self.d {
                let w = per_axis[idx[axis]];
                s += w * w;
            }
            out.push(s);
        }
        out
    }

    /// Minimum-image displacement between two coordinates on the torus.
    #[inline]
    pub fn min_image(&self, dx: f64) -> f64 {
        let mut dx = dx % self.l;
        if dx < -0.5 * self.l {
            dx += self.l;
        } else if dx >= 0.5 * self.l {
            dx -= self.l;
        }
        dx
    }

    /// Minimum-image distance between two flat node indices.
    pub fn torus_distance(&self, a: usize, b: usize) -> f64 {
        let xa = self.position(a);
        let xb = self.position(b);
        let mut s = 0.0;
        for axis in 0..self.d {
            let dx = self.min_image(xa[axis] - xb[axis]);
            s += dx * dx;
        }
        math::sqrt(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_guards() {
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(3, 6, 1.0).is_err());
        assert!(Grid::new(3, 2, 1.0).is_err());
        assert!(Grid::new(3, 8, -1.0).is_err());
        assert!(Grid::new(3, 8, 1.0).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        for flat in [0usize, 1, 7, 8, 63, 100, 511] {
            assert_eq!(g.flat(g.indices(flat)), flat);
        }
    }

    #[test]
    fn modes_and_nyquist() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|k| g.signed_mode(k)).collect();
        assert_eq!(modes, [0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(g.is_nyquist(4));
        assert_eq!(g.omega_axis_deriv()[4], 0.0);
    }

    #[test]
    fn torus_metric_wraps() {
        let g = Grid::new(2, 8, 8.0).unwrap();
        // nodes at opposite ends of one axis are one spacing apart on the torus
        let a = g.flat([0, 0, 0]);
        let b = g.flat([7, 0, 0]);
        assert!((g.torus_distance(a, b) - 1.0).abs() < 1e-12);
    }
}
