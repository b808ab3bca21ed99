//! Points in dimension 1..=3 and balls.
//!
//! The ambient dimension is a runtime value (the same solvers serve n = 2 and
//! n = 3), so points are fixed-size arrays with an explicit dimension tag
//! rather than const generics.

use serde::Serialize;

/// A point (or vector) in `R^n`, `1 <= n <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    n: usize,
    xs: [f64; 3],
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!((1..=3).contains(&coords.len()), "dimension must be 1..=3");
        let mut xs = [0.0; 3];
        xs[..coords.len()].copy_from_slice(coords);
        Point { n: coords.len(), xs }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point { n: 2, xs: [x, y, 0.0] }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point { n: 3, xs: [x, y, z] }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(&[0.0; 3][..n])
    }

    /// Point on the graph over `xp` at height `v`: `(xp, v)`.
    pub fn graph(xp: &[f64], v: f64) -> Self {
        let mut xs = [0.0; 3];
        xs[..xp.len()].copy_from_slice(xp);
        xs[xp.len()] = v;
        Point { n: xp.len() + 1, xs }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.xs[..self.n]
    }

    pub fn coord(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.xs[i]
    }

    /// First `n-1` coordinates (the graph base point `x'`).
    pub fn horizontal(&self) -> &[f64] {
        &self.xs[..self.n - 1]
    }

    /// Last coordinate `x_n`.
    pub fn vertical(&self) -> f64 {
        self.xs[self.n - 1]
    }

    pub fn with_vertical(&self, v: f64) -> Self {
        let mut p = *self;
        p.xs[self.n - 1] = v;
        p
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.xs[i] * other.xs[i];
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.n, other.n);
        let mut xs = [0.0; 3];
        for i in 0..self.n {
            xs[i] = self.xs[i] + other.xs[i];
        }
        Point { n: self.n, xs }
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.n, other.n);
        let mut xs = [0.0; 3];
        for i in 0..self.n {
            xs[i] = self.xs[i] - other.xs[i];
        }
        Point { n: self.n, xs }
    }

    pub fn scale(&self, c: f64) -> Point {
        let mut xs = [0.0; 3];
        for i in 0..self.n {
            xs[i] = c * self.xs[i];
        }
        Point { n: self.n, xs }
    }

    /// `self + t * dir`.
    pub fn offset(&self, dir: &Point, t: f64) -> Point {
        self.add(&dir.scale(t))
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

/// An open ball `B_R(c)` in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    /// The unit ball `B_1(0)` in dimension `n`.
    pub fn unit(n: usize) -> Self {
        Ball { center: Point::zero(n), radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dist(&self.center) < self.radius
    }

    pub fn boundary_dist(&self, x: &Point) -> f64 {
        self.radius - x.dist(&self.center)
    }

    /// Volume of a ball of radius `r` in dimension `n` (n = 1, 2, 3).
    pub fn volume_of(n: usize, r: f64) -> f64 {
        match n {
            1 => 2.0 * r,
            2 => std::f64::consts::PI * r * r,
            3 => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
            _ => unreachable!("dimension out of range"),
        }
    }

    pub fn volume(&self) -> f64 {
        Self::volume_of(self.dim(), self.radius)
    }
}
